//! Disk configurations, contact graphs and the weighted tangency functional.

mod anneal;
mod graph;
mod lattice;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, RigidMotion};

pub use anneal::{maximize_tangencies, RestartOutcome, Schedule, SearchResult};
pub use graph::{graph_certificate, path2_count};
pub use lattice::{lattice_enumerate_max_contacts, LatticeConfiguration, LatticeResult, MAX_LATTICE_N};

/// Contact tolerance relative to the largest radius.
pub const CONTACT_TOL: f64 = 1e-9;

/// Disks with centers and radii. Serialized as `{radii, centers}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskConfiguration {
    pub radii: Vec<f64>,
    pub centers: Vec<Point>,
}

impl DiskConfiguration {
    pub fn new(centers: Vec<Point>, radii: Vec<f64>) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::domain(format!(
                "{} centers for {} radii",
                centers.len(),
                radii.len()
            )));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::domain(format!("radius {r} is not positive")));
        }
        if centers.iter().any(|c| !(c.x.is_finite() && c.y.is_finite())) {
            return Err(Error::domain("center is not finite"));
        }
        Ok(DiskConfiguration { radii, centers })
    }

    /// Disks placed left to right along the x-axis, each tangent to the next.
    pub fn chain(radii: &[f64]) -> Result<Self> {
        let mut centers = Vec::with_capacity(radii.len());
        let mut x = 0.0;
        for (k, &r) in radii.iter().enumerate() {
            if k > 0 {
                x += radii[k - 1] + r;
            }
            centers.push(Point::new(x, 0.0));
        }
        Self::new(centers, radii.to_vec())
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// The default contact tolerance, 1e-9 × the largest radius.
    pub fn default_tol(&self) -> f64 {
        CONTACT_TOL * self.max_radius()
    }

    /// Gap between disks i and j (negative when they overlap).
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        self.centers[i].distance(self.centers[j]) - self.radii[i] - self.radii[j]
    }

    /// Errors on the first pair overlapping by more than `tol`.
    pub fn check_feasible(&self, tol: f64) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let g = self.gap(i, j);
                if g < -tol {
                    return Err(Error::Infeasible { i, j, overlap: -g });
                }
            }
        }
        Ok(())
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.centers.iter().map(|c| *c * lambda).collect(),
            self.radii.iter().map(|r| r * lambda).collect(),
        )
    }

    pub fn transformed(&self, m: &RigidMotion) -> Self {
        DiskConfiguration {
            radii: self.radii.clone(),
            centers: self.centers.iter().map(|c| m.apply(*c)).collect(),
        }
    }

    /// Same disks listed in the order `perm` (new index k holds old disk perm[k]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        DiskConfiguration {
            radii: perm.iter().map(|&k| self.radii[k]).collect(),
            centers: perm.iter().map(|&k| self.centers[k]).collect(),
        }
    }
}

/// 2 r_i r_j / (r_i + r_j).
pub fn harmonic_weight(ri: f64, rj: f64) -> f64 {
    2.0 * ri * rj / (ri + rj)
}

/// Tangency graph with harmonic-mean edge weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
}

impl ContactGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&e)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Edge (i, j) iff |dist − (r_i + r_j)| ≤ tol; overlap beyond tol is an error.
pub fn contact_graph(d: &DiskConfiguration, tol: f64) -> Result<ContactGraph> {
    d.check_feasible(tol)?;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if d.gap(i, j).abs() <= tol {
                edges.push((i, j));
                weights.push(harmonic_weight(d.radii[i], d.radii[j]));
            }
        }
    }
    Ok(ContactGraph {
        n: d.len(),
        edges,
        weights,
    })
}

/// Value of the tangency functional with its contact statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StickyEnergyLedger {
    /// T = −Σ w_ij over contacts.
    #[serde(rename = "T")]
    pub tangency: f64,
    pub contacts: usize,
    pub path2: usize,
}

pub fn ledger_of(g: &ContactGraph) -> StickyEnergyLedger {
    StickyEnergyLedger {
        tangency: -g.total_weight(),
        contacts: g.edges.len(),
        path2: path2_count(g),
    }
}

pub fn tangency_energy(d: &DiskConfiguration, tol: f64) -> Result<StickyEnergyLedger> {
    Ok(ledger_of(&contact_graph(d, tol)?))
}

/// The sticky-disk pair potential at distance `r` (unit contact distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPotential {
    /// Overlap: the potential is +∞.
    Infeasible,
    Value(f64),
}

/// Tolerance of [`sticky_potential`] around the contact distance.
pub const POTENTIAL_TOL: f64 = 1e-9;

pub fn sticky_potential(r: f64) -> PairPotential {
    if r < 1.0 - POTENTIAL_TOL {
        PairPotential::Infeasible
    } else if r <= 1.0 + POTENTIAL_TOL {
        PairPotential::Value(-1.0)
    } else {
        PairPotential::Value(0.0)
    }
}
