use serde::{Deserialize, Serialize};

use super::Cluster;
use crate::error::{Error, Result};
use crate::point::Point;

/// Symmetric (N+1)×(N+1) matrix of interface weights; index 0 is the exterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    n: usize,
    c: Vec<f64>,
}

impl WeightMatrix {
    /// Builds the matrix from its rows. Diagonal entries are ignored.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m < 2 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::domain("weight matrix must be square with at least two rows"));
        }
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (a, b) = (rows[i][j], rows[j][i]);
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::domain(format!("weight c[{i}][{j}] = {a} is not positive")));
                }
                if a != b {
                    return Err(Error::domain(format!(
                        "weight matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(WeightMatrix {
            n: m - 1,
            c: rows.into_iter().flatten().collect(),
        })
    }

    /// All interfaces weighted 1.
    pub fn unit(n: usize) -> Self {
        WeightMatrix {
            n,
            c: vec![1.0; (n + 1) * (n + 1)],
        }
    }

    /// Weight 1 against the exterior and 2 − ε between interior chambers.
    pub fn epsilon(n: usize, eps: f64) -> Result<Self> {
        check_epsilon(eps)?;
        let mut w = Self::unit(n);
        for i in 1..=n {
            for j in 1..=n {
                w.c[i * (n + 1) + j] = 2.0 - eps;
            }
        }
        Ok(w)
    }

    pub fn n_chambers(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * (self.n + 1) + j]
    }

    /// Triples (i, j, k) of distinct indices with c_ij > c_ik + c_kj. These are
    /// warnings: the functional is still well defined.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let m = self.n + 1;
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..m {
                    if k != i && k != j && self.get(i, j) > self.get(i, k) + self.get(k, j) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::domain(format!("ε = {eps} outside [0, 2]")));
    }
    Ok(())
}

/// Σ over segments of c_{left,right}·length: each interface counted once.
pub fn weighted_perimeter(c: &Cluster, w: &WeightMatrix) -> Result<f64> {
    if w.n_chambers() < c.n_chambers() {
        return Err(Error::domain(format!(
            "weight matrix covers {} chambers, cluster has {}",
            w.n_chambers(),
            c.n_chambers()
        )));
    }
    Ok(c
        .segments()
        .iter()
        .enumerate()
        .map(|(k, s)| w.get(s.left, s.right) * c.segment_length(k))
        .sum())
}

/// Weighted perimeter with weight 1 against the exterior and 2 − ε inside.
pub fn p_epsilon(c: &Cluster, eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    Ok(c.segments()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let w = if s.left == 0 || s.right == 0 { 1.0 } else { 2.0 - eps };
            w * c.segment_length(k)
        })
        .sum())
}

/// (1 − ε/2)·Σ_i P(E(i)) + (ε/2)·P(E(0)), an independent evaluation of
/// [`p_epsilon`] through chamber perimeters.
pub fn perimeter_rewriting(c: &Cluster, eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    let inner: f64 = (1..=c.n_chambers()).map(|i| c.chamber_perimeter(i)).sum();
    Ok((1.0 - 0.5 * eps) * inner + 0.5 * eps * c.chamber_perimeter(0))
}

/// (P_ε − Σ 2πr_i) / ((4/3) ε^{3/2}).
pub fn rescaled_energy(c: &Cluster, eps: f64, radii: &[f64]) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("rescaled energy needs ε > 0, got {eps}")));
    }
    let p0: f64 = radii.iter().map(|r| std::f64::consts::TAU * r).sum();
    Ok((p_epsilon(c, eps)? - p0) / (4.0 / 3.0 * eps.powf(1.5)))
}

/// θ_ε = arccos(1 − ε/2): the triple-point angles are (2θ_ε, π − θ_ε, π − θ_ε).
pub fn triple_point_angle(eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    // arccos(1 − ε/2) = 2·asin(√ε / 2) without cancellation near ε = 0
    Ok(2.0 * (0.5 * eps.sqrt()).asin())
}

/// Σ c_ij τ_ij over the segments meeting at `v`, with τ the unit tangent
/// leaving `v`. Zero at a stationary triple point.
pub fn vertex_balance(c: &Cluster, w: &WeightMatrix, v: Point) -> Result<Point> {
    let Some(vid) = c.find_vertex(v) else {
        return Err(Error::domain(format!("({}, {}) is not a vertex", v.x, v.y)));
    };
    let mut sum = Point::ORIGIN;
    let mut count = 0;
    for (k, s) in c.segments().iter().enumerate() {
        let (a, b) = c.segment_ends(k);
        let weight = w.get(s.left, s.right);
        if a == vid {
            sum = sum + s.start_tangent() * weight;
            count += 1;
        }
        if b == vid {
            sum = sum - s.end_tangent() * weight;
            count += 1;
        }
    }
    if count < 3 {
        return Err(Error::domain(format!(
            "vertex ({:.6}, {:.6}) has {count} incident segments, need at least 3",
            v.x, v.y
        )));
    }
    Ok(sum)
}
