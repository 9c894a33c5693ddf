use rayon::prelude::*;
use serde::Serialize;

use super::Cluster;
use crate::point::Point;

/// Default grid resolution for overlap sampling.
pub const DEFAULT_GRID: usize = 512;

/// Relative tolerance on target-area residuals.
const TARGET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ChamberDiagnostics {
    pub chamber: usize,
    pub closed: bool,
    pub dangling: Vec<Point>,
    pub area: Option<f64>,
    pub area_positive: bool,
    pub components: usize,
    /// (area − target)/target when a target is set.
    pub target_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub chambers: Vec<ChamberDiagnostics>,
    /// Pairs of chambers (i < j) sharing at least one interior grid sample.
    pub overlaps: Vec<(usize, usize)>,
    /// Chambers whose winding number exceeds 1 somewhere.
    pub self_overlaps: Vec<usize>,
    /// Vertices where more than three segments meet.
    pub crowded_vertices: Vec<Point>,
    pub grid: usize,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.chambers.iter().all(|c| {
            c.closed
                && c.area_positive
                && c.target_residual.map_or(true, |r| r.abs() <= TARGET_TOL)
        }) && self.overlaps.is_empty()
            && self.self_overlaps.is_empty()
    }

    /// Human-readable list of failed checks.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.chambers {
            if !c.closed {
                out.push(format!("chamber {} has an open boundary", c.chamber));
            }
            if !c.area_positive {
                out.push(format!("chamber {} has non-positive area", c.chamber));
            }
            if let Some(r) = c.target_residual.filter(|r| r.abs() > TARGET_TOL) {
                out.push(format!("chamber {} misses its target area by {r:.3e}", c.chamber));
            }
        }
        for (i, j) in &self.overlaps {
            out.push(format!("chambers {i} and {j} overlap"));
        }
        for i in &self.self_overlaps {
            out.push(format!("chamber {i} overlaps itself"));
        }
        out
    }
}

/// Winding number of every chamber (index 0..=N) around `p`.
pub(crate) fn windings(c: &Cluster, p: Point) -> Vec<i32> {
    let mut w = vec![0; c.n_chambers() + 1];
    for s in c.segments() {
        let k = s.winding_contribution(p);
        if k != 0 {
            w[s.left] += k;
            w[s.right] -= k;
        }
    }
    w
}

/// Loop closure, area sign, target residuals and sampled overlap checks on a
/// `grid × grid` lattice of cell centers over the bounding box.
pub fn validate_cluster(c: &Cluster, grid: usize) -> Diagnostics {
    let targets = c.target_areas();
    let chambers = (1..=c.n_chambers())
        .map(|i| {
            let dangling = c.dangling_vertices(i);
            let closed = dangling.is_empty();
            let area = closed.then(|| c.signed_area(i));
            let area_positive = area.map_or(false, |a| a > 0.0);
            let target_residual = match (targets, area) {
                (Some(t), Some(a)) => Some((a - t[i - 1]) / t[i - 1]),
                _ => None,
            };
            ChamberDiagnostics {
                chamber: i,
                closed,
                dangling,
                area,
                area_positive,
                components: c.boundary_components(i),
                target_residual,
            }
        })
        .collect();

    let (lo, hi) = c.bounding_box();
    let grid = grid.max(1);
    let (dx, dy) = ((hi.x - lo.x) / grid as f64, (hi.y - lo.y) / grid as f64);
    let n = c.n_chambers();
    let (pairs, selfs) = (0..grid)
        .into_par_iter()
        .map(|row| {
            let mut pairs = vec![false; (n + 1) * (n + 1)];
            let mut selfs = vec![false; n + 1];
            let y = lo.y + (row as f64 + 0.5) * dy;
            for col in 0..grid {
                let x = lo.x + (col as f64 + 0.5) * dx;
                let w = windings(c, Point::new(x, y));
                let inside: Vec<usize> = (1..=n).filter(|&i| w[i] != 0).collect();
                for &i in &inside {
                    if w[i] > 1 {
                        selfs[i] = true;
                    }
                }
                for a in 0..inside.len() {
                    for b in a + 1..inside.len() {
                        pairs[inside[a] * (n + 1) + inside[b]] = true;
                    }
                }
            }
            (pairs, selfs)
        })
        .reduce(
            || (vec![false; (n + 1) * (n + 1)], vec![false; n + 1]),
            |mut acc, x| {
                acc.0.iter_mut().zip(x.0).for_each(|(a, b)| *a |= b);
                acc.1.iter_mut().zip(x.1).for_each(|(a, b)| *a |= b);
                acc
            },
        );
    let mut overlaps = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if pairs[i * (n + 1) + j] {
                overlaps.push((i, j));
            }
        }
    }
    let self_overlaps = (1..=n).filter(|&i| selfs[i]).collect();
    let crowded_vertices = c
        .vertex_degrees()
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 3)
        .map(|(k, _)| c.vertices()[k])
        .collect();
    Diagnostics {
        chambers,
        overlaps,
        self_overlaps,
        crowded_vertices,
        grid,
    }
}
