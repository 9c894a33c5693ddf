//! Explicit near-optimal clusters: the recovery construction around a packing
//! of tangent disks, and the exact weighted double bubble.

mod build;
mod double_bubble;
mod structure;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sticky::{contact_graph, harmonic_weight, DiskConfiguration};

pub use build::{build_recovery, build_recovery_with, RecoveryBuild, RecoveryMode, RecoveryPlan, ContactPlan};
pub use double_bubble::{solve_double_bubble, DoubleBubbleSolution};
pub use structure::{structure_report, ChamberCheck, ContactCheck, StructureReport, VertexCheck};

/// Interface curvature ½(1/r_j − 1/r_i) of the dent between disks i and j,
/// positive when the dent bulges into disk i.
pub fn interface_curvature(ri: f64, rj: f64) -> f64 {
    0.5 * (1.0 / rj - 1.0 / ri)
}

/// Dent chord (4 r_i r_j/(r_i + r_j))·√ε.
pub fn interface_chord(ri: f64, rj: f64, eps: f64) -> f64 {
    2.0 * harmonic_weight(ri, rj) * eps.sqrt()
}

/// Σ 2πr_i − (4/3) ε^{3/2} Σ_contacts 2r_ir_j/(r_i + r_j), without remainder.
pub fn predicted_recovery_energy(d: &DiskConfiguration, eps: f64) -> Result<f64> {
    let g = contact_graph(d, d.default_tol())?;
    let p0: f64 = d.radii.iter().map(|r| TAU * r).sum();
    Ok(p0 - 4.0 / 3.0 * eps.powf(1.5) * g.total_weight())
}

/// One row of an ε-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub epsilon: f64,
    #[serde(rename = "P_eps")]
    pub p_eps: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    /// (P_ε − P_0) / ((4/3) ε^{3/2}).
    pub rescaled: f64,
    pub predicted: f64,
    /// P_ε − predicted.
    pub residual: f64,
}

impl EnergyReport {
    pub fn new(epsilon: f64, p_eps: f64, p0: f64, predicted: f64) -> Self {
        EnergyReport {
            epsilon,
            p_eps,
            p0,
            rescaled: (p_eps - p0) / (4.0 / 3.0 * epsilon.powf(1.5)),
            predicted,
            residual: p_eps - predicted,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;
    use std::f64::consts::PI;

    #[test]
    fn predicted_examples() {
        let far = DiskConfiguration::new(vec![Point::ORIGIN, Point::new(5.0, 0.0)], vec![1.0, 1.0]).unwrap();
        assert!((predicted_recovery_energy(&far, 0.01).unwrap() - 4.0 * PI).abs() < 1e-15);
        let pair = DiskConfiguration::chain(&[1.0, 1.0]).unwrap();
        let v = predicted_recovery_energy(&pair, 0.01).unwrap();
        assert!((v - (4.0 * PI - 4.0 / 3.0 * 0.001)).abs() < 1e-15);
    }

    #[test]
    fn contact_data() {
        assert_eq!(interface_curvature(1.0, 1.0), 0.0);
        assert_eq!(interface_curvature(1.0, 2.0), -interface_curvature(2.0, 1.0));
        assert_eq!(interface_chord(1.0, 2.0, 0.01), interface_chord(2.0, 1.0, 0.01));
        assert!((interface_chord(1.0, 1.0, 1e-4) - 0.02).abs() < 1e-15);
    }
}
