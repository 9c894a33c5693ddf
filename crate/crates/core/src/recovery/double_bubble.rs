use serde::Serialize;

use crate::cluster::{p_epsilon, triple_point_angle, Cluster, Segment};
use crate::error::{Error, Result};
use crate::numeric;
use crate::point::Point;

/// The weighted double bubble: three circular arcs meeting at two triple
/// points, with weight 1 on the outer arcs and 2 − ε on the middle one.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleBubbleSolution {
    pub epsilon: f64,
    /// Curvature of the interface between chambers 0 and 1, positive when it
    /// bulges out of chamber 0.
    pub kappa_01: f64,
    pub kappa_02: f64,
    /// Curvature of the interface between chambers 1 and 2, positive when it
    /// bulges out of chamber 1.
    pub kappa_12: f64,
    /// Upper and lower triple point.
    pub triple_points: [Point; 2],
    /// Distance between the triple points.
    pub chord: f64,
    /// Angle between each arc and the common chord at a triple point
    /// (outer 1, outer 2, middle; the middle one signed).
    pub half_angles: [f64; 3],
    pub areas: [f64; 2],
    pub middle_length: f64,
    pub p_eps: f64,
    #[serde(skip)]
    pub cluster: Cluster,
}

impl DoubleBubbleSolution {
    /// (2 − ε)κ_12 + κ_20 + κ_01, zero for a stationary double bubble.
    pub fn curvature_balance(&self) -> f64 {
        (2.0 - self.epsilon) * self.kappa_12 - self.kappa_02 + self.kappa_01
    }

    /// Angles of the exterior, chamber 1 and chamber 2 at a triple point.
    pub fn vertex_angles(&self) -> [f64; 3] {
        let [b1, b2, b12] = self.half_angles;
        [
            2.0 * std::f64::consts::PI - b1 - b2,
            b1 + b12,
            b2 - b12,
        ]
    }
}

/// Area of the circular segment over a unit chord whose arc meets the chord
/// at angle β (signed); the arc turns by 2β.
fn unit_segment_area(beta: f64) -> f64 {
    if beta.abs() < 1e-4 {
        // (2β − sin 2β)/(8 sin²β) = β/6 + β³/45 + O(β⁵)
        return beta / 6.0 + beta.powi(3) / 45.0;
    }
    (2.0 * beta - (2.0 * beta).sin()) / (8.0 * beta.sin().powi(2))
}

/// Arc length over a unit chord: β / sin β.
fn unit_arc_length(beta: f64) -> f64 {
    if beta.abs() < 1e-8 {
        return 1.0 + beta * beta / 6.0;
    }
    beta / beta.sin()
}

/// Solves for the double bubble enclosing areas `m1` (left) and `m2` (right).
///
/// The triple-point angles fix every arc's angle to the chord up to one
/// parameter β₁₂ (the middle arc's angle); β₁₂ is found from the area ratio
/// and the chord length from the total area.
pub fn solve_double_bubble(eps: f64, m1: f64, m2: f64) -> Result<DoubleBubbleSolution> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::domain(format!("double bubble needs 0 < ε < 2, got {eps}")));
    }
    if !(m1 > 0.0 && m2 > 0.0) || !m1.is_finite() || !m2.is_finite() {
        return Err(Error::domain("double bubble areas must be positive"));
    }
    let theta = triple_point_angle(eps)?;
    let pi = std::f64::consts::PI;
    let betas = |b12: f64| (pi - theta - b12, pi - theta + b12);
    let fraction = |b12: f64| {
        let (b1, b2) = betas(b12);
        let (g1, g2, g12) = (unit_segment_area(b1), unit_segment_area(b2), unit_segment_area(b12));
        (g1 + g12) / (g1 + g2)
    };
    let target = m1 / (m1 + m2);
    let b12 = if m1 == m2 {
        0.0
    } else {
        let lim = theta * (1.0 - 1e-12);
        numeric::brent(|b| fraction(b) - target, -lim, lim, 1e-16)?
    };
    let (b1, b2) = betas(b12);
    let (g1, g2, g12) = (unit_segment_area(b1), unit_segment_area(b2), unit_segment_area(b12));
    let ell = ((m1 + m2) / (g1 + g2)).sqrt();
    let areas = [ell * ell * (g1 + g12), ell * ell * (g2 - g12)];
    for (a, m) in areas.iter().zip([m1, m2]) {
        if (a - m).abs() > 1e-12 * m.max(1.0) * 10.0 {
            return Err(Error::Numeric {
                message: "double bubble area residual too large".into(),
                achieved: (a - m).abs() / m,
            });
        }
    }

    let c1 = 2.0 * b1.sin() / ell;
    let c2 = 2.0 * b2.sin() / ell;
    let k12 = 2.0 * b12.sin() / ell;
    let top = Point::new(0.0, 0.5 * ell);
    let bottom = Point::new(0.0, -0.5 * ell);
    // midpoints of the outer arcs, at the sagitta (ℓ/2)·tan(β/2) off the chord
    let mid1 = Point::new(-0.5 * ell * (0.5 * b1).tan(), 0.0);
    let mid2 = Point::new(0.5 * ell * (0.5 * b2).tan(), 0.0);
    let segments = vec![
        Segment::arc(bottom, top, k12, 1, 2),
        Segment::arc(top, mid1, c1, 1, 0),
        Segment::arc(mid1, bottom, c1, 1, 0),
        Segment::arc(bottom, mid2, c2, 2, 0),
        Segment::arc(mid2, top, c2, 2, 0),
    ];
    let cluster = Cluster::new(2, segments, Some(vec![m1, m2]))?;
    let p_eps = p_epsilon(&cluster, eps)?;
    let middle_length = ell * unit_arc_length(b12);
    Ok(DoubleBubbleSolution {
        epsilon: eps,
        kappa_01: -c1,
        kappa_02: -c2,
        kappa_12: k12,
        triple_points: [top, bottom],
        chord: ell,
        half_angles: [b1, b2, b12],
        areas,
        middle_length,
        p_eps,
        cluster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{vertex_balance, WeightMatrix};
    use std::f64::consts::PI;

    #[test]
    fn equal_areas_are_symmetric() {
        let s = solve_double_bubble(0.01, PI, PI).unwrap();
        assert_eq!(s.kappa_12, 0.0);
        assert!((s.kappa_01 - s.kappa_02).abs() < 1e-12);
        let a = s.cluster.chamber_areas().unwrap();
        assert!((a[0] - PI).abs() < 1e-12 && (a[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn unequal_areas() {
        let s = solve_double_bubble(0.3, 2.0, 5.0).unwrap();
        let a = s.cluster.chamber_areas().unwrap();
        assert!((a[0] - 2.0).abs() < 1e-11 && (a[1] - 5.0).abs() < 1e-11);
        assert!(s.curvature_balance().abs() < 1e-12);
        // the smaller bubble pushes into the larger one
        assert!(s.kappa_12 > 0.0);
        let w = WeightMatrix::epsilon(2, 0.3).unwrap();
        for v in s.triple_points {
            assert!(vertex_balance(&s.cluster, &w, v).unwrap().norm() < 1e-9);
        }
        let interface = s.cluster.interface_length(1, 2);
        assert!((interface - s.middle_length).abs() < 1e-12);
    }

    #[test]
    fn expansion_coefficient() {
        let eps: f64 = 0.01;
        let s = solve_double_bubble(eps, PI, PI).unwrap();
        let predicted = 4.0 * PI - 4.0 / 3.0 * eps.powf(1.5);
        assert!((s.p_eps - predicted).abs() < 2.0 * eps.powf(2.5));
    }

    #[test]
    fn domain() {
        assert!(solve_double_bubble(0.0, 1.0, 1.0).is_err());
        assert!(solve_double_bubble(0.1, -1.0, 1.0).is_err());
    }
}
