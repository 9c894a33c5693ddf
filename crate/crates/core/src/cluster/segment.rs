use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::arc::ChordArc;
use crate::error::{Error, Result};
use crate::numeric;
use crate::point::{Point, RigidMotion};

/// Shape of a boundary piece between its two endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentGeometry {
    /// Circular arc of signed curvature. Positive curvature turns
    /// counterclockwise from start to end, i.e. bulges to the right of the
    /// chord and away from the left chamber.
    Arc { curvature: f64 },
    /// Curve whose polar radius about `center` is linear in the polar angle,
    /// sweeping the signed angle `sweep` from start to end.
    RadialLinear { center: Point, sweep: f64 },
}

/// One boundary piece with the chamber on each side. Index 0 is the exterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SegmentRepr", into = "SegmentRepr")]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    pub geometry: SegmentGeometry,
    pub left: usize,
    pub right: usize,
}

#[derive(Serialize, Deserialize)]
struct RadialRepr {
    center: Point,
    sweep: f64,
}

#[derive(Serialize, Deserialize)]
struct SegmentRepr {
    start: Point,
    end: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radial: Option<RadialRepr>,
    left: usize,
    right: usize,
}

impl TryFrom<SegmentRepr> for Segment {
    type Error = String;

    fn try_from(r: SegmentRepr) -> std::result::Result<Self, String> {
        let geometry = match (r.curvature, r.radial) {
            (Some(curvature), None) => SegmentGeometry::Arc { curvature },
            (None, Some(RadialRepr { center, sweep })) => {
                SegmentGeometry::RadialLinear { center, sweep }
            }
            (None, None) => SegmentGeometry::Arc { curvature: 0.0 },
            (Some(_), Some(_)) => {
                return Err("segment has both `curvature` and `radial`".to_string())
            }
        };
        Ok(Segment {
            start: r.start,
            end: r.end,
            geometry,
            left: r.left,
            right: r.right,
        })
    }
}

impl From<Segment> for SegmentRepr {
    fn from(s: Segment) -> Self {
        let (curvature, radial) = match s.geometry {
            SegmentGeometry::Arc { curvature } => (Some(curvature), None),
            SegmentGeometry::RadialLinear { center, sweep } => {
                (None, Some(RadialRepr { center, sweep }))
            }
        };
        SegmentRepr {
            start: s.start,
            end: s.end,
            curvature,
            radial,
            left: s.left,
            right: s.right,
        }
    }
}

impl Segment {
    pub fn arc(start: Point, end: Point, curvature: f64, left: usize, right: usize) -> Self {
        Segment {
            start,
            end,
            geometry: SegmentGeometry::Arc { curvature },
            left,
            right,
        }
    }

    pub fn line(start: Point, end: Point, left: usize, right: usize) -> Self {
        Self::arc(start, end, 0.0, left, right)
    }

    pub fn radial(
        start: Point,
        end: Point,
        center: Point,
        sweep: f64,
        left: usize,
        right: usize,
    ) -> Self {
        Segment {
            start,
            end,
            geometry: SegmentGeometry::RadialLinear { center, sweep },
            left,
            right,
        }
    }

    pub fn chord(&self) -> f64 {
        self.start.distance(self.end)
    }

    /// Curvature if the segment is a circular arc.
    pub fn curvature(&self) -> Option<f64> {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => Some(curvature),
            SegmentGeometry::RadialLinear { .. } => None,
        }
    }

    /// Curvature seen from chamber `chamber`: positive when the arc bulges
    /// away from it.
    pub fn curvature_for(&self, chamber: usize) -> Option<f64> {
        let k = self.curvature()?;
        if chamber == self.left {
            Some(k)
        } else if chamber == self.right {
            Some(-k)
        } else {
            None
        }
    }

    pub fn chord_arc(&self) -> Option<ChordArc> {
        self.curvature().map(|curvature| ChordArc {
            chord: self.chord(),
            curvature,
        })
    }

    pub fn touches(&self, chamber: usize) -> bool {
        self.left == chamber || self.right == chamber
    }

    /// The other chamber across this segment, if `chamber` borders it.
    pub fn across(&self, chamber: usize) -> Option<usize> {
        if self.left == chamber {
            Some(self.right)
        } else if self.right == chamber {
            Some(self.left)
        } else {
            None
        }
    }

    /// Same curve traversed the other way; chambers swap sides.
    pub fn reversed(&self) -> Segment {
        let geometry = match self.geometry {
            SegmentGeometry::Arc { curvature } => SegmentGeometry::Arc {
                curvature: -curvature,
            },
            SegmentGeometry::RadialLinear { center, sweep } => {
                SegmentGeometry::RadialLinear {
                    center,
                    sweep: -sweep,
                }
            }
        };
        Segment {
            start: self.end,
            end: self.start,
            geometry,
            left: self.right,
            right: self.left,
        }
    }

    pub fn transformed(&self, m: &RigidMotion) -> Segment {
        let flip = if m.reflect { -1.0 } else { 1.0 };
        let geometry = match self.geometry {
            SegmentGeometry::Arc { curvature } => SegmentGeometry::Arc {
                curvature: flip * curvature,
            },
            SegmentGeometry::RadialLinear { center, sweep } => {
                SegmentGeometry::RadialLinear {
                    center: m.apply(center),
                    sweep: flip * sweep,
                }
            }
        };
        let (left, right) = if m.reflect {
            (self.right, self.left)
        } else {
            (self.left, self.right)
        };
        Segment {
            start: m.apply(self.start),
            end: m.apply(self.end),
            geometry,
            left,
            right,
        }
    }

    /// Checks the invariants that do not depend on the rest of the cluster.
    pub(crate) fn check(&self, n_chambers: usize, min_chord: f64) -> Result<()> {
        if self.left == self.right {
            return Err(Error::structural(
                format!("segment has chamber {} on both sides", self.left),
                Some(self.start),
            ));
        }
        if self.left > n_chambers || self.right > n_chambers {
            return Err(Error::structural(
                format!(
                    "chamber label ({}, {}) out of range 0..={n_chambers}",
                    self.left, self.right
                ),
                Some(self.start),
            ));
        }
        let pts = [self.start.x, self.start.y, self.end.x, self.end.y];
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("segment endpoint is not finite"));
        }
        if self.chord() <= min_chord {
            return Err(Error::structural(
                format!("zero-length segment (chord {:.3e})", self.chord()),
                Some(self.start),
            ));
        }
        match self.geometry {
            SegmentGeometry::Arc { curvature } => {
                ChordArc::new(self.chord(), curvature)?;
            }
            SegmentGeometry::RadialLinear { center, sweep } => {
                if !(sweep.abs() > 0.0 && sweep.abs() < std::f64::consts::PI) {
                    return Err(Error::domain(format!(
                        "radial sweep {sweep} must be non-zero and below π in magnitude"
                    )));
                }
                let rs = self.start - center;
                let re = self.end - center;
                let turned = rs.rotate(sweep).normalized();
                if turned.distance(re.normalized()) > 1e-9 {
                    return Err(Error::structural(
                        "radial segment end does not lie at start angle + sweep",
                        Some(self.end),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Length of the curve.
    pub fn length(&self) -> f64 {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => ChordArc {
                chord: self.chord(),
                curvature,
            }
            .length(),
            SegmentGeometry::RadialLinear { center, sweep } => {
                let rs = self.start.distance(center);
                let re = self.end.distance(center);
                let w = sweep.abs();
                let slope = (re - rs) / w;
                numeric::integrate(|t| (rs + slope * t).hypot(slope), 0.0, w, 1e-14)
                    .expect("smooth integrand on a short interval")
            }
        }
    }

    /// Signed area between the chord and the curve, oriented so that
    /// `½ start×end + bulge_area` is the segment's contribution to the area of
    /// its left chamber.
    pub fn bulge_area(&self) -> f64 {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => ChordArc {
                chord: self.chord(),
                curvature,
            }
            .segment_area(),
            SegmentGeometry::RadialLinear { center, sweep } => {
                let s = self.start - center;
                let e = self.end - center;
                let (rs, re) = (s.norm(), e.norm());
                let sector = 0.5 * sweep * (rs * rs + rs * re + re * re) / 3.0;
                sector - 0.5 * s.cross(e)
            }
        }
    }

    /// Point at parameter `t ∈ [0, 1]` (arc length for arcs, angle for radial pieces).
    pub fn point_at(&self, t: f64) -> Point {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => {
                let arc = ChordArc {
                    chord: self.chord(),
                    curvature,
                };
                let u = (self.end - self.start).normalized();
                let tangent = u.rotate(-0.5 * arc.angle());
                let sigma = t * arc.length();
                let x = curvature * sigma;
                let (along, side) = if x.abs() < 1e-8 {
                    (sigma, 0.5 * curvature * sigma * sigma)
                } else {
                    (x.sin() / curvature, 2.0 * (0.5 * x).sin().powi(2) / curvature)
                };
                self.start + tangent * along + tangent.perp() * side
            }
            SegmentGeometry::RadialLinear { center, sweep } => {
                let s = self.start - center;
                let rs = s.norm();
                let re = self.end.distance(center);
                let rho = rs + t * (re - rs);
                center + s.rotate(t * sweep) * (rho / rs)
            }
        }
    }

    /// Unit tangent at the start, pointing along the direction of travel.
    pub fn start_tangent(&self) -> Point {
        self.tangent_at(0.0)
    }

    /// Unit tangent at the end, pointing along the direction of travel.
    pub fn end_tangent(&self) -> Point {
        self.tangent_at(1.0)
    }

    fn tangent_at(&self, t: f64) -> Point {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => {
                let theta = ChordArc {
                    chord: self.chord(),
                    curvature,
                }
                .angle();
                let u = (self.end - self.start).normalized();
                u.rotate((t - 0.5) * theta)
            }
            SegmentGeometry::RadialLinear { center, sweep } => {
                let s = self.start - center;
                let rs = s.norm();
                let re = self.end.distance(center);
                let rho = rs + t * (re - rs);
                let radial = s.rotate(t * sweep) * (1.0 / rs);
                let d = radial * ((re - rs) / sweep) + radial.perp() * rho;
                (d * sweep.signum()).normalized()
            }
        }
    }

    /// Center and radius of the supporting circle of a curved arc.
    pub fn circle(&self) -> Option<(Point, f64)> {
        let k = self.curvature()?;
        if k == 0.0 {
            return None;
        }
        let arc = ChordArc {
            chord: self.chord(),
            curvature: k,
        };
        let u = (self.end - self.start).normalized();
        let mid = self.start.lerp(self.end, 0.5);
        let c = mid + u.perp() * ((0.5 * arc.angle()).cos() / k);
        Some((c, 1.0 / k.abs()))
    }

    /// Winding-number contribution of this segment around `p`, as seen by its
    /// left chamber: the chord's crossing number plus ±1 when `p` lies between
    /// the chord and the curve.
    pub(crate) fn winding_contribution(&self, p: Point) -> i32 {
        let (a, b) = (self.start, self.end);
        let side = (b - a).cross(p - a);
        let mut w = 0;
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            w -= 1;
        }
        if self.in_bulge(p, side) {
            w += if self.bulge_area() > 0.0 { 1 } else { -1 };
        }
        w
    }

    fn in_bulge(&self, p: Point, side: f64) -> bool {
        match self.geometry {
            SegmentGeometry::Arc { curvature } => {
                if curvature == 0.0 || side * curvature >= 0.0 {
                    return false;
                }
                let (c, r) = self.circle().expect("curved arc");
                p.distance(c) < r
            }
            SegmentGeometry::RadialLinear { center, sweep } => {
                let rel = p - center;
                let rho = rel.norm();
                if rho == 0.0 {
                    return false;
                }
                let s = self.start - center;
                let delta = (sweep.signum() * (rel.angle() - s.angle())).rem_euclid(TAU);
                if delta >= sweep.abs() {
                    return false;
                }
                let (rs, re) = (s.norm(), self.end.distance(center));
                let curve = rs + delta / sweep.abs() * (re - rs);
                let d = rel * (1.0 / rho);
                let ch = self.end - self.start;
                let chord = s.cross(ch) / d.cross(ch);
                (rho - chord) * (rho - curve) < 0.0
            }
        }
    }

    /// Polyline through `n + 1` points along the curve.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect()
    }
}
