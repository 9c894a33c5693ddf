use serde::Serialize;

use super::{interface_chord, interface_curvature};
use crate::cluster::Cluster;
use crate::error::Result;
use crate::point::Point;
use crate::sticky::{contact_graph, DiskConfiguration};

#[derive(Debug, Clone, Serialize)]
pub struct ContactCheck {
    pub i: usize,
    pub j: usize,
    /// Number of segments on the interface.
    pub arcs: usize,
    /// Measured curvature, positive when bulging into chamber i.
    pub curvature: Option<f64>,
    pub expected_curvature: f64,
    pub chord: Option<f64>,
    pub expected_chord: f64,
}

impl ContactCheck {
    pub fn curvature_error(&self) -> f64 {
        self.curvature
            .map_or(f64::INFINITY, |k| (k - self.expected_curvature).abs())
    }

    pub fn chord_error(&self) -> f64 {
        self.chord.map_or(f64::INFINITY, |l| (l - self.expected_chord).abs())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChamberCheck {
    pub chamber: usize,
    pub components: usize,
    /// Largest |κ − 1/r_i| over the circular arcs facing the exterior.
    pub exterior_curvature_deviation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexCheck {
    pub position: Point,
    pub degree: usize,
    /// Number of incident segments bordering the exterior.
    pub exterior_segments: usize,
}

impl VertexCheck {
    /// Three arcs meet and exactly one of the three sectors is exterior.
    pub fn ok(&self) -> bool {
        self.degree == 3 && self.exterior_segments == 2
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub epsilon: f64,
    pub contacts: Vec<ContactCheck>,
    pub chambers: Vec<ChamberCheck>,
    /// Vertices where at least three segments meet.
    pub vertices: Vec<VertexCheck>,
    /// Interfaces between chambers whose disks do not touch.
    pub unexpected_interfaces: Vec<(usize, usize)>,
}

impl StructureReport {
    pub fn max_curvature_error(&self) -> f64 {
        self.contacts.iter().map(ContactCheck::curvature_error).fold(0.0, f64::max)
    }

    pub fn max_chord_error(&self) -> f64 {
        self.contacts.iter().map(ContactCheck::chord_error).fold(0.0, f64::max)
    }

    /// Topological checks: one arc per contact, connected chambers, triple
    /// points with a single exterior sector, no interfaces between
    /// non-touching disks.
    pub fn topology_ok(&self) -> bool {
        self.contacts.iter().all(|c| c.arcs == 1)
            && self.chambers.iter().all(|c| c.components == 1)
            && self.vertices.iter().all(VertexCheck::ok)
            && self.unexpected_interfaces.is_empty()
    }

    /// Topology plus curvature and chord agreement within `tol`.
    pub fn ok(&self, tol: f64) -> bool {
        self.topology_ok() && self.max_curvature_error() <= tol && self.max_chord_error() <= tol
    }

    pub fn failures(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.contacts {
            if c.arcs != 1 {
                out.push(format!("contact ({}, {}) has {} interface arcs", c.i, c.j, c.arcs));
            }
            if c.curvature_error() > tol {
                out.push(format!("contact ({}, {}) curvature off by {:.3e}", c.i, c.j, c.curvature_error()));
            }
            if c.chord_error() > tol {
                out.push(format!("contact ({}, {}) chord off by {:.3e}", c.i, c.j, c.chord_error()));
            }
        }
        for c in &self.chambers {
            if c.components != 1 {
                out.push(format!("chamber {} has {} boundary components", c.chamber, c.components));
            }
        }
        for v in &self.vertices {
            if !v.ok() {
                out.push(format!(
                    "vertex ({:.6}, {:.6}) has degree {} with {} exterior segments",
                    v.position.x, v.position.y, v.degree, v.exterior_segments
                ));
            }
        }
        for (i, j) in &self.unexpected_interfaces {
            out.push(format!("chambers {i} and {j} share an interface without touching"));
        }
        out
    }
}

/// Compares a cluster built around the disks `d` with the limiting structure:
/// one arc of curvature ½(1/r_j − 1/r_i) and chord (4r_ir_j/(r_i+r_j))√ε per
/// contact, connected chambers, and triple points with one exterior sector.
pub fn structure_report(c: &Cluster, d: &DiskConfiguration, eps: f64) -> Result<StructureReport> {
    let g = contact_graph(d, d.default_tol())?;
    let contacts = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let (i, j) = (a + 1, b + 1);
            let segs = c.interface_segments(i, j);
            let single = (segs.len() == 1).then(|| c.segments()[segs[0]]);
            ContactCheck {
                i,
                j,
                arcs: segs.len(),
                curvature: single.and_then(|s| s.curvature_for(j)),
                expected_curvature: interface_curvature(d.radii[a], d.radii[b]),
                chord: single.map(|s| s.chord()),
                expected_chord: interface_chord(d.radii[a], d.radii[b], eps),
            }
        })
        .collect();
    let chambers = (1..=c.n_chambers())
        .map(|i| {
            let target = 1.0 / d.radii[i - 1];
            let dev = c
                .segments()
                .iter()
                .filter(|s| s.touches(i) && s.touches(0))
                .filter_map(|s| s.curvature_for(i))
                .map(|k| (k - target).abs())
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            ChamberCheck {
                chamber: i,
                components: c.boundary_components(i),
                exterior_curvature_deviation: dev,
            }
        })
        .collect();
    let deg = c.vertex_degrees();
    let mut exterior = vec![0; deg.len()];
    for (k, s) in c.segments().iter().enumerate() {
        if s.touches(0) {
            let (a, b) = c.segment_ends(k);
            exterior[a] += 1;
            exterior[b] += 1;
        }
    }
    let vertices = (0..deg.len())
        .filter(|&v| deg[v] >= 3)
        .map(|v| VertexCheck {
            position: c.vertices()[v],
            degree: deg[v],
            exterior_segments: exterior[v],
        })
        .collect();
    let mut unexpected = Vec::new();
    for s in c.segments() {
        if s.left > 0 && s.right > 0 {
            let (i, j) = (s.left.min(s.right), s.left.max(s.right));
            if !g.has_edge(i - 1, j - 1) && !unexpected.contains(&(i, j)) {
                unexpected.push((i, j));
            }
        }
    }
    Ok(StructureReport {
        epsilon: eps,
        contacts,
        chambers,
        vertices,
        unexpected_interfaces: unexpected,
    })
}
