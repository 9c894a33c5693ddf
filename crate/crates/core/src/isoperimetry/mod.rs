//! Isoperimetric lower bounds: the classic deficit, the curvature-deficit
//! bound obtained by inflating marked arcs to the ideal curvature, and the
//! resulting lower bounds for weighted clusters.

mod embedding;
mod fuzz;

use std::f64::consts::PI;

use serde::Serialize;

use crate::arc::ChordArc;
use crate::cluster::{p_epsilon, Cluster, Segment};
use crate::error::{Error, Result};
use crate::sticky::harmonic_weight;

pub use embedding::{is_embedded, self_intersections};
pub use fuzz::{dented_disk, isop_fuzz, random_dented_disk, series_residuals, FuzzCase, FuzzSpec};

/// Numerical floor for inequalities that hold exactly in exact arithmetic.
pub const SLACK_FLOOR: f64 = 1e-12;

/// Relative tolerance for the equal-area preconditions.
const EQUAL_AREA_TOL: f64 = 1e-8;

/// Curvature 1/r_E of the disk with the given area.
pub fn ideal_curvature(area: f64) -> Result<f64> {
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::domain(format!("ideal curvature needs a positive area, got {area}")));
    }
    Ok((PI / area).sqrt())
}

/// P(E_i) − √(4π|E_i|) for chamber `i` of `c`.
pub fn isoperimetric_deficit(c: &Cluster, i: usize) -> Result<f64> {
    let area = c.chamber_area(i)?;
    Ok(c.chamber_perimeter(i) - (4.0 * PI * area).sqrt())
}

/// One chamber with some of its boundary arcs marked for replacement.
#[derive(Debug, Clone)]
pub struct MarkedChamber {
    /// The chamber as a one-chamber cluster.
    boundary: Cluster,
    /// Indices of the marked arcs among `boundary`'s segments.
    marked: Vec<usize>,
    kappa_bar: f64,
    area: f64,
    kappa_e: f64,
}

impl MarkedChamber {
    /// Marks the segments `marked` (indices into `c.segments()`) of chamber
    /// `chamber`. The curvature cap defaults to twice the largest of κ_E and
    /// the marked |κ_i|.
    pub fn new(c: &Cluster, chamber: usize, marked: &[usize], kappa_bar: Option<f64>) -> Result<Self> {
        if chamber == 0 {
            return Err(Error::domain("the exterior cannot be marked"));
        }
        let boundary = c.single_chamber(chamber)?;
        let mut local_of = vec![None; c.segments().len()];
        let mut next = 0;
        for (k, s) in c.segments().iter().enumerate() {
            if s.touches(chamber) {
                local_of[k] = Some(next);
                next += 1;
            }
        }
        let mut local = Vec::with_capacity(marked.len());
        for &k in marked {
            let pos = local_of.get(k).copied().flatten().ok_or_else(|| {
                Error::domain(format!("segment {k} is not on the boundary of chamber {chamber}"))
            })?;
            if boundary.segments()[pos].curvature().is_none() {
                return Err(Error::domain(format!("segment {k} is not a circular arc")));
            }
            if local.contains(&pos) {
                return Err(Error::domain(format!("segment {k} is marked twice")));
            }
            local.push(pos);
        }
        let area = boundary.chamber_area(1)?;
        let kappa_e = ideal_curvature(area)?;
        let mut mc = MarkedChamber {
            boundary,
            marked: local,
            kappa_bar: f64::INFINITY,
            area,
            kappa_e,
        };
        let arcs = mc.marked_arcs();
        let kappa_bar = kappa_bar
            .unwrap_or_else(|| 2.0 * arcs.iter().map(|a| a.curvature.abs()).fold(kappa_e, f64::max));
        if !(kappa_bar > 0.0) {
            return Err(Error::domain(format!("curvature cap must be positive, got {kappa_bar}")));
        }
        if let Some(a) = arcs.iter().find(|a| a.curvature > kappa_bar) {
            return Err(Error::domain(format!(
                "marked curvature {} exceeds the cap {kappa_bar}",
                a.curvature
            )));
        }
        mc.kappa_bar = kappa_bar;
        Ok(mc)
    }

    /// Marks every circular arc on the boundary of `chamber`.
    pub fn all_arcs(c: &Cluster, chamber: usize, kappa_bar: Option<f64>) -> Result<Self> {
        let marked: Vec<usize> = (0..c.segments().len())
            .filter(|&k| {
                let s = &c.segments()[k];
                s.touches(chamber) && s.curvature().is_some()
            })
            .collect();
        MarkedChamber::new(c, chamber, &marked, kappa_bar)
    }

    pub fn boundary(&self) -> &Cluster {
        &self.boundary
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn kappa_bar(&self) -> f64 {
        self.kappa_bar
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn kappa_e(&self) -> f64 {
        self.kappa_e
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary.chamber_perimeter(1)
    }

    /// Chord and outward curvature of each marked arc.
    pub fn marked_arcs(&self) -> Vec<ChordArc> {
        self.marked
            .iter()
            .map(|&k| {
                let s = &self.boundary.segments()[k];
                ChordArc {
                    chord: s.chord(),
                    curvature: s.curvature_for(1).expect("marked segments are arcs"),
                }
            })
            .collect()
    }
}

/// The chamber after every marked arc is replaced by the κ_E-arc over the
/// same chord.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub chamber: Cluster,
    pub delta_p: f64,
    pub delta_a: f64,
}

pub fn replace_arcs(mc: &MarkedChamber) -> Result<Comparison> {
    let ke = mc.kappa_e;
    let mut segs = mc.boundary.segments().to_vec();
    let (mut dp, mut da) = (0.0, 0.0);
    for (&k, arc) in mc.marked.iter().zip(mc.marked_arcs()) {
        let target = ChordArc::new(arc.chord, ke).map_err(|_| {
            Error::domain(format!(
                "chord {} is longer than the ideal diameter {}",
                arc.chord,
                2.0 / ke
            ))
        })?;
        // differences of excesses avoid cancelling the chord
        dp += target.excess() - arc.excess();
        da += target.segment_area() - arc.segment_area();
        let s = segs[k];
        let stored = if s.left == 1 { ke } else { -ke };
        segs[k] = Segment::arc(s.start, s.end, stored, s.left, s.right);
    }
    Ok(Comparison {
        chamber: Cluster::new(1, segs, None)?,
        delta_p: dp,
        delta_a: da,
    })
}

/// Both sides of the curvature-deficit inequality for one marked chamber.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// P(E).
    pub perimeter: f64,
    pub area: f64,
    pub kappa_e: f64,
    pub kappa_bar: f64,
    pub chords: Vec<f64>,
    pub curvatures: Vec<f64>,
    /// √(4π|E|).
    pub isoperimetric_term: f64,
    /// (1/24) Σ ℓ_i³ (κ_i − κ_E)².
    pub curvature_deficit: f64,
    /// Σ ℓ_i⁵.
    pub remainder_scale: f64,
    pub delta_p: f64,
    pub delta_a: f64,
    /// Leading terms (1/24)Σℓ³(κ_E² − κ_i²) and (1/12)Σℓ³(κ_E − κ_i).
    pub delta_p_series: f64,
    pub delta_a_series: f64,
    /// P(Ẽ) and |Ẽ| measured on the comparison chamber.
    pub comparison_perimeter: f64,
    pub comparison_area: f64,
    /// √(4π|Ẽ|) − ΔP.
    pub exact_rhs: f64,
    /// P(E) − exact_rhs.
    pub slack: f64,
    /// P(E) − √(4π|E|) − curvature deficit; bounded below by −O(Σℓ⁵).
    pub asymptotic_residual: f64,
    /// Whether the comparison chamber is free of self-intersections.
    pub embedded: bool,
}

impl BoundReport {
    /// Whether P(E) ≥ √(4π|Ẽ|) − ΔP; `None` when the comparison chamber
    /// self-intersects and the check is inconclusive.
    pub fn exact_holds(&self) -> Option<bool> {
        self.embedded.then_some(self.slack >= -SLACK_FLOOR)
    }

    pub fn delta_p_residual(&self) -> f64 {
        self.delta_p - self.delta_p_series
    }

    pub fn delta_a_residual(&self) -> f64 {
        self.delta_a - self.delta_a_series
    }
}

pub fn curvature_deficit_bound(mc: &MarkedChamber) -> Result<BoundReport> {
    let cmp = replace_arcs(mc)?;
    let ke = mc.kappa_e;
    let arcs = mc.marked_arcs();
    let perimeter = mc.perimeter();
    let isoperimetric_term = (4.0 * PI * mc.area).sqrt();
    let (mut deficit, mut scale, mut dp_series, mut da_series) = (0.0, 0.0, 0.0, 0.0);
    for a in &arcs {
        let l3 = a.chord.powi(3);
        deficit += l3 * (a.curvature - ke).powi(2) / 24.0;
        scale += a.chord.powi(5);
        dp_series += l3 * (ke * ke - a.curvature * a.curvature) / 24.0;
        da_series += l3 * (ke - a.curvature) / 12.0;
    }
    let comparison_area = cmp.chamber.signed_area(1);
    let exact_rhs = (4.0 * PI * comparison_area.max(0.0)).sqrt() - cmp.delta_p;
    Ok(BoundReport {
        perimeter,
        area: mc.area,
        kappa_e: ke,
        kappa_bar: mc.kappa_bar,
        chords: arcs.iter().map(|a| a.chord).collect(),
        curvatures: arcs.iter().map(|a| a.curvature).collect(),
        isoperimetric_term,
        curvature_deficit: deficit,
        remainder_scale: scale,
        delta_p: cmp.delta_p,
        delta_a: cmp.delta_a,
        delta_p_series: dp_series,
        delta_a_series: da_series,
        comparison_perimeter: cmp.chamber.chamber_perimeter(1),
        comparison_area,
        exact_rhs,
        slack: perimeter - exact_rhs,
        asymptotic_residual: perimeter - isoperimetric_term - deficit,
        embedded: is_embedded(&cmp.chamber) && comparison_area > 0.0,
    })
}

/// Optimal curvature (κ_i − κ_j)/(2 − ε) of the interface between chambers
/// with ideal curvatures κ_i, κ_j, positive when bulging out of chamber i.
pub fn optimal_interface_curvature(ki: f64, kj: f64, eps: f64) -> f64 {
    (ki - kj) / (2.0 - eps)
}

/// Chord minimizing (1/24)ℓ³(½(κ_i+κ_j)² − ε(κ_i−κ_j)²/(4−2ε)) − εℓ.
pub fn optimal_chord(ki: f64, kj: f64, eps: f64) -> f64 {
    let q = 0.5 * (ki + kj).powi(2) - eps / (4.0 - 2.0 * eps) * (ki - kj).powi(2);
    (8.0 * eps / q).sqrt()
}

/// Leading-order optimal chord 4√ε/(κ_i + κ_j).
pub fn optimal_chord_leading(ki: f64, kj: f64, eps: f64) -> f64 {
    4.0 * eps.sqrt() / (ki + kj)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairOptimum {
    pub i: usize,
    pub j: usize,
    /// 2r_ir_j/(r_i + r_j).
    pub weight: f64,
    pub kappa_star: f64,
    pub chord_star: f64,
    pub chord_leading: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub epsilon: f64,
    /// Radii of the disks with the chambers' areas.
    pub radii: Vec<f64>,
    /// Σ 2πr_i.
    pub disk_perimeter: f64,
    /// Pairs of chambers sharing boundary.
    pub pairs: Vec<PairOptimum>,
    /// Σ 2πr_i − (4/3) ε^{3/2} Σ_pairs 2r_ir_j/(r_i + r_j).
    pub bound: f64,
}

/// Lower bound for P_ε from the chamber areas and which chambers touch,
/// without its O(ε^{5/2}) remainder. Each pair of chambers may share at most
/// one arc.
pub fn cluster_lower_bound(c: &Cluster, eps: f64) -> Result<LowerBound> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::domain(format!("lower bound needs 0 < ε < 2, got {eps}")));
    }
    let radii: Vec<f64> = c.chamber_areas()?.iter().map(|a| (a / PI).sqrt()).collect();
    let n = c.n_chambers();
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let shared = c.interface_segments(i, j).len();
            if shared > 1 {
                return Err(Error::domain(format!(
                    "chambers {i} and {j} share {shared} arcs; at most one is allowed"
                )));
            }
            if shared == 1 {
                let (ri, rj) = (radii[i - 1], radii[j - 1]);
                let (ki, kj) = (1.0 / ri, 1.0 / rj);
                pairs.push(PairOptimum {
                    i,
                    j,
                    weight: harmonic_weight(ri, rj),
                    kappa_star: optimal_interface_curvature(ki, kj, eps),
                    chord_star: optimal_chord(ki, kj, eps),
                    chord_leading: optimal_chord_leading(ki, kj, eps),
                });
            }
        }
    }
    let disk_perimeter: f64 = radii.iter().map(|r| 2.0 * PI * r).sum();
    let weight: f64 = pairs.iter().map(|p| p.weight).sum();
    Ok(LowerBound {
        epsilon: eps,
        radii,
        disk_perimeter,
        pairs,
        bound: disk_perimeter - 4.0 / 3.0 * eps.powf(1.5) * weight,
    })
}

fn require_unit_areas(c: &Cluster) -> Result<()> {
    for (k, a) in c.chamber_areas()?.iter().enumerate() {
        if ((a - PI) / PI).abs() > EQUAL_AREA_TOL {
            return Err(Error::domain(format!(
                "chamber {} has area {a}, expected π",
                k + 1
            )));
        }
    }
    Ok(())
}

/// 2Nπ − (4/3)√(N−1)·C·ε^{3/2}, where C counts the pairs of chambers sharing
/// boundary. Weaker than [`cluster_lower_bound`] by the factor √(N−1) on the
/// correction; requires every chamber to have area π.
pub fn superposition_bound(c: &Cluster, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::domain(format!("bound needs 0 < ε < 2, got {eps}")));
    }
    require_unit_areas(c)?;
    let n = c.n_chambers();
    let mut touching = 0usize;
    for i in 1..=n {
        for j in i + 1..=n {
            if !c.interface_segments(i, j).is_empty() {
                touching += 1;
            }
        }
    }
    Ok(2.0 * n as f64 * PI
        - 4.0 / 3.0 * ((n - 1) as f64).sqrt() * touching as f64 * eps.powf(1.5))
}

fn check_alpha(c: &Cluster, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("α must lie in (0, 2], got {alpha}")));
    }
    require_unit_areas(c)
}

/// (P_{2−α}(E) − (1−α)·2π√N)/α for a cluster of N chambers of area π.
pub fn g_alpha(c: &Cluster, alpha: f64) -> Result<f64> {
    check_alpha(c, alpha)?;
    let n = c.n_chambers() as f64;
    Ok((p_epsilon(c, 2.0 - alpha)? - (1.0 - alpha) * 2.0 * PI * n.sqrt()) / alpha)
}

/// The same functional written as P(E) + ((1−α)/α)(P(E(0)) − 2π√N), with P(E)
/// the unweighted length of all interfaces.
pub fn g_alpha_rewritten(c: &Cluster, alpha: f64) -> Result<f64> {
    check_alpha(c, alpha)?;
    let n = c.n_chambers() as f64;
    let total: f64 = (0..c.segments().len()).map(|k| c.segment_length(k)).sum();
    Ok(total + (1.0 - alpha) / alpha * (c.chamber_perimeter(0) - 2.0 * PI * n.sqrt()))
}
