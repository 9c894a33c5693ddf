//! Randomized dented unit disks for exercising the curvature-deficit bound.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{curvature_deficit_bound, BoundReport, MarkedChamber};
use crate::cluster::{Cluster, Segment};
use crate::error::{Error, Result};
use crate::point::Point;

/// Smallest angular gap kept between neighbouring dents.
const MIN_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzSpec {
    pub max_dents: usize,
    pub min_chord: f64,
    pub max_chord: f64,
    pub max_curvature: f64,
}

impl Default for FuzzSpec {
    fn default() -> Self {
        FuzzSpec {
            max_dents: 4,
            min_chord: 0.005,
            max_chord: 0.2,
            max_curvature: 2.0,
        }
    }
}

/// The unit disk with the arc over each chord (centered at `angles[k]`, length
/// `chords[k]`) replaced by an arc of outward curvature `curvatures[k]`.
/// Returns the cluster and the indices of the dent segments.
pub fn dented_disk(chords: &[f64], curvatures: &[f64], angles: &[f64]) -> Result<(Cluster, Vec<usize>)> {
    let m = chords.len();
    if curvatures.len() != m || angles.len() != m {
        return Err(Error::domain("dent chords, curvatures and angles differ in length"));
    }
    if chords.iter().any(|l| !(*l > 0.0 && *l < 2.0)) {
        return Err(Error::domain("dent chords must lie in (0, 2)"));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| angles[a].rem_euclid(TAU).total_cmp(&angles[b].rem_euclid(TAU)));
    let half: Vec<f64> = chords.iter().map(|l| (0.5 * l).asin()).collect();
    let mut segs = Vec::new();
    let mut marked = Vec::with_capacity(m);
    if m == 0 {
        segs.extend(crate::cluster::disk_segments(Point::ORIGIN, 1.0, 1, 0));
    }
    for (pos, &k) in order.iter().enumerate() {
        let phi = angles[k].rem_euclid(TAU);
        let (from, to) = (phi - half[k], phi + half[k]);
        marked.push(segs.len());
        segs.push(Segment::arc(Point::polar(from), Point::polar(to), curvatures[k], 1, 0));
        let next = order[(pos + 1) % m];
        let mut next_from = angles[next].rem_euclid(TAU) - half[next];
        if pos + 1 == m {
            next_from += TAU;
        }
        let gap = next_from - to;
        if gap <= 0.0 {
            return Err(Error::domain("dents overlap"));
        }
        let pieces = (gap / FRAC_PI_2).ceil() as usize;
        for p in 0..pieces {
            let a = to + gap * p as f64 / pieces as f64;
            let b = to + gap * (p + 1) as f64 / pieces as f64;
            segs.push(Segment::arc(Point::polar(a), Point::polar(b), 1.0, 1, 0));
        }
    }
    Ok((Cluster::new(1, segs, None)?, marked))
}

/// Draws a dented unit disk: 1 to `max_dents` dents with chords in
/// [min_chord, max_chord] and curvatures in [−max_curvature, max_curvature].
pub fn random_dented_disk<R: Rng>(rng: &mut R, spec: &FuzzSpec) -> Result<(Cluster, Vec<usize>)> {
    let m = rng.gen_range(1..=spec.max_dents.max(1));
    let chords: Vec<f64> = (0..m).map(|_| rng.gen_range(spec.min_chord..=spec.max_chord)).collect();
    let curvatures: Vec<f64> = (0..m)
        .map(|_| rng.gen_range(-spec.max_curvature..=spec.max_curvature))
        .collect();
    let half: Vec<f64> = chords.iter().map(|l| (0.5 * l).asin()).collect();
    for _ in 0..1000 {
        let angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]));
        let separated = (0..m).all(|p| {
            let (a, b) = (idx[p], idx[(p + 1) % m]);
            let mut d = angles[b] - angles[a];
            if p + 1 == m {
                d += TAU;
            }
            m == 1 || d - half[a] - half[b] >= MIN_GAP
        });
        if separated {
            return dented_disk(&chords, &curvatures, &angles);
        }
    }
    Err(Error::Construction("could not place the dents apart".into()))
}

/// Residuals of ΔP and ΔA against their leading terms, for a unit disk with
/// one dent of curvature `kappa` and each chord in `chords`.
pub fn series_residuals(kappa: f64, chords: &[f64]) -> Result<Vec<(f64, f64)>> {
    chords
        .iter()
        .map(|&l| {
            let (c, marked) = dented_disk(&[l], &[kappa], &[0.0])?;
            let r = curvature_deficit_bound(&MarkedChamber::new(&c, 1, &marked, None)?)?;
            Ok((r.delta_p_residual(), r.delta_a_residual()))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzCase {
    pub seed: u64,
    pub report: BoundReport,
}

impl FuzzCase {
    pub const CSV_HEADER: &'static str = "seed,chords,curvatures,lhs,rhs,slack,embedded";

    /// One CSV row; chord and curvature lists are `;`-separated.
    pub fn csv_row(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(";");
        format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{}",
            self.seed,
            join(&self.report.chords),
            join(&self.report.curvatures),
            self.report.perimeter,
            self.report.exact_rhs,
            self.report.slack,
            self.report.embedded
        )
    }
}

/// Evaluates the bound on `cases` dented disks, case k drawn from seed `seed + k`.
pub fn isop_fuzz(cases: usize, seed: u64, spec: &FuzzSpec) -> Result<Vec<FuzzCase>> {
    if !(spec.min_chord > 0.0 && spec.min_chord <= spec.max_chord && spec.max_chord < 2.0) {
        return Err(Error::domain("fuzz chords must satisfy 0 < min ≤ max < 2"));
    }
    if !(spec.max_curvature >= 0.0) || spec.max_dents == 0 {
        return Err(Error::domain("fuzz needs at least one dent and a finite curvature range"));
    }
    (0..cases as u64)
        .into_par_iter()
        .map(|k| {
            let s = seed.wrapping_add(k);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let (c, marked) = random_dented_disk(&mut rng, spec)?;
            let mc = MarkedChamber::new(&c, 1, &marked, None)?;
            Ok(FuzzCase {
                seed: s,
                report: curvature_deficit_bound(&mc)?,
            })
        })
        .collect()
}
