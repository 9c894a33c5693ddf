use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{contact_graph, graph_certificate, ledger_of, DiskConfiguration, StickyEnergyLedger};
use crate::error::{Error, Result};
use crate::point::Point;

/// Largest N accepted by [`lattice_enumerate_max_contacts`].
pub const MAX_LATTICE_N: usize = 10;

/// Axial coordinates (q, r) of a triangular-lattice site.
pub type Site = (i32, i32);

const NEIGHBORS: [Site; 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

fn rot60((q, r): Site) -> Site {
    (-r, q + r)
}

fn reflect((q, r): Site) -> Site {
    (r, q)
}

/// Sorted sites translated so that the smallest is (0, 0).
fn normalize(mut s: Vec<Site>) -> Vec<Site> {
    s.sort_unstable();
    let (q0, r0) = s[0];
    for p in &mut s {
        *p = (p.0 - q0, p.1 - r0);
    }
    s
}

/// Smallest image under the rotations, and the reflections when `mirror`.
fn canonical(s: &[Site], mirror: bool) -> Vec<Site> {
    let mut best: Option<Vec<Site>> = None;
    let mut cur: Vec<Site> = s.to_vec();
    for _ in 0..6 {
        cur = cur.iter().map(|&p| rot60(p)).collect();
        let mut images = vec![normalize(cur.clone())];
        if mirror {
            images.push(normalize(cur.iter().map(|&p| reflect(p)).collect()));
        }
        for im in images {
            if best.as_ref().map_or(true, |b| im < *b) {
                best = Some(im);
            }
        }
    }
    best.expect("six rotations")
}

fn contacts(s: &[Site]) -> usize {
    let set: HashSet<Site> = s.iter().copied().collect();
    s.iter()
        .map(|&(q, r)| {
            NEIGHBORS
                .iter()
                .filter(|(dq, dr)| set.contains(&(q + dq, r + dr)))
                .count()
        })
        .sum::<usize>()
        / 2
}

/// Cartesian position of a site for unit disks (spacing 2).
pub fn site_center((q, r): Site) -> Point {
    Point::new(2.0 * q as f64 + r as f64, 3f64.sqrt() * r as f64)
}

/// One optimal lattice configuration.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeConfiguration {
    pub sites: Vec<Site>,
    pub disks: DiskConfiguration,
    pub ledger: StickyEnergyLedger,
    pub certificate: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeResult {
    pub n: usize,
    pub max_contacts: usize,
    /// Maximizers up to translations, rotations and reflections.
    pub configurations: Vec<LatticeConfiguration>,
    /// Number of maximizers up to translations and rotations only.
    pub count_without_reflection: usize,
    /// Number of connected site sets (free animals) of size n.
    pub animals: usize,
}

/// Exhaustive search over connected n-site subsets of the triangular lattice
/// for the largest number of unit-disk contacts.
///
/// Disconnected subsets are never optimal (translating a component until it
/// touches adds a contact), so growing connected animals one site at a time
/// visits every candidate.
pub fn lattice_enumerate_max_contacts(n: usize) -> Result<LatticeResult> {
    if n > MAX_LATTICE_N {
        return Err(Error::Resource(format!(
            "lattice enumeration is capped at N = {MAX_LATTICE_N}, got {n}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("need at least one disk"));
    }
    let mut level: BTreeSet<Vec<Site>> = BTreeSet::new();
    level.insert(vec![(0, 0)]);
    for _ in 1..n {
        let shapes: Vec<&Vec<Site>> = level.iter().collect();
        let grown: Vec<Vec<Vec<Site>>> = shapes
            .par_iter()
            .map(|s| {
                let set: HashSet<Site> = s.iter().copied().collect();
                let mut out = Vec::new();
                for &(q, r) in s.iter() {
                    for (dq, dr) in NEIGHBORS {
                        let p = (q + dq, r + dr);
                        if !set.contains(&p) {
                            let mut t = (*s).clone();
                            t.push(p);
                            out.push(canonical(&t, true));
                        }
                    }
                }
                out
            })
            .collect();
        level = grown.into_iter().flatten().collect();
    }
    let animals = level.len();
    let max_contacts = level.iter().map(|s| contacts(s)).max().unwrap_or(0);
    let best: Vec<Vec<Site>> = level.into_iter().filter(|s| contacts(s) == max_contacts).collect();
    let chiral: BTreeSet<Vec<Site>> = best
        .iter()
        .flat_map(|s| {
            let mirrored: Vec<Site> = s.iter().map(|&p| reflect(p)).collect();
            [canonical(s, false), canonical(&mirrored, false)]
        })
        .collect();
    let configurations = best
        .into_iter()
        .map(|sites| {
            let disks = DiskConfiguration {
                radii: vec![1.0; sites.len()],
                centers: sites.iter().map(|&s| site_center(s)).collect(),
            };
            let g = contact_graph(&disks, disks.default_tol()).expect("lattice disks never overlap");
            LatticeConfiguration {
                ledger: ledger_of(&g),
                certificate: graph_certificate(&g, &vec![0; sites.len()]),
                sites,
                disks,
            }
        })
        .collect();
    Ok(LatticeResult {
        n,
        max_contacts,
        configurations,
        count_without_reflection: chiral.len(),
        animals,
    })
}
