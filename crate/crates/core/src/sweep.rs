//! Declarative experiment runs: an ε-sweep, packing search or fuzz suite
//! described by a TOML config, written to a run directory named after the
//! config's hash.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cluster::{p_epsilon, validate_cluster};
use crate::error::{Error, Result};
use crate::isoperimetry::{isop_fuzz, series_residuals, FuzzCase, FuzzSpec};
use crate::numeric::loglog_slope;
use crate::point::Point;
use crate::recovery::{
    build_recovery_with, predicted_recovery_energy, solve_double_bubble, structure_report, EnergyReport,
    RecoveryMode,
};
use crate::render::{render_disks, render_svg, RenderStyle};
use crate::sticky::{
    contact_graph, harmonic_weight, lattice_enumerate_max_contacts, maximize_tangencies, DiskConfiguration,
    Schedule, MAX_LATTICE_N,
};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "CLUSTERS_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "runs";

/// Header of the ε-sweep CSV.
pub const ENERGY_CSV_HEADER: &str = "epsilon,p_eps,p0,rescaled,predicted,residual";

/// Relative tolerance on chamber areas of built clusters.
const AREA_TOL: f64 = 1e-9;
/// Tolerance on quantities that are exact by construction.
const EXACT_TOL: f64 = 1e-9;
/// Grid used to validate swept clusters.
const VALIDATION_GRID: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DoubleBubble,
    Recovery,
    StickySearch,
    IsopFuzz,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DoubleBubble => "double-bubble",
            ExperimentKind::Recovery => "recovery",
            ExperimentKind::StickySearch => "sticky-search",
            ExperimentKind::IsopFuzz => "isop-fuzz",
        }
    }
}

/// ε values: an explicit list or `points` values spaced geometrically from
/// `from` to `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    List(Vec<f64>),
    Range { from: f64, to: f64, points: usize },
}

impl Default for EpsilonSpec {
    fn default() -> Self {
        EpsilonSpec::List(vec![1e-1, 1e-2, 1e-3])
    }
}

impl EpsilonSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            EpsilonSpec::List(v) => v.clone(),
            &EpsilonSpec::Range { from, to, points } => {
                if points < 2 || !(from > 0.0 && to > 0.0) {
                    return Err(Error::Config("ε range needs positive ends and at least 2 points".into()));
                }
                let (a, b) = (from.ln(), to.ln());
                (0..points)
                    .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(Error::Config("ε list is empty".into()));
        }
        if let Some(e) = v.iter().find(|e| !(**e > 0.0 && **e < 2.0)) {
            return Err(Error::Config(format!("ε = {e} is outside (0, 2)")));
        }
        Ok(v)
    }
}

/// Disks given by centers and radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub epsilon: EpsilonSpec,
    /// Recovery: radii of a tangent chain. Sticky search: the radii to pack.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Recovery: an explicit disk configuration, overriding `radii`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disks: Option<DiskSpec>,
    /// Double bubble: the two chamber areas (default π, π).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub areas: Option<[f64; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: RecoveryMode,
    #[serde(default)]
    pub schedule: Schedule,
    /// Fuzz suite size.
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default)]
    pub fuzz: FuzzSpec,
    #[serde(default)]
    pub render: bool,
    /// Output root; not part of the config hash.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

fn default_cases() -> usize {
    1000
}

impl SweepConfig {
    /// A config of the given kind with every other field at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        SweepConfig {
            kind,
            epsilon: EpsilonSpec::default(),
            radii: None,
            disks: None,
            areas: None,
            seed: 0,
            mode: RecoveryMode::default(),
            schedule: Schedule::default(),
            cases: default_cases(),
            fuzz: FuzzSpec::default(),
            render: false,
            out_dir: None,
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// First 12 hex digits of the SHA-256 of the config's canonical JSON.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(serde_json::to_vec(self)?);
        Ok(digest.iter().take(6).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        }))
    }

    /// `out_dir`, else the environment variable, else `runs`.
    pub fn out_root(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn run_dir(&self) -> Result<PathBuf> {
        Ok(self.out_root().join(format!("{}-{}", self.kind.name(), self.hash()?)))
    }

    fn disk_configuration(&self, fallback: &[f64]) -> Result<DiskConfiguration> {
        match (&self.disks, &self.radii) {
            (Some(d), _) => DiskConfiguration::new(d.centers.clone(), d.radii.clone()),
            (None, Some(r)) => DiskConfiguration::chain(r),
            (None, None) => DiskConfiguration::chain(fallback),
        }
    }
}

/// One internal assertion of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub kind: ExperimentKind,
    pub run_dir: PathBuf,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
    pub summary: Value,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Collected outputs of a run before they are written.
struct Output {
    files: Vec<(String, String)>,
    checks: Vec<Check>,
    summary: Value,
}

pub fn energy_csv(rows: &[EnergyReport]) -> String {
    let mut s = String::from(ENERGY_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.epsilon, r.p_eps, r.p0, r.rescaled, r.predicted, r.residual
        );
    }
    s
}

/// Log-log slope of |residual| against ε and the rescaled energy at the
/// smallest ε.
fn energy_summary(rows: &[EnergyReport], expected_limit: f64) -> (Value, Option<f64>, f64) {
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.residual.abs()).collect();
    let slope = loglog_slope(&eps, &res);
    let last = rows
        .iter()
        .min_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .expect("non-empty sweep");
    let summary = json!({
        "residual_slope": slope,
        "limit_rescaled": last.rescaled,
        "expected_limit": expected_limit,
        "smallest_epsilon": last.epsilon,
    });
    (summary, slope, last.rescaled)
}

fn limit_check(limit: f64, expected: f64, rel: f64) -> Check {
    let err = ((limit - expected) / expected).abs();
    Check::new(
        "limit",
        err <= rel,
        format!("rescaled energy {limit:.6} vs {expected:.6} (relative error {err:.2e}, tolerance {rel})"),
    )
}

fn run_double_bubble(cfg: &SweepConfig) -> Result<Output> {
    let [m1, m2] = cfg.areas.unwrap_or([PI, PI]);
    let (r1, r2) = ((m1 / PI).sqrt(), (m2 / PI).sqrt());
    let weight = harmonic_weight(r1, r2);
    let p0 = 2.0 * PI * (r1 + r2);
    let eps = cfg.epsilon.values()?;
    let sols = eps
        .par_iter()
        .map(|&e| solve_double_bubble(e, m1, m2))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (k, s) in sols.iter().enumerate() {
        let e = s.epsilon;
        let predicted = p0 - 4.0 / 3.0 * e.powf(1.5) * weight;
        rows.push(EnergyReport::new(e, s.p_eps, p0, predicted));
        let areas = s.cluster.chamber_areas()?;
        let area_err = (areas[0] - m1).abs() / m1 + (areas[1] - m2).abs() / m2;
        checks.push(Check::new(format!("areas[{e:e}]"), area_err <= AREA_TOL, format!("relative error {area_err:.2e}")));
        checks.push(Check::new(
            format!("curvature-balance[{e:e}]"),
            s.curvature_balance().abs() <= EXACT_TOL,
            format!("{:.2e}", s.curvature_balance()),
        ));
        if cfg.render {
            files.push((format!("cluster-{k:02}.svg"), render_svg(&s.cluster, &RenderStyle::default())?));
        }
        files.push((format!("cluster-{k:02}.json"), s.cluster.to_json()?));
    }
    let (summary, _, limit) = energy_summary(&rows, -weight);
    checks.push(limit_check(limit, -weight, 0.02));
    files.insert(0, ("energy.csv".into(), energy_csv(&rows)));
    Ok(Output { files, checks, summary })
}

fn run_recovery(cfg: &SweepConfig) -> Result<Output> {
    let d = cfg.disk_configuration(&[1.0, 1.0])?;
    let g = contact_graph(&d, d.default_tol())?;
    let eps = cfg.epsilon.values()?;
    let builds = eps
        .par_iter()
        .map(|&e| {
            let b = build_recovery_with(&d, e, cfg.mode)?;
            let p = p_epsilon(&b.cluster, e)?;
            let structure = structure_report(&b.cluster, &d, e)?;
            let diagnostics = validate_cluster(&b.cluster, VALIDATION_GRID);
            Ok((e, b, p, structure, diagnostics))
        })
        .collect::<Result<Vec<_>>>()?;
    let p0: f64 = d.radii.iter().map(|r| 2.0 * PI * r).sum();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut files = Vec::new();
    let mut modes = Vec::new();
    for (k, (e, b, p, structure, diagnostics)) in builds.iter().enumerate() {
        rows.push(EnergyReport::new(*e, *p, p0, predicted_recovery_energy(&d, *e)?));
        modes.push(b.plan.mode);
        let areas = b.cluster.chamber_areas()?;
        let area_err = areas
            .iter()
            .zip(&d.radii)
            .map(|(a, r)| (a - PI * r * r).abs() / (PI * r * r))
            .fold(0.0, f64::max);
        checks.push(Check::new(format!("areas[{e:e}]"), area_err <= AREA_TOL, format!("relative error {area_err:.2e}")));
        checks.push(Check::new(
            format!("structure[{e:e}]"),
            structure.ok(EXACT_TOL),
            structure.failures(EXACT_TOL).join("; "),
        ));
        checks.push(Check::new(format!("validity[{e:e}]"), diagnostics.ok(), diagnostics.failures().join("; ")));
        if cfg.render {
            files.push((format!("cluster-{k:02}.svg"), render_svg(&b.cluster, &RenderStyle::default())?));
        }
        files.push((format!("cluster-{k:02}.json"), b.cluster.to_json()?));
    }
    let expected = -g.total_weight();
    let (mut summary, _, limit) = energy_summary(&rows, expected);
    summary["modes"] = json!(modes);
    summary["contacts"] = json!(g.edges.len());
    if g.edges.is_empty() {
        checks.push(Check::new("limit", rows.iter().all(|r| r.residual.abs() <= 1e-9 * p0), "no contacts: P_ε = P_0"));
    } else {
        checks.push(limit_check(limit, expected, 0.05));
    }
    files.insert(0, ("energy.csv".into(), energy_csv(&rows)));
    Ok(Output { files, checks, summary })
}

fn run_sticky(cfg: &SweepConfig) -> Result<Output> {
    let radii = cfg.radii.clone().unwrap_or_else(|| vec![1.0; 6]);
    let search = maximize_tangencies(&radii, cfg.seed, &cfg.schedule)?;
    let mut checks = Vec::new();
    let mut files = Vec::new();
    let mut csv = String::from("restart,seed,T,contacts,path2,certificate\n");
    for r in &search.restarts {
        let _ = writeln!(
            csv,
            "{},{},{:.16e},{},{},{}",
            r.restart, r.seed, r.ledger.tangency, r.ledger.contacts, r.ledger.path2, r.certificate
        );
    }
    files.push(("restarts.csv".into(), csv));
    let equal = radii.iter().all(|r| (r - radii[0]).abs() <= 1e-12 * radii[0]);
    let lattice = if equal && radii.len() <= MAX_LATTICE_N {
        let l = lattice_enumerate_max_contacts(radii.len())?;
        checks.push(Check::new(
            "lattice-optimum",
            search.ledger.contacts == l.max_contacts,
            format!("search found {} contacts, lattice maximum {}", search.ledger.contacts, l.max_contacts),
        ));
        Some(l)
    } else {
        None
    };
    let style = RenderStyle::default();
    for (k, d) in search.optimal.iter().enumerate() {
        let g = contact_graph(d, d.default_tol())?;
        checks.push(Check::new(
            format!("optimal-{k}"),
            g.edges.len() == search.ledger.contacts,
            format!("{} contacts", g.edges.len()),
        ));
        if cfg.render {
            files.push((format!("optimal-{k:02}.svg"), render_disks(d, &g.edges, &style)?));
        }
    }
    if let (Some(l), true) = (&lattice, cfg.render) {
        for (k, c) in l.configurations.iter().enumerate() {
            let g = contact_graph(&c.disks, c.disks.default_tol())?;
            files.push((format!("lattice-{k:02}.svg"), render_disks(&c.disks, &g.edges, &style)?));
        }
    }
    let summary = json!({
        "n": radii.len(),
        "T": search.ledger.tangency,
        "contacts": search.ledger.contacts,
        "path2": search.ledger.path2,
        "certificate": search.certificate,
        "optimal_found": search.optimal.len(),
        "lattice": lattice.as_ref().map(|l| json!({
            "max_contacts": l.max_contacts,
            "configurations": l.configurations.len(),
            "count_without_reflection": l.count_without_reflection,
            "animals": l.animals,
        })),
    });
    files.push(("search.json".into(), serde_json::to_string_pretty(&search)?));
    if let Some(l) = &lattice {
        files.push(("lattice.json".into(), serde_json::to_string_pretty(l)?));
    }
    Ok(Output { files, checks, summary })
}

/// Chords for the series-residual regression.
const SERIES_CHORDS: [f64; 5] = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
/// Dent curvature for the series-residual regression.
const SERIES_KAPPA: f64 = -1.5;

fn run_isop_fuzz(cfg: &SweepConfig) -> Result<Output> {
    let cases = isop_fuzz(cfg.cases, cfg.seed, &cfg.fuzz)?;
    let mut csv = String::from(FuzzCase::CSV_HEADER);
    csv.push('\n');
    for c in &cases {
        csv.push_str(&c.csv_row());
        csv.push('\n');
    }
    let embedded = cases.iter().filter(|c| c.report.embedded).count();
    let failures: Vec<u64> = cases
        .iter()
        .filter(|c| c.report.exact_holds() == Some(false))
        .map(|c| c.seed)
        .collect();
    let min_slack = cases.iter().map(|c| c.report.slack).fold(f64::INFINITY, f64::min);
    let residuals = series_residuals(SERIES_KAPPA, &SERIES_CHORDS)?;
    let dp: Vec<f64> = residuals.iter().map(|r| r.0.abs()).collect();
    let da: Vec<f64> = residuals.iter().map(|r| r.1.abs()).collect();
    let slope_dp = loglog_slope(&SERIES_CHORDS, &dp);
    let slope_da = loglog_slope(&SERIES_CHORDS, &da);
    let slope_ok = |s: Option<f64>| s.is_some_and(|s| s >= 4.8);
    let checks = vec![
        Check::new(
            "exact-inequality",
            failures.is_empty(),
            format!("{} of {embedded} embedded cases violate; seeds {failures:?}", failures.len()),
        ),
        Check::new("series-dp-slope", slope_ok(slope_dp), format!("{slope_dp:?}")),
        Check::new("series-da-slope", slope_ok(slope_da), format!("{slope_da:?}")),
    ];
    let summary = json!({
        "cases": cases.len(),
        "embedded": embedded,
        "inconclusive": cases.len() - embedded,
        "min_slack": min_slack,
        "series_dp_slope": slope_dp,
        "series_da_slope": slope_da,
    });
    Ok(Output {
        files: vec![("fuzz.csv".into(), csv)],
        checks,
        summary,
    })
}

/// Runs the experiment and writes its outputs, a summary and a manifest into
/// the run directory. Returns the outcome even when checks fail; errors are
/// reserved for inputs or constructions that could not be evaluated.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let out = match cfg.kind {
        ExperimentKind::DoubleBubble => run_double_bubble(cfg)?,
        ExperimentKind::Recovery => run_recovery(cfg)?,
        ExperimentKind::StickySearch => run_sticky(cfg)?,
        ExperimentKind::IsopFuzz => run_isop_fuzz(cfg)?,
    };
    let run_dir = cfg.run_dir()?;
    fs::create_dir_all(&run_dir)?;
    let mut names = Vec::new();
    for (name, body) in &out.files {
        fs::write(run_dir.join(name), body)?;
        names.push(name.clone());
    }
    let summary = json!({
        "kind": cfg.kind,
        "passed": out.checks.iter().all(|c| c.passed),
        "checks": out.checks,
        "summary": out.summary,
    });
    fs::write(run_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    names.push("summary.json".into());
    let manifest = json!({
        "kind": cfg.kind,
        "config_hash": cfg.hash()?,
        "config": cfg,
        "version": env!("CARGO_PKG_VERSION"),
        "files": names,
    });
    fs::write(run_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    names.push("manifest.json".into());
    Ok(SweepOutcome {
        kind: cfg.kind,
        run_dir,
        files: names,
        checks: out.checks,
        summary: out.summary,
    })
}
