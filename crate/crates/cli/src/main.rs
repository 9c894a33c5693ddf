use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use planar_clusters::recovery::{solve_double_bubble, RecoveryMode};
use planar_clusters::render::{render_svg, RenderStyle};
use planar_clusters::sweep::{run_sweep, EpsilonSpec, ExperimentKind, SweepConfig, OUT_DIR_ENV};
use planar_clusters::Cluster;
use serde_json::json;

/// Planar weighted clusters: ε-sweeps, packing searches, isoperimetric fuzzing
/// and SVG rendering.
#[derive(Parser)]
#[command(name = "clusters", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the exact weighted double bubble over ε.
    DoubleBubble {
        #[command(flatten)]
        common: Common,
        /// Chamber areas, comma separated (default π,π).
        #[arg(long, value_delimiter = ',', num_args = 2)]
        areas: Option<Vec<f64>>,
    },
    /// Sweep the recovery construction around a chain of tangent disks.
    Recovery {
        #[command(flatten)]
        common: Common,
        /// Radii of the tangent chain, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Search for disk packings with the most tangencies.
    Sticky {
        #[command(flatten)]
        common: Common,
        /// Radii to pack, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "n")]
        radii: Option<Vec<f64>>,
        /// Number of unit disks.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Check the curvature-deficit bound on random dented disks.
    IsopFuzz {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Draw a cluster as SVG.
    Render {
        /// Cluster JSON file; omit to draw the double bubble at --epsilon.
        cluster: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Render style as TOML.
        #[arg(long)]
        style: Option<PathBuf>,
        /// Output file (default stdout).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ε values, comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; the run goes into a subdirectory named after the config hash.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Also write SVG drawings.
    #[arg(long)]
    render: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Rounded,
    Radial,
}

impl From<Mode> for RecoveryMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => RecoveryMode::Auto,
            Mode::Rounded => RecoveryMode::Rounded,
            Mode::Radial => RecoveryMode::Radial,
        }
    }
}

impl Common {
    fn config(&self, kind: ExperimentKind) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = SweepConfig::load(path).with_context(|| format!("reading {}", path.display()))?;
                if cfg.kind != kind {
                    bail!("config {} is for {}, not {}", path.display(), cfg.kind.name(), kind.name());
                }
                cfg
            }
            None => SweepConfig::new(kind),
        };
        if let Some(e) = &self.epsilon {
            cfg.epsilon = EpsilonSpec::List(e.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.out.is_some() {
            cfg.out_dir = self.out.clone();
        }
        cfg.render |= self.render;
        Ok(cfg)
    }
}

fn sweep(cfg: SweepConfig) -> Result<bool> {
    let out = run_sweep(&cfg)?;
    let report = json!({
        "kind": out.kind,
        "run_dir": out.run_dir,
        "passed": out.passed(),
        "failed_checks": out.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>(),
        "summary": out.summary,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(out.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::DoubleBubble { common, areas } => {
            let mut cfg = common.config(ExperimentKind::DoubleBubble)?;
            if let Some(a) = areas {
                cfg.areas = Some([a[0], a[1]]);
            }
            sweep(cfg)
        }
        Command::Recovery { common, radii, mode } => {
            let mut cfg = common.config(ExperimentKind::Recovery)?;
            if radii.is_some() {
                cfg.radii = radii;
                cfg.disks = None;
            }
            if let Some(m) = mode {
                cfg.mode = m.into();
            }
            sweep(cfg)
        }
        Command::Sticky { common, radii, n, restarts } => {
            let mut cfg = common.config(ExperimentKind::StickySearch)?;
            if let Some(n) = n {
                cfg.radii = Some(vec![1.0; n]);
            } else if radii.is_some() {
                cfg.radii = radii;
            }
            if let Some(r) = restarts {
                cfg.schedule.restarts = r;
            }
            sweep(cfg)
        }
        Command::IsopFuzz { common, cases } => {
            let mut cfg = common.config(ExperimentKind::IsopFuzz)?;
            if let Some(c) = cases {
                cfg.cases = c;
            }
            sweep(cfg)
        }
        Command::Render {
            cluster,
            epsilon,
            style,
            output,
        } => {
            let c = match cluster {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    Cluster::from_json(&text)?
                }
                None => solve_double_bubble(epsilon, std::f64::consts::PI, std::f64::consts::PI)?.cluster,
            };
            let style: RenderStyle = match style {
                Some(path) => RenderStyle::from_toml(&fs::read_to_string(&path)?)?,
                None => RenderStyle::default(),
            };
            let svg = render_svg(&c, &style)?;
            match output {
                Some(path) => fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{svg}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let kind = e
                .chain()
                .find_map(|c| c.downcast_ref::<planar_clusters::Error>())
                .map_or("cli", |e| e.kind());
            let body = json!({ "error": kind, "message": format!("{e:#}") });
            eprintln!("{body}");
            ExitCode::from(2)
        }
    }
}
