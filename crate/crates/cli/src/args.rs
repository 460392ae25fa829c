//! Command-line flags. Each flag overrides the matching config field.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_spde_core::{KernelFamily, OperatorFamily};

use crate::commands::parse_t_grid;
use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "levy-spde", version, about = "Simulation and acceptance checks for SPDEs driven by Lévy colored noise")]
pub struct Cli {
    /// TOML run configuration; every field has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "LEVY_SPDE_WORKERS")]
    pub workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to csv for sweeps and json for check reports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dalang condition and cutoff-stability verdict.
    Dalang {
        #[command(flatten)]
        model: ModelArgs,
        /// Run the whole dimension and α grid instead of one kernel.
        #[arg(long)]
        sweep: bool,
    },
    /// Isometry, characteristic function and Rosenthal checks of the noise.
    NoiseCheck {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Monte Carlo moments of the linear solution.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        // `-0.5,0` is one value; a numeric check alone would reject it.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<usize>,
        /// Half-width of the simulation box.
        #[arg(long = "box")]
        box_half_width: Option<f64>,
    },
    /// `J_p(t)` against its bound.
    Jp {
        #[command(flatten)]
        model: ModelArgs,
        /// `a:b:log` or `a:b:lin`, optionally `:n` points.
        #[arg(long, value_parser = parse_grid)]
        t_grid: Option<TimeGrid>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// Chaos terms, their bounds and the series certificate.
    Chaos {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        m2: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        #[arg(long)]
        tail_tol: Option<f64>,
        /// Monte Carlo samples per order.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// The acceptance suite.
    Acceptance {
        /// Criteria to run; all fifteen when absent.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
        /// Multiplies every Monte Carlo trial count.
        #[arg(long)]
        trial_scale: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_operator)]
    pub op: Option<OperatorFamily>,
    #[arg(long, value_parser = parse_kernel)]
    pub kernel: Option<KernelFamily>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
}

/// A parsed `--t-grid`, kept whole so that clap treats it as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<TimeGrid, String> {
    parse_t_grid(s).map(TimeGrid)
}

fn parse_operator(s: &str) -> Result<OperatorFamily, String> {
    OperatorFamily::parse(s).map_err(|e| e.to_string())
}

fn parse_kernel(s: &str) -> Result<KernelFamily, String> {
    KernelFamily::parse(s).map_err(|e| e.to_string())
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ModelArgs {
    fn apply(&self, config: &mut RunConfig) {
        set(&mut config.operator, self.op);
        set(&mut config.kernel.family, self.kernel);
        set(&mut config.kernel.alpha, self.alpha);
        set(&mut config.kernel.dim, self.dim);
    }
}

impl Cli {
    /// Layers the flags over the config.
    pub fn apply(&self, config: &mut RunConfig) {
        set(&mut config.seed, self.seed);
        if self.workers.is_some() {
            config.workers = self.workers;
        }
        match &self.command {
            Command::Dalang { model, .. } => model.apply(config),
            Command::NoiseCheck { trials } => set(&mut config.trials, *trials),
            Command::Simulate { model, t, x, p, trials, box_half_width } => {
                model.apply(config);
                set(&mut config.grid.t, t.clone());
                set(&mut config.grid.x, x.clone());
                set(&mut config.grid.p, p.clone());
                set(&mut config.trials, *trials);
                if box_half_width.is_some() {
                    config.grid.box_half_width = *box_half_width;
                }
            }
            Command::Jp { model, t_grid, p } => {
                model.apply(config);
                set(&mut config.grid.t, t_grid.as_ref().map(|g| g.0.clone()));
                set(&mut config.grid.p, p.clone());
            }
            Command::Chaos { model, t, m2, orders, tail_tol, samples } => {
                model.apply(config);
                set(&mut config.chaos.t, *t);
                set(&mut config.chaos.m2, *m2);
                set(&mut config.chaos.orders, orders.clone());
                set(&mut config.chaos.tail_tol, *tail_tol);
                set(&mut config.chaos.samples, *samples);
            }
            Command::Acceptance { criteria, trial_scale } => {
                set(&mut config.acceptance.criteria, criteria.clone());
                set(&mut config.acceptance.trial_scale, *trial_scale);
            }
        }
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Dalang { .. } => "dalang",
            Command::NoiseCheck { .. } => "noise-check",
            Command::Simulate { .. } => "simulate",
            Command::Jp { .. } => "jp",
            Command::Chaos { .. } => "chaos",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}
