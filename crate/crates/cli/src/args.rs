use std::path::{Path, PathBuf};

use arw_core::stabilization::DEFAULT_BUDGET;
use arw_core::Family;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "arw-lab", version, about = "Activated random walk experiments on finite balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Stabilize one sampled configuration and write the per-site odometer.
    Stabilize,
    /// Run the property suite; exits with status 2 if any check fails.
    Verify,
    /// Estimate per-ball statistics over a (lambda, mu, L) grid.
    Sweep,
    /// Write Green's function tables of a ball.
    Greens,
    /// Bracket the density at which a positive fraction of mass leaves the ball.
    Phase,
}

/// Every option is optional so that a JSON config file can fill the gaps.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// JSON file with default values for any of these options.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub family: Option<Family>,
    /// Lattice dimension, or tree degree.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    #[arg(long = "L", global = true)]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[arg(long = "L-list", global = true, value_delimiter = ',')]
    #[serde(rename = "L-list")]
    pub l_list: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub mu_grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "ARW_LAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the records as JSON to this path.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Instruction budget per stabilization.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Leaving density that counts as activity for `phase`.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Smaller instance counts for `verify`.
    #[arg(long, global = true)]
    #[serde(default)]
    pub quick: bool,
    /// Full `G(x, y)` table for `greens` instead of the column `y = 0`.
    #[arg(long, global = true)]
    #[serde(default)]
    pub all_pairs: bool,
}

impl Options {
    /// Fills unset fields from `base`.
    fn or(self, base: Options) -> Options {
        Options {
            config: self.config,
            family: self.family.or(base.family),
            d: self.d.or(base.d),
            l: self.l.or(base.l),
            l_list: self.l_list.or(base.l_list),
            lambda: self.lambda.or(base.lambda),
            lambda_grid: self.lambda_grid.or(base.lambda_grid),
            mu: self.mu.or(base.mu),
            mu_grid: self.mu_grid.or(base.mu_grid),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
            json: self.json.or(base.json),
            budget: self.budget.or(base.budget),
            threshold: self.threshold.or(base.threshold),
            quick: self.quick || base.quick,
            all_pairs: self.all_pairs || base.all_pairs,
        }
    }
}

/// Fully resolved settings. Serialized into every output header; the thread
/// count and output paths are left out so they cannot change output bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: Command,
    pub family: Family,
    pub d: usize,
    #[serde(rename = "L")]
    pub radii: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub budget: u64,
    pub threshold: f64,
    pub quick: bool,
    pub all_pairs: bool,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

pub const DEFAULT_RADIUS: usize = 8;
pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_MU: f64 = 0.5;
pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_THRESHOLD: f64 = 0.01;

fn read_config(path: &Path) -> Result<Options, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

fn grid<T: Copy>(list: Option<Vec<T>>, single: Option<T>, default: Option<T>, name: &str) -> Result<Vec<T>, String> {
    let values = match (list, single) {
        (Some(list), _) => list,
        (None, Some(v)) => vec![v],
        (None, None) => default.into_iter().collect(),
    };
    if values.is_empty() {
        return Err(format!("{name} must not be empty"));
    }
    Ok(values)
}

impl ExperimentConfig {
    pub fn resolve(command: Command, flags: Options) -> Result<Self, String> {
        let opts = match &flags.config {
            Some(path) => {
                let file = read_config(path)?;
                flags.or(file)
            }
            None => flags,
        };
        let family = opts.family.unwrap_or(Family::Lattice);
        let d = opts.d.unwrap_or(match family {
            Family::Lattice => 2,
            Family::Tree => 3,
        });
        let radii = grid(opts.l_list, opts.l, Some(DEFAULT_RADIUS), "L list")?;
        let lambdas = grid(opts.lambda_grid, opts.lambda, Some(DEFAULT_LAMBDA), "lambda grid")?;
        let mu_default = (command != Command::Sweep).then_some(DEFAULT_MU);
        let mus = grid(opts.mu_grid, opts.mu, mu_default, "mu grid (set --mu or --mu-grid)")?;
        let cfg = ExperimentConfig {
            subcommand: command,
            family,
            d,
            radii,
            lambdas,
            mus,
            trials: opts.trials.unwrap_or(DEFAULT_TRIALS),
            seed: opts.seed.unwrap_or(0),
            budget: opts.budget.unwrap_or(DEFAULT_BUDGET),
            threshold: opts.threshold.unwrap_or(DEFAULT_THRESHOLD),
            quick: opts.quick,
            all_pairs: opts.all_pairs,
            threads: opts.threads,
            out: opts.out,
            json: opts.json,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.d == 0 {
            return Err("d must be positive".into());
        }
        if self.radii.contains(&0) {
            return Err("L must be positive".into());
        }
        if self.trials == 0 {
            return Err("trials must be positive".into());
        }
        if self.budget == 0 {
            return Err("budget must be positive".into());
        }
        if self.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(format!("lambda must be positive and finite, got {l}"));
        }
        if let Some(m) = self.mus.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
            return Err(format!("mu must be non-negative and finite, got {m}"));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(format!("threshold must lie in [0, 1), got {}", self.threshold));
        }
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.radii[0]
    }

    pub fn lambda(&self) -> f64 {
        self.lambdas[0]
    }

    pub fn mu(&self) -> f64 {
        self.mus[0]
    }

    /// One-line JSON rendering for output headers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
