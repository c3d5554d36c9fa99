//! Monte Carlo records and deterministic parallel trial execution.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// Sample mean and standard error of a scalar estimand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub estimand: String,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl EstimateRecord {
    pub fn from_samples(estimand: impl Into<String>, samples: &[f64], master_seed: u64) -> Self {
        let (mean, stderr) = mean_stderr(samples);
        EstimateRecord {
            estimand: estimand.into(),
            mean,
            stderr,
            trials: samples.len() as u64,
            master_seed,
        }
    }

    /// `(mean - reference) / stderr`, see [`z_score`].
    pub fn z(&self, reference: f64) -> f64 {
        z_score(self.mean - reference, self.stderr)
    }
}

/// Mean and standard error, summed in slice order so the result does not
/// depend on how the samples were produced.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|&s| (s - mean) * (s - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    (mean, sd / (n as f64).sqrt())
}

/// Signed deviation in standard errors. A zero standard error yields zero for
/// an exact match and an infinity of the deviation's sign otherwise.
pub fn z_score(deviation: f64, stderr: f64) -> f64 {
    if stderr > 0.0 {
        deviation / stderr
    } else if deviation == 0.0 {
        0.0
    } else {
        deviation.signum() * f64::INFINITY
    }
}

/// Runs `trial(0..trials)` on the current rayon pool and returns the results
/// in trial order.
pub fn run_trials<T, F>(trials: u64, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(trial).collect()
}
