//! Monte Carlo estimators over random initial configurations and tapes, and
//! the closed-form bounds they are compared against.
//!
//! Trial `t` of a run with master seed `s` draws its configuration from
//! `derive_seed(s, TrialConfig, t)` and its tape from `derive_seed(s, TrialTape, t)`.
//! Trials run on the current rayon pool and are reduced in trial order, so
//! every record is a pure function of its parameters.

use serde::Serialize;

use crate::config::{sample_poisson_config, Config};
use crate::error::{ArwError, Result};
use crate::graph::{Family, FiniteRegion, Vertex};
use crate::greens::{green_exact, green_to_origin};
use crate::rng::{derive_seed, Stream};
use crate::stabilization::{
    enforced_stabilize_with, excess_from_counts, excess_jumps_with, stabilize_with, stabilize_via_weak_with, ToppleOrder,
    DEFAULT_BUDGET,
};
use crate::stats::{mean_stderr, run_trials, z_score, EstimateRecord};
use crate::tape::InstructionTape;

/// Inequality checks accept deviations up to this many standard errors.
pub const SIGMA_TOLERANCE: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialParams {
    pub mu: f64,
    pub lambda: f64,
    pub trials: u64,
    pub seed: u64,
    pub budget: u64,
}

impl TrialParams {
    pub fn new(mu: f64, lambda: f64, trials: u64, seed: u64) -> Self {
        TrialParams {
            mu,
            lambda,
            trials,
            seed,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ArwError::domain("trials must be at least 1"));
        }
        if !(self.mu >= 0.0) {
            return Err(ArwError::domain(format!("mu must be non-negative, got {}", self.mu)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ArwError::domain(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    fn sleep_probability(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }
}

/// Initial configuration and tape of trial `t`.
pub fn trial_inputs(region: &FiniteRegion, params: &TrialParams, t: u64) -> Result<(Config, InstructionTape)> {
    let config = sample_poisson_config(
        region,
        params.mu,
        derive_seed(params.seed, Stream::TrialConfig, t),
    )?;
    let tape = InstructionTape::new(
        derive_seed(params.seed, Stream::TrialTape, t),
        params.lambda,
        region.degree(),
    )?;
    Ok((config, tape))
}

fn check_site(region: &FiniteRegion, x: Vertex) -> Result<()> {
    if region.is_interior(x) {
        Ok(())
    } else {
        Err(ArwError::domain(format!("vertex {x} is not interior")))
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `Q(x, K)`: probability that `x` hosts a sleeping particle once `K` is stable.
pub fn estimate_q(region: &FiniteRegion, x: Vertex, params: &TrialParams) -> Result<EstimateRecord> {
    params.validate()?;
    check_site(region, x)?;
    let samples = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        Ok(indicator(r.final_config.is_sleeping(x)))
    })?;
    Ok(EstimateRecord::from_samples(format!("Q({x})"), &samples, params.seed))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OriginActivity {
    /// Jump instructions used at the origin, `M_K(0)`.
    pub jumps: EstimateRecord,
    /// Instructions used at the origin, `m_K(0)`.
    pub instructions: EstimateRecord,
    /// `P(m_K(0) >= 1)`.
    pub toppled: EstimateRecord,
}

pub fn estimate_origin_activity(region: &FiniteRegion, params: &TrialParams) -> Result<OriginActivity> {
    params.validate()?;
    let o = region.origin();
    let rows = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        Ok((r.jumps[o] as f64, r.instructions[o] as f64, indicator(r.instructions[o] >= 1)))
    })?;
    let col = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    Ok(OriginActivity {
        jumps: EstimateRecord::from_samples("M(0)", &col(|r| r.0), params.seed),
        instructions: EstimateRecord::from_samples("m(0)", &col(|r| r.1), params.seed),
        toppled: EstimateRecord::from_samples("P(m(0)>=1)", &col(|r| r.2), params.seed),
    })
}

/// `1 - (1 - G/(H+1)) (1/(1+lambda))^H`, an upper bound on `Q(x, K)` when
/// `G = G_{K^c}(x, x)`.
pub fn theorem_bound(green: f64, lambda: f64, h: u64) -> Result<f64> {
    if h == 0 {
        return Err(ArwError::domain("H must be a positive integer"));
    }
    if !(green >= 1.0 && green.is_finite()) {
        return Err(ArwError::domain(format!("Green's value must be finite and >= 1, got {green}")));
    }
    if !(lambda > 0.0) {
        return Err(ArwError::domain(format!("lambda must be positive, got {lambda}")));
    }
    let keep = (1.0 + lambda).powf(-(h as f64));
    Ok(1.0 - (1.0 - green / (h as f64 + 1.0)) * keep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub green: f64,
    /// `ceil(sqrt(G / ln(1 + lambda)))`.
    pub h_star: u64,
    pub g_value: f64,
    pub argmin: u64,
    pub per_h: Vec<(u64, f64)>,
}

/// Minimum of [`theorem_bound`] over `H in 1..=max(64, 4 H*)`.
pub fn g_lambda(green: f64, lambda: f64) -> Result<BoundReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ArwError::domain(format!("lambda must be positive and finite, got {lambda}")));
    }
    let h_star = (green / lambda.ln_1p()).sqrt().ceil().max(1.0) as u64;
    let upper = (4 * h_star).max(64);
    let per_h = (1..=upper)
        .map(|h| theorem_bound(green, lambda, h).map(|b| (h, b)))
        .collect::<Result<Vec<_>>>()?;
    let &(argmin, g_value) = per_h
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("scan is non-empty");
    Ok(BoundReport {
        lambda,
        green,
        h_star,
        g_value,
        argmin,
        per_h,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassBalance {
    /// `M_{B_L}(0)`.
    pub lhs: EstimateRecord,
    /// `sum_y G(y, 0) (mu - 1{y sleeping})` per trial.
    pub rhs: EstimateRecord,
    /// Per-trial `lhs - rhs`.
    pub residual: EstimateRecord,
    pub z: f64,
    pub holds: bool,
}

/// Compares `E M_K(0)` with `sum_y G_{K^c}(y, 0) (mu - Q(y, K))` on shared
/// trials.
pub fn mass_balance_residual(region: &FiniteRegion, params: &TrialParams) -> Result<MassBalance> {
    params.validate()?;
    let green = green_to_origin(region)?;
    let mass: f64 = params.mu * green.iter().sum::<f64>();
    let o = region.origin();
    let rows = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        let sleeping: f64 = region
            .vertices()
            .filter(|&y| r.final_config.is_sleeping(y))
            .map(|y| green[y])
            .sum();
        Ok((r.jumps[o] as f64, mass - sleeping))
    })?;
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.0 - r.1).collect();
    let residual = EstimateRecord::from_samples("M(0)-rhs", &res, params.seed);
    let z = residual.z(0.0);
    Ok(MassBalance {
        lhs: EstimateRecord::from_samples("M(0)", &lhs, params.seed),
        rhs: EstimateRecord::from_samples("sum G(y,0)(mu-Q(y))", &rhs, params.seed),
        residual,
        z,
        holds: z.abs() <= SIGMA_TOLERANCE,
    })
}

/// Statistical check of `smaller <= larger` from per-trial samples of both
/// sides; a side with zero standard error is exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub label: String,
    pub smaller: EstimateRecord,
    pub larger: EstimateRecord,
    /// Per-trial `larger - smaller`.
    pub gap: EstimateRecord,
    /// `gap.mean / gap.stderr`; negative values indicate violation.
    pub z: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn from_pairs(label: String, pairs: &[(f64, f64)], seed: u64) -> Self {
        let smaller: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let larger: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let gap: Vec<f64> = pairs.iter().map(|p| p.1 - p.0).collect();
        let (mean, stderr) = mean_stderr(&gap);
        let z = z_score(mean, stderr);
        InequalityCheck {
            smaller: EstimateRecord::from_samples(format!("{label}:smaller"), &smaller, seed),
            larger: EstimateRecord::from_samples(format!("{label}:larger"), &larger, seed),
            gap: EstimateRecord::from_samples(format!("{label}:gap"), &gap, seed),
            label,
            z,
            holds: z >= -SIGMA_TOLERANCE,
        }
    }
}

/// `P(m_K(x) >= 1) lambda/(1+lambda) <= Q(x, K)`.
pub fn sleep_lower_bound_check(region: &FiniteRegion, x: Vertex, params: &TrialParams) -> Result<InequalityCheck> {
    params.validate()?;
    check_site(region, x)?;
    let p = params.sleep_probability();
    let pairs = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        Ok((p * indicator(r.instructions[x] >= 1), indicator(r.final_config.is_sleeping(x))))
    })?;
    Ok(InequalityCheck::from_pairs(
        format!("sleep_lower_bound({x})"),
        &pairs,
        params.seed,
    ))
}

/// `E A_(x,K) <= G_{K^c}(x, x)`.
pub fn excess_mean_check(region: &FiniteRegion, x: Vertex, params: &TrialParams) -> Result<InequalityCheck> {
    params.validate()?;
    check_site(region, x)?;
    let green = green_exact(region, &[], x, x)?;
    let pairs = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        Ok((excess_jumps_with(x, region, &config, &tape, params.budget)? as f64, green))
    })?;
    Ok(InequalityCheck::from_pairs(format!("excess_mean({x})"), &pairs, params.seed))
}

/// `Q(x, K) <= min_H bound(G_{K^c}(x, x), lambda, H)`.
pub fn q_upper_bound_check(region: &FiniteRegion, x: Vertex, params: &TrialParams) -> Result<InequalityCheck> {
    params.validate()?;
    check_site(region, x)?;
    let bound = g_lambda(green_exact(region, &[], x, x)?, params.lambda)?.g_value;
    let pairs = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        Ok((indicator(r.final_config.is_sleeping(x)), bound))
    })?;
    Ok(InequalityCheck::from_pairs(format!("q_upper_bound({x})"), &pairs, params.seed))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBucket {
    pub ell: u64,
    /// `P(x sleeping at the end, T = ell)`.
    pub joint: EstimateRecord,
    /// `(lambda/(1+lambda)) (1/(1+lambda))^(ell-2) P(A >= ell - 2)`.
    pub bound: EstimateRecord,
    pub z: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBoundReport {
    pub buckets: Vec<TailBucket>,
    /// Trials ending with `x` sleeping after a single round. Always zero when
    /// no particle starts asleep at `x`.
    pub single_round_sleepers: u64,
    pub trials: u64,
}

impl TailBoundReport {
    pub fn holds(&self) -> bool {
        self.single_round_sleepers == 0 && self.buckets.iter().all(|b| b.holds)
    }
}

/// Per-`ell` check of the tail bound on the number of rounds of stabilization
/// via weak stabilization.
pub fn tail_bound_check(region: &FiniteRegion, x: Vertex, params: &TrialParams, ells: &[u64]) -> Result<TailBoundReport> {
    params.validate()?;
    check_site(region, x)?;
    if ells.iter().any(|&l| l < 2) {
        return Err(ArwError::domain("tail buckets start at ell = 2"));
    }
    let rows = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let via = stabilize_via_weak_with(x, region, &config, &tape, params.budget)?;
        let enforced = enforced_stabilize_with(x, region, &config, &tape, params.budget)?;
        let excess = excess_from_counts(enforced.jumps[x], via.weak_jumps()[x]);
        Ok((via.final_config().is_sleeping(x), via.rounds_to_stable, excess))
    })?;
    let p = params.sleep_probability();
    let q = 1.0 / (1.0 + params.lambda);
    let buckets = ells
        .iter()
        .map(|&ell| {
            let c = p * q.powi((ell - 2) as i32);
            let joint: Vec<f64> = rows.iter().map(|r| indicator(r.0 && r.1 == ell)).collect();
            let bound: Vec<f64> = rows.iter().map(|r| c * indicator(r.2 >= ell - 2)).collect();
            let gap: Vec<f64> = joint.iter().zip(&bound).map(|(j, b)| b - j).collect();
            let (mean, stderr) = mean_stderr(&gap);
            let z = z_score(mean, stderr);
            TailBucket {
                ell,
                joint: EstimateRecord::from_samples(format!("P(S,T={ell})"), &joint, params.seed),
                bound: EstimateRecord::from_samples(format!("tail_bound({ell})"), &bound, params.seed),
                z,
                holds: z >= -SIGMA_TOLERANCE,
            }
        })
        .collect();
    Ok(TailBoundReport {
        buckets,
        single_round_sleepers: rows.iter().filter(|r| r.0 && r.1 == 1).count() as u64,
        trials: params.trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActivityRow {
    pub family: Family,
    pub dim: usize,
    pub radius: usize,
    pub vertices: usize,
    pub lambda: f64,
    pub mu: f64,
    /// `Q(0, B_L)`.
    pub q_origin: EstimateRecord,
    /// `P(m_{B_L}(0) >= 1)`.
    pub toppled: EstimateRecord,
    /// Absorbed particles per site.
    pub leaving_density: EstimateRecord,
    /// Sleeping particles per site at the end.
    pub sleeping_density: EstimateRecord,
}

/// One pass of trials on `region` collecting every per-ball statistic.
pub fn activity_row(region: &FiniteRegion, params: &TrialParams) -> Result<ActivityRow> {
    params.validate()?;
    let o = region.origin();
    let n = region.len() as f64;
    let rows = run_trials(params.trials, |t| {
        let (config, tape) = trial_inputs(region, params, t)?;
        let initial = config.particle_count();
        let r = stabilize_with(region, &config, &tape, ToppleOrder::Fifo, params.budget)?;
        let sleeping = r.final_config.sleeping_count();
        debug_assert_eq!(initial, sleeping + r.absorbed);
        Ok([
            indicator(r.final_config.is_sleeping(o)),
            indicator(r.instructions[o] >= 1),
            r.absorbed as f64 / n,
            sleeping as f64 / n,
        ])
    })?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    Ok(ActivityRow {
        family: region.family(),
        dim: region.dim(),
        radius: region.radius(),
        vertices: region.len(),
        lambda: params.lambda,
        mu: params.mu,
        q_origin: EstimateRecord::from_samples("Q(0)", &col(0), params.seed),
        toppled: EstimateRecord::from_samples("P(m(0)>=1)", &col(1), params.seed),
        leaving_density: EstimateRecord::from_samples("leaving_density", &col(2), params.seed),
        sleeping_density: EstimateRecord::from_samples("sleeping_density", &col(3), params.seed),
    })
}

/// [`activity_row`] for each radius. Trial `t` uses the same seeds at every
/// radius, so the balls share their configuration and tape on common sites.
pub fn activity_profile(
    family: Family,
    dim: usize,
    radii: &[usize],
    params: &TrialParams,
) -> Result<Vec<ActivityRow>> {
    if radii.is_empty() {
        return Err(ArwError::domain("radius list must be non-empty"));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ArwError::domain("radius list must be strictly increasing"));
    }
    radii
        .iter()
        .map(|&radius| activity_row(&FiniteRegion::new(family, dim, radius)?, params))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuBracket {
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub threshold: f64,
    /// Set when the criterion holds at `mu = 0` or fails on the whole range.
    pub warning: Option<String>,
    /// `(mu, mean leaving density)` for every evaluation, in order.
    pub evaluations: Vec<(f64, f64)>,
}

impl MuBracket {
    /// Finite-volume proxy only; says nothing rigorous about the infinite system.
    pub const LABEL: &'static str = "finite-L heuristic";

    pub fn is_degenerate(&self) -> bool {
        self.warning.is_some()
    }
}

pub const MU_SEARCH_MAX: f64 = 1.5;

/// Bisection on `mu in [0, 1.5]` for the smallest density at which the mean
/// leaving density reaches `threshold`.
pub fn mu_c_bracket(
    region: &FiniteRegion,
    lambda: f64,
    trials: u64,
    threshold: f64,
    seed: u64,
    budget: u64,
    iterations: u32,
) -> Result<MuBracket> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(ArwError::domain(format!("threshold must lie in [0, 1), got {threshold}")));
    }
    let mut evaluations = Vec::new();
    let mut leaving = |mu: f64| -> Result<f64> {
        let params = TrialParams::new(mu, lambda, trials, seed).with_budget(budget);
        let d = activity_row(region, &params)?.leaving_density.mean;
        evaluations.push((mu, d));
        Ok(d)
    };
    if threshold <= 0.0 {
        return Ok(MuBracket {
            mu_lo: 0.0,
            mu_hi: 0.0,
            threshold,
            warning: Some("criterion holds at mu = 0".into()),
            evaluations,
        });
    }
    if leaving(MU_SEARCH_MAX)? < threshold {
        return Ok(MuBracket {
            mu_lo: MU_SEARCH_MAX,
            mu_hi: MU_SEARCH_MAX,
            threshold,
            warning: Some(format!("criterion never met on [0, {MU_SEARCH_MAX}]")),
            evaluations,
        });
    }
    let (mut lo, mut hi) = (0.0, MU_SEARCH_MAX);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if leaving(mid)? >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MuBracket {
        mu_lo: lo,
        mu_hi: hi,
        threshold,
        warning: None,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn theorem_bound_values() {
        assert_abs_diff_eq!(theorem_bound(1.0, 1.0, 1).unwrap(), 0.75, epsilon = 1e-15);
        for lambda in [0.01, 1.0, 100.0] {
            assert_abs_diff_eq!(theorem_bound(2.0, lambda, 1).unwrap(), 1.0, epsilon = 1e-15);
        }
        assert!(theorem_bound(1.5, 1e12, 3).unwrap() > 1.0 - 1e-12);
        assert!(theorem_bound(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn g_lambda_at_unit_green() {
        let r = g_lambda(1.0, 1.0).unwrap();
        assert_eq!(r.argmin, 1);
        assert_abs_diff_eq!(r.g_value, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(r.per_h[1].1, 1.0 - (2.0 / 3.0) * 0.25, epsilon = 1e-15);
        assert_eq!(r.per_h.len(), 64);
    }

    #[test]
    fn h_star_for_cubic_lattice() {
        let r = g_lambda(1.516386, std::f64::consts::E - 1.0).unwrap();
        assert_eq!(r.h_star, 2);
    }

    #[test]
    fn zero_density_estimators() {
        let k = FiniteRegion::lattice_ball(2, 4).unwrap();
        let p = TrialParams::new(0.0, 1.0, 200, 5);
        assert_eq!(estimate_q(&k, 0, &p).unwrap().mean, 0.0);
        let a = estimate_origin_activity(&k, &p).unwrap();
        assert_eq!((a.jumps.mean, a.instructions.mean, a.toppled.mean), (0.0, 0.0, 0.0));
        let mb = mass_balance_residual(&k, &p).unwrap();
        assert_eq!((mb.lhs.mean, mb.rhs.mean, mb.residual.mean), (0.0, 0.0, 0.0));
        let lb = sleep_lower_bound_check(&k, 0, &p).unwrap();
        assert!(lb.holds && lb.gap.mean == 0.0);
        let ex = excess_mean_check(&k, 0, &p).unwrap();
        assert!(ex.holds && ex.smaller.mean == 0.0);
        let tail = tail_bound_check(&k, 0, &p, &[2, 3]).unwrap();
        assert!(tail.holds());
        assert!(tail.buckets.iter().all(|b| b.joint.mean == 0.0));
        let prof = activity_profile(Family::Lattice, 2, &[2, 3, 4], &p).unwrap();
        assert!(prof.iter().all(|r| r.leaving_density.mean == 0.0 && r.toppled.mean == 0.0));
    }

    #[test]
    fn degenerate_brackets() {
        let k = FiniteRegion::lattice_ball(2, 3).unwrap();
        let b = mu_c_bracket(&k, 1.0, 20, 0.0, 1, DEFAULT_BUDGET, 20).unwrap();
        assert_eq!((b.mu_lo, b.mu_hi), (0.0, 0.0));
        assert!(b.is_degenerate());
        let b = mu_c_bracket(&k, 1.0, 20, 0.99, 1, DEFAULT_BUDGET, 20).unwrap();
        assert!(b.is_degenerate());
        assert!(mu_c_bracket(&k, 1.0, 20, 1.0, 1, DEFAULT_BUDGET, 20).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        let k = FiniteRegion::lattice_ball(2, 3).unwrap();
        assert!(estimate_q(&k, 0, &TrialParams::new(0.5, 1.0, 0, 1)).is_err());
        assert!(estimate_q(&k, k.sink(), &TrialParams::new(0.5, 1.0, 10, 1)).is_err());
        assert!(estimate_q(&k, 0, &TrialParams::new(0.5, 0.0, 10, 1)).is_err());
        assert!(activity_profile(Family::Lattice, 2, &[], &TrialParams::new(0.5, 1.0, 10, 1)).is_err());
        assert!(activity_profile(Family::Lattice, 2, &[3, 3], &TrialParams::new(0.5, 1.0, 10, 1)).is_err());
    }
}
