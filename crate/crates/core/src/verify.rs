//! Randomized property suite: exact checks of the toppling lemmas on small
//! random instances, Green's function identities, and statistical checks of
//! the estimator inequalities.

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::config::{sample_poisson_config, Config, SiteState};
use crate::error::Result;
use crate::estimators::{
    excess_mean_check, mass_balance_residual, q_upper_bound_check, sleep_lower_bound_check, tail_bound_check,
    InequalityCheck, TrialParams, SIGMA_TOLERANCE,
};
use crate::graph::{Family, FiniteRegion, Vertex};
use crate::greens::{green_mc, GreenSolver, GreenTable};
use crate::rng::{derive_seed, PhiloxRng, Stream};
use crate::stabilization::{
    enforced_stabilize, stabilize, stabilize_with, weak_stabilize, weak_stabilize_with, OdometerReport, Stabilizer,
    ToppleOrder, DEFAULT_BUDGET,
};
use crate::stats::{run_trials, EstimateRecord};
use crate::tape::InstructionTape;

pub const LAMBDAS: [f64; 3] = [0.1, 1.0, 10.0];

/// Region shapes used by the exact suites, all with at most 40 vertices:
/// `(family, d, largest radius)`.
pub const SHAPES: [(Family, usize, usize); 6] = [
    (Family::Lattice, 1, 20),
    (Family::Lattice, 2, 4),
    (Family::Lattice, 3, 3),
    (Family::Lattice, 4, 2),
    (Family::Tree, 3, 4),
    (Family::Tree, 4, 3),
];

/// A random region, configuration, tape and distinguished vertex.
#[derive(Clone, Debug)]
pub struct Instance {
    pub region: FiniteRegion,
    pub config: Config,
    pub tape: InstructionTape,
    pub x: Vertex,
    pub mu: f64,
    pub lambda: f64,
}

/// Instance `index` of the family keyed by `seed`. Densities are uniform on
/// `[0, 1]` and about one site in ten starts with a sleeping particle.
pub fn random_instance(seed: u64, index: u64) -> Result<Instance> {
    let mut rng = PhiloxRng::new(seed, Stream::Instance, index);
    let (family, d, max_radius) = SHAPES[rng.random_range(0..SHAPES.len())];
    let region = FiniteRegion::new(family, d, rng.random_range(1..=max_radius))?;
    let mu = rng.random::<f64>();
    let lambda = LAMBDAS[rng.random_range(0..LAMBDAS.len())];
    let mut config = sample_poisson_config(&region, mu, rng.next_u64())?;
    for v in region.vertices() {
        if rng.random_bool(0.1) {
            config.set(v, SiteState::Sleeping);
        }
    }
    let tape = InstructionTape::new(rng.next_u64(), lambda, region.degree())?;
    let x = rng.random_range(0..region.len());
    Ok(Instance {
        region,
        config,
        tape,
        x,
        mu,
        lambda,
    })
}

/// Result of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    /// Worst z-score for statistical checks.
    pub z: Option<f64>,
    pub detail: String,
}

impl CheckOutcome {
    fn exact(name: &str, results: Vec<Option<String>>) -> Self {
        let cases = results.len() as u64;
        let failed: Vec<String> = results.into_iter().flatten().collect();
        CheckOutcome {
            name: name.into(),
            passed: failed.is_empty(),
            cases,
            failures: failed.len() as u64,
            z: None,
            detail: failed
                .first()
                .cloned()
                .unwrap_or_else(|| format!("{cases} cases")),
        }
    }

    fn inequalities(name: &str, checks: &[InequalityCheck]) -> Self {
        let failures = checks.iter().filter(|c| !c.holds).count() as u64;
        let worst = checks
            .iter()
            .min_by(|a, b| a.z.total_cmp(&b.z))
            .expect("at least one check");
        CheckOutcome {
            name: name.into(),
            passed: failures == 0,
            cases: checks.len() as u64,
            failures,
            z: Some(worst.z),
            detail: format!(
                "worst {}: smaller {:.6} larger {:.6} z {:.3}",
                worst.label, worst.smaller.mean, worst.larger.mean, worst.z
            ),
        }
    }
}

/// Sizes of a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances for the abelian check.
    pub abelian_instances: u64,
    /// Random instances for each of the other exact checks.
    pub exact_instances: u64,
    pub green_instances: u64,
    pub green_trials: u64,
    /// Monte Carlo trials per statistical check.
    pub trials: u64,
}

impl SuiteConfig {
    pub fn full(seed: u64) -> Self {
        SuiteConfig {
            seed,
            abelian_instances: 1000,
            exact_instances: 500,
            green_instances: 50,
            green_trials: 20_000,
            trials: 10_000,
        }
    }

    pub fn quick(seed: u64) -> Self {
        SuiteConfig {
            seed,
            abelian_instances: 100,
            exact_instances: 50,
            green_instances: 10,
            green_trials: 5_000,
            trials: 2_000,
        }
    }
}

fn instances<F>(seed: u64, count: u64, check: F) -> Result<Vec<Option<String>>>
where
    F: Fn(&Instance) -> Result<Option<String>> + Sync + Send,
{
    run_trials(count, |i| check(&random_instance(seed, i)?).map(|r| r.map(|msg| format!("instance {i}: {msg}"))))
}

fn pointwise_le(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn conservation(initial: &Config, r: &OdometerReport) -> bool {
    initial.particle_count() == r.final_config.particle_count() + r.absorbed
}

/// Two random orders and the FIFO order give identical reports, for full and
/// weak stabilization.
pub fn check_abelian(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let (k, c, t) = (&inst.region, &inst.config, &inst.tape);
        let fifo = stabilize(k, c, t)?;
        if !fifo.final_config.is_stable() || !conservation(c, &fifo) {
            return Ok(Some("stabilization postcondition".into()));
        }
        for order_seed in [1, 2] {
            let order = ToppleOrder::Random(derive_seed(t.seed(), Stream::Order, order_seed));
            if stabilize_with(k, c, t, order, DEFAULT_BUDGET)? != fifo {
                return Ok(Some(format!("stabilization differs under {order:?}")));
            }
        }
        let weak = weak_stabilize(inst.x, k, c, t)?;
        if !weak.report.final_config.is_weakly_stable(inst.x) || !conservation(c, &weak.report) {
            return Ok(Some("weak stabilization postcondition".into()));
        }
        for order_seed in [3, 4] {
            let order = ToppleOrder::Random(derive_seed(t.seed(), Stream::Order, order_seed));
            if weak_stabilize_with(inst.x, k, c, t, order, DEFAULT_BUDGET)? != weak {
                return Ok(Some(format!("weak stabilization differs under {order:?}")));
            }
        }
        Ok(None)
    })?;
    Ok(CheckOutcome::exact("abelian", results))
}

/// Raises random sites of `config` in the site order.
fn raise(config: &Config, rng: &mut PhiloxRng) -> Config {
    let mut out = config.clone();
    for v in 0..config.len() {
        if rng.random_bool(0.3) {
            let next = match config.get(v) {
                SiteState::Empty if rng.random_bool(0.5) => SiteState::Sleeping,
                SiteState::Empty | SiteState::Sleeping => SiteState::Active(1),
                SiteState::Active(n) => SiteState::Active(n + rng.random_range(1..=2)),
            };
            out.set(v, next);
        }
    }
    out
}

/// Nested balls sharing a tape with `eta <= eta'` give `m <= m'` on the
/// smaller ball.
pub fn check_monotonicity(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let mut rng = PhiloxRng::new(inst.tape.seed(), Stream::Instance, 0);
        let big = &inst.region;
        let small = FiniteRegion::new(big.family(), big.dim(), rng.random_range(1..=big.radius()))?;
        let eta = Config::from_states(&inst.config.states().take(small.len()).collect::<Vec<_>>());
        let eta_big = raise(&inst.config, &mut rng);
        if !eta.le(&eta_big) {
            return Ok(Some("raised configuration is not larger".into()));
        }
        let m_small = stabilize(&small, &eta, &inst.tape)?;
        let m_big = stabilize(big, &eta_big, &inst.tape)?;
        if !pointwise_le(&m_small.instructions, &m_big.instructions) {
            return Ok(Some(format!(
                "radius {} vs {}: odometer not monotone",
                small.radius(),
                big.radius()
            )));
        }
        Ok(None)
    })?;
    Ok(CheckOutcome::exact("monotonicity", results))
}

/// Erasing the sleep instructions at `x` never decreases the odometer.
pub fn check_enforced_activation(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let m = stabilize(&inst.region, &inst.config, &inst.tape)?;
        let me = enforced_stabilize(inst.x, &inst.region, &inst.config, &inst.tape)?;
        Ok((!pointwise_le(&m.instructions, &me.instructions)).then(|| "m > m^e somewhere".into()))
    })?;
    Ok(CheckOutcome::exact("enforced_activation", results))
}

/// Random WS-legal partial sequences use at most the weak-stabilization
/// odometer, and random legal sequences that stabilize weakly use at least it.
pub fn check_least_action(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let (k, x) = (&inst.region, inst.x);
        let m1 = weak_stabilize(x, k, &inst.config, &inst.tape)?.report.instructions;
        let mut rng = PhiloxRng::new(inst.tape.seed(), Stream::Order, 0);

        let steps = rng.random_range(0..=2 * m1.iter().sum::<u64>() + 1);
        let mut beta = Stabilizer::new(k, &inst.tape, inst.config.clone())?;
        for _ in 0..steps {
            let unstable: Vec<Vertex> = k.vertices().filter(|&v| beta.is_unstable(v, Some(x))).collect();
            if unstable.is_empty() {
                break;
            }
            beta.topple(unstable[rng.random_range(0..unstable.len())])?;
        }
        if !pointwise_le(beta.instructions(), &m1) {
            return Ok(Some("WS-legal sequence exceeds m^1".into()));
        }

        let mut alpha = Stabilizer::new(k, &inst.tape, inst.config.clone())?;
        loop {
            let legal: Vec<Vertex> = k.vertices().filter(|&v| alpha.is_unstable(v, None)).collect();
            if !k.vertices().any(|v| alpha.is_unstable(v, Some(x))) {
                break;
            }
            alpha.topple(legal[rng.random_range(0..legal.len())])?;
        }
        if !pointwise_le(&m1, alpha.instructions()) {
            return Ok(Some("legal weakly stabilizing sequence below m^1".into()));
        }
        Ok(None)
    })?;
    Ok(CheckOutcome::exact("least_action", results))
}

/// Weak stabilization of `(x, K)` is unchanged by erasing the sleep
/// instructions at `x`.
pub fn check_weak_tape_invariance(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let a = weak_stabilize(inst.x, &inst.region, &inst.config, &inst.tape)?;
        let b = weak_stabilize(inst.x, &inst.region, &inst.config, &inst.tape.ignore_sleep_at(inst.x))?;
        Ok((a != b).then(|| "weak reports differ under T^x".into()))
    })?;
    Ok(CheckOutcome::exact("weak_tape_invariance", results))
}

/// Weak stabilization from `eta + 1_x` matches enforced stabilization from
/// `eta`, the extra particle staying at `x`. Sites where `x` starts asleep
/// are emptied first.
pub fn check_particle_addition(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let (k, x) = (&inst.region, inst.x);
        let mut eta = inst.config.clone();
        if eta.is_sleeping(x) {
            eta.set(x, SiteState::Empty);
        }
        let mut plus = eta.clone();
        plus.add_active(x);
        let weak = weak_stabilize(x, k, &plus, &inst.tape)?.report;
        let enforced = enforced_stabilize(x, k, &eta, &inst.tape)?;
        let mut expected = enforced.final_config.clone();
        expected.add_active(x);
        let same = weak.instructions == enforced.instructions
            && weak.jumps == enforced.jumps
            && weak.absorbed == enforced.absorbed
            && weak.final_config == expected;
        Ok((!same).then(|| "weak(eta + 1_x) differs from enforced(eta)".into()))
    })?;
    Ok(CheckOutcome::exact("particle_addition", results))
}

/// `P_x(hit 0 before exit) G(0, 0) = G(x, 0)` on lattice balls of radius up
/// to 8 in two and three dimensions.
pub fn check_green_regularity() -> Result<CheckOutcome> {
    let mut results = Vec::new();
    for dim in [2, 3] {
        for radius in 1..=8 {
            let k = FiniteRegion::lattice_ball(dim, radius)?;
            let solver = GreenSolver::new(&k, &[])?;
            let g = solver.column(k.origin())?;
            let hit = solver.hitting_probability(k.origin())?;
            let err = k
                .vertices()
                .map(|x| (hit[x] * g[k.origin()] - g[x]).abs())
                .fold(0.0, f64::max);
            results.push((err > 1e-9).then(|| format!("Z^{dim} L={radius}: error {err:e}")));
        }
    }
    Ok(CheckOutcome::exact("green_regularity", results))
}

/// `G(x, y) = G(y, x)` on random instances.
pub fn check_green_symmetry(seed: u64, count: u64) -> Result<CheckOutcome> {
    let results = instances(seed, count, |inst| {
        let table = GreenTable::compute(&inst.region, &[])?;
        let n = inst.region.len();
        let err = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| (table.get(x, y) - table.get(y, x)).abs())
            .fold(0.0, f64::max);
        Ok((err > 1e-10).then(|| format!("asymmetry {err:e}")))
    })?;
    Ok(CheckOutcome::exact("green_symmetry", results))
}

/// Monte Carlo `G(x, y)` within 3 standard errors of the linear solve.
pub fn check_green_mc(seed: u64, count: u64, trials: u64) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for i in 0..count {
        let inst = random_instance(seed, i)?;
        let mut rng = PhiloxRng::new(seed, Stream::Walk, i);
        let y = rng.random_range(0..inst.region.len());
        let exact = GreenSolver::new(&inst.region, &[])?.column(y)?[inst.x];
        let mc = green_mc(&inst.region, inst.x, y, trials, derive_seed(seed, Stream::Walk, i))?;
        let z = mc.z(exact);
        if z.abs() > worst.abs() {
            worst = z;
        }
        if z.abs() > SIGMA_TOLERANCE {
            failed.push(format!("instance {i}: mc {:.6} exact {exact:.6} z {z:.3}", mc.mean));
        }
    }
    Ok(CheckOutcome {
        name: "green_mc".into(),
        passed: failed.is_empty(),
        cases: count,
        failures: failed.len() as u64,
        z: Some(worst),
        detail: failed
            .first()
            .cloned()
            .unwrap_or_else(|| format!("{count} cases, worst z {worst:.3}")),
    })
}

/// Grid of the statistical checks: `(lambda, mu)` pairs on a Z^2 and a Z^3 ball.
pub const STAT_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const STAT_MUS: [f64; 3] = [0.3, 0.5, 0.8];

fn stat_regions() -> Result<Vec<FiniteRegion>> {
    Ok(vec![FiniteRegion::lattice_ball(2, 4)?, FiniteRegion::lattice_ball(3, 3)?])
}

fn grid_checks<F>(cfg: &SuiteConfig, check: F) -> Result<Vec<InequalityCheck>>
where
    F: Fn(&FiniteRegion, &TrialParams) -> Result<InequalityCheck>,
{
    let mut out = Vec::new();
    for (r, k) in stat_regions()?.iter().enumerate() {
        for (i, &lambda) in STAT_LAMBDAS.iter().enumerate() {
            for (j, &mu) in STAT_MUS.iter().enumerate() {
                let seed = derive_seed(cfg.seed, Stream::TrialConfig, (r * 9 + i * 3 + j) as u64);
                let mut c = check(k, &TrialParams::new(mu, lambda, cfg.trials, seed))?;
                c.label = format!("{} Z^{} L={} lambda={lambda} mu={mu}", c.label, k.dim(), k.radius());
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// `Q` on a single site: `(1 - e^{-mu}) lambda / (1 + lambda)`.
pub fn single_site_q(mu: f64, lambda: f64) -> f64 {
    -(-mu).exp_m1() * lambda / (1.0 + lambda)
}

fn two_sided(name: &str, records: &[(EstimateRecord, f64)]) -> CheckOutcome {
    let zs: Vec<f64> = records.iter().map(|(r, reference)| r.z(*reference)).collect();
    let worst = zs.iter().copied().fold(0.0f64, |a, z| if z.abs() > a.abs() { z } else { a });
    let failures = zs.iter().filter(|z| z.abs() > SIGMA_TOLERANCE).count() as u64;
    CheckOutcome {
        name: name.into(),
        passed: failures == 0,
        cases: records.len() as u64,
        failures,
        z: Some(worst),
        detail: format!("{} cases, worst z {worst:.3}", records.len()),
    }
}

pub fn check_single_site_q(cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let k = FiniteRegion::lattice_ball(1, 1)?;
    let mut records = Vec::new();
    for (i, &lambda) in STAT_LAMBDAS.iter().enumerate() {
        for (j, &mu) in STAT_MUS.iter().enumerate() {
            let seed = derive_seed(cfg.seed, Stream::TrialTape, (i * 3 + j) as u64);
            let q = crate::estimators::estimate_q(&k, 0, &TrialParams::new(mu, lambda, 10 * cfg.trials, seed))?;
            records.push((q, single_site_q(mu, lambda)));
        }
    }
    Ok(two_sided("single_site_q", &records))
}

pub fn check_mass_balance(cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let single = FiniteRegion::lattice_ball(1, 1)?;
    let (mu, lambda) = (0.5, 1.0);
    let p = TrialParams::new(mu, lambda, cfg.trials, cfg.seed);
    let lhs = mass_balance_residual(&single, &p)?.lhs;
    let k = FiniteRegion::lattice_ball(2, 6)?;
    let residual = mass_balance_residual(&k, &TrialParams::new(0.3, 1.0, 2 * cfg.trials, cfg.seed))?.residual;
    Ok(two_sided(
        "mass_balance",
        &[(lhs, mu - single_site_q(mu, lambda)), (residual, 0.0)],
    ))
}

pub fn check_tail_bound(cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let k = FiniteRegion::lattice_ball(2, 4)?;
    let r = tail_bound_check(&k, k.origin(), &TrialParams::new(0.5, 1.0, 5 * cfg.trials, cfg.seed), &[2, 3, 4])?;
    let worst = r.buckets.iter().map(|b| b.z).fold(f64::INFINITY, f64::min);
    let failures = r.buckets.iter().filter(|b| !b.holds).count() as u64 + r.single_round_sleepers.min(1);
    Ok(CheckOutcome {
        name: "tail_bound".into(),
        passed: r.holds(),
        cases: r.buckets.len() as u64 + 1,
        failures,
        z: Some(worst),
        detail: format!(
            "worst z {worst:.3}, single-round sleepers {}",
            r.single_round_sleepers
        ),
    })
}

/// Every check at the sizes of `cfg`, in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let s = cfg.seed;
    let stream = |i| derive_seed(s, Stream::Instance, i);
    let mut out = vec![
        check_abelian(stream(0), cfg.abelian_instances)?,
        check_monotonicity(stream(1), cfg.exact_instances)?,
        check_enforced_activation(stream(2), cfg.exact_instances)?,
        check_least_action(stream(3), cfg.exact_instances)?,
        check_weak_tape_invariance(stream(4), cfg.exact_instances)?,
        check_particle_addition(stream(5), cfg.exact_instances)?,
        check_green_regularity()?,
        check_green_symmetry(stream(6), cfg.green_instances)?,
        check_green_mc(stream(7), cfg.green_instances, cfg.green_trials)?,
    ];
    let excess = grid_checks(cfg, |k, p| excess_mean_check(k, k.origin(), p))?;
    out.push(CheckOutcome::inequalities("excess_mean", &excess));
    let upper = grid_checks(cfg, |k, p| q_upper_bound_check(k, k.origin(), p))?;
    out.push(CheckOutcome::inequalities("q_upper_bound", &upper));
    let lower = grid_checks(cfg, |k, p| sleep_lower_bound_check(k, k.origin(), p))?;
    out.push(CheckOutcome::inequalities("sleep_lower_bound", &lower));
    out.push(check_single_site_q(cfg)?);
    out.push(check_tail_bound(cfg)?);
    out.push(check_mass_balance(cfg)?);
    Ok(out)
}
