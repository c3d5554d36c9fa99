//! Toppling dynamics and the stabilization procedures built on them.
//!
//! All procedures share one engine, [`Stabilizer`], which applies the toppling
//! operator to a configuration while counting the instructions (`m`) and the
//! jump instructions (`M`) used at every vertex. A vertex `v` is treated as
//! unstable when it holds at least `1 + [v == x]` active particles, where `x`
//! is the distinguished vertex of a weak stabilization (or none).

use std::collections::VecDeque;

use rand::Rng;

use crate::config::{Config, SiteState};
use crate::error::{ArwError, Result};
use crate::graph::{FiniteRegion, Vertex};
use crate::rng::{PhiloxRng, Stream};
use crate::tape::{Instruction, InstructionTape};

/// Default cap on instructions consumed by one stabilization call.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// How unstable vertices are scheduled. The resulting odometer does not
/// depend on the choice; `Random` exists to exercise that fact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ToppleOrder {
    /// First-in-first-out queue; each dequeued vertex is toppled until stable.
    #[default]
    Fifo,
    /// One toppling at a uniformly chosen unstable vertex per step.
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdometerReport {
    /// Instructions used per vertex (`m`).
    pub instructions: Vec<u64>,
    /// Jump instructions used per vertex (`M`).
    pub jumps: Vec<u64>,
    pub final_config: Config,
    /// Particles that reached the sink.
    pub absorbed: u64,
}

impl OdometerReport {
    /// Instruction counters `h`. At completion they coincide with `m`.
    pub fn counters(&self) -> &[u64] {
        &self.instructions
    }

    pub fn total_instructions(&self) -> u64 {
        self.instructions.iter().sum()
    }
}

/// Result of the weak stabilization of `(x, K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakStabOutcome {
    pub report: OdometerReport,
    pub x: Vertex,
}

/// Cumulative counters after one round of stabilization via weak stabilization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundCounters {
    pub instructions: Vec<u64>,
    pub jumps: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViaWeakOutcome {
    /// Number of rounds until the configuration is stable (`T_(x,K)`).
    pub rounds_to_stable: u64,
    /// Counters after each round; `rounds[0]` is the first weak stabilization.
    pub rounds: Vec<RoundCounters>,
    /// Totals for the whole procedure; identical to [`stabilize`].
    pub report: OdometerReport,
}

impl ViaWeakOutcome {
    pub fn final_config(&self) -> &Config {
        &self.report.final_config
    }

    /// Jump instructions used during the first weak stabilization (`M^1`).
    pub fn weak_jumps(&self) -> &[u64] {
        &self.rounds[0].jumps
    }
}

/// Mutable toppling state over one region and one tape.
#[derive(Clone, Debug)]
pub struct Stabilizer<'a> {
    region: &'a FiniteRegion,
    tape: &'a InstructionTape,
    config: Config,
    instructions: Vec<u64>,
    jumps: Vec<u64>,
    absorbed: u64,
    consumed: u64,
    budget: u64,
}

impl<'a> Stabilizer<'a> {
    pub fn new(region: &'a FiniteRegion, tape: &'a InstructionTape, config: Config) -> Result<Self> {
        if config.len() != region.len() {
            return Err(ArwError::domain(format!(
                "configuration has {} sites but the region has {}",
                config.len(),
                region.len()
            )));
        }
        if tape.degree() != region.degree() {
            return Err(ArwError::domain(format!(
                "tape degree {} does not match region degree {}",
                tape.degree(),
                region.degree()
            )));
        }
        let n = region.len();
        Ok(Stabilizer {
            region,
            tape,
            config,
            instructions: vec![0; n],
            jumps: vec![0; n],
            absorbed: 0,
            consumed: 0,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    /// Instruction counters `h`.
    pub fn instructions(&self) -> &[u64] {
        &self.instructions
    }

    pub fn jumps(&self) -> &[u64] {
        &self.jumps
    }

    pub fn absorbed(&self) -> u64 {
        self.absorbed
    }

    #[inline]
    fn threshold(v: Vertex, weak_at: Option<Vertex>) -> u32 {
        if weak_at == Some(v) {
            2
        } else {
            1
        }
    }

    /// Whether `v` may be toppled: unstable, or WS-unstable when `weak_at` is set.
    #[inline]
    pub fn is_unstable(&self, v: Vertex, weak_at: Option<Vertex>) -> bool {
        self.config.active(v) >= Self::threshold(v, weak_at)
    }

    /// Uses the next instruction at `x`, whether or not that is legal.
    pub fn topple(&mut self, x: Vertex) -> Result<Instruction> {
        self.step(x).map(|(inst, _)| inst)
    }

    /// Returns the instruction used and the interior vertex that received a
    /// particle, if any.
    #[inline]
    fn step(&mut self, x: Vertex) -> Result<(Instruction, Option<Vertex>)> {
        assert!(self.region.is_interior(x), "toppling non-interior vertex {x}");
        if self.consumed >= self.budget {
            return Err(ArwError::BudgetExceeded {
                budget: self.budget,
            });
        }
        self.consumed += 1;
        self.instructions[x] += 1;
        let inst = self.tape.instruction(x, self.instructions[x]);
        let mut received = None;
        match inst {
            Instruction::Jump(i) => {
                self.jumps[x] += 1;
                if self.config.active(x) >= 1 {
                    self.config.remove_active(x);
                    let target = self.region.neighbor(x, i as usize);
                    if target == self.region.sink() {
                        self.absorbed += 1;
                    } else {
                        self.config.add_active(target);
                        received = Some(target);
                    }
                }
            }
            Instruction::Sleep => {
                if self.config.active(x) == 1 {
                    self.config.fall_asleep(x);
                }
            }
            Instruction::Neutral => {}
        }
        Ok((inst, received))
    }

    /// Topples until no vertex is unstable (or WS-unstable for `weak_at`).
    pub fn relax(&mut self, weak_at: Option<Vertex>, order: ToppleOrder) -> Result<()> {
        match order {
            ToppleOrder::Fifo => self.relax_fifo(weak_at),
            ToppleOrder::Random(seed) => self.relax_random(weak_at, seed),
        }
    }

    fn relax_fifo(&mut self, weak_at: Option<Vertex>) -> Result<()> {
        let n = self.region.len();
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if self.is_unstable(v, weak_at) {
                queued[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            while self.is_unstable(v, weak_at) {
                if let (_, Some(w)) = self.step(v)? {
                    if !queued[w] && self.is_unstable(w, weak_at) {
                        queued[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(())
    }

    fn relax_random(&mut self, weak_at: Option<Vertex>, seed: u64) -> Result<()> {
        const ABSENT: usize = usize::MAX;
        let n = self.region.len();
        let mut rng = PhiloxRng::new(seed, Stream::Order, 0);
        let mut pending: Vec<Vertex> = Vec::new();
        let mut slot = vec![ABSENT; n];
        for v in 0..n {
            if self.is_unstable(v, weak_at) {
                slot[v] = pending.len();
                pending.push(v);
            }
        }
        while !pending.is_empty() {
            let v = pending[rng.random_range(0..pending.len())];
            let (_, received) = self.step(v)?;
            for w in std::iter::once(v).chain(received) {
                let unstable = self.is_unstable(w, weak_at);
                if unstable && slot[w] == ABSENT {
                    slot[w] = pending.len();
                    pending.push(w);
                } else if !unstable && slot[w] != ABSENT {
                    let i = slot[w];
                    pending.swap_remove(i);
                    if i < pending.len() {
                        slot[pending[i]] = i;
                    }
                    slot[w] = ABSENT;
                }
            }
        }
        Ok(())
    }

    fn snapshot(&self) -> RoundCounters {
        RoundCounters {
            instructions: self.instructions.clone(),
            jumps: self.jumps.clone(),
        }
    }

    pub fn into_report(self) -> OdometerReport {
        OdometerReport {
            instructions: self.instructions,
            jumps: self.jumps,
            final_config: self.config,
            absorbed: self.absorbed,
        }
    }
}

fn check_interior(region: &FiniteRegion, x: Vertex) -> Result<()> {
    if region.is_interior(x) {
        Ok(())
    } else {
        Err(ArwError::domain(format!("vertex {x} is not interior")))
    }
}

/// Stabilizes `config` in `region` with a FIFO schedule and the default budget.
pub fn stabilize(region: &FiniteRegion, config: &Config, tape: &InstructionTape) -> Result<OdometerReport> {
    stabilize_with(region, config, tape, ToppleOrder::Fifo, DEFAULT_BUDGET)
}

pub fn stabilize_with(
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
    order: ToppleOrder,
    budget: u64,
) -> Result<OdometerReport> {
    let mut s = Stabilizer::new(region, tape, config.clone())?.with_budget(budget);
    s.relax(None, order)?;
    Ok(s.into_report())
}

/// Weak stabilization of `(x, K)`: `x` is toppled only while it holds two or
/// more active particles.
pub fn weak_stabilize(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
) -> Result<WeakStabOutcome> {
    weak_stabilize_with(x, region, config, tape, ToppleOrder::Fifo, DEFAULT_BUDGET)
}

pub fn weak_stabilize_with(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
    order: ToppleOrder,
    budget: u64,
) -> Result<WeakStabOutcome> {
    check_interior(region, x)?;
    let mut s = Stabilizer::new(region, tape, config.clone())?.with_budget(budget);
    s.relax(Some(x), order)?;
    Ok(WeakStabOutcome {
        report: s.into_report(),
        x,
    })
}

/// Stabilization via weak stabilization.
///
/// Round 1 is a weak stabilization of `(x, K)`. While `x` then holds a lone
/// active particle, each further round uses one instruction at `x` and, unless
/// it was Sleep, weakly stabilizes again. When the initial configuration has
/// no sleeping particle at `x`, a single round implies `x` ends empty.
pub fn stabilize_via_weak(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
) -> Result<ViaWeakOutcome> {
    stabilize_via_weak_with(x, region, config, tape, DEFAULT_BUDGET)
}

pub fn stabilize_via_weak_with(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
    budget: u64,
) -> Result<ViaWeakOutcome> {
    check_interior(region, x)?;
    let mut s = Stabilizer::new(region, tape, config.clone())?.with_budget(budget);
    s.relax(Some(x), ToppleOrder::Fifo)?;
    let mut rounds = vec![s.snapshot()];
    while !s.config().get(x).is_stable() {
        debug_assert_eq!(s.config().get(x), SiteState::Active(1));
        if s.topple(x)? != Instruction::Sleep {
            s.relax(Some(x), ToppleOrder::Fifo)?;
        }
        rounds.push(s.snapshot());
    }
    Ok(ViaWeakOutcome {
        rounds_to_stable: rounds.len() as u64,
        rounds,
        report: s.into_report(),
    })
}

/// Stabilization of `K` with every Sleep instruction at `x` made neutral.
pub fn enforced_stabilize(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
) -> Result<OdometerReport> {
    enforced_stabilize_with(x, region, config, tape, DEFAULT_BUDGET)
}

pub fn enforced_stabilize_with(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
    budget: u64,
) -> Result<OdometerReport> {
    check_interior(region, x)?;
    stabilize_with(region, config, &tape.ignore_sleep_at(x), ToppleOrder::Fifo, budget)
}

/// Jump instructions used at `x` by the enforced stabilization but not by the
/// weak stabilization of `(x, K)`.
pub fn excess_jumps(x: Vertex, region: &FiniteRegion, config: &Config, tape: &InstructionTape) -> Result<u64> {
    excess_jumps_with(x, region, config, tape, DEFAULT_BUDGET)
}

pub fn excess_jumps_with(
    x: Vertex,
    region: &FiniteRegion,
    config: &Config,
    tape: &InstructionTape,
    budget: u64,
) -> Result<u64> {
    let enforced = enforced_stabilize_with(x, region, config, tape, budget)?;
    let weak = weak_stabilize_with(x, region, config, tape, ToppleOrder::Fifo, budget)?;
    Ok(excess_from_counts(enforced.jumps[x], weak.report.jumps[x]))
}

pub(crate) fn excess_from_counts(enforced_jumps: u64, weak_jumps: u64) -> u64 {
    debug_assert!(enforced_jumps >= weak_jumps, "{enforced_jumps} < {weak_jumps}");
    enforced_jumps.saturating_sub(weak_jumps)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// First seed whose instructions at `(0, 1..)` start with `prefix`.
    fn seed_with_prefix(lambda: f64, degree: usize, prefix: &[fn(Instruction) -> bool]) -> InstructionTape {
        (0u64..)
            .map(|s| InstructionTape::new(s, lambda, degree).unwrap())
            .find(|t| {
                prefix
                    .iter()
                    .enumerate()
                    .all(|(i, p)| p(t.instruction(0, i as u64 + 1)))
            })
            .unwrap()
    }

    fn is_sleep(i: Instruction) -> bool {
        i == Instruction::Sleep
    }

    fn is_jump(i: Instruction) -> bool {
        i.is_jump()
    }

    fn single_site() -> FiniteRegion {
        FiniteRegion::lattice_ball(1, 1).unwrap()
    }

    #[test]
    fn topple_wakes_sleeper() {
        let k = FiniteRegion::lattice_ball(1, 3).unwrap();
        // Origin is 0; its +e1 neighbor is index 1.
        let tape = (0u64..)
            .map(|s| InstructionTape::new(s, 1.0, 2).unwrap())
            .find(|t| t.instruction(0, 1) == Instruction::Jump(0))
            .unwrap();
        let mut c = Config::empty(k.len());
        c.set(0, SiteState::Active(2));
        c.set(1, SiteState::Sleeping);
        let mut s = Stabilizer::new(&k, &tape, c).unwrap();
        s.topple(0).unwrap();
        assert_eq!(s.config().get(0), SiteState::Active(1));
        assert_eq!(s.config().get(1), SiteState::Active(2));
        assert_eq!(s.jumps()[0], 1);
    }

    #[test]
    fn sleep_only_acts_on_lone_particle() {
        let k = single_site();
        let tape = seed_with_prefix(1.0, 2, &[is_sleep]);
        let mut s = Stabilizer::new(&k, &tape, Config::from_counts(&[3])).unwrap();
        s.topple(0).unwrap();
        assert_eq!(s.config().get(0), SiteState::Active(3));
        assert_eq!((s.instructions()[0], s.jumps()[0]), (1, 0));

        let mut s = Stabilizer::new(&k, &tape, Config::from_counts(&[1])).unwrap();
        s.topple(0).unwrap();
        assert_eq!(s.config().get(0), SiteState::Sleeping);
    }

    #[test]
    fn single_site_stabilization() {
        let k = single_site();
        let tape = seed_with_prefix(1.0, 2, &[is_sleep]);
        let r = stabilize(&k, &Config::from_counts(&[1]), &tape).unwrap();
        assert_eq!(r.final_config.get(0), SiteState::Sleeping);
        assert_eq!((r.instructions[0], r.jumps[0], r.absorbed), (1, 0, 0));

        let tape = seed_with_prefix(1.0, 2, &[is_jump]);
        let r = stabilize(&k, &Config::from_counts(&[1]), &tape).unwrap();
        assert_eq!(r.final_config.get(0), SiteState::Empty);
        assert_eq!((r.jumps[0], r.absorbed), (1, 1));
    }

    #[test]
    fn empty_configuration_is_stable() {
        let k = FiniteRegion::lattice_ball(2, 4).unwrap();
        let tape = InstructionTape::new(1, 1.0, 4).unwrap();
        let r = stabilize(&k, &Config::empty(k.len()), &tape).unwrap();
        assert_eq!(r.total_instructions(), 0);
        assert_eq!(r.absorbed, 0);
    }

    #[test]
    fn weak_stabilization_examples() {
        let k = single_site();
        let tape = InstructionTape::new(3, 1.0, 2).unwrap();
        let w = weak_stabilize(0, &k, &Config::from_counts(&[1]), &tape).unwrap();
        assert_eq!(w.report.total_instructions(), 0);

        let tape = seed_with_prefix(1.0, 2, &[is_jump, is_sleep]);
        let w = weak_stabilize(0, &k, &Config::from_counts(&[2]), &tape).unwrap();
        assert_eq!(w.report.instructions[0], 1);
        assert_eq!(w.report.final_config.get(0), SiteState::Active(1));
        assert!(w.report.final_config.is_weakly_stable(0));
    }

    #[test]
    fn via_weak_examples() {
        let k = single_site();
        let tape = seed_with_prefix(1.0, 2, &[is_jump, is_sleep]);
        let v = stabilize_via_weak(0, &k, &Config::from_counts(&[2]), &tape).unwrap();
        assert_eq!(v.rounds_to_stable, 2);
        assert_eq!(v.final_config().get(0), SiteState::Sleeping);
        assert_eq!(v.rounds[0].instructions[0], 1);
        assert_eq!(v.rounds[1].instructions[0], 2);

        let v = stabilize_via_weak(0, &k, &Config::from_counts(&[0]), &tape).unwrap();
        assert_eq!(v.rounds_to_stable, 1);
        assert_eq!(v.final_config().get(0), SiteState::Empty);
    }

    #[test]
    fn enforced_single_site_always_empties() {
        let k = single_site();
        for seed in 0..50 {
            let tape = InstructionTape::new(seed, 2.0, 2).unwrap();
            let r = enforced_stabilize(0, &k, &Config::from_counts(&[1]), &tape).unwrap();
            assert_eq!(r.final_config.get(0), SiteState::Empty);
            assert_eq!(r.absorbed, 1);
        }
    }

    #[test]
    fn excess_jumps_examples() {
        let k = FiniteRegion::lattice_ball(1, 4).unwrap();
        let tape = InstructionTape::new(9, 1.0, 2).unwrap();
        assert_eq!(excess_jumps(0, &k, &Config::empty(k.len()), &tape).unwrap(), 0);

        // A lone particle at the right end whose first instruction sends it
        // out of the ball never reaches the origin.
        let end = k.vertices().find(|&v| k.coords(v).unwrap()[0] == 3).unwrap();
        let tape = (0u64..)
            .map(|s| InstructionTape::new(s, 1.0, 2).unwrap())
            .find(|t| t.instruction(end, 1) == Instruction::Jump(0))
            .unwrap();
        let mut c = Config::empty(k.len());
        c.set(end, SiteState::Active(1));
        assert_eq!(excess_jumps(0, &k, &c, &tape).unwrap(), 0);
    }

    #[test]
    fn single_site_excess_is_occupancy_indicator() {
        let k = single_site();
        for seed in 0..40 {
            let tape = InstructionTape::new(seed, 0.7, 2).unwrap();
            for n in 0..5u32 {
                let a = excess_jumps(0, &k, &Config::from_counts(&[n]), &tape).unwrap();
                assert_eq!(a, u64::from(n >= 1), "seed {seed} n {n}");
            }
        }
    }

    #[test]
    fn budget_guard() {
        let k = FiniteRegion::lattice_ball(2, 5).unwrap();
        let tape = InstructionTape::new(1, 1.0, 4).unwrap();
        let c = Config::from_counts(&vec![3; k.len()]);
        let err = stabilize_with(&k, &c, &tape, ToppleOrder::Fifo, 10).unwrap_err();
        assert_eq!(err, ArwError::BudgetExceeded { budget: 10 });
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let k = FiniteRegion::lattice_ball(2, 3).unwrap();
        let tape = InstructionTape::new(1, 1.0, 4).unwrap();
        assert!(stabilize(&k, &Config::empty(3), &tape).is_err());
        let wrong = InstructionTape::new(1, 1.0, 6).unwrap();
        assert!(stabilize(&k, &Config::empty(k.len()), &wrong).is_err());
        assert!(weak_stabilize(k.sink(), &k, &Config::empty(k.len()), &tape).is_err());
    }
}
