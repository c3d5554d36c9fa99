//! Particle configurations on the interior of a region.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{ArwError, Result};
use crate::graph::{FiniteRegion, Vertex};
use crate::rng::{random_unit, Stream};

/// Raw encoding of a sleeping site. Active counts are stored as themselves.
const SLEEPING: i32 = -1;

/// State of a single site, ordered `Empty < Sleeping < Active(1) < Active(2) < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteState {
    Empty,
    Sleeping,
    Active(u32),
}

impl SiteState {
    fn rank(self) -> u64 {
        match self {
            SiteState::Empty => 0,
            SiteState::Sleeping => 1,
            SiteState::Active(n) => u64::from(n) + 1,
        }
    }

    fn encode(self) -> i32 {
        match self {
            SiteState::Empty | SiteState::Active(0) => 0,
            SiteState::Sleeping => SLEEPING,
            SiteState::Active(n) => n as i32,
        }
    }

    fn decode(raw: i32) -> SiteState {
        match raw {
            0 => SiteState::Empty,
            SLEEPING => SiteState::Sleeping,
            n => SiteState::Active(n as u32),
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, SiteState::Empty | SiteState::Sleeping)
    }

    pub fn particles(self) -> u64 {
        match self {
            SiteState::Empty => 0,
            SiteState::Sleeping => 1,
            SiteState::Active(n) => u64::from(n),
        }
    }
}

impl PartialOrd for SiteState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SiteState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteState::Empty => f.write_str("0"),
            SiteState::Sleeping => f.write_str("S"),
            SiteState::Active(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    sites: Vec<i32>,
}

impl Config {
    pub fn empty(len: usize) -> Self {
        Config {
            sites: vec![0; len],
        }
    }

    pub fn from_states(states: &[SiteState]) -> Self {
        Config {
            sites: states.iter().map(|s| s.encode()).collect(),
        }
    }

    /// Active particle counts per site.
    pub fn from_counts(counts: &[u32]) -> Self {
        Config {
            sites: counts.iter().map(|&n| n as i32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> SiteState {
        SiteState::decode(self.sites[v])
    }

    pub fn set(&mut self, v: Vertex, state: SiteState) {
        self.sites[v] = state.encode();
    }

    /// Raw encoding: `0` empty, `-1` sleeping, `n >= 1` active.
    pub fn raw(&self, v: Vertex) -> i32 {
        self.sites[v]
    }

    /// Number of active particles at `v` (zero when sleeping).
    #[inline]
    pub fn active(&self, v: Vertex) -> u32 {
        self.sites[v].max(0) as u32
    }

    #[inline]
    pub fn is_sleeping(&self, v: Vertex) -> bool {
        self.sites[v] == SLEEPING
    }

    /// Drops a particle at `v`; a sleeping particle there wakes up (`1 + rho = 2`).
    #[inline]
    pub fn add_active(&mut self, v: Vertex) {
        let s = &mut self.sites[v];
        *s = if *s == SLEEPING { 2 } else { *s + 1 };
    }

    /// Removes one active particle from `v`; requires `active(v) >= 1`.
    #[inline]
    pub(crate) fn remove_active(&mut self, v: Vertex) {
        debug_assert!(self.sites[v] >= 1);
        self.sites[v] -= 1;
    }

    #[inline]
    pub(crate) fn fall_asleep(&mut self, v: Vertex) {
        debug_assert_eq!(self.sites[v], 1);
        self.sites[v] = SLEEPING;
    }

    pub fn states(&self) -> impl Iterator<Item = SiteState> + '_ {
        self.sites.iter().map(|&r| SiteState::decode(r))
    }

    pub fn particle_count(&self) -> u64 {
        self.states().map(SiteState::particles).sum()
    }

    pub fn sleeping_count(&self) -> u64 {
        self.sites.iter().filter(|&&r| r == SLEEPING).count() as u64
    }

    pub fn is_stable(&self) -> bool {
        self.sites.iter().all(|&r| r <= 0)
    }

    /// `eta(x) <= 1` and every other site stable.
    pub fn is_weakly_stable(&self, x: Vertex) -> bool {
        self.sites
            .iter()
            .enumerate()
            .all(|(v, &r)| if v == x { r <= 1 } else { r <= 0 })
    }

    /// Pointwise `self <= other` in the site order, over the sites of `self`.
    /// `other` may be defined on a larger (index-prefix) region.
    pub fn le(&self, other: &Config) -> bool {
        self.len() <= other.len()
            && (0..self.len()).all(|v| self.get(v) <= other.get(v))
    }
}

/// Independent Poisson(`mu`) active particles per site.
///
/// Each site draws by inversion from its own uniform keyed by `(seed, v)`, so
/// configurations on nested balls agree on the common sites and are
/// pointwise non-decreasing in `mu` at fixed seed.
pub fn sample_poisson_config(region: &FiniteRegion, mu: f64, seed: u64) -> Result<Config> {
    if !(mu >= 0.0) || mu > MAX_POISSON_MEAN {
        return Err(ArwError::domain(format!(
            "particle density must lie in [0, {MAX_POISSON_MEAN}], got {mu}"
        )));
    }
    let counts: Vec<u32> = region
        .vertices()
        .map(|v| poisson_inverse(random_unit(seed, Stream::Config, v as u64, 0), mu))
        .collect();
    Ok(Config::from_counts(&counts))
}

pub const MAX_POISSON_MEAN: f64 = 500.0;

/// Smallest `k` with `P(Poisson(mu) <= k) > u`.
pub fn poisson_inverse(u: f64, mu: f64) -> u32 {
    if mu == 0.0 {
        return 0;
    }
    let mut k = 0u32;
    let mut p = (-mu).exp();
    let mut cdf = p;
    let cap = (mu + 50.0 * mu.sqrt() + 50.0) as u32;
    while u >= cdf && k < cap {
        k += 1;
        p *= mu / f64::from(k);
        cdf += p;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_order() {
        assert!(SiteState::Empty < SiteState::Sleeping);
        assert!(SiteState::Sleeping < SiteState::Active(1));
        assert!(SiteState::Active(1) < SiteState::Active(2));
    }

    #[test]
    fn waking_a_sleeper() {
        let mut c = Config::from_states(&[SiteState::Sleeping, SiteState::Empty]);
        c.add_active(0);
        c.add_active(1);
        assert_eq!(c.get(0), SiteState::Active(2));
        assert_eq!(c.get(1), SiteState::Active(1));
    }

    #[test]
    fn zero_density_is_empty() {
        let k = FiniteRegion::lattice_ball(2, 6).unwrap();
        let c = sample_poisson_config(&k, 0.0, 3).unwrap();
        assert_eq!(c.particle_count(), 0);
        assert!(sample_poisson_config(&k, -0.1, 3).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_nested() {
        let small = FiniteRegion::lattice_ball(2, 4).unwrap();
        let large = FiniteRegion::lattice_ball(2, 9).unwrap();
        let a = sample_poisson_config(&small, 0.7, 42).unwrap();
        let b = sample_poisson_config(&large, 0.7, 42).unwrap();
        assert_eq!(a, sample_poisson_config(&small, 0.7, 42).unwrap());
        assert!((0..small.len()).all(|v| a.get(v) == b.get(v)));
        let denser = sample_poisson_config(&large, 0.9, 42).unwrap();
        assert!(b.le(&denser));
    }

    #[test]
    fn poisson_mean_occupancy() {
        // Ball of radius 71 in Z^2 has 10_081 sites.
        let k = FiniteRegion::lattice_ball(2, 71).unwrap();
        let c = sample_poisson_config(&k, 0.5, 8).unwrap();
        let n = k.len() as f64;
        let mean = c.particle_count() as f64 / n;
        assert!((mean - 0.5).abs() <= 3.0 * (0.5 / n).sqrt(), "{mean}");
    }

    #[test]
    fn inversion_matches_cdf() {
        let mu: f64 = 1.3;
        let p0 = (-mu).exp();
        assert_eq!(poisson_inverse(0.0, mu), 0);
        assert_eq!(poisson_inverse(p0 * 0.999, mu), 0);
        assert_eq!(poisson_inverse(p0 * 1.001, mu), 1);
        assert_eq!(poisson_inverse(p0 * (1.0 + mu) * 1.001, mu), 2);
    }
}
