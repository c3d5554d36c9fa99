//! Green's functions of the simple random walk killed on an absorbing set.
//!
//! `G_Z(x, y)` is the expected number of visits to `y` (time zero included)
//! by a walk started at `x` before it first enters `Z`. The exterior sink is
//! always part of `Z`. Exact values come from a matrix-free conjugate
//! gradient solve of `(I - P) g = e_y` on the non-absorbing vertices, which is
//! symmetric positive definite because every vertex has the same degree.

use log::info;
use rand::Rng;
use serde::Serialize;

use crate::error::{ArwError, Result};
use crate::graph::{FiniteRegion, Vertex};
use crate::rng::{PhiloxRng, Stream};
use crate::stats::{run_trials, EstimateRecord};

const NONE: u32 = u32::MAX;

/// Linear-system view of a region with a given absorbing set.
#[derive(Clone, Debug)]
pub struct GreenSolver<'a> {
    region: &'a FiniteRegion,
    /// Interior vertex -> unknown index, or `NONE` when absorbing.
    slot: Vec<u32>,
    /// Unknown index -> interior vertex.
    free: Vec<Vertex>,
    /// `free.len() * degree` entries of neighbor unknown indices.
    adjacency: Vec<u32>,
    tolerance: f64,
}

impl<'a> GreenSolver<'a> {
    /// Absorbing set = exterior plus `absorbing`.
    pub fn new(region: &'a FiniteRegion, absorbing: &[Vertex]) -> Result<Self> {
        let n = region.len();
        if n > NONE as usize {
            return Err(ArwError::domain("region too large for the Green's solver"));
        }
        let mut is_absorbing = vec![false; n];
        for &z in absorbing {
            if z < n {
                is_absorbing[z] = true;
            } else if z != region.sink() {
                return Err(ArwError::domain(format!("vertex {z} is not in the region")));
            }
        }
        let mut slot = vec![NONE; n];
        let mut free = Vec::new();
        for v in 0..n {
            if !is_absorbing[v] {
                slot[v] = free.len() as u32;
                free.push(v);
            }
        }
        let degree = region.degree();
        let mut adjacency = Vec::with_capacity(free.len() * degree);
        for &v in &free {
            for &w in region.neighbors(v) {
                adjacency.push(if w < n { slot[w] } else { NONE });
            }
        }
        let solver = GreenSolver {
            region,
            slot,
            free,
            adjacency,
            tolerance: 1e-14,
        };
        solver.check_absorption()?;
        Ok(solver)
    }

    /// Relative residual target of the conjugate gradient iteration.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Every free vertex must be able to reach the absorbing set.
    fn check_absorption(&self) -> Result<()> {
        let degree = self.region.degree();
        let m = self.free.len();
        let mut reached = vec![false; m];
        let mut stack = Vec::new();
        for i in 0..m {
            if self.adjacency[i * degree..(i + 1) * degree].contains(&NONE) {
                reached[i] = true;
                stack.push(i);
            }
        }
        while let Some(i) = stack.pop() {
            for &j in &self.adjacency[i * degree..(i + 1) * degree] {
                if j != NONE && !reached[j as usize] {
                    reached[j as usize] = true;
                    stack.push(j as usize);
                }
            }
        }
        if reached.iter().all(|&r| r) {
            Ok(())
        } else {
            Err(ArwError::domain(
                "absorbing set is not reachable from every vertex",
            ))
        }
    }

    pub fn is_absorbing(&self, v: Vertex) -> bool {
        v >= self.region.len() || self.slot[v] == NONE
    }

    /// `y = (I - P) x` on the unknowns.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let degree = self.region.degree();
        let inv = 1.0 / degree as f64;
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &j in &self.adjacency[i * degree..(i + 1) * degree] {
                if j != NONE {
                    acc += x[j as usize];
                }
            }
            *out = x[i] - inv * acc;
        }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = rhs.len();
        let mut x = vec![0.0; m];
        let bnorm = dot(rhs, rhs).sqrt();
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let mut rs = dot(&r, &r);
        let max_iter = 20 * m + 1000;
        for _ in 0..max_iter {
            if rs.sqrt() <= self.tolerance * bnorm {
                break;
            }
            self.apply(&p, &mut ap);
            let alpha = rs / dot(&p, &ap);
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new = dot(&r, &r);
            let beta = rs_new / rs;
            rs = rs_new;
            for i in 0..m {
                p[i] = r[i] + beta * p[i];
            }
        }
        self.apply(&x, &mut ap);
        let residual = rhs
            .iter()
            .zip(&ap)
            .map(|(b, a)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        let xnorm = dot(&x, &x).sqrt();
        let allowed = (1e-10 * xnorm).max(self.tolerance * bnorm * 10.0);
        if residual > allowed {
            return Err(ArwError::Solver(format!(
                "conjugate gradient residual {residual:e} exceeds {allowed:e}"
            )));
        }
        Ok(x)
    }

    /// `G_Z(v, y)` for every interior `v` (zero on absorbing vertices).
    pub fn column(&self, y: Vertex) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.region.len()];
        if self.is_absorbing(y) {
            return Ok(out);
        }
        let mut rhs = vec![0.0; self.free.len()];
        rhs[self.slot[y] as usize] = 1.0;
        let g = self.solve(&rhs)?;
        for (i, &v) in self.free.iter().enumerate() {
            out[v] = g[i];
        }
        Ok(out)
    }

    /// `P_v(walk hits target before Z)` for every interior `v`, with value 1
    /// at `target` and 0 on `Z`.
    pub fn hitting_probability(&self, target: Vertex) -> Result<Vec<f64>> {
        let n = self.region.len();
        let mut out = vec![0.0; n];
        if self.is_absorbing(target) {
            return Ok(out);
        }
        let mut extended: Vec<Vertex> = (0..n).filter(|&v| self.is_absorbing(v)).collect();
        extended.push(target);
        let inner = GreenSolver::new(self.region, &extended)?.with_tolerance(self.tolerance);
        let degree = self.region.degree() as f64;
        let rhs: Vec<f64> = inner
            .free
            .iter()
            .map(|&v| {
                let hits = self.region.neighbors(v).iter().filter(|&&w| w == target).count();
                hits as f64 / degree
            })
            .collect();
        let h = inner.solve(&rhs)?;
        for (i, &v) in inner.free.iter().enumerate() {
            out[v] = h[i];
        }
        out[target] = 1.0;
        Ok(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `G_Z(x, y)` with `Z` = exterior plus `absorbing`.
pub fn green_exact(region: &FiniteRegion, absorbing: &[Vertex], x: Vertex, y: Vertex) -> Result<f64> {
    for v in [x, y] {
        if !region.is_interior(v) {
            return Err(ArwError::domain(format!("vertex {v} is not interior")));
        }
    }
    let solver = GreenSolver::new(region, absorbing)?;
    Ok(solver.column(y)?[x])
}

/// `G_{K^c}(v, 0)` for every interior `v`.
pub fn green_to_origin(region: &FiniteRegion) -> Result<Vec<f64>> {
    GreenSolver::new(region, &[])?.column(region.origin())
}

/// Dense table of `G_Z(x, y)`.
#[derive(Clone, Debug)]
pub struct GreenTable {
    len: usize,
    pub absorbing: Vec<Vertex>,
    /// Row-major, `values[x * len + y]`.
    values: Vec<f64>,
}

impl GreenTable {
    /// Largest region accepted, to keep the table at a few hundred megabytes.
    pub const MAX_VERTICES: usize = 5000;

    pub fn compute(region: &FiniteRegion, absorbing: &[Vertex]) -> Result<Self> {
        let n = region.len();
        if n > Self::MAX_VERTICES {
            return Err(ArwError::domain(format!(
                "dense Green's table limited to {} vertices, region has {n}",
                Self::MAX_VERTICES
            )));
        }
        let solver = GreenSolver::new(region, absorbing)?;
        let mut values = vec![0.0; n * n];
        for y in 0..n {
            let col = solver.column(y)?;
            for x in 0..n {
                values[x * n + y] = col[x];
            }
        }
        Ok(GreenTable {
            len: n,
            absorbing: absorbing.to_vec(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, x: Vertex, y: Vertex) -> f64 {
        self.values[x * self.len + y]
    }
}

/// Monte Carlo estimate of `G_{K^c}(x, y)` from `trials` independent walks.
pub fn green_mc(region: &FiniteRegion, x: Vertex, y: Vertex, trials: u64, seed: u64) -> Result<EstimateRecord> {
    if trials == 0 {
        return Err(ArwError::domain("trials must be at least 1"));
    }
    for v in [x, y] {
        if !region.is_interior(v) {
            return Err(ArwError::domain(format!("vertex {v} is not interior")));
        }
    }
    let degree = region.degree();
    let sink = region.sink();
    let samples = run_trials(trials, |t| {
        let mut rng = PhiloxRng::new(seed, Stream::Walk, t);
        let mut v = x;
        let mut visits = 0u64;
        while v != sink {
            if v == y {
                visits += 1;
            }
            v = region.neighbor(v, rng.random_range(0..degree));
        }
        Ok(visits as f64)
    })?;
    Ok(EstimateRecord::from_samples(
        format!("green_mc({x},{y})"),
        &samples,
        seed,
    ))
}

/// `sum over ring(r1, r2) of G_{K^c}(v, 0)`.
pub fn ring_green_sum(region: &FiniteRegion, r1: f64, r2: f64) -> Result<f64> {
    let column = green_to_origin(region)?;
    Ok(ring_sum(region, &column, r1, r2))
}

/// Ring sum of a precomputed column `G(., 0)`.
pub fn ring_sum(region: &FiniteRegion, column: &[f64], r1: f64, r2: f64) -> f64 {
    region.ring(r1, r2).into_iter().map(|v| column[v]).sum()
}

/// Probability that the walk from the origin leaves the region before
/// returning to the origin.
pub fn escape_probability(region: &FiniteRegion) -> Result<f64> {
    let g = green_exact(region, &[], region.origin(), region.origin())?;
    Ok(1.0 / g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiEstimate {
    pub record: EstimateRecord,
    pub horizon_radius: f64,
    /// Fraction of trials whose walk was back inside `B_{r2}` after first
    /// reaching distance `horizon_radius / 2`. Visits lost to truncation come
    /// from trajectories of this kind returning once more, so this bounds how
    /// much the horizon can matter.
    pub truncation_fraction: f64,
}

/// Monte Carlo estimate of the expected time the walk on `Z^d` from the
/// origin spends in `{ r1 <= |v|_1 < r2 }`, stopping each walk when it leaves
/// the ball of radius `horizon_radius`.
pub fn xi_estimate(dim: usize, r1: f64, r2: f64, trials: u64, horizon_radius: f64, seed: u64) -> Result<XiEstimate> {
    if dim <= 2 {
        return Err(ArwError::domain("time in a ring is infinite for d <= 2"));
    }
    if !(0.0 <= r1 && r1 <= r2) {
        return Err(ArwError::domain("ring radii must satisfy 0 <= r1 <= r2"));
    }
    if !(horizon_radius > r2) {
        return Err(ArwError::domain("horizon radius must exceed r2"));
    }
    if trials == 0 {
        return Err(ArwError::domain("trials must be at least 1"));
    }
    let half = horizon_radius / 2.0;
    let outcomes = run_trials(trials, |t| {
        let mut rng = PhiloxRng::new(seed, Stream::Walk, t);
        let mut pos = vec![0i64; dim];
        let mut norm: i64 = 0;
        let mut time_in_ring = 0u64;
        let mut reached_half = false;
        let mut late_return = false;
        loop {
            let d = norm as f64;
            if d >= horizon_radius {
                break;
            }
            if d >= half {
                reached_half = true;
            }
            if reached_half && d < r2 {
                late_return = true;
            }
            if r1 <= d && d < r2 {
                time_in_ring += 1;
            }
            let k = rng.random_range(0..2 * dim);
            let axis = k / 2;
            let step = if k % 2 == 0 { 1 } else { -1 };
            let before = pos[axis].abs();
            pos[axis] += step;
            norm += pos[axis].abs() - before;
        }
        Ok((time_in_ring as f64, late_return))
    })?;
    let samples: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let late = outcomes.iter().filter(|o| o.1).count();
    Ok(XiEstimate {
        record: EstimateRecord::from_samples(format!("xi({r1},{r2})"), &samples, seed),
        horizon_radius,
        truncation_fraction: late as f64 / trials as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeGreenLimit {
    pub dim: usize,
    /// `(L, G_{B_L^c}(0, 0))` for each solved radius.
    pub raw: Vec<(usize, f64)>,
    /// Extrapolations from consecutive radius pairs, tagged by the larger radius.
    pub extrapolated: Vec<(usize, f64)>,
    pub value: f64,
    pub converged: bool,
    pub tolerance: f64,
}

/// `G(0, 0)` on `Z^d`, `d >= 3`, from balls of radius `start, 2 start, ...`.
///
/// The finite-ball values approach the limit as `L^{2-d}`, so each doubling
/// pair is combined as `(2^{d-2} G_{2L} - G_L) / (2^{d-2} - 1)`. Stops once two
/// consecutive extrapolations differ by less than `tolerance`, or at
/// `max_radius` with `converged = false`.
pub fn lattice_green_limit(dim: usize, start: usize, max_radius: usize, tolerance: f64) -> Result<LatticeGreenLimit> {
    if dim < 3 {
        return Err(ArwError::domain("the lattice Green's function is finite only for d >= 3"));
    }
    if start == 0 {
        return Err(ArwError::domain("starting radius must be positive"));
    }
    let factor = 2f64.powi(dim as i32 - 2);
    let mut raw: Vec<(usize, f64)> = Vec::new();
    let mut extrapolated: Vec<(usize, f64)> = Vec::new();
    let mut radius = start;
    while radius <= max_radius {
        let region = FiniteRegion::lattice_ball(dim, radius)?;
        let g = GreenSolver::new(&region, &[])?
            .with_tolerance(1e-12)
            .column(region.origin())?[region.origin()];
        if let Some(&(_, prev)) = raw.last() {
            let e = (factor * g - prev) / (factor - 1.0);
            info!("G(0,0) on Z^{dim}: L={radius} raw={g:.10} extrapolated={e:.10}");
            if let Some(&(_, prev_e)) = extrapolated.last() {
                let change: f64 = e - prev_e;
                info!("  change from previous extrapolation {:.3e} (tolerance {tolerance:.1e})", change.abs());
                if change.abs() < tolerance {
                    raw.push((radius, g));
                    extrapolated.push((radius, e));
                    return Ok(LatticeGreenLimit {
                        dim,
                        raw,
                        extrapolated,
                        value: e,
                        converged: true,
                        tolerance,
                    });
                }
            }
            extrapolated.push((radius, e));
        } else {
            info!("G(0,0) on Z^{dim}: L={radius} raw={g:.10}");
        }
        raw.push((radius, g));
        radius *= 2;
    }
    let value = extrapolated
        .last()
        .or(raw.last())
        .map(|&(_, v)| v)
        .unwrap_or(f64::NAN);
    Ok(LatticeGreenLimit {
        dim,
        raw,
        extrapolated,
        value,
        converged: false,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line3() -> FiniteRegion {
        FiniteRegion::lattice_ball(1, 2).unwrap()
    }

    fn coord_index(k: &FiniteRegion, c: &[i32]) -> Vertex {
        k.vertices().find(|&v| k.coords(v).unwrap() == c).unwrap()
    }

    #[test]
    fn everything_else_absorbing_gives_one() {
        let k = FiniteRegion::lattice_ball(2, 3).unwrap();
        for x in k.vertices() {
            let others: Vec<Vertex> = k.vertices().filter(|&v| v != x).collect();
            assert_abs_diff_eq!(green_exact(&k, &others, x, x).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn three_site_line() {
        // (I - P) g = e_0 on {-1, 0, 1}: g(0) = 2, g(+-1) = 1.
        let k = line3();
        let right = coord_index(&k, &[1]);
        let left = coord_index(&k, &[-1]);
        assert_abs_diff_eq!(green_exact(&k, &[], 0, 0).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(green_exact(&k, &[], right, 0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ring_green_sum(&k, 0.0, 2.0).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(escape_probability(&k).unwrap(), 0.5, epsilon = 1e-12);
        let h = GreenSolver::new(&k, &[]).unwrap().hitting_probability(0).unwrap();
        assert_abs_diff_eq!(h[right], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(h[left], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(2.0 * h[right], green_exact(&k, &[], right, 0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn absorbing_endpoints_are_zero() {
        let k = line3();
        let right = coord_index(&k, &[1]);
        assert_eq!(green_exact(&k, &[right], right, 0).unwrap(), 0.0);
        assert_eq!(green_exact(&k, &[right], 0, right).unwrap(), 0.0);
    }

    #[test]
    fn single_site_values() {
        let k = FiniteRegion::lattice_ball(3, 1).unwrap();
        assert_eq!(green_exact(&k, &[], 0, 0).unwrap(), 1.0);
        assert_eq!(escape_probability(&k).unwrap(), 1.0);
        let r = green_mc(&k, 0, 0, 100, 1).unwrap();
        assert_eq!((r.mean, r.stderr), (1.0, 0.0));
    }

    #[test]
    fn empty_ring_sums_to_zero() {
        let k = FiniteRegion::lattice_ball(2, 5).unwrap();
        assert_eq!(ring_green_sum(&k, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn xi_rejects_recurrent_dimensions() {
        assert!(xi_estimate(2, 0.0, 1.0, 10, 4.0, 1).is_err());
        assert!(xi_estimate(3, 0.0, 4.0, 10, 4.0, 1).is_err());
        let r = xi_estimate(3, 2.0, 2.0, 50, 8.0, 1).unwrap();
        assert_eq!(r.record.mean, 0.0);
    }

    #[test]
    fn green_mc_on_line() {
        let k = line3();
        let r = green_mc(&k, 0, 0, 100_000, 77).unwrap();
        assert!((r.mean - 2.0).abs() <= 3.0 * r.stderr, "{r:?}");
    }

    #[test]
    fn unreachable_set_rejected() {
        // Absorbing nothing would be fine on a ball (the exterior absorbs), so
        // the only failure is a vertex outside the region.
        let k = line3();
        assert!(GreenSolver::new(&k, &[17]).is_err());
    }
}
