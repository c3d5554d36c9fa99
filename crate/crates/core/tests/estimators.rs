use arw_core::estimators::{
    activity_profile, estimate_origin_activity, estimate_q, excess_mean_check, g_lambda, mass_balance_residual,
    mu_c_bracket, sleep_lower_bound_check, tail_bound_check, TrialParams,
};
use arw_core::stabilization::DEFAULT_BUDGET;
use arw_core::{green_exact, Family, FiniteRegion};

fn single_site() -> FiniteRegion {
    FiniteRegion::lattice_ball(2, 1).unwrap()
}

/// A lone particle sleeps with probability lambda/(1+lambda) at each
/// instruction; extra particles only leave.
fn q_single(mu: f64, lambda: f64) -> f64 {
    (1.0 - (-mu).exp()) * lambda / (1.0 + lambda)
}

#[test]
fn single_site_sleep_probability() {
    for (mu, lambda) in [(0.5, 1.0), (1.2, 0.3), (0.2, 5.0)] {
        let q = estimate_q(&single_site(), 0, &TrialParams::new(mu, lambda, 100_000, 1)).unwrap();
        assert!(q.z(q_single(mu, lambda)).abs() <= 3.0, "{mu} {lambda}: {q:?}");
    }
    let q = estimate_q(&single_site(), 0, &TrialParams::new(0.7, 1e4, 20_000, 2)).unwrap();
    assert!(q.z(1.0 - (-0.7f64).exp()).abs() <= 3.0);
}

#[test]
fn single_site_activity() {
    let mu = 0.8;
    let a = estimate_origin_activity(&single_site(), &TrialParams::new(mu, 1.0, 50_000, 3)).unwrap();
    assert!(a.toppled.z(1.0 - (-mu).exp()).abs() <= 3.0);
    // Every particle but a sleeper jumps out exactly once.
    assert!(a.jumps.z(mu - q_single(mu, 1.0)).abs() <= 3.0);
}

#[test]
fn origin_activity_grows_with_density() {
    let k = FiniteRegion::lattice_ball(2, 4).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    for mu in [0.1, 0.3, 0.6, 0.9] {
        let a = estimate_origin_activity(&k, &TrialParams::new(mu, 1.0, 4000, 5)).unwrap();
        if let Some((m, s)) = prev {
            assert!(a.instructions.mean - m >= -3.0 * (a.instructions.stderr.powi(2) + s * s).sqrt());
        }
        prev = Some((a.instructions.mean, a.instructions.stderr));
    }
}

#[test]
fn mass_balance_single_site_and_square() {
    let (mu, lambda) = (0.6, 1.0);
    let mb = mass_balance_residual(&single_site(), &TrialParams::new(mu, lambda, 20_000, 7)).unwrap();
    assert!(mb.lhs.z(mu - q_single(mu, lambda)).abs() <= 3.0);
    assert!(mb.holds);
    let k = FiniteRegion::lattice_ball(2, 6).unwrap();
    let mb = mass_balance_residual(&k, &TrialParams::new(0.3, 1.0, 20_000, 8)).unwrap();
    assert!(mb.residual.z(0.0).abs() <= 3.0, "{:?}", mb.residual);
}

#[test]
fn sleep_lower_bound_is_tight_on_a_single_site() {
    let c = sleep_lower_bound_check(&single_site(), 0, &TrialParams::new(0.9, 2.0, 50_000, 9)).unwrap();
    assert!(c.z.abs() <= 3.0, "{c:?}");
    let k = FiniteRegion::lattice_ball(2, 4).unwrap();
    let c = sleep_lower_bound_check(&k, 0, &TrialParams::new(0.5, 1.0, 10_000, 10)).unwrap();
    assert!(c.holds, "{c:?}");
}

#[test]
fn excess_jumps_on_a_single_site() {
    // With k >= 1 particles the enforced run jumps k times and the weak run
    // k - 1 times, so A = 1{k >= 1}.
    let mu = 0.7;
    let c = excess_mean_check(&single_site(), 0, &TrialParams::new(mu, 1.0, 20_000, 11)).unwrap();
    assert!(c.smaller.z(1.0 - (-mu).exp()).abs() <= 3.0);
    assert!((c.larger.mean - 1.0).abs() < 1e-12);
    assert!(c.holds);
}

#[test]
fn excess_jumps_below_green_on_cubic_ball() {
    let k = FiniteRegion::lattice_ball(3, 4).unwrap();
    let c = excess_mean_check(&k, 0, &TrialParams::new(0.8, 0.5, 10_000, 12)).unwrap();
    assert!((c.larger.mean - green_exact(&k, &[], 0, 0).unwrap()).abs() < 1e-9);
    assert!(c.holds, "{c:?}");
}

#[test]
fn tail_buckets_on_square_ball() {
    let k = FiniteRegion::lattice_ball(2, 4).unwrap();
    let r = tail_bound_check(&k, 0, &TrialParams::new(0.5, 1.0, 20_000, 13), &[2, 3, 4]).unwrap();
    assert_eq!(r.single_round_sleepers, 0);
    assert!(r.holds(), "{r:?}");
    assert!(tail_bound_check(&k, 0, &TrialParams::new(0.5, 1.0, 10, 13), &[1]).is_err());
}

#[test]
fn coupled_profile_on_tree() {
    let rows = activity_profile(Family::Tree, 3, &[3, 5, 7], &TrialParams::new(0.3, 1.0, 5000, 14)).unwrap();
    for w in rows.windows(2) {
        // Shared seeds make the origin odometer pathwise non-decreasing in L.
        assert!(w[1].toppled.mean >= w[0].toppled.mean);
        assert!(w[1].leaving_density.mean <= w[0].leaving_density.mean + 3.0 * w[0].leaving_density.stderr);
    }
}

#[test]
fn bracket_on_cubic_ball_lies_below_bound() {
    let k = FiniteRegion::lattice_ball(3, 8).unwrap();
    let b = mu_c_bracket(&k, 1.0, 200, 0.01, 15, DEFAULT_BUDGET, 20).unwrap();
    let g = g_lambda(1.516386, 1.0).unwrap().g_value;
    assert!(!b.is_degenerate());
    assert!(b.mu_lo > 0.0 && b.mu_hi <= g && b.mu_lo <= b.mu_hi);
    assert!(b.mu_hi - b.mu_lo <= 1.5 / 2f64.powi(20) + 1e-12);
}

#[test]
fn records_do_not_depend_on_thread_count() {
    let k = FiniteRegion::lattice_ball(2, 5).unwrap();
    let p = TrialParams::new(0.6, 1.0, 3000, 16);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (estimate_q(&k, 0, &p).unwrap(), mass_balance_residual(&k, &p).unwrap()))
    };
    assert_eq!(run(1), run(4));
}
