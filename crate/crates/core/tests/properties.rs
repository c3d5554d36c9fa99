use arw_core::stabilization::{
    enforced_stabilize, stabilize_via_weak, stabilize_with, weak_stabilize, weak_stabilize_with, DEFAULT_BUDGET,
};
use arw_core::verify::SHAPES;
use arw_core::{
    g_lambda, stabilize, theorem_bound, Config, FiniteRegion, InstructionTape, SiteState, Stabilizer, ToppleOrder,
    Vertex,
};
use proptest::prelude::*;
use proptest::sample::Index;

#[derive(Clone, Debug)]
struct Case {
    region: FiniteRegion,
    config: Config,
    tape: InstructionTape,
    x: Vertex,
}

fn case() -> impl Strategy<Value = Case> {
    (
        0..SHAPES.len(),
        any::<Index>(),
        prop::collection::vec(0u32..4, 41),
        prop::collection::vec(prop::bool::weighted(0.1), 41),
        any::<u64>(),
        prop::sample::select(vec![0.1, 1.0, 10.0]),
        any::<Index>(),
    )
        .prop_map(|(shape, radius, counts, asleep, seed, lambda, x)| {
            let (family, d, max_radius) = SHAPES[shape];
            let region = FiniteRegion::new(family, d, 1 + radius.index(max_radius)).unwrap();
            let n = region.len();
            let mut config = Config::from_counts(&counts[..n]);
            for v in 0..n {
                if asleep[v] {
                    config.set(v, SiteState::Sleeping);
                }
            }
            let tape = InstructionTape::new(seed, lambda, region.degree()).unwrap();
            let x = x.index(n);
            Case { region, config, tape, x }
        })
}

fn le(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

proptest! {
    #[test]
    fn abelian_under_random_orders(c in case(), s1: u64, s2: u64) {
        let fifo = stabilize(&c.region, &c.config, &c.tape).unwrap();
        for s in [s1, s2] {
            let r = stabilize_with(&c.region, &c.config, &c.tape, ToppleOrder::Random(s), DEFAULT_BUDGET).unwrap();
            prop_assert_eq!(&r, &fifo);
        }
        let weak = weak_stabilize(c.x, &c.region, &c.config, &c.tape).unwrap();
        let r = weak_stabilize_with(c.x, &c.region, &c.config, &c.tape, ToppleOrder::Random(s1), DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(r, weak);
    }

    #[test]
    fn postconditions_and_conservation(c in case()) {
        let r = stabilize(&c.region, &c.config, &c.tape).unwrap();
        prop_assert!(r.final_config.is_stable());
        prop_assert_eq!(c.config.particle_count(), r.final_config.sleeping_count() + r.absorbed);
        prop_assert!(le(&r.jumps, &r.instructions));
        let w = weak_stabilize(c.x, &c.region, &c.config, &c.tape).unwrap().report;
        prop_assert!(w.final_config.is_weakly_stable(c.x));
        prop_assert_eq!(c.config.particle_count(), w.final_config.particle_count() + w.absorbed);
    }

    #[test]
    fn monotone_in_configuration(c in case(), extra in prop::collection::vec(0u32..3, 41)) {
        let mut raised = c.config.clone();
        for v in 0..raised.len() {
            for _ in 0..extra[v] {
                raised.add_active(v);
            }
        }
        prop_assert!(c.config.le(&raised));
        let a = stabilize(&c.region, &c.config, &c.tape).unwrap();
        let b = stabilize(&c.region, &raised, &c.tape).unwrap();
        prop_assert!(le(&a.instructions, &b.instructions));
    }

    #[test]
    fn monotone_in_volume(c in case(), r in any::<Index>()) {
        let big = &c.region;
        let small = FiniteRegion::new(big.family(), big.dim(), 1 + r.index(big.radius())).unwrap();
        let eta: Vec<SiteState> = c.config.states().take(small.len()).collect();
        let a = stabilize(&small, &Config::from_states(&eta), &c.tape).unwrap();
        let b = stabilize(big, &c.config, &c.tape).unwrap();
        prop_assert!(le(&a.instructions, &b.instructions[..small.len()]));
    }

    #[test]
    fn enforced_activation_dominates(c in case()) {
        let a = stabilize(&c.region, &c.config, &c.tape).unwrap();
        let e = enforced_stabilize(c.x, &c.region, &c.config, &c.tape).unwrap();
        prop_assert!(le(&a.instructions, &e.instructions));
    }

    #[test]
    fn weak_ignores_sleep_erasure(c in case()) {
        let a = weak_stabilize(c.x, &c.region, &c.config, &c.tape).unwrap();
        let b = weak_stabilize(c.x, &c.region, &c.config, &c.tape.ignore_sleep_at(c.x)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn extra_particle_at_x_matches_enforced(c in case()) {
        let mut eta = c.config.clone();
        if eta.is_sleeping(c.x) {
            eta.set(c.x, SiteState::Empty);
        }
        let mut plus = eta.clone();
        plus.add_active(c.x);
        let w = weak_stabilize(c.x, &c.region, &plus, &c.tape).unwrap().report;
        let e = enforced_stabilize(c.x, &c.region, &eta, &c.tape).unwrap();
        prop_assert_eq!(&w.instructions, &e.instructions);
        prop_assert_eq!(&w.jumps, &e.jumps);
        prop_assert_eq!(w.absorbed, e.absorbed);
        prop_assert_eq!(w.final_config.get(c.x), SiteState::Active(1));
        prop_assert_eq!(e.final_config.get(c.x), SiteState::Empty);
    }

    #[test]
    fn ws_legal_prefixes_are_dominated(c in case(), picks in prop::collection::vec(any::<Index>(), 0..300)) {
        let m1 = weak_stabilize(c.x, &c.region, &c.config, &c.tape).unwrap().report.instructions;
        let mut s = Stabilizer::new(&c.region, &c.tape, c.config.clone()).unwrap();
        for p in picks {
            let unstable: Vec<Vertex> = c.region.vertices().filter(|&v| s.is_unstable(v, Some(c.x))).collect();
            if unstable.is_empty() {
                break;
            }
            s.topple(unstable[p.index(unstable.len())]).unwrap();
        }
        prop_assert!(le(s.instructions(), &m1));
    }

    #[test]
    fn via_weak_is_a_stabilization(c in case()) {
        let full = stabilize(&c.region, &c.config, &c.tape).unwrap();
        let via = stabilize_via_weak(c.x, &c.region, &c.config, &c.tape).unwrap();
        prop_assert_eq!(&via.report, &full);
        prop_assert_eq!(via.rounds.len() as u64, via.rounds_to_stable);
        for pair in via.rounds.windows(2) {
            prop_assert!(le(&pair[0].instructions, &pair[1].instructions));
        }
        if via.rounds_to_stable == 1 && !c.config.is_sleeping(c.x) {
            prop_assert_eq!(full.final_config.get(c.x), SiteState::Empty);
        }
    }

    #[test]
    fn bound_is_monotone_in_green(g in 1.0f64..3.0, dg in 0.0f64..1.0, lambda in 1e-3f64..1e3, h in 1u64..200) {
        let a = theorem_bound(g, lambda, h).unwrap();
        let b = theorem_bound(g + dg, lambda, h).unwrap();
        prop_assert!(a <= b);
        if g < (h + 1) as f64 {
            prop_assert!(a > 0.0 && a <= 1.0);
        }
    }

    #[test]
    fn g_below_one(g in 1.0f64..3.0, log_lambda in -3.0f64..3.0) {
        let r = g_lambda(g, 10f64.powf(log_lambda)).unwrap();
        prop_assert!(r.g_value > 0.0 && r.g_value < 1.0);
        prop_assert!(r.per_h.iter().all(|&(_, b)| b >= r.g_value));
    }
}
