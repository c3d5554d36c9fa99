//! Fixed workloads shared by the benchmarks.

use arw_core::{sample_poisson_config, Config, FiniteRegion, InstructionTape};

/// A region, an initial configuration and a tape, all from fixed seeds.
pub struct Workload {
    pub region: FiniteRegion,
    pub config: Config,
    pub tape: InstructionTape,
}

pub fn lattice_workload(dim: usize, radius: usize, mu: f64, lambda: f64) -> Workload {
    let region = FiniteRegion::lattice_ball(dim, radius).expect("valid lattice ball");
    let config = sample_poisson_config(&region, mu, 17).expect("valid density");
    let tape = InstructionTape::new(23, lambda, region.degree()).expect("valid tape");
    Workload { region, config, tape }
}
