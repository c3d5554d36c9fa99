//! Activated random walks on finite balls through the Diaconis-Fulton
//! instruction-array representation.

pub mod config;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod greens;
pub mod rng;
pub mod stabilization;
pub mod stats;
pub mod tape;
pub mod verify;

pub use config::{sample_poisson_config, Config, SiteState};
pub use error::{ArwError, Result};
pub use graph::{Family, FiniteRegion, Vertex};
pub use stabilization::{
    enforced_stabilize, excess_jumps, stabilize, stabilize_via_weak, weak_stabilize, OdometerReport,
    Stabilizer, ToppleOrder, ViaWeakOutcome, WeakStabOutcome,
};
pub use tape::{Instruction, InstructionTape};
pub use greens::{green_exact, green_mc, ring_green_sum, escape_probability, xi_estimate, GreenSolver, GreenTable};
pub use stats::EstimateRecord;
pub use estimators::{TrialParams, InequalityCheck, BoundReport, g_lambda, theorem_bound};
