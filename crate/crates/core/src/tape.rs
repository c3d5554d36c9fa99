//! Instruction arrays of the Diaconis-Fulton representation.
//!
//! A tape never stores instructions. The `j`-th instruction at vertex `x` is
//! recomputed on demand from `(seed, x, j)`, so any number of stabilization
//! strategies can replay exactly the same array.

use crate::error::{ArwError, Result};
use crate::graph::Vertex;
use crate::rng::{random_unit, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// Move one active particle to the neighbor with this index.
    Jump(u32),
    /// A lone active particle falls asleep.
    Sleep,
    /// Leaves the configuration unchanged.
    Neutral,
}

impl Instruction {
    /// Partitions the unit interval as `[0, p)` Sleep followed by `degree`
    /// equal cells for `Jump(0)..Jump(degree-1)`, with `p = lambda/(1+lambda)`.
    #[inline]
    pub fn from_unit(u: f64, lambda: f64, degree: usize) -> Instruction {
        let p_sleep = lambda / (1.0 + lambda);
        if u < p_sleep {
            return Instruction::Sleep;
        }
        let cell = (1.0 - p_sleep) / degree as f64;
        let i = ((u - p_sleep) / cell) as usize;
        Instruction::Jump(i.min(degree - 1) as u32)
    }

    pub fn is_jump(self) -> bool {
        matches!(self, Instruction::Jump(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstructionTape {
    seed: u64,
    lambda: f64,
    degree: usize,
    /// Vertices whose Sleep instructions read as Neutral. Sorted, deduplicated.
    erased: Vec<Vertex>,
}

impl InstructionTape {
    pub fn new(seed: u64, lambda: f64, degree: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ArwError::domain(format!(
                "sleep rate must be positive and finite, got {lambda}"
            )));
        }
        if degree == 0 {
            return Err(ArwError::domain("degree must be positive"));
        }
        if degree > u32::MAX as usize {
            return Err(ArwError::domain("degree too large"));
        }
        Ok(InstructionTape {
            seed,
            lambda,
            degree,
            erased: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn erased(&self) -> &[Vertex] {
        &self.erased
    }

    /// Underlying uniform draw for `(x, j)`.
    #[inline]
    pub fn unit(&self, x: Vertex, j: u64) -> f64 {
        random_unit(self.seed, Stream::Tape, j, x as u64)
    }

    /// The instruction `tau^{x,j}` for `j >= 1`.
    #[inline]
    pub fn instruction(&self, x: Vertex, j: u64) -> Instruction {
        debug_assert!(j >= 1, "instruction counters start at 1");
        let inst = Instruction::from_unit(self.unit(x, j), self.lambda, self.degree);
        if inst == Instruction::Sleep && self.is_erased(x) {
            Instruction::Neutral
        } else {
            inst
        }
    }

    #[inline]
    pub fn is_erased(&self, x: Vertex) -> bool {
        match self.erased.len() {
            0 => false,
            1 => self.erased[0] == x,
            _ => self.erased.binary_search(&x).is_ok(),
        }
    }

    /// The same array with every Sleep at `x` replaced by Neutral.
    pub fn ignore_sleep_at(&self, x: Vertex) -> InstructionTape {
        let mut out = self.clone();
        if let Err(pos) = out.erased.binary_search(&x) {
            out.erased.insert(pos, x);
        }
        out
    }
}
