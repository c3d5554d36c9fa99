//! Finite balls of `Z^d` and of regular trees with an absorbing exterior.
//!
//! Vertices are dense indices assigned breadth-first from the origin, so the
//! ball of radius `L` is always an index prefix of the ball of radius `L' > L`
//! built on the same graph. Every vertex outside the ball is collapsed into a
//! single sink whose index is `len()`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ArwError, Result};

/// Dense vertex index. The sink is `region.sink()`.
pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lattice,
    Tree,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Lattice => f.write_str("lattice"),
            Family::Tree => f.write_str("tree"),
        }
    }
}

impl FromStr for Family {
    type Err = ArwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Family::Lattice),
            "tree" => Ok(Family::Tree),
            other => Err(ArwError::domain(format!(
                "unknown family '{other}', expected 'lattice' or 'tree'"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteRegion {
    family: Family,
    /// Lattice dimension, or the tree degree.
    dim: usize,
    degree: usize,
    radius: usize,
    /// `len() * degree` entries; exterior targets hold `len()`.
    neighbors: Vec<Vertex>,
    distance: Vec<u32>,
    /// Lattice coordinates, `len() * dim` entries. Empty for trees.
    coords: Vec<i32>,
}

impl FiniteRegion {
    /// Builds the region described by `(family, d, L)`, where `d` is the
    /// lattice dimension or the tree degree.
    pub fn new(family: Family, d: usize, radius: usize) -> Result<Self> {
        match family {
            Family::Lattice => Self::lattice_ball(d, radius),
            Family::Tree => Self::tree_ball(d, radius),
        }
    }

    /// `{ v in Z^d : |v|_1 < radius }`.
    ///
    /// Neighbors are listed as `+e1, -e1, ..., +ed, -ed`.
    pub fn lattice_ball(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 {
            return Err(ArwError::domain("lattice dimension must be at least 1"));
        }
        if radius == 0 {
            return Err(ArwError::domain("ball radius must be at least 1"));
        }
        let span = 2 * radius as u64 + 1;
        if span.checked_pow(dim as u32).is_none() || radius > i32::MAX as usize {
            return Err(ArwError::domain("lattice ball too large to index"));
        }
        let degree = 2 * dim;
        let r = radius as i64;
        let key = |c: &[i32]| -> u64 {
            c.iter()
                .fold(0u64, |acc, &x| acc * span + (i64::from(x) + r) as u64)
        };

        let mut coords: Vec<i32> = vec![0; dim];
        let mut distance = vec![0u32];
        let mut index: HashMap<u64, Vertex> = HashMap::new();
        index.insert(key(&coords[..dim]), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut scratch = vec![0i32; dim];
        while let Some(v) = queue.pop_front() {
            let dist = distance[v];
            if dist + 1 >= radius as u32 {
                continue;
            }
            for axis in 0..dim {
                for step in [1, -1] {
                    scratch.copy_from_slice(&coords[v * dim..(v + 1) * dim]);
                    scratch[axis] += step;
                    let k = key(&scratch);
                    if index.contains_key(&k) {
                        continue;
                    }
                    let w = distance.len();
                    index.insert(k, w);
                    coords.extend_from_slice(&scratch);
                    distance.push(dist + 1);
                    queue.push_back(w);
                }
            }
        }

        let n = distance.len();
        let mut neighbors = Vec::with_capacity(n * degree);
        for v in 0..n {
            for axis in 0..dim {
                for step in [1, -1] {
                    scratch.copy_from_slice(&coords[v * dim..(v + 1) * dim]);
                    scratch[axis] += step;
                    let l1: i64 = scratch.iter().map(|&x| i64::from(x).abs()).sum();
                    let target = if l1 < r {
                        index[&key(&scratch)]
                    } else {
                        n
                    };
                    neighbors.push(target);
                }
            }
        }

        Ok(FiniteRegion {
            family: Family::Lattice,
            dim,
            degree,
            radius,
            neighbors,
            distance,
            coords,
        })
    }

    /// Ball of radius `radius` around the root of the infinite `degree`-regular
    /// tree. Neighbors are listed parent first, then children in creation
    /// order; the root lists its `degree` children.
    pub fn tree_ball(degree: usize, radius: usize) -> Result<Self> {
        if degree < 3 {
            return Err(ArwError::domain("tree degree must be at least 3"));
        }
        if radius == 0 {
            return Err(ArwError::domain("ball radius must be at least 1"));
        }
        let too_large = || ArwError::domain("tree ball too large to index");
        let mut n: usize = 1;
        let mut layer: usize = 1;
        for depth in 1..radius {
            let branching = if depth == 1 { degree } else { degree - 1 };
            layer = layer.checked_mul(branching).ok_or_else(too_large)?;
            n = n.checked_add(layer).ok_or_else(too_large)?;
        }

        let mut distance = Vec::with_capacity(n);
        let mut neighbors = vec![n; n * degree];
        distance.push(0u32);
        let mut next = 1usize;
        for v in 0..n {
            let depth = distance[v];
            if depth + 1 >= radius as u32 {
                continue;
            }
            let first_child_slot = if v == 0 { 0 } else { 1 };
            for slot in first_child_slot..degree {
                let child = next;
                next += 1;
                distance.push(depth + 1);
                neighbors[v * degree + slot] = child;
                neighbors[child * degree] = v;
            }
        }
        debug_assert_eq!(next, n);

        Ok(FiniteRegion {
            family: Family::Tree,
            dim: degree,
            degree,
            radius,
            neighbors,
            distance,
            coords: Vec::new(),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Lattice dimension or tree degree, as passed to the constructor.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of neighbors of every interior vertex.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of interior vertices.
    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub fn sink(&self) -> Vertex {
        self.len()
    }

    pub fn origin(&self) -> Vertex {
        0
    }

    pub fn is_interior(&self, v: Vertex) -> bool {
        v < self.len()
    }

    /// Ordered neighbors of an interior vertex; exterior targets are the sink.
    ///
    /// Panics when `v` is not interior.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        assert!(v < self.len(), "neighbors of non-interior vertex {v}");
        &self.neighbors[v * self.degree..(v + 1) * self.degree]
    }

    #[inline]
    pub fn neighbor(&self, v: Vertex, i: usize) -> Vertex {
        self.neighbors[v * self.degree + i]
    }

    /// Graph distance from the origin.
    pub fn distance(&self, v: Vertex) -> usize {
        self.distance[v] as usize
    }

    /// Lattice coordinates of `v` (`None` for trees).
    pub fn coords(&self, v: Vertex) -> Option<&[i32]> {
        match self.family {
            Family::Lattice => Some(&self.coords[v * self.dim..(v + 1) * self.dim]),
            Family::Tree => None,
        }
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    /// `{ v interior : r1 <= d(0, v) < r2 }`, in index order.
    pub fn ring(&self, r1: f64, r2: f64) -> Vec<Vertex> {
        self.vertices()
            .filter(|&v| {
                let d = f64::from(self.distance[v]);
                r1 <= d && d < r2
            })
            .collect()
    }
}
