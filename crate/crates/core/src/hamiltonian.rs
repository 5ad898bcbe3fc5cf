//! Diagonal cut and cost operators, and the transverse-field mixer.
//!
//! The Max-Cut operator `(1/2) sum_(i,j) (1 - Z_i Z_j)` is diagonal in the
//! computational basis with entry equal to the cut value of the basis string.
//! FALQON drives its cost *down*, so the operator it evolves under is the
//! negated cut table: its ground states are exactly the maximum cuts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_EXACT_VERTICES};
use crate::scalar::Scalar;

/// Cut value of every basis state, indexed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutDiagonal {
    n: usize,
    values: Vec<u32>,
}

impl CutDiagonal {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn max(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

/// The minimized cost table, `-cut` for every basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDiagonal<T> {
    cut: CutDiagonal,
    values: Vec<T>,
}

impl<T: Scalar> CostDiagonal<T> {
    pub fn from_cut(cut: CutDiagonal) -> Self {
        let values = cut
            .values
            .iter()
            .map(|&c| -T::from_f64_lossy(c as f64))
            .collect();
        CostDiagonal { cut, values }
    }

    pub fn n(&self) -> usize {
        self.cut.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The cut table this cost was derived from.
    pub fn cut(&self) -> &CutDiagonal {
        &self.cut
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Cut value of every basis index.
///
/// Filled in order of increasing index: setting the top bit `h` of an index
/// flips vertex `h` from side 0 to side 1, and every neighbour above `h` is on
/// side 0, so the cut changes by `deg(h) - 2 * |N(h) ∩ rest|`.
pub fn build_cut_diagonal(g: &Graph) -> Result<CutDiagonal> {
    let n = g.n();
    if n > MAX_EXACT_VERTICES {
        return Err(Error::TooLarge {
            what: "cut diagonal",
            n,
            max: MAX_EXACT_VERTICES,
        });
    }
    let adj = g.adjacency_masks();
    let mut values = vec![0u32; 1 << n];
    for (h, &mask) in adj.iter().enumerate() {
        let deg = mask.count_ones() as i64;
        let top = 1usize << h;
        for rest in 0..top {
            let shared = (mask & rest as u64).count_ones() as i64;
            values[top | rest] = (values[rest] as i64 + deg - 2 * shared) as u32;
        }
    }
    Ok(CutDiagonal { n, values })
}

pub fn build_cost_diagonal<T: Scalar>(g: &Graph) -> Result<CostDiagonal<T>> {
    build_cut_diagonal(g).map(CostDiagonal::from_cut)
}

/// Driver Hamiltonian choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mixer {
    /// `H_M = sum_i X_i`.
    #[default]
    TransverseField,
}

/// A single-qubit Pauli-X term with unit coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliX {
    pub qubit: usize,
}

/// Terms of the transverse-field mixer on `n` qubits.
pub fn mixer_pauli_terms(n: usize) -> Result<Vec<PauliX>> {
    if n == 0 {
        return Err(Error::InvalidVertexCount {
            n,
            reason: "the mixer needs at least one qubit",
        });
    }
    Ok((0..n).map(|qubit| PauliX { qubit }).collect())
}
