//! Exact state-vector FALQON (feedback-based quantum optimization) for Max-Cut,
//! together with a harness for replaying feedback schedules learned on small
//! donor graphs onto larger recipient graphs.
//!
//! The numerical kernels ([`simulator`], [`hamiltonian`], [`falqon`]) are generic
//! over a floating-point [`Scalar`]; the experiment layers ([`transfer`],
//! [`experiment`]) run in `f64`. Concrete aliases for the common case live at the
//! crate root.
//!
//! Basis-state convention: qubit `i` is bit `i` of the basis index (qubit 0 is
//! the least-significant bit), and vertex `i` of a graph maps to qubit `i`.

pub mod error;
pub mod experiment;
pub mod falqon;
pub mod graph;
pub mod hamiltonian;
pub mod rng;
pub mod scalar;
pub mod simulator;
pub mod transfer;

pub use error::{Error, Result};
pub use falqon::{replay_schedule, run_falqon, FalqonConfig, FalqonTrace};
pub use graph::{
    cut_value, gen_erdos_renyi, gen_three_regular, max_cut_brute_force, Assignment, Family, Graph,
    MaxCutSolution,
};
pub use hamiltonian::{
    build_cost_diagonal, build_cut_diagonal, mixer_pauli_terms, CostDiagonal, CutDiagonal,
};
pub use scalar::Scalar;
pub use simulator::StateVector;
pub use transfer::{aggregate_by_donor_size, run_transfer, TransferResult, TransferSpec};

/// Double-precision state vector.
pub type State = StateVector<f64>;
/// Double-precision cost table.
pub type Cost = CostDiagonal<f64>;
/// Double-precision FALQON configuration.
pub type Config = FalqonConfig<f64>;
/// Double-precision FALQON trace.
pub type Trace = FalqonTrace<f64>;

/// Single-precision state vector.
pub type State32 = StateVector<f32>;
/// Single-precision FALQON trace.
pub type Trace32 = FalqonTrace<f32>;
