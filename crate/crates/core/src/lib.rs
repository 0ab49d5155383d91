//! Continuous-time quantum error correction of the three-qubit bit-flip code
//! by a detect/correct Hamiltonian plus ancilla cooling.
//!
//! * [`operator`]: dense qubit operators, states and density matrices.
//! * [`lindblad`]: master-equation generator, RK4 integrator and the exact
//!   superoperator oracle.
//! * [`bitflip`]: the code, its Hamiltonians and the fidelity functional.
//! * [`experiments`]: parameter sweeps and fidelity curves.
//! * [`zeno`]: discrete detect/correct/reset cycles with an explicit
//!   environment.
//! * [`config`], [`csv_io`], [`cli`], [`verify`]: the command-line harness.

pub mod bitflip;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiments;
pub mod lindblad;
pub mod operator;
pub mod verify;
pub mod zeno;

pub use error::{Error, Result};
