//! Adiabatic factoring: compile `N = p * q` into a penalty Hamiltonian over
//! binary variables and simulate the discretized adiabatic sweep that finds
//! its ground state.

pub mod compiler;
pub mod engine;
pub mod error;
pub mod export;
pub mod hamiltonian;
pub mod orchestrator;
pub mod poly;

pub use error::{Error, Result};
