//! Two-atom, two-mode Jaynes–Cummings model in the rotating-wave approximation.
//!
//! Each atom `j ∈ {A, B}` couples only to its own cavity mode, so the
//! Hamiltonian is `H = H_A + H_B` with
//!
//! ```text
//! H_j = ω_j (N_j + 1/2) + (E_j / 2) σ_zj + κ_j (a_j† σ_-j + a_j σ_+j)
//! ```
//!
//! in units where ħ = 1. The crate provides
//!
//! - [`model`]: parameters, the composite Fock/atomic basis and elementary operators,
//! - [`analytic`]: closed-form dressed states and evolution inside the
//!   one-excitation space spanned by `|Φ1..Φ4⟩`,
//! - [`oracle`]: brute-force diagonalization of the truncated Hamiltonian,
//! - [`entanglement`]: partial traces, concurrence, entropy and timing extraction,
//! - [`lindblad`]: RK4 integration of the cavity-loss master equation,
//! - [`verify`]: analytic-vs-oracle checks shared by the CLI and the test suites.

pub mod analytic;
pub mod entanglement;
mod error;
pub mod lindblad;
pub mod model;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
