//! Exact time evolution of occupation densities in fermionic mode systems.
//!
//! The pipeline: build Jordan–Wigner matrices for the modes, assemble a
//! Hamiltonian from a text expression, diagonalize it once, and read off
//! `n_j(t) = ‖a_j e^{-iHt} φ_in‖²` for any time. An independent RK4 integrator
//! of the Heisenberg equation and a catalog of closed-form solutions serve as
//! cross-checks.
//!
//! ```
//! use fermidyn_core::dynamics::uniform_grid;
//! use fermidyn_core::{parse, simulate, FermionicSystem, FockState, SimulationPlan};
//!
//! # fn main() -> fermidyn_core::Result<()> {
//! let plan = SimulationPlan::new(
//!     FermionicSystem::new(2)?,
//!     parse("lambda*(c(2)*c'(1) + c(1)*c'(2))")?.with_parameter("lambda", 1.0),
//!     FockState::from_occupations(&[1, 0])?,
//!     uniform_grid(10.0, 101)?,
//! )?;
//! let table = simulate(&plan)?;
//! for (t, n1) in table.times.iter().zip(&table.densities[0]) {
//!     assert!((n1 - t.cos().powi(2)).abs() < 1e-12);
//! }
//! # Ok(())
//! # }
//! ```

pub mod dynamics;
pub mod error;
pub mod fermion;
pub mod hamiltonian;
pub mod oracle;
pub mod spectral;
pub mod tensor;

pub use dynamics::{simulate, Dynamics, SimulationPlan, TrajectoryTable};
pub use error::{Error, Result};
pub use fermion::{build_operators, verify_car, FermionicSystem, ModeOperatorSet};
pub use hamiltonian::{check_hermitian, parse, OperatorExpression};
pub use oracle::{
    crosscheck, integrate_heisenberg, ClosedFormCase, ClosedFormModel, CrosscheckReport,
};
pub use spectral::{eigendecompose, evolved_annihilator, propagator, SpectralDecomposition};
pub use tensor::{ComplexMatrix, FockState};
