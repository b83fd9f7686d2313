//! Numerical laboratory for the finite-N Dicke model.
//!
//! The crate treats N two-level atoms coupled to one cavity mode through the
//! intensive Hamiltonian
//!
//! ```text
//! H = a†a / N + (ω_A / N) J_z + γ / (N √N) (a† + a)(J₊ + J₋)
//! ```
//!
//! with the field frequency fixed to one. Three routes to the finite-N
//! transition are provided:
//!
//! * exact diagonalization of parity blocks ([`hilbert`], [`eigen`]) with
//!   fidelity-susceptibility detection ([`criticality`]),
//! * coherent-state energy surfaces with closed-form critical points
//!   ([`coherent`]),
//! * parity-projected (symmetry-adapted) energy surfaces minimized
//!   numerically ([`sas`]).
//!
//! [`dynamics`] propagates an excited atom with and without the rotating-wave
//! approximation.
//!
//! Energies are per particle everywhere unless a name says `extensive`.
//!
//! The crate is `no_std` and only needs `alloc`; elementary functions come
//! from `libm` so results do not depend on the platform's C math library.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coherent;
pub mod criticality;
pub mod dynamics;
pub mod eigen;
mod error;
pub mod hilbert;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod optimize;
pub mod sas;
pub mod stats;

pub use error::DickeError;
pub use model::{BasisLabel, ModelParams, Parity};

pub type Result<T, E = DickeError> = core::result::Result<T, E>;
