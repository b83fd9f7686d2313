//! Parameter records, the excitation-number parity algebra and closed-form
//! scalars shared by the rest of the crate.
//!
//! Spin quantum numbers are carried as twice their value (`two_j`, `two_m`)
//! so that parity classification is exact integer arithmetic.

use crate::math::sqrt;
use crate::{DickeError, Result};

/// Physical inputs in units of the field frequency (ω_F = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega_a: f64,
    gamma: f64,
    n_atoms: u32,
}

impl ModelParams {
    pub fn new(omega_a: f64, gamma: f64, n_atoms: u32) -> Result<Self> {
        if !(omega_a > 0.0) || !omega_a.is_finite() {
            return Err(DickeError::InvalidParameter {
                name: "omega_a",
                value: omega_a,
                reason: "must be finite and positive",
            });
        }
        if !gamma.is_finite() {
            return Err(DickeError::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite",
            });
        }
        if n_atoms == 0 {
            return Err(DickeError::InvalidParameter {
                name: "n_atoms",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            omega_a,
            gamma,
            n_atoms,
        })
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    /// `N` as a float.
    pub fn n(&self) -> f64 {
        self.n_atoms as f64
    }

    /// Twice the collective spin, `2j = N`.
    pub fn two_j(&self) -> u32 {
        self.n_atoms
    }

    pub fn j(&self) -> f64 {
        0.5 * self.n_atoms as f64
    }

    /// Same system at a different coupling.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.omega_a, gamma, self.n_atoms)
    }

    pub fn gamma_c(&self) -> f64 {
        0.5 * sqrt(self.omega_a)
    }

    /// `x = |γ| / γ_c`.
    pub fn x(&self) -> f64 {
        self.gamma.abs() / self.gamma_c()
    }
}

/// A Fock ⊗ Dicke basis state `|ν⟩ ⊗ |j, m⟩`, with `m` stored as `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub nu: u32,
    pub two_m: i32,
}

impl BasisLabel {
    pub fn new(nu: u32, two_m: i32) -> Self {
        Self { nu, two_m }
    }

    pub fn m(&self) -> f64 {
        0.5 * self.two_m as f64
    }

    /// Number of excited atoms, `m + j`.
    pub fn atomic_excitations(&self, two_j: u32) -> u32 {
        ((self.two_m + two_j as i32) / 2) as u32
    }

    pub fn validate(&self, two_j: u32) -> Result<()> {
        let tj = two_j as i32;
        if self.two_m.abs() > tj || (self.two_m + tj) % 2 != 0 {
            return Err(DickeError::SpinProjection {
                two_m: self.two_m,
                two_j,
            });
        }
        Ok(())
    }
}

/// Eigenvalue sector of the parity operator `exp(iπΛ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_excitations(lambda: u64) -> Self {
        if lambda.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Eigenvalue of `exp(iπΛ)`: +1 or −1.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// C₂ group label χ ∈ {0, π}.
    pub fn chi(self) -> f64 {
        match self {
            Parity::Even => 0.0,
            Parity::Odd => core::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Excitation number `λ = ν + m + j` of a basis state.
pub fn lambda_eigenvalue(label: BasisLabel, two_j: u32) -> Result<u64> {
    label.validate(two_j)?;
    Ok(label.nu as u64 + label.atomic_excitations(two_j) as u64)
}

pub fn parity_of(label: BasisLabel, two_j: u32) -> Result<Parity> {
    lambda_eigenvalue(label, two_j).map(Parity::of_excitations)
}

/// Coherent-state critical coupling `γ_c = √ω_A / 2`.
pub fn gamma_critical(omega_a: f64) -> Result<f64> {
    if !(omega_a > 0.0) || !omega_a.is_finite() {
        return Err(DickeError::InvalidParameter {
            name: "omega_a",
            value: omega_a,
            reason: "must be finite and positive",
        });
    }
    Ok(0.5 * sqrt(omega_a))
}

pub fn coupling_ratio(gamma: f64, gamma_c: f64) -> Result<f64> {
    if !(gamma_c > 0.0) {
        return Err(DickeError::InvalidParameter {
            name: "gamma_c",
            value: gamma_c,
            reason: "must be positive",
        });
    }
    Ok(gamma / gamma_c)
}
