//! Time evolution of atomic excitation with and without the rotating-wave
//! approximation.
//!
//! Times are measured in units of `1/Ω` with `Ω = γ/N^{3/2}`, the vacuum
//! Rabi coupling between `|0, m⟩` and `|1, m − 1⟩` in the intensive
//! Hamiltonian.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::DEFAULT_DENSE_CEILING;
use crate::hilbert::{assemble, Basis, Coupling, HilbertSpec, SparseSymmetricMatrix};
use crate::linalg::symmetric_eigen;
use crate::math::{cos, sin, sqrt};
use crate::model::{lambda_eigenvalue, BasisLabel, ModelParams, Parity};
use crate::{DickeError, Result};

/// Largest probability allowed in the top decile of Fock levels.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    /// Initial amplitudes; normalized before use.
    pub initial: Vec<(BasisLabel, f64)>,
    /// Time span in units of `1/Ω`.
    pub duration: f64,
    pub samples: usize,
    pub rwa: bool,
    pub nu_max: u32,
}

impl EvolutionSpec {
    /// All atoms excited, field in the vacuum.
    pub fn excited_vacuum(n_atoms: u32, duration: f64, samples: usize, rwa: bool) -> Self {
        Self {
            initial: vec![(BasisLabel::new(0, n_atoms as i32), 1.0)],
            duration,
            samples,
            rwa,
            nu_max: 60,
        }
    }

    fn validate(&self, two_j: u32) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(DickeError::InvalidParameter {
                name: "duration",
                value: self.duration,
                reason: "must be finite and positive",
            });
        }
        if self.samples < 2 {
            return Err(DickeError::InvalidParameter {
                name: "samples",
                value: self.samples as f64,
                reason: "must be at least 2",
            });
        }
        if self.initial.is_empty() {
            return Err(DickeError::Domain("initial state is empty"));
        }
        for (l, _) in &self.initial {
            l.validate(two_j)?;
            if l.nu > self.nu_max {
                return Err(DickeError::Domain("initial state exceeds the Fock cutoff"));
            }
        }
        Ok(())
    }
}

/// `Ω = γ/N^{3/2}`; 1 when the coupling vanishes.
pub fn rabi_frequency(params: &ModelParams) -> f64 {
    let n = params.n();
    let w = params.gamma().abs() / (n * sqrt(n));
    if w > 0.0 {
        w
    } else {
        1.0
    }
}

/// Coupling that puts the atomic splitting `ω_A/N` at `ratio × Ω`.
pub fn gamma_for_rabi_ratio(omega_a: f64, n_atoms: u32, ratio: f64) -> Result<f64> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(DickeError::InvalidParameter {
            name: "ratio",
            value: ratio,
            reason: "must be finite and positive",
        });
    }
    Ok(omega_a * sqrt(n_atoms as f64) / ratio)
}

/// Hamiltonian keeping only `a†J₋ + aJ₊`.
pub fn build_hamiltonian_rwa(params: &ModelParams, spec: &HilbertSpec) -> Result<SparseSymmetricMatrix> {
    assemble(params, &Basis::new(*spec), Coupling::RotatingWave)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// Sample times in units of `1/Ω`.
    pub times: Vec<f64>,
    /// Excited fraction `⟨J_z + j⟩/N`.
    pub p_excited: Vec<f64>,
    pub excitation_mean: Vec<f64>,
    pub max_norm_error: f64,
    pub max_energy_drift: f64,
    pub max_leakage: f64,
    pub omega_rabi: f64,
}

/// Propagates the initial state by diagonalizing the Hamiltonian once.
///
/// If every initial component shares one parity, only that block is built;
/// the evolved state can never leave it.
pub fn evolve(params: &ModelParams, spec: &EvolutionSpec) -> Result<Evolution> {
    let two_j = params.two_j();
    spec.validate(two_j)?;
    let mut parities = spec
        .initial
        .iter()
        .map(|(l, _)| lambda_eigenvalue(*l, two_j).map(Parity::of_excitations));
    let first = parities.next().transpose()?;
    let mut sector = first;
    for p in parities {
        if p? != first.unwrap() {
            sector = None;
        }
    }
    let basis = Basis::new(HilbertSpec::for_params(params, spec.nu_max, sector));
    let coupling = if spec.rwa {
        Coupling::RotatingWave
    } else {
        Coupling::Full
    };
    let h = assemble(params, &basis, coupling)?;
    let dim = h.dim();
    if dim > DEFAULT_DENSE_CEILING {
        return Err(DickeError::DenseCeiling {
            dim,
            ceiling: DEFAULT_DENSE_CEILING,
        });
    }

    let mut psi0 = vec![0.0; dim];
    for (l, a) in &spec.initial {
        let i = basis
            .index_of(*l)
            .ok_or(DickeError::Domain("initial label outside the basis"))?;
        psi0[i] += a;
    }
    let norm0 = sqrt(psi0.iter().map(|x| x * x).sum());
    if !(norm0 > 0.0) {
        return Err(DickeError::Domain("initial state has zero norm"));
    }
    psi0.iter_mut().for_each(|x| *x /= norm0);

    let eig = symmetric_eigen(&h.to_dense(), dim)?;
    let coeffs: Vec<f64> = (0..dim)
        .map(|k| (0..dim).map(|r| eig.vectors[r * dim + k] * psi0[r]).sum())
        .collect();
    let e0 = h.quadratic_form(&psi0);

    let omega = rabi_frequency(params);
    let n = params.n();
    let excited: Vec<f64> = basis
        .labels()
        .iter()
        .map(|l| l.atomic_excitations(two_j) as f64)
        .collect();
    let levels = spec.nu_max as usize + 1;
    let top_from = (levels - levels.div_ceil(10)) as u32;

    let mut out = Evolution {
        times: Vec::with_capacity(spec.samples),
        p_excited: Vec::with_capacity(spec.samples),
        excitation_mean: Vec::with_capacity(spec.samples),
        max_norm_error: 0.0,
        max_energy_drift: 0.0,
        max_leakage: 0.0,
        omega_rabi: omega,
    };
    let mut re = vec![0.0; dim];
    let mut im = vec![0.0; dim];
    for s in 0..spec.samples {
        let tau = spec.duration * s as f64 / (spec.samples - 1) as f64;
        let t = tau / omega;
        re.iter_mut().for_each(|x| *x = 0.0);
        im.iter_mut().for_each(|x| *x = 0.0);
        for k in 0..dim {
            let c = coeffs[k];
            if c == 0.0 {
                continue;
            }
            let (cr, ci) = (c * cos(eig.values[k] * t), -c * sin(eig.values[k] * t));
            for r in 0..dim {
                let v = eig.vectors[r * dim + k];
                re[r] += cr * v;
                im[r] += ci * v;
            }
        }
        let mut norm = 0.0;
        let mut pe = 0.0;
        let mut lam = 0.0;
        let mut leak = 0.0;
        for (i, l) in basis.labels().iter().enumerate() {
            let w = re[i] * re[i] + im[i] * im[i];
            norm += w;
            pe += excited[i] * w;
            lam += (l.nu as f64 + excited[i]) * w;
            if l.nu >= top_from {
                leak += w;
            }
        }
        let energy = h.quadratic_form(&re) + h.quadratic_form(&im);
        out.max_norm_error = out.max_norm_error.max((norm - 1.0).abs());
        out.max_energy_drift = out.max_energy_drift.max((energy - e0).abs());
        out.max_leakage = out.max_leakage.max(leak);
        if leak > LEAKAGE_LIMIT {
            return Err(DickeError::TruncationTooSmall {
                nu_max: spec.nu_max,
                tail_weight: leak,
                limit: LEAKAGE_LIMIT,
            });
        }
        out.times.push(tau);
        out.p_excited.push(pe / (n * norm));
        out.excitation_mean.push(lam / norm);
    }
    Ok(out)
}

/// Largest gap between the full and rotating-wave excited fractions over
/// the sample times of `spec`.
pub fn max_rwa_gap(params: &ModelParams, spec: &EvolutionSpec) -> Result<f64> {
    let full = evolve(
        params,
        &EvolutionSpec {
            rwa: false,
            ..spec.clone()
        },
    )?;
    let rwa = evolve(
        params,
        &EvolutionSpec {
            rwa: true,
            ..spec.clone()
        },
    )?;
    Ok(full
        .p_excited
        .iter()
        .zip(&rwa.p_excited)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Full-versus-RWA gaps for two parameter sets sharing one spec.
pub fn rwa_deviation(small: &ModelParams, large: &ModelParams, spec: &EvolutionSpec) -> Result<(f64, f64)> {
    Ok((max_rwa_gap(small, spec)?, max_rwa_gap(large, spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_hamiltonian;

    #[test]
    fn rwa_single_excitation_block() {
        let p = ModelParams::new(1.0, 0.7, 1).unwrap();
        let spec = HilbertSpec::for_params(&p, 4, None);
        let basis = Basis::new(spec);
        let h = build_hamiltonian_rwa(&p, &spec).unwrap();
        let a = basis.index_of(BasisLabel::new(1, -1)).unwrap();
        let b = basis.index_of(BasisLabel::new(0, 1)).unwrap();
        assert!((h.get(a, b) - 0.7).abs() < 1e-15);
        // Nothing else couples into the λ = 1 pair.
        for &(r, c, v) in h.entries() {
            if r != c && (r == a || r == b || c == a || c == b) {
                assert!((r, c) == (a.min(b), a.max(b)), "{r} {c} {v}");
            }
        }
    }

    #[test]
    fn zero_coupling_matches_full_build() {
        let p = ModelParams::new(1.2, 0.0, 3).unwrap();
        let spec = HilbertSpec::for_params(&p, 6, None);
        assert_eq!(
            build_hamiltonian_rwa(&p, &spec).unwrap().entries(),
            build_hamiltonian(&p, &spec).unwrap().entries()
        );
    }

    #[test]
    fn rwa_conserves_excitations() {
        let p = ModelParams::new(0.8, 0.9, 4).unwrap();
        let spec = HilbertSpec::for_params(&p, 10, None);
        let basis = Basis::new(spec);
        let h = build_hamiltonian_rwa(&p, &spec).unwrap();
        let c = crate::hilbert::commutator_with_diagonal(&h, |i| {
            let l = basis.labels()[i];
            (l.nu + l.atomic_excitations(4)) as f64
        });
        assert_eq!(c, 0.0);
    }

    #[test]
    fn starts_excited() {
        let p = ModelParams::new(1.0, 1.0, 1).unwrap();
        let ev = evolve(&p, &EvolutionSpec::excited_vacuum(1, 5.0, 11, false)).unwrap();
        assert!((ev.p_excited[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resonant_vacuum_rabi() {
        let p = ModelParams::new(1.0, 0.25, 1).unwrap();
        let ev = evolve(&p, &EvolutionSpec::excited_vacuum(1, core::f64::consts::PI, 201, true)).unwrap();
        for (t, pe) in ev.times.iter().zip(&ev.p_excited) {
            let c = cos(*t);
            assert!((pe - c * c).abs() < 1e-12);
        }
        assert!(ev.max_norm_error < 1e-12);
        assert!(ev.excitation_mean.iter().all(|l| (l - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_coupling_no_deviation() {
        let p = ModelParams::new(1.0, 0.0, 1).unwrap();
        let spec = EvolutionSpec::excited_vacuum(1, 10.0, 50, false);
        let (a, b) = rwa_deviation(&p, &p, &spec).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn leakage_guard() {
        let p = ModelParams::new(1.0, 3.0, 1).unwrap();
        let mut spec = EvolutionSpec::excited_vacuum(1, 10.0, 50, false);
        spec.nu_max = 4;
        assert!(matches!(evolve(&p, &spec), Err(DickeError::TruncationTooSmall { .. })));
    }

    #[test]
    fn spec_validation() {
        let p = ModelParams::new(1.0, 1.0, 1).unwrap();
        assert!(evolve(&p, &EvolutionSpec::excited_vacuum(1, 0.0, 5, false)).is_err());
        assert!(evolve(&p, &EvolutionSpec::excited_vacuum(1, 1.0, 1, false)).is_err());
        assert!(evolve(&p, &EvolutionSpec::excited_vacuum(3, 1.0, 5, false)).is_err());
    }

    #[test]
    fn ratio_helper() {
        assert_eq!(gamma_for_rabi_ratio(1.0, 1, 1.0).unwrap(), 1.0);
        assert!((gamma_for_rabi_ratio(1.0, 1, 19.0).unwrap() - 1.0 / 19.0).abs() < 1e-16);
    }
}
