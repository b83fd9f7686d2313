//! Coherent-state variational analysis.
//!
//! The trial state is a field coherent state `|α⟩` times an atomic SU(2)
//! coherent state `|ζ⟩`, parameterized by `α = (q + ip)/√2` and
//! `ζ = tan(θ/2) e^{iφ}`. All energies are per particle; extensive values
//! are `N ×` the per-particle ones.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::hilbert::{assemble, Basis, Coupling, HilbertSpec};
use crate::math::{acos, atan2, cos, exp, hypot, lgamma, ln, ln1p, sin, sqrt, tan};
use crate::model::{ModelParams, Parity};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::{DickeError, Result};

/// A point of the classical phase space `(q, p)` × Bloch sphere `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64, theta: f64, phi: f64) -> Self {
        Self { q, p, theta, phi }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.q, self.p) / sqrt(2.0)
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(tan(0.5 * self.theta), self.phi)
    }

    /// Inverse of [`alpha`](Self::alpha) and [`zeta`](Self::zeta), with
    /// `θ ∈ [0, π)` and `φ ∈ (−π, π]`.
    pub fn from_alpha_zeta(alpha: Complex64, zeta: Complex64) -> Self {
        Self {
            q: sqrt(2.0) * alpha.re,
            p: sqrt(2.0) * alpha.im,
            theta: 2.0 * atan2(hypot(zeta.re, zeta.im), 1.0),
            phi: atan2(zeta.im, zeta.re),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Normal,
    SuperRadiant,
}

/// The two degenerate super-radiant minima, `φ_c = 0` and `φ_c = π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiBranch {
    Zero,
    Pi,
}

impl PhiBranch {
    pub fn angle(self) -> f64 {
        match self {
            PhiBranch::Zero => 0.0,
            PhiBranch::Pi => core::f64::consts::PI,
        }
    }

    pub fn cos(self) -> f64 {
        match self {
            PhiBranch::Zero => 1.0,
            PhiBranch::Pi => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub branch: Branch,
    pub q_c: f64,
    pub p_c: f64,
    pub theta_c: f64,
    pub phi_c: f64,
    pub energy_per_particle: f64,
}

impl CriticalPoint {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.q_c, self.p_c, self.theta_c, self.phi_c)
    }
}

/// Global minimum of the CS surface, reported for both `φ_c` choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints {
    pub phi_zero: CriticalPoint,
    pub phi_pi: CriticalPoint,
}

impl CriticalPoints {
    pub fn get(&self, branch: PhiBranch) -> CriticalPoint {
        match branch {
            PhiBranch::Zero => self.phi_zero,
            PhiBranch::Pi => self.phi_pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsObservables {
    pub lambda_mean: f64,
    pub lambda_fluct: f64,
    pub energy_extensive: f64,
}

/// Per-particle CS energy,
/// `(p² + q²)/(2N) − (ω_A/2) cos θ + (γ/√j) q sin θ cos φ`.
pub fn cs_energy_surface(params: &ModelParams, point: &PhasePoint) -> f64 {
    let PhasePoint { q, p, theta, phi } = *point;
    (p * p + q * q) / (2.0 * params.n()) - 0.5 * params.omega_a() * cos(theta)
        + params.gamma() / sqrt(params.j()) * q * sin(theta) * cos(phi)
}

pub fn cs_critical_points(params: &ModelParams) -> CriticalPoints {
    let at = |b: PhiBranch| critical_point(params, b);
    CriticalPoints {
        phi_zero: at(PhiBranch::Zero),
        phi_pi: at(PhiBranch::Pi),
    }
}

fn critical_point(params: &ModelParams, phi: PhiBranch) -> CriticalPoint {
    let x = params.x();
    if x <= 1.0 {
        return CriticalPoint {
            branch: Branch::Normal,
            q_c: 0.0,
            p_c: 0.0,
            theta_c: 0.0,
            phi_c: phi.angle(),
            energy_per_particle: -0.5 * params.omega_a(),
        };
    }
    let inv2 = 1.0 / (x * x);
    let sin_t = sqrt(1.0 - inv2 * inv2);
    CriticalPoint {
        branch: Branch::SuperRadiant,
        q_c: -2.0 * sqrt(params.j()) * params.gamma() * sin_t * phi.cos(),
        p_c: 0.0,
        theta_c: acos(inv2),
        phi_c: phi.angle(),
        energy_per_particle: cs_minimum_energy_per_particle(params),
    }
}

/// `q/√N` along the super-radiant branch as a function of `θ`; the relation
/// does not involve `γ` or `N`.
pub fn universal_curve(theta: f64, omega_a: f64, phi: f64) -> Result<f64> {
    let c = cos(theta);
    if !(theta >= 0.0) || !(c > 0.0) || theta >= core::f64::consts::FRAC_PI_2 {
        return Err(DickeError::Domain("universal curve requires 0 ≤ θ < π/2"));
    }
    if !(omega_a > 0.0) {
        return Err(DickeError::InvalidParameter {
            name: "omega_a",
            value: omega_a,
            reason: "must be finite and positive",
        });
    }
    Ok(-sqrt(omega_a) * sin(theta) / sqrt(2.0 * c) * cos(phi))
}

pub fn cs_minimum_energy_per_particle(params: &ModelParams) -> f64 {
    cs_branch_values(params, active_branch(params)).energy_extensive / params.n()
}

/// Extensive minimum energy, `N ×` the per-particle value.
pub fn cs_minimum_energy(params: &ModelParams) -> f64 {
    cs_branch_values(params, active_branch(params)).energy_extensive
}

fn active_branch(params: &ModelParams) -> Branch {
    if params.x() <= 1.0 {
        Branch::Normal
    } else {
        Branch::SuperRadiant
    }
}

/// Closed-form `⟨Λ⟩`, `ΔΛ` and extensive energy of one branch, regardless
/// of which branch is the minimum. The super-radiant expressions need
/// `x ≥ 1` and give NaN below it.
pub fn cs_branch_values(params: &ModelParams, branch: Branch) -> CsObservables {
    let gc2 = params.gamma_c() * params.gamma_c();
    let n = params.n();
    match branch {
        Branch::Normal => CsObservables {
            lambda_mean: 0.0,
            lambda_fluct: 0.0,
            energy_extensive: -2.0 * n * gc2,
        },
        Branch::SuperRadiant => {
            let x = params.x();
            let half_n = 0.5 * n;
            let inv2 = 1.0 / (x * x);
            let s = 1.0 - inv2 * inv2;
            CsObservables {
                lambda_mean: half_n * (1.0 - inv2 + 2.0 * gc2 * x * x * s),
                lambda_fluct: sqrt(half_n * (0.5 + 2.0 * gc2 * x * x) * s),
                energy_extensive: -n * gc2 * (x * x + inv2),
            }
        }
    }
}

/// `(⟨Λ⟩, ΔΛ)` at the CS minimum.
pub fn cs_lambda_and_fluctuation(params: &ModelParams) -> (f64, f64) {
    let o = cs_observables(params);
    (o.lambda_mean, o.lambda_fluct)
}

pub fn cs_observables(params: &ModelParams) -> CsObservables {
    cs_branch_values(params, active_branch(params))
}

/// Minimizes the CS surface over all four coordinates with a simplex search
/// from a few fixed starts. Independent of the closed-form critical points.
pub fn cs_numeric_minimum(params: &ModelParams) -> (PhasePoint, f64) {
    let f = |x: &[f64]| cs_energy_surface(params, &PhasePoint::new(x[0], x[1], x[2], x[3]));
    let sn = sqrt(params.n());
    let starts = [[0.3, 0.1, 0.4, 0.2], [-sn, 0.2, 1.0, 0.1], [sn, -0.1, 1.2, 3.0]];
    let opts = NelderMeadOptions {
        f_tol: 1e-15,
        x_tol: 1e-11,
        max_evals: 60_000,
        restarts: 4,
    };
    let mut best: Option<(PhasePoint, f64)> = None;
    for x0 in starts {
        let steps = [0.5 * sn.max(1.0), 0.5, 0.3, 0.5];
        let m = nelder_mead(f, &x0, &steps, &opts);
        let pt = canonical_angles(PhasePoint::new(m.x[0], m.x[1], m.x[2], m.x[3]));
        if best.is_none_or(|b| m.value < b.1) {
            best = Some((pt, m.value));
        }
    }
    best.expect("at least one start")
}

// Same Bloch vector with θ ∈ [0, π] and φ ∈ (−π, π].
fn canonical_angles(mut pt: PhasePoint) -> PhasePoint {
    use core::f64::consts::PI;
    pt.theta %= 2.0 * PI;
    if pt.theta < 0.0 {
        pt.theta += 2.0 * PI;
    }
    if pt.theta > PI {
        pt.theta = 2.0 * PI - pt.theta;
        pt.phi += PI;
    }
    pt.phi = atan2(sin(pt.phi), cos(pt.phi));
    pt
}

/// Operators the brute-force oracle can contract against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// The intensive Hamiltonian, i.e. the per-particle energy.
    Hamiltonian,
    /// `Λ = a†a + J_z + j`.
    Excitation,
    ExcitationSquared,
    PhotonNumber,
    Jz,
}

/// Largest photon-number tail (relative to the state's norm) the oracle
/// accepts.
pub const ORACLE_TAIL_LIMIT: f64 = 1e-12;

/// The product coherent state expanded in the truncated basis of `spec`.
///
/// If `spec.sector` is set only the components of that parity survive,
/// which is exactly the projection `(1 ± Π)/2`. The result is normalized.
pub fn coherent_state(alpha: Complex64, zeta: Complex64, spec: &HilbertSpec) -> Result<(Basis, Vec<Complex64>)> {
    let basis = Basis::new(*spec);
    let two_j = spec.two_j;
    let r2 = alpha.norm_sqr();
    let ln_a = if r2 > 0.0 { 0.5 * ln(r2) } else { f64::NEG_INFINITY };
    let arg_a = alpha.arg();
    let z2 = zeta.norm_sqr();
    let ln_z = if z2 > 0.0 { 0.5 * ln(z2) } else { f64::NEG_INFINITY };
    let arg_z = zeta.arg();
    let tj = two_j as f64;
    let spin_norm = -0.5 * tj * ln1p(z2);
    let ln_fact_2j = lgamma(tj + 1.0);

    let mut amps = Vec::with_capacity(basis.len());
    for label in basis.labels() {
        let nu = label.nu as f64;
        let k = label.atomic_excitations(two_j) as f64;
        let field = if label.nu == 0 {
            -0.5 * r2
        } else {
            -0.5 * r2 + nu * ln_a - 0.5 * lgamma(nu + 1.0)
        };
        let spin = if k == 0.0 {
            spin_norm
        } else {
            0.5 * (ln_fact_2j - lgamma(k + 1.0) - lgamma(tj - k + 1.0)) + k * ln_z + spin_norm
        };
        amps.push(Complex64::from_polar(exp(field + spin), nu * arg_a + k * arg_z));
    }
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let tail = poisson_tail(r2, spec.nu_max);
    if !(kept > 0.0) || tail > ORACLE_TAIL_LIMIT * kept {
        return Err(DickeError::TruncationTooSmall {
            nu_max: spec.nu_max,
            tail_weight: if kept > 0.0 { tail / kept } else { 1.0 },
            limit: ORACLE_TAIL_LIMIT,
        });
    }
    let s = 1.0 / sqrt(kept);
    amps.iter_mut().for_each(|c| *c *= s);
    Ok((basis, amps))
}

// Σ_{ν > ν_max} e^{−μ} μ^ν / ν!
fn poisson_tail(mu: f64, nu_max: u32) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let ln_mu = ln(mu);
    let mut sum = 0.0;
    let mut nu = nu_max as f64 + 1.0;
    loop {
        let term = exp(-mu + nu * ln_mu - lgamma(nu + 1.0));
        sum += term;
        if nu > mu && term <= 1e-20 * sum.max(1e-300) {
            break;
        }
        if term == 0.0 && nu > mu {
            break;
        }
        nu += 1.0;
    }
    sum
}

/// `⟨α,ζ| O |α,ζ⟩` by explicit contraction in the truncated basis. With a
/// sector in `spec` this is the expectation in the parity-projected state.
pub fn cs_expectation_oracle(
    params: &ModelParams,
    alpha: Complex64,
    zeta: Complex64,
    observable: Observable,
    spec: &HilbertSpec,
) -> Result<f64> {
    if spec.two_j != params.two_j() {
        return Err(DickeError::SpinMismatch {
            params: params.two_j(),
            spec: spec.two_j,
        });
    }
    let (basis, psi) = coherent_state(alpha, zeta, spec)?;
    let two_j = spec.two_j;
    let diag = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        basis
            .labels()
            .iter()
            .zip(&psi)
            .map(|(l, c)| f(l.nu as f64, l.atomic_excitations(two_j) as f64) * c.norm_sqr())
            .sum()
    };
    let j = params.j();
    Ok(match observable {
        Observable::Hamiltonian => {
            let h = assemble(params, &basis, Coupling::Full)?;
            let re: Vec<f64> = psi.iter().map(|c| c.re).collect();
            let im: Vec<f64> = psi.iter().map(|c| c.im).collect();
            h.quadratic_form(&re) + h.quadratic_form(&im)
        }
        Observable::Excitation => diag(&|nu, k| nu + k),
        Observable::ExcitationSquared => diag(&|nu, k| (nu + k) * (nu + k)),
        Observable::PhotonNumber => diag(&|nu, _| nu),
        Observable::Jz => diag(&|_, k| k - j),
    })
}

/// Fock cutoff comfortably holding a coherent field of mean photon number
/// `mean`: the mean plus twelve standard deviations plus a margin.
pub fn oracle_nu_max(mean: f64) -> u32 {
    let m = mean.max(0.0);
    (m + 12.0 * sqrt(m) + 40.0) as u32
}

/// Convenience: the sector of `spec` used by an oracle over `parity`.
pub fn oracle_spec(params: &ModelParams, point: &PhasePoint, parity: Option<Parity>) -> HilbertSpec {
    let mean = point.alpha().norm_sqr();
    HilbertSpec::for_params(params, oracle_nu_max(mean), parity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega_a: f64, gamma: f64, n: u32) -> ModelParams {
        ModelParams::new(omega_a, gamma, n).unwrap()
    }

    #[test]
    fn surface_examples() {
        let p = params(1.0, 0.7, 4);
        assert_eq!(cs_energy_surface(&p, &PhasePoint::new(0.0, 0.0, 0.0, 1.3)), -0.5);
        let v = cs_energy_surface(&p, &PhasePoint::new(0.0, 1.5, core::f64::consts::FRAC_PI_2, 0.0));
        assert!((v - 1.5 * 1.5 / 8.0).abs() < 1e-15);
        let p2 = params(1.0, 1.0, 2);
        let v = cs_energy_surface(&p2, &PhasePoint::new(-1.93649, 0.0, 1.31812, 0.0));
        assert!((v + 1.0625).abs() < 1e-5);
    }

    #[test]
    fn critical_point_examples() {
        let cp = cs_critical_points(&params(1.0, 0.3, 10)).phi_zero;
        assert_eq!(cp.branch, Branch::Normal);
        assert_eq!((cp.q_c, cp.theta_c), (0.0, 0.0));
        assert_eq!(cp.energy_per_particle, -0.5);

        for n in [1u32, 2, 20, 301] {
            let p = params(1.0, 1.0, n);
            let cps = cs_critical_points(&p);
            let cp = cps.phi_zero;
            assert_eq!(cp.branch, Branch::SuperRadiant);
            assert!((cp.theta_c - 1.318116).abs() < 1e-6);
            assert!((cp.q_c / p.n().sqrt() + 1.369306).abs() < 1e-6);
            assert_eq!(cps.phi_pi.q_c, -cp.q_c);
            assert_eq!(cps.phi_pi.energy_per_particle, cp.energy_per_particle);
        }

        let at_c = cs_critical_points(&params(1.0, 0.5, 6)).phi_zero;
        assert_eq!((at_c.q_c, at_c.theta_c), (0.0, 0.0));
    }

    #[test]
    fn universal_curve_examples() {
        assert_eq!(universal_curve(0.0, 1.0, 0.0).unwrap(), 0.0);
        let v = universal_curve(core::f64::consts::FRAC_PI_3, 1.0, 0.0).unwrap();
        assert!((v + 0.866025).abs() < 1e-6);
        let v = universal_curve(1.31812, 1.0, 0.0).unwrap();
        assert!((v + 1.36931).abs() < 1e-5);
        assert!(universal_curve(core::f64::consts::FRAC_PI_2, 1.0, 0.0).is_err());
        assert!(universal_curve(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn minimum_energy_examples() {
        let p = params(1.0, 1.0, 2);
        assert!((cs_minimum_energy(&p) + 2.125).abs() < 1e-14);
        assert!((cs_minimum_energy_per_particle(&p) + 1.0625).abs() < 1e-14);
        let big = params(1.0, 10.0, 3);
        let e = cs_minimum_energy_per_particle(&big);
        assert!((e + 100.0).abs() / 100.0 < 1e-3);
        for w in [0.3, 1.0, 2.7] {
            let p = params(w, 0.5 * w.sqrt(), 8);
            let gc2 = p.gamma_c() * p.gamma_c();
            assert!((cs_minimum_energy(&p) + 2.0 * p.n() * gc2).abs() < 1e-12);
            let (l, d) = cs_lambda_and_fluctuation(&p);
            assert_eq!((l, d), (0.0, 0.0));
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(cs_lambda_and_fluctuation(&params(1.0, 0.4, 20)), (0.0, 0.0));
        let (l, d) = cs_lambda_and_fluctuation(&params(1.0, 1.0, 20));
        assert!((l - 26.25).abs() < 1e-12);
        assert!((d - 4.841229).abs() < 1e-6);
    }

    #[test]
    fn alpha_zeta_roundtrip() {
        let pt = PhasePoint::new(0.4, -1.1, 0.9, -2.0);
        let back = PhasePoint::from_alpha_zeta(pt.alpha(), pt.zeta());
        assert!((back.q - pt.q).abs() < 1e-14);
        assert!((back.p - pt.p).abs() < 1e-14);
        assert!((back.theta - pt.theta).abs() < 1e-14);
        assert!((back.phi - pt.phi).abs() < 1e-14);
    }

    #[test]
    fn oracle_vacuum() {
        let p = params(1.3, 0.8, 5);
        let spec = HilbertSpec::for_params(&p, 10, None);
        let e = cs_expectation_oracle(
            &p,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Observable::Hamiltonian,
            &spec,
        )
        .unwrap();
        assert!((e + 0.65).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_surface_complex_point() {
        let p = params(0.8, -0.6, 3);
        let pt = PhasePoint::new(1.2, -0.7, 1.1, 0.6);
        let spec = oracle_spec(&p, &pt, None);
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec).unwrap();
        assert!((e - cs_energy_surface(&p, &pt)).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_short_truncation() {
        let p = params(1.0, 1.0, 2);
        let spec = HilbertSpec::for_params(&p, 5, None);
        let err = cs_expectation_oracle(
            &p,
            Complex64::new(3.0, 0.0),
            Complex64::new(0.2, 0.0),
            Observable::Jz,
            &spec,
        );
        assert!(matches!(err, Err(DickeError::TruncationTooSmall { .. })));
    }

    #[test]
    fn oracle_lambda_at_critical_point() {
        let p = params(1.0, 1.0, 20);
        let cp = cs_critical_points(&p).phi_zero;
        let pt = cp.point();
        let spec = oracle_spec(&p, &pt, None);
        let mean = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Excitation, &spec).unwrap();
        let sq = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::ExcitationSquared, &spec).unwrap();
        let (l, d) = cs_lambda_and_fluctuation(&p);
        assert!((mean - l).abs() < 1e-8);
        assert!(((sq - mean * mean).sqrt() - d).abs() < 1e-8);
    }
}
