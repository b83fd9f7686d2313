//! Symmetry-adapted (parity-projected) coherent states.
//!
//! The projected state `𝒩_± (|α,ζ⟩ ± |−α,−ζ⟩)` has an energy that depends on
//! the overlap `⟨α,ζ|−α,−ζ⟩ = e^{−L}` with `L = p² + q² − N ln cos θ`. Every
//! ratio below is written as a bounded function of `L` so that nothing
//! overflows at large `N`.

use alloc::vec::Vec;

use crate::coherent::{cs_critical_points, PhasePoint};
use crate::math::{cos, exp, expm1, ln_cos, sin, sqrt, tan, tanh};
use crate::model::{ModelParams, Parity};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::{DickeError, Result};

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// Per-particle energy of the projected coherent state of the given parity.
///
/// Requires `|θ| < π/2`. The odd projection vanishes at the exact origin;
/// there the infimum of the limits over approach directions is returned.
pub fn sas_energy_surface(params: &ModelParams, point: &PhasePoint, parity: Parity) -> Result<f64> {
    let PhasePoint { q, p, theta, phi } = *point;
    if !(theta.abs() < core::f64::consts::FRAC_PI_2) || !q.is_finite() || !p.is_finite() {
        return Err(DickeError::Domain(
            "projected surface requires finite q, p and |θ| < π/2",
        ));
    }
    let n = params.n();
    let w = params.omega_a();
    let g = params.gamma();
    let c = cos(theta);
    let lc = ln_cos(theta);
    let s = p * p + q * q;
    let l = s - n * lc;
    let direct = q * sin(theta) * cos(phi);
    let cross = p * tan(theta) * sin(phi);
    let k = g * sqrt(2.0 * n);

    let total = match parity {
        Parity::Even => {
            let sp = sigmoid(l);
            let sm = sigmoid(-l);
            0.5 * s * tanh(0.5 * l) - 0.5 * n * w * (c * sp + sm / c) + k * (direct * sp - cross * sm)
        }
        Parity::Odd => {
            if l == 0.0 {
                return Ok(odd_origin_limit(params));
            }
            let photon = 0.5 * s / tanh(0.5 * l);
            // (c² − e^{−L}) / (c (1 − e^{−L})), written to avoid cancellation.
            let l2 = l + 2.0 * lc;
            let num = if l2 > 1.0 { c * c - exp(-l) } else { exp(-l) * expm1(l2) };
            let jz = num / (c * -expm1(-l));
            let inter = direct / -expm1(-l) + cross / expm1(l);
            photon - 0.5 * n * w * jz + k * inter
        }
    };
    Ok(total / n)
}

/// Lowest energy reachable by the odd state as it shrinks to the origin:
/// the ground level of the one-excitation block.
fn odd_origin_limit(params: &ModelParams) -> f64 {
    let (w, g, n) = (params.omega_a(), params.gamma(), params.n());
    let lam = 0.5 * (1.0 + w) - sqrt(0.25 * (1.0 - w) * (1.0 - w) + g * g);
    -0.5 * w + lam / n
}

#[derive(Debug, Clone, PartialEq)]
pub struct SasMinimum {
    pub parity: Parity,
    /// Global minimum with `p = 0`, `φ = 0` and `θ ≥ 0`.
    pub point: PhasePoint,
    pub energy_per_particle: f64,
    /// Distinct local minima, lowest first.
    pub local_minima: Vec<(PhasePoint, f64)>,
}

/// Two minima closer than this in both `q` and `θ` are the same well.
pub const WELL_SEPARATION: f64 = 1e-4;

fn objective(params: &ModelParams, parity: Parity) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| {
        let pt = PhasePoint::new(x[0], 0.0, x[1], 0.0);
        sas_energy_surface(params, &pt, parity).unwrap_or(f64::INFINITY)
    }
}

fn canonical(q: f64, theta: f64) -> (f64, f64) {
    if theta < 0.0 {
        (-q, -theta)
    } else {
        (q, theta)
    }
}

fn minimizer_options() -> NelderMeadOptions {
    NelderMeadOptions {
        f_tol: 1e-14,
        x_tol: 1e-10,
        max_evals: 40_000,
        restarts: 3,
    }
}

/// Deterministic starting points in `(q, θ)`.
fn seeds(params: &ModelParams) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(32);
    out.push((0.1, 0.1));
    let cp = cs_critical_points(params).phi_zero;
    if cp.theta_c > 0.0 {
        out.push((cp.q_c, cp.theta_c));
    }
    let two_sqrt_j_g = 2.0 * sqrt(params.j()) * params.gamma();
    for i in 0..30 {
        let th = 0.02 + (1.4 - 0.02) * i as f64 / 29.0;
        out.push((-two_sqrt_j_g * sin(th), th));
    }
    out
}

/// Local minimization of the projected surface from one start.
pub fn sas_local_minimum(params: &ModelParams, parity: Parity, start: (f64, f64)) -> Result<(PhasePoint, f64)> {
    let f = objective(params, parity);
    let step_q = 0.1 * start.0.abs().max(1.0);
    let m = nelder_mead(&f, &[start.0, start.1], &[step_q, 0.05], &minimizer_options());
    if !m.converged || !m.value.is_finite() {
        return Err(DickeError::NoConvergence {
            solver: "simplex",
            iterations: m.evals,
            residual: m.value,
        });
    }
    let (q, th) = canonical(m.x[0], m.x[1]);
    Ok((PhasePoint::new(q, 0.0, th, 0.0), m.value))
}

/// Multi-start minimization over `(q, θ)` at `p = 0`, `φ = 0`.
pub fn sas_minimize(params: &ModelParams, parity: Parity) -> Result<SasMinimum> {
    let mut wells: Vec<(PhasePoint, f64)> = Vec::new();
    for start in seeds(params) {
        let (pt, e) = sas_local_minimum(params, parity, start)?;
        let same = wells
            .iter_mut()
            .find(|(w, _)| (w.q - pt.q).abs() <= WELL_SEPARATION && (w.theta - pt.theta).abs() <= WELL_SEPARATION);
        match same {
            Some(w) => {
                if e < w.1 {
                    *w = (pt, e);
                }
            }
            None => wells.push((pt, e)),
        }
    }
    wells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, energy_per_particle) = wells[0];
    Ok(SasMinimum {
        parity,
        point,
        energy_per_particle,
        local_minima: wells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SasTransition {
    /// Coupling at which the two even wells exchange the global minimum.
    pub gamma_c_sc: f64,
    /// `|Δq_c|` across the swap.
    pub jump_size: f64,
    pub theta_below: f64,
    pub theta_above: f64,
    /// Final bisection interval.
    pub bracket: (f64, f64),
}

/// Smallest θ discontinuity accepted as a swap once the bracket is tight.
const MIN_THETA_JUMP: f64 = 1e-3;

/// Locates the coupling where the global minimum of the even surface jumps
/// from the near-origin well to the displaced well.
///
/// Bisection keeps the half whose endpoints' minimizers differ more in θ.
/// At the final bracket both wells are re-minimized at both ends; their
/// energy difference must change sign, and the crossing is interpolated.
pub fn sas_transition(omega_a: f64, n_atoms: u32, bracket: (f64, f64), tol: f64) -> Result<SasTransition> {
    let (mut a, mut b) = bracket;
    if !(a < b) || !(tol > 0.0) {
        return Err(DickeError::Domain("bracket must be ascending and tol positive"));
    }
    let base = ModelParams::new(omega_a, a, n_atoms)?;
    let global = |g: f64| -> Result<SasMinimum> { sas_minimize(&base.with_gamma(g)?, Parity::Even) };
    let mut ma = global(a)?;
    let mut mb = global(b)?;
    if (mb.point.theta - ma.point.theta).abs() < MIN_THETA_JUMP {
        return Err(DickeError::NoSwap { lo: a, hi: b });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let mm = global(mid)?;
        if (mm.point.theta - ma.point.theta).abs() <= (mb.point.theta - mm.point.theta).abs() {
            a = mid;
            ma = mm;
        } else {
            b = mid;
            mb = mm;
        }
    }
    let gap = (mb.point.theta - ma.point.theta).abs();
    if gap < MIN_THETA_JUMP {
        return Err(DickeError::NoSwap {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    for (g, m) in [(a, &ma), (b, &mb)] {
        if m.local_minima.len() > 2 {
            return Err(DickeError::TooManyWells {
                count: m.local_minima.len(),
                gamma: g,
            });
        }
    }

    // Follow each well across the bracket and check the energies cross.
    let pa = base.with_gamma(a)?;
    let pb = base.with_gamma(b)?;
    let origin_at_b = sas_local_minimum(&pb, Parity::Even, (ma.point.q, ma.point.theta))?;
    let displaced_at_a = sas_local_minimum(&pa, Parity::Even, (mb.point.q, mb.point.theta))?;
    let survives = |x: &PhasePoint, y: &PhasePoint| (x.theta - y.theta).abs() > 0.5 * gap;
    if !survives(&origin_at_b.0, &mb.point) || !survives(&displaced_at_a.0, &ma.point) {
        return Err(DickeError::NoSwap {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let da = displaced_at_a.1 - ma.energy_per_particle;
    let db = mb.energy_per_particle - origin_at_b.1;
    if !(da >= 0.0 && db <= 0.0) {
        return Err(DickeError::NoSwap {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let gamma_c_sc = if da - db > 0.0 {
        a + (b - a) * da / (da - db)
    } else {
        0.5 * (a + b)
    };
    Ok(SasTransition {
        gamma_c_sc,
        jump_size: (mb.point.q - ma.point.q).abs(),
        theta_below: ma.point.theta,
        theta_above: mb.point.theta,
        bracket: (a, b),
    })
}
