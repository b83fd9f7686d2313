//! Finite-size transition detection and critical-exponent fits.

use alloc::vec::Vec;

use crate::coherent::{PhasePoint, PhiBranch};
use crate::eigen::{converged_ground_with, ground_at_truncation, GroundSettings};
use crate::math::{acos, ceil, exp, ln, pow, sqrt};
use crate::model::{ModelParams, Parity};
use crate::optimize::{golden_section_max, parabolic_vertex};
use crate::sas::sas_transition;
use crate::stats::{linear_fit, student_t_quantile};
use crate::{DickeError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    /// `|⟨a|b⟩|²` for the normalized inputs.
    pub value: f64,
    /// `1 − F`, computed without cancellation.
    pub infidelity: f64,
}

/// Squared overlap of two real states. Inputs are normalized first and
/// the sign of `b` is aligned with `a`, so `1 − F` stays accurate when the
/// states are nearly identical.
pub fn fidelity(a: &[f64], b: &[f64]) -> Result<Fidelity> {
    if a.len() != b.len() {
        return Err(DickeError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let na = sqrt(a.iter().map(|x| x * x).sum());
    let nb = sqrt(b.iter().map(|x| x * x).sum());
    if !(na > 0.0) || !(nb > 0.0) {
        return Err(DickeError::Domain("fidelity of a zero vector"));
    }
    let overlap: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    let s = if overlap < 0.0 { -1.0 } else { 1.0 };
    // 1 − |c| = ‖a − s b‖² / 2 for unit vectors.
    let dist2: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x / na - s * y / nb;
            d * d
        })
        .sum();
    let one_minus_c = (0.5 * dist2).min(1.0);
    let c = 1.0 - one_minus_c;
    let infidelity = (one_minus_c * (1.0 + c)).clamp(0.0, 1.0);
    Ok(Fidelity {
        value: 1.0 - infidelity,
        infidelity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityScan {
    pub sector: Parity,
    pub gamma_grid: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `χ = 2(1 − F)/δγ²`.
    pub susceptibility: Vec<f64>,
    pub gamma_peak: f64,
    pub chi_peak: f64,
    pub delta_gamma: f64,
    /// Fock cutoff shared by every solve in the scan.
    pub nu_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub delta_gamma: f64,
    /// Residual target for every eigenvector entering a fidelity.
    pub residual_tol: f64,
    /// Tolerance on the refined peak position.
    pub peak_tol: f64,
    pub ground: GroundSettings,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            delta_gamma: 1e-4,
            residual_tol: 1e-12,
            peak_tol: 1e-5,
            ground: GroundSettings::default(),
        }
    }
}

struct ChiEvaluator {
    base: ModelParams,
    sector: Parity,
    nu_max: u32,
    settings: ScanSettings,
}

impl ChiEvaluator {
    fn state(&self, gamma: f64, start: Option<&[f64]>) -> Result<Vec<f64>> {
        let p = self.base.with_gamma(gamma)?;
        let (pair, _) = ground_at_truncation(&p, self.sector, self.nu_max, self.settings.residual_tol, start)?;
        Ok(pair.vector)
    }

    /// `(F, χ, ψ(γ))` at one coupling.
    fn at(&self, gamma: f64, start: Option<&[f64]>) -> Result<(f64, f64, Vec<f64>)> {
        let a = self.state(gamma, start)?;
        let b = self.state(gamma + self.settings.delta_gamma, Some(&a))?;
        let f = fidelity(&a, &b)?;
        let dg = self.settings.delta_gamma;
        Ok((f.value, 2.0 * f.infidelity / (dg * dg), a))
    }
}

/// Fidelity susceptibility of the lowest state of `sector` on `grid`, with
/// the maximum refined by a parabola through the best three grid points
/// followed by golden-section search.
pub fn susceptibility_scan(
    omega_a: f64,
    n_atoms: u32,
    sector: Parity,
    grid: &[f64],
    settings: &ScanSettings,
) -> Result<FidelityScan> {
    if grid.len() < 3 {
        return Err(DickeError::InsufficientPoints(grid.len()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(DickeError::Domain("coupling grid must be strictly ascending"));
    }
    let dg = settings.delta_gamma;
    if !(dg > 0.0) || dg >= grid[1] - grid[0] {
        return Err(DickeError::InvalidParameter {
            name: "delta_gamma",
            value: dg,
            reason: "must be positive and smaller than the grid spacing",
        });
    }
    let top = grid[grid.len() - 1] + dg;
    let hardest = ModelParams::new(omega_a, top, n_atoms)?;
    let (_, report) = converged_ground_with(&hardest, sector, &settings.ground)?;
    let eval = ChiEvaluator {
        base: hardest,
        sector,
        nu_max: report.nu_max_used,
        settings: *settings,
    };

    let mut fidelity = Vec::with_capacity(grid.len());
    let mut chi = Vec::with_capacity(grid.len());
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    for &g in grid {
        let (f, c, psi) = eval.at(g, states.last().map(|v| v.as_slice()))?;
        fidelity.push(f);
        chi.push(c);
        states.push(psi);
    }
    let (i, _) = chi.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (k, &c)| if c > best.1 { (k, c) } else { best },
    );
    if i == 0 || i == grid.len() - 1 {
        return Err(DickeError::PeakAtBoundary { gamma: grid[i] });
    }

    let (lo, hi) = (grid[i - 1], grid[i + 1]);
    let warm = states[i].clone();
    let chi_at = |g: f64| eval.at(g, Some(&warm)).map(|r| r.1);
    let h = 0.5 * (hi - lo);
    let (a, b) = match parabolic_vertex([lo, grid[i], hi], [chi[i - 1], chi[i], chi[i + 1]]) {
        Some(v) if v > lo && v < hi => ((v - 0.5 * h).max(lo), (v + 0.5 * h).min(hi)),
        _ => (lo, hi),
    };
    let mut peak = golden_section_max(chi_at, a, b, settings.peak_tol)?;
    let at_edge = |x: f64| (x - a).abs() <= settings.peak_tol || (b - x).abs() <= settings.peak_tol;
    if at_edge(peak.0) && (a > lo || b < hi) {
        peak = golden_section_max(chi_at, lo, hi, settings.peak_tol)?;
    }
    if peak.1 < chi[i] {
        peak = (grid[i], chi[i]);
    }
    Ok(FidelityScan {
        sector,
        gamma_grid: grid.to_vec(),
        fidelity,
        susceptibility: chi,
        gamma_peak: peak.0,
        chi_peak: peak.1,
        delta_gamma: dg,
        nu_max: eval.nu_max,
    })
}

/// Maps ground-state expectation values onto the classical phase space:
/// `q = ∓√(2⟨a†a⟩)`, `p = 0`, `θ = arccos(−⟨J_z⟩/j)`.
pub fn correspondence_map(n_photons_mean: f64, jz_mean: f64, j: f64, phi: PhiBranch) -> Result<PhasePoint> {
    if !(j > 0.0) {
        return Err(DickeError::Domain("j must be positive"));
    }
    if !(n_photons_mean >= -1e-12) {
        return Err(DickeError::Domain("photon number must be non-negative"));
    }
    let r = -jz_mean / j;
    if !(r.abs() <= 1.0 + 1e-12) {
        return Err(DickeError::Domain("|⟨J_z⟩| exceeds j"));
    }
    Ok(PhasePoint::new(
        -phi.cos() * sqrt(2.0 * n_photons_mean.max(0.0)),
        0.0,
        acos(r.clamp(-1.0, 1.0)),
        phi.angle(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Susceptibility peak of the even-parity ground state.
    ExactEven,
    /// Susceptibility peak of the lowest odd-parity state.
    ExactOdd,
    /// Swap of the even projected-state minimum.
    Sas,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactEven => "exact-even",
            Method::ExactOdd => "exact-odd",
            Method::Sas => "sas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSettings {
    pub omega_a: f64,
    pub scan: ScanSettings,
    pub grid_points: usize,
    /// Bisection width for the projected-state swap.
    pub sas_tol: f64,
    /// How many times a search window may be enlarged after a miss.
    pub max_widenings: u32,
}

impl Default for TableSettings {
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            scan: ScanSettings::default(),
            grid_points: 21,
            sas_tol: 1e-8,
            max_widenings: 3,
        }
    }
}

/// Search window `[γ_c, γ_c + w]` for a given `j`, with the width following
/// the expected finite-size shift: `w = j^{−2/3}` for the exact methods and
/// `w = j^{−11/21}/2` for the projected states. Both are scaled by `√ω_A/2`.
pub fn default_window(j: f64, method: Method, omega_a: f64) -> (f64, f64) {
    let gc = 0.5 * sqrt(omega_a);
    let w = match method {
        Method::ExactEven | Method::ExactOdd => pow(j, -2.0 / 3.0),
        Method::Sas => 0.5 * pow(j, -11.0 / 21.0),
    };
    (gc, gc + 2.0 * gc * w)
}

/// `2j` for a half-integer `j ≥ 1/2`.
pub fn two_j_of(j: f64) -> Result<u32> {
    let t = 2.0 * j;
    if !(t >= 1.0) || t != ceil(t) || t > u32::MAX as f64 {
        return Err(DickeError::InvalidParameter {
            name: "j",
            value: j,
            reason: "must be a positive half-integer",
        });
    }
    Ok(t as u32)
}

/// Evenly spaced grid of `n` points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `γ_c` at one `j`, widening the search window when the peak or the swap
/// is not found inside it.
pub fn gamma_c_for(j: f64, method: Method, settings: &TableSettings) -> Result<f64> {
    let n_atoms = two_j_of(j)?;
    let (mut lo, mut hi) = default_window(j, method, settings.omega_a);
    let mut widenings = 0;
    loop {
        let outcome = match method {
            Method::ExactEven | Method::ExactOdd => {
                let sector = if method == Method::ExactEven {
                    Parity::Even
                } else {
                    Parity::Odd
                };
                let grid = linspace(lo, hi, settings.grid_points);
                susceptibility_scan(settings.omega_a, n_atoms, sector, &grid, &settings.scan).map(|s| s.gamma_peak)
            }
            Method::Sas => sas_transition(settings.omega_a, n_atoms, (lo, hi), settings.sas_tol).map(|t| t.gamma_c_sc),
        };
        match outcome {
            Err(DickeError::PeakAtBoundary { gamma }) | Err(DickeError::NoSwap { lo: gamma, .. })
                if widenings < settings.max_widenings =>
            {
                let width = hi - lo;
                if method != Method::Sas && gamma <= lo {
                    lo -= width;
                } else {
                    hi += width;
                }
                widenings += 1;
            }
            other => return other,
        }
    }
}

/// `(j, γ_c)` rows for an ascending ladder of `j`.
pub fn gamma_c_table(j_list: &[f64], method: Method, settings: &TableSettings) -> Result<Vec<(f64, f64)>> {
    if j_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(DickeError::Domain("j list must be strictly ascending"));
    }
    j_list
        .iter()
        .map(|&j| gamma_c_for(j, method, settings).map(|g| (j, g)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Slope of `ln(γ_c − 1/2)` against `ln j`.
    pub exponent: f64,
    pub intercept: f64,
    /// `e^{intercept}`.
    pub amplitude: f64,
    pub sigma: f64,
    /// Two-sided 95% interval for the slope.
    pub ci95: (f64, f64),
    pub points_used: usize,
    /// `j` values dropped because `γ_c` sat on 1/2.
    pub excluded: Vec<f64>,
}

/// Offsets this close to 1/2 are left out of the log fit.
pub const OFFSET_FLOOR: f64 = 1e-9;

/// Least-squares fit of `γ_c = 1/2 + A j^s` in log-log form.
pub fn fit_power_law(table: &[(f64, f64)]) -> Result<FitResult> {
    let mut xs = Vec::with_capacity(table.len());
    let mut ys = Vec::with_capacity(table.len());
    let mut excluded = Vec::new();
    for &(j, g) in table {
        if !(j > 0.0) {
            return Err(DickeError::Domain("j must be positive"));
        }
        let off = g - 0.5;
        if off < -OFFSET_FLOOR || !off.is_finite() {
            return Err(DickeError::NotAboveHalf { j, gamma_c: g });
        }
        if off <= OFFSET_FLOOR {
            excluded.push(j);
            continue;
        }
        xs.push(ln(j));
        ys.push(ln(off));
    }
    let fit = linear_fit(&xs, &ys)?;
    let t = student_t_quantile(0.975, (fit.n - 2) as f64)?;
    let half = t * fit.slope_se;
    Ok(FitResult {
        exponent: fit.slope,
        intercept: fit.intercept,
        amplitude: exp(fit.intercept),
        sigma: fit.sigma,
        ci95: (fit.slope - half, fit.slope + half),
        points_used: fit.n,
        excluded,
    })
}
