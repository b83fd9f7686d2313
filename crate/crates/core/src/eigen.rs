//! Lowest eigenpairs of parity blocks.
//!
//! Two independent routes are kept side by side: a dense Householder/QL
//! solve ([`dense_lowest`]) used as an oracle on moderate dimensions, and a
//! thick-restart Lanczos iteration with full reorthogonalization
//! ([`iterative_lowest`]) for the large truncated blocks. [`converged_ground`]
//! wraps the iterative solver in an adaptive Fock-truncation loop.

use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::{Basis, Coupling, HilbertSpec, SparseSymmetricMatrix};
use crate::linalg::symmetric_eigen;
use crate::math::{ceil, dot, norm};
use crate::model::{ModelParams, Parity};
use crate::{DickeError, Result};

pub const DEFAULT_DENSE_CEILING: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Per-particle energy.
    pub energy: f64,
    /// Unit-norm real amplitudes over the basis ordering.
    pub vector: Vec<f64>,
    pub sector: Option<Parity>,
    /// `‖Hv − Ev‖` recomputed from the returned pair.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub nu_max_used: u32,
    pub tail_weight: f64,
    pub energy_delta: f64,
    /// Truncation rounds (one per ν_max tried).
    pub iterations: usize,
}

pub fn dense_lowest(matrix: &SparseSymmetricMatrix, k: usize) -> Result<Vec<EigenPair>> {
    dense_lowest_with_ceiling(matrix, k, DEFAULT_DENSE_CEILING)
}

pub fn dense_lowest_with_ceiling(matrix: &SparseSymmetricMatrix, k: usize, ceiling: usize) -> Result<Vec<EigenPair>> {
    let n = matrix.dim();
    if n > ceiling {
        return Err(DickeError::DenseCeiling { dim: n, ceiling });
    }
    check_k(k, n)?;
    let eig = symmetric_eigen(&matrix.to_dense(), n)?;
    Ok((0..k)
        .map(|i| finish_pair(matrix, eig.values[i], eig.vector(i)))
        .collect())
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(DickeError::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "must be between 1 and the matrix dimension",
        });
    }
    Ok(())
}

/// Normalizes, fixes the sign (largest component positive) and measures the
/// true residual.
fn finish_pair(matrix: &SparseSymmetricMatrix, energy: f64, mut v: Vec<f64>) -> EigenPair {
    let nv = norm(&v);
    let mut imax = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[imax].abs() {
            imax = i;
        }
    }
    let s = if v[imax] < 0.0 { -1.0 / nv } else { 1.0 / nv };
    v.iter_mut().for_each(|x| *x *= s);
    let residual = residual_norm(matrix, energy, &v);
    EigenPair {
        energy,
        vector: v,
        sector: matrix.sector(),
        residual,
    }
}

pub fn residual_norm(matrix: &SparseSymmetricMatrix, energy: f64, v: &[f64]) -> f64 {
    let mut w = vec![0.0; v.len()];
    matrix.matvec(v, &mut w);
    let sq: f64 = w
        .iter()
        .zip(v)
        .map(|(a, b)| {
            let r = a - energy * b;
            r * r
        })
        .sum();
    crate::math::sqrt(sq)
}

/// Knobs for [`iterative_lowest_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Residual tolerance on each requested pair.
    pub tol: f64,
    /// Krylov basis size between restarts.
    pub basis_size: usize,
    pub max_matvecs: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            basis_size: 48,
            max_matvecs: 50_000,
        }
    }
}

pub fn iterative_lowest(matrix: &SparseSymmetricMatrix, k: usize, tol: f64) -> Result<Vec<EigenPair>> {
    let opts = LanczosOptions {
        tol,
        ..LanczosOptions::default()
    };
    iterative_lowest_with(matrix, k, &opts, None).map(|(pairs, _)| pairs)
}

/// Thick-restart Lanczos. Returns the pairs and the number of matrix-vector
/// products spent. Without `start` the normalized all-ones vector is used,
/// so repeated runs are bitwise identical.
pub fn iterative_lowest_with(
    matrix: &SparseSymmetricMatrix,
    k: usize,
    opts: &LanczosOptions,
    start: Option<&[f64]>,
) -> Result<(Vec<EigenPair>, usize)> {
    let n = matrix.dim();
    check_k(k, n)?;
    let m = n.min(opts.basis_size.max(k + 8));
    let anorm = matrix.row_sum_bound().max(f64::MIN_POSITIVE);
    let breakdown = 1e-12 * anorm;

    // Basis vectors are rows of `basis`; slot m holds the outgoing residual.
    let mut basis = vec![0.0; (m + 1) * n];
    let mut t = vec![0.0; m * m];
    let mut w = vec![0.0; n];
    let mut coef = vec![0.0; m + 1];

    match start {
        Some(s) if s.len() == n && norm(s) > 0.0 => basis[..n].copy_from_slice(s),
        Some(s) if s.len() != n => {
            return Err(DickeError::DimensionMismatch {
                left: s.len(),
                right: n,
            })
        }
        _ => basis[..n].iter_mut().for_each(|x| *x = 1.0),
    }
    let s = 1.0 / norm(&basis[..n]);
    basis[..n].iter_mut().for_each(|x| *x *= s);

    let mut kept = 0;
    let mut matvecs = 0;
    let mut next_fresh = 0;
    loop {
        let mut size = m;
        let mut beta = 0.0;
        let mut j = kept;
        while j < m {
            let (head, tail) = basis.split_at_mut((j + 1) * n);
            let vj = &head[j * n..];
            matrix.matvec(vj, &mut w);
            matvecs += 1;
            coef[..=j].iter_mut().for_each(|c| *c = 0.0);
            for _ in 0..2 {
                for i in 0..=j {
                    let vi = &head[i * n..(i + 1) * n];
                    let h = dot(vi, &w);
                    coef[i] += h;
                    w.iter_mut().zip(vi).for_each(|(x, y)| *x -= h * y);
                }
            }
            for i in 0..=j {
                t[i * m + j] = coef[i];
                t[j * m + i] = coef[i];
            }
            beta = norm(&w);
            let next = &mut tail[..n];
            if beta <= breakdown {
                // Invariant subspace: continue with a fresh direction unless
                // the whole space has been spanned.
                beta = 0.0;
                if j + 1 == n {
                    size = j + 1;
                    break;
                }
                if !fresh_direction(&head[..(j + 1) * n], n, &mut next_fresh, next) {
                    size = j + 1;
                    break;
                }
            } else {
                next.iter_mut().zip(&w).for_each(|(x, y)| *x = y / beta);
            }
            j += 1;
            // Cheap early exit once the wanted pairs have settled.
            if j >= k && j < m && j % 8 == 0 && beta > 0.0 {
                let (_, vecs) = ritz(&t, m, j)?;
                if (0..k).all(|i| (beta * vecs[(j - 1) * j + i]).abs() <= 0.1 * opts.tol) {
                    let pairs = extract(matrix, &basis, n, &vecs, j, k);
                    if pairs.iter().all(|p| p.residual <= opts.tol) {
                        return Ok((pairs, matvecs));
                    }
                }
            }
        }

        let (vals, vecs) = ritz(&t, m, size)?;
        let res: Vec<f64> = (0..size).map(|i| (beta * vecs[(size - 1) * size + i]).abs()).collect();
        let worst = res[..k].iter().fold(0.0, |a: f64, &b| a.max(b));
        if worst <= 0.1 * opts.tol || beta == 0.0 {
            let pairs = extract(matrix, &basis, n, &vecs, size, k);
            if pairs.iter().all(|p| p.residual <= opts.tol) {
                return Ok((pairs, matvecs));
            }
            // Loss of accuracy in the projected estimate; tighten by restarting.
        }
        if matvecs >= opts.max_matvecs {
            return Err(DickeError::NoConvergence {
                solver: "thick-restart Lanczos",
                iterations: matvecs,
                residual: worst,
            });
        }

        // Restart: keep the lowest Ritz vectors plus the residual direction.
        let keep = (k + (size - k) / 2).min(size - 1).max(k);
        let mut fresh = vec![0.0; keep * n];
        for i in 0..keep {
            let dst = &mut fresh[i * n..(i + 1) * n];
            for r in 0..size {
                let y = vecs[r * size + i];
                if y != 0.0 {
                    dst.iter_mut()
                        .zip(&basis[r * n..(r + 1) * n])
                        .for_each(|(x, v)| *x += y * v);
                }
            }
        }
        let resid: Vec<f64> = basis[size * n..(size + 1) * n].to_vec();
        basis.iter_mut().for_each(|x| *x = 0.0);
        basis[..keep * n].copy_from_slice(&fresh);
        basis[keep * n..(keep + 1) * n].copy_from_slice(&resid);
        t.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..keep {
            t[i * m + i] = vals[i];
            let s = beta * vecs[(size - 1) * size + i];
            t[i * m + keep] = s;
            t[keep * m + i] = s;
        }
        kept = keep;
        if beta == 0.0 {
            // The residual slot is empty; seed it with a fresh direction.
            let (head, tail) = basis.split_at_mut((keep) * n);
            if !fresh_direction(head, n, &mut next_fresh, &mut tail[..n]) {
                let pairs = extract(matrix, &basis, n, &vecs, size, k);
                return Ok((pairs, matvecs));
            }
        }
    }
}

/// Deterministic new direction orthogonal to `span` (rows of length n),
/// tried from successive unit vectors.
fn fresh_direction(span: &[f64], n: usize, cursor: &mut usize, out: &mut [f64]) -> bool {
    let rows = span.len() / n;
    while *cursor < n {
        out.iter_mut().for_each(|x| *x = 0.0);
        out[*cursor] = 1.0;
        *cursor += 1;
        for _ in 0..2 {
            for r in 0..rows {
                let v = &span[r * n..(r + 1) * n];
                let h = dot(v, out);
                out.iter_mut().zip(v).for_each(|(x, y)| *x -= h * y);
            }
        }
        let nv = norm(out);
        if nv > 1e-6 {
            out.iter_mut().for_each(|x| *x /= nv);
            return true;
        }
    }
    false
}

/// Eigen-decomposition of the leading `size × size` block of `t` (stride m).
/// Eigenvectors are returned row-major `size × size`, column i ↔ value i.
fn ritz(t: &[f64], m: usize, size: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut block = vec![0.0; size * size];
    for r in 0..size {
        block[r * size..(r + 1) * size].copy_from_slice(&t[r * m..r * m + size]);
    }
    let eig = symmetric_eigen(&block, size)?;
    Ok((eig.values, eig.vectors))
}

fn extract(
    matrix: &SparseSymmetricMatrix,
    basis: &[f64],
    n: usize,
    vecs: &[f64],
    size: usize,
    k: usize,
) -> Vec<EigenPair> {
    (0..k)
        .map(|i| {
            let mut x = vec![0.0; n];
            for r in 0..size {
                let y = vecs[r * size + i];
                x.iter_mut()
                    .zip(&basis[r * n..(r + 1) * n])
                    .for_each(|(a, b)| *a += y * b);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|a| *a /= nx);
            // Rayleigh quotient of the assembled vector.
            let energy = matrix.quadratic_form(&x);
            finish_pair(matrix, energy, x)
        })
        .collect()
}

/// Settings for the adaptive truncation loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSettings {
    /// Per-particle energy change tolerated between ν_max/2 and ν_max.
    pub energy_tol: f64,
    pub tail_tol: f64,
    pub residual_tol: f64,
    pub nu_max_cap: u32,
    /// Overrides the coupling-based starting truncation.
    pub nu_max_start: Option<u32>,
}

impl Default for GroundSettings {
    fn default() -> Self {
        Self {
            energy_tol: 1e-10,
            tail_tol: 1e-10,
            residual_tol: 1e-10,
            nu_max_cap: 20_000,
            nu_max_start: None,
        }
    }
}

/// Starting truncation: four times the coherent-state photon number plus a
/// margin of twenty, and never below twenty.
pub fn initial_nu_max(params: &ModelParams) -> u32 {
    let x = params.x();
    let g = params.gamma();
    let photons = if x > 1.0 {
        4.0 * params.n() * g * g * (1.0 - 1.0 / (x * x * x * x))
    } else {
        0.0
    };
    (ceil(photons) as u32 + 20).max(20)
}

/// Lowest state of one parity block at a fixed truncation.
pub fn ground_at_truncation(
    params: &ModelParams,
    sector: Parity,
    nu_max: u32,
    residual_tol: f64,
    start: Option<&[f64]>,
) -> Result<(EigenPair, Basis)> {
    let basis = Basis::new(HilbertSpec::for_params(params, nu_max, Some(sector)));
    let h = crate::hilbert::assemble(params, &basis, Coupling::Full)?;
    let opts = LanczosOptions {
        tol: residual_tol,
        ..LanczosOptions::default()
    };
    let (mut pairs, _) = iterative_lowest_with(&h, 1, &opts, start)?;
    Ok((pairs.remove(0), basis))
}

pub fn converged_ground(params: &ModelParams, sector: Parity, tol: f64) -> Result<(EigenPair, ConvergenceReport)> {
    let settings = GroundSettings {
        energy_tol: tol,
        ..GroundSettings::default()
    };
    converged_ground_with(params, sector, &settings)
}

/// Doubles ν_max until the energy moves by at most `energy_tol` relative to
/// the half-size truncation and the top Fock decile carries at most
/// `tail_tol` probability.
pub fn converged_ground_with(
    params: &ModelParams,
    sector: Parity,
    settings: &GroundSettings,
) -> Result<(EigenPair, ConvergenceReport)> {
    if !(settings.energy_tol > 0.0) {
        return Err(DickeError::InvalidParameter {
            name: "tol",
            value: settings.energy_tol,
            reason: "must be positive",
        });
    }
    let cap = settings.nu_max_cap;
    let mut nu = settings
        .nu_max_start
        .unwrap_or_else(|| initial_nu_max(params))
        .clamp(2, cap.max(2));
    let (half, _) = ground_at_truncation(params, sector, nu / 2, settings.residual_tol, None)?;
    let mut prev_energy = half.energy;
    let mut prev_vec = half.vector;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut start = prev_vec.clone();
        let dim = Basis::new(HilbertSpec::for_params(params, nu, Some(sector))).len();
        start.resize(dim, 0.0);
        let (pair, basis) = ground_at_truncation(params, sector, nu, settings.residual_tol, Some(&start))?;
        let tail = basis.tail_weight(&pair.vector);
        let delta = (pair.energy - prev_energy).abs();
        if delta <= settings.energy_tol && tail <= settings.tail_tol {
            return Ok((
                pair,
                ConvergenceReport {
                    nu_max_used: nu,
                    tail_weight: tail,
                    energy_delta: delta,
                    iterations: rounds,
                },
            ));
        }
        if nu >= cap {
            return Err(DickeError::TruncationCap {
                cap,
                nu_max: nu,
                tail_weight: tail,
                energy_delta: delta,
            });
        }
        prev_energy = pair.energy;
        prev_vec = pair.vector;
        nu = nu.saturating_mul(2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_hamiltonian;

    fn diag(values: &[f64]) -> SparseSymmetricMatrix {
        SparseSymmetricMatrix::from_upper_entries(
            values.len(),
            values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dense_two_by_two() {
        let (g, d) = (0.4, 1.1);
        let m = SparseSymmetricMatrix::from_upper_entries(2, vec![(0, 1, g), (1, 1, d)]).unwrap();
        let pairs = dense_lowest(&m, 2).unwrap();
        let root = crate::math::sqrt(d * d + 4.0 * g * g);
        assert!((pairs[0].energy - (d - root) / 2.0).abs() < 1e-15);
        assert!((pairs[1].energy - (d + root) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn dense_ceiling_enforced() {
        let m = diag(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            dense_lowest_with_ceiling(&m, 1, 2),
            Err(DickeError::DenseCeiling { .. })
        ));
    }

    #[test]
    fn free_ground_state() {
        let p = ModelParams::new(1.3, 0.0, 4).unwrap();
        let spec = HilbertSpec::new(4, 6, Some(Parity::Even));
        let h = build_hamiltonian(&p, &spec).unwrap();
        let pair = &dense_lowest(&h, 1).unwrap()[0];
        assert!((pair.energy + 1.3 / 2.0).abs() < 1e-15);
        assert!((pair.vector[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lanczos_on_diagonal() {
        let m = diag(&[3.0, -1.5, 2.0, 0.25, 7.0]);
        let pairs = iterative_lowest(&m, 1, 1e-12).unwrap();
        assert!((pairs[0].energy + 1.5).abs() < 1e-14);
    }

    #[test]
    fn lanczos_handles_degenerate_diagonal() {
        let m = diag(&[1.0, 1.0, 1.0, 0.0, 0.0, 2.0]);
        let pairs = iterative_lowest(&m, 3, 1e-12).unwrap();
        let e: Vec<f64> = pairs.iter().map(|p| p.energy).collect();
        assert!((e[0]).abs() < 1e-12 && (e[1]).abs() < 1e-12);
        assert!((e[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_small_dicke() {
        let p = ModelParams::new(1.0, 0.3, 2).unwrap();
        let spec = HilbertSpec::new(2, 40, Some(Parity::Even));
        let h = build_hamiltonian(&p, &spec).unwrap();
        let dense = dense_lowest(&h, 2).unwrap();
        let iter = iterative_lowest(&h, 2, 1e-11).unwrap();
        for (a, b) in dense.iter().zip(&iter) {
            assert!((a.energy - b.energy).abs() < 1e-10);
            assert!(b.residual <= 1e-11);
        }
    }

    #[test]
    fn initial_truncation() {
        let normal = ModelParams::new(1.0, 0.1, 2).unwrap();
        assert_eq!(initial_nu_max(&normal), 20);
        let sr = ModelParams::new(1.0, 1.0, 20).unwrap();
        // 4 · 20 · (1 − 1/16) = 75
        assert_eq!(initial_nu_max(&sr), 95);
    }

    #[test]
    fn deep_normal_converges_at_start() {
        let p = ModelParams::new(1.0, 0.1, 2).unwrap();
        let (pair, report) = converged_ground(&p, Parity::Even, 1e-10).unwrap();
        assert_eq!(report.nu_max_used, 20);
        assert_eq!(report.iterations, 1);
        assert!(report.tail_weight <= 1e-10);
        let spec = HilbertSpec::new(2, 20, Some(Parity::Even));
        let dense = &dense_lowest(&build_hamiltonian(&p, &spec).unwrap(), 1).unwrap()[0];
        assert!((dense.energy - pair.energy).abs() < 1e-12);
        let photons = Basis::new(spec).photon_mean(&pair.vector);
        assert!(photons < 5e-3, "{photons}");
    }

    #[test]
    fn cap_reported() {
        let p = ModelParams::new(1.0, 1.0, 20).unwrap();
        let settings = GroundSettings {
            nu_max_cap: 30,
            ..GroundSettings::default()
        };
        assert!(matches!(
            converged_ground_with(&p, Parity::Even, &settings),
            Err(DickeError::TruncationCap { .. })
        ));
    }
}
