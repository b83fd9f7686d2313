//! Truncated Fock ⊗ Dicke basis and the sparse Hamiltonian matrix.
//!
//! Basis states are ordered ν-major, `m` ascending within each photon
//! number. A smaller truncation is therefore always a prefix of a larger one
//! in the same sector, which lets eigenvectors be padded with zeros when the
//! truncation grows.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::model::{BasisLabel, ModelParams, Parity};
use crate::{DickeError, Result};

/// Description of a truncated, optionally parity-filtered basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpec {
    pub two_j: u32,
    pub nu_max: u32,
    pub sector: Option<Parity>,
}

impl HilbertSpec {
    pub fn new(two_j: u32, nu_max: u32, sector: Option<Parity>) -> Self {
        Self { two_j, nu_max, sector }
    }

    pub fn for_params(params: &ModelParams, nu_max: u32, sector: Option<Parity>) -> Self {
        Self::new(params.two_j(), nu_max, sector)
    }

    /// Dimension of the unfiltered space, `(2j + 1)(ν_max + 1)`.
    pub fn full_dim(&self) -> usize {
        (self.two_j as usize + 1) * (self.nu_max as usize + 1)
    }
}

/// Enumerated basis with O(1) label lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    spec: HilbertSpec,
    labels: Vec<BasisLabel>,
    // Index of the first state with photon number ν.
    offsets: Vec<usize>,
}

impl Basis {
    pub fn new(spec: HilbertSpec) -> Self {
        let mut labels = Vec::with_capacity(spec.full_dim());
        let mut offsets = Vec::with_capacity(spec.nu_max as usize + 2);
        for nu in 0..=spec.nu_max {
            offsets.push(labels.len());
            for k in 0..=spec.two_j {
                if let Some(sector) = spec.sector {
                    if Parity::of_excitations(nu as u64 + k as u64) != sector {
                        continue;
                    }
                }
                labels.push(BasisLabel::new(nu, 2 * k as i32 - spec.two_j as i32));
            }
        }
        offsets.push(labels.len());
        Self { spec, labels, offsets }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        if label.nu > self.spec.nu_max || label.validate(self.spec.two_j).is_err() {
            return None;
        }
        let k = label.atomic_excitations(self.spec.two_j) as usize;
        let base = self.offsets[label.nu as usize];
        match self.spec.sector {
            None => Some(base + k),
            Some(sector) => {
                if Parity::of_excitations(label.nu as u64 + k as u64) != sector {
                    return None;
                }
                // Allowed k within one ν share a parity and step by two.
                let first = (label.nu as usize + (sector == Parity::Odd) as usize) % 2;
                Some(base + (k - first) / 2)
            }
        }
    }

    /// `⟨a†a⟩` for real amplitudes over this basis.
    pub fn photon_mean(&self, v: &[f64]) -> f64 {
        self.weighted(v, |l| l.nu as f64)
    }

    /// `⟨J_z⟩` for real amplitudes over this basis.
    pub fn jz_mean(&self, v: &[f64]) -> f64 {
        self.weighted(v, |l| l.m())
    }

    /// Probability carried by the top decile of Fock levels.
    pub fn tail_weight(&self, v: &[f64]) -> f64 {
        let levels = self.spec.nu_max as usize + 1;
        let top = levels.div_ceil(10);
        let start = self.offsets[levels - top];
        v[start..].iter().map(|x| x * x).sum()
    }

    fn weighted(&self, v: &[f64], f: impl Fn(&BasisLabel) -> f64) -> f64 {
        let norm: f64 = v.iter().map(|x| x * x).sum();
        let s: f64 = self.labels.iter().zip(v).map(|(l, x)| f(l) * x * x).sum();
        s / norm
    }
}

pub fn enumerate_basis(spec: HilbertSpec) -> Vec<BasisLabel> {
    Basis::new(spec).labels
}

/// Real symmetric matrix stored as its upper triangle, with a CSR copy of
/// the full pattern for products.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    truncated: bool,
    sector: Option<Parity>,
}

impl SparseSymmetricMatrix {
    /// Builds from upper-triangle triplets. Entries are sorted; duplicates,
    /// lower-triangle or out-of-range positions are rejected.
    pub fn from_upper_entries(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| (e.0, e.1));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(DickeError::MalformedMatrix(alloc::format!(
                    "duplicate entry ({}, {})",
                    w[0].0,
                    w[0].1
                )));
            }
        }
        for &(r, c, v) in &entries {
            if r > c || c >= dim || !v.is_finite() {
                return Err(DickeError::MalformedMatrix(alloc::format!(
                    "bad entry ({r}, {c}) = {v} for dim {dim}"
                )));
            }
        }
        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in &entries {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let nnz = row_ptr[dim];
        let mut fill = counts;
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        // Two passes keep columns ascending within each row.
        for &(r, c, v) in &entries {
            if r != c {
                cols[fill[c]] = r;
                vals[fill[c]] = v;
                fill[c] += 1;
            }
        }
        for &(r, c, v) in &entries {
            cols[fill[r]] = c;
            vals[fill[r]] = v;
            fill[r] += 1;
        }
        Ok(Self {
            dim,
            entries,
            row_ptr,
            cols,
            vals,
            truncated: false,
            sector: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper-triangle triplets `(row, col, value)` with `row ≤ col`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz_upper(&self) -> usize {
        self.entries.len()
    }

    /// True when couplings out of the top Fock level were dropped.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn sector(&self) -> Option<Parity> {
        self.sector
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        let span = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match span.binary_search(&c) {
            Ok(i) => self.vals[self.row_ptr[r] + i],
            Err(_) => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[r];
            let hi = self.row_ptr[r + 1];
            let mut acc = 0.0;
            for i in lo..hi {
                acc += self.vals[i] * x[self.cols[i]];
            }
            *out = acc;
        }
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        crate::math::dot(x, &y)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for &(r, c, v) in &self.entries {
            a[r * n + c] = v;
            a[c * n + r] = v;
        }
        a
    }
}

/// Which interaction terms to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `(a† + a)(J₊ + J₋)`.
    Full,
    /// Rotating terms only, `a†J₋ + aJ₊`; conserves Λ.
    RotatingWave,
}

/// Assembles the Hamiltonian on the basis described by `spec`.
pub fn build_hamiltonian(params: &ModelParams, spec: &HilbertSpec) -> Result<SparseSymmetricMatrix> {
    assemble(params, &Basis::new(*spec), Coupling::Full)
}

pub(crate) fn assemble(params: &ModelParams, basis: &Basis, coupling: Coupling) -> Result<SparseSymmetricMatrix> {
    let spec = basis.spec();
    if spec.two_j != params.two_j() {
        return Err(DickeError::SpinMismatch {
            params: params.two_j(),
            spec: spec.two_j,
        });
    }
    let n = params.n();
    let two_j = spec.two_j as i64;
    let g = params.gamma() / (n * sqrt(n));
    let mut entries = Vec::with_capacity(basis.len() * 3);
    for (row, label) in basis.labels().iter().enumerate() {
        entries.push((row, row, label.nu as f64 / n + params.omega_a() * label.m() / n));
        if g == 0.0 || label.nu == spec.nu_max {
            continue;
        }
        // a† raises ν; J± changes 2m by ±2. Upper triangle only: target has ν + 1.
        let photon = sqrt(label.nu as f64 + 1.0);
        for dm in [2i32, -2] {
            let counter_rotating = dm > 0;
            if coupling == Coupling::RotatingWave && counter_rotating {
                continue;
            }
            let target = BasisLabel::new(label.nu + 1, label.two_m + dm);
            if let Some(col) = basis.index_of(target) {
                // 4(j(j+1) − m m′) in exact integers.
                let arg = two_j * (two_j + 2) - label.two_m as i64 * target.two_m as i64;
                entries.push((row, col, g * photon * 0.5 * sqrt(arg as f64)));
            }
        }
    }
    let mut m = SparseSymmetricMatrix::from_upper_entries(basis.len(), entries)?;
    m.truncated = g != 0.0;
    m.sector = spec.sector;
    Ok(m)
}

/// Max-norm of `ΠH − HΠ` with Π the diagonal parity-sign matrix.
pub fn parity_commutator_check(params: &ModelParams, spec: &HilbertSpec) -> Result<f64> {
    let basis = Basis::new(*spec);
    let h = assemble(params, &basis, Coupling::Full)?;
    Ok(commutator_with_diagonal(&h, |i| {
        let l = basis.labels()[i];
        let lambda = l.nu as u64 + l.atomic_excitations(spec.two_j) as u64;
        Parity::of_excitations(lambda).sign()
    }))
}

/// Max-norm of `DA − AD` for a diagonal `D` given entrywise.
pub fn commutator_with_diagonal(a: &SparseSymmetricMatrix, d: impl Fn(usize) -> f64) -> f64 {
    a.entries()
        .iter()
        .map(|&(r, c, v)| ((d(r) - d(c)) * v).abs())
        .fold(0.0, f64::max)
}
