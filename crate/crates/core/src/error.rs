use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DickeError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("spin projection 2m = {two_m} is not allowed for 2j = {two_j}")]
    SpinProjection { two_m: i32, two_j: u32 },

    #[error("spin mismatch: Hamiltonian has 2j = {params}, basis has 2j = {spec}")]
    SpinMismatch { params: u32, spec: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("dense solver ceiling exceeded: dim {dim} > {ceiling}")]
    DenseCeiling { dim: usize, ceiling: usize },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "Fock truncation cap {cap} reached without convergence \
         (last nu_max {nu_max}, tail weight {tail_weight:e}, energy delta {energy_delta:e})"
    )]
    TruncationCap {
        cap: u32,
        nu_max: u32,
        tail_weight: f64,
        energy_delta: f64,
    },

    #[error("Fock truncation nu_max = {nu_max} too small: tail weight {tail_weight:e} exceeds {limit:e}")]
    TruncationTooSmall { nu_max: u32, tail_weight: f64, limit: f64 },

    #[error("argument outside domain: {0}")]
    Domain(&'static str),

    #[error("susceptibility peak at grid boundary gamma = {gamma}; widen the grid")]
    PeakAtBoundary { gamma: f64 },

    #[error("no global-minimum swap in [{lo}, {hi}]")]
    NoSwap { lo: f64, hi: f64 },

    #[error("{count} candidate wells found at gamma = {gamma}; expected two")]
    TooManyWells { count: usize, gamma: f64 },

    #[error("power-law fit needs at least 3 usable points, got {0}")]
    InsufficientPoints(usize),

    #[error("gamma_c = {gamma_c} at j = {j} is not above 1/2")]
    NotAboveHalf { j: f64, gamma_c: f64 },
}

impl DickeError {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            DickeError::InvalidParameter { .. } => "invalid_parameter",
            DickeError::SpinProjection { .. } => "spin_projection",
            DickeError::SpinMismatch { .. } => "spin_mismatch",
            DickeError::DimensionMismatch { .. } => "dimension_mismatch",
            DickeError::MalformedMatrix(_) => "malformed_matrix",
            DickeError::DenseCeiling { .. } => "dense_ceiling",
            DickeError::NoConvergence { .. } => "no_convergence",
            DickeError::TruncationCap { .. } => "truncation_cap",
            DickeError::TruncationTooSmall { .. } => "truncation_too_small",
            DickeError::Domain(_) => "domain",
            DickeError::PeakAtBoundary { .. } => "peak_at_boundary",
            DickeError::NoSwap { .. } => "no_swap",
            DickeError::TooManyWells { .. } => "too_many_wells",
            DickeError::InsufficientPoints(_) => "insufficient_points",
            DickeError::NotAboveHalf { .. } => "not_above_half",
        }
    }
}
