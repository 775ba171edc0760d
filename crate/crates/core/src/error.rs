use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("matrix has {entries} entries but shape is {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        entries: usize,
    },

    #[error("non-finite entry")]
    NonFinite,

    #[error("empty vector")]
    Empty,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("states are (nearly) parallel, |overlap| = {overlap}")]
    Parallel { overlap: f64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("target overlap |beta| = {beta} exceeds initial overlap |alpha| = {alpha}; requires |beta| <= |alpha|")]
    OverlapIncrease { alpha: f64, beta: f64 },

    #[error("operator does not map the initial states onto the targets (residual {residual:e})")]
    NotSeparating { residual: f64 },

    #[error("failure branch has zero probability; no failure state exists")]
    NoFailureState,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Domain(format!(
            "{name} must lie in [0, 1], got {value}"
        )));
    }
    Ok(())
}
