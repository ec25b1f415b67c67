use thiserror::Error;

/// Errors raised by the projection engine and the solvers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The velocity polyhedron `{v : W v >= w}` is empty. Typically the
    /// constraint gradients lose the Mangasarian-Fromovitz property at the
    /// current iterate.
    #[error("velocity cone is infeasible (row {row})")]
    InfeasibleCone { row: usize },

    #[error("projection did not reach a KKT certificate within {iterations} iterations")]
    MaxIterations { iterations: usize },

    #[error("degenerate constraint row {row}: gradient has zero norm")]
    DegenerateRow { row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
