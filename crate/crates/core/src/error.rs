use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset has no rows")]
    EmptyDataset,

    /// The training objective became NaN or infinite.
    #[error("objective diverged at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("malformed group annotation: {0}")]
    MalformedGroups(String),

    #[error("column {column} is not standardized (mean {mean:e}, variance {variance:e})")]
    NotStandardized {
        column: usize,
        mean: f64,
        variance: f64,
    },

    /// A metric was requested on inputs where it has no definition.
    #[error("metric undefined: {0}")]
    Undefined(String),
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

pub(crate) fn check_finite<'a>(
    context: &'static str,
    values: impl IntoIterator<Item = &'a f64>,
) -> Result<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}
