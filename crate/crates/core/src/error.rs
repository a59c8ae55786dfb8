use thiserror::Error;

/// Errors raised by the model, analysis and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("chain depth mismatch: {dists} distributions but {links} links")]
    DepthMismatch { dists: usize, links: usize },
    #[error("non-finite objective at theta = ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
