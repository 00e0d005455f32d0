use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("index {index} out of range 0..{bound}")]
    Index { index: usize, bound: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("alpha = {alpha} hits the pole at -{eigenvalue}")]
    Pole { alpha: f64, eigenvalue: f64 },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("structural error: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, bound: usize) -> Result<()> {
    if index < bound {
        Ok(())
    } else {
        Err(Error::Index { index, bound })
    }
}
