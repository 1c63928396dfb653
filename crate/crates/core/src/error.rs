use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("filter asset error: {0}")]
    Asset(String),
    #[error("unsupported grid size {dims:?}: every dimension must be at least {min}")]
    UnsupportedSize { dims: Vec<usize>, min: usize },
    #[error("singular frame: minimum frame weight {min:e} is below {floor:e}")]
    SingularFrame { min: f64, floor: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("degenerate mask: no observed samples")]
    DegenerateMask,
    #[error("degenerate ground truth: zero energy after blurring")]
    DegenerateTruth,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
