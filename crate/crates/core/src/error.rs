use crate::dyadic::GeometryError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("degenerate region: zero volume")]
    DegenerateRegion,
    #[error("kernel singularity at coincident points")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("threshold search diverged at c = {c:e} for cube {cube}")]
    ThresholdDiverged { c: f64, cube: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<csv::IntoInnerError<csv::Writer<Vec<u8>>>> for Error {
    fn from(e: csv::IntoInnerError<csv::Writer<Vec<u8>>>) -> Self {
        Error::Format(e.to_string())
    }
}
