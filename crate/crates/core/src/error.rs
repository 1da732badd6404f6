use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point is not on the hyperboloid: {0}")]
    NotOnHyperboloid(String),

    #[error("point too close to the ideal boundary: squared norm {norm_sq}")]
    BoundaryProximity { norm_sq: f64 },

    #[error("point lies outside the half-space model (first coordinate {0})")]
    HalfSpaceDomain(f64),

    #[error("point maps to the inversion center and has no half-space image")]
    DegeneratePoint,

    #[error("pair of points has Minkowski inner product {0} < 1")]
    DistanceDomain(f64),

    #[error("weights are not space-like (w*w = {0} must be negative)")]
    InfeasibleWeights(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical failure at iteration {iteration}: {what}")]
    Numerical { iteration: usize, what: String },

    #[error("degenerate calibration: {0}")]
    DegenerateCalibration(&'static str),

    #[error("no class could be evaluated (all excluded)")]
    AllClassesExcluded,

    #[error("geometry mismatch: model is {model}, features are {features}")]
    GeometryMismatch {
        model: &'static str,
        features: &'static str,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("label generation failed after {attempts} attempts for size range {min}..={max}")]
    LabelGeneration {
        attempts: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {source}")]
    Format {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code for command-line use: 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } => 3,
            Error::Context { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
