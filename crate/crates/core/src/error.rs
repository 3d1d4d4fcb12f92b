use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("subspace is not contained in the given space")]
    NotContained,

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("matrix is not a filtered map: image of F_{filtration}^{index} escapes G_{filtration}^{index}")]
    NotFiltered { filtration: usize, index: i64 },

    #[error("filtrations are not splittable: sum of dim D^p is {d_total}, dim V is {dim}")]
    NotSplittable { d_total: usize, dim: usize },

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("chart omitting filtration {omitted} is not splittable (filtrations {subset:?})")]
    NotChartSplittable { omitted: usize, subset: Vec<usize> },

    #[error("strictness order {r} out of range 1..={n}")]
    StrictnessRange { r: usize, n: usize },

    #[error("number of filtrations differs: {left} vs {right}")]
    FiltrationCountMismatch { left: usize, right: usize },

    #[error("degree window insufficient: {0}")]
    WindowInsufficient(String),

    #[error("graded module has torsion in degree {degree:?}")]
    TorsionPresent { degree: Vec<i64> },

    #[error("invalid graded module: {0}")]
    InvalidModule(String),

    #[error("connection is not flat")]
    NotFlat,

    #[error("gauge recursion inconsistent at degree {degree:?}")]
    InconsistentRecursion { degree: Vec<i64> },

    #[error("invalid connection: {0}")]
    InvalidConnection(String),

    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    #[error("complex has no real structure")]
    NoRealStructure,

    #[error("invalid bigraded complex: {0}")]
    InvalidComplex(String),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check failed. Never expected on valid input.
    #[error("internal consistency check failed: {0}")]
    Defect(String),
}

impl Error {
    /// Mathematical rejections (as opposed to malformed input).
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::NotSplittable { .. }
                | Error::NotChartSplittable { .. }
                | Error::TorsionPresent { .. }
                | Error::NotFlat
                | Error::NoRealStructure
                | Error::WindowInsufficient(_)
                | Error::InconsistentRecursion { .. }
                | Error::Defect(_)
        )
    }
}
