use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet shape mismatch: ({0}, {1}) vs ({2}, {3}) (nvars, order)")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("need at least {needed} Taylor coefficients, got {got}")]
    InsufficientTaylor { needed: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("cannot differentiate an order-0 jet")]
    ZeroOrder,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("undeclared variable `{name}` at offset {offset}")]
    UndeclaredVariable { name: String, offset: usize },

    #[error("function `{name}` takes {expected} argument(s), got {got} (offset {offset})")]
    Arity { name: String, expected: usize, got: usize, offset: usize },

    #[error("map file line {line}: {message}")]
    MapSpec { line: usize, message: String },

    #[error("point has {got} coordinates, map has {expected} variables")]
    PointArity { expected: usize, got: usize },

    #[error("rank-deficient Jacobian at the base point and no normal supplied")]
    RankDeficient,

    #[error("normal vector vanishes at the base point")]
    VanishingNormal,

    #[error("map kind mismatch: {0}")]
    Kind(String),

    #[error("point is not on the model space: {0}")]
    OffModel(String),

    #[error("hypothesis fails: {0}")]
    Hypothesis(String),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(..) => "shape_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InsufficientTaylor { .. } => "insufficient_taylor",
            Error::NonSquare { .. } => "non_square",
            Error::ZeroOrder => "zero_order",
            Error::Domain(_) => "domain",
            Error::Syntax { .. } => "syntax",
            Error::UndeclaredVariable { .. } => "undeclared_variable",
            Error::Arity { .. } => "arity",
            Error::MapSpec { .. } => "map_spec",
            Error::PointArity { .. } => "point_arity",
            Error::RankDeficient => "rank_deficient",
            Error::VanishingNormal => "vanishing_normal",
            Error::Kind(_) => "kind",
            Error::OffModel(_) => "off_model",
            Error::Hypothesis(_) => "hypothesis",
            Error::Unsupported(_) => "unsupported",
        }
    }
}
