use thiserror::Error;

/// Failure to read a symbol expression. `position` is a byte offset into the
/// input text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("block {rows}x{cols} exceeds the {limit}x{limit} size limit")]
    SizeLimit {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected a {expected} block, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error(
        "truncation {size} is not stable: entry ({row}, {col}) of the {block}x{block} block \
         moved by {divergence:e} when the truncation was doubled"
    )]
    Unstable {
        size: usize,
        block: usize,
        row: usize,
        col: usize,
        divergence: f64,
    },

    #[error("integrand needs exactness ({needed_angular}, {needed_radial}) but the rule provides ({angular}, {radial})")]
    DegreeExceedsRule {
        needed_angular: usize,
        needed_radial: usize,
        angular: usize,
        radial: usize,
    },

    #[error("unbounded symbol: {0}")]
    UnboundedSymbol(String),

    #[error("malformed offsets: {0}")]
    MalformedOffsets(String),

    #[error("vertex counts differ: {0} vs {1}")]
    VertexMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidAlpha(_) => "invalid_alpha",
            Error::Parse(_) => "parse",
            Error::SizeLimit { .. } => "size_limit",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::WrongKind { .. } => "wrong_kind",
            Error::Unstable { .. } => "unstable_truncation",
            Error::DegreeExceedsRule { .. } => "degree_exceeds_rule",
            Error::UnboundedSymbol(_) => "unbounded_symbol",
            Error::MalformedOffsets(_) => "malformed_offsets",
            Error::VertexMismatch(..) => "vertex_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Format(_) => "format",
            Error::Json(_) => "json",
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
