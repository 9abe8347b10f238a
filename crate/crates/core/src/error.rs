use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no quotients")]
    NoQuotients,
    #[error("invalid quotient at position {0}")]
    InvalidQuotient(usize),
    #[error("insufficient depth: level {level} needs depth {needed}, have {depth}")]
    InsufficientDepth { level: usize, needed: usize, depth: usize },
    #[error("synthesis infeasible at level {0}")]
    SynthesisInfeasible(usize),
    #[error("window check failed at level {level}: {detail}")]
    WindowViolation { level: usize, detail: String },
    #[error("truncation too coarse for K = {0}")]
    TruncationTooCoarse(u64),
    #[error("orbit would alias at truncation (N = {n}, denominator {den})")]
    OrbitAlias { n: u64, den: String },
    #[error("empty prefix")]
    EmptyPrefix,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("cube order: generation(A) = {ga} < generation(B) = {gb}")]
    CubeOrder { ga: u32, gb: u32 },
    #[error("insufficient entropy bits: need {needed}, have {available}")]
    InsufficientEntropy { needed: usize, available: usize },
    #[error("empty scan")]
    EmptyScan,
    #[error("interleaving failure at level {level}: {detail}")]
    Interleaving { level: usize, detail: String },
    #[error("indeterminate comparison ({0}); deepen alpha")]
    Indeterminate(String),
    #[error("missing containment certificate at level {level} ({regime})")]
    MissingCertificate { level: usize, regime: String },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
