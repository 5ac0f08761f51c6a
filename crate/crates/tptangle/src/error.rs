use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix does not have determinant 1")]
    NotUnimodular,
    #[error("basis is degenerate or negatively oriented")]
    DegenerateBasis,
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("cell is not symmetric under the translation")]
    NotSymmetric,
    #[error("no regular perturbation found after {0} attempts")]
    PerturbationFailed(u32),
    #[error("projection is not regular: {0}")]
    NotRegular(String),
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("move not applicable: {0}")]
    InapplicableMove(String),
    #[error("diagram has no layout")]
    LayoutMissing,
    #[error("invalid Hermite normal form: {0}")]
    InvalidHnf(String),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid cell: {0}")]
    InvalidCell(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
