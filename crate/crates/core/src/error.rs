use thiserror::Error;

/// Errors raised by layout, model, metric and simulation operations.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("rank {rank} is out of range 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("cell (row {row}, col {col}) does not exist in this layout")]
    InvalidCell { row: usize, col: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("parameter {name} = {value} is outside its legal range {range}")]
    InvalidParameter {
        name: String,
        value: f64,
        range: &'static str,
    },
    #[error("invalid relevance: {0}")]
    InvalidRelevance(String),
    #[error("grade {grade} at rank {rank} is outside the selection map domain 0..={g_max}")]
    GradeOutOfRange { rank: usize, grade: u32, g_max: u32 },
    #[error("length mismatch for {what}: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(
        "beta row decay is a corrected formula without state-machine semantics; \
         use paper_formula_examine_prob with the slower-decay variant instead"
    )]
    BetaBoostNotAllowed,
    #[error("variant {variant} requires parameter {parameter}")]
    MissingParameter {
        variant: &'static str,
        parameter: &'static str,
    },
    #[error("simulation needs at least one trial")]
    ZeroTrials,
    #[error(
        "graded relevance (g_max = {g_max}) given to a binary metric without the binarize flag"
    )]
    NonBinaryRelevance { g_max: u32 },
    #[error("rank {rank} has no group assigned")]
    UnmappedRank { rank: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
