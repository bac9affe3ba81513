use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alignment has an empty system name")]
    EmptySystemName,
    /// `(source, target, relation)`
    #[error("correspondence {0} -> {1} uses unsupported relation {2:?} (only \"=\" is supported)")]
    NonEquivalenceRelation(String, String, String),
    #[error("correspondence has an empty entity identifier")]
    EmptyEntity,
    #[error("confidence {0} is outside [0, 1]")]
    InvalidConfidence(f64),

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {0}: confidence out of range [0, 1]")]
    ConfidenceOutOfRange(usize),
    #[error("XML syntax error at byte {position}: {message}")]
    XmlSyntax { position: u64, message: String },
    #[error("cell {0} is missing entity1 or entity2")]
    MissingEntity(usize),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("universe size {universe} is smaller than |R ∪ A1 ∪ A2| = {required}")]
    UniverseTooSmall { universe: u64, required: u64 },
    #[error("duplicate system name {0:?}")]
    DuplicateSystemName(String),
    #[error("at least two systems are required, got {0}")]
    TooFewSystems(usize),
    #[error("malformed discordant matrix: {0}")]
    MalformedMatrix(String),

    #[error("McNemar statistic is undefined for n01 = n10 = 0")]
    UndefinedStatistic,

    #[error("correction {correction} is only available in {required} mode")]
    ModeMismatch {
        correction: &'static str,
        required: &'static str,
    },
    #[error("{n} systems exceeds the exhaustive-set cap of {cap}")]
    TooManySystems { n: usize, cap: usize },
    #[error("invalid hypothesis set: {0}")]
    InvalidHypotheses(String),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("baseline system {0:?} is not among the compared systems")]
    UnknownBaseline(String),

    #[error("label table is empty")]
    EmptyTable,
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("malformed report: {0}")]
    MalformedReport(String),
}
