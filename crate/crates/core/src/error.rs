use crate::model::LseId;
use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("probability mass function is empty")]
    EmptyPmf,
    #[error("probability mass function sums to {sum}, not 1")]
    PmfNotNormalized { sum: Rational },
    #[error("negative probability {value} at generation level {w}")]
    NegativeProbability { w: usize, value: Rational },
    #[error("max_generation is {max_generation} but the pmf has {len} entries")]
    PmfLengthMismatch { max_generation: usize, len: usize },
    #[error("duplicate LSE id {0}")]
    DuplicateLseId(LseId),
    #[error("LSE ids must cover 1..={count}; id {missing} is missing")]
    MissingLseId { missing: LseId, count: usize },
    #[error("LSE {id} has negative valuation {value}")]
    NegativeValuation { id: LseId, value: Rational },
    #[error("true types must list exactly the bidding LSE ids")]
    TrueTypesMismatch,
    #[error("true types are required for this check")]
    MissingTrueTypes,
    #[error("generation level {w} out of range 0..={max}")]
    WOutOfRange { w: usize, max: usize },
    #[error("{n} LSEs exceed the brute-force cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("rank {rank} out of range 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("LSE {0} is not in the selection")]
    NotAMember(LseId),
    #[error("LSE {0} is already in the selection")]
    IsAMember(LseId),
    #[error("unknown LSE id {0}")]
    UnknownLse(LseId),
    #[error("could not sample distinct gamma values after {attempts} attempts")]
    RetryExhausted { attempts: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}
