use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse angle from {0:?}")]
    BadAngle(String),
    #[error("angle {angle} is not periodic under multiplication by {base}")]
    PreperiodicAngle { angle: String, base: u64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutation of degree {degree} cannot be realized by multiplication by {base}")]
    DegreeTooHigh { degree: usize, base: u64 },
    #[error("instance too large: {candidates} candidate angles exceeds the limit of {limit}")]
    InstanceTooLarge { candidates: u128, limit: u64 },
    #[error("orbits overlap or have different bases")]
    OverlappingOrbits,
    #[error("{0} is not the combinatorics of a doubling orbit")]
    NotM2Combinatorics(String),
    #[error("the angle 0 has no partner")]
    ZeroAngle,
    #[error("portrait in the given limb is {0}, not primitive")]
    NotPrimitive(String),
    #[error("no third cycle found")]
    NoThirdCycle,
    #[error("third cycle is not unique: {0} candidates")]
    NonUniqueThirdCycle(usize),
    #[error("multiplication by {0} does not commute with the half turn")]
    EvenBase(u64),
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("point is not repelling (|lambda| = {0})")]
    NonRepelling(f64),
    #[error("critical point does not lie in the immediate basin of 0")]
    NotInBasin,
    #[error("continuation failed: {0}")]
    ContinuationFailure(String),
    #[error("parameter is not in the limb of angle {0}")]
    WrongLimb(String),
    #[error("ray tracing failed: {0}")]
    RayFailure(String),
    #[error("rays do not co-land: {0}")]
    NotInLimb(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
