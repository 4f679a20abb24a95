use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least one user distance is required")]
    NoUsers,
    #[error("distance of user {index} must be positive and finite, got {value}")]
    NonPositiveDistance { index: usize, value: f64 },
    #[error("distances must be strictly increasing: user {index} at {value} km does not exceed its predecessor")]
    UnsortedDistances { index: usize, value: f64 },
    #[error("user {index} at {value} km lies beyond the cell radius {radius} km")]
    BeyondRadius {
        index: usize,
        value: f64,
        radius: f64,
    },
    #[error("cell radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("path loss exponent must be positive and finite, got {0}")]
    InvalidPathLossExponent(f64),
    #[error("group count {groups} must lie in 1..={users}")]
    GroupCountOutOfRange { groups: usize, users: usize },
    #[error("user index {index} out of range for {users} users")]
    UserOutOfRange { index: usize, users: usize },
    #[error("group index {index} out of range for {groups} groups")]
    GroupOutOfRange { index: usize, groups: usize },
    #[error("total power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("noise variance must be positive and finite, got {0}")]
    InvalidNoiseVariance(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("QPSK maps exactly 2 bits per symbol, got {0}")]
    WrongArity(usize),
    #[error("bit values must be 0 or 1, got {0}")]
    NonBinary(u8),
    #[error("a QPSK frame needs an even number of bits, got {0}")]
    OddFrameLength(usize),
    #[error("TDMA sum rate must be positive to form a ratio, got {0}")]
    NonPositiveBaseline(f64),
}
