//! Link-level simulation of a hybrid TIM-NOMA downlink.
//!
//! A single-antenna base station serves `K` single-antenna users that are
//! split into `T` groups. Each group is carried on its own orthonormal
//! precoding vector spread over `T` time slots, so a receiver removes every
//! other group's signal by projecting onto its own vector. What remains is a
//! power-domain superposition of the users in its group, which it peels apart
//! with successive interference cancellation.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`]: cell geometry, path loss, grouping, power allocation.
//! * [`channel`]: Rayleigh block fading and complex AWGN.
//! * [`precoding`]: group precoding basis and transmit superposition.
//! * [`modem`]: Gray-mapped QPSK.
//! * [`receiver`]: projection, SIC planning, ML detection.
//! * [`analytics`]: achievable rates, TDMA baseline, DoF.
//! * [`harness`]: configuration, Monte Carlo experiments, CSV output.
//!
//! User indices are zero-based throughout the API: index `0` is the user
//! nearest the base station. Output files label users one-based.

pub mod analytics;
pub mod channel;
pub mod harness;
pub mod modem;
pub mod precoding;
pub mod receiver;
pub mod topology;

mod error;

pub use error::Error;

/// Complex baseband sample.
pub type Complex = num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;
