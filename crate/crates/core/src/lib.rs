//! Stepped factorial products `a (a+b) (a+2b) ...`, their values at half
//! indices, the Wallis-type infinite products they generate and the
//! Euler–Maclaurin constants of their large-index behaviour.
//!
//! Every headline value has two independent routes:
//!
//! * finite products against exact integer arithmetic and their splitting identity,
//! * half-index values from Beta-type integrals against a log-gamma interpolation,
//! * infinite products against quadrature,
//! * fitted asymptotic constants against closed forms, tied together by four relations.

pub mod asymptotics;
pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod fmt;
pub mod interpolation;
pub mod products;
pub mod quadrature;
pub mod sum;
pub mod verify;
pub mod wallis;

pub use error::{Error, Result};
pub use products::{ProductKind, ProductParams};
