//! Two-stage stochastic VCG mechanism for selling a random good, such as
//! renewable generation, to load-serving entities (LSEs).
//!
//! Day ahead, LSEs report a per-unit value `v` and a real-time fulfillment
//! cost `c`; the generator picks the selection that maximizes expected
//! social welfare and charges a day-ahead payment. Once generation `W = w`
//! is realized, the lowest-gamma members (`gamma = v + c`) are de-allocated
//! and real-time transfers settle the externality each LSE imposed.
//!
//! Every quantity is an exact [`Rational`]; the [`verify`] module checks
//! individual rationality, incentive compatibility, efficiency, and the
//! supporting identities on concrete instances without tolerances.

pub mod cli;
pub mod error;
pub mod generator;
pub mod model;
pub mod payments;
pub mod rational;
pub mod scenario;
pub mod solver;
pub mod verify;
pub mod welfare;

pub use error::{Error, Result};
pub use model::{Bid, GenerationPmf, Instance, LseId, PaymentCase, PaymentSchedule, Selection};
pub use rational::Rational;
