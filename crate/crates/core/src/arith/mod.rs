//! Coefficient rings, p-adic numbers of finite precision and the p-adic
//! logarithm.

pub mod log;
pub mod params;
pub mod qp;
pub mod ring;
pub mod valuation;

pub use log::{extend_log, extend_log_precision, extend_log_with_exponent, padic_log};
pub use params::RingParams;
pub use qp::{QpElem, Valuation};
pub use ring::RingElem;
pub use valuation::{factorial_valuation, term_valuation_bound, truncation_degree};
