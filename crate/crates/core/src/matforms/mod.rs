//! Matrices over O_F / p^M and matrix-valued differential-form power series.

pub mod form;
pub mod matrix;
pub mod phi;

pub use form::{FormKey, FormSeries};
pub use matrix::{mat_inverse_one_plus, OMatrix};
pub use phi::{phi, phi_exact, phi_wedge, simplex_weight};
