//! q-calculus primitives: the shared numerical context, infinite q-Pochhammer
//! products, q-integers and q-derivatives, bilateral Jackson sums, and small
//! numeric helpers (extrapolation, rate fits, decimal output).

mod context;
mod jackson;
mod numeric;
mod pochhammer;

pub use context::{default_precision, QContext, DEFAULT_DEGREE_BUDGET, MIN_PRECISION};
pub use jackson::{jackson_bilateral, JacksonSum};
pub use numeric::{
    cabs, cabs_f64, decimal, decimal_digits, fitted_ratio, fitted_slope, log10_abs,
    neville_at_zero, neville_at_zero_real, rel_diff, within_factor,
};
pub use pochhammer::{pochhammer_inf, pochhammer_inf_real, pochhammer_multi, q_derivative, q_integer};
