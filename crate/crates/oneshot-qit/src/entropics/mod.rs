//! One-shot entropic quantities: hypothesis-testing and max relative
//! entropies, their mutual-information forms, and smoothed variants with
//! certified brackets.

pub mod dmax;
pub mod hypo;
pub mod smooth;
pub mod tester;
pub mod value;

pub use dmax::{d_max, i_max};
pub use hypo::{d_hypo, i_hypo, marginal_product};
pub use smooth::{
    d_max_smooth, d_max_smooth_with, i_max_smooth, i_max_smooth_with, MarginalConvention,
    SmoothOutcome, SmoothingBall, SMOOTH_MAX_PROBES, SMOOTH_RESOLUTION_BITS,
};
pub use tester::Tester;
pub use value::EntropicValue;
