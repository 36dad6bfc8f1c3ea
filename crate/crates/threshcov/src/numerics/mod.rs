//! Self-contained special functions, root finding, and quadrature.
//!
//! Everything here is pure and reentrant; no shared mutable state.

pub mod quad;
pub mod roots;
pub mod special;

pub use quad::{integrate, integrate_split, QuadResult};
pub use roots::{find_root_increasing, Bracket, RootResult, Tolerance};
pub use special::{
    erf, erfc, inc_beta, inc_gamma_lower, ln_gamma, scaled_chi_cdf, scaled_chi_density,
    std_normal_cdf, std_normal_quantile, student_t_cdf,
};
