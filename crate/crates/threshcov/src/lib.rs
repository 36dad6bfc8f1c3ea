//! Exact finite-sample coverage probabilities, worst-case (infimal) coverage,
//! and shortest fixed-width confidence intervals for intervals centered at
//! hard-thresholding, soft-thresholding (LASSO), and adaptive-LASSO estimators
//! of a Gaussian location parameter.
//!
//! The known-variance case has closed forms throughout; every closed form is
//! cross-checkable against an independent preimage engine (inverting the
//! estimator as a monotone map of the sample mean) and a seeded Monte Carlo
//! oracle. The unknown-variance (feasible, sigma-hat based) case mixes the
//! known-variance formulas over a scaled-chi density by adaptive quadrature.

pub mod coverage;
pub mod error;
pub mod estimators;
pub mod infimal;
pub mod mc;
pub mod numerics;
pub mod shortest;
pub mod unknownvar;

pub use coverage::{CoverageReport, IntervalSide, IntervalSpec, Method, OneSidedSpec};
pub use error::{Error, Result};
pub use estimators::{estimate, monotone_map, EstimatorKind, PiecewiseMonotoneMap, ProblemSetup};
pub use mc::{McConfig, McResult, McScan};
pub use shortest::{DnSpec, RegimeSpec, ShortestResult};
pub use unknownvar::QuadSpec;
