//! Closed-form finite-sample coverage probabilities, known variance.
//!
//! Intervals are [est - sigma a, est + sigma b]; half-widths are in noise
//! units, so all formulas reduce to the sigma = 1 case. Branch selection
//! compares theta against the products sigma*a and sigma*b directly, which
//! keeps atom bookkeeping bit-consistent with the preimage engine at the
//! finitely many theta where endpoint flags matter.

use crate::error::{Error, Result};
use crate::estimators::{coverage_by_preimage, EstimatorKind, ProblemSetup};
use crate::numerics::special::phi;

/// Two-sided interval shape: half-widths and endpoint-inclusion flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSpec {
    a: f64,
    b: f64,
    lower_closed: bool,
    upper_closed: bool,
}

impl IntervalSpec {
    pub fn new(a: f64, b: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0 && b.is_finite() && b >= 0.0) {
            return Err(Error::Domain(format!(
                "IntervalSpec: half-widths must be finite and nonnegative, got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            a,
            b,
            lower_closed,
            upper_closed,
        })
    }

    pub fn closed(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, true, true)
    }

    pub fn open(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, false, false)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.b
    }

    /// Mirror image: half-widths and flags exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            lower_closed: self.upper_closed,
            upper_closed: self.lower_closed,
        }
    }
}

/// Which side a one-sided interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSide {
    /// (-inf, est + c]
    UpperBound,
    /// [est - c, inf)
    LowerBound,
}

/// One-sided interval shape.
#[derive(Debug, Clone, Copy)]
pub struct OneSidedSpec {
    pub c: f64,
    pub side: IntervalSide,
    pub closed: bool,
}

impl OneSidedSpec {
    pub fn new(c: f64, side: IntervalSide, closed: bool) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Domain(format!(
                "OneSidedSpec: c must be finite and nonnegative, got {c}"
            )));
        }
        Ok(Self { c, side, closed })
    }
}

/// How a coverage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Preimage,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Preimage => "preimage",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// A coverage value with provenance and an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct CoverageReport {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
}

impl CoverageReport {
    fn closed_form(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method: Method::ClosedForm,
            err_estimate: 5e-16,
        }
    }

    fn preimage(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method: Method::Preimage,
            err_estimate: 5e-15,
        }
    }

    pub(crate) fn quadrature(value: f64, err: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method: Method::Quadrature,
            err_estimate: err,
        }
    }
}

/// gamma^(-) of the adaptive-LASSO distribution theory.
pub fn gamma_minus(theta: f64, x: f64, eta: f64) -> f64 {
    -((theta + x) / 2.0) - (((theta - x) / 2.0).powi(2) + eta * eta).sqrt()
}

/// gamma^(+) of the adaptive-LASSO distribution theory.
pub fn gamma_plus(theta: f64, x: f64, eta: f64) -> f64 {
    -((theta + x) / 2.0) + (((theta - x) / 2.0).powi(2) + eta * eta).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Below,
    Middle,
    Above,
}

/// Branch of the piecewise coverage formulas, with endpoint flags deciding
/// ownership of theta = -sigma a and theta = sigma b.
fn branch_for(theta: f64, setup: &ProblemSetup, interval: &IntervalSpec) -> Branch {
    let lo_edge = -(setup.sigma() * interval.a());
    let hi_edge = setup.sigma() * interval.b();
    if theta < lo_edge || (theta == lo_edge && !interval.lower_closed()) {
        Branch::Below
    } else if theta > hi_edge || (theta == hi_edge && !interval.upper_closed()) {
        Branch::Above
    } else {
        Branch::Middle
    }
}

/// Soft-thresholding coverage: piecewise constant in theta with jumps at
/// theta = -sigma a and theta = sigma b.
pub fn coverage_soft(setup: &ProblemSetup, interval: &IntervalSpec, theta: f64) -> CoverageReport {
    let rn = setup.sqrt_n();
    let (a, b, eta) = (interval.a(), interval.b(), setup.eta());
    let value = match branch_for(theta, setup, interval) {
        Branch::Below => phi(rn * (a - eta)) - phi(rn * (-b - eta)),
        Branch::Middle => phi(rn * (a + eta)) - phi(rn * (-b - eta)),
        Branch::Above => phi(rn * (a + eta)) - phi(rn * (-b + eta)),
    };
    CoverageReport::closed_form(value)
}

/// Adaptive-LASSO coverage in terms of gamma^(+/-); continuous except at
/// theta = -sigma a and theta = sigma b.
pub fn coverage_adaptive(
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta: f64,
) -> CoverageReport {
    let rn = setup.sqrt_n();
    let eta = setup.eta();
    let t = theta / setup.sigma();
    let (a, b) = (interval.a(), interval.b());
    let value = match branch_for(theta, setup, interval) {
        Branch::Below => phi(rn * gamma_minus(t, -a, eta)) - phi(rn * gamma_minus(t, b, eta)),
        Branch::Middle => phi(rn * gamma_plus(t, -a, eta)) - phi(rn * gamma_minus(t, b, eta)),
        Branch::Above => phi(rn * gamma_plus(t, -a, eta)) - phi(rn * gamma_plus(t, b, eta)),
    };
    CoverageReport::closed_form(value)
}

/// Hard-thresholding coverage for symmetric intervals [est - sigma a, est + sigma a];
/// symmetric in theta. The three case formulas split on how eta compares to a.
pub fn coverage_hard_symmetric(
    setup: &ProblemSetup,
    a: f64,
    theta: f64,
    lower_closed: bool,
    upper_closed: bool,
) -> Result<CoverageReport> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Domain(format!(
            "coverage_hard_symmetric: a must be nonnegative, got {a}"
        )));
    }
    let sigma = setup.sigma();
    let rn = setup.sqrt_n();
    let eta = setup.eta();
    let t = theta.abs();
    let z = t / sigma;
    let sa = sigma * a;
    let s_eta_plus_a = sigma * (eta + a);
    let full = phi(rn * a) - phi(-rn * a);
    let atom = |z: f64| phi(rn * (eta - z)) - phi(rn * (-z - eta));

    let mut value = if eta > 2.0 * a {
        if t <= sa {
            atom(z)
        } else if t <= s_eta_plus_a {
            (phi(rn * a) - phi(rn * (eta - z))).max(0.0)
        } else {
            full
        }
    } else if eta >= a {
        if t <= sigma * (eta - a) {
            atom(z)
        } else if t <= sa {
            phi(rn * a) - phi(rn * (-z - eta))
        } else if t <= s_eta_plus_a {
            phi(rn * a) - phi(rn * (eta - z))
        } else {
            full
        }
    } else {
        if t <= sigma * (a - eta) {
            full
        } else if t <= sa {
            phi(rn * a) - phi(rn * (-z - eta))
        } else if t <= s_eta_plus_a {
            phi(rn * a) - phi(rn * (eta - z))
        } else {
            full
        }
    };

    // open variants lose the atom at the two discontinuity points
    if (theta == -sa && !lower_closed) || (theta == sa && !upper_closed) {
        value -= atom(z);
    }
    Ok(CoverageReport::closed_form(value))
}

/// Hard-thresholding coverage for general (possibly asymmetric) intervals.
/// There is no closed form here; the preimage engine is exact.
pub fn coverage_hard_general(
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta: f64,
) -> CoverageReport {
    CoverageReport::preimage(coverage_by_preimage(
        EstimatorKind::Hard,
        setup,
        interval,
        theta,
    ))
}

/// Coverage dispatch by estimator kind (known variance).
pub fn coverage(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta: f64,
) -> CoverageReport {
    match kind {
        EstimatorKind::Soft => coverage_soft(setup, interval, theta),
        EstimatorKind::AdaptiveLasso => coverage_adaptive(setup, interval, theta),
        EstimatorKind::Hard => coverage_hard_general(setup, interval, theta),
    }
}

/// Distribution function of sqrt(n) (est_A - theta); right-continuous, with a
/// jump at x = -sqrt(n) theta of size Phi(sqrt n (eta - theta)) - Phi(sqrt n (-theta - eta))
/// (sigma = 1 units; theta is reduced by sigma internally).
pub fn adaptive_cdf(setup: &ProblemSetup, theta: f64, x: f64) -> f64 {
    let rn = setup.sqrt_n();
    let t = rn * theta / setup.sigma();
    let n_eta_sq = (setup.n() as f64) * setup.eta() * setup.eta();
    let root = (((t + x) / 2.0).powi(2) + n_eta_sq).sqrt();
    if x + t >= 0.0 {
        phi(-((t - x) / 2.0) + root)
    } else {
        phi(-((t - x) / 2.0) - root)
    }
}
