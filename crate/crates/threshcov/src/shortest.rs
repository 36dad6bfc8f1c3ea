//! Shortest fixed-coverage intervals, their asymptotic regimes, and the
//! threshold-proportional interval of the sparse regime.
//!
//! For each estimator the symmetric interval is the unique shortest one at a
//! given worst-case level delta, with half-length solving a strictly
//! increasing equation with range [0, 1). The solver brackets from zero
//! (eta/2 for hard thresholding) and grows the upper end by doubling.

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, ProblemSetup};
use crate::numerics::roots::{find_root_increasing, Bracket, Tolerance};
use crate::numerics::special::{phi, phi_inv};

/// Solved shortest half-length with the solver residual and evaluation count.
#[derive(Debug, Clone, Copy)]
pub struct ShortestResult {
    pub a_star: f64,
    pub residual: f64,
    pub evaluations: usize,
}

/// Tuning regime for the asymptotics of the half-length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSpec {
    /// sqrt(n) eta_n -> e, conservative model selection.
    Conservative { e: f64 },
    /// sqrt(n) eta_n -> infinity, consistent model selection.
    Sparse,
}

impl RegimeSpec {
    pub fn conservative(e: f64) -> Result<Self> {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::Domain(format!(
                "RegimeSpec: e must be finite and >= 0, got {e}"
            )));
        }
        Ok(RegimeSpec::Conservative { e })
    }

    /// Limit of sqrt(n) times the shortest half-length under this regime.
    /// The sparse variant needs the finite-n setup to report eta + quantile/sqrt(n)
    /// rescaled; the conservative variant is setup-free.
    pub fn scaled_half_length_limit(
        &self,
        kind: EstimatorKind,
        setup: &ProblemSetup,
        delta: f64,
    ) -> Result<f64> {
        match *self {
            RegimeSpec::Conservative { e } => asymptotic_half_length_conservative(kind, e, delta),
            RegimeSpec::Sparse => {
                Ok(setup.sqrt_n() * sparse_expansion_half_length(kind, setup, delta)?)
            }
        }
    }
}

/// Multipliers of the threshold-proportional interval [est - d1 eta, est + d2 eta].
#[derive(Debug, Clone, Copy)]
pub struct DnSpec {
    pub d_lower: f64,
    pub d_upper: f64,
}

impl DnSpec {
    pub fn symmetric(d: f64) -> Result<Self> {
        Self::asymmetric(d, d)
    }

    pub fn asymmetric(d_lower: f64, d_upper: f64) -> Result<Self> {
        if !(d_lower >= 0.0 && d_lower.is_finite() && d_upper >= 0.0 && d_upper.is_finite()) {
            return Err(Error::Domain(format!(
                "DnSpec: multipliers must be finite and >= 0, got ({d_lower}, {d_upper})"
            )));
        }
        Ok(Self { d_lower, d_upper })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    if delta > 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "delta = {delta} too close to 1 for a stable bracket"
        )));
    }
    Ok(())
}

/// Left-hand side of the defining equation for the symmetric infimal
/// coverage, as a function of the half-length a. Strictly increasing in a
/// with range [0, 1).
pub(crate) fn defining_lhs(kind: EstimatorKind, sqrt_n: f64, eta: f64, a: f64) -> f64 {
    match kind {
        EstimatorKind::Soft => phi(sqrt_n * (a - eta)) - phi(sqrt_n * (-a - eta)),
        EstimatorKind::Hard => phi(sqrt_n * (a - eta)) - phi(-sqrt_n * a),
        EstimatorKind::AdaptiveLasso => phi(sqrt_n * (a - eta)) - phi(-sqrt_n * a.hypot(eta)),
    }
}

/// The lower-tail term of the defining equation, so that the root satisfies
/// sqrt(n) (a - eta) = quantile(delta + tail(a)).
fn defining_tail(kind: EstimatorKind, sqrt_n: f64, eta: f64, a: f64) -> f64 {
    match kind {
        EstimatorKind::Soft => phi(-sqrt_n * (a + eta)),
        EstimatorKind::Hard => phi(-sqrt_n * a),
        EstimatorKind::AdaptiveLasso => phi(-sqrt_n * a.hypot(eta)),
    }
}

fn solve_defining(
    kind: EstimatorKind,
    sqrt_n: f64,
    eta: f64,
    delta: f64,
) -> Result<ShortestResult> {
    check_delta(delta)?;
    let lo = match kind {
        EstimatorKind::Hard => eta / 2.0,
        _ => 0.0,
    };
    let mut hi = eta + phi_inv((1.0 + delta) / 2.0) / sqrt_n;
    let mut grow = 0;
    let mut extra_evals = 0;
    while defining_lhs(kind, sqrt_n, eta, hi) <= delta {
        extra_evals += 1;
        hi = if hi > 0.0 { hi * 2.0 } else { 1.0 };
        grow += 1;
        if grow > 200 {
            return Err(Error::Convergence {
                iterations: grow,
                best: hi,
            });
        }
    }
    let tol = Tolerance::new(1e-12, 0.0, 200)?;
    let root = find_root_increasing(
        |a| defining_lhs(kind, sqrt_n, eta, a) - delta,
        Bracket::new(lo, hi)?,
        tol,
    )?;
    // Polish on the equivalent fixed point
    //     a = eta + quantile(delta + tail(a)) / sqrt(n),
    // which contracts at the root (ratio exp(-2 n a eta) < 1) and resolves
    // the tail shift relatively even when it is far below one ulp of delta.
    // That is what separates the soft and adaptive roots at extreme
    // thresholds, where their gap drops to the last bit of the result.
    let x0 = phi_inv(delta);
    let density0 = crate::numerics::special::phi_density(x0);
    let mut a = root.root;
    let mut evals = root.evaluations + extra_evals;
    for _ in 0..16 {
        let t = defining_tail(kind, sqrt_n, eta, a);
        evals += 1;
        let shift = if t < 1e-13 {
            t / density0
        } else {
            phi_inv((delta + t).min(1.0 - f64::EPSILON / 2.0)) - x0
        };
        let next = eta + (x0 + shift) / sqrt_n;
        if !next.is_finite() || next == a {
            break;
        }
        a = next;
    }
    let residual = defining_lhs(kind, sqrt_n, eta, a) - delta;
    Ok(ShortestResult {
        a_star: a,
        residual,
        evaluations: evals + 1,
    })
}

/// Half-length of the unique shortest interval with infimal coverage delta.
/// Always positive; for hard thresholding strictly larger than eta/2.
pub fn shortest_half_length(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    delta: f64,
) -> Result<ShortestResult> {
    solve_defining(kind, setup.sqrt_n(), setup.eta(), delta)
}

/// Half-length of the standard maximum-likelihood interval at level delta.
pub fn standard_half_length(n: u64, delta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("standard_half_length: n must be >= 1".into()));
    }
    check_delta(delta)?;
    Ok(phi_inv((1.0 + delta) / 2.0) / (n as f64).sqrt())
}

/// Conservative-regime limit of sqrt(n) times the shortest half-length:
/// the root of the defining equation with sqrt(n) eta replaced by e.
/// Also valid at e = 0, where all three limits equal the standard quantile.
pub fn asymptotic_half_length_conservative(kind: EstimatorKind, e: f64, delta: f64) -> Result<f64> {
    if !(e >= 0.0 && e.is_finite()) {
        return Err(Error::Domain(format!(
            "conservative limit: e must be finite and >= 0, got {e}"
        )));
    }
    check_delta(delta)?;
    if e == 0.0 {
        return Ok(phi_inv((1.0 + delta) / 2.0));
    }
    Ok(solve_defining(kind, 1.0, e, delta)?.a_star)
}

/// Sparse-regime expansion of the shortest half-length:
/// eta + quantile(delta)/sqrt(n), identical for all three estimators.
pub fn sparse_expansion_half_length(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    delta: f64,
) -> Result<f64> {
    let _ = kind;
    check_delta(delta)?;
    Ok(setup.eta() + phi_inv(delta) / setup.sqrt_n())
}

/// The threshold-proportional interval [est - d1 sigma eta, est + d2 sigma eta]
/// around a given point estimate.
pub fn dn_interval(setup: &ProblemSetup, spec: &DnSpec, theta_hat: f64) -> (f64, f64) {
    let w = setup.sigma() * setup.eta();
    (theta_hat - spec.d_lower * w, theta_hat + spec.d_upper * w)
}
