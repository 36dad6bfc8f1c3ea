//! Feasible (sigma-hat based) interval coverage, unknown variance.
//!
//! The feasible coverage is the known-variance coverage with threshold and
//! half-width both scaled by s, mixed over the density of
//! s = sigma-hat/sigma (a scaled chi with n-1 degrees of freedom).
//! Soft thresholding keeps a closed-form infimum in terms of the Student-t
//! cdf; hard thresholding and the adaptive LASSO are bracketed between
//! t-based bounds and scanned numerically. Only symmetric intervals here.

use crate::coverage::{
    coverage_adaptive, coverage_hard_symmetric, coverage_soft, CoverageReport, IntervalSpec,
};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, ProblemSetup};
use crate::numerics::quad::integrate_split;
use crate::numerics::roots::{find_root_increasing, Bracket, Tolerance};
use crate::numerics::special::{phi_inv, scaled_chi_cdf, scaled_chi_density, t_cdf};

/// Quadrature control for the scaled-chi mixture: tolerance plus the
/// truncation range [s_lo, s_hi] holding all but 2e-14 of the chi mass.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    pub tol: Tolerance,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl QuadSpec {
    /// Truncation from the chi quantiles at mass 1e-14 on each side.
    pub fn for_setup(setup: &ProblemSetup, tol: Tolerance) -> Result<Self> {
        let m = setup.n() - 1;
        if m < 1 {
            return Err(Error::Domain(
                "QuadSpec: unknown variance needs n >= 2".into(),
            ));
        }
        const MASS: f64 = 1e-14;
        let s_lo = scaled_chi_quantile(m, MASS)?;
        let s_hi = scaled_chi_quantile(m, 1.0 - MASS)?;
        if !(s_lo > 0.0 && s_lo < 1.0 && s_hi > 1.0) {
            return Err(Error::Inconsistency(format!(
                "chi truncation range [{s_lo}, {s_hi}] does not straddle 1"
            )));
        }
        Ok(Self { tol, s_lo, s_hi })
    }

    pub fn default_for(setup: &ProblemSetup) -> Result<Self> {
        Self::for_setup(setup, Tolerance::new(1e-10, 0.0, 40)?)
    }

    /// Panel edges inside the chi bulk; forcing these keeps a flat initial
    /// probe from faking convergence when the truncation range is wide.
    pub fn bulk_splits(&self) -> [f64; 3] {
        [0.5 * (self.s_lo + 1.0), 1.0, 0.5 * (1.0 + self.s_hi)]
    }
}

fn require_feasible(setup: &ProblemSetup) -> Result<u64> {
    if setup.n() < 2 {
        return Err(Error::Domain("unknown variance needs n >= 2".into()));
    }
    Ok(setup.n() - 1)
}

/// Quantile of sqrt(chi^2_m / m) by root-finding on the cdf in log space,
/// so extreme tail probabilities keep relative accuracy in s.
fn scaled_chi_quantile(m: u64, p: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-30, 1e-13, 500)?;
    let r = find_root_increasing(
        |u: f64| scaled_chi_cdf(u.exp(), m).unwrap() - p,
        Bracket::new(-700.0, 5.0)?,
        tol,
    )?;
    Ok(r.root.exp())
}

/// Known-variance coverage at threshold s*eta and half-width s*a (sigma = 1).
fn conditional_coverage(kind: EstimatorKind, n: u64, eta: f64, a: f64, s: f64, theta: f64) -> f64 {
    let scaled = ProblemSetup::standardized(n, s * eta).expect("scaled setup");
    match kind {
        EstimatorKind::Soft => {
            let iv = IntervalSpec::closed(s * a, s * a).expect("interval");
            coverage_soft(&scaled, &iv, theta).value
        }
        EstimatorKind::AdaptiveLasso => {
            let iv = IntervalSpec::closed(s * a, s * a).expect("interval");
            coverage_adaptive(&scaled, &iv, theta).value
        }
        EstimatorKind::Hard => {
            coverage_hard_symmetric(&scaled, s * a, theta, true, true)
                .expect("hard coverage")
                .value
        }
    }
}

/// s-values where the integrand switches branch for fixed theta.
fn branch_splits(kind: EstimatorKind, eta: f64, a: f64, theta: f64) -> Vec<f64> {
    let t = theta.abs();
    if t == 0.0 || a == 0.0 {
        return Vec::new();
    }
    let mut out = vec![t / a];
    if kind == EstimatorKind::Hard {
        out.push(t / (eta + a));
        if (eta - a).abs() > 0.0 {
            out.push(t / (eta - a).abs());
        }
    }
    out
}

/// Feasible-interval coverage P(theta in [est - sigma-hat a, est + sigma-hat a])
/// by adaptive quadrature of the scaled known-variance coverage against the
/// scaled-chi density. Endpoint flags do not move the integral (they matter
/// only on an s-null set), so the closed-interval formulas are used.
pub fn coverage_unknown(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    a: f64,
    theta: f64,
    quad: &QuadSpec,
) -> Result<CoverageReport> {
    let m = require_feasible(setup)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "coverage_unknown: a must be nonnegative, got {a}"
        )));
    }
    let n = setup.n();
    let eta = setup.eta();
    let th = theta / setup.sigma();
    let mut splits = branch_splits(kind, eta, a, th);
    // force sampling inside the chi bulk so a flat initial probe cannot
    // fake convergence when the truncation range is wide (small m)
    splits.extend(quad.bulk_splits());
    let integrand =
        |s: f64| conditional_coverage(kind, n, eta, a, s, th) * scaled_chi_density(s, m).unwrap();
    let r = integrate_split(integrand, quad.s_lo, quad.s_hi, &splits, quad.tol)?;
    Ok(CoverageReport::quadrature(r.value, r.err_estimate + 2e-14))
}

/// Exact infimal coverage of the feasible soft-thresholding interval:
/// T_{n-1}(sqrt n (a - eta)) - T_{n-1}(sqrt n (-a - eta)).
pub fn infimal_soft_unknown(setup: &ProblemSetup, a: f64) -> Result<f64> {
    let m = require_feasible(setup)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "infimal_soft_unknown: a must be nonnegative, got {a}"
        )));
    }
    let rn = setup.sqrt_n();
    let eta = setup.eta();
    Ok(t_cdf(rn * (a - eta), m) - t_cdf(rn * (-a - eta), m))
}

/// The t-based theta -> infinity limit of the feasible coverage.
pub fn unknown_tail_limit(kind: EstimatorKind, setup: &ProblemSetup, a: f64) -> Result<f64> {
    let m = require_feasible(setup)?;
    let rn = setup.sqrt_n();
    Ok(match kind {
        EstimatorKind::Soft => t_cdf(rn * (a - setup.eta()), m) - t_cdf(rn * (-a - setup.eta()), m),
        _ => t_cdf(rn * a, m) - t_cdf(-rn * a, m),
    })
}

/// t-based brackets [lower, upper] for the infimal feasible coverage of the
/// hard-thresholding and adaptive-LASSO intervals (soft is exact).
pub fn unknown_infimum_bounds(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    a: f64,
) -> Result<(f64, f64)> {
    let m = require_feasible(setup)?;
    let rn = setup.sqrt_n();
    let eta = setup.eta();
    Ok(match kind {
        EstimatorKind::Soft => {
            let v = infimal_soft_unknown(setup, a)?;
            (v, v)
        }
        EstimatorKind::Hard => (
            (t_cdf(rn * a, m) - t_cdf(-rn * (a - eta), m)).max(0.0),
            t_cdf(rn * a, m) - t_cdf(-rn * a, m),
        ),
        EstimatorKind::AdaptiveLasso => (
            t_cdf(rn * a.hypot(eta), m) - t_cdf(rn * (eta - a), m),
            t_cdf(rn * a, m) - t_cdf(-rn * a, m),
        ),
    })
}

/// Half-width solving the feasible soft-thresholding infimal-coverage
/// equation at level delta (the t analogue of the shortest interval).
pub fn soft_unknown_half_length(
    setup: &ProblemSetup,
    delta: f64,
) -> Result<crate::shortest::ShortestResult> {
    let m = require_feasible(setup)?;
    if !(delta > 0.0 && delta < 1.0 - 1e-12) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    let rn = setup.sqrt_n();
    let eta = setup.eta();
    let lhs = |a: f64| t_cdf(rn * (a - eta), m) - t_cdf(rn * (-a - eta), m);
    let mut hi = eta + phi_inv((1.0 + delta) / 2.0) / rn;
    let mut grow = 0;
    while lhs(hi) <= delta {
        hi *= 2.0;
        grow += 1;
        if grow > 300 {
            return Err(Error::Convergence {
                iterations: grow,
                best: hi,
            });
        }
    }
    let r = find_root_increasing(
        |a| lhs(a) - delta,
        Bracket::new(0.0, hi)?,
        Tolerance::new(1e-12, 0.0, 300)?,
    )?;
    Ok(crate::shortest::ShortestResult {
        a_star: r.root,
        residual: r.residual,
        evaluations: r.evaluations,
    })
}

/// Numerical infimum over theta of the feasible coverage, scanned over a
/// symmetric grid (theta >= 0) refined around the s-swept branch points and
/// closed with the analytic tail limit. The result must respect the t-based
/// brackets; a violation beyond 1e-6 reports an inconsistency.
pub fn infimal_unknown_numeric(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    a: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    require_feasible(setup)?;
    let eta = setup.eta();
    let hi = (eta + a) * quad.s_hi * 1.5;
    let base: usize = 240;
    let mut grid = Vec::with_capacity(base + 64);
    for i in 0..=base {
        grid.push(hi * i as f64 / base as f64);
    }
    // sweep of the conditional branch points over the s-range
    for center in [a, (eta - a).abs(), eta + a] {
        if center == 0.0 {
            continue;
        }
        for j in 0..=16 {
            let s = quad.s_lo + (quad.s_hi - quad.s_lo) * j as f64 / 16.0;
            grid.push(center * s);
        }
    }
    grid.retain(|t| t.is_finite() && *t >= 0.0);
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();

    use rayon::prelude::*;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| coverage_unknown(kind, setup, a, t, quad).map(|r| r.value))
        .collect::<Result<_>>()?;
    let mut best = unknown_tail_limit(kind, setup, a)?;
    for v in values {
        best = best.min(v);
    }

    let (lo_bound, hi_bound) = unknown_infimum_bounds(kind, setup, a)?;
    let slack = quad.tol.abs_tol + 1e-6;
    if best < lo_bound - slack || best > hi_bound + slack {
        return Err(Error::Inconsistency(format!(
            "numeric feasible infimum {best} escapes [{lo_bound}, {hi_bound}] for {kind:?}"
        )));
    }
    Ok(best)
}

/// One row of the known-vs-feasible convergence diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub n: u64,
    pub infimum_known: f64,
    pub infimum_feasible: f64,
    pub gap: f64,
}

/// Worst-case coverage gap between feasible and known-variance intervals
/// along a schedule of sample sizes; eta and a follow the supplied rules.
pub fn convergence_report(
    kind: EstimatorKind,
    n_list: &[u64],
    eta_rule: impl Fn(u64) -> f64,
    a_rule: impl Fn(u64, f64) -> f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let eta = eta_rule(n);
        let a = a_rule(n, eta);
        let setup = ProblemSetup::standardized(n, eta)?;
        let iv = IntervalSpec::closed(a, a)?;
        let known = crate::infimal::infimal(kind, &setup, &iv);
        let feasible = match kind {
            EstimatorKind::Soft => infimal_soft_unknown(&setup, a)?,
            _ => {
                let quad = QuadSpec::default_for(&setup)?;
                infimal_unknown_numeric(kind, &setup, a, &quad)?
            }
        };
        rows.push(ConvergenceRow {
            n,
            infimum_known: known,
            infimum_feasible: feasible,
            gap: (known - feasible).abs(),
        });
    }
    Ok(rows)
}
