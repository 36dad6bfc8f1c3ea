//! The three point estimators and their representation as nondecreasing
//! piecewise maps of the sample mean.
//!
//! The map representation drives a generic exact-coverage engine: the
//! preimage of an interval under a nondecreasing piecewise map is a finite
//! union of sample-mean intervals, whose Gaussian mass is exact up to cdf
//! accuracy. This is the independent cross-check for every closed-form
//! coverage formula in the crate.

use crate::coverage::IntervalSpec;
use crate::error::{Error, Result};
use crate::numerics::special::phi;

/// Which estimator the formulas refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Hard,
    Soft,
    AdaptiveLasso,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [
        EstimatorKind::Hard,
        EstimatorKind::Soft,
        EstimatorKind::AdaptiveLasso,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Hard => "hard",
            EstimatorKind::Soft => "soft",
            EstimatorKind::AdaptiveLasso => "adaptive",
        }
    }
}

/// Sample size, tuning threshold, and noise scale of the location problem.
#[derive(Debug, Clone, Copy)]
pub struct ProblemSetup {
    n: u64,
    eta: f64,
    sigma: f64,
}

impl ProblemSetup {
    pub fn new(n: u64, eta: f64, sigma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("ProblemSetup: n must be >= 1".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!(
                "ProblemSetup: eta must be positive and finite, got {eta}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "ProblemSetup: sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { n, eta, sigma })
    }

    /// Unit noise scale.
    pub fn standardized(n: u64, eta: f64) -> Result<Self> {
        Self::new(n, eta, 1.0)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Same problem with sigma forced to 1 (coverage infima do not depend on sigma).
    pub fn with_unit_sigma(&self) -> Self {
        Self {
            sigma: 1.0,
            ..*self
        }
    }
}

/// Point estimate from the sample mean. `scale` is sigma for the infeasible
/// estimator and sigma-hat for the feasible one.
pub fn estimate(kind: EstimatorKind, ybar: f64, scale: f64, eta: f64) -> f64 {
    assert!(
        scale > 0.0 && eta > 0.0,
        "estimate: need scale > 0 and eta > 0"
    );
    let tau = scale * eta;
    match kind {
        EstimatorKind::Hard => {
            if ybar.abs() > tau {
                ybar
            } else {
                0.0
            }
        }
        EstimatorKind::Soft => {
            if ybar > tau {
                ybar - tau
            } else if ybar < -tau {
                ybar + tau
            } else {
                0.0
            }
        }
        EstimatorKind::AdaptiveLasso => {
            if ybar.abs() > tau {
                ybar - tau * tau / ybar
            } else {
                0.0
            }
        }
    }
}

/// One segment of a piecewise monotone map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Constant value over the segment.
    Flat { value: f64 },
    /// y itself.
    Identity,
    /// y + offset.
    Shift { offset: f64 },
    /// y - k^2 / y, increasing away from zero.
    Hyperbolic { k: f64 },
}

impl Segment {
    fn eval(self, y: f64) -> f64 {
        match self {
            Segment::Flat { value } => value,
            Segment::Identity => y,
            Segment::Shift { offset } => y + offset,
            Segment::Hyperbolic { k } => y - k * k / y,
        }
    }

    /// Inverse of an increasing segment at value v; `positive_branch` picks
    /// the hyperbolic root with |y| > k on the right of zero.
    fn invert(self, v: f64, positive_branch: bool) -> f64 {
        match self {
            Segment::Flat { .. } => unreachable!("flat segments have no inverse"),
            Segment::Identity => v,
            Segment::Shift { offset } => v - offset,
            Segment::Hyperbolic { k } => {
                let disc = (v * v + 4.0 * k * k).sqrt();
                if positive_branch {
                    0.5 * (v + disc)
                } else {
                    0.5 * (v - disc)
                }
            }
        }
    }
}

/// A piece: segment plus its (open) sample-mean domain and value range.
#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub y_lo: f64,
    pub y_hi: f64,
    pub val_lo: f64,
    pub val_hi: f64,
    pub segment: Segment,
}

/// An estimator as a globally nondecreasing piecewise map of the sample mean.
///
/// Flat pieces own their boundary points; increasing pieces are open at the
/// ends they share with a flat piece. That convention reproduces the exact
/// tie-breaking of the case definitions (|ybar| <= tau maps to zero).
#[derive(Debug, Clone)]
pub struct PiecewiseMonotoneMap {
    pieces: Vec<Piece>,
    breakpoints: Vec<f64>,
}

impl PiecewiseMonotoneMap {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Sorted breakpoints between pieces.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Evaluate the map; agrees with `estimate` everywhere.
    pub fn eval(&self, y: f64) -> f64 {
        for p in &self.pieces {
            let inside = match p.segment {
                Segment::Flat { .. } => p.y_lo <= y && y <= p.y_hi,
                _ => p.y_lo < y && y < p.y_hi,
            };
            if inside {
                return p.segment.eval(y);
            }
        }
        unreachable!("map pieces cover the real line");
    }
}

/// Build the monotone-map form of an estimator with threshold `scale * eta`.
pub fn monotone_map(kind: EstimatorKind, eta: f64, scale: f64) -> PiecewiseMonotoneMap {
    assert!(
        scale > 0.0 && eta > 0.0,
        "monotone_map: need scale > 0 and eta > 0"
    );
    let tau = scale * eta;
    let (left, right) = match kind {
        EstimatorKind::Hard => (
            Piece {
                y_lo: f64::NEG_INFINITY,
                y_hi: -tau,
                val_lo: f64::NEG_INFINITY,
                val_hi: -tau,
                segment: Segment::Identity,
            },
            Piece {
                y_lo: tau,
                y_hi: f64::INFINITY,
                val_lo: tau,
                val_hi: f64::INFINITY,
                segment: Segment::Identity,
            },
        ),
        EstimatorKind::Soft => (
            Piece {
                y_lo: f64::NEG_INFINITY,
                y_hi: -tau,
                val_lo: f64::NEG_INFINITY,
                val_hi: 0.0,
                segment: Segment::Shift { offset: tau },
            },
            Piece {
                y_lo: tau,
                y_hi: f64::INFINITY,
                val_lo: 0.0,
                val_hi: f64::INFINITY,
                segment: Segment::Shift { offset: -tau },
            },
        ),
        EstimatorKind::AdaptiveLasso => (
            Piece {
                y_lo: f64::NEG_INFINITY,
                y_hi: -tau,
                val_lo: f64::NEG_INFINITY,
                val_hi: 0.0,
                segment: Segment::Hyperbolic { k: tau },
            },
            Piece {
                y_lo: tau,
                y_hi: f64::INFINITY,
                val_lo: 0.0,
                val_hi: f64::INFINITY,
                segment: Segment::Hyperbolic { k: tau },
            },
        ),
    };
    let flat = Piece {
        y_lo: -tau,
        y_hi: tau,
        val_lo: 0.0,
        val_hi: 0.0,
        segment: Segment::Flat { value: 0.0 },
    };
    PiecewiseMonotoneMap {
        pieces: vec![left, flat, right],
        breakpoints: vec![-tau, tau],
    }
}

/// Exact coverage P(theta in [est - sigma a, est + sigma b]) for the
/// known-variance estimator, by inverting the monotone map under
/// ybar ~ N(theta, sigma^2 / n).
///
/// Endpoint-inclusion flags are honored exactly; they matter only where the
/// estimator has an atom (value zero) or a jump (hard thresholding).
pub fn coverage_by_preimage(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta: f64,
) -> f64 {
    let sigma = setup.sigma();
    let map = monotone_map(kind, setup.eta(), sigma);
    // theta in [est - sigma a, est + sigma b]  <=>  est in [theta - sigma b, theta + sigma a],
    // where the upper estimator-space endpoint inherits the lower interval flag.
    let v_lo = theta - sigma * interval.b();
    let v_hi = theta + sigma * interval.a();
    let lo_closed = interval.upper_closed();
    let hi_closed = interval.lower_closed();

    let z = |y: f64| {
        if y == f64::NEG_INFINITY {
            0.0
        } else if y == f64::INFINITY {
            1.0
        } else {
            phi(setup.sqrt_n() * (y - theta) / sigma)
        }
    };

    let mut mass = 0.0;
    for p in map.pieces() {
        match p.segment {
            Segment::Flat { value } => {
                let above = value > v_lo || (value == v_lo && lo_closed);
                let below = value < v_hi || (value == v_hi && hi_closed);
                if above && below {
                    mass += z(p.y_hi) - z(p.y_lo);
                }
            }
            seg => {
                // open/closed is immaterial on the continuous part
                let u = v_lo.max(p.val_lo);
                let v = v_hi.min(p.val_hi);
                if u >= v {
                    continue;
                }
                let positive_branch = p.val_lo >= 0.0;
                let y_u = if v_lo <= p.val_lo {
                    p.y_lo
                } else {
                    seg.invert(u, positive_branch)
                };
                let y_v = if v_hi >= p.val_hi {
                    p.y_hi
                } else {
                    seg.invert(v, positive_branch)
                };
                mass += z(y_v) - z(y_u);
            }
        }
    }
    mass.clamp(0.0, 1.0)
}
