//! Bracketed root finding for strictly increasing functions.

use crate::error::{Error, Result};

/// Convergence control shared by the root finder and quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol >= 0.0) || max_iter < 1 {
            return Err(Error::Domain(format!(
                "Tolerance: need abs_tol > 0, rel_tol >= 0, max_iter >= 1 (got {abs_tol}, {rel_tol}, {max_iter})"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    /// Default for root residuals.
    pub fn root_default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_iter: 200,
        }
    }

    /// Default for quadrature error estimates.
    pub fn quad_default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 0.0,
            max_iter: 60,
        }
    }
}

/// A root bracket with lo < hi.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!(
                "Bracket: need lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }
}

/// Outcome of a root solve: the root, the residual f(root), and the number
/// of function evaluations spent.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub evaluations: usize,
}

/// Find the root of a continuous strictly increasing `f` with
/// f(lo) <= 0 <= f(hi), to |f(root)| <= tol.abs_tol.
///
/// Brent's method: bisection safeguarding inverse quadratic interpolation.
/// Deterministic, no internal state.
pub fn find_root_increasing<F: Fn(f64) -> f64>(
    f: F,
    bracket: Bracket,
    tol: Tolerance,
) -> Result<RootResult> {
    let mut evals = 0;
    let mut eval = |x: f64| {
        evals += 1;
        f(x)
    };
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = eval(a);
    let mut fb = eval(b);
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(RootResult {
            root: a,
            residual: 0.0,
            evaluations: evals,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            root: b,
            residual: 0.0,
            evaluations: evals,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = b - a;

    for _ in 0..tol.max_iter {
        if fb.abs() <= tol.abs_tol {
            return Ok(RootResult {
                root: b,
                residual: fb,
                evaluations: evals,
            });
        }
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xm = 0.5 * (c - b);
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.rel_tol.max(f64::EPSILON);
        if xm.abs() <= tol1 {
            return Ok(RootResult {
                root: b,
                residual: fb,
                evaluations: evals,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // attempt interpolation
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval(b);
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
        best: b,
    })
}
