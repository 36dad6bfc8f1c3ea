//! Seeded Monte Carlo oracle for interval coverage.
//!
//! Every replication draws from its own ChaCha stream keyed by
//! (seed, replication index), so results are bit-identical regardless of
//! how replications are scheduled across threads. Normal variates go
//! through the same quantile as the analytic layer, which confines any
//! disagreement between the two to the coverage logic itself.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::coverage::IntervalSpec;
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorKind, ProblemSetup};
use crate::numerics::special::phi_inv;

/// Replication count, seed, and the optional antithetic pairing of the
/// sample-mean draw.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub replications: u64,
    pub seed: u64,
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(replications: u64, seed: u64) -> Result<Self> {
        if replications < 1 {
            return Err(Error::Domain("McConfig: replications must be >= 1".into()));
        }
        Ok(Self {
            replications,
            seed,
            antithetic: false,
        })
    }

    pub fn antithetic(mut self) -> Self {
        self.antithetic = true;
        self
    }
}

/// Empirical coverage with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub coverage_hat: f64,
    pub std_err: f64,
    pub replications: u64,
}

impl McResult {
    fn from_half_hits(half_hits: u64, replications: u64) -> Self {
        let p = half_hits as f64 / (2.0 * replications as f64);
        Self {
            coverage_hat: p,
            std_err: (p * (1.0 - p) / replications as f64).sqrt(),
            replications,
        }
    }
}

/// Uniform draw strictly inside (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53)
}

/// sigma-hat/sigma for one replication: sqrt(chi^2_m / m). Sum of squared
/// quantile-transformed normals up to m = 64, gamma sampling above.
fn scaled_sigma_hat(rng: &mut ChaCha8Rng, m: u64) -> f64 {
    let chi_sq = if m <= 64 {
        let mut s = 0.0;
        for _ in 0..m {
            let z = phi_inv(open_unit(rng));
            s += z * z;
        }
        s
    } else {
        let gamma = Gamma::new(0.5 * m as f64, 2.0).expect("valid gamma");
        gamma.sample(rng)
    };
    (chi_sq / m as f64).sqrt()
}

struct Trial {
    kind: EstimatorKind,
    n: u64,
    eta: f64,
    sigma: f64,
    a: f64,
    b: f64,
    lower_closed: bool,
    upper_closed: bool,
    theta: f64,
    variance_known: bool,
}

impl Trial {
    /// 0, 1, or (antithetic) averaged hits in half-units.
    fn half_hits(&self, rng: &mut ChaCha8Rng, antithetic: bool) -> u64 {
        let u = open_unit(rng);
        let sigma_hat = if self.variance_known {
            self.sigma
        } else {
            self.sigma * scaled_sigma_hat(rng, self.n - 1)
        };
        let first = self.hit(u, sigma_hat);
        if antithetic {
            first + self.hit(1.0 - u, sigma_hat)
        } else {
            2 * first
        }
    }

    fn hit(&self, u: f64, scale: f64) -> u64 {
        let ybar = self.theta + self.sigma / (self.n as f64).sqrt() * phi_inv(u);
        let est = estimate(self.kind, ybar, scale, self.eta);
        let lo = est - scale * self.a;
        let hi = est + scale * self.b;
        let above = if self.lower_closed {
            self.theta >= lo
        } else {
            self.theta > lo
        };
        let below = if self.upper_closed {
            self.theta <= hi
        } else {
            self.theta < hi
        };
        (above && below) as u64
    }
}

/// Empirical coverage of [est - scale a, est + scale b] under N(theta, sigma^2)
/// sampling; `variance_known` selects sigma or an independent sigma-hat as
/// the scale. Deterministic given the seed.
pub fn simulate_coverage(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta: f64,
    variance_known: bool,
    cfg: &McConfig,
) -> Result<McResult> {
    if !variance_known && setup.n() < 2 {
        return Err(Error::Domain(
            "unknown-variance simulation needs n >= 2".into(),
        ));
    }
    let trial = Trial {
        kind,
        n: setup.n(),
        eta: setup.eta(),
        sigma: setup.sigma(),
        a: interval.a(),
        b: interval.b(),
        lower_closed: interval.lower_closed(),
        upper_closed: interval.upper_closed(),
        theta,
        variance_known,
    };
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    const CHUNK: u64 = 16_384;
    let chunks = cfg.replications.div_ceil(CHUNK);
    let half_hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.replications);
            let mut acc = 0u64;
            let mut rng = base.clone();
            for rep in lo..hi {
                rng.set_stream(rep);
                acc += trial.half_hits(&mut rng, cfg.antithetic);
            }
            acc
        })
        .sum();
    Ok(McResult::from_half_hits(half_hits, cfg.replications))
}

/// Scanned empirical coverage over a theta grid (sigma = 1 units), with the
/// per-point results and the minimizer.
#[derive(Debug, Clone)]
pub struct McScan {
    pub points: Vec<(f64, McResult)>,
    pub min: McResult,
    pub argmin_theta: f64,
}

/// Empirical worst-case scan across `theta_grid`, known or unknown variance.
pub fn mc_infimal_scan(
    kind: EstimatorKind,
    setup: &ProblemSetup,
    interval: &IntervalSpec,
    theta_grid: &[f64],
    variance_known: bool,
    cfg: &McConfig,
) -> Result<McScan> {
    if theta_grid.is_empty() {
        return Err(Error::Precondition(
            "mc_infimal_scan: empty theta grid".into(),
        ));
    }
    let unit = setup.with_unit_sigma();
    let points: Vec<(f64, McResult)> = theta_grid
        .iter()
        .map(|&t| simulate_coverage(kind, &unit, interval, t, variance_known, cfg).map(|r| (t, r)))
        .collect::<Result<_>>()?;
    let (argmin_theta, min) = points
        .iter()
        .copied()
        .min_by(|x, y| x.1.coverage_hat.partial_cmp(&y.1.coverage_hat).unwrap())
        .expect("nonempty scan");
    Ok(McScan {
        points,
        min,
        argmin_theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{coverage, coverage_soft};
    use crate::estimators::coverage_by_preimage;
    use crate::infimal::{default_epsilon, infimal_soft, theta_grid};
    use crate::unknownvar::unknown_tail_limit;

    fn assert_mc_matches(mc: &McResult, truth: f64, what: &str) {
        // plug-in SE collapses when p_hat hits 0 or 1; use the binomial SE
        // at the reference value as the floor
        let se_truth = (truth * (1.0 - truth) / mc.replications as f64).sqrt();
        let slack = 4.0 * mc.std_err.max(se_truth).max(1e-12);
        assert!(
            (mc.coverage_hat - truth).abs() <= slack,
            "{what}: {} vs {truth} (4se = {slack})",
            mc.coverage_hat
        );
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let setup = ProblemSetup::standardized(5, 0.8).unwrap();
        let iv = IntervalSpec::closed(1.0, 1.3).unwrap();
        let cfg = McConfig::new(40_000, 987).unwrap();
        let a = simulate_coverage(EstimatorKind::Hard, &setup, &iv, 0.7, true, &cfg).unwrap();
        let b = simulate_coverage(EstimatorKind::Hard, &setup, &iv, 0.7, true, &cfg).unwrap();
        assert_eq!(a.coverage_hat.to_bits(), b.coverage_hat.to_bits());
        assert_eq!(a.std_err.to_bits(), b.std_err.to_bits());
        // a different seed moves the estimate
        let cfg2 = McConfig::new(40_000, 988).unwrap();
        let c = simulate_coverage(EstimatorKind::Hard, &setup, &iv, 0.7, true, &cfg2).unwrap();
        assert_ne!(a.coverage_hat.to_bits(), c.coverage_hat.to_bits());
    }

    #[test]
    fn known_variance_agrees_with_closed_forms() {
        let cfg = McConfig::new(200_000, 42).unwrap();
        let cases = [
            (EstimatorKind::Soft, 4u64, 0.8, 1.1, 0.9, 0.35),
            (EstimatorKind::Hard, 9, 0.5, 0.7, 0.7, -0.6),
            (EstimatorKind::AdaptiveLasso, 2, 1.2, 1.5, 1.0, 1.4),
        ];
        for (kind, n, eta, a, b, theta) in cases {
            let setup = ProblemSetup::standardized(n, eta).unwrap();
            let iv = IntervalSpec::closed(a, b).unwrap();
            let truth = coverage(kind, &setup, &iv, theta).value;
            let mc = simulate_coverage(kind, &setup, &iv, theta, true, &cfg).unwrap();
            assert_mc_matches(&mc, truth, kind.label());
        }
    }

    #[test]
    fn tiny_eta_reproduces_standard_interval() {
        let n = 16u64;
        let setup = ProblemSetup::standardized(n, 1e-12).unwrap();
        let half = 1.959_963_984_540_054_2 / (n as f64).sqrt();
        let iv = IntervalSpec::closed(half, half).unwrap();
        let cfg = McConfig::new(400_000, 7).unwrap();
        let mc = simulate_coverage(EstimatorKind::Soft, &setup, &iv, 0.3, true, &cfg).unwrap();
        assert_mc_matches(&mc, 0.95, "standard interval");
    }

    #[test]
    fn unknown_variance_far_theta_matches_t_limit() {
        let setup = ProblemSetup::standardized(6, 0.7).unwrap();
        let a = 1.0;
        let iv = IntervalSpec::closed(a, a).unwrap();
        let cfg = McConfig::new(300_000, 11).unwrap();
        let truth = unknown_tail_limit(EstimatorKind::Soft, &setup, a).unwrap();
        let mc = simulate_coverage(EstimatorKind::Soft, &setup, &iv, 60.0, false, &cfg).unwrap();
        assert_mc_matches(&mc, truth, "soft t limit");
        // gamma-sampled sigma-hat path (m > 64)
        let big = ProblemSetup::standardized(80, 0.2).unwrap();
        let truth_big = unknown_tail_limit(EstimatorKind::Hard, &big, 0.3).unwrap();
        let ivb = IntervalSpec::closed(0.3, 0.3).unwrap();
        let mcb = simulate_coverage(EstimatorKind::Hard, &big, &ivb, 25.0, false, &cfg).unwrap();
        assert_mc_matches(&mcb, truth_big, "hard t limit, gamma path");
    }

    #[test]
    fn unknown_variance_quadrature_vs_mc_at_moderate_theta() {
        use crate::unknownvar::{coverage_unknown, QuadSpec};
        let cfg = McConfig::new(300_000, 13).unwrap();
        for (kind, n, eta, a, theta) in [
            (EstimatorKind::Soft, 4u64, 0.8, 1.1, 0.8),
            (EstimatorKind::Hard, 7, 0.5, 0.6, 0.55),
            (EstimatorKind::AdaptiveLasso, 3, 1.0, 1.2, -0.9),
        ] {
            let setup = ProblemSetup::standardized(n, eta).unwrap();
            let quad = QuadSpec::default_for(&setup).unwrap();
            let truth = coverage_unknown(kind, &setup, a, theta, &quad)
                .unwrap()
                .value;
            let iv = IntervalSpec::closed(a, a).unwrap();
            let mc = simulate_coverage(kind, &setup, &iv, theta, false, &cfg).unwrap();
            assert_mc_matches(&mc, truth, kind.label());
        }
    }

    #[test]
    fn antithetic_still_unbiased() {
        let setup = ProblemSetup::standardized(4, 0.8).unwrap();
        let iv = IntervalSpec::closed(1.2, 1.2).unwrap();
        let truth = coverage_soft(&setup, &iv, 0.4).value;
        let cfg = McConfig::new(200_000, 5).unwrap().antithetic();
        let mc = simulate_coverage(EstimatorKind::Soft, &setup, &iv, 0.4, true, &cfg).unwrap();
        assert_mc_matches(&mc, truth, "antithetic soft");
    }

    #[test]
    fn scale_equivariance_in_distribution() {
        // sigma only relabels the problem; estimates agree within MC noise
        let cfg = McConfig::new(150_000, 23).unwrap();
        let iv = IntervalSpec::closed(0.9, 1.1).unwrap();
        let unit = ProblemSetup::standardized(9, 0.6).unwrap();
        let scaled = ProblemSetup::new(9, 0.6, 3.0).unwrap();
        for kind in EstimatorKind::ALL {
            let p1 = simulate_coverage(kind, &unit, &iv, 0.5, true, &cfg).unwrap();
            let p2 = simulate_coverage(kind, &scaled, &iv, 1.5, true, &cfg).unwrap();
            let se = (p1.std_err * p1.std_err + p2.std_err * p2.std_err).sqrt();
            assert!(
                (p1.coverage_hat - p2.coverage_hat).abs() <= 4.0 * se,
                "{kind:?}"
            );
        }
    }

    #[test]
    fn scan_finds_soft_infimum_and_exact_zero_for_hard() {
        let setup = ProblemSetup::standardized(4, 0.9).unwrap();
        let iv = IntervalSpec::closed(0.7, 1.0).unwrap();
        let grid = theta_grid(&setup, &iv, 41, default_epsilon(&setup));
        let cfg = McConfig::new(50_000, 31).unwrap();
        let scan = mc_infimal_scan(EstimatorKind::Soft, &setup, &iv, &grid, true, &cfg).unwrap();
        let truth = infimal_soft(&setup, &iv);
        assert_mc_matches(&scan.min, truth, "scan min");
        // eta > a + b: coverage at theta = b + eps is identically zero
        let tight = IntervalSpec::closed(0.2, 0.3).unwrap();
        let grid = theta_grid(&setup, &tight, 41, default_epsilon(&setup));
        let scan = mc_infimal_scan(EstimatorKind::Hard, &setup, &tight, &grid, true, &cfg).unwrap();
        assert_eq!(scan.min.coverage_hat, 0.0);
    }

    #[test]
    fn known_variance_matches_preimage_on_random_instances() {
        use rand_chacha::rand_core::RngCore;
        let mut gen = ChaCha8Rng::seed_from_u64(3141);
        let mut uniform = |lo: f64, hi: f64| {
            let u = ((gen.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53);
            lo + u * (hi - lo)
        };
        let cfg = McConfig::new(60_000, 2718).unwrap();
        for i in 0..100 {
            let kind = EstimatorKind::ALL[i % 3];
            let n = 1 + (i as u64 * 7) % 40;
            let setup = ProblemSetup::new(n, uniform(0.05, 2.0), uniform(0.5, 2.0)).unwrap();
            let iv =
                IntervalSpec::new(uniform(0.0, 2.0), uniform(0.0, 2.0), i % 2 == 0, i % 5 != 0)
                    .unwrap();
            let theta = uniform(-4.0, 4.0);
            let truth = coverage_by_preimage(kind, &setup, &iv, theta);
            let mc = simulate_coverage(kind, &setup, &iv, theta, true, &cfg).unwrap();
            assert_mc_matches(&mc, truth, "preimage vs mc");
        }
    }

    #[test]
    fn reported_se_consistent_with_seed_scatter() {
        // z-scores over independent seeds behave like a chi-square
        let setup = ProblemSetup::standardized(4, 0.8).unwrap();
        let iv = IntervalSpec::closed(1.2, 1.2).unwrap();
        let theta = 0.4;
        let truth = coverage_soft(&setup, &iv, theta).value;
        let reps = 10_000u64;
        let mut chi_sq = 0.0;
        let k = 50;
        for seed in 0..k {
            let cfg = McConfig::new(reps, 9000 + seed).unwrap();
            let mc =
                simulate_coverage(EstimatorKind::Soft, &setup, &iv, theta, true, &cfg).unwrap();
            let se = (truth * (1.0 - truth) / reps as f64).sqrt();
            let z = (mc.coverage_hat - truth) / se;
            chi_sq += z * z;
        }
        // 0.5% and 99.5% quantiles of chi-square with 50 dof
        assert!(chi_sq > 27.99 && chi_sq < 79.49, "chi_sq = {chi_sq}");
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1).is_err());
        let setup = ProblemSetup::standardized(1, 0.5).unwrap();
        let iv = IntervalSpec::closed(1.0, 1.0).unwrap();
        let cfg = McConfig::new(10, 1).unwrap();
        assert!(simulate_coverage(EstimatorKind::Soft, &setup, &iv, 0.0, false, &cfg).is_err());
    }
}
