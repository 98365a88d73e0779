//! Tail approximations for the fixed-window scan statistic
//! `M_{n;t} = max_i (X_i + ... + X_{i+t-1})`.
//!
//! The main approximation is `P(M_{n;t} ≥ at) ≈ 1 - e^{-λ}` with
//!
//! ```text
//! continuous: λ = (n-t+1) e^{-[aθ_a - Ψ(θ_a)]t} / (θ_a σ_a √(2πt)) · e^{-Σ}
//! lattice:    λ = (n-t+1) e^{-[aθ_a - Ψ(θ_a)]t} e^{-θ_a(⌈at⌉-at)}
//!                 / ((1 - e^{-θ_a}) σ_a √(2πt)) · e^{-Σ}
//! ```
//!
//! where `Σ = Σ_k (1/k) E e^{-θ_a D_k⁺}` and `D_k = Σ (X_i^a - X_i)`.

use crate::error::{Error, Result};
use crate::expfamily::{classify_case, solve_tilt_for_mean, Case, FamilySpec, TiltParams};
use crate::lattice::LatticePmf;
use crate::special::norm_sf;
use crate::walk_functionals::{spitzer, SpitzerEstimate, SpitzerMethod, WalkSpec};
use serde::{Deserialize, Serialize};
use statrs::function::{beta, gamma};
use std::f64::consts::PI;

/// How the Spitzer factor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxMethod {
    /// Term-by-term series.
    Series,
    /// Integral representation matching the family's case.
    Integral,
    /// Normal families only: closed-form ν approximation.
    ClosedForm,
}

impl ApproxMethod {
    /// Closed form for Normal families, exact-convolution series otherwise.
    pub fn default_for(family: &FamilySpec) -> Self {
        match family {
            FamilySpec::Normal { .. } => ApproxMethod::ClosedForm,
            _ => ApproxMethod::Series,
        }
    }

    pub(crate) fn spitzer_method(self, case: Case) -> SpitzerMethod {
        match (self, case) {
            (ApproxMethod::Series, _) => SpitzerMethod::Series,
            (ApproxMethod::Integral, Case::Continuous) => SpitzerMethod::IntegralContinuous,
            (ApproxMethod::Integral, Case::Lattice) => SpitzerMethod::IntegralLattice,
            (ApproxMethod::ClosedForm, _) => SpitzerMethod::ClosedFormNormal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub lambda: f64,
    pub p: f64,
    pub method: String,
    /// Shape of the error bound with its unknown constant dropped.
    pub rate_term: Option<f64>,
    pub spitzer: Option<SpitzerEstimate>,
}

impl ApproxResult {
    pub fn new(
        lambda: f64,
        method: impl Into<String>,
        rate_term: Option<f64>,
        spitzer: Option<SpitzerEstimate>,
    ) -> Self {
        Self {
            lambda,
            p: 1.0 - (-lambda).exp(),
            method: method.into(),
            rate_term,
            spitzer,
        }
    }
}

/// A fixed-window problem: `n` observations, window `t`, slope `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub family: FamilySpec,
    pub n: u64,
    pub t: u64,
    pub a: f64,
    /// `None` when `a` is the top of a bounded support.
    pub tilt: Option<TiltParams>,
}

impl ScanConfig {
    pub fn new(family: FamilySpec, n: u64, t: u64, a: f64) -> Result<Self> {
        if t < 1 || t >= n {
            return Err(Error::DegenerateWindow { n, t });
        }
        if !a.is_finite() {
            return Err(Error::invalid("a", "must be finite"));
        }
        let mu0 = family.mean();
        if a <= mu0 {
            return Err(Error::invalid("a", format!("must exceed the mean {mu0}")));
        }
        let tilt = match family.support_max() {
            Some(top) if a == top as f64 => None,
            Some(top) if a > top as f64 => {
                let (lo, hi) = family.attainable_means();
                return Err(Error::MeanUnattainable { mean: a, lo, hi });
            }
            _ => Some(solve_tilt_for_mean(&family, a)?),
        };
        Ok(Self {
            family,
            n,
            t,
            a,
            tilt,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.a * self.t as f64
    }

    /// `⌈at⌉`, snapping `at` to the nearest integer when it is within
    /// rounding distance of it (e.g. `a = 11/30`, `t = 30`).
    pub fn threshold_ceil(&self) -> i64 {
        snapped_ceil(self.threshold())
    }

    /// `⌈at⌉ - at ∈ [0, 1)`.
    pub fn ceil_gap(&self) -> f64 {
        (self.threshold_ceil() as f64 - self.threshold()).max(0.0)
    }

    pub fn sigma_a(&self) -> Option<f64> {
        self.tilt.map(|t| t.variance.sqrt())
    }
}

pub(crate) fn snapped_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Poisson-approximation λ for `P(M_{n;t} ≥ at)`.
pub fn lambda_fixed(config: &ScanConfig, method: ApproxMethod) -> Result<ApproxResult> {
    let Some(tilt) = config.tilt else {
        return lambda_corollary_max_support(&config.family, config.n, config.t);
    };
    let case = classify_case(&config.family)?;
    let walk = WalkSpec::scan_difference(&config.family, &tilt)?;
    let sp = spitzer(&walk, method.spitzer_method(case))?;
    let (n, t, a) = (config.n as f64, config.t as f64, config.a);
    let theta = tilt.theta;
    let sigma = tilt.variance.sqrt();
    let rate = a * theta - config.family.psi(theta);
    let mut log_lambda =
        (n - t + 1.0).ln() - rate * t - (sigma * (2.0 * PI * t).sqrt()).ln() - sp.value;
    let tag = match case {
        Case::Continuous => {
            log_lambda -= theta.ln();
            "fixed-continuous"
        }
        Case::Lattice => {
            log_lambda -= theta * config.ceil_gap() + (-(-theta).exp_m1()).ln();
            "fixed-lattice"
        }
    };
    Ok(ApproxResult::new(
        log_lambda.exp(),
        tag,
        Some(rate_term_fixed(n, t)?),
        Some(sp),
    ))
}

/// Bernoulli shortcut in which `exp(-Σ)/(1 - e^{-θ_a})` collapses to
/// `(a - μ₀)/√(a(1-a))·σ_a`.
pub fn lambda_bernoulli_reduced(config: &ScanConfig) -> Result<ApproxResult> {
    let FamilySpec::Bernoulli { mean } = config.family else {
        return Err(Error::WrongFamily {
            expected: "Bernoulli",
        });
    };
    let a = config.a;
    let Some(tilt) = config.tilt else {
        return Err(Error::PreconditionViolated(
            "reduced form needs mu0 < a < 1".into(),
        ));
    };
    let (n, t) = (config.n as f64, config.t as f64);
    let theta = tilt.theta;
    let log_lambda = (n - t + 1.0).ln()
        - (a * theta - config.family.psi(theta)) * t
        - theta * config.ceil_gap()
        - 0.5 * (2.0 * a * (1.0 - a) * PI * t).ln()
        + (a - mean).ln();
    Ok(ApproxResult::new(
        log_lambda.exp(),
        "bernoulli-reduced",
        Some(rate_term_fixed(n, t)?),
        None,
    ))
}

/// Threshold at the top `a` of a bounded integer support:
/// `λ = (n - t) p_a^t (1 - p_a) + p_a^t`.
pub fn lambda_corollary_max_support(family: &FamilySpec, n: u64, t: u64) -> Result<ApproxResult> {
    if t < 1 || t >= n {
        return Err(Error::DegenerateWindow { n, t });
    }
    let pmf = match family {
        FamilySpec::Normal { .. } => {
            return Err(Error::WrongFamily {
                expected: "integer-valued",
            })
        }
        FamilySpec::Poisson { .. } => return Err(Error::UnboundedSupport),
        _ => family.finite_pmf().expect("bounded lattice family"),
    };
    let pa = pmf.prob(pmf.max_value());
    let pat = pa.powi(t as i32);
    let lambda = (n - t) as f64 * pat * (1.0 - pa) + pat;
    Ok(ApproxResult::new(lambda, "corollary", None, None))
}

/// Baseline `λ = (n - t + 1) P(X_1 + ... + X_t ≥ at)` without declumping.
pub fn lambda_dembo_karlin(config: &ScanConfig) -> Result<ApproxResult> {
    let tail = window_sum_tail(&config.family, config.t, config.threshold())?;
    let lambda = (config.n - config.t + 1) as f64 * tail;
    Ok(ApproxResult::new(
        lambda,
        "dembo-karlin",
        Some(rate_term_fixed(config.n as f64, config.t as f64)?),
        None,
    ))
}

/// Largest `t` for tabulated families in [`window_sum_tail`].
pub const MAX_TABLE_CONVOLUTIONS: u64 = 64;

/// `P(X_1 + ... + X_t ≥ b)` under the base law.
pub fn window_sum_tail(family: &FamilySpec, t: u64, b: f64) -> Result<f64> {
    let tf = t as f64;
    match family {
        FamilySpec::Normal { mean } => Ok(norm_sf((b - tf * mean) / tf.sqrt())),
        FamilySpec::Bernoulli { mean } => Ok(binomial_tail(t, *mean, snapped_ceil(b))),
        FamilySpec::Poisson { mean } => {
            let k = snapped_ceil(b);
            if k <= 0 {
                Ok(1.0)
            } else {
                Ok(gamma::gamma_lr(k as f64, tf * mean))
            }
        }
        FamilySpec::SimpleWalk { p } => {
            // S_t = 2B - t with B ~ Bin(t, p)
            let k = snapped_ceil(b);
            let ups = (k + t as i64 + 1).div_euclid(2);
            Ok(binomial_tail(t, *p, ups))
        }
        FamilySpec::Table { pmf } => {
            if t > MAX_TABLE_CONVOLUTIONS {
                return Err(Error::TailUnavailable(format!(
                    "t = {t} exceeds the convolution limit {MAX_TABLE_CONVOLUTIONS}"
                )));
            }
            let mut acc = pmf.clone();
            for _ in 1..t {
                acc = acc.convolve(pmf);
            }
            let acc = LatticePmf::normalized(acc.offset(), acc.probs().to_vec());
            Ok(acc.tail_at_least(snapped_ceil(b)))
        }
    }
}

/// `P(Bin(t, p) ≥ k)`.
fn binomial_tail(t: u64, p: f64, k: i64) -> f64 {
    if k <= 0 {
        1.0
    } else if k as u64 > t {
        0.0
    } else {
        beta::beta_reg(k as f64, (t as i64 - k + 1) as f64, p)
    }
}

/// `(log t)²/t + min(log t, log(n - t))/(n - t)`.
pub fn rate_term_fixed(n: f64, t: f64) -> Result<f64> {
    if !(t >= 1.0 && t < n) {
        return Err(Error::PreconditionViolated(format!(
            "rate term needs 1 <= t < n, got t = {t}, n = {n}"
        )));
    }
    let lt = t.ln();
    Ok(lt * lt / t + lt.min((n - t).ln()).max(0.0) / (n - t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(n: u64, t: u64, a: f64) -> ScanConfig {
        ScanConfig::new(FamilySpec::bernoulli(0.1).unwrap(), n, t, a).unwrap()
    }

    #[test]
    fn window_must_fit() {
        let f = FamilySpec::bernoulli(0.1).unwrap();
        assert_eq!(
            ScanConfig::new(f.clone(), 30, 30, 0.4),
            Err(Error::DegenerateWindow { n: 30, t: 30 })
        );
        assert!(ScanConfig::new(f, 30, 0, 0.4).is_err());
    }

    #[test]
    fn threshold_snaps_for_rational_slope() {
        let c = bern(7680, 30, 11.0 / 30.0);
        assert_eq!(c.threshold_ceil(), 11);
        assert_eq!(c.ceil_gap(), 0.0);
        let d = bern(7680, 30, 0.4);
        assert_eq!(d.threshold_ceil(), 12);
        let e = bern(100, 7, 0.4);
        assert_eq!(e.threshold_ceil(), 3);
        assert!((e.ceil_gap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn top_of_support_routes_to_corollary() {
        let f = FamilySpec::bernoulli(0.5).unwrap();
        let c = ScanConfig::new(f.clone(), 6, 3, 1.0).unwrap();
        let r = lambda_fixed(&c, ApproxMethod::Series).unwrap();
        assert_eq!(r.method, "corollary");
        assert!((r.lambda - 5.0 / 16.0).abs() < 1e-15);
        assert!(matches!(
            ScanConfig::new(f, 6, 3, 1.5),
            Err(Error::MeanUnattainable { .. })
        ));
    }

    #[test]
    fn corollary_degenerate_top_atom() {
        let f = FamilySpec::table(&[(0, 0.0), (1, 1.0), (-1, 0.0)]);
        assert!(f.is_err(), "point masses are rejected as families");
        // p_a = 1 in the formula directly
        let g = FamilySpec::table(&[(0, 1e-300), (1, 1.0 - 1e-300)]).unwrap();
        let r = lambda_corollary_max_support(&g, 50, 7).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-12);
        assert!((r.p - (1.0 - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn corollary_rejects_unbounded() {
        let p = FamilySpec::poisson(1.0).unwrap();
        assert_eq!(
            lambda_corollary_max_support(&p, 10, 3),
            Err(Error::UnboundedSupport)
        );
    }

    #[test]
    fn reduced_needs_bernoulli() {
        let c = ScanConfig::new(FamilySpec::poisson(1.0).unwrap(), 100, 5, 2.0).unwrap();
        assert_eq!(
            lambda_bernoulli_reduced(&c),
            Err(Error::WrongFamily {
                expected: "Bernoulli"
            })
        );
    }

    #[test]
    fn p_is_one_minus_exp() {
        let r = lambda_fixed(&bern(7680, 30, 0.4), ApproxMethod::Series).unwrap();
        assert_eq!(r.p, 1.0 - (-r.lambda).exp());
    }

    #[test]
    fn dembo_karlin_normal_tail() {
        let c = ScanConfig::new(FamilySpec::normal(0.0).unwrap(), 1000, 50, 0.5).unwrap();
        let r = lambda_dembo_karlin(&c).unwrap();
        // Φ̄(25/√50) by quadrature of φ over [3.5355, 40]
        let z = 25.0 / 50f64.sqrt();
        let q = crate::quadrature::integrate(
            |x: f64| num_complex::Complex64::new(crate::special::norm_pdf(x), 0.0),
            z,
            40.0,
            &Default::default(),
        )
        .unwrap();
        assert!((r.lambda - 951.0 * q.value.re).abs() < 1e-12);
    }

    #[test]
    fn dembo_karlin_binomial_point_mass() {
        let c = ScanConfig::new(FamilySpec::bernoulli(0.5).unwrap(), 6, 3, 1.0).unwrap();
        let r = lambda_dembo_karlin(&c).unwrap();
        assert!((r.lambda - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dembo_karlin_poisson_tail() {
        let c = ScanConfig::new(FamilySpec::poisson(1.0).unwrap(), 10, 2, 3.0).unwrap();
        let r = lambda_dembo_karlin(&c).unwrap();
        let mut below = 0.0;
        let mut term = (-2f64).exp();
        for j in 0..6 {
            if j > 0 {
                term *= 2.0 / j as f64;
            }
            below += term;
        }
        assert!((r.lambda - 9.0 * (1.0 - below)).abs() < 1e-12);
    }

    #[test]
    fn dembo_karlin_table_limit() {
        let f = FamilySpec::table(&[(0, 0.5), (1, 0.3), (2, 0.2)]).unwrap();
        let c = ScanConfig::new(f.clone(), 500, 65, 1.5).unwrap();
        assert!(matches!(
            lambda_dembo_karlin(&c),
            Err(Error::TailUnavailable(_))
        ));
        let ok = ScanConfig::new(f, 500, 4, 1.5).unwrap();
        // P(S_4 >= 6) by enumeration of 3^4 outcomes
        let probs = [0.5, 0.3, 0.2];
        let mut tail = 0.0;
        for i in 0..81 {
            let digits = [i % 3, (i / 3) % 3, (i / 9) % 3, (i / 27) % 3];
            if digits.iter().sum::<usize>() >= 6 {
                tail += digits.iter().map(|&d| probs[d]).product::<f64>();
            }
        }
        let r = lambda_dembo_karlin(&ok).unwrap();
        assert!((r.lambda - 497.0 * tail).abs() < 1e-13);
    }

    #[test]
    fn simple_walk_window_tail() {
        // S_3 >= 1 for ±1 steps with p = 0.3: need at least 2 ups
        let f = FamilySpec::simple_walk(0.3).unwrap();
        let v = window_sum_tail(&f, 3, 1.0).unwrap();
        let expect = 3.0 * 0.09 * 0.7 + 0.027;
        assert!((v - expect).abs() < 1e-14);
    }

    #[test]
    fn rate_term_values() {
        let e = std::f64::consts::E;
        assert!((rate_term_fixed(2.0 * e, e).unwrap() - 2.0 / e).abs() < 1e-14);
        let v = rate_term_fixed(1000.0, 50.0).unwrap();
        let l = 50f64.ln();
        assert!((v - (l * l / 50.0 + l / 950.0)).abs() < 1e-15);
        assert!((v - 0.310_1).abs() < 1e-3);
        assert!(rate_term_fixed(10.0, 10.0).is_err());
    }

    #[test]
    fn rate_term_decreases_in_n() {
        for t in [5.0, 20.0, 50.0] {
            let mut prev = f64::INFINITY;
            for n in (t as u64 + 3)..(t as u64 + 200) {
                let v = rate_term_fixed(n as f64, t).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }
}
