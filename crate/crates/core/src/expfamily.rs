//! One-parameter exponential families `dF_θ(x) = e^{θx - Ψ(θ)} dF(x)`.
//!
//! Each [`FamilySpec`] knows its cumulant function Ψ and the first two
//! derivatives in closed form (or by log-sum-exp for tabulated pmfs). The
//! natural parameter space is all of ℝ for every supported kind.
//!
//! Two root problems recur throughout the crate:
//!
//! * the tilt `θ_a` with `Ψ'(θ_a) = a` ([`solve_tilt_for_mean`]);
//! * the positive zero `θ₁` of Ψ for negative-mean families
//!   ([`solve_zero_of_psi`]).
//!
//! Both are solved by bracketing bisection down to a width of 1e-3 and then
//! Newton steps guarded by the bracket.

use crate::error::{Error, Result};
use crate::lattice::LatticePmf;
use crate::rng::RngStream;
use crate::special::norm_quantile;
use serde::{Deserialize, Serialize};

const NEWTON_CAP: usize = 100;
const BISECT_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `N(mean, 1)`.
    Normal {
        mean: f64,
    },
    /// `P(X = 1) = mean`.
    Bernoulli {
        mean: f64,
    },
    Poisson {
        mean: f64,
    },
    /// `P(X = 1) = p`, `P(X = -1) = 1 - p`.
    SimpleWalk {
        p: f64,
    },
    /// Finite integer support.
    Table {
        pmf: LatticePmf,
    },
}

/// Fixed-window regime of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    Continuous,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    pub theta: f64,
    /// `Ψ'(theta)`
    pub mean: f64,
    /// `Ψ''(theta)`
    pub variance: f64,
}

impl FamilySpec {
    pub fn normal(mean: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mu", "must be finite"));
        }
        Ok(FamilySpec::Normal { mean })
    }

    pub fn bernoulli(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean < 1.0) {
            return Err(Error::invalid("mu", "Bernoulli mean must lie in (0, 1)"));
        }
        Ok(FamilySpec::Bernoulli { mean })
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::invalid("mu", "Poisson mean must be positive"));
        }
        Ok(FamilySpec::Poisson { mean })
    }

    pub fn simple_walk(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", "step probability must lie in (0, 1)"));
        }
        Ok(FamilySpec::SimpleWalk { p })
    }

    pub fn table(pairs: &[(i64, f64)]) -> Result<Self> {
        let pmf = LatticePmf::from_pairs(pairs)?;
        if pmf.min_value() == pmf.max_value() {
            return Err(Error::invalid("pmf", "degenerate point mass"));
        }
        Ok(FamilySpec::Table { pmf })
    }

    /// `μ₀ = Ψ'(0)`.
    pub fn mean(&self) -> f64 {
        match self {
            FamilySpec::Normal { mean }
            | FamilySpec::Bernoulli { mean }
            | FamilySpec::Poisson { mean } => *mean,
            FamilySpec::SimpleWalk { p } => 2.0 * p - 1.0,
            FamilySpec::Table { pmf } => pmf.mean(),
        }
    }

    pub fn psi(&self, theta: f64) -> f64 {
        match self {
            FamilySpec::Normal { mean } => mean * theta + 0.5 * theta * theta,
            FamilySpec::Bernoulli { mean } => {
                // log(1 - μ + μ e^θ) = log(1 - μ) + softplus(θ + logit μ)
                (1.0 - mean).ln() + softplus(theta + logit(*mean))
            }
            FamilySpec::Poisson { mean } => mean * theta.exp_m1(),
            FamilySpec::SimpleWalk { p } => {
                let q = 1.0 - p;
                let m = theta.abs();
                m + (p * (theta - m).exp() + q * (-theta - m).exp()).ln()
            }
            FamilySpec::Table { pmf } => pmf.log_mgf(theta),
        }
    }

    pub fn dpsi(&self, theta: f64) -> f64 {
        match self {
            FamilySpec::Normal { mean } => mean + theta,
            FamilySpec::Bernoulli { mean } => sigmoid(theta + logit(*mean)),
            FamilySpec::Poisson { mean } => mean * theta.exp(),
            FamilySpec::SimpleWalk { p } => {
                let up = sigmoid(2.0 * theta + logit(*p));
                2.0 * up - 1.0
            }
            FamilySpec::Table { pmf } => {
                let lm = pmf.log_mgf(theta);
                pmf.atoms()
                    .map(|(k, p)| k as f64 * p * (theta * k as f64 - lm).exp())
                    .sum()
            }
        }
    }

    pub fn d2psi(&self, theta: f64) -> f64 {
        match self {
            FamilySpec::Normal { .. } => 1.0,
            FamilySpec::Bernoulli { mean } => {
                let s = sigmoid(theta + logit(*mean));
                s * (1.0 - s)
            }
            FamilySpec::Poisson { mean } => mean * theta.exp(),
            FamilySpec::SimpleWalk { p } => {
                let up = sigmoid(2.0 * theta + logit(*p));
                4.0 * up * (1.0 - up)
            }
            FamilySpec::Table { pmf } => {
                let lm = pmf.log_mgf(theta);
                let w: Vec<(f64, f64)> = pmf
                    .atoms()
                    .map(|(k, p)| (k as f64, p * (theta * k as f64 - lm).exp()))
                    .collect();
                let m: f64 = w.iter().map(|(k, p)| k * p).sum();
                w.iter().map(|(k, p)| (k - m).powi(2) * p).sum()
            }
        }
    }

    /// Natural parameter space Θ.
    pub fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Open interval `Ψ'(Θ)` of attainable means.
    pub fn attainable_means(&self) -> (f64, f64) {
        match self {
            FamilySpec::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            FamilySpec::Bernoulli { .. } => (0.0, 1.0),
            FamilySpec::Poisson { .. } => (0.0, f64::INFINITY),
            FamilySpec::SimpleWalk { .. } => (-1.0, 1.0),
            FamilySpec::Table { pmf } => (pmf.min_value() as f64, pmf.max_value() as f64),
        }
    }

    pub fn is_lattice(&self) -> bool {
        !matches!(self, FamilySpec::Normal { .. })
    }

    /// Largest support point, if the support is bounded above.
    pub fn support_max(&self) -> Option<i64> {
        match self {
            FamilySpec::Normal { .. } | FamilySpec::Poisson { .. } => None,
            FamilySpec::Bernoulli { .. } | FamilySpec::SimpleWalk { .. } => Some(1),
            FamilySpec::Table { pmf } => Some(pmf.max_value()),
        }
    }

    /// Base pmf for bounded lattice kinds.
    pub fn finite_pmf(&self) -> Option<LatticePmf> {
        match self {
            FamilySpec::Bernoulli { mean } => {
                Some(LatticePmf::normalized(0, vec![1.0 - mean, *mean]))
            }
            FamilySpec::SimpleWalk { p } => {
                Some(LatticePmf::normalized(-1, vec![1.0 - p, 0.0, *p]))
            }
            FamilySpec::Table { pmf } => Some(pmf.clone()),
            _ => None,
        }
    }

    /// Pmf of `F_θ` for lattice kinds. Poisson laws are truncated where the
    /// neglected mass is below 1e-17 and renormalized.
    pub fn lattice_pmf(&self, theta: f64) -> Option<LatticePmf> {
        match self {
            FamilySpec::Normal { .. } => None,
            FamilySpec::Poisson { mean } => Some(poisson_pmf(mean * theta.exp())),
            _ => {
                let base = self.finite_pmf()?;
                Some(if theta == 0.0 {
                    base
                } else {
                    base.tilted(theta)
                })
            }
        }
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(theta.is_finite() && theta > lo && theta < hi) || !self.psi(theta).is_finite() {
            return Err(Error::ThetaOutOfDomain { theta });
        }
        Ok(())
    }

    pub fn tilt_params(&self, theta: f64) -> TiltParams {
        TiltParams {
            theta,
            mean: self.dpsi(theta),
            variance: self.d2psi(theta),
        }
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn poisson_pmf(mean: f64) -> LatticePmf {
    let spread = 12.0 * mean.sqrt() + 40.0;
    let lo = (mean - spread).floor().max(0.0) as i64;
    let hi = (mean + spread).ceil() as i64;
    let ln_mean = mean.ln();
    let probs = (lo..=hi)
        .map(|k| {
            let k = k as f64;
            (k * ln_mean - mean - statrs::function::gamma::ln_gamma(k + 1.0)).exp()
        })
        .collect();
    LatticePmf::normalized(lo, probs)
}

/// Finds `θ` with `Ψ'(θ) = a`.
pub fn solve_tilt_for_mean(family: &FamilySpec, a: f64) -> Result<TiltParams> {
    let (lo, hi) = family.attainable_means();
    if !(a.is_finite() && a > lo && a < hi) {
        return Err(Error::MeanUnattainable { mean: a, lo, hi });
    }
    let tol = 1e-12 * a.abs().max(1.0);
    let f = |th: f64| family.dpsi(th) - a;
    let df = |th: f64| family.d2psi(th);
    let theta = bracket_newton(f, df, 0.0, tol)?;
    Ok(family.tilt_params(theta))
}

/// Finds the positive `θ₁` with `Ψ(θ₁) = 0`; returns `μ₁ = Ψ'(θ₁)` alongside.
pub fn solve_zero_of_psi(family: &FamilySpec) -> Result<TiltParams> {
    if family.mean() >= 0.0 {
        return Err(Error::NoPositiveRoot);
    }
    if let Some(top) = family.support_max() {
        if top <= 0 {
            return Err(Error::NoPositiveRoot);
        }
    }
    // Ψ is convex with Ψ(0) = 0 and Ψ'(0) < 0, so it is negative up to its
    // minimiser and crosses zero exactly once beyond it.
    let bottom = solve_tilt_for_mean(family, 0.0)?.theta;
    let psi = |th: f64| family.psi(th);
    let mut lo = bottom;
    let mut hi = 2.0 * bottom;
    let mut expand = 0;
    while psi(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        expand += 1;
        if expand > 200 || !hi.is_finite() {
            return Err(Error::NoPositiveRoot);
        }
    }
    let theta = refine_in_bracket(psi, |th| family.dpsi(th), lo, hi, 1e-12)?;
    if theta <= 0.0 {
        return Err(Error::NoPositiveRoot);
    }
    Ok(family.tilt_params(theta))
}

/// Root of an increasing function `f`, starting the bracket search at `start`.
fn bracket_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    start: f64,
    tol: f64,
) -> Result<f64> {
    let f0 = f(start);
    if f0.abs() <= tol {
        return Ok(start);
    }
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let mut step = 1.0;
    let mut near = start;
    let mut far = start + dir * step;
    let mut expand = 0;
    while f(far) * f0 > 0.0 {
        near = far;
        step *= 2.0;
        far = start + dir * step;
        expand += 1;
        if expand > 1100 || !far.is_finite() {
            return Err(Error::NoConvergence { iterations: expand });
        }
    }
    let (lo, hi) = if dir > 0.0 { (near, far) } else { (far, near) };
    refine_in_bracket(f, df, lo, hi, tol)
}

/// `f(lo) <= 0 <= f(hi)`; bisect to width 1e-3, then bracketed Newton.
fn refine_in_bracket(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut guard = 0;
    while hi - lo > BISECT_WIDTH && guard < 2000 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= tol {
            return Ok(polish(&f, &df, mid));
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        guard += 1;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_CAP {
        let v = f(x);
        if v.abs() <= tol {
            return Ok(polish(&f, &df, x));
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = x - v / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            break;
        }
        x = next;
    }
    if f(x).abs() <= tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: NEWTON_CAP,
        })
    }
}

/// A few extra Newton steps so that roots of equal functions computed
/// through different formulas agree to rounding.
fn polish(f: &impl Fn(f64) -> f64, df: &impl Fn(f64) -> f64, mut x: f64) -> f64 {
    let mut fx = f(x).abs();
    for _ in 0..4 {
        let next = x - f(x) / df(x);
        if !next.is_finite() {
            break;
        }
        let f_next = f(next).abs();
        if f_next > fx || next == x {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

/// Fixed-window case split: span-1 integer support is [`Case::Lattice`];
/// the Normal kind is the only continuous family with a verified
/// integrable characteristic-function power.
pub fn classify_case(family: &FamilySpec) -> Result<Case> {
    match family {
        FamilySpec::Normal { .. } => Ok(Case::Continuous),
        FamilySpec::Bernoulli { .. } | FamilySpec::Poisson { .. } => Ok(Case::Lattice),
        FamilySpec::SimpleWalk { .. } => Err(Error::Unsupported(
            "the ±1 walk has span 2; rescale to (X + 1) / 2".into(),
        )),
        FamilySpec::Table { pmf } => match pmf.span() {
            1 => Ok(Case::Lattice),
            d => Err(Error::Unsupported(format!(
                "table support has span {d}; rescale it to span 1"
            ))),
        },
    }
}

/// Case split for the varying-window statistic: integer support must not be
/// concentrated on `dZ` for any `d > 1`.
pub fn classify_cusum_case(family: &FamilySpec) -> Result<Case> {
    match family {
        FamilySpec::Normal { .. } => Ok(Case::Continuous),
        FamilySpec::Bernoulli { .. }
        | FamilySpec::Poisson { .. }
        | FamilySpec::SimpleWalk { .. } => Ok(Case::Lattice),
        FamilySpec::Table { pmf } => match pmf.support_gcd() {
            1 => Ok(Case::Lattice),
            d => Err(Error::Unsupported(format!(
                "table support is concentrated on multiples of {d}"
            ))),
        },
    }
}

/// Draws from `F_θ` for a fixed `θ`.
#[derive(Debug, Clone)]
pub enum FamilySampler {
    Gaussian { mean: f64 },
    Coin { p: f64 },
    Table { offset: i64, cdf: Vec<f64> },
}

impl FamilySampler {
    pub fn new(family: &FamilySpec, theta: f64) -> Result<Self> {
        family.check_theta(theta)?;
        Ok(match family {
            FamilySpec::Normal { mean } => FamilySampler::Gaussian { mean: mean + theta },
            FamilySpec::Bernoulli { .. } => FamilySampler::Coin {
                p: family.dpsi(theta),
            },
            _ => {
                let pmf = family
                    .lattice_pmf(theta)
                    .expect("non-normal kinds are lattice");
                let mut acc = 0.0;
                let mut cdf: Vec<f64> = pmf
                    .probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                if let Some(last) = cdf.last_mut() {
                    *last = f64::INFINITY;
                }
                FamilySampler::Table {
                    offset: pmf.offset(),
                    cdf,
                }
            }
        })
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform_open();
        match self {
            FamilySampler::Gaussian { mean } => mean + norm_quantile(u),
            FamilySampler::Coin { p } => {
                if u < *p {
                    1.0
                } else {
                    0.0
                }
            }
            FamilySampler::Table { offset, cdf } => {
                let idx = cdf.partition_point(|&c| c <= u);
                (*offset + idx as i64) as f64
            }
        }
    }
}

/// `count` i.i.d. draws from `F_θ`.
pub fn sample(
    family: &FamilySpec,
    theta: f64,
    count: usize,
    stream: &mut RngStream,
) -> Result<Vec<f64>> {
    let sampler = FamilySampler::new(family, theta)?;
    Ok((0..count).map(|_| sampler.draw(stream)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<FamilySpec> {
        vec![
            FamilySpec::normal(0.0).unwrap(),
            FamilySpec::normal(-0.5).unwrap(),
            FamilySpec::bernoulli(0.1).unwrap(),
            FamilySpec::poisson(1.0).unwrap(),
            FamilySpec::simple_walk(0.25).unwrap(),
            FamilySpec::table(&[(-2, 0.5), (-1, 0.2), (1, 0.3)]).unwrap(),
        ]
    }

    #[test]
    fn psi_vanishes_at_origin() {
        for f in families() {
            assert!(f.psi(0.0).abs() < 1e-15, "{f:?}");
            assert!((f.dpsi(0.0) - f.mean()).abs() < 1e-14, "{f:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for f in families() {
            for i in -20..=20 {
                let th = i as f64 * 0.15;
                let d1 = (f.psi(th + h) - f.psi(th - h)) / (2.0 * h);
                let d2 = (f.dpsi(th + h) - f.dpsi(th - h)) / (2.0 * h);
                assert!((d1 - f.dpsi(th)).abs() < 1e-6, "{f:?} at {th}");
                assert!((d2 - f.d2psi(th)).abs() < 1e-6, "{f:?} at {th}");
                assert!(f.d2psi(th) > 0.0);
            }
        }
    }

    #[test]
    fn gaussian_tilt_is_identity() {
        let f = FamilySpec::normal(0.0).unwrap();
        let t = solve_tilt_for_mean(&f, 0.5).unwrap();
        assert!((t.theta - 0.5).abs() < 1e-12);
        assert_eq!(t.variance, 1.0);
    }

    #[test]
    fn bernoulli_tilt_closed_form() {
        let f = FamilySpec::bernoulli(0.1).unwrap();
        let t = solve_tilt_for_mean(&f, 0.4).unwrap();
        let expect = (0.4f64 / 0.6).ln() - (0.1f64 / 0.9).ln();
        assert!((t.theta - expect).abs() < 1e-11);
        assert!((t.theta - 1.791_759_469_228_055).abs() < 1e-11);
        assert!((t.variance - 0.24).abs() < 1e-12);
    }

    #[test]
    fn poisson_tilt_is_log_two() {
        let f = FamilySpec::poisson(1.0).unwrap();
        let t = solve_tilt_for_mean(&f, 2.0).unwrap();
        assert!((t.theta - 2f64.ln()).abs() < 1e-12);
        assert!((f.dpsi(2f64.ln()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unattainable_means_are_rejected() {
        let f = FamilySpec::bernoulli(0.1).unwrap();
        assert!(matches!(
            solve_tilt_for_mean(&f, 1.0),
            Err(Error::MeanUnattainable { .. })
        ));
        assert!(matches!(
            solve_tilt_for_mean(&f, 1.5),
            Err(Error::MeanUnattainable { .. })
        ));
        let p = FamilySpec::poisson(2.0).unwrap();
        assert!(solve_tilt_for_mean(&p, -0.1).is_err());
    }

    #[test]
    fn zero_of_psi_simple_walk() {
        let f = FamilySpec::simple_walk(0.25).unwrap();
        let t = solve_zero_of_psi(&f).unwrap();
        assert!((t.theta - 3f64.ln()).abs() < 1e-11);
        assert!((t.mean - 0.5).abs() < 1e-11);
        assert!(f.psi(t.theta).abs() <= 1e-12);
    }

    #[test]
    fn zero_of_psi_normal() {
        let f = FamilySpec::normal(-0.5).unwrap();
        let t = solve_zero_of_psi(&f).unwrap();
        assert!((t.theta - 1.0).abs() < 1e-11);
        assert!((t.mean - 0.5).abs() < 1e-11);
    }

    #[test]
    fn zero_of_psi_missing() {
        // X in {-1, 0}: Ψ decreases to log P(X = 0) < 0
        let f = FamilySpec::table(&[(-1, 0.3), (0, 0.7)]).unwrap();
        assert_eq!(solve_zero_of_psi(&f), Err(Error::NoPositiveRoot));
        let b = FamilySpec::bernoulli(0.3).unwrap();
        assert_eq!(solve_zero_of_psi(&b), Err(Error::NoPositiveRoot));
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_case(&FamilySpec::normal(0.0).unwrap()),
            Ok(Case::Continuous)
        );
        assert_eq!(
            classify_case(&FamilySpec::bernoulli(0.1).unwrap()),
            Ok(Case::Lattice)
        );
        let even = FamilySpec::table(&[(0, 0.2), (2, 0.3), (4, 0.5)]).unwrap();
        assert!(matches!(classify_case(&even), Err(Error::Unsupported(_))));
        let walk = FamilySpec::simple_walk(0.3).unwrap();
        assert!(classify_case(&walk).is_err());
        assert_eq!(classify_cusum_case(&walk), Ok(Case::Lattice));
    }

    #[test]
    fn empty_sample() {
        let f = FamilySpec::bernoulli(0.1).unwrap();
        let mut s = RngStream::new(1);
        assert!(sample(&f, 0.0, 0, &mut s).unwrap().is_empty());
        assert!(matches!(
            sample(&f, f64::NAN, 3, &mut s),
            Err(Error::ThetaOutOfDomain { .. })
        ));
    }

    fn check_sample_mean(f: &FamilySpec, theta: f64, target: f64) {
        let mut s = RngStream::new(2024);
        let xs = sample(f, theta, 1_000_000, &mut s).unwrap();
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let sd = f.d2psi(theta).sqrt();
        assert!((m - target).abs() < 3.0 * sd / 1e3, "mean {m} vs {target}");
    }

    #[test]
    fn tilted_bernoulli_sample_mean() {
        let f = FamilySpec::bernoulli(0.1).unwrap();
        let t = solve_tilt_for_mean(&f, 0.4).unwrap();
        check_sample_mean(&f, t.theta, 0.4);
    }

    #[test]
    fn tilted_normal_sample_mean() {
        let f = FamilySpec::normal(0.0).unwrap();
        check_sample_mean(&f, 0.5, 0.5);
    }

    #[test]
    fn tilted_table_sample_mean() {
        let f = FamilySpec::poisson(1.0).unwrap();
        check_sample_mean(&f, 2f64.ln(), 2.0);
    }
}
