//! Spitzer-type series `Σ_{k≥1} (1/k) E e^{-θ W_k⁺}` for random walks
//! `W_k` with positive drift, plus the Gaussian overshoot function ν.
//!
//! Three independent evaluators are provided:
//!
//! * [`spitzer_series`] sums the series term by term. Lattice terms come
//!   from exact convolution of the step pmf; Gaussian terms use the closed
//!   form [`gaussian_trunc_exp`].
//! * [`spitzer_integral_continuous`] evaluates the Fourier-type integral
//!   representation over `(0, ∞)` for Gaussian steps.
//! * [`spitzer_integral_lattice`] evaluates the periodic representation
//!   over `(0, 2π)` for integer steps.
//!
//! With `g(x) = E e^{ixW_1}` and `ξ(x) = -log(1 - g(x))`, the integrands
//! contain `ξ(x) + log(d·x)` style combinations that cancel a logarithmic
//! singularity at the origin. They are evaluated as the log of an
//! accurately computed ratio so no cancellation happens in floating point.
//! Since `|g| ≤ 1`, `Re(1 - g) ≥ 0` and the principal logarithm is already
//! the continuous branch along the whole path.

use crate::error::{Error, Result};
use crate::expfamily::{FamilySpec, TiltParams};
use crate::lattice::{convolve_dense, LatticePmf};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{ln_norm_cdf, norm_cdf, norm_pdf};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_TERM_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum IncrementLaw {
    Gaussian { mean: f64, variance: f64 },
    Lattice { pmf: LatticePmf },
}

/// A random walk together with the exponent `θ` applied to its positive part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub increment: IncrementLaw,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpitzerMethod {
    Series,
    IntegralContinuous,
    IntegralLattice,
    ClosedFormNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpitzerEstimate {
    pub value: f64,
    pub method: SpitzerMethod,
    /// Series truncation index or number of integrand evaluations.
    pub nodes: usize,
    pub est_error: f64,
}

impl WalkSpec {
    pub fn gaussian(mean: f64, variance: f64, theta: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid("variance", "must be positive"));
        }
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        Self::with_theta(IncrementLaw::Gaussian { mean, variance }, theta)
    }

    pub fn lattice(pmf: LatticePmf, theta: f64) -> Result<Self> {
        if (pmf.total() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("pmf", "must sum to one"));
        }
        Self::with_theta(IncrementLaw::Lattice { pmf }, theta)
    }

    fn with_theta(increment: IncrementLaw, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::invalid("theta", "must be positive"));
        }
        Ok(Self { increment, theta })
    }

    /// Walk of `D_k = Σ (X_i^a - X_i)` with `X^a ~ F_θ`, `X ~ F`, weighted by `θ`.
    pub fn scan_difference(family: &FamilySpec, tilt: &TiltParams) -> Result<Self> {
        match family {
            FamilySpec::Normal { mean } => {
                Self::gaussian(tilt.mean - mean, 1.0 + tilt.variance, tilt.theta)
            }
            _ => {
                let tilted = family.lattice_pmf(tilt.theta).expect("lattice family");
                let base = family.lattice_pmf(0.0).expect("lattice family");
                Self::lattice(renormalize(tilted.convolve(&base.reflected())), tilt.theta)
            }
        }
    }

    /// Walk of partial sums under `F_θ`, weighted by the same `θ`.
    pub fn tilted_partial_sums(family: &FamilySpec, tilt: &TiltParams) -> Result<Self> {
        match family {
            FamilySpec::Normal { .. } => Self::gaussian(tilt.mean, tilt.variance, tilt.theta),
            _ => Self::lattice(
                family.lattice_pmf(tilt.theta).expect("lattice family"),
                tilt.theta,
            ),
        }
    }

    pub fn drift(&self) -> f64 {
        match &self.increment {
            IncrementLaw::Gaussian { mean, .. } => *mean,
            IncrementLaw::Lattice { pmf } => pmf.mean(),
        }
    }

    /// `E e^{-s W_1}`.
    fn laplace(&self, s: f64) -> f64 {
        match &self.increment {
            IncrementLaw::Gaussian { mean, variance } => (-s * mean + 0.5 * s * s * variance).exp(),
            IncrementLaw::Lattice { pmf } => pmf.log_mgf(-s).exp(),
        }
    }

    /// `min_{0<s≤θ} E e^{-s W_1}`; every series term is bounded by its k-th power.
    pub fn chernoff_rate(&self) -> f64 {
        match &self.increment {
            IncrementLaw::Gaussian { mean, variance } => {
                self.laplace((mean / variance).min(self.theta))
            }
            IncrementLaw::Lattice { .. } => {
                // golden-section on a convex function
                let (mut lo, mut hi) = (0.0, self.theta);
                let r = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..120 {
                    let m1 = hi - r * (hi - lo);
                    let m2 = lo + r * (hi - lo);
                    if self.laplace(m1) < self.laplace(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                self.laplace(0.5 * (lo + hi)).min(self.laplace(self.theta))
            }
        }
    }

    /// `1 - E e^{ixW_1}` without cancellation near `x = 0`.
    fn one_minus_cf(&self, x: f64) -> Complex64 {
        match &self.increment {
            IncrementLaw::Gaussian { mean, variance } => {
                -complex_expm1(Complex64::new(-0.5 * variance * x * x, mean * x))
            }
            IncrementLaw::Lattice { pmf } => pmf
                .atoms()
                .map(|(k, p)| -complex_expm1(Complex64::new(0.0, k as f64 * x)) * p)
                .sum(),
        }
    }
}

fn renormalize(pmf: LatticePmf) -> LatticePmf {
    LatticePmf::normalized(pmf.offset(), pmf.probs().to_vec())
}

/// `e^z - 1` accurate for small `|z|`.
fn complex_expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    Complex64::new(em1 * c - 2.0 * half * half, z.re.exp() * s)
}

/// `E e^{-θ X⁺}` for `X ~ N(m, v)`.
pub fn gaussian_trunc_exp(m: f64, v: f64, theta: f64) -> f64 {
    let sd = v.sqrt();
    let below = norm_cdf(-m / sd);
    let z = (m - theta * v) / sd;
    let above = (-theta * m + 0.5 * theta * theta * v + ln_norm_cdf(z)).exp();
    below + above
}

fn check_drift(walk: &WalkSpec) -> Result<f64> {
    let d = walk.drift();
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::NonPositiveDrift { drift: d })
    }
}

/// Sums terms until the first one below `eps`.
pub fn spitzer_series(walk: &WalkSpec, eps: f64) -> Result<SpitzerEstimate> {
    spitzer_series_with_budget(walk, eps, DEFAULT_TERM_BUDGET)
}

pub fn spitzer_series_with_budget(
    walk: &WalkSpec,
    eps: f64,
    budget: usize,
) -> Result<SpitzerEstimate> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", "must be positive"));
    }
    check_drift(walk)?;
    let mut sum = 0.0;
    let mut last_k = 0;
    series_terms(walk, budget, |k, expectation| {
        let term = expectation / k as f64;
        sum += term;
        last_k = k;
        term >= eps
    })?;
    let rho = walk.chernoff_rate();
    let k1 = (last_k + 1) as f64;
    let est_error = rho.powf(k1) / (k1 * (1.0 - rho));
    Ok(SpitzerEstimate {
        value: sum,
        method: SpitzerMethod::Series,
        nodes: last_k,
        est_error,
    })
}

/// Feeds `(k, E e^{-θ W_k⁺})` to `visit` for k = 1, 2, ... while it returns true.
pub fn series_terms(
    walk: &WalkSpec,
    budget: usize,
    mut visit: impl FnMut(usize, f64) -> bool,
) -> Result<()> {
    let theta = walk.theta;
    match &walk.increment {
        IncrementLaw::Gaussian { mean, variance } => {
            for k in 1..=budget {
                let kf = k as f64;
                if !visit(k, gaussian_trunc_exp(kf * mean, kf * variance, theta)) {
                    return Ok(());
                }
            }
        }
        IncrementLaw::Lattice { pmf } => {
            let step = pmf.probs();
            let mut offset = pmf.offset();
            let mut dist = step.to_vec();
            for k in 1..=budget {
                if k > 1 {
                    dist = convolve_dense(&dist, step);
                    offset += pmf.offset();
                    // drop underflowed edges; their mass is below 1e-300
                    let first = dist.iter().position(|&p| p > 1e-300).unwrap_or(0);
                    let last = dist.iter().rposition(|&p| p > 1e-300).unwrap_or(0);
                    dist.truncate(last + 1);
                    dist.drain(..first);
                    offset += first as i64;
                }
                let mut e = 0.0;
                for (i, &p) in dist.iter().enumerate() {
                    let v = offset + i as i64;
                    e += if v > 0 {
                        p * (-theta * v as f64).exp()
                    } else {
                        p
                    };
                }
                if !visit(k, e) {
                    return Ok(());
                }
            }
        }
    }
    Err(Error::TermBudgetExceeded { budget })
}

/// Pmf of `W_k` for the first `k_max` steps of a lattice walk (test support).
pub fn lattice_partial_sum_pmfs(pmf: &LatticePmf, k_max: usize) -> Vec<LatticePmf> {
    let mut out = Vec::with_capacity(k_max);
    let mut cur = pmf.clone();
    for k in 1..=k_max {
        if k > 1 {
            cur = cur.convolve(pmf);
        }
        out.push(cur.clone());
    }
    out
}

/// Integral representation over `(0, ∞)` for Gaussian steps with drift `d`:
///
/// ```text
/// -log(dθ) - (1/π)∫ θ²(Im ξ - π/2) / (x(θ² + x²)) dx
///          + (1/π)∫ θ(Re ξ + log(dx)) / (θ² + x²) dx
/// ```
///
/// The half line is mapped onto `(0, π/2)` by `x = tan u`.
pub fn spitzer_integral_continuous(walk: &WalkSpec) -> Result<SpitzerEstimate> {
    spitzer_integral_continuous_with(walk, &QuadOptions::default())
}

pub fn spitzer_integral_continuous_with(
    walk: &WalkSpec,
    opts: &QuadOptions,
) -> Result<SpitzerEstimate> {
    if !matches!(walk.increment, IncrementLaw::Gaussian { .. }) {
        return Err(Error::Unsupported(
            "continuous integral needs a Gaussian increment".into(),
        ));
    }
    let d = check_drift(walk)?;
    let theta = walk.theta;
    let th2 = theta * theta;
    let mut branch_fault = None;
    let integrand = |u: f64| {
        let x = u.tan();
        let jac = 1.0 + x * x;
        let Some(r) = continuous_pieces(walk, d, x) else {
            branch_fault.get_or_insert(x);
            return Complex64::new(0.0, 0.0);
        };
        let (im_part, re_part) = r;
        let first = th2 * im_part / (x * (th2 + x * x));
        let second = theta * re_part / (th2 + x * x);
        Complex64::new((second - first) * jac, 0.0)
    };
    let res = integrate(integrand, 0.0, FRAC_PI_2, opts)?;
    if let Some(x) = branch_fault {
        return Err(Error::BranchDiscontinuity { x });
    }
    Ok(SpitzerEstimate {
        value: -(d * theta).ln() + res.value.re / PI,
        method: SpitzerMethod::IntegralContinuous,
        nodes: res.evaluations,
        est_error: res.error / PI,
    })
}

/// `(Im ξ(x) - π/2, Re ξ(x) + log(d x))` for `x > 0`.
fn continuous_pieces(walk: &WalkSpec, d: f64, x: f64) -> Option<(f64, f64)> {
    let omg = walk.one_minus_cf(x);
    if omg.re < 0.0 || omg.norm() == 0.0 {
        return None;
    }
    // i(1 - g)/(d x) → 1 as x → 0
    let ratio = Complex64::new(-omg.im, omg.re) / (d * x);
    Some((-ratio.arg(), -ratio.norm().ln()))
}

/// The `(0, ∞)` integrand at `x`, exposed for endpoint diagnostics.
pub fn continuous_integrand(walk: &WalkSpec, x: f64) -> Result<(f64, f64)> {
    let d = check_drift(walk)?;
    let th2 = walk.theta * walk.theta;
    let (im_part, re_part) =
        continuous_pieces(walk, d, x).ok_or(Error::BranchDiscontinuity { x })?;
    Ok((
        th2 * im_part / (x * (th2 + x * x)),
        walk.theta * re_part / (th2 + x * x),
    ))
}

/// Periodic representation for integer steps with drift `d`:
///
/// ```text
/// -log d + (1/2π)∫₀^{2π} { ξ e^{-θ-ix}/(1 - e^{-θ-ix})
///                         + (ξ + log[d(1 - e^{ix})])/(1 - e^{ix}) } dx
/// ```
pub fn spitzer_integral_lattice(walk: &WalkSpec) -> Result<SpitzerEstimate> {
    spitzer_integral_lattice_with(walk, &QuadOptions::default())
}

pub fn spitzer_integral_lattice_with(
    walk: &WalkSpec,
    opts: &QuadOptions,
) -> Result<SpitzerEstimate> {
    if !matches!(walk.increment, IncrementLaw::Lattice { .. }) {
        return Err(Error::Unsupported(
            "lattice integral needs an integer increment".into(),
        ));
    }
    let d = check_drift(walk)?;
    let mut fault: Option<Error> = None;
    let integrand = |x: f64| match lattice_integrand_at(walk, d, x) {
        Ok(v) => v,
        Err(e) => {
            fault.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let res = integrate(integrand, 0.0, 2.0 * PI, opts)?;
    if let Some(e) = fault {
        return Err(e);
    }
    let imag = res.value.im / (2.0 * PI);
    if imag.abs() > 1e-8 {
        return Err(Error::QuadratureFailure(format!(
            "imaginary part {imag:.3e} did not cancel"
        )));
    }
    Ok(SpitzerEstimate {
        value: -d.ln() + res.value.re / (2.0 * PI),
        method: SpitzerMethod::IntegralLattice,
        nodes: res.evaluations,
        est_error: res.error / (2.0 * PI),
    })
}

/// Value of the `(0, 2π)` integrand; the total integral of its imaginary
/// part vanishes by conjugate symmetry.
pub fn lattice_integrand(walk: &WalkSpec, x: f64) -> Result<Complex64> {
    let d = check_drift(walk)?;
    lattice_integrand_at(walk, d, x)
}

fn lattice_integrand_at(walk: &WalkSpec, d: f64, x: f64) -> Result<Complex64> {
    // every factor is 2π-periodic; near 2π the shifted argument keeps kx accurate
    let x = if x > PI { x - 2.0 * PI } else { x };
    let omg = walk.one_minus_cf(x);
    if omg.re < 0.0 {
        return Err(Error::BranchDiscontinuity { x });
    }
    if omg.norm() == 0.0 {
        return Err(Error::SingularEndpoint { x });
    }
    let xi = -omg.ln();
    let damp = Complex64::new(-walk.theta, -x).exp();
    let first = xi * damp / (Complex64::new(1.0, 0.0) - damp);
    // 1 - e^{ix}
    let omu = -complex_expm1(Complex64::new(0.0, x));
    let ratio = omu * d / omg;
    let second = ratio.ln() / omu;
    let v = first + second;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::SingularEndpoint { x });
    }
    Ok(v)
}

/// Dispatches to the evaluator named by `method`.
pub fn spitzer(walk: &WalkSpec, method: SpitzerMethod) -> Result<SpitzerEstimate> {
    match method {
        SpitzerMethod::Series => spitzer_series(walk, DEFAULT_EPS),
        SpitzerMethod::IntegralContinuous => spitzer_integral_continuous(walk),
        SpitzerMethod::IntegralLattice => spitzer_integral_lattice(walk),
        SpitzerMethod::ClosedFormNormal => spitzer_closed_form_normal(walk),
    }
}

/// Gaussian walks with `θ = 2m/v` reduce to `2Σ(1/k)Φ(-δ√k)`, `δ = m/√v`,
/// which equals `-log[2δ²ν(2δ)]`. This evaluates it with [`nu_approx`].
pub fn spitzer_closed_form_normal(walk: &WalkSpec) -> Result<SpitzerEstimate> {
    let IncrementLaw::Gaussian { mean, variance } = walk.increment else {
        return Err(Error::Unsupported(
            "closed form needs a Gaussian increment".into(),
        ));
    };
    let d = check_drift(walk)?;
    let matched = 2.0 * d / variance;
    if ((walk.theta - matched) / matched).abs() > 1e-9 {
        return Err(Error::PreconditionViolated(format!(
            "closed form needs theta = 2m/v = {matched}, got {}",
            walk.theta
        )));
    }
    let delta = mean / variance.sqrt();
    let nu = nu_approx(2.0 * delta);
    Ok(SpitzerEstimate {
        value: -(2.0 * delta * delta * nu).ln(),
        method: SpitzerMethod::ClosedFormNormal,
        nodes: 0,
        // the ν approximation is good to about two percent on x ≤ 5
        est_error: 0.03,
    })
}

/// Siegmund's overshoot function `ν(x) = 2x⁻² exp(-2Σ(1/k)Φ(-x√k/2))`,
/// summed until a term drops below 1e-14.
pub fn nu_exact(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid("x", "must be positive"));
    }
    let mut s = 0.0;
    for k in 1..=DEFAULT_TERM_BUDGET * 10 {
        let kf = k as f64;
        let term = norm_cdf(-0.5 * x * kf.sqrt()) / kf;
        s += term;
        if term < 1e-14 {
            return Ok(2.0 / (x * x) * (-2.0 * s).exp());
        }
    }
    Err(Error::TermBudgetExceeded {
        budget: DEFAULT_TERM_BUDGET * 10,
    })
}

/// Closed-form approximation
/// `ν(x) ≈ (2/x)(Φ(x/2) - 1/2) / ((x/2)Φ(x/2) + φ(x/2))`.
pub fn nu_approx(x: f64) -> f64 {
    if x < 1e-4 {
        // first-order expansion; the ratio tends to 1 with slope -√(2π)/4
        return 1.0 - x * (2.0 * PI).sqrt() / 4.0;
    }
    let h = 0.5 * x;
    let num = (2.0 / x) * 0.5 * libm::erf(h / std::f64::consts::SQRT_2);
    num / (h * norm_cdf(h) + norm_pdf(h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_scan_walk(a: f64) -> WalkSpec {
        WalkSpec::gaussian(a, 2.0, a).unwrap()
    }

    fn simple_walk_tilted(p: f64) -> WalkSpec {
        let q = 1.0 - p;
        let pmf = LatticePmf::from_pairs(&[(1, q), (-1, p)]).unwrap();
        WalkSpec::lattice(pmf, (q / p).ln()).unwrap()
    }

    #[test]
    fn trunc_exp_zero_theta() {
        for &(m, v) in &[(0.0, 1.0), (3.0, 0.5), (-2.0, 4.0)] {
            assert!((gaussian_trunc_exp(m, v, 0.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trunc_exp_standard_normal() {
        // 0.5 + e^{1/2} Φ(-1), cross-checked by quadrature of e^{-x⁺}φ(x)
        let q = integrate(
            |x: f64| Complex64::new((-x.max(0.0)).exp() * norm_pdf(x), 0.0),
            -40.0,
            40.0,
            &QuadOptions::default(),
        )
        .unwrap();
        let v = gaussian_trunc_exp(0.0, 1.0, 1.0);
        assert!((v - 0.761_578_291_865_123_5).abs() < 1e-12, "{v}");
        assert!((v - q.value.re).abs() < 1e-10);
    }

    #[test]
    fn trunc_exp_large_k_does_not_overflow() {
        let v = gaussian_trunc_exp(5000.0 * 0.2, 5000.0 * 2.0, 0.2);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn deterministic_walk_is_geometric() {
        let pmf = LatticePmf::from_pairs(&[(1, 1.0)]).unwrap();
        let walk = WalkSpec::lattice(pmf, 1.0).unwrap();
        let s = spitzer_series(&walk, 1e-15).unwrap();
        let expect = -(1.0 - (-1f64).exp()).ln();
        assert!((s.value - expect).abs() < 1e-14);
        assert!(s.est_error >= 0.0 && s.est_error < 1e-14);
    }

    #[test]
    fn negative_drift_is_rejected() {
        let pmf = LatticePmf::from_pairs(&[(1, 0.3), (-1, 0.7)]).unwrap();
        let walk = WalkSpec::lattice(pmf, 1.0).unwrap();
        assert!(matches!(
            spitzer_series(&walk, 1e-10),
            Err(Error::NonPositiveDrift { .. })
        ));
        assert!(matches!(
            spitzer_integral_lattice(&walk),
            Err(Error::NonPositiveDrift { .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let walk = normal_scan_walk(0.01);
        assert_eq!(
            spitzer_series_with_budget(&walk, 1e-14, 10),
            Err(Error::TermBudgetExceeded { budget: 10 })
        );
    }

    #[test]
    fn gaussian_series_matches_phi_sum() {
        let a: f64 = 0.5;
        let s = spitzer_series(&normal_scan_walk(a), 1e-15).unwrap();
        let mut direct = 0.0;
        for k in 1..100_000 {
            let kf = k as f64;
            direct += 2.0 / kf * norm_cdf(-a * (kf / 2.0).sqrt());
        }
        assert!((s.value - direct).abs() < 1e-12);
    }

    #[test]
    fn ladder_identity_simple_walk() {
        for &p in &[0.1, 0.25, 0.4] {
            let q = 1.0 - p;
            let walk = simple_walk_tilted(p);
            let s = spitzer_series(&walk, 1e-14).unwrap();
            assert!(((-s.value).exp() - (q - p).powi(2) / q).abs() < 1e-4);
            let i = spitzer_integral_lattice(&walk).unwrap();
            assert!(((-i.value).exp() - (q - p).powi(2) / q).abs() < 1e-4);
        }
    }

    #[test]
    fn lattice_conservation() {
        let pmf = LatticePmf::from_pairs(&[(-1, 0.06), (0, 0.63), (1, 0.31)]).unwrap();
        for d in lattice_partial_sum_pmfs(&pmf, 200) {
            assert!((d.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn continuous_integrand_near_origin_is_bounded() {
        let walk = normal_scan_walk(0.5);
        let (first, second) = continuous_integrand(&walk, 1e-6).unwrap();
        assert!(first.is_finite() && second.is_finite());
        assert!(
            first.abs() < 10.0 && second.abs() < 10.0,
            "{first} {second}"
        );
    }

    #[test]
    fn continuous_integrand_decays() {
        let walk = normal_scan_walk(0.5);
        for &x in &[20.0, 50.0, 200.0] {
            let (first, _) = continuous_integrand(&walk, x).unwrap();
            let envelope = 0.25 * FRAC_PI_2 / (x * (0.25 + x * x));
            assert!(
                first.abs() <= 1.0001 * envelope,
                "{x}: {first} vs {envelope}"
            );
        }
    }

    #[test]
    fn lattice_integrand_conjugate_symmetry() {
        let pmf = LatticePmf::from_pairs(&[(-1, 0.06), (0, 0.63), (1, 0.31)]).unwrap();
        let walk = WalkSpec::lattice(pmf, 1.79).unwrap();
        for &x in &[0.1, 0.7, 2.0, 3.0] {
            let a = lattice_integrand(&walk, x).unwrap();
            let b = lattice_integrand(&walk, 2.0 * PI - x).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_methods_are_rejected() {
        let walk = normal_scan_walk(0.5);
        assert!(spitzer_integral_lattice(&walk).is_err());
        let lat = simple_walk_tilted(0.25);
        assert!(spitzer_integral_continuous(&lat).is_err());
        assert!(spitzer_closed_form_normal(&lat).is_err());
        let off = WalkSpec::gaussian(0.5, 2.0, 0.3).unwrap();
        assert!(matches!(
            spitzer_closed_form_normal(&off),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn nu_approx_limits() {
        assert!((nu_approx(1e-9) - 1.0).abs() < 1e-8);
        assert!((nu_approx(1.0e-4) - nu_approx(1.0001e-4)).abs() < 1e-7);
        let x = 10.0;
        assert!((nu_approx(x) * x * x / 2.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn closed_form_is_close_to_series() {
        let walk = normal_scan_walk(0.4);
        let c = spitzer_closed_form_normal(&walk).unwrap();
        let s = spitzer_series(&walk, 1e-14).unwrap();
        assert!((c.value - s.value).abs() < c.est_error);
    }
}
