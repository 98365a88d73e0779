//! Tail approximations for the varying-window statistic
//! `max_{0≤i<j≤n} (S_j - S_i)` of a negative-drift walk.
//!
//! With `θ₁ > 0` the positive zero of Ψ and `μ₁ = Ψ'(θ₁)`:
//!
//! ```text
//! continuous: λ = (n - b/μ₁) e^{-θ₁b} / (θ₁μ₁)            · e^{-2Σ}
//! lattice:    λ = (n - b/μ₁) e^{-θ₁b} / ((1 - e^{-θ₁})μ₁) · e^{-2Σ}
//! ```
//!
//! where `Σ = Σ_k (1/k) E_{θ₁} e^{-θ₁ S_k⁺}` is taken under the tilted law.
//! Integer walks whose up-steps (or down-steps) are all of size one also
//! admit direct formulas in terms of the root `z₀ > 1` of `G(z) = 1`.

use crate::error::{Error, Result};
use crate::expfamily::{classify_cusum_case, solve_zero_of_psi, Case, FamilySpec, TiltParams};
use crate::fixed_window::{ApproxMethod, ApproxResult};
use crate::walk_functionals::{spitzer, WalkSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumConfig {
    pub family: FamilySpec,
    pub n: u64,
    pub b: f64,
    /// `θ₁` and `μ₁`.
    pub tilt: TiltParams,
    pub case: Case,
}

impl CusumConfig {
    pub fn new(family: FamilySpec, n: u64, b: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n", "must be positive"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("b", "must be positive"));
        }
        let case = classify_cusum_case(&family)?;
        if case == Case::Lattice && b.fract() != 0.0 {
            return Err(Error::invalid(
                "b",
                "integer-valued families need an integer threshold",
            ));
        }
        let tilt = solve_zero_of_psi(&family)?;
        Ok(Self {
            family,
            n,
            b,
            tilt,
            case,
        })
    }

    pub fn theta1(&self) -> f64 {
        self.tilt.theta
    }

    pub fn mu1(&self) -> f64 {
        self.tilt.mean
    }

    /// `n - b/μ₁`.
    pub fn effective_windows(&self) -> f64 {
        self.n as f64 - self.b / self.mu1()
    }
}

pub fn lambda_cusum(config: &CusumConfig, method: ApproxMethod) -> Result<ApproxResult> {
    let eff = config.effective_windows();
    if !(eff > 0.0) {
        return Err(Error::NonPositiveEffectiveWindows { value: eff });
    }
    let walk = WalkSpec::tilted_partial_sums(&config.family, &config.tilt)?;
    let sp = spitzer(&walk, method.spitzer_method(config.case))?;
    let (theta, mu1, b) = (config.theta1(), config.mu1(), config.b);
    let overshoot = match config.case {
        Case::Continuous => theta,
        Case::Lattice => -(-theta).exp_m1(),
    };
    let log_lambda = eff.ln() - theta * b - (overshoot * mu1).ln() - 2.0 * sp.value;
    let tag = match config.case {
        Case::Continuous => "cusum-continuous",
        Case::Lattice => "cusum-lattice",
    };
    let rate = rate_term_cusum(config.n as f64, b, mu1, b.sqrt()).ok();
    Ok(ApproxResult::new(log_lambda.exp(), tag, rate, Some(sp)))
}

/// Integer walk with `P(X = k) = up[k]` for `k ≥ 0` and
/// `P(X = -k) = down[k-1]` for `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeWalkSpec {
    up: Vec<f64>,
    down: Vec<f64>,
}

impl LatticeWalkSpec {
    pub fn new(up: Vec<f64>, down: Vec<f64>) -> Result<Self> {
        if up
            .iter()
            .chain(&down)
            .any(|p| !(p.is_finite() && *p >= 0.0))
        {
            return Err(Error::invalid("pmf", "probabilities must be non-negative"));
        }
        let total: f64 = up.iter().chain(&down).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("pmf", format!("sums to {total}, not 1")));
        }
        let mut w = Self { up, down };
        while w.up.last() == Some(&0.0) {
            w.up.pop();
        }
        while w.down.last() == Some(&0.0) {
            w.down.pop();
        }
        Ok(w)
    }

    /// ±1 walk with up-probability `p`.
    pub fn simple(p: f64) -> Result<Self> {
        Self::new(vec![0.0, p], vec![1.0 - p])
    }

    /// Converts a bounded integer family.
    pub fn from_family(family: &FamilySpec) -> Result<Self> {
        let pmf = family.finite_pmf().ok_or(Error::WrongFamily {
            expected: "bounded integer-valued",
        })?;
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (k, p) in pmf.atoms() {
            if k >= 0 {
                let i = k as usize;
                if up.len() <= i {
                    up.resize(i + 1, 0.0);
                }
                up[i] += p;
            } else {
                let i = (-k - 1) as usize;
                if down.len() <= i {
                    down.resize(i + 1, 0.0);
                }
                down[i] += p;
            }
        }
        Self::new(up, down)
    }

    /// `G(z) = Σ p_k z^k + Σ q_k z^{-k}`.
    pub fn g(&self, z: f64) -> f64 {
        let ups: f64 = self
            .up
            .iter()
            .enumerate()
            .map(|(k, p)| p * z.powi(k as i32))
            .sum();
        let downs: f64 = self
            .down
            .iter()
            .enumerate()
            .map(|(i, q)| q * z.powi(-(i as i32 + 1)))
            .sum();
        ups + downs
    }

    pub fn g_prime(&self, z: f64) -> f64 {
        let ups: f64 = self
            .up
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, p)| k as f64 * p * z.powi(k as i32 - 1))
            .sum();
        let downs: f64 = self
            .down
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let k = i as i32 + 1;
                -(k as f64) * q * z.powi(-k - 1)
            })
            .sum();
        ups + downs
    }

    /// `Q(z) = Σ q_k z^k`.
    pub fn q(&self, z: f64) -> f64 {
        self.down
            .iter()
            .enumerate()
            .map(|(i, q)| q * z.powi(i as i32 + 1))
            .sum()
    }

    pub fn q_prime(&self, z: f64) -> f64 {
        self.down
            .iter()
            .enumerate()
            .map(|(i, q)| (i + 1) as f64 * q * z.powi(i as i32))
            .sum()
    }

    pub fn drift(&self) -> f64 {
        self.g_prime(1.0)
    }

    pub fn max_up(&self) -> usize {
        self.up.len().saturating_sub(1)
    }

    pub fn max_down(&self) -> usize {
        self.down.len()
    }
}

/// Unique root `z₀ > 1` of `G(z) = 1`.
pub fn z0_root(walk: &LatticeWalkSpec) -> Result<f64> {
    if walk.max_up() == 0 || !(walk.drift() < 0.0) {
        return Err(Error::NoRoot);
    }
    // G is convex on (0, ∞) with G(1) = 1 and G'(1) < 0: locate the
    // minimiser, then the crossing to its right.
    let mut hi = 2.0;
    while walk.g_prime(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoRoot);
        }
    }
    let (mut lo, mut up) = (1.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if walk.g_prime(mid) < 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    let bottom = 0.5 * (lo + up);
    if walk.g(bottom) >= 1.0 {
        return Err(Error::NoRoot);
    }
    let mut lo = bottom;
    let mut hi = 2.0 * bottom;
    while walk.g(hi) < 1.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoRoot);
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..400 {
        let f = walk.g(z) - 1.0;
        if f.abs() <= 1e-13 {
            break;
        }
        if f < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let newton = z - f / walk.g_prime(z);
        z = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if (walk.g(z) - 1.0).abs() > 1e-12 {
        return Err(Error::NoConvergence { iterations: 400 });
    }
    Ok(z)
}

fn check_closed_form_args(n: u64, b: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::invalid("n", "must be positive"));
    }
    if b < 1 {
        return Err(Error::invalid("b", "must be a positive integer"));
    }
    Ok(())
}

/// Walks whose up-steps are at most one:
/// `λ ~ n z₀^{-b} {[Q(1) - Q(1/z₀)] - (1 - 1/z₀)(1/z₀) Q'(1/z₀)}`.
pub fn lambda_closed_form_max_up_one(
    walk: &LatticeWalkSpec,
    n: u64,
    b: i64,
) -> Result<ApproxResult> {
    check_closed_form_args(n, b)?;
    if walk.max_up() != 1 {
        return Err(Error::WrongSupportShape("up-steps must be at most 1"));
    }
    let z0 = z0_root(walk)?;
    let w = 1.0 / z0;
    let bracket = (walk.q(1.0) - walk.q(w)) - (1.0 - w) * w * walk.q_prime(w);
    let lambda = n as f64 * (-(b as f64) * z0.ln()).exp() * bracket;
    Ok(ApproxResult::new(lambda, "closed-max-up-one", None, None))
}

/// Walks whose down-steps are at most one:
/// `λ ~ n z₀^{-b} (1 - 1/z₀) |G'(1)|² / (z₀ G'(z₀))`.
///
/// The denominator is the derivative of `s ↦ G(e^s)` at `s = log z₀`.
pub fn lambda_closed_form_min_down_one(
    walk: &LatticeWalkSpec,
    n: u64,
    b: i64,
) -> Result<ApproxResult> {
    check_closed_form_args(n, b)?;
    if walk.max_down() != 1 {
        return Err(Error::WrongSupportShape("down-steps must be at most 1"));
    }
    let z0 = z0_root(walk)?;
    let g1 = walk.drift();
    let lambda = n as f64 * (-(b as f64) * z0.ln()).exp() * (1.0 - 1.0 / z0) * g1 * g1
        / (z0 * walk.g_prime(z0));
    Ok(ApproxResult::new(lambda, "closed-min-down-one", None, None))
}

/// `(1 + (b/h²)/(n - b/μ₁)) e^{-h²} + √b·h/(n - b/μ₁)`.
pub fn rate_term_cusum(n: f64, b: f64, mu1: f64, h: f64) -> Result<f64> {
    let eff = n - b / mu1;
    if !(h > 0.0) {
        return Err(Error::PreconditionViolated("h must be positive".into()));
    }
    if !(eff > b.sqrt() * h) {
        return Err(Error::PreconditionViolated(format!(
            "n - b/mu1 = {eff} must exceed sqrt(b)*h = {}",
            b.sqrt() * h
        )));
    }
    Ok((1.0 + (b / (h * h)) / eff) * (-h * h).exp() + b.sqrt() * h / eff)
}
