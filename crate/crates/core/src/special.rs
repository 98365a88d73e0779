//! Standard normal helpers with log-space tails.

use statrs::function::erf;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument the lower tail is evaluated through the Mills ratio.
const MILLS_CUTOFF: f64 = -8.0;

/// Standard normal density.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Standard normal distribution function.
pub fn norm_cdf(z: f64) -> f64 {
    if z < MILLS_CUTOFF {
        norm_pdf(z) * mills_ratio(-z)
    } else {
        0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
    }
}

/// Upper tail `1 - Φ(z)` without cancellation.
pub fn norm_sf(z: f64) -> f64 {
    norm_cdf(-z)
}

/// `ln Φ(z)`, finite for every finite `z`.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z < MILLS_CUTOFF {
        -0.5 * z * z - LN_SQRT_2PI + mills_ratio(-z).ln()
    } else {
        norm_cdf(z).ln()
    }
}

/// Mills ratio `(1 - Φ(x)) / φ(x)` for `x >= 8` by a backward-evaluated
/// continued fraction `1/(x+1/(x+2/(x+3/(x+...))))`.
pub fn mills_ratio(x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let mut tail = x;
    for k in (1..=80).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / tail
}

/// Inverse of the standard normal distribution function.
pub fn norm_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_matches_known_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((norm_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-15);
    }

    #[test]
    fn mills_branch_is_continuous() {
        let a = norm_pdf(8.0) * mills_ratio(8.0);
        let b = 0.5 * libm::erfc(8.0 / std::f64::consts::SQRT_2);
        assert!(((a - b) / b).abs() < 1e-13, "{a} vs {b}");
    }

    #[test]
    fn log_cdf_deep_tail() {
        // ln Φ(-40) ≈ -800 - ln(40) - ln√(2π) to leading order
        let v = ln_norm_cdf(-40.0);
        let lead = -800.0 - 40f64.ln() - LN_SQRT_2PI;
        assert!((v - lead).abs() < 1e-3);
        assert!(v.is_finite());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let z = norm_quantile(p);
            let back = norm_cdf(z);
            assert!(((back - p) / p).abs() < 1e-9, "p={p} back={back}");
        }
    }
}
