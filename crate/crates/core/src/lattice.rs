//! Probability mass functions on a finite integer window.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Masses `probs[i] = P(X = offset + i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePmf {
    offset: i64,
    probs: Vec<f64>,
}

impl LatticePmf {
    /// Builds a pmf from `(value, probability)` pairs. Repeated values are
    /// merged; the total must be one within 1e-12.
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("pmf", "empty support"));
        }
        for &(_, p) in pairs {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::invalid("pmf", format!("bad probability {p}")));
            }
        }
        let lo = pairs.iter().map(|&(k, _)| k).min().unwrap();
        let hi = pairs.iter().map(|&(k, _)| k).max().unwrap();
        let width = (hi - lo) as usize + 1;
        if width > 1 << 24 {
            return Err(Error::invalid("pmf", "support window too wide"));
        }
        let mut probs = vec![0.0; width];
        for &(k, p) in pairs {
            probs[(k - lo) as usize] += p;
        }
        Self::from_dense(lo, probs)
    }

    /// Builds a pmf from a dense vector starting at `offset`.
    pub fn from_dense(offset: i64, probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "pmf",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        let mut pmf = Self { offset, probs };
        pmf.trim();
        if pmf.probs.is_empty() {
            return Err(Error::invalid("pmf", "no positive mass"));
        }
        Ok(pmf)
    }

    /// Same as [`from_dense`](Self::from_dense) but rescales to unit mass.
    pub(crate) fn normalized(offset: i64, mut probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        let mut pmf = Self { offset, probs };
        pmf.trim();
        pmf
    }

    fn trim(&mut self) {
        let first = self.probs.iter().position(|&p| p > 0.0);
        let Some(first) = first else {
            self.probs.clear();
            return;
        };
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap();
        self.probs.truncate(last + 1);
        self.probs.drain(..first);
        self.offset += first as i64;
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn min_value(&self) -> i64 {
        self.offset
    }

    pub fn max_value(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn prob(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i as usize >= self.probs.len() {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    /// `(value, probability)` pairs with positive mass.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    /// Largest `d` such that the support lies in `w + dZ`; 0 for a point mass.
    pub fn span(&self) -> u64 {
        let base = self.offset;
        self.atoms().map(|(k, _)| (k - base) as u64).fold(0, gcd)
    }

    /// Greatest common divisor of the support points themselves.
    pub fn support_gcd(&self) -> u64 {
        self.atoms().map(|(k, _)| k.unsigned_abs()).fold(0, gcd)
    }

    /// `ln E e^{s X}` via log-sum-exp.
    pub fn log_mgf(&self, s: f64) -> f64 {
        let m = self
            .atoms()
            .map(|(k, _)| s * k as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let acc: f64 = self
            .atoms()
            .map(|(k, p)| p * (s * k as f64 - m).exp())
            .sum();
        m + acc.ln()
    }

    /// Exponentially tilted pmf `p(k) e^{s k} / E e^{s X}`.
    pub fn tilted(&self, s: f64) -> LatticePmf {
        let lm = self.log_mgf(s);
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p > 0.0 {
                    p * (s * (self.offset + i as i64) as f64 - lm).exp()
                } else {
                    0.0
                }
            })
            .collect();
        LatticePmf::normalized(self.offset, probs)
    }

    /// Law of `-X`.
    pub fn reflected(&self) -> LatticePmf {
        let mut probs = self.probs.clone();
        probs.reverse();
        LatticePmf {
            offset: -self.max_value(),
            probs,
        }
    }

    /// Law of the sum of independent copies drawn from `self` and `other`.
    pub fn convolve(&self, other: &LatticePmf) -> LatticePmf {
        let probs = convolve_dense(&self.probs, &other.probs);
        LatticePmf {
            offset: self.offset + other.offset,
            probs,
        }
    }

    /// `P(X >= k)`.
    pub fn tail_at_least(&self, k: i64) -> f64 {
        let start = (k - self.offset).max(0) as usize;
        if start >= self.probs.len() {
            return 0.0;
        }
        // summing small-to-large keeps deep tails accurate
        self.probs[start..].iter().rev().sum()
    }
}

pub(crate) fn convolve_dense(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(LatticePmf::from_pairs(&[(0, 0.5), (1, 0.4)]).is_err());
        assert!(LatticePmf::from_pairs(&[]).is_err());
        assert!(LatticePmf::from_pairs(&[(0, -0.1), (1, 1.1)]).is_err());
    }

    #[test]
    fn span_and_gcd() {
        let even = LatticePmf::from_pairs(&[(0, 0.2), (2, 0.3), (4, 0.5)]).unwrap();
        assert_eq!(even.span(), 2);
        let walk = LatticePmf::from_pairs(&[(-1, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(walk.span(), 2);
        assert_eq!(walk.support_gcd(), 1);
        let bern = LatticePmf::from_pairs(&[(0, 0.9), (1, 0.1)]).unwrap();
        assert_eq!(bern.span(), 1);
    }

    #[test]
    fn trims_zero_edges() {
        let p = LatticePmf::from_pairs(&[(-3, 0.0), (1, 0.25), (2, 0.75), (5, 0.0)]).unwrap();
        assert_eq!(p.min_value(), 1);
        assert_eq!(p.max_value(), 2);
    }

    #[test]
    fn convolution_of_coins() {
        let c = LatticePmf::from_pairs(&[(0, 0.5), (1, 0.5)]).unwrap();
        let two = c.convolve(&c);
        assert_eq!(two.probs(), &[0.25, 0.5, 0.25]);
        let d = c.convolve(&c.reflected());
        assert_eq!(d.min_value(), -1);
        assert!((d.prob(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tilting_moves_mean() {
        let c = LatticePmf::from_pairs(&[(0, 0.5), (1, 0.5)]).unwrap();
        let t = c.tilted(3f64.ln());
        assert!((t.prob(1) - 0.75).abs() < 1e-15);
        assert!((t.total() - 1.0).abs() < 1e-15);
    }
}
