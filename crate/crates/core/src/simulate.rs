//! Ground truth for the approximations: seeded Monte Carlo estimators for
//! both statistics and an exact enumeration/DP oracle for small lattice
//! instances.
//!
//! Replicate `r` always draws from `RngStream::for_replicate(seed, r)`, and
//! the reduction is an integer hit count, so the estimate is bit-identical
//! for any worker count.

use crate::error::{Error, Result};
use crate::expfamily::{FamilySampler, FamilySpec};
use crate::fixed_window::ScanConfig;
use crate::rng::RngStream;
use crate::varying_window::CusumConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Rolling float sums are recomputed from scratch this often.
const RESYNC_PERIOD: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum SimTarget {
    FixedScan(ScanConfig),
    Cusum(CusumConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub target: SimTarget,
    pub reps: u64,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub estimate: f64,
    pub reps: u64,
    pub hits: u64,
    pub stderr: f64,
    /// Wilson score interval at 95%.
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl SimResult {
    pub fn from_hits(hits: u64, reps: u64, seed: u64) -> Self {
        let n = reps as f64;
        let p = hits as f64 / n;
        let stderr = (p * (1.0 - p) / n).sqrt();
        let z = 1.959_963_984_540_054;
        let z2 = z * z;
        let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        let lo = (center - half).clamp(0.0, p);
        let hi = (center + half).clamp(p, 1.0);
        Self {
            estimate: p,
            reps,
            hits,
            stderr,
            ci95: (lo, hi),
            seed,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::invalid("reps", "must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        Ok(())
    }
}

fn count_hits<F>(reps: u64, seed: u64, workers: usize, hit: F) -> Result<u64>
where
    F: Fn(&mut RngStream) -> bool + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    Ok(pool.install(|| {
        (0..reps)
            .into_par_iter()
            .filter(|&r| hit(&mut RngStream::for_replicate(seed, r)))
            .count() as u64
    }))
}

/// Estimates `P(M_{n;t} ≥ at)`.
pub fn mc_fixed_scan(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let SimTarget::FixedScan(scan) = &config.target else {
        return Err(Error::invalid("target", "expected a fixed-window target"));
    };
    let sampler = FamilySampler::new(&scan.family, 0.0)?;
    let (n, t) = (scan.n as usize, scan.t as usize);
    let hits = if scan.family.is_lattice() {
        let k = scan.threshold_ceil();
        count_hits(config.reps, config.seed, config.workers, |rng| {
            lattice_window_hit(&sampler, rng, n, t, k)
        })?
    } else {
        let b = scan.threshold();
        count_hits(config.reps, config.seed, config.workers, |rng| {
            float_window_hit(&sampler, rng, n, t, b)
        })?
    };
    Ok(SimResult::from_hits(hits, config.reps, config.seed))
}

fn lattice_window_hit(
    sampler: &FamilySampler,
    rng: &mut RngStream,
    n: usize,
    t: usize,
    k: i64,
) -> bool {
    let mut ring = vec![0i64; t];
    let mut sum = 0i64;
    for i in 0..n {
        let x = sampler.draw(rng) as i64;
        let slot = i % t;
        sum += x - ring[slot];
        ring[slot] = x;
        if i + 1 >= t && sum >= k {
            return true;
        }
    }
    false
}

fn float_window_hit(
    sampler: &FamilySampler,
    rng: &mut RngStream,
    n: usize,
    t: usize,
    b: f64,
) -> bool {
    let mut ring = vec![0.0f64; t];
    let mut sum = 0.0;
    for i in 0..n {
        let x = sampler.draw(rng);
        let slot = i % t;
        sum += x - ring[slot];
        ring[slot] = x;
        if (i + 1) % RESYNC_PERIOD == 0 {
            sum = ring.iter().sum();
        }
        if i + 1 >= t && sum >= b {
            return true;
        }
    }
    false
}

/// Estimates `P(max_{0≤i<j≤n} (S_j - S_i) ≥ b)` with one pass per replicate.
pub fn mc_cusum(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let SimTarget::Cusum(cusum) = &config.target else {
        return Err(Error::invalid("target", "expected a varying-window target"));
    };
    let sampler = FamilySampler::new(&cusum.family, 0.0)?;
    let (n, b) = (cusum.n as usize, cusum.b);
    let hits = count_hits(config.reps, config.seed, config.workers, |rng| {
        let mut s = 0.0;
        let mut low = 0.0f64;
        for _ in 0..n {
            s += sampler.draw(rng);
            if s - low >= b {
                return true;
            }
            low = low.min(s);
        }
        false
    })?;
    Ok(SimResult::from_hits(hits, config.reps, config.seed))
}

/// Runs whichever estimator matches the target.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    match config.target {
        SimTarget::FixedScan(_) => mc_fixed_scan(config),
        SimTarget::Cusum(_) => mc_cusum(config),
    }
}

pub const DEFAULT_STATE_BUDGET: f64 = 1e8;
const DP_STATE_LIMIT: f64 = 1e5;

/// Exact `P(M_{n;t} ≥ k)` for a bounded integer family.
///
/// Uses a DP over the last `t - 1` values when the support allows at most
/// 1e5 window states, and pruned enumeration of all `|support|^n`
/// sequences otherwise (subject to `budget`).
pub fn exact_fixed_scan_small(
    family: &FamilySpec,
    n: u64,
    t: u64,
    k: i64,
    budget: f64,
) -> Result<f64> {
    if t < 1 || t > n {
        return Err(Error::DegenerateWindow { n, t });
    }
    let pmf = match family {
        FamilySpec::Normal { .. } => {
            return Err(Error::WrongFamily {
                expected: "bounded integer-valued",
            })
        }
        FamilySpec::Poisson { .. } => return Err(Error::UnboundedSupport),
        _ => family.finite_pmf().expect("bounded lattice family"),
    };
    let atoms: Vec<(i64, f64)> = pmf.atoms().collect();
    let s = atoms.len() as f64;
    if s.powi(t as i32 - 1) <= DP_STATE_LIMIT {
        return Ok(window_dp(&atoms, n as usize, t as usize, k));
    }
    let states = s.powf(n as f64);
    if states > budget {
        return Err(Error::BudgetExceeded { states, budget });
    }
    let mut prefix = Vec::with_capacity(n as usize);
    Ok(enumerate(
        &atoms,
        n as usize,
        t as usize,
        k,
        &mut prefix,
        1.0,
    ))
}

fn window_dp(atoms: &[(i64, f64)], n: usize, t: usize, k: i64) -> f64 {
    let s = atoms.len();
    let keep = t - 1;
    let n_states = s.pow(keep as u32);
    // state = base-s digits of the last t-1 atom indices, oldest most significant
    let mut state_sum = vec![0i64; n_states];
    for (code, slot) in state_sum.iter_mut().enumerate() {
        let mut c = code;
        let mut acc = 0;
        for _ in 0..keep {
            acc += atoms[c % s].0;
            c /= s;
        }
        *slot = acc;
    }
    // fill the first t-1 positions
    let mut mass = vec![0.0; n_states];
    mass[0] = 1.0;
    let mut filled = vec![0.0; n_states];
    if keep == 0 {
        filled[0] = 1.0;
    } else {
        for (code, m) in filled.iter_mut().enumerate() {
            let mut c = code;
            let mut p = 1.0;
            for _ in 0..keep {
                p *= atoms[c % s].1;
                c /= s;
            }
            *m = p;
        }
    }
    mass.copy_from_slice(&filled);
    let mut hit = 0.0;
    let shift = if keep == 0 { 1 } else { n_states / s };
    for _ in keep..n {
        let mut next = vec![0.0; n_states];
        for (code, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (j, &(v, p)) in atoms.iter().enumerate() {
                if state_sum[code] + v >= k {
                    hit += m * p;
                } else if keep > 0 {
                    let nc = (code % shift) * s + j;
                    next[nc] += m * p;
                } else {
                    next[0] += m * p;
                }
            }
        }
        mass = next;
    }
    hit
}

fn enumerate(
    atoms: &[(i64, f64)],
    n: usize,
    t: usize,
    k: i64,
    prefix: &mut Vec<i64>,
    prob: f64,
) -> f64 {
    let len = prefix.len();
    if len >= t {
        let w: i64 = prefix[len - t..].iter().sum();
        if w >= k {
            return prob;
        }
    }
    if len == n {
        return 0.0;
    }
    let mut total = 0.0;
    for &(v, p) in atoms {
        prefix.push(v);
        total += enumerate(atoms, n, t, k, prefix, prob * p);
        prefix.pop();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tribonacci_count() {
        let f = FamilySpec::bernoulli(0.5).unwrap();
        let p = exact_fixed_scan_small(&f, 6, 3, 3, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(p, 20.0 / 64.0);
    }

    #[test]
    fn dp_and_enumeration_agree() {
        let f = FamilySpec::table(&[(-1, 0.3), (0, 0.2), (2, 0.5)]).unwrap();
        let atoms: Vec<(i64, f64)> = f.finite_pmf().unwrap().atoms().collect();
        for (n, t, k) in [(8usize, 3usize, 3i64), (9, 4, 5), (7, 1, 2), (6, 6, 4)] {
            let dp = window_dp(&atoms, n, t, k);
            let en = enumerate(&atoms, n, t, k, &mut Vec::new(), 1.0);
            assert!((dp - en).abs() < 1e-14, "{n} {t} {k}: {dp} vs {en}");
        }
    }

    #[test]
    fn unattainable_threshold_is_zero() {
        let f = FamilySpec::bernoulli(0.3).unwrap();
        assert_eq!(exact_fixed_scan_small(&f, 10, 4, 5, 1e8).unwrap(), 0.0);
    }

    #[test]
    fn single_window_is_sum_tail() {
        let f = FamilySpec::bernoulli(0.3).unwrap();
        let p = exact_fixed_scan_small(&f, 5, 5, 3, 1e8).unwrap();
        let expect = 10.0 * 0.3f64.powi(3) * 0.49 + 5.0 * 0.3f64.powi(4) * 0.7 + 0.3f64.powi(5);
        assert!((p - expect).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let pairs: Vec<(i64, f64)> = (0..40).map(|k| (k, 1.0 / 40.0)).collect();
        let f = FamilySpec::table(&pairs).unwrap();
        assert!(matches!(
            exact_fixed_scan_small(&f, 20, 6, 100, 1e8),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn one_replicate() {
        let scan = ScanConfig::new(FamilySpec::bernoulli(0.5).unwrap(), 6, 3, 1.0).unwrap();
        let r = mc_fixed_scan(&SimConfig {
            target: SimTarget::FixedScan(scan),
            reps: 1,
            seed: 3,
            workers: 1,
        })
        .unwrap();
        assert!(r.estimate == 0.0 || r.estimate == 1.0);
        assert_eq!(r.stderr, 0.0);
        assert!(r.ci95.0 <= r.estimate && r.estimate <= r.ci95.1);
    }

    #[test]
    fn zero_reps_rejected() {
        let scan = ScanConfig::new(FamilySpec::bernoulli(0.5).unwrap(), 6, 3, 1.0).unwrap();
        let r = mc_fixed_scan(&SimConfig {
            target: SimTarget::FixedScan(scan),
            reps: 0,
            seed: 3,
            workers: 1,
        });
        assert!(r.is_err());
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        for hits in [0, 1, 17, 50, 99, 100] {
            let r = SimResult::from_hits(hits, 100, 0);
            assert!(r.ci95.0 <= r.estimate && r.estimate <= r.ci95.1);
        }
    }
}
