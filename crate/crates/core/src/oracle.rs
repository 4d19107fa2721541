//! Ground truth for the distribution of `X_y`: exhaustive counts of
//! permutations by longest increasing subsequence, and Monte Carlo sampling of
//! the Poissonized permutation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::toeplitz_cdf::log_phi_sequence;

/// Largest `k` for which [`exhaustive_f`] enumerates `S_k`.
pub const MAX_EXHAUSTIVE_K: usize = 9;

/// Longest increasing subsequence of a permutation of `1..=k`, by patience
/// sorting in `O(k log k)`.
pub fn lis_length(perm: &[usize]) -> Result<usize> {
    let k = perm.len();
    let mut seen = vec![false; k];
    for &v in perm {
        if v == 0 || v > k || std::mem::replace(&mut seen[v - 1], true) {
            return Err(invalid(format!("not a permutation of 1..={k}")));
        }
    }
    Ok(patience_lis(perm))
}

// pile tops, kept sorted
fn patience_lis(perm: &[usize]) -> usize {
    let mut tops: Vec<usize> = Vec::with_capacity(perm.len());
    for &v in perm {
        let pile = tops.partition_point(|&top| top < v);
        if pile == tops.len() {
            tops.push(v);
        } else {
            tops[pile] = v;
        }
    }
    tops.len()
}

/// Quadratic dynamic program for the same quantity; no input validation.
pub fn lis_length_dp(perm: &[usize]) -> usize {
    let mut ending_at = vec![1usize; perm.len()];
    for i in 0..perm.len() {
        for j in 0..i {
            if perm[j] < perm[i] && ending_at[j] + 1 > ending_at[i] {
                ending_at[i] = ending_at[j] + 1;
            }
        }
    }
    ending_at.into_iter().max().unwrap_or(0)
}

/// `f(k, r) = #{sigma in S_k : LIS(sigma) <= r}` for `k, r <= k_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FTable {
    pub k_max: usize,
    /// `f[k][r]` for `r = 0..=k_max`.
    pub f: Vec<Vec<u64>>,
}

impl FTable {
    /// `f(k, r)`; `r` beyond the table saturates at `k!`.
    pub fn get(&self, k: usize, r: usize) -> u64 {
        self.f[k][r.min(self.k_max)]
    }

    /// `R_{k,r} = k! - f(k, r-1)`: permutations with an increasing
    /// subsequence of length at least `r >= 1`.
    pub fn at_least(&self, k: usize, r: usize) -> u64 {
        assert!(r >= 1);
        factorial_u64(k) - self.get(k, r - 1)
    }
}

fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Counts by full enumeration of `S_k`, `k <= 9`, with the quadratic LIS.
pub fn exhaustive_f(k_max: usize) -> Result<FTable> {
    if k_max > MAX_EXHAUSTIVE_K {
        return Err(Error::Capacity(format!("exhaustive enumeration limited to k <= {MAX_EXHAUSTIVE_K}")));
    }
    let mut f = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut by_length = vec![0u64; k_max + 1];
        let mut perm: Vec<usize> = (1..=k).collect();
        for_each_permutation(&mut perm, |p| by_length[lis_length_dp(p)] += 1);
        let mut cumulative = 0;
        f.push(
            by_length
                .iter()
                .map(|&c| {
                    cumulative += c;
                    cumulative
                })
                .collect(),
        );
    }
    Ok(FTable { k_max, f })
}

// Heap's algorithm, iterative form.
fn for_each_permutation(perm: &mut [usize], mut visit: impl FnMut(&[usize])) {
    let n = perm.len();
    let mut c = vec![0usize; n];
    visit(perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Monte Carlo estimate of the law of `X_y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub y: f64,
    pub n: u64,
    pub seed: u64,
    /// `counts[r]` samples with `X = r`.
    pub counts: Vec<u64>,
    /// Empirical `P(X <= r)`.
    pub empirical_cdf: Vec<f64>,
    /// `sup_r |empirical_cdf(r) - phi_r(y)|` against the determinant route.
    pub ks_distance: f64,
    pub mean: f64,
    pub variance: f64,
}

impl MCEstimate {
    pub fn frequency_of(&self, r: usize) -> f64 {
        self.counts.get(r).copied().unwrap_or(0) as f64 / self.n as f64
    }
}

/// The generator for sample `index`: ChaCha8 keyed by `seed`, one stream per
/// sample, so results do not depend on how samples are spread over threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `K ~ Poisson(y)`, a uniform permutation of `1..=K`, and returns its
/// longest increasing subsequence.
pub fn sample_lis<R: Rng + ?Sized>(y: f64, rng: &mut R) -> usize {
    let k = sample_poisson(y, rng) as usize;
    let mut perm: Vec<usize> = (1..=k).collect();
    perm.shuffle(rng);
    patience_lis(&perm)
}

/// Inversion below `y = 30`, Hormann's PTRS transformed rejection above.
pub fn sample_poisson<R: Rng + ?Sized>(y: f64, rng: &mut R) -> u64 {
    if y <= 30.0 {
        let u: f64 = rng.random();
        let mut p = (-y).exp();
        let mut cumulative = p;
        let mut k = 0u64;
        while u > cumulative && p > 0.0 {
            k += 1;
            p *= y / k as f64;
            cumulative += p;
        }
        return k;
    }
    let slam = y.sqrt();
    let loglam = y.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + y + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -y + k * loglam - ln_factorial(k as u64) {
            return k as u64;
        }
    }
}

fn ln_factorial(n: u64) -> f64 {
    if n < 30 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `n` Poissonized samples of `X_y`, compared with the determinant CDF.
pub fn mc_sample(y: f64, n: u64, seed: u64) -> Result<MCEstimate> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("y must be finite and > 0, got {y}")));
    }
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    const CHUNK: u64 = 4096;
    let chunks = n.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = Vec::<u64>::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let x = sample_lis(y, &mut sample_rng(seed, i));
                if x >= local.len() {
                    local.resize(x + 1, 0);
                }
                local[x] += 1;
            }
            local
        })
        .reduce(Vec::new, |mut a, b| {
            if b.len() > a.len() {
                a.resize(b.len(), 0);
            }
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        });

    let nf = n as f64;
    let mut running = 0u64;
    let empirical_cdf: Vec<f64> = counts
        .iter()
        .map(|&c| {
            running += c;
            running as f64 / nf
        })
        .collect();
    let mean = counts.iter().enumerate().map(|(r, &c)| r as f64 * c as f64).sum::<f64>() / nf;
    let second = counts.iter().enumerate().map(|(r, &c)| (r * r) as f64 * c as f64).sum::<f64>() / nf;
    let variance = if n > 1 { (second - mean * mean) * nf / (nf - 1.0) } else { 0.0 };

    let top = counts.len();
    let table = log_phi_sequence(y, top.max(1))?;
    let ks_distance = (0..=top)
        .map(|r| {
            let empirical = empirical_cdf.get(r).copied().unwrap_or(1.0);
            (empirical - table.cdf(r as i64).unwrap_or(1.0)).abs()
        })
        .fold(0.0, f64::max);

    Ok(MCEstimate { y, n, seed, counts, empirical_cdf, ks_distance, mean, variance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lis_examples() {
        assert_eq!(lis_length(&[1, 2, 3, 4, 5]).unwrap(), 5);
        assert_eq!(lis_length(&[5, 4, 3, 2, 1]).unwrap(), 1);
        assert_eq!(lis_length(&[2, 1, 3]).unwrap(), 2);
        assert_eq!(lis_length(&[]).unwrap(), 0);
    }

    #[test]
    fn lis_rejects_non_permutations() {
        assert!(lis_length(&[1, 1, 2]).is_err());
        assert!(lis_length(&[0, 1]).is_err());
        assert!(lis_length(&[1, 4, 2]).is_err());
    }

    #[test]
    fn exhaustive_counts() {
        let table = exhaustive_f(9).unwrap();
        assert_eq!(table.get(3, 2), 5);
        assert_eq!(table.get(4, 1), 1);
        for k in 0..=9 {
            assert_eq!(table.get(k, k), factorial_u64(k));
            assert_eq!(table.get(0, k), 1);
            if k >= 1 {
                assert_eq!(table.get(k, 1), 1);
            }
            for r in 1..=9 {
                assert!(table.get(k, r) >= table.get(k, r - 1));
            }
        }
        // Catalan numbers count 321-avoiding permutations
        assert_eq!(table.get(9, 2), 4862);
        assert_eq!(table.at_least(3, 3), 1);
        assert!(exhaustive_f(10).is_err());
    }

    #[test]
    fn poisson_sampler_moments() {
        for &y in &[2.5, 30.0, 75.0, 400.0] {
            let n = 40_000u64;
            let draws: Vec<f64> = (0..n).map(|i| sample_poisson(y, &mut sample_rng(7, i)) as f64).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((mean - y).abs() < 5.0 * (y / n as f64).sqrt(), "y={y} mean={mean}");
            assert!((var / y - 1.0).abs() < 0.05, "y={y} var={var}");
        }
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let exact: f64 = (2..=40).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(40) - exact).abs() < 1e-12);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_sample(3.0, 5000, 11).unwrap();
        let b = mc_sample(3.0, 5000, 11).unwrap();
        assert_eq!(a, b);
        let c = mc_sample(3.0, 5000, 12).unwrap();
        assert_ne!(a.counts, c.counts);
        assert_eq!(*a.empirical_cdf.last().unwrap(), 1.0);
        assert!(a.empirical_cdf.windows(2).all(|w| w[1] >= w[0]));
    }

    proptest! {
        #[test]
        fn patience_matches_dp(seed in any::<u64>(), len in 0usize..=50) {
            let mut perm: Vec<usize> = (1..=len).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(lis_length(&perm).unwrap(), lis_length_dp(&perm));
        }
    }
}
