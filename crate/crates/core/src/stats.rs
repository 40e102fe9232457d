//! How common splittable collections are.
//!
//! The model: `k` labelled elements, each independently assigned one of the
//! `2^n` membership masks uniformly at random (mask 0 allowed). `f(n, k)` is
//! the probability that the resulting collection is `p`-splittable.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::collection::{VennProfile, MAX_PROFILE_SETS};
use crate::error::{Error, Result};
use crate::rational::{Proportion, Rational};
use crate::solver::is_p_splittable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrevalenceModel {
    pub n: usize,
    pub k: u64,
}

impl PrevalenceModel {
    pub fn new(n: usize, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("need at least one set".into()));
        }
        if n > MAX_PROFILE_SETS {
            return Err(Error::TooManySets {
                n,
                max: MAX_PROFILE_SETS,
            });
        }
        Ok(PrevalenceModel { n, k })
    }

    /// Draws one profile. Each element takes the top `n` bits of one
    /// `next_u32` as its mask.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> VennProfile {
        let mut v = VennProfile::empty(self.n).expect("validated n");
        let shift = 32 - self.n as u32;
        for _ in 0..self.k {
            v.add_count((rng.next_u32() >> shift) as usize, 1);
        }
        v
    }
}

pub fn random_profile(model: &PrevalenceModel, seed: u64) -> VennProfile {
    model.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub f_hat: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "f_hat={}", self.f_hat)?;
        writeln!(f, "stderr={}", self.stderr)?;
        writeln!(f, "samples={}", self.samples)?;
        writeln!(f, "seed={}", self.seed)
    }
}

/// Samples per chunk; chunk `j` uses stream `j` of the seeded generator, so
/// estimates do not depend on the thread count.
const CHUNK: u64 = 1024;

/// Counts samples satisfying `pred` over `samples` draws split into
/// independently seeded chunks.
fn count_hits<F>(model: &PrevalenceModel, samples: u64, seed: u64, pred: F) -> u64
where
    F: Fn(&VennProfile) -> bool + Sync,
{
    (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let n = CHUNK.min(samples - j * CHUNK);
            (0..n).filter(|_| pred(&model.sample(&mut rng))).count() as u64
        })
        .sum()
}

fn estimate(hits: u64, samples: u64, seed: u64) -> Estimate {
    let f_hat = if samples == 0 {
        0.0
    } else {
        hits as f64 / samples as f64
    };
    let stderr = if samples == 0 {
        0.0
    } else {
        (f_hat * (1.0 - f_hat) / samples as f64).sqrt()
    };
    Estimate {
        f_hat,
        stderr,
        samples,
        seed,
        hits,
    }
}

/// Monte Carlo estimate of `f(n, k)`.
pub fn estimate_f(model: &PrevalenceModel, samples: u64, seed: u64, p: Proportion) -> Estimate {
    let hits = count_hits(model, samples, seed, |v| is_p_splittable(v, p).feasible());
    estimate(hits, samples, seed)
}

pub const EXACT_MAX_SETS: usize = 4;
pub const EXACT_MAX_ELEMENTS: u64 = 12;

fn factorials(k: u64) -> Vec<u64> {
    let mut f = vec![1u64; k as usize + 1];
    for i in 1..=k as usize {
        f[i] = f[i - 1] * i as u64;
    }
    f
}

/// Adds `weight` times the multinomial coefficient of every completion of
/// `counts[..pos]` whose profile is splittable.
fn sum_compositions(
    counts: &mut Vec<u64>,
    pos: usize,
    left: u64,
    fact: &[u64],
    n: usize,
    p: Proportion,
) -> u64 {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        let v = VennProfile::from_counts(n, counts.clone()).expect("2^n counts");
        if !is_p_splittable(&v, p).feasible() {
            return 0;
        }
        let denom: u64 = counts.iter().map(|&c| fact[c as usize]).product();
        return fact[counts.iter().sum::<u64>() as usize] / denom;
    }
    let mut total = 0;
    for c in 0..=left {
        counts[pos] = c;
        total += sum_compositions(counts, pos + 1, left - c, fact, n, p);
    }
    total
}

/// Exact `f(n, k)`: splittable profiles weighted by their multinomial
/// counts, divided by `(2^n)^k`.
pub fn exact_f(model: &PrevalenceModel, p: Proportion) -> Result<Rational> {
    let PrevalenceModel { n, k } = *model;
    if n > EXACT_MAX_SETS || k > EXACT_MAX_ELEMENTS {
        return Err(Error::OutOfRange(format!(
            "exact enumeration needs n <= {EXACT_MAX_SETS} and k <= {EXACT_MAX_ELEMENTS}, got n = {n}, k = {k}"
        )));
    }
    let fact = factorials(k);
    let regions = 1usize << n;
    let good: u64 = (0..=k)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; regions];
            counts[0] = first;
            if regions == 1 {
                return if first == k { 1 } else { 0 };
            }
            sum_compositions(&mut counts, 1, k - first, &fact, n, p)
        })
        .sum();
    let space = (regions as u64).pow(k as u32);
    Rational::new(good as i64, space as i64)
}

/// Upper bound `n 2^n / (k - 2K√n)` on the probability that some
/// single-set region receives fewer than `K√n` of the `k` elements.
pub fn chebyshev_bound(n: usize, k: u64, big_k: f64) -> Result<f64> {
    let denom = k as f64 - 2.0 * big_k * (n as f64).sqrt();
    if denom <= 0.0 {
        return Err(Error::Precondition(format!(
            "k = {k} must exceed 2K√n = {}",
            2.0 * big_k * (n as f64).sqrt()
        )));
    }
    Ok(n as f64 * 2f64.powi(n as i32) / denom)
}

/// Fraction of sampled profiles in which some single-set region holds
/// fewer than `threshold` elements.
pub fn monofold_shortfall(model: &PrevalenceModel, threshold: u64, samples: u64, seed: u64) -> Estimate {
    let n = model.n;
    let hits = count_hits(model, samples, seed, |v| (0..n).any(|i| v.count(1 << i) < threshold));
    estimate(hits, samples, seed)
}
