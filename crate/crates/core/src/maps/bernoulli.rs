//! Independent identically distributed bit strings.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};

/// Fixed-point scale for the closed-form distribution: probabilities are
/// quantized to integer weights out of 2^53, the largest power of two whose
/// total is still exactly representable as an f64.
pub const EXACT_WEIGHT_SCALE: u64 = 1 << 53;

/// `n` independent bits, each 1 with probability `p`.
#[derive(Clone, PartialEq, Debug)]
pub struct BernoulliSpec {
    n: usize,
    p: f64,
}

impl BernoulliSpec {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "p must lie strictly inside (0, 1), got {p}"
            )));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn output_len(&self) -> usize {
        self.n
    }

    /// Number of distinct outputs; the closed-form enumeration walks these
    /// rather than any input space.
    pub fn output_cardinality(&self) -> u128 {
        1u128 << self.n
    }

    pub fn sample_output(&self, seed: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..self.n)
            .map(|_| u8::from(rng.random_bool(self.p)))
            .collect();
        BitString::from_raw(bits)
    }

    /// The `index`-th output in lexicographic order.
    pub fn output_from_index(&self, index: u64) -> BitString {
        let bits = (0..self.n)
            .map(|i| ((index >> (self.n - 1 - i)) & 1) as u8)
            .collect();
        BitString::from_raw(bits)
    }

    /// Closed-form distribution as integer weights out of exactly
    /// [`EXACT_WEIGHT_SCALE`].
    ///
    /// Each string's weight is its probability quantized to the scale;
    /// zero weights are dropped and the rounding residue is absorbed by the
    /// heaviest string, so the weights always sum to the scale. The
    /// per-string quantization error is below 1e-13 in probability.
    pub fn exact_counts(&self) -> (BTreeMap<BitString, u64>, u64) {
        let n = self.n;
        // p^k (1-p)^(n-k) for k = 0..=n.
        let mut by_ones = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let prob = self.p.powi(k as i32) * (1.0 - self.p).powi((n - k) as i32);
            by_ones.push((prob * EXACT_WEIGHT_SCALE as f64).round() as u64);
        }
        let mut counts = BTreeMap::new();
        let mut sum: u64 = 0;
        for index in 0..(1u64 << n) {
            let weight = by_ones[index.count_ones() as usize];
            if weight > 0 {
                counts.insert(self.output_from_index(index), weight);
                sum += weight;
            }
        }
        let (heaviest, _) = counts
            .iter()
            .max_by_key(|(x, &w)| (w, std::cmp::Reverse((*x).clone())))
            .map(|(x, w)| (x.clone(), *w))
            .expect("at least one weight is positive");
        let adjusted = counts
            .get(&heaviest)
            .expect("key present")
            .wrapping_add(EXACT_WEIGHT_SCALE.wrapping_sub(sum));
        counts.insert(heaviest, adjusted);
        (counts, EXACT_WEIGHT_SCALE)
    }

    pub fn canonical_string(&self) -> String {
        format!("bernoulli:n={};p={}", self.n, self.p)
    }
}

/// Exact probability of one output: `p^ones * (1-p)^zeros`.
pub fn bernoulli_exact<F: Scalar>(spec: &BernoulliSpec, x: &BitString) -> Result<F> {
    if x.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            got: x.len(),
        });
    }
    let p = from_f64::<F>(spec.p);
    let q = F::one() - p;
    let ones = x.ones_count() as i32;
    let zeros = (x.len() - x.ones_count()) as i32;
    Ok(p.powi(ones) * q.powi(zeros))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_example() {
        let spec = BernoulliSpec::new(4, 0.3).unwrap();
        let p: f64 = bernoulli_exact(&spec, &bs("0101")).unwrap();
        assert!((p - 0.0441).abs() < 1e-15);
    }

    #[test]
    fn fair_coin_is_uniform() {
        let spec = BernoulliSpec::new(6, 0.5).unwrap();
        for v in [0u64, 1, 17, 63] {
            let x = spec.output_from_index(v);
            let p: f64 = bernoulli_exact(&spec, &x).unwrap();
            assert_eq!(p, 2.0f64.powi(-6));
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let spec = BernoulliSpec::new(8, 0.17).unwrap();
        let total: f64 = (0..256u64)
            .map(|v| bernoulli_exact::<f64>(&spec, &spec.output_from_index(v)).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_counts_sum_to_scale() {
        for p in [0.5, 0.3, 0.01, 0.9] {
            let spec = BernoulliSpec::new(8, p).unwrap();
            let (counts, total) = spec.exact_counts();
            assert_eq!(total, EXACT_WEIGHT_SCALE);
            assert_eq!(counts.values().sum::<u64>(), total);
        }
    }

    #[test]
    fn fair_coin_counts_are_exactly_uniform() {
        let spec = BernoulliSpec::new(8, 0.5).unwrap();
        let (counts, total) = spec.exact_counts();
        assert_eq!(counts.len(), 256);
        for &c in counts.values() {
            assert_eq!(c, total / 256);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let spec = BernoulliSpec::new(4, 0.3).unwrap();
        assert!(bernoulli_exact::<f64>(&spec, &bs("01011")).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(BernoulliSpec::new(0, 0.5).is_err());
        assert!(BernoulliSpec::new(4, 0.0).is_err());
        assert!(BernoulliSpec::new(4, 1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = BernoulliSpec::new(16, 0.25).unwrap();
        assert_eq!(spec.sample_output(3), spec.sample_output(3));
    }
}
