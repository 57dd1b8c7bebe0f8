//! Complexity-based probability assignment applied to prediction.
//!
//! Each candidate continuation is scored `2^(-k)` with `k` the complexity of
//! the extended history, then normalized. This is the computable stand-in
//! for the uncomputable conditional mixture over programs; it inherits the
//! estimator's blind spots, in particular patterns a map finds hard to make
//! despite being simple.

use std::collections::BTreeSet;

use crate::bits::BitString;
use crate::complexity::ktilde;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Normalized probabilities for the two one-bit continuations of a history.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct NextBitForecast<F> {
    pub p0: F,
    pub p1: F,
    /// Complexity of the history extended by 0.
    pub k0: F,
    /// Complexity of the history extended by 1.
    pub k1: F,
}

impl<F: Scalar> NextBitForecast<F> {
    /// The more probable continuation; ties go to 0.
    pub fn argmax(&self) -> u8 {
        // Exact by construction: p0 >= p1 if and only if k0 <= k1.
        u8::from(self.k0 > self.k1)
    }
}

/// Scores both one-bit extensions of `history` and normalizes
/// `2^(-k)` weights into probabilities summing to one.
pub fn next_bit<F: Scalar>(history: &BitString) -> NextBitForecast<F> {
    let k0 = ktilde::<F>(&history.extended(0));
    let k1 = ktilde::<F>(&history.extended(1));
    // p0 = 2^-k0 / (2^-k0 + 2^-k1), evaluated in the shifted form that
    // cannot overflow for any complexity gap.
    let p0 = F::one() / (F::one() + (k0 - k1).exp2());
    let p1 = F::one() / (F::one() + (k1 - k0).exp2());
    NextBitForecast { p0, p1, k0, k1 }
}

/// Greedy extrapolation: appends the argmax continuation `horizon` times.
/// A zero horizon returns the history unchanged.
pub fn extrapolate(history: &BitString, horizon: usize) -> BitString {
    let mut current = history.clone();
    for _ in 0..horizon {
        let bit = next_bit::<f64>(&current).argmax();
        current = current.extended(bit);
    }
    current
}

/// Orders candidates by ascending complexity — descending assigned
/// probability `2^(-k)` — with ties broken lexicographically. Duplicates
/// collapse; the result is a permutation of the distinct candidates.
pub fn guess_order(candidates: &[BitString]) -> Result<Vec<BitString>> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidates to order".into()));
    }
    let distinct: BTreeSet<&BitString> = candidates.iter().collect();
    let mut scored: Vec<(f64, &BitString)> = distinct
        .into_iter()
        .map(|x| (ktilde::<f64>(x), x))
        .collect();
    scored.sort_by(|(ka, xa), (kb, xb)| {
        ka.partial_cmp(kb).expect("finite complexities").then(xa.cmp(xb))
    });
    Ok(scored.into_iter().map(|(_, x)| x.clone()).collect())
}
