//! Lempel-Ziv 1976 phrase counting and the adapted complexity estimator.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Number of words in the exhaustive production history of `symbols` under
/// the Lempel-Ziv 1976 parsing.
///
/// Each word is the shortest prefix of the remaining suffix that cannot be
/// reproduced by copying from an earlier position (copies may run into the
/// word itself); the final word alone may be reproducible. Works over any
/// alphabet with equality.
pub fn lz76_phrase_count<T: Eq>(symbols: &[T]) -> Result<usize> {
    if symbols.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = symbols.len();
    let mut words = 0usize;
    let mut parsed = 0usize;
    while parsed < n {
        // Longest prefix of symbols[parsed..] reproducible from a copy
        // source starting strictly before `parsed`.
        let remaining = n - parsed;
        let mut longest = 0usize;
        for source in 0..parsed {
            let mut m = 0usize;
            while m < remaining && symbols[source + m] == symbols[parsed + m] {
                m += 1;
            }
            longest = longest.max(m);
        }
        words += 1;
        if longest >= remaining {
            break; // tail fully reproducible: it closes the history
        }
        parsed += longest + 1;
    }
    Ok(words)
}

/// Adapted Lempel-Ziv complexity estimate of a binary string, in bits.
///
/// Uniform strings (all zeros or all ones) score `log2(n)`; any other
/// string scores `log2(n) * (N(x) + N(reverse(x))) / 2` with `N` the
/// [`lz76_phrase_count`]. Symmetric under reversal and under flipping
/// every bit.
pub fn ktilde<F: Scalar>(x: &BitString) -> F {
    let log2n = from_usize::<F>(x.len()).log2();
    if x.is_uniform() {
        return log2n;
    }
    let forward = lz76_phrase_count(x.as_slice()).expect("non-empty by invariant");
    let backward = lz76_phrase_count(x.reversed().as_slice()).expect("non-empty by invariant");
    log2n * from_usize::<F>(forward + backward) / from_usize::<F>(2)
}
