//! Binarization of real-valued sequences.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Up/down discretization: bit `j` is 1 when `values[j+1] > values[j]`.
///
/// Ties emit 0 (strict "up"). The output is one bit shorter than the input.
pub fn updown_discretize<F: Scalar>(values: &[F]) -> Result<BitString> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "up/down discretization needs at least 2 values, got {}",
            values.len()
        )));
    }
    let bits = values
        .windows(2)
        .map(|w| u8::from(w[1] > w[0]))
        .collect();
    Ok(BitString::from_raw(bits))
}

/// Mean-threshold discretization: bit `i` is 1 when `values[i]` exceeds the
/// mean of the window. Ties emit 0.
///
/// The window length is fixed by the caller's series spec; a mismatched
/// input is rejected rather than truncated.
pub fn mean_discretize<F: Scalar>(values: &[F], window_length: usize) -> Result<BitString> {
    if values.len() != window_length {
        return Err(Error::LengthMismatch {
            expected: window_length,
            got: values.len(),
        });
    }
    let mean = values.iter().copied().sum::<F>() / from_usize::<F>(values.len());
    let bits = values.iter().map(|&v| u8::from(v > mean)).collect();
    Ok(BitString::from_raw(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn updown_rise_then_fall() {
        assert_eq!(updown_discretize(&[0.1, 0.5, 0.3]).unwrap(), bs("10"));
    }

    #[test]
    fn updown_monotone() {
        assert_eq!(updown_discretize(&[1.0, 2.0, 3.0, 4.0]).unwrap(), bs("111"));
    }

    #[test]
    fn updown_tie_emits_zero() {
        assert_eq!(updown_discretize(&[2.0, 2.0]).unwrap(), bs("0"));
    }

    #[test]
    fn updown_rejects_short_input() {
        assert!(updown_discretize(&[1.0]).is_err());
    }

    #[test]
    fn mean_threshold_examples() {
        assert_eq!(mean_discretize(&[1.0, 2.0, 3.0, 4.0], 4).unwrap(), bs("0011"));
        assert_eq!(mean_discretize(&[4.0, 3.0, 2.0, 1.0], 4).unwrap(), bs("1100"));
        // Constant series: every value ties with the mean.
        assert_eq!(mean_discretize(&[5.0, 5.0, 5.0, 5.0], 4).unwrap(), bs("0000"));
    }

    #[test]
    fn mean_threshold_rejects_length_mismatch() {
        assert!(matches!(
            mean_discretize(&[1.0, 2.0], 4),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        assert_eq!(
            updown_discretize(&[0.1f32, 0.5, 0.3]).unwrap(),
            bs("10")
        );
    }
}
