//! Small statistics helpers shared by the analysis layer.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::scalar::{from_usize, Scalar};

/// Pearson correlation coefficient, or `None` when fewer than two points
/// are given, the lengths differ, or either variable has zero variance.
pub fn pearson<F: Scalar>(xs: &[F], ys: &[F]) -> Option<F> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = from_usize::<F>(xs.len());
    let mean_x = xs.iter().copied().sum::<F>() / n;
    let mean_y = ys.iter().copied().sum::<F>() / n;
    let mut sxy = F::zero();
    let mut sxx = F::zero();
    let mut syy = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx.is_zero() || syy.is_zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Two-sided p-value for a Pearson coefficient via the t statistic
/// `r * sqrt((n-2) / (1-r^2))` with `n - 2` degrees of freedom.
pub fn pearson_p_value(r: f64, n: usize) -> f64 {
    assert!(n >= 3, "p-value undefined below three points");
    let r = r.clamp(-1.0, 1.0);
    if (r.abs() - 1.0).abs() < f64::EPSILON {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    // Lower-tail evaluation keeps precision for extreme statistics.
    2.0 * dist.cdf(-t.abs())
}

/// Nearest-rank quantile of an ascending-sorted slice: the smallest element
/// with at least a `q` fraction of the data at or below it.
pub fn nearest_rank_quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!(q > 0.0 && q <= 1.0);
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
