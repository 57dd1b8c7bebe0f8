//! Random polynomial curves discretized by the up/down method.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::maps::discretize::updown_discretize;
use crate::scalar::Scalar;

/// Curves `y = sum_{i=1..degree} a_i x^i` with independent Gaussian
/// coefficients, evaluated on a uniform grid strictly inside (0, 1) and
/// binarized by successive differences. `grid_points` values yield
/// `grid_points - 1` output bits.
#[derive(Clone, PartialEq, Debug)]
pub struct PolynomialSpec {
    degree: usize,
    coefficient_std: f64,
    grid_points: usize,
}

impl PolynomialSpec {
    pub fn new(degree: usize, coefficient_std: f64, grid_points: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be >= 1".into()));
        }
        if coefficient_std <= 0.0 || !coefficient_std.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coefficient_std must be a positive finite real, got {coefficient_std}"
            )));
        }
        if grid_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid_points must be >= 2, got {grid_points}"
            )));
        }
        Ok(Self {
            degree,
            coefficient_std,
            grid_points,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient_std(&self) -> f64 {
        self.coefficient_std
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn output_len(&self) -> usize {
        self.grid_points - 1
    }

    /// Grid abscissae `x_j = (j + 1) / (grid_points + 1)`, strictly inside
    /// the open unit interval.
    pub fn abscissae(&self) -> Vec<f64> {
        let denom = (self.grid_points + 1) as f64;
        (0..self.grid_points)
            .map(|j| (j + 1) as f64 / denom)
            .collect()
    }

    /// Coefficients `a_1..a_degree` drawn from `Normal(0, coefficient_std^2)`,
    /// deterministic in `seed` and drawn in ascending power order.
    pub fn coefficients(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.coefficient_std)
            .expect("validated std is positive and finite");
        (0..self.degree).map(|_| normal.sample(&mut rng)).collect()
    }

    /// Draws a curve and returns its up/down bit pattern.
    pub fn sample_output(&self, seed: u64) -> BitString {
        let coefficients = self.coefficients(seed);
        let values: Vec<f64> = self
            .abscissae()
            .iter()
            .map(|&x| evaluate_polynomial(&coefficients, x))
            .collect();
        updown_discretize(&values).expect("grid_points >= 2 yields >= 2 values")
    }

    pub fn canonical_string(&self) -> String {
        format!(
            "polynomial:degree={};std={};grid={}",
            self.degree, self.coefficient_std, self.grid_points
        )
    }
}

impl Default for PolynomialSpec {
    fn default() -> Self {
        Self {
            degree: 14,
            coefficient_std: 1.0,
            grid_points: 17,
        }
    }
}

/// Evaluates `sum_{i=1..d} coefficients[i-1] * x^i` by Horner's scheme.
/// There is no constant term: the curve always passes through the origin.
pub fn evaluate_polynomial<F: Scalar>(coefficients: &[F], x: F) -> F {
    let mut acc = F::zero();
    for &c in coefficients.iter().rev() {
        acc = acc * x + c;
    }
    acc * x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_emits_sixteen_bits() {
        let spec = PolynomialSpec::default();
        assert_eq!(spec.output_len(), 16);
        assert_eq!(spec.sample_output(1).len(), 16);
    }

    #[test]
    fn abscissae_stay_inside_open_interval() {
        let spec = PolynomialSpec::default();
        let xs = spec.abscissae();
        assert_eq!(xs.len(), 17);
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn increasing_line_gives_all_ones() {
        let spec = PolynomialSpec::new(1, 1.0, 5).unwrap();
        let seed = (0..)
            .find(|&s| spec.coefficients(s)[0] > 0.0)
            .unwrap();
        assert!(spec.sample_output(seed).as_slice().iter().all(|&b| b == 1));
    }

    #[test]
    fn decreasing_line_gives_all_zeros() {
        let spec = PolynomialSpec::new(1, 1.0, 5).unwrap();
        let seed = (0..)
            .find(|&s| spec.coefficients(s)[0] < 0.0)
            .unwrap();
        assert!(spec.sample_output(seed).as_slice().iter().all(|&b| b == 0));
    }

    #[test]
    fn horner_matches_direct_evaluation() {
        let coefficients = [2.0f64, -1.0, 0.5];
        let x = 0.3f64;
        let direct = 2.0 * x - 1.0 * x * x + 0.5 * x * x * x;
        assert!((evaluate_polynomial(&coefficients, x) - direct).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = PolynomialSpec::default();
        assert_eq!(spec.sample_output(77), spec.sample_output(77));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(PolynomialSpec::new(0, 1.0, 17).is_err());
        assert!(PolynomialSpec::new(14, 0.0, 17).is_err());
        assert!(PolynomialSpec::new(14, 1.0, 1).is_err());
    }
}
