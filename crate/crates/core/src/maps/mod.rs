//! Generative input-output maps with a uniform sampling interface.
//!
//! Every map turns a seed (or an enumerated input index) into a fixed-length
//! [`BitString`] output. Replay with identical arguments reproduces outputs
//! bit-exactly on every platform.

pub mod bernoulli;
pub mod discretize;
pub mod fst;
pub mod polynomial;
pub mod rna;
pub mod timeseries;

use sha2::{Digest, Sha256};

pub use bernoulli::{bernoulli_exact, BernoulliSpec};
pub use discretize::{mean_discretize, updown_discretize};
pub use fst::{FstSpec, Transition};
pub use polynomial::{evaluate_polynomial, PolynomialSpec};
pub use rna::{can_pair, nussinov_fold, structure_is_valid, Base, RnaSequence, RnaSpec};
pub use timeseries::{
    ingest_series, ingest_series_file, IngestReport, Series, TimeSeriesMap, TimeSeriesSpec,
};

use crate::bits::BitString;

/// Tagged configuration of one generative map.
#[derive(Clone, PartialEq, Debug)]
pub enum MapSpec {
    Fst(FstSpec),
    Polynomial(PolynomialSpec),
    Rna(RnaSpec),
    Bernoulli(BernoulliSpec),
    TimeSeries(TimeSeriesMap),
}

/// How a map's input space can be walked exhaustively, if at all.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Enumerability {
    /// Finite input space of the given cardinality, iterable by index.
    Indexed(u128),
    /// Finite output space whose exact distribution is known in closed form.
    ClosedForm(u128),
    /// No finite input space to walk.
    Continuous(&'static str),
}

impl MapSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MapSpec::Fst(_) => "fst",
            MapSpec::Polynomial(_) => "polynomial",
            MapSpec::Rna(_) => "rna",
            MapSpec::Bernoulli(_) => "bernoulli",
            MapSpec::TimeSeries(_) => "timeseries",
        }
    }

    /// Every output of this map has exactly this many bits.
    pub fn output_len(&self) -> usize {
        match self {
            MapSpec::Fst(m) => m.input_length(),
            MapSpec::Polynomial(m) => m.output_len(),
            MapSpec::Rna(m) => m.output_len(),
            MapSpec::Bernoulli(m) => m.output_len(),
            MapSpec::TimeSeries(m) => m.output_len(),
        }
    }

    /// Applies the map to one seeded random input.
    pub fn sample_output(&self, seed: u64) -> BitString {
        match self {
            MapSpec::Fst(m) => m.sample_output(seed),
            MapSpec::Polynomial(m) => m.sample_output(seed),
            MapSpec::Rna(m) => m.sample_output(seed),
            MapSpec::Bernoulli(m) => m.sample_output(seed),
            MapSpec::TimeSeries(m) => m.sample_output(seed),
        }
    }

    pub fn enumerability(&self) -> Enumerability {
        match self {
            MapSpec::Fst(m) => Enumerability::Indexed(m.input_cardinality()),
            MapSpec::Rna(m) => Enumerability::Indexed(m.input_cardinality()),
            MapSpec::TimeSeries(m) => Enumerability::Indexed(m.input_cardinality()),
            MapSpec::Bernoulli(m) => Enumerability::ClosedForm(m.output_cardinality()),
            MapSpec::Polynomial(_) => {
                Enumerability::Continuous("polynomial coefficients range over the continuum")
            }
        }
    }

    /// Output for the `index`-th input, for maps with an indexed input space.
    pub(crate) fn output_for_index(&self, index: u64) -> BitString {
        match self {
            MapSpec::Fst(m) => m
                .apply(&m.input_from_index(index))
                .expect("enumerated input has the configured length"),
            MapSpec::Rna(m) => m.output_for_index(index),
            MapSpec::TimeSeries(m) => m.output_for_index(index),
            MapSpec::Bernoulli(_) | MapSpec::Polynomial(_) => {
                unreachable!("not an indexed input space")
            }
        }
    }

    /// Stable one-line description of the full configuration; two specs
    /// producing the same outputs share the same canonical string.
    pub fn canonical_string(&self) -> String {
        match self {
            MapSpec::Fst(m) => m.canonical_string(),
            MapSpec::Polynomial(m) => m.canonical_string(),
            MapSpec::Rna(m) => m.canonical_string(),
            MapSpec::Bernoulli(m) => m.canonical_string(),
            MapSpec::TimeSeries(m) => m.canonical_string(),
        }
    }

    /// Hex SHA-256 of the canonical string; used as the provenance key for
    /// distributions and artifacts.
    pub fn digest(&self) -> String {
        timeseries::to_hex(&Sha256::digest(self.canonical_string().as_bytes()))
    }
}
