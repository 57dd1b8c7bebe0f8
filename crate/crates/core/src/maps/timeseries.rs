//! Real-valued series ingestion and the windowed series map.

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::maps::discretize::mean_discretize;

/// Window length for mean-threshold discretization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TimeSeriesSpec {
    window_length: usize,
}

impl TimeSeriesSpec {
    pub fn new(window_length: usize) -> Result<Self> {
        if window_length < 2 {
            return Err(Error::InvalidArgument(format!(
                "window_length must be >= 2, got {window_length}"
            )));
        }
        Ok(Self { window_length })
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }
}

impl Default for TimeSeriesSpec {
    fn default() -> Self {
        Self { window_length: 16 }
    }
}

/// One named series.
#[derive(Clone, PartialEq, Debug)]
pub struct Series {
    pub id: String,
    pub values: Vec<f64>,
}

/// Result of ingesting a series file: the usable series, plus what was
/// dropped and why.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct IngestReport {
    pub series: Vec<Series>,
    /// Rows whose series were shorter than the window length.
    pub discarded_short: usize,
    /// `(row index, reason)` for rows that could not be parsed.
    pub bad_rows: Vec<(usize, String)>,
}

/// Reads series from character-delimited text: one series per row, first
/// column an identifier, remaining columns numeric or empty (empty means
/// missing and is dropped). Series shorter than `window_length` after
/// dropping missing values are discarded and counted.
pub fn ingest_series<R: Read>(
    reader: R,
    delimiter: u8,
    window_length: usize,
) -> Result<IngestReport> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut report = IngestReport::default();
    for (row, record) in csv_reader.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.bad_rows.push((row, e.to_string()));
                continue;
            }
        };
        let mut fields = record.iter();
        let id = match fields.next() {
            Some(id) if !id.trim().is_empty() => id.trim().to_string(),
            _ => {
                report.bad_rows.push((row, "missing series identifier".into()));
                continue;
            }
        };
        let mut values = Vec::new();
        let mut bad = None;
        for (col, field) in fields.enumerate() {
            let field = field.trim();
            if field.is_empty() {
                continue; // missing value
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    bad = Some(format!("column {}: non-numeric value {field:?}", col + 2));
                    break;
                }
            }
        }
        if let Some(reason) = bad {
            report.bad_rows.push((row, reason));
            continue;
        }
        if values.len() < window_length {
            report.discarded_short += 1;
            continue;
        }
        report.series.push(Series { id, values });
    }
    Ok(report)
}

pub fn ingest_series_file(
    path: &Path,
    delimiter: u8,
    window_length: usize,
) -> Result<IngestReport> {
    let file = std::fs::File::open(path)?;
    ingest_series(file, delimiter, window_length)
}

/// The series map with its input space materialized: every stride-1 window
/// of every ingested series, discretized against its own mean.
#[derive(Clone, PartialEq, Debug)]
pub struct TimeSeriesMap {
    spec: TimeSeriesSpec,
    windows: Vec<Vec<f64>>,
    data_digest: String,
}

impl TimeSeriesMap {
    pub fn new(spec: TimeSeriesSpec, series: &[Series]) -> Result<Self> {
        let w = spec.window_length();
        let mut windows = Vec::new();
        for s in series {
            if s.values.len() < w {
                continue;
            }
            for offset in 0..=(s.values.len() - w) {
                windows.push(s.values[offset..offset + w].to_vec());
            }
        }
        if windows.is_empty() {
            return Err(Error::InvalidArgument(
                "no series long enough to cut a single window".into(),
            ));
        }
        let mut hasher = Sha256::new();
        for window in &windows {
            for v in window {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        let data_digest = to_hex(&hasher.finalize());
        Ok(Self {
            spec,
            windows,
            data_digest,
        })
    }

    pub fn spec(&self) -> &TimeSeriesSpec {
        &self.spec
    }

    pub fn window_count(&self) -> usize {
        self.windows.len()
    }

    pub fn output_len(&self) -> usize {
        self.spec.window_length()
    }

    pub fn input_cardinality(&self) -> u128 {
        self.windows.len() as u128
    }

    /// Uniformly random window, discretized.
    pub fn sample_output(&self, seed: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = rng.random_range(0..self.windows.len());
        self.output_for_index(i as u64)
    }

    pub fn output_for_index(&self, index: u64) -> BitString {
        mean_discretize(&self.windows[index as usize], self.spec.window_length())
            .expect("windows are cut to the configured length")
    }

    pub fn canonical_string(&self) -> String {
        format!(
            "timeseries:window={};windows={};data={}",
            self.spec.window_length(),
            self.windows.len(),
            self.data_digest
        )
    }
}

pub(crate) fn to_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{:02x}", b));
    }
    out
}
