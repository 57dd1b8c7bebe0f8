//! Experiment configuration: a sectioned key-value file, fully validated
//! with field paths before anything runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use simbias_core::analysis::{FitMode, PairMode, Statistic};
use simbias_core::maps::{
    ingest_series_file, BernoulliSpec, FstSpec, MapSpec, PolynomialSpec, RnaSpec, TimeSeriesMap,
    TimeSeriesSpec, Transition,
};

use crate::{CliError, CliResult};

/// One validation problem, addressed by its config field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    /// One of `fst`, `polynomial`, `rna`, `bernoulli`, `timeseries`.
    #[serde(rename = "type")]
    pub map_type: String,

    // fst
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_length: Option<usize>,
    /// Seed for a random transition table; ignored when `transitions` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Explicit table, one `[next_state, output_bit]` entry per
    /// `(state, input bit)` pair, state-major with input bit 0 first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitions: Option<Vec<[u64; 2]>>,

    // polynomial
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,

    // rna
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seq_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_loop: Option<usize>,

    // bernoulli
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,

    // timeseries
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delimiter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    /// `sample` or `enumerate`.
    #[serde(default = "default_sampling_mode")]
    pub mode: String,
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_n_shards")]
    pub n_shards: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration_budget: Option<u64>,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            mode: default_sampling_mode(),
            n_samples: default_n_samples(),
            master_seed: 0,
            n_shards: default_n_shards(),
            enumeration_budget: None,
        }
    }
}

fn default_sampling_mode() -> String {
    "sample".into()
}

fn default_n_samples() -> u64 {
    100_000
}

fn default_n_shards() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// `envelope` or `apriori`.
    #[serde(default = "default_fit_mode")]
    pub fit_mode: String,
    #[serde(default = "default_pair_modes")]
    pub pair_modes: Vec<String>,
    #[serde(default = "default_n_pairs")]
    pub n_pairs: u64,
    /// Defaults to the sampling master seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_seed: Option<u64>,
    #[serde(default = "default_correlation_stats")]
    pub correlation_stats: Vec<String>,
    /// Absent means the second-lowest observed complexity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_k: Option<f64>,
    #[serde(default = "default_delta_step")]
    pub delta_step: f64,
    #[serde(default = "default_lklp_threshold")]
    pub lklp_delta_threshold: f64,
    #[serde(default = "default_lklp_quantile")]
    pub lklp_k_quantile: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            fit_mode: default_fit_mode(),
            pair_modes: default_pair_modes(),
            n_pairs: default_n_pairs(),
            pair_seed: None,
            correlation_stats: default_correlation_stats(),
            correlation_k: None,
            delta_step: default_delta_step(),
            lklp_delta_threshold: default_lklp_threshold(),
            lklp_k_quantile: default_lklp_quantile(),
        }
    }
}

fn default_fit_mode() -> String {
    "envelope".into()
}

fn default_pair_modes() -> Vec<String> {
    vec!["weighted".into(), "uniform".into()]
}

fn default_n_pairs() -> u64 {
    10_000
}

fn default_correlation_stats() -> Vec<String> {
    vec!["changes".into(), "ones".into()]
}

fn default_delta_step() -> f64 {
    0.5
}

fn default_lklp_threshold() -> f64 {
    5.0
}

fn default_lklp_quantile() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    /// Artifact families to write; absent means all of them. Known names:
    /// distribution, fit, scatter, rank, pairs, correlation, profile, lklp.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<String>>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            formats: None,
        }
    }
}

fn default_out_dir() -> String {
    "out".into()
}

pub const KNOWN_ARTIFACTS: [&str; 8] = [
    "distribution",
    "fit",
    "scatter",
    "rank",
    "pairs",
    "correlation",
    "profile",
    "lklp",
];

impl ExperimentConfig {
    /// Parses without validating; parse errors carry the file location.
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config parse error: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((config, base))
    }

    /// Hex SHA-256 of the canonical serialized form. Two configs that parse
    /// equal share a digest regardless of formatting in the source file.
    pub fn digest(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for b in hash {
            out.push_str(&format!("{:02x}", b));
        }
        out
    }

    /// Full validation without execution; every problem is reported at once.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut errors = Vec::new();
        self.validate_map(&mut errors);
        self.validate_sampling(&mut errors);
        self.validate_analysis(&mut errors);
        self.validate_output(&mut errors);
        errors
    }

    fn validate_map(&self, errors: &mut Vec<FieldError>) {
        let m = &self.map;
        let push = |errors: &mut Vec<FieldError>, path: &str, message: String| {
            errors.push(FieldError {
                path: format!("map.{path}"),
                message,
            })
        };
        let allowed: &[&str] = match m.map_type.as_str() {
            "fst" => &["num_states", "input_length", "seed", "transitions"],
            "polynomial" => &["degree", "coefficient_std", "grid_points"],
            "rna" => &["seq_length", "min_loop"],
            "bernoulli" => &["n", "p"],
            "timeseries" => &["window_length", "data", "delimiter"],
            other => {
                push(
                    errors,
                    "type",
                    format!(
                        "unknown map type {other:?}; expected fst, polynomial, rna, bernoulli, \
                         or timeseries"
                    ),
                );
                return;
            }
        };
        let present: &[(&str, bool)] = &[
            ("num_states", m.num_states.is_some()),
            ("input_length", m.input_length.is_some()),
            ("seed", m.seed.is_some()),
            ("transitions", m.transitions.is_some()),
            ("degree", m.degree.is_some()),
            ("coefficient_std", m.coefficient_std.is_some()),
            ("grid_points", m.grid_points.is_some()),
            ("seq_length", m.seq_length.is_some()),
            ("min_loop", m.min_loop.is_some()),
            ("n", m.n.is_some()),
            ("p", m.p.is_some()),
            ("window_length", m.window_length.is_some()),
            ("data", m.data.is_some()),
            ("delimiter", m.delimiter.is_some()),
        ];
        for (field, is_set) in present {
            if *is_set && !allowed.contains(field) {
                push(
                    errors,
                    field,
                    format!("not a field of map type {:?}", m.map_type),
                );
            }
        }
        match m.map_type.as_str() {
            "fst" => {
                let states = m.num_states.unwrap_or(5);
                if states == 0 {
                    push(errors, "num_states", "must be >= 1".into());
                }
                if m.input_length.unwrap_or(30) == 0 {
                    push(errors, "input_length", "must be >= 1".into());
                }
                match (&m.transitions, m.seed) {
                    (None, None) => push(
                        errors,
                        "seed",
                        "fst needs either a seed or an explicit transitions table".into(),
                    ),
                    (Some(table), _) => {
                        if table.len() != 2 * states {
                            push(
                                errors,
                                "transitions",
                                format!("expected {} entries, got {}", 2 * states, table.len()),
                            );
                        }
                        for (i, [next, bit]) in table.iter().enumerate() {
                            if *next >= states as u64 {
                                push(
                                    errors,
                                    "transitions",
                                    format!("entry {i}: state {next} out of range"),
                                );
                            }
                            if *bit > 1 {
                                push(
                                    errors,
                                    "transitions",
                                    format!("entry {i}: output bit must be 0 or 1, got {bit}"),
                                );
                            }
                        }
                    }
                    (None, Some(_)) => {}
                }
            }
            "polynomial" => {
                if m.degree.unwrap_or(14) == 0 {
                    push(errors, "degree", "must be >= 1".into());
                }
                let std = m.coefficient_std.unwrap_or(1.0);
                if std <= 0.0 || !std.is_finite() {
                    push(errors, "coefficient_std", format!("must be positive, got {std}"));
                }
                if m.grid_points.unwrap_or(17) < 2 {
                    push(errors, "grid_points", "must be >= 2".into());
                }
            }
            "rna" => {
                if m.seq_length.unwrap_or(35) == 0 {
                    push(errors, "seq_length", "must be >= 1".into());
                }
            }
            "bernoulli" => {
                match m.n {
                    None => push(errors, "n", "required for bernoulli".into()),
                    Some(0) => push(errors, "n", "must be >= 1".into()),
                    Some(_) => {}
                }
                match m.p {
                    None => push(errors, "p", "required for bernoulli".into()),
                    Some(p) if !(p > 0.0 && p < 1.0) => {
                        push(errors, "p", format!("must lie strictly inside (0, 1), got {p}"))
                    }
                    Some(_) => {}
                }
            }
            "timeseries" => {
                if m.window_length.unwrap_or(16) < 2 {
                    push(errors, "window_length", "must be >= 2".into());
                }
                if m.data.is_none() {
                    push(errors, "data", "required for timeseries (path to the series file)".into());
                }
                if let Some(d) = &m.delimiter {
                    if d.len() != 1 {
                        push(errors, "delimiter", format!("must be one character, got {d:?}"));
                    }
                }
            }
            _ => unreachable!("unknown types return early"),
        }
    }

    fn validate_sampling(&self, errors: &mut Vec<FieldError>) {
        let s = &self.sampling;
        if !matches!(s.mode.as_str(), "sample" | "enumerate") {
            errors.push(FieldError {
                path: "sampling.mode".into(),
                message: format!("expected \"sample\" or \"enumerate\", got {:?}", s.mode),
            });
        }
        if s.mode == "sample" && s.n_samples == 0 {
            errors.push(FieldError {
                path: "sampling.n_samples".into(),
                message: "must be >= 1".into(),
            });
        }
        if s.n_shards == 0 {
            errors.push(FieldError {
                path: "sampling.n_shards".into(),
                message: "must be >= 1".into(),
            });
        }
        if let Some(0) = s.enumeration_budget {
            errors.push(FieldError {
                path: "sampling.enumeration_budget".into(),
                message: "must be >= 1".into(),
            });
        }
    }

    fn validate_analysis(&self, errors: &mut Vec<FieldError>) {
        let a = &self.analysis;
        if !matches!(a.fit_mode.as_str(), "envelope" | "apriori") {
            errors.push(FieldError {
                path: "analysis.fit_mode".into(),
                message: format!("expected \"envelope\" or \"apriori\", got {:?}", a.fit_mode),
            });
        }
        if a.pair_modes.is_empty() {
            errors.push(FieldError {
                path: "analysis.pair_modes".into(),
                message: "at least one of \"weighted\", \"uniform\"".into(),
            });
        }
        for mode in &a.pair_modes {
            if !matches!(mode.as_str(), "weighted" | "uniform") {
                errors.push(FieldError {
                    path: "analysis.pair_modes".into(),
                    message: format!("unknown pair mode {mode:?}"),
                });
            }
        }
        if a.n_pairs == 0 {
            errors.push(FieldError {
                path: "analysis.n_pairs".into(),
                message: "must be >= 1".into(),
            });
        }
        for stat in &a.correlation_stats {
            if !matches!(stat.as_str(), "changes" | "ones") {
                errors.push(FieldError {
                    path: "analysis.correlation_stats".into(),
                    message: format!("unknown statistic {stat:?}"),
                });
            }
        }
        if let Some(k) = a.correlation_k {
            if !k.is_finite() || k < 0.0 {
                errors.push(FieldError {
                    path: "analysis.correlation_k".into(),
                    message: format!("must be a finite non-negative complexity, got {k}"),
                });
            }
        }
        if a.delta_step <= 0.0 || a.delta_step.is_nan() {
            errors.push(FieldError {
                path: "analysis.delta_step".into(),
                message: format!("must be positive, got {}", a.delta_step),
            });
        }
        if a.lklp_delta_threshold < 0.0 {
            errors.push(FieldError {
                path: "analysis.lklp_delta_threshold".into(),
                message: format!("must be non-negative, got {}", a.lklp_delta_threshold),
            });
        }
        if !(a.lklp_k_quantile > 0.0 && a.lklp_k_quantile <= 1.0) {
            errors.push(FieldError {
                path: "analysis.lklp_k_quantile".into(),
                message: format!("must lie in (0, 1], got {}", a.lklp_k_quantile),
            });
        }
    }

    fn validate_output(&self, errors: &mut Vec<FieldError>) {
        if self.output.dir.is_empty() {
            errors.push(FieldError {
                path: "output.dir".into(),
                message: "must not be empty".into(),
            });
        }
        if let Some(formats) = &self.output.formats {
            for f in formats {
                if !KNOWN_ARTIFACTS.contains(&f.as_str()) {
                    errors.push(FieldError {
                        path: "output.formats".into(),
                        message: format!(
                            "unknown artifact {f:?}; known: {}",
                            KNOWN_ARTIFACTS.join(", ")
                        ),
                    });
                }
            }
        }
    }

    /// Builds the runtime map. Relative data paths resolve against
    /// `base_dir` (the config file's directory). Returns ingest warnings
    /// for the caller to surface.
    pub fn build_map(&self, base_dir: &Path) -> CliResult<(MapSpec, Vec<String>)> {
        let errors = self.validate();
        if !errors.is_empty() {
            let listing: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
            return Err(CliError::Usage(format!(
                "invalid config:\n  {}",
                listing.join("\n  ")
            )));
        }
        let m = &self.map;
        let mut warnings = Vec::new();
        let spec = match m.map_type.as_str() {
            "fst" => {
                let states = m.num_states.unwrap_or(5);
                let length = m.input_length.unwrap_or(30);
                let fst = match &m.transitions {
                    Some(table) => {
                        let transitions = table
                            .iter()
                            .map(|[next, bit]| Transition {
                                next_state: *next as usize,
                                output_bit: *bit as u8,
                            })
                            .collect();
                        FstSpec::new(states, 0, transitions, length)?
                    }
                    None => FstSpec::random(states, length, m.seed.expect("validated"))?,
                };
                MapSpec::Fst(fst)
            }
            "polynomial" => MapSpec::Polynomial(PolynomialSpec::new(
                m.degree.unwrap_or(14),
                m.coefficient_std.unwrap_or(1.0),
                m.grid_points.unwrap_or(17),
            )?),
            "rna" => MapSpec::Rna(RnaSpec::new(
                m.seq_length.unwrap_or(35),
                m.min_loop.unwrap_or(3),
            )?),
            "bernoulli" => MapSpec::Bernoulli(BernoulliSpec::new(
                m.n.expect("validated"),
                m.p.expect("validated"),
            )?),
            "timeseries" => {
                let window = m.window_length.unwrap_or(16);
                let delimiter = m
                    .delimiter
                    .as_deref()
                    .map(|d| d.as_bytes()[0])
                    .unwrap_or(b',');
                let raw = m.data.as_deref().expect("validated");
                let path = if Path::new(raw).is_absolute() {
                    PathBuf::from(raw)
                } else {
                    base_dir.join(raw)
                };
                let report = ingest_series_file(&path, delimiter, window)
                    .map_err(|e| CliError::Runtime(format!("ingest {}: {e}", path.display())))?;
                if report.discarded_short > 0 {
                    warnings.push(format!(
                        "{} series shorter than the window were discarded",
                        report.discarded_short
                    ));
                }
                for (row, reason) in &report.bad_rows {
                    warnings.push(format!("row {row}: {reason}"));
                }
                let map = TimeSeriesMap::new(TimeSeriesSpec::new(window)?, &report.series)?;
                MapSpec::TimeSeries(map)
            }
            _ => unreachable!("validated above"),
        };
        Ok((spec, warnings))
    }

    pub fn fit_mode(&self) -> FitMode {
        match self.analysis.fit_mode.as_str() {
            "apriori" => FitMode::Apriori,
            _ => FitMode::Envelope,
        }
    }

    pub fn pair_modes(&self) -> Vec<PairMode> {
        self.analysis
            .pair_modes
            .iter()
            .filter_map(|m| match m.as_str() {
                "weighted" => Some(PairMode::Weighted),
                "uniform" => Some(PairMode::Uniform),
                _ => None,
            })
            .collect()
    }

    pub fn correlation_stats(&self) -> Vec<Statistic> {
        self.analysis
            .correlation_stats
            .iter()
            .filter_map(|s| match s.as_str() {
                "changes" => Some(Statistic::Changes),
                "ones" => Some(Statistic::Ones),
                _ => None,
            })
            .collect()
    }

    pub fn pair_seed(&self) -> u64 {
        self.analysis
            .pair_seed
            .unwrap_or(self.sampling.master_seed)
    }

    pub fn wants_artifact(&self, name: &str) -> bool {
        match &self.output.formats {
            None => true,
            Some(list) => list.iter().any(|f| f == name),
        }
    }
}
