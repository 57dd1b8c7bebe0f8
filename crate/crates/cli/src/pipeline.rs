//! Full experiment pipeline: build the distribution, fit the bound, run
//! every configured analysis, and write the artifact set with a digest
//! manifest. Failures remove whatever was partially written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use simbias_core::analysis::{
    correlation_report, delta_grid, fit_bound, lklp_select, mass_deficit_profile,
    pair_prediction_experiment, rank_groups, scatter, BoundFit, CorrelationReport, FitMode,
    KSelector, PairMode, PairPredictionReport, Statistic,
};
use simbias_core::sampling::{
    enumerate_distribution_with_budget, sample_distribution, OutputDistribution,
    DEFAULT_ENUMERATION_BUDGET,
};
use simbias_core::Error as CoreError;

use crate::config::ExperimentConfig;
use crate::{CliError, CliResult};

/// One written artifact: file name (relative to the output directory) and
/// the hex SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub manifest_path: PathBuf,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct FitArtifact<'a> {
    config: &'a str,
    map: &'a str,
    #[serde(flatten)]
    fit: BoundFit,
    distinct_outputs: usize,
}

#[derive(Serialize)]
struct PairsArtifact<'a> {
    config: &'a str,
    map: &'a str,
    #[serde(flatten)]
    report: PairPredictionReport,
}

#[derive(Serialize)]
struct CorrelationArtifact<'a> {
    config: &'a str,
    map: &'a str,
    statistic: &'a str,
    outcome: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<CorrelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

/// Tracks written files so a failed run leaves no partial artifact set.
struct ArtifactWriter {
    dir: PathBuf,
    config_digest: String,
    written: Vec<(String, String)>,
}

impl ArtifactWriter {
    fn new(dir: &Path, config_digest: String) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_digest,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        let mut digest = String::with_capacity(64);
        for b in Sha256::digest(bytes) {
            let _ = write!(digest, "{:02x}", b);
        }
        self.written.push((name.to_string(), digest));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Runtime(format!("serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn finish(mut self) -> CliResult<(Vec<Artifact>, PathBuf)> {
        self.written.sort();
        let mut manifest = format!("# config={}\n", self.config_digest);
        for (name, digest) in &self.written {
            let _ = writeln!(manifest, "{digest}  {name}");
        }
        let path = self.dir.join("manifest.txt");
        fs::write(&path, manifest.as_bytes())?;
        let artifacts = self
            .written
            .into_iter()
            .map(|(name, sha256)| Artifact { name, sha256 })
            .collect();
        Ok((artifacts, path))
    }

    fn discard(self) {
        for (name, _) in &self.written {
            let _ = fs::remove_file(self.dir.join(name));
        }
    }
}

fn csv_float(v: f64) -> String {
    // Shortest representation that round-trips; keeps files diffable.
    format!("{v}")
}

fn build_distribution(
    config: &ExperimentConfig,
    map: &simbias_core::maps::MapSpec,
) -> CliResult<OutputDistribution> {
    let s = &config.sampling;
    match s.mode.as_str() {
        "enumerate" => {
            let budget = s
                .enumeration_budget
                .map(u128::from)
                .unwrap_or(DEFAULT_ENUMERATION_BUDGET);
            Ok(enumerate_distribution_with_budget(map, budget)
                .map_err(|e| CliError::Runtime(format!("sampling: {e}")))?)
        }
        _ => Ok(
            sample_distribution(map, s.n_samples, s.master_seed, s.n_shards)
                .map_err(|e| CliError::Runtime(format!("sampling: {e}")))?,
        ),
    }
}

/// Runs the configured experiment end to end and writes every artifact.
///
/// Identical configs produce byte-identical artifact sets; the manifest
/// lists each file with its content digest so reruns can be compared by
/// comparing manifests alone.
pub fn run_pipeline(
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir_override: Option<&Path>,
) -> CliResult<RunOutcome> {
    let config_digest = config.digest();
    let (map, warnings) = config.build_map(base_dir)?;
    let out_dir = out_dir_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| base_dir.join(&config.output.dir));
    let writer = ArtifactWriter::new(&out_dir, config_digest.clone())?;
    match run_stages(config, &map, writer, &config_digest) {
        Ok((artifacts, manifest_path)) => Ok(RunOutcome {
            out_dir,
            artifacts,
            manifest_path,
            warnings,
        }),
        Err(e) => Err(e),
    }
}

fn run_stages(
    config: &ExperimentConfig,
    map: &simbias_core::maps::MapSpec,
    mut writer: ArtifactWriter,
    config_digest: &str,
) -> CliResult<(Vec<Artifact>, PathBuf)> {
    let result = (|| -> CliResult<()> {
        let map_digest = map.digest();
        let dist = build_distribution(config, map)?;

        if config.wants_artifact("distribution") {
            let mut buf = Vec::new();
            dist.write_with_comments(&mut buf, &[("config", config_digest)])
                .map_err(|e| CliError::Runtime(format!("sampling: {e}")))?;
            writer.write("distribution.txt", &buf)?;
        }

        let fit = fit_bound(&dist, config.fit_mode())
            .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
        if config.wants_artifact("fit") {
            writer.write_json(
                "fit.json",
                &FitArtifact {
                    config: config_digest,
                    map: &map_digest,
                    fit,
                    distinct_outputs: dist.distinct(),
                },
            )?;
        }

        let points = scatter(&dist, &fit);
        if config.wants_artifact("scatter") {
            let mut text = format!("# config={config_digest}\noutput,k,log2p,deficit\n");
            for pt in &points {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    pt.output,
                    csv_float(pt.k),
                    csv_float(pt.log2_p()),
                    csv_float(pt.deficit)
                );
            }
            writer.write("scatter.csv", text.as_bytes())?;
        }

        if config.wants_artifact("rank") {
            let mut text = format!("# config={config_digest}\nk,rank,log2p\n");
            for group in rank_groups(&dist) {
                for (rank, (_, p)) in group.entries.iter().enumerate() {
                    let _ = writeln!(
                        text,
                        "{},{},{}",
                        csv_float(group.k),
                        rank + 1,
                        csv_float(p.log2())
                    );
                }
            }
            writer.write("rank.csv", text.as_bytes())?;
        }

        if config.wants_artifact("pairs") {
            for mode in config.pair_modes() {
                let report =
                    pair_prediction_experiment(&dist, mode, config.analysis.n_pairs, config.pair_seed())
                        .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
                writer.write_json(
                    &format!("pairs_{}.json", mode.as_str()),
                    &PairsArtifact {
                        config: config_digest,
                        map: &map_digest,
                        report,
                    },
                )?;
            }
        }

        if config.wants_artifact("correlation") {
            let selector = match config.analysis.correlation_k {
                Some(k) => KSelector::Value(k),
                None => KSelector::Auto,
            };
            for stat in config.correlation_stats() {
                let artifact = match correlation_report(&dist, selector, stat) {
                    Ok(report) => CorrelationArtifact {
                        config: config_digest,
                        map: &map_digest,
                        statistic: stat.as_str(),
                        outcome: "ok",
                        report: Some(report),
                        reason: None,
                    },
                    Err(e @ (CoreError::InsufficientData(_) | CoreError::InsufficientVariance(_))) => {
                        CorrelationArtifact {
                            config: config_digest,
                            map: &map_digest,
                            statistic: stat.as_str(),
                            outcome: "skipped",
                            report: None,
                            reason: Some(e.to_string()),
                        }
                    }
                    Err(e) => return Err(CliError::Runtime(format!("analysis: {e}"))),
                };
                writer.write_json(&format!("correlation_{}.json", stat.as_str()), &artifact)?;
            }
        }

        // The profile and the LKLP list are defined against an envelope
        // bound; reuse the fit when it is one, otherwise fit the envelope
        // on the side.
        let envelope = if fit.mode == FitMode::Envelope {
            fit
        } else {
            fit_bound(&dist, FitMode::Envelope)
                .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?
        };

        if config.wants_artifact("profile") {
            let max_deficit = points.iter().map(|p| p.deficit).fold(0.0, f64::max);
            let grid = delta_grid(max_deficit, config.analysis.delta_step);
            let profile = mass_deficit_profile(&dist, &envelope, &grid)
                .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
            let mut text = format!(
                "# config={config_digest}\n# envelope_constant={}\ndelta,mass\n",
                csv_float(profile.envelope_constant)
            );
            for (delta, mass) in &profile.points {
                let _ = writeln!(text, "{},{}", csv_float(*delta), csv_float(*mass));
            }
            writer.write("mass_deficit.csv", text.as_bytes())?;
        }

        if config.wants_artifact("lklp") {
            let picked = lklp_select(
                &dist,
                &envelope,
                config.analysis.lklp_delta_threshold,
                config.analysis.lklp_k_quantile,
            )
            .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
            let mut text = format!("# config={config_digest}\noutput,k,log2p,deficit\n");
            for e in &picked {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    e.output,
                    csv_float(e.k),
                    csv_float(e.p.log2()),
                    csv_float(e.deficit)
                );
            }
            writer.write("lklp.csv", text.as_bytes())?;
        }
        Ok(())
    })();

    match result {
        Ok(()) => writer.finish(),
        Err(e) => {
            writer.discard();
            Err(e)
        }
    }
}

/// Re-runs the pair experiment and correlations straight from a distribution
/// file; used by the standalone `analyze` subcommand.
pub fn analyze_distribution(
    dist: &OutputDistribution,
    fit_mode: FitMode,
    delta_step: f64,
    lklp_threshold: f64,
    lklp_quantile: f64,
    out_dir: &Path,
    config_digest: &str,
) -> CliResult<Vec<Artifact>> {
    let mut writer = ArtifactWriter::new(out_dir, config_digest.to_string())?;
    let result = (|| -> CliResult<()> {
        let map_digest = dist.provenance().map_digest.clone();
        let fit = fit_bound(dist, fit_mode).map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
        writer.write_json(
            "fit.json",
            &FitArtifact {
                config: config_digest,
                map: &map_digest,
                fit,
                distinct_outputs: dist.distinct(),
            },
        )?;
        let points = scatter(dist, &fit);
        let mut text = format!("# config={config_digest}\noutput,k,log2p,deficit\n");
        for pt in &points {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                pt.output,
                csv_float(pt.k),
                csv_float(pt.log2_p()),
                csv_float(pt.deficit)
            );
        }
        writer.write("scatter.csv", text.as_bytes())?;
        let mut text = format!("# config={config_digest}\nk,rank,log2p\n");
        for group in rank_groups(dist) {
            for (rank, (_, p)) in group.entries.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{},{},{}",
                    csv_float(group.k),
                    rank + 1,
                    csv_float(p.log2())
                );
            }
        }
        writer.write("rank.csv", text.as_bytes())?;
        if fit.mode == FitMode::Envelope {
            let max_deficit = points.iter().map(|p| p.deficit).fold(0.0, f64::max);
            let profile = mass_deficit_profile(dist, &fit, &delta_grid(max_deficit, delta_step))
                .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
            let mut text = format!(
                "# config={config_digest}\n# envelope_constant={}\ndelta,mass\n",
                csv_float(profile.envelope_constant)
            );
            for (delta, mass) in &profile.points {
                let _ = writeln!(text, "{},{}", csv_float(*delta), csv_float(*mass));
            }
            writer.write("mass_deficit.csv", text.as_bytes())?;
            let picked = lklp_select(dist, &fit, lklp_threshold, lklp_quantile)
                .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
            let mut text = format!("# config={config_digest}\noutput,k,log2p,deficit\n");
            for e in &picked {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    e.output,
                    csv_float(e.k),
                    csv_float(e.p.log2()),
                    csv_float(e.deficit)
                );
            }
            writer.write("lklp.csv", text.as_bytes())?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => writer.finish().map(|(artifacts, _)| artifacts),
        Err(e) => {
            writer.discard();
            Err(e)
        }
    }
}

/// Runs one pair-prediction experiment from a distribution file.
pub fn pairs_report(
    dist: &OutputDistribution,
    mode: PairMode,
    n_pairs: u64,
    seed: u64,
) -> CliResult<serde_json::Value> {
    let report = pair_prediction_experiment(dist, mode, n_pairs, seed)
        .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
    to_value_with_map(&report, &dist.provenance().map_digest)
}

/// Runs one correlation report from a distribution file.
pub fn correlate_report(
    dist: &OutputDistribution,
    selector: KSelector,
    stat: Statistic,
) -> CliResult<serde_json::Value> {
    let report = correlation_report(dist, selector, stat)
        .map_err(|e| CliError::Runtime(format!("analysis: {e}")))?;
    to_value_with_map(&report, &dist.provenance().map_digest)
}

fn to_value_with_map<T: Serialize>(report: &T, map_digest: &str) -> CliResult<serde_json::Value> {
    let mut value = serde_json::to_value(report)
        .map_err(|e| CliError::Runtime(format!("serialize report: {e}")))?;
    if let serde_json::Value::Object(obj) = &mut value {
        obj.insert("map".into(), serde_json::Value::String(map_digest.into()));
    }
    Ok(value)
}
