//! `simbias` — sample or enumerate generative maps, fit the
//! complexity-probability bound, and run the prediction experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use simbias_cli::config::ExperimentConfig;
use simbias_cli::pipeline::{analyze_distribution, pairs_report, correlate_report, run_pipeline};
use simbias_cli::{CliError, CliResult};
use simbias_core::analysis::{FitMode, KSelector, PairMode, Statistic};
use simbias_core::bits::BitString;
use simbias_core::predictor::{extrapolate, guess_order, next_bit};
use simbias_core::sampling::{
    enumerate_distribution_with_budget, sample_distribution, OutputDistribution,
    DEFAULT_ENUMERATION_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "simbias",
    version,
    about = "Simplicity-bias experiments over generative input-output maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitArg {
    Envelope,
    Apriori,
}

impl From<FitArg> for FitMode {
    fn from(v: FitArg) -> Self {
        match v {
            FitArg::Envelope => FitMode::Envelope,
            FitArg::Apriori => FitMode::Apriori,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PairModeArg {
    Weighted,
    Uniform,
}

impl From<PairModeArg> for PairMode {
    fn from(v: PairModeArg) -> Self {
        match v {
            PairModeArg::Weighted => PairMode::Weighted,
            PairModeArg::Uniform => PairMode::Uniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Changes,
    Ones,
}

impl From<StatArg> for Statistic {
    fn from(v: StatArg) -> Self {
        match v {
            StatArg::Changes => Statistic::Changes,
            StatArg::Ones => Statistic::Ones,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline described by a config file.
    Run {
        config: PathBuf,
        /// Write artifacts here instead of the config's output.dir.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Validate a config file without running anything.
    Validate { config: PathBuf },
    /// Monte Carlo sampling of a map into a distribution file.
    Sample {
        /// Config file whose [map] section names the map.
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shards: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive enumeration of a map into a distribution file.
    Enumerate {
        #[arg(long)]
        map: PathBuf,
        /// Maximum input-space cardinality.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the bound and write scatter, rank, profile and LKLP artifacts
    /// from a distribution file.
    Analyze {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value = "envelope")]
        fit: FitArg,
        /// Deficit grid step for the mass profile.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 5.0)]
        lklp_threshold: f64,
        #[arg(long, default_value_t = 0.5)]
        lklp_quantile: f64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Optional config whose digest must match the distribution's map.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Pairwise probability-order prediction over a distribution file.
    Pairs {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum)]
        mode: PairModeArg,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation between a string statistic and log2 probability within
    /// one complexity group of a distribution file.
    Correlate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum)]
        stat: StatArg,
        /// "auto" (second-lowest complexity) or a complexity value.
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Next-bit forecast and greedy extrapolation for a bit history.
    Predict {
        #[arg(long)]
        history: String,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
    },
    /// Order candidate strings by assigned probability (ascending
    /// complexity), one candidate per input line.
    Rank {
        #[arg(long)]
        candidates: PathBuf,
    },
}

fn load_map(path: &Path) -> CliResult<(simbias_core::maps::MapSpec, Vec<String>)> {
    let (config, base) = ExperimentConfig::load(path)?;
    config.build_map(&base)
}

fn load_distribution(path: &Path) -> CliResult<OutputDistribution> {
    OutputDistribution::read_from_path(path)
        .map_err(|e| CliError::Runtime(format!("read {}: {e}", path.display())))
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> CliResult<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("json"));
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Run { config, out_dir } => {
            let (cfg, base) = ExperimentConfig::load(&config)?;
            let errors = cfg.validate();
            if !errors.is_empty() {
                let listing: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
                return Err(CliError::Usage(format!(
                    "invalid config:\n  {}",
                    listing.join("\n  ")
                )));
            }
            let outcome = run_pipeline(&cfg, &base, out_dir.as_deref())?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!("config {}", cfg.digest());
            for a in &outcome.artifacts {
                println!("{}  {}", a.sha256, a.name);
            }
            println!("manifest {}", outcome.manifest_path.display());
            Ok(())
        }
        Command::Validate { config } => {
            let (cfg, _) = ExperimentConfig::load(&config)?;
            let errors = cfg.validate();
            if errors.is_empty() {
                println!("ok");
                Ok(())
            } else {
                for e in &errors {
                    eprintln!("error: {e}");
                }
                Err(CliError::Usage(format!(
                    "{} config error(s) in {}",
                    errors.len(),
                    config.display()
                )))
            }
        }
        Command::Sample {
            map,
            n,
            seed,
            shards,
            out,
        } => {
            let (spec, warnings) = load_map(&map)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let dist = sample_distribution(&spec, n, seed, shards)?;
            dist.write_to_path(&out)?;
            println!(
                "sampled {} draws over {} distinct outputs -> {}",
                dist.total(),
                dist.distinct(),
                out.display()
            );
            Ok(())
        }
        Command::Enumerate { map, budget, out } => {
            let (spec, warnings) = load_map(&map)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let budget = budget.map(u128::from).unwrap_or(DEFAULT_ENUMERATION_BUDGET);
            let dist = enumerate_distribution_with_budget(&spec, budget)?;
            dist.write_to_path(&out)?;
            println!(
                "enumerated {} inputs over {} distinct outputs -> {}",
                dist.total(),
                dist.distinct(),
                out.display()
            );
            Ok(())
        }
        Command::Analyze {
            dist,
            fit,
            step,
            lklp_threshold,
            lklp_quantile,
            out_dir,
            config,
        } => {
            let distribution = load_distribution(&dist)?;
            let config_digest = match config {
                Some(path) => {
                    let (cfg, base) = ExperimentConfig::load(&path)?;
                    let (spec, _) = cfg.build_map(&base)?;
                    if spec.digest() != distribution.provenance().map_digest {
                        return Err(CliError::Usage(format!(
                            "distribution {} was produced by map {}, not by the map in {}",
                            dist.display(),
                            distribution.provenance().map_digest,
                            path.display()
                        )));
                    }
                    cfg.digest()
                }
                None => "-".to_string(),
            };
            let artifacts = analyze_distribution(
                &distribution,
                fit.into(),
                step,
                lklp_threshold,
                lklp_quantile,
                &out_dir,
                &config_digest,
            )?;
            for a in &artifacts {
                println!("{}  {}", a.sha256, a.name);
            }
            Ok(())
        }
        Command::Pairs {
            dist,
            mode,
            n,
            seed,
            out,
        } => {
            let distribution = load_distribution(&dist)?;
            let value = pairs_report(&distribution, mode.into(), n, seed)?;
            emit_json(&value, out.as_deref())
        }
        Command::Correlate { dist, stat, k, out } => {
            let selector = match k.as_str() {
                "auto" => KSelector::Auto,
                other => KSelector::Value(other.parse::<f64>().map_err(|_| {
                    CliError::Usage(format!("--k must be \"auto\" or a number, got {other:?}"))
                })?),
            };
            let distribution = load_distribution(&dist)?;
            let value = correlate_report(&distribution, selector, stat.into())?;
            emit_json(&value, out.as_deref())
        }
        Command::Predict { history, horizon } => {
            let history: BitString = history
                .parse()
                .map_err(|e| CliError::Usage(format!("--history: {e}")))?;
            let forecast = next_bit::<f64>(&history);
            let extended = extrapolate(&history, horizon);
            let continuation: String = extended.to_string()[history.len()..].to_string();
            let value = serde_json::json!({
                "history": history.to_string(),
                "p0": forecast.p0,
                "p1": forecast.p1,
                "k0": forecast.k0,
                "k1": forecast.k1,
                "next_bit": forecast.argmax(),
                "horizon": horizon,
                "continuation": continuation,
                "extended": extended.to_string(),
            });
            emit_json(&value, None)
        }
        Command::Rank { candidates } => {
            let text = std::fs::read_to_string(&candidates)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", candidates.display())))?;
            let mut parsed = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let x: BitString = line.parse().map_err(|e| {
                    CliError::Usage(format!("candidate at line {}: {e}", lineno + 1))
                })?;
                parsed.push(x);
            }
            let ordered = guess_order(&parsed)?;
            for x in ordered {
                println!("{x}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
