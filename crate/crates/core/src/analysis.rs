//! Everything computed from an output distribution: bound fitting, scatter
//! and rank datasets, pairwise probability prediction, per-complexity
//! correlations, mass-deficit profiles, and low-complexity low-probability
//! selection.

use std::collections::BTreeMap;

use ordered_float::NotNan;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::ktilde;
use crate::error::{Error, Result};
use crate::sampling::{DistributionMode, OutputDistribution};
use crate::stats::{nearest_rank_quantile, pearson, pearson_p_value};

/// Slack used when checking points against an envelope bound.
pub const ENVELOPE_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// Slope from the output count alone, intercept zero.
    Apriori,
    /// Same slope; intercept lowered until the bound touches the data
    /// envelope from above.
    Envelope,
}

impl FitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FitMode::Apriori => "apriori",
            FitMode::Envelope => "envelope",
        }
    }
}

/// Fitted constants of the probability upper bound
/// `log2 P(x) <= -a * k(x) - b`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct BoundFit {
    pub a: f64,
    pub b: f64,
    pub mode: FitMode,
}

impl BoundFit {
    /// Bound value `-a * k - b` in log2-probability units.
    pub fn bound_log2_p(&self, k: f64) -> f64 {
        -self.a * k - self.b
    }
}

/// One distinct output with its complexity, probability, and distance below
/// the fitted bound.
#[derive(Clone, PartialEq, Debug)]
pub struct ScatterPoint {
    pub output: BitString,
    pub k: f64,
    pub p: f64,
    pub deficit: f64,
}

impl ScatterPoint {
    pub fn log2_p(&self) -> f64 {
        self.p.log2()
    }
}

/// Outputs sharing one complexity value, ordered by descending probability;
/// ranks are the 1-based positions.
#[derive(Clone, PartialEq, Debug)]
pub struct RankGroup {
    pub k: f64,
    /// `(output, probability)` sorted by descending probability, ties by
    /// ascending output.
    pub entries: Vec<(BitString, f64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    /// Outputs drawn in proportion to their probability.
    Weighted,
    /// Outputs drawn uniformly over the distinct observed set.
    Uniform,
}

impl PairMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PairMode::Weighted => "weighted",
            PairMode::Uniform => "uniform",
        }
    }
}

/// Outcome of the pairwise probability-order prediction experiment.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct PairPredictionReport {
    pub mode: PairMode,
    pub n_pairs: u64,
    pub correct: u64,
    /// Pairs whose complexities tied, decided by the seeded coin.
    pub ties: u64,
    pub accuracy: f64,
    pub seed: u64,
    /// Caveat attached to uniform-mode reports over partially sampled
    /// distributions, whose accuracy overestimates the true uniform value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Changes,
    Ones,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::Changes => "changes",
            Statistic::Ones => "ones",
        }
    }

    fn of(self, x: &BitString) -> f64 {
        match self {
            Statistic::Changes => x.changes_count() as f64,
            Statistic::Ones => x.ones_count() as f64,
        }
    }
}

/// Which complexity group a correlation runs over.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum KSelector {
    /// The second-lowest observed complexity value.
    Auto,
    /// The observed complexity value nearest to the given one.
    Value(f64),
}

/// Pearson correlation between a string statistic and log2 probability
/// within one complexity group.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct CorrelationReport {
    pub k: f64,
    pub statistic: Statistic,
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Probability mass at or below the bound by at least each `delta`, plus the
/// smallest constant `c >= 0` with `mass(delta) <= 2^(-delta + 1 + c)` over
/// the profiled grid.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct MassDeficitProfile {
    pub points: Vec<(f64, f64)>,
    pub envelope_constant: f64,
}

/// A selected low-complexity, low-probability output.
#[derive(Clone, PartialEq, Debug)]
pub struct LklpEntry {
    pub output: BitString,
    pub k: f64,
    pub p: f64,
    pub deficit: f64,
}

struct Entry {
    output: BitString,
    count: u64,
    p: f64,
    log2_p: f64,
    k: f64,
}

fn entries(dist: &OutputDistribution) -> Vec<Entry> {
    dist.iter()
        .map(|(x, count, p)| Entry {
            k: ktilde::<f64>(x),
            output: x.clone(),
            count,
            p,
            log2_p: p.log2(),
        })
        .collect()
}

/// Fits the bound constants to a distribution.
///
/// The slope is `a = log2(N_O) / k_max`, with `N_O` the number of distinct
/// observed outputs and `k_max` the largest observed complexity, so the
/// bound spans exactly `log2(N_O)` bits across the observed complexity
/// range. Apriori mode keeps `b = 0`; envelope mode lowers `b` until no
/// point lies above the bound and at least one touches it.
pub fn fit_bound(dist: &OutputDistribution, mode: FitMode) -> Result<BoundFit> {
    let entries = entries(dist);
    if entries.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two distinct outputs, have {}",
            entries.len()
        )));
    }
    let k_max = entries.iter().map(|e| e.k).fold(f64::MIN, f64::max);
    let k_min = entries.iter().map(|e| e.k).fold(f64::MAX, f64::min);
    if k_max == k_min {
        return Err(Error::DegenerateFit(format!(
            "all {} outputs share complexity {k_max}; no slope is identifiable",
            entries.len()
        )));
    }
    let a = (entries.len() as f64).log2() / k_max;
    let b = match mode {
        FitMode::Apriori => 0.0,
        FitMode::Envelope => entries
            .iter()
            .map(|e| -a * e.k - e.log2_p)
            .fold(f64::MAX, f64::min),
    };
    Ok(BoundFit { a, b, mode })
}

/// One point per distinct output with its deficit against the fit.
pub fn scatter(dist: &OutputDistribution, fit: &BoundFit) -> Vec<ScatterPoint> {
    entries(dist)
        .into_iter()
        .map(|e| ScatterPoint {
            deficit: fit.bound_log2_p(e.k) - e.log2_p,
            output: e.output,
            k: e.k,
            p: e.p,
        })
        .collect()
}

/// Groups distinct outputs by exact complexity value; within each group
/// probabilities descend. Concatenating all groups recovers every distinct
/// output exactly once.
pub fn rank_groups(dist: &OutputDistribution) -> Vec<RankGroup> {
    let mut groups: BTreeMap<NotNan<f64>, Vec<(BitString, f64)>> = BTreeMap::new();
    for e in entries(dist) {
        groups
            .entry(NotNan::new(e.k).expect("complexity is finite"))
            .or_default()
            .push((e.output, e.p));
    }
    groups
        .into_iter()
        .map(|(k, mut entries)| {
            entries.sort_by(|(xa, pa), (xb, pb)| {
                pb.partial_cmp(pa).expect("finite probabilities").then(xa.cmp(xb))
            });
            RankGroup {
                k: k.into_inner(),
                entries,
            }
        })
        .collect()
}

/// Draws `n_pairs` output pairs and predicts which member is more probable
/// from complexity alone: the lower-complexity string is predicted more
/// probable, with complexity ties decided by a seeded fair coin (and
/// counted). A prediction scores as correct when it matches the empirical
/// count order; exact count ties are themselves decided by a second seeded
/// coin, which keeps the null accuracy at one half on uniform
/// distributions.
pub fn pair_prediction_experiment(
    dist: &OutputDistribution,
    mode: PairMode,
    n_pairs: u64,
    seed: u64,
) -> Result<PairPredictionReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be >= 1".into()));
    }
    let entries = entries(dist);
    if entries.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "pair prediction needs at least two distinct outputs, have {}",
            entries.len()
        )));
    }
    // Cumulative counts for weighted draws.
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0u64;
    for e in &entries {
        acc += e.count;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> usize {
        match mode {
            PairMode::Weighted => {
                let t = rng.random_range(0..total);
                cumulative.partition_point(|&c| c <= t)
            }
            PairMode::Uniform => rng.random_range(0..entries.len()),
        }
    };
    let mut correct = 0u64;
    let mut ties = 0u64;
    for _ in 0..n_pairs {
        let mut i = draw(&mut rng);
        let mut j = draw(&mut rng);
        while i == j {
            // Within a pair the two outputs are distinct strings.
            j = draw(&mut rng);
            if mode == PairMode::Uniform {
                i = draw(&mut rng);
            }
        }
        let (x, y) = (&entries[i], &entries[j]);
        let predict_x_higher = if x.k < y.k {
            true
        } else if x.k > y.k {
            false
        } else {
            ties += 1;
            rng.random_bool(0.5)
        };
        let truth_x_higher = if x.count > y.count {
            true
        } else if x.count < y.count {
            false
        } else {
            rng.random_bool(0.5)
        };
        if predict_x_higher == truth_x_higher {
            correct += 1;
        }
    }
    let note = match (mode, dist.mode()) {
        (PairMode::Uniform, DistributionMode::Sampled) => Some(
            "uniform mode ranges over observed outputs only; with partial sampling the accuracy \
             overestimates the value for the full output set"
                .to_string(),
        ),
        _ => None,
    };
    Ok(PairPredictionReport {
        mode,
        n_pairs,
        correct,
        ties,
        accuracy: correct as f64 / n_pairs as f64,
        seed,
        note,
    })
}

fn grouped_by_k(entries: &[Entry]) -> BTreeMap<NotNan<f64>, Vec<usize>> {
    let mut groups: BTreeMap<NotNan<f64>, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        groups
            .entry(NotNan::new(e.k).expect("complexity is finite"))
            .or_default()
            .push(i);
    }
    groups
}

/// Pearson correlation between a string statistic and log2 probability over
/// one complexity group. The default group is the second-lowest observed
/// complexity, where departures from the bound are most visible.
pub fn correlation_report(
    dist: &OutputDistribution,
    selector: KSelector,
    statistic: Statistic,
) -> Result<CorrelationReport> {
    let entries = entries(dist);
    let groups = grouped_by_k(&entries);
    let ks: Vec<f64> = groups.keys().map(|k| k.into_inner()).collect();
    let k = match selector {
        KSelector::Auto => {
            if ks.len() < 2 {
                return Err(Error::InsufficientData(format!(
                    "auto group selection needs two distinct complexity values, have {}",
                    ks.len()
                )));
            }
            ks[1]
        }
        KSelector::Value(v) => {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "complexity selector must be finite, got {v}"
                )));
            }
            *ks.iter()
                .min_by(|a, b| {
                    (*a - v)
                        .abs()
                        .partial_cmp(&(*b - v).abs())
                        .expect("finite complexities")
                })
                .expect("at least one group exists")
        }
    };
    let members = &groups[&NotNan::new(k).expect("selected from observed keys")];
    if members.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "complexity group k={k} has {} members; need at least 3",
            members.len()
        )));
    }
    let xs: Vec<f64> = members.iter().map(|&i| statistic.of(&entries[i].output)).collect();
    let ys: Vec<f64> = members.iter().map(|&i| entries[i].log2_p).collect();
    let r = pearson(&xs, &ys).ok_or_else(|| {
        Error::InsufficientVariance(format!(
            "{} values or probabilities are constant across the k={k} group",
            statistic.as_str()
        ))
    })?;
    Ok(CorrelationReport {
        k,
        statistic,
        r,
        p_value: pearson_p_value(r, members.len()),
        n: members.len(),
    })
}

/// Total probability mass sitting at least `delta` bits below the fitted
/// bound, for each grid value. Requires an envelope fit so that mass(0) = 1.
pub fn mass_deficit_profile(
    dist: &OutputDistribution,
    fit: &BoundFit,
    deltas: &[f64],
) -> Result<MassDeficitProfile> {
    if fit.mode != FitMode::Envelope {
        return Err(Error::InvalidArgument(
            "mass-deficit profile requires an envelope fit".into(),
        ));
    }
    let mut by_deficit: Vec<(f64, f64)> = scatter(dist, fit)
        .into_iter()
        .map(|pt| (pt.deficit, pt.p))
        .collect();
    by_deficit.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite deficits"));
    // suffix_mass[i] = sum of p over points with deficit >= by_deficit[i].0
    let mut suffix_mass = vec![0.0; by_deficit.len() + 1];
    for i in (0..by_deficit.len()).rev() {
        suffix_mass[i] = suffix_mass[i + 1] + by_deficit[i].1;
    }
    let mut points = Vec::with_capacity(deltas.len());
    let mut envelope_constant = 0.0f64;
    for &delta in deltas {
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "deficit grid values must be non-negative, got {delta}"
            )));
        }
        let idx = by_deficit.partition_point(|&(d, _)| d < delta - ENVELOPE_EPSILON);
        let mass = suffix_mass[idx];
        if mass > 0.0 {
            envelope_constant = envelope_constant.max(mass.log2() + delta - 1.0);
        }
        points.push((delta, mass));
    }
    Ok(MassDeficitProfile {
        points,
        envelope_constant: envelope_constant.max(0.0),
    })
}

/// Evenly spaced deficit grid from zero through the largest observed
/// deficit (rounded up to the step).
pub fn delta_grid(max_deficit: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0);
    let steps = (max_deficit / step).ceil() as usize;
    (0..=steps).map(|i| i as f64 * step).collect()
}

/// Outputs at least `delta_threshold` bits below the bound whose complexity
/// lies below the `k_quantile` quantile of observed complexities, sorted by
/// descending deficit. A quantile of 1 disables the complexity filter.
pub fn lklp_select(
    dist: &OutputDistribution,
    fit: &BoundFit,
    delta_threshold: f64,
    k_quantile: f64,
) -> Result<Vec<LklpEntry>> {
    if fit.mode != FitMode::Envelope {
        return Err(Error::InvalidArgument(
            "LKLP selection requires an envelope fit".into(),
        ));
    }
    if delta_threshold < 0.0 || delta_threshold.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "delta threshold must be non-negative, got {delta_threshold}"
        )));
    }
    if !(k_quantile > 0.0 && k_quantile <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k quantile must lie in (0, 1], got {k_quantile}"
        )));
    }
    let points = scatter(dist, fit);
    let k_cut = if k_quantile >= 1.0 {
        f64::INFINITY
    } else {
        let mut ks: Vec<f64> = points.iter().map(|pt| pt.k).collect();
        ks.sort_by(|a, b| a.partial_cmp(b).expect("finite complexities"));
        nearest_rank_quantile(&ks, k_quantile)
    };
    let mut selected: Vec<LklpEntry> = points
        .into_iter()
        .filter(|pt| pt.deficit >= delta_threshold && pt.k < k_cut)
        .map(|pt| LklpEntry {
            output: pt.output,
            k: pt.k,
            p: pt.p,
            deficit: pt.deficit,
        })
        .collect();
    selected.sort_by(|a, b| {
        b.deficit
            .partial_cmp(&a.deficit)
            .expect("finite deficits")
            .then(a.output.cmp(&b.output))
    });
    Ok(selected)
}
