//! Seeded sampling and exact enumeration into output distributions.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::maps::{Enumerability, MapSpec};

/// Guardrail for exhaustive enumeration: 2^26 inputs.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 26;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-draw seed derivation: the `draw_index`-th output of a SplitMix64
/// stream whose state starts at `master_seed`.
///
/// Pure 64-bit integer arithmetic, so local, sharded, and distributed runs
/// derive identical seeds. Shards partition the global draw index range;
/// the derivation never sees the shard id, which is what makes the counts
/// independent of the shard layout.
pub fn draw_seed(master_seed: u64, draw_index: u64) -> u64 {
    splitmix64_finalize(master_seed.wrapping_add(draw_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistributionMode {
    Sampled,
    Enumerated,
}

impl DistributionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DistributionMode::Sampled => "sampled",
            DistributionMode::Enumerated => "enumerated",
        }
    }
}

/// Where a distribution came from: which map, which master seed, and which
/// global draw-index spans it covers (sampled mode only).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Provenance {
    pub map_digest: String,
    pub master_seed: u64,
    /// Half-open `[start, end)` spans of global draw indices, sorted and
    /// non-overlapping. Empty for enumerated or file-loaded distributions.
    pub index_ranges: Vec<(u64, u64)>,
}

/// Empirical or exact output distribution of one map.
///
/// `P(x) = counts[x] / total`. Counts are kept sorted by output so the
/// persisted form is diffable and iteration order is deterministic.
#[derive(Clone, PartialEq, Debug)]
pub struct OutputDistribution {
    counts: BTreeMap<BitString, u64>,
    total: u64,
    mode: DistributionMode,
    provenance: Provenance,
}

impl OutputDistribution {
    pub fn counts(&self) -> &BTreeMap<BitString, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mode(&self) -> DistributionMode {
        self.mode
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Number of distinct observed outputs.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, x: &BitString) -> Option<f64> {
        self.counts.get(x).map(|&c| c as f64 / self.total as f64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, u64, f64)> + '_ {
        let total = self.total as f64;
        self.counts.iter().map(move |(x, &c)| (x, c, c as f64 / total))
    }

    /// Writes the sorted two-column text form with its provenance header.
    ///
    /// Extra `comments` become additional `# key=value` header lines.
    pub fn write_with_comments<W: Write>(&self, mut w: W, comments: &[(&str, &str)]) -> Result<()> {
        writeln!(
            w,
            "# map={} seed={} mode={} total={}",
            self.provenance.map_digest,
            self.provenance.master_seed,
            self.mode.as_str(),
            self.total
        )?;
        for (key, value) in comments {
            writeln!(w, "# {key}={value}")?;
        }
        for (x, c) in &self.counts {
            writeln!(w, "{x},{c}")?;
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        self.write_with_comments(w, &[])
    }

    pub fn write_to_path(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_to(&mut file)
    }

    /// Parses the text form. Shard spans are not persisted, so a loaded
    /// sampled distribution cannot take part in [`merge`].
    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedFile("missing header line".into()))??;
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::MalformedFile("header must start with '# '".into()))?;
        let mut map_digest = None;
        let mut master_seed = None;
        let mut mode = None;
        let mut total = None;
        for field in rest.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::MalformedFile(format!("bad header field {field:?}")))?;
            match key {
                "map" => map_digest = Some(value.to_string()),
                "seed" => {
                    master_seed = Some(value.parse::<u64>().map_err(|_| {
                        Error::MalformedFile(format!("bad seed value {value:?}"))
                    })?)
                }
                "mode" => {
                    mode = Some(match value {
                        "sampled" => DistributionMode::Sampled,
                        "enumerated" => DistributionMode::Enumerated,
                        other => {
                            return Err(Error::MalformedFile(format!("unknown mode {other:?}")))
                        }
                    })
                }
                "total" => {
                    total = Some(value.parse::<u64>().map_err(|_| {
                        Error::MalformedFile(format!("bad total value {value:?}"))
                    })?)
                }
                other => return Err(Error::MalformedFile(format!("unknown header key {other:?}"))),
            }
        }
        let (map_digest, master_seed, mode, total) = match (map_digest, master_seed, mode, total) {
            (Some(d), Some(s), Some(m), Some(t)) => (d, s, m, t),
            _ => return Err(Error::MalformedFile("incomplete header".into())),
        };
        let mut counts = BTreeMap::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() || line.starts_with('#') {
                continue; // trailing comment headers are informational
            }
            let (bits, count) = line.split_once(',').ok_or_else(|| {
                Error::MalformedFile(format!("line {}: expected 'bits,count'", lineno + 2))
            })?;
            let x: BitString = bits.parse().map_err(|e| {
                Error::MalformedFile(format!("line {}: {e}", lineno + 2))
            })?;
            let c: u64 = count.parse().map_err(|_| {
                Error::MalformedFile(format!("line {}: bad count {count:?}", lineno + 2))
            })?;
            if c == 0 {
                return Err(Error::MalformedFile(format!(
                    "line {}: zero count",
                    lineno + 2
                )));
            }
            if counts.insert(x, c).is_some() {
                return Err(Error::MalformedFile(format!(
                    "line {}: duplicate output",
                    lineno + 2
                )));
            }
        }
        if counts.is_empty() {
            return Err(Error::MalformedFile("no count rows".into()));
        }
        let sum: u64 = counts.values().sum();
        if sum != total {
            return Err(Error::MalformedFile(format!(
                "counts sum to {sum} but header says total={total}"
            )));
        }
        Ok(Self {
            counts,
            total,
            mode,
            provenance: Provenance {
                map_digest,
                master_seed,
                index_ranges: Vec::new(),
            },
        })
    }

    pub fn read_from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(file)
    }
}

fn shard_span(n_samples: u64, n_shards: u32, shard: u32) -> (u64, u64) {
    let n = n_samples as u128;
    let k = n_shards as u128;
    let start = (n * shard as u128 / k) as u64;
    let end = (n * (shard as u128 + 1) / k) as u64;
    (start, end)
}

fn count_range(map: &MapSpec, master_seed: u64, span: (u64, u64)) -> BTreeMap<BitString, u64> {
    let mut counts = BTreeMap::new();
    for i in span.0..span.1 {
        let x = map.sample_output(draw_seed(master_seed, i));
        *counts.entry(x).or_insert(0) += 1;
    }
    counts
}

/// Draws `n_samples` outputs with per-draw seeds derived from
/// `(master_seed, global draw index)` and aggregates the counts.
///
/// Shards split the draw-index range and run in parallel; because seeds are
/// derived from the global index, the result is identical for every
/// `n_shards`.
pub fn sample_distribution(
    map: &MapSpec,
    n_samples: u64,
    master_seed: u64,
    n_shards: u32,
) -> Result<OutputDistribution> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    if n_shards == 0 {
        return Err(Error::InvalidArgument("n_shards must be >= 1".into()));
    }
    let digest = map.digest();
    let shards: Vec<OutputDistribution> = (0..n_shards)
        .into_par_iter()
        .filter_map(|s| {
            let span = shard_span(n_samples, n_shards, s);
            if span.0 == span.1 {
                return None; // more shards than samples
            }
            let counts = count_range(map, master_seed, span);
            Some(OutputDistribution {
                total: span.1 - span.0,
                counts,
                mode: DistributionMode::Sampled,
                provenance: Provenance {
                    map_digest: digest.clone(),
                    master_seed,
                    index_ranges: vec![span],
                },
            })
        })
        .collect();
    let mut merged: Option<OutputDistribution> = None;
    for shard in shards {
        merged = Some(match merged {
            None => shard,
            Some(acc) => merge(&acc, &shard)?,
        });
    }
    merged.ok_or_else(|| Error::InvalidArgument("no samples drawn".into()))
}

/// Pointwise count sum of two sampled distributions of the same map and
/// master seed covering disjoint draw-index spans.
pub fn merge(a: &OutputDistribution, b: &OutputDistribution) -> Result<OutputDistribution> {
    if a.mode != DistributionMode::Sampled || b.mode != DistributionMode::Sampled {
        return Err(Error::ProvenanceMismatch(
            "only sampled distributions can be merged".into(),
        ));
    }
    if a.provenance.map_digest != b.provenance.map_digest {
        return Err(Error::ProvenanceMismatch(format!(
            "map digests differ: {} vs {}",
            a.provenance.map_digest, b.provenance.map_digest
        )));
    }
    if a.provenance.master_seed != b.provenance.master_seed {
        return Err(Error::ProvenanceMismatch(format!(
            "master seeds differ: {} vs {}",
            a.provenance.master_seed, b.provenance.master_seed
        )));
    }
    if a.provenance.index_ranges.is_empty() || b.provenance.index_ranges.is_empty() {
        return Err(Error::ProvenanceMismatch(
            "shard spans unknown (file-loaded distribution?); cannot prove disjointness".into(),
        ));
    }
    let mut ranges: Vec<(u64, u64)> = a
        .provenance
        .index_ranges
        .iter()
        .chain(&b.provenance.index_ranges)
        .copied()
        .collect();
    ranges.sort_unstable();
    for w in ranges.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::ProvenanceMismatch(format!(
                "draw-index spans overlap: [{}, {}) and [{}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    // Coalesce adjacent spans to keep provenance small.
    let mut coalesced: Vec<(u64, u64)> = Vec::with_capacity(ranges.len());
    for r in ranges {
        match coalesced.last_mut() {
            Some(last) if last.1 == r.0 => last.1 = r.1,
            _ => coalesced.push(r),
        }
    }
    let mut counts = a.counts.clone();
    for (x, &c) in &b.counts {
        *counts.entry(x.clone()).or_insert(0) += c;
    }
    Ok(OutputDistribution {
        counts,
        total: a.total + b.total,
        mode: DistributionMode::Sampled,
        provenance: Provenance {
            map_digest: a.provenance.map_digest.clone(),
            master_seed: a.provenance.master_seed,
            index_ranges: coalesced,
        },
    })
}

/// Exact output counts over the map's full input space, within the default
/// budget of [`DEFAULT_ENUMERATION_BUDGET`] inputs.
pub fn enumerate_distribution(map: &MapSpec) -> Result<OutputDistribution> {
    enumerate_distribution_with_budget(map, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_distribution_with_budget(
    map: &MapSpec,
    budget: u128,
) -> Result<OutputDistribution> {
    let cardinality = match map.enumerability() {
        Enumerability::Continuous(reason) => {
            return Err(Error::NotEnumerable(format!("{} map: {reason}", map.kind())))
        }
        Enumerability::Indexed(c) | Enumerability::ClosedForm(c) => c,
    };
    if cardinality > budget {
        return Err(Error::BudgetExceeded {
            cardinality,
            budget,
        });
    }
    let (counts, total) = match map {
        MapSpec::Bernoulli(b) => b.exact_counts(),
        _ => {
            let n = cardinality as u64;
            const CHUNK: u64 = 1 << 14;
            let chunks: Vec<(u64, u64)> = (0..n.div_ceil(CHUNK))
                .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
                .collect();
            let counts = chunks
                .into_par_iter()
                .map(|(start, end)| {
                    let mut m = BTreeMap::new();
                    for i in start..end {
                        *m.entry(map.output_for_index(i)).or_insert(0u64) += 1;
                    }
                    m
                })
                .reduce(BTreeMap::new, |mut acc, m| {
                    for (x, c) in m {
                        *acc.entry(x).or_insert(0) += c;
                    }
                    acc
                });
            (counts, n)
        }
    };
    Ok(OutputDistribution {
        counts,
        total,
        mode: DistributionMode::Enumerated,
        provenance: Provenance {
            map_digest: map.digest(),
            master_seed: 0,
            index_ranges: Vec::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{BernoulliSpec, FstSpec, PolynomialSpec};

    fn bernoulli(n: usize, p: f64) -> MapSpec {
        MapSpec::Bernoulli(BernoulliSpec::new(n, p).unwrap())
    }

    #[test]
    fn draw_seed_is_stable() {
        assert_eq!(draw_seed(42, 0), draw_seed(42, 0));
        assert_ne!(draw_seed(42, 0), draw_seed(42, 1));
        assert_ne!(draw_seed(42, 0), draw_seed(43, 0));
    }

    #[test]
    fn shard_count_does_not_change_counts() {
        let map = bernoulli(6, 0.4);
        let one = sample_distribution(&map, 5_000, 9, 1).unwrap();
        let eight = sample_distribution(&map, 5_000, 9, 8).unwrap();
        let thirteen = sample_distribution(&map, 5_000, 9, 13).unwrap();
        assert_eq!(one.counts(), eight.counts());
        assert_eq!(one.counts(), thirteen.counts());
        assert_eq!(one.total(), 5_000);
    }

    #[test]
    fn more_shards_than_samples_still_works() {
        let map = bernoulli(4, 0.5);
        let d = sample_distribution(&map, 3, 1, 16).unwrap();
        assert_eq!(d.total(), 3);
    }

    #[test]
    fn merge_is_commutative_and_checks_provenance() {
        let map = bernoulli(4, 0.5);
        let d = sample_distribution(&map, 100, 7, 1).unwrap();
        let other_seed = sample_distribution(&map, 100, 8, 1).unwrap();
        assert!(merge(&d, &other_seed).is_err());
        assert!(merge(&d, &d).is_err()); // overlapping spans

        // Build two halves by hand through the public API.
        let halves = sample_distribution(&map, 100, 7, 2).unwrap();
        assert_eq!(halves.counts(), d.counts());
    }

    #[test]
    fn identity_fst_enumerates_to_singleton_counts() {
        let map = MapSpec::Fst(FstSpec::identity(3).unwrap());
        let d = enumerate_distribution(&map).unwrap();
        assert_eq!(d.distinct(), 8);
        assert!(d.iter().all(|(_, c, _)| c == 1));
        assert_eq!(d.total(), 8);
    }

    #[test]
    fn constant_fst_enumerates_to_single_output() {
        let map = MapSpec::Fst(FstSpec::constant(0, 10).unwrap());
        let d = enumerate_distribution(&map).unwrap();
        assert_eq!(d.distinct(), 1);
        assert_eq!(d.total(), 1024);
        assert_eq!(d.counts().values().next(), Some(&1024));
    }

    #[test]
    fn polynomial_refuses_enumeration() {
        let map = MapSpec::Polynomial(PolynomialSpec::default());
        assert!(matches!(
            enumerate_distribution(&map),
            Err(Error::NotEnumerable(_))
        ));
    }

    #[test]
    fn budget_is_enforced_and_names_the_cardinality() {
        let map = MapSpec::Fst(FstSpec::identity(20).unwrap());
        match enumerate_distribution_with_budget(&map, 1 << 10) {
            Err(Error::BudgetExceeded { cardinality, budget }) => {
                assert_eq!(cardinality, 1 << 20);
                assert_eq!(budget, 1 << 10);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn file_round_trip_preserves_everything_visible() {
        let map = bernoulli(5, 0.3);
        let d = sample_distribution(&map, 1_000, 11, 4).unwrap();
        let mut buf = Vec::new();
        d.write_to(&mut buf).unwrap();
        let loaded = OutputDistribution::read_from(&buf[..]).unwrap();
        assert_eq!(loaded.counts(), d.counts());
        assert_eq!(loaded.total(), d.total());
        assert_eq!(loaded.mode(), d.mode());
        assert_eq!(loaded.provenance().map_digest, d.provenance().map_digest);
        assert_eq!(loaded.provenance().master_seed, 11);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let bad_header = "map=abc seed=0 mode=sampled total=1\n0,1\n";
        assert!(OutputDistribution::read_from(bad_header.as_bytes()).is_err());
        let bad_total = "# map=abc seed=0 mode=sampled total=5\n0,1\n";
        assert!(OutputDistribution::read_from(bad_total.as_bytes()).is_err());
        let dup = "# map=abc seed=0 mode=sampled total=2\n0,1\n0,1\n";
        assert!(OutputDistribution::read_from(dup.as_bytes()).is_err());
    }
}
