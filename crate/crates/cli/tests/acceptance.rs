//! Acceptance suite: one test per release criterion, each printing a
//! `[criterion N] PASS` line (run with `--nocapture` to see them).
//!
//! Pinned constants: the reference transducer is the 5-state machine from
//! seed 33 at input length 16, and every seeded experiment uses pair seed
//! 7. Both values are fixed here so reruns are bit-identical.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use simbias_core::analysis::{
    correlation_report, delta_grid, fit_bound, mass_deficit_profile, pair_prediction_experiment,
    rank_groups, scatter, FitMode, KSelector, PairMode, Statistic, ENVELOPE_EPSILON,
};
use simbias_core::bits::BitString;
use simbias_core::complexity::{ktilde, lz76_phrase_count};
use simbias_core::maps::{
    bernoulli_exact, can_pair, nussinov_fold, structure_is_valid, Base, BernoulliSpec, FstSpec,
    MapSpec, PolynomialSpec, RnaSequence, RnaSpec,
};
use simbias_core::sampling::{enumerate_distribution, sample_distribution, OutputDistribution};
use simbias_core::stats::pearson;

const FST_SEED: u64 = 33;
const PAIR_SEED: u64 = 7;

fn fst_run() -> OutputDistribution {
    let fst = FstSpec::random(5, 16, FST_SEED).unwrap();
    enumerate_distribution(&MapSpec::Fst(fst)).unwrap()
}

// ---------------------------------------------------------------- 1 ----

fn lz76_exhaustive_history_words(s: &[u8]) -> usize {
    let reproducible = |prefix_len: usize, word_len: usize| -> bool {
        (0..prefix_len).any(|q| (0..word_len).all(|j| s[q + j] == s[prefix_len + j]))
    };
    let n = s.len();
    let mut start = 0;
    let mut words = 0;
    while start < n {
        let mut len = 1;
        loop {
            if start + len > n {
                len = n - start;
                break;
            }
            if !reproducible(start, len) {
                break;
            }
            len += 1;
        }
        words += 1;
        start += len;
    }
    words
}

#[test]
fn criterion_01_lz76_oracle_equivalence() {
    let started = Instant::now();
    let mut checked = 0u32;
    for len in 1..=12usize {
        for value in 0..(1u32 << len) {
            let bits: Vec<u8> = (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
            assert_eq!(
                lz76_phrase_count(&bits).unwrap(),
                lz76_exhaustive_history_words(&bits),
                "mismatch on {bits:?}"
            );
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    assert_eq!(checked, 8190);
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("[criterion 1] PASS — 8190 strings match the exhaustive-history oracle in {elapsed:?}");
}

// ---------------------------------------------------------------- 2 ----

#[test]
fn criterion_02_estimator_identities() {
    use rand::RngCore;
    let mut rng = rand_chacha_compat(4242);
    let floor = ktilde::<f64>(&BitString::uniform(0, 30).unwrap());
    for _ in 0..10_000 {
        let bits: Vec<u8> = (0..30).map(|_| (rng.next_u32() & 1) as u8).collect();
        let x = BitString::from_bits(bits).unwrap();
        let k = ktilde::<f64>(&x);
        assert_eq!(k, ktilde::<f64>(&x.reversed()));
        assert_eq!(k, ktilde::<f64>(&x.complemented()));
        assert!(k >= floor);
    }
    assert_eq!(floor, 30f64.log2());
    assert_eq!(floor, ktilde::<f64>(&BitString::uniform(1, 30).unwrap()));
    println!("[criterion 2] PASS — reversal/complement identities exact on 10^4 strings; uniform is minimal");
}

fn rand_chacha_compat(seed: u64) -> impl rand::RngCore {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- 3 ----

fn enumerate_pair_sets(
    bases: &[Base],
    i: isize,
    j: isize,
    min_loop: usize,
) -> Vec<Vec<(usize, usize)>> {
    if i >= j {
        return vec![Vec::new()];
    }
    let mut out = enumerate_pair_sets(bases, i + 1, j, min_loop);
    let (iu, ju) = (i as usize, j as usize);
    for k in iu + min_loop + 1..=ju {
        if !can_pair(bases[iu], bases[k]) {
            continue;
        }
        for left in enumerate_pair_sets(bases, i + 1, k as isize - 1, min_loop) {
            for right in enumerate_pair_sets(bases, k as isize + 1, j, min_loop) {
                let mut s = vec![(iu, k)];
                s.extend_from_slice(&left);
                s.extend_from_slice(&right);
                out.push(s);
            }
        }
    }
    out
}

fn check_fold_against_oracle(seq: &RnaSequence, spec: &RnaSpec) {
    let folded = nussinov_fold(seq, spec);
    assert!(structure_is_valid(seq, &folded, spec), "{seq}");
    let best = enumerate_pair_sets(seq.bases(), 0, seq.len() as isize - 1, spec.min_loop())
        .iter()
        .map(Vec::len)
        .max()
        .unwrap();
    assert_eq!(folded.pair_count(), best, "{seq}");
}

#[test]
fn criterion_03_nussinov_oracle_equivalence() {
    let started = Instant::now();
    let spec8 = RnaSpec::new(8, 3).unwrap();
    for index in 0..4u64.pow(8) {
        check_fold_against_oracle(&RnaSequence::from_index(index, 8), &spec8);
    }
    let spec12 = RnaSpec::new(12, 3).unwrap();
    let mut state = 0xDEAD_BEEF_0BADu64;
    for _ in 0..1_000 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        check_fold_against_oracle(&RnaSequence::from_index(state & ((1 << 24) - 1), 12), &spec12);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "[criterion 3] PASS — 4^8 length-8 and 1000 length-12 sequences match structure \
         enumeration in {elapsed:?}"
    );
}

// ---------------------------------------------------------------- 4 ----

#[test]
fn criterion_04_bernoulli_exactness() {
    // Enumerated distribution against the closed form, for several p.
    for p in [0.5, 0.3, 0.17, 0.9, 0.01] {
        let spec = BernoulliSpec::new(8, p).unwrap();
        let dist = enumerate_distribution(&MapSpec::Bernoulli(spec.clone())).unwrap();
        for v in 0..256u64 {
            let x = spec.output_from_index(v);
            let exact: f64 = bernoulli_exact(&spec, &x).unwrap();
            let got = dist.probability(&x).unwrap_or(0.0);
            assert!(
                (got - exact).abs() < 1e-12,
                "p={p} string {x}: {got} vs {exact}"
            );
        }
    }
    // Sampled frequencies at N = 10^6 within 4 sigma for >= 99% of strings.
    let spec = BernoulliSpec::new(8, 0.3).unwrap();
    let n = 1_000_000u64;
    let sampled = sample_distribution(&MapSpec::Bernoulli(spec.clone()), n, 11, 8).unwrap();
    let mut pass = 0;
    for v in 0..256u64 {
        let x = spec.output_from_index(v);
        let exact: f64 = bernoulli_exact(&spec, &x).unwrap();
        let freq = sampled.probability(&x).unwrap_or(0.0);
        let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
        if (freq - exact).abs() <= 4.0 * sigma {
            pass += 1;
        }
    }
    assert!(pass >= 254, "only {pass}/256 strings within 4 sigma");
    println!(
        "[criterion 4] PASS — enumerated matches closed form to 1e-12 for 5 values of p; \
         {pass}/256 sampled strings within 4 sigma at N=10^6"
    );
}

// ---------------------------------------------------------------- 5 ----

#[test]
fn criterion_05_uniform_prediction_null() {
    let dist = enumerate_distribution(&MapSpec::Bernoulli(BernoulliSpec::new(8, 0.5).unwrap()))
        .unwrap();
    for mode in [PairMode::Weighted, PairMode::Uniform] {
        let report = pair_prediction_experiment(&dist, mode, 10_000, PAIR_SEED).unwrap();
        assert!(
            (0.48..=0.52).contains(&report.accuracy),
            "{mode:?} accuracy {} outside the null band",
            report.accuracy
        );
        println!(
            "[criterion 5] PASS — {} mode accuracy {:.4} within [0.48, 0.52]",
            report.mode.as_str(),
            report.accuracy
        );
    }
}

// ---------------------------------------------------------------- 6 ----

#[test]
fn criterion_06_polynomial_simplicity_bias() {
    let started = Instant::now();
    let map = MapSpec::Polynomial(PolynomialSpec::default());
    let dist = sample_distribution(&map, 100_000, 2024, 8).unwrap();
    let fit = fit_bound(&dist, FitMode::Envelope).unwrap();
    let points = scatter(&dist, &fit);
    let above = points.iter().filter(|p| p.deficit < -ENVELOPE_EPSILON).count();
    assert_eq!(above, 0, "{above} points above the envelope bound");

    let groups = rank_groups(&dist);
    let ks: Vec<f64> = groups.iter().map(|g| g.k).collect();
    let max_log2p: Vec<f64> = groups.iter().map(|g| g.entries[0].1.log2()).collect();
    let r = pearson(&ks, &max_log2p).unwrap();
    assert!(r <= -0.7, "complexity / max-probability correlation {r}");

    let weighted = pair_prediction_experiment(&dist, PairMode::Weighted, 10_000, PAIR_SEED).unwrap();
    let uniform = pair_prediction_experiment(&dist, PairMode::Uniform, 10_000, PAIR_SEED).unwrap();
    assert!(
        weighted.accuracy > uniform.accuracy,
        "weighted {} <= uniform {}",
        weighted.accuracy,
        uniform.accuracy
    );
    assert!(weighted.accuracy > 0.55 && uniform.accuracy > 0.55);
    assert!(
        (0.70..=0.92).contains(&weighted.accuracy),
        "weighted accuracy {} outside the acceptance band",
        weighted.accuracy
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "[criterion 6] PASS — zero points above bound; r={r:.3}; weighted {:.3} > uniform {:.3} \
         in {elapsed:?}",
        weighted.accuracy, uniform.accuracy
    );
}

// ---------------------------------------------------------------- 7 ----

#[test]
fn criterion_07_fst_accuracy_ordering() {
    let dist = fst_run();
    let weighted = pair_prediction_experiment(&dist, PairMode::Weighted, 10_000, PAIR_SEED).unwrap();
    let uniform = pair_prediction_experiment(&dist, PairMode::Uniform, 10_000, PAIR_SEED).unwrap();
    assert!(
        weighted.accuracy > uniform.accuracy && uniform.accuracy > 0.5,
        "ordering violated: weighted {} / uniform {}",
        weighted.accuracy,
        uniform.accuracy
    );
    assert!(
        weighted.accuracy >= 0.65,
        "weighted accuracy {} below 0.65",
        weighted.accuracy
    );
    println!(
        "[criterion 7] PASS — weighted {:.3} > uniform {:.3} > 0.5 on the seed-{FST_SEED} run",
        weighted.accuracy, uniform.accuracy
    );
}

// ---------------------------------------------------------------- 8 ----

/// Second-lowest complexity among groups meeting the >= 10 member
/// precondition. At output length 16 the lowest complexity groups are
/// combinatorially capped at four strings, so the precondition is applied
/// per group; a machine without two eligible groups fails the precondition
/// outright and the criterion walks to the next seed.
fn second_eligible_k(dist: &OutputDistribution) -> Option<f64> {
    let eligible: Vec<f64> = rank_groups(dist)
        .into_iter()
        .filter(|g| g.entries.len() >= 10)
        .map(|g| g.k)
        .collect();
    eligible.get(1).copied()
}

#[test]
fn criterion_08_changes_bias() {
    let mut seed = FST_SEED;
    loop {
        let fst = FstSpec::random(5, 16, seed).unwrap();
        let dist = enumerate_distribution(&MapSpec::Fst(fst)).unwrap();
        let auto_size = rank_groups(&dist).get(1).map(|g| g.entries.len()).unwrap_or(0);
        let Some(k) = second_eligible_k(&dist) else {
            println!(
                "[criterion 8] seed {seed}: no two complexity groups reach 10 members \
                 (second-lowest overall has {auto_size}); trying the next seed"
            );
            seed += 1;
            continue;
        };
        let report = match correlation_report(&dist, KSelector::Value(k), Statistic::Changes) {
            Ok(r) => r,
            Err(e) => {
                println!("[criterion 8] seed {seed}: group k={k} not evaluable ({e}); trying the next seed");
                seed += 1;
                continue;
            }
        };
        assert!(report.n >= 10);
        assert!(
            report.r < 0.0,
            "seed {seed}: r = {} at k={k} (n={})",
            report.r,
            report.n
        );
        assert!(
            report.p_value < 0.05,
            "seed {seed}: p = {} at k={k} (n={})",
            report.p_value,
            report.n
        );
        println!(
            "[criterion 8] PASS — seed {seed}, k={k}: r={:.3}, p={:.2e}, n={} \
             (second-lowest group overall has {auto_size} members, below the size gate)",
            report.r, report.p_value, report.n
        );
        break;
    }
}

// ---------------------------------------------------------------- 9 ----

#[test]
fn criterion_09_mass_deficit_decay() {
    let dist = fst_run();
    let fit = fit_bound(&dist, FitMode::Envelope).unwrap();
    let max_deficit = scatter(&dist, &fit)
        .iter()
        .map(|p| p.deficit)
        .fold(0.0, f64::max);
    let grid = delta_grid(max_deficit, 0.5);
    let profile = mass_deficit_profile(&dist, &fit, &grid).unwrap();
    assert!((profile.points[0].1 - 1.0).abs() <= 1e-9, "mass(0) = {}", profile.points[0].1);
    for w in profile.points.windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-12, "mass increased: {w:?}");
    }
    let (delta_star, mass_star) = profile
        .points
        .iter()
        .rev()
        .find(|(_, m)| *m > 0.0)
        .copied()
        .unwrap();
    assert!(delta_star > 0.0, "no deficit range observed");
    let avg_decay = -mass_star.log2() / delta_star;
    assert!(
        avg_decay >= 0.5,
        "average decay {avg_decay} bits/bit over [0, {delta_star}]"
    );
    println!(
        "[criterion 9] PASS — mass(0)=1, non-increasing, average decay {avg_decay:.3} \
         bits of log2-mass per bit of deficit over [0, {delta_star}]"
    );
}

// --------------------------------------------------------------- 10 ----

fn write_run_config(dir: &Path) -> std::path::PathBuf {
    let config = "\
[map]
type = \"bernoulli\"
n = 8
p = 0.5

[sampling]
mode = \"enumerate\"
master_seed = 7

[analysis]
pair_seed = 7

[output]
dir = \"out\"
";
    let path = dir.join("experiment.toml");
    std::fs::write(&path, config).unwrap();
    path
}

#[test]
fn criterion_10_end_to_end_reproducibility() {
    let bin = env!("CARGO_BIN_EXE_simbias");
    let dir = tempfile::tempdir().unwrap();
    let config = write_run_config(dir.path());

    let mut manifests = Vec::new();
    for run in 0..2 {
        let out_dir = dir.path().join(format!("run{run}"));
        let status = Command::new(bin)
            .arg("run")
            .arg(&config)
            .arg("--out-dir")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success(), "run {run} failed");
        manifests.push(std::fs::read(out_dir.join("manifest.txt")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1], "manifests differ between reruns");
    let manifest_text = String::from_utf8(manifests[0].clone()).unwrap();
    for artifact in [
        "distribution.txt",
        "fit.json",
        "scatter.csv",
        "rank.csv",
        "pairs_weighted.json",
        "pairs_uniform.json",
        "correlation_changes.json",
        "correlation_ones.json",
        "mass_deficit.csv",
        "lklp.csv",
    ] {
        assert!(manifest_text.contains(artifact), "missing {artifact}");
    }

    // Sharded and unsharded sampling produce identical distribution files.
    let sample_config = dir.path().join("sample_map.toml");
    std::fs::write(&sample_config, "[map]\ntype = \"bernoulli\"\nn = 8\np = 0.3\n").unwrap();
    let mut files = Vec::new();
    for shards in [1u32, 8] {
        let out = dir.path().join(format!("dist_{shards}.txt"));
        let status = Command::new(bin)
            .args(["sample", "--map"])
            .arg(&sample_config)
            .args(["--n", "50000", "--seed", "5"])
            .args(["--shards", &shards.to_string()])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read(out).unwrap());
    }
    assert_eq!(files[0], files[1], "sharded and unsharded files differ");
    println!(
        "[criterion 10] PASS — rerun manifests byte-identical; 1-shard and 8-shard \
         distribution files byte-identical"
    );
}

// A cross-module property tied to the reference run: ranking outputs by
// complexity agrees with ranking by probability more often than not.
#[test]
fn fst_complexity_probability_concordance_is_positive() {
    let dist = fst_run();
    let entries: Vec<(f64, u64)> = dist.iter().map(|(x, c, _)| (ktilde::<f64>(x), c)).collect();
    let step = (entries.len() / 400).max(1);
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in (0..entries.len()).step_by(step) {
        for j in (i + step..entries.len()).step_by(step) {
            let (ka, ca) = entries[i];
            let (kb, cb) = entries[j];
            if ka == kb || ca == cb {
                continue;
            }
            if (ka < kb) == (ca > cb) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    assert!(
        concordant > discordant,
        "concordant {concordant} vs discordant {discordant}"
    );
}

// The weight-quantization scale keeps enumerated Bernoulli counts summing
// exactly to the file-format total.
#[test]
fn bernoulli_enumeration_counts_are_internally_consistent() {
    for p in [0.5, 0.2, 0.77] {
        let dist =
            enumerate_distribution(&MapSpec::Bernoulli(BernoulliSpec::new(8, p).unwrap())).unwrap();
        let counts: &BTreeMap<BitString, u64> = dist.counts();
        assert_eq!(counts.values().sum::<u64>(), dist.total());
    }
}
