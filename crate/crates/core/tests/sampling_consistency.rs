//! Sampled frequencies must converge to exact enumerated (or closed-form)
//! frequencies for every enumerable map.

use std::collections::BTreeMap;

use simbias_core::bits::BitString;
use simbias_core::maps::{bernoulli_exact, BernoulliSpec, FstSpec, MapSpec, RnaSpec};
use simbias_core::sampling::{enumerate_distribution, sample_distribution};

/// Fraction of strings whose sampled frequency lands within four binomial
/// standard deviations of the exact probability. Strings never sampled are
/// scored against frequency zero.
fn four_sigma_pass_rate(
    exact: &BTreeMap<BitString, f64>,
    sampled: &simbias_core::sampling::OutputDistribution,
    n_samples: f64,
) -> f64 {
    let mut pass = 0usize;
    for (x, &p) in exact {
        let freq = sampled.probability(x).unwrap_or(0.0);
        let sigma = (p * (1.0 - p) / n_samples).sqrt();
        if (freq - p).abs() <= 4.0 * sigma {
            pass += 1;
        }
    }
    pass as f64 / exact.len() as f64
}

#[test]
fn bernoulli_sampling_matches_closed_form() {
    let spec = BernoulliSpec::new(8, 0.3).unwrap();
    let map = MapSpec::Bernoulli(spec.clone());
    let n = 200_000u64;
    let sampled = sample_distribution(&map, n, 2024, 4).unwrap();
    let exact: BTreeMap<BitString, f64> = (0..256u64)
        .map(|v| {
            let x = spec.output_from_index(v);
            let p = bernoulli_exact::<f64>(&spec, &x).unwrap();
            (x, p)
        })
        .collect();
    let rate = four_sigma_pass_rate(&exact, &sampled, n as f64);
    assert!(rate >= 0.99, "pass rate {rate}");
}

#[test]
fn rare_event_frequencies_match_the_closed_form() {
    // With p = 0.01 almost every draw is the all-zeros string.
    let spec = BernoulliSpec::new(8, 0.01).unwrap();
    let map = MapSpec::Bernoulli(spec.clone());
    let n = 100_000u64;
    let sampled = sample_distribution(&map, n, 7, 2).unwrap();
    let zeros: BitString = "00000000".parse().unwrap();
    let p = bernoulli_exact::<f64>(&spec, &zeros).unwrap();
    let freq = sampled.probability(&zeros).unwrap();
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((freq - p).abs() <= 4.0 * sigma, "freq {freq} vs exact {p}");
    assert!(freq > 0.9);
}

#[test]
fn fst_sampling_matches_enumeration() {
    let map = MapSpec::Fst(FstSpec::random(5, 12, 21).unwrap());
    let enumerated = enumerate_distribution(&map).unwrap();
    let n = 200_000u64;
    let sampled = sample_distribution(&map, n, 5, 8).unwrap();
    let exact: BTreeMap<BitString, f64> = enumerated
        .iter()
        .map(|(x, _, p)| (x.clone(), p))
        .collect();
    let rate = four_sigma_pass_rate(&exact, &sampled, n as f64);
    assert!(rate >= 0.99, "pass rate {rate}");
}

#[test]
fn rna_sampling_matches_enumeration() {
    let map = MapSpec::Rna(RnaSpec::new(12, 3).unwrap());
    let enumerated = enumerate_distribution(&map).unwrap();
    assert_eq!(enumerated.total(), 4u64.pow(12));
    let n = 100_000u64;
    let sampled = sample_distribution(&map, n, 99, 8).unwrap();
    let exact: BTreeMap<BitString, f64> = enumerated
        .iter()
        .map(|(x, _, p)| (x.clone(), p))
        .collect();
    let rate = four_sigma_pass_rate(&exact, &sampled, n as f64);
    assert!(rate >= 0.99, "pass rate {rate}");
    // Every sampled output must be a structure the enumeration saw.
    for (x, _, _) in sampled.iter() {
        assert!(exact.contains_key(x), "sampled unseen structure {x}");
    }
}

#[test]
fn rna_enumeration_counts_structures_exactly_at_small_length() {
    let map = MapSpec::Rna(RnaSpec::new(8, 3).unwrap());
    let d = enumerate_distribution(&map).unwrap();
    assert_eq!(d.total(), 65_536);
    assert_eq!(d.counts().values().sum::<u64>(), 65_536);
    // Re-running enumeration is bit-identical.
    let again = enumerate_distribution(&map).unwrap();
    assert_eq!(d, again);
}
