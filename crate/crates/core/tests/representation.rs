use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wglab_core::arith::PrimeSet;
use wglab_core::majorant::{PrimeSubset, SequenceMeta, SubsetSpec, WeightedSequence};
use wglab_core::representation::{
    admissible_filter, count_representations, coverage_probe, fft_distribution, indicator_convolution,
    normalized_convolution, prime_powers, theorem_thresholds, transference_gauge, CountMethod, CoverageReport,
};
use wglab_core::Error;

#[test]
fn bitset_is_support_of_fft() {
    let primes = PrimeSet::sieve(1000).unwrap();
    for s in [2u64, 3, 4] {
        let fft = count_representations(&primes, 2, s, 0..=20_000, CountMethod::Fft).unwrap();
        let bits = count_representations(&primes, 2, s, 0..=20_000, CountMethod::Bitset).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=20_000u64);
            assert_eq!(bits.get(n).unwrap(), (fft.get(n).unwrap() > 0) as u64, "s={s} n={n}");
        }
    }
}

#[test]
fn mass_is_conserved() {
    let primes = PrimeSet::sieve(1000).unwrap();
    for (k, s, hi) in [(2u64, 2u64, 100_000u64), (2, 5, 10_000), (3, 3, 1_000_000), (1, 3, 1000)] {
        let powers = prime_powers(&primes, k, hi).unwrap();
        let total: u64 = fft_distribution(&powers, s).unwrap().iter().sum();
        assert_eq!(total, (powers.len() as u64).pow(s as u32), "k={k} s={s}");
    }
}

#[test]
fn fft_refuses_inexact_counts() {
    let primes = PrimeSet::sieve(1000).unwrap();
    let powers = prime_powers(&primes, 1, 1000).unwrap();
    assert!(matches!(fft_distribution(&powers, 10), Err(Error::FftPrecision(_))));
}

#[test]
fn method_limits() {
    let primes = PrimeSet::sieve(1000).unwrap();
    assert!(count_representations(&primes, 2, 4, 0..=100, CountMethod::Brute).is_err());
    assert!(count_representations(&primes, 2, 2, 0..=200_000, CountMethod::Brute).is_err());
    assert!("bogus".parse::<CountMethod>().is_err());
    assert_eq!("fft".parse::<CountMethod>().unwrap(), CountMethod::Fft);
}

#[test]
fn coverage_examples() {
    let primes = PrimeSet::sieve(1000).unwrap();
    let five = coverage_probe(&primes, 2, 5, 5000, 20_000, true).unwrap();
    assert!(five.exceptions.is_empty());
    assert_eq!(five.admissible, (5000..=20_000u64).filter(|n| n % 24 == 5).count() as u64);

    let two = coverage_probe(&primes, 2, 2, 10, 100, false).unwrap();
    let brute = count_representations(&primes, 2, 2, 10..=100, CountMethod::Brute).unwrap();
    let zeros: Vec<u64> = (10..=100).filter(|&n| brute.get(n) == Some(0)).collect();
    assert_eq!(two.exceptions, zeros);
    assert!(two.exceptions.len() > 45);

    let json = serde_json::to_string(&five).unwrap();
    assert_eq!(serde_json::from_str::<CoverageReport>(&json).unwrap(), five);
    let mut list = Vec::new();
    two.write_exceptions(&mut list).unwrap();
    assert_eq!(String::from_utf8(list).unwrap().lines().count(), two.exceptions.len());
}

#[test]
fn thresholds_feed_the_probe() {
    let t = theorem_thresholds(2).unwrap();
    assert_eq!((t.s_min_local, t.s_min_mean), (22, 44));
    assert!(admissible_filter(20, t.s_min_theorem, 2).unwrap());
}

#[test]
fn indicator_convolutions() {
    for (n, s) in [(512usize, 2usize), (300, 3), (64, 4)] {
        let ones: Vec<_> = (0..s).map(|_| WeightedSequence::<f64>::indicator(n).unwrap()).collect();
        let conv = normalized_convolution(&ones).unwrap();
        let scale = (n as f64).powi(s as i32 - 1);
        for m in (s as u64..=(s * n) as u64).step_by(7) {
            let exact = indicator_convolution(m, n as u64, s as u64).unwrap() as f64;
            assert!((conv[m as usize] * scale - exact).abs() <= 1e-6 * exact, "n={n} s={s} m={m}");
        }
    }
}

#[test]
fn profile_window() {
    let n = 2048usize;
    let ones: Vec<_> = (0..3).map(|_| WeightedSequence::<f64>::indicator(n).unwrap()).collect();
    let p = transference_gauge(&ones, 0.1).unwrap();
    let half = 3.0 * n as f64 / 2.0;
    assert!(p.window_lo as f64 > (1.0 - p.kappa * p.kappa) * half);
    assert!((p.window_hi as f64) < (1.0 + p.kappa) * half);
    assert_eq!(p.gauge.len() as u64, p.window_hi - p.window_lo + 1);
    assert!(p.gauge.iter().all(|&g| g > 0.0));
    assert!(p.hypotheses_hold() && p.positive() && p.warning.is_none());
    assert!((p.kappa - 0.1 / 32.0).abs() < 1e-15);
    assert!(transference_gauge(&ones[..1], 0.1).is_err());
    assert!(transference_gauge(&ones, 1.5).is_err());

    let zero = WeightedSequence::from_values(vec![0.0; n], SequenceMeta::plain()).unwrap();
    let p = transference_gauge(&[zero.clone(), zero], 0.1).unwrap();
    assert_eq!(p.min_gauge, 0.0);
    assert!(!p.each_mean_ok && !p.positive() && p.warning.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coverage_monotone_in_subset(lo_density in 0.3f64..0.9, gap in 0.0f64..0.3, seed in any::<u64>(), s in 2u64..5) {
        let small = PrimeSubset::generate(&SubsetSpec::Bernoulli { delta: lo_density, seed }, 200).unwrap();
        let large = PrimeSubset::generate(&SubsetSpec::Bernoulli { delta: (lo_density + gap).min(1.0), seed }, 200).unwrap();
        prop_assert!(small.iter().all(|p| large.contains(p)));
        let a = coverage_probe(&small, 2, s, 1000, 20_000, false).unwrap();
        let b = coverage_probe(&large, 2, s, 1000, 20_000, false).unwrap();
        prop_assert!(b.exceptions.iter().all(|n| a.exceptions.contains(n)));
        for r in [&a, &b] {
            prop_assert_eq!(r.represented + r.exceptions.len() as u64, r.admissible);
        }
    }

    #[test]
    fn cubes_are_parity_filtered(n in any::<u64>(), s in 1u64..100) {
        prop_assert_eq!(admissible_filter(n, s, 3).unwrap(), n % 2 == s % 2);
    }
}
