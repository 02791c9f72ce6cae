use proptest::prelude::*;

use wglab_core::arith::intmath::{integer_root, is_prime_trial};
use wglab_core::majorant::{mean_g, PrimeSubset, SequenceKind, SubsetSpec, WTrick, WeightedSequence};

fn w16() -> WTrick {
    WTrick::from_w_param(2, 2).unwrap()
}

#[test]
fn nu_examples() {
    let t = w16();
    let nu = t.nu::<f64>(1, 4096).unwrap();
    assert!((nu.get(18) - 12.04).abs() < 5e-3);
    assert_eq!(nu.get(1), 0.0);
    let big = t.nu::<f64>(1, 1 << 17).unwrap();
    assert!((0.75..=1.25).contains(&big.mean()), "{}", big.mean());
}

#[test]
fn f_examples() {
    let t = w16();
    let n = 1 << 16;
    let all = PrimeSubset::generate(&SubsetSpec::All, 2000).unwrap();
    let nu = t.nu::<f64>(1, n).unwrap();
    assert_eq!(t.f::<f64>(1, n, &all).unwrap().values(), nu.values());

    let no17 = PrimeSubset::generate(&SubsetSpec::WindowDrop { intervals: vec![(17, 17)] }, 2000).unwrap();
    assert_eq!(t.f::<f64>(1, n, &no17).unwrap().get(18), 0.0);

    let thin = PrimeSubset::generate(&SubsetSpec::Bernoulli { delta: 0.8, seed: 7 }, 2000).unwrap();
    let ratio = t.f::<f64>(1, n, &thin).unwrap().sum() / nu.sum();
    assert!((0.6..=0.95).contains(&ratio), "{ratio}");

    let small = PrimeSubset::generate(&SubsetSpec::All, 100).unwrap();
    assert!(t.f::<f64>(1, n, &small).is_err());
}

#[test]
fn mean_examples() {
    let t = w16();
    let n = 1 << 16;
    let all = PrimeSubset::generate(&SubsetSpec::All, 2000).unwrap();
    let r = mean_g(&t, n, &all, 0.1).unwrap();
    assert!((0.75..=1.25).contains(&r.aggregate), "{}", r.aggregate);

    let thin = PrimeSubset::generate(&SubsetSpec::Bernoulli { delta: 0.8, seed: 7 }, 2000).unwrap();
    let r = mean_g(&t, n, &thin, 0.1).unwrap();
    assert!((r.lower_margin - 0.6).abs() < 1e-12);
    assert!(r.aggregate >= 0.6 - 0.15, "{}", r.aggregate);
    assert!((r.density_floor - 0.72).abs() < 1e-12);
    let json = serde_json::to_string(&r).unwrap();
    assert_eq!(serde_json::from_str::<wglab_core::majorant::MeanReport>(&json).unwrap(), r);
}

#[test]
fn mean_deviation_shrinks() {
    let t = WTrick::from_w_param(3, 2).unwrap();
    let improved = t.residues()[..3]
        .iter()
        .filter(|&&b| {
            let dev = |n: u64| (t.nu::<f64>(b, n).unwrap().mean() - 1.0).abs();
            dev(1 << 17) < dev(1 << 12)
        })
        .count();
    assert!(improved >= 2, "{improved} of 3");
}

#[test]
fn books_balance() {
    // Σ_b (Wσ(b)/φ(W)) g(b,N) N equals the Chebyshev-type sum over the
    // primes it is built from, computed here without the builders.
    for (w, k, n, spec) in [
        (2u64, 2u64, 1u64 << 14, SubsetSpec::All),
        (3, 2, 1 << 12, SubsetSpec::Bernoulli { delta: 0.7, seed: 3 }),
        (2, 3, 1 << 12, SubsetSpec::drop_classes(40, &[3, 7])),
    ] {
        let t = WTrick::from_w_param(w, k).unwrap();
        let wv = t.w();
        let sub = PrimeSubset::generate(&spec, 20_000).unwrap();
        let r = mean_g(&t, n, &sub, 0.1).unwrap();
        let phi = t.modulus().phi() as f64;
        let lhs: f64 = r
            .per_b
            .iter()
            .map(|(&b, &g)| wv as f64 * t.sigma(b).unwrap() as f64 / phi * g * n as f64)
            .sum();
        let mut rhs = 0.0;
        for p in 2..=20_000u64 {
            if !is_prime_trial(p) || wv % p == 0 || !spec.admits(p) {
                continue;
            }
            let pk = p.pow(k as u32);
            let b = pk % wv;
            if pk > wv && (pk - b) / wv <= n {
                rhs += k as f64 * (p as f64).powi(k as i32 - 1) * (p as f64).ln();
            }
        }
        assert!((lhs - rhs).abs() <= 1e-12 * rhs, "w={w} k={k}: {lhs} vs {rhs}");
    }
}

#[test]
fn single_precision_tracks_double() {
    let t = w16();
    let a = t.nu::<f32>(9, 4096).unwrap();
    let b = t.nu::<f64>(9, 4096).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((*x as f64 - y).abs() <= 1e-6 * y.max(1.0));
    }
}

#[test]
fn binary_header_layout() {
    let nu = w16().nu::<f64>(9, 64).unwrap();
    let mut buf = Vec::new();
    nu.write_binary(&mut buf).unwrap();
    let words: Vec<u64> = buf[..40].chunks(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(words, vec![0, 16, 9, 2, 64]);
    assert_eq!(buf.len(), 40 + 64 * 8);
    let back = WeightedSequence::<f64>::read_binary(buf.as_slice()).unwrap();
    assert_eq!(back.values(), nu.values());
    assert_eq!(back.kind(), SequenceKind::Nu);
    assert_eq!(back.meta().y, nu.meta().y);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn thinned_below_full(delta in 0.0f64..=1.0, seed in any::<u64>(), bi in 0usize..54, e in 8u32..13) {
        let t = WTrick::from_w_param(3, 2).unwrap();
        let b = t.residues()[bi];
        let n = 1u64 << e;
        let sub = PrimeSubset::generate(&SubsetSpec::Bernoulli { delta, seed }, 5000).unwrap();
        let f = t.f::<f64>(b, n, &sub).unwrap();
        let nu = t.nu::<f64>(b, n).unwrap();
        prop_assert_eq!(f.first_excess_over(&nu), None);
        for (m, v) in nu.support() {
            let x = t.w() * m + b;
            let p = integer_root(x, 2);
            prop_assert_eq!(p * p, x);
            prop_assert!(is_prime_trial(p));
            prop_assert!(v > 0.0);
        }
        let mu = t.mu::<f64>(b, n).unwrap();
        let psi = mu.psi_of(&f).unwrap();
        prop_assert_eq!(psi.first_excess_over(mu.mu()), None);
        for (m, _) in mu.mu().support() {
            let x = t.w() * m + b;
            let r = integer_root(x, 2);
            prop_assert_eq!(r * r, x);
        }
    }
}
