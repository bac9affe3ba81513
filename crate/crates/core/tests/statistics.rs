mod common;

use aligncmp::fwer::{
    adjust_bergmann, adjust_bonferroni, adjust_finner, adjust_hochberg, adjust_holland, adjust_holm, adjust_nemenyi,
    adjust_shaffer, bergmann_rejections, familywise_error_rate,
};
use aligncmp::mcnemar::{chi2_1_sf, run_test, BinomialTail};
use aligncmp::{Error, TestKind};
use common::{binomial, random_hypotheses};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF, Discrete};

const KINDS: [TestKind; 4] = [TestKind::Asymptotic, TestKind::ContinuityCorrected, TestKind::Exact, TestKind::MidP];

fn p(kind: TestKind, n01: u64, n10: u64) -> f64 {
    run_test(kind, n01, n10).unwrap().p_value
}

#[test]
fn every_test_is_undefined_without_discordant_pairs() {
    for kind in KINDS {
        assert_eq!(run_test(kind, 0, 0), Err(Error::UndefinedStatistic));
    }
    for kind in KINDS {
        assert!(run_test(kind, 0, 1).is_ok());
        assert!(run_test(kind, 1, 0).is_ok());
    }
}

#[test]
fn chi2_survival_at_five_percent_critical_value() {
    assert!((chi2_1_sf(3.841459) - 0.05).abs() < 1e-6);
}

#[test]
fn chi2_survival_matches_statrs() {
    let reference = ChiSquared::new(1.0).unwrap();
    let mut x = 1e-6;
    while x < 60.0 {
        let want = reference.sf(x);
        let got = chi2_1_sf(x);
        assert!((got - want).abs() <= 1e-9 * want.max(1e-300), "x = {x}: {got} vs {want}");
        x *= 1.37;
    }
    assert_eq!(chi2_1_sf(0.0), 1.0);
}

#[test]
fn exact_type_one_error_is_controlled_by_enumeration() {
    for alpha in [0.01, 0.05, 0.1] {
        for n in 1..=12u64 {
            let size: f64 = (0..=n)
                .filter(|&x| p(TestKind::Exact, x, n - x) <= alpha)
                .map(|x| binomial(n, x) as f64 / 2f64.powi(n as i32))
                .sum();
            assert!(size <= alpha, "n = {n}, α = {alpha}: size {size}");
        }
    }
}

#[test]
fn exact_matches_statrs_binomial_tail() {
    for n in 1..=400u64 {
        for n01 in (0..=n).step_by(7) {
            let n10 = n - n01;
            let b = n01.max(n10);
            let dist = Binomial::new(0.5, n).unwrap();
            let tail = if b == 0 { 1.0 } else { dist.sf(b - 1) };
            let want = (2.0 * tail).min(1.0);
            let got = p(TestKind::Exact, n01, n10);
            assert!((got - want).abs() <= 1e-9 * want + 1e-300, "({n01}, {n10}): {got} vs {want}");
            let point = dist.pmf(b);
            assert!((BinomialTail::new(n01, n10).unwrap().point_probability() - point).abs() <= 1e-9 * point);
        }
    }
}

#[test]
fn continuity_corrected_tracks_exact_for_large_n() {
    for n in (100..=2000u64).step_by(13) {
        let spread = (3.0 * (n as f64).sqrt()) as u64;
        for d in 1..=spread {
            if (n + d) % 2 != 0 {
                continue;
            }
            let n01 = (n + d) / 2;
            let n10 = n - n01;
            let gap = (p(TestKind::ContinuityCorrected, n01, n10) - p(TestKind::Exact, n01, n10)).abs();
            assert!(gap <= 0.01, "({n01}, {n10}): {gap}");
        }
    }
}

#[test]
fn asymptotic_differs_from_exact_by_about_one_point_mass() {
    for n in (100..=2000u64).step_by(13) {
        for n01 in [n / 2, n / 2 + 3, n / 2 + 10] {
            let n10 = n - n01;
            let tail = BinomialTail::new(n01, n10).unwrap();
            let gap = (p(TestKind::Asymptotic, n01, n10) - p(TestKind::Exact, n01, n10)).abs();
            assert!(gap <= 1.1 * tail.point_probability() + 0.01, "({n01}, {n10}): {gap}");
        }
    }
}

proptest! {
    #[test]
    fn statistics_are_symmetric(n01 in 0u64..3000, n10 in 0u64..3000) {
        prop_assume!(n01 + n10 > 0);
        for kind in KINDS {
            let a = run_test(kind, n01, n10).unwrap();
            let b = run_test(kind, n10, n01).unwrap();
            prop_assert_eq!(a.p_value, b.p_value);
            prop_assert_eq!(a.statistic, b.statistic);
        }
    }

    #[test]
    fn mid_p_is_exact_minus_point_probability(n01 in 0u64..5000, n10 in 0u64..5000) {
        prop_assume!(n01 + n10 > 0);
        let exact = p(TestKind::Exact, n01, n10);
        let mid = p(TestKind::MidP, n01, n10);
        prop_assert!(mid <= exact);
        prop_assert!(mid >= 0.0);
        let point = BinomialTail::new(n01, n10).unwrap().point_probability();
        prop_assert!(((exact - mid) - point).abs() <= 1e-12 + 1e-9 * point);
    }

    #[test]
    fn p_values_are_probabilities(n01 in 0u64..100_000, n10 in 0u64..100_000) {
        prop_assume!(n01 + n10 > 0);
        for kind in KINDS {
            let v = p(kind, n01, n10);
            prop_assert!((0.0..=1.0).contains(&v), "{:?}: {}", kind, v);
        }
    }

    #[test]
    fn asymptotic_statistic_formula(n01 in 0u64..10_000, n10 in 0u64..10_000) {
        prop_assume!(n01 + n10 > 0);
        let d = n01 as f64 - n10 as f64;
        let n = (n01 + n10) as f64;
        let r = run_test(TestKind::Asymptotic, n01, n10).unwrap();
        prop_assert!((r.statistic.unwrap() - d * d / n).abs() <= 1e-9 * (1.0 + d * d / n));
        let cc = run_test(TestKind::ContinuityCorrected, n01, n10).unwrap();
        let e = (d.abs() - 1.0).max(0.0);
        prop_assert!((cc.statistic.unwrap() - e * e / n).abs() <= 1e-9 * (1.0 + e * e / n));
        prop_assert_eq!(r.small_sample, n01 + n10 < 25);
    }
}

#[test]
fn fwer_of_ten_tests_at_five_percent() {
    let product: f64 = (0..10).map(|_| 0.95).product();
    let fwer = familywise_error_rate(0.05, 10);
    assert!((1.0 - fwer - product).abs() < 1e-15);
    assert_eq!(format!("{:.1}", 1.0 - fwer), "0.6");
    assert_eq!(format!("{:.1}", fwer), "0.4");
    assert!((1.0 - fwer - 0.5987369392383789).abs() < 1e-15);
}

fn assert_dominates(upper: &[f64], lower: &[f64], what: &str) {
    for (i, (u, l)) in upper.iter().zip(lower).enumerate() {
        assert!(u.min(1.0) + 1e-12 >= l.min(1.0), "{what} at {i}: {u} < {l}");
    }
}

#[test]
fn dominance_chain_on_random_p_vectors() {
    let mut rng = StdRng::seed_from_u64(0xd0d);
    for _ in 0..1000 {
        let h = random_hypotheses(&mut rng, 2, 9);
        let bonferroni = adjust_bonferroni(&h).apv;
        let holm = adjust_holm(&h).apv;
        let shaffer = adjust_shaffer(&h).unwrap().apv;
        let hochberg = adjust_hochberg(&h).apv;
        let holland = adjust_holland(&h).apv;
        let finner = adjust_finner(&h).apv;
        assert_dominates(&bonferroni, &holm, "bonferroni ≥ holm");
        assert_dominates(&holm, &shaffer, "holm ≥ shaffer");
        assert_dominates(&holm, &hochberg, "holm ≥ hochberg");
        assert_dominates(&holm, &holland, "holm ≥ holland");
        assert_dominates(&holland, &finner, "holland ≥ finner");
    }
}

#[test]
fn adjusted_values_are_valid_and_monotone() {
    let mut rng = StdRng::seed_from_u64(0x0a7);
    for _ in 0..300 {
        let h = random_hypotheses(&mut rng, 2, 7);
        let raw = h.raw_p();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        let bergmann = adjust_bergmann(&h, 10).unwrap().apv;
        let stepwise = [
            adjust_bonferroni(&h).apv,
            adjust_holm(&h).apv,
            adjust_holland(&h).apv,
            adjust_finner(&h).apv,
            adjust_hochberg(&h).apv,
            adjust_shaffer(&h).unwrap().apv,
        ];
        for apv in stepwise.iter().chain([&bergmann]) {
            for i in 0..raw.len() {
                assert!(apv[i] <= 1.0 && apv[i] + 1e-15 >= raw[i]);
            }
        }
        // Bergmann thresholds depend on which exhaustive sets contain a
        // hypothesis, so only the stepwise methods follow the raw order
        for apv in &stepwise {
            for w in order.windows(2) {
                assert!(apv[w[0]] <= apv[w[1]] + 1e-15, "{apv:?}");
            }
        }
        assert_eq!(adjust_nemenyi(&h).unwrap().apv, adjust_bonferroni(&h).apv);
    }
}

#[test]
fn bergmann_apvs_agree_with_acceptance_set_decisions() {
    let mut rng = StdRng::seed_from_u64(0xbe6);
    for _ in 0..400 {
        let h = random_hypotheses(&mut rng, 3, 6);
        let apv = adjust_bergmann(&h, 10).unwrap();
        for _ in 0..10 {
            let alpha = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.2) } else { 10f64.powf(rng.gen_range(-6.0..0.0)) };
            let direct = bergmann_rejections(&h, alpha, 10).unwrap();
            let from_apv: Vec<bool> = (0..h.k()).map(|i| apv.is_rejected(i, alpha)).collect();
            assert_eq!(direct, from_apv, "α = {alpha}, p = {:?}", h.raw_p());
        }
    }
}

#[test]
fn bergmann_is_no_more_conservative_than_shaffer() {
    let mut rng = StdRng::seed_from_u64(0x5af);
    for _ in 0..300 {
        let h = random_hypotheses(&mut rng, 3, 7);
        let bergmann = adjust_bergmann(&h, 10).unwrap().apv;
        let shaffer = adjust_shaffer(&h).unwrap().apv;
        assert_dominates(&shaffer, &bergmann, "shaffer ≥ bergmann");
    }
}
