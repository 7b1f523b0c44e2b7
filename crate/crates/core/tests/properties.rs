use proptest::prelude::*;
use rankcollide::conditions::*;
use rankcollide::model::{gaps, rank_permutation, ranked_values, RankingPermutation};
use rankcollide::simulate::{simulate_path, SimConfig, TrackedWindow};
use rankcollide::FiniteSystemSpec;

fn positions() -> impl Strategy<Value = Vec<f64>> {
    // small integer grid so ties are frequent
    prop::collection::vec((-4i32..4).prop_map(|v| v as f64 * 0.25), 1..9)
}

fn diffusions(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-1.0f64..1.0).prop_map(|e| 10f64.powf(e)), min..=max)
}

proptest! {
    #[test]
    fn ranking_satisfies_order_and_tie_rule(x in positions()) {
        let p = rank_permutation(&x).unwrap();
        let names = p.names();
        let mut seen = vec![false; x.len()];
        for &i in names { seen[i] = true; }
        prop_assert!(seen.iter().all(|s| *s));
        for w in names.windows(2) {
            prop_assert!(x[w[0]] <= x[w[1]]);
            if x[w[0]] == x[w[1]] { prop_assert!(w[0] < w[1]); }
        }
        let mut incremental = RankingPermutation::identity(x.len());
        incremental.rerank(&x);
        prop_assert_eq!(&incremental, &p);
    }

    #[test]
    fn ranked_values_ignore_input_order(x in positions(), seed in any::<u64>()) {
        let mut shuffled = x.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let a = ranked_values(&x).unwrap();
        let b = ranked_values(&shuffled).unwrap();
        prop_assert_eq!(&a.y, &b.y);
        if len >= 2 {
            prop_assert!(gaps(&a).unwrap().iter().all(|g| *g >= 0.0));
        }
    }

    #[test]
    fn sphere_max_bounds_and_symmetry(d in diffusions(2, 8)) {
        let top = sphere_max(&d).unwrap();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= top && top <= hi);
        if d.len() == 2 {
            prop_assert!((top - (d[0] + d[1]) / 2.0).abs() <= 1e-12);
        }
        let mut rev = d.clone();
        rev.reverse();
        rev.rotate_left(1);
        prop_assert!((sphere_max(&rev).unwrap() - top).abs() <= 1e-12 * hi);
    }

    #[test]
    fn verdicts_are_scale_invariant(d in diffusions(4, 8), c in 0.01f64..100.0) {
        let scaled: Vec<f64> = d.iter().map(|v| v * c).collect();
        let pairs = vec![
            (sphere_total_check(&d, None).unwrap(), sphere_total_check(&scaled, None).unwrap()),
            (sum_total_check(&d, None).unwrap(), sum_total_check(&scaled, None).unwrap()),
            (ratio_total_check(&d, None).unwrap(), ratio_total_check(&scaled, None).unwrap()),
            (concavity(&d, None).unwrap(), concavity(&scaled, None).unwrap()),
            (ntuple_ratio_check(&d, 4, None).unwrap(), ntuple_ratio_check(&scaled, 4, None).unwrap()),
            (
                no_ntuple_check(&d, 4, TotalCriterion::Sphere, None).unwrap(),
                no_ntuple_check(&scaled, 4, TotalCriterion::Sphere, None).unwrap(),
            ),
        ];
        let hi = d.iter().copied().fold(0.0, f64::max);
        for (a, b) in pairs {
            prop_assert!((b.margin - c * a.margin).abs() <= 1e-9 * c * hi);
            if a.margin.abs() > 1e-9 * hi {
                prop_assert_eq!(a.holds, b.holds);
            }
        }
    }

    #[test]
    fn ntuple_ratio_is_monotone_in_n(d in diffusions(5, 10)) {
        for n in 4..d.len() {
            let a = ntuple_ratio_check(&d, n, None).unwrap();
            let b = ntuple_ratio_check(&d, n + 1, None).unwrap();
            prop_assert!(b.margin >= a.margin);
            prop_assert!(!a.holds || b.holds);
        }
    }

    #[test]
    fn full_rank_block_is_the_single_window(d in diffusions(2, 7)) {
        for c in [TotalCriterion::Sphere, TotalCriterion::Sum, TotalCriterion::Ratio] {
            let all = no_ntuple_check(&d, d.len(), c, None).unwrap();
            let w = window_total_check(&d, WindowPair::new(1, d.len(), d.len()).unwrap(), c, None).unwrap();
            prop_assert_eq!(all.holds, w.holds);
            prop_assert_eq!(all.margin, w.margin);
        }
    }

    #[test]
    fn holds_agrees_with_margin_and_sense(d in diffusions(4, 6)) {
        let mut reports = four_particle_report(&d[..4]).unwrap();
        reports.push(no_ntuple_check(&d, 3, TotalCriterion::Ratio, None).unwrap());
        reports.push(concavity(&d, None).unwrap());
        for r in reports {
            let expect = if r.strict { r.margin > 0.0 } else { r.margin >= 0.0 };
            prop_assert_eq!(r.holds, expect);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn proximity_counts_grow_with_epsilon(seed in any::<u64>(), path in 0u64..1000) {
        let spec = FiniteSystemSpec { n: 4, g: vec![0.5, 0.0, 0.0, -0.5], sigma2: vec![1.0, 0.3, 0.3, 1.0], x0: vec![0.0, 0.1, 0.2, 0.3] };
        let cfg = SimConfig::new(0.5, 1e-2, 1, seed)
            .with_epsilons(vec![1e-3, 1e-2, 5e-2, 1e-1, 0.5])
            .with_windows(vec![TrackedWindow { k: 1, n: 2 }, TrackedWindow { k: 2, n: 3 }, TrackedWindow { k: 1, n: 4 }]);
        let stats = simulate_path(&spec, &cfg, path).unwrap();
        prop_assert!(stats.min_gap >= 0.0);
        for (w, counts) in stats.proximity_counts.iter().enumerate() {
            prop_assert!(stats.min_spread[w] >= 0.0);
            prop_assert!(counts.windows(2).all(|c| c[0] <= c[1]));
            prop_assert!(*counts.last().unwrap() <= stats.steps as u64);
        }
    }
}
