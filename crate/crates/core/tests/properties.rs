use kmot::inference::{
    power_lower_bound, quantile, subsample_sizes, test_h0, BootstrapConfig, Method,
};
use kmot::limit::{
    alternative_directions, build_ub0, fixed_dual_objective, null_directions, rate,
    AlternativeLimitProgram, NullLimitProgram,
};
use kmot::mot::{normalize_dual, solve_mot, w2_squared, MotOptions, MotSolver, SolveMode};
use kmot::rng::{replicate_stream, tags};
use kmot::support::{multinomial_counts, Measure, MeasureCollection, SupportSpace};
use proptest::prelude::*;
use std::sync::Arc;

fn support_strategy(max_n: usize) -> impl Strategy<Value = Arc<SupportSpace>> {
    (2..=max_n, 1..=2usize).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-8i32..8, d), n).prop_filter_map("distinct points", |pts| {
            let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(|v| v as f64 / 2.0).collect()).collect();
            SupportSpace::new(pts).ok().map(Arc::new)
        })
    })
}

fn weights(n: usize, zeros: bool) -> impl Strategy<Value = Vec<f64>> {
    let lo = if zeros { 0u32 } else { 1 };
    prop::collection::vec(lo..20u32, n).prop_filter_map("positive mass", |raw| {
        let s: u32 = raw.iter().sum();
        (s > 0).then(|| raw.iter().map(|&v| v as f64 / s as f64).collect())
    })
}

fn collection(max_n: usize, k: std::ops::RangeInclusive<usize>, zeros: bool) -> impl Strategy<Value = MeasureCollection> {
    (support_strategy(max_n), k).prop_flat_map(move |(s, k)| {
        let n = s.len();
        prop::collection::vec(weights(n, zeros), k).prop_map(move |ws| {
            let ms = ws.into_iter().map(|w| Measure::new(s.clone(), w).unwrap()).collect();
            MeasureCollection::new(ms, vec![100; k]).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn value_is_symmetric_in_the_measures(data in collection(4, 2..=3, true), rot in 0usize..3) {
        let k = data.k();
        let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
        let a = solve_mot(&data).unwrap().value;
        let b = solve_mot(&data.permuted(&perm).unwrap()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn strong_duality_and_dual_feasibility(data in collection(4, 2..=3, true)) {
        let sol = solve_mot(&data).unwrap();
        prop_assert!(sol.value >= 0.0);
        prop_assert!((sol.dual.objective(&data) - sol.value).abs() < 1e-9);
        prop_assert!(sol.dual.max_violation(data.support()) < 1e-9);
        let coupling = sol.coupling.unwrap();
        prop_assert!(coupling.pi.iter().all(|&p| p >= -1e-12));
        prop_assert!((coupling.pi.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_measures_give_a_quarter_of_w2(data in collection(5, 2..=2, true)) {
        let mot = solve_mot(&data).unwrap().value;
        let w2 = w2_squared(data.measure(0), data.measure(1)).unwrap();
        prop_assert!((4.0 * mot - w2).abs() < 1e-9);
    }

    #[test]
    fn identical_measures_cost_nothing(data in collection(4, 2..=2, true), k in 2usize..=4) {
        let m = data.measure(0).clone();
        let same = MeasureCollection::without_sizes(vec![m; k]).unwrap();
        prop_assert!(solve_mot(&same).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn normalization_keeps_objective_and_feasibility(data in collection(4, 2..=3, true)) {
        let sol = solve_mot(&data).unwrap();
        let u = normalize_dual(&sol.dual);
        for b in &u.blocks[1..] {
            prop_assert_eq!(b[0], 0.0);
        }
        prop_assert!((u.objective(&data) - sol.value).abs() < 1e-9);
        prop_assert!(u.max_violation(data.support()) < 1e-9);
    }

    #[test]
    fn lazy_matches_dense(data in collection(4, 2..=3, true)) {
        let value = |mode| {
            let opts = MotOptions { mode, ..MotOptions::default() };
            MotSolver::new(data.support().clone(), data.k(), opts).unwrap().value(&data).unwrap()
        };
        prop_assert!((value(SolveMode::Dense) - value(SolveMode::Lazy)).abs() < 1e-8);
    }

    #[test]
    fn relaxed_null_dominates(data in collection(3, 3..=3, false), seed in 0u64..1000) {
        let s = data.support();
        let x0 = NullLimitProgram::new(s.clone(), 3).unwrap();
        let ub0 = build_ub0(s, 3).unwrap();
        let a = rate(data.sizes()).unwrap().a;
        let mut rng = replicate_stream(seed, tags::LIMIT, 0);
        let g = null_directions(data.measure(0).weights(), 3, &mut rng);
        prop_assert!(ub0.value(&g, &a).unwrap() >= x0.value(&g, &a).unwrap() - 1e-9);
    }

    #[test]
    fn fixed_dual_is_below_the_limit_program(data in collection(3, 2..=3, false), seed in 0u64..1000) {
        let sol = solve_mot(&data).unwrap();
        let program = AlternativeLimitProgram::new(&data, &sol).unwrap();
        let a = rate(data.sizes()).unwrap().a;
        let mut rng = replicate_stream(seed, tags::LIMIT, 1);
        let g = alternative_directions(&data, &mut rng);
        let full = program.value(&g, &a).unwrap();
        prop_assert!(fixed_dual_objective(&sol.dual, &g, &a) <= full + 1e-7);
    }

    #[test]
    fn null_draws_scale_with_the_square(data in collection(3, 2..=3, false), s in 0.5f64..3.0, seed in 0u64..100) {
        let k = data.k();
        let scaled = Arc::new(SupportSpace::new(
            data.support().points().iter().map(|p| p.iter().map(|v| v * s).collect()).collect(),
        ).unwrap());
        let a = rate(data.sizes()).unwrap().a;
        let w = data.measure(0).weights();
        let base = NullLimitProgram::new(data.support().clone(), k).unwrap();
        let big = NullLimitProgram::new(scaled, k).unwrap();
        let x = base.sample(w, &a, &mut replicate_stream(seed, tags::LIMIT, 2)).unwrap();
        let y = big.sample(w, &a, &mut replicate_stream(seed, tags::LIMIT, 2)).unwrap();
        prop_assert!((y - s * s * x).abs() <= 1e-7 * (1.0 + y.abs()));
    }

    #[test]
    fn multinomial_counts_are_consistent(w in weights(6, true), m in 0u64..500, seed in 0u64..100) {
        let mut rng = replicate_stream(seed, tags::SIMULATION, 0);
        let c = multinomial_counts(&w, m, &mut rng);
        prop_assert_eq!(c.iter().sum::<u64>(), m);
        for (ci, wi) in c.iter().zip(&w) {
            if *wi == 0.0 {
                prop_assert_eq!(*ci, 0);
            }
        }
    }

    #[test]
    fn quantiles_are_order_statistics(v in prop::collection::vec(-10.0f64..10.0, 1..60), q in 0.0f64..=1.0) {
        let x = quantile(&v, q).unwrap();
        prop_assert!(v.contains(&x));
        let below = v.iter().filter(|&&y| y <= x).count() as f64;
        prop_assert!(below >= q * v.len() as f64 - 1e-9);
    }

    #[test]
    fn power_bound_grows_with_n(c in 0.1f64..30.0, delta in 0.0f64..30.0, n in 1u64..5000) {
        let a = power_lower_bound(c, n, delta, 0.05).unwrap();
        let b = power_lower_bound(c, n + 1, delta, 0.05).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
    }

    #[test]
    fn subsample_sizes_stay_in_range(n in 1u64..100_000, p in 0.05f64..0.95) {
        let m = subsample_sizes(&[n], p)[0];
        prop_assert!(m >= 1 && m <= n);
    }
}

#[test]
fn test_results_are_reproducible() {
    let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 3.0]).unwrap());
    let data = MeasureCollection::new(
        vec![
            Measure::new(s.clone(), vec![0.5, 0.3, 0.2]).unwrap(),
            Measure::new(s.clone(), vec![0.3, 0.3, 0.4]).unwrap(),
            Measure::new(s, vec![0.4, 0.4, 0.2]).unwrap(),
        ],
        vec![60, 60, 60],
    )
    .unwrap();
    let cfg = BootstrapConfig { replicates: 80, seed: 17, ..BootstrapConfig::default() };
    for method in [Method::Derivative, Method::Ub0, Method::Mn] {
        let a = test_h0(&data, 0.05, method, &cfg).unwrap();
        let b = test_h0(&data, 0.05, method, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
