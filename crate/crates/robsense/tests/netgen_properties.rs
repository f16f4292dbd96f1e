use proptest::prelude::*;
use robsense::lrobust;
use robsense::netgen::{generate, GenSpec, Model};
use robsense::oracle;
use robsense::{Counters, Mode};

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|p| Model::Er { p }),
        (0.0f64..=1.0).prop_map(|beta| Model::SmallWorld { k: 4, beta }),
        (1usize..=4).prop_map(|d| Model::ScaleFree { d }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generation_is_deterministic(m in model(), n in 6usize..60, seed in any::<u64>()) {
        let spec = GenSpec::new(m, n, seed);
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn scale_free_degrees(d in 1usize..=4, n in 6usize..80, seed in any::<u64>()) {
        let spec = GenSpec { direct_fraction: 0.0, ..GenSpec::new(Model::ScaleFree { d }, n, seed) };
        let g = generate(&spec).unwrap();
        for v in d + 2..=n {
            prop_assert!(g.successors(v).count() >= d);
        }
        prop_assert!(g.edges().all(|(u, v)| u != v));
    }

    #[test]
    fn switch_count_is_floor(m in model(), n in 6usize..60, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        prop_assume!(!matches!(m, Model::Er { .. }));
        let g = generate(&GenSpec { direct_fraction: frac, ..GenSpec::new(m, n, seed) }).unwrap();
        let pairs = g.undirected_pairs().len();
        let single = g.edge_count() - 2 * pairs;
        prop_assert_eq!(single, (frac * (pairs + single) as f64).floor() as usize);
    }

    #[test]
    fn undirected_solutions_survive(d in 1usize..=3, n in 5usize..=15, seed in any::<u64>()) {
        let g = generate(&GenSpec::new(Model::ScaleFree { d }, n, seed)).unwrap();
        for mode in [Mode::Greedy, Mode::Exact] {
            let (s, _) = lrobust::lrobust_solution(&g, mode, true, &Counters::new()).unwrap();
            prop_assert!(oracle::survives_link_loss(&g, &s, true));
        }
    }
}
