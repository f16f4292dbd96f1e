use robsense::pnc::{self, FeasibleSolution};
use robsense::srobust::{self, backup_family, build_sensor_cover, tip_alternatives};
use robsense::{Counters, Mode, StateDigraph, VertexSet};

fn load(name: &str) -> StateDigraph {
    let path = format!("{}/../../fixtures/{name}.sdg", env!("CARGO_MANIFEST_DIR"));
    StateDigraph::parse_edge_list(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

#[test]
fn fig5_seed_and_backups() {
    let g = load("fig5");
    let f = pnc::minimal_feasible(&g);
    assert_eq!(f.all(), set(&[8, 10]));
    assert_eq!(f.tips, set(&[8, 10]));
    let fam = backup_family(&g, &f, &Counters::new()).unwrap();
    assert_eq!(fam.per_index[0], vec![set(&[1])]);
    let inst = build_sensor_cover(10, &fam);
    assert_eq!(inst.sets[&1], set(&[1, 2]));
    for mode in [Mode::Exact, Mode::Greedy] {
        let (s, _) = srobust::srobust_solution(&g, mode, &Counters::new()).unwrap();
        assert_eq!(s, set(&[1, 8, 10]));
    }
}

#[test]
fn fig1_alternatives() {
    let g = load("fig1");
    let ctr = Counters::new();
    let f1 = set(&[1, 5, 8]);
    for t in [1, 5, 8] {
        assert_eq!(tip_alternatives(&g, &f1, t, &ctr).unwrap(), set(&[2, 6, 9]));
    }
    let f2 = set(&[2, 6, 9]);
    let seed = FeasibleSolution::from_set(&g, &f2).unwrap();
    assert_eq!(seed.tips, f2);
    let fam = backup_family(&g, &seed, &ctr).unwrap();
    assert_eq!(fam.per_index, vec![vec![set(&[1]), set(&[5])], vec![set(&[5]), set(&[8])], vec![set(&[1]), set(&[8])]]);
    let inst = build_sensor_cover(9, &fam);
    assert_eq!(inst.sets[&1], set(&[1, 3]));
    assert_eq!(inst.sets[&5], set(&[1, 2]));
    assert_eq!(inst.sets[&8], set(&[2, 3]));
    let j15 = srobust::z_index(9, 1, Some(5)).unwrap();
    assert!(!inst.sets.contains_key(&j15));
}

#[test]
fn fig1_sizes_by_seed() {
    let g = load("fig1");
    for (seed, size) in [(set(&[1, 5, 8]), 4), (set(&[2, 6, 9]), 5)] {
        let s = FeasibleSolution::from_set(&g, &seed).unwrap();
        let (sol, _) = srobust::srobust_from_seed(&g, &s, Mode::Exact, &Counters::new()).unwrap();
        assert_eq!(sol.len(), size, "seed {seed:?} gave {sol:?}");
        assert!(srobust::is_srobust(&g, &sol));
    }
}

#[test]
fn fig2_sink_alternative() {
    let g = load("fig2");
    let scc = g.scc_decompose();
    assert_eq!(srobust::sink_alternatives(&scc, 1).unwrap(), set(&[5]));
    assert!(srobust::sink_alternatives(&scc, 2).is_err());
}
