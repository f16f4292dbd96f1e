use robsense::oracle::{link_gadget, sensor_gadget};
use robsense::pnc::{self, min_pnc};
use robsense::{StateDigraph, VertexSet};

fn load(name: &str) -> StateDigraph {
    let path = format!("{}/../../fixtures/{name}.sdg", env!("CARGO_MANIFEST_DIR"));
    StateDigraph::parse_edge_list(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

#[test]
fn fig5_decomposition_has_loop_cycle() {
    let d = min_pnc(&load("fig5"));
    assert_eq!(d.paths, vec![vec![6, 2, 8], vec![9, 3, 1, 5, 7, 10]]);
    assert_eq!(d.cycles, vec![vec![4]]);
    assert_eq!(d.tips, set(&[8, 10]));
}

#[test]
fn decomposition_tips_agree_with_placement() {
    for name in ["fig1", "fig2", "fig3", "fig4", "fig5", "fig8_p2k2", "fig9_p2k2"] {
        let g = load(name);
        let d = min_pnc(&g);
        assert_eq!(d.tips, pnc::minimal_feasible(&g).tips, "{name}");
        let covered: usize = d.paths.iter().chain(&d.cycles).map(Vec::len).sum();
        assert_eq!(covered, g.n(), "{name}");
    }
}

#[test]
fn gadget_fixtures_match_constructors() {
    let sets = [set(&[1]), set(&[1, 2])];
    let s = sensor_gadget(2, &sets).unwrap();
    let l = link_gadget(2, &sets).unwrap();
    assert_eq!(load("fig8_p2k2").edges().collect::<Vec<_>>(), s.edges().collect::<Vec<_>>());
    assert_eq!(load("fig9_p2k2").edges().collect::<Vec<_>>(), l.edges().collect::<Vec<_>>());
    assert_eq!(s.n(), 8);
    assert_eq!(l.n(), 10);
    assert_eq!(s.scc_decompose().sinks.len(), 1);
    assert_eq!(l.scc_decompose().sinks.len(), 2);
}
