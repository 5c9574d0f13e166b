use proptest::prelude::*;

use super::*;
use crate::gf2::homology;
use crate::knotpoly::{alexander_conway, alternating_hfk, signature, LaurentPolynomial};

macro_rules! grid {
    ($path:literal) => {
        serde_json::from_str::<GridDiagram>(include_str!(concat!("../../../../fixtures/", $path))).unwrap()
    };
}

fn fixtures() -> Vec<(&'static str, GridDiagram)> {
    vec![
        ("unknot2", grid!("unknot2.json")),
        ("trefoil", grid!("grids/trefoil.json")),
        ("figure_eight", grid!("grids/figure_eight.json")),
        ("five_two", grid!("grids/five_two.json")),
        ("torus_2_5", grid!("grids/torus_2_5.json")),
        ("twist4", grid!("grids/twist4.json")),
    ]
}

fn table(entries: &[(i64, i64, usize)]) -> BigradedRanks {
    let mut r = BigradedRanks::new();
    for &(a, m, k) in entries {
        r.add(a, m, k);
    }
    r
}

#[test]
fn two_by_two_unknot() {
    let g = grid!("unknot2.json");
    let id = GridState(vec![0, 1]);
    let swap = GridState(vec![1, 0]);
    assert_eq!((g.alexander(&id).unwrap(), g.maslov(&id)), (-1, -1));
    assert_eq!((g.alexander(&swap).unwrap(), g.maslov(&swap)), (0, 0));
    let (c, alex) = tilde_complex(&g).unwrap();
    assert_eq!(c.dim(), 2);
    assert_eq!(alex.len(), 2);
    assert_eq!(homology(&c).values().sum::<usize>(), 2);
    assert_eq!(hfk_hat(&g).unwrap(), table(&[(0, 0, 1)]));
}

#[test]
fn gradings_agree_with_fast_path() {
    for (_, g) in fixtures().into_iter().take(4) {
        let cx = GridComplex::build(&g, 8).unwrap();
        for i in (0..cx.len()).step_by(7) {
            let s = GridState(perm_unrank(g.n(), i));
            assert_eq!(g.maslov(&s), cx.maslov[i] as i64);
            assert_eq!(g.alexander(&s).unwrap(), cx.alexander[i] as i64);
        }
    }
}

#[test]
fn translation_keeps_gradings() {
    let g = grid!("grids/figure_eight.json");
    let n = g.n();
    let s = GridState(vec![3, 0, 4, 1, 5, 2]);
    for (dc, dr) in [(1, 0), (0, 1), (2, 5), (5, 3)] {
        let h = g.translate(dc, dr);
        let mut t = vec![0; n];
        for c in 0..n {
            t[(c + dc) % n] = (s.0[c] + dr) % n;
        }
        let t = GridState(t);
        assert_eq!(h.maslov(&t), g.maslov(&s), "shift ({dc}, {dr})");
        assert_eq!(h.alexander(&t).unwrap(), g.alexander(&s).unwrap());
    }
}

#[test]
fn trefoil_tilde_rank_and_table() {
    let g = grid!("grids/trefoil.json");
    let cx = GridComplex::build(&g, 8).unwrap();
    assert_eq!(cx.homology().total(), 48);
    let d = g.to_link_diagram().unwrap();
    let delta = alexander_conway(&d).unwrap();
    assert_eq!(delta, LaurentPolynomial::from_coeffs(-1, &[1, -1, 1]));
    let h = hfk_hat(&g).unwrap();
    assert_eq!(h, alternating_hfk(&delta, signature(&d).unwrap()).unwrap());
    let (c, _) = tilde_complex(&g).unwrap();
    assert_eq!(homology(&c).values().sum::<usize>(), 48);
}

#[test]
fn figure_eight() {
    let h = hfk_hat(&grid!("grids/figure_eight.json")).unwrap();
    assert_eq!(h, table(&[(1, 1, 1), (0, 0, 3), (-1, -1, 1)]));
    assert_eq!(h.max_alexander(), Some(1));
}

#[test]
fn alternating_fixtures_match_formula() {
    for (name, g) in fixtures() {
        let d = g.to_link_diagram().unwrap();
        let delta = alexander_conway(&d).unwrap();
        let h = hfk_hat(&g).unwrap();
        assert_eq!(h.euler(), delta, "{name}");
        assert!(h.is_knot_symmetric(), "{name}");
        // all fixture knots are alternating
        assert_eq!(h, alternating_hfk(&delta, signature(&d).unwrap()).unwrap(), "{name}");
    }
}

#[test]
fn differential_squares_to_zero() {
    for (name, g) in fixtures() {
        assert!(GridComplex::build(&g, 8).unwrap().d_squared_is_zero(), "{name}");
    }
}

#[test]
fn invariance_under_symmetries() {
    let g = grid!("grids/five_two.json");
    let h = hfk_hat(&g).unwrap();
    assert_eq!(hfk_hat(&g.translate(3, 5)).unwrap(), h);
    assert_eq!(hfk_hat(&g.reverse()).unwrap(), h);
    assert_eq!(hfk_hat(&g.mirror()).unwrap(), h.mirror());
}

#[test]
fn connected_sums() {
    let u = grid!("unknot2.json");
    let t = grid!("grids/trefoil.json");
    let uu = grid_connected_sum(&u, &u);
    assert_eq!(uu.n(), 4);
    assert_eq!(hfk_hat(&uu).unwrap(), table(&[(0, 0, 1)]));
    let tu = grid_connected_sum(&t, &u);
    assert_eq!(hfk_hat(&tu).unwrap(), hfk_hat(&t).unwrap());
    let ut = grid_connected_sum(&u, &t);
    assert_eq!(hfk_hat(&ut).unwrap(), hfk_hat(&t).unwrap());
    let tt = grid_connected_sum(&t, &t);
    let d = tt.to_link_diagram().unwrap();
    let delta = alexander_conway(&d).unwrap();
    assert_eq!(delta, LaurentPolynomial::from_coeffs(-1, &[1, -1, 1]).pow(2));
    // this grid trefoil is left-handed
    let st = signature(&t.to_link_diagram().unwrap()).unwrap();
    assert_eq!(st, 2);
    assert_eq!(signature(&d).unwrap(), 2 * st);
}

#[test]
fn errors() {
    let hopf = grid!("grids/hopf.json");
    assert_eq!(hopf.components(), 2);
    assert_eq!(hfk_hat(&hopf), Err(GridError::NotAKnot { components: 2 }));
    assert!(hopf.to_link_diagram().is_err());
    let big = GridDiagram::new((1..=9).chain([0]).collect(), (0..10).collect()).unwrap();
    assert_eq!(big.components(), 1);
    assert_eq!(hfk_hat_bounded(&big, 8), Err(GridError::SizeLimit { n: 10, max: 8 }));
    assert!(GridDiagram::new(vec![0, 1], vec![0, 1]).is_err());
    assert!(GridDiagram::new(vec![0, 0], vec![1, 1]).is_err());
    assert!(serde_json::from_str::<GridDiagram>(r#"{"n": 3, "X": [1, 0], "O": [0, 1]}"#).is_err());
    assert!(matches!(
        divide_out_v(&table(&[(0, 0, 1)]), 2),
        Err(GridError::DivisionNotExact(_))
    ));
}

#[test]
fn state_ranking() {
    for n in 1..=6 {
        for r in 0..(1..=n).product::<usize>() {
            assert_eq!(perm_rank(&perm_unrank(n, r)), r);
        }
    }
    assert_eq!(perm_unrank(3, 0), vec![0, 1, 2]);
    assert_eq!(perm_unrank(3, 5), vec![2, 1, 0]);
    assert_eq!(GridState(vec![2, 0, 1, 4, 3]).id(), "20143");
}

fn knot_grid(max_n: usize) -> impl Strategy<Value = GridDiagram> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
            (perm.clone(), perm)
        })
        .prop_filter_map("a knot grid", |(x, o)| GridDiagram::new(x, o).ok().filter(|g| g.components() == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_grids_match_knot_polynomials(g in knot_grid(6)) {
        let cx = GridComplex::build(&g, 8).unwrap();
        prop_assert!(cx.d_squared_is_zero());
        let h = divide_out_v(&cx.homology(), g.n()).unwrap();
        prop_assert!(h.is_knot_symmetric());
        let d = g.to_link_diagram().unwrap();
        prop_assert_eq!(h.euler(), alexander_conway(&d).unwrap());
        // the top Alexander grading is the genus, which bounds |σ|/2
        let top = h.max_alexander().unwrap();
        prop_assert!(signature(&d).unwrap().abs() <= 2 * top);
    }
}
