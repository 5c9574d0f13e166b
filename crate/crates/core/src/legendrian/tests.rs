use proptest::prelude::*;

use super::*;
use crate::knotpoly::{alexander_conway, alternating_hfk, signature, LaurentPolynomial};

fn front(s: &str) -> FrontDiagram {
    s.parse().unwrap()
}

fn inv(f: &FrontDiagram) -> (i64, i64) {
    let c = classical_invariants(f);
    (c.tb, c.rot)
}

const UNKNOT: &str = "open 0\nclose 0\n";
const TREFOIL: &str = "open 0\nopen 2\ncross 1\ncross 1\ncross 1\nclose 0\nclose 0\n";

macro_rules! fixture {
    ($name:literal) => {
        front(include_str!(concat!("../../../../fixtures/fronts/", $name)))
    };
}

#[test]
fn unknot_invariants() {
    let u = front(UNKNOT);
    assert_eq!(inv(&u), (-1, 0));
    assert_eq!(inv(&u.reverse()), (-1, 0));
    assert!(detect_destabilizable(&u).is_none());
    assert_eq!(u.to_link_diagram().unwrap().components(), 1);
}

#[test]
fn max_tb_trefoil_is_right_handed() {
    let t = front(TREFOIL);
    assert_eq!(inv(&t), (1, 0));
    let d = t.to_link_diagram().unwrap();
    assert_eq!(d.writhe(), t.writhe());
    assert_eq!(alexander_conway(&d).unwrap(), LaurentPolynomial::from_coeffs(-1, &[1, -1, 1]));
    assert_eq!(signature(&d).unwrap(), -2);
}

#[test]
fn stabilization_deltas() {
    let u = front(UNKNOT);
    let p = u.stabilize(StabSign::Plus);
    assert_eq!(inv(&p), (-2, 1));
    assert_eq!(inv(&p.stabilize(StabSign::Minus)), (-3, 0));
    assert_eq!(inv(&u.stabilize(StabSign::Minus)), (-2, -1));
    // reversing S₊(L) gives S₋ of the reversed knot
    assert_eq!(inv(&p.reverse()), inv(&u.reverse().stabilize(StabSign::Minus)));
}

#[test]
fn zigzag_detection_and_removal() {
    let u = front(UNKNOT);
    let p = u.stabilize(StabSign::Plus);
    let w = detect_destabilizable(&p).unwrap();
    assert_eq!(w.sign, StabSign::Plus);
    assert_eq!(inv(&p.destabilize(&w).unwrap()), (-1, 0));
    let r = p.reverse();
    assert_eq!(detect_destabilizable(&r).unwrap().sign, StabSign::Minus);
    let m = u.stabilize(StabSign::Minus);
    assert_eq!(detect_destabilizable(&m).unwrap().sign, StabSign::Minus);
    assert!(p.destabilize(&ZigzagWitness { at: 0, sign: StabSign::Plus, reversed: false }).is_err());
}

#[test]
fn gradings() {
    let g = loss_gradings(ClassicalInvariants { tb: -1, rot: 0 });
    assert_eq!((g.alexander(), g.maslov()), (Some(0), Some(0)));
    let g = loss_gradings(ClassicalInvariants { tb: -4, rot: -1 });
    assert_eq!((g.alexander(), g.maslov()), (Some(-1), Some(-2)));
    let g = loss_gradings(ClassicalInvariants { tb: -4, rot: 1 });
    assert_eq!((g.alexander(), g.maslov()), (Some(-2), Some(-4)));
    let g = loss_gradings(ClassicalInvariants { tb: -2, rot: 0 });
    assert_eq!(g.alexander(), None);
    assert_eq!(g.to_string(), "(A, M) = (-1/2, -1)");
    assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"alexander":-0.5,"maslov":-1}"#);
}

#[test]
fn unknot_report_is_inconclusive() {
    let mut table = BigradedRanks::new();
    table.add(0, 0, 1);
    let c = loss_vanishing_report(&front(UNKNOT), &table);
    assert_eq!(c.verdict, Verdict::Inconclusive);
    assert_eq!(c.rank_at_gradings, Some(1));
    assert_eq!(c.to_string(), "INCONCLUSIVE");
}

#[test]
fn stabilized_unknot_report() {
    let mut table = BigradedRanks::new();
    table.add(0, 0, 1);
    let f = front(UNKNOT).stabilize(StabSign::Minus);
    // S₋ read backwards is S₊
    let c = loss_vanishing_report(&f, &table);
    assert_eq!(c.verdict, Verdict::Vanishes);
    assert_eq!(c.reason(), Some(LossReason::PositiveStabilization));
    assert!(c.witness.unwrap().reversed);
}

#[test]
fn twist_fronts() {
    // (fixture, twist parameter n, knot Δ)
    for (f, n) in [(fixture!("twist2.front"), -2), (fixture!("twist4.front"), -4)] {
        assert_eq!(inv(&f), (-4, 1));
        assert!(f.zigzags().is_empty() && f.reverse().zigzags().is_empty());
        let d = f.to_link_diagram().unwrap();
        let delta = alexander_conway(&d).unwrap();
        assert_eq!(delta, LaurentPolynomial::from_coeffs(-1, &[n / 2, 1 - n, n / 2]));
        let table = alternating_hfk(&delta, signature(&d.mirror()).unwrap()).unwrap();
        let c = loss_vanishing_report(&f, &table);
        assert_eq!(c.reasons, vec![LossReason::ZeroGroup]);
    }
    let l0 = fixture!("twist0.front");
    assert_eq!(inv(&l0), (-4, 1));
    let d = l0.to_link_diagram().unwrap();
    assert_eq!(alexander_conway(&d).unwrap(), LaurentPolynomial::one());
    let c = loss_vanishing_report(&l0, &alternating_hfk(&LaurentPolynomial::one(), 0).unwrap());
    assert_eq!(c.reason(), Some(LossReason::PositiveStabilization));
}

#[test]
fn shark_destabilizes() {
    let s = fixture!("shark.front");
    assert_eq!(inv(&s), (-2, 1));
    let w = detect_destabilizable(&s).unwrap();
    assert_eq!(w.sign, StabSign::Plus);
    let (tb, rot) = inv(&s.destabilize(&w).unwrap());
    assert_eq!((tb, rot.abs()), (-1, 0));
}

#[test]
fn front_moves_preserve_invariants() {
    // a strand passing a left cusp and a right cusp (two crossings each), a
    // triple point, sliding cusps past each other, and far commutation
    let pairs = [
        ("open 0\nopen 1\nclose 2\nclose 0\n", "open 0\nopen 0\ncross 1\ncross 0\nclose 2\nclose 0\n"),
        (
            "open 0\nopen 2\ncross 1\ncross 1\ncross 1\nclose 2\nclose 0\n",
            "open 0\nopen 2\ncross 1\ncross 1\ncross 1\ncross 1\ncross 2\nclose 1\nclose 0\n",
        ),
        (TREFOIL, "open 0\nopen 2\ncross 1\ncross 1\ncross 1\nclose 2\nclose 0\n"),
        (
            "open 0\nopen 2\ncross 0\ncross 1\ncross 0\ncross 2\nclose 0\nclose 0\n",
            "open 0\nopen 2\ncross 1\ncross 0\ncross 1\ncross 2\nclose 0\nclose 0\n",
        ),
        (
            "open 0\nopen 2\ncross 0\ncross 2\ncross 1\nclose 0\nclose 0\n",
            "open 0\nopen 2\ncross 2\ncross 0\ncross 1\nclose 0\nclose 0\n",
        ),
    ];
    for (a, b) in pairs {
        let (fa, fb) = (front(a), front(b));
        assert_eq!(inv(&fa), inv(&fb), "{a} vs {b}");
        let (da, db) = (fa.to_link_diagram().unwrap(), fb.to_link_diagram().unwrap());
        assert_eq!(alexander_conway(&da).unwrap(), alexander_conway(&db).unwrap());
    }
}

#[test]
fn malformed_fronts() {
    for bad in [
        "",
        "close 0\n",
        "open 0\ncross 1\nclose 0\n",
        "open 0\nopen 2\nclose 0\nclose 0\n",
        "open 0\nclose 0\nopen 0\nclose 0\n",
        "open 0\n",
        "open 0\nturn 1\nclose 0\n",
        "open x\nclose 0\n",
        "open 0 1\nclose 0\n",
    ] {
        assert!(bad.parse::<FrontDiagram>().is_err(), "{bad:?}");
    }
    let f = front("# a comment\nopen 0   # the only cusp pair\n\nreverse\nclose 0\n");
    assert!(f.is_reversed());
    assert_eq!(front(&f.to_text()), f);
}

fn plat_strategy() -> impl Strategy<Value = FrontDiagram> {
    (1usize..=3)
        .prop_flat_map(|k| {
            let opens = (0..k).map(|j| 0..=2 * j).collect::<Vec<_>>();
            let closes = (1..=k).rev().map(|j| 0..2 * j - 1).collect::<Vec<_>>();
            let word = proptest::collection::vec(0..(2 * k).max(2) - 1, 0..8);
            (opens, word, closes)
        })
        .prop_filter_map("one component", |(o, w, c)| {
            let mut ev: Vec<FrontEvent> = o.into_iter().map(FrontEvent::Open).collect();
            ev.extend(w.into_iter().map(FrontEvent::Cross));
            ev.extend(c.into_iter().map(FrontEvent::Close));
            FrontDiagram::new(ev).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stabilize_shifts_invariants(f in plat_strategy(), plus: bool, rev: bool) {
        let f = f.with_orientation(rev);
        let sign = if plus { StabSign::Plus } else { StabSign::Minus };
        let (tb, rot) = inv(&f);
        let s = f.stabilize(sign);
        prop_assert_eq!(inv(&s), (tb - 1, if plus { rot + 1 } else { rot - 1 }));
        let w = detect_destabilizable(&s).unwrap();
        prop_assert_eq!(inv(&s.destabilize(&w).unwrap()).0, tb);
    }

    #[test]
    fn orientation_and_pd(f in plat_strategy()) {
        let (tb, rot) = inv(&f);
        prop_assert_eq!(inv(&f.reverse()), (tb, -rot));
        let d = f.to_link_diagram().unwrap();
        prop_assert_eq!(d.writhe() - f.cusps() as i64 / 2, tb);
        prop_assert_eq!((tb + rot).rem_euclid(2), 1);
        let g = loss_gradings(classical_invariants(&f));
        prop_assert_eq!(g.twice_maslov - 2 * g.twice_alexander, 0);
    }

    #[test]
    fn text_round_trip(f in plat_strategy(), rev: bool) {
        let f = f.with_orientation(rev);
        prop_assert_eq!(f.to_text().parse::<FrontDiagram>().unwrap(), f);
    }
}
