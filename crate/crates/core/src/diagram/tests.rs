use super::twist::{block_triangularity_check, dehn_twist, dehn_twist_beta1, DeltaCurve, TwistSign};
use super::*;
use crate::gf2::total_rank;

macro_rules! fixture {
    ($name:literal) => {
        include_str!(concat!("../../../../fixtures/diagrams/", $name))
    };
}

fn load(src: &str) -> CombinatorialDiagram {
    serde_json::from_str(src).expect("fixture loads")
}

fn knot() -> CombinatorialDiagram {
    load(fixture!("knot_genus1_fh.json"))
}

fn finger() -> CombinatorialDiagram {
    load(fixture!("s3_finger.json"))
}

fn s3() -> CombinatorialDiagram {
    load(fixture!("s3_genus1.json"))
}

fn delta(src: &str) -> DeltaCurve {
    serde_json::from_str(src).expect("delta loads")
}

fn region(d: &CombinatorialDiagram, name: &str) -> usize {
    d.region_index(&RegionRef::Name(name.into())).unwrap()
}

#[test]
fn fixtures_validate() {
    for src in [
        fixture!("knot_genus1_fh.json"),
        fixture!("s2xs1_parallel.json"),
        fixture!("s3_genus1.json"),
        fixture!("s3_finger.json"),
    ] {
        let d = load(src);
        let again: CombinatorialDiagram = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(again, d);
    }
}

#[test]
fn rejects_broken_cell_structures() {
    let good: serde_json::Value = serde_json::from_str(fixture!("s3_finger.json")).unwrap();

    let mut v = good.clone();
    v["regions"][0]["boundary"] = serde_json::json!([["a0", 0, 1], ["b0", 1, -1]]);
    assert!(serde_json::from_value::<CombinatorialDiagram>(v).is_err());

    let mut v = good.clone();
    v["genus"] = serde_json::json!(2);
    let err = serde_json::from_value::<CombinatorialDiagram>(v).unwrap_err().to_string();
    assert!(err.contains("curves"), "{err}");

    let mut v = good.clone();
    v["z"] = serde_json::json!("nowhere");
    let err = serde_json::from_value::<CombinatorialDiagram>(v).unwrap_err().to_string();
    assert!(err.contains("unknown region"), "{err}");

    let mut v = good;
    v["points"][1]["beta"] = serde_json::json!(3);
    assert!(serde_json::from_value::<CombinatorialDiagram>(v).is_err());
}

#[test]
fn bigon_misses_z() {
    let d = finger();
    let mut m = Domain::zero(3);
    m.multiplicities[region(&d, "U")] = 1;
    assert_eq!(d.n_z(&m), 0);
    assert_eq!(d.point_multiplicity(&m, &RegionRef::Name("U".into())).unwrap(), 1);
    assert_eq!(d.point_multiplicity(&m, &RegionRef::Name("O".into())).unwrap(), 0);
    assert!(d.point_multiplicity(&m, &RegionRef::Name("nope".into())).is_err());
    let (x, y) = (Generator(vec![0]), Generator(vec![1]));
    assert!(d.connects(&m, &x, &y));
    assert_eq!(d.maslov_index_x4(&m, &x, &y), 4);
}

#[test]
fn finger_move_homology_is_one() {
    let d = finger();
    let c = d.nice_differential(Flavor::Hat, None).unwrap();
    assert_eq!(c.discs.len(), 2);
    assert_eq!(total_rank(&c.complex), 1);
    let g = |id: &str| c.complex.basis().grading(c.complex.basis().position(id).unwrap());
    assert_eq!(g("p0"), g("p2"));
    assert_eq!(g("p0"), g("p1") + 1);
}

#[test]
fn knot_fixture() {
    let d = knot();
    let c = d.nice_differential(Flavor::KnotHat, None).unwrap();
    assert_eq!(c.complex.dim(), 2);
    assert_eq!(total_rank(&c.complex), 0);
    assert!(matches!(
        d.nice_differential(Flavor::Hat, None),
        Err(DiagramError::NotNice { components: 2, .. })
    ));

    let p = d.periodic_domains();
    assert_eq!(p.len(), 1);
    let mut expect = vec![0; 3];
    expect[region(&d, "B2")] = 2;
    expect[region(&d, "A")] = 1;
    assert!(p[0].multiplicities == expect || p[0].multiplicities.iter().map(|x| -x).collect::<Vec<_>>() == expect);
    assert_eq!(d.n_w(&p[0]).abs(), 1);

    let weak = d.check_admissibility(AdmissibilityMode::WeakAllSpinc);
    assert!(!weak.admissible);
    assert_eq!(weak.witness.unwrap().multiplicities, expect);
    let ext = d.check_admissibility(AdmissibilityMode::ExtremelyWeakConservative);
    assert!(ext.admissible && ext.witness.is_none());
}

#[test]
fn parallel_curves() {
    let d = load(fixture!("s2xs1_parallel.json"));
    assert!(d.generators().is_empty());
    let p = d.periodic_domains();
    assert_eq!(p.len(), 1);
    let a = d.check_admissibility(AdmissibilityMode::WeakAllSpinc);
    assert!(!a.admissible);
    assert_eq!(a.witness.unwrap().multiplicities[region(&d, "R2")], 1);
}

/// Brute force over every 0/1/2 multiplicity vector, using only the
/// definitions of `connects` and the index.
fn brute_discs(d: &CombinatorialDiagram, flavor: Flavor) -> Vec<(Generator, Generator, Domain)> {
    let nr = d.regions().len();
    let forbidden = d.forbidden(flavor);
    let gens = d.generators();
    let mut out = Vec::new();
    for code in 0..3usize.pow(nr as u32) {
        let mut m = vec![0i64; nr];
        let mut c = code;
        for v in m.iter_mut() {
            *v = (c % 3) as i64;
            c /= 3;
        }
        if m.iter().zip(&forbidden).any(|(&v, &f)| f && v != 0) || m.iter().all(|&v| v == 0) {
            continue;
        }
        let dom = Domain { multiplicities: m };
        for x in &gens {
            for y in &gens {
                if d.connects(&dom, x, y) && d.maslov_index_x4(&dom, x, y) == 4 {
                    out.push((x.clone(), y.clone(), dom.clone()));
                }
            }
        }
    }
    out.sort_by(|a, b| (&a.0, &a.1, &a.2.multiplicities).cmp(&(&b.0, &b.1, &b.2.multiplicities)));
    out
}

fn sorted(mut v: Vec<(Generator, Generator, Domain)>) -> Vec<(Generator, Generator, Domain)> {
    v.sort_by(|a, b| (&a.0, &a.1, &a.2.multiplicities).cmp(&(&b.0, &b.1, &b.2.multiplicities)));
    v
}

#[test]
fn pruned_search_matches_brute_force() {
    for (d, fl) in [(finger(), Flavor::Hat), (knot(), Flavor::KnotHat), (s3(), Flavor::Hat)] {
        assert_eq!(sorted(d.index_one_discs(fl).unwrap()), brute_discs(&d, fl));
    }
    let t = dehn_twist_beta1(&s3(), &delta(fixture!("delta_slope2.json"))).unwrap();
    assert_eq!(sorted(t.twisted.index_one_discs(Flavor::Hat).unwrap()), brute_discs(&t.twisted, Flavor::Hat));
}

#[test]
fn ungradable_differential_is_reported() {
    // x -> y twice along paths of different length cannot be graded
    let mut m = Gf2Matrix::zero(3, 3);
    m.toggle(1, 0).unwrap();
    m.toggle(2, 1).unwrap();
    m.toggle(2, 0).unwrap();
    assert!(induced_grading(&m).is_err());
}

#[test]
fn twist_generator_counts() {
    // β' = β - δ in homology, so α·β' = 1 - n: S³, S²×S¹, S³
    for (src, n, rank) in [
        (fixture!("delta_parallel.json"), 0, 1),
        (fixture!("delta_slope1.json"), 1, 2),
        (fixture!("delta_slope2.json"), 2, 1),
    ] {
        let t = dehn_twist_beta1(&s3(), &delta(src)).unwrap();
        assert_eq!(t.twisted.generators().len(), 1 + n);
        assert_eq!(t.alpha_delta.generators().len(), n);
        assert_eq!(t.delta_points.len(), n);
        let c = t.twisted.nice_differential(Flavor::Hat, None).unwrap();
        assert_eq!(total_rank(&c.complex), rank);
    }
}

#[test]
fn twist_refuses_bad_positions() {
    let err = dehn_twist_beta1(&s3(), &delta(fixture!("delta_wrong_corner.json"))).unwrap_err();
    assert!(matches!(err, DiagramError::BadDeltaPosition(_)), "{err}");

    let twice = delta(r#"{"crossings": [["b0", 0, -1, 0.1], ["b0", 0, 1, 0.5]]}"#);
    assert!(matches!(dehn_twist_beta1(&s3(), &twice), Err(DiagramError::BadDeltaPosition(_))));

    let none = delta(r#"{"crossings": [["a0", 0, 1, 0.5]]}"#);
    assert!(matches!(dehn_twist_beta1(&s3(), &none), Err(DiagramError::BadDeltaPosition(_))));
}

#[test]
fn finger_twist_has_nonzero_off_diagonal_block() {
    let t = dehn_twist_beta1(&finger(), &delta(fixture!("delta_finger.json"))).unwrap();
    assert_eq!(t.twisted.generators().len(), 5);
    let r = block_triangularity_check(&t).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.beta_part_generators, r.delta_part_generators), (3, 2));
    assert!(r.off_diagonal_entries > 0);
    // δ is parallel to α, so the twisted manifold is again the sphere
    assert_eq!(r.twisted_total, 1);
}

#[test]
fn negative_twist_breaks_the_triangular_form() {
    let neg = delta(fixture!("delta_finger_negative.json"));
    assert!(matches!(dehn_twist_beta1(&finger(), &neg), Err(DiagramError::BadDeltaPosition(_))));
    let t = dehn_twist(&finger(), &neg, TwistSign::Negative).unwrap();
    let r = block_triangularity_check(&t).unwrap();
    assert!(!r.lower_block_zero);
    assert!(r.lower_block_witness.is_some());
}

#[test]
fn block_structure_on_twists() {
    for src in [
        fixture!("delta_parallel.json"),
        fixture!("delta_slope1.json"),
        fixture!("delta_slope2.json"),
    ] {
        let t = dehn_twist_beta1(&s3(), &delta(src)).unwrap();
        let r = block_triangularity_check(&t).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.cone_total, r.twisted_total);
    }
}
