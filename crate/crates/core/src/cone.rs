//! Mapping cones of chain maps and a checked long exact sequence.
//!
//! Grading: the cone needs a shift for its differential to have degree -1.
//! With f: D -> C (map into first) the cone in degree k is C_k + D_{k-1};
//! with f: C -> D (map into second) it is C_{k-1} + D_k. The complex that
//! receives f is the subcomplex, the other one the quotient.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{
    homology, verify_chain_map, Bits, ChainComplex, ChainMap, Gf2Error, Gf2Matrix, GradedBasis, HomologyBasis,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("not a chain map (fails at generator {0})")]
    NotAChainMap(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// f: D -> C, d = [[d_C, f], [0, d_D]].
    MapIntoFirst,
    /// f: C -> D, d = [[d_C, 0], [f, d_D]].
    MapIntoSecond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingCone {
    pub complex: ChainComplex,
    pub orientation: Orientation,
    /// Generators `0..c_dim` come from C, the rest from D.
    pub c_dim: usize,
}

struct Parts<'a> {
    sub: &'a ChainComplex,
    quot: &'a ChainComplex,
    sub_off: usize,
    quot_off: usize,
}

fn parts(f: &ChainMap, o: Orientation) -> Parts<'_> {
    // f always runs quotient -> subcomplex; C is placed first.
    let (sub, quot) = (f.target(), f.source());
    match o {
        Orientation::MapIntoFirst => Parts {
            sub,
            quot,
            sub_off: 0,
            quot_off: sub.dim(),
        },
        Orientation::MapIntoSecond => Parts {
            sub,
            quot,
            sub_off: quot.dim(),
            quot_off: 0,
        },
    }
}

pub fn mapping_cone(f: &ChainMap, orientation: Orientation) -> Result<MappingCone, ConeError> {
    let check = verify_chain_map(f);
    if !check.holds {
        return Err(ConeError::NotAChainMap(check.violating.unwrap_or_default()));
    }
    let p = parts(f, orientation);
    let n = p.sub.dim() + p.quot.dim();
    let mut gens = vec![(String::new(), 0); n];
    let (sub_tag, quot_tag) = match orientation {
        Orientation::MapIntoFirst => ("C", "D"),
        Orientation::MapIntoSecond => ("D", "C"),
    };
    for (i, (id, g)) in p.sub.basis().iter().enumerate() {
        gens[p.sub_off + i] = (format!("{sub_tag}/{id}"), g);
    }
    for (i, (id, g)) in p.quot.basis().iter().enumerate() {
        gens[p.quot_off + i] = (format!("{quot_tag}/{id}"), g + 1);
    }
    let entries = p
        .sub
        .differential()
        .entries()
        .map(|(r, c)| (r + p.sub_off, c + p.sub_off))
        .chain(p.quot.differential().entries().map(|(r, c)| (r + p.quot_off, c + p.quot_off)))
        .chain(f.matrix().entries().map(|(r, c)| (r + p.sub_off, c + p.quot_off)));
    let d = Gf2Matrix::from_entries(n, n, entries)?;
    let complex = ChainComplex::new(GradedBasis::new(gens)?, d)?;
    let c_dim = match orientation {
        Orientation::MapIntoFirst => p.sub.dim(),
        Orientation::MapIntoSecond => p.quot.dim(),
    };
    Ok(MappingCone {
        complex,
        orientation,
        c_dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    Sub,
    Cone,
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCheck {
    /// Degree of the homology group at this node (quotient nodes use the
    /// quotient's own grading).
    pub grading: i64,
    pub node: Node,
    pub exact: bool,
    pub witness: Option<String>,
}

/// Ranks around cone degree k: H_k(sub), H_k(cone), H_{k-1}(quotient).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesRow {
    pub grading: i64,
    pub c_rank: usize,
    pub cone_rank: usize,
    pub d_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub orientation: Orientation,
    pub rows: Vec<LesRow>,
    pub nodes: Vec<NodeCheck>,
    pub connecting_equals_induced: bool,
    pub connecting_witness: Option<String>,
    pub euler_additive: bool,
}

impl LesReport {
    pub fn all_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }

    pub fn passed(&self) -> bool {
        self.all_exact() && self.connecting_equals_induced && self.euler_additive
    }
}

fn shift(chain: &[usize], off: usize) -> Vec<usize> {
    chain.iter().map(|&x| x + off).collect()
}

fn restrict(chain: &[usize], off: usize, len: usize) -> (Vec<usize>, Vec<usize>) {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for &x in chain {
        if x >= off && x < off + len {
            inside.push(x - off);
        } else {
            outside.push(x);
        }
    }
    (inside, outside)
}

fn exactness(a: &Gf2Matrix, b: &Gf2Matrix, dim: usize) -> Option<String> {
    let ba = b.mul(a).expect("composable");
    if !ba.is_zero() {
        return Some("composite is nonzero".into());
    }
    let (ra, rb) = (crate::gf2::rank_gf2(a), crate::gf2::rank_gf2(b));
    (ra + rb != dim).then(|| format!("rank in {ra} + rank out {rb} != dim {dim}"))
}

pub fn les_verify(f: &ChainMap, orientation: Orientation) -> Result<LesReport, ConeError> {
    let cone = mapping_cone(f, orientation)?;
    let p = parts(f, orientation);
    let (hs, hq, hk) = (
        HomologyBasis::new(p.sub),
        HomologyBasis::new(p.quot),
        HomologyBasis::new(&cone.complex),
    );
    let cone_cols = cone.complex.differential().columns();
    let cycle = "representative is a cycle";

    let mut degrees: BTreeSet<i64> = cone.complex.basis().gradings();
    degrees.extend(p.sub.basis().gradings());
    degrees.extend(p.quot.basis().gradings().into_iter().map(|g| g + 1));
    let (lo, hi) = match (degrees.first(), degrees.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi + 1),
        _ => (0, 0),
    };

    // Γ1_k: H_k(sub) -> H_k(cone)
    let gamma1 = |k: i64| {
        let cols: Vec<Bits> = (0..hs.rank(k))
            .map(|i| hk.class_of(k, &shift(&hs.representative(k, i), p.sub_off)).expect(cycle))
            .collect();
        Gf2Matrix::from_columns(hk.rank(k), &cols)
    };
    // Γ2_k: H_k(cone) -> H_{k-1}(quot)
    let gamma2 = |k: i64| {
        let cols: Vec<Bits> = (0..hk.rank(k))
            .map(|i| {
                let (q, _) = restrict(&hk.representative(k, i), p.quot_off, p.quot.dim());
                hq.class_of(k - 1, &q).expect(cycle)
            })
            .collect();
        Gf2Matrix::from_columns(hq.rank(k - 1), &cols)
    };
    // ∂*_j: H_j(quot) -> H_j(sub), by lifting to the cone and applying d.
    let connecting = |j: i64| {
        let cols: Vec<Bits> = (0..hq.rank(j))
            .map(|i| {
                let mut image = Bits::zeros(cone.complex.dim());
                for x in shift(&hq.representative(j, i), p.quot_off) {
                    for &r in &cone_cols[x] {
                        image.flip(r);
                    }
                }
                let (s, rest) = restrict(&image.ones().collect::<Vec<_>>(), p.sub_off, p.sub.dim());
                assert!(rest.is_empty(), "lift of a cycle has no quotient part");
                hs.class_of(j, &s).expect(cycle)
            })
            .collect();
        Gf2Matrix::from_columns(hs.rank(j), &cols)
    };

    let mut rows = Vec::new();
    let mut nodes = Vec::new();
    let mut conn_ok = true;
    let mut conn_witness = None;
    for k in lo..=hi {
        let (g1, g2) = (gamma1(k), gamma2(k));
        let (conn_k, conn_km1) = (connecting(k), connecting(k - 1));
        let induced = f.induced(&hq, &hs, k);
        if conn_ok && conn_k != induced {
            conn_ok = false;
            conn_witness = Some(format!("connecting map differs from f_* in degree {k}"));
        }
        let mut push = |grading, node, w: Option<String>| {
            nodes.push(NodeCheck {
                grading,
                node,
                exact: w.is_none(),
                witness: w,
            })
        };
        push(k, Node::Sub, exactness(&conn_k, &g1, hs.rank(k)));
        push(k, Node::Cone, exactness(&g1, &g2, hk.rank(k)));
        push(k - 1, Node::Quotient, exactness(&g2, &conn_km1, hq.rank(k - 1)));
        rows.push(LesRow {
            grading: k,
            c_rank: match orientation {
                Orientation::MapIntoFirst => hs.rank(k),
                Orientation::MapIntoSecond => hq.rank(k - 1),
            },
            cone_rank: hk.rank(k),
            d_rank: match orientation {
                Orientation::MapIntoFirst => hq.rank(k - 1),
                Orientation::MapIntoSecond => hs.rank(k),
            },
        });
    }

    let parity = |g: i64| if g.rem_euclid(2) == 0 { 1 } else { -1 };
    let chi_cone: i64 = homology(&cone.complex).iter().map(|(&g, &r)| parity(g) * r as i64).sum();
    let chi_parts: i64 = p.sub.euler_characteristic() - p.quot.euler_characteristic();

    Ok(LesReport {
        orientation,
        rows,
        nodes,
        connecting_equals_induced: conn_ok,
        connecting_witness: conn_witness,
        euler_additive: chi_cone == chi_parts,
    })
}

/// A random chain map f: Q -> S, with S and Q of dimension at most
/// `max_dim`. It is read off a random block-triangular complex on S + Q.
pub fn random_chain_map<R: Rng>(rng: &mut R, max_dim: usize) -> ChainMap {
    let ds = rng.gen_range(1..=max_dim.max(1));
    let dq = rng.gen_range(1..=max_dim.max(1));
    let n = ds + dq;
    let in_sub = |i: usize| i < ds;
    // cone gradings; quotient generators sit one above their own degree
    let grades: Vec<i64> = (0..n).map(|_| rng.gen_range(0..5)).collect();
    let mut e = Gf2Matrix::zero(n, n);
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&i| grades[i]);
    for &a in order.iter().rev() {
        if used[a] || rng.gen_bool(0.35) {
            continue;
        }
        let target = order
            .iter()
            .find(|&&b| !used[b] && b != a && grades[b] == grades[a] - 1 && !(in_sub(a) && !in_sub(b)));
        if let Some(&b) = target {
            used[a] = true;
            used[b] = true;
            e.toggle(b, a).expect("in range");
        }
    }
    let mut d = e;
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || grades[i] != grades[j] || (!in_sub(i) && in_sub(j)) {
            continue;
        }
        let t = Gf2Matrix::from_entries(n, n, (0..n).map(|x| (x, x)).chain([(i, j)])).expect("in range");
        d = t.mul(&d).and_then(|m| m.mul(&t)).expect("square");
    }
    let block = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| {
        let (r0, c0) = (rows.start, cols.start);
        Gf2Matrix::from_entries(
            rows.len(),
            cols.len(),
            d.entries()
                .filter(|(r, c)| rows.contains(r) && cols.contains(c))
                .map(|(r, c)| (r - r0, c - c0)),
        )
        .expect("in range")
    };
    let basis = |range: std::ops::Range<usize>, prefix: &str, shift: i64| {
        GradedBasis::new(range.map(|i| (format!("{prefix}{i}"), grades[i] - shift)).collect()).expect("unique")
    };
    let sub = ChainComplex::new(basis(0..ds, "s", 0), block(0..ds, 0..ds)).expect("block of a complex");
    let quot = ChainComplex::new(basis(ds..n, "q", 1), block(ds..n, ds..n)).expect("block of a complex");
    ChainMap::new(quot, sub, block(0..ds, ds..n)).expect("shapes match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::random_complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn both() -> [Orientation; 2] {
        [Orientation::MapIntoFirst, Orientation::MapIntoSecond]
    }

    #[test]
    fn zero_map_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_complex(&mut rng, 9, 3);
        let d = random_complex(&mut rng, 7, 3);
        let f = ChainMap::zero(d.clone(), c.clone());
        let cone = mapping_cone(&f, Orientation::MapIntoFirst).unwrap();
        let mut expect: BTreeMap<i64, usize> = BTreeMap::new();
        for (k, r) in homology(&c) {
            *expect.entry(k).or_default() += r;
        }
        for (k, r) in homology(&d) {
            *expect.entry(k + 1).or_default() += r;
        }
        let got: BTreeMap<i64, usize> = homology(&cone.complex).into_iter().filter(|&(_, r)| r > 0).collect();
        expect.retain(|_, r| *r > 0);
        assert_eq!(got, expect);
        let rep = les_verify(&f, Orientation::MapIntoFirst).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn identity_cone_is_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_complex(&mut rng, 10, 4);
        let f = ChainMap::identity(c);
        for o in both() {
            let cone = mapping_cone(&f, o).unwrap();
            assert!(homology(&cone.complex).values().all(|&r| r == 0));
            assert!(les_verify(&f, o).unwrap().passed());
        }
    }

    #[test]
    fn rejects_non_chain_maps() {
        let src = ChainComplex::new(GradedBasis::new(vec![("z".into(), 1)]).unwrap(), Gf2Matrix::zero(1, 1)).unwrap();
        let tgt = ChainComplex::new(
            GradedBasis::new(vec![("u".into(), 1), ("v".into(), 0)]).unwrap(),
            Gf2Matrix::from_entries(2, 2, [(1, 0)]).unwrap(),
        )
        .unwrap();
        let f = ChainMap::new(src, tgt, Gf2Matrix::from_entries(2, 1, [(0, 0)]).unwrap()).unwrap();
        assert_eq!(
            mapping_cone(&f, Orientation::MapIntoFirst),
            Err(ConeError::NotAChainMap("z".into()))
        );
    }

    #[test]
    fn random_cones_square_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..50 {
            let f = random_chain_map(&mut rng, 20);
            assert!(verify_chain_map(&f).holds);
            for o in both() {
                let cone = mapping_cone(&f, o).unwrap();
                let d = cone.complex.differential();
                assert!(d.mul(d).unwrap().is_zero());
            }
        }
    }

    // Oracle: with exactness and ∂* = f*, H_k(cone) must have dimension
    // dim coker f*_k + dim ker f*_{k-1}; f* ranks come from brute-force
    // span enumeration, independent of the representative machinery.
    fn span(vs: &[u32]) -> BTreeSet<u32> {
        let mut s = BTreeSet::from([0u32]);
        for &v in vs {
            let more: Vec<u32> = s.iter().map(|x| x ^ v).collect();
            s.extend(more);
        }
        s
    }

    fn brute_fstar_rank(f: &ChainMap, k: i64) -> (usize, usize, usize) {
        let (s, q) = (f.target(), f.source());
        let mask_of = |rows: &[usize]| -> u32 {
            rows.iter().fold(0, |m, &r| m ^ (1 << r))
        };
        let dq = q.differential().columns();
        let ds = s.differential().columns();
        let fc = f.matrix().columns();
        let gens_q: Vec<usize> = (0..q.dim()).filter(|&i| q.basis().grading(i) == k).collect();
        let mut cycles_q = Vec::new();
        for m in 0u32..1 << gens_q.len() {
            let chain: Vec<usize> = gens_q.iter().enumerate().filter(|(j, _)| m >> j & 1 == 1).map(|(_, &g)| g).collect();
            let bd = chain.iter().fold(0u32, |acc, &g| acc ^ mask_of(&dq[g]));
            if bd == 0 {
                cycles_q.push(chain.iter().fold(0u32, |acc, &g| acc ^ mask_of(&fc[g])));
            }
        }
        let bounds_s: Vec<u32> = (0..s.dim())
            .filter(|&i| s.basis().grading(i) == k + 1)
            .map(|g| mask_of(&ds[g]))
            .collect();
        let b = span(&bounds_s).len();
        let mut all = bounds_s.clone();
        all.extend(cycles_q);
        let img = span(&all).len();
        let hq = homology(q).get(&k).copied().unwrap_or(0);
        let hs = homology(s).get(&k).copied().unwrap_or(0);
        ((img.trailing_zeros() - b.trailing_zeros()) as usize, hq, hs)
    }

    #[test]
    fn cone_ranks_match_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..60 {
            let f = random_chain_map(&mut rng, 10);
            let cone = mapping_cone(&f, Orientation::MapIntoFirst).unwrap();
            let h = homology(&cone.complex);
            for k in -1..7 {
                let (r0, _, hs0) = brute_fstar_rank(&f, k);
                let (r1, hq1, _) = brute_fstar_rank(&f, k - 1);
                let expect = (hs0 - r0) + (hq1 - r1);
                assert_eq!(h.get(&k).copied().unwrap_or(0), expect, "degree {k}");
            }
        }
    }

    #[test]
    fn two_hundred_random_sequences_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let f = random_chain_map(&mut rng, 20);
            for o in both() {
                let rep = les_verify(&f, o).unwrap();
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }

    /// Conjugates a complex by a random grading-preserving invertible
    /// matrix; returns the new complex and the isomorphism.
    fn twist(rng: &mut ChaCha8Rng, c: &ChainComplex) -> (ChainComplex, Gf2Matrix, Gf2Matrix) {
        let n = c.dim();
        let mut p = Gf2Matrix::identity(n);
        let mut pinv = Gf2Matrix::identity(n);
        for _ in 0..3 * n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j && c.basis().grading(i) == c.basis().grading(j) {
                let t = Gf2Matrix::from_entries(n, n, (0..n).map(|x| (x, x)).chain([(i, j)])).unwrap();
                p = t.mul(&p).unwrap();
                pinv = pinv.mul(&t).unwrap();
            }
        }
        let d = p.mul(c.differential()).unwrap().mul(&pinv).unwrap();
        (ChainComplex::new(c.basis().clone(), d).unwrap(), p, pinv)
    }

    proptest::proptest! {
        #[test]
        fn les_is_exact(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_chain_map(&mut rng, 12);
            for o in both() {
                proptest::prop_assert!(les_verify(&f, o).unwrap().passed());
            }
        }

        #[test]
        fn cone_ranks_stable_under_isomorphism(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_chain_map(&mut rng, 12);
            let (s2, ps, _) = twist(&mut rng, f.target());
            let (q2, _, pq_inv) = twist(&mut rng, f.source());
            let m = ps.mul(f.matrix()).unwrap().mul(&pq_inv).unwrap();
            let g = ChainMap::new(q2, s2, m).unwrap();
            proptest::prop_assert!(verify_chain_map(&g).holds);
            for o in both() {
                let a = homology(&mapping_cone(&f, o).unwrap().complex);
                let b = homology(&mapping_cone(&g, o).unwrap().complex);
                proptest::prop_assert_eq!(a, b);
            }
        }
    }
}
