//! Classical invariants from PD codes: Conway/Alexander polynomial by skein
//! recursion, signature via Goeritz matrices, and the rank table that the
//! alternating-knot formula predicts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ranks::BigradedRanks;

pub const DEFAULT_MAX_CROSSINGS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnotPolyError {
    #[error("not a knot or link diagram: {0}")]
    NotAKnotOrLink(String),
    #[error("expected a knot, diagram has {components} components")]
    NotAKnot { components: usize },
    #[error("{crossings} crossings exceed the bound of {max}")]
    TooManyCrossings { crossings: usize, max: usize },
    #[error("signature {0} is odd")]
    OddSignature(i64),
    #[error("Alexander polynomial has half-integer exponents (even number of components)")]
    HalfIntegerExponents,
}

/// Finitely supported integer Laurent polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, i64>,
}

impl From<Vec<(i64, i64)>> for LaurentPolynomial {
    fn from(v: Vec<(i64, i64)>) -> Self {
        let mut p = LaurentPolynomial::zero();
        for (e, c) in v {
            p.add_term(e, c);
        }
        p
    }
}

impl From<LaurentPolynomial> for Vec<(i64, i64)> {
    fn from(p: LaurentPolynomial) -> Self {
        p.coeffs.into_iter().collect()
    }
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    /// Coefficients listed from exponent `low` upward.
    pub fn from_coeffs(low: i64, coeffs: &[i64]) -> Self {
        let mut p = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(low + k as i64, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.coeffs.entry(exp).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in other.terms() {
            p.add_term(e, c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            p.add_term(e, c * k);
        }
        p
    }

    pub fn shift(&self, by: i64) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            p.add_term(e + by, c);
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// p(t) -> p(1/t)
    pub fn invert(&self) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            p.add_term(-e, c);
        }
        p
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.invert()
    }

    pub fn eval(&self, t: i64) -> Option<Ratio<i128>> {
        if t == 0 && self.min_exp().is_some_and(|e| e < 0) {
            return None;
        }
        let t = Ratio::from_integer(t as i128);
        Some(self.terms().fold(Ratio::from_integer(0), |acc, (e, c)| {
            acc + Ratio::from_integer(c as i128) * t.pow(e as i32)
        }))
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (e, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => write!(f, "T^{e}")?,
                _ => write!(f, "{a}T^{e}")?,
            }
        }
        Ok(())
    }
}

/// A PD crossing `[i, j, k, l]`, counterclockwise from the incoming under
/// strand. With `sign = +1` the over strand runs l -> j, otherwise j -> l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub pd: [u32; 4],
    pub sign: i8,
}

impl Crossing {
    fn under_in(&self) -> u32 {
        self.pd[0]
    }
    fn under_out(&self) -> u32 {
        self.pd[2]
    }
    fn over_in(&self) -> u32 {
        if self.sign > 0 {
            self.pd[3]
        } else {
            self.pd[1]
        }
    }
    fn over_out(&self) -> u32 {
        if self.sign > 0 {
            self.pd[1]
        } else {
            self.pd[3]
        }
    }
    /// Position of the strand continuing after entering through `pos`.
    fn exit_of(&self, pos: usize) -> Option<usize> {
        match pos {
            0 => Some(2),
            1 if self.sign < 0 => Some(3),
            3 if self.sign > 0 => Some(1),
            _ => None,
        }
    }
    fn is_entry(&self, pos: usize) -> bool {
        self.exit_of(pos).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLink", into = "RawLink")]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
}

#[derive(Serialize, Deserialize)]
struct RawLink {
    pd: Vec<[u32; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signs: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    free_loops: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl TryFrom<RawLink> for LinkDiagram {
    type Error = KnotPolyError;
    fn try_from(r: RawLink) -> Result<Self, KnotPolyError> {
        LinkDiagram::new(r.pd, r.signs, r.free_loops)
    }
}

impl From<LinkDiagram> for RawLink {
    fn from(d: LinkDiagram) -> Self {
        RawLink {
            pd: d.crossings.iter().map(|c| c.pd).collect(),
            signs: Some(d.crossings.iter().map(|c| c.sign).collect()),
            free_loops: d.free_loops,
        }
    }
}

fn bad(msg: impl Into<String>) -> KnotPolyError {
    KnotPolyError::NotAKnotOrLink(msg.into())
}

impl LinkDiagram {
    /// Over-strand directions come from `signs` when given, otherwise they
    /// are propagated from the under strands.
    pub fn new(pd: Vec<[u32; 4]>, signs: Option<Vec<i8>>, free_loops: usize) -> Result<Self, KnotPolyError> {
        if pd.is_empty() && free_loops == 0 {
            return Err(bad("empty diagram"));
        }
        let mut occ: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
        for (c, x) in pd.iter().enumerate() {
            for (p, &l) in x.iter().enumerate() {
                occ.entry(l).or_default().push((c, p));
            }
        }
        if let Some((l, v)) = occ.iter().find(|(_, v)| v.len() != 2) {
            return Err(bad(format!("label {l} appears {} times", v.len())));
        }
        let dir: Vec<Option<i8>> = match &signs {
            Some(s) => {
                if s.len() != pd.len() || s.iter().any(|&x| x != 1 && x != -1) {
                    return Err(bad("signs must be one ±1 per crossing"));
                }
                s.iter().map(|&x| Some(x)).collect()
            }
            None => infer_signs(&pd, &occ)?,
        };
        let crossings: Vec<Crossing> = pd
            .iter()
            .zip(&dir)
            .map(|(&pd, s)| Crossing { pd, sign: s.unwrap() })
            .collect();
        for (l, v) in &occ {
            let entries = v.iter().filter(|&&(c, p)| crossings[c].is_entry(p)).count();
            if entries != 1 {
                return Err(bad(format!("label {l} is not traversed consistently")));
            }
        }
        Ok(LinkDiagram { crossings, free_loops })
    }

    pub fn unknot() -> Self {
        LinkDiagram {
            crossings: Vec::new(),
            free_loops: 1,
        }
    }

    /// Closure of a braid word; generator `i` (1-based) crosses positions
    /// i-1 and i, positive for `+i`.
    pub fn from_braid(strands: usize, word: &[i32]) -> Result<Self, KnotPolyError> {
        let mut next = 1u32;
        let mut fresh = || {
            next += 1;
            next - 1
        };
        let start: Vec<u32> = (0..strands).map(|_| fresh()).collect();
        let mut cur = start.clone();
        let mut pd = Vec::new();
        for &g in word {
            let i = g.unsigned_abs() as usize;
            if g == 0 || i >= strands {
                return Err(bad(format!("generator {g} on {strands} strands")));
            }
            let (lo, hi) = (cur[i - 1], cur[i]);
            let (new_lo, new_hi) = (fresh(), fresh());
            if g > 0 {
                pd.push([lo, new_lo, new_hi, hi]);
            } else {
                pd.push([hi, lo, new_lo, new_hi]);
            }
            cur[i - 1] = new_lo;
            cur[i] = new_hi;
        }
        let mut free = 0;
        let rename: HashMap<u32, u32> = cur.iter().copied().zip(start.iter().copied()).collect();
        for x in pd.iter_mut() {
            for l in x.iter_mut() {
                if let Some(&s) = rename.get(l) {
                    *l = s;
                }
            }
        }
        for (p, &s) in start.iter().enumerate() {
            if cur[p] == s {
                free += 1;
            }
        }
        let signs = word.iter().map(|&g| if g > 0 { 1 } else { -1 }).collect();
        LinkDiagram::new(pd, Some(signs), free)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    fn heads(&self) -> HashMap<u32, (usize, usize)> {
        let mut h = HashMap::new();
        for (c, x) in self.crossings.iter().enumerate() {
            for p in 0..4 {
                if x.is_entry(p) {
                    h.insert(x.pd[p], (c, p));
                }
            }
        }
        h
    }

    /// Components as label cycles in traversal order, smallest label first.
    fn cycles(&self) -> Vec<Vec<u32>> {
        let heads = self.heads();
        let mut labels: Vec<u32> = heads.keys().copied().collect();
        labels.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for &l0 in &labels {
            if seen.contains(&l0) {
                continue;
            }
            let mut cyc = Vec::new();
            let mut l = l0;
            while seen.insert(l) {
                cyc.push(l);
                let (c, p) = heads[&l];
                let x = &self.crossings[c];
                l = x.pd[x.exit_of(p).unwrap()];
            }
            out.push(cyc);
        }
        out
    }

    pub fn components(&self) -> usize {
        self.cycles().len() + self.free_loops
    }

    pub fn mirror(&self) -> Self {
        LinkDiagram {
            crossings: self.crossings.iter().map(switched).collect(),
            free_loops: self.free_loops,
        }
    }

    pub fn switch(&self, i: usize) -> Self {
        let mut d = self.clone();
        d.crossings[i] = switched(&d.crossings[i]);
        d
    }

    /// Oriented resolution of crossing `i`.
    pub fn smooth(&self, i: usize) -> Self {
        let x = self.crossings[i];
        let mut rest = self.crossings.clone();
        rest.remove(i);
        // join ui with oo and oi with uo; a joined class with no ends left
        // on other crossings is a closed loop
        let labels = [x.under_in(), x.over_out(), x.over_in(), x.under_out()];
        let mut class: Vec<usize> = vec![0, 0, 1, 1];
        for a in 0..4 {
            for b in 0..4 {
                if labels[a] == labels[b] && class[a] != class[b] {
                    let (from, to) = (class[b], class[a]);
                    class.iter_mut().for_each(|c| if *c == from { *c = to });
                }
            }
        }
        let mut free = self.free_loops;
        let mut classes: Vec<usize> = class.clone();
        classes.sort_unstable();
        classes.dedup();
        for k in classes {
            let members: Vec<u32> = (0..4).filter(|&a| class[a] == k).map(|a| labels[a]).collect();
            let rep = members[0];
            let mut external = false;
            for y in rest.iter_mut() {
                for l in y.pd.iter_mut() {
                    if members.contains(l) {
                        *l = rep;
                        external = true;
                    }
                }
            }
            if !external {
                free += 1;
            }
        }
        LinkDiagram {
            crossings: rest,
            free_loops: free,
        }
    }

    /// First crossing met from below when components are traversed in
    /// order from their smallest label; none for a descending diagram.
    fn first_ascending(&self) -> Option<usize> {
        let heads = self.heads();
        let mut visited = vec![false; self.crossings.len()];
        for cyc in self.cycles() {
            for l in cyc {
                let (c, p) = heads[&l];
                if !visited[c] {
                    visited[c] = true;
                    if p == 0 {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    fn canonical(&self) -> (Vec<Crossing>, usize) {
        let mut map = HashMap::new();
        for cyc in self.cycles() {
            for l in cyc {
                let n = map.len() as u32;
                map.insert(l, n);
            }
        }
        let mut xs: Vec<Crossing> = self
            .crossings
            .iter()
            .map(|c| Crossing {
                pd: c.pd.map(|l| map[&l]),
                sign: c.sign,
            })
            .collect();
        xs.sort();
        (xs, self.free_loops)
    }
}

fn switched(x: &Crossing) -> Crossing {
    let [i, j, k, l] = x.pd;
    if x.sign > 0 {
        Crossing { pd: [l, i, j, k], sign: -1 }
    } else {
        Crossing { pd: [j, k, l, i], sign: 1 }
    }
}

fn infer_signs(pd: &[[u32; 4]], occ: &HashMap<u32, Vec<(usize, usize)>>) -> Result<Vec<Option<i8>>, KnotPolyError> {
    // sign +1 makes position 3 an entry; position 1 is an entry for -1
    let mut sign: Vec<Option<i8>> = vec![None; pd.len()];
    let entry = |s: i8, p: usize| match p {
        0 => Some(true),
        2 => Some(false),
        1 => Some(s < 0),
        _ => Some(s > 0),
    };
    loop {
        let mut changed = false;
        for v in occ.values() {
            let [(c1, p1), (c2, p2)] = [v[0], v[1]];
            let e1 = match (p1, sign[c1]) {
                (0 | 2, _) => entry(1, p1),
                (_, Some(s)) => entry(s, p1),
                _ => None,
            };
            let e2 = match (p2, sign[c2]) {
                (0 | 2, _) => entry(1, p2),
                (_, Some(s)) => entry(s, p2),
                _ => None,
            };
            let mut fix = |c: usize, p: usize, want_entry: bool| {
                let s = if (p == 3) == want_entry { 1 } else { -1 };
                sign[c] = Some(s);
                changed = true;
            };
            match (e1, e2) {
                (Some(a), None) => fix(c2, p2, !a),
                (None, Some(b)) => fix(c1, p1, !b),
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if sign.iter().any(|s| s.is_none()) {
        return Err(bad("over-strand orientation is ambiguous; give explicit signs"));
    }
    Ok(sign)
}

/// Conway polynomial in z, by switching the first ascending crossing.
pub fn conway_polynomial(d: &LinkDiagram) -> Result<LaurentPolynomial, KnotPolyError> {
    conway_polynomial_bounded(d, DEFAULT_MAX_CROSSINGS)
}

pub fn conway_polynomial_bounded(d: &LinkDiagram, max_crossings: usize) -> Result<LaurentPolynomial, KnotPolyError> {
    if d.crossings.len() > max_crossings {
        return Err(KnotPolyError::TooManyCrossings {
            crossings: d.crossings.len(),
            max: max_crossings,
        });
    }
    let mut memo = HashMap::new();
    Ok(conway_rec(d, &mut memo))
}

type Memo = HashMap<(Vec<Crossing>, usize), LaurentPolynomial>;

fn conway_rec(d: &LinkDiagram, memo: &mut Memo) -> LaurentPolynomial {
    let key = d.canonical();
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let out = match d.first_ascending() {
        None => {
            if d.components() == 1 {
                LaurentPolynomial::one()
            } else {
                LaurentPolynomial::zero()
            }
        }
        Some(c) => {
            let sign = d.crossings[c].sign as i64;
            let switched = conway_rec(&d.switch(c), memo);
            let smoothed = conway_rec(&d.smooth(c), memo);
            // C(L+) - C(L-) = z C(L0)
            switched.add(&smoothed.shift(1).scale(sign))
        }
    };
    memo.insert(key, out.clone());
    out
}

/// Δ(T) from ∇(z) with z = T^{1/2} - T^{-1/2}.
pub fn conway_to_alexander(conway: &LaurentPolynomial) -> Result<LaurentPolynomial, KnotPolyError> {
    // work in s = T^{1/2}
    let z = LaurentPolynomial::from_coeffs(-1, &[-1, 0, 1]);
    let mut s_poly = LaurentPolynomial::zero();
    for (e, c) in conway.terms() {
        s_poly = s_poly.add(&z.pow(e as u32).scale(c));
    }
    let mut t = LaurentPolynomial::zero();
    for (e, c) in s_poly.terms() {
        if e % 2 != 0 {
            return Err(KnotPolyError::HalfIntegerExponents);
        }
        t.add_term(e / 2, c);
    }
    Ok(t)
}

pub fn alexander_conway(d: &LinkDiagram) -> Result<LaurentPolynomial, KnotPolyError> {
    conway_to_alexander(&conway_polynomial(d)?)
}

pub fn alexander_conway_bounded(d: &LinkDiagram, max_crossings: usize) -> Result<LaurentPolynomial, KnotPolyError> {
    conway_to_alexander(&conway_polynomial_bounded(d, max_crossings)?)
}

struct Faces {
    /// face index of the corner between positions p and p+1 at each crossing
    corner: Vec<[usize; 4]>,
    count: usize,
}

fn faces(d: &LinkDiagram) -> Result<Faces, KnotPolyError> {
    let n = d.crossings.len();
    let mut where_: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (c, x) in d.crossings.iter().enumerate() {
        for p in 0..4 {
            where_.entry(x.pd[p]).or_default().push((c, p));
        }
    }
    let opposite = |c: usize, p: usize| -> (usize, usize) {
        let v = &where_[&d.crossings[c].pd[p]];
        if v[0] == (c, p) {
            v[1]
        } else {
            v[0]
        }
    };
    let mut corner = vec![[usize::MAX; 4]; n];
    let mut count = 0;
    for c0 in 0..n {
        for q0 in 0..4 {
            if corner[c0][q0] != usize::MAX {
                continue;
            }
            // leave through q0+1, arrive at (c, p), turn to p+1: corner p
            let (mut c, mut q) = (c0, q0);
            while corner[c][q] == usize::MAX {
                corner[c][q] = count;
                let (c2, p2) = opposite(c, (q + 1) % 4);
                c = c2;
                q = p2;
            }
            count += 1;
        }
    }
    if n > 0 && count != n + 2 {
        return Err(bad(format!("{count} faces on {n} crossings: not a connected planar diagram")));
    }
    Ok(Faces { corner, count })
}

/// Signature by Gordon–Litherland with the Goeritz matrix of the faces of
/// one checkerboard colour; `colour` picks which class counts as white.
fn signature_with_colour(d: &LinkDiagram, colour: usize) -> Result<i64, KnotPolyError> {
    let f = faces(d)?;
    let n = d.crossings.len();
    let mut col = vec![usize::MAX; f.count];
    col[f.corner[0][0]] = colour;
    let mut changed = true;
    while changed {
        changed = false;
        for c in 0..n {
            for q in 0..4 {
                let a = f.corner[c][q];
                let b = f.corner[c][(q + 1) % 4];
                if col[a] != usize::MAX && col[b] == usize::MAX {
                    col[b] = 1 - col[a];
                    changed = true;
                } else if col[a] != usize::MAX && col[b] == col[a] {
                    return Err(bad("faces admit no checkerboard colouring"));
                }
            }
        }
    }
    let white: Vec<usize> = (0..f.count).filter(|&i| col[i] == 0).collect();
    let idx: HashMap<usize, usize> = white.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let w = white.len();
    let mut g = vec![vec![0i64; w]; w];
    let mut mu = 0i64;
    for (c, x) in d.crossings.iter().enumerate() {
        let first = if col[f.corner[c][0]] == 0 { 0 } else { 1 };
        let eta: i64 = if first == 0 { 1 } else { -1 };
        let (a, b) = (idx[&f.corner[c][first]], idx[&f.corner[c][first + 2]]);
        if a != b {
            g[a][b] -= eta;
            g[b][a] -= eta;
            g[a][a] += eta;
            g[b][b] += eta;
        }
        // the white-face matrix is the form of the black surface; type II
        // crossings are those whose oriented resolution merges black corners
        let merged = if x.sign > 0 { 1 } else { 0 };
        if merged != first {
            mu += eta;
        }
    }
    let reduced: Vec<Vec<i64>> = g.iter().take(w.saturating_sub(1)).map(|r| r[..w - 1].to_vec()).collect();
    Ok(inertia(&reduced) - mu)
}

/// Knot signature; the right-handed trefoil has -2.
pub fn signature(d: &LinkDiagram) -> Result<i64, KnotPolyError> {
    let k = d.components();
    if k != 1 {
        return Err(KnotPolyError::NotAKnot { components: k });
    }
    if d.crossings.is_empty() {
        return Ok(0);
    }
    signature_with_colour(d, 0)
}

/// Positive minus negative eigenvalue count of a symmetric integer matrix,
/// by exact symmetric elimination.
pub fn inertia(m: &[Vec<i64>]) -> i64 {
    let mut a: Vec<Vec<Ratio<i128>>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect())
        .collect();
    let zero = Ratio::from_integer(0);
    let mut sig = 0;
    while !a.is_empty() {
        let n = a.len();
        let piv = match (0..n).find(|&i| a[i][i] != zero) {
            Some(i) => i,
            None => match (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != zero) {
                None => break,
                Some((i, j)) => {
                    // row/col i += row/col j makes the diagonal 2 a_ij
                    for k in 0..n {
                        let v = a[j][k];
                        a[i][k] += v;
                    }
                    for k in 0..n {
                        let v = a[k][j];
                        a[k][i] += v;
                    }
                    i
                }
            },
        };
        let p = a[piv][piv];
        sig += if p > zero { 1 } else { -1 };
        let mut next = Vec::with_capacity(n - 1);
        for i in (0..n).filter(|&i| i != piv) {
            let row: Vec<Ratio<i128>> = (0..n)
                .filter(|&j| j != piv)
                .map(|j| a[i][j] - a[i][piv] * a[piv][j] / p)
                .collect();
            next.push(row);
        }
        a = next;
    }
    sig
}

/// Rank |a_i| at Alexander grading i and Maslov grading i + σ/2.
pub fn alternating_hfk(delta: &LaurentPolynomial, sigma: i64) -> Result<BigradedRanks, KnotPolyError> {
    if sigma % 2 != 0 {
        return Err(KnotPolyError::OddSignature(sigma));
    }
    let mut r = BigradedRanks::new();
    for (i, a) in delta.terms() {
        r.add(i, i + sigma / 2, a.unsigned_abs() as usize);
    }
    Ok(r)
}
