//! Graded linear algebra over GF(2): complexes, chain maps, homology.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate generator id {0:?}")]
    DuplicateId(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Fixed-width bit vector. Widths are implicit; xor grows the shorter side.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut b = Bits::zeros(len.max(i + 1));
        b.flip(i);
        b
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut b = Bits::zeros(len);
        for i in ones {
            b.flip(i);
        }
        b
    }

    pub fn get(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (i % 64);
    }

    pub fn xor(&mut self, other: &Bits) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

/// Row echelon form keyed by lowest set bit. Each stored row carries a tag
/// recording which inserted vectors it is a combination of.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Bits>,
    tags: Vec<Bits>,
    pivots: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` until its lowest bit is not a pivot (or it vanishes),
    /// folding the tags of the rows used into `tag`.
    pub fn reduce(&self, v: &mut Bits, tag: &mut Bits) {
        while let Some(p) = v.lowest() {
            match self.pivots.get(&p) {
                Some(&i) => {
                    v.xor(&self.rows[i]);
                    tag.xor(&self.tags[i]);
                }
                None => return,
            }
        }
    }

    /// Inserts `v`. On dependence returns the reduced tag, which then
    /// describes a relation among inserted vectors.
    pub fn insert(&mut self, mut v: Bits, mut tag: Bits) -> Result<(), Bits> {
        self.reduce(&mut v, &mut tag);
        match v.lowest() {
            None => Err(tag),
            Some(p) => {
                self.pivots.insert(p, self.rows.len());
                self.rows.push(v);
                self.tags.push(tag);
                Ok(())
            }
        }
    }

    pub fn contains(&self, v: &Bits) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v, &mut Bits::default());
        v.is_zero()
    }
}

/// Rank of a family of vectors.
pub fn rank_of(vectors: impl IntoIterator<Item = Bits>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        let _ = e.insert(v, Bits::default());
    }
    e.rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize)>,
}

impl TryFrom<RawMatrix> for Gf2Matrix {
    type Error = Gf2Error;
    fn try_from(r: RawMatrix) -> Result<Self, Gf2Error> {
        Gf2Matrix::from_entries(r.rows, r.cols, r.entries)
    }
}

impl From<Gf2Matrix> for RawMatrix {
    fn from(m: Gf2Matrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.into_iter().collect(),
        }
    }
}

impl Gf2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            cols,
            entries: BTreeSet::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Repeated positions cancel in pairs.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self, Gf2Error>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Gf2Matrix::zero(rows, cols);
        for (r, c) in entries {
            m.toggle(r, c)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.entries.contains(&(r, c))
    }

    pub fn toggle(&mut self, r: usize, c: usize) -> Result<(), Gf2Error> {
        if r >= self.rows || c >= self.cols {
            return Err(Gf2Error::OutOfBounds {
                row: r,
                col: c,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.entries.remove(&(r, c)) {
            self.entries.insert((r, c));
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row indices of each column.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for &(r, c) in &self.entries {
            cols[c].push(r);
        }
        cols
    }

    pub fn column_bits(&self) -> Vec<Bits> {
        let mut cols = vec![Bits::zeros(self.rows); self.cols];
        for &(r, c) in &self.entries {
            cols[c].flip(r);
        }
        cols
    }

    pub fn row_bits(&self) -> Vec<Bits> {
        let mut rows = vec![Bits::zeros(self.cols); self.rows];
        for &(r, c) in &self.entries {
            rows[r].flip(c);
        }
        rows
    }

    pub fn transpose(&self) -> Self {
        Gf2Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|&(r, c)| (c, r)).collect(),
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mine = self.columns();
        let mut out = Gf2Matrix::zero(self.rows, other.cols);
        for (c, col) in other.columns().into_iter().enumerate() {
            let mut acc = Bits::zeros(self.rows);
            for k in col {
                for &r in &mine[k] {
                    acc.flip(r);
                }
            }
            for r in acc.ones() {
                out.entries.insert((r, c));
            }
        }
        Ok(out)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Bits]) -> Self {
        let mut m = Gf2Matrix::zero(rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            for r in v.ones() {
                m.entries.insert((r, c));
            }
        }
        m
    }
}

/// Rank over GF(2), by elimination on dense bitset rows.
pub fn rank_gf2(m: &Gf2Matrix) -> usize {
    rank_of(m.row_bits())
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedBasis {
    generators: Vec<(String, i64)>,
    index: HashMap<String, usize>,
}

impl GradedBasis {
    pub fn new(generators: Vec<(String, i64)>) -> Result<Self, Gf2Error> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, (id, _)) in generators.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Gf2Error::DuplicateId(id.clone()));
            }
        }
        Ok(GradedBasis { generators, index })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.generators[i].0
    }

    pub fn grading(&self, i: usize) -> i64 {
        self.generators[i].1
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.generators.iter().map(|(s, g)| (s.as_str(), *g))
    }

    pub fn gradings(&self) -> BTreeSet<i64> {
        self.generators.iter().map(|g| g.1).collect()
    }

    /// Generator indices grouped by grading, in insertion order.
    pub fn by_grading(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, (_, g)) in self.generators.iter().enumerate() {
            out.entry(*g).or_default().push(i);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex", into = "RawComplex")]
pub struct ChainComplex {
    basis: GradedBasis,
    differential: Gf2Matrix,
}

#[derive(Serialize, Deserialize)]
struct RawGenerator {
    id: String,
    grading: i64,
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    generators: Vec<RawGenerator>,
    /// (row, col): the boundary of generator `col` contains generator `row`.
    differential: Vec<(usize, usize)>,
}

impl TryFrom<RawComplex> for ChainComplex {
    type Error = Gf2Error;
    fn try_from(r: RawComplex) -> Result<Self, Gf2Error> {
        let n = r.generators.len();
        let basis = GradedBasis::new(r.generators.into_iter().map(|g| (g.id, g.grading)).collect())?;
        ChainComplex::new(basis, Gf2Matrix::from_entries(n, n, r.differential)?)
    }
}

impl From<ChainComplex> for RawComplex {
    fn from(c: ChainComplex) -> Self {
        RawComplex {
            generators: c
                .basis
                .generators
                .into_iter()
                .map(|(id, grading)| RawGenerator { id, grading })
                .collect(),
            differential: c.differential.entries.into_iter().collect(),
        }
    }
}

impl ChainComplex {
    /// Checks shape, that every entry lowers grading by one, and d∘d = 0.
    pub fn new(basis: GradedBasis, differential: Gf2Matrix) -> Result<Self, Gf2Error> {
        let n = basis.len();
        if differential.rows != n || differential.cols != n {
            return Err(Gf2Error::DimensionMismatch(format!(
                "differential is {}x{} on {} generators",
                differential.rows, differential.cols, n
            )));
        }
        for (r, c) in differential.entries() {
            if basis.grading(r) != basis.grading(c) - 1 {
                return Err(Gf2Error::InvalidComplex(format!(
                    "d({}) hits {} in grading {} (expected {})",
                    basis.id(c),
                    basis.id(r),
                    basis.grading(r),
                    basis.grading(c) - 1
                )));
            }
        }
        let sq = differential.mul(&differential)?;
        if let Some((r, c)) = sq.entries().next() {
            return Err(Gf2Error::InvalidComplex(format!(
                "d^2 != 0: d^2({}) contains {}",
                basis.id(c),
                basis.id(r)
            )));
        }
        Ok(ChainComplex {
            basis,
            differential,
        })
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn differential(&self) -> &Gf2Matrix {
        &self.differential
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .map(|(_, g)| if g.rem_euclid(2) == 0 { 1 } else { -1 })
            .sum()
    }

    /// Boundary of generator `c` restricted to grading `c - 1`, as local
    /// coordinates of `target` (global index -> local index).
    fn boundary_local(&self, cols: &[Vec<usize>], c: usize, local: &[usize], width: usize) -> Bits {
        Bits::from_ones(width, cols[c].iter().map(|&r| local[r]))
    }
}

fn local_indices(basis: &GradedBasis) -> (BTreeMap<i64, Vec<usize>>, Vec<usize>) {
    let groups = basis.by_grading();
    let mut local = vec![0; basis.len()];
    for gens in groups.values() {
        for (j, &g) in gens.iter().enumerate() {
            local[g] = j;
        }
    }
    (groups, local)
}

/// Homology ranks per grading; every grading that carries generators is
/// listed, zeros included.
pub fn homology(c: &ChainComplex) -> BTreeMap<i64, usize> {
    let (groups, local) = local_indices(&c.basis);
    let cols = c.differential.columns();
    let empty = Vec::new();
    let rank_out: BTreeMap<i64, usize> = groups
        .iter()
        .map(|(&k, gens)| {
            let width = groups.get(&(k - 1)).unwrap_or(&empty).len();
            let r = rank_of(gens.iter().map(|&g| c.boundary_local(&cols, g, &local, width)));
            (k, r)
        })
        .collect();
    groups
        .iter()
        .map(|(&k, gens)| {
            let incoming = rank_out.get(&(k + 1)).copied().unwrap_or(0);
            (k, gens.len() - rank_out[&k] - incoming)
        })
        .collect()
}

/// Total rank, `dim - 2 rank(d)`.
pub fn total_rank(c: &ChainComplex) -> usize {
    c.dim() - 2 * rank_gf2(&c.differential)
}

#[derive(Clone, Debug)]
struct GradeHomology {
    gens: Vec<usize>,
    reps: Vec<Bits>,
    /// Spans the cycles; tags give homology coordinates.
    cycles: Echelon,
}

/// Explicit homology bases: one cycle representative per class, and a
/// reduction that reads off the class of any cycle.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    grades: BTreeMap<i64, GradeHomology>,
    local: Vec<usize>,
    grading_of: Vec<i64>,
}

impl HomologyBasis {
    pub fn new(c: &ChainComplex) -> Self {
        let (groups, local) = local_indices(&c.basis);
        let cols = c.differential.columns();
        let empty = Vec::new();
        let mut grades = BTreeMap::new();
        for (&k, gens) in &groups {
            let below = groups.get(&(k - 1)).unwrap_or(&empty).len();
            let mut kernel_finder = Echelon::new();
            let mut kernel = Vec::new();
            for (j, &g) in gens.iter().enumerate() {
                let v = c.boundary_local(&cols, g, &local, below);
                if let Err(rel) = kernel_finder.insert(v, Bits::unit(gens.len(), j)) {
                    kernel.push(rel);
                }
            }
            let width = kernel.len();
            let mut cycles = Echelon::new();
            for &g in groups.get(&(k + 1)).unwrap_or(&empty) {
                let b = c.boundary_local(&cols, g, &local, gens.len());
                let _ = cycles.insert(b, Bits::zeros(width));
            }
            let mut reps: Vec<Bits> = Vec::new();
            for z in kernel {
                let mut rem = z.clone();
                let mut tag = Bits::zeros(width);
                cycles.reduce(&mut rem, &mut tag);
                if !rem.is_zero() {
                    tag.flip(reps.len());
                    reps.push(z);
                    cycles
                        .insert(rem, tag)
                        .expect("nonzero remainder is independent");
                }
            }
            grades.insert(
                k,
                GradeHomology {
                    gens: gens.clone(),
                    reps,
                    cycles,
                },
            );
        }
        HomologyBasis {
            grades,
            local,
            grading_of: c.basis.iter().map(|(_, g)| g).collect(),
        }
    }

    pub fn rank(&self, k: i64) -> usize {
        self.grades.get(&k).map_or(0, |g| g.reps.len())
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.grades.iter().map(|(&k, g)| (k, g.reps.len())).collect()
    }

    /// Representative of the `i`-th class in grading `k`, as global
    /// generator indices.
    pub fn representative(&self, k: i64, i: usize) -> Vec<usize> {
        let g = &self.grades[&k];
        g.reps[i].ones().map(|j| g.gens[j]).collect()
    }

    /// Homology coordinates of a chain given as global generator indices
    /// (repeats cancel). `None` if the chain is not a cycle in grading `k`.
    pub fn class_of(&self, k: i64, chain: &[usize]) -> Option<Bits> {
        let Some(g) = self.grades.get(&k) else {
            return chain_is_zero(chain).then(Bits::default);
        };
        let mut v = Bits::zeros(g.gens.len());
        for &x in chain {
            if self.grading_of.get(x) != Some(&k) {
                return None;
            }
            v.flip(self.local[x]);
        }
        let mut tag = Bits::zeros(g.reps.len());
        g.cycles.reduce(&mut v, &mut tag);
        v.is_zero().then_some(tag)
    }
}

fn chain_is_zero(chain: &[usize]) -> bool {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &x in chain {
        *counts.entry(x).or_default() += 1;
    }
    counts.values().all(|c| c % 2 == 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    matrix: Gf2Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMapCheck {
    pub holds: bool,
    pub violating: Option<String>,
}

impl ChainMap {
    /// Shape is checked here; grading and commutation by `verify_chain_map`.
    pub fn new(source: ChainComplex, target: ChainComplex, matrix: Gf2Matrix) -> Result<Self, Gf2Error> {
        if matrix.rows != target.dim() || matrix.cols != source.dim() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "map is {}x{}, source has {} and target {} generators",
                matrix.rows,
                matrix.cols,
                source.dim(),
                target.dim()
            )));
        }
        Ok(ChainMap {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: ChainComplex, target: ChainComplex) -> Self {
        let m = Gf2Matrix::zero(target.dim(), source.dim());
        ChainMap {
            source,
            target,
            matrix: m,
        }
    }

    pub fn identity(c: ChainComplex) -> Self {
        let m = Gf2Matrix::identity(c.dim());
        ChainMap {
            source: c.clone(),
            target: c,
            matrix: m,
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn matrix(&self) -> &Gf2Matrix {
        &self.matrix
    }

    /// Map on homology in grading `k`: columns are source classes, rows
    /// target classes.
    pub fn induced(&self, src: &HomologyBasis, tgt: &HomologyBasis, k: i64) -> Gf2Matrix {
        let cols = self.matrix.columns();
        let images: Vec<Bits> = (0..src.rank(k))
            .map(|i| {
                let mut chain = Vec::new();
                for g in src.representative(k, i) {
                    chain.extend_from_slice(&cols[g]);
                }
                tgt.class_of(k, &chain)
                    .expect("chain map sends cycles to cycles")
            })
            .collect();
        Gf2Matrix::from_columns(tgt.rank(k), &images)
    }
}

/// Checks grading preservation and d_T f = f d_S generator by generator.
pub fn verify_chain_map(f: &ChainMap) -> ChainMapCheck {
    let s = f.source.basis();
    let t = f.target.basis();
    let fail = |c: usize| ChainMapCheck {
        holds: false,
        violating: Some(s.id(c).to_string()),
    };
    let fcols = f.matrix.column_bits();
    let dt = f.target.differential.columns();
    let ds = f.source.differential.columns();
    for c in 0..s.len() {
        if fcols[c].ones().any(|r| t.grading(r) != s.grading(c)) {
            return fail(c);
        }
        let mut lhs = Bits::zeros(t.len());
        for r in fcols[c].ones() {
            for &q in &dt[r] {
                lhs.flip(q);
            }
        }
        let mut rhs = Bits::zeros(t.len());
        for &b in &ds[c] {
            rhs.xor(&fcols[b]);
        }
        if lhs != rhs {
            return fail(c);
        }
    }
    ChainMapCheck {
        holds: true,
        violating: None,
    }
}

/// d = P E P^-1 with E a sum of elementary pieces; P grading-preserving.
pub fn random_complex<R: Rng>(rng: &mut R, dim: usize, spread: i64) -> ChainComplex {
    let grades: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..spread)).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by_key(|&i| grades[i]);
    let mut e = Gf2Matrix::zero(dim, dim);
    let mut used = vec![false; dim];
    for &a in &order {
        if used[a] || rng.gen_bool(0.3) {
            continue;
        }
        if let Some(&b) = order.iter().find(|&&b| !used[b] && b != a && grades[b] == grades[a] - 1) {
            used[a] = true;
            used[b] = true;
            e.toggle(b, a).unwrap();
        }
    }
    let mut p = Gf2Matrix::identity(dim);
    let mut pinv = Gf2Matrix::identity(dim);
    for _ in 0..dim * 3 {
        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i != j && grades[i] == grades[j] {
            // elementary row op adds row j to row i; inverse is itself
            let t = Gf2Matrix::from_entries(dim, dim, (0..dim).map(|x| (x, x)).chain([(i, j)])).unwrap();
            p = t.mul(&p).unwrap();
            pinv = pinv.mul(&t).unwrap();
        }
    }
    let d = p.mul(&e).unwrap().mul(&pinv).unwrap();
    let b = GradedBasis::new((0..dim).map(|i| (format!("g{i}"), grades[i])).collect()).unwrap();
    ChainComplex::new(b, d).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis(gs: &[(&str, i64)]) -> GradedBasis {
        GradedBasis::new(gs.iter().map(|(s, g)| (s.to_string(), *g)).collect()).unwrap()
    }

    // Row space by closing under xor, counted exhaustively.
    fn brute_rank(rows: &[u32]) -> usize {
        let mut span = BTreeSet::from([0u32]);
        for &r in rows {
            let extra: Vec<u32> = span.iter().map(|s| s ^ r).collect();
            span.extend(extra);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(rank_gf2(&Gf2Matrix::zero(3, 3)), 0);
        assert_eq!(rank_gf2(&Gf2Matrix::identity(4)), 4);
    }

    #[test]
    fn rank_matches_row_space_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rows: Vec<u32> = (0..8).map(|_| rng.gen_range(0..256)).collect();
            let m = Gf2Matrix::from_entries(
                8,
                8,
                rows.iter()
                    .enumerate()
                    .flat_map(|(r, &bits)| (0..8).filter(move |c| bits >> c & 1 == 1).map(move |c| (r, c))),
            )
            .unwrap();
            assert_eq!(rank_gf2(&m), brute_rank(&rows));
        }
    }

    #[test]
    fn homology_of_small_complexes() {
        let c = ChainComplex::new(basis(&[("a", 0), ("b", 0), ("c", 0)]), Gf2Matrix::zero(3, 3)).unwrap();
        assert_eq!(homology(&c), BTreeMap::from([(0, 3)]));
        let c = ChainComplex::new(
            basis(&[("a", 1), ("b", 0)]),
            Gf2Matrix::from_entries(2, 2, [(1, 0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(homology(&c), BTreeMap::from([(0, 0), (1, 0)]));
        assert_eq!(total_rank(&c), 0);
    }

    #[test]
    fn rejects_bad_differentials() {
        let err = ChainComplex::new(
            basis(&[("a", 1), ("b", 1)]),
            Gf2Matrix::from_entries(2, 2, [(1, 0)]).unwrap(),
        );
        assert!(matches!(err, Err(Gf2Error::InvalidComplex(_))));
        // a -> b -> c with d^2 a = c
        let err = ChainComplex::new(
            basis(&[("a", 2), ("b", 1), ("c", 0)]),
            Gf2Matrix::from_entries(3, 3, [(1, 0), (2, 1)]).unwrap(),
        );
        assert!(matches!(err, Err(Gf2Error::InvalidComplex(_))));
        assert!(matches!(
            GradedBasis::new(vec![("a".into(), 0), ("a".into(), 1)]),
            Err(Gf2Error::DuplicateId(_))
        ));
    }

    // Independent oracle: enumerate all chains of each grading, collect
    // cycles and boundaries as sets, and compare log2 of their sizes.
    fn brute_homology(c: &ChainComplex) -> BTreeMap<i64, usize> {
        let groups = c.basis().by_grading();
        let cols = c.differential().columns();
        let mut out = BTreeMap::new();
        for (&k, gens) in &groups {
            let apply = |mask: u32, gens: &[usize]| -> BTreeSet<usize> {
                let mut s = BTreeSet::new();
                for (j, &g) in gens.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        for &r in &cols[g] {
                            if !s.remove(&r) {
                                s.insert(r);
                            }
                        }
                    }
                }
                s
            };
            let cycles = (0u32..1 << gens.len()).filter(|&m| apply(m, gens).is_empty()).count();
            let above = groups.get(&(k + 1)).cloned().unwrap_or_default();
            let bounds: BTreeSet<Vec<usize>> = (0u32..1 << above.len())
                .map(|m| apply(m, &above).into_iter().collect())
                .collect();
            out.insert(k, (cycles.trailing_zeros() - bounds.len().trailing_zeros()) as usize);
        }
        out
    }

    #[test]
    fn homology_matches_subspace_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let c = random_complex(&mut rng, 12, 4);
            assert_eq!(homology(&c), brute_homology(&c));
            let total: usize = homology(&c).values().sum();
            assert_eq!(total, total_rank(&c));
        }
    }

    #[test]
    fn homology_basis_agrees_with_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let c = random_complex(&mut rng, 14, 5);
            let hb = HomologyBasis::new(&c);
            assert_eq!(hb.ranks(), homology(&c));
            for (k, r) in hb.ranks() {
                for i in 0..r {
                    let rep = hb.representative(k, i);
                    let cls = hb.class_of(k, &rep).unwrap();
                    assert_eq!(cls, Bits::unit(r, i));
                }
            }
        }
    }

    #[test]
    fn chain_map_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_complex(&mut rng, 8, 3);
        assert!(verify_chain_map(&ChainMap::identity(c.clone())).holds);
        assert!(verify_chain_map(&ChainMap::zero(c.clone(), c)).holds);

        // source: cycle z in grading 1; target: u (1) -> v (0).
        // z |-> u is not a chain map: d(f z) = v but f(d z) = 0.
        let src = ChainComplex::new(basis(&[("z", 1)]), Gf2Matrix::zero(1, 1)).unwrap();
        let tgt = ChainComplex::new(
            basis(&[("u", 1), ("v", 0), ("w", 1)]),
            Gf2Matrix::from_entries(3, 3, [(1, 0)]).unwrap(),
        )
        .unwrap();
        let bad = ChainMap::new(src.clone(), tgt.clone(), Gf2Matrix::from_entries(3, 1, [(0, 0)]).unwrap()).unwrap();
        assert_eq!(
            verify_chain_map(&bad),
            ChainMapCheck {
                holds: false,
                violating: Some("z".into())
            }
        );
        let good = ChainMap::new(src, tgt, Gf2Matrix::from_entries(3, 1, [(2, 0)]).unwrap()).unwrap();
        assert!(verify_chain_map(&good).holds);
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_complex(&mut rng, 10, 3);
        let s = serde_json::to_string(&c).unwrap();
        let back: ChainComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"generators":[{"id":"a","grading":0}],"differential":[[0,0]]}"#;
        assert!(serde_json::from_str::<ChainComplex>(bad).is_err());
    }

    proptest::proptest! {
        #[test]
        fn homology_invariant_under_permutation(seed in 0u64..500, rot in 0usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_complex(&mut rng, 12, 4);
            let n = c.dim();
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let b = GradedBasis::new((0..n).map(|i| {
                let j = perm[i];
                (c.basis().id(j).to_string(), c.basis().grading(j))
            }).collect()).unwrap();
            let mut inv = vec![0; n];
            for (i, &j) in perm.iter().enumerate() { inv[j] = i; }
            let d = Gf2Matrix::from_entries(n, n, c.differential().entries().map(|(r, k)| (inv[r], inv[k]))).unwrap();
            let p = ChainComplex::new(b, d).unwrap();
            proptest::prop_assert_eq!(homology(&p), homology(&c));
        }

        #[test]
        fn rank_nullity_per_grading(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_complex(&mut rng, 14, 4);
            let groups = c.basis().by_grading();
            let cols = c.differential().column_bits();
            for gens in groups.values() {
                let r = rank_of(gens.iter().map(|&g| cols[g].clone()));
                let mut e = Echelon::new();
                let mut kernel = 0;
                for (j, &g) in gens.iter().enumerate() {
                    if e.insert(cols[g].clone(), Bits::unit(gens.len(), j)).is_err() { kernel += 1; }
                }
                proptest::prop_assert_eq!(r + kernel, gens.len());
            }
        }
    }
}
