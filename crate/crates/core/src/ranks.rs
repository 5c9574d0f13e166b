//! Rank tables indexed by (Alexander, Maslov).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::knotpoly::LaurentPolynomial;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<RankEntry>", into = "Vec<RankEntry>")]
pub struct BigradedRanks {
    ranks: BTreeMap<(i64, i64), usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub alexander: i64,
    pub maslov: i64,
    pub rank: usize,
}

impl From<Vec<RankEntry>> for BigradedRanks {
    fn from(v: Vec<RankEntry>) -> Self {
        let mut r = BigradedRanks::new();
        for e in v {
            r.add(e.alexander, e.maslov, e.rank);
        }
        r
    }
}

impl From<BigradedRanks> for Vec<RankEntry> {
    fn from(r: BigradedRanks) -> Self {
        r.iter()
            .map(|(alexander, maslov, rank)| RankEntry { alexander, maslov, rank })
            .collect()
    }
}

impl BigradedRanks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, alexander: i64, maslov: i64, rank: usize) {
        if rank == 0 {
            return;
        }
        *self.ranks.entry((alexander, maslov)).or_insert(0) += rank;
    }

    pub fn get(&self, alexander: i64, maslov: i64) -> usize {
        self.ranks.get(&(alexander, maslov)).copied().unwrap_or(0)
    }

    /// Nonzero entries in (alexander, maslov) order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, usize)> + '_ {
        self.ranks.iter().map(|(&(a, m), &r)| (a, m, r))
    }

    pub fn total(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn max_alexander(&self) -> Option<i64> {
        self.ranks.keys().map(|&(a, _)| a).max()
    }

    /// Σ (-1)^M rank · t^A
    pub fn euler(&self) -> LaurentPolynomial {
        let mut p = LaurentPolynomial::zero();
        for (a, m, r) in self.iter() {
            let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(a, sign * r as i64);
        }
        p
    }

    pub fn tensor(&self, other: &BigradedRanks) -> BigradedRanks {
        let mut out = BigradedRanks::new();
        for (a1, m1, r1) in self.iter() {
            for (a2, m2, r2) in other.iter() {
                out.add(a1 + a2, m1 + m2, r1 * r2);
            }
        }
        out
    }

    /// (A, M) -> (-A, -M), the table of the mirror knot.
    pub fn mirror(&self) -> BigradedRanks {
        let mut out = BigradedRanks::new();
        for (a, m, r) in self.iter() {
            out.add(-a, -m, r);
        }
        out
    }

    /// rank(A, M) = rank(-A, M - 2A), the symmetry of knots in S³.
    pub fn is_knot_symmetric(&self) -> bool {
        self.iter().all(|(a, m, r)| self.get(-a, m - 2 * a) == r)
    }
}

impl fmt::Display for BigradedRanks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(a, m, r)| format!("{r}@({a},{m})")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_of_trefoil_tables() {
        let mut t = BigradedRanks::new();
        t.add(1, 0, 1);
        t.add(0, -1, 1);
        t.add(-1, -2, 1);
        let sq = t.tensor(&t);
        assert_eq!(sq.total(), 9);
        assert_eq!(sq.get(0, -2), 3);
        assert_eq!(sq.get(2, 0), 1);
        assert!(sq.is_knot_symmetric());
        assert_eq!(sq.euler(), t.euler().mul(&t.euler()));
    }

    #[test]
    fn json_shape() {
        let mut t = BigradedRanks::new();
        t.add(0, 0, 1);
        t.add(0, 0, 2);
        t.add(5, 5, 0);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"[{"alexander":0,"maslov":0,"rank":3}]"#);
        assert_eq!(serde_json::from_str::<BigradedRanks>(&s).unwrap(), t);
    }
}
