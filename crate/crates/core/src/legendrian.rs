//! Legendrian fronts in standard contact R³ as event sequences read left to
//! right, their classical invariants, zigzag (de)stabilizations and the
//! vanishing test for the Legendrian invariant.
//!
//! Conventions. Strand positions count from the bottom. At `cross i` the
//! strand of negative slope (from position i+1 to i) is in front. A crossing
//! is positive when both strands travel in the same horizontal direction.
//! tb = writhe − cusps/2 and rot = (down cusps − up cusps)/2, where a cusp is
//! down when it is traversed from its upper branch. With this choice S₊ adds
//! two down cusps. The opposite sign for rot is also in use and flips A(L).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knotpoly::{KnotPolyError, LinkDiagram};
use crate::ranks::BigradedRanks;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LegendrianError {
    #[error("malformed front: {0}")]
    MalformedFront(String),
}

fn malformed(msg: impl Into<String>) -> LegendrianError {
    LegendrianError::MalformedFront(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontEvent {
    Open(usize),
    Cross(usize),
    Close(usize),
}

impl fmt::Display for FrontEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontEvent::Open(i) => write!(f, "open {i}"),
            FrontEvent::Cross(i) => write!(f, "cross {i}"),
            FrontEvent::Close(i) => write!(f, "close {i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for StabSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabSign::Plus => "+",
            StabSign::Minus => "-",
        })
    }
}

/// A closed one-component front. The orientation is canonical (leave the
/// first left cusp along its upper branch) unless `reversed`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrontDiagram {
    events: Vec<FrontEvent>,
    reversed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rot: i64,
}

/// Gradings stored doubled so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LossGradings {
    pub twice_alexander: i64,
    pub twice_maslov: i64,
}

impl LossGradings {
    pub fn alexander(&self) -> Option<i64> {
        (self.twice_alexander % 2 == 0).then_some(self.twice_alexander / 2)
    }

    pub fn maslov(&self) -> Option<i64> {
        (self.twice_maslov % 2 == 0).then_some(self.twice_maslov / 2)
    }
}

impl Serialize for LossGradings {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let half = |v: i64| v as f64 / 2.0;
        let mut st = s.serialize_struct("LossGradings", 2)?;
        match self.alexander() {
            Some(a) => st.serialize_field("alexander", &a)?,
            None => st.serialize_field("alexander", &half(self.twice_alexander))?,
        }
        match self.maslov() {
            Some(m) => st.serialize_field("maslov", &m)?,
            None => st.serialize_field("maslov", &half(self.twice_maslov))?,
        }
        st.end()
    }
}

impl fmt::Display for LossGradings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: i64| if v % 2 == 0 { format!("{}", v / 2) } else { format!("{}/2", v) };
        write!(f, "(A, M) = ({}, {})", show(self.twice_alexander), show(self.twice_maslov))
    }
}

/// A removable zigzag: events `at` and `at + 1` are the left and right cusp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZigzagWitness {
    pub at: usize,
    pub sign: StabSign,
    pub reversed: bool,
}

impl fmt::Display for ZigzagWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{} zigzag at events {}-{}", self.sign, self.at, self.at + 1)?;
        if self.reversed {
            write!(f, " (reversed orientation)")?;
        }
        Ok(())
    }
}

// Ports: open/close 0 = lower branch, 1 = upper; crossing 0/1 lower/upper on
// the left, 2/3 lower/upper on the right.
type Port = (usize, u8);

#[derive(Clone, Debug, Default)]
struct Trace {
    /// (event, is_over, moving_right) in traversal order
    passes: Vec<(usize, bool, bool)>,
    /// (event, down) for each cusp in traversal order
    cusps: Vec<(usize, bool)>,
}

impl FrontDiagram {
    pub fn new(events: Vec<FrontEvent>) -> Result<Self, LegendrianError> {
        let f = FrontDiagram { events, reversed: false };
        f.trace()?;
        Ok(f)
    }

    pub fn events(&self) -> &[FrontEvent] {
        &self.events
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn reverse(&self) -> Self {
        FrontDiagram { events: self.events.clone(), reversed: !self.reversed }
    }

    pub fn with_orientation(&self, reversed: bool) -> Self {
        FrontDiagram { events: self.events.clone(), reversed }
    }

    pub fn crossings(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, FrontEvent::Cross(_))).count()
    }

    pub fn cusps(&self) -> usize {
        self.events.len() - self.crossings()
    }

    /// Checks strand bookkeeping and returns, for every event, the edges
    /// meeting it: edge e runs from `left[e]` to `right[e]`.
    fn edges(&self) -> Result<(Vec<Port>, Vec<Port>), LegendrianError> {
        if self.events.is_empty() {
            return Err(malformed("empty front"));
        }
        let mut active: Vec<usize> = Vec::new();
        let mut left: Vec<Port> = Vec::new();
        let mut right: Vec<Port> = vec![];
        let new_edge = |left: &mut Vec<Port>, right: &mut Vec<Port>, p: Port| {
            left.push(p);
            right.push((usize::MAX, 0));
            left.len() - 1
        };
        for (k, ev) in self.events.iter().enumerate() {
            let n = active.len();
            match *ev {
                FrontEvent::Open(i) => {
                    if i > n {
                        return Err(malformed(format!("event {k}: open {i} with {n} strands")));
                    }
                    let a = new_edge(&mut left, &mut right, (k, 0));
                    let b = new_edge(&mut left, &mut right, (k, 1));
                    active.splice(i..i, [a, b]);
                }
                FrontEvent::Cross(i) | FrontEvent::Close(i) => {
                    if i + 1 >= n {
                        return Err(malformed(format!("event {k}: {ev} with {n} strands")));
                    }
                    right[active[i]] = (k, 0);
                    right[active[i + 1]] = (k, 1);
                    if let FrontEvent::Cross(_) = ev {
                        active[i] = new_edge(&mut left, &mut right, (k, 2));
                        active[i + 1] = new_edge(&mut left, &mut right, (k, 3));
                    } else {
                        active.drain(i..i + 2);
                    }
                }
            }
            if active.is_empty() && k + 1 < self.events.len() {
                return Err(malformed(format!("front closes up at event {k} before the end")));
            }
        }
        if !active.is_empty() {
            return Err(malformed(format!("{} strands left open", active.len())));
        }
        Ok((left, right))
    }

    /// Walks the knot once in the canonical orientation.
    fn trace(&self) -> Result<Trace, LegendrianError> {
        let (left, right) = self.edges()?;
        let m = left.len();
        let mut at_left = std::collections::HashMap::new();
        let mut at_right = std::collections::HashMap::new();
        for e in 0..m {
            at_left.insert(left[e], e);
            at_right.insert(right[e], e);
        }
        let mut tr = Trace::default();
        // start on the upper branch of the first cusp, moving right
        let start = at_left[&(0, 1)];
        let (mut e, mut rightward) = (start, true);
        let mut seen = 0;
        loop {
            seen += 1;
            let (k, slot) = if rightward { right[e] } else { left[e] };
            match self.events[k] {
                FrontEvent::Cross(_) => {
                    let over = matches!(slot, 1 | 2);
                    tr.passes.push((k, over, rightward));
                    let out = match slot {
                        0 => 3,
                        1 => 2,
                        2 => 1,
                        _ => 0,
                    };
                    e = if rightward { at_left[&(k, out)] } else { at_right[&(k, out)] };
                }
                FrontEvent::Open(_) => {
                    tr.cusps.push((k, slot == 1));
                    e = at_left[&(k, 1 - slot)];
                    rightward = true;
                }
                FrontEvent::Close(_) => {
                    tr.cusps.push((k, slot == 1));
                    e = at_right[&(k, 1 - slot)];
                    rightward = false;
                }
            }
            if e == start && rightward {
                break;
            }
            if seen > m {
                return Err(malformed("traversal does not close"));
            }
        }
        if seen != m {
            return Err(malformed("front has more than one component"));
        }
        Ok(tr)
    }

    fn oriented_trace(&self) -> Trace {
        let mut tr = self.trace().expect("validated at construction");
        if self.reversed {
            tr.passes.reverse();
            tr.cusps.reverse();
            for p in &mut tr.passes {
                p.2 = !p.2;
            }
            for c in &mut tr.cusps {
                c.1 = !c.1;
            }
        }
        tr
    }

    pub fn writhe(&self) -> i64 {
        let tr = self.trace().expect("validated at construction");
        let mut dir = std::collections::HashMap::new();
        for &(k, over, r) in &tr.passes {
            dir.entry(k).or_insert_with(Vec::new).push((over, r));
        }
        dir.values().map(|v| if v[0].1 == v[1].1 { 1 } else { -1 }).sum()
    }

    /// The underlying smooth knot, oriented like the front.
    pub fn to_link_diagram(&self) -> Result<LinkDiagram, KnotPolyError> {
        let tr = self.oriented_trace();
        let m = tr.passes.len();
        if m == 0 {
            return Ok(LinkDiagram::unknot());
        }
        // label k enters pass k
        let lab = |k: usize| (k % m) as u32 + 1;
        let mut at: std::collections::BTreeMap<usize, [(u32, u32, bool); 2]> = Default::default();
        for (k, &(ev, over, r)) in tr.passes.iter().enumerate() {
            let slot = at.entry(ev).or_insert([(0, 0, false); 2]);
            slot[over as usize] = (lab(k), lab(k + 1), r);
        }
        let mut pd = Vec::new();
        let mut signs = Vec::new();
        for [(ui, uo, ur), (oi, oo, or)] in at.into_values() {
            if ur == or {
                pd.push([ui, oo, uo, oi]);
                signs.push(1);
            } else {
                pd.push([ui, oi, uo, oo]);
                signs.push(-1);
            }
        }
        LinkDiagram::new(pd, Some(signs), 0)
    }

    /// Inserts a zigzag right after the first event, on the upper branch of
    /// the first cusp.
    pub fn stabilize(&self, sign: StabSign) -> FrontDiagram {
        // the upper branch of the first cusp runs rightward canonically, and a
        // downward zigzag on a rightward strand is S₊
        let down = (sign == StabSign::Plus) != self.reversed;
        let pair = if down {
            [FrontEvent::Open(1), FrontEvent::Close(2)]
        } else {
            [FrontEvent::Open(2), FrontEvent::Close(1)]
        };
        let mut events = self.events.clone();
        events.splice(1..1, pair);
        FrontDiagram { events, reversed: self.reversed }
    }

    /// Zigzags written as a left cusp immediately followed by the right cusp
    /// that cancels it, in this orientation.
    pub fn zigzags(&self) -> Vec<ZigzagWitness> {
        let tr = self.oriented_trace();
        let down: std::collections::HashMap<usize, bool> = tr.cusps.iter().copied().collect();
        let mut out = Vec::new();
        for k in 0..self.events.len().saturating_sub(1) {
            let hit = match (self.events[k], self.events[k + 1]) {
                (FrontEvent::Open(i), FrontEvent::Close(j)) => j == i + 1 || i == j + 1,
                _ => false,
            };
            if hit {
                let sign = if down[&k] { StabSign::Plus } else { StabSign::Minus };
                out.push(ZigzagWitness { at: k, sign, reversed: self.reversed });
            }
        }
        out
    }

    /// Removes a zigzag found by `zigzags`.
    pub fn destabilize(&self, w: &ZigzagWitness) -> Result<FrontDiagram, LegendrianError> {
        if !self.with_orientation(w.reversed).zigzags().contains(w) {
            return Err(malformed(format!("no {w}")));
        }
        let mut events = self.events.clone();
        events.drain(w.at..w.at + 2);
        // a zigzag never starts at event 0, so the canonical start survives
        Ok(FrontDiagram::new(events)?.with_orientation(self.reversed))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.reversed {
            s.push_str("reverse\n");
        }
        for e in &self.events {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for FrontDiagram {
    type Err = LegendrianError;

    /// One event per line; `#` starts a comment; a line `reverse` flips the
    /// orientation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut events = Vec::new();
        let mut reversed = false;
        for (n, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap();
            if kind == "reverse" {
                reversed = !reversed;
                continue;
            }
            let i: usize = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| malformed(format!("line {}: expected `{kind} <position>`", n + 1)))?;
            if words.next().is_some() {
                return Err(malformed(format!("line {}: trailing input", n + 1)));
            }
            events.push(match kind {
                "open" => FrontEvent::Open(i),
                "cross" => FrontEvent::Cross(i),
                "close" => FrontEvent::Close(i),
                _ => return Err(malformed(format!("line {}: unknown event `{kind}`", n + 1))),
            });
        }
        Ok(FrontDiagram::new(events)?.with_orientation(reversed))
    }
}

pub fn classical_invariants(f: &FrontDiagram) -> ClassicalInvariants {
    let tr = f.oriented_trace();
    let down = tr.cusps.iter().filter(|c| c.1).count() as i64;
    let up = tr.cusps.len() as i64 - down;
    ClassicalInvariants { tb: f.writhe() - tr.cusps.len() as i64 / 2, rot: (down - up) / 2 }
}

pub fn stabilize(f: &FrontDiagram, sign: StabSign) -> FrontDiagram {
    f.stabilize(sign)
}

/// A zigzag in this orientation, preferring S₊. Sound but incomplete.
pub fn detect_destabilizable(f: &FrontDiagram) -> Option<ZigzagWitness> {
    let zs = f.zigzags();
    zs.iter().find(|w| w.sign == StabSign::Plus).or(zs.first()).copied()
}

/// 2A = tb − rot + 1 and M = 2A − d₃ with d₃ = 0.
pub fn loss_gradings(ci: ClassicalInvariants) -> LossGradings {
    let twice_a = ci.tb - ci.rot + 1;
    LossGradings { twice_alexander: twice_a, twice_maslov: 2 * twice_a }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "VANISHES")]
    Vanishes,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Vanishes => "VANISHES",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossReason {
    PositiveStabilization,
    ZeroGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LossCertificate {
    pub verdict: Verdict,
    /// Every reason that applies, strongest first: a zigzag does not depend
    /// on grading conventions or on the supplied table.
    pub reasons: Vec<LossReason>,
    pub invariants: ClassicalInvariants,
    pub gradings: LossGradings,
    pub rank_at_gradings: Option<usize>,
    pub witness: Option<ZigzagWitness>,
}

impl LossCertificate {
    pub fn reason(&self) -> Option<LossReason> {
        self.reasons.first().copied()
    }
}

impl fmt::Display for LossCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if !self.reasons.is_empty() {
            let rs: Vec<String> = self.reasons.iter().map(|r| format!("{r:?}")).collect();
            write!(f, "({})", rs.join(", "))?;
        }
        Ok(())
    }
}

/// `hfk` is the table of the mirror of the underlying knot, where the
/// invariant lives.
pub fn loss_vanishing_report(f: &FrontDiagram, hfk: &BigradedRanks) -> LossCertificate {
    let invariants = classical_invariants(f);
    let gradings = loss_gradings(invariants);
    let rank = match (gradings.alexander(), gradings.maslov()) {
        (Some(a), Some(m)) => Some(hfk.get(a, m)),
        _ => None,
    };
    let witness = [false, true].into_iter().find_map(|rev| {
        f.with_orientation(f.reversed != rev).zigzags().into_iter().find(|w| w.sign == StabSign::Plus)
    });
    let mut reasons = Vec::new();
    if witness.is_some() {
        reasons.push(LossReason::PositiveStabilization);
    }
    // a half-integer grading carries no group at all
    if rank.unwrap_or(0) == 0 {
        reasons.push(LossReason::ZeroGroup);
    }
    let verdict = if reasons.is_empty() { Verdict::Inconclusive } else { Verdict::Vanishes };
    LossCertificate { verdict, reasons, invariants, gradings, rank_at_gradings: rank, witness }
}

#[cfg(test)]
mod tests;
