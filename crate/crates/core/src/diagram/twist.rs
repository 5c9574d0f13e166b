//! Twisting β₁ along a curve δ.
//!
//! δ is inserted as an extra β-type curve (splitting the arcs it crosses and
//! cutting the regions it passes through), then the single crossing
//! c = δ ∩ β₁ is resolved. A positive twist joins the two corners at c whose
//! boundary turns from δ onto β₁; z must sit in one of them and w in the
//! other. The remaining two corners keep their shapes. Erasing β₁ instead of resolving gives the (α, δ) diagram.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    parse_curve_name, ArcRef, CombinatorialDiagram, DiagramError, Family, Flavor, Generator, Point, Region, Side,
};
use crate::cone::{mapping_cone, Orientation};
use crate::gf2::{homology, total_rank, ChainComplex, ChainMap, Gf2Matrix, GradedBasis};

fn bad<T>(msg: impl Into<String>) -> Result<T, DiagramError> {
    Err(DiagramError::BadDeltaPosition(msg.into()))
}

/// `[curve, arc, direction]` or `[curve, arc, direction, position]`.
/// Direction +1 crosses from the right of the arc to its left. Positions
/// order several crossings on one arc along its orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaCrossing {
    Plain(String, usize, i64),
    Placed(String, usize, i64, f64),
}

impl DeltaCrossing {
    fn parts(&self) -> (&str, usize, i64, f64) {
        match self {
            DeltaCrossing::Plain(c, a, d) => (c, *a, *d, 0.0),
            DeltaCrossing::Placed(c, a, d, t) => (c, *a, *d, *t),
        }
    }
}

/// What lies to the left of the piece of δ leaving crossing `i`, for the
/// region that piece cuts in two. Everything unlisted goes to the right.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaSegment {
    /// Basepoint labels `z0`, `w0`, ...
    #[serde(default)]
    pub left: Vec<String>,
    /// Other boundary components, named by one of their arc sides.
    #[serde(default)]
    pub left_components: Vec<Side>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaCurve {
    pub crossings: Vec<DeltaCrossing>,
    #[serde(default)]
    pub segments: Vec<DeltaSegment>,
}

/// Directed edge.
type De = (usize, bool);

fn rev((e, f): De) -> De {
    (e, !f)
}

#[derive(Clone, Debug)]
struct Reg {
    name: String,
    comps: Vec<Vec<De>>,
    base: Vec<String>,
}

/// Mutable cell structure with general vertices (including β∩δ).
#[derive(Clone, Debug)]
struct Cx {
    family: Vec<Family>,
    curve_edges: Vec<Vec<usize>>,
    ends: Vec<(Option<usize>, Option<usize>)>,
    edge_curve: Vec<usize>,
    origin: Vec<Option<ArcRef>>,
    vname: Vec<String>,
    regions: Vec<Option<Reg>>,
}

impl Cx {
    fn from_diagram(d: &CombinatorialDiagram) -> (Cx, HashMap<ArcRef, usize>) {
        let mut cx = Cx {
            family: Vec::new(),
            curve_edges: Vec::new(),
            ends: Vec::new(),
            edge_curve: Vec::new(),
            origin: Vec::new(),
            vname: (0..d.points.len()).map(|p| d.point_name(p).to_string()).collect(),
            regions: Vec::new(),
        };
        let mut ids = HashMap::new();
        for f in [Family::Alpha, Family::Beta] {
            for (c, pts) in d.curves(f).iter().enumerate() {
                let cid = cx.family.len();
                cx.family.push(f);
                let mut edges = Vec::new();
                for arc in 0..pts.len().max(1) {
                    let a = ArcRef { family: f, curve: c, arc };
                    let e = cx.ends.len();
                    cx.ends.push(match d.arc_ends(a) {
                        Some((s, t)) => (Some(s), Some(t)),
                        None => (None, None),
                    });
                    cx.edge_curve.push(cid);
                    cx.origin.push(Some(a));
                    ids.insert(a, e);
                    edges.push(e);
                }
                cx.curve_edges.push(edges);
            }
        }
        let mut base: Vec<Vec<String>> = vec![Vec::new(); d.regions.len()];
        for (i, &r) in d.z.iter().enumerate() {
            base[r].push(format!("z{i}"));
        }
        for (i, &r) in d.w.iter().enumerate() {
            base[r].push(format!("w{i}"));
        }
        for (r, reg) in d.regions.iter().enumerate() {
            cx.regions.push(Some(Reg {
                name: reg.name.clone(),
                comps: reg
                    .boundary
                    .iter()
                    .map(|c| c.iter().map(|s| (ids[&s.arc], s.forward)).collect())
                    .collect(),
                base: std::mem::take(&mut base[r]),
            }));
        }
        (cx, ids)
    }

    fn start(&self, (e, f): De) -> Option<usize> {
        if f {
            self.ends[e].0
        } else {
            self.ends[e].1
        }
    }

    fn end(&self, d: De) -> Option<usize> {
        self.start(rev(d))
    }

    fn locate(&self, d: De) -> Option<(usize, usize, usize)> {
        for (r, reg) in self.regions.iter().enumerate() {
            let Some(reg) = reg else { continue };
            for (k, comp) in reg.comps.iter().enumerate() {
                if let Some(i) = comp.iter().position(|&x| x == d) {
                    return Some((r, k, i));
                }
            }
        }
        None
    }

    fn new_vertex(&mut self, name: String) -> usize {
        self.vname.push(name);
        self.vname.len() - 1
    }

    /// Splits edge `e` at a new vertex `v`; returns the piece starting at `v`.
    fn split(&mut self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a.is_none() {
            self.ends[e] = (Some(v), Some(v));
            return e;
        }
        let e2 = self.ends.len();
        self.ends.push((Some(v), b));
        self.edge_curve.push(self.edge_curve[e]);
        self.origin.push(self.origin[e]);
        self.ends[e] = (a, Some(v));
        let c = self.edge_curve[e];
        let at = self.curve_edges[c].iter().position(|&x| x == e).expect("edge on its curve");
        self.curve_edges[c].insert(at + 1, e2);
        for reg in self.regions.iter_mut().flatten() {
            for comp in reg.comps.iter_mut() {
                if let Some(i) = comp.iter().position(|&x| x == (e, true)) {
                    comp.insert(i + 1, (e2, true));
                }
                if let Some(i) = comp.iter().position(|&x| x == (e, false)) {
                    comp.insert(i, (e2, false));
                }
            }
        }
        e2
    }

    fn edge_into(&self, curve: usize, v: usize) -> usize {
        *self.curve_edges[curve].iter().find(|&&e| self.ends[e].1 == Some(v)).expect("vertex on curve")
    }

    fn edge_out_of(&self, curve: usize, v: usize) -> usize {
        *self.curve_edges[curve].iter().find(|&&e| self.ends[e].0 == Some(v)).expect("vertex on curve")
    }

    /// Cuts a region along a new edge `s` running from the junction before
    /// `from` to the junction before `to`.
    fn insert_chord(&mut self, s: usize, from: De, to: De, seg: &DeltaSegment, tag: &str) -> Result<(), DiagramError> {
        let (Some((r1, k1, i1)), Some((r2, k2, i2))) = (self.locate(from), self.locate(to)) else {
            return bad("δ enters a junction that does not exist");
        };
        if r1 != r2 {
            let n1 = &self.regions[r1].as_ref().expect("live").name;
            let n2 = &self.regions[r2].as_ref().expect("live").name;
            return bad(format!("piece {tag} of δ would join regions {n1} and {n2}"));
        }
        let reg = self.regions[r1].as_mut().expect("live");
        if k1 != k2 {
            let c1 = reg.comps[k1].clone();
            let c2 = reg.comps[k2].clone();
            let mut merged: Vec<De> = c1[i1..].iter().chain(&c1[..i1]).copied().collect();
            merged.push((s, true));
            merged.extend(c2[i2..].iter().chain(&c2[..i2]));
            merged.push((s, false));
            let (lo, hi) = (k1.min(k2), k1.max(k2));
            reg.comps.remove(hi);
            reg.comps[lo] = merged;
            return Ok(());
        }
        let comp = reg.comps.remove(k1);
        let n = comp.len();
        let rot: Vec<De> = (0..n).map(|j| comp[(i1 + j) % n]).collect();
        let b = (i2 + n - i1) % n;
        let mut right: Vec<De> = rot[..b].to_vec();
        right.push((s, false));
        let mut left: Vec<De> = rot[b..].to_vec();
        left.push((s, true));

        let mut left_comps = vec![left];
        let mut right_comps = vec![right];
        for c in std::mem::take(&mut reg.comps) {
            let on_left = seg.left_components.iter().any(|side| {
                c.iter()
                    .any(|&(e, f)| f == side.forward && self.origin[e] == Some(side.arc))
            });
            if on_left {
                left_comps.push(c);
            } else {
                right_comps.push(c);
            }
        }
        let reg = self.regions[r1].as_mut().expect("live");
        let (lb, rb): (Vec<String>, Vec<String>) = reg.base.drain(..).partition(|b| seg.left.contains(b));
        let name = reg.name.clone();
        reg.comps = right_comps;
        reg.base = rb;
        self.regions.push(Some(Reg {
            name: format!("{name}/{tag}"),
            comps: left_comps,
            base: lb,
        }));
        Ok(())
    }

    /// Removes an edge, joining whatever lies on its two sides.
    fn erase_edge(&mut self, e: usize) {
        let (r1, k1, i1) = self.locate((e, true)).expect("edge has a left side");
        let (r2, k2, i2) = self.locate((e, false)).expect("edge has a right side");
        if r1 == r2 && k1 == k2 {
            let reg = self.regions[r1].as_mut().expect("live");
            let comp = reg.comps.remove(k1);
            let n = comp.len();
            let rot: Vec<De> = (0..n).map(|j| comp[(i1 + j) % n]).collect();
            let j = (i2 + n - i1) % n;
            for piece in [rot[1..j].to_vec(), rot[j + 1..].to_vec()] {
                if !piece.is_empty() {
                    reg.comps.push(piece);
                }
            }
            return;
        }
        let c1 = self.regions[r1].as_ref().expect("live").comps[k1].clone();
        let c2 = self.regions[r2].as_ref().expect("live").comps[k2].clone();
        let merged: Vec<De> = c1[i1 + 1..]
            .iter()
            .chain(&c1[..i1])
            .chain(&c2[i2 + 1..])
            .chain(&c2[..i2])
            .copied()
            .collect();
        if r1 == r2 {
            let reg = self.regions[r1].as_mut().expect("live");
            let (lo, hi) = (k1.min(k2), k1.max(k2));
            reg.comps.remove(hi);
            reg.comps.remove(lo);
            if !merged.is_empty() {
                reg.comps.push(merged);
            }
        } else {
            let mut other = self.regions[r2].take().expect("live");
            other.comps.remove(k2);
            let reg = self.regions[r1].as_mut().expect("live");
            reg.comps.remove(k1);
            reg.comps.extend(other.comps);
            if !merged.is_empty() {
                reg.comps.push(merged);
            }
            reg.base.extend(other.base);
            reg.name = format!("{}+{}", reg.name, other.name);
        }
    }

    fn region_with(&self, label: &str) -> Option<usize> {
        self.regions
            .iter()
            .position(|r| r.as_ref().is_some_and(|r| r.base.iter().any(|b| b == label)))
    }

    /// Follows a directed edge to the next one along its curve.
    fn next_on_curve(&self, (e, f): De) -> De {
        let edges = &self.curve_edges[self.edge_curve[e]];
        let i = edges.iter().position(|&x| x == e).expect("edge on curve");
        let n = edges.len();
        if f {
            (edges[(i + 1) % n], true)
        } else {
            (edges[(i + n - 1) % n], false)
        }
    }

    /// Converts to a diagram. `alpha`/`beta` give each output curve as a
    /// cyclic directed edge sequence; vertices met once by one α and one β
    /// curve become points, all others dissolve.
    fn to_diagram(&self, genus: u32, alpha: &[Vec<De>], beta: &[Vec<De>]) -> Result<CombinatorialDiagram, DiagramError> {
        let mut hits: HashMap<usize, (usize, usize)> = HashMap::new();
        for (fam, curves) in [(0, alpha), (1, beta)] {
            for seq in curves {
                for &d in seq {
                    if let Some(v) = self.end(d) {
                        let h = hits.entry(v).or_default();
                        if fam == 0 {
                            h.0 += 1
                        } else {
                            h.1 += 1
                        }
                    }
                }
            }
        }
        let live = |v: Option<usize>| v.is_some_and(|v| hits.get(&v) == Some(&(1, 1)));
        let mut point_of: HashMap<usize, usize> = HashMap::new();
        let mut points: Vec<Point> = Vec::new();
        let mut map: HashMap<De, Side> = HashMap::new();
        let mut lists: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
        for (fam, curves) in [(Family::Alpha, alpha), (Family::Beta, beta)] {
            for (ci, seq) in curves.iter().enumerate() {
                let n = seq.len();
                let first = (0..n).find(|&i| live(self.start(seq[i])));
                let mut pts = Vec::new();
                let mut arc = 0;
                for j in 0..n {
                    let d = seq[(first.unwrap_or(0) + j) % n];
                    if first.is_some() && live(self.start(d)) {
                        if j > 0 {
                            arc += 1;
                        }
                        let v = self.start(d).expect("live vertex");
                        let p = *point_of.entry(v).or_insert_with(|| {
                            points.push(Point {
                                alpha: usize::MAX,
                                beta: usize::MAX,
                                name: Some(self.vname[v].clone()),
                            });
                            points.len() - 1
                        });
                        match fam {
                            Family::Alpha => points[p].alpha = ci,
                            Family::Beta => points[p].beta = ci,
                        }
                        pts.push(p);
                    }
                    let a = ArcRef { family: fam, curve: ci, arc };
                    map.insert(d, Side { arc: a, forward: true });
                    map.insert(rev(d), Side { arc: a, forward: false });
                }
                lists[fam as usize].push(pts);
            }
        }
        let mut regions = Vec::new();
        let mut index = HashMap::new();
        for (r, reg) in self.regions.iter().enumerate() {
            let Some(reg) = reg else { continue };
            let mut boundary = Vec::new();
            for comp in &reg.comps {
                let mut sides: Vec<Side> = Vec::new();
                for d in comp {
                    let Some(&s) = map.get(d) else {
                        return bad("a region still borders an erased curve");
                    };
                    if sides.last() != Some(&s) {
                        sides.push(s);
                    }
                }
                while sides.len() > 1 && sides.first() == sides.last() {
                    sides.pop();
                }
                boundary.push(sides);
            }
            index.insert(r, regions.len());
            regions.push(Region {
                name: reg.name.clone(),
                boundary,
            });
        }
        let labelled = |prefix: &str| -> Vec<usize> {
            (0..)
                .map(|i| format!("{prefix}{i}"))
                .map_while(|l| self.region_with(&l).map(|r| index[&r]))
                .collect()
        };
        let [alpha_pts, beta_pts] = lists;
        CombinatorialDiagram::new(genus, alpha_pts, beta_pts, points, regions, labelled("z"), labelled("w"))
    }
}

/// Result of twisting, together with the two diagrams whose complexes
/// should appear as diagonal blocks.
#[derive(Clone, Debug)]
pub struct TwistedDiagram {
    pub twisted: CombinatorialDiagram,
    pub alpha_beta: CombinatorialDiagram,
    pub alpha_delta: CombinatorialDiagram,
    /// Index of the twisted β curve.
    pub beta1: usize,
    /// Names of the α∩δ points.
    pub delta_points: Vec<String>,
}

impl TwistedDiagram {
    /// Whether a twisted generator sits on the δ part of the new curve.
    pub fn is_delta_generator(&self, g: &Generator) -> bool {
        g.0.iter().any(|&p| {
            let pt = &self.twisted.points()[p];
            pt.beta == self.beta1 && self.delta_points.iter().any(|n| Some(n) == pt.name.as_ref())
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistSign {
    Positive,
    Negative,
}

/// Positive twist of β₁ along δ. z must lie in one of the two corners at
/// δ ∩ β₁ that the twist joins, and w in the other.
pub fn dehn_twist_beta1(d: &CombinatorialDiagram, delta: &DeltaCurve) -> Result<TwistedDiagram, DiagramError> {
    dehn_twist(d, delta, TwistSign::Positive)
}

pub fn dehn_twist(d: &CombinatorialDiagram, delta: &DeltaCurve, sign: TwistSign) -> Result<TwistedDiagram, DiagramError> {
    let (mut cx, ids) = Cx::from_diagram(d);
    let m = delta.crossings.len();
    if m == 0 {
        return bad("δ must cross something");
    }
    let mut resolved = Vec::with_capacity(m);
    for c in &delta.crossings {
        let (name, arc, dir, t) = c.parts();
        let (family, curve) = parse_curve_name(name).ok_or_else(|| DiagramError::Malformed(format!("bad curve {name:?}")))?;
        let a = ArcRef { family, curve, arc };
        if !ids.contains_key(&a) {
            return Err(DiagramError::Malformed(format!("δ crosses unknown arc {name}:{arc}")));
        }
        if dir != 1 && dir != -1 {
            return Err(DiagramError::Malformed("crossing direction must be 1 or -1".into()));
        }
        resolved.push((a, dir, t));
    }
    let beta_hits: Vec<usize> = (0..m).filter(|&i| resolved[i].0.family == Family::Beta).collect();
    if beta_hits.len() != 1 {
        return bad(format!("δ must meet the β curves exactly once, found {}", beta_hits.len()));
    }
    let ic = beta_hits[0];
    let beta1 = resolved[ic].0.curve;

    let taken: HashSet<&str> = (0..d.points.len()).map(|p| d.point_name(p)).collect();
    let prefix = ["d", "delta", "dd"].into_iter().find(|p| !taken.iter().any(|n| n.starts_with(p))).unwrap_or("δ");
    let mut verts = vec![0; m];
    let mut delta_points = Vec::new();
    for i in 0..m {
        verts[i] = if i == ic {
            cx.new_vertex("c".into())
        } else {
            let name = format!("{prefix}{}", delta_points.len());
            delta_points.push(name.clone());
            cx.new_vertex(name)
        };
    }
    let mut by_arc: BTreeMap<ArcRef, Vec<usize>> = BTreeMap::new();
    for (i, &(a, _, _)) in resolved.iter().enumerate() {
        by_arc.entry(a).or_default().push(i);
    }
    for (a, mut list) in by_arc {
        list.sort_by(|&x, &y| resolved[x].2.total_cmp(&resolved[y].2));
        if list.windows(2).any(|w| resolved[w[0]].2 == resolved[w[1]].2) {
            return Err(DiagramError::Malformed(format!(
                "several crossings on {}:{} need distinct positions",
                a.curve_name(),
                a.arc
            )));
        }
        let mut tail = ids[&a];
        for i in list {
            tail = cx.split(tail, verts[i]);
        }
    }
    let dcurve = cx.family.len();
    cx.family.push(Family::Beta);
    let mut dedges = Vec::with_capacity(m);
    for i in 0..m {
        let e = cx.ends.len();
        cx.ends.push((Some(verts[i]), Some(verts[(i + 1) % m])));
        cx.edge_curve.push(dcurve);
        cx.origin.push(None);
        dedges.push(e);
    }
    cx.curve_edges.push(dedges.clone());
    let curve_id = |a: ArcRef| match a.family {
        Family::Alpha => a.curve,
        Family::Beta => d.alpha.len() + a.curve,
    };
    for i in 0..m {
        let j = (i + 1) % m;
        let (a, dir, _) = resolved[i];
        let cv = curve_id(a);
        let from = if dir == 1 {
            (cx.edge_out_of(cv, verts[i]), true)
        } else {
            (cx.edge_into(cv, verts[i]), false)
        };
        let (b, dir2, _) = resolved[j];
        let cv2 = curve_id(b);
        let to = if dir2 == 1 {
            (cx.edge_into(cv2, verts[j]), false)
        } else {
            (cx.edge_out_of(cv2, verts[j]), true)
        };
        let seg = delta.segments.get(i).cloned().unwrap_or_default();
        cx.insert_chord(dedges[i], from, to, &seg, &format!("d{i}"))?;
    }

    let alpha_seqs: Vec<Vec<De>> = (0..d.alpha.len())
        .map(|c| cx.curve_edges[c].iter().map(|&e| (e, true)).collect())
        .collect();
    let b1 = d.alpha.len() + beta1;

    // (α, δ): erase β₁
    let mut ad = cx.clone();
    for &e in &cx.curve_edges[b1] {
        ad.erase_edge(e);
    }
    let beta_ad: Vec<Vec<De>> = (0..d.beta.len())
        .map(|c| {
            let cid = if c == beta1 { dcurve } else { d.alpha.len() + c };
            cx.curve_edges[cid].iter().map(|&e| (e, true)).collect()
        })
        .collect();
    let alpha_delta = ad.to_diagram(d.genus, &alpha_seqs, &beta_ad)?;

    // resolve c
    let c = verts[ic];
    let mut corners = Vec::new();
    for (r, reg) in cx.regions.iter().enumerate() {
        let Some(reg) = reg else { continue };
        for comp in &reg.comps {
            for i in 0..comp.len() {
                let (x, y) = (comp[i], comp[(i + 1) % comp.len()]);
                if cx.end(x) == Some(c) {
                    corners.push((r, x, y));
                }
            }
        }
    }
    if corners.len() != 4 {
        return bad(format!("crossing with β{beta1} has {} corners", corners.len()));
    }
    let on_delta = |(e, _): De| cx.edge_curve[e] == dcurve;
    // with regions to the left of their boundary, the positive twist joins
    // the two corners turning from δ onto β₁
    let positive = sign == TwistSign::Positive;
    let joined: Vec<usize> = (0..4)
        .filter(|&i| on_delta(corners[i].1) == positive && on_delta(corners[i].2) != positive)
        .collect();
    if joined.len() != 2 {
        return bad("δ and β₁ do not cross transversally at c");
    }
    let has = |r: usize, p: char| {
        cx.regions[r]
            .as_ref()
            .is_some_and(|g| g.base.iter().any(|b| b.starts_with(p)))
    };
    let Some(zi) = joined.iter().copied().find(|&i| has(corners[i].0, 'z')) else {
        return bad("z is not in a corner joined by the twist at δ ∩ β₁");
    };
    let oi = if joined[0] == zi { joined[1] } else { joined[0] };
    if !has(corners[oi].0, 'w') {
        return bad("the corner opposite z at δ ∩ β₁ has no w");
    }
    let mut sigma: HashMap<De, De> = HashMap::new();
    for (j, &(_, x, y)) in corners.iter().enumerate() {
        let succ = if j == zi {
            corners[oi].2
        } else if j == oi {
            corners[zi].2
        } else {
            y
        };
        sigma.insert(x, succ);
    }
    if sigma.iter().any(|(&x, &y)| on_delta(x) == on_delta(y)) {
        return bad("resolution at δ ∩ β₁ does not exchange β₁ and δ");
    }

    let mut tw = cx.clone();
    resolve_vertex(&mut tw, c, &sigma);
    let start = (cx.edge_out_of(b1, c), true);
    let mut seq = vec![start];
    let mut cur = start;
    loop {
        cur = if tw.end(cur) == Some(c) { sigma[&cur] } else { tw.next_on_curve(cur) };
        if cur == start {
            break;
        }
        if seq.len() > tw.ends.len() {
            return bad("twisted curve does not close up");
        }
        seq.push(cur);
    }
    let beta_tw: Vec<Vec<De>> = (0..d.beta.len())
        .map(|k| {
            if k == beta1 {
                seq.clone()
            } else {
                cx.curve_edges[d.alpha.len() + k].iter().map(|&e| (e, true)).collect()
            }
        })
        .collect();
    let twisted = tw.to_diagram(d.genus, &alpha_seqs, &beta_tw)?;
    Ok(TwistedDiagram {
        twisted,
        alpha_beta: d.clone(),
        alpha_delta,
        beta1,
        delta_points,
    })
}

/// Rewires every boundary cycle through `c` by `sigma` (arriving edge to
/// leaving edge), merging regions that become connected.
fn resolve_vertex(cx: &mut Cx, c: usize, sigma: &HashMap<De, De>) {
    let mut paths: Vec<(usize, Vec<De>)> = Vec::new();
    for (r, reg) in cx.regions.iter_mut().enumerate() {
        let Some(reg) = reg else { continue };
        let mut keep = Vec::new();
        for comp in std::mem::take(&mut reg.comps) {
            let n = comp.len();
            let cuts: Vec<usize> = (0..n).filter(|&i| cx_end(&cx.ends, comp[i]) == Some(c)).collect();
            if cuts.is_empty() {
                keep.push(comp);
                continue;
            }
            for (k, &i) in cuts.iter().enumerate() {
                let j = cuts[(k + 1) % cuts.len()];
                let len = (j + n - i) % n;
                let len = if len == 0 { n } else { len };
                paths.push((r, (1..=len).map(|t| comp[(i + t) % n]).collect()));
            }
        }
        reg.comps = keep;
    }
    let starts: HashMap<De, usize> = paths.iter().enumerate().map(|(i, (_, p))| (p[0], i)).collect();
    let mut parent: Vec<usize> = (0..cx.regions.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut cycles: Vec<(usize, Vec<De>)> = Vec::new();
    let mut used = vec![false; paths.len()];
    for s in 0..paths.len() {
        if used[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut cur = s;
        loop {
            used[cur] = true;
            cyc.extend(paths[cur].1.iter().copied());
            let nxt = starts[&sigma[paths[cur].1.last().expect("nonempty path")]];
            let (a, b) = (find(&mut parent, paths[s].0), find(&mut parent, paths[nxt].0));
            parent[a] = b;
            if nxt == s {
                break;
            }
            cur = nxt;
        }
        cycles.push((paths[s].0, cyc));
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in 0..cx.regions.len() {
        if cx.regions[r].is_some() {
            let root = find(&mut parent, r);
            groups.entry(root).or_default().push(r);
        }
    }
    for (_, members) in groups {
        let head = members[0];
        for &r in &members[1..] {
            let other = cx.regions[r].take().expect("live");
            let h = cx.regions[head].as_mut().expect("live");
            h.name = format!("{}+{}", h.name, other.name);
            h.comps.extend(other.comps);
            h.base.extend(other.base);
        }
        for (r, cyc) in &cycles {
            if find(&mut parent, *r) == find(&mut parent, head) {
                cx.regions[head].as_mut().expect("live").comps.push(cyc.clone());
            }
        }
    }
}

fn cx_end(ends: &[(Option<usize>, Option<usize>)], (e, f): De) -> Option<usize> {
    if f {
        ends[e].1
    } else {
        ends[e].0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub beta_part_generators: usize,
    pub delta_part_generators: usize,
    /// No disc runs from a β-part generator to a δ-part generator.
    pub lower_block_zero: bool,
    pub lower_block_witness: Option<(String, String)>,
    pub beta_block_matches: bool,
    pub delta_block_matches: bool,
    pub off_diagonal_entries: usize,
    pub twisted_homology: BTreeMap<i64, usize>,
    pub cone_homology: BTreeMap<i64, usize>,
    pub twisted_total: usize,
    pub cone_total: usize,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.lower_block_zero
            && self.beta_block_matches
            && self.delta_block_matches
            && self.twisted_homology == self.cone_homology
    }
}

/// Splits the twisted complex along β-part/δ-part generators and compares
/// the blocks with the (α, β) and (α, δ) complexes; the off-diagonal block
/// is then used as a chain map whose cone is compared with the twisted
/// homology.
pub fn block_triangularity_check(t: &TwistedDiagram) -> Result<BlockReport, DiagramError> {
    let tw = t.twisted.nice_differential(Flavor::KnotHat, None)?;
    let names = |d: &CombinatorialDiagram, g: &Generator| -> Vec<String> {
        let mut v: Vec<String> = g.0.iter().map(|&p| d.point_name(p).to_string()).collect();
        v.sort();
        v
    };
    let gens = &tw.generators;
    let grade: Vec<i64> = (0..gens.len()).map(|i| tw.complex.basis().grading(i)).collect();
    let (db, bb): (Vec<usize>, Vec<usize>) = (0..gens.len()).partition(|&i| t.is_delta_generator(&gens[i]));
    let (mut pos_b, mut pos_d) = (HashMap::new(), HashMap::new());
    for (k, &i) in bb.iter().enumerate() {
        pos_b.insert(i, k);
    }
    for (k, &i) in db.iter().enumerate() {
        pos_d.insert(i, k);
    }
    let dm = tw.complex.differential();
    let mut witness = None;
    let mut a = Gf2Matrix::zero(bb.len(), bb.len());
    let mut b = Gf2Matrix::zero(db.len(), db.len());
    let mut f = Gf2Matrix::zero(bb.len(), db.len());
    for (r, c) in dm.entries() {
        match (pos_b.get(&r), pos_d.get(&r), pos_b.get(&c), pos_d.get(&c)) {
            (Some(&i), _, Some(&j), _) => a.toggle(i, j)?,
            (_, Some(&i), _, Some(&j)) => b.toggle(i, j)?,
            (Some(&i), _, _, Some(&j)) => f.toggle(i, j)?,
            _ => {
                witness.get_or_insert((tw.complex.basis().id(c).to_string(), tw.complex.basis().id(r).to_string()));
            }
        }
    }

    let block_matches = |sub: &CombinatorialDiagram, members: &[usize], block: &Gf2Matrix| -> Result<bool, DiagramError> {
        let nc = sub.nice_differential(Flavor::KnotHat, None)?;
        let key: HashMap<Vec<String>, usize> =
            nc.generators.iter().enumerate().map(|(i, g)| (names(sub, g), i)).collect();
        if key.len() != members.len() {
            return Ok(false);
        }
        let mut idx = Vec::with_capacity(members.len());
        for &m in members {
            match key.get(&names(&t.twisted, &gens[m])) {
                Some(&i) => idx.push(i),
                None => return Ok(false),
            }
        }
        let sd = nc.complex.differential();
        Ok((0..members.len())
            .all(|i| (0..members.len()).all(|j| sd.get(idx[i], idx[j]) == block.get(i, j))))
    };
    let beta_block_matches = block_matches(&t.alpha_beta, &bb, &a)?;
    let delta_block_matches = block_matches(&t.alpha_delta, &db, &b)?;

    let twisted_homology = homology(&tw.complex);
    let cb = ChainComplex::new(
        GradedBasis::new(bb.iter().map(|&i| (tw.complex.basis().id(i).to_string(), grade[i])).collect())?,
        a,
    );
    let cd = ChainComplex::new(
        GradedBasis::new(db.iter().map(|&i| (tw.complex.basis().id(i).to_string(), grade[i] - 1)).collect())?,
        b,
    );
    let cone_homology = match (cb, cd) {
        (Ok(cb), Ok(cd)) => match ChainMap::new(cd, cb, f.clone())
            .map_err(|e| e.to_string())
            .and_then(|m| mapping_cone(&m, Orientation::MapIntoFirst).map_err(|e| e.to_string()))
        {
            Ok(cone) => homology(&cone.complex),
            Err(_) => BTreeMap::new(),
        },
        _ => BTreeMap::new(),
    };
    let cone_total = cone_homology.values().sum();
    Ok(BlockReport {
        beta_part_generators: bb.len(),
        delta_part_generators: db.len(),
        lower_block_zero: witness.is_none(),
        lower_block_witness: witness,
        beta_block_matches,
        delta_block_matches,
        off_diagonal_entries: f.nnz(),
        twisted_total: total_rank(&tw.complex),
        twisted_homology,
        cone_homology,
        cone_total,
    })
}
