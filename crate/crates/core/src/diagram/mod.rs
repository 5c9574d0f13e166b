//! Combinatorial Heegaard diagrams given as explicit cell complexes.
//!
//! Curves are cyclic lists of intersection points; arc `j` of a curve runs
//! from its `j`-th point to the next one (a curve without points is a single
//! closed arc). Regions list their boundary components as cycles of signed
//! arcs, traversed with the region on the left. A domain `D` from `x` to
//! `y` satisfies `∂(∂_α D) = y - x` and `∂(∂_β D) = x - y`.

pub mod twist;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2::{ChainComplex, Gf2Error, Gf2Matrix, GradedBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("unknown region {0}")]
    UnknownRegion(String),
    #[error("diagram is not nice: region {region} has {corners} corners and {components} boundary components")]
    NotNice {
        region: String,
        corners: usize,
        components: usize,
    },
    #[error("bad delta position: {0}")]
    BadDeltaPosition(String),
    #[error("differential admits no integer grading: {0}")]
    Ungradable(String),
    #[error("{0} free regions is beyond the domain enumeration bound")]
    TooLarge(usize),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, DiagramError> {
    Err(DiagramError::Malformed(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Alpha,
    Beta,
}

/// An arc of a curve, written `"a0"`/`"b2"` plus the arc index in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcRef {
    pub family: Family,
    pub curve: usize,
    pub arc: usize,
}

impl ArcRef {
    pub fn curve_name(&self) -> String {
        curve_name(self.family, self.curve)
    }
}

pub fn curve_name(f: Family, i: usize) -> String {
    match f {
        Family::Alpha => format!("a{i}"),
        Family::Beta => format!("b{i}"),
    }
}

pub fn parse_curve_name(s: &str) -> Option<(Family, usize)> {
    let (f, rest) = match s.split_at_checked(1)? {
        ("a", r) => (Family::Alpha, r),
        ("b", r) => (Family::Beta, r),
        _ => return None,
    };
    rest.parse().ok().map(|i| (f, i))
}

/// Signed arc occurrence in a region boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Side {
    pub arc: ArcRef,
    pub forward: bool,
}

impl Serialize for Side {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.arc.curve_name(), self.arc.arc, if self.forward { 1 } else { -1 }).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (name, arc, sign): (String, usize, i64) = Deserialize::deserialize(d)?;
        let (family, curve) =
            parse_curve_name(&name).ok_or_else(|| serde::de::Error::custom(format!("bad curve name {name:?}")))?;
        let forward = match sign {
            1 => true,
            -1 => false,
            _ => return Err(serde::de::Error::custom("orientation must be 1 or -1")),
        };
        Ok(Side {
            arc: ArcRef { family, curve, arc },
            forward,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionRef {
    Index(usize),
    Name(String),
}

impl fmt::Display for RegionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionRef::Index(i) => write!(f, "#{i}"),
            RegionRef::Name(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(RegionRef),
    Many(Vec<RegionRef>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Boundary {
    Single(Vec<Side>),
    Components(Vec<Vec<Side>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub alpha: usize,
    pub beta: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawRegion {
    #[serde(default)]
    name: Option<String>,
    boundary: Boundary,
}

#[derive(Clone, Debug, Deserialize)]
struct RawDiagram {
    genus: u32,
    alpha: Vec<Vec<usize>>,
    beta: Vec<Vec<usize>>,
    points: Vec<Point>,
    regions: Vec<RawRegion>,
    z: OneOrMany,
    w: OneOrMany,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub name: String,
    pub boundary: Vec<Vec<Side>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialDiagram {
    genus: u32,
    alpha: Vec<Vec<usize>>,
    beta: Vec<Vec<usize>>,
    points: Vec<Point>,
    regions: Vec<Region>,
    z: Vec<usize>,
    w: Vec<usize>,
    left: HashMap<ArcRef, usize>,
    right: HashMap<ArcRef, usize>,
    /// Regions of the four corners at each point (with repetition).
    corners: Vec<Vec<usize>>,
    region_corners: Vec<usize>,
}

/// Integer multiplicity per region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub multiplicities: Vec<i64>,
}

impl Domain {
    pub fn zero(regions: usize) -> Self {
        Domain {
            multiplicities: vec![0; regions],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 0)
    }
}

/// One intersection point per α curve, using each β curve once; points
/// are listed by α index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(pub Vec<usize>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Domains avoid the z regions.
    Hat,
    /// Domains avoid the z and the w regions.
    KnotHat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    WeakAllSpinc,
    ExtremelyWeakConservative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub witness: Option<Domain>,
}

#[derive(Clone, Debug)]
pub struct NiceComplex {
    pub complex: ChainComplex,
    pub generators: Vec<Generator>,
    /// Domains counted, as (source index, target index, domain).
    pub discs: Vec<(usize, usize, Domain)>,
}

impl Serialize for CombinatorialDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct R<'a> {
            name: &'a str,
            boundary: &'a Vec<Vec<Side>>,
        }
        #[derive(Serialize)]
        struct D<'a> {
            genus: u32,
            alpha: &'a Vec<Vec<usize>>,
            beta: &'a Vec<Vec<usize>>,
            points: &'a Vec<Point>,
            regions: Vec<R<'a>>,
            z: &'a Vec<usize>,
            w: &'a Vec<usize>,
        }
        D {
            genus: self.genus,
            alpha: &self.alpha,
            beta: &self.beta,
            points: &self.points,
            regions: self
                .regions
                .iter()
                .map(|r| R {
                    name: &r.name,
                    boundary: &r.boundary,
                })
                .collect(),
            z: &self.z,
            w: &self.w,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CombinatorialDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawDiagram::deserialize(d)?;
        CombinatorialDiagram::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

impl CombinatorialDiagram {
    /// Builds and validates a diagram. Basepoint lists must have equal
    /// length k, and each family must have genus + k - 1 curves.
    pub fn new(
        genus: u32,
        alpha: Vec<Vec<usize>>,
        beta: Vec<Vec<usize>>,
        points: Vec<Point>,
        regions: Vec<Region>,
        z: Vec<usize>,
        w: Vec<usize>,
    ) -> Result<Self, DiagramError> {
        let mut d = CombinatorialDiagram {
            genus,
            alpha,
            beta,
            points,
            regions,
            z,
            w,
            left: HashMap::new(),
            right: HashMap::new(),
            corners: Vec::new(),
            region_corners: Vec::new(),
        };
        d.validate()?;
        Ok(d)
    }

    fn from_raw(raw: RawDiagram) -> Result<Self, DiagramError> {
        let mut regions = Vec::new();
        for (i, r) in raw.regions.into_iter().enumerate() {
            let boundary = match r.boundary {
                Boundary::Single(v) => vec![v],
                Boundary::Components(v) => v,
            };
            regions.push(Region {
                name: r.name.unwrap_or_else(|| format!("R{i}")),
                boundary,
            });
        }
        let names: HashMap<&str, usize> = regions.iter().enumerate().map(|(i, r)| (r.name.as_str(), i)).collect();
        if names.len() != regions.len() {
            return malformed("region names must be unique");
        }
        let resolve = |r: &RegionRef| -> Result<usize, DiagramError> {
            match r {
                RegionRef::Index(i) if *i < regions.len() => Ok(*i),
                RegionRef::Name(s) if names.contains_key(s.as_str()) => Ok(names[s.as_str()]),
                _ => Err(DiagramError::UnknownRegion(r.to_string())),
            }
        };
        let list = |o: &OneOrMany| -> Result<Vec<usize>, DiagramError> {
            match o {
                OneOrMany::One(r) => Ok(vec![resolve(r)?]),
                OneOrMany::Many(v) => v.iter().map(resolve).collect(),
            }
        };
        let (z, w) = (list(&raw.z)?, list(&raw.w)?);
        CombinatorialDiagram::new(raw.genus, raw.alpha, raw.beta, raw.points, regions, z, w)
    }

    fn curves(&self, f: Family) -> &Vec<Vec<usize>> {
        match f {
            Family::Alpha => &self.alpha,
            Family::Beta => &self.beta,
        }
    }

    /// Start and end point of an arc; `None` for a closed curve without points.
    pub fn arc_ends(&self, a: ArcRef) -> Option<(usize, usize)> {
        let pts = &self.curves(a.family)[a.curve];
        if pts.is_empty() {
            None
        } else {
            Some((pts[a.arc], pts[(a.arc + 1) % pts.len()]))
        }
    }

    fn side_ends(&self, s: Side) -> Option<(usize, usize)> {
        self.arc_ends(s.arc).map(|(a, b)| if s.forward { (a, b) } else { (b, a) })
    }

    fn all_arcs(&self) -> Vec<ArcRef> {
        let mut out = Vec::new();
        for f in [Family::Alpha, Family::Beta] {
            for (c, pts) in self.curves(f).iter().enumerate() {
                for arc in 0..pts.len().max(1) {
                    out.push(ArcRef { family: f, curve: c, arc });
                }
            }
        }
        out
    }

    fn validate(&mut self) -> Result<(), DiagramError> {
        let k = self.z.len();
        if k == 0 || self.w.len() != k {
            return malformed("need equally many z and w basepoints, at least one");
        }
        let d = self.genus as usize + k - 1;
        if self.alpha.len() != d || self.beta.len() != d {
            return malformed(format!(
                "genus {} with {k} basepoint pair(s) needs {d} alpha and {d} beta curves",
                self.genus
            ));
        }
        // every point sits exactly once on its own alpha and beta curve
        let mut seen = vec![(0usize, 0usize); self.points.len()];
        for (f, curves) in [(Family::Alpha, &self.alpha), (Family::Beta, &self.beta)] {
            for (c, pts) in curves.iter().enumerate() {
                for &p in pts {
                    let Some(pt) = self.points.get(p) else {
                        return malformed(format!("{} lists unknown point {p}", curve_name(f, c)));
                    };
                    let (owner, slot) = match f {
                        Family::Alpha => (pt.alpha, &mut seen[p].0),
                        Family::Beta => (pt.beta, &mut seen[p].1),
                    };
                    if owner != c {
                        return malformed(format!("point {p} listed on {} but declared elsewhere", curve_name(f, c)));
                    }
                    *slot += 1;
                }
            }
        }
        if let Some(p) = seen.iter().position(|&s| s != (1, 1)) {
            return malformed(format!("point {p} must appear once on one alpha and one beta curve"));
        }
        let mut names = std::collections::HashSet::new();
        for (i, p) in self.points.iter_mut().enumerate() {
            let n = p.name.get_or_insert_with(|| format!("p{i}"));
            if !names.insert(n.clone()) {
                return malformed(format!("duplicate point name {n}"));
            }
        }

        // arcs: each used once on each side
        let arcs = self.all_arcs();
        let valid: std::collections::HashSet<ArcRef> = arcs.iter().copied().collect();
        self.left.clear();
        self.right.clear();
        for (ri, r) in self.regions.iter().enumerate() {
            for comp in &r.boundary {
                if comp.is_empty() {
                    return malformed(format!("region {} has an empty boundary component", r.name));
                }
                for s in comp {
                    if !valid.contains(&s.arc) {
                        return malformed(format!("region {} uses unknown arc {:?}", r.name, s.arc));
                    }
                    let map = if s.forward { &mut self.left } else { &mut self.right };
                    if map.insert(s.arc, ri).is_some() {
                        return malformed(format!("arc {}:{} used twice on one side", s.arc.curve_name(), s.arc.arc));
                    }
                }
            }
        }
        if let Some(a) = arcs.iter().find(|a| !self.left.contains_key(a) || !self.right.contains_key(a)) {
            return malformed(format!("arc {}:{} needs a region on each side", a.curve_name(), a.arc));
        }

        // junctions and corners
        self.corners = vec![Vec::new(); self.points.len()];
        self.region_corners = vec![0; self.regions.len()];
        let mut half_use: HashMap<(usize, ArcRef, bool), usize> = HashMap::new();
        for (ri, r) in self.regions.iter().enumerate() {
            for comp in &r.boundary {
                let n = comp.len();
                for i in 0..n {
                    let (s, t) = (comp[i], comp[(i + 1) % n]);
                    match (self.side_ends(s), self.side_ends(t)) {
                        (None, None) if n == 1 => {}
                        (Some((_, e)), Some((b, _))) if e == b => {
                            if s.arc.family == t.arc.family {
                                return malformed(format!("region {} turns at point {e} without changing family", r.name));
                            }
                            self.corners[e].push(ri);
                            self.region_corners[ri] += 1;
                            // arrive along s, leave along t
                            *half_use.entry((e, s.arc, s.forward)).or_default() += 1;
                            *half_use.entry((e, t.arc, !t.forward)).or_default() += 1;
                        }
                        _ => {
                            return malformed(format!("boundary of region {} is not a closed cycle", r.name));
                        }
                    }
                }
            }
        }
        if let Some(p) = self.corners.iter().position(|c| c.len() != 4) {
            return malformed(format!("point {p} has {} corners, expected 4", self.corners[p].len()));
        }
        if let Some((&(p, ..), _)) = half_use.iter().find(|(_, &n)| n != 2) {
            return malformed(format!("corners at point {p} are not arranged around it"));
        }

        // Euler characteristic with planar regions
        let edges: usize = [&self.alpha, &self.beta].iter().flat_map(|c| c.iter()).map(|p| p.len()).sum();
        let faces: i64 = self.regions.iter().map(|r| 2 - r.boundary.len() as i64).sum();
        let chi = self.points.len() as i64 - edges as i64 + faces;
        if chi != 2 - 2 * self.genus as i64 {
            return malformed(format!("Euler characteristic {chi} does not match genus {}", self.genus));
        }
        for &r in self.z.iter().chain(&self.w) {
            if r >= self.regions.len() {
                return Err(DiagramError::UnknownRegion(format!("#{r}")));
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn alpha(&self) -> &[Vec<usize>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<usize>] {
        &self.beta
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point_name(&self, p: usize) -> &str {
        self.points[p].name.as_deref().unwrap_or("")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn z_regions(&self) -> &[usize] {
        &self.z
    }

    pub fn w_regions(&self) -> &[usize] {
        &self.w
    }

    pub fn region_index(&self, r: &RegionRef) -> Result<usize, DiagramError> {
        match r {
            RegionRef::Index(i) if *i < self.regions.len() => Ok(*i),
            RegionRef::Name(s) => self
                .regions
                .iter()
                .position(|x| &x.name == s)
                .ok_or_else(|| DiagramError::UnknownRegion(r.to_string())),
            _ => Err(DiagramError::UnknownRegion(r.to_string())),
        }
    }

    pub fn left_of(&self, a: ArcRef) -> usize {
        self.left[&a]
    }

    pub fn right_of(&self, a: ArcRef) -> usize {
        self.right[&a]
    }

    /// Number of corners of a region (counted with repetition).
    pub fn region_corner_count(&self, r: usize) -> usize {
        self.region_corners[r]
    }

    pub fn point_multiplicity(&self, d: &Domain, region: &RegionRef) -> Result<i64, DiagramError> {
        let r = self.region_index(region)?;
        Ok(d.multiplicities.get(r).copied().unwrap_or(0))
    }

    pub fn n_z(&self, d: &Domain) -> i64 {
        self.z.iter().map(|&r| d.multiplicities[r]).sum()
    }

    pub fn n_w(&self, d: &Domain) -> i64 {
        self.w.iter().map(|&r| d.multiplicities[r]).sum()
    }

    /// All generators, in lexicographic order of their α-sorted points.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        let mut used = vec![false; self.beta.len()];
        let mut cur = Vec::with_capacity(self.alpha.len());
        self.match_from(0, &mut used, &mut cur, &mut out);
        out.sort();
        out
    }

    fn match_from(&self, i: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Generator>) {
        if i == self.alpha.len() {
            out.push(Generator(cur.clone()));
            return;
        }
        for &p in &self.alpha[i] {
            let b = self.points[p].beta;
            if !used[b] {
                used[b] = true;
                cur.push(p);
                self.match_from(i + 1, used, cur, out);
                cur.pop();
                used[b] = false;
            }
        }
    }

    pub fn generator_id(&self, g: &Generator) -> String {
        g.0.iter().map(|&p| self.point_name(p)).collect::<Vec<_>>().join(",")
    }

    /// Linear forms (region, coefficient) for the α- and β-jumps at each
    /// point: `jump(p) = c(in-arc) - c(out-arc)` with `c(e) = m(left) - m(right)`.
    fn jump_forms(&self) -> Vec<[Vec<(usize, i64)>; 2]> {
        let mut forms = Vec::with_capacity(self.points.len());
        for (p, pt) in self.points.iter().enumerate() {
            let mut pair: [Vec<(usize, i64)>; 2] = Default::default();
            for (slot, (f, c)) in [(Family::Alpha, pt.alpha), (Family::Beta, pt.beta)].into_iter().enumerate() {
                let pts = &self.curves(f)[c];
                let j = pts.iter().position(|&q| q == p).expect("validated");
                let out_arc = ArcRef { family: f, curve: c, arc: j };
                let in_arc = ArcRef {
                    family: f,
                    curve: c,
                    arc: (j + pts.len() - 1) % pts.len(),
                };
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                *acc.entry(self.left[&in_arc]).or_default() += 1;
                *acc.entry(self.right[&in_arc]).or_default() -= 1;
                *acc.entry(self.left[&out_arc]).or_default() -= 1;
                *acc.entry(self.right[&out_arc]).or_default() += 1;
                pair[slot] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
            }
            forms.push(pair);
        }
        forms
    }

    /// α- and β-jumps of a domain at every point.
    pub fn jumps(&self, d: &Domain) -> Vec<(i64, i64)> {
        let eval = |f: &Vec<(usize, i64)>| f.iter().map(|&(r, c)| c * d.multiplicities[r]).sum::<i64>();
        self.jump_forms().iter().map(|[a, b]| (eval(a), eval(b))).collect()
    }

    /// Whether `d` connects `x` to `y`.
    pub fn connects(&self, d: &Domain, x: &Generator, y: &Generator) -> bool {
        let mut want = vec![0i64; self.points.len()];
        for &p in &y.0 {
            want[p] += 1;
        }
        for &p in &x.0 {
            want[p] -= 1;
        }
        self.jumps(d).iter().zip(&want).all(|(&(a, b), &w)| a == w && b == -w)
    }

    /// Four times the index e(D) + n_x(D) + n_y(D).
    pub fn maslov_index_x4(&self, d: &Domain, x: &Generator, y: &Generator) -> i64 {
        let m = &d.multiplicities;
        let euler: i64 = (0..self.regions.len())
            .map(|r| m[r] * (4 * (2 - self.regions[r].boundary.len() as i64) - self.region_corners[r] as i64))
            .sum();
        let corner = |p: usize| self.corners[p].iter().map(|&r| m[r]).sum::<i64>();
        euler + x.0.iter().chain(&y.0).map(|&p| corner(p)).sum::<i64>()
    }

    /// Basis of the periodic-domain lattice with n_z = 0 (and n_w = 0 if
    /// `also_w`), as primitive integer vectors.
    pub fn periodic_lattice(&self, also_w: bool) -> Vec<Domain> {
        let nr = self.regions.len();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for [a, b] in self.jump_forms() {
            for f in [a, b] {
                let mut row = vec![0; nr];
                for (r, c) in f {
                    row[r] += c;
                }
                rows.push(row);
            }
        }
        let fixed: Vec<usize> = if also_w {
            self.z.iter().chain(&self.w).copied().collect()
        } else {
            self.z.clone()
        };
        for r in fixed {
            let mut row = vec![0; nr];
            row[r] = 1;
            rows.push(row);
        }
        nullspace(&rows, nr)
            .into_iter()
            .map(|v| Domain { multiplicities: v })
            .collect()
    }

    pub fn periodic_domains(&self) -> Vec<Domain> {
        self.periodic_lattice(false)
    }

    /// Conservative check: no nonzero periodic domain in the constrained
    /// lattice is everywhere non-negative (or everywhere non-positive).
    pub fn check_admissibility(&self, mode: AdmissibilityMode) -> Admissibility {
        let basis = self.periodic_lattice(mode == AdmissibilityMode::ExtremelyWeakConservative);
        match semi_definite_ray(&basis, self.regions.len()) {
            Some(w) => Admissibility {
                admissible: false,
                witness: Some(w),
            },
            None => Admissibility {
                admissible: true,
                witness: None,
            },
        }
    }

    /// Regions that are neither bigons nor squares, among those allowed.
    fn check_nice(&self, forbidden: &[bool]) -> Result<(), DiagramError> {
        for (r, reg) in self.regions.iter().enumerate() {
            if forbidden[r] {
                continue;
            }
            let c = self.region_corners[r];
            if reg.boundary.len() != 1 || !(c == 2 || c == 4) {
                return Err(DiagramError::NotNice {
                    region: reg.name.clone(),
                    corners: c,
                    components: reg.boundary.len(),
                });
            }
        }
        Ok(())
    }

    fn forbidden(&self, flavor: Flavor) -> Vec<bool> {
        let mut f = vec![false; self.regions.len()];
        for &r in &self.z {
            f[r] = true;
        }
        if flavor == Flavor::KnotHat {
            for &r in &self.w {
                f[r] = true;
            }
        }
        f
    }

    /// All 0/1 domains of index one between generators, avoiding the
    /// forbidden regions. In a nice diagram these are exactly the empty
    /// embedded bigons and rectangles.
    pub fn index_one_discs(&self, flavor: Flavor) -> Result<Vec<(Generator, Generator, Domain)>, DiagramError> {
        let forbidden = self.forbidden(flavor);
        self.check_nice(&forbidden)?;
        let free: Vec<usize> = bfs_order(self, &forbidden);
        if free.len() > 60 {
            return Err(DiagramError::TooLarge(free.len()));
        }
        let forms = self.jump_forms();
        // a point can be checked once every region in its forms is decided
        let mut pos = vec![usize::MAX; self.regions.len()];
        for (i, &r) in free.iter().enumerate() {
            pos[r] = i;
        }
        let mut closes: Vec<Vec<usize>> = vec![Vec::new(); free.len() + 1];
        for (p, [a, b]) in forms.iter().enumerate() {
            let last = a
                .iter()
                .chain(b)
                .filter(|(r, _)| !forbidden[*r])
                .map(|(r, _)| pos[*r] + 1)
                .max()
                .unwrap_or(0);
            closes[last].push(p);
        }
        let gens = self.generators();
        let mut search = DomainSearch {
            dia: self,
            forms: &forms,
            free: &free,
            closes: &closes,
            gens: &gens,
            m: vec![0; self.regions.len()],
            out: Vec::new(),
        };
        if search.feasible(0) {
            search.run(0);
        }
        Ok(search.out)
    }

    /// Differential counting index-one 0/1 domains mod 2. Gradings come from
    /// `grading` when given; otherwise each connected piece of the
    /// differential is graded relative to its first generator.
    pub fn nice_differential(
        &self,
        flavor: Flavor,
        grading: Option<&dyn Fn(&Generator) -> i64>,
    ) -> Result<NiceComplex, DiagramError> {
        let gens = self.generators();
        let index: HashMap<&Generator, usize> = gens.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let discs = self.index_one_discs(flavor)?;
        let n = gens.len();
        let mut d = Gf2Matrix::zero(n, n);
        let mut listed = Vec::new();
        for (x, y, dom) in discs {
            let (i, j) = (index[&x], index[&y]);
            d.toggle(j, i)?;
            listed.push((i, j, dom));
        }
        let grades = match grading {
            Some(g) => gens.iter().map(g).collect(),
            None => induced_grading(&d).map_err(DiagramError::Ungradable)?,
        };
        let basis = GradedBasis::new(gens.iter().zip(&grades).map(|(g, &k)| (self.generator_id(g), k)).collect())?;
        let complex = ChainComplex::new(basis, d)?;
        Ok(NiceComplex {
            complex,
            generators: gens,
            discs: listed,
        })
    }
}

struct DomainSearch<'a> {
    dia: &'a CombinatorialDiagram,
    forms: &'a [[Vec<(usize, i64)>; 2]],
    free: &'a [usize],
    closes: &'a [Vec<usize>],
    gens: &'a [Generator],
    m: Vec<i64>,
    out: Vec<(Generator, Generator, Domain)>,
}

impl DomainSearch<'_> {
    fn eval(&self, f: &[(usize, i64)]) -> i64 {
        f.iter().map(|&(r, c)| c * self.m[r]).sum()
    }

    fn feasible(&self, depth: usize) -> bool {
        self.closes[depth].iter().all(|&p| {
            let (a, b) = (self.eval(&self.forms[p][0]), self.eval(&self.forms[p][1]));
            a.abs() <= 1 && b == -a
        })
    }

    fn run(&mut self, depth: usize) {
        if depth == self.free.len() {
            self.leaf();
            return;
        }
        for v in [0, 1] {
            self.m[self.free[depth]] = v;
            if self.feasible(depth + 1) {
                self.run(depth + 1);
            }
        }
        self.m[self.free[depth]] = 0;
    }

    fn leaf(&mut self) {
        if self.m.iter().all(|&v| v == 0) {
            return;
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for p in 0..self.forms.len() {
            match self.eval(&self.forms[p][0]) {
                -1 => xs.push(p),
                1 => ys.push(p),
                _ => {}
            }
        }
        let dom = Domain {
            multiplicities: self.m.clone(),
        };
        for x in self.gens {
            if !xs.iter().all(|p| x.0.contains(p)) || ys.iter().any(|p| x.0.contains(p)) {
                continue;
            }
            let mut pts: Vec<usize> = x.0.iter().copied().filter(|p| !xs.contains(p)).chain(ys.iter().copied()).collect();
            pts.sort_by_key(|&p| self.dia.points[p].alpha);
            let y = Generator(pts);
            let alphas_ok = y.0.iter().enumerate().all(|(i, &p)| self.dia.points[p].alpha == i);
            let mut betas: Vec<usize> = y.0.iter().map(|&p| self.dia.points[p].beta).collect();
            betas.sort_unstable();
            betas.dedup();
            if !alphas_ok || betas.len() != y.0.len() {
                continue;
            }
            if self.dia.maslov_index_x4(&dom, x, &y) == 4 {
                self.out.push((x.clone(), y, dom.clone()));
            }
        }
    }
}

/// Free regions in breadth-first order across shared arcs, so that points
/// close early in the search.
fn bfs_order(d: &CombinatorialDiagram, forbidden: &[bool]) -> Vec<usize> {
    let nr = d.regions.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nr];
    for a in d.all_arcs() {
        let (l, r) = (d.left[&a], d.right[&a]);
        adj[l].push(r);
        adj[r].push(l);
    }
    let mut seen = forbidden.to_vec();
    let mut order = Vec::new();
    for s in 0..nr {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(r) = q.pop_front() {
            order.push(r);
            for &t in &adj[r] {
                if !seen[t] {
                    seen[t] = true;
                    q.push_back(t);
                }
            }
        }
    }
    order
}

/// Integer grading with every differential entry lowering it by one; each
/// connected piece is anchored at 0 on its first generator.
pub fn induced_grading(d: &Gf2Matrix) -> Result<Vec<i64>, String> {
    let n = d.cols();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (r, c) in d.entries() {
        adj[c].push((r, -1));
        adj[r].push((c, 1));
    }
    let mut g: Vec<Option<i64>> = vec![None; n];
    for s in 0..n {
        if g[s].is_some() {
            continue;
        }
        g[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let gu = g[u].expect("visited");
            for &(v, step) in &adj[u] {
                match g[v] {
                    None => {
                        g[v] = Some(gu + step);
                        q.push_back(v);
                    }
                    Some(gv) if gv != gu + step => {
                        return Err(format!("generators {u} and {v} are forced into inconsistent degrees"));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(g.into_iter().map(|x| x.expect("all visited")).collect())
}

type Q = Ratio<i128>;

fn rref(rows: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != Q::from(0)) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::from(1) / rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != Q::from(0) {
                let f = rows[i][c];
                for j in 0..ncols {
                    let t = rows[r][j] * f;
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(v: &[Q]) -> Vec<i64> {
    let lcm = v.iter().fold(1i128, |l, q| l / gcd(l, *q.denom()) * q.denom());
    let ints: Vec<i128> = v.iter().map(|q| (q * Q::from(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0, |g, &x| gcd(g, x)).max(1);
    ints.into_iter().map(|x| (x / g) as i64).collect()
}

/// Primitive integer basis of the rational nullspace of an integer system.
pub(crate) fn nullspace(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .map(|r| r.iter().map(|&x| Q::from(x as i128)).collect())
        .collect();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::from(0); ncols];
        v[free] = Q::from(1);
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[i][free];
        }
        basis.push(primitive(&v));
    }
    basis
}

/// Searches the lattice spanned by `basis` for a nonzero vector with all
/// coordinates of one sign. The cone {c : Mc >= 0} is pointed, so it is
/// nonzero iff it has an extreme ray; each ray is cut out by rank-1
/// independent tight coordinates, which are enumerated.
fn semi_definite_ray(basis: &[Domain], nr: usize) -> Option<Domain> {
    let r = basis.len();
    if r == 0 {
        return None;
    }
    let col = |i: usize| -> Vec<i64> { basis.iter().map(|b| b.multiplicities[i]).collect() };
    let candidates: Vec<usize> = (0..nr).filter(|&i| col(i).iter().any(|&x| x != 0)).collect();
    let mut subset = Vec::with_capacity(r - 1);
    let mut found = None;
    choose(&candidates, r - 1, 0, &mut subset, &mut |rows: &[usize]| {
        let sys: Vec<Vec<i64>> = rows.iter().map(|&i| col(i)).collect();
        let ns = nullspace(&sys, r);
        if ns.len() != 1 {
            return false;
        }
        let c = &ns[0];
        let v: Vec<i64> = (0..nr).map(|i| col(i).iter().zip(c).map(|(a, b)| a * b).sum()).collect();
        if v.iter().all(|&x| x == 0) {
            return false;
        }
        let sign = if v.iter().all(|&x| x >= 0) {
            1
        } else if v.iter().all(|&x| x <= 0) {
            -1
        } else {
            return false;
        };
        found = Some(Domain {
            multiplicities: v.into_iter().map(|x| sign * x).collect(),
        });
        true
    });
    found
}

fn choose(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == k {
        return f(cur);
    }
    for i in start..items.len() {
        cur.push(items[i]);
        if choose(items, k, i + 1, cur, f) {
            return true;
        }
        cur.pop();
    }
    false
}

#[cfg(test)]
mod tests;
