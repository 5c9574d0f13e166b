//! Contact surgery diagrams along Legendrian links in standard S³ and two
//! sufficient conditions for the contact element to vanish.
//!
//! Rule A: a (+1)-surgery along a front with a zigzag. Rule B: a (+1)-surgery
//! along an unknot K with tb = −1 that links exactly one other (+1)-component
//! once and nothing else. Both are sound and far from complete, so anything
//! else is reported as inconclusive.

use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legendrian::{classical_invariants, detect_destabilizable, FrontDiagram, LegendrianError, Verdict};

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("invalid surgery diagram: {0}")]
    InvalidDiagram(String),
    #[error("contact coefficient {0} is not an integer")]
    NonIntegerCoefficient(Rational64),
    #[error("front {path}: {source}")]
    Front { path: String, source: LegendrianError },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed surgery JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryComponent {
    pub front: FrontDiagram,
    pub coeff: Rational64,
    pub unknotted: bool,
}

impl SurgeryComponent {
    pub fn new(front: FrontDiagram, coeff: i64, unknotted: bool) -> Self {
        SurgeryComponent { front, coeff: Rational64::from_integer(coeff), unknotted }
    }

    fn is_plus_one(&self) -> bool {
        self.coeff == Rational64::from_integer(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactSurgeryDiagram {
    components: Vec<SurgeryComponent>,
    linking: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingRule {
    DestabilizablePlusOne,
    ConvanishConfiguration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCertificate {
    pub verdict: Verdict,
    pub rule: Option<VanishingRule>,
    /// component indices: [L] for rule A, [K, K'] for rule B
    pub witness: Vec<usize>,
    pub notes: Vec<String>,
}

impl fmt::Display for VanishingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(r) => write!(f, "{}({r:?})", self.verdict),
            None => write!(f, "{}", self.verdict),
        }
    }
}

impl ContactSurgeryDiagram {
    pub fn new(components: Vec<SurgeryComponent>, linking: Vec<Vec<i64>>) -> Result<Self, SurgeryError> {
        let k = components.len();
        if k == 0 {
            return Err(SurgeryError::InvalidDiagram("no components".into()));
        }
        if linking.len() != k || linking.iter().any(|r| r.len() != k) {
            return Err(SurgeryError::InvalidDiagram(format!("linking matrix must be {k}x{k}")));
        }
        for i in 0..k {
            if linking[i][i] != 0 {
                return Err(SurgeryError::InvalidDiagram(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..i {
                if linking[i][j] != linking[j][i] {
                    return Err(SurgeryError::InvalidDiagram(format!("linking matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if let Some(i) = components.iter().position(|c| c.coeff == Rational64::from_integer(0)) {
            return Err(SurgeryError::InvalidDiagram(format!("component {i} has coefficient 0")));
        }
        Ok(ContactSurgeryDiagram { components, linking })
    }

    pub fn components(&self) -> &[SurgeryComponent] {
        &self.components
    }

    pub fn linking(&self, i: usize, j: usize) -> i64 {
        self.linking[i][j]
    }

    /// Block-diagonal union; the two parts are unlinked.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let (a, b) = (self.components.len(), other.components.len());
        let mut linking = vec![vec![0; a + b]; a + b];
        for i in 0..a {
            linking[i][..a].copy_from_slice(&self.linking[i]);
        }
        for i in 0..b {
            linking[a + i][a..].copy_from_slice(&other.linking[i]);
        }
        let components = self.components.iter().chain(&other.components).cloned().collect();
        ContactSurgeryDiagram { components, linking }
    }

    pub fn without(&self, i: usize) -> Result<Self, SurgeryError> {
        let keep: Vec<usize> = (0..self.components.len()).filter(|&j| j != i).collect();
        let components = keep.iter().map(|&j| self.components[j].clone()).collect();
        let linking = keep.iter().map(|&r| keep.iter().map(|&c| self.linking[r][c]).collect()).collect();
        ContactSurgeryDiagram::new(components, linking)
    }

    /// Reads the JSON format; `front` entries are paths relative to the file.
    pub fn load(path: &Path) -> Result<Self, SurgeryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SurgeryError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn from_json(text: &str, base: &Path) -> Result<Self, SurgeryError> {
        let raw: RawDiagram = serde_json::from_str(text)?;
        let mut components = Vec::with_capacity(raw.components.len());
        for (i, c) in raw.components.into_iter().enumerate() {
            let (origin, text) = match (c.front, c.front_text) {
                (Some(p), None) => {
                    let full = base.join(&p);
                    let text = std::fs::read_to_string(&full)
                        .map_err(|source| SurgeryError::Io { path: full.display().to_string(), source })?;
                    (p, text)
                }
                (None, Some(t)) => (format!("component {i}"), t),
                _ => {
                    return Err(SurgeryError::InvalidDiagram(format!(
                        "component {i} needs exactly one of front, front_text"
                    )))
                }
            };
            let front = text.parse().map_err(|source| SurgeryError::Front { path: origin, source })?;
            let coeff = parse_coeff(&c.coeff)
                .ok_or_else(|| SurgeryError::InvalidDiagram(format!("bad coefficient {:?}", c.coeff)))?;
            components.push(SurgeryComponent { front, coeff, unknotted: c.unknotted });
        }
        ContactSurgeryDiagram::new(components, raw.linking)
    }

    /// Self-contained JSON with fronts inlined.
    pub fn to_json(&self) -> serde_json::Value {
        let components = self
            .components
            .iter()
            .map(|c| RawComponent {
                front: None,
                front_text: Some(c.front.to_text()),
                coeff: format_coeff(c.coeff),
                unknotted: c.unknotted,
            })
            .collect();
        serde_json::to_value(RawDiagram { components, linking: self.linking.clone() }).unwrap()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    components: Vec<RawComponent>,
    linking: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    front: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    front_text: Option<String>,
    coeff: String,
    #[serde(default)]
    unknotted: bool,
}

fn parse_coeff(s: &str) -> Option<Rational64> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    s.parse().ok()
}

fn format_coeff(c: Rational64) -> String {
    if *c.numer() > 0 {
        format!("+{c}")
    } else {
        c.to_string()
    }
}

pub fn smooth_framing(c: &SurgeryComponent) -> Result<i64, SurgeryError> {
    if !c.coeff.is_integer() {
        return Err(SurgeryError::NonIntegerCoefficient(c.coeff));
    }
    Ok(classical_invariants(&c.front).tb + c.coeff.to_integer())
}

fn rule_a(d: &ContactSurgeryDiagram, i: usize) -> bool {
    let c = &d.components[i];
    // zigzags do not depend on orientation, only their sign does
    c.is_plus_one() && detect_destabilizable(&c.front).is_some()
}

fn rule_b(d: &ContactSurgeryDiagram, k: usize, k2: usize) -> bool {
    let (a, b) = (&d.components[k], &d.components[k2]);
    k != k2
        && a.unknotted
        && classical_invariants(&a.front).tb == -1
        && a.is_plus_one()
        && b.is_plus_one()
        && d.linking[k][k2].abs() == 1
        && (0..d.components.len()).all(|j| j == k || j == k2 || d.linking[k][j] == 0)
}

/// Re-checks the per-component predicates behind a certificate.
pub fn verify_certificate(d: &ContactSurgeryDiagram, c: &VanishingCertificate) -> bool {
    let n = d.components.len();
    match (c.verdict, c.rule, c.witness.as_slice()) {
        (Verdict::Vanishes, Some(VanishingRule::DestabilizablePlusOne), &[i]) => i < n && rule_a(d, i),
        (Verdict::Vanishes, Some(VanishingRule::ConvanishConfiguration), &[k, k2]) => {
            k < n && k2 < n && rule_b(d, k, k2)
        }
        (Verdict::Inconclusive, None, []) => true,
        _ => false,
    }
}

pub fn detect_vanishing(d: &ContactSurgeryDiagram) -> VanishingCertificate {
    let n = d.components.len();
    let notes = d
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.coeff.is_integer() || c.coeff.to_integer().abs() != 1)
        .map(|(i, c)| format!("component {i} has coefficient {}; only ±1 enter the rules", format_coeff(c.coeff)))
        .collect();
    let found = (0..n)
        .find(|&i| rule_a(d, i))
        .map(|i| (VanishingRule::DestabilizablePlusOne, vec![i]))
        .or_else(|| {
            (0..n)
                .flat_map(|k| (0..n).map(move |k2| (k, k2)))
                .find(|&(k, k2)| rule_b(d, k, k2))
                .map(|(k, k2)| (VanishingRule::ConvanishConfiguration, vec![k, k2]))
        });
    match found {
        Some((rule, witness)) => VanishingCertificate { verdict: Verdict::Vanishes, rule: Some(rule), witness, notes },
        None => VanishingCertificate { verdict: Verdict::Inconclusive, rule: None, witness: vec![], notes },
    }
}

const SHARK: &str = "open 0\nopen 1\nclose 2\nclose 0\n";
const UNKNOT: &str = "open 0\nclose 0\n";

/// The shark K with +1, unlinked from a +1 unknot and a −1 unknot that
/// link each other once.
pub fn overtwisted_s3_fixture() -> ContactSurgeryDiagram {
    let front = |s: &str| s.parse::<FrontDiagram>().unwrap();
    ContactSurgeryDiagram::new(
        vec![
            SurgeryComponent::new(front(SHARK), 1, true),
            SurgeryComponent::new(front(UNKNOT), 1, true),
            SurgeryComponent::new(front(UNKNOT), -1, true),
        ],
        vec![vec![0, 0, 0], vec![0, 0, -1], vec![0, -1, 0]],
    )
    .unwrap()
}
