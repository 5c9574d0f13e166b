use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use floercalc_core::cone::{les_verify, random_chain_map, Orientation};
use floercalc_core::diagram::twist::{dehn_twist, block_triangularity_check, DeltaCurve, TwistSign};
use floercalc_core::diagram::{AdmissibilityMode, CombinatorialDiagram, DiagramError, Flavor};
use floercalc_core::gf2::homology;
use floercalc_core::grid::{hfk_hat_bounded, size_limit, GridDiagram, GridError, DEFAULT_MAX_N, HARD_MAX_N};
use floercalc_core::knotpoly::{alexander_conway, alternating_hfk, signature, KnotPolyError, LaurentPolynomial, LinkDiagram};
use floercalc_core::legendrian::{
    classical_invariants, detect_destabilizable, loss_gradings, loss_vanishing_report, FrontDiagram,
};
use floercalc_core::ranks::BigradedRanks;
use floercalc_core::surgery::{detect_vanishing, smooth_framing, ContactSurgeryDiagram, SurgeryError};

use crate::report::{CliError, Outcome};
use crate::*;

type Res = Result<Outcome, CliError>;

fn read(path: &str) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn read_text(path: &str) -> Result<(String, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    Ok((text, bytes))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn outcome(result: Value, text: Vec<String>, input: Vec<u8>) -> Outcome {
    Outcome { result, text, input, warnings: vec![] }
}

fn poly_json(p: &LaurentPolynomial) -> Value {
    json!({ "terms": p, "text": p.to_string() })
}

fn table_json(t: &BigradedRanks) -> Value {
    json!({ "ranks": t, "total": t.total() })
}

fn table_lines(t: &BigradedRanks) -> Vec<String> {
    let mut lines: Vec<String> = t.iter().map(|(a, m, r)| format!("(A, M) = ({a}, {m}): rank {r}")).collect();
    lines.push(format!("total rank {}", t.total()));
    lines
}

pub fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::Cone(ConeCmd::Verify { trials, max_dim }) => cone_verify(cli.seed, *trials, *max_dim),
        Command::Diagram(c) => diagram(c),
        Command::Grid(c) => grid(c),
        Command::Knot(c) => knot(c),
        Command::Legendrian(c) => legendrian(c),
        Command::Surgery(SurgeryCmd::Check { file }) => surgery_check(file),
    }
}

fn cone_verify(seed: u64, trials: usize, max_dim: usize) -> Res {
    if max_dim == 0 {
        return Err(CliError::Input("--max-dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(trials);
    let mut failures = 0;
    for i in 0..trials {
        let f = random_chain_map(&mut rng, max_dim);
        let orientation = if i % 2 == 0 { Orientation::MapIntoFirst } else { Orientation::MapIntoSecond };
        let r = les_verify(&f, orientation).map_err(|e| CliError::domain("cone", e))?;
        if !r.passed() {
            failures += 1;
        }
        reports.push(r);
    }
    let input = format!("cone verify seed={seed} trials={trials} max_dim={max_dim}").into_bytes();
    let text = vec![format!("{trials} trials, {failures} failures")];
    let mut o = outcome(serde_json::to_value(&reports).unwrap(), text, input);
    if failures > 0 {
        o.warnings.push(format!("{failures} trials failed"));
    }
    Ok(o)
}

fn diagram_error(e: DiagramError) -> CliError {
    match e {
        DiagramError::Malformed(_) | DiagramError::UnknownRegion(_) => CliError::Input(e.to_string()),
        DiagramError::NotNice { .. } => CliError::domain("not-nice", e),
        DiagramError::Ungradable(_) => CliError::domain("ungradable", e),
        DiagramError::TooLarge(_) => CliError::domain("too-large", e),
        DiagramError::BadDeltaPosition(_) => CliError::domain("bad-delta", e),
        DiagramError::Gf2(_) => CliError::domain("gf2", e),
    }
}

fn load_diagram(path: &str) -> Result<(CombinatorialDiagram, Vec<u8>), CliError> {
    let (text, bytes) = read_text(path)?;
    Ok((parse_json(path, &text)?, bytes))
}

fn diagram(c: &DiagramCmd) -> Res {
    match c {
        DiagramCmd::Homology { file, flavor } => {
            let (d, input) = load_diagram(file)?;
            let flavor = match flavor {
                FlavorArg::Hat => Flavor::Hat,
                FlavorArg::KnotHat => Flavor::KnotHat,
            };
            let nc = d.nice_differential(flavor, None).map_err(diagram_error)?;
            let h = homology(&nc.complex);
            let total: usize = h.values().sum();
            let mut text: Vec<String> = h.iter().filter(|(_, &r)| r > 0).map(|(k, r)| format!("H_{k}: rank {r}")).collect();
            text.push(format!("{} generators, {} discs, total rank {total}", nc.generators.len(), nc.discs.len()));
            let result = json!({
                "flavor": flavor,
                "generators": nc.generators.len(),
                "discs": nc.discs.len(),
                "homology": h,
                "total": total,
            });
            Ok(outcome(result, text, input))
        }
        DiagramCmd::Admissible { file, mode } => {
            let (d, input) = load_diagram(file)?;
            let mode = match mode {
                ModeArg::WeakAllSpinc => AdmissibilityMode::WeakAllSpinc,
                ModeArg::ExtremelyWeakConservative => AdmissibilityMode::ExtremelyWeakConservative,
            };
            let a = d.check_admissibility(mode);
            let mut text = vec![if a.admissible { "admissible" } else { "not admissible" }.to_string()];
            if let Some(w) = &a.witness {
                text.push(format!("witness domain {:?}", w.multiplicities));
            }
            Ok(outcome(json!({ "mode": mode, "admissibility": a }), text, input))
        }
        DiagramCmd::Twist { file, delta, sign } => {
            let (d, mut input) = load_diagram(file)?;
            let (dt, db) = read_text(delta)?;
            input.extend(db);
            let delta: DeltaCurve = parse_json(delta, &dt)?;
            let sign = match sign {
                SignArg::Positive => TwistSign::Positive,
                SignArg::Negative => TwistSign::Negative,
            };
            let t = dehn_twist(&d, &delta, sign).map_err(diagram_error)?;
            let r = block_triangularity_check(&t).map_err(diagram_error)?;
            let text = vec![
                format!(
                    "{} beta-part and {} delta-part generators, {} off-diagonal entries",
                    r.beta_part_generators, r.delta_part_generators, r.off_diagonal_entries
                ),
                format!("lower block zero: {}", r.lower_block_zero),
                format!("diagonal blocks match: {} {}", r.beta_block_matches, r.delta_block_matches),
                format!("twisted homology {} = cone homology {}: {}", r.twisted_total, r.cone_total, r.passed()),
            ];
            Ok(outcome(json!({ "sign": sign, "passed": r.passed(), "report": r }), text, input))
        }
    }
}

fn grid_error(e: GridError) -> CliError {
    match e {
        GridError::InvalidGrid(_) => CliError::Input(e.to_string()),
        GridError::NotAKnot { .. } => CliError::domain("not-a-knot", e),
        GridError::SizeLimit { .. } => CliError::domain("size-limit", e),
        GridError::DivisionNotExact(_) => CliError::domain("division-not-exact", e),
    }
}

fn grid(c: &GridCmd) -> Res {
    let (GridCmd::Hfk(args) | GridCmd::Euler(args)) = c;
    let (text, input) = read_text(&args.file)?;
    let g: GridDiagram = parse_json(&args.file, &text)?;
    let max = args.max_n.unwrap_or_else(size_limit);
    if max > HARD_MAX_N {
        return Err(CliError::domain(
            "size-limit",
            format!("--max-n {max} is above the hard limit {HARD_MAX_N}"),
        ));
    }
    let mut warnings = vec![];
    if g.n() > DEFAULT_MAX_N && g.n() <= max {
        let states: usize = (1..=g.n()).product();
        warnings.push(format!(
            "n = {} enumerates {states} states; expect several hundred MB of memory and minutes of runtime",
            g.n()
        ));
    }
    let h = hfk_hat_bounded(&g, max).map_err(grid_error)?;
    let mut o = match c {
        GridCmd::Hfk(_) => {
            let mut result = table_json(&h);
            result["n"] = g.n().into();
            outcome(result, table_lines(&h), input)
        }
        GridCmd::Euler(_) => {
            let e = h.euler();
            outcome(json!({ "n": g.n(), "euler": poly_json(&e) }), vec![e.to_string()], input)
        }
    };
    o.warnings = warnings;
    Ok(o)
}

fn knot_error(e: KnotPolyError) -> CliError {
    match e {
        KnotPolyError::NotAKnotOrLink(_) => CliError::Input(e.to_string()),
        KnotPolyError::NotAKnot { .. } => CliError::domain("not-a-knot", e),
        KnotPolyError::TooManyCrossings { .. } => CliError::domain("too-many-crossings", e),
        KnotPolyError::OddSignature(_) => CliError::domain("odd-signature", e),
        KnotPolyError::HalfIntegerExponents => CliError::domain("half-integer-exponents", e),
    }
}

fn knot(c: &KnotCmd) -> Res {
    let (KnotCmd::Alexander { file } | KnotCmd::Signature { file } | KnotCmd::AlternatingHfk { file, .. }) = c;
    let (text, input) = read_text(file)?;
    let d: LinkDiagram = parse_json(file, &text)?;
    match c {
        KnotCmd::Alexander { .. } => {
            let p = alexander_conway(&d).map_err(knot_error)?;
            Ok(outcome(json!({ "alexander": poly_json(&p) }), vec![p.to_string()], input))
        }
        KnotCmd::Signature { .. } => {
            let s = signature(&d).map_err(knot_error)?;
            Ok(outcome(json!({ "signature": s }), vec![s.to_string()], input))
        }
        KnotCmd::AlternatingHfk { mirror, .. } => {
            let d = if *mirror { d.mirror() } else { d };
            if d.components() != 1 {
                return Err(knot_error(KnotPolyError::NotAKnot { components: d.components() }));
            }
            let delta = alexander_conway(&d).map_err(knot_error)?;
            let sigma = signature(&d).map_err(knot_error)?;
            let t = alternating_hfk(&delta, sigma).map_err(knot_error)?;
            let mut result = table_json(&t);
            result["alexander"] = poly_json(&delta);
            result["signature"] = sigma.into();
            result["mirror"] = (*mirror).into();
            let mut o = outcome(result, table_lines(&t), input);
            o.warnings.push("the table is only valid for alternating knots".into());
            Ok(o)
        }
    }
}

fn load_front(path: &str) -> Result<(FrontDiagram, Vec<u8>), CliError> {
    let (text, bytes) = read_text(path)?;
    let f = text.parse().map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    Ok((f, bytes))
}

/// A rank table, given bare or as the report of `grid hfk` or
/// `knot alternating-hfk`.
fn load_table(path: &str) -> Result<(BigradedRanks, Vec<u8>), CliError> {
    let (text, bytes) = read_text(path)?;
    let v: Value = parse_json(path, &text)?;
    let ranks = if v.is_array() {
        &v
    } else if let Some(r) = v.pointer("/result/ranks").or_else(|| v.get("ranks")) {
        r
    } else {
        return Err(CliError::Input(format!("{path}: no rank table found")));
    };
    let t = serde_json::from_value(ranks.clone()).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    Ok((t, bytes))
}

fn legendrian(c: &LegendrianCmd) -> Res {
    match c {
        LegendrianCmd::Invariants { file } => {
            let (f, input) = load_front(file)?;
            let ci = classical_invariants(&f);
            let g = loss_gradings(ci);
            let w = detect_destabilizable(&f);
            let text = vec![
                format!("tb = {}, rot = {}", ci.tb, ci.rot),
                g.to_string(),
                match &w {
                    Some(w) => format!("destabilizable: {w}"),
                    None => "no zigzag".into(),
                },
            ];
            let result = json!({
                "crossings": f.crossings(),
                "cusps": f.cusps(),
                "invariants": ci,
                "gradings": g,
                "zigzag": w,
            });
            Ok(outcome(result, text, input))
        }
        LegendrianCmd::Vanishing { file, hfk } => {
            let (f, mut input) = load_front(file)?;
            let (t, tb) = load_table(hfk)?;
            input.extend(tb);
            let cert = loss_vanishing_report(&f, &t);
            Ok(outcome(serde_json::to_value(&cert).unwrap(), vec![cert.to_string()], input))
        }
    }
}

fn surgery_error(e: SurgeryError) -> CliError {
    match e {
        SurgeryError::NonIntegerCoefficient(_) => CliError::domain("non-integer-coefficient", e),
        _ => CliError::Input(e.to_string()),
    }
}

fn surgery_check(file: &str) -> Res {
    let d = ContactSurgeryDiagram::load(Path::new(file)).map_err(surgery_error)?;
    // fronts are inlined so the digest covers them
    let input = d.to_json().to_string().into_bytes();
    let cert = detect_vanishing(&d);
    let components: Vec<Value> = d
        .components()
        .iter()
        .map(|c| {
            let ci = classical_invariants(&c.front);
            json!({
                "tb": ci.tb,
                "rot": ci.rot,
                "coeff": c.coeff.to_string(),
                "smooth_framing": smooth_framing(c).ok(),
            })
        })
        .collect();
    let mut text = vec![cert.to_string()];
    if !cert.witness.is_empty() {
        text.push(format!("witness components {:?}", cert.witness));
    }
    let mut o = outcome(json!({ "certificate": cert, "components": components }), text, input);
    o.warnings = cert.notes.clone();
    Ok(o)
}
