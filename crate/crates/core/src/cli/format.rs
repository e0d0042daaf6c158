//! File formats.
//!
//! Instances are JSON objects:
//!
//! ```text
//! {
//!   "dimension": 1,
//!   "theorem": "thm2",
//!   "params": {"p1": 0.8, "p2": 0.8},
//!   "frame": [[[1.0, 0.0]]],
//!   "vectors": [[[0.7071067811865476, 0.7071067811865476]]]
//! }
//! ```
//!
//! with each complex coordinate written as `[re, im]`. Reports are flat
//! TOML: a header of key-value pairs followed by `[[certificate]]` tables,
//! each with its `[[certificate.margin]]` entries. Every float is written
//! with 17 significant digits so values survive a round trip.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::bounds::{Theorem, TheoremParams, VectorFamily};
use crate::certify::{BoundCertificate, GridEntry, Instance};
use crate::error::{Error, Result};
use crate::generators::FuzzSummary;
use crate::linalg::{ComplexScalar, FiniteVector, OrthonormalFrame, FRAME_TOL};

/// Float with 17 significant digits, valid in both JSON and TOML.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn float_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| float(x)).collect();
    format!("[{}]", items.join(", "))
}

enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

fn param_entries(params: &TheoremParams) -> Vec<(&'static str, ParamValue)> {
    use ParamValue::{List, Scalar};
    match params {
        TheoremParams::DiazMetcalf { r } => vec![("r", Scalar(*r))],
        TheoremParams::Components { r1, r2 } => vec![("r1", Scalar(*r1)), ("r2", Scalar(*r2))],
        TheoremParams::Radii { p1, p2 } => vec![("p1", Scalar(*p1)), ("p2", Scalar(*p2))],
        TheoremParams::Radius { p } => vec![("p", Scalar(*p))],
        TheoremParams::UnitRadii => vec![],
        TheoremParams::FrameComponents { r, rho } => vec![("r", List(r.clone())), ("rho", List(rho.clone()))],
        TheoremParams::FrameReal { r } => vec![("r", List(r.clone()))],
        TheoremParams::FrameRadii { p, q } => vec![("p", List(p.clone())), ("q", List(q.clone()))],
        TheoremParams::Sector { m, big_m, ell, big_l } => {
            vec![("m", Scalar(*m)), ("M", Scalar(*big_m)), ("ell", Scalar(*ell)), ("L", Scalar(*big_l))]
        }
    }
}

fn param_text(params: &TheoremParams, sep: &str) -> String {
    let items: Vec<String> = param_entries(params)
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                ParamValue::Scalar(x) => float(x),
                ParamValue::List(xs) => float_list(&xs),
            };
            format!("{k}{sep}{v}")
        })
        .collect();
    items.join(", ")
}

fn number(v: &Value, what: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| Error::invalid(format!("{what} must be a number, got {v}")))?;
    if !x.is_finite() {
        return Err(Error::invalid(format!("{what} is not finite")));
    }
    Ok(x)
}

/// Reads the parameter mapping of `theorem`. List parameters also accept a
/// bare number as a one-element list.
pub fn parse_params(theorem: Theorem, obj: &Map<String, Value>) -> Result<TheoremParams> {
    let expected: &[&str] = match theorem {
        Theorem::Dm => &["r"],
        Theorem::Thm1 => &["r1", "r2"],
        Theorem::Thm2 | Theorem::Cor9 => &["p1", "p2"],
        Theorem::Thm4 => &["p"],
        Theorem::Cor3 | Theorem::Cor8 => &[],
        Theorem::Thm5 => &["r", "rho"],
        Theorem::Cor6 => &["r"],
        Theorem::Thm7 => &["p", "q"],
        Theorem::Thm10 | Theorem::Thm11 => &["m", "M", "ell", "L"],
    };
    if let Some(extra) = obj.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(Error::invalid(format!(
            "unknown parameter {extra:?} for theorem {theorem}; expected {expected:?}"
        )));
    }
    let get =
        |key: &str| obj.get(key).ok_or_else(|| Error::invalid(format!("theorem {theorem} needs parameter {key:?}")));
    let scalar = |key: &str| number(get(key)?, &format!("parameter {key}"));
    let list = |key: &str| -> Result<Vec<f64>> {
        match get(key)? {
            Value::Array(items) => items.iter().map(|v| number(v, &format!("parameter {key}"))).collect(),
            v => Ok(vec![number(v, &format!("parameter {key}"))?]),
        }
    };
    Ok(match theorem {
        Theorem::Dm => TheoremParams::DiazMetcalf { r: scalar("r")? },
        Theorem::Thm1 => TheoremParams::Components { r1: scalar("r1")?, r2: scalar("r2")? },
        Theorem::Thm2 | Theorem::Cor9 => TheoremParams::Radii { p1: scalar("p1")?, p2: scalar("p2")? },
        Theorem::Thm4 => TheoremParams::Radius { p: scalar("p")? },
        Theorem::Cor3 | Theorem::Cor8 => TheoremParams::UnitRadii,
        Theorem::Thm5 => TheoremParams::FrameComponents { r: list("r")?, rho: list("rho")? },
        Theorem::Cor6 => TheoremParams::FrameReal { r: list("r")? },
        Theorem::Thm7 => TheoremParams::FrameRadii { p: list("p")?, q: list("q")? },
        Theorem::Thm10 | Theorem::Thm11 => {
            TheoremParams::Sector { m: scalar("m")?, big_m: scalar("M")?, ell: scalar("ell")?, big_l: scalar("L")? }
        }
    })
}

fn theorem_field(obj: &Map<String, Value>, ctx: &str) -> Result<Theorem> {
    obj.get("theorem")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::invalid(format!("{ctx}: missing string field \"theorem\"")))?
        .parse()
}

fn params_field(theorem: Theorem, obj: &Map<String, Value>, ctx: &str) -> Result<TheoremParams> {
    match obj.get("params") {
        None => parse_params(theorem, &Map::new()),
        Some(Value::Object(p)) => parse_params(theorem, p),
        Some(other) => Err(Error::invalid(format!("{ctx}: \"params\" must be an object, got {other}"))),
    }
}

fn parse_vector(v: &Value, dim: usize, what: &str) -> Result<FiniteVector> {
    let coords = v.as_array().ok_or_else(|| Error::invalid(format!("{what} must be a list of [re, im] pairs")))?;
    if coords.len() != dim {
        return Err(Error::invalid(format!("{what} has {} coordinates, dimension is {dim}", coords.len())));
    }
    let coords = coords
        .iter()
        .map(|c| match c.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(ComplexScalar::new(number(re, what)?, number(im, what)?)),
            _ => Err(Error::invalid(format!("{what}: coordinate {c} is not an [re, im] pair"))),
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteVector::new(coords)
}

fn parse_vectors(obj: &Map<String, Value>, key: &str, dim: usize) -> Result<Vec<FiniteVector>> {
    let items =
        obj.get(key).and_then(Value::as_array).ok_or_else(|| Error::invalid(format!("missing list field {key:?}")))?;
    items.iter().enumerate().map(|(i, v)| parse_vector(v, dim, &format!("{key}[{i}]"))).collect()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed instance JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| Error::invalid("instance must be a JSON object"))?;
    let dim = obj
        .get("dimension")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::invalid("\"dimension\" must be a positive integer"))? as usize;
    let theorem = theorem_field(obj, "instance")?;
    let params = params_field(theorem, obj, "instance")?;
    let frame = OrthonormalFrame::new(parse_vectors(obj, "frame", dim)?, FRAME_TOL)?;
    let family = VectorFamily::new(parse_vectors(obj, "vectors", dim)?)?;
    Ok(Instance { theorem, params, frame, family })
}

pub fn parse_grid(text: &str) -> Result<Vec<GridEntry>> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed grid JSON: {e}")))?;
    let items = root.as_array().ok_or_else(|| Error::invalid("grid must be a JSON list"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let ctx = format!("grid entry {i}");
            let obj = item.as_object().ok_or_else(|| Error::invalid(format!("{ctx} must be an object")))?;
            let theorem = theorem_field(obj, &ctx)?;
            Ok(GridEntry { theorem, params: params_field(theorem, obj, &ctx)? })
        })
        .collect()
}

fn vector_json(v: &FiniteVector) -> String {
    let items: Vec<String> = v.coords().iter().map(|z| format!("[{}, {}]", float(z.re), float(z.im))).collect();
    format!("[{}]", items.join(", "))
}

fn vectors_json(vs: &[FiniteVector]) -> String {
    let items: Vec<String> = vs.iter().map(|v| format!("    {}", vector_json(v))).collect();
    format!("[\n{}\n  ]", items.join(",\n"))
}

pub fn instance_json(instance: &Instance) -> String {
    let params: Vec<String> = param_entries(&instance.params)
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                ParamValue::Scalar(x) => float(x),
                ParamValue::List(xs) => float_list(&xs),
            };
            format!("\"{k}\": {v}")
        })
        .collect();
    format!(
        "{{\n  \"dimension\": {},\n  \"theorem\": \"{}\",\n  \"params\": {{{}}},\n  \"frame\": {},\n  \"vectors\": {}\n}}\n",
        instance.frame.dim(),
        instance.theorem,
        params.join(", "),
        vectors_json(instance.frame.members()),
        vectors_json(instance.family.vectors()),
    )
}

fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

fn push_certificate(out: &mut String, cert: &BoundCertificate) {
    out.push_str("\n[[certificate]]\n");
    push_kv(out, "theorem", format!("\"{}\"", cert.theorem));
    push_kv(out, "params", format!("{{ {} }}", param_text(&cert.params, " = ")));
    push_kv(out, "status", format!("\"{}\"", cert.status().id()));
    push_kv(out, "hypotheses_satisfied", cert.hypothesis.satisfied);
    push_kv(out, "worst_margin", float(cert.hypothesis.worst_margin()));
    push_kv(out, "bound", float(cert.bound));
    push_kv(out, "sum_of_norms", float(cert.sum_of_norms));
    push_kv(out, "norm_of_sum", float(cert.norm_of_sum));
    match cert.ratio {
        Some(r) => push_kv(out, "ratio", float(r)),
        None => push_kv(out, "ratio_defined", false),
    }
    push_kv(out, "inequality_holds", cert.inequality_holds);
    push_kv(out, "equality_case", cert.equality_case);
    if let Some(r) = cert.equality_residual {
        push_kv(out, "equality_residual", float(r));
    }
    if let Some(s) = cert.strict_applicable {
        push_kv(out, "strict_applicable", s);
    }
    let c = &cert.constants;
    for (key, value) in [
        ("alpha", c.alpha),
        ("alpha1", c.alpha1),
        ("alpha2", c.alpha2),
        ("alpha_mM", c.alpha_mm),
        ("alpha_lL", c.alpha_ll),
    ] {
        if let Some(v) = value {
            push_kv(out, key, float(v));
        }
    }
    for (key, value) in [("alpha_t", &c.alpha_t), ("beta_t", &c.beta_t)] {
        if let Some(v) = value {
            push_kv(out, key, float_list(v));
        }
    }
    push_kv(out, "tolerance", float(cert.tolerance));
    for m in &cert.hypothesis.margins {
        out.push_str("\n[[certificate.margin]]\n");
        push_kv(out, "vector", m.vector_index);
        if let Some(t) = m.frame_index {
            push_kv(out, "frame", t);
        }
        push_kv(out, "condition", format!("\"{}\"", m.condition.id()));
        push_kv(out, "margin", float(m.margin));
    }
}

/// Report for `certify` and `scan`; a scan with one applicable entry gives
/// the same text as `certify` on that entry.
pub fn certificates_report(certs: &[BoundCertificate], tol: f64) -> String {
    let mut out = String::new();
    push_kv(&mut out, "tolerance", float(tol));
    push_kv(&mut out, "certificates", certs.len());
    for cert in certs {
        push_certificate(&mut out, cert);
    }
    out
}

pub fn fuzz_report(summary: &FuzzSummary, seed: u64, d_max: usize, n_max: usize, tol: f64) -> String {
    let mut out = String::new();
    push_kv(&mut out, "theorem", format!("\"{}\"", summary.theorem));
    push_kv(&mut out, "seed", seed);
    push_kv(&mut out, "d_max", d_max);
    push_kv(&mut out, "n_max", n_max);
    push_kv(&mut out, "tolerance", float(tol));
    push_kv(&mut out, "trials", summary.trials_run);
    push_kv(&mut out, "hypothesis_hits", summary.hypothesis_hits);
    push_kv(&mut out, "sampled_families", summary.sampled_families);
    push_kv(&mut out, "infeasible_draws", summary.infeasible_draws);
    push_kv(&mut out, "input_errors", summary.input_errors);
    push_kv(&mut out, "violations", summary.violation_count);
    push_kv(&mut out, "violations_recorded", summary.violations.len());
    for v in &summary.violations {
        out.push_str("\n[[violation]]\n");
        push_kv(&mut out, "trial", v.trial);
        push_kv(&mut out, "bound", float(v.certificate.bound));
        match v.certificate.ratio {
            Some(r) => push_kv(&mut out, "ratio", float(r)),
            None => push_kv(&mut out, "ratio_defined", false),
        }
        push_kv(&mut out, "instance", format!("'''\n{}'''", instance_json(&v.instance)));
    }
    out
}

/// One-line human summary of a certificate.
pub fn summary_line(cert: &BoundCertificate) -> String {
    let ratio = cert.ratio.map_or_else(|| "undefined".to_string(), |r| format!("{r:.6}"));
    format!("{}: {} (bound {:.6}, ratio {ratio})", cert.theorem, cert.status().id(), cert.bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE, -0.0, 0.68 * 2f64.sqrt()] {
            let back: f64 = serde_json::from_str(&float(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn instance_round_trip() {
        let text = r#"{"dimension": 2, "theorem": "thm5",
            "params": {"r": [0.5], "rho": 0.25},
            "frame": [[[1, 0], [0, 0]]],
            "vectors": [[[0.5, 0.25], [0.1, -3]]]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.params, TheoremParams::FrameComponents { r: vec![0.5], rho: vec![0.25] });
        let again = parse_instance(&instance_json(&inst)).unwrap();
        assert_eq!(again, inst);
        assert_eq!(instance_json(&again), instance_json(&inst));
    }

    #[test]
    fn rejects_bad_instances() {
        let non_unit = r#"{"dimension": 1, "theorem": "dm", "params": {"r": 0.5},
            "frame": [[[2, 0]]], "vectors": [[[1, 0]]]}"#;
        let err = parse_instance(non_unit).unwrap_err();
        assert!(err.to_string().contains("not unit"), "{err}");
        let short = r#"{"dimension": 2, "theorem": "dm", "params": {"r": 0.5},
            "frame": [[[1, 0], [0, 0]]], "vectors": [[[1, 0]]]}"#;
        assert!(parse_instance(short).is_err());
        let unknown = r#"{"dimension": 1, "theorem": "dm", "params": {"s": 0.5},
            "frame": [[[1, 0]]], "vectors": [[[1, 0]]]}"#;
        assert!(parse_instance(unknown).unwrap_err().to_string().contains("unknown parameter"));
        assert!(parse_instance("[1, 2").is_err());
    }

    #[test]
    fn grid_entries() {
        let grid =
            parse_grid(r#"[{"theorem": "thm2", "params": {"p1": 0.8, "p2": 0.8}}, {"theorem": "cor3"}]"#).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[1].params, TheoremParams::UnitRadii);
    }
}
