//! JSON documents (`"schema": 1`) for scalars, descriptors, records,
//! scenarios, jump problems, certificates, ellipsoids and sampled paths.
//! Parse errors carry the field path, e.g. `records[0].i1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dynamics::{Ellipsoid, SampledPath};
use crate::iteration::PathRecord;
use crate::jump::{Check, Injection, JumpCertificate, JumpProblem};
use crate::linalg::Mat;
use crate::normal_form::NormalFormDescriptor;
use crate::scalar::{format_rational, parse_rational, Generator, GeneratorKind, Rational, Scalar};
use crate::symplectic::{Angle, SymplecticMatrix};
use crate::theorem::{Scenario, Step, TheoremReport};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, Error)]
pub enum IoError {
    #[error("{path}: {msg}")]
    Field { path: String, msg: String },
    #[error("malformed JSON: {0}")]
    Json(String),
}

fn field_err(path: &str, msg: impl Into<String>) -> IoError {
    IoError::Field { path: path.to_string(), msg: msg.into() }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Object view that remembers where it sits in the document.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, path: &str) -> Result<Self, IoError> {
        v.as_object()
            .map(|map| Obj { map, path: path.to_string() })
            .ok_or_else(|| field_err(path, "expected an object"))
    }

    fn at(&self, key: &str) -> String {
        join(&self.path, key)
    }

    fn req(&self, key: &str) -> Result<&'a Value, IoError> {
        self.map.get(key).ok_or_else(|| field_err(&self.at(key), "missing field"))
    }

    fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn u64(&self, key: &str) -> Result<u64, IoError> {
        self.req(key)?.as_u64().ok_or_else(|| field_err(&self.at(key), "expected a non-negative integer"))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, IoError> {
        match self.opt(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| field_err(&self.at(key), "expected a non-negative integer")),
        }
    }

    fn i64(&self, key: &str) -> Result<i64, IoError> {
        self.req(key)?.as_i64().ok_or_else(|| field_err(&self.at(key), "expected an integer"))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, IoError> {
        match self.opt(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| field_err(&self.at(key), "expected a boolean")),
        }
    }

    fn str(&self, key: &str) -> Result<&'a str, IoError> {
        self.req(key)?.as_str().ok_or_else(|| field_err(&self.at(key), "expected a string"))
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>, IoError> {
        self.req(key)?.as_array().ok_or_else(|| field_err(&self.at(key), "expected an array"))
    }

    fn array_or_empty(&self, key: &str) -> Result<&'a [Value], IoError> {
        match self.opt(key) {
            None => Ok(&[]),
            Some(v) => v.as_array().map(Vec::as_slice).ok_or_else(|| field_err(&self.at(key), "expected an array")),
        }
    }

    fn check_schema(&self) -> Result<(), IoError> {
        match self.req("schema")?.as_u64() {
            Some(SCHEMA) => Ok(()),
            _ => Err(field_err(&self.at("schema"), format!("unsupported schema (expected {SCHEMA})"))),
        }
    }
}

pub fn parse_json(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))
}

/// Pretty-printed, keys sorted: the canonical byte form.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

// ---- generators and scalars -------------------------------------------------

/// Generators known while parsing one document: declared ones plus `sqrt(N)`.
#[derive(Default)]
pub struct GeneratorTable {
    declared: HashMap<String, Arc<Generator>>,
}

impl GeneratorTable {
    pub fn from_document(doc: &Value) -> Result<Self, IoError> {
        let mut table = GeneratorTable::default();
        let Some(obj) = doc.as_object() else { return Ok(table) };
        let Some(list) = obj.get("generators") else { return Ok(table) };
        let list = list.as_array().ok_or_else(|| field_err("generators", "expected an array"))?;
        for (i, g) in list.iter().enumerate() {
            let path = format!("generators[{i}]");
            let o = Obj::new(g, &path)?;
            let id = o.str("id")?;
            let desc = o.str("desc")?;
            let lo = rational_field(&o, "lo")?;
            let hi = rational_field(&o, "hi")?;
            let gen = Generator::declared(id, desc, lo, hi).map_err(|e| field_err(&path, e.to_string()))?;
            table.declared.insert(id.to_string(), gen);
        }
        Ok(table)
    }

    fn resolve(&self, id: &str, path: &str) -> Result<Arc<Generator>, IoError> {
        if let Some(g) = self.declared.get(id) {
            return Ok(g.clone());
        }
        let radicand = id.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')).and_then(|s| s.parse::<u64>().ok());
        match radicand {
            Some(d) => Generator::sqrt(d).map_err(|e| field_err(path, e.to_string())),
            None => Err(field_err(path, format!("unknown generator id {id:?}"))),
        }
    }
}

fn rational_field(o: &Obj, key: &str) -> Result<Rational, IoError> {
    rational_from_json(o.req(key)?, &o.at(key))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational, IoError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| field_err(path, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or_default().into())),
        _ => Err(field_err(path, "expected a rational string \"p/q\"")),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    let irr: Map<String, Value> =
        s.irrational_coeffs().map(|(g, c)| (g.id().to_string(), rational_to_json(c))).collect();
    json!({ "rat": rational_to_json(s.rational_part()), "irr": irr })
}

pub fn scalar_from_json(v: &Value, path: &str, gens: &GeneratorTable) -> Result<Scalar, IoError> {
    if !v.is_object() {
        return Ok(Scalar::from_rational(rational_from_json(v, path)?));
    }
    let o = Obj::new(v, path)?;
    let mut s = Scalar::from_rational(match o.opt("rat") {
        Some(r) => rational_from_json(r, &o.at("rat"))?,
        None => Rational::from_integer(0.into()),
    });
    if let Some(irr) = o.opt("irr") {
        let ipath = o.at("irr");
        let m = irr.as_object().ok_or_else(|| field_err(&ipath, "expected an object"))?;
        for (id, c) in m {
            let cpath = join(&ipath, id);
            let g = gens.resolve(id, &cpath)?;
            s = s.with_term(&g, rational_from_json(c, &cpath)?);
        }
    }
    Ok(s)
}

fn declared_generators<'a>(scalars: impl Iterator<Item = &'a Scalar>) -> Value {
    let mut seen: BTreeMap<String, Value> = BTreeMap::new();
    for s in scalars {
        for g in s.generators() {
            if *g.kind() == GeneratorKind::Declared {
                let (lo, hi) = g.declared_bounds();
                seen.insert(
                    g.id().to_string(),
                    json!({"id": g.id(), "desc": g.desc(), "lo": rational_to_json(lo), "hi": rational_to_json(hi)}),
                );
            }
        }
    }
    Value::Array(seen.into_values().collect())
}

// ---- angles, descriptors, records -------------------------------------------

pub fn angle_to_json(a: &Angle) -> Value {
    match a {
        Angle::Exact(s) => scalar_to_json(s),
        Angle::Numeric(x) => json!({ "numeric": x }),
    }
}

pub fn angle_from_json(v: &Value, path: &str, gens: &GeneratorTable) -> Result<Angle, IoError> {
    if let Some(x) = v.as_object().and_then(|o| o.get("numeric")) {
        return x.as_f64().map(Angle::Numeric).ok_or_else(|| field_err(&join(path, "numeric"), "expected a number"));
    }
    Ok(Angle::Exact(scalar_from_json(v, path, gens)?))
}

pub fn descriptor_to_json(d: &NormalFormDescriptor) -> Value {
    let list = |l: &[Angle]| Value::Array(l.iter().map(angle_to_json).collect());
    json!({
        "p_minus": d.p_minus, "p_zero": d.p_zero, "p_plus": d.p_plus,
        "q_minus": d.q_minus, "q_zero": d.q_zero, "q_plus": d.q_plus,
        "k": d.k, "hyperbolic_sign": d.hyperbolic_sign,
        "theta_list": list(&d.theta_list),
        "alpha_list": list(&d.alpha_list),
        "beta_list": list(&d.beta_list),
    })
}

pub fn descriptor_from_json(v: &Value, path: &str, gens: &GeneratorTable) -> Result<NormalFormDescriptor, IoError> {
    let o = Obj::new(v, path)?;
    let list = |key: &str| -> Result<Vec<Angle>, IoError> {
        o.array_or_empty(key)?
            .iter()
            .enumerate()
            .map(|(i, a)| angle_from_json(a, &format!("{}[{i}]", o.at(key)), gens))
            .collect()
    };
    let d = NormalFormDescriptor {
        p_minus: o.usize_or("p_minus", 0)?,
        p_zero: o.usize_or("p_zero", 0)?,
        p_plus: o.usize_or("p_plus", 0)?,
        q_minus: o.usize_or("q_minus", 0)?,
        q_zero: o.usize_or("q_zero", 0)?,
        q_plus: o.usize_or("q_plus", 0)?,
        k: o.usize_or("k", 0)?,
        hyperbolic_sign: o.bool_or("hyperbolic_sign", false)?,
        theta_list: list("theta_list")?,
        alpha_list: list("alpha_list")?,
        beta_list: list("beta_list")?,
    };
    d.validate().map_err(|e| field_err(path, e.to_string()))?;
    Ok(d)
}

pub fn record_to_json(r: &PathRecord) -> Value {
    json!({
        "label": r.label, "n": r.n, "i1": r.i1, "nu1": r.nu1,
        "descriptor": descriptor_to_json(&r.descriptor),
        "tau": scalar_to_json(&r.tau),
    })
}

pub fn record_from_json(v: &Value, path: &str, gens: &GeneratorTable) -> Result<PathRecord, IoError> {
    let o = Obj::new(v, path)?;
    let descriptor = descriptor_from_json(o.req("descriptor")?, &o.at("descriptor"), gens)?;
    let n = o.u64("n")? as usize;
    let i1 = o.i64("i1")?;
    let tau = scalar_from_json(o.req("tau")?, &o.at("tau"), gens)?;
    let label = match o.opt("label") {
        Some(l) => l.as_str().ok_or_else(|| field_err(&o.at("label"), "expected a string"))?.to_string(),
        None => path.to_string(),
    };
    let nu1 = match o.opt("nu1") {
        Some(_) => o.u64("nu1")? as usize,
        None => descriptor.nullity_one(),
    };
    let rec = PathRecord { label, n, i1, nu1, descriptor, tau };
    rec.validate().map_err(|e| field_err(path, e.to_string()))?;
    Ok(rec)
}

fn records_from(o: &Obj, key: &str, gens: &GeneratorTable) -> Result<Vec<PathRecord>, IoError> {
    o.array(key)?
        .iter()
        .enumerate()
        .map(|(i, r)| record_from_json(r, &format!("{}[{i}]", o.at(key)), gens))
        .collect()
}

fn record_scalars(records: &[PathRecord]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for r in records {
        out.push(r.tau.clone());
        out.extend(r.descriptor.all_angles().filter_map(|a| a.exact().cloned()));
    }
    out
}

// ---- scenarios ---------------------------------------------------------------

pub fn scenario_to_json(s: &Scenario) -> Value {
    json!({
        "schema": SCHEMA,
        "generators": declared_generators(record_scalars(&s.records).iter()),
        "n": s.n,
        "non_degenerate": s.non_degenerate,
        "assumption_a": s.assumption_a,
        "finite_family": s.finite_family,
        "records": s.records.iter().map(record_to_json).collect::<Vec<_>>(),
    })
}

/// Parses and validates a scenario; invariant violations name the record.
pub fn scenario_from_json(doc: &Value) -> Result<Scenario, IoError> {
    let o = Obj::new(doc, "")?;
    o.check_schema()?;
    let gens = GeneratorTable::from_document(doc)?;
    let records = records_from(&o, "records", &gens)?;
    let n = match o.opt("n") {
        Some(_) => o.u64("n")? as usize,
        None => records.first().map_or(0, |r| r.n),
    };
    let s = Scenario {
        n,
        records,
        non_degenerate: o.bool_or("non_degenerate", false)?,
        assumption_a: o.bool_or("assumption_a", false)?,
        finite_family: o.bool_or("finite_family", true)?,
    };
    if let Err(e) = s.validate() {
        let msg = e.to_string();
        let path = s
            .records
            .iter()
            .position(|r| msg.contains(&format!("{}:", r.label)))
            .map_or_else(|| "records".to_string(), |i| format!("records[{i}]"));
        return Err(field_err(&path, msg));
    }
    Ok(s)
}

// ---- jump problems and certificates -----------------------------------------

/// Optional overrides inside a problem or scenario document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JumpSettings {
    pub delta: Option<Rational>,
    pub epsilon: Option<Rational>,
    pub big_m: Option<u64>,
    pub m0: Option<u64>,
    pub n_bound: Option<u64>,
}

impl JumpSettings {
    pub fn from_json(v: Option<&Value>, path: &str) -> Result<Self, IoError> {
        let Some(v) = v else { return Ok(Self::default()) };
        let o = Obj::new(v, path)?;
        let rat = |k: &str| o.opt(k).map(|x| rational_from_json(x, &o.at(k))).transpose();
        let int = |k: &str| o.opt(k).map(|_| o.u64(k)).transpose();
        Ok(JumpSettings {
            delta: rat("delta")?,
            epsilon: rat("epsilon")?,
            big_m: int("big_m")?,
            m0: int("m0")?,
            n_bound: int("n_bound")?,
        })
    }

    /// Later values win.
    pub fn merge(&self, o: &JumpSettings) -> JumpSettings {
        JumpSettings {
            delta: o.delta.clone().or(self.delta.clone()),
            epsilon: o.epsilon.clone().or(self.epsilon.clone()),
            big_m: o.big_m.or(self.big_m),
            m0: o.m0.or(self.m0),
            n_bound: o.n_bound.or(self.n_bound),
        }
    }

    /// Problem over `records`; unset values take the module defaults
    /// (`δ = 1/10`, `N ≤ 10⁷`, `M`, `M0`, `ε` derived).
    pub fn problem(&self, records: Vec<PathRecord>) -> Result<JumpProblem, crate::jump::JumpError> {
        let delta = self.delta.clone().unwrap_or_else(|| Rational::new(1.into(), 10.into()));
        let mut p = JumpProblem::with_defaults(records, delta, self.n_bound.unwrap_or(10_000_000))?;
        if let Some(m) = self.big_m {
            p.big_m = m;
            if self.m0.is_none() {
                p.m0 = crate::jump::default_m0(&p.records, m)?;
            }
        }
        if let Some(m0) = self.m0 {
            p.m0 = m0;
        }
        if let Some(e) = &self.epsilon {
            p.epsilon = e.clone();
        }
        p.validate()?;
        Ok(p)
    }
}

pub fn problem_to_json(p: &JumpProblem) -> Value {
    json!({
        "schema": SCHEMA,
        "generators": declared_generators(record_scalars(&p.records).iter()),
        "records": p.records.iter().map(record_to_json).collect::<Vec<_>>(),
        "delta": rational_to_json(&p.delta),
        "epsilon": rational_to_json(&p.epsilon),
        "big_m": p.big_m,
        "m0": p.m0,
        "n_bound": p.n_bound,
    })
}

/// Records plus settings; the caller builds the problem after applying overrides.
pub fn problem_from_json(doc: &Value) -> Result<(Vec<PathRecord>, JumpSettings), IoError> {
    let o = Obj::new(doc, "")?;
    o.check_schema()?;
    let gens = GeneratorTable::from_document(doc)?;
    let records = records_from(&o, "records", &gens)?;
    Ok((records, JumpSettings::from_json(Some(doc), "")?))
}

fn check_to_json(c: &Check) -> Value {
    json!({"name": c.name, "path": c.path, "pass": c.pass, "detail": c.detail, "core": c.core})
}

pub fn certificate_to_json(c: &JumpCertificate) -> Value {
    json!({
        "schema": SCHEMA,
        "n": c.n,
        "m": c.m,
        "chi": c.chi,
        "a": c.a.iter().map(rational_to_json).collect::<Vec<_>>(),
        "delta_k": c.delta_k,
        "i_k": c.i_k,
        "big_m": c.big_m,
        "m0": c.m0,
        "verified": c.verified(),
        "checks": c.checks.iter().map(check_to_json).collect::<Vec<_>>(),
    })
}

/// Reads the certificate data; stored checks are ignored (they are recomputed).
pub fn certificate_from_json(v: &Value, path: &str) -> Result<JumpCertificate, IoError> {
    let o = Obj::new(v, path)?;
    let ints = |key: &str| -> Result<Vec<u64>, IoError> {
        o.array(key)?
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_u64().ok_or_else(|| field_err(&format!("{}[{i}]", o.at(key)), "expected a non-negative integer")))
            .collect()
    };
    let sints = |key: &str| -> Result<Vec<i64>, IoError> {
        o.array(key)?
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_i64().ok_or_else(|| field_err(&format!("{}[{i}]", o.at(key)), "expected an integer")))
            .collect()
    };
    let chi = ints("chi")?
        .into_iter()
        .enumerate()
        .map(|(i, x)| u8::try_from(x).ok().filter(|x| *x <= 1).ok_or_else(|| field_err(&format!("{}[{i}]", o.at("chi")), "χ must be 0 or 1")))
        .collect::<Result<Vec<u8>, _>>()?;
    let a = o
        .array("a")?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{}[{i}]", o.at("a"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JumpCertificate {
        n: o.u64("n")?,
        m: ints("m")?,
        chi,
        a,
        delta_k: sints("delta_k")?,
        i_k: sints("i_k")?,
        big_m: o.u64("big_m")?,
        m0: o.u64("m0")?,
        checks: vec![],
    })
}

pub fn injection_to_json(inj: &Injection) -> Value {
    json!({
        "rho": inj.rho,
        "rho_value": rational_to_json(&inj.rho_value),
        "rho_mean_variant": scalar_to_json(&inj.rho_mean_variant),
        "rows": inj.rows.iter().map(|r| json!({
            "s": r.s,
            "target": r.target,
            "candidates": r.candidates.iter().map(|(k, i, nu)| json!({"k": k, "index": i, "nullity": nu})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "flags": inj.flags,
        "assignments": inj.assignments.iter().map(|(a, mono)| json!({"slots": a, "monotone": mono})).collect::<Vec<_>>(),
    })
}

fn step_to_json(s: &Step) -> Value {
    json!({"check": s.check, "scope": s.scope, "pass": s.pass, "detail": s.detail})
}

pub fn report_to_json(r: &TheoremReport, labels: &[String]) -> Value {
    let named = |ks: &[usize]| ks.iter().map(|&k| labels.get(k).cloned().unwrap_or_default()).collect::<Vec<_>>();
    json!({
        "schema": SCHEMA,
        "passed": r.passed(),
        "steps": r.steps.iter().map(step_to_json).collect::<Vec<_>>(),
        "conclusions": r.conclusions,
        "elliptic": named(&r.elliptic),
        "irrationally_elliptic": named(&r.irrationally_elliptic),
        "first_slots": named(&r.first_slots),
        "certificates": r.certificates.iter().map(certificate_to_json).collect::<Vec<_>>(),
        "injections": r.injections.iter().map(injection_to_json).collect::<Vec<_>>(),
    })
}

// ---- matrices, ellipsoids, sampled paths -------------------------------------

pub fn matrix_to_json(m: &SymplecticMatrix) -> Value {
    match m {
        SymplecticMatrix::Exact(a) => json!({
            "dim": a.rows,
            "mode": "exact",
            "rows": (0..a.rows).map(|i| a.row(i).iter().map(scalar_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        SymplecticMatrix::Numeric(a) => json!({
            "dim": a.nrows(),
            "mode": "numeric",
            "rows": dmatrix_rows(a),
        }),
    }
}

fn dmatrix_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()
}

fn numeric_rows(v: &Value, path: &str, dim: Option<usize>) -> Result<DMatrix<f64>, IoError> {
    let rows = v.as_array().ok_or_else(|| field_err(path, "expected an array of rows"))?;
    let n = dim.unwrap_or(rows.len());
    if rows.len() != n {
        return Err(field_err(path, format!("expected {n} rows")));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(|| field_err(&rpath, format!("expected {n} numbers")))?;
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = x.as_f64().ok_or_else(|| field_err(&format!("{rpath}[{j}]"), "expected a number"))?;
        }
    }
    Ok(m)
}

pub fn matrix_from_json(v: &Value, path: &str, gens: &GeneratorTable) -> Result<SymplecticMatrix, IoError> {
    let o = Obj::new(v, path)?;
    let dim = o.u64("dim")? as usize;
    let rows_path = o.at("rows");
    match o.str("mode")? {
        "numeric" => {
            let m = numeric_rows(o.req("rows")?, &rows_path, Some(dim))?;
            SymplecticMatrix::numeric(m).map_err(|e| field_err(path, e.to_string()))
        }
        "exact" => {
            let rows = o.array("rows")?;
            if rows.len() != dim {
                return Err(field_err(&rows_path, format!("expected {dim} rows")));
            }
            let mut out = Vec::with_capacity(dim);
            for (i, row) in rows.iter().enumerate() {
                let rpath = format!("{rows_path}[{i}]");
                let row = row.as_array().filter(|r| r.len() == dim).ok_or_else(|| field_err(&rpath, format!("expected {dim} entries")))?;
                out.push(
                    row.iter()
                        .enumerate()
                        .map(|(j, x)| scalar_from_json(x, &format!("{rpath}[{j}]"), gens))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            SymplecticMatrix::exact(Mat::from_rows(out)).map_err(|e| field_err(path, e.to_string()))
        }
        other => Err(field_err(&o.at("mode"), format!("unknown mode {other:?} (exact|numeric)"))),
    }
}

pub fn ellipsoid_to_json(e: &Ellipsoid) -> Value {
    json!({
        "schema": SCHEMA,
        "generators": declared_generators(e.alphas.iter()),
        "alphas": e.alphas.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "beta": rational_to_json(&e.beta),
    })
}

pub fn ellipsoid_from_json(doc: &Value) -> Result<Ellipsoid, IoError> {
    let o = Obj::new(doc, "")?;
    o.check_schema()?;
    let gens = GeneratorTable::from_document(doc)?;
    let alphas = o
        .array("alphas")?
        .iter()
        .enumerate()
        .map(|(i, a)| scalar_from_json(a, &format!("alphas[{i}]"), &gens))
        .collect::<Result<Vec<_>, _>>()?;
    let mut e = Ellipsoid::new(alphas).map_err(|err| field_err("alphas", err.to_string()))?;
    if o.opt("beta").is_some() {
        e.beta = rational_field(&o, "beta")?;
        e.validate().map_err(|err| field_err("beta", err.to_string()))?;
    }
    Ok(e)
}

pub fn path_to_json(p: &SampledPath) -> Value {
    json!({
        "schema": SCHEMA,
        "times": p.times,
        "matrices": p.matrices.iter().map(dmatrix_rows).collect::<Vec<_>>(),
    })
}

pub fn path_from_json(doc: &Value) -> Result<SampledPath, IoError> {
    let o = Obj::new(doc, "")?;
    o.check_schema()?;
    let times = o
        .array("times")?
        .iter()
        .enumerate()
        .map(|(i, t)| t.as_f64().ok_or_else(|| field_err(&format!("times[{i}]"), "expected a number")))
        .collect::<Result<Vec<_>, _>>()?;
    let matrices = o
        .array("matrices")?
        .iter()
        .enumerate()
        .map(|(i, m)| numeric_rows(m, &format!("matrices[{i}]"), None))
        .collect::<Result<Vec<_>, _>>()?;
    SampledPath::new(times, matrices).map_err(|e| field_err("matrices", e.to_string()))
}
