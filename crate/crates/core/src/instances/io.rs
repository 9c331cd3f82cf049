//! Instance files: one JSON object per file.
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "kind": "quto" | "tqp" | "tqp-linear" | "tqp-ratio",
//!   "n": 3,
//!   "Q": {"dense": [row-major n*n numbers]}   or {"coo": [[i, j, v], ...]},
//!   "c": [...],
//!   "constraints": [{"a": [...], "b": 0}],
//!   "meta": {"generator": "type1", "p": 25, "seed": 1}
//! }
//! ```
//!
//! Ratio files carry "A", "a", "a0", "B", "b", "b0" instead of Q, c and
//! constraints. COO entries are 0-based upper-triangle positions. Numbers are
//! written with 17 significant digits so doubles survive the roundtrip.

use crate::error::{Error, Result};
use crate::problem::{LinearConstraint, ProblemInstance, RatioInstance, SymMatrix, TqpInstance};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

pub const FORMAT_VERSION: u64 = 1;

/// Provenance of a generated instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub generator: Option<String>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: ProblemInstance,
    pub meta: Option<InstanceMeta>,
}

/// 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn number_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| format_number(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn dense(m: &SymMatrix) -> String {
    let n = m.dim();
    if n == 0 {
        return "{\"dense\": []}".into();
    }
    let rows: Vec<String> = (0..n).map(|i| number_list(m.row(i)).trim_matches(['[', ']']).to_string()).collect();
    format!("{{\"dense\": [\n      {}\n    ]}}", rows.join(",\n      "))
}

fn escape(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

/// Serializes an instance (and optional metadata) to the file format.
pub fn to_json_string(inst: &ProblemInstance, meta: Option<&InstanceMeta>) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"format_version\": {FORMAT_VERSION},");
    let _ = writeln!(s, "  \"kind\": {},", escape(inst.kind()));
    let _ = write!(s, "  \"n\": {}", inst.dim());
    match inst {
        ProblemInstance::Quto(t) | ProblemInstance::Tqp(t) | ProblemInstance::Linear(t) => {
            let _ = write!(s, ",\n  \"Q\": {}", dense(&t.q));
            let _ = write!(s, ",\n  \"c\": {}", number_list(&t.c));
            let cons: Vec<String> = t
                .constraints
                .iter()
                .map(|c| format!("{{\"a\": {}, \"b\": {}}}", number_list(&c.a), format_number(c.b)))
                .collect();
            if cons.is_empty() {
                s.push_str(",\n  \"constraints\": []");
            } else {
                let _ = write!(s, ",\n  \"constraints\": [\n    {}\n  ]", cons.join(",\n    "));
            }
        }
        ProblemInstance::Ratio(r) => {
            let _ = write!(s, ",\n  \"A\": {}", dense(&r.a_mat));
            let _ = write!(s, ",\n  \"a\": {}", number_list(&r.a));
            let _ = write!(s, ",\n  \"a0\": {}", format_number(r.a0));
            let _ = write!(s, ",\n  \"B\": {}", dense(&r.b_mat));
            let _ = write!(s, ",\n  \"b\": {}", number_list(&r.b));
            let _ = write!(s, ",\n  \"b0\": {}", format_number(r.b0));
        }
    }
    if let Some(m) = meta {
        let mut parts = Vec::new();
        if let Some(g) = &m.generator {
            parts.push(format!("\"generator\": {}", escape(g)));
        }
        if let Some(p) = m.p {
            parts.push(format!("\"p\": {}", format_number(p)));
        }
        if let Some(seed) = m.seed {
            parts.push(format!("\"seed\": {seed}"));
        }
        let _ = write!(s, ",\n  \"meta\": {{{}}}", parts.join(", "));
    }
    s.push_str("\n}\n");
    s
}

fn perr(location: &str, message: impl Into<String>) -> Error {
    Error::Parse { location: location.to_string(), message: message.into() }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| perr(name, "missing field"))
}

fn number(v: &Value, loc: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(loc, "expected a number"))
}

fn numbers(v: &Value, loc: &str, len: usize) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| perr(loc, "expected an array"))?;
    if arr.len() != len {
        return Err(perr(loc, format!("expected {len} entries, found {}", arr.len())));
    }
    arr.iter().enumerate().map(|(i, x)| number(x, &format!("{loc}[{i}]"))).collect()
}

fn matrix(v: &Value, loc: &str, n: usize) -> Result<SymMatrix> {
    let obj = v.as_object().ok_or_else(|| perr(loc, "expected {\"dense\": ...} or {\"coo\": ...}"))?;
    if let Some(d) = obj.get("dense") {
        let arr = d.as_array().ok_or_else(|| perr(loc, "dense must be an array"))?;
        let flat: Vec<f64> = if arr.first().is_some_and(|r| r.is_array()) {
            if arr.len() != n {
                return Err(perr(loc, format!("expected {n} rows, found {}", arr.len())));
            }
            let mut out = Vec::with_capacity(n * n);
            for (i, row) in arr.iter().enumerate() {
                out.extend(numbers(row, &format!("{loc}.dense[{i}]"), n)?);
            }
            out
        } else {
            numbers(d, &format!("{loc}.dense"), n * n)?
        };
        SymMatrix::new(n, flat).map_err(|e| perr(loc, e.to_string()))
    } else if let Some(c) = obj.get("coo") {
        let arr = c.as_array().ok_or_else(|| perr(loc, "coo must be an array"))?;
        let mut m = SymMatrix::zeros(n);
        for (k, e) in arr.iter().enumerate() {
            let l = format!("{loc}.coo[{k}]");
            let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(|| perr(&l, "expected [i, j, value]"))?;
            let idx = |x: &Value| x.as_u64().map(|v| v as usize).filter(|&v| v < n).ok_or_else(|| perr(&l, "index out of range"));
            let (i, j) = (idx(&t[0])?, idx(&t[1])?);
            m.set(i, j, number(&t[2], &l)?);
        }
        Ok(m)
    } else {
        Err(perr(loc, "expected a dense or coo matrix"))
    }
}

/// Parses the file format.
pub fn from_json_str(text: &str) -> Result<InstanceFile> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| perr(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| perr("document", "expected a JSON object"))?;
    let version = field(obj, "format_version")?.as_u64().ok_or_else(|| perr("format_version", "expected an integer"))?;
    if version != FORMAT_VERSION {
        return Err(perr("format_version", format!("unsupported version {version}")));
    }
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| perr("kind", "expected a string"))?;
    let n = field(obj, "n")?.as_u64().ok_or_else(|| perr("n", "expected a non-negative integer"))? as usize;
    let instance = match kind {
        "quto" | "tqp" | "tqp-linear" => {
            let q = matrix(field(obj, "Q")?, "Q", n)?;
            let c = numbers(field(obj, "c")?, "c", n)?;
            let mut cons = Vec::new();
            if let Some(list) = obj.get("constraints") {
                let arr = list.as_array().ok_or_else(|| perr("constraints", "expected an array"))?;
                for (k, con) in arr.iter().enumerate() {
                    let loc = format!("constraints[{k}]");
                    let co = con.as_object().ok_or_else(|| perr(&loc, "expected an object"))?;
                    let a = numbers(co.get("a").ok_or_else(|| perr(&format!("{loc}.a"), "missing field"))?, &format!("{loc}.a"), n)?;
                    let b = number(co.get("b").ok_or_else(|| perr(&format!("{loc}.b"), "missing field"))?, &format!("{loc}.b"))?;
                    cons.push(LinearConstraint { a, b });
                }
            }
            match kind {
                "quto" => {
                    if !cons.is_empty() {
                        return Err(perr("constraints", "quto instances take no constraints"));
                    }
                    ProblemInstance::Quto(TqpInstance::unconstrained(q, c)?)
                }
                "tqp" => ProblemInstance::Tqp(TqpInstance::new(q, c, cons)?),
                _ => {
                    let t = if cons.is_empty() { TqpInstance::balanced(q, c)? } else { TqpInstance::new(q, c, cons)? };
                    if !t.is_balanced() {
                        return Err(perr("constraints", "tqp-linear needs exactly the constraint 1ᵀx = 0"));
                    }
                    ProblemInstance::Linear(t)
                }
            }
        }
        "tqp-ratio" => ProblemInstance::Ratio(RatioInstance::new(
            matrix(field(obj, "A")?, "A", n)?,
            numbers(field(obj, "a")?, "a", n)?,
            number(field(obj, "a0")?, "a0")?,
            matrix(field(obj, "B")?, "B", n)?,
            numbers(field(obj, "b")?, "b", n)?,
            number(field(obj, "b0")?, "b0")?,
        )?),
        other => return Err(perr("kind", format!("unknown kind {other:?}"))),
    };
    let meta = match obj.get("meta") {
        None | Some(Value::Null) => None,
        Some(m) => Some(serde_json::from_value(m.clone()).map_err(|e| perr("meta", e.to_string()))?),
    };
    Ok(InstanceFile { instance, meta })
}

pub fn write_instance(inst: &ProblemInstance, meta: Option<&InstanceMeta>, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_string(inst, meta))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    from_json_str(&std::fs::read_to_string(path)?)
}
