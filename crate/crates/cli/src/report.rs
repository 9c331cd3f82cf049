//! Run reports written by `solve --json-out`, `bound --json-out` and `bench`.
//!
//! JSON schema (all keys always present, `null` when not applicable):
//!
//! ```text
//! source       string    instance path, or a generated label in bench
//! kind         string    quto | tqp | tqp-linear | tqp-ratio
//! n            integer
//! meta         object    {generator, p, seed} from the instance file, or null
//! method       string    direct | dinkelbach | bound
//! config       object    solver configuration echo
//! value        number    best objective value found
//! bound        number    proven lower bound
//! root_bound   number    bound at the root (before cuts for `bound`)
//! gap          number    (value - bound) / max(|value|, 1), clamped at 0
//! nodes        integer   nodes explored (summed over parametric solves)
//! iterations   integer   parametric iterations (dinkelbach only)
//! time_s       number    wall time, the only field that varies between runs
//! cuts         object    family name -> cuts added
//! round_bounds array     root bound after each cut round (`bound` only)
//! status       string    optimal | time-limit | node-limit | infeasible | bound
//! x            array     solution vector in {-1, 0, 1}
//! ```

use serde::Serialize;
use std::collections::BTreeMap;
use tqp::bnb::BnbConfig;
use tqp::instances::{InstanceFile, InstanceMeta};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub source: String,
    pub kind: String,
    pub n: usize,
    pub meta: Option<InstanceMeta>,
    pub method: String,
    pub config: BnbConfig,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub root_bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: usize,
    pub iterations: Option<usize>,
    pub time_s: f64,
    pub cuts: BTreeMap<String, usize>,
    pub round_bounds: Vec<f64>,
    pub status: String,
    pub x: Option<Vec<i8>>,
}

impl RunReport {
    pub fn new(source: &str, file: &InstanceFile, method: &str, cfg: &BnbConfig) -> Self {
        RunReport {
            source: source.to_string(),
            kind: file.instance.kind().to_string(),
            n: file.instance.dim(),
            meta: file.meta.clone(),
            method: method.to_string(),
            config: cfg.clone(),
            value: None,
            bound: None,
            root_bound: None,
            gap: None,
            nodes: 0,
            iterations: None,
            time_s: 0.0,
            cuts: BTreeMap::new(),
            round_bounds: Vec::new(),
            status: String::new(),
            x: None,
        }
    }
}

/// One flat CSV line of a bench sweep.
#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub source: String,
    pub kind: String,
    pub generator: String,
    pub n: usize,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    pub method: String,
    pub status: String,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub gap_percent: Option<f64>,
    pub nodes: usize,
    pub time_s: f64,
    pub cuts_triangle: usize,
    pub cuts_pair: usize,
    pub cuts_rlt: usize,
    pub cuts_split: usize,
    pub cuts_kgonal: usize,
}

impl BenchRow {
    pub fn from_report(r: &RunReport) -> Self {
        let get = |k: &str| r.cuts.get(k).copied().unwrap_or(0);
        let meta = r.meta.clone().unwrap_or_default();
        BenchRow {
            source: r.source.clone(),
            kind: r.kind.clone(),
            generator: meta.generator.unwrap_or_default(),
            n: r.n,
            p: meta.p,
            seed: meta.seed,
            method: r.method.clone(),
            status: r.status.clone(),
            value: r.value,
            bound: r.bound,
            gap_percent: r.gap.map(|g| 100.0 * g),
            nodes: r.nodes,
            time_s: r.time_s,
            cuts_triangle: get("triangle"),
            cuts_pair: get("pair"),
            cuts_rlt: get("rlt"),
            cuts_split: get("split"),
            cuts_kgonal: get("kgonal5") + get("kgonal7") + get("kgonal9"),
        }
    }
}
