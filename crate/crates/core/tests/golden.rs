//! Checked-in instances: generators must reproduce them byte for byte, and
//! the oracle and solver must reproduce the stored optimum.

use serde_json::Value;
use std::path::{Path, PathBuf};
use tqp::bnb::{self, dinkelbach, BnbConfig};
use tqp::instances::{
    brute_force, from_json_str, generate, read_instance, to_json_string, GeneratorKind, GeneratorSpec,
};
use tqp::{ProblemInstance, TernaryVector};

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn expected() -> Vec<(String, f64, Vec<i8>)> {
    let text = std::fs::read_to_string(dir().join("expected.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    v.as_object()
        .unwrap()
        .iter()
        .map(|(k, e)| {
            let x = e["x"].as_array().unwrap().iter().map(|a| a.as_i64().unwrap() as i8).collect();
            (k.clone(), e["value"].as_f64().unwrap(), x)
        })
        .collect()
}

#[test]
fn generators_reproduce_files_exactly() {
    for (name, _, _) in expected() {
        let path = dir().join(&name);
        let text = std::fs::read_to_string(&path).unwrap();
        let file = from_json_str(&text).unwrap();
        let meta = file.meta.clone().unwrap();
        let spec = GeneratorSpec {
            kind: GeneratorKind::parse(meta.generator.as_deref().unwrap()).unwrap(),
            n: file.instance.dim(),
            p_or_d: meta.p.unwrap(),
            seed: meta.seed.unwrap(),
        };
        let regenerated = generate(&spec).unwrap();
        assert_eq!(regenerated, file.instance, "{name}");
        assert_eq!(to_json_string(&regenerated, Some(&meta)), text, "{name}");
    }
}

#[test]
fn files_roundtrip() {
    for (name, _, _) in expected() {
        let file = read_instance(&dir().join(&name)).unwrap();
        let again = from_json_str(&to_json_string(&file.instance, file.meta.as_ref())).unwrap();
        assert_eq!(again, file);
    }
}

#[test]
fn oracle_matches_stored_optimum() {
    for (name, value, x) in expected() {
        let inst = read_instance(&dir().join(&name)).unwrap().instance;
        let s = brute_force(&inst).unwrap();
        assert!((s.value - value).abs() <= 1e-12 * value.abs().max(1.0), "{name}: {} vs {value}", s.value);
        assert_eq!(s.x, TernaryVector::new(x).unwrap(), "{name}");
    }
}

#[test]
fn solver_matches_stored_optimum() {
    for (name, value, _) in expected() {
        let inst = read_instance(&dir().join(&name)).unwrap().instance;
        let res = bnb::solve(&inst, &BnbConfig::default()).unwrap();
        let v = res.solution.unwrap().value;
        assert!((v - value).abs() <= 1e-4 * value.abs().max(1.0), "{name}: {v} vs {value}");
        if let ProblemInstance::Ratio(r) = &inst {
            let d = dinkelbach(r, &BnbConfig::default(), None).unwrap();
            assert!((d.lambda - value).abs() <= 1e-6 * value.abs().max(1.0));
        }
    }
}
