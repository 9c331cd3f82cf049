//! Instance generators, the brute-force oracle and instance files.

mod generators;
mod io;
mod oracle;

pub use generators::{gen_quto, gen_ratio, gen_type1, gen_type2, gen_type3, GeneratorKind, GeneratorSpec};
pub use io::{format_number, from_json_str, read_instance, to_json_string, write_instance, InstanceFile, InstanceMeta, FORMAT_VERSION};
pub use oracle::{brute_force, brute_force_filtered, ORACLE_LIMIT};

use crate::error::Result;
use crate::problem::ProblemInstance;

/// Runs the generator named by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<ProblemInstance> {
    let GeneratorSpec { kind, n, p_or_d: p, seed } = *spec;
    Ok(match kind {
        GeneratorKind::Type1 => ProblemInstance::Linear(gen_type1(n, p, seed)?),
        GeneratorKind::Type2 => ProblemInstance::Linear(gen_type2(n, p, seed)?),
        GeneratorKind::Type3 => ProblemInstance::Linear(gen_type3(n, p, seed)?),
        GeneratorKind::QutoType1 | GeneratorKind::QutoType2 | GeneratorKind::QutoType3 => {
            ProblemInstance::Quto(gen_quto(kind, n, p, seed)?)
        }
        GeneratorKind::Ratio => ProblemInstance::Ratio(gen_ratio(n, p, seed)?),
    })
}

/// Metadata recorded for a generated instance.
pub fn meta_for(spec: &GeneratorSpec) -> InstanceMeta {
    InstanceMeta { generator: Some(spec.kind.name().to_string()), p: Some(spec.p_or_d), seed: Some(spec.seed) }
}
