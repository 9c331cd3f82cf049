//! Choice of the branching variable.

use crate::cuts::LiftedPoint;
use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, SymMatrix};

/// φ(v) = distance to the nearest ternary value.
pub fn fractionality(v: f64) -> f64 {
    (v + 1.0).abs().min(v.abs()).min((v - 1.0).abs())
}

/// argmax φ(x_i) over unfixed i, ties to the lowest index.
pub fn select_branch_most_fractional(xs: &[f64], fixed: &[bool]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in xs.iter().enumerate() {
        if fixed.get(i).copied().unwrap_or(false) {
            continue;
        }
        let phi = fractionality(v);
        if best.is_none_or(|b| phi > b.1) {
            best = Some((i, phi));
        }
    }
    best.map(|b| b.0).ok_or(Error::AllFixed)
}

/// Per-variable violation of the scaled rank-one condition,
/// Σ_k Q_kj (y_j y_k − ρ Y_jk).
pub fn ratio_scores(rho: f64, y: &[f64], big_y: &SymMatrix, q: &SymMatrix) -> Result<Vec<f64>> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveRho(rho));
    }
    let n = y.len();
    Ok((0..n)
        .map(|j| (0..n).map(|k| q.get(k, j) * (y[j] * y[k] - rho * big_y.get(j, k))).sum())
        .collect())
}

/// argmax of [`ratio_scores`] over unfixed variables, ties to the lowest index.
pub fn select_branch_ratio(rho: f64, y: &[f64], big_y: &SymMatrix, q: &SymMatrix, fixed: &[bool]) -> Result<usize> {
    let scores = ratio_scores(rho, y, big_y, q)?;
    let mut best: Option<(usize, f64)> = None;
    for (j, &s) in scores.iter().enumerate() {
        if fixed.get(j).copied().unwrap_or(false) {
            continue;
        }
        if best.is_none_or(|b| s > b.1) {
            best = Some((j, s));
        }
    }
    best.map(|b| b.0).ok_or(Error::AllFixed)
}

/// A branching rule. `point` is the raw relaxation point (scale ρ for ratio
/// relaxations).
pub trait BranchingRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn select(&self, point: &LiftedPoint, fixed: &[bool], inst: &ProblemInstance) -> Result<usize>;
}

pub struct MostFractional;

impl BranchingRule for MostFractional {
    fn name(&self) -> &'static str {
        "most-fractional"
    }

    fn select(&self, point: &LiftedPoint, fixed: &[bool], _inst: &ProblemInstance) -> Result<usize> {
        select_branch_most_fractional(&point.normalized().x, fixed)
    }
}

/// Rank-one violation score weighted by the numerator matrix A.
pub struct RatioScore;

impl BranchingRule for RatioScore {
    fn name(&self) -> &'static str {
        "ratio-score"
    }

    fn select(&self, point: &LiftedPoint, fixed: &[bool], inst: &ProblemInstance) -> Result<usize> {
        match inst {
            ProblemInstance::Ratio(r) => select_branch_ratio(point.scale, &point.x, &point.big_x, &r.a_mat, fixed),
            _ => Err(Error::WrongVariant("ratio-score needs a ratio instance".into())),
        }
    }
}

pub const BRANCHING_NAMES: [&str; 2] = ["most-fractional", "ratio-score"];

pub fn branching_rule(name: &str) -> Result<Box<dyn BranchingRule>> {
    match name {
        "most-fractional" => Ok(Box::new(MostFractional)),
        "ratio-score" => Ok(Box::new(RatioScore)),
        _ => Err(Error::UnknownStrategy { kind: "branching rule", name: name.to_string() }),
    }
}

/// Default rule of each instance kind.
pub fn default_branching(inst: &ProblemInstance) -> &'static str {
    match inst {
        ProblemInstance::Ratio(_) => "ratio-score",
        _ => "most-fractional",
    }
}
