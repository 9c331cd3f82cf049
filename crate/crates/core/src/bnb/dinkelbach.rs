//! Parametric method for ratio objectives: each iteration solves the QUTO
//! min f(x) − λ g(x) exactly and updates λ = f(x)/g(x).

use super::{solve, BnbConfig, BnbStats, BnbStatus};
use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, RatioInstance, Solution};
use crate::vns::{vns, RatioModel, VnsParams};

#[derive(Debug, Clone)]
pub struct DinkelbachResult {
    pub solution: Solution,
    pub lambda: f64,
    pub iterations: usize,
    /// λ at the start of every iteration.
    pub lambdas: Vec<f64>,
    /// Statistics of every parametric solve.
    pub inner: Vec<BnbStats>,
}

/// `eps` defaults to 1e-6·(1 + |f(x₀)|) with x₀ the VNS start.
pub fn dinkelbach(inst: &RatioInstance, cfg: &BnbConfig, eps: Option<f64>) -> Result<DinkelbachResult> {
    let start = vns(&RatioModel { inst }, &VnsParams { seed: cfg.seed, ..cfg.vns });
    let f0 = inst.numerator(&start.x)?;
    let g0 = inst.denominator(&start.x)?;
    if !(g0 > 0.0) {
        return Err(Error::NonPositiveDenominator(g0));
    }
    let eps = eps.unwrap_or(1e-6 * (1.0 + f0.abs()));
    let mut lambda = f0 / g0;
    let mut lambdas = Vec::new();
    let mut inner = Vec::new();
    loop {
        lambdas.push(lambda);
        let (q, _) = inst.parametric(lambda);
        let res = solve(&ProblemInstance::Quto(q), cfg)?;
        let status = res.stats.status;
        inner.push(res.stats);
        if status != BnbStatus::Optimal {
            return Err(Error::InnerSolverFailure(format!("parametric solve ended with status {}", status.name())));
        }
        let x = res.solution.expect("unconstrained problems are feasible").x;
        let f = inst.numerator(&x)?;
        let g = inst.denominator(&x)?;
        if (f - lambda * g).abs() < eps {
            let value = f / g;
            return Ok(DinkelbachResult {
                solution: Solution { x, value },
                lambda: value,
                iterations: lambdas.len(),
                lambdas,
                inner,
            });
        }
        let next = f / g;
        if !(next < lambda) {
            // Φ(λ) < 0 forces f/g < λ; anything else means the inner solve was inexact
            return Err(Error::InnerSolverFailure(format!("λ did not decrease: {lambda} -> {next}")));
        }
        lambda = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{brute_force, gen_ratio};

    #[test]
    fn matches_oracle_with_decreasing_lambdas() {
        for seed in 0..4 {
            let r = gen_ratio(6, 75.0, seed).unwrap();
            let res = dinkelbach(&r, &BnbConfig::default(), None).unwrap();
            let exact = brute_force(&ProblemInstance::Ratio(r.clone())).unwrap().value;
            assert!((res.lambda - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {exact}", res.lambda);
            assert_eq!(res.lambdas.len(), res.iterations);
            assert_eq!(res.inner.len(), res.iterations);
            for w in res.lambdas.windows(2) {
                assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn inner_limit_is_an_error() {
        let r = gen_ratio(6, 50.0, 1).unwrap();
        let cfg = BnbConfig { time_limit: Some(0.0), ..BnbConfig::default() };
        assert!(matches!(dinkelbach(&r, &cfg, None), Err(Error::InnerSolverFailure(_))));
    }
}
