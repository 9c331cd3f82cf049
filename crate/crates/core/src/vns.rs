//! Variable neighborhood search heuristics.
//!
//! Every model keeps α = Qx (or αᴬ = Ax, αᴮ = Bx) so a move is priced in O(1)
//! and applied in O(n).

use crate::error::{Error, Result};
use crate::problem::{dot, ProblemInstance, RatioInstance, Solution, SymMatrix, TernaryVector, TqpInstance};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VnsParams {
    pub s_min: usize,
    /// `None` means n.
    pub s_max: Option<usize>,
    pub s_step: usize,
    pub iter_max: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for VnsParams {
    fn default() -> Self {
        VnsParams { s_min: 2, s_max: None, s_step: 2, iter_max: 3, restarts: 100, seed: 0 }
    }
}

impl VnsParams {
    /// Shake radii clamped to [1, n].
    fn schedule(&self, n: usize) -> (usize, usize, usize) {
        let s_max = self.s_max.unwrap_or(n).clamp(1, n.max(1));
        let s_min = self.s_min.clamp(1, s_max);
        (s_min, s_max, self.s_step.max(1))
    }
}

/// Current point with the maintained products. For QUTO/Linear models `g` is
/// 1 and `alpha_b` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct VnsState {
    pub x: TernaryVector,
    pub f: f64,
    pub g: f64,
    pub alpha: Vec<f64>,
    pub alpha_b: Vec<f64>,
}

/// Improvement threshold for accepting a move.
const IMPROVE: f64 = 1e-12;

fn state_for(q: &SymMatrix, c: &[f64], c0: f64, x: &TernaryVector) -> (f64, Vec<f64>) {
    let xf = x.as_f64();
    let alpha = q.mat_vec(&xf);
    (dot(&alpha, &xf) + dot(c, &xf) + c0, alpha)
}

fn delta(q: &SymMatrix, c: &[f64], alpha: &[f64], i: usize, d: f64) -> f64 {
    2.0 * d * alpha[i] + d * d * q.get(i, i) + d * c[i]
}

fn update_alpha(q: &SymMatrix, alpha: &mut [f64], i: usize, d: f64) {
    for (a, qi) in alpha.iter_mut().zip(q.row(i)) {
        *a += d * qi;
    }
}

/// f(x with x_i ← v) − f(x) for QUTO data.
pub fn move_delta_quto(inst: &TqpInstance, st: &VnsState, i: usize, v: i8) -> Result<f64> {
    let xi = st.x.get(i);
    if v == xi {
        return Err(Error::NoOpMove);
    }
    Ok(delta(&inst.q, &inst.c, &st.alpha, i, (v - xi) as f64))
}

/// Delta of the paired move x_i ← vi, x_j ← vj with Δ_i + Δ_j = 0.
pub fn move_delta_linear(inst: &TqpInstance, st: &VnsState, i: usize, j: usize, vi: i8, vj: i8) -> Result<f64> {
    let di = (vi - st.x.get(i)) as i32;
    let dj = (vj - st.x.get(j)) as i32;
    if di + dj != 0 {
        return Err(Error::UnbalancedMove(di + dj));
    }
    if di == 0 || i == j {
        return Err(Error::NoOpMove);
    }
    Ok(pair_delta(&inst.q, &inst.c, &st.alpha, i, j, di as f64))
}

fn pair_delta(q: &SymMatrix, c: &[f64], alpha: &[f64], i: usize, j: usize, di: f64) -> f64 {
    delta(q, c, alpha, i, di) + delta(q, c, alpha, j, -di) - 2.0 * di * di * q.get(i, j)
}

/// (Δf, Δg) of x_i ← v for ratio data.
pub fn move_delta_ratio(inst: &RatioInstance, st: &VnsState, i: usize, v: i8) -> Result<(f64, f64)> {
    let xi = st.x.get(i);
    if v == xi {
        return Err(Error::NoOpMove);
    }
    let d = (v - xi) as f64;
    Ok((delta(&inst.a_mat, &inst.a, &st.alpha, i, d), delta(&inst.b_mat, &inst.b, &st.alpha_b, i, d)))
}

/// Applies x_i ← v, updating f and α in O(n). Returns the delta.
pub fn apply_move_quto(inst: &TqpInstance, st: &mut VnsState, i: usize, v: i8) -> Result<f64> {
    let dl = move_delta_quto(inst, st, i, v)?;
    let d = (v - st.x.get(i)) as f64;
    st.x.set(i, v);
    st.f += dl;
    update_alpha(&inst.q, &mut st.alpha, i, d);
    Ok(dl)
}

/// Applies the paired move x_i ← vi, x_j ← vj. Returns the delta.
pub fn apply_move_linear(inst: &TqpInstance, st: &mut VnsState, i: usize, j: usize, vi: i8, vj: i8) -> Result<f64> {
    let dl = move_delta_linear(inst, st, i, j, vi, vj)?;
    let d = (vi - st.x.get(i)) as f64;
    st.x.set(i, vi);
    st.x.set(j, vj);
    st.f += dl;
    update_alpha(&inst.q, &mut st.alpha, i, d);
    update_alpha(&inst.q, &mut st.alpha, j, -d);
    Ok(dl)
}

/// Applies x_i ← v to a ratio state. Returns (Δf, Δg).
pub fn apply_move_ratio(inst: &RatioInstance, st: &mut VnsState, i: usize, v: i8) -> Result<(f64, f64)> {
    let (df, dg) = move_delta_ratio(inst, st, i, v)?;
    let d = (v - st.x.get(i)) as f64;
    st.x.set(i, v);
    st.f += df;
    st.g += dg;
    update_alpha(&inst.a_mat, &mut st.alpha, i, d);
    update_alpha(&inst.b_mat, &mut st.alpha_b, i, d);
    Ok((df, dg))
}

/// One VNS flavour: neighborhood, shake and objective.
pub trait VnsModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn state(&self, x: TernaryVector) -> VnsState;
    /// Objective value of a state (f/g for ratios; +∞ when g ≤ 0).
    fn value(&self, st: &VnsState) -> f64;
    fn random_start(&self, rng: &mut Rng) -> TernaryVector;
    /// Best-improvement descent to a local optimum.
    fn local_search(&self, st: &mut VnsState);
    fn shake(&self, st: &mut VnsState, s: usize, rng: &mut Rng);
    /// Best improving move value, or None at a local optimum.
    fn best_move_value(&self, st: &VnsState) -> Option<f64>;
}

fn random_ternary(n: usize, rng: &mut Rng) -> TernaryVector {
    TernaryVector::new((0..n).map(|_| rng.below(3) as i8 - 1).collect()).expect("ternary")
}

/// Other ternary value chosen uniformly.
fn other_value(x: i8, rng: &mut Rng) -> i8 {
    let r = rng.below(2) as i8;
    match x {
        -1 => r,
        0 => 2 * r - 1,
        _ => r - 1,
    }
}

fn single_shake(st: &mut VnsState, s: usize, rng: &mut Rng) {
    let n = st.x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..s.min(n) {
        let j = k + rng.below(n - k);
        idx.swap(k, j);
        let i = idx[k];
        let v = other_value(st.x.get(i), rng);
        st.x.set(i, v);
    }
}

pub struct QutoModel<'a> {
    pub inst: &'a TqpInstance,
}

impl VnsModel for QutoModel<'_> {
    fn name(&self) -> &'static str {
        "quto"
    }

    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn state(&self, x: TernaryVector) -> VnsState {
        let (f, alpha) = state_for(&self.inst.q, &self.inst.c, 0.0, &x);
        VnsState { x, f, g: 1.0, alpha, alpha_b: Vec::new() }
    }

    fn value(&self, st: &VnsState) -> f64 {
        st.f
    }

    fn random_start(&self, rng: &mut Rng) -> TernaryVector {
        random_ternary(self.dim(), rng)
    }

    fn local_search(&self, st: &mut VnsState) {
        let (q, c) = (&self.inst.q, &self.inst.c);
        loop {
            let mut best = (-IMPROVE, usize::MAX, 0.0);
            for i in 0..st.x.len() {
                let xi = st.x.get(i);
                for v in -1..=1i8 {
                    if v != xi {
                        let d = (v - xi) as f64;
                        let dl = delta(q, c, &st.alpha, i, d);
                        if dl < best.0 {
                            best = (dl, i, d);
                        }
                    }
                }
            }
            if best.1 == usize::MAX {
                return;
            }
            let (_, i, d) = best;
            let v = st.x.get(i) + d as i8;
            apply_move_quto(self.inst, st, i, v).expect("improving move changes x");
        }
    }

    fn shake(&self, st: &mut VnsState, s: usize, rng: &mut Rng) {
        single_shake(st, s, rng);
        *st = self.state(st.x.clone());
    }

    fn best_move_value(&self, st: &VnsState) -> Option<f64> {
        let mut best = None::<f64>;
        for i in 0..st.x.len() {
            for v in -1..=1i8 {
                if let Ok(d) = move_delta_quto(self.inst, st, i, v) {
                    if d < -IMPROVE && best.is_none_or(|b| d < b) {
                        best = Some(d);
                    }
                }
            }
        }
        best
    }
}

pub struct LinearModel<'a> {
    pub inst: &'a TqpInstance,
}

/// Feasible Δ_i for a balanced pair move at (x_i, x_j).
fn pair_deltas(xi: i8, xj: i8) -> impl Iterator<Item = i8> {
    [-2i8, -1, 1, 2].into_iter().filter(move |&d| (-1..=1).contains(&(xi + d)) && (-1..=1).contains(&(xj - d)))
}

impl LinearModel<'_> {
    fn scan(&self, st: &VnsState) -> Option<(f64, usize, usize, f64)> {
        let (q, c) = (&self.inst.q, &self.inst.c);
        let n = st.x.len();
        let mut best = None::<(f64, usize, usize, f64)>;
        for i in 0..n {
            let xi = st.x.get(i);
            for j in (i + 1)..n {
                for d in pair_deltas(xi, st.x.get(j)) {
                    let dl = pair_delta(q, c, &st.alpha, i, j, d as f64);
                    if dl < -IMPROVE && best.is_none_or(|b| dl < b.0) {
                        best = Some((dl, i, j, d as f64));
                    }
                }
            }
        }
        best
    }
}

impl VnsModel for LinearModel<'_> {
    fn name(&self) -> &'static str {
        "tqp-linear"
    }

    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn state(&self, x: TernaryVector) -> VnsState {
        let (f, alpha) = state_for(&self.inst.q, &self.inst.c, 0.0, &x);
        VnsState { x, f, g: 1.0, alpha, alpha_b: Vec::new() }
    }

    fn value(&self, st: &VnsState) -> f64 {
        st.f
    }

    /// k random +1/−1 pairs on shuffled positions.
    fn random_start(&self, rng: &mut Rng) -> TernaryVector {
        let n = self.dim();
        let k = rng.below(n / 2 + 1);
        let mut idx: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut idx);
        let mut x = TernaryVector::zeros(n);
        for p in 0..k {
            x.set(idx[2 * p], 1);
            x.set(idx[2 * p + 1], -1);
        }
        x
    }

    fn local_search(&self, st: &mut VnsState) {
        while let Some((_, i, j, d)) = self.scan(st) {
            let (vi, vj) = (st.x.get(i) + d as i8, st.x.get(j) - d as i8);
            apply_move_linear(self.inst, st, i, j, vi, vj).expect("balanced improving move");
        }
    }

    /// ⌊s/2⌋ random feasible pair moves.
    fn shake(&self, st: &mut VnsState, s: usize, rng: &mut Rng) {
        let n = st.x.len();
        if n < 2 {
            return;
        }
        for _ in 0..s / 2 {
            // a pair with both entries equal to ±1 admits no move; retry a few times
            for _ in 0..4 * n {
                let i = rng.below(n);
                let mut j = rng.below(n - 1);
                if j >= i {
                    j += 1;
                }
                let opts: Vec<i8> = pair_deltas(st.x.get(i), st.x.get(j)).collect();
                if opts.is_empty() {
                    continue;
                }
                let d = opts[rng.below(opts.len())];
                st.x.set(i, st.x.get(i) + d);
                st.x.set(j, st.x.get(j) - d);
                break;
            }
        }
        *st = self.state(st.x.clone());
    }

    fn best_move_value(&self, st: &VnsState) -> Option<f64> {
        self.scan(st).map(|b| b.0)
    }
}

pub struct RatioModel<'a> {
    pub inst: &'a RatioInstance,
}

impl RatioModel<'_> {
    fn scan(&self, st: &VnsState) -> Option<(f64, usize, f64, f64, f64)> {
        let r = self.inst;
        let cur = self.value(st);
        let mut best = None::<(f64, usize, f64, f64, f64)>;
        for i in 0..st.x.len() {
            let xi = st.x.get(i);
            for v in -1..=1i8 {
                if v == xi {
                    continue;
                }
                let d = (v - xi) as f64;
                let df = delta(&r.a_mat, &r.a, &st.alpha, i, d);
                let dg = delta(&r.b_mat, &r.b, &st.alpha_b, i, d);
                let g = st.g + dg;
                if g <= 0.0 {
                    continue;
                }
                let val = (st.f + df) / g;
                let thresh = if cur.is_finite() { cur - IMPROVE * cur.abs().max(1.0) } else { f64::INFINITY };
                if val < thresh && best.is_none_or(|b| val < b.0) {
                    best = Some((val, i, d, df, dg));
                }
            }
        }
        best
    }
}

impl VnsModel for RatioModel<'_> {
    fn name(&self) -> &'static str {
        "tqp-ratio"
    }

    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn state(&self, x: TernaryVector) -> VnsState {
        let r = self.inst;
        let (f, alpha) = state_for(&r.a_mat, &r.a, r.a0, &x);
        let (g, alpha_b) = state_for(&r.b_mat, &r.b, r.b0, &x);
        VnsState { x, f, g, alpha, alpha_b }
    }

    fn value(&self, st: &VnsState) -> f64 {
        if st.g > 0.0 {
            st.f / st.g
        } else {
            f64::INFINITY
        }
    }

    fn random_start(&self, rng: &mut Rng) -> TernaryVector {
        random_ternary(self.dim(), rng)
    }

    fn local_search(&self, st: &mut VnsState) {
        while let Some((_, i, d, _, _)) = self.scan(st) {
            let v = st.x.get(i) + d as i8;
            apply_move_ratio(self.inst, st, i, v).expect("improving move changes x");
        }
    }

    fn shake(&self, st: &mut VnsState, s: usize, rng: &mut Rng) {
        single_shake(st, s, rng);
        *st = self.state(st.x.clone());
    }

    fn best_move_value(&self, st: &VnsState) -> Option<f64> {
        self.scan(st).map(|b| b.0)
    }
}

/// Names accepted by [`model_for`].
pub const MODEL_NAMES: [&str; 3] = ["quto", "tqp-linear", "tqp-ratio"];

/// Model matching the instance kind. General TQPs have no VNS model unless
/// their constraint is 𝟙ᵀx = 0.
pub fn model_for(inst: &ProblemInstance) -> Result<Box<dyn VnsModel + '_>> {
    Ok(match inst {
        ProblemInstance::Quto(t) => {
            if !t.constraints.is_empty() {
                return Err(Error::HasConstraints);
            }
            Box::new(QutoModel { inst: t })
        }
        ProblemInstance::Linear(t) | ProblemInstance::Tqp(t) if t.is_balanced() => Box::new(LinearModel { inst: t }),
        ProblemInstance::Tqp(t) if t.constraints.is_empty() => Box::new(QutoModel { inst: t }),
        ProblemInstance::Linear(_) | ProblemInstance::Tqp(_) => {
            return Err(Error::WrongVariant("no heuristic for general linear constraints".into()))
        }
        ProblemInstance::Ratio(r) => Box::new(RatioModel { inst: r }),
    })
}

/// One execution of the VNS loop from `x0`.
pub fn vns_run(model: &dyn VnsModel, x0: TernaryVector, params: &VnsParams, rng: &mut Rng) -> VnsState {
    let n = model.dim();
    let mut st = model.state(x0);
    model.local_search(&mut st);
    if n == 0 {
        return st;
    }
    let mut best = st.clone();
    let mut best_val = model.value(&best);
    let (s_min, s_max, s_step) = params.schedule(n);
    for _ in 0..params.iter_max {
        let mut s = s_min;
        while s <= s_max {
            model.shake(&mut st, s, rng);
            model.local_search(&mut st);
            let val = model.value(&st);
            if val < best_val {
                best = st.clone();
                best_val = val;
                s = s_min;
            } else {
                // rebuild from the incumbent rather than trusting a copy of α
                st = model.state(best.x.clone());
                s += s_step;
            }
        }
    }
    best
}

/// Best of `params.restarts` runs from random starts; restart r uses stream r.
/// Ties keep the lowest restart index.
pub fn vns(model: &dyn VnsModel, params: &VnsParams) -> Solution {
    vns_with_start(model, None, params)
}

/// Like [`vns`], with restart 0 seeded from `start` when given.
pub fn vns_with_start(model: &dyn VnsModel, start: Option<&TernaryVector>, params: &VnsParams) -> Solution {
    let mut best: Option<Solution> = None;
    for r in 0..params.restarts.max(1) {
        let mut rng = Rng::derive(params.seed, r as u64);
        let x0 = match (r, start) {
            (0, Some(x)) => x.clone(),
            _ => model.random_start(&mut rng),
        };
        let st = vns_run(model, x0, params, &mut rng);
        let val = model.value(&st);
        if best.as_ref().is_none_or(|b| val < b.value) {
            best = Some(Solution { x: st.x, value: val });
        }
    }
    best.expect("at least one restart")
}

/// Nearest ternary value of each coordinate.
pub fn round_to_ternary(x: &[f64]) -> TernaryVector {
    TernaryVector::new(x.iter().map(|&v| v.round().clamp(-1.0, 1.0) as i8).collect()).expect("ternary")
}

/// Moves a vector onto 𝟙ᵀx = 0 by single-coordinate steps toward balance,
/// each time taking the step of smallest objective change.
pub fn repair_balance(inst: &TqpInstance, x: &TernaryVector) -> TernaryVector {
    let model = QutoModel { inst };
    let mut st = model.state(x.clone());
    loop {
        let sum = st.x.sum();
        if sum == 0 {
            return st.x;
        }
        let step: i8 = if sum > 0 { -1 } else { 1 };
        let mut best = (f64::INFINITY, usize::MAX);
        for i in 0..st.x.len() {
            let v = st.x.get(i) + step;
            if (-1..=1).contains(&v) {
                let d = delta(&inst.q, &inst.c, &st.alpha, i, step as f64);
                if d < best.0 {
                    best = (d, i);
                }
            }
        }
        let i = best.1;
        st.x.set(i, st.x.get(i) + step);
        st.f += best.0;
        update_alpha(&inst.q, &mut st.alpha, i, step as f64);
    }
}
