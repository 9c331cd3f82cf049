//! SDP relaxations of every problem variant.
//!
//! Relaxations live in "Y space": the (n+1)×(n+1) matrix Y = [[1, xᵀ], [x, X]]
//! (or [[ρ, yᵀ], [y, Y]] for ratio problems). Coordinate 0 is the corner, and
//! variable i sits at coordinate i+1. Before solving, Y is written as W Z Wᵀ,
//! where the columns of W span the complement of every known null direction
//! of feasible Y. Node fixings and squared constraints produce such
//! directions, so the solved problem keeps a strictly feasible point.

use crate::cuts::{Cut, LiftedPoint};
use crate::error::{Error, Result};
use crate::problem::{RatioInstance, SymMatrix, TqpInstance};
use crate::sdp::{ConicProblem, InteriorPoint, SdpBackend, SolveOptions, SolveStatus, SparseSym};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxationVariant {
    Basic,
    Quto,
    Linear,
    LinearReduced,
    Ratio,
}

/// Coordinates of relaxation variables inside the PSD block.
#[derive(Debug, Clone, Copy)]
pub struct IndexMap {
    n: usize,
}

impl IndexMap {
    /// Block position of the corner (the constant 1, or ρ).
    pub fn corner(&self) -> (usize, usize) {
        (0, 0)
    }

    /// Block position of x_i (or y_i).
    pub fn x(&self, i: usize) -> (usize, usize) {
        (0, i + 1)
    }

    /// Block position of X_ij (or Y_ij), upper triangle.
    pub fn big_x(&self, i: usize, j: usize) -> (usize, usize) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        (a + 1, b + 1)
    }

    pub fn block_dim(&self) -> usize {
        self.n + 1
    }
}

/// Basis of the face {Y ⪰ 0 : Y (0; 𝟙) = 0}.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBasis {
    pub w: DMatrix<f64>,
}

impl ReducedBasis {
    /// Column 0 is e_0 and column k is e_1 − e_(k+1) for k = 1..n−1.
    pub fn new(n: usize) -> Self {
        let mut w = DMatrix::zeros(n + 1, n);
        w[(0, 0)] = 1.0;
        for k in 1..n {
            w[(1, k)] = 1.0;
            w[(k + 1, k)] = -1.0;
        }
        ReducedBasis { w }
    }

    /// Z = [[1, 𝟙ᵀ/n], [𝟙/n, I/n]], a positive definite feasible point of the
    /// reduced problem.
    pub fn strictly_feasible_point(n: usize) -> SymMatrix {
        let inv = 1.0 / n as f64;
        SymMatrix::from_upper_fn(n, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, _) => inv,
            (a, b) if a == b => inv,
            _ => 0.0,
        })
    }
}

/// An SDP relaxation in Y space plus the node fixings applied to it.
#[derive(Debug, Clone)]
pub struct RelaxationHandle {
    pub variant: RelaxationVariant,
    n: usize,
    objective: SymMatrix,
    constant: f64,
    eqs: Vec<(SparseSym, f64)>,
    ineqs: Vec<(SparseSym, f64)>,
    null_dirs: Vec<Vec<f64>>,
    base_basis: Option<DMatrix<f64>>,
    fixings: Vec<Option<i8>>,
    trace_bound: Option<f64>,
    homogeneous: bool,
}

fn functional(p: usize, q: usize, c: f64) -> SparseSym {
    let mut s = SparseSym::new();
    s.add_functional(p, q, c);
    s
}

fn objective_block(q: &SymMatrix, c: &[f64], c0: f64) -> SymMatrix {
    let n = q.dim();
    SymMatrix::from_upper_fn(n + 1, |i, j| match (i, j) {
        (0, 0) => c0,
        (0, j) => 0.5 * c[j - 1],
        (i, j) => q.get(i - 1, j - 1),
    })
}

impl RelaxationHandle {
    fn standard(variant: RelaxationVariant, q: &SymMatrix, c: &[f64]) -> Self {
        let n = q.dim();
        let mut h = RelaxationHandle {
            variant,
            n,
            objective: objective_block(q, c, 0.0),
            constant: 0.0,
            eqs: vec![(functional(0, 0, 1.0), 1.0)],
            ineqs: Vec::new(),
            null_dirs: Vec::new(),
            base_basis: None,
            fixings: vec![None; n],
            trace_bound: Some((n + 1) as f64),
            homogeneous: false,
        };
        for i in 0..n {
            let d = i + 1;
            // X_ii − x_i ≥ 0, X_ii + x_i ≥ 0, −X_ii ≥ −1
            let mut lo = functional(d, d, 1.0);
            lo.add_functional(0, d, -1.0);
            let mut hi = functional(d, d, 1.0);
            hi.add_functional(0, d, 1.0);
            h.ineqs.push((lo, 0.0));
            h.ineqs.push((hi, 0.0));
            h.ineqs.push((functional(d, d, -1.0), -1.0));
        }
        h
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn index_map(&self) -> IndexMap {
        IndexMap { n: self.n }
    }

    pub fn fixings(&self) -> &[Option<i8>] {
        &self.fixings
    }

    pub fn equalities(&self) -> &[(SparseSym, f64)] {
        &self.eqs
    }

    pub fn inequalities(&self) -> &[(SparseSym, f64)] {
        &self.ineqs
    }

    pub fn objective(&self) -> &SymMatrix {
        &self.objective
    }

    pub fn objective_constant(&self) -> f64 {
        self.constant
    }

    pub fn set_objective_constant(&mut self, c: f64) {
        self.constant = c;
    }

    pub fn is_ratio(&self) -> bool {
        self.homogeneous
    }

    /// Y-space form of a cut: ⟨G, Y⟩ ≥ rhs.
    pub fn cut_matrix(&self, c: &Cut) -> (SparseSym, f64) {
        let mut g = SparseSym::new();
        for &(i, v) in &c.x_coeffs {
            g.add_functional(0, i + 1, v);
        }
        for &(i, j, v) in &c.big_x_coeffs {
            g.add_functional(i + 1, j + 1, v);
        }
        if c.rho_coeff != 0.0 {
            g.add_functional(0, 0, c.rho_coeff);
        }
        (g, c.rhs)
    }

    /// Checks every constraint of the handle at a Y-space point.
    pub fn max_violation_at(&self, y: &SymMatrix) -> f64 {
        let e = self.eqs.iter().map(|(a, b)| (a.dot(y) - b).abs());
        let i = self.ineqs.iter().map(|(g, h)| (h - g.dot(y)).max(0.0));
        e.chain(i).fold(0.0, f64::max)
    }

    /// ⟨C, Y⟩ plus the constant.
    pub fn objective_at(&self, y: &SymMatrix) -> f64 {
        self.objective.dot(y) + self.constant
    }
}

/// Relaxation of a TQP with linear equalities; with `with_squared` it adds
/// ⟨aaᵀ, X⟩ = b² for each constraint.
pub fn build_basic(inst: &TqpInstance, with_squared: bool) -> RelaxationHandle {
    let mut h = RelaxationHandle::standard(RelaxationVariant::Basic, &inst.q, &inst.c);
    for con in &inst.constraints {
        let mut lin = SparseSym::new();
        for (i, &a) in con.a.iter().enumerate() {
            lin.add_functional(0, i + 1, a);
        }
        h.eqs.push((lin, con.b));
        if with_squared {
            let mut sq = SparseSym::new();
            for (i, &ai) in con.a.iter().enumerate() {
                for (j, &aj) in con.a.iter().enumerate().skip(i) {
                    if ai * aj != 0.0 {
                        sq.add_functional(i + 1, j + 1, if i == j { ai * aj } else { 2.0 * ai * aj });
                    }
                }
            }
            h.eqs.push((sq, con.b * con.b));
            let mut v = vec![-con.b];
            v.extend_from_slice(&con.a);
            h.null_dirs.push(v);
        }
    }
    h
}

/// S = Σ (−b_i; a_i)(−b_i; a_i)ᵀ with ⟨S, Y⟩ = 0 on feasible lifts.
pub fn build_aggregated_equality(inst: &TqpInstance) -> Result<(SymMatrix, f64)> {
    if inst.constraints.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    let n = inst.dim();
    let mut s = SymMatrix::zeros(n + 1);
    for con in &inst.constraints {
        let mut v = vec![-con.b];
        v.extend_from_slice(&con.a);
        for i in 0..=n {
            for j in i..=n {
                s.set(i, j, s.get(i, j) + v[i] * v[j]);
            }
        }
    }
    Ok((s, 0.0))
}

/// Basic relaxation plus X_ii = 1 whenever q_ii ≤ 0.
pub fn build_quto(inst: &TqpInstance) -> Result<RelaxationHandle> {
    if !inst.constraints.is_empty() {
        return Err(Error::HasConstraints);
    }
    let mut h = RelaxationHandle::standard(RelaxationVariant::Quto, &inst.q, &inst.c);
    for i in 0..inst.dim() {
        if inst.q.get(i, i) <= 0.0 {
            h.eqs.push((functional(i + 1, i + 1, 1.0), 1.0));
        }
    }
    Ok(h)
}

/// Relaxation for 𝟙ᵀx = 0 using ⟨J, X⟩ = 0 in place of the linear constraint.
pub fn build_linear(inst: &TqpInstance) -> Result<RelaxationHandle> {
    if !inst.is_balanced() {
        return Err(Error::WrongVariant("expected the single constraint 1ᵀx = 0".into()));
    }
    let n = inst.dim();
    let mut h = RelaxationHandle::standard(RelaxationVariant::Linear, &inst.q, &inst.c);
    let mut j = SparseSym::new();
    for a in 0..n {
        for b in a..n {
            j.add_functional(a + 1, b + 1, if a == b { 1.0 } else { 2.0 });
        }
    }
    h.eqs.push((j, 0.0));
    Ok(h)
}

/// Restricts a TQP-Linear relaxation to the face Y = W Z Wᵀ.
pub fn facial_reduce(h: &RelaxationHandle) -> Result<RelaxationHandle> {
    if h.variant != RelaxationVariant::Linear {
        return Err(Error::WrongVariant("facial reduction needs a linear relaxation".into()));
    }
    let mut out = h.clone();
    out.variant = RelaxationVariant::LinearReduced;
    out.base_basis = Some(ReducedBasis::new(h.n).w);
    Ok(out)
}

/// Relaxation in (ρ, y, Y) of the ratio problem.
pub fn build_ratio(inst: &RatioInstance) -> RelaxationHandle {
    let n = inst.dim();
    let mut norm = SparseSym::new();
    norm.add_functional(0, 0, inst.b0);
    for i in 0..n {
        norm.add_functional(0, i + 1, inst.b[i]);
        for j in i..n {
            let v = inst.b_mat.get(i, j);
            norm.add_functional(i + 1, j + 1, if i == j { v } else { 2.0 * v });
        }
    }
    let mut h = RelaxationHandle {
        variant: RelaxationVariant::Ratio,
        n,
        objective: objective_block(&inst.a_mat, &inst.a, inst.a0),
        constant: 0.0,
        eqs: vec![(norm, 1.0)],
        ineqs: vec![(functional(0, 0, 1.0), 0.0)],
        null_dirs: Vec::new(),
        base_basis: None,
        fixings: vec![None; n],
        trace_bound: inst.rho_upper_bound().map(|r| r * (n + 1) as f64),
        homogeneous: true,
    };
    for i in 0..n {
        let d = i + 1;
        let mut lo = functional(d, d, 1.0);
        lo.add_functional(0, d, -1.0);
        let mut hi = functional(d, d, 1.0);
        hi.add_functional(0, d, 1.0);
        let mut cap = functional(0, 0, 1.0);
        cap.add_functional(d, d, -1.0);
        h.ineqs.push((lo, 0.0));
        h.ineqs.push((hi, 0.0));
        h.ineqs.push((cap, 0.0));
    }
    h
}

/// Adds x_i = t and X_ii = t², plus X_ij = t·s for every already fixed j
/// (ratio: the ρ-scaled forms y_i = tρ, Y_ii = t²ρ, Y_ij = tsρ).
pub fn fix_variable(h: &RelaxationHandle, i: usize, t: i8) -> Result<RelaxationHandle> {
    if i >= h.n {
        return Err(Error::DimensionMismatch { expected: h.n, got: i + 1 });
    }
    if h.fixings[i].is_some() {
        return Err(Error::AlreadyFixed(i));
    }
    assert!((-1..=1).contains(&t));
    let mut out = h.clone();
    let d = i + 1;
    let tf = t as f64;
    let mut push = |mut a: SparseSym, val: f64| {
        if out.homogeneous {
            a.add_functional(0, 0, -val);
            out.eqs.push((a, 0.0));
        } else {
            out.eqs.push((a, val));
        }
    };
    push(functional(0, d, 1.0), tf);
    push(functional(d, d, 1.0), tf * tf);
    for (j, f) in h.fixings.iter().enumerate() {
        if let Some(s) = f {
            push(functional(d, j + 1, 1.0), tf * *s as f64);
        }
    }
    let mut v = vec![0.0; h.n + 1];
    if t == 0 {
        v[d] = 1.0;
    } else {
        v[0] = tf;
        v[d] = -1.0;
    }
    out.null_dirs.push(v);
    out.fixings[i] = Some(t);
    Ok(out)
}

/// Where an inequality of the solved problem came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSource {
    Base(usize),
    Cut(usize),
}

/// A relaxation expressed in Z coordinates, ready for the SDP backend.
#[derive(Debug, Clone)]
pub struct Lowered {
    pub problem: ConicProblem,
    pub basis: DMatrix<f64>,
    /// Proven infeasible while lowering (inconsistent equalities).
    pub infeasible: bool,
    pub ineq_sources: Vec<RowSource>,
}

const ZERO_TOL: f64 = 1e-11;

fn svec(a: &SparseSym, r: usize) -> Vec<f64> {
    let mut v = vec![0.0; r * (r + 1) / 2];
    for &(p, q, val) in a.entries() {
        let idx = p * r - p * (p + 1) / 2 + q;
        v[idx] += if p == q { val } else { std::f64::consts::SQRT_2 * val };
    }
    v
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl RelaxationHandle {
    /// Basis W with Y = W Z Wᵀ for the current null directions.
    pub fn basis(&self) -> DMatrix<f64> {
        let big_n = self.n + 1;
        let mut w = self.base_basis.clone().unwrap_or_else(|| DMatrix::identity(big_n, big_n));
        for v in &self.null_dirs {
            let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let u: Vec<f64> = (0..w.ncols())
                .map(|c| (0..big_n).map(|r| w[(r, c)] * v[r]).sum())
                .collect();
            let (k, uk) = u
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |acc, (i, &x)| if x.abs() >= acc.1.abs() { (i, x) } else { acc });
            if uk.abs() <= 1e-10 * vn.max(1.0) {
                continue;
            }
            let r = w.ncols();
            let mut nw = DMatrix::zeros(big_n, r - 1);
            let mut col = 0;
            for j in 0..r {
                if j == k {
                    continue;
                }
                let f = u[j] / uk;
                for row in 0..big_n {
                    let val = w[(row, j)] - f * w[(row, k)];
                    nw[(row, col)] = if val.abs() < 1e-14 { 0.0 } else { val };
                }
                col += 1;
            }
            w = nw;
        }
        w
    }

    fn lower_matrix(&self, a: &SparseSym, rows: &[Vec<(usize, f64)>], r: usize, buf: &mut [f64]) -> SparseSym {
        buf.iter_mut().for_each(|v| *v = 0.0);
        for &(p, q, v) in a.entries() {
            let mut add = |p: usize, q: usize| {
                for &(ca, wa) in &rows[p] {
                    for &(cb, wb) in &rows[q] {
                        buf[ca * r + cb] += v * wa * wb;
                    }
                }
            };
            add(p, q);
            if p != q {
                add(q, p);
            }
        }
        let mut out = SparseSym::new();
        let scale = buf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cutoff = ZERO_TOL * scale.max(1.0);
        let mut entries = Vec::new();
        for i in 0..r {
            for j in i..r {
                let v = 0.5 * (buf[i * r + j] + buf[j * r + i]);
                if v.abs() > cutoff {
                    entries.push((i, j, v));
                }
            }
        }
        for (i, j, v) in entries {
            out.add(i, j, v);
        }
        out
    }

    /// Rewrites the relaxation plus `cuts` in Z coordinates, dropping
    /// equalities implied by others and inequalities fixed by them.
    pub fn lower(&self, cuts: &[Cut]) -> Lowered {
        let w = self.basis();
        let big_n = self.n + 1;
        let r = w.ncols();
        let rows: Vec<Vec<(usize, f64)>> = (0..big_n)
            .map(|p| (0..r).filter(|&c| w[(p, c)] != 0.0).map(|c| (c, w[(p, c)])).collect())
            .collect();
        let cy = self.objective.to_dmatrix();
        let cz = w.transpose() * &cy * &w;
        let mut problem = ConicProblem::new(SymMatrix::from_dmatrix(&cz));
        let mut infeasible = r == 0;

        if let Some(ty) = self.trace_bound {
            let gram = w.transpose() * &w;
            let lam = if r == 0 { 0.0 } else { gram.symmetric_eigen().eigenvalues.min() };
            if lam > 1e-12 {
                problem.trace_bound = Some(ty / lam);
            }
        }

        let mut buf = vec![0.0; r * r];
        // orthonormal basis of lowered equalities, with matching rhs
        let mut q_vecs: Vec<(Vec<f64>, f64)> = Vec::new();
        for (a, b) in &self.eqs {
            let la = self.lower_matrix(a, &rows, r, &mut buf);
            let mut v = svec(&la, r);
            let norm0 = dotv(&v, &v).sqrt();
            let mut rhs = *b;
            for (q, beta) in &q_vecs {
                let c = dotv(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                rhs -= c * beta;
            }
            let norm = dotv(&v, &v).sqrt();
            if norm <= 1e-9 * norm0.max(1.0) {
                if rhs.abs() > 1e-7 * (1.0 + b.abs()) {
                    infeasible = true;
                }
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            q_vecs.push((v, rhs / norm));
            problem.add_eq(la, *b);
        }

        let mut ineq_sources = Vec::new();
        let base = self.ineqs.iter().enumerate().map(|(k, g)| (g.clone(), RowSource::Base(k)));
        let cut_rows = cuts.iter().enumerate().map(|(k, c)| (self.cut_matrix(c), RowSource::Cut(k)));
        for ((g, h), src) in base.chain(cut_rows) {
            let lg = self.lower_matrix(&g, &rows, r, &mut buf);
            let mut v = svec(&lg, r);
            let norm0 = dotv(&v, &v).sqrt();
            let mut implied = 0.0;
            for (q, beta) in &q_vecs {
                let c = dotv(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                implied += c * beta;
            }
            let norm = dotv(&v, &v).sqrt();
            if norm <= 1e-9 * norm0.max(1.0) {
                if implied < h - 1e-7 * (1.0 + h.abs()) {
                    infeasible = true;
                }
                continue;
            }
            problem.add_ineq(lg, h);
            ineq_sources.push(src);
        }
        Lowered { problem, basis: w, infeasible, ineq_sources }
    }
}

/// Outcome of solving a relaxation.
#[derive(Debug, Clone)]
pub struct RelaxResult {
    /// Certified lower bound (objective constant included).
    pub bound: f64,
    /// Primal objective (constant included).
    pub objective: f64,
    pub point: LiftedPoint,
    /// Full Y-space matrix.
    pub y: SymMatrix,
    pub status: SolveStatus,
    /// Dual multiplier of each cut; 0 for cuts dropped while lowering.
    pub cut_duals: Vec<f64>,
    pub iterations: usize,
}

impl RelaxResult {
    pub fn infeasible(&self) -> bool {
        self.status == SolveStatus::Infeasible
    }
}

/// Splits a Y-space matrix into the lifted point (scale, x, X).
pub fn point_from_y(y: &SymMatrix) -> LiftedPoint {
    let n = y.dim() - 1;
    LiftedPoint {
        scale: y.get(0, 0),
        x: (0..n).map(|i| y.get(0, i + 1)).collect(),
        big_x: SymMatrix::from_upper_fn(n, |i, j| y.get(i + 1, j + 1)),
    }
}

/// Lowers, solves and maps the result back to Y space.
pub fn solve_relaxation(
    h: &RelaxationHandle,
    cuts: &[Cut],
    backend: &dyn SdpBackend,
    opts: &SolveOptions,
) -> RelaxResult {
    let lowered = h.lower(cuts);
    let n = h.n;
    if lowered.infeasible {
        let y = SymMatrix::zeros(n + 1);
        return RelaxResult {
            bound: f64::INFINITY,
            objective: f64::INFINITY,
            point: point_from_y(&y),
            y,
            status: SolveStatus::Infeasible,
            cut_duals: vec![0.0; cuts.len()],
            iterations: 0,
        };
    }
    let mut opts = *opts;
    if let Some(c) = opts.cutoff {
        opts.cutoff = Some(c - h.constant);
    }
    let sol = backend.solve(&lowered.problem, &opts);
    let z = sol.x.to_dmatrix();
    let ym = &lowered.basis * z * lowered.basis.transpose();
    let y = SymMatrix::from_dmatrix(&ym);
    let mut cut_duals = vec![0.0; cuts.len()];
    let n_eq = lowered.problem.eqs.len();
    for (k, src) in lowered.ineq_sources.iter().enumerate() {
        if let RowSource::Cut(c) = src {
            cut_duals[*c] = sol.y.get(n_eq + k).copied().unwrap_or(0.0);
        }
    }
    let bound = if sol.status == SolveStatus::Infeasible { f64::INFINITY } else { sol.safe_bound + h.constant };
    RelaxResult {
        bound,
        objective: sol.objective + h.constant,
        point: point_from_y(&y),
        y,
        status: sol.status,
        cut_duals,
        iterations: sol.iterations,
    }
}

/// Convenience wrapper using the default backend and tolerances.
pub fn solve_default(h: &RelaxationHandle, cuts: &[Cut]) -> RelaxResult {
    solve_relaxation(h, cuts, &InteriorPoint, &SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{LinearConstraint, TernaryVector};

    fn tqp(q: &[Vec<f64>], c: &[f64]) -> TqpInstance {
        TqpInstance::unconstrained(SymMatrix::from_rows(q).unwrap(), c.to_vec()).unwrap()
    }

    fn lift(x: &TernaryVector, scale: f64) -> SymMatrix {
        let mut v = vec![1.0];
        v.extend(x.as_f64());
        let n = v.len();
        SymMatrix::from_upper_fn(n, |i, j| scale * v[i] * v[j])
    }

    #[test]
    fn one_variable_basic() {
        let inst = tqp(&[vec![-1.0]], &[0.0]);
        let r = solve_default(&build_basic(&inst, true), &[]);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective + 1.0).abs() < 1e-6);
        assert!((r.point.big_x.get(0, 0) - 1.0).abs() < 1e-5);
        assert!(r.bound <= r.objective + 1e-7);
    }

    #[test]
    fn linear_objective_reaches_box_corner() {
        let inst = tqp(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[1.0, 0.0]);
        let r = solve_default(&build_basic(&inst, true), &[]);
        assert!((r.objective + 1.0).abs() < 1e-6);
        assert!((r.bound + 1.0).abs() < 1e-5);
    }

    #[test]
    fn squared_flag_without_constraints_is_noop() {
        let inst = tqp(&[vec![1.0, 0.3], vec![0.3, -2.0]], &[0.5, 0.1]);
        let a = build_basic(&inst, true);
        let b = build_basic(&inst, false);
        assert_eq!(a.equalities(), b.equalities());
        assert_eq!(a.inequalities(), b.inequalities());
    }

    #[test]
    fn aggregated_equality() {
        let inst = TqpInstance::balanced(SymMatrix::zeros(2), vec![0.0; 2]).unwrap();
        let (s, rhs) = build_aggregated_equality(&inst).unwrap();
        assert_eq!(rhs, 0.0);
        assert_eq!(s, SymMatrix::from_rows(&[vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap());
        let good = lift(&TernaryVector::new(vec![1, -1]).unwrap(), 1.0);
        let bad = lift(&TernaryVector::new(vec![1, 0]).unwrap(), 1.0);
        assert_eq!(s.dot(&good), 0.0);
        assert_eq!(s.dot(&bad), 1.0);
        let free = TqpInstance::unconstrained(SymMatrix::zeros(2), vec![0.0; 2]).unwrap();
        assert_eq!(build_aggregated_equality(&free), Err(Error::EmptyConstraints));
    }

    #[test]
    fn quto_diagonal_equalities() {
        let h = build_quto(&tqp(&[vec![-1.0, 0.0], vec![0.0, 2.0]], &[0.0; 2])).unwrap();
        assert_eq!(h.equalities().len(), 2);
        let h = build_quto(&tqp(&[vec![1.0, 0.0], vec![0.0, 2.0]], &[0.0; 2])).unwrap();
        assert_eq!(h.equalities().len(), 1);
        let bal = TqpInstance::balanced(SymMatrix::zeros(2), vec![0.0; 2]).unwrap();
        assert!(matches!(build_quto(&bal), Err(Error::HasConstraints)));
    }

    #[test]
    fn quto_negative_identity_is_exact() {
        let q: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| if i == j { -1.0 } else { 0.0 }).collect()).collect();
        let r = solve_default(&build_quto(&tqp(&q, &[0.0; 3])).unwrap(), &[]);
        assert!((r.bound + 3.0).abs() < 1e-5);
    }

    #[test]
    fn linear_relaxation_examples() {
        let inst = TqpInstance::balanced(SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(), vec![0.0; 2]).unwrap();
        let r = solve_default(&build_linear(&inst).unwrap(), &[]);
        assert!(r.bound <= -2.0 + 1e-6);
        assert!(r.point.x.iter().sum::<f64>().abs() <= 1e-6);

        let inst = TqpInstance::balanced(SymMatrix::zeros(2), vec![1.0, -1.0]).unwrap();
        let h = build_linear(&inst).unwrap();
        let r = solve_default(&h, &[]);
        assert!((r.objective + 2.0).abs() < 1e-5, "{}", r.objective);
        let rr = solve_default(&facial_reduce(&h).unwrap(), &[]);
        assert!((rr.objective + 2.0).abs() < 1e-6);

        let wrong = tqp(&[vec![0.0]], &[0.0]);
        assert!(matches!(build_linear(&wrong), Err(Error::WrongVariant(_))));
    }

    #[test]
    fn reduced_basis_properties() {
        for n in 1..12 {
            let w = ReducedBasis::new(n).w;
            let mut v = DMatrix::from_element(n + 1, 1, 1.0);
            v[(0, 0)] = 0.0;
            assert!((w.transpose() * &v).iter().all(|&x| x == 0.0));
            assert_eq!(w.clone().svd(false, false).rank(1e-12), n);
            assert!(ReducedBasis::strictly_feasible_point(n).min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn ratio_trivial_instance() {
        let inst = RatioInstance::new(SymMatrix::identity(1), vec![0.0], 0.0, SymMatrix::identity(1), vec![0.0], 1.0).unwrap();
        let h = build_ratio(&inst);
        let r = solve_default(&h, &[]);
        assert!(r.objective.abs() < 1e-6);
        assert!(r.bound.abs() < 1e-5);
        for x in [vec![0], vec![1], vec![-1]] {
            let x = TernaryVector::new(x).unwrap();
            let g = inst.denominator(&x).unwrap();
            assert!(h.max_violation_at(&lift(&x, 1.0 / g)) < 1e-12);
        }
    }

    #[test]
    fn fixing_examples() {
        let inst = tqp(&[vec![1.0, -0.5, 0.2], vec![-0.5, -1.0, 0.3], vec![0.2, 0.3, 0.5]], &[0.1, -0.2, 0.3]);
        let h = build_basic(&inst, true);
        let h0 = fix_variable(&h, 0, 0).unwrap();
        let r = solve_default(&h0, &[]);
        for j in 0..3 {
            assert!(r.point.big_x.get(0, j).abs() < 1e-6);
        }
        let h1 = fix_variable(&fix_variable(&h, 0, 1).unwrap(), 1, -1).unwrap();
        let last = h1.equalities().last().unwrap();
        assert_eq!(last.1, -1.0);
        assert!(matches!(fix_variable(&h1, 0, 1), Err(Error::AlreadyFixed(0))));

        for x in [vec![1, -1, 0], vec![0, 1, 1], vec![-1, -1, -1]] {
            let x = TernaryVector::new(x).unwrap();
            let mut hh = h.clone();
            for i in 0..3 {
                hh = fix_variable(&hh, i, x.get(i)).unwrap();
            }
            let r = solve_default(&hh, &[]);
            let exact = crate::problem::evaluate_objective(&inst, &x).unwrap();
            assert!((r.objective - exact).abs() < 1e-6, "{} vs {exact}", r.objective);
            assert!((r.bound - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn squared_constraints_keep_feasible_lifts() {
        let inst = TqpInstance::new(
            SymMatrix::identity(3),
            vec![0.0; 3],
            vec![LinearConstraint { a: vec![1.0, 2.0, -1.0], b: 1.0 }],
        )
        .unwrap();
        let h = build_basic(&inst, true);
        let x = TernaryVector::new(vec![1, 0, 0]).unwrap();
        assert!(h.max_violation_at(&lift(&x, 1.0)) < 1e-12);
        let r = solve_default(&h, &[]);
        assert_eq!(r.status, SolveStatus::Optimal);
        let ax: f64 = r.point.x[0] + 2.0 * r.point.x[1] - r.point.x[2];
        assert!((ax - 1.0).abs() < 1e-6);
    }
}
