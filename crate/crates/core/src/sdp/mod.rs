//! Single-block semidefinite programs:
//!
//! minimize ⟨C,X⟩ s.t. ⟨A_i,X⟩ = b_i, ⟨G_j,X⟩ ≥ h_j, X ⪰ 0.

mod ipm;

pub use ipm::InteriorPoint;

use crate::error::{Error, Result};
use crate::problem::SymMatrix;

/// Sparse symmetric matrix given by its upper-triangle entries (p ≤ q).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        SparseSym { entries: Vec::new() }
    }

    /// Adds `v` to entry (p,q) and its mirror.
    pub fn add(&mut self, p: usize, q: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == p && e.1 == q) {
            e.2 += v;
        } else {
            self.entries.push((p, q, v));
        }
    }

    /// Adds `coef` times the linear functional X ↦ X_pq (counting both
    /// mirrored positions once), i.e. ⟨A,X⟩ gains coef·X_pq.
    pub fn add_functional(&mut self, p: usize, q: usize, coef: f64) {
        if p == q {
            self.add(p, p, coef);
        } else {
            self.add(p, q, 0.5 * coef);
        }
    }

    pub fn from_dense(m: &SymMatrix) -> Self {
        let mut s = SparseSym::new();
        for p in 0..m.dim() {
            for q in p..m.dim() {
                let v = m.get(p, q);
                if v != 0.0 {
                    s.entries.push((p, q, v));
                }
            }
        }
        s
    }

    pub fn to_dense(&self, n: usize) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        for &(p, q, v) in &self.entries {
            m.set(p, q, m.get(p, q) + v);
        }
        m
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|e| e.1).max()
    }

    /// ⟨A, X⟩ for a dense symmetric X.
    pub fn dot(&self, x: &SymMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(p, q, v)| if p == q { v * x.get(p, p) } else { 2.0 * v * x.get(p, q) })
            .sum()
    }

    /// ⟨A, X⟩ for a row-major buffer of dimension n.
    pub fn dot_buf(&self, x: &[f64], n: usize) -> f64 {
        self.entries
            .iter()
            .map(|&(p, q, v)| if p == q { v * x[p * n + p] } else { 2.0 * v * x[p * n + q] })
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(p, q, v)| if p == q { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }
}

/// The SDP data. `trace_bound`, when known, is a valid upper bound on tr(X)
/// over the feasible set and makes the reported lower bound rigorous.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub m: usize,
    pub c: SymMatrix,
    pub eqs: Vec<(SparseSym, f64)>,
    pub ineqs: Vec<(SparseSym, f64)>,
    pub trace_bound: Option<f64>,
}

impl ConicProblem {
    pub fn new(c: SymMatrix) -> Self {
        ConicProblem { m: c.dim(), c, eqs: Vec::new(), ineqs: Vec::new(), trace_bound: None }
    }

    pub fn add_eq(&mut self, a: SparseSym, b: f64) {
        self.eqs.push((a, b));
    }

    pub fn add_ineq(&mut self, g: SparseSym, h: f64) {
        self.ineqs.push((g, h));
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.dim() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: self.c.dim() });
        }
        for (a, _) in self.eqs.iter().chain(&self.ineqs) {
            if let Some(k) = a.max_index() {
                if k >= self.m {
                    return Err(Error::DimensionMismatch { expected: self.m, got: k + 1 });
                }
            }
        }
        Ok(())
    }

    /// Largest violation of the linear constraints at `x` (equalities in
    /// absolute value, inequalities one-sided).
    pub fn max_violation(&self, x: &SymMatrix) -> f64 {
        let e = self.eqs.iter().map(|(a, b)| (a.dot(x) - b).abs());
        let i = self.ineqs.iter().map(|(g, h)| (h - g.dot(x)).max(0.0));
        e.chain(i).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
    NumericalFailure,
    /// The certified lower bound already exceeds the caller's cutoff.
    Cutoff,
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIter => "max-iter",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical-failure",
            SolveStatus::Cutoff => "cutoff",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub x: SymMatrix,
    pub objective: f64,
    pub dual_objective: f64,
    /// Lower bound on the optimum valid for any returned dual vector.
    pub safe_bound: f64,
    pub status: SolveStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Multipliers: equalities first, then inequalities.
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Stop as soon as the certified bound reaches this value.
    pub cutoff: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-7, max_iter: 200, cutoff: None }
    }
}

/// A method for solving [`ConicProblem`]s.
pub trait SdpBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, p: &ConicProblem, opts: &SolveOptions) -> ConicSolution;
}

/// Names of the registered backends.
pub fn backend_names() -> Vec<&'static str> {
    vec![InteriorPoint.name()]
}

pub fn backend(name: &str) -> Result<Box<dyn SdpBackend>> {
    match name {
        "ipm" => Ok(Box::new(InteriorPoint)),
        _ => Err(Error::UnknownStrategy { kind: "sdp backend", name: name.to_string() }),
    }
}

/// Solves with the default interior-point backend.
pub fn solve(p: &ConicProblem, tol: f64, max_iter: usize) -> ConicSolution {
    InteriorPoint.solve(p, &SolveOptions { tol, max_iter, cutoff: None })
}
