//! Domain types shared by every solver component, and exact evaluation of
//! objectives and constraints.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// A point of {-1, 0, 1}^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryVector(Vec<i8>);

impl TernaryVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        for (index, &v) in values.iter().enumerate() {
            if !(-1..=1).contains(&v) {
                return Err(Error::NotTernary { index, value: v as i64 });
            }
        }
        Ok(TernaryVector(values))
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(values.len());
        for (index, &v) in values.iter().enumerate() {
            if !(-1..=1).contains(&v) {
                return Err(Error::NotTernary { index, value: v });
            }
            out.push(v as i8);
        }
        Ok(TernaryVector(out))
    }

    pub fn zeros(n: usize) -> Self {
        TernaryVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    /// Sets entry `i`; panics if `v` is not ternary.
    pub fn set(&mut self, i: usize, v: i8) {
        assert!((-1..=1).contains(&v), "non-ternary value {v}");
        self.0[i] = v;
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&v| v as i64).sum()
    }

    /// Decodes the `code`-th point of {-1,0,1}^n in base-3 order (digit 0 -> -1).
    pub fn from_index(mut code: u64, n: usize) -> Self {
        let mut v = vec![0i8; n];
        for slot in v.iter_mut() {
            *slot = (code % 3) as i8 - 1;
            code /= 3;
        }
        TernaryVector(v)
    }
}

impl std::fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

const SYMMETRY_TOL: f64 = 1e-9;

impl SymMatrix {
    /// Builds from a row-major buffer, replacing it by (M + Mᵀ)/2.
    /// Rejects input whose asymmetry exceeds 1e-9.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        let mut m = SymMatrix { n, data };
        for i in 0..n {
            for j in (i + 1)..n {
                let a = m.data[i * n + j];
                let b = m.data[j * n + i];
                let dev = (a - b).abs();
                if !(dev <= SYMMETRY_TOL) {
                    return Err(Error::NotSymmetric { i, j, deviation: dev });
                }
                let s = 0.5 * (a + b);
                m.data[i * n + j] = s;
                m.data[j * n + i] = s;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Writes both (i,j) and (j,i).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SymMatrix { n: self.n, data: self.data.iter().map(|v| v * alpha).collect() }
    }

    /// self + alpha * other
    pub fn add_scaled(&self, other: &SymMatrix, alpha: f64) -> Self {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect(),
        }
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mat_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Applies the simultaneous permutation `P M Pᵀ`: result(i,j) = M(perm[i], perm[j]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_upper_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Symmetrizes an nalgebra matrix without any tolerance check.
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        Self::from_upper_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.to_dmatrix().symmetric_eigen().eigenvalues.min()
    }
}

/// One equality aᵀx = b.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Quadratic objective xᵀQx + cᵀx with linear equality constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct TqpInstance {
    pub q: SymMatrix,
    pub c: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl TqpInstance {
    pub fn new(q: SymMatrix, c: Vec<f64>, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let n = q.dim();
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        for con in &constraints {
            if con.a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: con.a.len() });
            }
        }
        Ok(TqpInstance { q, c, constraints })
    }

    pub fn unconstrained(q: SymMatrix, c: Vec<f64>) -> Result<Self> {
        Self::new(q, c, Vec::new())
    }

    /// Same objective with the single balance constraint 𝟙ᵀx = 0.
    pub fn balanced(q: SymMatrix, c: Vec<f64>) -> Result<Self> {
        let n = q.dim();
        Self::new(q, c, vec![LinearConstraint { a: vec![1.0; n], b: 0.0 }])
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// True when the constraint list is exactly 𝟙ᵀx = 0.
    pub fn is_balanced(&self) -> bool {
        self.constraints.len() == 1
            && self.constraints[0].b == 0.0
            && self.constraints[0].a.iter().all(|&v| v == 1.0)
    }
}

/// Minimize f(x)/g(x) with f = xᵀAx + aᵀx + a0 and g = xᵀBx + bᵀx + b0.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioInstance {
    pub a_mat: SymMatrix,
    pub a: Vec<f64>,
    pub a0: f64,
    pub b_mat: SymMatrix,
    pub b: Vec<f64>,
    pub b0: f64,
}

impl RatioInstance {
    pub fn new(
        a_mat: SymMatrix,
        a: Vec<f64>,
        a0: f64,
        b_mat: SymMatrix,
        b: Vec<f64>,
        b0: f64,
    ) -> Result<Self> {
        let n = a_mat.dim();
        for len in [a.len(), b_mat.dim(), b.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(RatioInstance { a_mat, a, a0, b_mat, b, b0 })
    }

    pub fn dim(&self) -> usize {
        self.a_mat.dim()
    }

    pub fn numerator(&self, x: &TernaryVector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let xf = x.as_f64();
        Ok(self.a_mat.quad_form(&xf) + dot(&self.a, &xf) + self.a0)
    }

    pub fn denominator(&self, x: &TernaryVector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let xf = x.as_f64();
        Ok(self.b_mat.quad_form(&xf) + dot(&self.b, &xf) + self.b0)
    }

    /// The QUTO data of f(x) − λ g(x), returned with its constant term.
    pub fn parametric(&self, lambda: f64) -> (TqpInstance, f64) {
        let q = self.a_mat.add_scaled(&self.b_mat, -lambda);
        let c = self.a.iter().zip(&self.b).map(|(a, b)| a - lambda * b).collect();
        let inst = TqpInstance { q, c, constraints: Vec::new() };
        (inst, self.a0 - lambda * self.b0)
    }

    /// Upper bound on ρ = 1/g over the relaxation, when b0 dominates the rest of g.
    pub fn rho_upper_bound(&self) -> Option<f64> {
        let n = self.dim();
        let mut mass = 0.0;
        for i in 0..n {
            for j in 0..n {
                mass += self.b_mat.get(i, j).abs();
            }
            mass += self.b[i].abs();
        }
        let slack = self.b0 - mass;
        (slack > 0.0).then(|| 1.0 / slack)
    }
}

/// Problem variant tag used by the solver entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Quto,
    Tqp,
    Linear,
    RatioDirect,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Quto => "quto",
            Variant::Tqp => "tqp",
            Variant::Linear => "tqp-linear",
            Variant::RatioDirect => "tqp-ratio",
        }
    }
}

/// Any instance the library can read, write and solve.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Quto(TqpInstance),
    Tqp(TqpInstance),
    Linear(TqpInstance),
    Ratio(RatioInstance),
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Quto(t) | ProblemInstance::Tqp(t) | ProblemInstance::Linear(t) => {
                t.dim()
            }
            ProblemInstance::Ratio(r) => r.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.variant().name()
    }

    pub fn variant(&self) -> Variant {
        match self {
            ProblemInstance::Quto(_) => Variant::Quto,
            ProblemInstance::Tqp(_) => Variant::Tqp,
            ProblemInstance::Linear(_) => Variant::Linear,
            ProblemInstance::Ratio(_) => Variant::RatioDirect,
        }
    }

    /// Objective value of `x` (the ratio for ratio instances).
    pub fn evaluate(&self, x: &TernaryVector) -> Result<f64> {
        match self {
            ProblemInstance::Quto(t) | ProblemInstance::Tqp(t) | ProblemInstance::Linear(t) => {
                evaluate_objective(t, x)
            }
            ProblemInstance::Ratio(r) => evaluate_ratio(r, x),
        }
    }

    pub fn is_feasible(&self, x: &TernaryVector) -> bool {
        match self {
            ProblemInstance::Quto(t) | ProblemInstance::Tqp(t) | ProblemInstance::Linear(t) => {
                x.len() == t.dim() && check_feasible(t, x, 1e-9)
            }
            ProblemInstance::Ratio(r) => r.denominator(x).map(|g| g > 0.0).unwrap_or(false),
        }
    }
}

/// A ternary point together with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: TernaryVector,
    pub value: f64,
}

fn check_dim(n: usize, x: &TernaryVector) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// xᵀQx + cᵀx.
pub fn evaluate_objective(inst: &TqpInstance, x: &TernaryVector) -> Result<f64> {
    check_dim(inst.dim(), x)?;
    let xf = x.as_f64();
    Ok(inst.q.quad_form(&xf) + dot(&inst.c, &xf))
}

/// f(x)/g(x); fails when g(x) ≤ 0.
pub fn evaluate_ratio(inst: &RatioInstance, x: &TernaryVector) -> Result<f64> {
    let f = inst.numerator(x)?;
    let g = inst.denominator(x)?;
    if g <= 0.0 {
        return Err(Error::NonPositiveDenominator(g));
    }
    Ok(f / g)
}

/// True iff every |aᵢᵀx − bᵢ| ≤ tol.
pub fn check_feasible(inst: &TqpInstance, x: &TernaryVector, tol: f64) -> bool {
    let xf = x.as_f64();
    inst.constraints.iter().all(|con| (dot(&con.a, &xf) - con.b).abs() <= tol)
}

/// Relative gap (UB − LB)/max(|UB|, 1).
pub fn relative_gap(ub: f64, lb: f64) -> f64 {
    if !ub.is_finite() || !lb.is_finite() {
        return f64::INFINITY;
    }
    ((ub - lb) / ub.abs().max(1.0)).max(0.0)
}
