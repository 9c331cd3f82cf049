//! Exhaustive enumeration of {−1,0,1}ⁿ.

use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Solution, SymMatrix, TernaryVector};

/// Largest n accepted by [`brute_force`].
pub const ORACLE_LIMIT: usize = 14;

/// Running value of xᵀQx + cᵀx + c0 with α = Qx maintained per flip.
struct Tracker<'a> {
    q: &'a SymMatrix,
    c: &'a [f64],
    alpha: Vec<f64>,
    value: f64,
}

impl<'a> Tracker<'a> {
    fn new(q: &'a SymMatrix, c: &'a [f64], c0: f64, x: &[f64]) -> Self {
        let alpha = q.mat_vec(x);
        let value = alpha.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            + c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            + c0;
        Tracker { q, c, alpha, value }
    }

    fn step(&mut self, i: usize, d: f64) {
        self.value += 2.0 * d * self.alpha[i] + d * d * self.q.get(i, i) + d * self.c[i];
        for (a, qi) in self.alpha.iter_mut().zip(self.q.row(i)) {
            *a += d * qi;
        }
    }
}

/// Calls `visit` on every ternary point in base-3 order (coordinate 0 is the
/// least significant digit, digit 0 means −1), with the coordinate changes of
/// each step applied first through `flip`.
fn odometer(n: usize, mut flip: impl FnMut(usize, f64), mut visit: impl FnMut(&[i8])) {
    let mut x = vec![-1i8; n];
    loop {
        visit(&x);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if x[k] < 1 {
                x[k] += 1;
                flip(k, 1.0);
                break;
            }
            x[k] = -1;
            flip(k, -2.0);
            k += 1;
        }
    }
}

/// Exact minimizer; ties go to the first point in enumeration order. The
/// returned value is recomputed from scratch.
pub fn brute_force(inst: &ProblemInstance) -> Result<Solution> {
    brute_force_filtered(inst, |_| true)
}

/// Like [`brute_force`], restricted to points accepted by `keep`.
pub fn brute_force_filtered(inst: &ProblemInstance, keep: impl Fn(&[i8]) -> bool) -> Result<Solution> {
    let n = inst.dim();
    if n > ORACLE_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: ORACLE_LIMIT });
    }
    let start = vec![-1.0; n];
    let mut best: Option<(f64, Vec<i8>)> = None;
    match inst {
        ProblemInstance::Ratio(r) => {
            let f = std::cell::RefCell::new(Tracker::new(&r.a_mat, &r.a, r.a0, &start));
            let g = std::cell::RefCell::new(Tracker::new(&r.b_mat, &r.b, r.b0, &start));
            odometer(
                n,
                |i, d| {
                    f.borrow_mut().step(i, d);
                    g.borrow_mut().step(i, d);
                },
                |x| {
                    let gv = g.borrow().value;
                    if gv > 0.0 && keep(x) {
                        let v = f.borrow().value / gv;
                        if best.as_ref().is_none_or(|b| v < b.0) {
                            best = Some((v, x.to_vec()));
                        }
                    }
                },
            );
        }
        ProblemInstance::Quto(t) | ProblemInstance::Tqp(t) | ProblemInstance::Linear(t) => {
            let f = std::cell::RefCell::new(Tracker::new(&t.q, &t.c, 0.0, &start));
            odometer(
                n,
                |i, d| f.borrow_mut().step(i, d),
                |x| {
                    if !keep(x) {
                        return;
                    }
                    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                    let feasible = t.constraints.iter().all(|con| {
                        (con.a.iter().zip(&xf).map(|(a, b)| a * b).sum::<f64>() - con.b).abs() <= 1e-9
                    });
                    if feasible {
                        let v = f.borrow().value;
                        if best.as_ref().is_none_or(|b| v < b.0) {
                            best = Some((v, x.to_vec()));
                        }
                    }
                },
            );
        }
    }
    let (_, x) = best.ok_or(Error::NoFeasiblePoint)?;
    let x = TernaryVector::new(x)?;
    let value = inst.evaluate(&x)?;
    Ok(Solution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{RatioInstance, TqpInstance};

    #[test]
    fn spec_examples() {
        let quto = TqpInstance::unconstrained(SymMatrix::from_diag(&[-1.0, -1.0]), vec![0.0; 2]).unwrap();
        assert_eq!(brute_force(&ProblemInstance::Quto(quto)).unwrap().value, -2.0);

        let q = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let lin = TqpInstance::balanced(q, vec![0.0; 2]).unwrap();
        let s = brute_force(&ProblemInstance::Linear(lin)).unwrap();
        assert_eq!(s.value, -2.0);
        assert_eq!(s.x.values(), &[1, -1]);

        let r = RatioInstance::new(SymMatrix::identity(1), vec![0.0], 0.0, SymMatrix::identity(1), vec![0.0], 1.0).unwrap();
        let s = brute_force(&ProblemInstance::Ratio(r)).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.x.values(), &[0]);
    }

    #[test]
    fn incremental_matches_scratch() {
        let q = SymMatrix::from_upper_fn(5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.1);
        let t = TqpInstance::unconstrained(q, vec![0.3, -0.2, 0.5, -0.7, 0.1]).unwrap();
        let inst = ProblemInstance::Quto(t.clone());
        let s = brute_force(&inst).unwrap();
        let scratch = (0..243u64)
            .map(|k| crate::problem::evaluate_objective(&t, &TernaryVector::from_index(k, 5)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(s.value, scratch);
        // order of the odometer is the order of from_index
        let mut seen = Vec::new();
        odometer(3, |_, _| {}, |x| seen.push(x.to_vec()));
        for (k, x) in seen.iter().enumerate() {
            assert_eq!(TernaryVector::from_index(k as u64, 3).values(), &x[..]);
        }
    }

    #[test]
    fn too_large() {
        let t = TqpInstance::unconstrained(SymMatrix::zeros(15), vec![0.0; 15]).unwrap();
        assert_eq!(
            brute_force(&ProblemInstance::Quto(t)),
            Err(Error::DimensionTooLarge { n: 15, limit: ORACLE_LIMIT })
        );
    }
}
