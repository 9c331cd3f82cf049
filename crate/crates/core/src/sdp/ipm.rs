//! Infeasible-start primal-dual interior-point method with the HKM search
//! direction and Mehrotra predictor-corrector steps. Inequalities carry
//! nonnegative slacks s with dual slacks w (w = y at optimality).

use super::{ConicProblem, ConicSolution, SdpBackend, SolveOptions, SolveStatus};
use crate::problem::SymMatrix;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

#[derive(Debug, Clone, Copy, Default)]
pub struct InteriorPoint;

impl SdpBackend for InteriorPoint {
    fn name(&self) -> &'static str {
        "ipm"
    }

    fn solve(&self, p: &ConicProblem, opts: &SolveOptions) -> ConicSolution {
        Solver::new(p).run(opts)
    }
}

/// Constraint in both triangles, plus a dense copy when it has many entries.
struct Row {
    full: Vec<(usize, usize, f64)>,
    dense: Option<DMatrix<f64>>,
    rhs: f64,
    ineq: bool,
}

struct Solver<'a> {
    p: &'a ConicProblem,
    r: usize,
    rows: Vec<Row>,
    c: DMatrix<f64>,
    n_eq: usize,
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn frob(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigen().eigenvalues.min()
}

/// Largest step t with x + t·dx ⪰ 0 (infinite if dx does not decrease x).
fn max_step_psd(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let t = &linv * dx * linv.transpose();
    let lam = min_eig(&sym(&t));
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

fn max_step_lp(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&v, &d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

impl<'a> Solver<'a> {
    fn new(p: &'a ConicProblem) -> Self {
        let r = p.m;
        let mut rows = Vec::with_capacity(p.eqs.len() + p.ineqs.len());
        let tagged = p.eqs.iter().map(|e| (e, false)).chain(p.ineqs.iter().map(|e| (e, true)));
        for ((a, b), ineq) in tagged {
            let mut full = Vec::with_capacity(2 * a.nnz());
            for &(i, j, v) in a.entries() {
                full.push((i, j, v));
                if i != j {
                    full.push((j, i, v));
                }
            }
            let dense = (full.len() > 2 * r).then(|| {
                let mut d = DMatrix::zeros(r, r);
                for &(i, j, v) in &full {
                    d[(i, j)] += v;
                }
                d
            });
            rows.push(Row { full, dense, rhs: *b, ineq });
        }
        let c = DMatrix::from_row_slice(r, r, p.c.data());
        Solver { p, r, rows, c, n_eq: p.eqs.len() }
    }

    fn a_dot(&self, i: usize, x: &DMatrix<f64>) -> f64 {
        self.rows[i].full.iter().map(|&(p, q, v)| v * x[(p, q)]).sum()
    }

    /// Σ y_i A_i as a dense matrix.
    fn a_adj(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.r, self.r);
        for (row, &yi) in self.rows.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for &(p, q, v) in &row.full {
                m[(p, q)] += yi * v;
            }
        }
        m
    }

    /// Schur complement M_ij = tr(A_i X A_j Z⁻¹) plus s/w on inequality rows.
    fn schur(&self, x: &DMatrix<f64>, zi: &DMatrix<f64>, s: &[f64], w: &[f64]) -> DMatrix<f64> {
        let r = self.r;
        let m = self.rows.len();
        let mut out = DMatrix::zeros(m, m);
        let xs = x.as_slice();
        let zs = zi.as_slice();
        let mut h = vec![0.0; r * r];
        for i in 0..m {
            let row = &self.rows[i];
            if let Some(d) = &row.dense {
                let hm = zi * d * x;
                // row-major copy
                for a in 0..r {
                    for b in 0..r {
                        h[a * r + b] = hm[(a, b)];
                    }
                }
            } else {
                h.iter_mut().for_each(|v| *v = 0.0);
                for &(p, q, v) in &row.full {
                    let zcol = &zs[p * r..(p + 1) * r];
                    let xcol = &xs[q * r..(q + 1) * r];
                    for a in 0..r {
                        let f = v * zcol[a];
                        if f == 0.0 {
                            continue;
                        }
                        let hrow = &mut h[a * r..(a + 1) * r];
                        for (hb, xb) in hrow.iter_mut().zip(xcol) {
                            *hb += f * xb;
                        }
                    }
                }
            }
            for j in i..m {
                let val: f64 = self.rows[j].full.iter().map(|&(p, q, v)| v * h[q * r + p]).sum();
                out[(i, j)] = val;
                out[(j, i)] = val;
            }
        }
        for i in self.n_eq..m {
            let k = i - self.n_eq;
            out[(i, i)] += s[k] / w[k];
        }
        out
    }

    /// Rigorous lower bound from a dual vector.
    fn safe_bound(&self, y: &[f64], x: &DMatrix<f64>) -> (f64, f64) {
        let mut yc: Vec<f64> = y.to_vec();
        for (k, row) in self.rows.iter().enumerate() {
            if row.ineq && yc[k] < 0.0 {
                yc[k] = 0.0;
            }
        }
        let dobj: f64 = self.rows.iter().zip(&yc).map(|(row, yi)| row.rhs * yi).sum();
        let zt = sym(&(&self.c - self.a_adj(&yc)));
        let lam = min_eig(&zt);
        let t = self.p.trace_bound.unwrap_or_else(|| 2.0 * x.trace().max(1.0));
        (dobj + lam.min(0.0) * t, lam)
    }

    fn run(&self, opts: &SolveOptions) -> ConicSolution {
        let r = self.r;
        let m = self.rows.len();
        let n_in = m - self.n_eq;
        let tol = opts.tol;

        let b: Vec<f64> = self.rows.iter().map(|row| row.rhs).collect();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cnorm = frob(&self.c);
        let anorms: Vec<f64> = self
            .rows
            .iter()
            .map(|row| row.full.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt())
            .collect();

        let rf = r as f64;
        let mut xi = 10f64.max(rf.sqrt());
        let mut eta = 10f64.max(rf.sqrt()).max(cnorm);
        for (k, row) in self.rows.iter().enumerate() {
            xi = xi.max(rf * (1.0 + row.rhs.abs()) / (1.0 + anorms[k]));
            eta = eta.max(anorms[k]);
        }
        eta = (1.0 + eta) / rf.sqrt().max(1.0) * 10f64.min(rf.sqrt().max(1.0));

        let mut x = DMatrix::identity(r, r) * xi;
        let mut z = DMatrix::identity(r, r) * eta;
        let mut y = vec![0.0; m];
        let mut s = vec![xi; n_in];
        let mut w = vec![eta; n_in];

        let mut status = SolveStatus::MaxIter;
        let mut iterations = 0;
        let mut pinf = f64::INFINITY;
        let mut dinf = f64::INFINITY;
        let mut gap = f64::INFINITY;
        let mut best_bound = f64::NEG_INFINITY;
        let mut best_y = y.clone();
        let mut stalls = 0;

        for iter in 0..=opts.max_iter {
            iterations = iter;
            // residuals
            let mut rp = vec![0.0; m];
            for k in 0..m {
                rp[k] = b[k] - self.a_dot(k, &x);
                if k >= self.n_eq {
                    rp[k] += s[k - self.n_eq];
                }
            }
            let rd = &self.c - self.a_adj(&y) - &z;
            let rw: Vec<f64> = (0..n_in).map(|k| y[self.n_eq + k] - w[k]).collect();
            let pobj = inner(&self.c, &x);
            let dobj: f64 = b.iter().zip(&y).map(|(a, c)| a * c).sum();
            pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + bnorm);
            dinf = (frob(&rd) + rw.iter().map(|v| v * v).sum::<f64>().sqrt()) / (1.0 + cnorm);
            gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let mu = (inner(&x, &z) + s.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>())
                / (rf + n_in as f64);

            let (sb, _) = self.safe_bound(&y, &x);
            if sb > best_bound {
                best_bound = sb;
                best_y.clone_from(&y);
            }
            if let Some(cut) = opts.cutoff {
                if best_bound >= cut {
                    status = SolveStatus::Cutoff;
                    break;
                }
            }
            if let Some(t) = self.p.trace_bound {
                if best_bound > cnorm * t * (1.0 + 1e-9) + 1e-9 {
                    status = SolveStatus::Infeasible;
                    break;
                }
            }
            if pinf <= tol && dinf <= tol && gap <= tol {
                status = SolveStatus::Optimal;
                break;
            }
            if iter == opts.max_iter {
                break;
            }

            let zi = match Cholesky::new(z.clone()) {
                Some(ch) => sym(&ch.inverse()),
                None => {
                    status = SolveStatus::NumericalFailure;
                    break;
                }
            };
            let mut schur = self.schur(&x, &zi, &s, &w);
            let factor = factor_regularized(&mut schur);
            let Some(factor) = factor else {
                status = SolveStatus::NumericalFailure;
                break;
            };

            let xrdzi = &x * &rd * &zi;
            let direction = |sigma_mu: f64,
                             corr: Option<(&DMatrix<f64>, &[f64])>|
             -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>, Vec<f64>, Vec<f64>) {
                // K = σμ Z⁻¹ − X − X Rd Z⁻¹ − ΔXa ΔZa Z⁻¹
                let mut k = &zi * sigma_mu - &x - &xrdzi;
                if let Some((c, _)) = corr {
                    k -= c;
                }
                let mut rhs = DVector::zeros(m);
                for i in 0..m {
                    let mut v = rp[i] - self.a_dot(i, &k);
                    if i >= self.n_eq {
                        let j = i - self.n_eq;
                        let lp = corr.map(|(_, l)| l[j]).unwrap_or(0.0);
                        v += (sigma_mu - s[j] * w[j] - lp) / w[j] - s[j] / w[j] * rw[j];
                    }
                    rhs[i] = v;
                }
                let dy = factor.solve(&rhs);
                let dy: Vec<f64> = dy.iter().copied().collect();
                let dz = &rd - self.a_adj(&dy);
                let dx = sym(&(k + &x * self.a_adj(&dy) * &zi));
                let dw: Vec<f64> = (0..n_in).map(|j| rw[j] + dy[self.n_eq + j]).collect();
                let ds: Vec<f64> = (0..n_in)
                    .map(|j| {
                        let lp = corr.map(|(_, l)| l[j]).unwrap_or(0.0);
                        (sigma_mu - s[j] * w[j] - lp) / w[j] - s[j] / w[j] * dw[j]
                    })
                    .collect();
                (dx, ds, dz, dy, dw)
            };

            // predictor
            let (dxa, dsa, dza, _, dwa) = direction(0.0, None);
            let ap = 1f64.min(max_step_psd(&x, &dxa)).min(max_step_lp(&s, &dsa));
            let ad = 1f64.min(max_step_psd(&z, &dza)).min(max_step_lp(&w, &dwa));
            let mu_aff = (inner(&(&x + &dxa * ap), &(&z + &dza * ad))
                + (0..n_in).map(|j| (s[j] + ap * dsa[j]) * (w[j] + ad * dwa[j])).sum::<f64>())
                / (rf + n_in as f64);
            let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

            // corrector
            let corr_mat = &dxa * &dza * &zi;
            let corr_lp: Vec<f64> = (0..n_in).map(|j| dsa[j] * dwa[j]).collect();
            let (dx, ds, dz, dy, dw) = direction(sigma * mu, Some((&corr_mat, &corr_lp)));

            let gamma = 0.9 + 0.09 * ap.min(ad);
            let ap = 1f64.min(gamma * max_step_psd(&x, &dx)).min(gamma * max_step_lp(&s, &ds));
            let ad = 1f64.min(gamma * max_step_psd(&z, &dz)).min(gamma * max_step_lp(&w, &dw));
            if ap < 1e-10 && ad < 1e-10 {
                stalls += 1;
                if stalls >= 3 {
                    status = SolveStatus::NumericalFailure;
                    break;
                }
            } else {
                stalls = 0;
            }
            x += &dx * ap;
            x = sym(&x);
            for j in 0..n_in {
                s[j] += ap * ds[j];
            }
            z += &dz * ad;
            z = sym(&z);
            for k in 0..m {
                y[k] += ad * dy[k];
            }
            for j in 0..n_in {
                w[j] += ad * dw[j];
            }
        }

        let (sb_last, _) = self.safe_bound(&y, &x);
        let (safe_bound, y_out) = if sb_last >= best_bound { (sb_last, y) } else { (best_bound, best_y) };
        let xs = SymMatrix::from_dmatrix(&x);
        let objective = inner(&self.c, &x);
        let dual_objective: f64 = b.iter().zip(&y_out).map(|(a, c)| a * c).sum();
        ConicSolution {
            x: xs,
            objective,
            dual_objective,
            safe_bound,
            status,
            primal_residual: pinf,
            dual_residual: dinf,
            gap,
            iterations,
            y: y_out,
        }
    }
}

fn factor_regularized(m: &mut DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let n = m.nrows();
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch);
    }
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = 1e-14 * scale;
    for _ in 0..12 {
        let mut t = m.clone();
        for i in 0..n {
            t[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(t) {
            return Some(ch);
        }
        reg *= 100.0;
    }
    None
}
