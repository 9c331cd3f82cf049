//! k-gonal inequalities Σ_{i<j∈S} v_i v_j X_ij ≥ ⌈−k/2⌉ for |S| = k odd,
//! separated heuristically by simulated annealing over index assignments.

use super::{finish_report, Cut, CutFamily, SeparationReport};
use crate::error::{Error, Result};
use crate::problem::SymMatrix;
use crate::rng::Rng;
use std::collections::HashSet;

pub fn kgonal_rhs(k: usize) -> f64 {
    -((k / 2) as f64)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if !matches!(k, 5 | 7 | 9) || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    Ok(())
}

/// Annealing schedule. Each start makes `iters_per_dim·n` proposals and
/// cools by `cooling` every n proposals.
#[derive(Debug, Clone, Copy)]
pub struct KGonalSchedule {
    pub t0: f64,
    pub cooling: f64,
    pub iters_per_dim: usize,
}

impl Default for KGonalSchedule {
    fn default() -> Self {
        KGonalSchedule { t0: 1.0, cooling: 0.95, iters_per_dim: 100 }
    }
}

/// Builds the cut on `idx` with signs `v`, canonicalized so that the lowest
/// index carries +1 (v and −v give the same inequality).
fn make_cut(idx: &[usize], v: &[f64]) -> Cut {
    let mut pairs: Vec<(usize, f64)> = idx.iter().copied().zip(v.iter().copied()).collect();
    pairs.sort_by_key(|p| p.0);
    if pairs[0].1 < 0.0 {
        pairs.iter_mut().for_each(|p| p.1 = -p.1);
    }
    let k = pairs.len();
    let mut coeffs = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            coeffs.push((pairs[a].0, pairs[b].0, pairs[a].1 * pairs[b].1));
        }
    }
    Cut::new(CutFamily::KGonal(k as u8), vec![], coeffs, kgonal_rhs(k))
}

fn objective(xs: &SymMatrix, perm: &[usize], v: &[f64]) -> f64 {
    let k = v.len();
    let mut s = 0.0;
    for a in 0..k {
        for b in (a + 1)..k {
            s += v[a] * v[b] * xs.get(perm[a], perm[b]);
        }
    }
    s
}

/// Heuristic separation. Sign vectors with the same number of −1 entries
/// are equivalent once positions are permuted, so one annealing family is run
/// per count m = 0..=(k−1)/2, each with `runs` independent starts.
pub fn separate_kgonal(
    xs: &SymMatrix,
    k: usize,
    runs: usize,
    tol: f64,
    cap: usize,
    seed: u64,
    schedule: &KGonalSchedule,
) -> Result<SeparationReport> {
    let n = xs.dim();
    check_k(k, n)?;
    let rhs = kgonal_rhs(k);
    let mut found = Vec::new();
    let mut keys = HashSet::new();
    let mut examined = 0;
    let iters = schedule.iters_per_dim * n;
    for minus in 0..=(k - 1) / 2 {
        let v: Vec<f64> = (0..k).map(|a| if a < minus { -1.0 } else { 1.0 }).collect();
        for start in 0..runs {
            let stream = ((k as u64) << 48) ^ ((minus as u64) << 40) ^ start as u64;
            let mut rng = Rng::derive(seed, stream);
            let mut perm: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut perm);
            let mut cur = objective(xs, &perm, &v);
            let mut best = cur;
            let mut best_set: Vec<usize> = perm[..k].to_vec();
            let mut t = schedule.t0;
            for it in 0..iters {
                if it > 0 && it % n == 0 {
                    t *= schedule.cooling;
                }
                let a = rng.below(k);
                let mut b = rng.below(n - 1);
                if b >= a {
                    b += 1;
                }
                let (ia, ib) = (perm[a], perm[b]);
                let delta = if b >= k {
                    // position a takes a fresh index
                    let mut acc = 0.0;
                    for c in 0..k {
                        if c != a {
                            acc += v[c] * (xs.get(ib, perm[c]) - xs.get(ia, perm[c]));
                        }
                    }
                    v[a] * acc
                } else {
                    if v[a] == v[b] {
                        continue;
                    }
                    let mut acc = 0.0;
                    for c in 0..k {
                        if c != a && c != b {
                            acc += v[c] * (xs.get(ib, perm[c]) - xs.get(ia, perm[c]));
                        }
                    }
                    (v[a] - v[b]) * acc
                };
                examined += 1;
                if delta <= 0.0 || rng.uniform() < (-delta / t).exp() {
                    perm.swap(a, b);
                    cur += delta;
                    if cur < best - 1e-12 {
                        best = cur;
                        best_set.copy_from_slice(&perm[..k]);
                    }
                }
            }
            if best < rhs - tol {
                let cut = make_cut(&best_set, &v);
                // re-evaluate exactly rather than trusting the running sum
                let exact = objective(xs, &best_set, &v);
                let viol = rhs - exact;
                if viol > tol && keys.insert(cut.key()) {
                    found.push((cut, viol));
                }
            }
        }
    }
    Ok(finish_report(found, examined, cap))
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] >= n - k + i {
            return;
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All C(n,k)·2^(k−1) k-gonal cuts.
pub(super) fn all_kgonal(n: usize, k: usize) -> Vec<Cut> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    for_each_subset(n, k, |s| {
        for mask in 0..(1u32 << (k - 1)) {
            let v: Vec<f64> =
                (0..k).map(|a| if a > 0 && mask >> (a - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
            out.push(make_cut(s, &v));
        }
    });
    out
}

/// Exact separation by full enumeration; only meant for small n.
pub fn separate_kgonal_exhaustive(xs: &SymMatrix, k: usize, tol: f64) -> Result<SeparationReport> {
    let n = xs.dim();
    check_k(k, n)?;
    let p = crate::cuts::LiftedPoint::new(vec![0.0; n], xs.clone());
    let all = all_kgonal(n, k);
    let examined = all.len();
    let found = all
        .into_iter()
        .filter_map(|c| {
            let v = c.violation(&p);
            (v > tol).then_some((c, v))
        })
        .collect();
    Ok(finish_report(found, examined, usize::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{cut_valid_on_ternary, LiftedPoint};
    use crate::problem::TernaryVector;
    use crate::ternary_psd::enumerate_f1n;

    #[test]
    fn rhs_rounding() {
        assert_eq!(kgonal_rhs(5), -2.0);
        assert_eq!(kgonal_rhs(7), -3.0);
        assert_eq!(kgonal_rhs(9), -4.0);
    }

    #[test]
    fn balanced_point_is_tight() {
        let x = TernaryVector::new(vec![1, 1, -1, -1, 0]).unwrap();
        let cut = make_cut(&[0, 1, 2, 3, 4], &[1.0; 5]);
        let p = LiftedPoint::from_ternary(&x);
        assert_eq!(cut.lhs(&p), -2.0);
        assert_eq!(cut.violation(&p), 0.0);
    }

    #[test]
    fn counts_and_shape() {
        let all = all_kgonal(6, 5);
        assert_eq!(all.len(), 6 * 16);
        for c in &all {
            assert_eq!(c.big_x_coeffs.len(), 10);
            assert!(c.big_x_coeffs.iter().all(|e| e.2.abs() == 1.0));
            assert_eq!(c.rhs, -2.0);
        }
        let keys: HashSet<_> = all.iter().map(|c| c.key()).collect();
        assert_eq!(keys.len(), all.len());
    }

    #[test]
    fn k_validation() {
        let xs = SymMatrix::identity(4);
        assert!(matches!(
            separate_kgonal(&xs, 5, 1, 1e-3, 10, 0, &KGonalSchedule::default()),
            Err(Error::KTooLarge { k: 5, n: 4 })
        ));
        assert!(separate_kgonal(&SymMatrix::identity(6), 6, 1, 1e-3, 10, 0, &KGonalSchedule::default()).is_err());
    }

    #[test]
    fn valid_on_rank_one_points_n7() {
        let pts = enumerate_f1n(7).unwrap();
        for k in [5, 7] {
            for c in all_kgonal(7, k) {
                for p in &pts {
                    assert!(cut_valid_on_ternary(&c, &p.x));
                }
            }
        }
    }

    #[test]
    fn sa_finds_violation_at_uniform_point() {
        // unit diagonal, off-diagonal −0.25: the all-plus pentagon sums to −2.5
        let xs = SymMatrix::from_upper_fn(7, |i, j| if i == j { 1.0 } else { -0.25 });
        let r = separate_kgonal(&xs, 5, 20, 1e-3, 100, 3, &KGonalSchedule::default()).unwrap();
        assert!(!r.cuts.is_empty());
        let p = LiftedPoint::new(vec![0.0; 7], xs.clone());
        for (c, v) in &r.cuts {
            assert!(*v > 1e-3);
            assert!((c.violation(&p) - v).abs() < 1e-12);
        }
        let ex = separate_kgonal_exhaustive(&xs, 5, 1e-3).unwrap();
        assert!((ex.max_violation - r.max_violation).abs() < 1e-12);
    }

    #[test]
    fn no_cuts_on_ternary_psd() {
        for p in enumerate_f1n(6).unwrap().iter().step_by(7) {
            let xs = LiftedPoint::from_ternary(&p.x).big_x;
            let r = separate_kgonal(&xs, 5, 5, 1e-6, 10, 1, &KGonalSchedule::default()).unwrap();
            assert!(r.cuts.is_empty());
            assert!(separate_kgonal_exhaustive(&xs, 5, 1e-9).unwrap().cuts.is_empty());
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let xs = SymMatrix::from_upper_fn(8, |i, j| if i == j { 1.0 } else { -0.2 + 0.01 * (i + j) as f64 });
        let a = separate_kgonal(&xs, 5, 10, 1e-3, 100, 9, &KGonalSchedule::default()).unwrap();
        let b = separate_kgonal(&xs, 5, 10, 1e-3, 100, 9, &KGonalSchedule::default()).unwrap();
        assert_eq!(a.cut_list(), b.cut_list());
    }
}
