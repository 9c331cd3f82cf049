//! Exhaustively separable families: triangle, pair, RLT and split.

use super::{finish_report, Cut, CutFamily, SeparationReport};
use crate::problem::SymMatrix;

/// Sign patterns (s_ij, s_ik, s_jk) of the four triangle inequalities.
const TRIANGLE_SIGNS: [[f64; 3]; 4] =
    [[1.0, 1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]];

/// (X_ij sign, x_i sign, x_j sign) of the four McCormick inequalities, rhs −1.
const RLT_SIGNS: [[f64; 3]; 4] =
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

/// (X_ij coefficient, x_i sign, x_j sign) of the four split inequalities, rhs 0.
const SPLIT_SIGNS: [[f64; 3]; 4] =
    [[2.0, 1.0, 1.0], [2.0, -1.0, -1.0], [-2.0, 1.0, -1.0], [-2.0, -1.0, 1.0]];

fn triangle_cut(i: usize, j: usize, k: usize, s: &[f64; 3]) -> Cut {
    Cut::new(CutFamily::Triangle, vec![], vec![(i, j, s[0]), (i, k, s[1]), (j, k, s[2])], -1.0)
}

fn pair_cut(i: usize, j: usize, sign: f64) -> Cut {
    // X_ii − sign·X_ij ≥ 0
    Cut::new(CutFamily::Pair, vec![], vec![(i, i, 1.0), (i, j, -sign)], 0.0)
}

fn rlt_cut(i: usize, j: usize, s: &[f64; 3]) -> Cut {
    Cut::new(CutFamily::Rlt, vec![(i, s[1]), (j, s[2])], vec![(i, j, s[0])], -1.0)
}

fn split_cut(i: usize, j: usize, s: &[f64; 3]) -> Cut {
    Cut::new(
        CutFamily::Split,
        vec![(i, s[1]), (j, s[2])],
        vec![(i, i, 1.0), (j, j, 1.0), (i, j, s[0])],
        0.0,
    )
}

/// Checks all 4·C(n,3) triangle inequalities at X.
pub fn separate_triangle(xs: &SymMatrix, tol: f64, cap: usize) -> SeparationReport {
    let n = xs.dim();
    let mut found = Vec::new();
    let mut examined = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let xij = xs.get(i, j);
            for k in (j + 1)..n {
                let (xik, xjk) = (xs.get(i, k), xs.get(j, k));
                for s in &TRIANGLE_SIGNS {
                    examined += 1;
                    let viol = -1.0 - (s[0] * xij + s[1] * xik + s[2] * xjk);
                    if viol > tol {
                        found.push((triangle_cut(i, j, k, s), viol));
                    }
                }
            }
        }
    }
    finish_report(found, examined, cap)
}

/// Checks X_ij ≤ X_ii and X_ij ≥ −X_ii for all ordered pairs i ≠ j.
pub fn separate_pair(xs: &SymMatrix, _x: &[f64], tol: f64, cap: usize) -> SeparationReport {
    let n = xs.dim();
    let mut found = Vec::new();
    let mut examined = 0;
    for i in 0..n {
        let xii = xs.get(i, i);
        for j in 0..n {
            if i == j {
                continue;
            }
            for sign in [1.0, -1.0] {
                examined += 1;
                let viol = -(xii - sign * xs.get(i, j));
                if viol > tol {
                    found.push((pair_cut(i, j, sign), viol));
                }
            }
        }
    }
    finish_report(found, examined, cap)
}

/// Checks all 4·C(n,2) McCormick inequalities.
pub fn separate_rlt(xs: &SymMatrix, x: &[f64], tol: f64, cap: usize) -> SeparationReport {
    let n = xs.dim();
    let mut found = Vec::new();
    let mut examined = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for s in &RLT_SIGNS {
                examined += 1;
                let viol = -1.0 - (s[0] * xs.get(i, j) + s[1] * x[i] + s[2] * x[j]);
                if viol > tol {
                    found.push((rlt_cut(i, j, s), viol));
                }
            }
        }
    }
    finish_report(found, examined, cap)
}

/// Checks all 4·C(n,2) split inequalities.
pub fn separate_split(xs: &SymMatrix, x: &[f64], tol: f64, cap: usize) -> SeparationReport {
    let n = xs.dim();
    let mut found = Vec::new();
    let mut examined = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = xs.get(i, i) + xs.get(j, j);
            for s in &SPLIT_SIGNS {
                examined += 1;
                let viol = -(d + s[0] * xs.get(i, j) + s[1] * x[i] + s[2] * x[j]);
                if viol > tol {
                    found.push((split_cut(i, j, s), viol));
                }
            }
        }
    }
    finish_report(found, examined, cap)
}

pub(super) fn all_triangle(n: usize) -> Vec<Cut> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                v.extend(TRIANGLE_SIGNS.iter().map(|s| triangle_cut(i, j, k, s)));
            }
        }
    }
    v
}

pub(super) fn all_pair(n: usize) -> Vec<Cut> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v.push(pair_cut(i, j, 1.0));
                v.push(pair_cut(i, j, -1.0));
            }
        }
    }
    v
}

pub(super) fn all_rlt(n: usize) -> Vec<Cut> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            v.extend(RLT_SIGNS.iter().map(|s| rlt_cut(i, j, s)));
        }
    }
    v
}

pub(super) fn all_split(n: usize) -> Vec<Cut> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            v.extend(SPLIT_SIGNS.iter().map(|s| split_cut(i, j, s)));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::LiftedPoint;
    use crate::ternary_psd::enumerate_f1n;

    fn offdiag(n: usize, v: f64, d: f64) -> SymMatrix {
        SymMatrix::from_upper_fn(n, |i, j| if i == j { d } else { v })
    }

    #[test]
    fn identity_has_no_triangle_cuts() {
        assert!(separate_triangle(&SymMatrix::identity(5), 1e-3, 100).cuts.is_empty());
    }

    #[test]
    fn all_minus_half_violates_plus_triangle() {
        let r = separate_triangle(&offdiag(3, -0.5, 1.0), 1e-3, 100);
        assert_eq!(r.cuts.len(), 1);
        assert!((r.max_violation - 0.5).abs() < 1e-12);
        assert_eq!(r.examined, 4);
    }

    #[test]
    fn pair_examples() {
        let r = separate_pair(&SymMatrix::from_upper_fn(3, |i, j| if i == j { 1.0 } else { 0.3 }), &[0.0; 3], 1e-3, 100);
        assert!(r.cuts.is_empty());
        assert_eq!(r.examined, 2 * 3 * 2);
        let mut m = SymMatrix::identity(2);
        m.set(0, 0, 0.2);
        m.set(0, 1, 0.5);
        let r = separate_pair(&m, &[0.0; 2], 1e-3, 100);
        assert!((r.max_violation - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rlt_examples() {
        let mut m = SymMatrix::identity(2);
        m.set(0, 1, 1.0);
        assert!(separate_rlt(&m, &[-1.0, -1.0], 1e-3, 10).cuts.is_empty());
        m.set(0, 1, -0.5);
        let r = separate_rlt(&m, &[-1.0, -1.0], 1e-3, 10);
        // X12 + x1 + x2 = -2.5 against the bound -1
        assert_eq!(r.cuts.len(), 1);
        assert!((r.max_violation - 1.5).abs() < 1e-12);
    }

    #[test]
    fn split_examples() {
        assert!(separate_split(&SymMatrix::identity(2), &[0.0; 2], 1e-3, 10).cuts.is_empty());
        let mut m = SymMatrix::identity(2);
        m.set(0, 0, 0.1);
        m.set(1, 1, 0.1);
        m.set(0, 1, -0.5);
        let r = separate_split(&m, &[0.0; 2], 1e-3, 10);
        assert!((r.max_violation - 0.8).abs() < 1e-12);
        assert_eq!(r.cuts[0].0.big_x_coeffs.iter().find(|c| c.0 != c.1).unwrap().2, 2.0);
    }

    #[test]
    fn rank_one_points_are_clean() {
        for p in enumerate_f1n(5).unwrap() {
            let lp = LiftedPoint::from_ternary(&p.x);
            assert!(separate_triangle(&lp.big_x, 1e-9, 10).cuts.is_empty());
            assert!(separate_pair(&lp.big_x, &lp.x, 1e-9, 10).cuts.is_empty());
            assert!(separate_rlt(&lp.big_x, &lp.x, 1e-9, 10).cuts.is_empty());
            assert!(separate_split(&lp.big_x, &lp.x, 1e-9, 10).cuts.is_empty());
        }
    }

    #[test]
    fn separators_find_every_violated_enumerated_cut() {
        // independent oracle: evaluate every enumerated cut directly
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..30 {
            let n = 5;
            let x: Vec<f64> = (0..n).map(|_| next()).collect();
            let xs = SymMatrix::from_upper_fn(n, |i, j| if i == j { next().abs() } else { next() });
            let p = LiftedPoint::new(x.clone(), xs.clone());
            let tol = 1e-3;
            let cases: [(Vec<Cut>, SeparationReport); 4] = [
                (all_triangle(n), separate_triangle(&xs, tol, usize::MAX)),
                (all_pair(n), separate_pair(&xs, &x, tol, usize::MAX)),
                (all_rlt(n), separate_rlt(&xs, &x, tol, usize::MAX)),
                (all_split(n), separate_split(&xs, &x, tol, usize::MAX)),
            ];
            for (all, rep) in cases {
                let expected = all.iter().filter(|c| c.violation(&p) > tol).count();
                assert_eq!(rep.cuts.len(), expected);
                assert_eq!(rep.examined, all.len());
                for (c, v) in &rep.cuts {
                    assert!((c.violation(&p) - v).abs() < 1e-12);
                }
            }
        }
    }
}
