//! Positive semidefinite matrices with entries in {-1, 0, 1}: recognition by
//! triangle and pair inequalities, block decomposition, enumeration of the
//! rank-one lifts and the binary lifting.

use crate::error::{Error, Result};
use crate::problem::{SymMatrix, TernaryVector};

/// Symmetric n×n matrix with entries in {-1, 0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl TernaryMatrix {
    pub fn new(n: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        for (index, &v) in entries.iter().enumerate() {
            if !(-1..=1).contains(&v) {
                return Err(Error::NotTernary { index, value: v as i64 });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    let deviation = (entries[i * n + j] - entries[j * n + i]).abs() as f64;
                    return Err(Error::NotSymmetric { i, j, deviation });
                }
            }
        }
        Ok(TernaryMatrix { n, entries })
    }

    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            e.extend_from_slice(r);
        }
        Self::new(n, e)
    }

    pub fn zeros(n: usize) -> Self {
        TernaryMatrix { n, entries: vec![0; n * n] }
    }

    /// The outer product xxᵀ.
    pub fn outer(x: &TernaryVector) -> Self {
        let n = x.len();
        let v = x.values();
        let mut entries = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = v[i] * v[j];
            }
        }
        TernaryMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i8) {
        assert!((-1..=1).contains(&v));
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn to_sym(&self) -> SymMatrix {
        SymMatrix::from_upper_fn(self.n, |i, j| self.get(i, j) as f64)
    }
}

/// A ternary x with its lift X = xxᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePoint {
    pub x: TernaryVector,
    pub big_x: TernaryMatrix,
}

/// x = z1 − z2 with z1, z2 binary and disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLift {
    pub z1: Vec<u8>,
    pub z2: Vec<u8>,
}

/// Checks all triangle inequalities over i<j<k and the pair inequalities
/// |X_ij| ≤ X_ii.
pub fn satisfies_ternary_psd_inequalities(x: &TernaryMatrix) -> bool {
    let n = x.dim();
    for i in 0..n {
        let xii = x.get(i, i);
        if xii < 0 {
            return false;
        }
        for j in 0..n {
            if i != j && (x.get(i, j) > xii || x.get(i, j) < -xii) {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let xij = x.get(i, j) as i32;
            for k in (j + 1)..n {
                let xik = x.get(i, k) as i32;
                let xjk = x.get(j, k) as i32;
                if xij + xik + xjk < -1
                    || -xij + xik - xjk < -1
                    || xij - xik - xjk < -1
                    || -xij - xik + xjk < -1
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Splits an accepted matrix into rank-one terms with disjoint supports.
/// Each factor starts with +1 at its lowest support index.
pub fn decompose_psd(x: &TernaryMatrix) -> Result<Vec<TernaryVector>> {
    if !satisfies_ternary_psd_inequalities(x) {
        return Err(Error::NotTernaryPsd);
    }
    let n = x.dim();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] || x.get(i, i) == 0 {
            continue;
        }
        let mut v = vec![0i8; n];
        for j in i..n {
            let s = x.get(i, j);
            if s != 0 {
                v[j] = s;
                assigned[j] = true;
            }
        }
        out.push(TernaryVector::new(v).expect("entries copied from a ternary matrix"));
    }
    let mut rebuilt = vec![0i32; n * n];
    for v in &out {
        let v = v.values();
        for i in 0..n {
            for j in 0..n {
                rebuilt[i * n + j] += (v[i] * v[j]) as i32;
            }
        }
    }
    let ok = (0..n * n).all(|k| rebuilt[k] == x.entries[k] as i32);
    if !ok {
        return Err(Error::NotTernaryPsd);
    }
    Ok(out)
}

/// Whether [[1, xᵀ], [x, X]] is PSD, given diag(X) = |x|.
pub fn is_rank_one_extension(x: &TernaryVector, big_x: &TernaryMatrix) -> bool {
    let n = x.len();
    if big_x.dim() != n {
        return false;
    }
    let mut border = TernaryMatrix::zeros(n + 1);
    border.set(0, 0, 1);
    for i in 0..n {
        border.set(0, i + 1, x.get(i));
        for j in i..n {
            border.set(i + 1, j + 1, big_x.get(i, j));
        }
    }
    if !satisfies_ternary_psd_inequalities(&border) {
        return false;
    }
    (0..n).all(|i| (0..n).all(|j| big_x.get(i, j) == x.get(i) * x.get(j)))
}

/// 1 + Σ_k C(n,k)·2^(k−1).
pub fn f1n_cardinality(n: usize) -> u64 {
    let mut total = 1u64;
    let mut binom = 1u64;
    for k in 1..=n {
        binom = binom * (n - k + 1) as u64 / k as u64;
        total += binom << (k - 1);
    }
    total
}

pub const ENUMERATION_LIMIT: usize = 12;

/// All distinct xxᵀ over ternary x, each with its sign-canonical x.
pub fn enumerate_f1n(n: usize) -> Result<Vec<RankOnePoint>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::DimensionTooLarge { n, limit: ENUMERATION_LIMIT });
    }
    let total = 3u64.pow(n as u32);
    let mut out = Vec::with_capacity(f1n_cardinality(n) as usize);
    for code in 0..total {
        let x = TernaryVector::from_index(code, n);
        let first = x.values().iter().find(|&&v| v != 0);
        if matches!(first, Some(&-1)) {
            continue;
        }
        let big_x = TernaryMatrix::outer(&x);
        out.push(RankOnePoint { x, big_x });
    }
    Ok(out)
}

/// Writes x1x1ᵀ + x2x2ᵀ (disjoint supports) as ½ u uᵀ + ½ w wᵀ with ternary u, w.
pub fn rank2_convex_split(
    x1: &TernaryVector,
    x2: &TernaryVector,
) -> Result<[(f64, TernaryVector); 2]> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch { expected: x1.len(), got: x2.len() });
    }
    let n = x1.len();
    let mut u = vec![0i8; n];
    let mut w = vec![0i8; n];
    for i in 0..n {
        let (a, b) = (x1.get(i), x2.get(i));
        if a != 0 && b != 0 {
            return Err(Error::OverlappingSupports(i));
        }
        u[i] = a + b;
        w[i] = a - b;
    }
    Ok([
        (0.5, TernaryVector::new(u).expect("disjoint sum is ternary")),
        (0.5, TernaryVector::new(w).expect("disjoint difference is ternary")),
    ])
}

pub fn binary_lift(x: &TernaryVector) -> BinaryLift {
    BinaryLift {
        z1: x.values().iter().map(|&v| (v > 0) as u8).collect(),
        z2: x.values().iter().map(|&v| (v < 0) as u8).collect(),
    }
}

pub fn binary_unlift(l: &BinaryLift) -> TernaryVector {
    TernaryVector::new(l.z1.iter().zip(&l.z2).map(|(&a, &b)| a as i8 - b as i8).collect())
        .expect("difference of binaries is ternary")
}

/// Z11 + Z22 − Z12 − Z21, symmetrized.
pub fn lifted_projection(
    z11: &SymMatrix,
    z12: &[f64],
    z21: &[f64],
    z22: &SymMatrix,
) -> Result<SymMatrix> {
    let n = z11.dim();
    for len in [z22.dim() * z22.dim(), z12.len(), z21.len()] {
        if len != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: len });
        }
    }
    Ok(SymMatrix::from_upper_fn(n, |i, j| {
        let off = 0.5 * (z12[i * n + j] + z12[j * n + i] + z21[i * n + j] + z21[j * n + i]);
        z11.get(i, j) + z22.get(i, j) - off
    }))
}

/// Eigenvalue test used as an independent oracle: λ_min ≥ −1e−9.
pub fn is_psd_numeric(m: &SymMatrix) -> bool {
    m.min_eigenvalue() >= -1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tv(v: &[i8]) -> TernaryVector {
        TernaryVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_is_accepted() {
        let mut i3 = TernaryMatrix::zeros(3);
        for i in 0..3 {
            i3.set(i, i, 1);
        }
        assert!(satisfies_ternary_psd_inequalities(&i3));
    }

    #[test]
    fn pair_violation_rejected() {
        let x = TernaryMatrix::from_rows(&[&[1, 1, 0], &[1, 0, 0], &[0, 0, 1]]).unwrap();
        assert!(!satisfies_ternary_psd_inequalities(&x));
    }

    #[test]
    fn triangle_violation_rejected() {
        let x = TernaryMatrix::from_rows(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]]).unwrap();
        assert!(!satisfies_ternary_psd_inequalities(&x));
        let det = x.to_sym().to_dmatrix().determinant();
        assert!((det + 4.0).abs() < 1e-9);
        assert!(!is_psd_numeric(&x.to_sym()));
    }

    #[test]
    fn decompose_examples() {
        assert!(decompose_psd(&TernaryMatrix::zeros(3)).unwrap().is_empty());
        let x = tv(&[1, -1, 0]);
        assert_eq!(decompose_psd(&TernaryMatrix::outer(&x)).unwrap(), vec![x.clone()]);
        let mut m = TernaryMatrix::outer(&x);
        m.set(2, 2, 1);
        let parts = decompose_psd(&m).unwrap();
        assert_eq!(parts, vec![tv(&[1, -1, 0]), tv(&[0, 0, 1])]);
    }

    #[test]
    fn decompose_rejects_non_psd() {
        let x = TernaryMatrix::from_rows(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]]).unwrap();
        assert_eq!(decompose_psd(&x), Err(Error::NotTernaryPsd));
    }

    #[test]
    fn rank_one_extension_examples() {
        assert!(is_rank_one_extension(&tv(&[0, 0]), &TernaryMatrix::zeros(2)));
        let ones = TernaryMatrix::from_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert!(is_rank_one_extension(&tv(&[1, 1]), &ones));
        let flip = TernaryMatrix::from_rows(&[&[1, -1], &[-1, 1]]).unwrap();
        assert!(!is_rank_one_extension(&tv(&[1, 1]), &flip));
    }

    #[test]
    fn enumeration_counts() {
        let expected = [2, 5, 14, 41, 122, 365];
        for (n, &e) in (1..=6).zip(expected.iter()) {
            assert_eq!(enumerate_f1n(n).unwrap().len(), e);
            assert_eq!(f1n_cardinality(n), e as u64);
        }
        assert!(matches!(enumerate_f1n(13), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn enumeration_matrices_are_distinct() {
        let pts = enumerate_f1n(4).unwrap();
        let set: std::collections::HashSet<_> = pts.iter().map(|p| p.big_x.clone()).collect();
        assert_eq!(set.len(), pts.len());
    }

    fn outer_sum(terms: &[(f64, TernaryVector)]) -> Vec<f64> {
        let n = terms[0].1.len();
        let mut m = vec![0.0; n * n];
        for (w, v) in terms {
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += w * (v.get(i) * v.get(j)) as f64;
                }
            }
        }
        m
    }

    #[test]
    fn rank2_split_examples() {
        let cases = [
            (tv(&[1, 0]), tv(&[0, 1])),
            (tv(&[1, 0]), tv(&[0, 0])),
            (tv(&[1, -1, 0, 0]), tv(&[0, 0, 1, 1])),
        ];
        for (a, b) in cases {
            let split = rank2_convex_split(&a, &b).unwrap();
            let lhs = outer_sum(&split);
            let rhs = outer_sum(&[(1.0, a.clone()), (1.0, b.clone())]);
            assert_eq!(lhs, rhs);
        }
        let degenerate = rank2_convex_split(&tv(&[1, 0]), &tv(&[0, 0])).unwrap();
        assert_eq!(degenerate[0].1, degenerate[1].1);
        assert_eq!(
            rank2_convex_split(&tv(&[1, 1]), &tv(&[0, -1])),
            Err(Error::OverlappingSupports(1))
        );
    }

    #[test]
    fn lift_examples() {
        let l = binary_lift(&tv(&[1, -1, 0]));
        assert_eq!(l.z1, vec![1, 0, 0]);
        assert_eq!(l.z2, vec![0, 1, 0]);
        let z = binary_lift(&tv(&[0, 0]));
        assert_eq!(z, BinaryLift { z1: vec![0, 0], z2: vec![0, 0] });
    }

    #[test]
    fn projection_examples() {
        let zero = SymMatrix::zeros(2);
        let p = lifted_projection(&zero, &[0.0; 4], &[0.0; 4], &zero).unwrap();
        assert_eq!(p, zero);
        let p = lifted_projection(&SymMatrix::identity(2), &[0.0; 4], &[0.0; 4], &zero).unwrap();
        assert_eq!(p, SymMatrix::identity(2));

        // rank-one lift of x = (1,-1) through z = (z1; z2)
        let x = tv(&[1, -1]);
        let l = binary_lift(&x);
        let z: Vec<f64> = l.z1.iter().chain(&l.z2).map(|&v| v as f64).collect();
        let n = 2;
        let block = |r0: usize, c0: usize| -> Vec<f64> {
            let mut b = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    b[i * n + j] = z[r0 + i] * z[c0 + j];
                }
            }
            b
        };
        let z11 = SymMatrix::new(n, block(0, 0)).unwrap();
        let z22 = SymMatrix::new(n, block(n, n)).unwrap();
        let p = lifted_projection(&z11, &block(0, n), &block(n, 0), &z22).unwrap();
        assert_eq!(p, TernaryMatrix::outer(&x).to_sym());
    }

    #[test]
    fn polytope_vertex_is_not_psd() {
        let third = 1.0 / 3.0;
        let m = SymMatrix::from_rows(&[
            vec![third, third, -third],
            vec![third, third, third],
            vec![-third, third, 1.0],
        ])
        .unwrap();
        // triangle and pair inequalities hold
        let (x12, x13, x23) = (m.get(0, 1), m.get(0, 2), m.get(1, 2));
        let tri = [x12 + x13 + x23, -x12 + x13 - x23, x12 - x13 - x23, -x12 - x13 + x23];
        assert!(tri.iter().all(|&v| v >= -1.0 - 1e-12));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(m.get(i, j).abs() <= m.get(i, i) + 1e-12);
                }
            }
        }
        assert!(m.min_eigenvalue() < -1e-6);
    }

    proptest! {
        #[test]
        fn lift_roundtrip(v in prop::collection::vec(-1i8..=1, 0..12)) {
            let x = TernaryVector::new(v).unwrap();
            let l = binary_lift(&x);
            prop_assert!(l.z1.iter().zip(&l.z2).all(|(a, b)| a + b <= 1));
            prop_assert_eq!(binary_unlift(&l), x);
        }

        #[test]
        fn decomposition_reconstructs(parts in prop::collection::vec(0u8..4, 1..8)) {
            // random block assignment: 0 = zero row, otherwise block id; random signs from parity
            let n = parts.len();
            let mut m = TernaryMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    if parts[i] != 0 && parts[i] == parts[j] {
                        let si = if i % 3 == 0 { -1 } else { 1 };
                        let sj = if j % 3 == 0 { -1 } else { 1 };
                        m.set(i, j, si * sj);
                    }
                }
            }
            prop_assert!(satisfies_ternary_psd_inequalities(&m));
            let d = decompose_psd(&m).unwrap();
            let mut support = vec![0; n];
            for v in &d {
                for i in 0..n {
                    if v.get(i) != 0 { support[i] += 1; }
                }
            }
            prop_assert!(support.iter().all(|&c| c <= 1));
            let rank = parts.iter().filter(|&&p| p != 0).collect::<std::collections::HashSet<_>>().len();
            prop_assert_eq!(d.len(), rank);
        }
    }
}
