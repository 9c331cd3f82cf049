//! Seeded random instance generators.
//!
//! Draw orders (all from one [`Rng`] seeded with the instance seed):
//!
//! * Type-1: μ (⌊pn/100⌋ values in [−1,0], then the rest in [0,1]), the basis
//!   matrix column by column with entries in [−1,1], then c in [−1,1].
//! * Type-2: μ (first ⌊n/2⌋ zero without draws; each later entry one
//!   Bernoulli(p/100) draw, followed by a U[0,1] draw on success), the basis
//!   matrix, then c.
//! * Type-3: lower triangle row by row, diagonal included; each entry one
//!   Bernoulli(p/100) draw, followed by a U[−1,1] draw on success; then c.
//! * Ratio: A's lower triangle, B's lower triangle (Bernoulli(d/100), then an
//!   integer in [−50,50] on success), then a, b and a0.
//!
//! A basis column whose Gram–Schmidt residual norm falls below 1e−12 is
//! redrawn in place.

use crate::error::{Error, Result};
use crate::problem::{LinearConstraint, RatioInstance, SymMatrix, TqpInstance};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Type1,
    Type2,
    Type3,
    QutoType1,
    QutoType2,
    QutoType3,
    Ratio,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Type1 => "type1",
            GeneratorKind::Type2 => "type2",
            GeneratorKind::Type3 => "type3",
            GeneratorKind::QutoType1 => "quto-type1",
            GeneratorKind::QutoType2 => "quto-type2",
            GeneratorKind::QutoType3 => "quto-type3",
            GeneratorKind::Ratio => "ratio",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "type1" => GeneratorKind::Type1,
            "type2" => GeneratorKind::Type2,
            "type3" => GeneratorKind::Type3,
            "quto-type1" => GeneratorKind::QutoType1,
            "quto-type2" => GeneratorKind::QutoType2,
            "quto-type3" => GeneratorKind::QutoType3,
            "ratio" => GeneratorKind::Ratio,
            _ => return None,
        })
    }
}

/// What to generate. `p_or_d` is the Type-k percentage or the ratio density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub p_or_d: f64,
    pub seed: u64,
}

fn check(n: usize, p: f64, min_n: usize) -> Result<()> {
    if n < min_n {
        return Err(Error::DimensionMismatch { expected: min_n, got: n });
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Parse { location: "p".into(), message: format!("percentage {p} outside [0, 100]") });
    }
    Ok(())
}

/// Orthonormal columns from a random matrix (modified Gram–Schmidt, two passes).
fn random_orthonormal(n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        loop {
            let mut v = cols[k].clone();
            for _ in 0..2 {
                for b in &basis {
                    let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm >= 1e-12 {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
                break;
            }
            cols[k] = (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        }
    }
    basis
}

fn spectral(mu: &[f64], v: &[Vec<f64>]) -> SymMatrix {
    let n = mu.len();
    SymMatrix::from_upper_fn(n, |i, j| (0..n).map(|k| mu[k] * v[k][i] * v[k][j]).sum())
}

fn linear_terms(n: usize, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect()
}

fn balanced(q: SymMatrix, c: Vec<f64>) -> TqpInstance {
    let n = q.dim();
    TqpInstance::new(q, c, vec![LinearConstraint { a: vec![1.0; n], b: 0.0 }]).expect("dimensions agree")
}

fn type1_data(n: usize, p: f64, seed: u64) -> Result<(SymMatrix, Vec<f64>)> {
    check(n, p, 1)?;
    let mut rng = Rng::new(seed);
    let neg = (p * n as f64 / 100.0).floor() as usize;
    let mu: Vec<f64> =
        (0..n).map(|i| if i < neg { rng.uniform_range(-1.0, 0.0) } else { rng.uniform_range(0.0, 1.0) }).collect();
    let v = random_orthonormal(n, &mut rng);
    let c = linear_terms(n, &mut rng);
    Ok((spectral(&mu, &v), c))
}

fn type2_data(n: usize, p: f64, seed: u64) -> Result<(SymMatrix, Vec<f64>)> {
    check(n, p, 2)?;
    let mut rng = Rng::new(seed);
    let mu: Vec<f64> = (0..n)
        .map(|i| {
            if i < n / 2 || !rng.bernoulli_percent(p) {
                0.0
            } else {
                rng.uniform()
            }
        })
        .collect();
    let v = random_orthonormal(n, &mut rng);
    let c = linear_terms(n, &mut rng);
    Ok((spectral(&mu, &v), c))
}

fn sparse_lower(n: usize, p: f64, rng: &mut Rng, mut draw: impl FnMut(&mut Rng) -> f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            if rng.bernoulli_percent(p) {
                m.set(i, j, draw(rng));
            }
        }
    }
    m
}

fn type3_data(n: usize, p: f64, seed: u64) -> Result<(SymMatrix, Vec<f64>)> {
    check(n, p, 1)?;
    let mut rng = Rng::new(seed);
    let q = sparse_lower(n, p, &mut rng, |r| r.uniform_range(-1.0, 1.0));
    let c = linear_terms(n, &mut rng);
    Ok((q, c))
}

/// Spectral Q with ⌊pn/100⌋ eigenvalues in [−1,0]; constraint 𝟙ᵀx = 0.
pub fn gen_type1(n: usize, p: f64, seed: u64) -> Result<TqpInstance> {
    let (q, c) = type1_data(n, p, seed)?;
    Ok(balanced(q, c))
}

/// PSD Q of rank at most ⌈n/2⌉; constraint 𝟙ᵀx = 0.
pub fn gen_type2(n: usize, p: f64, seed: u64) -> Result<TqpInstance> {
    let (q, c) = type2_data(n, p, seed)?;
    Ok(balanced(q, c))
}

/// Sparse Q with density p; constraint 𝟙ᵀx = 0.
pub fn gen_type3(n: usize, p: f64, seed: u64) -> Result<TqpInstance> {
    let (q, c) = type3_data(n, p, seed)?;
    Ok(balanced(q, c))
}

/// Type-k data with |diag(Q)| and no constraint.
pub fn gen_quto(kind: GeneratorKind, n: usize, p: f64, seed: u64) -> Result<TqpInstance> {
    let (mut q, c) = match kind {
        GeneratorKind::Type1 | GeneratorKind::QutoType1 => type1_data(n, p, seed)?,
        GeneratorKind::Type2 | GeneratorKind::QutoType2 => type2_data(n, p, seed)?,
        GeneratorKind::Type3 | GeneratorKind::QutoType3 => type3_data(n, p, seed)?,
        GeneratorKind::Ratio => return Err(Error::WrongVariant("ratio is not a QUTO generator".into())),
    };
    for i in 0..n {
        q.set(i, i, q.get(i, i).abs());
    }
    TqpInstance::unconstrained(q, c)
}

/// Integral ratio instance with g(x) ≥ 1 on every ternary point.
pub fn gen_ratio(n: usize, d: f64, seed: u64) -> Result<RatioInstance> {
    check(n, d, 1)?;
    let mut rng = Rng::new(seed);
    let int = |r: &mut Rng| r.int_range(-50, 50) as f64;
    let a_mat = sparse_lower(n, d, &mut rng, int);
    let b_mat = sparse_lower(n, d, &mut rng, int);
    let a: Vec<f64> = (0..n).map(|_| int(&mut rng)).collect();
    let b: Vec<f64> = (0..n).map(|_| int(&mut rng)).collect();
    let a0 = int(&mut rng);
    let mut b0 = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    for i in 0..n {
        b0 += b_mat.get(i, i).abs();
        for j in 0..i {
            b0 += 2.0 * b_mat.get(i, j).abs();
        }
    }
    RatioInstance::new(a_mat, a, a0, b_mat, b, b0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::TernaryVector;

    fn sorted_eigs(q: &SymMatrix) -> Vec<f64> {
        let mut e: Vec<f64> = q.to_dmatrix().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn type1_spectrum() {
        for (n, p, seed) in [(6, 25.0, 1), (10, 50.0, 2), (9, 75.0, 3)] {
            let inst = gen_type1(n, p, seed).unwrap();
            let mut rng = Rng::new(seed);
            let neg = (p * n as f64 / 100.0).floor() as usize;
            let mut mu: Vec<f64> = (0..n)
                .map(|i| if i < neg { rng.uniform_range(-1.0, 0.0) } else { rng.uniform_range(0.0, 1.0) })
                .collect();
            mu.sort_by(f64::total_cmp);
            let e = sorted_eigs(&inst.q);
            for (a, b) in e.iter().zip(&mu) {
                assert!((a - b).abs() < 1e-8);
            }
            assert_eq!(e.iter().filter(|&&v| v < 0.0).count(), neg);
            assert!(inst.is_balanced());
            assert_eq!(inst, gen_type1(n, p, seed).unwrap());
        }
    }

    #[test]
    fn type2_rank_and_psd() {
        for seed in 0..5 {
            let inst = gen_type2(9, 75.0, seed).unwrap();
            let e = sorted_eigs(&inst.q);
            assert!(e[0] > -1e-10);
            assert!(e.iter().filter(|v| v.abs() > 1e-9).count() <= 5);
        }
    }

    #[test]
    fn type3_density() {
        assert_eq!(gen_type3(5, 0.0, 1).unwrap().q, SymMatrix::zeros(5));
        let full = gen_type3(8, 100.0, 1).unwrap();
        assert!(full.q.data().iter().all(|&v| v != 0.0));
        let big = gen_type3(200, 50.0, 3).unwrap();
        let nz = (0..200).flat_map(|i| (0..=i).map(move |j| (i, j))).filter(|&(i, j)| big.q.get(i, j) != 0.0).count();
        let dens = 100.0 * nz as f64 / (200.0 * 201.0 / 2.0);
        assert!((dens - 50.0).abs() < 5.0, "{dens}");
    }

    #[test]
    fn quto_variant() {
        for kind in [GeneratorKind::Type1, GeneratorKind::Type2, GeneratorKind::Type3] {
            let q = gen_quto(kind, 7, 50.0, 4).unwrap();
            assert!(q.constraints.is_empty());
            assert!(q.q.diag().iter().all(|&d| d >= 0.0));
            let base = match kind {
                GeneratorKind::Type1 => gen_type1(7, 50.0, 4),
                GeneratorKind::Type2 => gen_type2(7, 50.0, 4),
                _ => gen_type3(7, 50.0, 4),
            }
            .unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    if i != j {
                        assert_eq!(q.q.get(i, j), base.q.get(i, j));
                    }
                }
            }
            assert_eq!(q.c, base.c);
        }
    }

    #[test]
    fn ratio_denominator_at_least_one() {
        for (n, d) in [(6, 25.0), (8, 50.0), (7, 75.0)] {
            let r = gen_ratio(n, d, 5).unwrap();
            for k in 0..3u64.pow(n as u32) {
                assert!(r.denominator(&TernaryVector::from_index(k, n)).unwrap() >= 1.0);
            }
            assert!(r.a_mat.data().iter().chain(r.a.iter()).all(|v| v.fract() == 0.0 && v.abs() <= 50.0));
        }
        let r = gen_ratio(4, 0.0, 1).unwrap();
        assert_eq!(r.b_mat, SymMatrix::zeros(4));
        assert_eq!(r.b0, 1.0 + r.b.iter().map(|v| v.abs()).sum::<f64>());
    }

    #[test]
    fn invalid_percentages() {
        assert!(gen_type1(5, 120.0, 0).is_err());
        assert!(gen_type2(1, 50.0, 0).is_err());
        assert!(gen_ratio(5, -1.0, 0).is_err());
    }
}
