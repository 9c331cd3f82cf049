//! Valid inequalities for the lifted point (x, X), or (ρ, y, Y) for ratio
//! relaxations, and the separators that find violated ones.

mod families;
mod kgonal;

pub use families::{separate_pair, separate_rlt, separate_split, separate_triangle};
pub use kgonal::{kgonal_rhs, separate_kgonal, separate_kgonal_exhaustive, KGonalSchedule};

use crate::error::{Error, Result};
use crate::problem::{SymMatrix, TernaryVector};
use std::cmp::Ordering;
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    Triangle,
    Pair,
    Rlt,
    Split,
    KGonal(u8),
}

impl CutFamily {
    pub fn name(&self) -> String {
        match self {
            CutFamily::Triangle => "triangle".into(),
            CutFamily::Pair => "pair".into(),
            CutFamily::Rlt => "rlt".into(),
            CutFamily::Split => "split".into(),
            CutFamily::KGonal(k) => format!("kgonal{k}"),
        }
    }
}

/// Σ x_coeffs·x + Σ X_coeffs·X + rho_coeff·ρ ≥ rhs. X coefficients are keyed
/// by (i, j) with i ≤ j and apply to the single entry X_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub x_coeffs: Vec<(usize, f64)>,
    pub big_x_coeffs: Vec<(usize, usize, f64)>,
    pub rho_coeff: f64,
    pub rhs: f64,
}

/// Key identifying a cut up to representation.
pub type CutKey = (CutFamily, Vec<(u32, u32, i64)>, i64, i64);

fn quant(v: f64) -> i64 {
    (v * 1024.0).round() as i64
}

impl Cut {
    pub(crate) fn new(
        family: CutFamily,
        x_coeffs: Vec<(usize, f64)>,
        big_x_coeffs: Vec<(usize, usize, f64)>,
        rhs: f64,
    ) -> Self {
        let big_x_coeffs =
            big_x_coeffs.into_iter().map(|(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) }).collect();
        Cut { family, x_coeffs, big_x_coeffs, rho_coeff: 0.0, rhs }
    }

    pub fn lhs(&self, p: &LiftedPoint) -> f64 {
        let a: f64 = self.x_coeffs.iter().map(|&(i, c)| c * p.x[i]).sum();
        let b: f64 = self.big_x_coeffs.iter().map(|&(i, j, c)| c * p.big_x.get(i, j)).sum();
        a + b + self.rho_coeff * p.scale
    }

    /// rhs − lhs; positive means violated.
    pub fn violation(&self, p: &LiftedPoint) -> f64 {
        self.rhs - self.lhs(p)
    }

    pub fn key(&self) -> CutKey {
        let mut v: Vec<(u32, u32, i64)> = self
            .x_coeffs
            .iter()
            .map(|&(i, c)| (u32::MAX, i as u32, quant(c)))
            .chain(self.big_x_coeffs.iter().map(|&(i, j, c)| (i as u32, j as u32, quant(c))))
            .collect();
        v.sort_unstable();
        (self.family, v, quant(self.rho_coeff), quant(self.rhs))
    }

    /// Indices touched by the cut, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .x_coeffs
            .iter()
            .map(|e| e.0)
            .chain(self.big_x_coeffs.iter().flat_map(|e| [e.0, e.1]))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// A relaxation point: scale is 1 for standard relaxations and ρ for ratio ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub scale: f64,
    pub x: Vec<f64>,
    pub big_x: SymMatrix,
}

impl LiftedPoint {
    pub fn new(x: Vec<f64>, big_x: SymMatrix) -> Self {
        LiftedPoint { scale: 1.0, x, big_x }
    }

    /// (x, xxᵀ) for a ternary x.
    pub fn from_ternary(x: &TernaryVector) -> Self {
        let xf = x.as_f64();
        let n = xf.len();
        let big = SymMatrix::from_upper_fn(n, |i, j| xf[i] * xf[j]);
        LiftedPoint::new(xf, big)
    }

    /// (ρ, ρx, ρxxᵀ).
    pub fn scaled_ternary(x: &TernaryVector, rho: f64) -> Self {
        let p = Self::from_ternary(x);
        LiftedPoint { scale: rho, x: p.x.iter().map(|v| v * rho).collect(), big_x: p.big_x.scaled(rho) }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Divides by the scale so that the point reads as (x, X).
    pub fn normalized(&self) -> LiftedPoint {
        if self.scale == 1.0 || self.scale <= 0.0 {
            return self.clone();
        }
        let s = 1.0 / self.scale;
        LiftedPoint { scale: 1.0, x: self.x.iter().map(|v| v * s).collect(), big_x: self.big_x.scaled(s) }
    }
}

/// Returns the ρ-homogenized form of a cut: a constant rhs r becomes the
/// coefficient −r on ρ. Homogeneous cuts are unchanged.
pub fn scale_for_ratio(c: &Cut) -> Cut {
    let mut out = c.clone();
    if c.rhs != 0.0 {
        out.rho_coeff = c.rho_coeff - c.rhs;
        out.rhs = 0.0;
    }
    out
}

pub fn cut_violation(c: &Cut, p: &LiftedPoint) -> f64 {
    c.violation(p)
}

/// Evaluates the cut at (x, xxᵀ), taking ρ = 1 for homogenized cuts.
pub fn cut_valid_on_ternary(c: &Cut, x: &TernaryVector) -> bool {
    c.violation(&LiftedPoint::from_ternary(x)) <= 1e-12
}

#[derive(Debug, Clone, Default)]
pub struct SeparationReport {
    pub cuts: Vec<(Cut, f64)>,
    pub max_violation: f64,
    pub examined: usize,
}

impl SeparationReport {
    pub fn cut_list(&self) -> Vec<Cut> {
        self.cuts.iter().map(|c| c.0.clone()).collect()
    }
}

fn tie_order(a: &Cut, b: &Cut) -> Ordering {
    a.family.cmp(&b.family).then_with(|| a.key().1.cmp(&b.key().1))
}

/// Sorts by violation descending, ties by (family, indices), and keeps `cap`.
pub(crate) fn finish_report(mut found: Vec<(Cut, f64)>, examined: usize, cap: usize) -> SeparationReport {
    found.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| tie_order(&a.0, &b.0)));
    let max_violation = found.first().map(|c| c.1).unwrap_or(0.0);
    found.truncate(cap);
    SeparationReport { cuts: found, max_violation, examined }
}

/// Combines reports of several families under one cap, dropping duplicates
/// and keys in `seen`.
pub fn merge_reports(
    reports: Vec<SeparationReport>,
    cap: usize,
    seen: &HashSet<CutKey>,
) -> SeparationReport {
    let examined = reports.iter().map(|r| r.examined).sum();
    let mut keys = HashSet::new();
    let mut all = Vec::new();
    for r in reports {
        for (c, v) in r.cuts {
            let k = c.key();
            if !seen.contains(&k) && keys.insert(k) {
                all.push((c, v));
            }
        }
    }
    finish_report(all, examined, cap)
}

/// Parameters shared by every separator call.
#[derive(Debug, Clone, Copy)]
pub struct SeparationContext {
    pub tol: f64,
    pub cap: usize,
    pub seed: u64,
}

/// A cut family separator; `point` is always normalized (scale 1).
pub trait Separator: Send + Sync {
    fn name(&self) -> &'static str;
    fn family(&self) -> CutFamily;
    /// Phase 1 separators are exact and cheap; phase 2 are heuristics.
    fn phase(&self) -> u8;
    fn separate(&self, point: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport;
}

struct Triangle;
struct Pair;
struct Rlt;
struct Split;
struct KGonalSep {
    k: usize,
    runs: usize,
    schedule: KGonalSchedule,
}

impl Separator for Triangle {
    fn name(&self) -> &'static str {
        "triangle"
    }
    fn family(&self) -> CutFamily {
        CutFamily::Triangle
    }
    fn phase(&self) -> u8 {
        1
    }
    fn separate(&self, p: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport {
        separate_triangle(&p.big_x, ctx.tol, ctx.cap)
    }
}

impl Separator for Pair {
    fn name(&self) -> &'static str {
        "pair"
    }
    fn family(&self) -> CutFamily {
        CutFamily::Pair
    }
    fn phase(&self) -> u8 {
        1
    }
    fn separate(&self, p: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport {
        separate_pair(&p.big_x, &p.x, ctx.tol, ctx.cap)
    }
}

impl Separator for Rlt {
    fn name(&self) -> &'static str {
        "rlt"
    }
    fn family(&self) -> CutFamily {
        CutFamily::Rlt
    }
    fn phase(&self) -> u8 {
        1
    }
    fn separate(&self, p: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport {
        separate_rlt(&p.big_x, &p.x, ctx.tol, ctx.cap)
    }
}

impl Separator for Split {
    fn name(&self) -> &'static str {
        "split"
    }
    fn family(&self) -> CutFamily {
        CutFamily::Split
    }
    fn phase(&self) -> u8 {
        1
    }
    fn separate(&self, p: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport {
        separate_split(&p.big_x, &p.x, ctx.tol, ctx.cap)
    }
}

impl Separator for KGonalSep {
    fn name(&self) -> &'static str {
        match self.k {
            5 => "pentagonal",
            7 => "heptagonal",
            _ => "enneagonal",
        }
    }
    fn family(&self) -> CutFamily {
        CutFamily::KGonal(self.k as u8)
    }
    fn phase(&self) -> u8 {
        2
    }
    fn separate(&self, p: &LiftedPoint, ctx: &SeparationContext) -> SeparationReport {
        if self.k > p.dim() {
            return SeparationReport::default();
        }
        separate_kgonal(&p.big_x, self.k, self.runs, ctx.tol, ctx.cap, ctx.seed, &self.schedule)
            .unwrap_or_default()
    }
}

/// Names accepted by [`separator`].
pub const SEPARATOR_NAMES: [&str; 7] =
    ["triangle", "pair", "rlt", "split", "pentagonal", "heptagonal", "enneagonal"];

/// Default SA multistart counts per k.
pub fn default_kgonal_runs(k: usize) -> usize {
    if k == 5 {
        500
    } else {
        1000
    }
}

/// Looks up a separator by name; `runs` overrides the SA multistart count.
pub fn separator(name: &str, runs: Option<usize>) -> Result<Box<dyn Separator>> {
    let kg = |k: usize| -> Box<dyn Separator> {
        Box::new(KGonalSep {
            k,
            runs: runs.unwrap_or_else(|| default_kgonal_runs(k)),
            schedule: KGonalSchedule::default(),
        })
    };
    Ok(match name {
        "triangle" => Box::new(Triangle),
        "pair" => Box::new(Pair),
        "rlt" => Box::new(Rlt),
        "split" => Box::new(Split),
        "pentagonal" | "kgonal5" => kg(5),
        "heptagonal" | "kgonal7" => kg(7),
        "enneagonal" | "kgonal9" => kg(9),
        _ => return Err(Error::UnknownStrategy { kind: "cut family", name: name.to_string() }),
    })
}

/// Every cut of a family for dimension n (k-gonal: all index sets and signs).
pub fn enumerate_family(family: CutFamily, n: usize) -> Vec<Cut> {
    match family {
        CutFamily::Triangle => families::all_triangle(n),
        CutFamily::Pair => families::all_pair(n),
        CutFamily::Rlt => families::all_rlt(n),
        CutFamily::Split => families::all_split(n),
        CutFamily::KGonal(k) => kgonal::all_kgonal(n, k as usize),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ternary_psd::enumerate_f1n;

    #[test]
    fn scaling_triangle_moves_constant_to_rho() {
        let c = Cut::new(
            CutFamily::Triangle,
            vec![],
            vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)],
            -1.0,
        );
        let s = scale_for_ratio(&c);
        assert_eq!(s.rho_coeff, 1.0);
        assert_eq!(s.rhs, 0.0);
        // at ρ = 1 the scaled cut is the original
        let p = LiftedPoint::new(vec![0.0; 3], SymMatrix::from_upper_fn(3, |i, j| if i == j { 1.0 } else { -0.5 }));
        assert!((s.violation(&p) - c.violation(&p)).abs() < 1e-15);
    }

    #[test]
    fn scaling_pair_is_identity() {
        let c = Cut::new(CutFamily::Pair, vec![], vec![(0, 0, 1.0), (0, 1, -1.0)], 0.0);
        assert_eq!(scale_for_ratio(&c), c);
    }

    #[test]
    fn tight_point_has_zero_violation() {
        let c = Cut::new(CutFamily::Rlt, vec![(0, 1.0), (1, 1.0)], vec![(0, 1, 1.0)], -1.0);
        let x = TernaryVector::new(vec![-1, -1]).unwrap();
        assert_eq!(c.violation(&LiftedPoint::from_ternary(&x)), 0.0);
    }

    #[test]
    fn triangle_valid_at_all_ones() {
        let c = &enumerate_family(CutFamily::Triangle, 3)[0];
        assert!(cut_valid_on_ternary(c, &TernaryVector::new(vec![1, 1, 1]).unwrap()));
    }

    #[test]
    fn every_family_valid_on_rank_one_points() {
        for n in 1..=6 {
            let pts = enumerate_f1n(n).unwrap();
            let mut fams = vec![CutFamily::Triangle, CutFamily::Pair, CutFamily::Rlt, CutFamily::Split];
            if n >= 5 {
                fams.push(CutFamily::KGonal(5));
            }
            for f in fams {
                for c in enumerate_family(f, n) {
                    for p in &pts {
                        assert!(cut_valid_on_ternary(&c, &p.x), "{c:?} at {}", p.x);
                        // also with the sign-flipped factor, which shares X but not x
                        let neg = TernaryVector::new(p.x.values().iter().map(|v| -v).collect()).unwrap();
                        assert!(cut_valid_on_ternary(&c, &neg));
                    }
                }
            }
        }
    }

    #[test]
    fn scaled_cuts_valid_on_scaled_lifts() {
        let pts = enumerate_f1n(4).unwrap();
        for f in [CutFamily::Triangle, CutFamily::Pair, CutFamily::Rlt, CutFamily::Split] {
            for c in enumerate_family(f, 4) {
                let s = scale_for_ratio(&c);
                for p in &pts {
                    let lp = LiftedPoint::scaled_ternary(&p.x, 0.37);
                    assert!(s.violation(&lp) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn registry_knows_all_names() {
        for name in SEPARATOR_NAMES {
            assert_eq!(separator(name, None).unwrap().name(), name);
        }
        assert!(separator("hexagonal", None).is_err());
    }

    #[test]
    fn merge_drops_duplicates_and_caps() {
        let xs = SymMatrix::from_upper_fn(4, |i, j| if i == j { 1.0 } else { -0.6 });
        let a = separate_triangle(&xs, 1e-3, 100);
        let b = separate_triangle(&xs, 1e-3, 100);
        let n = a.cuts.len();
        let m = merge_reports(vec![a, b], 1000, &HashSet::new());
        assert_eq!(m.cuts.len(), n);
        let m2 = merge_reports(vec![m.clone()], 2, &HashSet::new());
        assert_eq!(m2.cuts.len(), 2);
    }
}
