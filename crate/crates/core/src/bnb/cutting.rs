//! Per-node cutting-plane loop.

use super::BnbConfig;
use crate::cuts::{merge_reports, scale_for_ratio, separator, Cut, CutKey, SeparationContext, Separator};
use crate::error::Result;
use crate::relaxation::{solve_relaxation, RelaxResult, RelaxationHandle};
use crate::sdp::{backend, SdpBackend, SolveOptions, SolveStatus};
use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

/// Cuts whose slack at the current point exceeds this are dropped.
const PURGE_SLACK: f64 = 1e-3;

/// Separators and solver shared by all nodes.
pub struct CutLoop {
    separators: Vec<Box<dyn Separator>>,
    backend: Box<dyn SdpBackend>,
    tol: f64,
    cap: usize,
    max_rounds: usize,
    tail_rounds: usize,
    tail_tol: f64,
    sdp: SolveOptions,
}

#[derive(Debug, Clone)]
pub struct CutLoopOutcome {
    /// Best certified bound over all rounds, never below the starting bound.
    pub bound: f64,
    /// Certified bound of each solve, in order.
    pub round_bounds: Vec<f64>,
    /// Last relaxation solution (None when nothing was solved).
    pub relax: Option<RelaxResult>,
    /// Cuts still in the relaxation at exit, unscaled.
    pub cuts: Vec<Cut>,
    pub added: BTreeMap<String, usize>,
    pub infeasible: bool,
    /// The bound reached the cutoff.
    pub cutoff: bool,
    pub timed_out: bool,
}

impl CutLoop {
    pub fn new(cfg: &BnbConfig) -> Result<Self> {
        let separators = cfg
            .cut_families
            .iter()
            .map(|name| separator(name, cfg.kgonal_runs_for(name)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CutLoop {
            separators,
            backend: backend(&cfg.backend)?,
            tol: cfg.cut_tol,
            cap: cfg.max_cuts_per_round,
            max_rounds: cfg.max_cut_rounds,
            tail_rounds: 3,
            tail_tol: 1e-6,
            sdp: SolveOptions { tol: cfg.sdp_tol, max_iter: cfg.sdp_max_iter, cutoff: None },
        })
    }

    pub fn backend(&self) -> &dyn SdpBackend {
        self.backend.as_ref()
    }

    fn solve(&self, h: &RelaxationHandle, cuts: &[Cut], cutoff: Option<f64>) -> RelaxResult {
        let opts = SolveOptions { cutoff, ..self.sdp };
        if h.is_ratio() {
            let scaled: Vec<Cut> = cuts.iter().map(scale_for_ratio).collect();
            solve_relaxation(h, &scaled, self.backend.as_ref(), &opts)
        } else {
            solve_relaxation(h, cuts, self.backend.as_ref(), &opts)
        }
    }

    /// Solve → separate → add, phase 1 (exact families) then phase 2
    /// (k-gonal). A phase ends once a round finds fewer than n violated cuts.
    pub fn run(
        &self,
        h: &RelaxationHandle,
        inherited: Vec<Cut>,
        start_bound: f64,
        cutoff: Option<f64>,
        deadline: Option<Instant>,
        seed: u64,
    ) -> CutLoopOutcome {
        let n = h.dim();
        let mut out = CutLoopOutcome {
            bound: start_bound,
            round_bounds: Vec::new(),
            relax: None,
            cuts: inherited,
            added: BTreeMap::new(),
            infeasible: false,
            cutoff: false,
            timed_out: false,
        };
        let mut phase = 1u8;
        let mut weak = 0;
        for round in 0.. {
            let res = self.solve(h, &out.cuts, cutoff);
            if res.status == SolveStatus::Infeasible {
                out.infeasible = true;
                out.bound = f64::INFINITY;
                out.relax = Some(res);
                return out;
            }
            out.round_bounds.push(res.bound);
            let prev = out.bound;
            if res.bound > out.bound {
                out.bound = res.bound;
            }
            let reached = cutoff.is_some_and(|c| out.bound >= c);
            if res.status == SolveStatus::Cutoff || reached {
                out.cutoff = true;
                out.relax = Some(res);
                return out;
            }
            if round > 0 && out.bound - prev < self.tail_tol * out.bound.abs().max(1.0) {
                weak += 1;
            } else {
                weak = 0;
            }
            let point = res.point.clone();
            self.purge(&mut out.cuts, &point);
            out.relax = Some(res);
            if round + 1 >= self.max_rounds || weak >= self.tail_rounds {
                return out;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                out.timed_out = true;
                return out;
            }
            if !(point.scale > 1e-12) {
                return out;
            }
            let norm = point.normalized();
            let seen: HashSet<CutKey> = out.cuts.iter().map(|c| c.key()).collect();
            let ctx = SeparationContext { tol: self.tol, cap: self.cap, seed: seed ^ ((round as u64) << 32) };
            let new_cuts = loop {
                if phase > 2 {
                    return out;
                }
                let reports = self
                    .separators
                    .iter()
                    .filter(|s| s.phase() == phase)
                    .map(|s| s.separate(&norm, &ctx))
                    .collect();
                let rep = merge_reports(reports, self.cap, &seen);
                if rep.cuts.len() < n {
                    phase += 1;
                }
                if !rep.cuts.is_empty() {
                    break rep.cut_list();
                }
            };
            for c in new_cuts {
                *out.added.entry(c.family.name()).or_insert(0) += 1;
                out.cuts.push(c);
            }
        }
        unreachable!()
    }

    /// Drops cuts that are clearly slack at `point` (measured after scaling
    /// back to ρ = 1).
    fn purge(&self, cuts: &mut Vec<Cut>, point: &crate::cuts::LiftedPoint) {
        if !(point.scale > 1e-12) {
            return;
        }
        let norm = point.normalized();
        cuts.retain(|c| -c.violation(&norm) <= PURGE_SLACK);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::root_handle;
    use crate::instances::{brute_force, gen_type3};
    use crate::problem::ProblemInstance;

    #[test]
    fn rounds_never_lower_the_bound() {
        for seed in 0..3 {
            let inst = ProblemInstance::Linear(gen_type3(8, 50.0, seed).unwrap());
            let cfg = BnbConfig::default();
            let h = root_handle(&inst, &cfg).unwrap();
            let out = CutLoop::new(&cfg).unwrap().run(&h, Vec::new(), f64::NEG_INFINITY, None, None, 1);
            assert!(!out.round_bounds.is_empty());
            for w in out.round_bounds.windows(2) {
                assert!(w[1] >= w[0] - 1e-7, "{:?}", out.round_bounds);
            }
            assert!(out.bound <= brute_force(&inst).unwrap().value + 1e-6);
            let total: usize = out.added.values().sum();
            assert!(total >= out.cuts.len());
        }
    }

    #[test]
    fn no_families_means_one_solve() {
        let inst = ProblemInstance::Linear(gen_type3(6, 50.0, 0).unwrap());
        let cfg = BnbConfig::default().without_cuts();
        let h = root_handle(&inst, &cfg).unwrap();
        let out = CutLoop::new(&cfg).unwrap().run(&h, Vec::new(), f64::NEG_INFINITY, None, None, 0);
        assert_eq!(out.round_bounds.len(), 1);
        assert!(out.cuts.is_empty());
    }

    #[test]
    fn cutoff_stops_early() {
        let inst = ProblemInstance::Linear(gen_type3(6, 50.0, 0).unwrap());
        let cfg = BnbConfig::default();
        let h = root_handle(&inst, &cfg).unwrap();
        let out = CutLoop::new(&cfg).unwrap().run(&h, Vec::new(), f64::NEG_INFINITY, Some(-1e9), None, 0);
        assert!(out.cutoff);
    }
}
