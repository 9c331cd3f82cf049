//! Branch-and-bound over ternary fixings, with a cutting-plane loop at every
//! node and a Dinkelbach driver for ratio objectives.

mod branching;
mod cutting;
mod dinkelbach;

pub use branching::{
    branching_rule, default_branching, fractionality, ratio_scores, select_branch_most_fractional,
    select_branch_ratio, BranchingRule, MostFractional, RatioScore, BRANCHING_NAMES,
};
pub use cutting::{CutLoop, CutLoopOutcome};
pub use dinkelbach::{dinkelbach, DinkelbachResult};

use crate::cuts::{default_kgonal_runs, Cut};
use crate::error::{Error, Result};
use crate::problem::{relative_gap, ProblemInstance, Solution, TernaryVector, TqpInstance};
use crate::relaxation::{build_basic, build_linear, build_quto, build_ratio, facial_reduce, fix_variable, RelaxationHandle};
use crate::vns::{model_for, repair_balance, round_to_ternary, vns, vns_with_start, VnsModel, VnsParams};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

/// Solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnbConfig {
    pub gap_tol: f64,
    pub cut_tol: f64,
    pub max_cuts_per_round: usize,
    /// Seconds; `None` for no limit.
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    /// Separator names, see [`crate::cuts::SEPARATOR_NAMES`].
    pub cut_families: Vec<String>,
    /// SA multistarts per k; missing entries use the defaults.
    pub kgonal_runs: BTreeMap<usize, usize>,
    pub threads: usize,
    pub seed: u64,
    pub vns: VnsParams,
    pub inherit_cuts: bool,
    /// Solve TQP-Linear nodes on the reduced face.
    pub facial_reduction: bool,
    pub max_cut_rounds: usize,
    pub sdp_tol: f64,
    pub sdp_max_iter: usize,
    pub backend: String,
    /// `None` picks the default rule of the instance kind.
    pub branching: Option<String>,
    /// Run a warm-started VNS after every node.
    pub node_heuristic: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            gap_tol: 1e-4,
            cut_tol: 1e-3,
            max_cuts_per_round: 5000,
            time_limit: None,
            node_limit: None,
            cut_families: ["triangle", "pair", "rlt", "split", "pentagonal", "heptagonal"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            kgonal_runs: BTreeMap::new(),
            threads: 1,
            seed: 0,
            vns: VnsParams::default(),
            inherit_cuts: true,
            facial_reduction: true,
            max_cut_rounds: 30,
            sdp_tol: 1e-7,
            sdp_max_iter: 200,
            backend: "ipm".into(),
            branching: None,
            node_heuristic: true,
        }
    }
}

impl BnbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0) || !(self.cut_tol > 0.0) {
            return Err(Error::Parse { location: "config".into(), message: "gap_tol and cut_tol must be positive".into() });
        }
        Ok(())
    }

    pub(crate) fn kgonal_runs_for(&self, name: &str) -> Option<usize> {
        let k = match name {
            "pentagonal" | "kgonal5" => 5,
            "heptagonal" | "kgonal7" => 7,
            "enneagonal" | "kgonal9" => 9,
            _ => return None,
        };
        Some(self.kgonal_runs.get(&k).copied().unwrap_or_else(|| default_kgonal_runs(k)))
    }

    /// Plain relaxation, no cuts.
    pub fn without_cuts(mut self) -> Self {
        self.cut_families.clear();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BnbStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    /// The search finished without finding a feasible point.
    Infeasible,
}

impl BnbStatus {
    pub fn name(&self) -> &'static str {
        match self {
            BnbStatus::Optimal => "optimal",
            BnbStatus::TimeLimit => "time-limit",
            BnbStatus::NodeLimit => "node-limit",
            BnbStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnbStats {
    pub nodes_explored: usize,
    pub cuts_added: BTreeMap<String, usize>,
    pub wall_time: f64,
    pub root_bound: f64,
    /// Global lower bound at exit.
    pub lower_bound: f64,
    pub final_gap: f64,
    pub status: BnbStatus,
    /// Certified bound of every root cut round.
    pub root_round_bounds: Vec<f64>,
}

/// One explored node in the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub bound: f64,
    pub cuts_added: BTreeMap<String, usize>,
    pub incumbent: f64,
    /// "branched", "pruned", "infeasible", "leaf" or "interrupted".
    pub outcome: String,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub fixings: Vec<Option<i8>>,
    pub inherited_cuts: Vec<Cut>,
    /// Valid lower bound on every completion of the fixings.
    pub bound: f64,
    pub depth: usize,
}

impl Node {
    pub fn root(n: usize) -> Self {
        Node { id: 0, parent: None, fixings: vec![None; n], inherited_cuts: Vec::new(), bound: f64::NEG_INFINITY, depth: 0 }
    }
}

/// Children fixing x_i to −1, 0 and +1. Ids are assigned by the caller.
pub fn branch(node: &Node, i: usize, inherit: bool) -> Result<[Node; 3]> {
    if i >= node.fixings.len() {
        return Err(Error::DimensionMismatch { expected: node.fixings.len(), got: i + 1 });
    }
    if node.fixings[i].is_some() {
        return Err(Error::AlreadyFixed(i));
    }
    let child = |t: i8| {
        let mut fixings = node.fixings.clone();
        fixings[i] = Some(t);
        Node {
            id: 0,
            parent: Some(node.id),
            fixings,
            inherited_cuts: if inherit { node.inherited_cuts.clone() } else { Vec::new() },
            bound: node.bound,
            depth: node.depth + 1,
        }
    };
    Ok([child(-1), child(0), child(1)])
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct BnbResult {
    /// Best feasible point; None only if none was found.
    pub solution: Option<Solution>,
    pub stats: BnbStats,
    pub log: Vec<NodeRecord>,
}

/// Root relaxation of an instance.
pub fn root_handle(inst: &ProblemInstance, cfg: &BnbConfig) -> Result<RelaxationHandle> {
    Ok(match inst {
        ProblemInstance::Quto(t) => build_quto(t)?,
        ProblemInstance::Tqp(t) => build_basic(t, true),
        ProblemInstance::Linear(t) => {
            let h = build_linear(t)?;
            if cfg.facial_reduction {
                facial_reduce(&h)?
            } else {
                h
            }
        }
        ProblemInstance::Ratio(r) => build_ratio(r),
    })
}

/// Root relaxation with the full cut loop and no incumbent.
pub fn root_bound(inst: &ProblemInstance, cfg: &BnbConfig) -> Result<CutLoopOutcome> {
    let h = root_handle(inst, cfg)?;
    let cl = CutLoop::new(cfg)?;
    Ok(cl.run(&h, Vec::new(), f64::NEG_INFINITY, None, None, cfg.seed))
}

/// Heap entry: lowest bound first, then deeper, then older.
struct Queued(Node);

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        // BinaryHeap pops the greatest element
        o.0.bound
            .total_cmp(&self.0.bound)
            .then(self.0.depth.cmp(&o.0.depth))
            .then(o.0.id.cmp(&self.0.id))
    }
}

fn fathom_threshold(ub: f64, gap_tol: f64) -> f64 {
    ub - gap_tol * ub.abs().max(1.0)
}

/// Everything a worker learns from one node.
struct NodeOutcome {
    bound: f64,
    candidates: Vec<Solution>,
    children: Option<(usize, Vec<Cut>)>,
    added: BTreeMap<String, usize>,
    outcome: &'static str,
    round_bounds: Vec<f64>,
    timed_out: bool,
}

struct Searcher<'a> {
    inst: &'a ProblemInstance,
    cfg: &'a BnbConfig,
    root: RelaxationHandle,
    cut_loop: CutLoop,
    branching: Box<dyn BranchingRule>,
    model: Option<Box<dyn VnsModel + 'a>>,
    deadline: Option<Instant>,
}

impl<'a> Searcher<'a> {
    fn new(inst: &'a ProblemInstance, cfg: &'a BnbConfig, start: Instant) -> Result<Self> {
        cfg.validate()?;
        let branching = branching_rule(cfg.branching.as_deref().unwrap_or(default_branching(inst)))?;
        Ok(Searcher {
            inst,
            cfg,
            root: root_handle(inst, cfg)?,
            cut_loop: CutLoop::new(cfg)?,
            branching,
            model: model_for(inst).ok(),
            deadline: cfg.time_limit.map(|t| start + Duration::from_secs_f64(t.max(0.0))),
        })
    }

    fn evaluate(&self, x: &TernaryVector) -> Option<Solution> {
        if !self.inst.is_feasible(x) {
            return None;
        }
        self.inst.evaluate(x).ok().map(|value| Solution { x: x.clone(), value })
    }

    fn balanced(&self) -> Option<&TqpInstance> {
        match self.inst {
            ProblemInstance::Linear(t) | ProblemInstance::Tqp(t) if t.is_balanced() => Some(t),
            _ => None,
        }
    }

    /// Cheap combinatorial test for 𝟙ᵀx = 0 under the fixings.
    fn balance_impossible(&self, fixings: &[Option<i8>]) -> bool {
        if self.balanced().is_none() {
            return false;
        }
        let fixed: i64 = fixings.iter().flatten().map(|&v| v as i64).sum();
        let free = fixings.iter().filter(|f| f.is_none()).count() as i64;
        fixed.abs() > free
    }

    fn handle(&self, fixings: &[Option<i8>]) -> Result<RelaxationHandle> {
        let mut h = self.root.clone();
        for (i, f) in fixings.iter().enumerate() {
            if let Some(t) = f {
                h = fix_variable(&h, i, *t)?;
            }
        }
        Ok(h)
    }

    /// Rounded relaxation point, repaired for balance and respecting fixings,
    /// then improved by one VNS run.
    fn heuristic(&self, node: &Node, point: &crate::cuts::LiftedPoint) -> Vec<Solution> {
        let mut x = round_to_ternary(&point.normalized().x);
        for (i, f) in node.fixings.iter().enumerate() {
            if let Some(t) = f {
                x.set(i, *t);
            }
        }
        if let Some(t) = self.balanced() {
            x = repair_balance(t, &x);
        }
        let mut out: Vec<Solution> = self.evaluate(&x).into_iter().collect();
        if let (true, Some(m)) = (self.cfg.node_heuristic, &self.model) {
            let params = VnsParams { restarts: 1, seed: self.cfg.seed ^ (node.id as u64).wrapping_mul(0x9E37_79B9), ..self.cfg.vns };
            let s = vns_with_start(m.as_ref(), Some(&x), &params);
            if let Some(s) = self.evaluate(&s.x) {
                out.push(s);
            }
        }
        out
    }

    fn process(&self, node: &Node, ub: f64) -> NodeOutcome {
        let mut res = NodeOutcome {
            bound: node.bound,
            candidates: Vec::new(),
            children: None,
            added: BTreeMap::new(),
            outcome: "pruned",
            round_bounds: Vec::new(),
            timed_out: false,
        };
        if node.fixings.iter().all(|f| f.is_some()) {
            let x = TernaryVector::new(node.fixings.iter().map(|f| f.unwrap()).collect()).expect("ternary");
            match self.evaluate(&x) {
                Some(s) => {
                    res.bound = s.value;
                    res.candidates.push(s);
                    res.outcome = "leaf";
                }
                None => {
                    res.bound = f64::INFINITY;
                    res.outcome = "infeasible";
                }
            }
            return res;
        }
        if self.balance_impossible(&node.fixings) {
            res.bound = f64::INFINITY;
            res.outcome = "infeasible";
            return res;
        }
        let h = match self.handle(&node.fixings) {
            Ok(h) => h,
            Err(_) => {
                res.outcome = "infeasible";
                res.bound = f64::INFINITY;
                return res;
            }
        };
        let cutoff = ub.is_finite().then(|| fathom_threshold(ub, self.cfg.gap_tol));
        let seed = self.cfg.seed ^ (node.id as u64).wrapping_mul(0xA076_1D64_78BD_642F);
        let cl = self.cut_loop.run(&h, node.inherited_cuts.clone(), node.bound, cutoff, self.deadline, seed);
        res.added = cl.added.clone();
        res.round_bounds = cl.round_bounds.clone();
        res.timed_out = cl.timed_out;
        if cl.infeasible {
            res.bound = f64::INFINITY;
            res.outcome = "infeasible";
            return res;
        }
        res.bound = cl.bound;
        let Some(relax) = cl.relax else {
            return res;
        };
        res.candidates = self.heuristic(node, &relax.point);
        let best_ub = res.candidates.iter().map(|s| s.value).fold(ub, f64::min);
        if best_ub.is_finite() && res.bound >= fathom_threshold(best_ub, self.cfg.gap_tol) {
            return res;
        }
        let fixed: Vec<bool> = node.fixings.iter().map(|f| f.is_some()).collect();
        match self.branching.select(&relax.point, &fixed, self.inst) {
            Ok(i) => {
                res.children = Some((i, cl.cuts));
                res.outcome = "branched";
            }
            Err(_) => {
                // degenerate ρ: fall back to the first free variable
                let i = fixed.iter().position(|f| !f).expect("free variable");
                res.children = Some((i, cl.cuts));
                res.outcome = "branched";
            }
        }
        res
    }
}

/// Shared search state.
struct Tree {
    queue: BinaryHeap<Queued>,
    incumbent: Option<Solution>,
    next_id: usize,
    explored: usize,
    pruned_min: f64,
    cuts_added: BTreeMap<String, usize>,
    root_bound: f64,
    root_rounds: Vec<f64>,
    log: Vec<NodeRecord>,
    status: Option<BnbStatus>,
    busy: usize,
}

impl Tree {
    fn ub(&self) -> f64 {
        self.incumbent.as_ref().map(|s| s.value).unwrap_or(f64::INFINITY)
    }

    fn offer(&mut self, s: Solution) {
        if s.value < self.ub() {
            self.incumbent = Some(s);
        }
    }

    fn lower_bound(&self) -> f64 {
        let open = self.queue.iter().map(|q| q.0.bound).fold(f64::INFINITY, f64::min);
        open.min(self.pruned_min).min(self.ub())
    }

    fn done(&self, gap_tol: f64) -> bool {
        self.queue.is_empty() || relative_gap(self.ub(), self.lower_bound()) <= gap_tol
    }

    /// Applies a node outcome. The node counts as explored.
    fn absorb(&mut self, node: Node, out: NodeOutcome, cfg: &BnbConfig) {
        self.explored += 1;
        for s in out.candidates {
            self.offer(s);
        }
        for (k, v) in &out.added {
            *self.cuts_added.entry(k.clone()).or_insert(0) += v;
        }
        if node.id == 0 {
            self.root_bound = out.bound;
            self.root_rounds = out.round_bounds.clone();
        }
        let mut outcome = out.outcome;
        match out.children {
            Some((i, cuts)) if out.bound < fathom_threshold(self.ub(), cfg.gap_tol) => {
                let parent = Node { inherited_cuts: cuts, bound: out.bound, ..node.clone() };
                for mut c in branch(&parent, i, cfg.inherit_cuts).expect("free branching variable") {
                    self.next_id += 1;
                    c.id = self.next_id;
                    self.queue.push(Queued(c));
                }
            }
            _ => {
                if out.bound.is_finite() {
                    self.pruned_min = self.pruned_min.min(out.bound);
                }
                if outcome == "branched" {
                    outcome = "pruned";
                }
            }
        }
        if out.timed_out && outcome == "branched" {
            outcome = "interrupted";
        }
        self.log.push(NodeRecord {
            id: node.id,
            parent: node.parent,
            depth: node.depth,
            bound: out.bound,
            cuts_added: out.added,
            incumbent: self.ub(),
            outcome: outcome.to_string(),
        });
    }

    /// Next node to process, dropping nodes already dominated by the incumbent.
    fn pop(&mut self, cfg: &BnbConfig) -> Option<Node> {
        while let Some(Queued(node)) = self.queue.pop() {
            if node.bound >= fathom_threshold(self.ub(), cfg.gap_tol) {
                self.pruned_min = self.pruned_min.min(node.bound);
                continue;
            }
            return Some(node);
        }
        None
    }
}

/// Exact minimization by branch-and-cut.
pub fn solve(inst: &ProblemInstance, cfg: &BnbConfig) -> Result<BnbResult> {
    let start = Instant::now();
    let searcher = Searcher::new(inst, cfg, start)?;
    let n = inst.dim();
    let mut tree = Tree {
        queue: BinaryHeap::new(),
        incumbent: None,
        next_id: 0,
        explored: 0,
        pruned_min: f64::INFINITY,
        cuts_added: BTreeMap::new(),
        root_bound: f64::NEG_INFINITY,
        root_rounds: Vec::new(),
        log: Vec::new(),
        status: None,
        busy: 0,
    };
    if let Some(m) = &searcher.model {
        let s = vns(m.as_ref(), &VnsParams { seed: cfg.seed, ..cfg.vns });
        if let Some(s) = searcher.evaluate(&s.x) {
            tree.offer(s);
        }
    }
    tree.queue.push(Queued(Node::root(n)));

    if cfg.threads > 1 {
        Ok(finish(run_parallel(&searcher, tree_mutex(tree), cfg), start))
    } else {
        run_serial(&searcher, &mut tree, cfg);
        Ok(finish(tree, start))
    }
}

fn limits_hit(tree: &Tree, searcher: &Searcher, cfg: &BnbConfig) -> Option<BnbStatus> {
    if searcher.deadline.is_some_and(|d| Instant::now() >= d) {
        return Some(BnbStatus::TimeLimit);
    }
    if cfg.node_limit.is_some_and(|l| tree.explored >= l) {
        return Some(BnbStatus::NodeLimit);
    }
    None
}

fn run_serial(searcher: &Searcher, tree: &mut Tree, cfg: &BnbConfig) {
    loop {
        if tree.done(cfg.gap_tol) {
            return;
        }
        if let Some(s) = limits_hit(tree, searcher, cfg) {
            tree.status = Some(s);
            return;
        }
        let Some(node) = tree.pop(cfg) else {
            return;
        };
        let out = searcher.process(&node, tree.ub());
        tree.absorb(node, out, cfg);
    }
}

struct Shared {
    tree: Mutex<Tree>,
    wake: Condvar,
}

fn tree_mutex(tree: Tree) -> Shared {
    Shared { tree: Mutex::new(tree), wake: Condvar::new() }
}

/// Workers pop from the shared queue; the result value does not depend on
/// the interleaving, node counts may.
fn run_parallel(searcher: &Searcher, shared: Shared, cfg: &BnbConfig) -> Tree {
    std::thread::scope(|scope| {
        for _ in 0..cfg.threads {
            scope.spawn(|| loop {
                let node = {
                    let mut t = shared.tree.lock().expect("tree lock");
                    loop {
                        if t.status.is_some() || (t.busy == 0 && t.done(cfg.gap_tol)) {
                            shared.wake.notify_all();
                            return;
                        }
                        if t.busy == 0 {
                            if let Some(s) = limits_hit(&t, searcher, cfg) {
                                t.status = Some(s);
                                continue;
                            }
                        }
                        if let Some(n) = t.pop(cfg) {
                            t.busy += 1;
                            break (n, t.ub());
                        }
                        if t.busy == 0 {
                            shared.wake.notify_all();
                            return;
                        }
                        t = shared.wake.wait(t).expect("tree lock");
                    }
                };
                let (node, ub) = node;
                let out = searcher.process(&node, ub);
                let mut t = shared.tree.lock().expect("tree lock");
                t.busy -= 1;
                t.absorb(node, out, cfg);
                if t.status.is_none() {
                    if let Some(s) = limits_hit(&t, searcher, cfg) {
                        t.status = Some(s);
                    }
                }
                shared.wake.notify_all();
            });
        }
    });
    shared.tree.into_inner().expect("tree lock")
}

fn finish(tree: Tree, start: Instant) -> BnbResult {
    let ub = tree.ub();
    let lb = tree.lower_bound();
    let gap = relative_gap(ub, lb);
    let status = match (tree.status, &tree.incumbent) {
        (Some(s), _) => s,
        (None, None) => BnbStatus::Infeasible,
        (None, Some(_)) => BnbStatus::Optimal,
    };
    let stats = BnbStats {
        nodes_explored: tree.explored,
        cuts_added: tree.cuts_added,
        wall_time: start.elapsed().as_secs_f64(),
        root_bound: tree.root_bound,
        lower_bound: lb,
        final_gap: gap,
        status,
        root_round_bounds: tree.root_rounds,
    };
    BnbResult { solution: tree.incumbent, stats, log: tree.log }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{brute_force, gen_quto, gen_ratio, gen_type1, GeneratorKind};
    use crate::problem::{LinearConstraint, SymMatrix};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-4 * a.abs().max(1.0)
    }

    #[test]
    fn branch_creates_three_children() {
        let root = Node { id: 4, bound: -2.0, ..Node::root(3) };
        let kids = branch(&root, 1, true).unwrap();
        for (c, t) in kids.iter().zip([-1i8, 0, 1]) {
            assert_eq!(c.fixings, vec![None, Some(t), None]);
            assert_eq!(c.parent, Some(4));
            assert_eq!(c.depth, 1);
            assert_eq!(c.bound, -2.0);
        }
        assert_eq!(branch(&kids[0], 1, true).unwrap_err(), Error::AlreadyFixed(1));
        assert!(matches!(branch(&root, 3, true), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn heap_order_prefers_low_bound_then_depth_then_age() {
        let mk = |id, bound, depth| Queued(Node { id, bound, depth, ..Node::root(1) });
        let mut h = BinaryHeap::from(vec![mk(1, 0.0, 1), mk(2, -1.0, 1), mk(3, 0.0, 2), mk(4, 0.0, 2)]);
        let order: Vec<usize> = std::iter::from_fn(|| h.pop().map(|q| q.0.id)).collect();
        assert_eq!(order, vec![2, 3, 4, 1]);
    }

    #[test]
    fn solves_small_instances_exactly() {
        for seed in 0..3 {
            let q = ProblemInstance::Quto(gen_quto(GeneratorKind::QutoType2, 6, 50.0, seed).unwrap());
            let l = ProblemInstance::Linear(gen_type1(6, 50.0, seed).unwrap());
            for inst in [q, l] {
                let res = solve(&inst, &BnbConfig::default()).unwrap();
                assert_eq!(res.stats.status, BnbStatus::Optimal);
                let s = res.solution.unwrap();
                assert!(inst.is_feasible(&s.x));
                assert!(close(s.value, brute_force(&inst).unwrap().value));
                assert!(res.stats.root_bound <= s.value + 1e-7);
            }
        }
    }

    #[test]
    fn branching_without_cuts_is_still_exact() {
        let cfg = BnbConfig { gap_tol: 1e-9, ..BnbConfig::default() }.without_cuts();
        let inst = ProblemInstance::Linear(gen_type1(7, 25.0, 4).unwrap());
        let res = solve(&inst, &cfg).unwrap();
        assert!(res.stats.nodes_explored > 1);
        assert_eq!(res.log.len(), res.stats.nodes_explored);
        assert!(close(res.solution.unwrap().value, brute_force(&inst).unwrap().value));
    }

    #[test]
    fn ratio_direct_matches_oracle() {
        let inst = ProblemInstance::Ratio(gen_ratio(6, 50.0, 2).unwrap());
        let res = solve(&inst, &BnbConfig::default()).unwrap();
        assert!(close(res.solution.unwrap().value, brute_force(&inst).unwrap().value));
    }

    #[test]
    fn infeasible_constraints_are_reported() {
        let t = TqpInstance::new(
            SymMatrix::identity(2),
            vec![0.0; 2],
            vec![LinearConstraint { a: vec![1.0, 1.0], b: 3.0 }],
        )
        .unwrap();
        let res = solve(&ProblemInstance::Tqp(t), &BnbConfig::default()).unwrap();
        assert_eq!(res.stats.status, BnbStatus::Infeasible);
        assert!(res.solution.is_none());
    }

    #[test]
    fn limits_stop_the_search() {
        let inst = ProblemInstance::Linear(gen_type1(8, 25.0, 1).unwrap());
        let cfg = BnbConfig { time_limit: Some(0.0), ..BnbConfig::default() };
        let res = solve(&inst, &cfg).unwrap();
        assert_eq!(res.stats.status, BnbStatus::TimeLimit);
        assert_eq!(res.stats.nodes_explored, 0);
        assert!(res.solution.is_some());
        let cfg = BnbConfig { node_limit: Some(1), gap_tol: 1e-12, ..BnbConfig::default() }.without_cuts();
        let res = solve(&inst, &cfg).unwrap();
        assert_eq!(res.stats.status, BnbStatus::NodeLimit);
        assert_eq!(res.stats.nodes_explored, 1);
    }

    #[test]
    fn threads_give_the_same_value() {
        let inst = ProblemInstance::Linear(gen_type1(7, 50.0, 9).unwrap());
        let base = BnbConfig { gap_tol: 1e-9, ..BnbConfig::default() }.without_cuts();
        let a = solve(&inst, &base).unwrap();
        let b = solve(&inst, &BnbConfig { threads: 3, ..base }).unwrap();
        assert!(close(a.solution.unwrap().value, b.solution.unwrap().value));
    }

    #[test]
    fn config_roundtrips_and_validates() {
        let cfg = BnbConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<BnbConfig>(&text).unwrap(), cfg);
        assert!(BnbConfig { gap_tol: 0.0, ..cfg.clone() }.validate().is_err());
        let bad = BnbConfig { cut_families: vec!["hexagonal".into()], ..cfg };
        assert!(solve(&ProblemInstance::Quto(gen_quto(GeneratorKind::QutoType1, 3, 50.0, 0).unwrap()), &bad).is_err());
    }
}
