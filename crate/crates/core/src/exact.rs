//! Best-first branch-and-bound with outer-approximation cuts.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bounds::{cassini_node_bound, gershgorin_node_bound};
use crate::error::{Result, SpcaError};
use crate::heuristics::{truncated_power_method, FeasiblePoint, TPM_MAX_ITER, TPM_TOL};
use crate::instance::{Budget, Instance};
use crate::subproblem::{cut_at, Cut, Fix, Support};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub use_gershgorin: bool,
    pub use_cassini: bool,
    pub warm_start: bool,
    /// Record one row per processed node.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-3,
            time_limit: None,
            node_limit: None,
            use_gershgorin: true,
            use_cassini: false,
            warm_start: true,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// A limit was reached after the gap had already closed to `gap_tol`.
    GapLimit,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::GapLimit => "gap-limit",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::NodeLimit => "node-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeAction {
    Branch,
    Prune,
    Complete,
    Reinsert,
}

impl NodeAction {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeAction::Branch => "branch",
            NodeAction::Prune => "prune",
            NodeAction::Complete => "complete",
            NodeAction::Reinsert => "reinsert",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub node: u64,
    pub depth: usize,
    pub bound: f64,
    pub action: NodeAction,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub incumbent: Option<FeasiblePoint>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub nodes_explored: u64,
    pub cuts_generated: usize,
    pub wall_time: f64,
    pub status: SolveStatus,
    pub trace: Vec<TraceRow>,
}

impl SolveReport {
    /// Writes the trace as CSV with a header row.
    pub fn write_trace<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "depth", "bound", "action"])?;
        for row in &self.trace {
            w.write_record([
                row.node.to_string(),
                row.depth.to_string(),
                format!("{:?}", row.bound),
                row.action.as_str().to_string(),
            ])?;
        }
        w.flush().map_err(|e| SpcaError::Csv(e.into()))?;
        Ok(())
    }
}

pub fn relative_gap(lb: f64, ub: f64) -> f64 {
    ((ub - lb) / ub.abs().max(1e-12)).max(0.0)
}

fn cut_constant(cut: &Cut, s: &Support) -> f64 {
    let mut c = cut.value;
    for i in 0..s.p() {
        let base = if cut.base.is_chosen(i) { 1.0 } else { 0.0 };
        let fixed = if s.is_chosen(i) { 1.0 } else { 0.0 };
        c += cut.grad[i] * (fixed - base);
    }
    c
}

fn best_free_terms(cut: &Cut, free: &[usize], room: usize, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(free.iter().map(|&i| cut.grad[i]).filter(|&g| g > 0.0));
    if room < buf.len() {
        buf.select_nth_unstable_by(room.saturating_sub(1), |a, b| b.total_cmp(a));
        buf[..room].iter().sum()
    } else {
        buf.iter().sum()
    }
}

/// Minimum over cuts of each cut's maximum over completions of `s`; `+∞`
/// without cuts.
pub fn cut_model_bound(cuts: &[Cut], s: &Support, k: Budget) -> f64 {
    cut_model_binding(cuts, s, k).map_or(f64::INFINITY, |(v, _)| v)
}

/// Bound and index of the cut attaining it.
fn cut_model_binding(cuts: &[Cut], s: &Support, k: Budget) -> Option<(f64, usize)> {
    let free = s.free();
    let room = k.get().saturating_sub(s.n_chosen());
    let mut buf = Vec::with_capacity(free.len());
    let mut best: Option<(f64, usize)> = None;
    for (idx, cut) in cuts.iter().enumerate() {
        let v = if room == 0 {
            cut_constant(cut, s)
        } else {
            cut_constant(cut, s) + best_free_terms(cut, &free, room, &mut buf)
        };
        if best.map_or(true, |(b, _)| v < b) {
            best = Some((v, idx));
        }
    }
    best
}

struct Node {
    id: u64,
    depth: usize,
    bound: f64,
    support: Support,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: larger bound first, then older node
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    inst: &'a Instance,
    k: Budget,
    opts: &'a SolveOptions,
    cuts: Vec<Cut>,
    seen: HashSet<Vec<bool>>,
    incumbent: Option<FeasiblePoint>,
    lb: f64,
}

impl<'a> Search<'a> {
    fn threshold(&self) -> f64 {
        if self.lb.is_finite() {
            self.lb + self.opts.gap_tol * self.lb.abs()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn node_bound(&self, s: &Support) -> f64 {
        let mut b = self.inst.lambda_max();
        if self.opts.use_gershgorin {
            b = b.min(gershgorin_node_bound(self.inst, s, self.k));
        }
        if self.opts.use_cassini {
            b = b.min(cassini_node_bound(self.inst, s, self.k));
        }
        b.min(cut_model_bound(&self.cuts, s, self.k))
    }

    /// Evaluates `f` at a complete support, updating the incumbent and the cut pool.
    fn visit_complete(&mut self, chosen: &[usize]) -> Result<()> {
        if chosen.is_empty() {
            return Ok(());
        }
        let mut mask = vec![false; self.inst.p()];
        for &i in chosen {
            mask[i] = true;
        }
        // supports are never evaluated twice
        if !self.seen.insert(mask) {
            return Ok(());
        }
        let point = FeasiblePoint::from_indices(self.inst, self.k, chosen)?;
        match cut_at(self.inst, &point.support) {
            Ok((cut, _)) => self.cuts.push(cut),
            // a missing cut only weakens the bound
            Err(SpcaError::Certificate { .. }) => {}
            Err(e) => return Err(e),
        }
        if point.objective > self.lb {
            self.lb = point.objective;
            self.incumbent = Some(point);
        }
        Ok(())
    }

    /// Master-problem style completion: chosen plus the free indices with the
    /// largest gradient in the binding cut.
    fn cut_completion(&self, s: &Support) -> Option<Vec<usize>> {
        let (_, idx) = cut_model_binding(&self.cuts, s, self.k)?;
        let grad = &self.cuts[idx].grad;
        let sigma = self.inst.sigma();
        let mut free = s.free();
        free.sort_by(|&a, &b| {
            grad[b]
                .total_cmp(&grad[a])
                .then(sigma[(b, b)].total_cmp(&sigma[(a, a)]))
                .then(a.cmp(&b))
        });
        let room = self.k.get().saturating_sub(s.n_chosen());
        let mut chosen = s.chosen();
        chosen.extend(free.into_iter().take(room));
        chosen.sort_unstable();
        Some(chosen)
    }

    fn branch_index(&self, s: &Support) -> usize {
        let sigma = self.inst.sigma();
        let mut best: Option<(usize, f64)> = None;
        for i in s.free() {
            let mass: f64 = (0..s.p())
                .filter(|&j| s.state(j) != Fix::Excluded)
                .map(|j| sigma[(i, j)].abs())
                .sum();
            if best.map_or(true, |(_, m)| mass > m) {
                best = Some((i, mass));
            }
        }
        best.expect("branching requires a free index").0
    }
}

/// Auto-completed chosen set, if the node admits exactly one maximal completion.
fn forced_completion(s: &Support, k: usize) -> Option<Vec<usize>> {
    if s.n_chosen() >= k || s.n_free() == 0 {
        return Some(s.chosen());
    }
    if s.n_chosen() + s.n_free() <= k {
        let mut all = s.chosen();
        all.extend(s.free());
        all.sort_unstable();
        return Some(all);
    }
    None
}

pub fn solve_exact(inst: &Instance, k: Budget, opts: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    if k.get() > inst.p() {
        return Err(SpcaError::Validation(format!(
            "k = {} exceeds p = {}",
            k.get(),
            inst.p()
        )));
    }
    let p = inst.p();
    let mut search = Search {
        inst,
        k,
        opts,
        cuts: Vec::new(),
        seen: HashSet::new(),
        incumbent: None,
        lb: f64::NEG_INFINITY,
    };
    if opts.warm_start {
        let tpm = truncated_power_method(inst, k, None, TPM_MAX_ITER, TPM_TOL);
        search.visit_complete(&tpm.chosen())?;
    }

    let mut trace = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut next_id: u64 = 0;
    let mut nodes_explored: u64 = 0;
    // largest bound among discarded subtrees
    let mut pruned_ub = f64::NEG_INFINITY;
    let root = Support::root(p, k.get());
    let root_bound = search.node_bound(&root);
    heap.push(Node {
        id: next_id,
        depth: 0,
        bound: root_bound,
        support: root,
    });
    next_id += 1;

    let mut status = SolveStatus::Optimal;
    while let Some(top) = heap.peek() {
        if top.bound <= search.threshold() {
            // best-first: everything left is prunable
            pruned_ub = pruned_ub.max(top.bound);
            break;
        }
        let limit = if opts.time_limit.is_some_and(|t| start.elapsed() >= t) {
            Some(SolveStatus::TimeLimit)
        } else if opts.node_limit.is_some_and(|n| nodes_explored >= n) {
            Some(SolveStatus::NodeLimit)
        } else {
            None
        };
        if let Some(limit) = limit {
            let ub = top.bound.max(pruned_ub).max(search.lb);
            status = if search.lb.is_finite() && relative_gap(search.lb, ub) <= opts.gap_tol {
                SolveStatus::GapLimit
            } else {
                limit
            };
            break;
        }

        let mut node = heap.pop().expect("peeked");
        let bound = node.bound.min(search.node_bound(&node.support));
        if bound <= search.threshold() {
            pruned_ub = pruned_ub.max(bound);
            nodes_explored += 1;
            if opts.trace {
                trace.push(TraceRow { node: node.id, depth: node.depth, bound, action: NodeAction::Prune });
            }
            continue;
        }
        if bound < node.bound && heap.peek().is_some_and(|n| n.bound > bound) {
            node.bound = bound;
            if opts.trace {
                trace.push(TraceRow { node: node.id, depth: node.depth, bound, action: NodeAction::Reinsert });
            }
            heap.push(node);
            continue;
        }
        nodes_explored += 1;

        if let Some(chosen) = forced_completion(&node.support, k.get()) {
            search.visit_complete(&chosen)?;
            if opts.trace {
                trace.push(TraceRow { node: node.id, depth: node.depth, bound, action: NodeAction::Complete });
            }
            continue;
        }

        if let Some(chosen) = search.cut_completion(&node.support) {
            search.visit_complete(&chosen)?;
        }

        let i = search.branch_index(&node.support);
        if opts.trace {
            trace.push(TraceRow { node: node.id, depth: node.depth, bound, action: NodeAction::Branch });
        }
        for fix in [Fix::Chosen, Fix::Excluded] {
            let child = node.support.with(i, fix);
            let child_bound = bound.min(search.node_bound(&child));
            if child_bound <= search.threshold() {
                pruned_ub = pruned_ub.max(child_bound);
                continue;
            }
            heap.push(Node {
                id: next_id,
                depth: node.depth + 1,
                bound: child_bound,
                support: child,
            });
            next_id += 1;
        }
    }

    let open_ub = heap.iter().map(|n| n.bound).fold(f64::NEG_INFINITY, f64::max);
    let upper_bound = open_ub.max(pruned_ub).max(search.lb);
    let lower_bound = search.lb;
    let gap = if lower_bound.is_finite() {
        relative_gap(lower_bound, upper_bound)
    } else {
        f64::INFINITY
    };
    Ok(SolveReport {
        incumbent: search.incumbent,
        lower_bound,
        upper_bound,
        gap,
        nodes_explored,
        cuts_generated: search.cuts.len(),
        wall_time: start.elapsed().as_secs_f64(),
        status,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{bundled, Source};
    use crate::oracle::{brute_force, DEFAULT_MAX_SUBSETS};
    use nalgebra::{DMatrix, DVector};

    fn sigma3() -> Instance {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.5, 1.5]);
        Instance::new("sigma3", Source::RawCovariance, m).unwrap()
    }

    #[test]
    fn cut_model_examples() {
        let inst = sigma3();
        let k = Budget::new(2, 3).unwrap();
        let base = Support::complete(3, 2, &[0, 1]).unwrap();
        let (cut, _) = cut_at(&inst, &base).unwrap();
        let root = Support::root(3, 2);
        assert!((cut_model_bound(std::slice::from_ref(&cut), &root, k) - 2.25).abs() < 1e-12);
        assert_eq!(cut_model_bound(&[], &root, k), f64::INFINITY);

        let flat = Cut {
            base: base.clone(),
            value: 3.0,
            grad: DVector::zeros(3),
        };
        assert_eq!(cut_model_bound(std::slice::from_ref(&flat), &root, k), 3.0);
        let both = [flat, cut];
        assert!((cut_model_bound(&both, &root, k) - 2.25).abs() < 1e-12);
    }

    #[test]
    fn small_examples() {
        let opts = SolveOptions::default();
        let r = solve_exact(&sigma3(), Budget::new(2, 3).unwrap(), &opts).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.lower_bound - 2.0).abs() < 1e-12);

        let d = Instance::new(
            "d",
            Source::RawCovariance,
            DMatrix::from_diagonal(&DVector::from_row_slice(&[5.0, 4.0, 3.0, 2.0, 1.0])),
        )
        .unwrap();
        let r = solve_exact(&d, Budget::new(2, 5).unwrap(), &opts).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.lower_bound, 5.0);
        assert!(r.incumbent.unwrap().support.is_chosen(0));
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn pitprops_matches_oracle() {
        let inst = bundled("pitprops").unwrap();
        let k = Budget::new(5, 13).unwrap();
        let opts = SolveOptions { gap_tol: 1e-6, trace: true, ..Default::default() };
        let r = solve_exact(&inst, k, &opts).unwrap();
        let o = brute_force(&inst, k, DEFAULT_MAX_SUBSETS).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.lower_bound - o.objective).abs() <= 1e-6 * o.objective);
        assert!(r.upper_bound >= o.objective - 1e-9);
        assert!(!r.trace.is_empty());
        let mut buf = Vec::new();
        r.write_trace(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("node,depth,bound,action\n"));
    }

    #[test]
    fn node_limit_is_reported() {
        let inst = bundled("pitprops").unwrap();
        let k = Budget::new(5, 13).unwrap();
        let opts = SolveOptions { gap_tol: 0.0, node_limit: Some(1), ..Default::default() };
        let r = solve_exact(&inst, k, &opts).unwrap();
        assert!(matches!(r.status, SolveStatus::NodeLimit | SolveStatus::Optimal | SolveStatus::GapLimit));
        assert!(r.lower_bound <= r.upper_bound + 1e-9);
        assert!(r.incumbent.is_some());

        let cold = SolveOptions { warm_start: false, node_limit: Some(0), ..Default::default() };
        let r = solve_exact(&inst, k, &cold).unwrap();
        assert_eq!(r.status, SolveStatus::NodeLimit);
        assert!(r.incumbent.is_none());
    }
}
