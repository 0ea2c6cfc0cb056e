//! Support-recovery experiments on spiked covariance instances.

use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::conic::SolverSettings;
use crate::error::{Result, SpcaError};
use crate::exact::{relative_gap, solve_exact, SolveOptions};
use crate::heuristics::{forward_greedy, sorting_baseline, tpm_default, FeasiblePoint};
use crate::instance::{Budget, Instance};
use crate::relax::{solve_relaxation, RelaxationKind, RelaxationTag};
use crate::rounding::greedy_round;
use crate::spiked::{generate_spiked, SpikedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    RelaxRound,
    Greedy,
    Tpm,
    Sorting,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Exact, Method::RelaxRound, Method::Greedy, Method::Tpm, Method::Sorting];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::RelaxRound => "relax-round",
            Method::Greedy => "greedy",
            Method::Tpm => "tpm",
            Method::Sorting => "sorting",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: SpikedModel,
    pub instances: usize,
    pub methods: Vec<Method>,
    pub k_grid: Vec<usize>,
    pub exact_time_limit: Duration,
    pub relaxation: RelaxationKind,
    pub relax_settings: SolverSettings,
}

impl ExperimentConfig {
    /// All methods, `k ∈ {5, 10, …, 40}`, 30 s per exact solve.
    pub fn new(model: SpikedModel, instances: usize) -> Self {
        Self {
            model,
            instances,
            methods: Method::ALL.to_vec(),
            k_grid: (1..=8).map(|i| 5 * i).collect(),
            exact_time_limit: Duration::from_secs(30),
            relaxation: RelaxationKind::with_default_mode(RelaxationTag::Strong, model.p),
            relax_settings: SolverSettings {
                tol: 1e-4,
                ..SolverSettings::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub instance: String,
    pub method: Method,
    pub k: usize,
    pub tpr: f64,
    pub fpr: f64,
    pub objective: f64,
    /// Relative gap to the method's own upper bound (exact and relax-round).
    pub gap: Option<f64>,
    pub seconds: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub auc: f64,
    /// Per-k means over instances, in grid order.
    pub roc: Vec<RocPoint>,
    /// Mean wall time per solve.
    pub time_seconds: f64,
    pub mean_gap: Option<f64>,
    pub rows: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RocPoint {
    pub k: usize,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub schema: u32,
    pub p: usize,
    pub n: usize,
    pub sigma_snr: f64,
    pub instances: usize,
    pub k_grid: Vec<usize>,
    pub methods: Vec<MethodSummary>,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub summary: ExperimentSummary,
}

/// True and false positive rates of `chosen` against `truth`.
pub fn tpr_fpr(chosen: &[usize], truth: &[bool]) -> (f64, f64) {
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    let hits = chosen.iter().filter(|&&i| truth[i]).count();
    let misses = chosen.len() - hits;
    let rate = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    (rate(hits, positives), rate(misses, negatives))
}

/// Trapezoidal area under `(fpr, tpr)` points, anchored at `(0, 0)` and `(1, 1)`.
pub fn auc(points: &[(f64, f64)]) -> f64 {
    let mut pts = Vec::with_capacity(points.len() + 2);
    pts.push((0.0, 0.0));
    pts.extend_from_slice(points);
    pts.push((1.0, 1.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum()
}

struct Outcome {
    point: FeasiblePoint,
    gap: Option<f64>,
    status: String,
}

fn run_method(cfg: &ExperimentConfig, inst: &Instance, k: Budget, method: Method) -> Result<Outcome> {
    let heuristic = |point: FeasiblePoint| Outcome { point, gap: None, status: "ok".into() };
    Ok(match method {
        Method::Greedy => heuristic(forward_greedy(inst, k)),
        Method::Tpm => heuristic(tpm_default(inst, k)),
        Method::Sorting => heuristic(sorting_baseline(inst, k)),
        Method::RelaxRound => {
            let rel = solve_relaxation(inst, k, cfg.relaxation, &cfg.relax_settings)?;
            let point = greedy_round(inst, k, &rel.z_frac);
            let gap = relative_gap(point.objective, rel.upper_bound);
            Outcome { point, gap: Some(gap), status: rel.status.as_str().to_string() }
        }
        Method::Exact => {
            let opts = SolveOptions { time_limit: Some(cfg.exact_time_limit), ..SolveOptions::default() };
            let rep = solve_exact(inst, k, &opts)?;
            let point = rep
                .incumbent
                .clone()
                .ok_or_else(|| SpcaError::Domain("no incumbent within the limits".into()))?;
            Outcome { point, gap: Some(rep.gap), status: rep.status.as_str().to_string() }
        }
    })
}

/// Runs every (instance, k, method) cell. Cells run in parallel; rows come
/// back in cell order. A failed cell is counted and skipped.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut instances = Vec::with_capacity(cfg.instances);
    for i in 0..cfg.instances {
        let model = SpikedModel { seed: cfg.model.seed + i as u64, ..cfg.model };
        instances.push(generate_spiked(&model)?);
    }
    for &k in &cfg.k_grid {
        Budget::new(k, cfg.model.p)?;
    }
    let cells: Vec<(usize, usize, Method)> = (0..instances.len())
        .flat_map(|i| cfg.k_grid.iter().flat_map(move |&k| cfg.methods.iter().map(move |&m| (i, k, m))))
        .collect();
    let outcomes: Vec<Option<ExperimentRow>> = cells
        .par_iter()
        .map(|&(i, k, method)| {
            let (inst, truth) = &instances[i];
            let start = Instant::now();
            let outcome = run_method(cfg, inst, Budget::new(k, inst.p()).ok()?, method).ok()?;
            let seconds = start.elapsed().as_secs_f64();
            let (tpr, fpr) = tpr_fpr(&outcome.point.chosen(), truth);
            Some(ExperimentRow {
                instance: inst.name().to_string(),
                method,
                k,
                tpr,
                fpr,
                objective: outcome.point.objective,
                gap: outcome.gap,
                seconds,
                status: outcome.status,
            })
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    let rows: Vec<ExperimentRow> = outcomes.into_iter().flatten().collect();

    let methods = cfg
        .methods
        .iter()
        .map(|&method| summarize(method, &cfg.k_grid, &rows))
        .collect();
    let summary = ExperimentSummary {
        schema: crate::report::SCHEMA_VERSION,
        p: cfg.model.p,
        n: cfg.model.n,
        sigma_snr: cfg.model.sigma_snr,
        instances: cfg.instances,
        k_grid: cfg.k_grid.clone(),
        methods,
        failures,
    };
    Ok(ExperimentResult { rows, summary })
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(method: Method, k_grid: &[usize], rows: &[ExperimentRow]) -> MethodSummary {
    let mine: Vec<&ExperimentRow> = rows.iter().filter(|r| r.method == method).collect();
    let roc: Vec<RocPoint> = k_grid
        .iter()
        .filter_map(|&k| {
            let at_k: Vec<&&ExperimentRow> = mine.iter().filter(|r| r.k == k).collect();
            Some(RocPoint {
                k,
                fpr: mean(at_k.iter().map(|r| r.fpr))?,
                tpr: mean(at_k.iter().map(|r| r.tpr))?,
            })
        })
        .collect();
    let pts: Vec<(f64, f64)> = roc.iter().map(|r| (r.fpr, r.tpr)).collect();
    MethodSummary {
        method,
        auc: auc(&pts),
        roc,
        time_seconds: mean(mine.iter().map(|r| r.seconds)).unwrap_or(0.0),
        mean_gap: mean(mine.iter().filter_map(|r| r.gap)),
        rows: mine.len(),
    }
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["instance", "method", "k", "tpr", "fpr", "objective", "gap", "seconds", "status"])?;
        for r in &self.rows {
            w.write_record([
                r.instance.clone(),
                r.method.as_str().to_string(),
                r.k.to_string(),
                r.tpr.to_string(),
                r.fpr.to_string(),
                r.objective.to_string(),
                r.gap.map_or(String::new(), |g| g.to_string()),
                format!("{:.6}", r.seconds),
                r.status.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.summary)?;
        s.push('\n');
        Ok(s)
    }

    pub fn auc(&self, method: Method) -> Option<f64> {
        self.summary.methods.iter().find(|m| m.method == method).map(|m| m.auc)
    }
}
