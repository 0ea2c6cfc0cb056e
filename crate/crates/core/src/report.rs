//! JSON run reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{relative_gap, SolveReport};
use crate::heuristics::FeasiblePoint;

pub const SCHEMA_VERSION: u32 = 1;

/// One solve. Indices in `support` are 1-based; `x` has one loading per
/// coordinate. Bounds that a mode does not produce are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub instance: String,
    pub k: usize,
    pub mode: String,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub gap: Option<f64>,
    pub support: Vec<usize>,
    pub x: Vec<f64>,
    pub nodes: u64,
    pub cuts: usize,
    pub iterations: usize,
    pub time_seconds: f64,
    pub status: String,
}

impl Report {
    pub fn new(instance: &str, k: usize, mode: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            instance: instance.to_string(),
            k,
            mode: mode.to_string(),
            lower_bound: None,
            upper_bound: None,
            gap: None,
            support: Vec::new(),
            x: Vec::new(),
            nodes: 0,
            cuts: 0,
            iterations: 0,
            time_seconds: 0.0,
            status: String::new(),
        }
    }

    /// Fills the incumbent fields and the lower bound from a feasible point.
    pub fn with_point(mut self, pt: &FeasiblePoint) -> Self {
        self.support = pt.chosen().iter().map(|i| i + 1).collect();
        self.x = pt.x.iter().copied().collect();
        self.lower_bound = Some(pt.objective);
        self
    }

    /// Sets the upper bound and the gap against the current lower bound.
    pub fn with_upper(mut self, ub: f64) -> Self {
        self.upper_bound = Some(ub);
        self.gap = self.lower_bound.map(|lb| relative_gap(lb, ub));
        self
    }

    pub fn from_exact(instance: &str, k: usize, rep: &SolveReport) -> Self {
        let mut out = Self::new(instance, k, "exact");
        if let Some(pt) = &rep.incumbent {
            out = out.with_point(pt);
        }
        out.lower_bound = rep.incumbent.as_ref().map(|_| rep.lower_bound);
        out.upper_bound = Some(rep.upper_bound);
        out.gap = out.lower_bound.map(|_| rep.gap);
        out.nodes = rep.nodes_explored;
        out.cuts = rep.cuts_generated;
        out.time_seconds = rep.wall_time;
        out.status = rep.status.as_str().to_string();
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    /// `LB ≤ UB + 1e-9` whenever both bounds are present.
    pub fn bounds_consistent(&self) -> bool {
        match (self.lower_bound, self.upper_bound) {
            (Some(lb), Some(ub)) => lb <= ub + 1e-9,
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_field_order() {
        let mut r = Report::new("toy", 2, "oracle");
        r.support = vec![1, 3];
        r.x = vec![1.0, 0.0, 0.0];
        r.lower_bound = Some(2.0);
        r.upper_bound = Some(2.0);
        r.gap = Some(0.0);
        r.status = "optimal".into();
        let s = r.to_json().unwrap();
        let keys: Vec<usize> = ["\"schema\"", "\"instance\"", "\"k\"", "\"mode\"", "\"lower_bound\"", "\"support\"", "\"status\""]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(back.bounds_consistent());
    }
}
