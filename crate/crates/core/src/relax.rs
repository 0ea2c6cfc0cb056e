//! Convex relaxations of the cardinality-constrained eigenvalue problem.
//!
//! Every formulation maximizes `⟨Σ, X⟩` over `tr X = 1` with a fractional
//! indicator `z ∈ [0, 1]^p`, `eᵀz ≤ k`. Matrix variables are stored as their
//! lower triangles in the scaled vectorization order of [`crate::conic`], but
//! holding plain entries; PSD blocks apply the √2 factor themselves.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::conic::{
    solve_conic_warm, svec_index, AffineRow, Cone, ConicProblem, ConicSolution, ConicStatus, SolverSettings,
};
use crate::error::{Result, SpcaError};
use crate::instance::{Budget, Instance};
use crate::linalg;
use crate::subproblem::big_m_coefficient;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Largest dimension for which the two d'Aspremont formulations are built by default.
pub const DASPREMONT_MAX_P: usize = 60;
/// Largest dimension for which the exact PSD cone is the default.
pub const EXACT_PSD_MAX_P: usize = 150;
pub const DEFAULT_PSD_CUTS: usize = 20;
/// Cut loop stops once `λ_min(X)` reaches this value.
pub const PSD_CUT_TOL: f64 = -1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxationTag {
    Weak,
    Strong,
    StrongMinors,
    Daspremont,
    DaspremontStrong,
    Dnn,
}

impl RelaxationTag {
    pub const ALL: [RelaxationTag; 6] = [
        RelaxationTag::Weak,
        RelaxationTag::Strong,
        RelaxationTag::StrongMinors,
        RelaxationTag::Daspremont,
        RelaxationTag::DaspremontStrong,
        RelaxationTag::Dnn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelaxationTag::Weak => "weak",
            RelaxationTag::Strong => "strong",
            RelaxationTag::StrongMinors => "strong-minors",
            RelaxationTag::Daspremont => "daspremont",
            RelaxationTag::DaspremontStrong => "daspremont-strong",
            RelaxationTag::Dnn => "dnn",
        }
    }

    fn strong_rows(self) -> bool {
        matches!(
            self,
            RelaxationTag::Strong | RelaxationTag::StrongMinors | RelaxationTag::DaspremontStrong
        )
    }
}

impl fmt::Display for RelaxationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelaxationTag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown relaxation {s:?}"))
    }
}

/// How `X ⪰ 0` is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdMode {
    Exact,
    /// All 2×2 principal minors nonnegative.
    MinorsOnly,
    /// Minors plus up to `n` eigenvector cuts `⟨X, xxᵀ⟩ ≥ 0`.
    MinorsPlusCuts(usize),
}

impl PsdMode {
    pub fn default_for(p: usize) -> Self {
        if p <= EXACT_PSD_MAX_P {
            PsdMode::Exact
        } else {
            PsdMode::MinorsPlusCuts(DEFAULT_PSD_CUTS)
        }
    }
}

impl fmt::Display for PsdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsdMode::Exact => f.write_str("exact"),
            PsdMode::MinorsOnly => f.write_str("minors"),
            PsdMode::MinorsPlusCuts(n) => write!(f, "minors-cuts={n}"),
        }
    }
}

impl FromStr for PsdMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(PsdMode::Exact),
            "minors" => Ok(PsdMode::MinorsOnly),
            _ => s
                .strip_prefix("minors-cuts=")
                .and_then(|n| n.parse().ok())
                .map(PsdMode::MinorsPlusCuts)
                .ok_or_else(|| format!("unknown psd mode {s:?}; expected exact, minors or minors-cuts=N")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelaxationKind {
    pub tag: RelaxationTag,
    pub psd_mode: PsdMode,
}

impl RelaxationKind {
    /// Applies the forced modes: d'Aspremont and DNN need the exact cone,
    /// `strong-minors` never uses it.
    pub fn new(tag: RelaxationTag, psd_mode: PsdMode) -> Self {
        let psd_mode = match (tag, psd_mode) {
            (RelaxationTag::Daspremont | RelaxationTag::DaspremontStrong | RelaxationTag::Dnn, _) => PsdMode::Exact,
            (RelaxationTag::StrongMinors, PsdMode::Exact) => PsdMode::MinorsOnly,
            (_, m) => m,
        };
        Self { tag, psd_mode }
    }

    pub fn with_default_mode(tag: RelaxationTag, p: usize) -> Self {
        Self::new(tag, PsdMode::default_for(p))
    }
}

/// Column layout of a built relaxation.
#[derive(Debug, Clone)]
pub struct Layout {
    pub p: usize,
    pub x: usize,
    pub z: usize,
    /// Epigraph of `|X|` (strong kinds).
    pub u: Option<usize>,
    /// Lifted `zzᵀ` (DNN).
    pub zz: Option<usize>,
    /// One matrix per coordinate (d'Aspremont kinds).
    pub pmat: Option<usize>,
    pub n: usize,
}

impl Layout {
    fn tri(&self) -> usize {
        self.p * (self.p + 1) / 2
    }

    pub fn xcol(&self, i: usize, j: usize) -> usize {
        self.x + svec_index(self.p, i, j)
    }

    pub fn zcol(&self, i: usize) -> usize {
        self.z + i
    }

    fn ucol(&self, i: usize, j: usize) -> usize {
        self.u.expect("strong layout") + svec_index(self.p, i, j)
    }

    fn zzcol(&self, i: usize, j: usize) -> usize {
        self.zz.expect("dnn layout") + svec_index(self.p, i, j)
    }

    fn pcol(&self, t: usize, i: usize, j: usize) -> usize {
        self.pmat.expect("daspremont layout") + t * self.tri() + svec_index(self.p, i, j)
    }

    /// Symmetric matrix from the lower-triangle block starting at `off`.
    fn unpack(&self, v: &[f64], off: usize) -> DMatrix<f64> {
        let p = self.p;
        let mut m = DMatrix::zeros(p, p);
        for j in 0..p {
            for i in j..p {
                let val = v[off + svec_index(p, i, j)];
                m[(i, j)] = val;
                m[(j, i)] = val;
            }
        }
        m
    }

    pub fn x_matrix(&self, v: &[f64]) -> DMatrix<f64> {
        self.unpack(v, self.x)
    }
}

/// A built relaxation and its column layout.
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub problem: ConicProblem,
    pub layout: Layout,
    pub kind: RelaxationKind,
}

#[derive(Debug, Clone)]
pub struct RelaxationResult {
    pub upper_bound: f64,
    pub bound_certified: bool,
    pub objective_value: f64,
    pub z_frac: DVector<f64>,
    pub x: DMatrix<f64>,
    pub z_matrix: Option<DMatrix<f64>>,
    pub cuts_added: usize,
    pub iterations: usize,
    pub status: ConicStatus,
    /// Certified bound of each solve: the initial one, then one per cut round.
    pub round_bounds: Vec<f64>,
}

/// `Σ_{ij} w_ij X_ij` as terms over lower-triangle columns.
fn matrix_terms(layout: &Layout, w: &DMatrix<f64>, col: impl Fn(usize, usize) -> usize) -> Vec<(usize, f64)> {
    let p = layout.p;
    let mut terms = Vec::new();
    for j in 0..p {
        for i in j..p {
            let c = if i == j { w[(i, i)] } else { w[(i, j)] + w[(j, i)] };
            if c != 0.0 {
                terms.push((col(i, j), c));
            }
        }
    }
    terms
}

fn psd_rows(p: usize, entry: impl Fn(usize, usize) -> Vec<(usize, f64)>) -> Vec<AffineRow> {
    let mut rows = Vec::with_capacity(p * (p + 1) / 2);
    for j in 0..p {
        for i in j..p {
            let scale = if i == j { 1.0 } else { SQRT2 };
            rows.push(AffineRow::new(entry(i, j).into_iter().map(|(c, v)| (c, v * scale)).collect(), 0.0));
        }
    }
    rows
}

fn minors_blocks(prob: &mut ConicProblem, layout: &Layout) -> Result<()> {
    let p = layout.p;
    for i in 0..p {
        for j in i + 1..p {
            // X_ij² ≤ 2 · X_ii · (X_jj / 2)
            prob.add_block(
                Cone::Rsoc(3),
                vec![
                    AffineRow::var(layout.xcol(i, i)),
                    AffineRow::new(vec![(layout.xcol(j, j), 0.5)], 0.0),
                    AffineRow::var(layout.xcol(i, j)),
                ],
            )?;
        }
    }
    Ok(())
}

/// Row-wise `Σ_j X_ij² ≤ X_ii z_i` and `‖X‖₁ ≤ k` through the epigraph `U ≥ |X|`.
fn strong_blocks(prob: &mut ConicProblem, layout: &Layout, k: f64) -> Result<()> {
    let p = layout.p;
    for i in 0..p {
        let mut rows = vec![
            AffineRow::var(layout.xcol(i, i)),
            AffineRow::new(vec![(layout.zcol(i), 0.5)], 0.0),
        ];
        rows.extend((0..p).map(|j| AffineRow::var(layout.xcol(i, j))));
        prob.add_block(Cone::Rsoc(p + 2), rows)?;
    }
    let mut epi = Vec::with_capacity(p * (p + 1));
    let mut total = Vec::with_capacity(p * (p + 1) / 2);
    for j in 0..p {
        for i in j..p {
            let (u, x) = (layout.ucol(i, j), layout.xcol(i, j));
            epi.push(AffineRow::new(vec![(u, 1.0), (x, -1.0)], 0.0));
            epi.push(AffineRow::new(vec![(u, 1.0), (x, 1.0)], 0.0));
            total.push((u, if i == j { -1.0 } else { -2.0 }));
        }
    }
    epi.push(AffineRow::new(total, k));
    prob.add_block(Cone::NonNeg(epi.len()), epi)?;
    Ok(())
}

/// Columns of the symmetric square root: `Σ = Σ_t a_t a_tᵀ` and `a_iᵀa_j = Σ_ij`.
fn spectral_factors(sigma: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let eig = linalg::sym_eig_unchecked(sigma);
    let root = eig.reconstruct_with(|v| v.max(0.0).sqrt());
    (0..sigma.nrows()).map(|t| root.column(t).into_owned()).collect()
}

/// Builds the conic program for `kind`.
pub fn build(inst: &Instance, k: Budget, kind: RelaxationKind) -> Result<Relaxation> {
    let p = inst.p();
    let kf = k.get() as f64;
    let tri = p * (p + 1) / 2;
    let tag = kind.tag;
    let daspremont = matches!(tag, RelaxationTag::Daspremont | RelaxationTag::DaspremontStrong);
    if daspremont && p > DASPREMONT_MAX_P {
        return Err(SpcaError::Build(format!(
            "{tag} needs {} PSD blocks of size {p}; limited to p ≤ {DASPREMONT_MAX_P}",
            2 * p
        )));
    }
    if kind != RelaxationKind::new(tag, kind.psd_mode) {
        return Err(SpcaError::Build(format!("{tag} cannot use psd mode {}", kind.psd_mode)));
    }

    let mut n = tri + p;
    let u = tag.strong_rows().then(|| {
        let off = n;
        n += tri;
        off
    });
    let zz = (tag == RelaxationTag::Dnn).then(|| {
        let off = n;
        n += tri;
        off
    });
    let pmat = daspremont.then(|| {
        let off = n;
        n += p * tri;
        off
    });
    let layout = Layout { p, x: 0, z: tri, u, zz, pmat, n };
    let mut prob = ConicProblem::new(n);
    let sigma = inst.sigma();

    // objective
    if daspremont {
        for (t, a) in spectral_factors(sigma).iter().enumerate() {
            let aat = a * a.transpose();
            for (c, v) in matrix_terms(&layout, &aat, |i, j| layout.pcol(t, i, j)) {
                prob.set_objective(c, v);
            }
        }
    } else {
        for (c, v) in matrix_terms(&layout, sigma, |i, j| layout.xcol(i, j)) {
            prob.set_objective(c, v);
        }
    }

    // tr X = 1
    let trace: Vec<(usize, f64)> = (0..p).map(|i| (layout.xcol(i, i), 1.0)).collect();
    prob.add_block(Cone::Zero(1), vec![AffineRow::new(trace, -1.0)])?;

    // eᵀz ≤ k and z ∈ [0, 1]
    let card: Vec<(usize, f64)> = (0..p).map(|i| (layout.zcol(i), -1.0)).collect();
    prob.add_block(Cone::NonNeg(1), vec![AffineRow::new(card, kf)])?;
    prob.add_block(
        Cone::Box { lower: vec![0.0; p], upper: vec![1.0; p] },
        (0..p).map(|i| AffineRow::var(layout.zcol(i))).collect(),
    )?;

    match tag {
        RelaxationTag::Weak | RelaxationTag::Strong | RelaxationTag::StrongMinors => {
            // |X_ij| ≤ M_ij z_i over ordered pairs
            let mut rows = Vec::with_capacity(2 * p * p);
            for i in 0..p {
                for j in 0..p {
                    let m = big_m_coefficient(i, j);
                    let (x, z) = (layout.xcol(i, j), layout.zcol(i));
                    rows.push(AffineRow::new(vec![(z, m), (x, -1.0)], 0.0));
                    rows.push(AffineRow::new(vec![(z, m), (x, 1.0)], 0.0));
                }
            }
            prob.add_block(Cone::NonNeg(rows.len()), rows)?;
            if tag.strong_rows() {
                strong_blocks(&mut prob, &layout, kf)?;
            }
            match kind.psd_mode {
                PsdMode::Exact => {
                    prob.add_block(Cone::Psd(p), psd_rows(p, |i, j| vec![(layout.xcol(i, j), 1.0)]))?;
                }
                PsdMode::MinorsOnly | PsdMode::MinorsPlusCuts(_) => minors_blocks(&mut prob, &layout)?,
            }
        }
        RelaxationTag::Dnn => {
            let mut rows = Vec::new();
            let mut total = Vec::new();
            for j in 0..p {
                for i in j..p {
                    let m = big_m_coefficient(i, j);
                    let (x, zc) = (layout.xcol(i, j), layout.zzcol(i, j));
                    rows.push(AffineRow::new(vec![(zc, m), (x, -1.0)], 0.0));
                    rows.push(AffineRow::new(vec![(zc, m), (x, 1.0)], 0.0));
                    rows.push(AffineRow::var(zc));
                    total.push((zc, if i == j { -1.0 } else { -2.0 }));
                    if i != j {
                        let (zi, zj) = (layout.zcol(i), layout.zcol(j));
                        rows.push(AffineRow::new(vec![(zc, 1.0), (zi, -1.0), (zj, -1.0)], 1.0));
                        rows.push(AffineRow::new(vec![(zi, 1.0), (zc, -1.0)], 0.0));
                        rows.push(AffineRow::new(vec![(zj, 1.0), (zc, -1.0)], 0.0));
                    }
                }
            }
            rows.push(AffineRow::new(total, kf * kf));
            prob.add_block(Cone::NonNeg(rows.len()), rows)?;
            let diag: Vec<AffineRow> = (0..p)
                .map(|i| AffineRow::new(vec![(layout.zzcol(i, i), 1.0), (layout.zcol(i), -1.0)], 0.0))
                .collect();
            prob.add_block(Cone::Zero(p), diag)?;
            // [[1, zᵀ], [z, Z]] ⪰ 0
            let arrow = psd_rows(p + 1, |i, j| {
                if j == 0 && i == 0 {
                    vec![]
                } else if j == 0 {
                    vec![(layout.zcol(i - 1), 1.0)]
                } else {
                    vec![(layout.zzcol(i - 1, j - 1), 1.0)]
                }
            });
            let mut arrow = arrow;
            arrow[0].constant = 1.0;
            prob.add_block(Cone::Psd(p + 1), arrow)?;
            prob.add_block(Cone::Psd(p), psd_rows(p, |i, j| vec![(layout.xcol(i, j), 1.0)]))?;
        }
        RelaxationTag::Daspremont | RelaxationTag::DaspremontStrong => {
            let traces: Vec<AffineRow> = (0..p)
                .map(|t| {
                    let mut terms: Vec<(usize, f64)> = (0..p).map(|i| (layout.pcol(t, i, i), 1.0)).collect();
                    terms.push((layout.zcol(t), -1.0));
                    AffineRow::new(terms, 0.0)
                })
                .collect();
            prob.add_block(Cone::Zero(p), traces)?;
            for t in 0..p {
                prob.add_block(Cone::Psd(p), psd_rows(p, |i, j| vec![(layout.pcol(t, i, j), 1.0)]))?;
                prob.add_block(
                    Cone::Psd(p),
                    psd_rows(p, |i, j| vec![(layout.xcol(i, j), 1.0), (layout.pcol(t, i, j), -1.0)]),
                )?;
            }
            if tag.strong_rows() {
                strong_blocks(&mut prob, &layout, kf)?;
            }
        }
    }

    // bounds implied by the constraints, used for the safe dual bound
    let mut bounds = vec![(0.0, 0.0); n];
    let mut fill = |off: usize, diag: (f64, f64), off_diag: (f64, f64)| {
        for j in 0..p {
            for i in j..p {
                bounds[off + svec_index(p, i, j)] = if i == j { diag } else { off_diag };
            }
        }
    };
    fill(layout.x, (0.0, 1.0), (-0.5, 0.5));
    if let Some(off) = layout.u {
        fill(off, (0.0, kf), (0.0, kf / 2.0));
    }
    if let Some(off) = layout.zz {
        fill(off, (0.0, 1.0), (0.0, 1.0));
    }
    if let Some(off) = layout.pmat {
        for t in 0..p {
            fill(off + t * tri, (0.0, 1.0), (-0.5, 0.5));
        }
    }
    for i in 0..p {
        bounds[layout.zcol(i)] = (0.0, 1.0);
    }
    prob.set_var_bounds(bounds)?;

    Ok(Relaxation { problem: prob, layout, kind })
}

/// Most negative eigenpair of `x` if its eigenvalue is below [`PSD_CUT_TOL`].
pub fn psd_cut(x: &DMatrix<f64>) -> Option<(f64, DVector<f64>)> {
    let eig = linalg::sym_eig_unchecked(x);
    let lo = eig.min_value();
    (lo < PSD_CUT_TOL).then(|| (lo, eig.vectors.column(0).into_owned()))
}

fn cut_row(layout: &Layout, v: &DVector<f64>) -> AffineRow {
    let w = v * v.transpose();
    AffineRow::new(matrix_terms(layout, &w, |i, j| layout.xcol(i, j)), 0.0)
}

fn extract(rel: &Relaxation, sol: &ConicSolution) -> RelaxationResult {
    let layout = &rel.layout;
    let z_frac = DVector::from_iterator(
        layout.p,
        (0..layout.p).map(|i| sol.primal[layout.zcol(i)].clamp(0.0, 1.0)),
    );
    RelaxationResult {
        upper_bound: sol.upper_bound,
        bound_certified: sol.bound_certified,
        objective_value: sol.objective_value,
        z_frac,
        x: layout.x_matrix(&sol.primal),
        z_matrix: layout.zz.map(|off| layout.unpack(&sol.primal, off)),
        cuts_added: 0,
        iterations: sol.iterations,
        status: sol.status,
        round_bounds: vec![sol.upper_bound],
    }
}

/// Solves the relaxation, running the eigenvector cut loop for
/// `MinorsPlusCuts`. The reported bound is the smallest across rounds.
pub fn solve_relaxation(
    inst: &Instance,
    k: Budget,
    kind: RelaxationKind,
    settings: &SolverSettings,
) -> Result<RelaxationResult> {
    let mut rel = build(inst, k, kind)?;
    let sol = solve_conic_warm(&rel.problem, settings, None)?;
    let mut result = extract(&rel, &sol);
    if let PsdMode::MinorsPlusCuts(max_cuts) = kind.psd_mode {
        psd_cut_loop(&mut rel, &mut result, sol, max_cuts, settings)?;
    }
    Ok(result)
}

/// Appends eigenvector cuts `⟨X, xxᵀ⟩ ≥ 0` one at a time and re-solves
/// warm-started until `X` is PSD within tolerance or `max_cuts` are added.
pub fn psd_cut_loop(
    rel: &mut Relaxation,
    result: &mut RelaxationResult,
    mut sol: ConicSolution,
    max_cuts: usize,
    settings: &SolverSettings,
) -> Result<()> {
    while result.cuts_added < max_cuts {
        let Some((_, v)) = psd_cut(&result.x) else {
            break;
        };
        rel.problem.add_block(Cone::NonNeg(1), vec![cut_row(&rel.layout, &v)])?;
        let mut dual = sol.dual.clone();
        dual.push(0.0);
        sol = solve_conic_warm(&rel.problem, settings, Some((&sol.primal, &dual)))?;
        let cuts = result.cuts_added + 1;
        let iterations = result.iterations + sol.iterations;
        let previous = (result.upper_bound, result.bound_certified);
        let mut rounds = std::mem::take(&mut result.round_bounds);
        rounds.push(sol.upper_bound);
        *result = extract(rel, &sol);
        result.cuts_added = cuts;
        result.iterations = iterations;
        result.round_bounds = rounds;
        // each round's bound is valid on its own; keep the best certified one
        if previous.1 && (!result.bound_certified || previous.0 < result.upper_bound) {
            result.upper_bound = previous.0;
            result.bound_certified = true;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Source;

    fn inst(m: DMatrix<f64>) -> Instance {
        Instance::new("t", Source::RawCovariance, m).unwrap()
    }

    fn sigma3() -> Instance {
        inst(DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.5, 1.5]))
    }

    #[test]
    fn weak_layout_for_three_variables() {
        let rel = build(&sigma3(), Budget::new(2, 3).unwrap(), RelaxationKind::new(RelaxationTag::Weak, PsdMode::Exact)).unwrap();
        assert_eq!(rel.layout.n, 6 + 3);
        let cones = rel.problem.cones();
        assert_eq!(cones[0], Cone::Zero(1));
        assert_eq!(cones[1], Cone::NonNeg(1));
        assert!(matches!(cones[2], Cone::Box { .. }));
        assert_eq!(cones[3], Cone::NonNeg(18));
        assert_eq!(cones[4], Cone::Psd(3));
        assert_eq!(cones.len(), 5);
    }

    #[test]
    fn dnn_has_arrow_block() {
        let rel = build(&sigma3(), Budget::new(2, 3).unwrap(), RelaxationKind::new(RelaxationTag::Dnn, PsdMode::Exact)).unwrap();
        assert!(rel.problem.cones().contains(&Cone::Psd(4)));
        assert!(rel.problem.cones().contains(&Cone::Psd(3)));
        assert!(rel.layout.zz.is_some());
    }

    #[test]
    fn forced_modes() {
        let k = RelaxationKind::new(RelaxationTag::Daspremont, PsdMode::MinorsOnly);
        assert_eq!(k.psd_mode, PsdMode::Exact);
        let k = RelaxationKind::new(RelaxationTag::StrongMinors, PsdMode::Exact);
        assert_eq!(k.psd_mode, PsdMode::MinorsOnly);
        assert_eq!(PsdMode::default_for(150), PsdMode::Exact);
        assert_eq!(PsdMode::default_for(151), PsdMode::MinorsPlusCuts(20));
        let bad = RelaxationKind { tag: RelaxationTag::Dnn, psd_mode: PsdMode::MinorsOnly };
        assert!(matches!(build(&sigma3(), Budget::new(1, 3).unwrap(), bad), Err(SpcaError::Build(_))));
    }

    #[test]
    fn daspremont_size_limit() {
        let big = inst(DMatrix::identity(61, 61));
        let kind = RelaxationKind::new(RelaxationTag::Daspremont, PsdMode::Exact);
        assert!(matches!(build(&big, Budget::new(3, 61).unwrap(), kind), Err(SpcaError::Build(_))));
    }

    #[test]
    fn parse_and_display() {
        for m in [PsdMode::Exact, PsdMode::MinorsOnly, PsdMode::MinorsPlusCuts(7)] {
            assert_eq!(m.to_string().parse::<PsdMode>().unwrap(), m);
        }
        for t in RelaxationTag::ALL {
            assert_eq!(t.to_string().parse::<RelaxationTag>().unwrap(), t);
        }
        assert!("minors-cuts=x".parse::<PsdMode>().is_err());
        assert!("boolean".parse::<RelaxationTag>().is_err());
    }

    #[test]
    fn strong_on_identity_is_one() {
        let id = inst(DMatrix::identity(4, 4));
        let r = solve_relaxation(
            &id,
            Budget::new(2, 4).unwrap(),
            RelaxationKind::new(RelaxationTag::Strong, PsdMode::Exact),
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(r.bound_certified);
        assert!((r.upper_bound - 1.0).abs() < 1e-5, "{}", r.upper_bound);
    }

    #[test]
    fn psd_cut_picks_negative_direction() {
        let x = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -0.1]));
        let (lam, v) = psd_cut(&x).unwrap();
        assert!((lam + 0.1).abs() < 1e-12);
        assert!((v[1].abs() - 1.0).abs() < 1e-12 && v[0].abs() < 1e-12);
        assert!(psd_cut(&DMatrix::identity(3, 3)).is_none());
    }

    #[test]
    fn cut_loop_on_psd_output_adds_nothing() {
        let r = solve_relaxation(
            &sigma3(),
            Budget::new(2, 3).unwrap(),
            RelaxationKind::new(RelaxationTag::Strong, PsdMode::MinorsPlusCuts(5)),
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(r.upper_bound >= 2.0 - 1e-6);
        assert!(r.cuts_added <= 5);
    }
}
