//! Problem data: loading, normalization and validation of covariance
//! matrices, plus the bundled reference datasets.

use std::fmt;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpcaError};
use crate::linalg;

/// Inputs whose most negative eigenvalue is above `-NUMERICAL_PSD_TOL·λ_max`
/// are accepted unchanged.
pub const NUMERICAL_PSD_TOL: f64 = 1e-10;
/// Below `-CLIP_PSD_TOL·λ_max` the input is rejected; in between it is clipped.
pub const CLIP_PSD_TOL: f64 = 1e-6;
const ASYMMETRY_TOL: f64 = 1e-12;
const UNIT_DIAGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    RawCovariance,
    CorrelationFromData,
    Bundled,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::RawCovariance => "raw-covariance",
            Source::CorrelationFromData => "correlation-from-data",
            Source::Bundled => "bundled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvMode {
    /// Rows are observations, columns are variables.
    DataMatrix,
    /// The file already holds a p×p covariance or correlation matrix.
    Covariance,
}

/// A validated symmetric PSD matrix. Immutable once constructed.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    source: Source,
    sigma: DMatrix<f64>,
    lambda_max: f64,
    psd_clipped: bool,
}

impl Instance {
    /// Validates `sigma`: symmetrizes it, rejects matrices that are clearly
    /// indefinite and clips eigenvalues that are only slightly negative.
    pub fn new(name: impl Into<String>, source: Source, sigma: DMatrix<f64>) -> Result<Self> {
        let name = name.into();
        let p = sigma.nrows();
        if p == 0 || sigma.ncols() != p {
            return Err(SpcaError::Validation(format!(
                "covariance must be square and non-empty, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if let Some(bad) = sigma.iter().find(|v| !v.is_finite()) {
            return Err(SpcaError::Validation(format!("non-finite entry {bad}")));
        }
        let mut sigma = sigma;
        let asym = linalg::asymmetry(&sigma);
        let scale = linalg::max_abs(&sigma).max(f64::MIN_POSITIVE);
        if asym > 1e-6 * scale {
            return Err(SpcaError::Validation(format!(
                "matrix is not symmetric (max |S_ij - S_ji| = {asym:e})"
            )));
        }
        if asym > 0.0 {
            linalg::symmetrize_in_place(&mut sigma);
        }
        debug_assert!(linalg::asymmetry(&sigma) <= ASYMMETRY_TOL * scale);

        let eig = linalg::sym_eig_unchecked(&sigma);
        let top = eig.max_value();
        let bottom = eig.min_value();
        let mut psd_clipped = false;
        if top < 0.0 || bottom < -CLIP_PSD_TOL * top.abs() {
            return Err(SpcaError::Validation(format!(
                "matrix is not positive semidefinite (smallest eigenvalue {bottom:.6e}, largest {top:.6e})"
            )));
        }
        if bottom < -NUMERICAL_PSD_TOL * top {
            sigma = eig.reconstruct_with(|l| l.max(0.0));
            psd_clipped = true;
        }

        if source == Source::CorrelationFromData {
            for i in 0..p {
                let d = sigma[(i, i)];
                if (d - 1.0).abs() > UNIT_DIAGONAL_TOL {
                    return Err(SpcaError::Validation(format!(
                        "correlation matrix diagonal entry {} is {d}, expected 1",
                        i + 1
                    )));
                }
            }
        }

        let lambda_max = if psd_clipped { linalg::lambda_max(&sigma) } else { top };
        Ok(Self {
            name,
            source,
            sigma,
            lambda_max,
            psd_clipped,
        })
    }

    pub fn p(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Largest eigenvalue of the full matrix.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// True when slightly negative eigenvalues were clipped on load.
    pub fn psd_clipped(&self) -> bool {
        self.psd_clipped
    }

    /// Writes the matrix as a headerless CSV using shortest round-trip
    /// formatting, so that loading it back in covariance mode is lossless.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| SpcaError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
        for i in 0..self.p() {
            let row: Vec<String> = (0..self.p()).map(|j| format!("{:?}", self.sigma[(i, j)])).collect();
            writeln!(file, "{}", row.join(",")).map_err(io_err)?;
        }
        file.flush().map_err(io_err)
    }
}

/// Validated sparsity budget `1 ≤ k ≤ p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(usize);

impl Budget {
    pub fn new(k: usize, p: usize) -> Result<Self> {
        if k == 0 {
            return Err(SpcaError::Validation("k must be ≥ 1".into()));
        }
        if k > p {
            return Err(SpcaError::Validation(format!("k = {k} exceeds the dimension p = {p}")));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn read_numeric_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => SpcaError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => SpcaError::Validation(format!("{}: {other:?}", path.display())),
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(col, cell)| cell.parse::<f64>().map_err(|_| col))
            .collect();
        if line == 0 && parsed.iter().any(|c| c.is_err()) {
            // non-numeric first row: header
            continue;
        }
        let mut values = Vec::with_capacity(parsed.len());
        for (col, cell) in parsed.into_iter().enumerate() {
            match cell {
                Ok(v) => values.push(v),
                Err(_) => {
                    return Err(SpcaError::Parse {
                        path: path.to_path_buf(),
                        row: line + 1,
                        col: col + 1,
                        cell: record.get(col).unwrap_or_default().to_string(),
                    })
                }
            }
        }
        if let Some(first) = rows.first() {
            if first.len() != values.len() {
                return Err(SpcaError::Validation(format!(
                    "{}: row {} has {} columns, expected {}",
                    path.display(),
                    line + 1,
                    values.len(),
                    first.len()
                )));
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(SpcaError::Validation(format!("{}: no numeric rows", path.display())));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Sample covariance `AᵀA/(n−1)` of the centered columns of `data`
/// (rows = observations). With `normalize` the columns are also scaled to
/// unit sample standard deviation, giving a correlation matrix.
pub fn covariance_from_data(data: &DMatrix<f64>, normalize: bool) -> Result<DMatrix<f64>> {
    let (n, p) = data.shape();
    if n < 2 {
        return Err(SpcaError::Validation(format!("need at least 2 observations, got {n}")));
    }
    let mut centered = data.clone();
    for j in 0..p {
        let mut col = centered.column_mut(j);
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
        if normalize {
            let sd = (col.norm_squared() / (n - 1) as f64).sqrt();
            if !(sd > 0.0) || sd < 1e-300 {
                return Err(SpcaError::Validation(format!(
                    "column {} has zero variance and cannot be normalized",
                    j + 1
                )));
            }
            col /= sd;
        }
    }
    let mut sigma = centered.transpose() * &centered / (n - 1) as f64;
    linalg::symmetrize_in_place(&mut sigma);
    if normalize {
        // unit diagonal up to rounding; pin it exactly
        for i in 0..p {
            sigma[(i, i)] = 1.0;
        }
    }
    Ok(sigma)
}

pub fn load_csv(path: &Path, mode: CsvMode, normalize: bool) -> Result<Instance> {
    let raw = read_numeric_csv(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    match mode {
        CsvMode::Covariance => {
            if raw.nrows() != raw.ncols() {
                return Err(SpcaError::Validation(format!(
                    "covariance file must be square, got {}x{}",
                    raw.nrows(),
                    raw.ncols()
                )));
            }
            Instance::new(name, Source::RawCovariance, raw)
        }
        CsvMode::DataMatrix => {
            let sigma = covariance_from_data(&raw, normalize)?;
            let source = if normalize {
                Source::CorrelationFromData
            } else {
                Source::RawCovariance
            };
            Instance::new(name, source, sigma)
        }
    }
}

pub const BUNDLED: &[&str] = &["pitprops"];

/// Correlation matrix of the 13 physical properties of pitprops (Jeffers, 1967).
#[rustfmt::skip]
const PITPROPS: [[f64; 13]; 13] = [
    [ 1.000,  0.954,  0.364,  0.342, -0.129,  0.313,  0.496,  0.424,  0.592,  0.545,  0.084, -0.019,  0.134],
    [ 0.954,  1.000,  0.297,  0.284, -0.118,  0.291,  0.503,  0.419,  0.648,  0.569,  0.076, -0.036,  0.144],
    [ 0.364,  0.297,  1.000,  0.882, -0.148,  0.153, -0.029, -0.054,  0.125, -0.081,  0.162,  0.220,  0.126],
    [ 0.342,  0.284,  0.882,  1.000,  0.220,  0.381,  0.174, -0.059,  0.137, -0.014,  0.097,  0.169,  0.015],
    [-0.129, -0.118, -0.148,  0.220,  1.000,  0.364,  0.296,  0.004, -0.039,  0.037, -0.091, -0.145, -0.208],
    [ 0.313,  0.291,  0.153,  0.381,  0.364,  1.000,  0.813,  0.090,  0.211,  0.274, -0.036,  0.024, -0.329],
    [ 0.496,  0.503, -0.029,  0.174,  0.296,  0.813,  1.000,  0.372,  0.465,  0.679, -0.113, -0.232, -0.424],
    [ 0.424,  0.419, -0.054, -0.059,  0.004,  0.090,  0.372,  1.000,  0.482,  0.557,  0.061, -0.357, -0.202],
    [ 0.592,  0.648,  0.125,  0.137, -0.039,  0.211,  0.465,  0.482,  1.000,  0.526,  0.085, -0.127, -0.076],
    [ 0.545,  0.569, -0.081, -0.014,  0.037,  0.274,  0.679,  0.557,  0.526,  1.000, -0.319, -0.368, -0.291],
    [ 0.084,  0.076,  0.162,  0.097, -0.091, -0.036, -0.113,  0.061,  0.085, -0.319,  1.000,  0.029,  0.007],
    [-0.019, -0.036,  0.220,  0.169, -0.145,  0.024, -0.232, -0.357, -0.127, -0.368,  0.029,  1.000,  0.184],
    [ 0.134,  0.144,  0.126,  0.015, -0.208, -0.329, -0.424, -0.202, -0.076, -0.291,  0.007,  0.184,  1.000],
];

pub fn bundled(name: &str) -> Result<Instance> {
    match name {
        "pitprops" => {
            let sigma = DMatrix::from_fn(13, 13, |i, j| PITPROPS[i][j]);
            Instance::new("pitprops", Source::Bundled, sigma)
        }
        _ => Err(SpcaError::UnknownDataset {
            name: name.to_string(),
            available: BUNDLED.to_vec(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn anticorrelated_columns() {
        let f = write_tmp("1,-1\n-1,1\n");
        let inst = load_csv(f.path(), CsvMode::DataMatrix, true).unwrap();
        assert_eq!(inst.source(), Source::CorrelationFromData);
        let s = inst.sigma();
        assert!((s[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((s[(1, 1)] - 1.0).abs() < 1e-15);
        assert!((s[(0, 1)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_mode_accepts_pd() {
        let f = write_tmp("2,1\n1,2\n");
        let inst = load_csv(f.path(), CsvMode::Covariance, false).unwrap();
        assert_eq!(inst.p(), 2);
        assert!(!inst.psd_clipped());
        assert!((inst.lambda_max() - 3.0).abs() < 1e-14);
        let eig = linalg::sym_eig(inst.sigma()).unwrap();
        assert!((eig.min_value() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn covariance_mode_rejects_indefinite() {
        let f = write_tmp("1,2\n2,1\n");
        let err = load_csv(f.path(), CsvMode::Covariance, false).unwrap_err();
        assert!(matches!(err, SpcaError::Validation(_)), "{err}");
    }

    #[test]
    fn near_psd_is_clipped() {
        // eigenvalues 2 and -1e-8
        let a = 1.0 - 0.5e-8;
        let b = 1.0 + 0.5e-8;
        let f = write_tmp(&format!("{a:?},{b:?}\n{b:?},{a:?}\n"));
        let inst = load_csv(f.path(), CsvMode::Covariance, false).unwrap();
        assert!(inst.psd_clipped());
        let eig = linalg::sym_eig(inst.sigma()).unwrap();
        assert!(eig.min_value() >= -1e-12);
    }

    #[test]
    fn parse_error_reports_position() {
        let f = write_tmp("1,2\n3,x\n");
        match load_csv(f.path(), CsvMode::DataMatrix, false).unwrap_err() {
            SpcaError::Parse { row, col, cell, .. } => {
                assert_eq!((row, col), (2, 2));
                assert_eq!(cell, "x");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn header_row_is_skipped() {
        let f = write_tmp("a,b\n1,2\n3,5\n4,4\n");
        let inst = load_csv(f.path(), CsvMode::DataMatrix, true).unwrap();
        assert_eq!(inst.p(), 2);
    }

    #[test]
    fn zero_variance_column_named() {
        let f = write_tmp("1,7\n2,7\n3,7\n");
        let err = load_csv(f.path(), CsvMode::DataMatrix, true).unwrap_err();
        assert!(err.to_string().contains("column 2"), "{err}");
    }

    #[test]
    fn pitprops_shape() {
        let inst = bundled("pitprops").unwrap();
        assert_eq!(inst.p(), 13);
        assert!((0..13).all(|i| inst.sigma()[(i, i)] == 1.0));
        assert_eq!(linalg::asymmetry(inst.sigma()), 0.0);
        assert!(!inst.psd_clipped());
    }

    #[test]
    fn unknown_dataset_lists_available() {
        let err = bundled("iris").unwrap_err();
        assert!(err.to_string().contains("pitprops"));
    }

    #[test]
    fn budget_bounds() {
        assert!(Budget::new(0, 3).is_err());
        assert!(Budget::new(4, 3).is_err());
        assert_eq!(Budget::new(3, 3).unwrap().get(), 3);
    }

    #[test]
    fn save_load_round_trip_is_bit_identical() {
        let inst = bundled("pitprops").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pit.csv");
        inst.save_csv(&path).unwrap();
        let back = load_csv(&path, CsvMode::Covariance, false).unwrap();
        assert_eq!(back.sigma(), inst.sigma());
    }
}
