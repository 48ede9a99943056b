//! The solve report. Its JSON is a pure function of the problem: no
//! timings, thread counts or host data, so reruns are byte-identical.
//! Timings go to a separate sidecar file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecEcho {
    pub dim: usize,
    /// `[V, E, index]` into the cohomology basis.
    pub cocycle: [usize; 3],
    pub source: String,
    pub skew: bool,
    pub dedupe: bool,
    pub limit: Option<usize>,
    pub verify: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub encodings_input: usize,
    pub encodings: usize,
    pub nonzero_formulas: usize,
    pub pivots: usize,
    pub skew_pivots: Option<usize>,
    pub candidates: usize,
    pub oriented_graphs: usize,
    pub adot_terms: Vec<usize>,
    pub q_terms: Option<usize>,
    pub rhodot_terms: Option<usize>,
    pub system_rows: Option<usize>,
    pub system_cols: Option<usize>,
    pub block_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    pub coefficients: Vec<String>,
    pub poisson_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub spec: SpecEcho,
    /// `complete`, or `stopped after <stage>`.
    pub status: String,
    pub counts: Counts,
    /// Indices into the (deduplicated) encoding list.
    pub pivots: Vec<usize>,
    /// Indices into `pivots`, when skew-symmetrization ran.
    pub skew_pivots: Option<Vec<usize>>,
    /// The encoding behind each column of the system.
    pub candidates: Vec<String>,
    pub division_pair: Option<[usize; 2]>,
    /// `true`, or `not checked` when only the division pair of `Q` was computed.
    pub rho_reconstruction: String,
    pub rho_dot: Option<String>,
    pub solvable: Option<bool>,
    pub coefficients: Option<Vec<String>>,
    pub kernel: Vec<Vec<String>>,
    pub epsilon_sign: Option<i8>,
    /// `true`, `false` or `not checked`.
    pub verification: String,
    pub shifts: Vec<ShiftReport>,
    pub x: Option<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
    pub resumed: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub threads: usize,
    pub stages: Vec<StageTiming>,
    pub total_seconds: f64,
}

/// `REPORT.json` → `REPORT.timings.json`.
pub fn timings_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    report.with_file_name(format!("{stem}.timings.json"))
}

pub fn write(report: &SolveReport, timings: &Timings, path: &Path) -> Result<()> {
    fs::write(path, report.to_json()?).map_err(io(path))?;
    let side = timings_path(path);
    fs::write(&side, serde_json::to_string_pretty(timings)? + "\n").map_err(io(&side))
}
