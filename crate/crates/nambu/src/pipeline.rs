//! The trivialization pipeline from encodings to a verified vector field.
//!
//! Stages: encodings → formulas and pivots → skew pairs and pivots (d ≥ 4)
//! → Casimir flows `ȧ` → `Q` and `ρ̇` → the stacked system → its solution
//! → `X`, verification and homogeneous shifts.

use std::path::PathBuf;
use std::time::Instant;

use nambu_core::diffpoly::DiffPoly;
use nambu_core::formality::{dedupe, expand_sunflower, sunflower_2d};
use nambu_core::graph_complex::{cohomology_basis, DirectedGraph, Graph, GraphVector, UndirectedGraph};
use nambu_core::linalg::{pivots, ColumnEchelon};
use nambu_core::superfunction::{casimirs, OddSet};
use nambu_core::trivialize::{
    build_system, coboundary_sign_by_parts, combine, homogeneous_shifts, oriented_operation, rho_dot_by_parts, select,
    RhoDot, CASIMIR_FLOW_FACTOR,
};
use nambu_core::evaluation::{evaluation_matrix, graph_operation, MonomialBasis};
use nambu_core::{nambu_p, GraphEncoding, Rational, RingSpec, SparseMatQ, SparseVecQ, Superfunction};

use crate::batch::Workers;
use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::formats::{dump_formulas, dump_vector, dump_vectors, parse_formulas, parse_vector, parse_vectors, pq_strings, read_encodings, write_encodings};
use crate::report::{Counts, ShiftReport, SolveReport, SpecEcho, StageTiming, Timings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SkewMode {
    /// On for d ≥ 4.
    Auto,
    On,
    Off,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// The sunflower and its descendants.
    Builtin,
    File(PathBuf),
    Inline(Vec<GraphEncoding>),
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub dim: usize,
    pub cocycle: (usize, usize, usize),
    pub source: Source,
    pub skew: SkewMode,
    pub dedupe: bool,
    /// Keep only the first `n` encodings after deduplication.
    pub limit: Option<usize>,
    /// Compute all of `Q` and check every identity; otherwise only the
    /// division pair of `Q` is computed.
    pub verify: bool,
}

impl ProblemSpec {
    pub fn new(dim: usize) -> Self {
        ProblemSpec { dim, cocycle: (4, 6, 0), source: Source::Builtin, skew: SkewMode::Auto, dedupe: true, limit: None, verify: true }
    }

    pub fn skew_enabled(&self) -> bool {
        match self.skew {
            SkewMode::Auto => self.dim >= 4,
            SkewMode::On => true,
            SkewMode::Off => false,
        }
    }

    pub fn echo(&self) -> SpecEcho {
        let source = match &self.source {
            Source::Builtin => "builtin:sunflower".to_string(),
            Source::File(p) => format!("file:{}", p.display()),
            Source::Inline(e) => format!("inline:{}", e.len()),
        };
        let (v, e, k) = self.cocycle;
        SpecEcho {
            dim: self.dim,
            cocycle: [v, e, k],
            source,
            skew: self.skew_enabled(),
            dedupe: self.dedupe,
            limit: self.limit,
            verify: self.verify,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Encodings,
    Formulas,
    Skew,
    Flows,
    RhoDot,
    System,
    Solution,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Encodings => "encodings",
            Stage::Formulas => "formulas",
            Stage::Skew => "skew",
            Stage::Flows => "flows",
            Stage::RhoDot => "rhodot",
            Stage::System => "system",
            Stage::Solution => "solution",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    /// Return right after this stage, as if the run were interrupted.
    pub stop_after: Option<Stage>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembledSystem {
    pub matrix: SparseMatQ,
    pub rhs: SparseVecQ,
    pub block_rows: Vec<usize>,
}

/// Everything computed along the way, for callers that need more than the report.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub encodings: Vec<GraphEncoding>,
    pub pivots: Vec<usize>,
    pub skew_pivots: Vec<usize>,
    /// The encodings and formulas behind the system columns.
    pub candidate_encodings: Vec<GraphEncoding>,
    pub candidates: Vec<Superfunction>,
    pub adot: Vec<Superfunction>,
    pub rho: Option<RhoDot>,
    pub system: Option<AssembledSystem>,
    pub coefficients: Option<SparseVecQ>,
    pub kernel: Vec<SparseVecQ>,
    pub x: Option<Superfunction>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: SolveReport,
    pub timings: Timings,
    pub artifacts: Artifacts,
    /// Stages whose results were read back from the checkpoint.
    pub resumed: Vec<&'static str>,
}

/// The encodings named by the problem, deduplicated and truncated as requested.
/// Also returns the count before deduplication.
pub fn load_encodings(spec: &ProblemSpec) -> Result<(Vec<GraphEncoding>, usize)> {
    let raw = match &spec.source {
        Source::Builtin if spec.dim == 2 => sunflower_2d(),
        Source::Builtin => expand_sunflower(spec.dim)?,
        Source::File(path) => read_encodings(path, spec.dim)?,
        Source::Inline(list) => list.clone(),
    };
    if let Some(e) = raw.iter().find(|e| e.dim() != spec.dim) {
        return Err(Error::Config(format!("encoding {e} has dimension {}, expected {}", e.dim(), spec.dim)));
    }
    let n = raw.len();
    let mut list = if spec.dedupe { dedupe(&raw) } else { raw };
    if let Some(k) = spec.limit {
        list.truncate(k);
    }
    Ok((list, n))
}

pub fn cocycle(v: usize, e: usize, index: usize) -> Result<GraphVector<UndirectedGraph>> {
    let basis = cohomology_basis(v, e)?;
    let n = basis.len();
    basis.into_iter().nth(index).ok_or_else(|| Error::Config(format!("cohomology at ({v},{e}) has {n} elements, no index {index}")))
}

struct Stages<'a> {
    checkpoint: Option<&'a Checkpoint>,
    timings: Vec<StageTiming>,
    resumed: Vec<&'static str>,
    clock: Instant,
}

impl Stages<'_> {
    /// Loads `stage` from the checkpoint, or computes and stores it.
    fn run<T>(
        &mut self,
        stage: Stage,
        compute: impl FnOnce() -> Result<T>,
        encode: impl FnOnce(&T) -> String,
        decode: impl FnOnce(&str) -> Result<T>,
    ) -> Result<T> {
        let name = stage.name();
        if let Some(body) = self.checkpoint.map(|c| c.load(name)).transpose()?.flatten() {
            let value = decode(&body)?;
            self.finish(name, true);
            return Ok(value);
        }
        let value = compute()?;
        if let Some(c) = self.checkpoint {
            c.store(name, &encode(&value))?;
        }
        self.finish(name, false);
        Ok(value)
    }

    fn finish(&mut self, stage: &'static str, resumed: bool) {
        let now = Instant::now();
        self.timings.push(StageTiming { stage, seconds: (now - self.clock).as_secs_f64(), resumed });
        if resumed {
            self.resumed.push(stage);
        }
        self.clock = now;
    }
}

fn index_line(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ") + "\n"
}

fn parse_index_line(s: &str) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| Error::Config(format!("bad index `{t}` in checkpoint")))).collect()
}

fn split_sections(body: &str, n: usize) -> Result<Vec<&str>> {
    let parts: Vec<&str> = body.split("===\n").collect();
    if parts.len() != n {
        return Err(Error::Config(format!("checkpoint has {} sections, expected {n}", parts.len())));
    }
    Ok(parts)
}

/// `ȧ = c · Or(γ)(P, …, P, a)` for every Casimir, in parallel over graph terms.
fn casimir_flows(workers: &Workers, spec: &RingSpec, p: &Superfunction, op: &GraphVector<DirectedGraph>) -> Result<Vec<Superfunction>> {
    let n = op.terms().next().map_or(0, |(g, _)| g.vertex_count());
    let factor = Rational::from_i64(CASIMIR_FLOW_FACTOR);
    casimirs(spec)
        .iter()
        .map(|a| {
            let mut args: Vec<Superfunction> = (1..n).map(|_| p.clone()).collect();
            args.push(a.clone());
            Ok(workers.graph_operation(op, &args, None)?.scale(&factor))
        })
        .collect()
}

fn assemble(candidates: &[Superfunction], adot: &[Superfunction], rhodot: &DiffPoly, spec: &RingSpec) -> Result<AssembledSystem> {
    let sys = build_system(candidates, adot, rhodot, spec)?;
    let block_rows = sys.block_rows();
    Ok(AssembledSystem { matrix: sys.matrix, rhs: sys.rhs, block_rows })
}

pub fn run(spec: &ProblemSpec, opts: &RunOptions) -> Result<Outcome> {
    let start = Instant::now();
    let d = spec.dim;
    let ring = RingSpec::new(d)?;
    let workers = Workers::new(opts.jobs)?;
    let (encodings, encodings_input) = load_encodings(spec)?;

    let echo = spec.echo();
    let checkpoint = match &opts.checkpoint {
        Some(dir) => {
            let identity = format!("{}\n{}", serde_json::to_string(&echo)?, write_encodings(&encodings));
            Some(Checkpoint::open(dir, &identity)?)
        }
        None => None,
    };
    let mut st = Stages { checkpoint: checkpoint.as_ref(), timings: Vec::new(), resumed: Vec::new(), clock: start };
    st.finish(Stage::Encodings.name(), false);

    let mut art = Artifacts { encodings, ..Artifacts::default() };
    let mut report = SolveReport {
        spec: echo,
        status: "complete".into(),
        counts: Counts { encodings_input, encodings: art.encodings.len(), ..Counts::default() },
        pivots: Vec::new(),
        skew_pivots: None,
        candidates: Vec::new(),
        division_pair: None,
        rho_reconstruction: "not checked".into(),
        rho_dot: None,
        solvable: None,
        coefficients: None,
        kernel: Vec::new(),
        epsilon_sign: None,
        verification: "not checked".into(),
        shifts: Vec::new(),
        x: None,
    };
    let finish = |mut report: SolveReport, st: Stages, art: Artifacts, stopped: Option<Stage>| -> Result<Outcome> {
        if let Some(s) = stopped {
            report.status = format!("stopped after {}", s.name());
        }
        let timings = Timings { threads: workers.threads(), stages: st.timings, total_seconds: start.elapsed().as_secs_f64() };
        Ok(Outcome { report, timings, artifacts: art, resumed: st.resumed })
    };
    let stop = |s: Stage| opts.stop_after == Some(s);
    if stop(Stage::Encodings) {
        return finish(report, st, art, Some(Stage::Encodings));
    }

    // formulas and their independent subset
    let (formulas, piv) = st.run(
        Stage::Formulas,
        || {
            let f = workers.evaluate(&art.encodings)?;
            let piv = independent(&f, d)?;
            Ok((f, piv))
        },
        |(f, piv)| format!("{}===\n{}", index_line(piv), dump_formulas(f)),
        |body| {
            let s = split_sections(body, 2)?;
            Ok((parse_formulas(s[1], d, "formulas checkpoint")?, parse_index_line(s[0])?))
        },
    )?;
    report.counts.nonzero_formulas = formulas.iter().filter(|f| !f.is_zero()).count();
    report.counts.pivots = piv.len();
    report.pivots = piv.clone();
    art.pivots = piv;
    let pivot_encodings = select(&art.encodings, &art.pivots);
    let pivot_formulas = select(&formulas, &art.pivots);
    drop(formulas);
    if stop(Stage::Formulas) {
        return finish(report, st, art, Some(Stage::Formulas));
    }

    if spec.skew_enabled() {
        let (skew, spiv) = st.run(
            Stage::Skew,
            || {
                let s = workers.skew(&pivot_encodings)?;
                let piv = independent(&s, d)?;
                Ok((s, piv))
            },
            |(s, piv)| format!("{}===\n{}", index_line(piv), dump_formulas(s)),
            |body| {
                let s = split_sections(body, 2)?;
                Ok((parse_formulas(s[1], d, "skew checkpoint")?, parse_index_line(s[0])?))
            },
        )?;
        art.candidate_encodings = select(&pivot_encodings, &spiv);
        art.candidates = select(&skew, &spiv);
        report.counts.skew_pivots = Some(spiv.len());
        report.skew_pivots = Some(spiv.clone());
        art.skew_pivots = spiv;
    } else {
        art.candidate_encodings = pivot_encodings;
        art.candidates = pivot_formulas;
    }
    report.counts.candidates = art.candidates.len();
    report.candidates = art.candidate_encodings.iter().map(|e| e.to_string()).collect();
    if stop(Stage::Skew) {
        return finish(report, st, art, Some(Stage::Skew));
    }

    let gamma = cocycle(spec.cocycle.0, spec.cocycle.1, spec.cocycle.2)?;
    let op = oriented_operation(&gamma);
    report.counts.oriented_graphs = op.len();
    let p = nambu_p(&ring);
    let adot = st.run(
        Stage::Flows,
        || casimir_flows(&workers, &ring, &p, &op),
        |a| dump_formulas(a),
        |body| parse_formulas(body, d, "flows checkpoint"),
    )?;
    if adot.len() != d - 2 {
        return Err(Error::Config(format!("checkpoint holds {} Casimir flows, expected {}", adot.len(), d - 2)));
    }
    report.counts.adot_terms = adot.iter().map(Superfunction::term_count).collect();
    art.adot = adot;
    if stop(Stage::Flows) {
        return finish(report, st, art, Some(Stage::Flows));
    }

    // Q, either complete or only its division pair, then ρ̇
    let n = op.terms().next().map_or(0, |(g, _)| g.vertex_count());
    let q_args: Vec<Superfunction> = (0..n).map(|_| p.clone()).collect();
    // one odd pair of Q at a time, so the whole flow is never held
    let q_part = |s: OddSet| -> nambu_core::Result<DiffPoly> { Ok(graph_operation(&op, &q_args, Some(&[s]))?.component(s)) };
    let (rho, q_terms) = st.run(
        Stage::RhoDot,
        || {
            let mut terms = 0;
            let rho = rho_dot_by_parts(
                &ring,
                &art.adot,
                |s| {
                    let c = q_part(s)?;
                    terms += c.len();
                    Ok(c)
                },
                spec.verify,
            )?;
            Ok((rho, spec.verify.then_some(terms)))
        },
        |(rho, terms)| {
            let pair: Vec<usize> = rho.pair.indices().collect();
            let terms = terms.map_or("-".to_string(), |t| t.to_string());
            format!("{}{}\n{terms}\n{}\n", index_line(&pair), rho.reconstructed.is_some(), rho.rhodot)
        },
        |body| {
            let mut lines = body.lines();
            let mut next = || lines.next().ok_or_else(|| Error::Config("short rhodot checkpoint".into()));
            let pair = OddSet::from_indices(&parse_index_line(next()?)?)?;
            let reconstructed = (next()? == "true").then_some(true);
            let terms = next()?.parse().ok();
            let rhodot: DiffPoly = next()?.parse()?;
            Ok((RhoDot { rhodot, pair, reconstructed }, terms))
        },
    )?;
    let pair_idx: Vec<usize> = rho.pair.indices().collect();
    report.division_pair = Some([pair_idx[0], pair_idx[1]]);
    report.counts.q_terms = q_terms;
    report.counts.rhodot_terms = Some(rho.rhodot.len());
    report.rho_reconstruction = if rho.reconstructed == Some(true) { "true".into() } else { "not checked".into() };
    report.rho_dot = Some(rho.rhodot.to_string());
    let rhodot = rho.rhodot.clone();
    art.rho = Some(rho);
    if stop(Stage::RhoDot) {
        return finish(report, st, art, Some(Stage::RhoDot));
    }

    let system = st.run(
        Stage::System,
        || assemble(&art.candidates, &art.adot, &rhodot, &ring),
        |s| format!("{}===\n{}===\n{}", index_line(&s.block_rows), s.matrix.to_triplets(), dump_vector(&s.rhs)),
        |body| {
            let s = split_sections(body, 3)?;
            let block_rows = parse_index_line(s[0])?;
            let rhs = parse_vector(s[2], "system checkpoint")?;
            let matrix = SparseMatQ::from_triplets(s[1])?;
            Ok(AssembledSystem { matrix, rhs, block_rows })
        },
    )?;
    report.counts.system_rows = Some(system.matrix.rows());
    report.counts.system_cols = Some(system.matrix.cols());
    report.counts.block_rows = system.block_rows.clone();
    if stop(Stage::System) {
        art.system = Some(system);
        return finish(report, st, art, Some(Stage::System));
    }

    let (coefficients, kernel) = st.run(
        Stage::Solution,
        || {
            let ech = ColumnEchelon::new(&system.matrix);
            Ok((ech.solve(&system.rhs)?, ech.kernel_basis().to_vec()))
        },
        |(c, k)| {
            let c = c.as_ref().map_or("none\n".to_string(), dump_vector);
            format!("{c}===\n{}", dump_vectors(k))
        },
        |body| {
            let s = split_sections(body, 2)?;
            let c = if s[0].trim() == "none" { None } else { Some(parse_vector(s[0], "solution checkpoint")?) };
            Ok((c, parse_vectors(s[1], "solution checkpoint")?))
        },
    )?;
    art.system = Some(system);
    report.solvable = Some(coefficients.is_some());
    report.coefficients = coefficients.as_ref().map(pq_strings);
    report.kernel = kernel.iter().map(pq_strings).collect();

    if let Some(c) = &coefficients {
        let x = combine(c, &art.candidates, d)?;
        if spec.verify {
            let sign = coboundary_sign_by_parts(&p, &x, q_part)?;
            report.epsilon_sign = sign;
            report.verification = sign.is_some().to_string();
        }
        report.x = Some(x.to_string());
        art.x = Some(x);
    }
    let shifts = homogeneous_shifts(&p, &kernel, &art.candidates)?;
    report.shifts = shifts.iter().map(|s| ShiftReport { coefficients: pq_strings(&s.coefficients), poisson_closed: s.poisson_closed }).collect();
    art.coefficients = coefficients;
    art.kernel = kernel;
    st.finish("verify", false);
    finish(report, st, art, None)
}

/// Pivot columns of the evaluation matrix, skipping the matrix when empty.
fn independent(formulas: &[Superfunction], dim: usize) -> Result<Vec<usize>> {
    if formulas.is_empty() {
        return Ok(Vec::new());
    }
    let basis = MonomialBasis::for_vectors(formulas, dim)?;
    Ok(pivots(&evaluation_matrix(formulas, &basis)?))
}
