use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nambu::formats::write_encodings;
use nambu::pipeline::load_encodings;
use nambu::{report, run, Error, ProblemSpec, Result, RunOptions, SkewMode, Source};

#[derive(Parser)]
#[command(name = "nambu", version, about = "Exact graph-flow trivialization for Nambu-Poisson brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a vector field trivializing the graph flow.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the encodings the solver would start from.
    Expand {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Print a basis of graph cohomology at V vertices and E edges.
    Cohomology { vertices: usize, edges: usize },
    /// Print the homogeneous solutions of the system and whether each is Poisson-closed.
    Shifts {
        #[command(flatten)]
        problem: Problem,
    },
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, conflicts_with = "builtin")]
    encodings: Option<PathBuf>,
    /// Built-in family; only `sunflower` exists.
    #[arg(long, value_parser = ["sunflower"])]
    builtin: Option<String>,
    /// Keep every encoding, including isomorphic repeats.
    #[arg(long)]
    no_dedupe: bool,
    /// Keep only the first N encodings after deduplication.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct Problem {
    #[command(flatten)]
    source: SourceArgs,
    /// Cohomology class `V,E,IDX`.
    #[arg(long, default_value = "4,6,0")]
    cocycle: String,
    #[arg(long, value_enum, default_value_t = SkewMode::Auto)]
    skew: SkewMode,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Compute only the division pair of the flow and skip the final identity checks.
    #[arg(long)]
    no_verify: bool,
}

impl SourceArgs {
    fn spec(&self) -> ProblemSpec {
        let mut spec = ProblemSpec::new(self.dim);
        spec.source = match &self.encodings {
            Some(p) => Source::File(p.clone()),
            None => Source::Builtin,
        };
        spec.dedupe = !self.no_dedupe;
        spec.limit = self.limit;
        spec
    }
}

impl Problem {
    fn spec(&self) -> Result<(ProblemSpec, RunOptions)> {
        let mut spec = self.source.spec();
        let parts: Vec<usize> = self
            .cocycle
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("bad --cocycle `{}`", self.cocycle))))
            .collect::<Result<_>>()?;
        let [v, e, k] = parts[..] else {
            return Err(Error::Config(format!("--cocycle needs V,E,IDX, got `{}`", self.cocycle)));
        };
        spec.cocycle = (v, e, k);
        spec.skew = self.skew;
        spec.verify = !self.no_verify;
        Ok((spec, RunOptions { jobs: self.jobs, checkpoint: self.checkpoint.clone(), stop_after: None }))
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { problem, out } => {
            let (spec, opts) = problem.spec()?;
            let outcome = run(&spec, &opts)?;
            report::write(&outcome.report, &outcome.timings, &out)?;
            let r = &outcome.report;
            eprintln!(
                "{} candidates, system {}x{}, solvable {}, verification {}",
                r.counts.candidates,
                r.counts.system_rows.unwrap_or(0),
                r.counts.system_cols.unwrap_or(0),
                r.solvable.map_or("-".into(), |b| b.to_string()),
                r.verification
            );
        }
        Command::Expand { source } => {
            let (list, n) = load_encodings(&source.spec())?;
            print!("{}", write_encodings(&list));
            eprintln!("{} encodings ({n} before deduplication)", list.len());
        }
        Command::Cohomology { vertices, edges } => {
            let basis = nambu::nambu_core::graph_complex::cohomology_basis(vertices, edges)?;
            println!("# {} cohomology classes at ({vertices},{edges})", basis.len());
            for (k, x) in basis.iter().enumerate() {
                println!("# class {k}");
                print!("{}", x.dump());
            }
        }
        Command::Shifts { problem } => {
            let (spec, opts) = problem.spec()?;
            let outcome = run(&spec, &opts)?;
            for (k, s) in outcome.report.shifts.iter().enumerate() {
                println!("shift {k}: [{}] poisson_closed={}", s.coefficients.join(", "), s.poisson_closed);
            }
        }
    }
    Ok(())
}
