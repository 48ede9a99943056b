//! Parallel evaluation with results folded in input order, so the output
//! does not depend on the number of workers.

use nambu_core::evaluation::graph_operation_term;
use nambu_core::graph_complex::{DirectedGraph, GraphVector};
use nambu_core::superfunction::OddSet;
use nambu_core::{GraphEncoding, Superfunction};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `jobs = 0` uses one worker per available core.
    pub fn new(jobs: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Workers { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f` on every item, results in input order.
    pub fn map<T: Sync, U: Send>(&self, items: &[T], f: impl Fn(&T) -> nambu_core::Result<U> + Sync + Send) -> Result<Vec<U>> {
        let out: nambu_core::Result<Vec<U>> = self.pool.install(|| items.par_iter().map(&f).collect());
        Ok(out?)
    }

    pub fn evaluate(&self, encodings: &[GraphEncoding]) -> Result<Vec<Superfunction>> {
        self.map(encodings, nambu_core::trivialize::evaluate_encoding)
    }

    pub fn skew(&self, encodings: &[GraphEncoding]) -> Result<Vec<Superfunction>> {
        self.map(encodings, nambu_core::trivialize::skew_formula)
    }

    /// `Σ_Γ c_Γ Γ(args)` with one task per graph term.
    pub fn graph_operation(
        &self,
        op: &GraphVector<DirectedGraph>,
        args: &[Superfunction],
        keep: Option<&[OddSet]>,
    ) -> Result<Superfunction> {
        let terms: Vec<_> = op.terms().collect();
        let parts = self.map(&terms, |(g, c)| graph_operation_term(g, c, args, keep))?;
        let dim = args.first().map_or(0, Superfunction::dim);
        let mut total = Superfunction::zero(dim);
        for p in &parts {
            total = total.add(p)?;
        }
        Ok(total)
    }
}
