//! Executable checks of the calculus and machine properties, term
//! generators, the lockstep bisimulation checker and the scaling experiment.
//!
//! Corpus items are independent, so every corpus-wide check maps over the
//! items in parallel when the `parallel` feature is enabled.

mod bisim;
mod checks;
pub mod gen;
mod scaling;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use bisim::{bisimulate, BisimReport, Mismatch, MismatchKind};
pub use checks::{
    check_bounds, context_bites, diamond_check, invariant_suite, right_ctx_agreement,
    right_redex_count, search_measure, strategy_check, DiamondCounterexample, InvariantReport,
    DIAMOND_DEPTH, DIAMOND_SIZE_CAP,
};
pub use scaling::{scaling_experiment, ScalingReport, ScalingRow};

use crate::crumble::{crumble, unfold_with_limit, UnfoldError};
use crate::machines::{sliced_run, NaturalState, SlicedState};
use crate::syntax::{LambdaTerm, NameSupply, PositiveTerm, VarId};

/// How corpus items are processed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses the rayon thread pool; same as `Sequential` without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

pub fn map_with<T: Sync, R: Send>(
    exec: Exec,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    map_with(Exec::default(), items, f)
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub seed: u64,
    pub closed: bool,
    pub lambda: LambdaTerm,
    pub term: PositiveTerm,
}

/// `count` random λ-terms of size at most `max_size`, alternately closed and
/// open, together with their crumbled forms. Deterministic in `seed`.
pub fn corpus(seed: u64, count: usize, max_size: usize) -> Vec<CorpusItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let item_seed: u64 = rng.gen();
            let size = rng.gen_range(1..=max_size.max(1));
            let closed = i % 2 == 0;
            let lambda = gen::gen_random_lambda(item_seed, size, closed);
            let term = crumble(&lambda, &mut NameSupply::fresh_for_lambda(&lambda));
            CorpusItem {
                seed: item_seed,
                closed,
                lambda,
                term,
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub corpus: usize,
    pub max_size: usize,
    /// Principal-transition budget per run.
    pub budget: usize,
    pub diamond_terms: usize,
    pub diamond_depth: usize,
    pub strategy_steps: usize,
    pub ctx_entries: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            corpus: 500,
            max_size: 40,
            budget: 1000,
            diamond_terms: 300,
            diamond_depth: DIAMOND_DEPTH,
            strategy_steps: 200,
            ctx_entries: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub items: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<12} {} items", self.name, self.items)?;
        if let Some(first) = self.failures.first() {
            write!(f, ", {} failures, first: {first}", self.failures.len())?;
        }
        Ok(())
    }
}

fn outcome<T>(
    name: &'static str,
    results: Vec<Result<u64, T>>,
    describe: impl Fn(T) -> String,
) -> CheckOutcome {
    let mut items = 0;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(n) => items += n,
            Err(e) => failures.push(describe(e)),
        }
    }
    CheckOutcome {
        name,
        items,
        failures,
    }
}

/// Runs every property check over a seeded corpus.
pub fn run_suite(cfg: &SuiteConfig, exec: Exec) -> Vec<CheckOutcome> {
    let items = corpus(cfg.seed, cfg.corpus, cfg.max_size);
    let budget = cfg.budget;
    let mut out = Vec::new();

    let crumble_results = map_with(exec, &items, |it| {
        match unfold_with_limit(&it.term, crate::crumble::UNFOLD_LIMIT) {
            Ok(u) if u.alpha_eq(&it.lambda) => Ok(1),
            Ok(u) => Err(format!("seed {}: {} unfolds to {u}", it.seed, it.lambda)),
            Err(UnfoldError::Overflow { .. }) => Ok(0),
        }
    });
    out.push(outcome("crumble", crumble_results, |e| e));

    for (name, natural) in [("bisim-sliced", false), ("bisim-natural", true)] {
        let results = map_with(exec, &items, |it| {
            let r = if natural {
                bisimulate::<NaturalState>(&it.term, budget)
            } else {
                bisimulate::<SlicedState>(&it.term, budget)
            };
            if r.passed() {
                Ok(1)
            } else {
                Err(format!("seed {}: {:?}", it.seed, r.mismatches.first()))
            }
        });
        out.push(outcome(name, results, |e| e));
    }

    let dia = &items[..cfg.diamond_terms.min(items.len())];
    let depth = cfg.diamond_depth;
    let results = map_with(exec, dia, |it| {
        diamond_check(&it.term, depth).map(|n| n as u64)
    });
    out.push(outcome("diamond", results, |c| {
        format!("{}: {} and {} do not join", c.source, c.left, c.right)
    }));

    let steps = cfg.strategy_steps;
    let results = map_with(exec, &items, |it| {
        strategy_check(&it.term, steps).map(|n| n as u64)
    });
    out.push(outcome("strategy", results, |e| e));

    let alphabet: Vec<VarId> = (1..=3).map(VarId::from_raw).collect();
    let ctx = right_ctx_agreement(cfg.ctx_entries, &alphabet);
    out.push(outcome("right-ctx", vec![ctx], |c| {
        format!("disagreement on {c}")
    }));

    let results = map_with(exec, &items, |it| {
        let v = check_bounds(&sliced_run(&it.term, budget));
        if v.is_empty() {
            Ok(1)
        } else {
            Err(format!("seed {}: {}", it.seed, v.join("; ")))
        }
    });
    out.push(outcome("bounds", results, |e| e));

    let results = map_with(exec, &items, |it| {
        let rep = invariant_suite(&it.term, budget);
        if rep.violations.is_empty() {
            Ok(rep.states_checked as u64)
        } else {
            Err(format!("seed {}: {}", it.seed, rep.violations.join("; ")))
        }
    });
    out.push(outcome("invariants", results, |e| e));
    out
}
