//! Translation of ordinary λ-terms into positive terms ("crumbling") and the
//! unfolding back to λ-terms used to validate it.
//!
//! Applications and standalone abstractions are named by fresh ES binders.
//! An application's own ES goes outermost-first, followed by the ESs of its
//! function part and then of its argument, so that right-to-left evaluation
//! evaluates arguments first. Abstractions in function position stay inline
//! as `(λx.u) y` bites.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{Abstraction, Bite, Entry, LambdaTerm, NameSupply, PositiveTerm, VarId};

/// Default node limit for [`unfold`].
pub const UNFOLD_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("unfold overflow: result exceeds {limit} nodes")]
    Overflow { limit: usize },
}

/// Crumbles `t`. Fresh names are drawn from `supply`, which is first bumped
/// past every id occurring in `t`. λ-binders of `t` are kept unless they are
/// already used elsewhere, in which case they are renamed so that the result
/// is well-bound.
pub fn crumble(t: &LambdaTerm, supply: &mut NameSupply) -> PositiveTerm {
    supply.avoid(t.max_var_id());
    let mut cx = Crumbler {
        supply,
        rename: HashMap::new(),
        used: t.free_vars().into_iter().collect(),
    };
    let (head, entries) = cx.var_of(t);
    PositiveTerm { head, entries }
}

enum Head {
    Var(VarId),
    Abs(Abstraction),
}

struct Crumbler<'a> {
    supply: &'a mut NameSupply,
    rename: HashMap<VarId, Vec<VarId>>,
    used: HashSet<VarId>,
}

impl Crumbler<'_> {
    fn lookup(&self, x: VarId) -> VarId {
        self.rename
            .get(&x)
            .and_then(|s| s.last())
            .copied()
            .unwrap_or(x)
    }

    fn abstraction(&mut self, x: VarId, body: &LambdaTerm) -> Abstraction {
        let param = if self.used.insert(x) {
            x
        } else {
            self.supply.fresh()
        };
        self.used.insert(param);
        self.rename.entry(x).or_default().push(param);
        let (head, entries) = self.var_of(body);
        self.rename.get_mut(&x).map(Vec::pop);
        Abstraction::new(param, PositiveTerm { head, entries })
    }

    /// The head of `t` (a variable or an inlined abstraction) and its spine.
    fn crumb(&mut self, t: &LambdaTerm) -> (Head, Vec<Entry>) {
        match t {
            LambdaTerm::Var(x) => (Head::Var(self.lookup(*x)), Vec::new()),
            LambdaTerm::Abs(x, body) => (Head::Abs(self.abstraction(*x, body)), Vec::new()),
            LambdaTerm::App(f, a) => {
                let w = self.supply.fresh();
                self.used.insert(w);
                let (fh, mut spine) = match &**f {
                    LambdaTerm::Abs(x, body) => (Head::Abs(self.abstraction(*x, body)), Vec::new()),
                    other => {
                        let (y, s) = self.var_of(other);
                        (Head::Var(y), s)
                    }
                };
                let (ah, arg_spine) = self.var_of(a);
                let bite = match fh {
                    Head::Abs(abs) => Bite::RedexApp(abs, ah),
                    Head::Var(y) => Bite::VarApp(y, ah),
                };
                let mut entries = Vec::with_capacity(1 + spine.len() + arg_spine.len());
                entries.push(Entry::new(w, bite));
                entries.append(&mut spine);
                entries.extend(arg_spine);
                (Head::Var(w), entries)
            }
        }
    }

    /// Like [`Self::crumb`] but forces the head to a variable by sharing a
    /// standalone abstraction under a fresh name.
    fn var_of(&mut self, t: &LambdaTerm) -> (VarId, Vec<Entry>) {
        match self.crumb(t) {
            (Head::Var(x), spine) => (x, spine),
            (Head::Abs(abs), mut spine) => {
                let v = self.supply.fresh();
                self.used.insert(v);
                spine.insert(0, Entry::new(v, Bite::Abs(abs)));
                (v, spine)
            }
        }
    }
}

/// Eliminates every ES by meta-level substitution, with [`UNFOLD_LIMIT`].
pub fn unfold(t: &PositiveTerm) -> Result<LambdaTerm, UnfoldError> {
    unfold_with_limit(t, UNFOLD_LIMIT)
}

pub fn unfold_with_limit(t: &PositiveTerm, limit: usize) -> Result<LambdaTerm, UnfoldError> {
    let mut supply = NameSupply::fresh_for(t);
    let mut budget = limit;
    unfold_term(t, &mut supply, &mut budget).ok_or(UnfoldError::Overflow { limit })
}

fn unfold_term(
    t: &PositiveTerm,
    supply: &mut NameSupply,
    budget: &mut usize,
) -> Option<LambdaTerm> {
    let mut acc = LambdaTerm::Var(t.head);
    for e in &t.entries {
        let b = unfold_bite(&e.bite, supply, budget)?;
        let fv: BTreeSet<VarId> = b.free_vars();
        acc = acc.subst(e.binder, &b, &fv, supply, budget)?;
    }
    Some(acc)
}

fn unfold_bite(b: &Bite, supply: &mut NameSupply, budget: &mut usize) -> Option<LambdaTerm> {
    Some(match b {
        Bite::VarApp(y, z) => LambdaTerm::app(LambdaTerm::Var(*y), LambdaTerm::Var(*z)),
        Bite::Abs(a) => LambdaTerm::abs(a.param, unfold_term(&a.body, supply, budget)?),
        Bite::RedexApp(a, z) => LambdaTerm::app(
            LambdaTerm::abs(a.param, unfold_term(&a.body, supply, budget)?),
            LambdaTerm::Var(*z),
        ),
    })
}
