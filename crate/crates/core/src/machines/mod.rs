//! The Natural POM and the Sliced POM, a common driver with cost
//! instrumentation, and runtime invariant checkers.

mod env;
mod invariants;
mod natural;
mod sliced;

use std::fmt;

pub use env::Environment;
pub use invariants::{
    applicable_transitions, check_natural_invariants, check_state_invariants, Violation,
};
pub use natural::NaturalState;
pub use sliced::{Slice, SlicedState};

use crate::calculus::RedexKind;
use crate::syntax::{NameSupply, PositiveTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionLabel {
    Sea1,
    Sea2,
    /// Only exists for the Sliced POM.
    Sea3,
    E,
    M,
}

impl TransitionLabel {
    pub const ALL: [TransitionLabel; 5] = [
        TransitionLabel::Sea1,
        TransitionLabel::Sea2,
        TransitionLabel::Sea3,
        TransitionLabel::E,
        TransitionLabel::M,
    ];

    pub fn is_principal(self) -> bool {
        matches!(self, TransitionLabel::E | TransitionLabel::M)
    }

    pub fn redex_kind(self) -> Option<RedexKind> {
        match self {
            TransitionLabel::E => Some(RedexKind::Exponential),
            TransitionLabel::M => Some(RedexKind::Multiplicative),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransitionLabel::Sea1 => "sea1",
            TransitionLabel::Sea2 => "sea2",
            TransitionLabel::Sea3 => "sea3",
            TransitionLabel::E => "e",
            TransitionLabel::M => "m",
        }
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fired transition and the amount of term structure it had to scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: TransitionLabel,
    pub cost: usize,
}

/// An abstract machine over positive terms.
pub trait Machine: Sized {
    const NAME: &'static str;

    /// Initial state for `t`. The active code is a fresh well-bound
    /// representative of `t`; `t` itself is reused when it already is one.
    fn init(t: &PositiveTerm, supply: &mut NameSupply) -> Self;

    /// The transition [`Machine::step`] would fire, without firing it.
    fn peek(&self) -> Option<TransitionLabel>;

    /// Fires the unique applicable transition; `None` on final states.
    fn step(&mut self, supply: &mut NameSupply) -> Option<Transition>;

    fn read_back(&self) -> PositiveTerm;

    /// The state part of a trace line, fields separated by `" | "`.
    fn trace_fields(&self) -> String;

    fn is_final(&self) -> bool {
        self.peek().is_none()
    }
}

/// `<label> | <state fields>`; the initial state is labelled `init`.
pub fn trace_line<M: Machine>(label: Option<TransitionLabel>, s: &M) -> String {
    let l = label.map_or("init", TransitionLabel::as_str);
    format!("{l} | {}", s.trace_fields())
}

pub(crate) fn fresh_representative(t: &PositiveTerm, supply: &mut NameSupply) -> PositiveTerm {
    supply.avoid(t.max_var_id());
    if t.well_bound_and_clean() {
        t.clone()
    } else {
        t.alpha_copy(supply)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub m: usize,
    pub e: usize,
    pub sea1: usize,
    pub sea2: usize,
    pub sea3: usize,
}

impl LabelCounts {
    pub fn get(&self, l: TransitionLabel) -> usize {
        match l {
            TransitionLabel::Sea1 => self.sea1,
            TransitionLabel::Sea2 => self.sea2,
            TransitionLabel::Sea3 => self.sea3,
            TransitionLabel::E => self.e,
            TransitionLabel::M => self.m,
        }
    }

    pub fn bump(&mut self, l: TransitionLabel) {
        match l {
            TransitionLabel::Sea1 => self.sea1 += 1,
            TransitionLabel::Sea2 => self.sea2 += 1,
            TransitionLabel::Sea3 => self.sea3 += 1,
            TransitionLabel::E => self.e += 1,
            TransitionLabel::M => self.m += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.m + self.e + self.sea1 + self.sea2 + self.sea3
    }

    pub fn principal(&self) -> usize {
        self.m + self.e
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Normal,
    BudgetExhausted,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Normal => "normal",
            RunStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunReport<S> {
    pub counts: LabelCounts,
    /// One sample per transition, in order.
    pub cost_samples: Vec<Transition>,
    pub status: RunStatus,
    pub final_state: S,
    pub initial_size: usize,
}

impl<S> RunReport<S> {
    pub fn labels(&self) -> Vec<TransitionLabel> {
        self.cost_samples.iter().map(|t| t.label).collect()
    }

    pub fn cost_of(&self, pred: impl Fn(TransitionLabel) -> bool) -> usize {
        self.cost_samples
            .iter()
            .filter(|t| pred(t.label))
            .map(|t| t.cost)
            .sum()
    }

    pub fn principal_cost(&self) -> usize {
        self.cost_of(TransitionLabel::is_principal)
    }

    pub fn max_cost(&self, label: TransitionLabel) -> usize {
        self.cost_samples
            .iter()
            .filter(|t| t.label == label)
            .map(|t| t.cost)
            .max()
            .unwrap_or(0)
    }
}

/// Runs `M` on `t` until a final state or until `budget` principal
/// transitions have fired; in the latter case pending search transitions
/// are still executed, stopping right before the next principal one.
pub fn run<M: Machine>(t: &PositiveTerm, budget: usize) -> RunReport<M> {
    run_with(t, budget, |_: &M, _| {})
}

/// Like [`run`], calling `observe` after every transition with the new state.
pub fn run_with<M: Machine>(
    t: &PositiveTerm,
    budget: usize,
    mut observe: impl FnMut(&M, Transition),
) -> RunReport<M> {
    let mut supply = NameSupply::fresh_for(t);
    let state = M::init(t, &mut supply);
    drive(state, &mut supply, t.size(), budget, &mut observe)
}

pub(crate) fn drive<M: Machine>(
    mut state: M,
    supply: &mut NameSupply,
    initial_size: usize,
    budget: usize,
    observe: &mut impl FnMut(&M, Transition),
) -> RunReport<M> {
    let mut counts = LabelCounts::default();
    let mut cost_samples = Vec::new();
    let status = loop {
        match state.peek() {
            None => break RunStatus::Normal,
            Some(l) if l.is_principal() && counts.principal() >= budget => {
                break RunStatus::BudgetExhausted
            }
            Some(_) => {}
        }
        let tr = state.step(supply).expect("peek promised a transition");
        counts.bump(tr.label);
        cost_samples.push(tr);
        observe(&state, tr);
    };
    RunReport {
        counts,
        cost_samples,
        status,
        final_state: state,
        initial_size,
    }
}

pub fn natural_run(t: &PositiveTerm, budget: usize) -> RunReport<NaturalState> {
    run(t, budget)
}

pub fn sliced_run(t: &PositiveTerm, budget: usize) -> RunReport<SlicedState> {
    run(t, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::VarId;

    #[test]
    fn trivial_runs() {
        let t = PositiveTerm::var(VarId::from_raw(1));
        let r = sliced_run(&t, 10);
        assert_eq!(r.counts.total(), 0);
        assert_eq!(r.status, RunStatus::Normal);
        let r = natural_run(&t, 10);
        assert_eq!(r.counts.total(), 0);
        assert_eq!(r.status, RunStatus::Normal);
    }

    #[test]
    fn labels() {
        assert!(TransitionLabel::M.is_principal());
        assert!(!TransitionLabel::Sea3.is_principal());
        assert_eq!(TransitionLabel::Sea2.to_string(), "sea2");
    }
}
