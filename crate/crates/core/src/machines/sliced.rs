use std::fmt;

use super::{fresh_representative, Environment, Machine, Transition, TransitionLabel};
use crate::syntax::{Bite, Entry, NameSupply, PositiveTerm, VarId};

/// A suspended continuation `t[x <- ·]`: once the code under evaluation has
/// reached its head variable `z`, evaluation resumes on `t{x <- z}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub body: PositiveTerm,
    pub binder: VarId,
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{} <- ·]", self.body, self.binder)
    }
}

/// State `(S, t, E)` of the Sliced POM: a stack of slices (top is last),
/// the active code, and the global environment.
#[derive(Clone, Debug)]
pub struct SlicedState {
    pub stack: Vec<Slice>,
    pub active: PositiveTerm,
    pub env: Environment,
}

impl SlicedState {
    pub fn new(active: PositiveTerm) -> Self {
        SlicedState {
            stack: Vec::new(),
            active,
            env: Environment::new(),
        }
    }

    /// `S` printed bottom to top after `ε`.
    pub fn stack_string(&self) -> String {
        let mut s = String::from("ε");
        for sl in &self.stack {
            s.push_str(" : ");
            s.push_str(&sl.to_string());
        }
        s
    }
}

impl Machine for SlicedState {
    const NAME: &'static str = "sliced";

    fn init(t: &PositiveTerm, supply: &mut NameSupply) -> Self {
        SlicedState::new(fresh_representative(t, supply))
    }

    fn peek(&self) -> Option<TransitionLabel> {
        let Some(last) = self.active.entries.last() else {
            return (!self.stack.is_empty()).then_some(TransitionLabel::Sea3);
        };
        Some(match &last.bite {
            Bite::Abs(_) => TransitionLabel::Sea1,
            Bite::VarApp(y, _) => match self.env.lookup(*y) {
                Some(Bite::Abs(_)) => TransitionLabel::E,
                _ => TransitionLabel::Sea2,
            },
            Bite::RedexApp(..) => TransitionLabel::M,
        })
    }

    fn step(&mut self, supply: &mut NameSupply) -> Option<Transition> {
        let label = self.peek()?;
        let cost = match label {
            TransitionLabel::Sea3 => {
                let slice = self.stack.pop().expect("sea3 needs a slice");
                let z = self.active.head;
                let mut t = slice.body;
                let cost = t.size();
                t.rename_unchecked(slice.binder, z);
                self.active = t;
                cost
            }
            TransitionLabel::Sea1 | TransitionLabel::Sea2 => {
                let e = self.active.entries.pop().expect("search needs an entry");
                self.env.push(e);
                1
            }
            TransitionLabel::E => {
                let last = self.active.entries.last_mut().expect("e needs an entry");
                let Bite::VarApp(y, z) = last.bite else {
                    unreachable!("e fires on a variable application")
                };
                let Some(Bite::Abs(abs)) = self.env.lookup(y) else {
                    unreachable!("e needs an abstraction in the environment")
                };
                let cost = abs.size();
                last.bite = Bite::RedexApp(abs.alpha_copy(supply), z);
                cost
            }
            TransitionLabel::M => {
                let Entry { binder, bite } = self.active.entries.pop().expect("m needs an entry");
                let Bite::RedexApp(abs, w) = bite else {
                    unreachable!("m fires on a β-redex")
                };
                let rest = std::mem::replace(&mut self.active, PositiveTerm::var(w));
                self.stack.push(Slice { body: rest, binder });
                let mut u = abs.body;
                let cost = u.size();
                u.rename_unchecked(abs.param, w);
                self.active = u;
                cost
            }
        };
        Some(Transition { label, cost })
    }

    /// Merges the slices top-down into the active code, then plugs the
    /// result into the environment.
    fn read_back(&self) -> PositiveTerm {
        let mut cur = self.active.clone();
        for sl in self.stack.iter().rev() {
            let mut t = sl.body.clone();
            t.rename_unchecked(sl.binder, cur.head);
            t.entries.append(&mut cur.entries);
            cur = t;
        }
        cur.entries.extend(self.env.iter_recent_first().cloned());
        cur
    }

    fn trace_fields(&self) -> String {
        format!("{} | {} | {}", self.stack_string(), self.active, self.env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crumble::crumble;
    use crate::machines::run;
    use crate::syntax::{parse_lambda, Abstraction};

    #[test]
    fn table_one_label_sequence() {
        let t = parse_lambda("(\\x.x x)((\\z.z)(\\z.z))").unwrap();
        let p = crumble(&t, &mut NameSupply::fresh_for_lambda(&t));
        let r = run::<SlicedState>(&p, 100);
        let labels: Vec<_> = r.labels().iter().map(|l| l.as_str()).collect();
        assert_eq!(labels, ["sea1", "m", "sea3", "m", "e", "m", "sea3", "sea3"]);
        assert!(r.final_state.stack.is_empty());
        assert_eq!(r.final_state.read_back().to_string(), "v7[v7 <- \\v3.v3]");
        assert_eq!(r.final_state.env.to_string(), "[v7 <- \\v3.v3] : ε");
    }

    /// `x[x <- (λy.z[z <- (λa.a) w'])w]`: evaluating the active slice
    /// changes its head from `z` to `w'` before the outer slice is popped.
    fn head_change_term() -> PositiveTerm {
        let v = VarId::from_raw;
        let (x, y, z, a, w1, w) = (v(1), v(2), v(3), v(4), v(5), v(6));
        let inner = PositiveTerm::var(z).es(
            z,
            Bite::RedexApp(Abstraction::new(a, PositiveTerm::var(a)), w1),
        );
        PositiveTerm::var(x).es(x, Bite::RedexApp(Abstraction::new(y, inner), w))
    }

    #[test]
    fn head_change_is_deferred_to_sea3() {
        let t = head_change_term();
        let mut supply = NameSupply::fresh_for(&t);
        let mut s = SlicedState::init(&t, &mut supply);
        let labels: Vec<_> = (0..3).map(|_| s.step(&mut supply).unwrap().label).collect();
        assert_eq!(
            labels,
            [
                TransitionLabel::M,
                TransitionLabel::M,
                TransitionLabel::Sea3
            ]
        );
        assert_eq!(s.trace_fields(), "ε : v1[v1 <- ·] | v5 | ε");
        assert_eq!(s.read_back().to_string(), "v5");
    }

    /// The eager variant substitutes the current head of the body into the
    /// slice at m time. It loses the head change above and ends with a
    /// dangling name.
    #[test]
    fn eager_head_substitution_is_unsound() {
        let t = head_change_term();
        let mut stack: Vec<PositiveTerm> = Vec::new();
        let mut active = t.clone();
        loop {
            match active.entries.pop() {
                Some(Entry {
                    binder,
                    bite: Bite::RedexApp(abs, w),
                }) => {
                    let mut u = abs.body;
                    u.rename_unchecked(abs.param, w);
                    active.rename_unchecked(binder, u.head);
                    stack.push(std::mem::replace(&mut active, u));
                }
                Some(_) => unreachable!("only β-redexes in this example"),
                None => match stack.pop() {
                    Some(s) => active = s,
                    None => break,
                },
            }
        }
        assert_eq!(active.head, VarId::from_raw(3));
        assert!(!t.free_vars().contains(&active.head));
        let correct = run::<SlicedState>(&t, 10).final_state.read_back();
        assert!(!correct.alpha_eq(&active));
    }
}
