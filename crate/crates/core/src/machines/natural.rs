use super::{fresh_representative, Environment, Machine, Transition, TransitionLabel};
use crate::syntax::{Bite, Entry, NameSupply, OpenContext, PositiveTerm};

/// State `t ◁ R` of the Natural POM. The right context `R` only ever grows
/// from the inside, so it shares the representation of the Sliced POM's
/// environment.
#[derive(Clone, Debug)]
pub struct NaturalState {
    pub active: PositiveTerm,
    pub rctx: Environment,
}

impl NaturalState {
    pub fn new(active: PositiveTerm) -> Self {
        NaturalState {
            active,
            rctx: Environment::new(),
        }
    }

    pub fn rctx_context(&self) -> OpenContext {
        self.rctx.read_back()
    }
}

impl Machine for NaturalState {
    const NAME: &'static str = "natural";

    fn init(t: &PositiveTerm, supply: &mut NameSupply) -> Self {
        NaturalState::new(fresh_representative(t, supply))
    }

    fn peek(&self) -> Option<TransitionLabel> {
        let last = self.active.entries.last()?;
        Some(match &last.bite {
            Bite::Abs(_) => TransitionLabel::Sea1,
            Bite::VarApp(y, _) => match self.rctx.lookup(*y) {
                Some(Bite::Abs(_)) => TransitionLabel::E,
                _ => TransitionLabel::Sea2,
            },
            Bite::RedexApp(..) => TransitionLabel::M,
        })
    }

    fn step(&mut self, supply: &mut NameSupply) -> Option<Transition> {
        let label = self.peek()?;
        let cost = match label {
            TransitionLabel::Sea1 | TransitionLabel::Sea2 => {
                let e = self.active.entries.pop().expect("search needs an entry");
                self.rctx.push(e);
                1
            }
            TransitionLabel::E => {
                let last = self.active.entries.last_mut().expect("e needs an entry");
                let Bite::VarApp(y, z) = last.bite else {
                    unreachable!("e fires on a variable application")
                };
                let Some(Bite::Abs(abs)) = self.rctx.lookup(y) else {
                    unreachable!("e needs an abstraction in the right context")
                };
                let cost = abs.size();
                last.bite = Bite::RedexApp(abs.alpha_copy(supply), z);
                cost
            }
            TransitionLabel::M => {
                // t[x <- (λy.O⟨z⟩) w]  ->  O⟨t{x <- z}⟩{y <- w}
                let Entry { binder, bite } = self.active.entries.pop().expect("m needs an entry");
                let Bite::RedexApp(abs, w) = bite else {
                    unreachable!("m fires on a β-redex")
                };
                let mut body = abs.body;
                let cost = self.active.size() + body.size();
                body.rename_unchecked(abs.param, w);
                let (ctx, z) = body.into_head_split();
                self.active.rename_unchecked(binder, z);
                self.active.entries.extend(ctx.entries);
                cost
            }
            TransitionLabel::Sea3 => unreachable!("the Natural POM has no slices"),
        };
        Some(Transition { label, cost })
    }

    fn read_back(&self) -> PositiveTerm {
        let mut t = self.active.clone();
        t.entries.extend(self.rctx.iter_recent_first().cloned());
        t
    }

    fn trace_fields(&self) -> String {
        format!("{} | {}", self.active, self.rctx)
    }
}
