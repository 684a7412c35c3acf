use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::var::{NameSupply, VarId};

/// An ordinary λ-term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(VarId),
    Abs(VarId, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(x: VarId) -> Self {
        LambdaTerm::Var(x)
    }

    pub fn abs(x: VarId, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(x, Box::new(body))
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, LambdaTerm::Abs(..))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, b) => 1 + b.size(),
            LambdaTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        match self {
            LambdaTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(*x);
                }
            }
            LambdaTerm::Abs(x, b) => {
                bound.push(*x);
                b.collect_free(bound, out);
                bound.pop();
            }
            LambdaTerm::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    /// Largest variable id occurring anywhere, bound or free.
    pub fn max_var_id(&self) -> u32 {
        match self {
            LambdaTerm::Var(x) => x.id(),
            LambdaTerm::Abs(x, b) => x.id().max(b.max_var_id()),
            LambdaTerm::App(f, a) => f.max_var_id().max(a.max_var_id()),
        }
    }

    /// Capture-avoiding `self{x := u}`. Binders that would capture a free
    /// variable of `u` are renamed with names drawn from `supply`.
    ///
    /// `budget` is decremented by the size of every node produced; the
    /// substitution gives up with `None` once it would go negative.
    pub fn subst(
        &self,
        x: VarId,
        u: &LambdaTerm,
        u_free: &BTreeSet<VarId>,
        supply: &mut NameSupply,
        budget: &mut usize,
    ) -> Option<LambdaTerm> {
        let charge = |budget: &mut usize, n: usize| -> Option<()> {
            *budget = budget.checked_sub(n)?;
            Some(())
        };
        match self {
            LambdaTerm::Var(y) if *y == x => {
                charge(budget, u.size())?;
                Some(u.clone())
            }
            LambdaTerm::Var(y) => {
                charge(budget, 1)?;
                Some(LambdaTerm::Var(*y))
            }
            LambdaTerm::Abs(y, body) => {
                charge(budget, 1)?;
                if *y == x {
                    charge(budget, body.size())?;
                    return Some(self.clone());
                }
                if u_free.contains(y) && body.free_vars().contains(&x) {
                    let fresh = supply.fresh();
                    let single = LambdaTerm::Var(fresh);
                    let single_free = BTreeSet::from([fresh]);
                    let mut unlimited = usize::MAX;
                    let renamed = body.subst(*y, &single, &single_free, supply, &mut unlimited)?;
                    let body = renamed.subst(x, u, u_free, supply, budget)?;
                    Some(LambdaTerm::abs(fresh, body))
                } else {
                    Some(LambdaTerm::abs(
                        *y,
                        body.subst(x, u, u_free, supply, budget)?,
                    ))
                }
            }
            LambdaTerm::App(f, a) => {
                charge(budget, 1)?;
                let f = f.subst(x, u, u_free, supply, budget)?;
                let a = a.subst(x, u, u_free, supply, budget)?;
                Some(LambdaTerm::app(f, a))
            }
        }
    }

    /// Renames every binder to a canonical name chosen by traversal order;
    /// free variables are kept. Two terms are α-equivalent iff their
    /// canonical forms are structurally equal.
    pub fn canonical(&self) -> LambdaTerm {
        let mut scope = HashMap::new();
        let mut counter = 0;
        self.canon(&mut scope, &mut counter)
    }

    fn canon(&self, scope: &mut HashMap<VarId, VarId>, counter: &mut u32) -> LambdaTerm {
        match self {
            LambdaTerm::Var(x) => LambdaTerm::Var(scope.get(x).copied().unwrap_or(*x)),
            LambdaTerm::Abs(x, b) => {
                let c = super::canonical_binder(*counter);
                *counter += 1;
                let saved = scope.insert(*x, c);
                let body = b.canon(scope, counter);
                restore(scope, *x, saved);
                LambdaTerm::abs(c, body)
            }
            LambdaTerm::App(f, a) => {
                let f = f.canon(scope, counter);
                let a = a.canon(scope, counter);
                LambdaTerm::app(f, a)
            }
        }
    }

    pub fn alpha_eq(&self, other: &LambdaTerm) -> bool {
        self.canonical() == other.canonical()
    }
}

pub(crate) fn restore(scope: &mut HashMap<VarId, VarId>, x: VarId, saved: Option<VarId>) {
    match saved {
        Some(prev) => {
            scope.insert(x, prev);
        }
        None => {
            scope.remove(&x);
        }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) => write!(f, "{x}"),
            LambdaTerm::Abs(x, b) => write!(f, "\\{x}.{b}"),
            LambdaTerm::App(fun, arg) => {
                match **fun {
                    LambdaTerm::Abs(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    LambdaTerm::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::from_raw(n)
    }

    #[test]
    fn printing_parenthesizes_minimally() {
        let t = LambdaTerm::app(
            LambdaTerm::abs(
                v(1),
                LambdaTerm::app(LambdaTerm::var(v(1)), LambdaTerm::var(v(1))),
            ),
            LambdaTerm::app(
                LambdaTerm::abs(v(2), LambdaTerm::var(v(2))),
                LambdaTerm::abs(v(3), LambdaTerm::var(v(3))),
            ),
        );
        assert_eq!(t.to_string(), "(\\v1.v1 v1) ((\\v2.v2) (\\v3.v3))");
    }

    #[test]
    fn subst_avoids_capture() {
        // (\y.x y){x := y}  must not capture y
        let t = LambdaTerm::abs(
            v(2),
            LambdaTerm::app(LambdaTerm::var(v(1)), LambdaTerm::var(v(2))),
        );
        let u = LambdaTerm::var(v(2));
        let mut s = NameSupply::starting_at(10);
        let mut budget = usize::MAX;
        let r = t
            .subst(v(1), &u, &u.free_vars(), &mut s, &mut budget)
            .unwrap();
        let expected = LambdaTerm::abs(
            v(10),
            LambdaTerm::app(LambdaTerm::var(v(2)), LambdaTerm::var(v(10))),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn subst_respects_budget() {
        let t = LambdaTerm::app(LambdaTerm::var(v(1)), LambdaTerm::var(v(1)));
        let u = LambdaTerm::app(LambdaTerm::var(v(2)), LambdaTerm::var(v(3)));
        let mut s = NameSupply::starting_at(10);
        let mut budget = 4;
        assert!(t
            .subst(v(1), &u, &u.free_vars(), &mut s, &mut budget)
            .is_none());
    }

    #[test]
    fn alpha_equivalence() {
        let a = LambdaTerm::abs(v(1), LambdaTerm::var(v(1)));
        let b = LambdaTerm::abs(v(2), LambdaTerm::var(v(2)));
        let c = LambdaTerm::abs(v(2), LambdaTerm::var(v(1)));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}
