//! Reduction in the positive λ-calculus: applied free variables, the two
//! characterizations of right contexts, redex enumeration with positions,
//! the multiplicative and exponential root rules, and the right strategy.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

pub use crate::syntax::OpenContext;
use crate::syntax::{lookup_in, Abstraction, Bite, Entry, NameSupply, PositiveTerm, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RedexKind {
    /// `m`: a shared β-redex.
    Multiplicative,
    /// `e`: an applied variable bound to an abstraction.
    Exponential,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Multiplicative => "m",
            RedexKind::Exponential => "e",
        })
    }
}

/// One redex occurrence together with its position and its reduct.
#[derive(Clone, Debug)]
pub struct Redex {
    pub kind: RedexKind,
    /// Index of the ES holding the redex in the term's spine.
    pub index: usize,
    /// For e-redexes, index of the ES binding the abstraction.
    pub abs_index: Option<usize>,
    pub position: OpenContext,
    pub reduct: PositiveTerm,
}

/// `afv(O)`, folded from the hole outwards.
pub fn afv(ctx: &OpenContext) -> BTreeSet<VarId> {
    afv_entries(&ctx.entries).into_iter().collect()
}

fn afv_entries(entries: &[Entry]) -> HashSet<VarId> {
    let mut acc = HashSet::new();
    for e in entries {
        acc.remove(&e.binder);
        if let Bite::VarApp(y, _) = e.bite {
            acc.insert(y);
        }
    }
    acc
}

/// Outside-in right contexts: an abstraction entry is allowed only if its
/// binder is not an applied free variable of the part inside it.
pub fn is_right_oi(ctx: &OpenContext) -> bool {
    is_right_oi_entries(&ctx.entries)
}

pub(crate) fn is_right_oi_entries(entries: &[Entry]) -> bool {
    let mut applied: HashSet<VarId> = HashSet::new();
    for e in entries {
        match &e.bite {
            Bite::VarApp(y, _) => {
                applied.remove(&e.binder);
                applied.insert(*y);
            }
            Bite::Abs(_) => {
                if applied.contains(&e.binder) {
                    return false;
                }
            }
            Bite::RedexApp(..) => return false,
        }
    }
    true
}

/// Inside-out right contexts: an application entry `[x <- y z]` is allowed
/// only if the surrounding context does not bind `y` to an abstraction.
pub fn is_right_io(ctx: &OpenContext) -> bool {
    is_right_io_entries(&ctx.entries)
}

pub(crate) fn is_right_io_entries(entries: &[Entry]) -> bool {
    // innermost binding seen so far among the entries outside the current one
    let mut binds_abs: HashMap<VarId, bool> = HashMap::new();
    for e in entries.iter().rev() {
        match &e.bite {
            Bite::VarApp(y, _) => {
                if binds_abs.get(y).copied().unwrap_or(false) {
                    return false;
                }
            }
            Bite::Abs(_) => {}
            Bite::RedexApp(..) => return false,
        }
        binds_abs.insert(e.binder, matches!(e.bite, Bite::Abs(_)));
    }
    true
}

/// Spine indices of all redexes, as `(index, kind, abstraction index)`.
pub(crate) fn locate_redexes(t: &PositiveTerm) -> Vec<(usize, RedexKind, Option<usize>)> {
    let mut out = Vec::new();
    let mut innermost: HashMap<VarId, usize> = HashMap::new();
    for (i, e) in t.entries.iter().enumerate().rev() {
        match &e.bite {
            Bite::RedexApp(..) => out.push((i, RedexKind::Multiplicative, None)),
            Bite::VarApp(y, _) => {
                if let Some(&j) = innermost.get(y) {
                    if matches!(t.entries[j].bite, Bite::Abs(_)) {
                        out.push((i, RedexKind::Exponential, Some(j)));
                    }
                }
            }
            Bite::Abs(_) => {}
        }
        innermost.insert(e.binder, i);
    }
    out.reverse();
    out
}

/// Every redex of `t`, left to right, with positions and reducts. The
/// position of the redex at spine index `i` is the context made of the
/// entries after `i`; for e-redexes this includes the abstraction's ES.
pub fn enumerate_redexes(t: &PositiveTerm, supply: &mut NameSupply) -> Vec<Redex> {
    locate_redexes(t)
        .into_iter()
        .map(|(index, kind, abs_index)| Redex {
            kind,
            index,
            abs_index,
            position: OpenContext::new(t.entries[index + 1..].to_vec()),
            reduct: fire(t, index, abs_index, supply),
        })
        .collect()
}

fn fire(
    t: &PositiveTerm,
    index: usize,
    abs_index: Option<usize>,
    supply: &mut NameSupply,
) -> PositiveTerm {
    match abs_index {
        Some(j) => {
            let Bite::Abs(abs) = &t.entries[j].bite else {
                unreachable!("e-redex without abstraction")
            };
            let Bite::VarApp(_, z) = t.entries[index].bite else {
                unreachable!("e-redex on a non-application")
            };
            let mut u = t.clone();
            u.entries[index].bite = Bite::RedexApp(abs.alpha_copy(supply), z);
            u
        }
        None => {
            let Entry {
                binder,
                bite: Bite::RedexApp(abs, arg),
            } = &t.entries[index]
            else {
                unreachable!("m-redex on a non-redex bite")
            };
            let inner = PositiveTerm {
                head: t.head,
                entries: t.entries[..index].to_vec(),
            };
            let mut u = root_m(&inner, *binder, abs, *arg, supply);
            u.entries.extend_from_slice(&t.entries[index + 1..]);
            u
        }
    }
}

/// `t[x <- (λy.O⟨z⟩) w]  ↦m  O⟨t{x <- z}⟩{y <- w}`
///
/// The renaming `{y <- w}` only touches the abstraction body, since `y`
/// cannot occur in `t` once the abstraction's binders are fresh for `t`.
/// If they are not, the abstraction is α-copied first.
pub fn root_m(
    t: &PositiveTerm,
    x: VarId,
    abs: &Abstraction,
    arg: VarId,
    supply: &mut NameSupply,
) -> PositiveTerm {
    let mut t_vars: HashSet<VarId> = t.all_vars().into_iter().collect();
    t_vars.insert(arg);
    let clashes = std::iter::once(abs.param)
        .chain(abs.body.binders())
        .any(|b| t_vars.contains(&b));
    let abs = if clashes {
        abs.alpha_copy(supply)
    } else {
        abs.clone()
    };
    let Abstraction { param, mut body } = abs;
    body.rename_unchecked(param, arg);
    let (ctx, z) = body.into_head_split();
    let mut out = t.subst_var(x, z, supply);
    out.entries.extend(ctx.entries);
    out
}

/// `O⟨t[x <- y z]⟩[y <- λw.u]  ↦e  O⟨t[x <- (λw.u)^α z]⟩[y <- λw.u]`,
/// with `y ∉ dom(O)`.
pub fn root_e(
    t: &PositiveTerm,
    ctx: &OpenContext,
    x: VarId,
    y: VarId,
    z: VarId,
    abs: &Abstraction,
    supply: &mut NameSupply,
) -> PositiveTerm {
    assert!(
        !ctx.dom().contains(&y),
        "exponential rule requires y outside dom(O)"
    );
    let copied = t.clone().es(x, Bite::RedexApp(abs.alpha_copy(supply), z));
    let mut out = ctx.plug(&copied);
    out.entries.push(Entry::new(y, Bite::Abs(abs.clone())));
    out
}

/// The unique right redex of `t`, if any: scanning the spine from the
/// outside, the first entry that does not extend a right context.
pub fn right_redex(t: &PositiveTerm) -> Option<(usize, RedexKind, Option<usize>)> {
    let mut innermost: HashMap<VarId, usize> = HashMap::new();
    for (i, e) in t.entries.iter().enumerate().rev() {
        match &e.bite {
            Bite::RedexApp(..) => return Some((i, RedexKind::Multiplicative, None)),
            Bite::VarApp(y, _) => {
                if let Some(&j) = innermost.get(y) {
                    if matches!(t.entries[j].bite, Bite::Abs(_)) {
                        return Some((i, RedexKind::Exponential, Some(j)));
                    }
                }
            }
            Bite::Abs(_) => {}
        }
        innermost.insert(e.binder, i);
    }
    None
}

/// One step of the right strategy.
pub fn right_step(t: &PositiveTerm, supply: &mut NameSupply) -> Option<(PositiveTerm, RedexKind)> {
    let (i, kind, j) = right_redex(t)?;
    Some((fire(t, i, j, supply), kind))
}

#[derive(Clone, Debug)]
pub struct EvalTrace {
    pub initial: PositiveTerm,
    pub steps: Vec<(RedexKind, PositiveTerm)>,
    pub normal: bool,
    /// Size of every abstraction copied by an e-step, in order.
    pub copied_sizes: Vec<usize>,
}

impl EvalTrace {
    pub fn count(&self, kind: RedexKind) -> usize {
        self.steps.iter().filter(|(k, _)| *k == kind).count()
    }

    pub fn last(&self) -> &PositiveTerm {
        self.steps.last().map(|(_, t)| t).unwrap_or(&self.initial)
    }
}

/// Iterates the right strategy at most `budget` times. Inputs that are not
/// well-bound are first replaced by a fresh α-copy.
pub fn right_eval(t: &PositiveTerm, budget: usize) -> EvalTrace {
    let mut supply = NameSupply::fresh_for(t);
    let initial = if t.well_bound_and_clean() {
        t.clone()
    } else {
        t.alpha_copy(&mut supply)
    };
    let mut trace = EvalTrace {
        initial,
        steps: Vec::new(),
        normal: false,
        copied_sizes: Vec::new(),
    };
    loop {
        let cur = trace.last();
        let Some((i, kind, j)) = right_redex(cur) else {
            trace.normal = true;
            break;
        };
        if trace.steps.len() >= budget {
            break;
        }
        let copied = j.map(|j| cur.entries[j].bite.size());
        let next = fire(cur, i, j, &mut supply);
        trace.copied_sizes.extend(copied);
        trace.steps.push((kind, next));
    }
    trace
}

/// `O(x)` lookup on a raw spine, innermost binding first.
pub fn ctx_lookup(ctx: &OpenContext, x: VarId) -> Option<&Bite> {
    lookup_in(&ctx.entries, x)
}
