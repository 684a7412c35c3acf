use std::collections::{HashMap, HashSet};

use crate::calculus::{
    enumerate_redexes, is_right_io_entries, is_right_oi_entries, locate_redexes, right_eval,
    right_redex,
};
use crate::machines::{
    applicable_transitions, check_natural_invariants, check_state_invariants, run_with, Machine,
    NaturalState, RunReport, SlicedState, TransitionLabel,
};
use crate::syntax::{Abstraction, Bite, Entry, NameSupply, OpenContext, PositiveTerm, VarId};

pub const DIAMOND_DEPTH: usize = 4;
pub const DIAMOND_SIZE_CAP: usize = 80;

/// Two distinct one-step reducts of `source` without a common reduct.
#[derive(Clone, Debug)]
pub struct DiamondCounterexample {
    pub source: PositiveTerm,
    pub left: PositiveTerm,
    pub right: PositiveTerm,
}

/// Explores every term reachable from `t` in at most `depth` steps (terms
/// larger than [`DIAMOND_SIZE_CAP`] are not expanded) and checks that any two
/// distinct one-step reducts of a reached term can be joined in one step each.
/// Returns the number of terms checked.
pub fn diamond_check(t: &PositiveTerm, depth: usize) -> Result<usize, Box<DiamondCounterexample>> {
    let mut supply = NameSupply::fresh_for(t);
    let mut cache: HashMap<PositiveTerm, Vec<PositiveTerm>> = HashMap::new();
    let mut reducts = |u: &PositiveTerm, supply: &mut NameSupply| -> Vec<PositiveTerm> {
        cache
            .entry(u.canonical())
            .or_insert_with(|| {
                let mut seen = HashSet::new();
                enumerate_redexes(u, supply)
                    .into_iter()
                    .map(|r| r.reduct.canonical())
                    .filter(|r| seen.insert(r.clone()))
                    .collect()
            })
            .clone()
    };
    let start = t.canonical();
    let mut visited: HashSet<PositiveTerm> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut checked = 0;
    for level in 0..=depth {
        let mut next = Vec::new();
        for u in &frontier {
            if u.size() > DIAMOND_SIZE_CAP {
                continue;
            }
            checked += 1;
            let rs = reducts(u, &mut supply);
            for i in 0..rs.len() {
                let left: HashSet<_> = reducts(&rs[i], &mut supply).into_iter().collect();
                for j in i + 1..rs.len() {
                    let joined = reducts(&rs[j], &mut supply)
                        .iter()
                        .any(|r| left.contains(r));
                    if !joined {
                        return Err(Box::new(DiamondCounterexample {
                            source: u.clone(),
                            left: rs[i].clone(),
                            right: rs[j].clone(),
                        }));
                    }
                }
            }
            if level < depth {
                next.extend(rs.into_iter().filter(|r| visited.insert(r.clone())));
            }
        }
        frontier = next;
    }
    Ok(checked)
}

/// Number of redexes of `t` whose position is a right context.
pub fn right_redex_count(t: &PositiveTerm) -> usize {
    locate_redexes(t)
        .into_iter()
        .filter(|&(i, _, _)| is_right_oi_entries(&t.entries[i + 1..]))
        .count()
}

/// Determinism and no premature stops of the right strategy, at `t` and at
/// every term of its right evaluation within `steps` steps. Returns the
/// number of terms checked.
pub fn strategy_check(t: &PositiveTerm, steps: usize) -> Result<usize, String> {
    let trace = right_eval(t, steps);
    let terms = std::iter::once(&trace.initial).chain(trace.steps.iter().map(|(_, u)| u));
    let mut checked = 0;
    for u in terms {
        checked += 1;
        let n = right_redex_count(u);
        let any = !locate_redexes(u).is_empty();
        if n > 1 {
            return Err(format!("{u} has {n} right redexes"));
        }
        if any && n == 0 {
            return Err(format!("{u} has redexes but none in right position"));
        }
        let found = right_redex(u).map(|(i, _, _)| i);
        let filtered = locate_redexes(u)
            .into_iter()
            .find(|&(i, _, _)| is_right_oi_entries(&u.entries[i + 1..]))
            .map(|(i, _, _)| i);
        if found != filtered {
            return Err(format!(
                "{u}: right_redex picks {found:?}, filter picks {filtered:?}"
            ));
        }
    }
    Ok(checked)
}

/// The bites used when enumerating contexts over `alphabet`. Abstraction
/// bodies do not influence either predicate, so they are kept trivial.
pub fn context_bites(alphabet: &[VarId]) -> Vec<Bite> {
    let mut out = Vec::new();
    for &y in alphabet {
        for &z in alphabet {
            out.push(Bite::VarApp(y, z));
        }
    }
    for &y in alphabet {
        out.push(Bite::Abs(Abstraction::new(y, PositiveTerm::var(y))));
    }
    for &y in alphabet {
        for &z in alphabet {
            out.push(Bite::RedexApp(Abstraction::new(y, PositiveTerm::var(y)), z));
        }
    }
    out
}

/// Compares the outside-in and inside-out definitions of right contexts on
/// every context with at most `max_entries` entries over `alphabet`.
/// Returns the number of contexts checked, or the first disagreement.
pub fn right_ctx_agreement(max_entries: usize, alphabet: &[VarId]) -> Result<u64, OpenContext> {
    let mut slots = Vec::new();
    for &x in alphabet {
        for b in context_bites(alphabet) {
            slots.push(Entry::new(x, b));
        }
    }
    let mut checked = 0u64;
    for len in 0..=max_entries {
        if len == 0 {
            if is_right_oi_entries(&[]) != is_right_io_entries(&[]) {
                return Err(OpenContext::empty());
            }
            checked += 1;
            continue;
        }
        // the first slot is the unit of parallel work
        let results = super::par_map(&(0..slots.len()).collect::<Vec<_>>(), |&first| {
            enumerate_with_prefix(&slots, first, len)
        });
        for r in results {
            checked += r?;
        }
    }
    Ok(checked)
}

fn enumerate_with_prefix(slots: &[Entry], first: usize, len: usize) -> Result<u64, OpenContext> {
    let mut idx = vec![0usize; len];
    idx[0] = first;
    let mut buf: Vec<Entry> = idx.iter().map(|&i| slots[i].clone()).collect();
    let mut checked = 0u64;
    loop {
        if is_right_oi_entries(&buf) != is_right_io_entries(&buf) {
            return Err(OpenContext::new(buf));
        }
        checked += 1;
        // odometer over positions 1..len
        let mut k = len;
        loop {
            k -= 1;
            if k == 0 {
                return Ok(checked);
            }
            idx[k] += 1;
            if idx[k] < slots.len() {
                buf[k] = slots[idx[k]].clone();
                break;
            }
            idx[k] = 0;
            buf[k] = slots[0].clone();
        }
    }
}

/// Transition-count and per-transition cost bounds of a Sliced run.
/// Returns the violated bounds.
pub fn check_bounds(report: &RunReport<SlicedState>) -> Vec<String> {
    let c = &report.counts;
    let n = report.initial_size;
    let mut out = Vec::new();
    if c.e > c.m + 1 {
        out.push(format!("e = {} > m + 1 = {}", c.e, c.m + 1));
    }
    if c.sea3 > c.m {
        out.push(format!("sea3 = {} > m = {}", c.sea3, c.m));
    }
    let search_bound = n * (c.e + c.sea3 + 1);
    if c.sea1 + c.sea2 > search_bound {
        out.push(format!(
            "sea1 + sea2 = {} > {search_bound}",
            c.sea1 + c.sea2
        ));
    }
    for (i, tr) in report.cost_samples.iter().enumerate() {
        let ok = match tr.label {
            TransitionLabel::Sea1 | TransitionLabel::Sea2 => tr.cost == 1,
            _ => tr.cost <= n,
        };
        if !ok {
            out.push(format!(
                "transition {i} ({}) costs {} with |t0| = {n}",
                tr.label, tr.cost
            ));
        }
    }
    out
}

/// `size(active) + Σ size(slice bodies)`, which bounds the length of the
/// next burst of search transitions.
pub fn search_measure(s: &SlicedState) -> usize {
    s.active.size() + s.stack.iter().map(|sl| sl.body.size()).sum::<usize>()
}

#[derive(Clone, Debug, Default)]
pub struct InvariantReport {
    pub states_checked: usize,
    pub violations: Vec<String>,
}

/// Runs the Sliced POM on `t` checking, at every state: contextual
/// read-back, well-boundness, the sub-term bound (with the post-e
/// exemption), determinism and the search-termination measure; at the end,
/// the final-state shape and a redex-free read-back. The Natural POM's
/// invariants are checked along its own run.
pub fn invariant_suite(t: &PositiveTerm, budget: usize) -> InvariantReport {
    let n = t.size();
    let mut rep = InvariantReport::default();
    let mut supply = NameSupply::fresh_for(t);
    let init = SlicedState::init(t, &mut supply);
    let mut measure = search_measure(&init);
    let mut burst = 0;
    let mut check = |s: &SlicedState, label: Option<TransitionLabel>, rep: &mut InvariantReport| {
        rep.states_checked += 1;
        let after_e = label == Some(TransitionLabel::E);
        for v in check_state_invariants(s, n, after_e) {
            rep.violations
                .push(format!("state {}: {v}", rep.states_checked));
        }
        let app = applicable_transitions(s);
        if app.len() > 1 {
            rep.violations
                .push(format!("state {}: {app:?} all apply", rep.states_checked));
        }
        match label {
            Some(l) if !l.is_principal() => {
                burst += 1;
                if burst > measure {
                    rep.violations.push(format!(
                        "state {}: {burst} searches exceed measure {measure}",
                        rep.states_checked
                    ));
                }
            }
            _ => {
                burst = 0;
                measure = search_measure(s);
            }
        }
    };
    check(&init, None, &mut rep);
    let report = run_with(t, budget, |s: &SlicedState, tr| {
        check(s, Some(tr.label), &mut rep)
    });
    let fin = &report.final_state;
    if report.status == crate::machines::RunStatus::Normal {
        if !fin.stack.is_empty() || !fin.active.is_var() {
            rep.violations
                .push("final state is not of shape (ε, x, E)".into());
        }
        if !locate_redexes(&fin.read_back()).is_empty() {
            rep.violations.push("final read-back has redexes".into());
        }
    }
    run_with(t, budget, |s: &NaturalState, _| {
        rep.states_checked += 1;
        for v in check_natural_invariants(s) {
            rep.violations.push(format!("natural state: {v}"));
        }
    });
    rep
}
