use std::fmt;

use crate::calculus::{right_redex, right_step, RedexKind};
use crate::machines::{LabelCounts, Machine};
use crate::syntax::{NameSupply, PositiveTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MismatchKind {
    Label,
    Readback,
    Halt,
    Count,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub step: usize,
    pub kind: MismatchKind,
    pub detail: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {}: {:?} mismatch: {}",
            self.step, self.kind, self.detail
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct BisimReport {
    /// Machine transitions checked.
    pub steps_checked: usize,
    /// Only `m` and `e` are populated.
    pub strategy_counts: LabelCounts,
    pub machine_counts: LabelCounts,
    pub mismatches: Vec<Mismatch>,
    pub budget_exhausted: bool,
}

impl BisimReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
            && self.strategy_counts.m == self.machine_counts.m
            && self.strategy_counts.e == self.machine_counts.e
    }
}

/// Runs `M` on `t` in lockstep with the right strategy. Every principal
/// transition must project to exactly one strategy step with the same label
/// and an α-equal result; every search transition must leave the read-back
/// unchanged; a final state must read back to a normal term.
pub fn bisimulate<M: Machine>(t: &PositiveTerm, budget: usize) -> BisimReport {
    let mut supply = NameSupply::fresh_for(t);
    let mut state = M::init(t, &mut supply);
    let mut report = BisimReport::default();
    let mut cur = state.read_back();
    if !cur.alpha_eq(t) {
        report.mismatches.push(Mismatch {
            step: 0,
            kind: MismatchKind::Readback,
            detail: format!("initial read-back {cur} is not {t}"),
        });
        return report;
    }
    while let Some(label) = state.peek() {
        if label.is_principal() && report.machine_counts.principal() >= budget {
            report.budget_exhausted = true;
            break;
        }
        let tr = state.step(&mut supply).expect("peek promised a transition");
        report.steps_checked += 1;
        report.machine_counts.bump(tr.label);
        let next = state.read_back();
        let step = report.steps_checked;
        if let Some(kind) = tr.label.redex_kind() {
            match right_step(&cur, &mut supply) {
                None => report.mismatches.push(Mismatch {
                    step,
                    kind: MismatchKind::Label,
                    detail: format!("machine fired {} on the normal term {cur}", tr.label),
                }),
                Some((expected, k)) => {
                    match k {
                        RedexKind::Multiplicative => report.strategy_counts.m += 1,
                        RedexKind::Exponential => report.strategy_counts.e += 1,
                    }
                    if k != kind {
                        report.mismatches.push(Mismatch {
                            step,
                            kind: MismatchKind::Label,
                            detail: format!("machine fired {}, strategy fired {k}", tr.label),
                        });
                    } else if !expected.alpha_eq(&next) {
                        report.mismatches.push(Mismatch {
                            step,
                            kind: MismatchKind::Readback,
                            detail: format!("expected {expected}, machine reads back {next}"),
                        });
                    }
                }
            }
        } else if next != cur && !next.alpha_eq(&cur) {
            report.mismatches.push(Mismatch {
                step,
                kind: MismatchKind::Readback,
                detail: format!("{} changed {cur} into {next}", tr.label),
            });
        }
        if !report.mismatches.is_empty() {
            return report;
        }
        cur = next;
    }
    if !report.budget_exhausted && right_redex(&cur).is_some() {
        report.mismatches.push(Mismatch {
            step: report.steps_checked,
            kind: MismatchKind::Halt,
            detail: format!("machine halted on {cur}, which has a right redex"),
        });
    }
    for (l, a, b) in [
        ("m", report.strategy_counts.m, report.machine_counts.m),
        ("e", report.strategy_counts.e, report.machine_counts.e),
    ] {
        if a != b {
            report.mismatches.push(Mismatch {
                step: report.steps_checked,
                kind: MismatchKind::Count,
                detail: format!("{l}: strategy {a}, machine {b}"),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crumble::crumble;
    use crate::harness::gen::omega;
    use crate::machines::{NaturalState, SlicedState};
    use crate::syntax::{parse_lambda, VarId};

    #[test]
    fn table_one() {
        let t = parse_lambda("(\\x.x x)((\\z.z)(\\z.z))").unwrap();
        let p = crumble(&t, &mut NameSupply::fresh_for_lambda(&t));
        let r = bisimulate::<SlicedState>(&p, 100);
        assert!(r.passed(), "{:?}", r.mismatches);
        assert_eq!((r.machine_counts.m, r.machine_counts.e), (3, 1));
        assert!(bisimulate::<NaturalState>(&p, 100).passed());
    }

    #[test]
    fn trivial_and_divergent() {
        let r = bisimulate::<SlicedState>(&PositiveTerm::var(VarId::from_raw(1)), 5);
        assert!(r.passed());
        assert_eq!(r.steps_checked, 0);
        let r = bisimulate::<SlicedState>(&omega(), 50);
        assert!(r.passed(), "{:?}", r.mismatches);
        assert!(r.budget_exhausted);
        assert_eq!(r.machine_counts.principal(), 50);
        assert!(bisimulate::<NaturalState>(&omega(), 50).passed());
    }
}
