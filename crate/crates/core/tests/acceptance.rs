//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails at the end if any criterion failed.

use std::time::{Duration, Instant};

use posm_core::calculus::enumerate_redexes;
use posm_core::crumble::{crumble, unfold_with_limit, UNFOLD_LIMIT};
use posm_core::harness::gen::{gen_random_lambda, omega, tau3_loop};
use posm_core::harness::{
    bisimulate, check_bounds, corpus, diamond_check, invariant_suite, map_with,
    right_ctx_agreement, scaling_experiment, strategy_check, CorpusItem, Exec,
};
use posm_core::machines::{run, Machine, NaturalState, SlicedState, TransitionLabel};
use posm_core::{parse_lambda, parse_positive, Bite, NameSupply, PositiveTerm, VarId};

const TABLE_ONE_INPUT: &str = "(\\x.x x)((\\z.z)(\\z.z))";
const TABLE_ONE_CRUMBLED: &str =
    "v4[v4 <- (\\v1.v5[v5 <- v1 v1]) v6][v6 <- (\\v2.v2) v7][v7 <- \\v3.v3]";

const CORPUS_SEED: u64 = 0x5eed;
const CORPUS_SIZE: usize = 500;
const CORPUS_MAX_TERM: usize = 40;
const PRINCIPAL_BUDGET: usize = 1000;
const DIAMOND_TERMS: usize = 300;
const DIAMOND_DEPTH: usize = 4;
const CTX_ENTRIES: usize = 4;
const CRUMBLE_TERMS: usize = 1000;
const CRUMBLE_MAX_TERM: usize = 60;

const SCALING_BUDGETS: [usize; 4] = [64, 128, 256, 512];
const NATURAL_RATIO: (f64, f64) = (3.5, 4.3);
const SLICED_RATIO: (f64, f64) = (1.8, 2.2);
const NATURAL_M_COST_FACTOR: usize = 10;

const LIMIT_GOLDEN: Duration = Duration::from_millis(1);
const LIMIT_BISIM: Duration = Duration::from_secs(30);
const LIMIT_DIAMOND: Duration = Duration::from_secs(30);
const LIMIT_CTX: Duration = Duration::from_secs(10);
const LIMIT_SCALING: Duration = Duration::from_secs(10);
const LIMIT_CRUMBLE: Duration = Duration::from_secs(30);

struct Outcome {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    detail: String,
    elapsed: Duration,
}

fn criterion(
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce(&mut Vec<String>) -> String,
) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let detail = body(&mut failures);
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            failures.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    Outcome {
        id,
        name,
        failures,
        detail,
        elapsed,
    }
}

/// Best of a few runs, so the sub-millisecond limits measure the work
/// rather than the first-touch cost of the allocator.
fn min_time<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..reps {
        let start = Instant::now();
        out = Some(f());
        best = best.min(start.elapsed());
    }
    (out.unwrap(), best)
}

fn table_one() -> PositiveTerm {
    let t = parse_lambda(TABLE_ONE_INPUT).unwrap();
    crumble(&t, &mut NameSupply::fresh_for_lambda(&t))
}

fn check_items(
    failures: &mut Vec<String>,
    items: &[CorpusItem],
    f: impl Fn(&CorpusItem) -> Result<(), String> + Sync + Send,
) -> usize {
    let results = map_with(Exec::default(), items, |it| {
        f(it).map_err(|e| format!("seed {}: {e}", it.seed))
    });
    let mut ok = 0;
    for r in results {
        match r {
            Ok(()) => ok += 1,
            Err(e) => failures.push(e),
        }
    }
    ok
}

fn golden_trace() -> Outcome {
    criterion(1, "golden trace", None, |failures| {
        let p = table_one();
        let (r, took) = min_time(20, || run::<SlicedState>(&p, PRINCIPAL_BUDGET));
        let labels: Vec<_> = r.labels().iter().map(|l| l.as_str()).collect();
        let expected = ["sea1", "m", "sea3", "m", "e", "m", "sea3", "sea3"];
        if labels != expected {
            failures.push(format!("labels {labels:?}"));
        }
        let s = &r.final_state;
        let shape_ok = s.stack.is_empty()
            && s.active.is_var()
            && s.env.len() == 1
            && matches!(
                s.env.lookup(s.active.head),
                Some(Bite::Abs(a)) if a.body.is_var() && a.body.head == a.param
            );
        if !shape_ok {
            failures.push(format!("final state {}", s.trace_fields()));
        }
        let want = parse_positive("v7[v7 <- \\v3.v3]").unwrap();
        if !s.read_back().alpha_eq(&want) {
            failures.push(format!("read-back {}", s.read_back()));
        }
        if took > LIMIT_GOLDEN {
            failures.push(format!("run took {took:?}"));
        }
        format!(
            "{} transitions, read-back {}, {took:?}",
            labels.len(),
            s.read_back()
        )
    })
}

fn natural_prefix() -> Outcome {
    criterion(2, "natural golden prefix", None, |failures| {
        let t = omega();
        let ((labels, s), took) = min_time(20, || {
            let mut supply = NameSupply::fresh_for(&t);
            let mut s = NaturalState::init(&t, &mut supply);
            let labels: Vec<_> = (0..3)
                .filter_map(|_| s.step(&mut supply))
                .map(|tr| tr.label)
                .collect();
            (labels, s)
        });
        if labels
            != [
                TransitionLabel::Sea1,
                TransitionLabel::E,
                TransitionLabel::M,
            ]
        {
            failures.push(format!("labels {labels:?}"));
        }
        // w'[w' <- y y] with y the abstraction in the right context
        let y = s.rctx.iter_recent_first().next().map(|e| e.binder);
        let a = &s.active;
        let shape_ok = a.entries.len() == 1
            && a.entries[0].binder == a.head
            && Some(a.entries[0].bite.clone()) == y.map(|y| Bite::VarApp(y, y))
            && y.and_then(|y| s.rctx.lookup(y))
                .is_some_and(|b| matches!(b, Bite::Abs(_)));
        if !shape_ok {
            failures.push(format!("active {a}"));
        }
        if took > LIMIT_GOLDEN {
            failures.push(format!("took {took:?}"));
        }
        format!("active {} | {}, {took:?}", a, s.rctx)
    })
}

fn bisimulation(items: &[CorpusItem]) -> Outcome {
    criterion(
        3,
        "mechanical bisimulation",
        Some(LIMIT_BISIM),
        |failures| {
            let open = items.iter().filter(|it| !it.closed).count();
            let ok = check_items(failures, items, |it| {
                let s = bisimulate::<SlicedState>(&it.term, PRINCIPAL_BUDGET);
                let n = bisimulate::<NaturalState>(&it.term, PRINCIPAL_BUDGET);
                for (name, r) in [("sliced", s), ("natural", n)] {
                    if !r.passed() {
                        return Err(format!("{name}: {:?}", r.mismatches.first()));
                    }
                }
                Ok(())
            });
            format!("{ok}/{} terms ({open} open), both machines", items.len())
        },
    )
}

fn diamond(items: &[CorpusItem]) -> Outcome {
    criterion(4, "diamond", Some(LIMIT_DIAMOND), |failures| {
        let square = parse_positive("z[x <- y y][z <- (\\w.w) y'][y <- \\x'.x']").unwrap();
        if let Err(c) = diamond_check(&square, DIAMOND_DEPTH) {
            failures.push(format!("square example: {} / {}", c.left, c.right));
        }
        let ok = check_items(failures, &items[..DIAMOND_TERMS], |it| {
            diamond_check(&it.term, DIAMOND_DEPTH)
                .map(|_| ())
                .map_err(|c| format!("{} and {} do not join", c.left, c.right))
        });
        format!("square example + {ok}/{DIAMOND_TERMS} terms at depth {DIAMOND_DEPTH}")
    })
}

fn right_contexts() -> Outcome {
    criterion(5, "right-context agreement", Some(LIMIT_CTX), |failures| {
        let alphabet: Vec<VarId> = (1..=3).map(VarId::from_raw).collect();
        match right_ctx_agreement(CTX_ENTRIES, &alphabet) {
            Ok(n) => format!("{n} contexts with <= {CTX_ENTRIES} entries"),
            Err(c) => {
                failures.push(format!("disagreement on {c}"));
                String::new()
            }
        }
    })
}

fn strategy(items: &[CorpusItem]) -> Outcome {
    criterion(6, "strategy properties", None, |failures| {
        let terms = std::sync::atomic::AtomicUsize::new(0);
        let ok = check_items(failures, items, |it| {
            let n = strategy_check(&it.term, PRINCIPAL_BUDGET)?;
            terms.fetch_add(n, std::sync::atomic::Ordering::Relaxed);
            Ok(())
        });
        format!(
            "{ok}/{} runs, {} reachable terms",
            items.len(),
            terms.into_inner()
        )
    })
}

fn invariants(items: &[CorpusItem]) -> Outcome {
    criterion(7, "invariant suite", None, |failures| {
        let states = std::sync::atomic::AtomicUsize::new(0);
        let ok = check_items(failures, items, |it| {
            let rep = invariant_suite(&it.term, PRINCIPAL_BUDGET);
            states.fetch_add(rep.states_checked, std::sync::atomic::Ordering::Relaxed);
            match rep.violations.first() {
                None => Ok(()),
                Some(v) => Err(v.clone()),
            }
        });
        format!("{ok}/{} runs, {} states", items.len(), states.into_inner())
    })
}

fn bounds(items: &[CorpusItem]) -> Outcome {
    criterion(8, "transition and cost bounds", None, |failures| {
        let r = run::<SlicedState>(&table_one(), PRINCIPAL_BUDGET);
        let c = r.counts;
        if (c.e, c.m, c.sea3) != (1, 3, 3) {
            failures.push(format!(
                "Table 1 counts e={} m={} sea3={}",
                c.e, c.m, c.sea3
            ));
        }
        failures.extend(check_bounds(&r));
        let ok = check_items(failures, items, |it| {
            let v = check_bounds(&run::<SlicedState>(&it.term, PRINCIPAL_BUDGET));
            if v.is_empty() {
                Ok(())
            } else {
                Err(v.join("; "))
            }
        });
        format!(
            "golden e={} m={} sea3={}; {ok}/{} runs",
            c.e,
            c.m,
            c.sea3,
            items.len()
        )
    })
}

fn scaling() -> Outcome {
    criterion(
        9,
        "quadratic vs bilinear",
        Some(LIMIT_SCALING),
        |failures| {
            let t = tau3_loop();
            let rep = scaling_experiment(&t, &SCALING_BUDGETS);
            let nat = *rep.natural_ratios().last().unwrap();
            let sl = *rep.sliced_ratios().last().unwrap();
            if !(NATURAL_RATIO.0..=NATURAL_RATIO.1).contains(&nat) {
                failures.push(format!("natural ratio {nat:.3} outside {NATURAL_RATIO:?}"));
            }
            if !(SLICED_RATIO.0..=SLICED_RATIO.1).contains(&sl) {
                failures.push(format!("sliced ratio {sl:.3} outside {SLICED_RATIO:?}"));
            }
            let n = rep.initial_size;
            let last = rep.rows.last().unwrap();
            if rep.rows.iter().any(|r| r.sliced_max_m_cost > n) {
                failures.push("sliced m cost exceeds |t0|".into());
            }
            if last.natural_max_m_cost <= NATURAL_M_COST_FACTOR * n {
                failures.push(format!(
                    "natural max m cost {} <= {NATURAL_M_COST_FACTOR}·{n}",
                    last.natural_max_m_cost
                ));
            }
            format!(
                "ratios natural {:?} sliced {:?}; max m cost natural {} sliced {} (|t0| = {n})",
                rep.natural_ratios()
                    .iter()
                    .map(|r| format!("{r:.3}"))
                    .collect::<Vec<_>>(),
                rep.sliced_ratios()
                    .iter()
                    .map(|r| format!("{r:.3}"))
                    .collect::<Vec<_>>(),
                last.natural_max_m_cost,
                last.sliced_max_m_cost
            )
        },
    )
}

fn crumbling() -> Outcome {
    criterion(10, "crumble correctness", Some(LIMIT_CRUMBLE), |failures| {
        if table_one().to_string() != TABLE_ONE_CRUMBLED {
            failures.push(format!("Table 1 crumbles to {}", table_one()));
        }
        let seeds: Vec<u64> = (0..CRUMBLE_TERMS as u64).collect();
        let results = map_with(Exec::default(), &seeds, |&seed| {
            let size = 1 + (seed as usize * 7919) % CRUMBLE_MAX_TERM;
            let t = gen_random_lambda(seed, size, seed % 2 == 0);
            let p = crumble(&t, &mut NameSupply::fresh_for_lambda(&t));
            match unfold_with_limit(&p, UNFOLD_LIMIT) {
                Ok(u) if u.alpha_eq(&t) && p.well_bound() => Ok(()),
                Ok(u) => Err(format!("seed {seed}: {t} unfolds to {u}")),
                Err(e) => Err(format!("seed {seed}: {e}")),
            }
        });
        let ok = results.iter().filter(|r| r.is_ok()).count();
        failures.extend(results.into_iter().filter_map(Result::err));
        format!("{ok}/{CRUMBLE_TERMS} terms; Table 1 matches")
    })
}

#[test]
fn acceptance() {
    let items = corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_MAX_TERM);
    let mut outcomes = vec![golden_trace(), natural_prefix()];
    outcomes.push(bisimulation(&items));
    outcomes.push(diamond(&items));
    outcomes.push(right_contexts());
    outcomes.push(strategy(&items));
    outcomes.push(invariants(&items));
    outcomes.push(bounds(&items));
    outcomes.push(scaling());
    outcomes.push(crumbling());

    // sanity: the normal forms reached in the golden trace really are normal
    let fin = run::<SlicedState>(&table_one(), PRINCIPAL_BUDGET)
        .final_state
        .read_back();
    assert!(enumerate_redexes(&fin, &mut NameSupply::fresh_for(&fin)).is_empty());

    let mut failed = 0;
    for o in &outcomes {
        let status = if o.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "{status} [{:>2}] {}: {} ({:.2?})",
            o.id, o.name, o.detail, o.elapsed
        );
        for f in o.failures.iter().take(5) {
            println!("       {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
