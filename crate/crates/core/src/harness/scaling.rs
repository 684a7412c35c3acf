use std::fmt;

use crate::machines::{natural_run, sliced_run, TransitionLabel};
use crate::syntax::PositiveTerm;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub budget: usize,
    pub natural_cost: usize,
    pub sliced_cost: usize,
    pub natural_m: usize,
    pub sliced_m: usize,
    pub natural_max_m_cost: usize,
    pub sliced_max_m_cost: usize,
    /// Total Sliced cost (all transitions) over `|t0| · (m + 1)`.
    pub sliced_constant: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub initial_size: usize,
    pub rows: Vec<ScalingRow>,
}

fn ratios(rows: &[ScalingRow], cost: impl Fn(&ScalingRow) -> usize) -> Vec<f64> {
    rows.windows(2)
        .map(|w| cost(&w[1]) as f64 / cost(&w[0]).max(1) as f64)
        .collect()
}

impl ScalingReport {
    /// Cumulative principal cost ratio between consecutive budgets.
    pub fn natural_ratios(&self) -> Vec<f64> {
        ratios(&self.rows, |r| r.natural_cost)
    }

    pub fn sliced_ratios(&self) -> Vec<f64> {
        ratios(&self.rows, |r| r.sliced_cost)
    }

    pub fn max_sliced_constant(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.sliced_constant)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "|t0| = {}", self.initial_size)?;
        writeln!(
            f,
            "{:>8} {:>12} {:>8} {:>12} {:>8} {:>10} {:>10}",
            "budget", "natural", "ratio", "sliced", "ratio", "nat max m", "sl max m"
        )?;
        let nr = self.natural_ratios();
        let sr = self.sliced_ratios();
        for (i, r) in self.rows.iter().enumerate() {
            let fmt_ratio = |v: &[f64]| match i.checked_sub(1).and_then(|j| v.get(j)) {
                Some(x) => format!("{x:.3}"),
                None => "-".to_string(),
            };
            writeln!(
                f,
                "{:>8} {:>12} {:>8} {:>12} {:>8} {:>10} {:>10}",
                r.budget,
                r.natural_cost,
                fmt_ratio(&nr),
                r.sliced_cost,
                fmt_ratio(&sr),
                r.natural_max_m_cost,
                r.sliced_max_m_cost
            )?;
        }
        write!(
            f,
            "sliced cost / (|t0|·(m+1)) <= {:.3}",
            self.max_sliced_constant()
        )
    }
}

/// Runs both machines on `t` once per budget and records cumulative
/// principal costs. Budgets are independent and run in parallel.
pub fn scaling_experiment(t: &PositiveTerm, budgets: &[usize]) -> ScalingReport {
    let n = t.size();
    let rows = super::par_map(budgets, |&k| {
        let nat = natural_run(t, k);
        let sl = sliced_run(t, k);
        let sliced_total: usize = sl.cost_samples.iter().map(|s| s.cost).sum();
        ScalingRow {
            budget: k,
            natural_cost: nat.principal_cost(),
            sliced_cost: sl.principal_cost(),
            natural_m: nat.counts.m,
            sliced_m: sl.counts.m,
            natural_max_m_cost: nat.max_cost(TransitionLabel::M),
            sliced_max_m_cost: sl.max_cost(TransitionLabel::M),
            sliced_constant: sliced_total as f64 / (n * (sl.counts.m + 1)) as f64,
        }
    });
    ScalingReport {
        initial_size: n,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::tau3_loop;

    #[test]
    fn budget_zero_costs_nothing() {
        let r = scaling_experiment(&tau3_loop(), &[0]);
        assert_eq!(r.rows[0].natural_cost, 0);
        assert_eq!(r.rows[0].sliced_cost, 0);
    }

    #[test]
    fn natural_renaming_scopes_grow() {
        let r = scaling_experiment(&tau3_loop(), &[8, 64]);
        assert!(r.rows[1].natural_max_m_cost > r.rows[0].natural_max_m_cost);
        assert!(r.rows[1].sliced_max_m_cost <= r.initial_size);
    }

    #[test]
    fn church_normalizes_with_bilinear_cost() {
        use crate::crumble::crumble;
        use crate::harness::gen::church;
        use crate::machines::RunStatus;
        use crate::syntax::NameSupply;
        let t = church(3, 2);
        let p = crumble(&t, &mut NameSupply::fresh_for_lambda(&t));
        assert_eq!(sliced_run(&p, 100_000).status, RunStatus::Normal);
        let r = scaling_experiment(&p, &[100_000]);
        assert!(r.max_sliced_constant() > 0.0 && r.max_sliced_constant() < 10.0);
    }
}
