use serde::{Deserialize, Serialize};

use posm_core::machines::{LabelCounts, Machine, RunReport, TransitionLabel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub m: usize,
    pub e: usize,
    pub sea1: usize,
    pub sea2: usize,
    pub sea3: usize,
}

impl From<LabelCounts> for Counts {
    fn from(c: LabelCounts) -> Self {
        Counts {
            m: c.m,
            e: c.e,
            sea1: c.sea1,
            sea2: c.sea2,
            sea3: c.sea3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    /// `m` and `sea3`: the renamings.
    pub rename: usize,
    /// `e`: the abstraction copies.
    pub copy: usize,
    /// `sea1` and `sea2`.
    pub search: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub machine: String,
    pub term_size: usize,
    pub counts: Counts,
    pub cost: Cost,
    pub status: String,
    pub readback: Option<String>,
}

impl MetricsRecord {
    pub fn from_report<M: Machine>(r: &RunReport<M>, with_readback: bool) -> Self {
        let rename = r.cost_of(|l| matches!(l, TransitionLabel::M | TransitionLabel::Sea3));
        let copy = r.cost_of(|l| l == TransitionLabel::E);
        let search = r.cost_of(|l| matches!(l, TransitionLabel::Sea1 | TransitionLabel::Sea2));
        MetricsRecord {
            machine: M::NAME.to_string(),
            term_size: r.initial_size,
            counts: r.counts.into(),
            cost: Cost {
                rename,
                copy,
                search,
                total: rename + copy + search,
            },
            status: r.status.to_string(),
            readback: with_readback.then(|| r.final_state.read_back().to_string()),
        }
    }
}
