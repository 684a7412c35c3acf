//! Term representations: ordinary λ-terms and positive terms, concrete
//! variables with a fresh-name supply, parsing and printing.

mod lambda;
mod parse;
mod positive;
mod var;

pub use lambda::LambdaTerm;
pub use parse::{parse_lambda, parse_positive, ParseError};
pub use positive::{Abstraction, Bite, Entry, OpenContext, PositiveTerm};
pub use var::{NameSupply, VarId};

pub(crate) use positive::lookup_in;

/// Ids at or above this value are reserved for canonical binder names.
const CANONICAL_BASE: u32 = 1 << 31;

fn canonical_binder(k: u32) -> VarId {
    VarId::from_raw(CANONICAL_BASE + k)
}

impl NameSupply {
    /// A supply whose ids are all fresh for `t`.
    pub fn fresh_for(t: &PositiveTerm) -> NameSupply {
        NameSupply::starting_at(t.max_var_id() + 1)
    }

    pub fn fresh_for_lambda(t: &LambdaTerm) -> NameSupply {
        NameSupply::starting_at(t.max_var_id() + 1)
    }
}
