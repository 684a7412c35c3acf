//! The positive λ-calculus, its right(-to-left) evaluation strategy, and two
//! abstract machines implementing it: the Natural POM, whose renamings scan
//! ever-growing scopes, and the Sliced POM, which confines every renaming to a
//! slice of the initial term and runs in bi-linear time.
//!
//! The [`harness`] module turns the correctness and complexity results about
//! these machines into executable checks.

pub mod calculus;
pub mod crumble;
pub mod harness;
pub mod machines;
pub mod syntax;

pub use syntax::{
    parse_lambda, parse_positive, Bite, LambdaTerm, NameSupply, OpenContext, PositiveTerm, VarId,
};
