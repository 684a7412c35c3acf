use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_positive, LambdaTerm, NameSupply, PositiveTerm, VarId};

/// Probability that a leaf refers to an enclosing binder in open terms.
pub const BOUND_LEAF_PROBABILITY: f64 = 0.8;

const APP_PROBABILITY: f64 = 0.65;
const CLOSED_APP_PROBABILITY: f64 = 0.75;

const FREE_NAMES: [&str; 3] = ["a", "b", "c"];

/// A random λ-term with at most `size` nodes (at least 2 when `closed`),
/// deterministic in `seed`. Open terms draw free variables from a small pool.
pub fn gen_random_lambda(seed: u64, size: usize, closed: bool) -> LambdaTerm {
    let mut supply = NameSupply::new();
    let free = FREE_NAMES.map(|h| supply.fresh_named(h));
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        supply,
        free,
        closed,
        scope: Vec::new(),
    };
    g.term(size.max(1))
}

struct Gen {
    rng: ChaCha8Rng,
    supply: NameSupply,
    free: [VarId; 3],
    closed: bool,
    scope: Vec<VarId>,
}

impl Gen {
    fn leaf(&mut self) -> LambdaTerm {
        let bound =
            !self.scope.is_empty() && (self.closed || self.rng.gen_bool(BOUND_LEAF_PROBABILITY));
        if bound {
            let i = self.rng.gen_range(0..self.scope.len());
            LambdaTerm::Var(self.scope[i])
        } else {
            let i = self.rng.gen_range(0..self.free.len());
            LambdaTerm::Var(self.free[i])
        }
    }

    fn term(&mut self, n: usize) -> LambdaTerm {
        let must_bind = self.closed && self.scope.is_empty();
        if n <= 1 && !must_bind {
            return self.leaf();
        }
        // closed terms split into applications of closed terms before
        // binding, otherwise almost all of them would be values
        let (app_probability, min_side) = if must_bind {
            (CLOSED_APP_PROBABILITY, 2)
        } else {
            (APP_PROBABILITY, 1)
        };
        if n < 1 + 2 * min_side || !self.rng.gen_bool(app_probability) {
            let x = self.supply.fresh();
            self.scope.push(x);
            let body = self.term(n.saturating_sub(1).max(1));
            self.scope.pop();
            return LambdaTerm::abs(x, body);
        }
        let k = self.rng.gen_range(min_side..n - min_side);
        let f = self.term(k);
        let a = self.term(n - 1 - k);
        LambdaTerm::app(f, a)
    }
}

/// `x[x <- y y][y <- λz.w[w <- z z]]`, the positive form of Ω.
pub fn omega() -> PositiveTerm {
    parse_positive("x[x <- y y][y <- \\z.w[w <- z z]]").expect("well-formed")
}

/// `τ₃ := x[x <- y z][z <- y y]`
pub fn tau3() -> PositiveTerm {
    parse_positive("x[x <- y z][z <- y y]").expect("well-formed")
}

/// `τ₃[y <- λy.τ₃]`: diverges while the Natural POM's renamings keep growing.
pub fn tau3_loop() -> PositiveTerm {
    parse_positive("x[x <- y z][z <- y y][y <- \\y.x[x <- y z][z <- y y]]").expect("well-formed")
}

/// Church numeral `λf.λx.f (f (... x))`.
pub fn church_numeral(n: usize, supply: &mut NameSupply) -> LambdaTerm {
    let f = supply.fresh_named("f");
    let x = supply.fresh_named("x");
    let mut body = LambdaTerm::Var(x);
    for _ in 0..n {
        body = LambdaTerm::app(LambdaTerm::Var(f), body);
    }
    LambdaTerm::abs(f, LambdaTerm::abs(x, body))
}

/// `c_n c_m (λz.z) a`, which normalizes to `a` after `m^n` unfoldings.
pub fn church(n: usize, m: usize) -> LambdaTerm {
    let mut supply = NameSupply::new();
    let a = supply.fresh_named("a");
    let cn = church_numeral(n, &mut supply);
    let cm = church_numeral(m, &mut supply);
    let z = supply.fresh_named("z");
    let id = LambdaTerm::abs(z, LambdaTerm::Var(z));
    LambdaTerm::app(
        LambdaTerm::app(LambdaTerm::app(cn, cm), id),
        LambdaTerm::Var(a),
    )
}
