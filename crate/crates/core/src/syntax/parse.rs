//! Hand-written lexer and recursive-descent parsers for both term languages.
//!
//! ```text
//! term  ::= var | '\' var '.' term | term term | '(' term ')'
//! pterm ::= var | pterm '[' var '<-' bite ']'
//! bite  ::= var var | '\' var '.' pterm | '(' '\' var '.' pterm ')' var
//! ```
//!
//! `λ` is accepted for `\` and `←` for `<-`. Binders get fresh unnamed ids
//! (printed `v<n>`); free variables keep their source name as display hint.

use std::collections::HashMap;

use thiserror::Error;

use super::lambda::LambdaTerm;
use super::positive::{Abstraction, Bite, Entry, PositiveTerm};
use super::var::{NameSupply, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("not a positive term (offset {pos}): {msg}")]
    NotPositive { pos: usize, msg: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::NotPositive { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '←' => Tok::Arrow,
            '<' if chars.get(i + 1) == Some(&'-') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                i = j - 1;
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: lex(text)?,
            pos: 0,
            end: text.chars().count(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn not_positive<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::NotPositive {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.syntax("expected a variable"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

/// Name resolution: binders get fresh ids, free names one hinted id each.
struct Scope {
    supply: NameSupply,
    bound: HashMap<String, Vec<VarId>>,
    free: HashMap<String, VarId>,
}

impl Scope {
    fn new() -> Self {
        Scope {
            supply: NameSupply::new(),
            bound: HashMap::new(),
            free: HashMap::new(),
        }
    }

    fn lookup(&mut self, name: &str) -> VarId {
        if let Some(v) = self.bound.get(name).and_then(|s| s.last()) {
            return *v;
        }
        if let Some(v) = self.free.get(name) {
            return *v;
        }
        let v = self.supply.fresh_named(name);
        self.free.insert(name.to_owned(), v);
        v
    }

    fn push(&mut self, name: &str, v: VarId) {
        self.bound.entry(name.to_owned()).or_default().push(v);
    }

    fn pop(&mut self, name: &str) {
        if let Some(s) = self.bound.get_mut(name) {
            s.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// λ-terms

enum RawLambda {
    Var(String),
    Abs(String, Box<RawLambda>),
    App(Box<RawLambda>, Box<RawLambda>),
}

pub fn parse_lambda(text: &str) -> Result<LambdaTerm, ParseError> {
    let mut cur = Cursor::new(text)?;
    let raw = lambda_term(&mut cur)?;
    if !cur.at_end() {
        return cur.syntax("unexpected trailing input");
    }
    let mut scope = Scope::new();
    Ok(resolve_lambda(&raw, &mut scope))
}

fn lambda_term(cur: &mut Cursor) -> Result<RawLambda, ParseError> {
    let mut acc: Option<RawLambda> = None;
    loop {
        let atom = match cur.peek() {
            Some(Tok::Ident(_)) => RawLambda::Var(cur.ident()?),
            Some(Tok::LParen) => {
                cur.bump();
                let t = lambda_term(cur)?;
                cur.expect(Tok::RParen, "')'")?;
                t
            }
            Some(Tok::Lambda) => {
                cur.bump();
                let x = cur.ident()?;
                cur.expect(Tok::Dot, "'.'")?;
                let body = lambda_term(cur)?;
                RawLambda::Abs(x, Box::new(body))
            }
            _ => break,
        };
        acc = Some(match acc {
            None => atom,
            Some(f) => RawLambda::App(Box::new(f), Box::new(atom)),
        });
    }
    match acc {
        Some(t) => Ok(t),
        None => cur.syntax("expected a term"),
    }
}

fn resolve_lambda(raw: &RawLambda, scope: &mut Scope) -> LambdaTerm {
    match raw {
        RawLambda::Var(x) => LambdaTerm::Var(scope.lookup(x)),
        RawLambda::Abs(x, b) => {
            let v = scope.supply.fresh();
            scope.push(x, v);
            let body = resolve_lambda(b, scope);
            scope.pop(x);
            LambdaTerm::abs(v, body)
        }
        RawLambda::App(f, a) => {
            let f = resolve_lambda(f, scope);
            let a = resolve_lambda(a, scope);
            LambdaTerm::app(f, a)
        }
    }
}

// ---------------------------------------------------------------------------
// positive terms

struct RawTerm {
    head: String,
    entries: Vec<(String, RawBite)>,
}

enum RawBite {
    App(String, String),
    Abs(String, RawTerm),
    Redex(String, RawTerm, String),
}

pub fn parse_positive(text: &str) -> Result<PositiveTerm, ParseError> {
    let mut cur = Cursor::new(text)?;
    let raw = pterm(&mut cur)?;
    if !cur.at_end() {
        return match cur.peek() {
            Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Lambda) => {
                cur.not_positive("applications and abstractions must be shared by an ES")
            }
            _ => cur.syntax("unexpected trailing input"),
        };
    }
    let mut scope = Scope::new();
    Ok(resolve_pterm(&raw, &mut scope))
}

fn pterm(cur: &mut Cursor) -> Result<RawTerm, ParseError> {
    let head = match cur.peek() {
        Some(Tok::Ident(_)) => cur.ident()?,
        Some(Tok::Lambda) | Some(Tok::LParen) => {
            return cur.not_positive("a positive term starts with its head variable")
        }
        _ => return cur.syntax("expected a variable"),
    };
    let mut entries = Vec::new();
    while cur.peek() == Some(&Tok::LBracket) {
        cur.bump();
        let x = cur.ident()?;
        cur.expect(Tok::Arrow, "'<-'")?;
        let b = bite(cur)?;
        match cur.peek() {
            Some(Tok::RBracket) => {
                cur.bump();
            }
            Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Lambda) => {
                return cur.not_positive("nested applications are not bites")
            }
            _ => return cur.syntax("expected ']'"),
        }
        entries.push((x, b));
    }
    Ok(RawTerm { head, entries })
}

fn bite(cur: &mut Cursor) -> Result<RawBite, ParseError> {
    match cur.peek() {
        Some(Tok::Ident(_)) => {
            let y = cur.ident()?;
            match cur.peek() {
                Some(Tok::Ident(_)) => {
                    let z = cur.ident()?;
                    Ok(RawBite::App(y, z))
                }
                Some(Tok::RBracket) => {
                    cur.not_positive("explicit substitutions of variables are not allowed")
                }
                Some(Tok::LBracket) => {
                    cur.not_positive("explicit substitutions of terms are not allowed")
                }
                Some(Tok::LParen) | Some(Tok::Lambda) => {
                    cur.not_positive("arguments must be variables")
                }
                _ => cur.syntax("expected a variable"),
            }
        }
        Some(Tok::Lambda) => {
            cur.bump();
            let y = cur.ident()?;
            cur.expect(Tok::Dot, "'.'")?;
            let body = pterm(cur)?;
            Ok(RawBite::Abs(y, body))
        }
        Some(Tok::LParen) => {
            cur.bump();
            if cur.peek() != Some(&Tok::Lambda) {
                return cur.not_positive("only abstractions can be applied in a bite");
            }
            cur.bump();
            let y = cur.ident()?;
            cur.expect(Tok::Dot, "'.'")?;
            let body = pterm(cur)?;
            match cur.peek() {
                Some(Tok::RParen) => {
                    cur.bump();
                }
                Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Lambda) => {
                    return cur.not_positive("applications must be shared by an ES")
                }
                _ => return cur.syntax("expected ')'"),
            }
            match cur.peek() {
                Some(Tok::Ident(_)) => {
                    let z = cur.ident()?;
                    Ok(RawBite::Redex(y, body, z))
                }
                Some(Tok::LParen) | Some(Tok::Lambda) => {
                    cur.not_positive("arguments must be variables")
                }
                _ => cur.syntax("expected an argument variable"),
            }
        }
        _ => cur.syntax("expected a bite"),
    }
}

fn resolve_pterm(raw: &RawTerm, scope: &mut Scope) -> PositiveTerm {
    // binder ids in written order, then resolve outside-in
    let binders: Vec<VarId> = raw.entries.iter().map(|_| scope.supply.fresh()).collect();
    let mut entries: Vec<Entry> = Vec::with_capacity(raw.entries.len());
    for ((name, b), v) in raw.entries.iter().zip(&binders).rev() {
        let bite = resolve_bite(b, scope);
        entries.push(Entry::new(*v, bite));
        scope.push(name, *v);
    }
    let head = scope.lookup(&raw.head);
    for (name, _) in &raw.entries {
        scope.pop(name);
    }
    entries.reverse();
    PositiveTerm { head, entries }
}

fn resolve_abs(y: &str, body: &RawTerm, scope: &mut Scope) -> Abstraction {
    let p = scope.supply.fresh();
    scope.push(y, p);
    let body = resolve_pterm(body, scope);
    scope.pop(y);
    Abstraction::new(p, body)
}

fn resolve_bite(raw: &RawBite, scope: &mut Scope) -> Bite {
    match raw {
        RawBite::App(y, z) => {
            let y = scope.lookup(y);
            let z = scope.lookup(z);
            Bite::VarApp(y, z)
        }
        RawBite::Abs(y, body) => Bite::Abs(resolve_abs(y, body, scope)),
        RawBite::Redex(y, body, z) => {
            let z = scope.lookup(z);
            Bite::RedexApp(resolve_abs(y, body, scope), z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let t = parse_lambda("\\x.x").unwrap();
        let LambdaTerm::Abs(x, body) = &t else {
            panic!("{t:?}")
        };
        assert_eq!(**body, LambdaTerm::Var(*x));
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_lambda("x y z").unwrap();
        let x = VarId::from_raw(1);
        let y = VarId::from_raw(2);
        let z = VarId::from_raw(3);
        let expected = LambdaTerm::app(
            LambdaTerm::app(LambdaTerm::var(x), LambdaTerm::var(y)),
            LambdaTerm::var(z),
        );
        assert_eq!(t, expected);
        assert_eq!(t.to_string(), "x y z");
    }

    #[test]
    fn table_one_input() {
        let t = parse_lambda("(\\x.x x)((\\z.z)(\\z.z))").unwrap();
        let v = VarId::from_raw;
        let expected = LambdaTerm::app(
            LambdaTerm::abs(
                v(1),
                LambdaTerm::app(LambdaTerm::var(v(1)), LambdaTerm::var(v(1))),
            ),
            LambdaTerm::app(
                LambdaTerm::abs(v(2), LambdaTerm::var(v(2))),
                LambdaTerm::abs(v(3), LambdaTerm::var(v(3))),
            ),
        );
        assert_eq!(t, expected);
        assert_eq!(parse_lambda("(λx.x x)((λz.z)(λz.z))").unwrap(), expected);
    }

    #[test]
    fn abstraction_body_extends_right() {
        let t = parse_lambda("\\x.x y").unwrap();
        assert!(matches!(t, LambdaTerm::Abs(_, ref b) if matches!(**b, LambdaTerm::App(..))));
    }

    #[test]
    fn lambda_errors_carry_position() {
        let e = parse_lambda("(x y").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { pos: 4, .. }), "{e:?}");
        let e = parse_lambda("\\x x").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { pos: 3, .. }), "{e:?}");
        assert!(parse_lambda("").is_err());
        assert!(parse_lambda("x $").is_err());
    }

    #[test]
    fn positive_basics() {
        let t = parse_positive("x").unwrap();
        assert!(t.is_var());
        let t = parse_positive("x[x <- y z]").unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.head, t.entries[0].binder);
        assert!(
            matches!(t.entries[0].bite, Bite::VarApp(y, z) if y.hint() == Some("y") && z.hint() == Some("z"))
        );
        let u = parse_positive("x[x ← y z]").unwrap();
        assert!(t.alpha_eq(&u));
    }

    #[test]
    fn positive_scoping() {
        // head z is free, not bound by [x <- ...]
        let t = parse_positive("z[x <- y z]").unwrap();
        assert_eq!(t.free_vars().len(), 2);
        assert_ne!(t.head, t.entries[0].binder);
        // the binder of an ES does not scope over its own bite
        let t = parse_positive("x[x <- x x]").unwrap();
        let Bite::VarApp(a, _) = t.entries[0].bite else {
            panic!()
        };
        assert_ne!(a, t.entries[0].binder);
    }

    #[test]
    fn positive_grammar_violations() {
        for bad in [
            "x[x <- y]",
            "x[x <- y z w]",
            "x[x <- (y z) w]",
            "x y",
            "\\x.x",
            "x[x <- \\y.y z]",
            "x[x <- y[y <- a b]]",
        ] {
            match parse_positive(bad) {
                Err(ParseError::NotPositive { .. }) => {}
                other => panic!("{bad}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_positive("x[x <- "),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn positive_print_parse_round_trip() {
        let src = "v4[v4 <- (\\v1.v5[v5 <- v1 v1]) v6][v6 <- (\\v2.v2) v7][v7 <- \\v3.v3]";
        let t = parse_positive(src).unwrap();
        let again = parse_positive(&t.to_string()).unwrap();
        assert!(t.alpha_eq(&again));
        assert!(t.well_bound());
    }
}
