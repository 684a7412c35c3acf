use std::collections::HashMap;
use std::fmt;

use crate::syntax::{Bite, Entry, OpenContext, VarId};

/// The global environment `E ::= ε | [x <- b] : E`, or equivalently a right
/// context grown from the inside.
///
/// Entries are kept oldest-first alongside an index from binder to entry,
/// so lookup is constant time. Entries are never removed.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    entries: Vec<Entry>,
    index: HashMap<VarId, usize>,
}

impl Environment {
    pub fn new() -> Self {
        Environment::default()
    }

    /// `[x <- b] : E`
    pub fn push(&mut self, e: Entry) {
        self.index.insert(e.binder, self.entries.len());
        self.entries.push(e);
    }

    /// `E(x)`; the most recent binding wins.
    pub fn lookup(&self, x: VarId) -> Option<&Bite> {
        self.index.get(&x).map(|&i| &self.entries[i].bite)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter_recent_first(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().rev()
    }

    pub fn iter_oldest_first(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter()
    }

    /// `Ē`: the most recent entry ends up innermost.
    pub fn read_back(&self) -> OpenContext {
        OpenContext::new(self.iter_recent_first().cloned().collect())
    }
}

/// Recent-first, `" : "`-separated and terminated by `ε`.
impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in self.iter_recent_first() {
            write!(f, "{e} : ")?;
        }
        f.write_str("ε")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::from_raw(n)
    }

    #[test]
    fn read_back_puts_recent_entries_inside() {
        assert!(Environment::new().read_back().is_empty());
        let mut env = Environment::new();
        env.push(Entry::new(v(2), Bite::VarApp(v(5), v(5))));
        let ctx = env.read_back();
        assert_eq!(
            ctx.entries,
            vec![Entry::new(v(2), Bite::VarApp(v(5), v(5)))]
        );
        env.push(Entry::new(v(1), Bite::VarApp(v(3), v(4))));
        // [x <- b] : [y <- b'] : ε  reads back as ⟨·⟩[x <- b][y <- b']
        let ctx = env.read_back();
        assert_eq!(ctx.entries[0].binder, v(1));
        assert_eq!(ctx.entries[1].binder, v(2));
        assert_eq!(env.to_string(), "[v1 <- v3 v4] : [v2 <- v5 v5] : ε");
    }

    #[test]
    fn lookup_is_by_identity() {
        let mut env = Environment::new();
        env.push(Entry::new(v(1), Bite::VarApp(v(3), v(4))));
        assert!(env.lookup(v(1)).is_some());
        assert!(env.lookup(v(3)).is_none());
    }
}
