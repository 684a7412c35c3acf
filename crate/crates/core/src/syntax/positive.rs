use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::lambda::restore;
use super::var::{NameSupply, VarId};

/// `λparam.body`. Never appears on its own in a positive term: it is always
/// shared by an explicit substitution, possibly applied to a variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Abstraction {
    pub param: VarId,
    pub body: PositiveTerm,
}

/// The right-hand side of an explicit substitution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bite {
    /// `y z`
    VarApp(VarId, VarId),
    /// `λy.u`
    Abs(Abstraction),
    /// `(λy.u) z`
    RedexApp(Abstraction, VarId),
}

/// One explicit substitution `[binder <- bite]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Entry {
    pub binder: VarId,
    pub bite: Bite,
}

/// A positive term `x[x1 <- b1]...[xn <- bn]`.
///
/// Stored in its unique head decomposition: the head variable plus the ES
/// spine in written order, so `entries[0]` is innermost (closest to the head)
/// and the last entry is outermost. Binder `xi` scopes over the head and over
/// `entries[..i]`, never over its own bite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PositiveTerm {
    pub head: VarId,
    pub entries: Vec<Entry>,
}

/// An open context `⟨·⟩[x1 <- b1]...[xn <- bn]`, same ordering as the spine
/// of [`PositiveTerm`]: the first entry is the one closest to the hole.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpenContext {
    pub entries: Vec<Entry>,
}

impl Abstraction {
    pub fn new(param: VarId, body: PositiveTerm) -> Self {
        Abstraction { param, body }
    }

    /// `|λy.u| = 1 + |u|`
    pub fn size(&self) -> usize {
        1 + self.body.size()
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut fv = self.body.free_vars();
        fv.remove(&self.param);
        fv
    }

    pub fn alpha_copy(&self, supply: &mut NameSupply) -> Abstraction {
        let mut scope = HashMap::new();
        let mut fresh = || supply.fresh();
        rebind_abs(self, &mut scope, &mut fresh)
    }

    fn has_free(&self, x: VarId) -> bool {
        self.param != x && self.body.has_free(x)
    }
}

impl Bite {
    pub fn size(&self) -> usize {
        match self {
            Bite::VarApp(..) => 2,
            Bite::Abs(a) => a.size(),
            Bite::RedexApp(a, _) => 1 + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        match self {
            Bite::VarApp(y, z) => BTreeSet::from([*y, *z]),
            Bite::Abs(a) => a.free_vars(),
            Bite::RedexApp(a, z) => {
                let mut fv = a.free_vars();
                fv.insert(*z);
                fv
            }
        }
    }

    pub fn as_abs(&self) -> Option<&Abstraction> {
        match self {
            Bite::Abs(a) => Some(a),
            _ => None,
        }
    }

    pub fn alpha_copy(&self, supply: &mut NameSupply) -> Bite {
        let mut scope = HashMap::new();
        let mut fresh = || supply.fresh();
        rebind_bite(self, &mut scope, &mut fresh)
    }

    fn has_free(&self, x: VarId) -> bool {
        match self {
            Bite::VarApp(y, z) => *y == x || *z == x,
            Bite::Abs(a) => a.has_free(x),
            Bite::RedexApp(a, z) => *z == x || a.has_free(x),
        }
    }

    fn collect_binders(&self, out: &mut Vec<VarId>) {
        match self {
            Bite::VarApp(..) => {}
            Bite::Abs(a) | Bite::RedexApp(a, _) => {
                out.push(a.param);
                a.body.collect_binders(out);
            }
        }
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Bite::VarApp(y, z) => out.extend([*y, *z]),
            Bite::Abs(a) => {
                out.push(a.param);
                a.body.collect_vars(out);
            }
            Bite::RedexApp(a, z) => {
                out.push(a.param);
                a.body.collect_vars(out);
                out.push(*z);
            }
        }
    }

    /// Renames free `x` to `z` without checking for capture.
    pub(crate) fn rename_unchecked(&mut self, x: VarId, z: VarId) {
        match self {
            Bite::VarApp(a, b) => {
                if *a == x {
                    *a = z;
                }
                if *b == x {
                    *b = z;
                }
            }
            Bite::Abs(abs) => {
                if abs.param != x {
                    abs.body.rename_unchecked(x, z);
                }
            }
            Bite::RedexApp(abs, arg) => {
                if abs.param != x {
                    abs.body.rename_unchecked(x, z);
                }
                if *arg == x {
                    *arg = z;
                }
            }
        }
    }

    fn subst_var(&mut self, x: VarId, z: VarId, supply: &mut NameSupply) {
        match self {
            Bite::VarApp(a, b) => {
                if *a == x {
                    *a = z;
                }
                if *b == x {
                    *b = z;
                }
            }
            Bite::Abs(abs) => abs_subst_var(abs, x, z, supply),
            Bite::RedexApp(abs, arg) => {
                abs_subst_var(abs, x, z, supply);
                if *arg == x {
                    *arg = z;
                }
            }
        }
    }
}

fn abs_subst_var(abs: &mut Abstraction, x: VarId, z: VarId, supply: &mut NameSupply) {
    if abs.param == x {
        return;
    }
    if abs.param == z && abs.body.has_free(x) {
        let f = supply.fresh();
        abs.body.rename_unchecked(z, f);
        abs.param = f;
    }
    abs.body.subst_var_in_place(x, z, supply);
}

impl Entry {
    pub fn new(binder: VarId, bite: Bite) -> Self {
        Entry { binder, bite }
    }
}

impl PositiveTerm {
    pub fn var(x: VarId) -> Self {
        PositiveTerm {
            head: x,
            entries: Vec::new(),
        }
    }

    /// `self[x <- b]`
    pub fn es(mut self, x: VarId, b: Bite) -> Self {
        self.entries.push(Entry::new(x, b));
        self
    }

    pub fn is_var(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|x| = 1`, `|t[x <- b]| = |t| + |b|`
    pub fn size(&self) -> usize {
        1 + self.entries.iter().map(|e| e.bite.size()).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut fv = BTreeSet::from([self.head]);
        for e in &self.entries {
            fv.remove(&e.binder);
            fv.extend(e.bite.free_vars());
        }
        fv
    }

    pub fn has_free(&self, x: VarId) -> bool {
        spine_has_free(self.head, &self.entries, x)
    }

    /// All binders (ES binders and λ binders) in traversal order, with
    /// repetitions.
    pub fn binders(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders(&self, out: &mut Vec<VarId>) {
        for e in &self.entries {
            out.push(e.binder);
            e.bite.collect_binders(out);
        }
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        out.push(self.head);
        for e in &self.entries {
            out.push(e.binder);
            e.bite.collect_vars(out);
        }
    }

    /// Every variable occurrence (binding or not), with repetitions.
    pub fn all_vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn max_var_id(&self) -> u32 {
        self.all_vars()
            .into_iter()
            .map(VarId::id)
            .max()
            .unwrap_or(0)
    }

    /// Pairwise distinct bound names.
    pub fn well_bound(&self) -> bool {
        let mut seen = HashSet::new();
        self.binders().into_iter().all(|b| seen.insert(b))
    }

    /// Well-bound and no bound name is also free, i.e. a valid fresh
    /// representative for a machine's initial state.
    pub fn well_bound_and_clean(&self) -> bool {
        let binders = self.binders();
        let mut seen = HashSet::with_capacity(binders.len());
        if !binders.into_iter().all(|b| seen.insert(b)) {
            return false;
        }
        self.free_vars().iter().all(|x| !seen.contains(x))
    }

    /// Capture-avoiding `self{x <- z}`. Colliding binders are renamed with
    /// names drawn from `supply`.
    pub fn subst_var(&self, x: VarId, z: VarId, supply: &mut NameSupply) -> PositiveTerm {
        let mut t = self.clone();
        t.subst_var_in_place(x, z, supply);
        t
    }

    pub fn subst_var_in_place(&mut self, x: VarId, z: VarId, supply: &mut NameSupply) {
        if x == z {
            return;
        }
        let n = self.entries.len();
        for i in (0..n).rev() {
            self.entries[i].bite.subst_var(x, z, supply);
            let b = self.entries[i].binder;
            if b == x {
                return;
            }
            if b == z && spine_has_free(self.head, &self.entries[..i], x) {
                let f = supply.fresh();
                rename_spine(&mut self.head, &mut self.entries[..i], z, f);
                self.entries[i].binder = f;
            }
        }
        if self.head == x {
            self.head = z;
        }
    }

    /// Renames free occurrences of `x` to `z`, honoring shadowing but not
    /// checking whether `z` gets captured. Machines only call this on
    /// well-bound states with `z` not bound in `self`.
    pub fn rename_unchecked(&mut self, x: VarId, z: VarId) {
        rename_spine(&mut self.head, &mut self.entries, x, z);
    }

    /// A well-bound α-equivalent copy whose bound names are all fresh.
    pub fn alpha_copy(&self, supply: &mut NameSupply) -> PositiveTerm {
        let mut scope = HashMap::new();
        let mut fresh = || supply.fresh();
        rebind_term(self, &mut scope, &mut fresh)
    }

    /// Bound names replaced by canonical names in traversal order.
    pub fn canonical(&self) -> PositiveTerm {
        let mut scope = HashMap::new();
        let mut counter = 0u32;
        let mut fresh = || {
            let c = super::canonical_binder(counter);
            counter += 1;
            c
        };
        rebind_term(self, &mut scope, &mut fresh)
    }

    pub fn alpha_eq(&self, other: &PositiveTerm) -> bool {
        self.entries.len() == other.entries.len() && self.canonical() == other.canonical()
    }

    /// `t = O⟨x⟩`
    pub fn head_split(&self) -> (OpenContext, VarId) {
        (
            OpenContext {
                entries: self.entries.clone(),
            },
            self.head,
        )
    }

    pub fn into_head_split(self) -> (OpenContext, VarId) {
        (
            OpenContext {
                entries: self.entries,
            },
            self.head,
        )
    }
}

fn spine_has_free(head: VarId, entries: &[Entry], x: VarId) -> bool {
    for e in entries.iter().rev() {
        if e.bite.has_free(x) {
            return true;
        }
        if e.binder == x {
            return false;
        }
    }
    head == x
}

fn rename_spine(head: &mut VarId, entries: &mut [Entry], x: VarId, z: VarId) {
    for e in entries.iter_mut().rev() {
        e.bite.rename_unchecked(x, z);
        if e.binder == x {
            return;
        }
    }
    if *head == x {
        *head = z;
    }
}

fn rebind_term(
    t: &PositiveTerm,
    scope: &mut HashMap<VarId, VarId>,
    fresh: &mut impl FnMut() -> VarId,
) -> PositiveTerm {
    let n = t.entries.len();
    let mut rev_entries = Vec::with_capacity(n);
    let mut saved = Vec::with_capacity(n);
    for e in t.entries.iter().rev() {
        let bite = rebind_bite(&e.bite, scope, fresh);
        let b = fresh();
        saved.push((e.binder, scope.insert(e.binder, b)));
        rev_entries.push(Entry::new(b, bite));
    }
    let head = scope.get(&t.head).copied().unwrap_or(t.head);
    for (x, prev) in saved.into_iter().rev() {
        restore(scope, x, prev);
    }
    rev_entries.reverse();
    PositiveTerm {
        head,
        entries: rev_entries,
    }
}

fn rebind_abs(
    a: &Abstraction,
    scope: &mut HashMap<VarId, VarId>,
    fresh: &mut impl FnMut() -> VarId,
) -> Abstraction {
    let p = fresh();
    let prev = scope.insert(a.param, p);
    let body = rebind_term(&a.body, scope, fresh);
    restore(scope, a.param, prev);
    Abstraction::new(p, body)
}

fn rebind_bite(
    b: &Bite,
    scope: &mut HashMap<VarId, VarId>,
    fresh: &mut impl FnMut() -> VarId,
) -> Bite {
    let look = |scope: &HashMap<VarId, VarId>, v: VarId| scope.get(&v).copied().unwrap_or(v);
    match b {
        Bite::VarApp(y, z) => Bite::VarApp(look(scope, *y), look(scope, *z)),
        Bite::Abs(a) => Bite::Abs(rebind_abs(a, scope, fresh)),
        Bite::RedexApp(a, z) => {
            let z = look(scope, *z);
            Bite::RedexApp(rebind_abs(a, scope, fresh), z)
        }
    }
}

impl OpenContext {
    pub fn empty() -> Self {
        OpenContext::default()
    }

    pub fn new(entries: Vec<Entry>) -> Self {
        OpenContext { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `O[x <- b]`: adds an outermost entry.
    pub fn extend_outer(mut self, x: VarId, b: Bite) -> Self {
        self.entries.push(Entry::new(x, b));
        self
    }

    pub fn dom(&self) -> BTreeSet<VarId> {
        self.entries.iter().map(|e| e.binder).collect()
    }

    /// `O(x)`. When several entries bind `x` the innermost one wins.
    pub fn lookup(&self, x: VarId) -> Option<&Bite> {
        lookup_in(&self.entries, x)
    }

    /// `O⟨t⟩`. Capture is intended: nothing is renamed.
    pub fn plug(&self, t: &PositiveTerm) -> PositiveTerm {
        let mut entries = Vec::with_capacity(t.entries.len() + self.entries.len());
        entries.extend_from_slice(&t.entries);
        entries.extend_from_slice(&self.entries);
        PositiveTerm {
            head: t.head,
            entries,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.bite.size()).sum()
    }
}

pub(crate) fn lookup_in(entries: &[Entry], x: VarId) -> Option<&Bite> {
    entries.iter().find(|e| e.binder == x).map(|e| &e.bite)
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\\{}.{}", self.param, self.body)
    }
}

impl fmt::Display for Bite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bite::VarApp(y, z) => write!(f, "{y} {z}"),
            Bite::Abs(a) => write!(f, "{a}"),
            Bite::RedexApp(a, z) => write!(f, "({a}) {z}"),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} <- {}]", self.binder, self.bite)
    }
}

impl fmt::Display for PositiveTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for e in &self.entries {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Display for OpenContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨·⟩")?;
        for e in &self.entries {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}
