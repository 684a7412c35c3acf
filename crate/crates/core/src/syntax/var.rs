use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

/// A concrete variable name.
///
/// Identity is the numeric id alone; the optional hint is the source name a
/// free variable was written with and only affects printing. Variables
/// without a hint print as `v<id>`.
#[derive(Clone, Copy)]
pub struct VarId {
    id: u32,
    hint: Option<&'static str>,
}

impl VarId {
    pub fn id(self) -> u32 {
        self.id
    }

    pub fn hint(self) -> Option<&'static str> {
        self.hint
    }

    /// Builds a variable with an explicit id. Mostly useful in tests; real
    /// code should draw from a [`NameSupply`].
    pub fn from_raw(id: u32) -> Self {
        VarId { id, hint: None }
    }

    pub fn named(id: u32, hint: &str) -> Self {
        VarId {
            id,
            hint: Some(intern(hint)),
        }
    }
}

impl PartialEq for VarId {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for VarId {}

impl Hash for VarId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VarId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hint {
            Some(h) => f.write_str(h),
            None => write!(f, "v{}", self.id),
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hint {
            Some(h) => write!(f, "{h}#{}", self.id),
            None => write!(f, "v{}", self.id),
        }
    }
}

fn intern(name: &str) -> &'static str {
    static TABLE: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    let mut table = TABLE
        .get_or_init(|| Mutex::new(HashSet::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    if let Some(&s) = table.get(name) {
        return s;
    }
    let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
    table.insert(leaked);
    leaked
}

/// Deterministic generator of fresh variables.
///
/// Ids are handed out in increasing order and never reused. A supply is
/// owned by one driver; independent runs each build their own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameSupply {
    next_id: u32,
}

impl Default for NameSupply {
    fn default() -> Self {
        NameSupply::new()
    }
}

impl NameSupply {
    /// Ids start at 1 so that generated names read `v1, v2, ...`.
    pub fn new() -> Self {
        NameSupply { next_id: 1 }
    }

    pub fn starting_at(next_id: u32) -> Self {
        NameSupply { next_id }
    }

    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    pub fn fresh(&mut self) -> VarId {
        let id = self.next_id;
        self.next_id = self.next_id.checked_add(1).expect("name supply exhausted");
        VarId { id, hint: None }
    }

    pub fn fresh_named(&mut self, hint: &str) -> VarId {
        let v = self.fresh();
        VarId::named(v.id, hint)
    }

    /// Makes sure every later fresh id is strictly greater than `id`.
    pub fn avoid(&mut self, id: u32) {
        if self.next_id <= id {
            self.next_id = id + 1;
        }
    }
}
