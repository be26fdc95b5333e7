//! Identifiers and fresh-name generation.

use std::sync::Arc;

/// Shared, immutable identifier.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Picks a variant of `base` for which `taken` is false.
///
/// Trailing digits of `base` are dropped before numbering, so repeated
/// freshening of `x` yields `x1`, `x2`, ... rather than `x11`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    if !taken(base) {
        return name(base);
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1u64..)
        .map(|k| format!("{stem}{k}"))
        .find(|cand| !taken(cand))
        .map(|s| name(&s))
        .expect("unbounded counter")
}

/// Step budget shared by the normalizing procedures.
#[derive(Debug, Clone)]
pub struct Fuel {
    limit: u64,
    used: u64,
    during: &'static str,
}

impl Fuel {
    pub fn new(limit: u64, during: &'static str) -> Self {
        Fuel {
            limit,
            used: 0,
            during,
        }
    }

    pub fn tick(&mut self) -> crate::Result<()> {
        if self.used >= self.limit {
            return Err(crate::Error::FuelExhausted {
                steps: self.used,
                during: self.during,
            });
        }
        self.used += 1;
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}
