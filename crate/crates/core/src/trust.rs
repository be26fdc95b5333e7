//! Record of every assumption the kernel relies on without proof.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrustEntry {
    AssumedConfluent,
    AssumedTerminating,
    /// A user-supplied set of unifiers accepted as complete.
    AssumedCompleteCsu { lhs: String, rhs: String, unifiers: usize },
    /// Coherence of a recursive definition whose left side is not a constructor pattern.
    NonConstructorCoherence { pred: String, rule: String },
    AdmittedRecursive { preds: Vec<String> },
    /// Atom rule added without the recursive-definition checks.
    UncheckedAtomRule { rule: String },
}

impl fmt::Display for TrustEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustEntry::AssumedConfluent => f.write_str("assumed-confluent"),
            TrustEntry::AssumedTerminating => f.write_str("assumed-terminating"),
            TrustEntry::AssumedCompleteCsu { lhs, rhs, unifiers } => {
                write!(f, "assumed-complete-csu {lhs} = {rhs} unifiers={unifiers}")
            }
            TrustEntry::NonConstructorCoherence { pred, rule } => {
                write!(f, "assumed-coherent {pred} rule: {rule}")
            }
            TrustEntry::AdmittedRecursive { preds } => {
                write!(f, "admitted-recursive-definition {}", preds.join(" "))
            }
            TrustEntry::UncheckedAtomRule { rule } => write!(f, "unchecked-atom-rule {rule}"),
        }
    }
}

/// Ordered, duplicate-free list of trust entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrustLog {
    entries: Vec<TrustEntry>,
}

impl TrustLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, e: TrustEntry) {
        if !self.entries.contains(&e) {
            self.entries.push(e);
        }
    }

    pub fn extend(&mut self, other: &TrustLog) {
        for e in &other.entries {
            self.record(e.clone());
        }
    }

    pub fn entries(&self) -> &[TrustEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, pred: impl Fn(&TrustEntry) -> bool) -> bool {
        self.entries.iter().any(pred)
    }
}

impl fmt::Display for TrustLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TRUST BEGIN")?;
        for e in &self.entries {
            writeln!(f, "  {e}")?;
        }
        write!(f, "TRUST END")
    }
}
