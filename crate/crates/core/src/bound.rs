use std::cell::Cell;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Default number of search nodes an exhaustive enumeration may visit.
pub const DEFAULT_BOUND: u64 = 1_000_000;

/// Name of the environment variable overriding [`DEFAULT_BOUND`].
pub const BOUND_ENV: &str = "DESCENTE_BOUND";

/// The global enumeration bound, read once from `DESCENTE_BOUND`.
pub fn default_bound() -> u64 {
    static BOUND: OnceLock<u64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var(BOUND_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BOUND)
    })
}

/// Counts search nodes for a single enumeration and fails once the limit is hit.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: Cell<u64>,
    what: &'static str,
}

impl Budget {
    pub fn new(limit: u64, what: &'static str) -> Self {
        Self {
            limit,
            used: Cell::new(0),
            what,
        }
    }

    pub fn tick(&self) -> Result<()> {
        let n = self.used.get() + 1;
        self.used.set(n);
        if n > self.limit {
            Err(Error::bound(self.what, self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    /// Nodes left before the limit, for nested enumerations.
    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used.get()).max(1)
    }
}
