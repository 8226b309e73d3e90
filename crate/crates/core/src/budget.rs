//! Global work cap shared by every exhaustive search.

use crate::error::{Error, Result};
use std::sync::OnceLock;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

static GLOBAL: OnceLock<u128> = OnceLock::new();

/// Cap read once from `APPROXLAB_BUDGET`, falling back to 1e8.
pub fn global() -> u128 {
    *GLOBAL.get_or_init(|| {
        std::env::var("APPROXLAB_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .unwrap_or(DEFAULT_BUDGET)
    })
}

pub fn check(what: &str, estimate: u128) -> Result<()> {
    check_against(what, estimate, global())
}

pub fn check_against(what: &str, estimate: u128, cap: u128) -> Result<()> {
    if estimate > cap {
        Err(Error::Budget { what: what.to_string(), estimate, cap })
    } else {
        Ok(())
    }
}
