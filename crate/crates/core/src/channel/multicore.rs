use std::collections::HashSet;

use crate::error::Result;
use crate::harness::{run_all, LinkConfig};
use crate::rxdsp::MetricsReport;

/// Independent end-to-end runs, one per core (no inter-core coupling).
/// Reports come back in core order.
pub fn multicore_batch(configs: &[LinkConfig]) -> Result<Vec<MetricsReport>> {
    let mut seen = HashSet::new();
    for c in configs {
        if !seen.insert(c.seed) {
            log::warn!(
                "seed {} is used by more than one core; the cores are not decorrelated",
                c.seed
            );
        }
    }
    run_all(configs).into_iter().collect()
}
