use std::time::Duration;

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct KindStats {
    pub nodes: usize,
    pub seconds: f64,
}

impl KindStats {
    pub(crate) fn record(&mut self, d: Duration) {
        self.nodes += 1;
        self.seconds += d.as_secs_f64();
    }
}

/// Per-run counters of a dynamic program over an expression.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub width: u32,
    pub vertices: u32,
    pub singleton: KindStats,
    pub join: KindStats,
    pub relabel: KindStats,
    pub union: KindStats,
    /// Largest number of stored table entries at any node.
    pub peak_table_entries: usize,
}
