//! Global resource caps for the certified search and quadrature loops.
//!
//! Every potentially unbounded loop in the crate checks one of these caps and
//! fails with a typed error instead of running away. Values are fixed at
//! first use so a whole run sees one consistent configuration.

use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct Limits {
    /// Cap on quadrature cells per integral evaluation.
    /// Overridable with the `EFFDIST_CELL_BUDGET` environment variable.
    pub max_cells: u64,
    /// Cap on the window index searched by effective-tightness loops.
    pub tightness_cap: u32,
    /// Cap on dyadic evaluation grids (Lévy transfer and CLI tables).
    pub grid_cap: u64,
    /// Cap on internal working precision, in bits.
    pub precision_cap: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cells: 1 << 26,
            tightness_cap: 4096,
            grid_cap: 1 << 22,
            precision_cap: 8192,
        }
    }
}

pub fn limits() -> &'static Limits {
    static LIMITS: OnceLock<Limits> = OnceLock::new();
    LIMITS.get_or_init(|| {
        let mut l = Limits::default();
        if let Ok(v) = std::env::var("EFFDIST_CELL_BUDGET") {
            if let Ok(n) = v.trim().parse::<u64>() {
                if n > 0 {
                    l.max_cells = n;
                }
            }
        }
        l
    })
}
