//! Thread pool setup and the rayon-backed point map.

use rayon::prelude::*;
use ypl_core::algebra::{PointMap, PointOutcome};
use ypl_core::PhasePoint;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "YPL_THREADS";

/// Evaluates points on the global rayon pool; output keeps input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl PointMap for Rayon {
    fn map(&self, pts: &[PhasePoint], f: &(dyn Fn(&PhasePoint) -> PointOutcome + Sync)) -> Vec<PointOutcome> {
        pts.par_iter().map(f).collect()
    }
}

/// Reads [`THREADS_ENV`] and sizes the global pool. Returns the number of
/// workers in use. Invalid values are reported and ignored.
pub fn init_threads() -> Result<usize, String> {
    let requested = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => return Err(format!("{THREADS_ENV}: expected a positive integer, found '{v}'")),
        },
        Err(_) => None,
    };
    if let Some(n) = requested {
        // a pool built earlier in the process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}
