//! Process-wide worker count for the parallel sweeps. Results never depend on it:
//! work is split into contiguous chunks and joined in order.

use std::sync::atomic::{AtomicUsize, Ordering};

static WORKERS: AtomicUsize = AtomicUsize::new(0);

/// Sets the worker count; `0` restores the default of one per available core.
pub fn set_workers(n: usize) {
    WORKERS.store(n, Ordering::Relaxed);
}

pub fn workers() -> usize {
    match WORKERS.load(Ordering::Relaxed) {
        0 => std::thread::available_parallelism().map_or(1, |x| x.get()),
        n => n,
    }
}
