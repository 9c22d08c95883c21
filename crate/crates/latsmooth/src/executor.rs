//! Monte Carlo blocks on a fixed pool of scoped threads.

use std::sync::Mutex;

use latsmooth_core::estimate::{Executor, Tally};
use latsmooth_core::Result;

/// Worker `w` runs blocks `w, w + N, w + 2N, …`; results are stored by block
/// index, so merging order never depends on scheduling.
#[derive(Debug, Clone, Copy)]
pub struct ThreadedExecutor {
    workers: usize,
}

impl ThreadedExecutor {
    pub fn new(workers: usize) -> Self {
        Self { workers: workers.max(1) }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl Executor for ThreadedExecutor {
    fn run(&self, blocks: u64, work: &(dyn Fn(u64) -> Result<Tally> + Sync)) -> Vec<Result<Tally>> {
        if self.workers == 1 || blocks <= 1 {
            return (0..blocks).map(work).collect();
        }
        let slots: Vec<Mutex<Option<Result<Tally>>>> = (0..blocks).map(|_| Mutex::new(None)).collect();
        let stride = self.workers as u64;
        std::thread::scope(|scope| {
            for w in 0..stride.min(blocks) {
                let slots = &slots;
                scope.spawn(move || {
                    let mut i = w;
                    while i < blocks {
                        *slots[i as usize].lock().expect("slot lock") = Some(work(i));
                        i += stride;
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.into_inner().expect("slot lock").expect("every block ran")).collect()
    }
}
