//! Live-heap accounting and a sampling peak-memory watcher.
//!
//! [`CountingAllocator`] only counts when a binary installs it as its
//! `#[global_allocator]`; otherwise [`is_active`] stays false and reported
//! peaks are zero.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static ACTIVE: AtomicBool = AtomicBool::new(false);

/// A [`System`] wrapper maintaining the number of live heap bytes.
pub struct CountingAllocator;

unsafe impl GlobalAlloc for CountingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            LIVE.fetch_add(layout.size(), Ordering::Relaxed);
            ACTIVE.store(true, Ordering::Relaxed);
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc_zeroed(layout) };
        if !p.is_null() {
            LIVE.fetch_add(layout.size(), Ordering::Relaxed);
            ACTIVE.store(true, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        LIVE.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size >= layout.size() {
                LIVE.fetch_add(new_size - layout.size(), Ordering::Relaxed);
            } else {
                LIVE.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

/// Bytes currently allocated through [`CountingAllocator`].
pub fn live_bytes() -> usize {
    LIVE.load(Ordering::Relaxed)
}

pub fn is_active() -> bool {
    ACTIVE.load(Ordering::Relaxed)
}

pub const DEFAULT_INTERVAL: Duration = Duration::from_millis(50);

/// Background sampler recording the maximum of [`live_bytes`].
pub struct MemoryWatcher {
    peak: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MemoryWatcher {
    pub fn start(interval: Duration) -> Self {
        let peak = Arc::new(AtomicUsize::new(live_bytes()));
        let stop = Arc::new(AtomicBool::new(false));
        let handle = {
            let (peak, stop) = (peak.clone(), stop.clone());
            thread::spawn(move || {
                while !stop.load(Ordering::Relaxed) {
                    peak.fetch_max(live_bytes(), Ordering::Relaxed);
                    thread::park_timeout(interval);
                }
            })
        };
        MemoryWatcher {
            peak,
            stop,
            handle: Some(handle),
        }
    }

    /// Takes one sample immediately.
    pub fn sample(&self) -> usize {
        let now = live_bytes();
        self.peak.fetch_max(now, Ordering::Relaxed);
        now
    }

    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }

    /// Stops sampling after a final sample and returns the peak.
    pub fn finish(mut self) -> usize {
        self.sample();
        self.shutdown();
        self.peak()
    }

    fn shutdown(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            h.thread().unpark();
            let _ = h.join();
        }
    }
}

impl Drop for MemoryWatcher {
    fn drop(&mut self) {
        self.shutdown();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_dominates_every_sample() {
        let w = MemoryWatcher::start(Duration::from_millis(1));
        let mut seen = 0;
        for _ in 0..20 {
            seen = seen.max(w.sample());
            thread::sleep(Duration::from_millis(2));
        }
        assert!(w.finish() >= seen);
    }
}
