//! Allocation instrumentation.
//!
//! The container reports every chunk allocation and release to an observer.
//! The default observer does nothing and compiles away; [`AllocStats`]
//! records counters that tests and the bench harness read back.

use std::cell::{Cell, RefCell};
use std::collections::VecDeque;
use std::rc::Rc;

/// Receives chunk allocation and release events from a container.
///
/// Observers follow the container's single-writer contract, so the methods
/// take `&self` and implementations may use interior mutability freely.
pub trait AllocObserver {
    fn on_alloc(&self, _chunk: usize) {}
    fn on_free(&self, _chunk: usize) {}
}

/// Observer that ignores every event. The default for uninstrumented use.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoopObserver;

impl AllocObserver for NoopObserver {}

impl<S: AllocObserver> AllocObserver for Rc<S> {
    fn on_alloc(&self, chunk: usize) {
        (**self).on_alloc(chunk);
    }
    fn on_free(&self, chunk: usize) {
        (**self).on_free(chunk);
    }
}

/// One recorded allocator event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocEvent {
    Alloc(usize),
    Free(usize),
}

/// Counters over the chunk traffic of one observed container.
///
/// `live_cells` tracks the sum of `2^c` over currently allocated chunks,
/// which for a well-behaved container equals its allocated cell count.
/// Freeing a chunk that is not currently allocated panics: it signals a
/// container bug, not a recoverable condition.
#[derive(Debug, Default)]
pub struct AllocStats {
    allocations: Cell<u64>,
    deallocations: Cell<u64>,
    live_cells: Cell<usize>,
    peak_cells: Cell<usize>,
    live_mask: Cell<u64>,
    log: RefCell<Option<EventLog>>,
}

#[derive(Debug)]
struct EventLog {
    cap: usize,
    events: VecDeque<AllocEvent>,
}

impl AllocStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record the allocation of chunk `chunk` (capacity `2^chunk` cells).
    pub fn on_alloc(&self, chunk: usize) {
        assert!(chunk < 64, "chunk index {chunk} out of range");
        let bit = 1u64 << chunk;
        assert!(
            self.live_mask.get() & bit == 0,
            "chunk {chunk} allocated twice"
        );
        self.live_mask.set(self.live_mask.get() | bit);
        self.allocations.set(self.allocations.get() + 1);
        let live = self.live_cells.get() + (1usize << chunk);
        self.live_cells.set(live);
        if live > self.peak_cells.get() {
            self.peak_cells.set(live);
        }
        self.record(AllocEvent::Alloc(chunk));
    }

    /// Record the release of chunk `chunk`.
    pub fn on_free(&self, chunk: usize) {
        assert!(chunk < 64, "chunk index {chunk} out of range");
        let bit = 1u64 << chunk;
        assert!(
            self.live_mask.get() & bit != 0,
            "chunk {chunk} freed while not allocated"
        );
        self.live_mask.set(self.live_mask.get() & !bit);
        self.deallocations.set(self.deallocations.get() + 1);
        self.live_cells.set(self.live_cells.get() - (1usize << chunk));
        self.record(AllocEvent::Free(chunk));
    }

    pub fn allocations(&self) -> u64 {
        self.allocations.get()
    }

    pub fn deallocations(&self) -> u64 {
        self.deallocations.get()
    }

    /// Currently allocated cells across live chunks.
    pub fn live_cells(&self) -> usize {
        self.live_cells.get()
    }

    /// High-water mark of `live_cells`.
    pub fn peak_cells(&self) -> usize {
        self.peak_cells.get()
    }

    /// Number of chunks currently allocated.
    pub fn live_chunks(&self) -> u32 {
        self.live_mask.get().count_ones()
    }

    /// Fraction of allocated cells not holding a live element.
    ///
    /// Requires at least one allocated cell and `size <= live_cells`.
    pub fn waste_fraction(&self, size: usize) -> f64 {
        let live = self.live_cells.get();
        assert!(live >= 1, "waste fraction of an unallocated container");
        assert!(size <= live, "size {size} exceeds live cells {live}");
        (live - size) as f64 / live as f64
    }

    /// Retain the most recent `cap` events. Off unless enabled; counters are
    /// always maintained.
    pub fn enable_event_log(&self, cap: usize) {
        *self.log.borrow_mut() = Some(EventLog {
            cap,
            events: VecDeque::new(),
        });
    }

    /// Snapshot of the retained events, oldest first.
    pub fn events(&self) -> Vec<AllocEvent> {
        self.log
            .borrow()
            .as_ref()
            .map(|log| log.events.iter().copied().collect())
            .unwrap_or_default()
    }

    fn record(&self, event: AllocEvent) {
        if let Some(log) = self.log.borrow_mut().as_mut() {
            if log.events.len() == log.cap {
                log.events.pop_front();
            }
            if log.cap > 0 {
                log.events.push_back(event);
            }
        }
    }
}

impl AllocObserver for AllocStats {
    fn on_alloc(&self, chunk: usize) {
        AllocStats::on_alloc(self, chunk);
    }
    fn on_free(&self, chunk: usize) {
        AllocStats::on_free(self, chunk);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_alloc_counts_one_cell() {
        let stats = AllocStats::new();
        stats.on_alloc(0);
        assert_eq!(stats.live_cells(), 1);
        assert_eq!(stats.allocations(), 1);
    }

    #[test]
    fn four_chunks_sum_to_fifteen_cells() {
        let stats = AllocStats::new();
        for c in 0..4 {
            stats.on_alloc(c);
        }
        assert_eq!(stats.live_cells(), 15);
        assert_eq!(stats.peak_cells(), 15);
    }

    #[test]
    fn free_reduces_live_cells() {
        let stats = AllocStats::new();
        for c in 0..4 {
            stats.on_alloc(c);
        }
        stats.on_free(3);
        assert_eq!(stats.live_cells(), 7);
        assert_eq!(stats.deallocations(), 1);
        assert_eq!(stats.peak_cells(), 15);
        assert_eq!(stats.live_chunks(), 3);
    }

    #[test]
    #[should_panic(expected = "freed while not allocated")]
    fn freeing_unallocated_chunk_panics() {
        let stats = AllocStats::new();
        stats.on_alloc(0);
        stats.on_free(2);
    }

    #[test]
    #[should_panic(expected = "allocated twice")]
    fn double_alloc_panics() {
        let stats = AllocStats::new();
        stats.on_alloc(1);
        stats.on_alloc(1);
    }

    #[test]
    fn waste_fraction_zero_when_full() {
        let stats = AllocStats::new();
        stats.on_alloc(0);
        stats.on_alloc(1);
        assert_eq!(stats.waste_fraction(3), 0.0);
    }

    #[test]
    fn waste_fraction_worst_case() {
        let stats = AllocStats::new();
        for c in 0..4 {
            stats.on_alloc(c);
        }
        let f = stats.waste_fraction(4);
        assert!((f - 11.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn waste_fraction_after_release() {
        let stats = AllocStats::new();
        for c in 0..3 {
            stats.on_alloc(c);
        }
        let f = stats.waste_fraction(3);
        assert!((f - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "exceeds live cells")]
    fn waste_fraction_rejects_oversized_count() {
        let stats = AllocStats::new();
        stats.on_alloc(0);
        stats.waste_fraction(2);
    }

    #[test]
    fn event_log_keeps_most_recent() {
        let stats = AllocStats::new();
        stats.enable_event_log(2);
        stats.on_alloc(0);
        stats.on_alloc(1);
        stats.on_free(1);
        assert_eq!(
            stats.events(),
            vec![AllocEvent::Alloc(1), AllocEvent::Free(1)]
        );
    }

    #[test]
    fn event_log_off_by_default() {
        let stats = AllocStats::new();
        stats.on_alloc(0);
        assert!(stats.events().is_empty());
    }
}
