//! Pending quality observations ordered by the simulated time they become
//! visible to the RSU.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::CellIndex;
use crate::ids::{CandidateId, TaskId};

/// Anything that becomes observable at a simulated time.
pub trait Ready {
    fn ready_time(&self) -> f64;
}

/// Realized quality of one selected replication.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackEvent {
    pub task_id: TaskId,
    pub candidate: CandidateId,
    pub cell: CellIndex,
    pub quality: u8,
    pub ready_time: f64,
}

impl Ready for FeedbackEvent {
    fn ready_time(&self) -> f64 {
        self.ready_time
    }
}

struct Entry<E> {
    ready: f64,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    // reversed: BinaryHeap is a max-heap and we pop the earliest first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .ready
            .total_cmp(&self.ready)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Min-heap on ready time; events with equal ready times leave in
/// insertion order.
pub struct FeedbackQueue<E> {
    heap: BinaryHeap<Entry<E>>,
    next_seq: u64,
}

impl<E: Ready> FeedbackQueue<E> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    pub fn push(&mut self, event: E) {
        let ready = event.ready_time();
        self.heap.push(Entry {
            ready,
            seq: self.next_seq,
            event,
        });
        self.next_seq += 1;
    }

    /// Removes and returns the earliest event if it is visible at `now`.
    pub fn pop_ready(&mut self, now: f64) -> Option<E> {
        if self.heap.peek()?.ready <= now {
            self.heap.pop().map(|e| e.event)
        } else {
            None
        }
    }

    /// All events visible at `now`, earliest first.
    pub fn drain_ready(&mut self, now: f64) -> Vec<E> {
        std::iter::from_fn(|| self.pop_ready(now)).collect()
    }

    /// Every pending event regardless of time, earliest first.
    pub fn drain_all(&mut self) -> Vec<E> {
        self.drain_ready(f64::INFINITY)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn next_ready_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.ready)
    }
}

impl<E: Ready> Default for FeedbackQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct At(f64, u32);

    impl Ready for At {
        fn ready_time(&self) -> f64 {
            self.0
        }
    }

    #[test]
    fn drains_in_time_order() {
        let mut q = FeedbackQueue::new();
        assert!(q.drain_ready(10.0).is_empty());
        q.push(At(9.0, 0));
        q.push(At(5.0, 1));
        q.push(At(5.0, 2));
        let ready: Vec<u32> = q.drain_ready(6.0).into_iter().map(|e| e.1).collect();
        assert_eq!(ready, vec![1, 2]);
        assert_eq!(q.len(), 1);
        assert_eq!(q.next_ready_time(), Some(9.0));
        assert_eq!(q.drain_all().len(), 1);
        assert!(q.is_empty());
    }

    #[test]
    fn boundary_is_inclusive() {
        let mut q = FeedbackQueue::new();
        q.push(At(2.5, 0));
        assert!(q.pop_ready(2.4999).is_none());
        assert!(q.pop_ready(2.5).is_some());
    }
}
