use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::{NodeId, SimTime};

/// Insertion sequence number of a scheduled event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u64);

#[derive(Debug, Clone, PartialEq)]
pub struct Event<P> {
    pub id: EventId,
    pub fire_at: SimTime,
    /// `None` for world-level events such as the mobility tick.
    pub target: Option<NodeId>,
    pub payload: P,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("event at {fire_at} is in the past (clock is {clock})")]
    InPast { fire_at: SimTime, clock: SimTime },
}

struct Pending<P>(Event<P>);

impl<P> Pending<P> {
    fn key(&self) -> (SimTime, EventId) {
        (self.0.fire_at, self.0.id)
    }
}

impl<P> PartialEq for Pending<P> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<P> Eq for Pending<P> {}

impl<P> PartialOrd for Pending<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Pending<P> {
    // BinaryHeap is a max-heap; invert so the earliest (time, insertion) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key().cmp(&self.key())
    }
}

/// Priority queue of events keyed by `(fire_at, insertion order)` plus the
/// simulated clock.
pub struct Engine<P> {
    clock: SimTime,
    next_id: u64,
    queue: BinaryHeap<Pending<P>>,
    processed: u64,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Engine {
            clock: SimTime::ZERO,
            next_id: 0,
            queue: BinaryHeap::new(),
            processed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn schedule(
        &mut self,
        fire_at: SimTime,
        target: Option<NodeId>,
        payload: P,
    ) -> Result<EventId, ScheduleError> {
        if fire_at < self.clock {
            return Err(ScheduleError::InPast {
                fire_at,
                clock: self.clock,
            });
        }
        let id = EventId(self.next_id);
        self.next_id += 1;
        self.queue.push(Pending(Event {
            id,
            fire_at,
            target,
            payload,
        }));
        Ok(id)
    }

    /// Schedules `delay` after the current clock. Never fails.
    pub fn schedule_in(&mut self, delay: SimTime, target: Option<NodeId>, payload: P) -> EventId {
        let at = self.clock.saturating_add(delay);
        self.schedule(at, target, payload)
            .expect("relative schedule cannot be in the past")
    }

    /// Pops the next event if it fires at or before `t_end`, advancing the clock.
    pub fn pop_due(&mut self, t_end: SimTime) -> Option<Event<P>> {
        if self.queue.peek()?.0.fire_at > t_end {
            return None;
        }
        let Pending(ev) = self.queue.pop()?;
        debug_assert!(ev.fire_at >= self.clock);
        self.clock = ev.fire_at;
        self.processed += 1;
        Some(ev)
    }

    /// Processes every event with `fire_at <= t_end` in order and returns how
    /// many ran. Afterwards the clock sits at `t_end` if later events remain,
    /// otherwise at the last processed event.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> usize
    where
        F: FnMut(&mut Engine<P>, Event<P>),
    {
        let mut count = 0;
        while let Some(ev) = self.pop_due(t_end) {
            handler(self, ev);
            count += 1;
        }
        if !self.queue.is_empty() && self.clock < t_end {
            self.clock = t_end;
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_future_and_fires_at_time() {
        let mut e = Engine::new();
        e.schedule(SimTime(3), None, "a").unwrap();
        e.run_until(SimTime(3), |_, _| {});
        assert_eq!(e.now(), SimTime(3));
        e.schedule(SimTime(5), None, "b").unwrap();
        let mut fired = vec![];
        e.run_until(SimTime(10), |eng, ev| fired.push((eng.now(), ev.payload)));
        assert_eq!(fired, vec![(SimTime(5), "b")]);
    }

    #[test]
    fn ties_fire_in_insertion_order() {
        let mut e = Engine::new();
        for p in ["first", "second", "third"] {
            e.schedule(SimTime(5), None, p).unwrap();
        }
        let mut order = vec![];
        e.run_until(SimTime(5), |_, ev| order.push(ev.payload));
        assert_eq!(order, ["first", "second", "third"]);
    }

    #[test]
    fn rejects_past_events() {
        let mut e = Engine::new();
        e.schedule(SimTime(3), None, ()).unwrap();
        e.run_until(SimTime(3), |_, _| {});
        assert_eq!(
            e.schedule(SimTime(2), None, ()),
            Err(ScheduleError::InPast {
                fire_at: SimTime(2),
                clock: SimTime(3)
            })
        );
    }

    #[test]
    fn empty_queue_processes_nothing() {
        let mut e: Engine<()> = Engine::new();
        assert_eq!(e.run_until(SimTime(100), |_, _| {}), 0);
    }

    #[test]
    fn end_bound_is_inclusive() {
        let mut e = Engine::new();
        for t in 1..=3 {
            e.schedule(SimTime(t), None, t).unwrap();
        }
        assert_eq!(e.run_until(SimTime(2), |_, _| {}), 2);
        assert_eq!(e.now(), SimTime(2));
        assert_eq!(e.pending(), 1);
    }

    #[test]
    fn handler_can_schedule_follow_ups() {
        let mut e = Engine::new();
        e.schedule(SimTime(1), None, 0u32).unwrap();
        let n = e.run_until(SimTime(10), |eng, ev| {
            if ev.payload < 4 {
                eng.schedule_in(SimTime(2), None, ev.payload + 1);
            }
        });
        assert_eq!(n, 5);
        assert_eq!(e.now(), SimTime(9));
    }
}
