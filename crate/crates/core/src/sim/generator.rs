use rand::Rng;

use crate::rng::SimRng;
use crate::routing::{HostId, Message, MessageId};
use crate::settings::MessageGeneratorSpec;

/// Message-creation schedule with uniformly drawn inter-arrival times.
#[derive(Debug, Clone)]
pub struct MessageGenerator {
    interval: (f64, f64),
    size: u64,
    sources: Vec<HostId>,
    destinations: Vec<HostId>,
    next_time: f64,
    next_id: u32,
    rng: SimRng,
}

impl MessageGenerator {
    pub fn new(spec: &MessageGeneratorSpec, sources: Vec<HostId>, destinations: Vec<HostId>, rng: SimRng) -> Self {
        let mut g = MessageGenerator {
            interval: (spec.interval_min, spec.interval_max),
            size: spec.size,
            sources,
            destinations,
            next_time: 0.0,
            next_id: 1,
            rng,
        };
        g.next_time = if g.sources.is_empty() || g.destinations.is_empty() {
            f64::INFINITY
        } else {
            g.draw_interval()
        };
        g
    }

    fn draw_interval(&mut self) -> f64 {
        let (lo, hi) = self.interval;
        if hi > lo {
            self.rng.random_range(lo..=hi)
        } else {
            lo
        }
    }

    /// Time of the next creation.
    pub fn next_due(&self) -> f64 {
        self.next_time
    }

    pub fn sources(&self) -> &[HostId] {
        &self.sources
    }

    pub fn destinations(&self) -> &[HostId] {
        &self.destinations
    }

    /// Creates the message due at `next_due()` and schedules the next one.
    pub fn create(&mut self) -> Message {
        let t = self.next_time;
        let m = create_message(self.next_id, &self.sources, &self.destinations, self.size, &mut self.rng, t);
        self.next_id += 1;
        self.next_time = t + self.draw_interval();
        m
    }
}

/// Message `M<id>` from a uniform source to a uniform destination.
pub fn create_message(
    id: u32,
    sources: &[HostId],
    destinations: &[HostId],
    size: u64,
    rng: &mut SimRng,
    t: f64,
) -> Message {
    let source = sources[rng.random_range(0..sources.len())];
    let destination = destinations[rng.random_range(0..destinations.len())];
    Message::new(MessageId(id), source, destination, size, t)
}
