use std::fmt;

use fixedbitset::FixedBitSet;

/// Index of a host in the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HostId(pub u32);

impl HostId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Sequence number of a created message; rendered as `M<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MessageId(pub u32);

impl MessageId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// One copy of an emergency message. Copies share everything but `path`.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub id: MessageId,
    pub source: HostId,
    pub destination: HostId,
    pub size: u64,
    pub created_at: f64,
    /// Hosts this copy has visited, source first.
    pub path: Vec<HostId>,
}

impl Message {
    pub fn new(id: MessageId, source: HostId, destination: HostId, size: u64, created_at: f64) -> Self {
        Message {
            id,
            source,
            destination,
            size,
            created_at,
            path: vec![source],
        }
    }

    pub fn hop_count(&self) -> u32 {
        (self.path.len() - 1) as u32
    }

    /// The copy as it arrives at `next`.
    pub fn forwarded_to(&self, next: HostId) -> Message {
        let mut m = self.clone();
        m.path.push(next);
        m
    }

    pub fn has_visited(&self, host: HostId) -> bool {
        self.path.contains(&host)
    }
}

/// Growable set of message ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdSet {
    bits: FixedBitSet,
    len: usize,
}

impl IdSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.bits.contains(id.index())
    }

    /// Returns true if the id was not already present.
    pub fn insert(&mut self, id: MessageId) -> bool {
        if id.index() >= self.bits.len() {
            self.bits.grow((id.index() + 1).next_power_of_two().max(64));
        }
        let fresh = !self.bits.put(id.index());
        if fresh {
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, id: MessageId) -> bool {
        if self.contains(id) {
            self.bits.set(id.index(), false);
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn union_with(&mut self, other: &IdSet) {
        if other.bits.len() > self.bits.len() {
            self.bits.grow(other.bits.len());
        }
        self.bits.union_with(&other.bits);
        self.len = self.bits.count_ones(..);
    }

    pub fn iter(&self) -> impl Iterator<Item = MessageId> + '_ {
        self.bits.ones().map(|i| MessageId(i as u32))
    }
}
