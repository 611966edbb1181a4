use thiserror::Error;

use super::maxprop;
use super::message::{IdSet, Message, MessageId};

#[derive(Debug, Clone, PartialEq)]
pub struct StoredCopy {
    pub message: Message,
    pub received_at: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MakeRoomError {
    #[error("message of {size} bytes exceeds buffer capacity {capacity}")]
    TooLarge { size: u64, capacity: u64 },
    #[error("cannot free {needed} bytes: remaining copies are in use")]
    NoEvictable { needed: u64 },
    #[error("every evictable copy outranks the incoming one")]
    Outranked,
}

/// Which copies leave first when space is needed.
#[derive(Debug, Clone, Copy)]
pub enum DropPolicy<'a> {
    OldestReceived,
    /// Reverse of the MaxProp transmission order.
    MaxProp { threshold: u32, costs: &'a [f64] },
}

/// Resident copies in receive order, plus bytes reserved for transfers
/// still arriving.
#[derive(Debug, Clone, Default)]
pub struct MessageBuffer {
    capacity: u64,
    used: u64,
    reserved: u64,
    copies: Vec<StoredCopy>,
    ids: IdSet,
}

impl MessageBuffer {
    pub fn new(capacity: u64) -> Self {
        MessageBuffer {
            capacity,
            ..Default::default()
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Bytes held by resident copies.
    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn reserved(&self) -> u64 {
        self.reserved
    }

    pub fn free(&self) -> u64 {
        self.capacity.saturating_sub(self.used + self.reserved)
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.ids.contains(id)
    }

    pub fn get(&self, id: MessageId) -> Option<&StoredCopy> {
        if !self.contains(id) {
            return None;
        }
        self.copies.iter().find(|c| c.message.id == id)
    }

    /// Copies in receive order.
    pub fn iter(&self) -> impl Iterator<Item = &StoredCopy> {
        self.copies.iter()
    }

    pub fn ids(&self) -> &IdSet {
        &self.ids
    }

    /// Stores a copy. Returns false, leaving the buffer untouched, for a
    /// duplicate id or a copy that does not fit in the unreserved space.
    pub fn insert(&mut self, copy: StoredCopy) -> bool {
        if self.contains(copy.message.id) || copy.message.size > self.free() {
            return false;
        }
        self.used += copy.message.size;
        self.ids.insert(copy.message.id);
        self.copies.push(copy);
        true
    }

    pub fn remove(&mut self, id: MessageId) -> Option<StoredCopy> {
        if !self.ids.remove(id) {
            return None;
        }
        let pos = self.copies.iter().position(|c| c.message.id == id)?;
        let copy = self.copies.remove(pos);
        self.used -= copy.message.size;
        Some(copy)
    }

    pub fn reserve(&mut self, bytes: u64) {
        debug_assert!(bytes <= self.free());
        self.reserved += bytes;
    }

    pub fn release(&mut self, bytes: u64) {
        debug_assert!(bytes <= self.reserved);
        self.reserved -= bytes;
    }

    /// Ids in the order they would be evicted.
    pub fn eviction_order(&self, policy: DropPolicy<'_>) -> Vec<MessageId> {
        match policy {
            DropPolicy::OldestReceived => self.copies.iter().map(|c| c.message.id).collect(),
            DropPolicy::MaxProp { threshold, costs } => {
                let mut order = maxprop::queue_order(self.copies.iter().map(|c| &c.message), threshold, costs);
                order.reverse();
                order
            }
        }
    }

    /// Evicts copies until `incoming` bytes fit, skipping ids for which
    /// `protected` holds. Nothing is evicted when the request cannot be met.
    pub fn make_room<P>(
        &mut self,
        incoming: u64,
        policy: DropPolicy<'_>,
        protected: P,
    ) -> Result<Vec<StoredCopy>, MakeRoomError>
    where
        P: Fn(MessageId) -> bool,
    {
        self.evict(incoming, policy, protected)
    }

    /// Like `make_room` for a relayed copy. Under the MaxProp policy only
    /// copies ranked below `incoming` may go; a copy that would itself be
    /// the first eviction is refused.
    pub fn make_room_for<P>(
        &mut self,
        incoming: &Message,
        policy: DropPolicy<'_>,
        protected: P,
    ) -> Result<Vec<StoredCopy>, MakeRoomError>
    where
        P: Fn(MessageId) -> bool,
    {
        match policy {
            DropPolicy::OldestReceived => self.evict(incoming.size, policy, protected),
            DropPolicy::MaxProp { threshold, costs } => {
                if incoming.size > self.capacity || incoming.size <= self.free() {
                    return self.evict(incoming.size, policy, protected);
                }
                let floor = maxprop::transmission_key(incoming, threshold, costs);
                let outranked: Vec<MessageId> = self
                    .copies
                    .iter()
                    .filter(|c| {
                        maxprop::key_cmp(&maxprop::transmission_key(&c.message, threshold, costs), &floor).is_lt()
                    })
                    .map(|c| c.message.id)
                    .collect();
                match self.evict(incoming.size, policy, |id| protected(id) || outranked.contains(&id)) {
                    Err(MakeRoomError::NoEvictable { .. }) => Err(MakeRoomError::Outranked),
                    other => other,
                }
            }
        }
    }

    fn evict<P>(&mut self, incoming: u64, policy: DropPolicy<'_>, protected: P) -> Result<Vec<StoredCopy>, MakeRoomError>
    where
        P: Fn(MessageId) -> bool,
    {
        if incoming > self.capacity {
            return Err(MakeRoomError::TooLarge {
                size: incoming,
                capacity: self.capacity,
            });
        }
        if incoming <= self.free() {
            return Ok(Vec::new());
        }
        let needed = incoming - self.free();
        let mut victims = Vec::new();
        let mut freed = 0;
        let oldest_first = matches!(policy, DropPolicy::OldestReceived);
        if oldest_first {
            for c in &self.copies {
                if freed >= needed {
                    break;
                }
                if !protected(c.message.id) {
                    freed += c.message.size;
                    victims.push(c.message.id);
                }
            }
        } else {
            for id in self.eviction_order(policy) {
                if freed >= needed {
                    break;
                }
                if !protected(id) {
                    freed += self.get(id).map_or(0, |c| c.message.size);
                    victims.push(id);
                }
            }
        }
        if freed < needed {
            return Err(MakeRoomError::NoEvictable { needed });
        }
        Ok(victims.into_iter().filter_map(|id| self.remove(id)).collect())
    }
}
