use crate::mobility::MovementState;
use crate::routing::{HostId, IdSet, MessageBuffer, MessageId, RouterState};

#[derive(Debug, Clone)]
pub struct Host {
    pub idx: HostId,
    /// Group prefix plus index within the group, e.g. `s12`.
    pub name: String,
    pub group: usize,
    pub movement: MovementState,
    /// Indices into the world's interface list.
    pub interfaces: Vec<usize>,
    pub buffer: MessageBuffer,
    pub router: RouterState,
    /// Messages delivered to this host as their destination.
    pub delivered: IdSet,
    /// Messages currently arriving over some connection.
    pub incoming: IdSet,
    /// Messages currently being sent, one entry per active transfer.
    pub sending: Vec<MessageId>,
}

impl Host {
    pub fn new(
        idx: HostId,
        name: impl Into<String>,
        group: usize,
        movement: MovementState,
        interfaces: Vec<usize>,
        buffer_size: u64,
        router: RouterState,
    ) -> Self {
        Host {
            idx,
            name: name.into(),
            group,
            movement,
            interfaces,
            buffer: MessageBuffer::new(buffer_size),
            router,
            delivered: IdSet::new(),
            incoming: IdSet::new(),
            sending: Vec::new(),
        }
    }

    pub fn is_sending(&self, id: MessageId) -> bool {
        self.sending.contains(&id)
    }

    /// Whether this host already has, is getting, or was delivered `id`.
    pub fn knows(&self, id: MessageId) -> bool {
        self.buffer.contains(id) || self.incoming.contains(id) || self.delivered.contains(id)
    }

    pub(crate) fn finish_sending(&mut self, id: MessageId) {
        if let Some(pos) = self.sending.iter().position(|&m| m == id) {
            self.sending.swap_remove(pos);
        }
    }
}

/// Mutable references to two distinct hosts.
pub fn pair_mut(hosts: &mut [Host], a: HostId, b: HostId) -> (&mut Host, &mut Host) {
    let (i, j) = (a.index(), b.index());
    assert_ne!(i, j, "pair_mut needs distinct hosts");
    if i < j {
        let (lo, hi) = hosts.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = hosts.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}
