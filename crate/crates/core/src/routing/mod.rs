//! Store-carry-forward routing: buffers with drop policies, Epidemic
//! flooding, and MaxProp with meeting-probability costs and delivery acks.

mod buffer;
pub mod epidemic;
pub mod maxprop;
mod message;

use std::cmp::Ordering;
use std::sync::Arc;

pub use buffer::{DropPolicy, MakeRoomError, MessageBuffer, StoredCopy};
pub use maxprop::MeetingProbabilities;
pub use message::{HostId, IdSet, Message, MessageId};

use crate::settings::RouterKind;
use crate::sim::{EventKind, Host, SimEvent};

#[derive(Debug, Clone)]
pub struct MaxPropState {
    pub probs: MeetingProbabilities,
    /// Latest f vector received from each peer.
    pub known: Vec<Option<Arc<Vec<f64>>>>,
    pub acks: IdSet,
    /// Path cost to every host, refreshed on each new connection.
    pub costs: Vec<f64>,
    pub threshold: u32,
}

impl MaxPropState {
    pub fn new(owner: HostId, n: usize, threshold: u32) -> Self {
        let mut s = MaxPropState {
            probs: MeetingProbabilities::new(owner, n),
            known: vec![None; n],
            acks: IdSet::new(),
            costs: Vec::new(),
            threshold,
        };
        s.recompute_costs();
        s
    }

    pub fn recompute_costs(&mut self) {
        let owner = self.probs.owner().index();
        let own = self.probs.values();
        let known = &self.known;
        self.costs = maxprop::path_costs(known.len(), self.probs.owner(), |u| {
            if u == owner {
                Some(own)
            } else {
                known[u].as_deref().map(Vec::as_slice)
            }
        });
    }
}

#[derive(Debug, Clone)]
pub enum RouterState {
    Epidemic,
    MaxProp(Box<MaxPropState>),
}

impl RouterState {
    pub fn new(kind: RouterKind, owner: HostId, n: usize, hop_threshold: u32) -> Self {
        match kind {
            RouterKind::Epidemic => RouterState::Epidemic,
            RouterKind::MaxProp => RouterState::MaxProp(Box::new(MaxPropState::new(owner, n, hop_threshold))),
        }
    }

    pub fn kind(&self) -> RouterKind {
        match self {
            RouterState::Epidemic => RouterKind::Epidemic,
            RouterState::MaxProp(_) => RouterKind::MaxProp,
        }
    }

    pub fn maxprop(&self) -> Option<&MaxPropState> {
        match self {
            RouterState::MaxProp(s) => Some(s),
            RouterState::Epidemic => None,
        }
    }

    pub fn maxprop_mut(&mut self) -> Option<&mut MaxPropState> {
        match self {
            RouterState::MaxProp(s) => Some(s),
            RouterState::Epidemic => None,
        }
    }

    pub fn drop_policy(&self) -> DropPolicy<'_> {
        match self {
            RouterState::Epidemic => DropPolicy::OldestReceived,
            RouterState::MaxProp(s) => DropPolicy::MaxProp {
                threshold: s.threshold,
                costs: &s.costs,
            },
        }
    }

    pub fn has_ack(&self, id: MessageId) -> bool {
        self.maxprop().is_some_and(|s| s.acks.contains(id))
    }
}

/// Whether `sender` should offer this copy to `receiver`.
pub fn should_offer(sender: &Host, receiver: &Host, m: &Message) -> bool {
    if receiver.knows(m.id) {
        return false;
    }
    match (&sender.router, &receiver.router) {
        (RouterState::MaxProp(s), RouterState::MaxProp(r)) => {
            !m.has_visited(receiver.idx) && !s.acks.contains(m.id) && !r.acks.contains(m.id)
        }
        _ => true,
    }
}

/// Transmission preference; copies for the receiver itself come first.
fn offer_cmp(sender: &Host, receiver: HostId, a: &Message, b: &Message) -> Ordering {
    let direct = (a.destination != receiver).cmp(&(b.destination != receiver));
    direct.then_with(|| match &sender.router {
        RouterState::Epidemic => epidemic::compare(a, b),
        RouterState::MaxProp(s) => maxprop::compare(a, b, s.threshold, &s.costs),
    })
}

/// The copy `sender` would transmit next to `receiver`, ignoring ids in
/// `exclude`.
pub fn next_message<'a>(sender: &'a Host, receiver: &Host, exclude: &IdSet) -> Option<&'a StoredCopy> {
    sender
        .buffer
        .iter()
        .filter(|c| !exclude.contains(c.message.id) && should_offer(sender, receiver, &c.message))
        .min_by(|a, b| offer_cmp(sender, receiver.idx, &a.message, &b.message))
}

/// Everything `sender` would offer `receiver`, in transmission order.
pub fn transfer_queue(sender: &Host, receiver: &Host) -> Vec<MessageId> {
    let mut msgs: Vec<&Message> = sender
        .buffer
        .iter()
        .map(|c| &c.message)
        .filter(|m| should_offer(sender, receiver, m))
        .collect();
    msgs.sort_by(|a, b| offer_cmp(sender, receiver.idx, a, b));
    msgs.into_iter().map(|m| m.id).collect()
}

fn remove_copy(host: &mut Host, id: MessageId, now: f64, events: &mut Vec<SimEvent>) {
    if let Some(c) = host.buffer.remove(id) {
        events.push(SimEvent::new(
            now,
            EventKind::MessageRemoved {
                id,
                host: host.idx,
                received_at: c.received_at,
            },
        ));
    }
}

fn drop_acked(host: &mut Host, now: f64, events: &mut Vec<SimEvent>) {
    let Some(s) = host.router.maxprop() else { return };
    let acked: Vec<MessageId> = host
        .buffer
        .iter()
        .map(|c| c.message.id)
        .filter(|&id| s.acks.contains(id))
        .collect();
    for id in acked {
        remove_copy(host, id, now, events);
    }
}

/// Unions both ack sets and deletes every acked resident copy.
pub fn propagate_acks(a: &mut Host, b: &mut Host, now: f64, events: &mut Vec<SimEvent>) {
    let (Some(sa), Some(sb)) = (a.router.maxprop_mut(), b.router.maxprop_mut()) else {
        return;
    };
    if sa.acks != sb.acks {
        sa.acks.union_with(&sb.acks);
        sb.acks.union_with(&sa.acks);
    }
    drop_acked(a, now, events);
    drop_acked(b, now, events);
}

/// Router reaction to a fresh connection between `a` and `b`.
pub fn connection_up(a: &mut Host, b: &mut Host, now: f64, events: &mut Vec<SimEvent>) {
    let (ia, ib) = (a.idx, b.idx);
    if let (Some(sa), Some(sb)) = (a.router.maxprop_mut(), b.router.maxprop_mut()) {
        sa.probs.update(ib);
        sb.probs.update(ia);
        sa.known[ib.index()] = Some(sb.probs.snapshot());
        sb.known[ia.index()] = Some(sa.probs.snapshot());
        sa.recompute_costs();
        sb.recompute_costs();
    }
    propagate_acks(a, b, now, events);
}

/// Bookkeeping after `receiver` got `id` as its destination from `sender`.
pub fn delivered(sender: &mut Host, receiver: &mut Host, id: MessageId, now: f64, events: &mut Vec<SimEvent>) {
    if let Some(r) = receiver.router.maxprop_mut() {
        r.acks.insert(id);
    }
    if let Some(s) = sender.router.maxprop_mut() {
        s.acks.insert(id);
        remove_copy(sender, id, now, events);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Coord;
    use crate::mobility::MovementState;

    fn host(i: u32, kind: RouterKind, n: usize) -> Host {
        Host::new(
            HostId(i),
            format!("h{i}"),
            0,
            MovementState::Stationary { position: Coord::default() },
            vec![0],
            10_000,
            RouterState::new(kind, HostId(i), n, 3),
        )
    }

    fn store(h: &mut Host, m: Message, t: f64) {
        assert!(h.buffer.insert(StoredCopy { message: m, received_at: t }));
    }

    #[test]
    fn identical_buffers_exchange_nothing() {
        let mut a = host(0, RouterKind::Epidemic, 3);
        let mut b = host(1, RouterKind::Epidemic, 3);
        let m = Message::new(MessageId(1), HostId(0), HostId(2), 10, 0.0);
        store(&mut a, m.clone(), 0.0);
        store(&mut b, m.forwarded_to(HostId(1)), 1.0);
        assert!(epidemic::on_connection_up(&a, &b).is_empty());
    }

    #[test]
    fn direct_copies_first() {
        let mut a = host(0, RouterKind::Epidemic, 3);
        let b = host(1, RouterKind::Epidemic, 3);
        store(&mut a, Message::new(MessageId(1), HostId(0), HostId(2), 10, 0.0), 0.0);
        store(&mut a, Message::new(MessageId(2), HostId(0), HostId(1), 10, 5.0), 5.0);
        assert_eq!(transfer_queue(&a, &b), vec![MessageId(2), MessageId(1)]);
        assert_eq!(next_message(&a, &b, &IdSet::new()).unwrap().message.id, MessageId(2));
    }

    #[test]
    fn maxprop_skips_visited_hosts_and_acks() {
        let mut a = host(0, RouterKind::MaxProp, 3);
        let mut b = host(1, RouterKind::MaxProp, 3);
        let m = Message::new(MessageId(1), HostId(1), HostId(2), 10, 0.0).forwarded_to(HostId(0));
        store(&mut a, m, 0.0);
        assert!(transfer_queue(&a, &b).is_empty());
        store(&mut a, Message::new(MessageId(2), HostId(0), HostId(2), 10, 0.0), 0.0);
        assert_eq!(transfer_queue(&a, &b), vec![MessageId(2)]);
        b.router.maxprop_mut().unwrap().acks.insert(MessageId(2));
        assert!(transfer_queue(&a, &b).is_empty());
        let mut ev = Vec::new();
        connection_up(&mut a, &mut b, 4.0, &mut ev);
        assert!(!a.buffer.contains(MessageId(2)));
        assert_eq!(ev.len(), 1);
        assert!(matches!(ev[0].kind, EventKind::MessageRemoved { id: MessageId(2), .. }));
    }

    #[test]
    fn maxprop_connection_updates_tables() {
        let mut a = host(0, RouterKind::MaxProp, 3);
        let mut b = host(1, RouterKind::MaxProp, 3);
        let mut ev = Vec::new();
        connection_up(&mut a, &mut b, 1.0, &mut ev);
        let sa = a.router.maxprop().unwrap();
        assert!((sa.probs.get(HostId(1)) - 0.75).abs() < 1e-12);
        assert_eq!(sa.known[1].as_deref().unwrap()[0], 0.75);
        // own hop to b costs 0.25; via b to c costs 0.25 + 0.75 = 1.0, direct 0.75
        assert!((sa.costs[1] - 0.25).abs() < 1e-12);
        assert!((sa.costs[2] - 0.75).abs() < 1e-12);
        assert!(ev.is_empty());
    }

    #[test]
    fn delivery_acks_and_sender_cleanup() {
        let mut a = host(0, RouterKind::MaxProp, 3);
        let mut b = host(1, RouterKind::MaxProp, 3);
        store(&mut a, Message::new(MessageId(5), HostId(0), HostId(1), 10, 0.0), 0.0);
        let mut ev = Vec::new();
        delivered(&mut a, &mut b, MessageId(5), 2.0, &mut ev);
        assert!(a.router.has_ack(MessageId(5)) && b.router.has_ack(MessageId(5)));
        assert!(a.buffer.is_empty());
        assert_eq!(ev.len(), 1);

        let mut e = host(0, RouterKind::Epidemic, 3);
        let mut f = host(1, RouterKind::Epidemic, 3);
        store(&mut e, Message::new(MessageId(5), HostId(0), HostId(1), 10, 0.0), 0.0);
        let mut ev = Vec::new();
        delivered(&mut e, &mut f, MessageId(5), 2.0, &mut ev);
        assert!(ev.is_empty());
        assert!(e.buffer.contains(MessageId(5)));
    }
}
