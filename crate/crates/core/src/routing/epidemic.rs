//! Epidemic flooding: every copy the peer lacks is offered, oldest first.

use std::cmp::Ordering;

use super::{transfer_queue, Message, MessageId};
use crate::sim::Host;

/// Oldest created first, id as tie-break.
pub fn compare(a: &Message, b: &Message) -> Ordering {
    a.created_at.total_cmp(&b.created_at).then(a.id.cmp(&b.id))
}

/// Both directions of the summary-vector exchange at connection start.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExchangePlan {
    pub a_to_b: Vec<MessageId>,
    pub b_to_a: Vec<MessageId>,
}

impl ExchangePlan {
    pub fn is_empty(&self) -> bool {
        self.a_to_b.is_empty() && self.b_to_a.is_empty()
    }
}

pub fn on_connection_up(a: &Host, b: &Host) -> ExchangePlan {
    ExchangePlan {
        a_to_b: transfer_queue(a, b),
        b_to_a: transfer_queue(b, a),
    }
}
