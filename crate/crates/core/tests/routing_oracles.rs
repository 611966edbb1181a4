mod common;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use oppnet::routing::maxprop::{self, path_cost, path_costs};
use oppnet::routing::{DropPolicy, HostId, MakeRoomError, MeetingProbabilities, Message, MessageBuffer, MessageId, StoredCopy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracles;

#[test]
fn path_costs_match_enumeration_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let (n, rows) = oracles::random_tables(&mut rng);
        let from = rng.random_range(0..n);
        let got = path_costs(n, HostId(from as u32), |u| rows[u].as_deref());
        assert_eq!(got, oracles::min_cost_paths(n, from, &rows), "rows {rows:?} from {from}");
    }
}

#[test]
fn path_cost_over_tables() {
    let mut tables = BTreeMap::new();
    tables.insert(HostId(0), MeetingProbabilities::from_values(HostId(0), vec![0.0, 0.75, 0.25]));
    tables.insert(HostId(1), MeetingProbabilities::from_values(HostId(1), vec![0.5, 0.0, 0.5]));
    assert_eq!(path_cost(&tables, HostId(0), HostId(1)), 0.25);
    assert_eq!(path_cost(&tables, HostId(0), HostId(2)), 0.75);
    assert_eq!(path_cost(&tables, HostId(0), HostId(7)), f64::INFINITY);
}

#[test]
fn meeting_updates_by_hand() {
    let mut f = MeetingProbabilities::new(HostId(0), 3);
    f.update(HostId(1));
    assert_eq!(f.values(), &[0.0, 0.75, 0.25]);
    f.update(HostId(1));
    assert_eq!(f.values(), &[0.0, 0.875, 0.125]);
    f.update(HostId(2));
    assert!((f.get(HostId(1)) - 0.4375).abs() < 1e-12);
    assert!((f.get(HostId(2)) - 0.5625).abs() < 1e-12);
}

#[test]
fn meeting_updates_match_exact_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let n = rng.random_range(2..=10usize);
        let owner = rng.random_range(0..n);
        let meetings: Vec<usize> = (0..rng.random_range(1..40))
            .map(|_| loop {
                let m = rng.random_range(0..n);
                if m != owner {
                    break m;
                }
            })
            .collect();
        let mut f = MeetingProbabilities::new(HostId(owner as u32), n);
        for &m in &meetings {
            f.update(HostId(m as u32));
        }
        let exact = oracles::exact_updates(owner, n, &meetings);
        for (got, want) in f.values().iter().zip(&exact) {
            assert!((got - want.to_f64().unwrap()).abs() < 1e-12);
        }
    }
}

fn copy(id: u32, size: u64, hops: usize, dest: u32, received_at: f64) -> StoredCopy {
    let mut message = Message::new(MessageId(id), HostId(0), HostId(dest), size, 0.0);
    for h in 0..hops {
        message.path.push(HostId(100 + h as u32));
    }
    StoredCopy { message, received_at }
}

#[test]
fn full_buffer_needs_exactly_one_eviction() {
    let mut b = MessageBuffer::new(30_000_000);
    for i in 0..60 {
        assert!(b.insert(copy(i, 500_000, 0, 1, i as f64)));
    }
    let out = b.make_room(500_000, DropPolicy::OldestReceived, |_| false).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].message.id, MessageId(0));
    assert_eq!(
        b.make_room(31_000_000, DropPolicy::OldestReceived, |_| false),
        Err(MakeRoomError::TooLarge { size: 31_000_000, capacity: 30_000_000 })
    );
    assert_eq!(b.len(), 59);
}

proptest! {
    #[test]
    fn meeting_table_stays_normalized(n in 2usize..20, seq in proptest::collection::vec(0usize..1000, 0..200)) {
        let mut f = MeetingProbabilities::new(HostId(0), n);
        for m in seq {
            f.update(HostId((1 + m % (n - 1)) as u32));
            prop_assert!((f.sum() - 1.0).abs() < 1e-9);
            prop_assert!(f.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn buffer_never_overfills_or_duplicates(
        ops in proptest::collection::vec((0u32..40, 1u64..400, 0usize..6, any::<bool>()), 1..200),
        maxprop in any::<bool>(),
    ) {
        let costs: Vec<f64> = (0..8).map(|i| i as f64 * 0.3).collect();
        let mut b = MessageBuffer::new(1000);
        for (i, (id, size, hops, relayed)) in ops.into_iter().enumerate() {
            let c = copy(id, size, hops, id % 8, i as f64);
            let policy = if maxprop {
                DropPolicy::MaxProp { threshold: 3, costs: &costs }
            } else {
                DropPolicy::OldestReceived
            };
            let before = b.len();
            let result = if relayed {
                b.make_room_for(&c.message, policy, |_| false)
            } else {
                b.make_room(size, policy, |_| false)
            };
            match result {
                Ok(evicted) => {
                    prop_assert_eq!(b.len(), before - evicted.len());
                    b.insert(c);
                }
                Err(_) => prop_assert_eq!(b.len(), before),
            }
            prop_assert!(b.used() <= b.capacity());
            let mut ids: Vec<MessageId> = b.iter().map(|c| c.message.id).collect();
            let n = ids.len();
            ids.sort();
            ids.dedup();
            prop_assert_eq!(ids.len(), n);
        }
    }

    #[test]
    fn maxprop_queue_puts_low_hops_first(hops in proptest::collection::vec(0usize..8, 1..30)) {
        let costs = vec![0.0, 0.5, 1.0, 1.5];
        let copies: Vec<Message> = hops
            .iter()
            .enumerate()
            .map(|(i, &h)| copy(i as u32, 1, h, (i % 4) as u32, 0.0).message)
            .collect();
        let order = maxprop::queue_order(copies.iter(), 3, &costs);
        let rank = |id: MessageId| copies[id.0 as usize].hop_count();
        for w in order.windows(2) {
            let (a, b) = (rank(w[0]), rank(w[1]));
            if a >= 3 {
                prop_assert!(b >= 3);
            } else if b < 3 {
                prop_assert!(a <= b);
            }
        }
    }
}
