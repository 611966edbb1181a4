//! MaxProp building blocks: meeting probabilities, transitive path costs,
//! and the hop-count/cost hybrid queue order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::message::{HostId, Message, MessageId};

pub const DEFAULT_HOP_THRESHOLD: u32 = 3;

/// A host's normalized estimate of meeting each other host.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingProbabilities {
    owner: HostId,
    f: Arc<Vec<f64>>,
}

impl MeetingProbabilities {
    /// Uniform over the other `n - 1` hosts.
    pub fn new(owner: HostId, n: usize) -> Self {
        let p = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
        let mut f = vec![p; n];
        if owner.index() < n {
            f[owner.index()] = 0.0;
        }
        MeetingProbabilities { owner, f: Arc::new(f) }
    }

    /// Arbitrary table, e.g. for tests. The owner's own entry is forced to 0.
    pub fn from_values(owner: HostId, mut f: Vec<f64>) -> Self {
        if owner.index() < f.len() {
            f[owner.index()] = 0.0;
        }
        MeetingProbabilities { owner, f: Arc::new(f) }
    }

    pub fn owner(&self) -> HostId {
        self.owner
    }

    pub fn get(&self, peer: HostId) -> f64 {
        self.f.get(peer.index()).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn sum(&self) -> f64 {
        self.f.iter().sum()
    }

    /// Cheap shared copy handed to peers.
    pub fn snapshot(&self) -> Arc<Vec<f64>> {
        Arc::clone(&self.f)
    }

    /// Increment-then-renormalize after meeting `met`.
    pub fn update(&mut self, met: HostId) {
        assert_ne!(met, self.owner, "a host does not meet itself");
        let f = Arc::make_mut(&mut self.f);
        if met.index() >= f.len() {
            f.resize(met.index() + 1, 0.0);
        }
        f[met.index()] += 1.0;
        let total: f64 = f.iter().sum();
        for v in f.iter_mut() {
            *v /= total;
        }
    }
}

/// Single-source costs from `from` to every host, where `table(u)` is the
/// f vector known for host `u` and an edge `u -> v` weighs `1 - f_u[v]`.
/// Zero-probability entries are not edges. Unreachable hosts cost infinity.
pub fn path_costs<'a, F>(n: usize, from: HostId, table: F) -> Vec<f64>
where
    F: Fn(usize) -> Option<&'a [f64]>,
{
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    if from.index() >= n {
        return dist;
    }
    dist[from.index()] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (i, &d) in dist.iter().enumerate() {
            if !done[i] && d < best {
                best = d;
                u = i;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let Some(row) = table(u) else { continue };
        for (v, &p) in row.iter().enumerate().take(n) {
            if v == u || done[v] || p <= 0.0 {
                continue;
            }
            let nd = best + (1.0 - p).max(0.0);
            if nd < dist[v] {
                dist[v] = nd;
            }
        }
    }
    dist
}

/// Cost from `from` to `to` over the known tables.
pub fn path_cost(tables: &BTreeMap<HostId, MeetingProbabilities>, from: HostId, to: HostId) -> f64 {
    let n = tables
        .iter()
        .map(|(h, t)| t.values().len().max(h.index() + 1))
        .chain([from.index() + 1])
        .max()
        .unwrap_or(0);
    if to.index() >= n {
        return f64::INFINITY;
    }
    let rows: Vec<Option<&[f64]>> = (0..n)
        .map(|i| tables.get(&HostId(i as u32)).map(|t| t.values()))
        .collect();
    path_costs(n, from, |u| rows[u])[to.index()]
}

/// Ordering key of one copy; smaller transmits earlier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueKey {
    /// False for copies under the hop threshold, which sort first.
    pub over_threshold: bool,
    /// Hop count under the threshold, path cost above it.
    pub primary: f64,
    pub cost: f64,
    pub id: MessageId,
}

pub fn key_cmp(a: &QueueKey, b: &QueueKey) -> Ordering {
    a.over_threshold
        .cmp(&b.over_threshold)
        .then(a.primary.total_cmp(&b.primary))
        .then(a.cost.total_cmp(&b.cost))
        .then(a.id.cmp(&b.id))
}

/// Under-threshold copies by hops, the rest by cost; remaining ties by cost
/// and then id.
pub fn transmission_key(m: &Message, threshold: u32, costs: &[f64]) -> QueueKey {
    let hops = m.hop_count();
    let cost = costs.get(m.destination.index()).copied().unwrap_or(f64::INFINITY);
    let over_threshold = hops >= threshold;
    QueueKey {
        over_threshold,
        primary: if over_threshold { cost } else { hops as f64 },
        cost,
        id: m.id,
    }
}

pub fn compare(a: &Message, b: &Message, threshold: u32, costs: &[f64]) -> Ordering {
    key_cmp(&transmission_key(a, threshold, costs), &transmission_key(b, threshold, costs))
}

/// Transmission order; eviction is its reverse.
pub fn queue_order<'a, I>(copies: I, threshold: u32, costs: &[f64]) -> Vec<MessageId>
where
    I: IntoIterator<Item = &'a Message>,
{
    let mut keys: Vec<_> = copies
        .into_iter()
        .map(|m| transmission_key(m, threshold, costs))
        .collect();
    keys.sort_by(key_cmp);
    keys.into_iter().map(|k| k.id).collect()
}
