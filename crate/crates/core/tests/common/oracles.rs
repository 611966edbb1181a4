//! Independent reference implementations shared by the test targets.

use num_rational::BigRational;
use num_traits::{One, Zero};
use oppnet::geo::{Coord, MapGraph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum over every simple path of the summed `1 - p` weights.
pub fn min_cost_paths(n: usize, from: usize, rows: &[Option<Vec<f64>>]) -> Vec<f64> {
    fn walk(u: usize, acc: f64, seen: &mut Vec<bool>, rows: &[Option<Vec<f64>>], best: &mut [f64]) {
        if acc < best[u] {
            best[u] = acc;
        }
        let Some(row) = &rows[u] else { return };
        for v in 0..row.len() {
            if v != u && !seen[v] && row[v] > 0.0 {
                seen[v] = true;
                walk(v, acc + (1.0 - row[v]), seen, rows, best);
                seen[v] = false;
            }
        }
    }
    let mut best = vec![f64::INFINITY; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    walk(from, 0.0, &mut seen, rows, &mut best);
    best
}

/// Random f-tables over up to 8 hosts. Entries are sixteenths so every
/// path sum is exact in binary; some hosts have no known table.
pub fn random_tables(rng: &mut ChaCha8Rng) -> (usize, Vec<Option<Vec<f64>>>) {
    let n = rng.random_range(1..=8usize);
    let rows = (0..n)
        .map(|u| {
            if u > 0 && rng.random_bool(0.2) {
                return None;
            }
            Some(
                (0..n)
                    .map(|v| {
                        if v == u || rng.random_bool(0.4) {
                            0.0
                        } else {
                            rng.random_range(1..=16u32) as f64 / 16.0
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    (n, rows)
}

/// Exact increment-then-renormalize replay of a meeting sequence.
pub fn exact_updates(owner: usize, n: usize, meetings: &[usize]) -> Vec<BigRational> {
    let share = BigRational::one() / BigRational::from_integer((n as i64 - 1).into());
    let mut f: Vec<BigRational> = (0..n)
        .map(|i| if i == owner { BigRational::zero() } else { share.clone() })
        .collect();
    for &m in meetings {
        f[m] += BigRational::one();
        let total: BigRational = f.iter().cloned().sum();
        for v in f.iter_mut() {
            *v = v.clone() / total.clone();
        }
    }
    f
}

/// Shortest simple path length by exhaustive search.
pub fn shortest_by_enumeration(g: &MapGraph, from: usize, to: usize) -> Option<f64> {
    fn walk(g: &MapGraph, u: usize, to: usize, acc: f64, seen: &mut [bool], best: &mut Option<f64>) {
        if u == to {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for &(v, w) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                walk(g, v, to, acc + w, seen, best);
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[from] = true;
    let mut best = None;
    walk(g, from, to, 0.0, &mut seen, &mut best);
    best
}

pub fn random_graph(rng: &mut ChaCha8Rng) -> MapGraph {
    let n = rng.random_range(2..=8usize);
    let pts: Vec<Coord> = (0..n)
        .map(|i| Coord::new(rng.random_range(0..50) as f64 * 10.0 + i as f64 * 1e-3, rng.random_range(0..50) as f64 * 10.0))
        .collect();
    let mut lines = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.35) {
                lines.push(vec![pts[u], pts[v]]);
            }
        }
    }
    if lines.is_empty() {
        lines.push(vec![pts[0], pts[1]]);
    }
    MapGraph::from_line_strings(lines.iter().map(Vec::as_slice))
}

