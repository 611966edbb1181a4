//! End-of-run message statistics, report rendering, sweep CSV rows and
//! trend fitting.

mod fit;
mod stats;

use std::fmt::Write as _;

use thiserror::Error;

pub use fit::{polyfit2, polyval2, FitError};
pub use stats::{mean, median, sample_std};

use crate::sim::{EventKind, EventSink, SimEvent, SinkError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("event at {got} recorded after an event at {previous}")]
    OutOfOrder { previous: f64, got: f64 },
}

/// Counters and samples gathered from one run's event stream.
#[derive(Debug, Clone, Default)]
pub struct MetricsAccumulator {
    pub created: u64,
    pub started: u64,
    pub relayed: u64,
    pub aborted: u64,
    pub dropped: u64,
    pub removed: u64,
    pub delivered: u64,
    latencies: Vec<f64>,
    hops: Vec<u32>,
    buffer_times: Vec<f64>,
    last_time: Option<f64>,
}

impl MetricsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, ev: &SimEvent) -> Result<(), MetricsError> {
        if let Some(prev) = self.last_time {
            if ev.time < prev {
                return Err(MetricsError::OutOfOrder {
                    previous: prev,
                    got: ev.time,
                });
            }
        }
        self.last_time = Some(ev.time);
        match ev.kind {
            EventKind::MessageCreated { .. } => self.created += 1,
            EventKind::TransferStarted { .. } => self.started += 1,
            EventKind::TransferRelayed { .. } => self.relayed += 1,
            EventKind::TransferAborted { .. } => self.aborted += 1,
            EventKind::MessageDropped { received_at, .. } => {
                self.dropped += 1;
                self.buffer_times.push(ev.time - received_at);
            }
            EventKind::MessageRemoved { received_at, .. } => {
                self.removed += 1;
                self.buffer_times.push(ev.time - received_at);
            }
            EventKind::MessageDelivered { hops, created_at, .. } => {
                self.delivered += 1;
                self.latencies.push(ev.time - created_at);
                self.hops.push(hops);
            }
            EventKind::ConnectionUp { .. } | EventKind::ConnectionDown { .. } => {}
        }
        Ok(())
    }

    pub fn latencies(&self) -> &[f64] {
        &self.latencies
    }

    pub fn hop_counts(&self) -> &[u32] {
        &self.hops
    }

    pub fn buffer_times(&self) -> &[f64] {
        &self.buffer_times
    }

    pub fn finalize(&self, sim_time: f64) -> MessageStatsReport {
        let hops: Vec<f64> = self.hops.iter().map(|&h| h as f64).collect();
        let delivery_prob = if self.created == 0 {
            0.0
        } else {
            self.delivered as f64 / self.created as f64
        };
        let overhead_ratio = if self.delivered == 0 {
            f64::NAN
        } else {
            (self.relayed as f64 - self.delivered as f64) / self.delivered as f64
        };
        MessageStatsReport {
            sim_time,
            created: self.created,
            started: self.started,
            relayed: self.relayed,
            aborted: self.aborted,
            dropped: self.dropped,
            removed: self.removed,
            delivered: self.delivered,
            delivery_prob,
            response_prob: 0.0,
            overhead_ratio,
            latency_avg: mean(&self.latencies),
            latency_med: median(&self.latencies),
            hopcount_avg: mean(&hops),
            hopcount_med: median(&hops).floor(),
            buffertime_avg: mean(&self.buffer_times),
            buffertime_med: median(&self.buffer_times),
            rtt_avg: f64::NAN,
            rtt_med: f64::NAN,
        }
    }
}

impl EventSink for MetricsAccumulator {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        self.record(event).map_err(|MetricsError::OutOfOrder { previous, got }| {
            SinkError::OutOfOrder { previous, got }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageStatsReport {
    pub sim_time: f64,
    pub created: u64,
    pub started: u64,
    pub relayed: u64,
    pub aborted: u64,
    pub dropped: u64,
    pub removed: u64,
    pub delivered: u64,
    pub delivery_prob: f64,
    pub response_prob: f64,
    pub overhead_ratio: f64,
    pub latency_avg: f64,
    pub latency_med: f64,
    pub hopcount_avg: f64,
    /// Whole hops; NaN without deliveries.
    pub hopcount_med: f64,
    pub buffertime_avg: f64,
    pub buffertime_med: f64,
    pub rtt_avg: f64,
    pub rtt_med: f64,
}

fn whole(v: f64) -> String {
    if v.is_finite() {
        format!("{}", v as i64)
    } else {
        "NaN".to_string()
    }
}

/// `name: value` lines in the standard message-stats layout.
pub fn render_report(r: &MessageStatsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sim_time: {:.4}", r.sim_time);
    let _ = writeln!(s, "created: {}", r.created);
    let _ = writeln!(s, "started: {}", r.started);
    let _ = writeln!(s, "relayed: {}", r.relayed);
    let _ = writeln!(s, "aborted: {}", r.aborted);
    let _ = writeln!(s, "dropped: {}", r.dropped);
    let _ = writeln!(s, "removed: {}", r.removed);
    let _ = writeln!(s, "delivered: {}", r.delivered);
    let _ = writeln!(s, "delivery_prob: {:.4}", r.delivery_prob);
    let _ = writeln!(s, "response_prob: {:.4}", r.response_prob);
    let _ = writeln!(s, "overhead_ratio: {:.4}", r.overhead_ratio);
    let _ = writeln!(s, "latency_avg: {:.4}", r.latency_avg);
    let _ = writeln!(s, "latency_med: {:.4}", r.latency_med);
    let _ = writeln!(s, "hopcount_avg: {:.4}", r.hopcount_avg);
    let _ = writeln!(s, "hopcount_med: {}", whole(r.hopcount_med));
    let _ = writeln!(s, "buffertime_avg: {:.4}", r.buffertime_avg);
    let _ = writeln!(s, "buffertime_med: {:.4}", r.buffertime_med);
    let _ = writeln!(s, "rtt_avg: {:.4}", r.rtt_avg);
    let _ = writeln!(s, "rtt_med: {:.4}", r.rtt_med);
    s
}

/// Report columns shared by sweep CSVs, in order.
pub const STAT_COLUMNS: [&str; 16] = [
    "created",
    "started",
    "relayed",
    "aborted",
    "dropped",
    "removed",
    "delivered",
    "delivery_prob",
    "response_prob",
    "overhead_ratio",
    "latency_avg",
    "latency_med",
    "hopcount_avg",
    "hopcount_med",
    "buffertime_avg",
    "buffertime_med",
];

/// Shortest representation that round-trips; NaN as `NaN`.
pub fn full_precision(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

impl MessageStatsReport {
    /// Values for `STAT_COLUMNS`.
    pub fn stat_values(&self) -> [f64; 16] {
        [
            self.created as f64,
            self.started as f64,
            self.relayed as f64,
            self.aborted as f64,
            self.dropped as f64,
            self.removed as f64,
            self.delivered as f64,
            self.delivery_prob,
            self.response_prob,
            self.overhead_ratio,
            self.latency_avg,
            self.latency_med,
            self.hopcount_avg,
            self.hopcount_med,
            self.buffertime_avg,
            self.buffertime_med,
        ]
    }
}

/// Header of a per-router sweep CSV.
pub fn sweep_csv_header() -> Vec<String> {
    let mut h = vec!["run".to_string(), "range".to_string()];
    h.extend(STAT_COLUMNS.iter().map(|s| s.to_string()));
    h.push("seed".to_string());
    h
}

/// One sweep row: 1-based run index, swept value, report columns, seed.
pub fn sweep_csv_row(run: usize, value: f64, report: &MessageStatsReport, seed: u64) -> Vec<String> {
    let mut row = vec![run.to_string(), full_precision(value)];
    row.extend(report.stat_values().iter().map(|&v| full_precision(v)));
    row.push(seed.to_string());
    row
}
