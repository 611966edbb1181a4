//! Real-world to simulator unit scaling and size-suffix parsing.
//!
//! One sim-meter is 100 real meters and one sim-second is one real minute.

use thiserror::Error;

/// Real meters per sim-meter.
pub const DISTANCE_SCALE: f64 = 100.0;
/// Real seconds per sim-second.
pub const TIME_SCALE: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    /// Real meters.
    Distance,
    /// Real meters per real second.
    Speed,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("quantity must be non-negative and finite, got {0}")]
    Domain(f64),
    #[error("invalid size {0:?}")]
    InvalidSize(String),
}

/// Converts a real-world quantity in SI units to simulator units.
pub fn real_to_sim(value: f64, kind: QuantityKind) -> Result<f64, UnitError> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(UnitError::Domain(value));
    }
    Ok(match kind {
        QuantityKind::Distance => value / DISTANCE_SCALE,
        QuantityKind::Speed => value / DISTANCE_SCALE * TIME_SCALE,
    })
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh * 1000.0 / 3600.0
}

/// Parses a byte count with an optional decimal suffix: `k` = 10^3,
/// `M` = 10^6, `G` = 10^9.
pub fn parse_size(text: &str) -> Result<u64, UnitError> {
    let t = text.trim();
    let (digits, mult) = match t.chars().last() {
        Some('k') => (&t[..t.len() - 1], 1e3),
        Some('M') => (&t[..t.len() - 1], 1e6),
        Some('G') => (&t[..t.len() - 1], 1e9),
        _ => (t, 1.0),
    };
    let v: f64 = digits
        .trim()
        .parse()
        .map_err(|_| UnitError::InvalidSize(text.to_string()))?;
    let bytes = v * mult;
    if !bytes.is_finite() || bytes < 0.0 || bytes.fract() != 0.0 || bytes > u64::MAX as f64 {
        return Err(UnitError::InvalidSize(text.to_string()));
    }
    Ok(bytes as u64)
}

/// Formats a byte count using the largest suffix that divides it exactly.
pub fn format_size(bytes: u64) -> String {
    if bytes > 0 && bytes % 1_000_000_000 == 0 {
        format!("{}G", bytes / 1_000_000_000)
    } else if bytes > 0 && bytes % 1_000_000 == 0 {
        format!("{}M", bytes / 1_000_000)
    } else if bytes > 0 && bytes % 1_000 == 0 {
        format!("{}k", bytes / 1_000)
    } else {
        bytes.to_string()
    }
}
