use thiserror::Error;

use super::Coord;

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(Coord),
    /// At least two coordinates.
    LineString(Vec<Coord>),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct WktError {
    pub line: usize,
    pub kind: WktErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WktErrorKind {
    #[error("unknown geometry keyword {0:?}")]
    UnknownKeyword(String),
    #[error("malformed geometry: {0}")]
    Malformed(String),
    #[error("coordinate {0:?} does not have exactly two components")]
    OddComponents(String),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("LINESTRING needs at least 2 coordinates, got {0}")]
    TooFewPoints(usize),
}

fn parse_coords(body: &str) -> Result<Vec<Coord>, WktErrorKind> {
    let mut out = Vec::new();
    for chunk in body.split(',') {
        let parts: Vec<&str> = chunk.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(WktErrorKind::OddComponents(chunk.trim().to_string()));
        }
        let mut xy = [0.0; 2];
        for (slot, p) in xy.iter_mut().zip(&parts) {
            let v: f64 = p
                .parse()
                .map_err(|_| WktErrorKind::BadNumber(p.to_string()))?;
            if !v.is_finite() {
                return Err(WktErrorKind::BadNumber(p.to_string()));
            }
            *slot = v;
        }
        out.push(Coord::new(xy[0], xy[1]));
    }
    Ok(out)
}

fn parse_line(line: &str) -> Result<Geometry, WktErrorKind> {
    let open = line
        .find('(')
        .ok_or_else(|| match line.split_whitespace().next() {
            Some(word) if !word.eq_ignore_ascii_case("POINT")
                && !word.eq_ignore_ascii_case("LINESTRING") =>
            {
                WktErrorKind::UnknownKeyword(word.to_string())
            }
            _ => WktErrorKind::Malformed("missing `(`".into()),
        })?;
    let keyword = line[..open].trim();
    if !keyword.eq_ignore_ascii_case("POINT") && !keyword.eq_ignore_ascii_case("LINESTRING") {
        return Err(WktErrorKind::UnknownKeyword(keyword.to_string()));
    }
    let rest = line[open + 1..].trim_end();
    let body = rest
        .strip_suffix(')')
        .ok_or_else(|| WktErrorKind::Malformed("missing closing `)`".into()))?;
    if body.contains('(') || body.contains(')') {
        return Err(WktErrorKind::Malformed("nested parentheses".into()));
    }
    if keyword.eq_ignore_ascii_case("POINT") {
        let coords = parse_coords(body)?;
        if coords.len() != 1 {
            return Err(WktErrorKind::Malformed(format!(
                "POINT takes one coordinate, got {}",
                coords.len()
            )));
        }
        Ok(Geometry::Point(coords[0]))
    } else if keyword.eq_ignore_ascii_case("LINESTRING") {
        let coords = parse_coords(body)?;
        if coords.len() < 2 {
            return Err(WktErrorKind::TooFewPoints(coords.len()));
        }
        Ok(Geometry::LineString(coords))
    } else {
        Err(WktErrorKind::UnknownKeyword(keyword.to_string()))
    }
}

/// Parses one geometry per non-blank, non-comment line.
pub fn parse_wkt(text: &str) -> Result<Vec<Geometry>, WktError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_line(line).map_err(|kind| WktError {
            line: idx + 1,
            kind,
        })?);
    }
    Ok(out)
}
