//! Map geometry: WKT subset parsing, the path graph built from LINESTRINGs,
//! and points of interest snapped onto it.

mod graph;
mod wkt;

pub use graph::{build_graph, GraphError, MapGraph, PoiSet, ShortestPath};
pub use wkt::{parse_wkt, Geometry, WktError, WktErrorKind};

/// Planar position in sim-meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub const fn new(x: f64, y: f64) -> Self {
        Coord { x, y }
    }

    pub fn distance(self, other: Coord) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(self, other: Coord, t: f64) -> Coord {
        Coord::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}
