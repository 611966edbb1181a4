use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use super::{Coord, Geometry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("graph has no vertices")]
    Empty,
    #[error("point-of-interest file contains a non-POINT geometry")]
    NotAPoint,
    #[error("point-of-interest set is empty")]
    EmptyPoiSet,
}

/// Undirected map graph. Vertices keep insertion order; identical
/// coordinates merge into one vertex.
#[derive(Debug, Clone, Default)]
pub struct MapGraph {
    vertices: Vec<Coord>,
    index: HashMap<(u64, u64), usize>,
    /// Sorted by neighbour index.
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    dropped_segments: usize,
}

fn coord_key(c: Coord) -> (u64, u64) {
    // +0.0 and -0.0 compare equal, so give them the same key
    let norm = |v: f64| if v == 0.0 { 0.0f64 } else { v };
    (norm(c.x).to_bits(), norm(c.y).to_bits())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub vertices: Vec<usize>,
    pub length: f64,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MapGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: usize) -> Coord {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Coord] {
        &self.vertices
    }

    pub fn vertex_at(&self, c: Coord) -> Option<usize> {
        self.index.get(&coord_key(c)).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Each undirected edge once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let adj = self.adjacency.get(u)?;
        adj.binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| adj[i].1)
    }

    /// Zero-length segments skipped during construction.
    pub fn dropped_segments(&self) -> usize {
        self.dropped_segments
    }

    /// `(min, max)` corners of the vertex bounding box.
    pub fn bounding_box(&self) -> Option<(Coord, Coord)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), c| {
            (
                Coord::new(lo.x.min(c.x), lo.y.min(c.y)),
                Coord::new(hi.x.max(c.x), hi.y.max(c.y)),
            )
        }))
    }

    fn intern(&mut self, c: Coord) -> usize {
        let key = coord_key(c);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(c);
        self.index.insert(key, i);
        self.adjacency.push(Vec::new());
        i
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        let w = self.vertices[u].distance(self.vertices[v]);
        match self.adjacency[u].binary_search_by_key(&v, |&(n, _)| n) {
            Ok(_) => return,
            Err(pos) => self.adjacency[u].insert(pos, (v, w)),
        }
        let pos = self.adjacency[v]
            .binary_search_by_key(&u, |&(n, _)| n)
            .unwrap_err();
        self.adjacency[v].insert(pos, (u, w));
        self.edges.push((u.min(v), u.max(v), w));
    }

    /// Builds a graph from line strings. Consecutive coordinates become
    /// edges; zero-length segments are dropped with a warning.
    pub fn from_line_strings<'a, I>(lines: I) -> MapGraph
    where
        I: IntoIterator<Item = &'a [Coord]>,
    {
        let mut g = MapGraph::default();
        for line in lines {
            let ids: Vec<usize> = line.iter().map(|&c| g.intern(c)).collect();
            for pair in ids.windows(2) {
                if pair[0] == pair[1] {
                    g.dropped_segments += 1;
                    log::warn!(
                        "dropping zero-length segment at {:?}",
                        g.vertices[pair[0]]
                    );
                    continue;
                }
                g.add_edge(pair[0], pair[1]);
            }
        }
        g
    }

    /// Dijkstra over edge lengths. Equal-cost alternatives resolve toward the
    /// lower predecessor index so repeated queries give identical routes.
    pub fn shortest_path(&self, from: usize, to: usize) -> Result<Option<ShortestPath>, GraphError> {
        let n = self.vertices.len();
        for v in [from, to] {
            if v >= n {
                return Err(GraphError::NoSuchVertex(v));
            }
        }
        if from == to {
            return Ok(Some(ShortestPath {
                vertices: vec![from],
                length: 0.0,
            }));
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            vertex: from,
        });
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == to {
                break;
            }
            for &(v, w) in &self.adjacency[u] {
                if done[v] {
                    continue;
                }
                let nd = d + w;
                if nd < dist[v] || (nd == dist[v] && u < pred[v]) {
                    dist[v] = nd;
                    pred[v] = u;
                    heap.push(HeapEntry { dist: nd, vertex: v });
                }
            }
        }
        if !dist[to].is_finite() {
            return Ok(None);
        }
        let mut vertices = vec![to];
        let mut cur = to;
        while cur != from {
            cur = pred[cur];
            vertices.push(cur);
        }
        vertices.reverse();
        Ok(Some(ShortestPath {
            vertices,
            length: dist[to],
        }))
    }

    /// Nearest vertex by Euclidean distance; ties go to the lower index.
    pub fn snap_to_vertex(&self, p: Coord) -> Result<usize, GraphError> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = v.distance(p);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i).ok_or(GraphError::Empty)
    }
}

/// Builds a graph from the line strings among `geoms`; points are ignored.
pub fn build_graph(geoms: &[Geometry]) -> MapGraph {
    MapGraph::from_line_strings(geoms.iter().filter_map(|g| match g {
        Geometry::LineString(pts) => Some(pts.as_slice()),
        Geometry::Point(_) => None,
    }))
}

/// Points of interest, each snapped to a graph vertex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoiSet {
    vertices: Vec<usize>,
}

impl PoiSet {
    pub fn from_geometries(geoms: &[Geometry], graph: &MapGraph) -> Result<PoiSet, GraphError> {
        let mut vertices = Vec::with_capacity(geoms.len());
        for g in geoms {
            let Geometry::Point(p) = g else {
                return Err(GraphError::NotAPoint);
            };
            let v = graph.snap_to_vertex(*p)?;
            if graph.vertex(v) != *p {
                log::debug!("POI {p:?} snapped to vertex {v} at {:?}", graph.vertex(v));
            }
            vertices.push(v);
        }
        Ok(PoiSet { vertices })
    }

    pub fn from_vertices(vertices: Vec<usize>) -> PoiSet {
        PoiSet { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::parse_wkt;

    fn graph(text: &str) -> MapGraph {
        build_graph(&parse_wkt(text).unwrap())
    }

    #[test]
    fn single_segment() {
        let g = graph("LINESTRING (0 0, 3 4)");
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(5.0));
        assert_eq!(g.edge_weight(1, 0), Some(5.0));
    }

    #[test]
    fn shared_coordinate_merges() {
        let g = graph("LINESTRING (5800 2000, 0 0, 5000 2000)\nLINESTRING (5000 2000, 10 10)");
        let shared = g.vertex_at(Coord::new(5000.0, 2000.0)).unwrap();
        assert!(g.degree(shared) >= 2);
        assert_eq!(g.vertex_count(), 4);
    }

    #[test]
    fn duplicate_edges_and_zero_segments_collapse() {
        let g = graph("LINESTRING (0 0, 1 0, 1 0, 0 0)\nLINESTRING (1 0, 0 0)");
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.dropped_segments(), 1);
        assert!(g.edges().iter().all(|&(u, v, w)| u != v && w > 0.0));
    }

    #[test]
    fn negative_zero_is_same_vertex() {
        let g = graph("LINESTRING (0 0, 1 1)\nLINESTRING (-0 -0, 2 2)");
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn identity_path() {
        let g = graph("LINESTRING (0 0, 3 4)");
        let p = g.shortest_path(1, 1).unwrap().unwrap();
        assert_eq!(p.vertices, vec![1]);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn chain() {
        let g = graph("LINESTRING (0 0, 1 0, 2 0)");
        let p = g.shortest_path(0, 2).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.length, 2.0);
    }

    #[test]
    fn unreachable_and_missing() {
        let g = graph("LINESTRING (0 0, 1 0)\nLINESTRING (5 5, 6 6)");
        assert_eq!(g.shortest_path(0, 3).unwrap(), None);
        assert_eq!(g.shortest_path(0, 9), Err(GraphError::NoSuchVertex(9)));
    }

    #[test]
    fn equal_cost_routes_prefer_lower_index() {
        // square 0-1-2 and 0-3-2, both length 2
        let g = graph("LINESTRING (0 0, 1 0, 1 1)\nLINESTRING (0 0, 0 1, 1 1)");
        let p = g.shortest_path(0, 2).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        let back = g.shortest_path(2, 0).unwrap().unwrap();
        assert_eq!(back.length, 2.0);
    }

    #[test]
    fn snapping() {
        let g = graph("LINESTRING (0 0, 10 0, 20 0)");
        assert_eq!(g.snap_to_vertex(Coord::new(10.0, 0.0)).unwrap(), 1);
        assert_eq!(g.snap_to_vertex(Coord::new(5.0, 0.0)).unwrap(), 0);
        assert_eq!(g.snap_to_vertex(Coord::new(16.0, 3.0)).unwrap(), 2);
        assert_eq!(MapGraph::default().snap_to_vertex(Coord::new(0.0, 0.0)), Err(GraphError::Empty));
    }

    #[test]
    fn poi_set_requires_points() {
        let g = graph("LINESTRING (0 0, 10 0)");
        let pois = PoiSet::from_geometries(&parse_wkt("POINT (9 1)").unwrap(), &g).unwrap();
        assert_eq!(pois.vertices(), &[1]);
        let bad = PoiSet::from_geometries(&parse_wkt("LINESTRING (0 0, 1 1)").unwrap(), &g);
        assert_eq!(bad, Err(GraphError::NotAPoint));
    }
}
