//! Host movement: stationary placement and shortest-path map-based trips
//! with point-of-interest biased destinations.

use rand::Rng;
use thiserror::Error;

use crate::geo::{Coord, MapGraph, PoiSet};
use crate::rng::SimRng;
use crate::settings::{GroupSpec, MovementSpec, SpeedRange};

/// Redraws allowed when the drawn destination equals the current vertex.
const MAX_REDRAWS: usize = 16;
/// Destination draws per trip before the host idles until the next step.
const MAX_PLAN_ATTEMPTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("group `{0}` uses map-based movement but the map is empty")]
    EmptyMap(String),
}

/// Per-group parameters shared by every map-based host of the group.
#[derive(Debug, Clone, Copy)]
pub struct MapMovement<'a> {
    pub graph: &'a MapGraph,
    pub speed: SpeedRange,
    pub pois: Option<&'a PoiSet>,
    pub poi_prob: f64,
}

#[derive(Debug, Clone)]
pub struct MapBasedState {
    position: Coord,
    /// Last vertex reached.
    vertex: usize,
    /// Current trip; empty between trips.
    path: Vec<usize>,
    segment: usize,
    progress: f64,
    speed: f64,
    rng: SimRng,
}

#[derive(Debug, Clone)]
pub enum MovementState {
    Stationary { position: Coord },
    MapBased(MapBasedState),
}

impl MovementState {
    pub fn position(&self) -> Coord {
        match self {
            MovementState::Stationary { position } => *position,
            MovementState::MapBased(s) => s.position,
        }
    }

    pub fn map_based(&self) -> Option<&MapBasedState> {
        match self {
            MovementState::MapBased(s) => Some(s),
            MovementState::Stationary { .. } => None,
        }
    }

    /// Advances by `dt` sim-seconds. Stationary hosts are unchanged.
    pub fn step(&mut self, model: Option<&MapMovement<'_>>, dt: f64) {
        if let (MovementState::MapBased(s), Some(m)) = (self, model) {
            s.step(m, dt);
        }
    }
}

impl MapBasedState {
    pub fn new(graph: &MapGraph, vertex: usize, rng: SimRng) -> Self {
        MapBasedState {
            position: graph.vertex(vertex),
            vertex,
            path: Vec::new(),
            segment: 0,
            progress: 0.0,
            speed: 0.0,
            rng,
        }
    }

    pub fn position(&self) -> Coord {
        self.position
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    /// Remaining trip vertices, starting with the start of the current segment.
    pub fn path(&self) -> &[usize] {
        if self.path.is_empty() {
            &[]
        } else {
            &self.path[self.segment..]
        }
    }

    pub fn progress(&self) -> f64 {
        self.progress
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn destination(&self) -> Option<usize> {
        self.path.last().copied()
    }

    fn plan_trip(&mut self, m: &MapMovement<'_>) -> bool {
        for _ in 0..MAX_PLAN_ATTEMPTS {
            let dest = choose_destination(self.vertex, m.graph, m.pois, m.poi_prob, &mut self.rng);
            if dest == self.vertex {
                continue;
            }
            if let Ok(Some(route)) = m.graph.shortest_path(self.vertex, dest) {
                self.path = route.vertices;
                self.segment = 0;
                self.progress = 0.0;
                self.speed = draw_speed(m.speed, &mut self.rng);
                return true;
            }
        }
        false
    }

    fn step(&mut self, m: &MapMovement<'_>, dt: f64) {
        let mut time_left = dt;
        // each iteration finishes a segment or exhausts the time budget
        let mut guard = 0;
        while time_left > 0.0 && guard < 100_000 {
            guard += 1;
            if self.path.is_empty() && !self.plan_trip(m) {
                break;
            }
            if self.speed <= 0.0 {
                break;
            }
            let a = m.graph.vertex(self.path[self.segment]);
            let b = m.graph.vertex(self.path[self.segment + 1]);
            let remaining = a.distance(b) - self.progress;
            let reach = self.speed * time_left;
            if reach < remaining {
                self.progress += reach;
                time_left = 0.0;
            } else {
                time_left -= remaining / self.speed;
                self.progress = 0.0;
                self.segment += 1;
                self.vertex = self.path[self.segment];
                if self.segment + 1 == self.path.len() {
                    self.path.clear();
                    self.segment = 0;
                }
            }
        }
        self.position = if self.path.is_empty() {
            m.graph.vertex(self.vertex)
        } else {
            let a = m.graph.vertex(self.path[self.segment]);
            let b = m.graph.vertex(self.path[self.segment + 1]);
            a.lerp(b, self.progress / a.distance(b))
        };
    }
}

fn draw_speed(range: SpeedRange, rng: &mut SimRng) -> f64 {
    if range.max > range.min {
        rng.random_range(range.min..=range.max)
    } else {
        range.min
    }
}

/// Picks the next trip target: with probability `poi_prob` a uniformly drawn
/// POI, otherwise a uniformly drawn vertex. A draw equal to `current` is
/// redrawn a bounded number of times, after which it is accepted.
pub fn choose_destination(
    current: usize,
    graph: &MapGraph,
    pois: Option<&PoiSet>,
    poi_prob: f64,
    rng: &mut SimRng,
) -> usize {
    let n = graph.vertex_count();
    let draw = |rng: &mut SimRng| match pois {
        Some(p) if !p.is_empty() && rng.random::<f64>() < poi_prob => {
            p.vertices()[rng.random_range(0..p.len())]
        }
        _ => rng.random_range(0..n),
    };
    let mut pick = draw(rng);
    for _ in 0..MAX_REDRAWS {
        if pick != current {
            break;
        }
        pick = draw(rng);
    }
    pick
}

/// Initial state: stationary hosts sit at their configured location,
/// map-based hosts start on a uniformly drawn vertex.
pub fn initial_placement(
    group: &GroupSpec,
    graph: Option<&MapGraph>,
    mut rng: SimRng,
) -> Result<MovementState, MobilityError> {
    match &group.movement {
        MovementSpec::Stationary { location } => Ok(MovementState::Stationary {
            position: *location,
        }),
        MovementSpec::ShortestPathMapBased { .. } => {
            let graph = graph
                .filter(|g| !g.is_empty())
                .ok_or_else(|| MobilityError::EmptyMap(group.group_id_prefix.clone()))?;
            let v = rng.random_range(0..graph.vertex_count());
            Ok(MovementState::MapBased(MapBasedState::new(graph, v, rng)))
        }
    }
}
