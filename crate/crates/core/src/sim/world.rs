use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::events::{EventKind, EventSink, SimEvent, SinkError};
use super::generator::MessageGenerator;
use super::host::{pair_mut, Host};
use crate::geo::{build_graph, parse_wkt, Coord, Geometry, GraphError, MapGraph, PoiSet, WktError};
use crate::mobility::{initial_placement, MapMovement, MobilityError};
use crate::rng::{stream, GENERATOR_STREAM};
use crate::routing::{self, HostId, IdSet, MakeRoomError, Message, RouterState, StoredCopy};
use crate::settings::{InterfaceSpec, MovementSpec, Scenario};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Wkt {
        path: PathBuf,
        #[source]
        source: WktError,
    },
    #[error("{path}: {source}")]
    Poi {
        path: PathBuf,
        #[source]
        source: GraphError,
    },
    #[error("POI file {0} is not configured")]
    MissingPoiFile(usize),
    #[error("interface `{0}` is not defined")]
    UnknownInterface(String),
    #[error("too many distinct interfaces (at most 64)")]
    TooManyInterfaces,
    #[error(transparent)]
    Mobility(#[from] MobilityError),
}

/// Map graph and POI sets referenced by a scenario.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub graph: MapGraph,
    pub pois: BTreeMap<usize, PoiSet>,
}

fn read_wkt(path: &Path) -> Result<Vec<Geometry>, WorldError> {
    let text = std::fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wkt(&text).map_err(|source| WorldError::Wkt {
        path: path.to_path_buf(),
        source,
    })
}

impl Environment {
    /// Loads map and POI files; relative paths resolve against `base`.
    pub fn load(scenario: &Scenario, base: &Path) -> Result<Self, WorldError> {
        let mut geoms = Vec::new();
        for p in &scenario.map_paths {
            geoms.extend(read_wkt(&base.join(p))?);
        }
        let graph = build_graph(&geoms);
        let mut pois = BTreeMap::new();
        for (&k, p) in &scenario.poi_paths {
            let path = base.join(p);
            let g = read_wkt(&path)?;
            let set = PoiSet::from_geometries(&g, &graph).map_err(|source| WorldError::Poi { path, source })?;
            pois.insert(k, set);
        }
        Ok(Environment { graph, pois })
    }
}

/// Sim-seconds a message of `size` bytes occupies a link at `speed` bytes/s.
pub fn transfer_time(size: u64, speed: u64) -> f64 {
    assert!(speed > 0, "transfer speed must be positive");
    size as f64 / speed as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    /// The copy as it will arrive, path already extended.
    pub copy: Message,
    pub remaining: f64,
    pub started_at: f64,
}

#[derive(Debug, Clone)]
pub struct Connection {
    pub a: HostId,
    pub b: HostId,
    pub interface: usize,
    pub established_at: f64,
    /// Bytes per sim-second.
    pub speed: u64,
    /// Index 0 carries a to b, index 1 b to a.
    pub transfers: [Option<Transfer>; 2],
    refused: [IdSet; 2],
}

impl Connection {
    fn endpoints(&self, dir: usize) -> (HostId, HostId) {
        if dir == 0 {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

type Link = (HostId, HostId, usize);

/// Current link set: pairs sharing an interface within its range.
pub fn detect_connections(hosts: &[Host], interfaces: &[InterfaceSpec]) -> BTreeSet<Link> {
    let pos: Vec<Coord> = hosts.iter().map(|h| h.movement.position()).collect();
    let masks: Vec<u64> = hosts
        .iter()
        .map(|h| h.interfaces.iter().fold(0u64, |m, &i| m | (1 << i)))
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..hosts.len() {
        for j in i + 1..hosts.len() {
            let common = masks[i] & masks[j];
            if common == 0 {
                continue;
            }
            let d = pos[i].distance(pos[j]);
            let mut bits = common;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if d <= interfaces[k].transmit_range {
                    out.insert((HostId(i as u32), HostId(j as u32), k));
                    break;
                }
            }
        }
    }
    out
}

struct GroupModel {
    speed: crate::settings::SpeedRange,
    pois: Option<(usize, f64)>,
}

pub struct World {
    graph: MapGraph,
    pois: BTreeMap<usize, PoiSet>,
    models: Vec<Option<GroupModel>>,
    interfaces: Vec<InterfaceSpec>,
    hosts: Vec<Host>,
    connections: BTreeMap<(HostId, HostId), Connection>,
    generator: MessageGenerator,
    tick: u64,
    time: f64,
    dt: f64,
    end: f64,
    events: Vec<SimEvent>,
    last_event_time: f64,
}

impl World {
    pub fn new(scenario: &Scenario, env: Environment, seed: u64) -> Result<Self, WorldError> {
        let interfaces: Vec<InterfaceSpec> = scenario.interfaces.values().cloned().collect();
        if interfaces.len() > 64 {
            return Err(WorldError::TooManyInterfaces);
        }
        let iface_index = |name: &str| {
            interfaces
                .iter()
                .position(|i| i.name == name)
                .ok_or_else(|| WorldError::UnknownInterface(name.to_string()))
        };
        let n = scenario.total_hosts();
        let mut hosts = Vec::with_capacity(n);
        let mut models = Vec::with_capacity(scenario.groups.len());
        let mut sources = Vec::new();
        let mut destinations = Vec::new();
        for (g, group) in scenario.groups.iter().enumerate() {
            models.push(match &group.movement {
                MovementSpec::ShortestPathMapBased { speed, pois } => Some(GroupModel {
                    speed: *speed,
                    pois: match pois {
                        Some(p) if p.prob > 0.0 => {
                            if !env.pois.contains_key(&p.file_index) {
                                return Err(WorldError::MissingPoiFile(p.file_index));
                            }
                            Some((p.file_index, p.prob))
                        }
                        _ => None,
                    },
                }),
                MovementSpec::Stationary { .. } => None,
            });
            let ifaces = group
                .interfaces
                .iter()
                .map(|name| iface_index(name))
                .collect::<Result<Vec<_>, _>>()?;
            let is_source = scenario.generator.source_groups.contains(&group.group_id_prefix);
            let is_dest = scenario.generator.destination_groups.contains(&group.group_id_prefix);
            for k in 0..group.nrof_hosts {
                let idx = HostId(hosts.len() as u32);
                let movement = initial_placement(group, Some(&env.graph), stream(seed, idx.0 as u64))?;
                let router = RouterState::new(scenario.router, idx, n, scenario.maxprop_hop_threshold);
                hosts.push(Host::new(
                    idx,
                    format!("{}{k}", group.group_id_prefix),
                    g,
                    movement,
                    ifaces.clone(),
                    group.buffer_size,
                    router,
                ));
                if is_source {
                    sources.push(idx);
                }
                if is_dest {
                    destinations.push(idx);
                }
            }
        }
        let generator = MessageGenerator::new(
            &scenario.generator,
            sources,
            destinations,
            stream(seed, GENERATOR_STREAM),
        );
        Ok(World {
            graph: env.graph,
            pois: env.pois,
            models,
            interfaces,
            hosts,
            connections: BTreeMap::new(),
            generator,
            tick: 0,
            time: 0.0,
            dt: scenario.update_interval,
            end: scenario.sim_time_end,
            events: Vec::new(),
            last_event_time: f64::NEG_INFINITY,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn end_time(&self) -> f64 {
        self.end
    }

    pub fn is_finished(&self) -> bool {
        self.time >= self.end
    }

    pub fn hosts(&self) -> &[Host] {
        &self.hosts
    }

    pub fn host_names(&self) -> Vec<String> {
        self.hosts.iter().map(|h| h.name.clone()).collect()
    }

    pub fn interfaces(&self) -> &[InterfaceSpec] {
        &self.interfaces
    }

    pub fn connections(&self) -> impl Iterator<Item = &Connection> {
        self.connections.values()
    }

    pub fn graph(&self) -> &MapGraph {
        &self.graph
    }

    pub fn generator(&self) -> &MessageGenerator {
        &self.generator
    }

    pub fn in_flight(&self) -> usize {
        self.connections
            .values()
            .map(|c| c.transfers.iter().filter(|t| t.is_some()).count())
            .sum()
    }

    /// Runs ticks until the end time, feeding every event to `sink`.
    pub fn run<S: EventSink>(&mut self, sink: &mut S) -> Result<(), SinkError> {
        while !self.is_finished() {
            self.advance(sink)?;
        }
        Ok(())
    }

    /// One tick: movement, creations, connectivity, router reaction,
    /// transfers, then event delivery to `sink`.
    pub fn advance<S: EventSink>(&mut self, sink: &mut S) -> Result<(), SinkError> {
        self.tick += 1;
        let now = (self.tick as f64 * self.dt).min(self.end);
        let dt = now - self.time;
        self.step_movement(dt);
        self.create_due_messages(now);
        self.update_connections(now);
        self.pump_transfers(now, dt);
        self.time = now;
        for ev in self.events.drain(..) {
            if ev.time < self.last_event_time {
                return Err(SinkError::OutOfOrder {
                    previous: self.last_event_time,
                    got: ev.time,
                });
            }
            self.last_event_time = ev.time;
            sink.emit(&ev)?;
        }
        Ok(())
    }

    fn step_movement(&mut self, dt: f64) {
        let graph = &self.graph;
        for h in &mut self.hosts {
            if let Some(m) = &self.models[h.group] {
                let mm = MapMovement {
                    graph,
                    speed: m.speed,
                    pois: m.pois.and_then(|(k, _)| self.pois.get(&k)),
                    poi_prob: m.pois.map_or(0.0, |(_, p)| p),
                };
                h.movement.step(Some(&mm), dt);
            }
        }
    }

    fn create_due_messages(&mut self, now: f64) {
        while self.generator.next_due() <= now {
            let m = self.generator.create();
            let t = m.created_at;
            self.events.push(SimEvent::new(
                t,
                EventKind::MessageCreated {
                    id: m.id,
                    source: m.source,
                    destination: m.destination,
                    size: m.size,
                },
            ));
            let src = &mut self.hosts[m.source.index()];
            let Host { buffer, router, sending, .. } = src;
            match buffer.make_room(m.size, router.drop_policy(), |id| sending.contains(&id)) {
                Ok(evicted) => {
                    for c in evicted {
                        self.events.push(dropped(t, src.idx, &c));
                    }
                    let id = m.id;
                    let stored = src.buffer.insert(StoredCopy { message: m, received_at: t });
                    debug_assert!(stored, "{id} should fit after make_room");
                }
                Err(_) => {
                    let host = src.idx;
                    self.events.push(SimEvent::new(
                        t,
                        EventKind::MessageDropped { id: m.id, host, received_at: t },
                    ));
                }
            }
        }
    }

    fn update_connections(&mut self, now: f64) {
        let links = detect_connections(&self.hosts, &self.interfaces);
        let gone: Vec<(HostId, HostId)> = self
            .connections
            .values()
            .filter(|c| !links.contains(&(c.a, c.b, c.interface)))
            .map(|c| (c.a, c.b))
            .collect();
        for key in gone {
            let conn = self.connections.remove(&key).expect("connection present");
            for dir in 0..2 {
                if let Some(tr) = &conn.transfers[dir] {
                    let (from, to) = conn.endpoints(dir);
                    self.abort(from, to, tr, now);
                }
            }
            self.events.push(SimEvent::new(now, EventKind::ConnectionDown { a: key.0, b: key.1 }));
        }
        for (a, b, k) in links {
            if self.connections.contains_key(&(a, b)) {
                continue;
            }
            self.connections.insert(
                (a, b),
                Connection {
                    a,
                    b,
                    interface: k,
                    established_at: now,
                    speed: self.interfaces[k].transmit_speed,
                    transfers: [None, None],
                    refused: [IdSet::new(), IdSet::new()],
                },
            );
            self.events.push(SimEvent::new(now, EventKind::ConnectionUp { a, b }));
            let (ha, hb) = pair_mut(&mut self.hosts, a, b);
            routing::connection_up(ha, hb, now, &mut self.events);
        }
    }

    fn abort(&mut self, from: HostId, to: HostId, tr: &Transfer, now: f64) {
        let id = tr.copy.id;
        self.hosts[from.index()].finish_sending(id);
        let r = &mut self.hosts[to.index()];
        r.incoming.remove(id);
        if tr.copy.destination != to {
            r.buffer.release(tr.copy.size);
        }
        self.events.push(SimEvent::new(now, EventKind::TransferAborted { id, from, to }));
    }

    fn pump_transfers(&mut self, now: f64, dt: f64) {
        let keys: Vec<(HostId, HostId)> = self.connections.keys().copied().collect();
        for key in keys {
            for dir in 0..2 {
                self.pump(key, dir, now, dt);
            }
        }
    }

    /// Progresses one direction of a connection: finishes the transfer in
    /// flight if the tick's byte budget allows, then starts at most one more.
    fn pump(&mut self, key: (HostId, HostId), dir: usize, now: f64, dt: f64) {
        let conn = self.connections.get_mut(&key).expect("connection present");
        let mut budget = conn.speed as f64 * dt;
        let (from, to) = conn.endpoints(dir);
        if let Some(tr) = conn.transfers[dir].as_mut() {
            if tr.remaining > budget {
                tr.remaining -= budget;
                return;
            }
            budget -= tr.remaining;
            let tr = conn.transfers[dir].take().expect("transfer present");
            self.complete(from, to, tr, now);
        }
        let Some(tr) = self.start(key, dir, now) else { return };
        if tr.remaining <= budget {
            self.complete(from, to, tr, now);
        } else {
            let mut tr = tr;
            tr.remaining -= budget;
            self.connections.get_mut(&key).expect("connection present").transfers[dir] = Some(tr);
        }
    }

    fn start(&mut self, key: (HostId, HostId), dir: usize, now: f64) -> Option<Transfer> {
        let conn = self.connections.get_mut(&key).expect("connection present");
        let (from, to) = conn.endpoints(dir);
        let refused = &mut conn.refused[dir];
        let (copy, id, size) = loop {
            let (sender, receiver) = (&self.hosts[from.index()], &self.hosts[to.index()]);
            let copy = routing::next_message(sender, receiver, refused)?.message.forwarded_to(to);
            let id = copy.id;
            let size = copy.size;
            if copy.destination == to {
                break (copy, id, size);
            }
            let r = &mut self.hosts[to.index()];
            let Host { buffer, router, sending, .. } = r;
            match buffer.make_room_for(&copy, router.drop_policy(), |m| sending.contains(&m)) {
                Ok(evicted) => {
                    for c in evicted {
                        self.events.push(dropped(now, to, &c));
                    }
                    r.buffer.reserve(size);
                    break (copy, id, size);
                }
                Err(MakeRoomError::TooLarge { .. }) => {
                    refused.insert(id);
                    self.events.push(SimEvent::new(now, EventKind::TransferStarted { id, from, to }));
                    self.events.push(SimEvent::new(now, EventKind::TransferAborted { id, from, to }));
                    return None;
                }
                Err(MakeRoomError::Outranked) => {
                    refused.insert(id);
                }
                Err(MakeRoomError::NoEvictable { .. }) => return None,
            }
        };
        self.hosts[to.index()].incoming.insert(id);
        self.hosts[from.index()].sending.push(id);
        self.events.push(SimEvent::new(now, EventKind::TransferStarted { id, from, to }));
        Some(Transfer {
            copy,
            remaining: size as f64,
            started_at: now,
        })
    }

    fn complete(&mut self, from: HostId, to: HostId, tr: Transfer, now: f64) {
        let id = tr.copy.id;
        self.events.push(SimEvent::new(now, EventKind::TransferRelayed { id, from, to }));
        let (s, r) = pair_mut(&mut self.hosts, from, to);
        s.finish_sending(id);
        r.incoming.remove(id);
        if tr.copy.destination == to {
            if r.delivered.insert(id) {
                self.events.push(SimEvent::new(
                    now,
                    EventKind::MessageDelivered {
                        id,
                        from,
                        to,
                        hops: tr.copy.hop_count(),
                        created_at: tr.copy.created_at,
                    },
                ));
            }
            routing::delivered(s, r, id, now, &mut self.events);
            return;
        }
        r.buffer.release(tr.copy.size);
        if r.buffer.contains(id) || r.router.has_ack(id) {
            return;
        }
        let stored = r.buffer.insert(StoredCopy {
            message: tr.copy,
            received_at: now,
        });
        debug_assert!(stored, "{id} reserved space vanished");
    }
}

fn dropped(t: f64, host: HostId, c: &StoredCopy) -> SimEvent {
    SimEvent::new(
        t,
        EventKind::MessageDropped {
            id: c.message.id,
            host,
            received_at: c.received_at,
        },
    )
}
