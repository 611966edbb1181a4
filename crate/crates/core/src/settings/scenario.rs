use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use super::table::SettingsTable;
use super::units::{format_size, parse_size, DISTANCE_SCALE, TIME_SCALE};
use crate::geo::Coord;

pub const DEFAULT_UPDATE_INTERVAL: f64 = 1.0;
pub const DEFAULT_RNG_SEED: u64 = 1;
pub const DEFAULT_HOP_THRESHOLD: u32 = 3;
pub const DEFAULT_INTERVAL: (f64, f64) = (25.0, 35.0);
pub const DEFAULT_MESSAGE_SIZE: u64 = 500_000;

const SIMPLE_BROADCAST: &str = "SimpleBroadcastInterface";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("missing required setting `{0}`")]
    Missing(String),
    #[error("invalid value {value:?} for `{key}`: {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("`{key}` references undeclared interface `{name}`")]
    UnknownInterface { key: String, name: String },
    #[error("`{key}`: unsupported {what} `{value}`")]
    Unsupported {
        key: String,
        what: &'static str,
        value: String,
    },
    #[error("no host groups declared")]
    NoGroups,
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSpec {
    pub name: String,
    /// Sim-meters.
    pub transmit_range: f64,
    /// Bytes per sim-second.
    pub transmit_speed: u64,
}

impl InterfaceSpec {
    /// Two interfaces can form a link iff their names match.
    pub fn link_compatible(&self, other: &InterfaceSpec) -> bool {
        self.name == other.name
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoiChoice {
    pub file_index: usize,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MovementSpec {
    Stationary {
        location: Coord,
    },
    ShortestPathMapBased {
        speed: SpeedRange,
        pois: Option<PoiChoice>,
    },
}

impl MovementSpec {
    pub fn is_map_based(&self) -> bool {
        matches!(self, MovementSpec::ShortestPathMapBased { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub group_id_prefix: String,
    pub nrof_hosts: usize,
    pub movement: MovementSpec,
    /// Bytes.
    pub buffer_size: u64,
    /// Canonical interface names, aliases already resolved.
    pub interfaces: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RouterKind {
    Epidemic,
    MaxProp,
}

impl RouterKind {
    pub fn settings_name(self) -> &'static str {
        match self {
            RouterKind::Epidemic => "EpidemicRouter",
            RouterKind::MaxProp => "MaxPropRouter",
        }
    }

    /// Lowercase label used in file names and CSV columns.
    pub fn label(self) -> &'static str {
        match self {
            RouterKind::Epidemic => "epidemic",
            RouterKind::MaxProp => "maxprop",
        }
    }
}

impl fmt::Display for RouterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.settings_name())
    }
}

impl FromStr for RouterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "EpidemicRouter" | "Epidemic" | "epidemic" => Ok(RouterKind::Epidemic),
            "MaxPropRouter" | "MaxProp" | "maxprop" => Ok(RouterKind::MaxProp),
            other => Err(format!("unknown router `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageGeneratorSpec {
    pub interval_min: f64,
    pub interval_max: f64,
    pub size: u64,
    pub source_groups: Vec<String>,
    pub destination_groups: Vec<String>,
    /// 0 means no response messages are requested.
    pub response_size: u64,
    pub prefix: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub sim_time_end: f64,
    pub update_interval: f64,
    pub rng_seed: u64,
    pub router: RouterKind,
    pub maxprop_hop_threshold: u32,
    pub map_paths: Vec<PathBuf>,
    pub poi_paths: BTreeMap<usize, PathBuf>,
    pub interfaces: BTreeMap<String, InterfaceSpec>,
    pub groups: Vec<GroupSpec>,
    pub generator: MessageGeneratorSpec,
    /// Real meters per sim-meter.
    pub distance_scale: f64,
    /// Real seconds per sim-second.
    pub time_scale: f64,
}

impl Scenario {
    pub fn total_hosts(&self) -> usize {
        self.groups.iter().map(|g| g.nrof_hosts).sum()
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceSpec> {
        self.interfaces.get(name)
    }

    /// Serializes the scenario to settings text that `build_scenario`
    /// reads back into an equal value.
    pub fn to_settings_text(&self) -> String {
        let mut t = SettingsTable::new();
        t.set("Scenario.name", &self.name);
        t.set("Scenario.endTime", self.sim_time_end.to_string());
        t.set("Scenario.updateInterval", self.update_interval.to_string());
        t.set("Scenario.nrofHostGroups", self.groups.len().to_string());
        t.set("MovementModel.rngSeed", self.rng_seed.to_string());
        t.set("Group.router", self.router.settings_name());
        t.set(
            "MaxPropRouter.hopThreshold",
            self.maxprop_hop_threshold.to_string(),
        );
        if !self.map_paths.is_empty() {
            t.set("MapBasedMovement.nrofMapFiles", self.map_paths.len().to_string());
            for (i, p) in self.map_paths.iter().enumerate() {
                t.set(format!("MapBasedMovement.mapFile{}", i + 1), p.display().to_string());
            }
        }
        for (k, p) in &self.poi_paths {
            t.set(format!("PointsOfInterest.poiFile{k}"), p.display().to_string());
        }
        for iface in self.interfaces.values() {
            t.set(format!("{}.type", iface.name), SIMPLE_BROADCAST);
            t.set(
                format!("{}.transmitSpeed", iface.name),
                format_size(iface.transmit_speed),
            );
            t.set(
                format!("{}.transmitRange", iface.name),
                iface.transmit_range.to_string(),
            );
        }
        for (i, g) in self.groups.iter().enumerate() {
            let p = format!("Group{}", i + 1);
            t.set(format!("{p}.groupID"), &g.group_id_prefix);
            t.set(format!("{p}.nrofHosts"), g.nrof_hosts.to_string());
            match &g.movement {
                MovementSpec::Stationary { location } => {
                    t.set(format!("{p}.movementModel"), "StationaryMovement");
                    t.set(format!("{p}.nodeLocation"), format!("{}, {}", location.x, location.y));
                }
                MovementSpec::ShortestPathMapBased { speed, pois } => {
                    t.set(format!("{p}.movementModel"), "ShortestPathMapBasedMovement");
                    t.set(format!("{p}.speed"), format!("{}, {}", speed.min, speed.max));
                    if let Some(poi) = pois {
                        t.set(format!("{p}.pois"), format!("{}, {}", poi.file_index, poi.prob));
                    }
                }
            }
            t.set(format!("{p}.bufferSize"), format_size(g.buffer_size));
            t.set(format!("{p}.nrofInterfaces"), g.interfaces.len().to_string());
            for (k, name) in g.interfaces.iter().enumerate() {
                t.set(format!("{p}.interface{}", k + 1), name);
            }
        }
        let gen = &self.generator;
        t.set("Events1.interval", format!("{}, {}", gen.interval_min, gen.interval_max));
        t.set("Events1.size", format_size(gen.size));
        t.set("Events1.sourceGroups", gen.source_groups.join(", "));
        t.set("Events1.destinationGroups", gen.destination_groups.join(", "));
        t.set("Events1.responseSize", format_size(gen.response_size));
        t.set("Events1.prefix", &gen.prefix);
        t.to_text()
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ScenarioError> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| invalid(key, value, "not a number"))?;
    if !v.is_finite() {
        return Err(invalid(key, value, "not finite"));
    }
    Ok(v)
}

fn parse_uint<T: FromStr>(key: &str, value: &str) -> Result<T, ScenarioError> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(key, value, "not a non-negative integer"))
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64), ScenarioError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(invalid(key, value, "expected two comma-separated numbers"));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

fn size_value(key: &str, value: &str) -> Result<u64, ScenarioError> {
    parse_size(value).map_err(|e| invalid(key, value, e.to_string()))
}

struct Lookup<'a> {
    table: &'a SettingsTable,
}

impl<'a> Lookup<'a> {
    fn required(&self, key: &str) -> Result<&'a str, ScenarioError> {
        self.table
            .get(key)
            .ok_or_else(|| ScenarioError::Missing(key.to_string()))
    }

    fn optional(&self, key: &str) -> Option<&'a str> {
        self.table.get(key)
    }

    /// `GroupN.field`, falling back to the shared `Group.field` default.
    fn group(&self, n: usize, field: &str) -> Option<(String, &'a str)> {
        let specific = format!("Group{n}.{field}");
        if let Some(v) = self.table.get(&specific) {
            return Some((specific, v));
        }
        let shared = format!("Group.{field}");
        self.table.get(&shared).map(|v| (shared, v))
    }

    fn group_required(&self, n: usize, field: &str) -> Result<(String, &'a str), ScenarioError> {
        self.group(n, field)
            .ok_or_else(|| ScenarioError::Missing(format!("Group{n}.{field}")))
    }
}

/// Group numbers that carry at least one `GroupN.` key, ascending.
fn discover_groups(table: &SettingsTable) -> BTreeSet<usize> {
    table
        .keys()
        .filter_map(|k| {
            let rest = k.strip_prefix("Group")?;
            let (num, _) = rest.split_once('.')?;
            num.parse::<usize>().ok()
        })
        .collect()
}

fn resolve_interface(lookup: &Lookup<'_>, key: &str, name: &str) -> Result<String, ScenarioError> {
    let mut current = name.to_string();
    let mut seen = BTreeSet::new();
    while let Some(target) = lookup.optional(&format!("{current}.aliasOf")) {
        if !seen.insert(current.clone()) {
            return Err(invalid(key, name, "interface alias cycle"));
        }
        current = target.trim().to_string();
    }
    if lookup.optional(&format!("{current}.type")).is_none()
        && lookup.optional(&format!("{current}.transmitRange")).is_none()
    {
        return Err(ScenarioError::UnknownInterface {
            key: key.to_string(),
            name: name.to_string(),
        });
    }
    Ok(current)
}

fn build_interface(lookup: &Lookup<'_>, name: &str) -> Result<InterfaceSpec, ScenarioError> {
    let type_key = format!("{name}.type");
    let kind = lookup.required(&type_key)?;
    if kind != SIMPLE_BROADCAST {
        return Err(ScenarioError::Unsupported {
            key: type_key,
            what: "interface type",
            value: kind.to_string(),
        });
    }
    let speed_key = format!("{name}.transmitSpeed");
    let transmit_speed = size_value(&speed_key, lookup.required(&speed_key)?)?;
    if transmit_speed == 0 {
        return Err(invalid(&speed_key, "0", "must be > 0"));
    }
    let range_key = format!("{name}.transmitRange");
    let range_raw = lookup.required(&range_key)?;
    let transmit_range = parse_f64(&range_key, range_raw)?;
    if transmit_range <= 0.0 {
        return Err(invalid(&range_key, range_raw, "must be > 0"));
    }
    Ok(InterfaceSpec {
        name: name.to_string(),
        transmit_range,
        transmit_speed,
    })
}

fn build_group(
    lookup: &Lookup<'_>,
    n: usize,
    interfaces: &mut BTreeMap<String, InterfaceSpec>,
    poi_paths: &BTreeMap<usize, PathBuf>,
) -> Result<GroupSpec, ScenarioError> {
    let (_, prefix) = lookup.group_required(n, "groupID")?;
    let (hosts_key, hosts_raw) = lookup.group_required(n, "nrofHosts")?;
    let nrof_hosts: usize = parse_uint(&hosts_key, hosts_raw)?;
    if nrof_hosts == 0 {
        return Err(invalid(&hosts_key, hosts_raw, "must be >= 1"));
    }

    let (model_key, model) = lookup.group_required(n, "movementModel")?;
    let movement = match model {
        "StationaryMovement" => {
            let (loc_key, loc_raw) = lookup.group_required(n, "nodeLocation")?;
            let (x, y) = parse_pair(&loc_key, loc_raw)?;
            MovementSpec::Stationary {
                location: Coord::new(x, y),
            }
        }
        "ShortestPathMapBasedMovement" => {
            let (speed_key, speed_raw) = lookup.group_required(n, "speed")?;
            let (min, max) = parse_pair(&speed_key, speed_raw)?;
            if min < 0.0 || min > max {
                return Err(invalid(&speed_key, speed_raw, "need 0 <= min <= max"));
            }
            let pois = match lookup.group(n, "pois") {
                None => None,
                Some((pois_key, pois_raw)) => {
                    let (idx, prob) = parse_pair(&pois_key, pois_raw)?;
                    if idx < 1.0 || idx.fract() != 0.0 {
                        return Err(invalid(&pois_key, pois_raw, "file index must be a positive integer"));
                    }
                    if !(0.0..=1.0).contains(&prob) {
                        return Err(invalid(&pois_key, pois_raw, "probability must be in [0, 1]"));
                    }
                    let file_index = idx as usize;
                    if prob > 0.0 && !poi_paths.contains_key(&file_index) {
                        return Err(invalid(
                            &pois_key,
                            pois_raw,
                            format!("PointsOfInterest.poiFile{file_index} is not declared"),
                        ));
                    }
                    Some(PoiChoice { file_index, prob })
                }
            };
            MovementSpec::ShortestPathMapBased {
                speed: SpeedRange { min, max },
                pois,
            }
        }
        other => {
            return Err(ScenarioError::Unsupported {
                key: model_key,
                what: "movement model",
                value: other.to_string(),
            })
        }
    };

    let (buf_key, buf_raw) = lookup.group_required(n, "bufferSize")?;
    let buffer_size = size_value(&buf_key, buf_raw)?;

    let nrof_ifaces = match lookup.group(n, "nrofInterfaces") {
        Some((k, v)) => parse_uint::<usize>(&k, v)?,
        None => 1,
    };
    if nrof_ifaces == 0 {
        return Err(invalid(&format!("Group{n}.nrofInterfaces"), "0", "must be >= 1"));
    }
    let mut names = Vec::with_capacity(nrof_ifaces);
    for k in 1..=nrof_ifaces {
        let (iface_key, raw) = lookup.group_required(n, &format!("interface{k}"))?;
        let canonical = resolve_interface(lookup, &iface_key, raw.trim())?;
        if !interfaces.contains_key(&canonical) {
            let spec = build_interface(lookup, &canonical)?;
            interfaces.insert(canonical.clone(), spec);
        }
        if !names.contains(&canonical) {
            names.push(canonical);
        }
    }

    Ok(GroupSpec {
        group_id_prefix: prefix.to_string(),
        nrof_hosts,
        movement,
        buffer_size,
        interfaces: names,
    })
}

fn build_generator(
    lookup: &Lookup<'_>,
    groups: &[GroupSpec],
) -> Result<MessageGeneratorSpec, ScenarioError> {
    let (interval_min, interval_max) = match lookup.optional("Events1.interval") {
        Some(v) => parse_pair("Events1.interval", v)?,
        None => DEFAULT_INTERVAL,
    };
    if interval_min <= 0.0 || interval_min > interval_max {
        return Err(invalid(
            "Events1.interval",
            &format!("{interval_min}, {interval_max}"),
            "need 0 < min <= max",
        ));
    }
    let size = match lookup.optional("Events1.size") {
        Some(v) => size_value("Events1.size", v)?,
        None => DEFAULT_MESSAGE_SIZE,
    };
    if size == 0 {
        return Err(invalid("Events1.size", "0", "must be > 0"));
    }
    let response_size = match lookup.optional("Events1.responseSize") {
        Some(v) => size_value("Events1.responseSize", v)?,
        None => 0,
    };
    let prefix = lookup.optional("Events1.prefix").unwrap_or("M").to_string();

    let known: BTreeSet<&str> = groups.iter().map(|g| g.group_id_prefix.as_str()).collect();
    let dedup = |v: Vec<String>| {
        let mut out: Vec<String> = Vec::new();
        for s in v {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    };
    let source_groups = dedup(match lookup.optional("Events1.sourceGroups") {
        Some(v) => parse_list(v),
        None => vec![groups[0].group_id_prefix.clone()],
    });
    let destination_groups = dedup(match lookup.optional("Events1.destinationGroups") {
        Some(v) => parse_list(v),
        None => known
            .iter()
            .filter(|p| p.starts_with("cg"))
            .map(|p| p.to_string())
            .collect(),
    });
    for (key, list) in [
        ("Events1.sourceGroups", &source_groups),
        ("Events1.destinationGroups", &destination_groups),
    ] {
        if list.is_empty() {
            return Err(invalid(key, "", "must name at least one group"));
        }
        if let Some(bad) = list.iter().find(|p| !known.contains(p.as_str())) {
            return Err(invalid(key, bad, "no group with this groupID"));
        }
    }
    if let Some(both) = source_groups.iter().find(|s| destination_groups.contains(s)) {
        return Err(invalid(
            "Events1.destinationGroups",
            both,
            "source and destination groups must be disjoint",
        ));
    }
    Ok(MessageGeneratorSpec {
        interval_min,
        interval_max,
        size,
        source_groups,
        destination_groups,
        response_size,
        prefix,
    })
}

/// Assembles and validates a scenario from a parsed settings table.
pub fn build_scenario(table: &SettingsTable) -> Result<Scenario, ScenarioError> {
    let lookup = Lookup { table };

    let name = lookup.optional("Scenario.name").unwrap_or("scenario").to_string();
    let end_raw = lookup.required("Scenario.endTime")?;
    let sim_time_end = parse_f64("Scenario.endTime", end_raw)?;
    if sim_time_end <= 0.0 {
        return Err(invalid("Scenario.endTime", end_raw, "must be > 0"));
    }
    let update_interval = match lookup.optional("Scenario.updateInterval") {
        Some(v) => {
            let dt = parse_f64("Scenario.updateInterval", v)?;
            if dt <= 0.0 {
                return Err(invalid("Scenario.updateInterval", v, "must be > 0"));
            }
            dt
        }
        None => DEFAULT_UPDATE_INTERVAL,
    };
    let rng_seed = match lookup.optional("MovementModel.rngSeed") {
        Some(v) => parse_uint("MovementModel.rngSeed", v)?,
        None => DEFAULT_RNG_SEED,
    };
    let router_raw = lookup.required("Group.router")?;
    let router: RouterKind = router_raw.parse().map_err(|_| ScenarioError::Unsupported {
        key: "Group.router".into(),
        what: "router",
        value: router_raw.to_string(),
    })?;
    let maxprop_hop_threshold = match lookup.optional("MaxPropRouter.hopThreshold") {
        Some(v) => parse_uint("MaxPropRouter.hopThreshold", v)?,
        None => DEFAULT_HOP_THRESHOLD,
    };

    let nrof_maps = match lookup.optional("MapBasedMovement.nrofMapFiles") {
        Some(v) => parse_uint::<usize>("MapBasedMovement.nrofMapFiles", v)?,
        None => usize::from(lookup.optional("MapBasedMovement.mapFile1").is_some()),
    };
    let mut map_paths = Vec::with_capacity(nrof_maps);
    for i in 1..=nrof_maps {
        map_paths.push(PathBuf::from(
            lookup.required(&format!("MapBasedMovement.mapFile{i}"))?,
        ));
    }

    let mut poi_paths = BTreeMap::new();
    for (key, value) in table.iter() {
        if let Some(idx) = key.strip_prefix("PointsOfInterest.poiFile") {
            let idx: usize = parse_uint(key, idx)?;
            poi_paths.insert(idx, PathBuf::from(value));
        }
    }

    let group_numbers: Vec<usize> = match lookup.optional("Scenario.nrofHostGroups") {
        Some(v) => (1..=parse_uint::<usize>("Scenario.nrofHostGroups", v)?).collect(),
        None => discover_groups(table).into_iter().collect(),
    };
    if group_numbers.is_empty() {
        return Err(ScenarioError::NoGroups);
    }
    let mut interfaces = BTreeMap::new();
    let mut groups = Vec::with_capacity(group_numbers.len());
    for n in group_numbers {
        groups.push(build_group(&lookup, n, &mut interfaces, &poi_paths)?);
    }
    if map_paths.is_empty() && groups.iter().any(|g| g.movement.is_map_based()) {
        return Err(ScenarioError::Missing("MapBasedMovement.mapFile1".into()));
    }

    let generator = build_generator(&lookup, &groups)?;

    Ok(Scenario {
        name,
        sim_time_end,
        update_interval,
        rng_seed,
        router,
        maxprop_hop_threshold,
        map_paths,
        poi_paths,
        interfaces,
        groups,
        generator,
        distance_scale: DISTANCE_SCALE,
        time_scale: TIME_SCALE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::parse_settings;

    const COMMON: &str = "
Scenario.endTime = 5760
Group.router = MaxPropRouter
debrisInterface.type = SimpleBroadcastInterface
debrisInterface.transmitSpeed = 100M
debrisInterface.transmitRange = 800
VHFInterface.type = SimpleBroadcastInterface
VHFInterface.transmitSpeed = 100M
VHFInterface.transmitRange = 300
shipInterface.aliasOf = VHFInterface
";

    const PCD: &str = "
Group1.groupID = Plane_Crash_Debris
Group1.nrofHosts = 5
Group1.movementModel = StationaryMovement
#Group1.movementModel = RandomWaypoint
#Group1.host1.initialPosition = (79500, 53000)
Group1.nodeLocation = 79500, 53000
Group1.bufferSize = 30M
Group1.nrofInterfaces = 1
Group1.interface1 = debrisInterface
";

    const GUARDS: &str = "
Group2.groupID = cgaf
Group2.nrofHosts = 7
Group2.movementModel = ShortestPathMapBasedMovement
Group2.speed = 6, 8
Group2.bufferSize = 30M
Group2.nrofInterfaces = 1
Group2.interface1 = shipInterface
Group2.pois = 4, 1
PointsOfInterest.poiFile4 = data/coastalGuardAfricaPOIs.wkt
MapBasedMovement.mapFile1 = data/custom_map.wkt
";

    fn build(text: &str) -> Result<Scenario, ScenarioError> {
        build_scenario(&parse_settings(text).unwrap())
    }

    #[test]
    fn debris_fragment() {
        let s = build(&format!("{COMMON}{PCD}{GUARDS}")).unwrap();
        let g = &s.groups[0];
        assert_eq!(g.group_id_prefix, "Plane_Crash_Debris");
        assert_eq!(g.nrof_hosts, 5);
        assert_eq!(
            g.movement,
            MovementSpec::Stationary {
                location: Coord::new(79500.0, 53000.0)
            }
        );
        assert_eq!(g.buffer_size, 30_000_000);
        assert_eq!(g.interfaces, vec!["debrisInterface".to_string()]);
        assert_eq!(s.update_interval, 1.0);
        assert_eq!(s.rng_seed, 1);
        assert_eq!(s.total_hosts(), 12);
    }

    #[test]
    fn alias_resolves_to_vhf() {
        let s = build(&format!("{COMMON}{PCD}{GUARDS}")).unwrap();
        assert_eq!(s.groups[1].interfaces, vec!["VHFInterface".to_string()]);
        assert_eq!(s.interface("VHFInterface").unwrap().transmit_range, 300.0);
        assert_eq!(s.interface("VHFInterface").unwrap().transmit_speed, 100_000_000);
        assert!(s.interface("shipInterface").is_none());
    }

    #[test]
    fn generator_defaults() {
        let s = build(&format!("{COMMON}{PCD}{GUARDS}")).unwrap();
        let g = &s.generator;
        assert_eq!((g.interval_min, g.interval_max), (25.0, 35.0));
        assert_eq!(g.size, 500_000);
        assert_eq!(g.source_groups, vec!["Plane_Crash_Debris".to_string()]);
        assert_eq!(g.destination_groups, vec!["cgaf".to_string()]);
        assert_eq!(g.response_size, 0);
    }

    #[test]
    fn dangling_interface_is_error() {
        let text = format!("{COMMON}{PCD}").replace("= debrisInterface", "= ghostInterface");
        let err = build(&text).unwrap_err();
        assert_eq!(
            err,
            ScenarioError::UnknownInterface {
                key: "Group1.interface1".into(),
                name: "ghostInterface".into()
            }
        );
    }

    #[test]
    fn missing_movement_model_names_key() {
        let text = format!("{COMMON}{PCD}").replace("Group1.movementModel = StationaryMovement", "");
        assert_eq!(
            build(&text).unwrap_err(),
            ScenarioError::Missing("Group1.movementModel".into())
        );
    }

    #[test]
    fn random_waypoint_is_unsupported() {
        let text = format!("{COMMON}{PCD}").replace("= StationaryMovement", "= RandomWaypoint");
        let err = build(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::Unsupported { what: "movement model", .. }));
    }

    #[test]
    fn unparsable_number_names_key() {
        let text = format!("{COMMON}{PCD}").replace("nrofHosts = 5", "nrofHosts = five");
        match build(&text).unwrap_err() {
            ScenarioError::Invalid { key, .. } => assert_eq!(key, "Group1.nrofHosts"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stationary_needs_location() {
        let text = format!("{COMMON}{PCD}").replace("Group1.nodeLocation = 79500, 53000", "");
        assert_eq!(
            build(&text).unwrap_err(),
            ScenarioError::Missing("Group1.nodeLocation".into())
        );
    }

    #[test]
    fn speed_and_poi_validation() {
        let bad_speed = format!("{COMMON}{PCD}{GUARDS}").replace("speed = 6, 8", "speed = 8, 6");
        assert!(matches!(build(&bad_speed), Err(ScenarioError::Invalid { .. })));
        let bad_prob = format!("{COMMON}{PCD}{GUARDS}").replace("pois = 4, 1", "pois = 4, 1.5");
        assert!(matches!(build(&bad_prob), Err(ScenarioError::Invalid { .. })));
        let undeclared = format!("{COMMON}{PCD}{GUARDS}").replace("pois = 4, 1", "pois = 9, 0.5");
        assert!(matches!(build(&undeclared), Err(ScenarioError::Invalid { .. })));
        let no_map = format!("{COMMON}{PCD}{GUARDS}")
            .replace("MapBasedMovement.mapFile1 = data/custom_map.wkt", "");
        assert_eq!(
            build(&no_map).unwrap_err(),
            ScenarioError::Missing("MapBasedMovement.mapFile1".into())
        );
    }

    #[test]
    fn generator_groups_must_be_disjoint_and_known() {
        let base = format!("{COMMON}{PCD}{GUARDS}");
        let overlap = format!("{base}Events1.sourceGroups = cgaf\n");
        assert!(build(&overlap).is_err());
        let unknown = format!("{base}Events1.destinationGroups = nope\n");
        assert!(build(&unknown).is_err());
        let only_pcd = format!("{COMMON}{PCD}");
        // no cg* group to default destinations to
        assert!(build(&only_pcd).is_err());
    }

    #[test]
    fn shared_group_defaults_apply() {
        let text = format!("{COMMON}{PCD}{GUARDS}")
            .replace("Group1.bufferSize = 30M", "")
            .replace("Group2.bufferSize = 30M", "")
            + "Group.bufferSize = 2M\n";
        let s = build(&text).unwrap();
        assert!(s.groups.iter().all(|g| g.buffer_size == 2_000_000));
    }

    #[test]
    fn round_trip_through_text() {
        let s = build(&format!("{COMMON}{PCD}{GUARDS}Events1.interval = 20.5, 40\n")).unwrap();
        let again = build(&s.to_settings_text()).unwrap();
        assert_eq!(s, again);
    }
}
