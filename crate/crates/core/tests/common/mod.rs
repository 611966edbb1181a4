#![allow(dead_code)]

pub mod oracles;

use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

pub fn assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

pub const GRID_MAP: &str = "\
LINESTRING (0 0, 1000 0, 2000 0, 2000 1000, 2000 2000, 1000 2000, 0 2000, 0 1000, 0 0)
LINESTRING (1000 0, 1000 1000, 1000 2000)
LINESTRING (0 1000, 1000 1000, 2000 1000)
";

/// A small closed world: two stationary sources in a corner, roaming
/// relays and two roaming destinations on a 3x3 grid.
pub fn small_world(router: &str, buffer: &str, end: u32) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("grid.wkt"), GRID_MAP).unwrap();
    let text = format!(
        "\
Scenario.name = grid
Scenario.endTime = {end}
Scenario.updateInterval = 1.0
Scenario.nrofHostGroups = 3
radio.type = SimpleBroadcastInterface
radio.transmitSpeed = 250k
radio.transmitRange = 150
Group.router = {router}
Group.bufferSize = {buffer}
Group.nrofInterfaces = 1
Group.interface1 = radio
Events1.class = MessageEventGenerator
Events1.interval = 4,8
Events1.size = 400k
Events1.sourceGroups = src
Events1.destinationGroups = dst
Events1.prefix = M
MovementModel.rngSeed = 1
MapBasedMovement.nrofMapFiles = 1
MapBasedMovement.mapFile1 = grid.wkt
Group1.groupID = src
Group1.nrofHosts = 2
Group1.movementModel = StationaryMovement
Group1.nodeLocation = 50, 50
Group2.groupID = r
Group2.nrofHosts = 10
Group2.movementModel = ShortestPathMapBasedMovement
Group2.speed = 5,15
Group3.groupID = dst
Group3.nrofHosts = 2
Group3.movementModel = ShortestPathMapBasedMovement
Group3.speed = 2,4
"
    );
    let path = dir.path().join("grid.settings");
    fs::write(&path, text).unwrap();
    (dir, path)
}
