use std::path::Path;

use oppnet::settings::{build_scenario, parse_settings, MovementSpec, Scenario};
use proptest::prelude::*;

fn bundled(name: &str) -> Scenario {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets").join(name);
    let text = std::fs::read_to_string(&p).unwrap();
    build_scenario(&parse_settings(&text).unwrap()).unwrap()
}

#[test]
fn baseline_group_table() {
    let s = bundled("scenario_a.settings");
    assert_eq!(s.total_hosts(), 5 + 170 + 32 + 20);
    assert_eq!(s.interface("debrisInterface").unwrap().transmit_range, 800.0);
    let vhf = s.interface("VHFInterface").unwrap();
    assert_eq!(vhf.transmit_range, 300.0);
    assert_eq!(vhf.transmit_speed, 100_000_000);
    for g in &s.groups {
        assert_eq!(g.buffer_size, 30_000_000, "{}", g.group_id_prefix);
        let expect_iface = if g.group_id_prefix == "pcd" { "debrisInterface" } else { "VHFInterface" };
        assert_eq!(g.interfaces, vec![expect_iface.to_string()], "{}", g.group_id_prefix);
        if let MovementSpec::ShortestPathMapBased { speed, .. } = &g.movement {
            let want = if g.group_id_prefix.starts_with("cg") { (6.0, 8.0) } else { (3.0, 5.0) };
            assert_eq!((speed.min, speed.max), want, "{}", g.group_id_prefix);
        }
    }
    assert_eq!(s.sim_time_end, 5760.0);
}

#[test]
fn bundled_scenarios_round_trip() {
    for name in ["scenario_a.settings", "scenario_b.settings"] {
        let s = bundled(name);
        let again = build_scenario(&parse_settings(&s.to_settings_text()).unwrap()).unwrap();
        assert_eq!(again, s, "{name}");
    }
}

proptest! {
    #[test]
    fn comments_and_blanks_yield_nothing(lines in proptest::collection::vec("[ \t]*(#[^\n]*)?", 0..30)) {
        prop_assert!(parse_settings(&lines.join("\n")).unwrap().is_empty());
    }

    #[test]
    fn later_duplicate_wins(a in "[0-9]{1,6}", b in "[0-9]{1,6}") {
        let t = parse_settings(&format!("Scenario.endTime = {a}\nScenario.endTime = {b}\n")).unwrap();
        prop_assert_eq!(t.get("Scenario.endTime"), Some(b.as_str()));
        prop_assert_eq!(t.warnings().len(), 1);
    }
}
