//! Fusion behavior: claim replacement, joint stitching, overlay merging.

use venuesim::config::{build_map, default_map_file, default_tree};
use venuesim::error::Window;
use venuesim::events::executor::Claim;
use venuesim::model::{CellRef, VenueMap};
use venuesim::pipeline::{dedup, fuse};
use venuesim::profile::{init_profile, EventSelection, GenOptions, Profile};
use venuesim::record::TrajectoryRecord;
use venuesim::routing::GridGraph;
use venuesim::timebase::day_of;

fn tiny_profile() -> (Profile, VenueMap, GridGraph) {
    let tree = default_tree();
    let opts = GenOptions {
        scale: 0.01,
        events: EventSelection::None,
        ..GenOptions::default()
    };
    let profile = init_profile(&tree, &opts).unwrap();
    let map = build_map(&default_map_file()).unwrap();
    let graph = GridGraph::build(&map);
    (profile, map, graph)
}

fn rec(t: i64, pid: u32, x: u8, y: u8) -> TrajectoryRecord {
    TrajectoryRecord::new(t, pid, CellRef::new(1, x, y))
}

/// A short walk along the corridor spine, 8 s per hop.
fn corridor_walk(pid: u32, start_t: i64, xs: std::ops::RangeInclusive<u8>) -> Vec<TrajectoryRecord> {
    xs.enumerate()
        .map(|(i, x)| rec(start_t + 8 * i as i64, pid, x, 7))
        .collect()
}

#[test]
fn disjoint_pids_concatenate() {
    let (profile, map, graph) = tiny_profile();
    let pid_a = profile.roster[0].pid;
    let pid_b = profile.roster[1].pid;
    let bg = corridor_walk(pid_a, 30_000, 5..=10);
    let ab = corridor_walk(pid_b, 31_000, 12..=15);
    let claims = vec![Claim {
        pid: pid_b,
        window: Window::new(31_000, 31_100),
        depart_t: 31_024,
    }];
    let fused = fuse(bg.clone(), &ab, &[], &claims, &profile, &map, &graph).unwrap();
    for r in bg.iter().chain(ab.iter()) {
        assert!(fused.contains(r));
    }
    // The unclaimed pid passes through untouched.
    assert_eq!(
        fused.iter().filter(|r| r.pid == pid_a).count(),
        bg.len(),
        "background-only pid must be unchanged"
    );
    // The scripted pid had no background that day, so fusion synthesizes its
    // venue entry: its first record sits on an entrance cell.
    let first_b = fused.iter().find(|r| r.pid == pid_b).unwrap();
    assert!(map
        .entrances_for(profile.roster[profile.person_index(pid_b).unwrap()].ptype)
        .contains(&first_b.cell()));
    // Globally sorted.
    for w in fused.windows(2) {
        assert!(w[0].sort_key() <= w[1].sort_key());
    }
}

#[test]
fn claimed_window_drops_background_and_keeps_abnormal_bytes() {
    let (profile, map, graph) = tiny_profile();
    let pid = profile.roster[0].pid;
    // Background walks through the spine twice; the claim covers the middle.
    let mut bg = corridor_walk(pid, 30_000, 3..=20);
    bg.extend(corridor_walk(pid, 31_000, 20..=20));
    let ab = vec![rec(30_060, pid, 10, 7), rec(30_090, pid, 11, 7)];
    let claims = vec![Claim {
        pid,
        window: Window::new(30_050, 30_110),
        depart_t: 30_090,
    }];
    let fused = fuse(bg.clone(), &ab, &[], &claims, &profile, &map, &graph).unwrap();
    for r in &bg {
        if (30_050..=30_110).contains(&r.t) {
            assert!(!fused.contains(r), "claimed background record survived: {r:?}");
        }
    }
    for r in &ab {
        assert!(fused.contains(r), "abnormal record lost: {r:?}");
    }
}

#[test]
fn joints_are_bridged_to_continuity() {
    let (profile, map, graph) = tiny_profile();
    let pid = profile.roster[0].pid;
    // Background sits far left on the spine, before and after the claim.
    let bg = vec![rec(30_000, pid, 2, 7), rec(32_000, pid, 2, 8)];
    // The scripted presence happens far right.
    let ab = vec![rec(30_500, pid, 25, 7), rec(30_700, pid, 25, 8)];
    let claims = vec![Claim {
        pid,
        window: Window::new(30_450, 30_800),
        depart_t: 30_800,
    }];
    let fused = fuse(bg, &ab, &[], &claims, &profile, &map, &graph).unwrap();
    let fused = dedup(fused);
    let mine: Vec<&TrajectoryRecord> = fused.iter().filter(|r| r.pid == pid).collect();
    for w in mine.windows(2) {
        if day_of(w[0].t) != day_of(w[1].t) {
            continue;
        }
        let a = w[0].cell().index() as u16;
        let b = w[1].cell().index() as u16;
        assert!(
            graph.adjacent(a, b),
            "continuity broken: {} -> {}",
            w[0].cell(),
            w[1].cell()
        );
        assert!(
            w[1].t - w[0].t >= map.min_dwell(w[0].cell()),
            "dwell violated between {} and {}",
            w[0].t,
            w[1].t
        );
    }
    // The scripted records survive and the walk reaches them on time.
    assert!(mine.iter().any(|r| r.t == 30_500 && r.cell() == CellRef::new(1, 25, 7)));
}

#[test]
fn overlay_tracks_merge_additively() {
    let (profile, map, graph) = tiny_profile();
    let pid = profile.roster[0].pid;
    let bg = corridor_walk(pid, 30_000, 3..=12);
    let ghost = corridor_walk(pid, 30_010, 20..=24);
    let fused = fuse(bg.clone(), &[], &ghost, &[], &profile, &map, &graph).unwrap();
    for r in bg.iter().chain(ghost.iter()) {
        assert!(fused.contains(r));
    }
    assert_eq!(fused.len(), bg.len() + ghost.len());
}

#[test]
fn unstitchable_joint_is_a_hard_error() {
    let (profile, map, graph) = tiny_profile();
    let pid = profile.roster[0].pid;
    // Scripted presence seconds after opening, deep inside the venue: not
    // even a synthesized entrance walk can arrive in time.
    let ab = vec![rec(27_005, pid, 25, 7)];
    let claims = vec![Claim {
        pid,
        window: Window::new(27_005, 27_050),
        depart_t: 27_050,
    }];
    let err = fuse(vec![], &ab, &[], &claims, &profile, &map, &graph);
    match err {
        Err(venuesim::SimError::UnstitchableJoint { pid: p, .. }) => assert_eq!(p, pid),
        other => panic!("expected unstitchable joint, got {other:?}"),
    }
}
