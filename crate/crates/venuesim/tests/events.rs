//! Builtin event scripts and the forced-track executor.

use venuesim::config::{default_tree, FAILED_SIDS, LATE_STAFF_PIDS};
use venuesim::error::Window;
use venuesim::events::executor::{build_plan, run_events};
use venuesim::events::script::{ActorSel, Directive, EventScript, Place};
use venuesim::model::CellRef;
use venuesim::profile::{init_profile, EventSelection, GenOptions};
use venuesim::routing::GridGraph;
use venuesim::timebase::at;

fn setup(scale: f64, events: EventSelection) -> (venuesim::profile::Profile, venuesim::model::VenueMap, GridGraph) {
    let tree = default_tree();
    let opts = GenOptions {
        scale,
        events,
        ..GenOptions::default()
    };
    let profile = init_profile(&tree, &opts).unwrap();
    let map = profile.build_map().unwrap();
    let graph = GridGraph::build(&map);
    (profile, map, graph)
}

#[test]
fn builtin_set_matches_the_storylines() {
    let tree = default_tree();
    assert_eq!(tree.scripts.len(), 12);

    let e3 = tree.script("E3").unwrap();
    let masks = e3.sensor_failures();
    assert_eq!(masks.len(), 1);
    let (sids, window) = &masks[0];
    assert_eq!(sids.len(), 8);
    assert_eq!(sids.as_slice(), FAILED_SIDS.as_slice());
    assert_eq!(*window, Window::new(at(2, 13, 33, 21), at(2, 13, 56, 15)));

    let e11 = tree.script("E11").unwrap();
    let mut pids = match &e11.directives[0] {
        Directive::ShiftEntry { pids, offsets_s, .. } => {
            assert_eq!(pids.len(), offsets_s.len());
            assert!(offsets_s.iter().all(|o| *o >= 3600));
            pids.clone()
        }
        other => panic!("unexpected E11 directive {other:?}"),
    };
    pids.sort_unstable();
    let mut expect = LATE_STAFF_PIDS.to_vec();
    expect.sort_unstable();
    assert_eq!(pids, expect);

    // The two lunch turns cover adjacent half-hours without overlapping.
    let e12 = tree.script("E12").unwrap();
    let windows: Vec<Window> = e12
        .directives
        .iter()
        .map(|d| match d {
            Directive::ForcePresence { window, .. } => *window,
            other => panic!("unexpected E12 directive {other:?}"),
        })
        .collect();
    assert_eq!(windows.len(), 2);
    assert!(windows[0].end <= windows[1].start, "turns overlap");
    assert!(
        windows[1].start - windows[0].end <= 60,
        "turns are not contiguous at minute granularity"
    );
}

#[test]
fn empty_script_list_produces_nothing() {
    let (profile, map, graph) = setup(0.01, EventSelection::None);
    let plan = build_plan(&profile, &map, &graph, &[]).unwrap();
    assert!(plan.meta.is_empty());
    assert!(plan.sensor_masks.is_empty());
    let out = run_events(&profile, &map, &graph, &plan).unwrap();
    assert!(out.records.is_empty());
    assert!(out.overlay.is_empty());
    assert!(out.claims.is_empty());
}

#[test]
fn intrusion_track_stays_in_the_lounge_window() {
    let (profile, map, graph) = setup(1.0, EventSelection::All);
    let tree = default_tree();
    let scripts = vec![tree.script("E4").unwrap()];
    let plan = build_plan(&profile, &map, &graph, &scripts).unwrap();
    let out = run_events(&profile, &map, &graph, &plan).unwrap();

    let lounge = map.zone_id("vip_lounge").unwrap();
    let w = Window::new(at(1, 9, 0, 0), at(1, 9, 20, 0));
    let in_lounge: Vec<_> = out
        .records
        .iter()
        .filter(|r| r.pid == 11201 && map.zone_of(r.cell()) == Some(lounge))
        .collect();
    assert!(!in_lounge.is_empty());
    assert!(in_lounge.iter().all(|r| w.contains(r.t)));
    // Arrival lands exactly on the window start.
    assert_eq!(in_lounge.first().unwrap().t, w.start);
}

#[test]
fn pinned_badge_emits_no_movement_inside_its_window() {
    let (profile, map, graph) = setup(1.0, EventSelection::All);
    let tree = default_tree();
    let scripts = vec![tree.script("E9").unwrap()];
    let plan = build_plan(&profile, &map, &graph, &scripts).unwrap();
    let out = run_events(&profile, &map, &graph, &plan).unwrap();

    let podium = CellRef::new(2, 25, 15);
    let w = Window::new(at(2, 9, 4, 0), at(2, 17, 30, 0));
    let inside: Vec<_> = out
        .records
        .iter()
        .filter(|r| r.pid == 19929 && w.contains(r.t) && r.t > w.start && r.t < w.end)
        .collect();
    assert!(inside.is_empty(), "badge moved during the pin: {inside:?}");
    assert!(out
        .records
        .iter()
        .any(|r| r.pid == 19929 && r.t == w.start && r.cell() == podium));
    // The day is fully claimed.
    let claim = out.claims.iter().find(|c| c.pid == 19929).unwrap();
    assert_eq!(claim.window, profile.opening_hours.window(2).unwrap());
}

#[test]
fn ghost_track_is_overlay_not_replacement() {
    let (profile, map, graph) = setup(1.0, EventSelection::All);
    let tree = default_tree();
    let scripts = vec![tree.script("E1").unwrap()];
    let plan = build_plan(&profile, &map, &graph, &scripts).unwrap();
    assert_eq!(plan.ghost_windows.len(), 1);
    assert_eq!(plan.ghost_windows[0].0, 16632);
    let out = run_events(&profile, &map, &graph, &plan).unwrap();
    assert!(out.overlay.iter().all(|r| r.pid == 16632));
    assert!(!out.overlay.is_empty());
    // The replacement claim covers only the real guest's forced stay.
    assert_eq!(out.claims.len(), 1);
    assert_eq!(out.claims[0].pid, 16632);
}

#[test]
fn unknown_references_fail_validation() {
    let (profile, map, graph) = setup(0.01, EventSelection::None);
    let bogus_zone = EventScript {
        version: 1,
        id: "X1".into(),
        name: "bad zone".into(),
        narrative: String::new(),
        patches: vec![],
        directives: vec![Directive::ForcePresence {
            actor: ActorSel::Pid(16632),
            place: Place::Zone("atrium".into()),
            window: Window::new(at(1, 9, 0, 0), at(1, 9, 10, 0)),
            fidget_s: None,
            entry: Default::default(),
            exit: Default::default(),
            claim: Default::default(),
        }],
    };
    assert!(build_plan(&profile, &map, &graph, &[&bogus_zone]).is_err());

    let bogus_pid = EventScript {
        version: 1,
        id: "X2".into(),
        name: "bad pid".into(),
        narrative: String::new(),
        patches: vec![],
        directives: vec![Directive::ForcePresence {
            actor: ActorSel::Pid(4242),
            place: Place::Zone("vip_lounge".into()),
            window: Window::new(at(1, 9, 0, 0), at(1, 9, 10, 0)),
            fidget_s: None,
            entry: Default::default(),
            exit: Default::default(),
            claim: Default::default(),
        }],
    };
    assert!(build_plan(&profile, &map, &graph, &[&bogus_pid]).is_err());
}

#[test]
fn scripted_pids_remap_at_reduced_scale() {
    // At 1% scale most named actors are absent; they must resolve onto
    // same-type members and be reported.
    let (profile, map, graph) = setup(0.01, EventSelection::All);
    let tree = default_tree();
    let scripts: Vec<_> = tree.scripts.iter().collect();
    let plan = build_plan(&profile, &map, &graph, &scripts).unwrap();
    assert!(!plan.remaps.is_empty());
    for (scripted, actual) in &plan.remaps {
        assert!(profile.person_index(*actual).is_some());
        let role = profile
            .pid_roles
            .iter()
            .find(|(p, _)| p == scripted)
            .map(|(_, r)| *r)
            .unwrap();
        let actual_role = profile.roster[profile.person_index(*actual).unwrap()].ptype;
        assert_eq!(role, actual_role, "remap must preserve the role");
    }
}
