//! Forced-track executor: turns enabled event scripts into an abnormal record
//! stream, background-behavior modifiers, fusion claims and ground-truth
//! metadata.
//!
//! Scripted movement ignores congestion but honors physics: forced walks use
//! the uncongested per-cell dwell, so merged datasets pass the continuity and
//! dwell checks. Timing is anchor-exact: presence legs begin with a cell
//! entry at exactly the window start, and anchored walks hit their anchor
//! cell at the requested second.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Result, SimError, Window};
use crate::model::{CellRef, PersonType, VenueMap};
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::routing::{hallway_route, mask_with_zones, GridGraph, Mask, NodeId};
use crate::rng::SimRng;
use crate::sim::{ForcedExit, SimModifiers};
use crate::timebase::day_of;

use super::script::{ActorSel, ClaimSpec, Directive, EventScript, JointMode, Place};

/// A background window claimed by a forced track; fusion drops background
/// records of `pid` inside it and stitches the joints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub pid: u32,
    pub window: Window,
    /// When the forced behavior logically ends; post-joint bridges leave then.
    pub depart_t: i64,
}

/// Everything the generator needs from the enabled scripts.
#[derive(Debug, Default)]
pub struct EventPlan {
    pub modifiers: SimModifiers,
    pub sensor_masks: Vec<(Vec<u32>, Window)>,
    /// Duplicate-badge pids and their overlay windows (physical-continuity waivers).
    pub ghost_windows: Vec<(u32, Window)>,
    pub meta: Vec<EventMeta>,
    /// Scripted pids that had to be remapped at this scale: (scripted, actual).
    pub remaps: Vec<(u32, u32)>,
    tracks: Vec<PlannedTrack>,
    walks: Vec<PlannedWalk>,
    tours: Vec<PlannedTour>,
}

/// Ground-truth bookkeeping per event.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EventMeta {
    pub id: String,
    pub name: String,
    pub narrative: String,
    pub actors: Vec<u32>,
    pub windows: Vec<Window>,
    pub zones: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sids: Vec<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
struct Leg {
    cell: NodeId,
    window: Window,
    fidget_s: Option<(i64, i64)>,
}

#[derive(Debug, Clone)]
struct PlannedTrack {
    event: String,
    pid: u32,
    ghost: bool,
    ptype: PersonType,
    entry: JointMode,
    exit: JointMode,
    claim: ClaimSpec,
    legs: Vec<Leg>,
}

#[derive(Debug, Clone)]
struct PlannedWalk {
    pid: u32,
    cells: Vec<NodeId>,
    entries: Vec<i64>,
}

#[derive(Debug, Clone)]
struct PlannedTour {
    members: Vec<u32>,
    route: Vec<NodeId>,
    start: i64,
    stagger_s: f64,
    pace_s: i64,
}

pub struct EventOutput {
    /// Forced records that replace background in their claim windows.
    pub records: Vec<TrajectoryRecord>,
    /// Duplicate-badge tracks, merged additively with the background.
    pub overlay: Vec<TrajectoryRecord>,
    pub claims: Vec<Claim>,
}

/// Per-member spread of cohort arrivals and departures, in seconds.
const COHORT_FAN_S: i64 = 30;

fn node(cell: (u8, u8, u8)) -> NodeId {
    CellRef::new(cell.0, cell.1, cell.2).index() as NodeId
}

fn script_err(script: &str, msg: String) -> SimError {
    SimError::ScriptValidation {
        script: script.to_string(),
        problems: vec![msg],
    }
}

/// Resolve selectors, validate against the profile and map, and precompute
/// all deterministic choices (cells, timings, cohorts).
pub fn build_plan(
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    scripts: &[&EventScript],
) -> Result<EventPlan> {
    let mut plan = EventPlan::default();
    let mut eliminated_so_far: HashSet<u32> = HashSet::new();

    let mut ordered: Vec<&EventScript> = scripts.to_vec();
    ordered.sort_by_key(|s| event_number(&s.id));

    // Directives aimed at days outside this run are inert.
    let simulated = |t: i64| profile.days.contains(&day_of(t));

    for script in ordered {
        let mut meta = EventMeta {
            id: script.id.clone(),
            name: script.name.clone(),
            narrative: script.narrative.clone(),
            actors: Vec::new(),
            windows: Vec::new(),
            zones: Vec::new(),
            sids: Vec::new(),
            details: BTreeMap::new(),
        };
        // Per-actor presence timelines assemble into tracks.
        type LegRow = (Leg, JointMode, JointMode, ClaimSpec);
        let mut timelines: BTreeMap<(u32, bool), Vec<LegRow>> = BTreeMap::new();

        for directive in &script.directives {
            match directive {
                Directive::ForcePresence {
                    actor,
                    place,
                    window,
                    fidget_s,
                    entry,
                    exit,
                    claim,
                } => {
                    if !simulated(window.start) {
                        continue;
                    }
                    let cohort = matches!(actor, ActorSel::RoleSlice { .. });
                    for (k, (pid, ghost)) in
                        resolve_actor(profile, actor, &mut plan.remaps, &script.id)?
                            .into_iter()
                            .enumerate()
                    {
                        let cell = place_cell(profile, map, place, &script.id, pid, k, cohort)?;
                        let zone_name = zone_name_of(map, cell);
                        if !meta.zones.contains(&zone_name) {
                            meta.zones.push(zone_name);
                        }
                        // Cohort members fan in before the window and out
                        // after it, so forced crowds do not move as a convoy.
                        let fan = if cohort { (k as i64) % COHORT_FAN_S } else { 0 };
                        let member_window = Window::new(window.start - fan, window.end + fan);
                        timelines.entry((pid, ghost)).or_default().push((
                            Leg {
                                cell,
                                window: member_window,
                                fidget_s: *fidget_s,
                            },
                            *entry,
                            *exit,
                            *claim,
                        ));
                        if !meta.actors.contains(&pid) {
                            meta.actors.push(pid);
                        }
                    }
                    push_window(&mut meta.windows, *window);
                }
                Directive::ForceStatus {
                    actor,
                    cell,
                    window,
                    entry,
                    exit,
                    claim,
                } => {
                    if !simulated(window.start) {
                        continue;
                    }
                    for (pid, ghost) in
                        resolve_actor(profile, actor, &mut plan.remaps, &script.id)?
                    {
                        timelines.entry((pid, ghost)).or_default().push((
                            Leg {
                                cell: node(*cell),
                                window: *window,
                                fidget_s: None,
                            },
                            *entry,
                            *exit,
                            *claim,
                        ));
                        if !meta.actors.contains(&pid) {
                            meta.actors.push(pid);
                        }
                    }
                    push_window(&mut meta.windows, *window);
                }
                Directive::PinBadge {
                    pid,
                    cell,
                    window,
                    entry,
                    exit,
                    claim,
                } => {
                    if !simulated(window.start) {
                        continue;
                    }
                    let pid = resolve_single(profile, *pid, &mut plan.remaps, &script.id)?;
                    timelines.entry((pid, false)).or_default().push((
                        Leg {
                            cell: node(*cell),
                            window: *window,
                            fidget_s: None,
                        },
                        *entry,
                        *exit,
                        *claim,
                    ));
                    meta.actors.push(pid);
                    push_window(&mut meta.windows, *window);
                    let zone_name = zone_name_of(map, node(*cell));
                    if !meta.zones.contains(&zone_name) {
                        meta.zones.push(zone_name);
                    }
                }
                Directive::ForceRoute {
                    actor,
                    cells,
                    anchor_index,
                    anchor_t,
                    ..
                } => {
                    if !simulated(*anchor_t) {
                        continue;
                    }
                    for (pid, _) in resolve_actor(profile, actor, &mut plan.remaps, &script.id)? {
                        let nodes: Vec<NodeId> = cells.iter().map(|c| node(*c)).collect();
                        for w in nodes.windows(2) {
                            if !graph.adjacent(w[0], w[1]) {
                                return Err(script_err(
                                    &script.id,
                                    format!(
                                        "forced route breaks adjacency at {} -> {}",
                                        CellRef::from_index(w[0] as usize),
                                        CellRef::from_index(w[1] as usize)
                                    ),
                                ));
                            }
                        }
                        let entries = anchored_entries(map, &nodes, *anchor_index, *anchor_t);
                        push_window(
                            &mut meta.windows,
                            Window::new(entries[0], *entries.last().unwrap()),
                        );
                        if !meta.actors.contains(&pid) {
                            meta.actors.push(pid);
                        }
                        plan.walks.push(PlannedWalk {
                            pid,
                            cells: nodes,
                            entries,
                        });
                    }
                }
                Directive::SuppressSensors { sids, window } => {
                    if !simulated(window.start) {
                        continue;
                    }
                    plan.sensor_masks.push((sids.clone(), *window));
                    meta.sids = sids.clone();
                    push_window(&mut meta.windows, *window);
                }
                Directive::SpawnGroup {
                    members,
                    window,
                    waypoints,
                    stagger_s,
                    pace_s,
                } => {
                    if !simulated(window.start) {
                        continue;
                    }
                    let pids: Vec<u32> =
                        resolve_actor(profile, members, &mut plan.remaps, &script.id)?
                            .into_iter()
                            .map(|(pid, _)| pid)
                            .collect();
                    if pids.is_empty() {
                        continue;
                    }
                    let member_role = match members {
                        ActorSel::RoleSlice { role, .. } => *role,
                        _ => PersonType::Visitor,
                    };
                    let tour_mask = graph.mask_for(map, member_role);
                    let route = join_waypoints(graph, &tour_mask, waypoints, &script.id)?;
                    let tour_time: i64 = route
                        .iter()
                        .take(route.len() - 1)
                        .map(|n| map.min_dwell(CellRef::from_index(*n as usize)) + pace_s)
                        .sum::<i64>()
                        + (pids.len() as f64 * stagger_s).ceil() as i64;
                    if window.start + tour_time > window.end {
                        return Err(script_err(
                            &script.id,
                            format!("tour needs {tour_time}s, window is {}s", window.duration()),
                        ));
                    }
                    meta.actors.extend(&pids);
                    push_window(&mut meta.windows, *window);
                    for z in ["exhibition_hall", "poster_area"] {
                        if !meta.zones.contains(&z.to_string()) {
                            meta.zones.push(z.to_string());
                        }
                    }
                    meta.details.insert(
                        format!("group_{}", plan.tours.len() + 1),
                        pids.len().to_string(),
                    );
                    plan.tours.push(PlannedTour {
                        members: pids,
                        route,
                        start: window.start,
                        stagger_s: *stagger_s,
                        pace_s: *pace_s,
                    });
                }
                Directive::ShiftEntry {
                    pids,
                    day,
                    offsets_s,
                } => {
                    if !profile.days.contains(day) {
                        continue;
                    }
                    for (pid, offset) in pids.iter().zip(offsets_s) {
                        let pid = resolve_single(profile, *pid, &mut plan.remaps, &script.id)?;
                        plan.modifiers.entry_shifts.insert((pid, *day), *offset);
                        if !meta.actors.contains(&pid) {
                            meta.actors.push(pid);
                        }
                    }
                    if let Ok(open) = profile.opening_hours.window(*day) {
                        let max_off = offsets_s.iter().copied().max().unwrap_or(0);
                        let duty = open.start + profile.behavior.staff_duty_offset_s;
                        push_window(&mut meta.windows, Window::new(duty, duty + max_off));
                    }
                    meta.details.insert("day".into(), day.to_string());
                }
                Directive::ForceExit {
                    role,
                    day,
                    at_s,
                    fraction,
                } => {
                    if !profile.days.contains(day) {
                        continue;
                    }
                    let members: Vec<u32> = profile
                        .role_members(*role)
                        .into_iter()
                        .filter(|pid| !eliminated_so_far.contains(pid))
                        .collect();
                    let k = (members.len() as f64 * fraction).round() as usize;
                    let mut rng = SimRng::derive_keyed(
                        profile.seed,
                        "event/force_exit",
                        (u64::from(event_number(&script.id)) << 8) | *day as u64,
                    );
                    let mut chosen = rng.sample(&members, k);
                    chosen.sort_unstable();
                    eliminated_so_far.extend(chosen.iter().copied());
                    meta.actors.extend(&chosen);
                    push_window(&mut meta.windows, Window::new(*at_s, *at_s + 1800));
                    meta.details
                        .insert(format!("day{day}_eliminated"), chosen.len().to_string());
                    plan.modifiers.forced_exits.push(ForcedExit {
                        at_s: *at_s,
                        day: *day,
                        pids: chosen.into_iter().collect(),
                    });
                }
            }
        }

        // Seal per-actor timelines into tracks.
        for ((pid, ghost), mut legs) in timelines {
            legs.sort_by_key(|(leg, ..)| leg.window.start);
            for pair in legs.windows(2) {
                if pair[0].0.window.end > pair[1].0.window.start {
                    return Err(script_err(
                        &script.id,
                        format!("overlapping presence windows for pid {pid}"),
                    ));
                }
            }
            let entry = legs.first().map(|(_, e, ..)| *e).unwrap_or_default();
            let exit = legs.last().map(|(_, _, x, _)| *x).unwrap_or_default();
            let claim = legs
                .iter()
                .map(|(_, _, _, c)| *c)
                .find(|c| *c == ClaimSpec::FullDay)
                .unwrap_or(ClaimSpec::Auto);
            let ptype = profile.roster
                [profile.person_index(pid).expect("resolved pid must exist")]
            .ptype;
            if ghost {
                let span = Window::new(
                    legs.first().unwrap().0.window.start - 3600,
                    legs.last().unwrap().0.window.end + 3600,
                );
                plan.ghost_windows.push((pid, span));
            }
            plan.tracks.push(PlannedTrack {
                event: script.id.clone(),
                pid,
                ghost,
                ptype,
                entry,
                exit,
                claim,
                legs: legs.into_iter().map(|(l, ..)| l).collect(),
            });
        }

        plan.meta.push(meta);
    }
    Ok(plan)
}

fn event_number(id: &str) -> u32 {
    id.trim_start_matches(['E', 'e']).parse().unwrap_or(0)
}

fn push_window(windows: &mut Vec<Window>, w: Window) {
    if !windows.contains(&w) {
        windows.push(w);
    }
}

fn zone_name_of(map: &VenueMap, cell: NodeId) -> String {
    map.zone_of(CellRef::from_index(cell as usize))
        .map(|z| map.zones[z as usize].name.clone())
        .unwrap_or_default()
}

fn resolve_actor(
    profile: &Profile,
    sel: &ActorSel,
    remaps: &mut Vec<(u32, u32)>,
    script: &str,
) -> Result<Vec<(u32, bool)>> {
    match sel {
        ActorSel::Pid(pid) => Ok(vec![(resolve_single(profile, *pid, remaps, script)?, false)]),
        ActorSel::GhostOf(pid) => {
            Ok(vec![(resolve_single(profile, *pid, remaps, script)?, true)])
        }
        ActorSel::RoleSlice { role, modulo, rem } => Ok(profile
            .role_members(*role)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i as u32 % modulo == *rem)
            .map(|(_, pid)| (pid, false))
            .collect()),
    }
}

fn resolve_single(
    profile: &Profile,
    pid: u32,
    remaps: &mut Vec<(u32, u32)>,
    script: &str,
) -> Result<u32> {
    match profile.resolve_pid(pid) {
        Some(actual) => {
            if actual != pid && !remaps.contains(&(pid, actual)) {
                remaps.push((pid, actual));
            }
            Ok(actual)
        }
        None => Err(script_err(
            script,
            format!("pid {pid} cannot be resolved against this roster"),
        )),
    }
}

/// Deterministic cell choice for a presence leg. Cohort member `k` spreads
/// round-robin over the zone so rooms never overfill.
fn place_cell(
    profile: &Profile,
    map: &VenueMap,
    place: &Place,
    script: &str,
    pid: u32,
    k: usize,
    cohort: bool,
) -> Result<NodeId> {
    match place {
        Place::Cell(f, x, y) => {
            let c = CellRef::new(*f, *x, *y);
            if !CellRef::valid(*f as i32, *x as i32, *y as i32) || !map.is_walkable(c) {
                return Err(script_err(script, format!("cell {c} is not walkable")));
            }
            Ok(c.index() as NodeId)
        }
        Place::Zone(name) => {
            let zid = map
                .zone_id(name)
                .map_err(|_| script_err(script, format!("unknown zone `{name}`")))?;
            let cells = &map.zones[zid as usize].cells;
            if cells.is_empty() {
                return Err(script_err(script, format!("zone `{name}` has no cells")));
            }
            // Stable base per zone; cohorts spread strictly sequentially so
            // forced groups fill rooms evenly, single actors vary by pid.
            let mut rng = SimRng::derive_keyed(profile.seed, "event/place", zid as u64);
            let base = rng.next_below(cells.len() as u64) as usize;
            let offset = if cohort { k } else { pid as usize };
            Ok(cells[(base + offset) % cells.len()].index() as NodeId)
        }
    }
}

/// Entry times for an explicit walk with one anchored cell: entering cell
/// `i+1` happens one source-cell dwell after entering cell `i`.
fn anchored_entries(
    map: &VenueMap,
    cells: &[NodeId],
    anchor_index: usize,
    anchor_t: i64,
) -> Vec<i64> {
    let dwell: Vec<i64> = cells
        .iter()
        .map(|n| map.min_dwell(CellRef::from_index(*n as usize)))
        .collect();
    let mut entries = vec![0; cells.len()];
    entries[anchor_index] = anchor_t;
    for i in (0..anchor_index).rev() {
        entries[i] = entries[i + 1] - dwell[i];
    }
    for i in anchor_index + 1..cells.len() {
        entries[i] = entries[i - 1] + dwell[i - 1];
    }
    entries
}

fn join_waypoints(
    graph: &GridGraph,
    mask: &Mask,
    waypoints: &[(u8, u8, u8)],
    script: &str,
) -> Result<Vec<NodeId>> {
    if waypoints.is_empty() {
        return Err(script_err(script, "tour has no waypoints".into()));
    }
    let mut route: Vec<NodeId> = vec![node(waypoints[0])];
    for pair in waypoints.windows(2) {
        let leg = graph
            .shortest_route(node(pair[0]), node(pair[1]), mask)
            .map_err(|e| script_err(script, e.to_string()))?;
        route.extend(&leg.cells[1..]);
    }
    Ok(route)
}

/// Generate the abnormal stream and its claims from a built plan.
pub fn run_events(
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    plan: &EventPlan,
) -> Result<EventOutput> {
    let mut records = Vec::new();
    let mut overlay = Vec::new();
    let mut claims = Vec::new();

    for track in &plan.tracks {
        let through: Vec<NodeId> = track.legs.iter().map(|l| l.cell).collect();
        let mask = mask_with_zones(graph, map, track.ptype, &through);
        let recs = synth_track(profile, map, graph, &mask, track)?;
        if recs.is_empty() {
            continue;
        }
        if track.ghost {
            overlay.extend(recs);
            continue;
        }
        let depart_t = recs
            .last()
            .unwrap()
            .t
            .max(track.legs.last().unwrap().window.end);
        let span = match track.claim {
            ClaimSpec::Auto => Window::new(
                recs.first().unwrap().t.min(track.legs[0].window.start),
                depart_t,
            ),
            ClaimSpec::FullDay => {
                let day = day_of(track.legs[0].window.start);
                profile.opening_hours.window(day)?
            }
        };
        claims.push(Claim {
            pid: track.pid,
            window: span,
            depart_t,
        });
        records.extend(recs);
    }

    for walk in &plan.walks {
        claims.push(Claim {
            pid: walk.pid,
            window: Window::new(walk.entries[0], *walk.entries.last().unwrap()),
            depart_t: *walk.entries.last().unwrap(),
        });
        for (cell, t) in walk.cells.iter().zip(&walk.entries) {
            records.push(TrajectoryRecord::new(
                *t,
                walk.pid,
                CellRef::from_index(*cell as usize),
            ));
        }
    }

    for tour in &plan.tours {
        let dwells: Vec<i64> = tour
            .route
            .iter()
            .map(|n| map.min_dwell(CellRef::from_index(*n as usize)) + tour.pace_s)
            .collect();
        for (k, pid) in tour.members.iter().enumerate() {
            let offset = (k as f64 * tour.stagger_s).round() as i64;
            let mut t = tour.start + offset;
            let first = t;
            let mut last = t;
            for (i, cell) in tour.route.iter().enumerate() {
                records.push(TrajectoryRecord::new(
                    t,
                    *pid,
                    CellRef::from_index(*cell as usize),
                ));
                last = t;
                t += dwells[i];
            }
            claims.push(Claim {
                pid: *pid,
                window: Window::new(first, last),
                depart_t: last,
            });
        }
    }

    records.sort_unstable_by_key(|r| r.sort_key());
    overlay.sort_unstable_by_key(|r| r.sort_key());
    claims.sort_by_key(|c| (c.pid, c.window.start));
    Ok(EventOutput {
        records,
        overlay,
        claims,
    })
}

/// Records for one forced track: optional entrance walk, presence legs with
/// fidgets, connecting walks timed to arrive exactly at each leg start, and
/// an optional exit walk.
fn synth_track(
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    mask: &Mask,
    track: &PlannedTrack,
) -> Result<Vec<TrajectoryRecord>> {
    let mut recs: Vec<TrajectoryRecord> = Vec::new();
    let mut rng = SimRng::derive_keyed(
        profile.seed,
        "event/track",
        ((track.pid as u64) << 8) | u64::from(event_number(&track.event)),
    );
    let err = |msg: String| script_err(&track.event, msg);

    // Entry walk from the entrance, timed backward to land on the first leg.
    let first = &track.legs[0];
    if track.entry == JointMode::Entrance {
        let gates = map.entrances_for(track.ptype);
        let gate = gates[track.pid as usize % gates.len()].index() as NodeId;
        let route = hallway_route(graph, map, gate, first.cell, mask)
            .map_err(|e| err(e.to_string()))?;
        let entries =
            anchored_entries(map, &route.cells, route.cells.len() - 1, first.window.start);
        let day_open = profile
            .opening_hours
            .window(day_of(first.window.start))?
            .start;
        if entries[0] < day_open {
            return Err(err(format!(
                "entrance walk would start before opening ({} < {day_open})",
                entries[0]
            )));
        }
        for (cell, t) in route.cells.iter().zip(&entries) {
            recs.push(TrajectoryRecord::new(
                *t,
                track.pid,
                CellRef::from_index(*cell as usize),
            ));
        }
    } else {
        recs.push(TrajectoryRecord::new(
            first.window.start,
            track.pid,
            CellRef::from_index(first.cell as usize),
        ));
    }

    // Presence legs and the walks between them.
    for (i, leg) in track.legs.iter().enumerate() {
        if i > 0 {
            let prev = &track.legs[i - 1];
            let route = hallway_route(graph, map, prev.cell, leg.cell, mask)
                .map_err(|e| err(e.to_string()))?;
            if route.cells.len() > 1 {
                let entries =
                    anchored_entries(map, &route.cells, route.cells.len() - 1, leg.window.start);
                // entries[1] is the first actual step out of the previous leg.
                if entries[1] < prev.window.end {
                    return Err(err(format!(
                        "legs too close for pid {}: must leave at {} but window ends {}",
                        track.pid, entries[1], prev.window.end
                    )));
                }
                for (cell, t) in route.cells.iter().zip(&entries).skip(1) {
                    recs.push(TrajectoryRecord::new(
                        *t,
                        track.pid,
                        CellRef::from_index(*cell as usize),
                    ));
                }
            }
        }
        // Fidgets: paired out-and-back moves between the leg cell and one
        // same-zone neighbor, always ending back on the leg cell so later
        // walks depart from a known position.
        if let Some((lo, hi)) = leg.fidget_s {
            let zone = map.zone_of(CellRef::from_index(leg.cell as usize));
            let partner = graph
                .neighbors(leg.cell)
                .iter()
                .copied()
                .find(|n| map.zone_of(CellRef::from_index(*n as usize)) == zone);
            if let Some(partner) = partner {
                let dwell = map.min_dwell(CellRef::from_index(partner as usize));
                let mut t = leg.window.start + rng.range_i64(lo, hi);
                while t < leg.window.end - 120 {
                    let back = (t + rng.range_i64(lo, hi)).min(leg.window.end - 60);
                    if back < t + dwell {
                        break;
                    }
                    recs.push(TrajectoryRecord::new(
                        t,
                        track.pid,
                        CellRef::from_index(partner as usize),
                    ));
                    recs.push(TrajectoryRecord::new(
                        back,
                        track.pid,
                        CellRef::from_index(leg.cell as usize),
                    ));
                    t = back + rng.range_i64(lo, hi);
                }
            }
        }
    }

    // Exit walk through the entrance, timed forward from the last leg end.
    if track.exit == JointMode::Entrance {
        let last = track.legs.last().unwrap();
        let last_cell = last_cell_of(&recs, last);
        let gates = map.entrances_for(track.ptype);
        let gate = gates[(track.pid as usize + 1) % gates.len()].index() as NodeId;
        let route = hallway_route(graph, map, last_cell, gate, mask)
            .map_err(|e| err(e.to_string()))?;
        let entries = anchored_entries(map, &route.cells, 0, last.window.end);
        for (cell, t) in route.cells.iter().zip(&entries).skip(1) {
            recs.push(TrajectoryRecord::new(
                *t,
                track.pid,
                CellRef::from_index(*cell as usize),
            ));
        }
    }

    recs.sort_unstable_by_key(|r| r.sort_key());
    recs.dedup();
    Ok(recs)
}

/// Where the track physically is at the end of its last leg (fidgets may have
/// parked it on the partner cell).
fn last_cell_of(recs: &[TrajectoryRecord], last_leg: &Leg) -> NodeId {
    recs.iter()
        .filter(|r| r.t <= last_leg.window.end)
        .next_back()
        .map(|r| r.cell().index() as NodeId)
        .unwrap_or(last_leg.cell)
}
