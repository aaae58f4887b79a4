//! Rule-based detectors, one per builtin anomaly event. Each works from the
//! dataset (plus the profile for types, duties and the schedule) and reports
//! findings whose actors and windows match what the scripts injected.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Result, SimError, Window};
use crate::model::{ActivityKind, CellRef, PersonType, VenueMap};
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::routing::{GridGraph, NodeId};
use crate::timebase::day_of;

use super::{DatasetIndex, DetectorParams, Finding};

pub fn detect_event(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    event_id: &str,
    params: &DetectorParams,
) -> Result<Vec<Finding>> {
    match event_id {
        "E1" => Ok(detect_impossible_tracks(index, map, graph, params)),
        "E2" => Ok(detect_lost_item_shuttle(index, profile, map, params)),
        "E3" => Ok(detect_sensor_outage(index, profile, map, graph, params)),
        "E4" => Ok(detect_ultra_vires(index, profile, map)),
        "E5" => Ok(detect_packed_halls(index, profile, map, params)),
        "E6" => Ok(detect_tea_congestion(index, profile, map, params)),
        "E7" => Ok(detect_dense_cluster(index, profile, map, params)),
        "E8" => Ok(detect_group_visits(index, map, params)),
        "E9" => Ok(detect_stationary_badge(index, profile, map, params)),
        "E10" => Ok(detect_early_contest_exits(index, profile, params)),
        "E11" => Ok(detect_late_staff(index, profile)),
        "E12" => Ok(detect_lunch_turns(index, profile, map, params)),
        other => Err(SimError::ScriptValidation {
            script: other.to_string(),
            problems: vec!["unknown event id".into()],
        }),
    }
}

fn zone_id(map: &VenueMap, name: &str) -> Option<u16> {
    map.zone_id(name).ok()
}

fn ptype_of(profile: &Profile, pid: u32) -> Option<PersonType> {
    profile.person_index(pid).map(|i| profile.roster[i].ptype)
}

/// Presence intervals per record: a person stays at a record's cell until the
/// next same-day record (or one minimum dwell after the day's last record).
fn presence_end(
    map: &VenueMap,
    recs: &[TrajectoryRecord],
    i: usize,
) -> i64 {
    match recs.get(i + 1) {
        Some(next) if day_of(next.t) == day_of(recs[i].t) => next.t,
        _ => recs[i].t + map.min_dwell(recs[i].cell()),
    }
}

/// Minute-resolution occupancy of one zone over the whole dataset span.
fn zone_minute_series(
    index: &DatasetIndex,
    map: &VenueMap,
    zone: u16,
) -> BTreeMap<i64, i64> {
    let mut deltas: BTreeMap<i64, i64> = BTreeMap::new();
    for (_, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        for (i, r) in recs.iter().enumerate() {
            if map.zone_of(r.cell()) != Some(zone) {
                continue;
            }
            let leave = presence_end(map, recs, i);
            *deltas.entry(r.t).or_default() += 1;
            *deltas.entry(leave).or_default() -= 1;
        }
    }
    // Integrate to minute samples.
    let mut series = BTreeMap::new();
    let mut level = 0i64;
    let mut cursor: Option<i64> = None;
    for (t, d) in deltas {
        if let Some(prev) = cursor {
            let from = prev / 60;
            let to = t / 60;
            for m in from..to {
                series.insert(m * 60, level);
            }
        }
        level += d;
        cursor = Some(t);
    }
    series
}

/// Maximal runs of minutes where `pred` holds, at least `sustain_s` long.
fn sustained_runs(
    series: &BTreeMap<i64, i64>,
    sustain_s: i64,
    mut pred: impl FnMut(i64) -> bool,
) -> Vec<Window> {
    let mut runs = Vec::new();
    let mut start: Option<i64> = None;
    let mut prev: Option<i64> = None;
    for (&t, &v) in series {
        let hit = pred(v) && prev.is_none_or(|p| t - p <= 60);
        if pred(v) {
            if start.is_none() || !hit {
                if let (Some(s), Some(p)) = (start, prev) {
                    if p - s >= sustain_s {
                        runs.push(Window::new(s, p));
                    }
                }
                start = Some(t);
            }
            prev = Some(t);
        } else {
            if let (Some(s), Some(p)) = (start, prev) {
                if p - s >= sustain_s {
                    runs.push(Window::new(s, p));
                }
            }
            start = None;
            prev = None;
        }
    }
    if let (Some(s), Some(p)) = (start, prev) {
        if p - s >= sustain_s {
            runs.push(Window::new(s, p));
        }
    }
    runs
}

// ── E1: duplicated badge ────────────────────────────────────────────────────

fn detect_impossible_tracks(
    index: &DatasetIndex,
    map: &VenueMap,
    graph: &GridGraph,
    params: &DetectorParams,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut lb_cache: HashMap<NodeId, Vec<i64>> = HashMap::new();
    for (pid, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        let mut impossible: Vec<(i64, i64, CellRef, CellRef)> = Vec::new();
        for pair in recs.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if day_of(a.t) != day_of(b.t) || b.t - a.t > params.e1_max_pair_gap_s {
                continue;
            }
            let (na, nb) = (a.cell().index() as NodeId, b.cell().index() as NodeId);
            if na == nb || graph.adjacent(na, nb) {
                continue;
            }
            let lb = lb_cache
                .entry(na)
                .or_insert_with(|| graph.min_travel_times(map, na));
            if b.t - a.t < lb[nb as usize] {
                impossible.push((a.t, b.t, a.cell(), b.cell()));
            }
        }
        if !impossible.is_empty() {
            let mut cells: Vec<CellRef> = impossible
                .iter()
                .flat_map(|(_, _, a, b)| [*a, *b])
                .collect();
            cells.sort_unstable();
            cells.dedup();
            findings.push(Finding {
                check: "event/E1".into(),
                pids: vec![*pid],
                window: Window::new(
                    impossible.first().unwrap().0,
                    impossible.last().unwrap().1,
                ),
                cells,
                message: format!(
                    "{} physically impossible transitions (badge in two places)",
                    impossible.len()
                ),
            });
        }
    }
    findings
}

// ── E2: item search shuttle ─────────────────────────────────────────────────

fn detect_lost_item_shuttle(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let Some(lounge) = zone_id(map, "vip_lounge") else {
        return vec![];
    };
    let Some(desk) = zone_id(map, "service_desk") else {
        return vec![];
    };
    let mut findings = Vec::new();
    for (pid, span) in &index.spans {
        if ptype_of(profile, *pid) != Some(PersonType::VipGuest) {
            continue;
        }
        let recs = &index.by_pid[span.clone()];
        // Desk visits that are sandwiched between lounge stays.
        let mut visits: Vec<Window> = Vec::new();
        let mut i = 0;
        while i < recs.len() {
            if map.zone_of(recs[i].cell()) == Some(desk) {
                let start = recs[i].t;
                let mut end = presence_end(map, recs, i);
                while i + 1 < recs.len() && map.zone_of(recs[i + 1].cell()) == Some(desk) {
                    i += 1;
                    end = presence_end(map, recs, i);
                }
                let before = recs
                    .iter()
                    .filter(|r| r.t < start && map.zone_of(r.cell()) == Some(lounge))
                    .last()
                    .map(|r| start - r.t <= params.e2_near_s)
                    .unwrap_or(false);
                let after = recs
                    .iter()
                    .find(|r| r.t > end && map.zone_of(r.cell()) == Some(lounge))
                    .map(|r| r.t - end <= params.e2_near_s)
                    .unwrap_or(false);
                if before && after {
                    visits.push(Window::new(start, end));
                }
            }
            i += 1;
        }
        // Enough round trips inside the span?
        for k in 0..visits.len() {
            let mut j = k;
            while j + 1 < visits.len()
                && visits[j + 1].end - visits[k].start <= params.e2_span_s
            {
                j += 1;
            }
            if j - k + 1 >= params.e2_min_trips {
                findings.push(Finding {
                    check: "event/E2".into(),
                    pids: vec![*pid],
                    window: Window::new(visits[k].start, visits[j].end),
                    cells: vec![],
                    message: format!(
                        "{} lounge-desk round trips within {} minutes",
                        j - k + 1,
                        (visits[j].end - visits[k].start) / 60
                    ),
                });
                break;
            }
        }
    }
    findings
}

// ── E3: sensor outage ───────────────────────────────────────────────────────

fn detect_sensor_outage(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    params: &DetectorParams,
) -> Vec<Finding> {
    // Candidate sensors sit in transit zones, where silence under streaming
    // traffic cannot be people sitting still.
    let transit: Vec<u16> = ["corridor", "stairs", "entrance", "vip_channel"]
        .iter()
        .filter_map(|z| zone_id(map, z))
        .collect();
    let mut times: HashMap<NodeId, Vec<i64>> = HashMap::new();
    for r in &index.by_pid {
        if transit.contains(&map.zone_of(r.cell()).unwrap_or(u16::MAX)) {
            times
                .entry(r.cell().index() as NodeId)
                .or_default()
                .push(r.t);
        }
    }
    // Busy cells with an implausible silent stretch.
    #[derive(Clone)]
    struct Gap {
        cell: NodeId,
        window: Window,     // provably silent interval
        last_before: i64,
        first_after: i64,
    }
    let mut gaps: Vec<Gap> = Vec::new();
    for (cell, ts) in &mut times {
        ts.sort_unstable();
        for day in profile.days.clone() {
            let Ok(open) = profile.opening_hours.window(day) else {
                continue;
            };
            let day_ts: Vec<i64> = ts
                .iter()
                .copied()
                .filter(|t| open.contains(*t))
                .collect();
            if day_ts.len() < params.e3_min_daily_records {
                continue;
            }
            let mut diffs: Vec<i64> = day_ts.windows(2).map(|w| w[1] - w[0]).collect();
            diffs.sort_unstable();
            let median = diffs[diffs.len() / 2];
            if median > params.e3_busy_median_s {
                continue;
            }
            for w in day_ts.windows(2) {
                if w[1] - w[0] <= params.e3_min_gap_s {
                    continue;
                }
                if w[0] < open.start + params.e3_day_edge_s
                    || w[1] > open.end - params.e3_day_edge_s
                {
                    continue;
                }
                gaps.push(Gap {
                    cell: *cell,
                    window: Window::new(w[0] + 1, w[1] - 1),
                    last_before: w[0],
                    first_after: w[1],
                });
            }
        }
    }
    // Group overlapping gaps whose cells form a connected block.
    let mut findings = Vec::new();
    let mut used = vec![false; gaps.len()];
    for i in 0..gaps.len() {
        if used[i] {
            continue;
        }
        let mut group = vec![i];
        used[i] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..gaps.len() {
                if used[j] {
                    continue;
                }
                let overlaps = group
                    .iter()
                    .any(|&g| gaps[g].window.overlaps(&gaps[j].window));
                let adjacent = group
                    .iter()
                    .any(|&g| graph.adjacent(gaps[g].cell, gaps[j].cell));
                if overlaps && adjacent {
                    group.push(j);
                    used[j] = true;
                    changed = true;
                }
            }
        }
        if group.len() < params.e3_min_cells {
            continue;
        }
        let start = group.iter().map(|&g| gaps[g].last_before).max().unwrap() + 1;
        let end = group.iter().map(|&g| gaps[g].first_after).min().unwrap() - 1;
        if end - start < params.e3_min_gap_s {
            continue;
        }
        // An outage cuts every sensor of the block at the same instant, so
        // the last records before the silence align within seconds across the
        // block. Schedule-driven lulls wash over the block as waves, minutes
        // apart from cell to cell. Recovery is observed gradually either way,
        // so only the leading edge discriminates.
        let spread = |f: &dyn Fn(&Gap) -> i64| -> i64 {
            let vals: Vec<i64> = group.iter().map(|&g| f(&gaps[g])).collect();
            vals.iter().max().unwrap() - vals.iter().min().unwrap()
        };
        let start_spread = spread(&|g: &Gap| g.last_before);
        if std::env::var_os("VENUESIM_E3_DEBUG").is_some() {
            eprintln!(
                "E3 candidate: {} cells, window [{} .. {}], start spread {}",
                group.len(),
                crate::timebase::wallclock(start),
                crate::timebase::wallclock(end),
                start_spread
            );
        }
        if start_spread > params.e3_edge_spread_s {
            continue;
        }
        let mut cells: Vec<CellRef> = group
            .iter()
            .map(|&g| CellRef::from_index(gaps[g].cell as usize))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        findings.push(Finding {
            check: "event/E3".into(),
            pids: vec![],
            window: Window::new(start, end),
            cells,
            message: format!(
                "contiguous sensor block silent for {} minutes",
                (end - start) / 60
            ),
        });
    }
    findings
}

// ── E4: unauthorized zone entries ───────────────────────────────────────────

fn detect_ultra_vires(index: &DatasetIndex, profile: &Profile, map: &VenueMap) -> Vec<Finding> {
    let restricted: Vec<(u16, PersonType, &str)> = [
        ("vip_lounge", PersonType::VipGuest),
        ("media_room", PersonType::MediaReporter),
    ]
    .iter()
    .filter_map(|(name, owner)| zone_id(map, name).map(|z| (z, *owner, *name)))
    .collect();

    let mut findings = Vec::new();
    for (pid, span) in &index.spans {
        let Some(ptype) = ptype_of(profile, *pid) else {
            continue;
        };
        let recs = &index.by_pid[span.clone()];
        let mut run: Option<(Window, &str, Vec<CellRef>)> = None;
        for (i, r) in recs.iter().enumerate() {
            let hit = restricted
                .iter()
                .find(|(z, owner, _)| map.zone_of(r.cell()) == Some(*z) && ptype != *owner);
            match (hit, &mut run) {
                (Some((_, _, name)), Some((w, n, cells))) if n == name => {
                    w.end = presence_end(map, recs, i);
                    cells.push(r.cell());
                }
                (Some((_, _, name)), _) => {
                    if let Some((w, n, cells)) = run.take() {
                        findings.push(violation(*pid, w, n, cells));
                    }
                    run = Some((
                        Window::new(r.t, presence_end(map, recs, i)),
                        name,
                        vec![r.cell()],
                    ));
                }
                (None, Some(_)) => {
                    if let Some((w, n, cells)) = run.take() {
                        findings.push(violation(*pid, w, n, cells));
                    }
                }
                (None, None) => {}
            }
        }
        if let Some((w, n, cells)) = run.take() {
            findings.push(violation(*pid, w, n, cells));
        }
    }
    findings
}

fn violation(pid: u32, window: Window, zone: &str, mut cells: Vec<CellRef>) -> Finding {
    cells.sort_unstable();
    cells.dedup();
    Finding {
        check: "event/E4".into(),
        pids: vec![pid],
        window,
        cells,
        message: format!("unauthorized presence in {zone}"),
    }
}

// ── E5: packed sub-venues ───────────────────────────────────────────────────

fn detect_packed_halls(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    for zone_name in ["sub_venue_a", "sub_venue_b"] {
        let Some(zone) = zone_id(map, zone_name) else {
            continue;
        };
        let series = zone_minute_series(index, map, zone);
        // Mean session load, trimmed at the edges.
        let sessions: Vec<&crate::model::Activity> = profile
            .activities
            .iter()
            .filter(|a| a.zone == zone_name && a.kind == ActivityKind::AcademicSub)
            .collect();
        let mut loads: Vec<(f64, &crate::model::Activity)> = Vec::new();
        for s in &sessions {
            let from = s.window.start + params.e5_trim_s;
            let to = s.window.end - params.e5_trim_s;
            let vals: Vec<i64> = series
                .range(from..=to)
                .map(|(_, v)| *v)
                .collect();
            if vals.is_empty() {
                continue;
            }
            let mean = vals.iter().sum::<i64>() as f64 / vals.len() as f64;
            loads.push((mean, s));
        }
        if loads.len() < 3 {
            continue;
        }
        let mut sorted: Vec<f64> = loads.iter().map(|(m, _)| *m).collect();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        for (mean, s) in &loads {
            if *mean >= params.e5_min_mean && *mean >= params.e5_ratio * median {
                findings.push(Finding {
                    check: "event/E5".into(),
                    pids: vec![],
                    window: s.window,
                    cells: vec![],
                    message: format!(
                        "`{}` drew {:.0} people, {:.1}x the hall median {:.0}",
                        s.name,
                        mean,
                        mean / median.max(1.0),
                        median
                    ),
                });
            }
        }
    }
    findings
}

// ── E6: tea-break congestion ────────────────────────────────────────────────

fn detect_tea_congestion(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let _ = profile;
    let mut findings = Vec::new();
    for zone_name in ["tea_break_1", "tea_break_2"] {
        let Some(zone) = zone_id(map, zone_name) else {
            continue;
        };
        let cap = map.zones[zone as usize].total_capacity() as f64;
        if cap == 0.0 {
            continue;
        }
        let series = zone_minute_series(index, map, zone);
        let runs = sustained_runs(&series, params.e6_sustain_s, |v| {
            v as f64 / cap >= params.e6_sc
        });
        // Brief dips between saturated stretches do not end the congestion.
        let mut merged: Vec<Window> = Vec::new();
        for run in runs {
            match merged.last_mut() {
                Some(prev) if run.start - prev.end <= 240 => prev.end = run.end,
                _ => merged.push(run),
            }
        }
        for run in merged {
            findings.push(Finding {
                check: "event/E6".into(),
                pids: vec![],
                window: run,
                cells: vec![],
                message: format!("{zone_name} at or above {:.0}% capacity", params.e6_sc * 100.0),
            });
        }
    }
    findings
}

// ── E7: dense gathering in the exhibition hall ──────────────────────────────

fn detect_dense_cluster(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let Some(zone) = zone_id(map, "exhibition_hall") else {
        return vec![];
    };
    let cells: Vec<CellRef> = map.zones[zone as usize].cells.clone();
    let cell_pos: HashMap<usize, usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.index(), i))
        .collect();

    // Per-cell minute occupancy restricted to the hall.
    let mut deltas: Vec<BTreeMap<i64, i64>> = vec![BTreeMap::new(); cells.len()];
    let mut t_min = i64::MAX;
    let mut t_max = i64::MIN;
    for (_, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        for (i, r) in recs.iter().enumerate() {
            let Some(&ci) = cell_pos.get(&r.cell().index()) else {
                continue;
            };
            let leave = presence_end(map, recs, i);
            *deltas[ci].entry(r.t).or_default() += 1;
            *deltas[ci].entry(leave).or_default() -= 1;
            t_min = t_min.min(r.t);
            t_max = t_max.max(leave);
        }
    }
    if t_min > t_max {
        return vec![];
    }

    // Minute-by-minute cluster presence.
    let mut cursors: Vec<std::collections::btree_map::Iter<i64, i64>> =
        deltas.iter().map(|d| d.iter()).collect();
    let mut pending: Vec<Option<(&i64, &i64)>> = cursors.iter_mut().map(|c| c.next()).collect();
    let mut occ = vec![0i64; cells.len()];
    let mut cluster_minutes: Vec<i64> = Vec::new();
    let mut peak_cells: Vec<CellRef> = Vec::new();
    let mut m = (t_min / 60) * 60;
    while m <= t_max {
        for ci in 0..cells.len() {
            while let Some((&t, &d)) = pending[ci] {
                if t <= m {
                    occ[ci] += d;
                    pending[ci] = cursors[ci].next();
                } else {
                    break;
                }
            }
        }
        // Connected component of dense cells, summed.
        let dense: HashSet<usize> = (0..cells.len())
            .filter(|ci| occ[*ci] >= params.e7_cell_occ as i64)
            .collect();
        let mut best_total = 0i64;
        let mut best_members: Vec<usize> = Vec::new();
        let mut seen: HashSet<usize> = HashSet::new();
        for &start in &dense {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut members = Vec::new();
            seen.insert(start);
            while let Some(ci) = stack.pop() {
                members.push(ci);
                let c = cells[ci];
                for (dx, dy) in [(1i32, 0i32), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (c.x as i32 + dx, c.y as i32 + dy);
                    if !CellRef::valid(c.floor as i32, nx, ny) {
                        continue;
                    }
                    let n = CellRef::new(c.floor, nx as u8, ny as u8);
                    if let Some(&ni) = cell_pos.get(&n.index()) {
                        if dense.contains(&ni) && seen.insert(ni) {
                            stack.push(ni);
                        }
                    }
                }
            }
            let total: i64 = members.iter().map(|&ci| occ[ci]).sum();
            if total > best_total {
                best_total = total;
                best_members = members;
            }
        }
        if best_total >= params.e7_cluster_total as i64 {
            cluster_minutes.push(m);
            if peak_cells.is_empty() {
                peak_cells = best_members.iter().map(|&ci| cells[ci]).collect();
            }
        }
        m += 60;
    }

    // Runs of consecutive cluster minutes, outside the morning inflow rush.
    let rush_over: Vec<Window> = profile
        .days
        .iter()
        .filter_map(|d| profile.opening_hours.window(*d).ok())
        .map(|w| Window::new(w.start, w.start + params.e7_day_start_margin_s))
        .collect();
    let mut findings = Vec::new();
    let mut k = 0;
    while k < cluster_minutes.len() {
        let mut j = k;
        while j + 1 < cluster_minutes.len() && cluster_minutes[j + 1] - cluster_minutes[j] <= 120 {
            j += 1;
        }
        let span = cluster_minutes[j] - cluster_minutes[k];
        let in_rush = rush_over.iter().any(|w| w.contains(cluster_minutes[k]));
        if span >= params.e7_sustain_s && !in_rush {
            let mut cells = peak_cells.clone();
            cells.sort_unstable();
            findings.push(Finding {
                check: "event/E7".into(),
                pids: vec![],
                window: Window::new(cluster_minutes[k], cluster_minutes[j] + 60),
                cells,
                message: format!(
                    "dense gathering of {}+ people sustained {} minutes",
                    params.e7_cluster_total,
                    span / 60
                ),
            });
        }
        k = j + 1;
    }
    findings
}

// ── E8: co-moving groups ────────────────────────────────────────────────────

fn detect_group_visits(index: &DatasetIndex, map: &VenueMap, params: &DetectorParams) -> Vec<Finding> {
    let zones: Vec<u16> = ["exhibition_hall", "poster_area"]
        .iter()
        .filter_map(|z| zone_id(map, z))
        .collect();
    // Dense in-zone sequences per pid per day.
    struct Seq {
        pid: u32,
        first: i64,
        last: i64,
        visits: HashMap<usize, i64>, // cell index -> first entry time
    }
    let mut seqs: Vec<Seq> = Vec::new();
    for (pid, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        let mut by_day: BTreeMap<u8, Vec<&TrajectoryRecord>> = BTreeMap::new();
        for r in recs {
            if zones.contains(&map.zone_of(r.cell()).unwrap_or(u16::MAX)) {
                by_day.entry(day_of(r.t)).or_default().push(r);
            }
        }
        for (_, rs) in by_day {
            // Split a day's zone records into bursts separated by long pauses.
            let mut burst: Vec<&TrajectoryRecord> = Vec::new();
            let flush = |burst: &mut Vec<&TrajectoryRecord>, seqs: &mut Vec<Seq>| {
                if burst.len() >= params.e8_min_records {
                    let mut visits = HashMap::new();
                    for r in burst.iter() {
                        visits.entry(r.cell().index()).or_insert(r.t);
                    }
                    seqs.push(Seq {
                        pid: *pid,
                        first: burst.first().unwrap().t,
                        last: burst.last().unwrap().t,
                        visits,
                    });
                }
                burst.clear();
            };
            for r in rs {
                if let Some(prev) = burst.last() {
                    if r.t - prev.t > params.e8_lag_s * 3 {
                        flush(&mut burst, &mut seqs);
                    }
                }
                burst.push(r);
            }
            flush(&mut burst, &mut seqs);
        }
    }

    // Union-find over sequences that share enough near-simultaneous cells.
    let n = seqs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    seqs.sort_by_key(|s| s.first);
    for i in 0..n {
        for j in i + 1..n {
            if seqs[j].first - seqs[i].first > params.e8_first_gap_s {
                break;
            }
            let shared = seqs[i]
                .visits
                .iter()
                .filter(|(cell, t)| {
                    seqs[j]
                        .visits
                        .get(*cell)
                        .is_some_and(|tj| (*tj - **t).abs() <= params.e8_lag_s)
                })
                .count();
            if shared >= params.e8_min_shared {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut findings = Vec::new();
    for (_, members) in groups {
        let mut pids: Vec<u32> = members.iter().map(|&i| seqs[i].pid).collect();
        pids.sort_unstable();
        pids.dedup();
        if pids.len() < params.e8_min_group {
            continue;
        }
        let first = members.iter().map(|&i| seqs[i].first).min().unwrap();
        let last = members.iter().map(|&i| seqs[i].last).max().unwrap();
        findings.push(Finding {
            check: "event/E8".into(),
            pids: pids.clone(),
            window: Window::new(first, last),
            cells: vec![],
            message: format!("{} people co-moving through exhibition/poster", pids.len()),
        });
    }
    findings.sort_by_key(|f| f.window.start);
    findings
}

// ── E9: stationary badge in an active zone ──────────────────────────────────

fn detect_stationary_badge(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (pid, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        for (i, pair) in recs.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if day_of(a.t) != day_of(b.t) || b.t - a.t < params.e9_stationary_s {
                continue;
            }
            let _ = i;
            let zone = map.zone_of(a.cell());
            let zone_name = zone.map(|z| map.zones[z as usize].name.clone());
            let active = profile.activities.iter().any(|act| {
                Some(&act.zone) == zone_name.as_ref()
                    && !act.standing
                    && act.window.start < b.t
                    && act.window.end > a.t
            });
            if active {
                findings.push(Finding {
                    check: "event/E9".into(),
                    pids: vec![*pid],
                    window: Window::new(a.t, b.t),
                    cells: vec![a.cell()],
                    message: format!(
                        "badge motionless for {:.1} hours inside an active zone",
                        (b.t - a.t) as f64 / 3600.0
                    ),
                });
            }
        }
    }
    findings
}

// ── E10: early contest exits ────────────────────────────────────────────────

fn detect_early_contest_exits(
    index: &DatasetIndex,
    profile: &Profile,
    params: &DetectorParams,
) -> Vec<Finding> {
    let mut contest_end: BTreeMap<u8, i64> = BTreeMap::new();
    for a in &profile.activities {
        if a.kind == ActivityKind::Contest {
            let e = contest_end.entry(a.day).or_insert(i64::MIN);
            *e = (*e).max(a.window.end);
        }
    }
    let mut per_day: BTreeMap<u8, Vec<(u32, i64)>> = BTreeMap::new();
    for (pid, span) in &index.spans {
        if ptype_of(profile, *pid) != Some(PersonType::HackingContestant) {
            continue;
        }
        let recs = &index.by_pid[span.clone()];
        let mut last_by_day: BTreeMap<u8, i64> = BTreeMap::new();
        for r in recs {
            let d = day_of(r.t);
            let e = last_by_day.entry(d).or_insert(i64::MIN);
            *e = (*e).max(r.t);
        }
        for (day, last) in last_by_day {
            if let Some(end) = contest_end.get(&day) {
                if end - last >= params.e10_early_s {
                    per_day.entry(day).or_default().push((*pid, last));
                }
            }
        }
    }
    per_day
        .into_iter()
        .map(|(day, mut rows)| {
            rows.sort_unstable();
            let first = rows.iter().map(|(_, t)| *t).min().unwrap();
            let last = rows.iter().map(|(_, t)| *t).max().unwrap();
            Finding {
                check: "event/E10".into(),
                pids: rows.iter().map(|(p, _)| *p).collect(),
                window: Window::new(first, last),
                cells: vec![],
                message: format!(
                    "{} contestants left day {day} at least two hours before the contest end",
                    rows.len()
                ),
            }
        })
        .collect()
}

// ── E11: late staff ─────────────────────────────────────────────────────────

fn detect_late_staff(index: &DatasetIndex, profile: &Profile) -> Vec<Finding> {
    let mut per_day: BTreeMap<u8, Vec<(u32, i64)>> = BTreeMap::new();
    for (pid, span) in &index.spans {
        let Some(pi) = profile.person_index(*pid) else {
            continue;
        };
        if profile.roster[pi].ptype != PersonType::Staff {
            continue;
        }
        let recs = &index.by_pid[span.clone()];
        let mut first_by_day: BTreeMap<u8, i64> = BTreeMap::new();
        for r in recs {
            first_by_day.entry(day_of(r.t)).or_insert(r.t);
        }
        for (day, first) in first_by_day {
            let Some(duty) = profile.first_duty_start(&profile.roster[pi], day) else {
                continue;
            };
            if first > duty {
                per_day.entry(day).or_default().push((*pid, first));
            }
        }
    }
    per_day
        .into_iter()
        .map(|(day, mut rows)| {
            rows.sort_unstable();
            let open = profile.opening_hours.window(day).unwrap();
            let duty = open.start + profile.behavior.staff_duty_offset_s;
            let last = rows.iter().map(|(_, t)| *t).max().unwrap();
            Finding {
                check: "event/E11".into(),
                pids: rows.iter().map(|(p, _)| *p).collect(),
                window: Window::new(duty, last),
                cells: vec![],
                message: format!("{} staff reported for duty late on day {day}", rows.len()),
            }
        })
        .collect()
}
// ── E12: staff lunch turns ──────────────────────────────────────────────────

fn detect_lunch_turns(
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    params: &DetectorParams,
) -> Vec<Finding> {
    let Some(room) = zone_id(map, "work_room") else {
        return vec![];
    };
    let staff: Vec<u32> = profile.role_members(PersonType::Staff);
    if staff.is_empty() {
        return vec![];
    }
    let staff_set: HashSet<u32> = staff.iter().copied().collect();

    // Work-room presence intervals of staff members.
    struct Stay {
        pid: u32,
        start: i64,
        end: i64,
    }
    let mut stays: Vec<Stay> = Vec::new();
    for (pid, span) in &index.spans {
        if !staff_set.contains(pid) {
            continue;
        }
        let recs = &index.by_pid[span.clone()];
        let mut i = 0;
        while i < recs.len() {
            if map.zone_of(recs[i].cell()) == Some(room) {
                let start = recs[i].t;
                let mut end = presence_end(map, recs, i);
                while i + 1 < recs.len()
                    && map.zone_of(recs[i + 1].cell()) == Some(room)
                    && day_of(recs[i + 1].t) == day_of(recs[i].t)
                {
                    i += 1;
                    end = presence_end(map, recs, i);
                }
                stays.push(Stay {
                    pid: *pid,
                    start,
                    end,
                });
            }
            i += 1;
        }
    }

    let wave_min = (params.e12_wave_share * staff.len() as f64).ceil() as usize;
    let union_min = (params.e12_union_share * staff.len() as f64).ceil() as usize;
    let mut findings = Vec::new();

    for day in profile.days.clone() {
        let Ok(open) = profile.opening_hours.window(day) else {
            continue;
        };
        let day_stays: Vec<&Stay> = stays
            .iter()
            .filter(|s| day_of(s.start) == day)
            .collect();
        if day_stays.len() < wave_min {
            continue;
        }
        // Minute-sampled headcount of staff inside the room.
        let minutes: Vec<i64> = (open.start / 60..=open.end / 60).map(|m| m * 60).collect();
        let present_at = |m: i64| -> Vec<u32> {
            day_stays
                .iter()
                .filter(|s| s.start <= m && s.end > m)
                .map(|s| s.pid)
                .collect()
        };
        // Maximal runs where a large share of staff sits in the room.
        let mut block: Option<(i64, i64)> = None;
        let mut best: Option<(i64, i64)> = None;
        for &m in &minutes {
            if present_at(m).len() >= wave_min {
                block = Some(block.map_or((m, m), |(s, _)| (s, m)));
            } else if let Some(b) = block.take() {
                if best.is_none_or(|(s, e)| e - s < b.1 - b.0) {
                    best = Some(b);
                }
            }
        }
        if let Some(b) = block {
            if best.is_none_or(|(s, e)| e - s < b.1 - b.0) {
                best = Some(b);
            }
        }
        let Some((b_start, b_end)) = best else {
            continue;
        };
        if b_end - b_start < 2 * params.e12_episode_min_s {
            continue;
        }
        // Two shifts: the boundary is where the room population turns over.
        let first_set: HashSet<u32> = present_at(b_start).into_iter().collect();
        let mut split = b_start;
        let mut m = b_start;
        while m <= b_end {
            let now: HashSet<u32> = present_at(m).into_iter().collect();
            let overlap = now.intersection(&first_set).count();
            if overlap * 2 < first_set.len() {
                break;
            }
            split = m;
            m += 60;
        }
        if split == b_start || split >= b_end {
            continue;
        }
        // Union coverage: most of the staff passes through one of the shifts.
        let covered: HashSet<u32> = day_stays
            .iter()
            .filter(|s| s.start <= b_end && s.end >= b_start)
            .filter(|s| s.end - s.start >= params.e12_episode_min_s)
            .map(|s| s.pid)
            .collect();
        if covered.len() < union_min {
            continue;
        }
        let mut pids: Vec<u32> = covered.into_iter().collect();
        pids.sort_unstable();
        for w in [Window::new(b_start, split), Window::new(split, b_end)] {
            findings.push(Finding {
                check: "event/E12".into(),
                pids: pids.clone(),
                window: w,
                cells: vec![],
                message: format!(
                    "staff lunch shift {} - {} on day {day}",
                    crate::timebase::wallclock(w.start),
                    crate::timebase::wallclock(w.end)
                ),
            });
        }
    }
    findings
}
