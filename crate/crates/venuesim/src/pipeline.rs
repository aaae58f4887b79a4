//! Data fusion and emission: conflict resolution between the background and
//! abnormal streams, sensor-failure masking, deduplication to cell-entry
//! semantics, and canonical CSV I/O.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Result, SimError, Window};
use crate::events::executor::Claim;
use crate::model::{cell_of_sid, CellRef, PersonType, VenueMap};
use crate::profile::Profile;
use crate::record::{sort_stream, TrajectoryRecord};
use crate::routing::{hallway_route, mask_with_zones, GridGraph, NodeId};
use crate::timebase::{day_of, wallclock};

/// Merge the background and abnormal streams. Claimed windows keep only the
/// abnormal records; joints are stitched with shortest-route bridges so the
/// merged per-pid trajectory stays physically continuous. Overlay (duplicate
/// badge) records are merged additively at the end.
pub fn fuse(
    background: Vec<TrajectoryRecord>,
    abnormal: &[TrajectoryRecord],
    overlay: &[TrajectoryRecord],
    claims: &[Claim],
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
) -> Result<Vec<TrajectoryRecord>> {
    let mut by_pid: HashMap<u32, Vec<TrajectoryRecord>> = HashMap::new();
    for r in background {
        by_pid.entry(r.pid).or_default().push(r);
    }
    let mut ab_by_pid: HashMap<u32, Vec<&TrajectoryRecord>> = HashMap::new();
    for r in abnormal {
        ab_by_pid.entry(r.pid).or_default().push(r);
    }
    let mut claims_by_pid: HashMap<u32, Vec<&Claim>> = HashMap::new();
    for c in claims {
        claims_by_pid.entry(c.pid).or_default().push(c);
    }

    let mut out: Vec<TrajectoryRecord> = Vec::new();
    for (pid, pid_claims) in claims_by_pid {
        let bg = by_pid.remove(&pid).unwrap_or_default();
        let ab = ab_by_pid.get(&pid).cloned().unwrap_or_default();
        let merged = fuse_one(pid, bg, &ab, &pid_claims, profile, map, graph)?;
        out.extend(merged);
    }
    // Untouched pids and overlay tracks join as-is.
    for (_, recs) in by_pid {
        out.extend(recs);
    }
    out.extend(overlay.iter().copied());
    sort_stream(&mut out);
    Ok(out)
}

fn fuse_one(
    pid: u32,
    mut bg: Vec<TrajectoryRecord>,
    abnormal: &[&TrajectoryRecord],
    claims: &[&Claim],
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
) -> Result<Vec<TrajectoryRecord>> {
    bg.sort_unstable_by_key(|r| r.sort_key());
    let mut claims: Vec<&Claim> = claims.to_vec();
    claims.sort_by_key(|c| c.window.start);

    let ptype = profile
        .person_index(pid)
        .map(|i| profile.roster[i].ptype)
        .unwrap_or(PersonType::OrdinaryGuest);
    // Bridges honor the person's permissions, widened only by the zones the
    // script itself placed them in.
    let scripted_cells: Vec<NodeId> = abnormal
        .iter()
        .map(|r| r.cell().index() as NodeId)
        .collect();
    let mask = mask_with_zones(graph, map, ptype, &scripted_cells);

    let mut bridges: Vec<TrajectoryRecord> = Vec::new();
    for claim in &claims {
        let w = claim.window;
        bg.retain(|r| !w.contains(r.t));

        let scripted: Vec<&&TrajectoryRecord> =
            abnormal.iter().filter(|r| w.contains(r.t)).collect();
        let Some(s_first) = scripted.first() else {
            continue;
        };
        let s_last = scripted.last().unwrap();
        let day = day_of(s_first.t);
        let open = profile.opening_hours.window(day)?;

        // Pre-joint: walk from the last surviving background position into
        // the scripted start, arriving exactly on its first record.
        loop {
            let prev = bg
                .iter()
                .rev()
                .find(|r| r.t < s_first.t && day_of(r.t) == day)
                .copied();
            match prev {
                Some(prev) => {
                    if prev.cell() == s_first.cell() {
                        break;
                    }
                    let route = hallway_route(
                        graph,
                        map,
                        prev.cell().index() as NodeId,
                        s_first.cell().index() as NodeId,
                        &mask,
                    )
                    .map_err(|_| SimError::UnstitchableJoint { pid, window: w })?;
                    let entries = bridge_entries(map, &route.cells, route.cells.len() - 1, s_first.t);
                    // The bridge must not start before the person could have
                    // finished dwelling at the previous record.
                    if entries.len() >= 2 && entries[1] >= prev.t + map.min_dwell(prev.cell()) {
                        for (cell, t) in route.cells.iter().zip(&entries).skip(1) {
                            if *t < s_first.t {
                                bridges.push(TrajectoryRecord::new(
                                    *t,
                                    pid,
                                    CellRef::from_index(*cell as usize),
                                ));
                            }
                        }
                        break;
                    }
                    // Too tight: absorb this background record into the claim.
                    let key = prev.sort_key();
                    bg.retain(|r| r.sort_key() != key);
                }
                None => {
                    // No earlier background today: synthesize the venue entry,
                    // unless the scripted track already starts at one.
                    let gates = map.entrances_for(ptype);
                    let gate = gates[pid as usize % gates.len()].index() as NodeId;
                    let already_in = gates.iter().any(|g| *g == s_first.cell());
                    if !already_in && gate != s_first.cell().index() as NodeId {
                        let route =
                            hallway_route(graph, map, gate, s_first.cell().index() as NodeId, &mask)
                                .map_err(|_| SimError::UnstitchableJoint { pid, window: w })?;
                        let entries =
                            bridge_entries(map, &route.cells, route.cells.len() - 1, s_first.t);
                        if entries[0] < open.start {
                            return Err(SimError::UnstitchableJoint { pid, window: w });
                        }
                        for (cell, t) in route.cells.iter().zip(&entries) {
                            if *t < s_first.t {
                                bridges.push(TrajectoryRecord::new(
                                    *t,
                                    pid,
                                    CellRef::from_index(*cell as usize),
                                ));
                            }
                        }
                    }
                    break;
                }
            }
        }

        // Post-joint: walk from the scripted end back onto the surviving
        // background, swallowing records the walk cannot reach in time.
        loop {
            let next = bg
                .iter()
                .find(|r| r.t > s_last.t && day_of(r.t) == day)
                .copied();
            match next {
                Some(next) => {
                    if next.cell() == s_last.cell() {
                        break;
                    }
                    let route = hallway_route(
                        graph,
                        map,
                        s_last.cell().index() as NodeId,
                        next.cell().index() as NodeId,
                        &mask,
                    )
                    .map_err(|_| SimError::UnstitchableJoint { pid, window: w })?;
                    // Leave when the forced behavior ends, walk at pace, idle
                    // on the last hallway cell of the route, and walk the
                    // in-zone tail so as to land on the background record
                    // exactly when it happens.
                    let depart = (s_last.t + map.min_dwell(s_last.cell())).max(claim.depart_t);
                    let n = route.cells.len();
                    let is_transit = |node: NodeId| -> bool {
                        map.zone_of(CellRef::from_index(node as usize))
                            .map(|z| {
                                matches!(
                                    map.zones[z as usize].name.as_str(),
                                    "corridor" | "stairs" | "entrance" | "vip_channel"
                                )
                            })
                            .unwrap_or(false)
                    };
                    let wait_at = (0..n - 1)
                        .rev()
                        .find(|i| is_transit(route.cells[*i]))
                        .unwrap_or(0);
                    let head = bridge_entries(map, &route.cells, 0, depart);
                    let tail = bridge_entries(map, &route.cells, n - 1, next.t);
                    let mut entries = head;
                    entries[0] = depart;
                    for i in wait_at + 1..n {
                        entries[i] = tail[i];
                    }
                    let feasible = n >= 2
                        && (wait_at == 0
                            || entries[wait_at] - entries[wait_at - 1] > 0)
                        && entries[wait_at + 1] - entries[wait_at]
                            >= map.min_dwell(CellRef::from_index(route.cells[wait_at] as usize))
                        && entries[0] >= depart
                        && entries.windows(2).all(|w| w[1] > w[0]);
                    if feasible {
                        for (cell, t) in route.cells.iter().zip(&entries).skip(1) {
                            if *t < next.t {
                                bridges.push(TrajectoryRecord::new(
                                    *t,
                                    pid,
                                    CellRef::from_index(*cell as usize),
                                ));
                            }
                        }
                        break;
                    }
                    let key = next.sort_key();
                    bg.retain(|r| r.sort_key() != key);
                }
                None => {
                    // Nothing left today: walk out through the entrance so the
                    // day still ends at an exit, unless the scripted track
                    // already finished at one.
                    let gates = map.entrances_for(ptype);
                    let gate = gates[pid as usize % gates.len()].index() as NodeId;
                    let already_out = gates.iter().any(|g| *g == s_last.cell());
                    if !already_out && gate != s_last.cell().index() as NodeId {
                        let depart = s_last.t.max(claim.depart_t);
                        let route =
                            hallway_route(graph, map, s_last.cell().index() as NodeId, gate, &mask)
                                .map_err(|_| SimError::UnstitchableJoint { pid, window: w })?;
                        let entries = bridge_entries(map, &route.cells, 0, depart);
                        if *entries.last().unwrap() > open.end {
                            return Err(SimError::UnstitchableJoint { pid, window: w });
                        }
                        for (cell, t) in route.cells.iter().zip(&entries).skip(1) {
                            bridges.push(TrajectoryRecord::new(
                                *t,
                                pid,
                                CellRef::from_index(*cell as usize),
                            ));
                        }
                    }
                    break;
                }
            }
        }
    }

    let mut merged = bg;
    merged.extend(bridges);
    merged.extend(abnormal.iter().map(|r| **r));
    merged.sort_unstable_by_key(|r| r.sort_key());
    merged.dedup();
    Ok(merged)
}

/// Entry times along a bridge: the anchored variant of the scripted walk
/// timing, using uncongested dwells.
fn bridge_entries(map: &VenueMap, cells: &[NodeId], anchor: usize, anchor_t: i64) -> Vec<i64> {
    let dwell: Vec<i64> = cells
        .iter()
        .map(|n| map.min_dwell(CellRef::from_index(*n as usize)))
        .collect();
    let mut entries = vec![0; cells.len()];
    entries[anchor] = anchor_t;
    for i in (0..anchor).rev() {
        entries[i] = entries[i + 1] - dwell[i];
    }
    for i in anchor + 1..cells.len() {
        entries[i] = entries[i - 1] + dwell[i - 1];
    }
    entries
}

/// Drop records of failed sensors inside their outage windows.
pub fn mask_sensor_failures(
    stream: Vec<TrajectoryRecord>,
    windows: &[(Vec<u32>, Window)],
) -> Vec<TrajectoryRecord> {
    if windows.is_empty() {
        return stream;
    }
    stream
        .into_iter()
        .filter(|r| {
            let sid = r.sid();
            !windows
                .iter()
                .any(|(sids, w)| w.contains(r.t) && sids.contains(&sid))
        })
        .collect()
}

/// Collapse consecutive same-cell records of a pid to the earliest (cell-entry
/// semantics). A new day is a new entry, so runs never collapse across the
/// daily boundary. Output in canonical order.
pub fn dedup(mut stream: Vec<TrajectoryRecord>) -> Vec<TrajectoryRecord> {
    stream.sort_unstable_by_key(|r| (r.pid, r.t, r.floor, r.y, r.x));
    let mut out: Vec<TrajectoryRecord> = Vec::with_capacity(stream.len());
    for r in stream {
        match out.last() {
            Some(prev)
                if prev.pid == r.pid
                    && prev.cell() == r.cell()
                    && day_of(prev.t) == day_of(r.t) => {}
            _ => out.push(r),
        }
    }
    sort_stream(&mut out);
    out
}

pub const CSV_HEADER: &str = "t,pid,floor,x,y,sid";

/// Write the canonical dataset CSV. With `wallclock` the time column renders
/// as `day hh:mm:ss` instead of absolute seconds.
pub fn emit_csv(stream: &[TrajectoryRecord], path: &Path, wallclock_times: bool) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::with_capacity(1 << 20, file);
    writeln!(w, "{CSV_HEADER}")?;
    for r in stream {
        if wallclock_times {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                wallclock(r.t),
                r.pid,
                r.floor,
                r.x,
                r.y,
                r.sid()
            )?;
        } else {
            writeln!(w, "{},{},{},{},{},{}", r.t, r.pid, r.floor, r.x, r.y, r.sid())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a canonical dataset CSV, validating structure and sid consistency.
pub fn read_csv(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::with_capacity(1 << 20, file);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(SimError::CsvParse {
                    line: 1,
                    msg: format!("expected header `{CSV_HEADER}`, got `{line}`"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| -> Result<i64> {
            parts
                .next()
                .ok_or_else(|| SimError::CsvParse {
                    line: lineno,
                    msg: format!("missing field `{name}`"),
                })?
                .trim()
                .parse()
                .map_err(|_| SimError::CsvParse {
                    line: lineno,
                    msg: format!("bad integer in field `{name}`"),
                })
        };
        let t = field("t")?;
        let pid = field("pid")? as u32;
        let floor = field("floor")?;
        let x = field("x")?;
        let y = field("y")?;
        let sid = field("sid")? as u32;
        if !CellRef::valid(floor as i32, x as i32, y as i32) {
            return Err(SimError::CsvParse {
                line: lineno,
                msg: format!("coordinates out of range: floor {floor}, x {x}, y {y}"),
            });
        }
        let cell = CellRef::new(floor as u8, x as u8, y as u8);
        match cell_of_sid(sid) {
            Ok(c) if c == cell => {}
            _ => {
                return Err(SimError::CsvParse {
                    line: lineno,
                    msg: format!("sid {sid} does not match coordinates"),
                });
            }
        }
        out.push(TrajectoryRecord::new(t, pid, cell));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timebase::at;

    fn rec(t: i64, pid: u32, f: u8, x: u8, y: u8) -> TrajectoryRecord {
        TrajectoryRecord::new(t, pid, CellRef::new(f, x, y))
    }

    #[test]
    fn dedup_collapses_stationary_runs() {
        let mut stream = Vec::new();
        for i in 0..600 {
            stream.push(rec(27_000 + i, 1, 1, 5, 7));
        }
        let out = dedup(stream);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].t, 27_000);
    }

    #[test]
    fn dedup_keeps_alternations() {
        let stream = vec![
            rec(100, 1, 1, 5, 7),
            rec(110, 1, 1, 6, 7),
            rec(120, 1, 1, 5, 7),
            rec(130, 1, 1, 6, 7),
        ];
        let out = dedup(stream.clone());
        assert_eq!(out, stream);
    }

    #[test]
    fn dedup_is_idempotent() {
        let mut rng = crate::rng::SimRng::new(31);
        let mut stream = Vec::new();
        for _ in 0..2000 {
            stream.push(rec(
                rng.range_i64(0, 500),
                rng.range_i64(1, 5) as u32,
                1,
                rng.range_i64(1, 4) as u8,
                rng.range_i64(1, 4) as u8,
            ));
        }
        let once = dedup(stream);
        let twice = dedup(once.clone());
        assert_eq!(once, twice);
    }

    #[test]
    fn masking_drops_exact_window_only() {
        let sids = vec![10715];
        let w = Window::new(at(2, 13, 33, 21), at(2, 13, 56, 15));
        let stream = vec![
            rec(at(2, 13, 33, 20), 1, 1, 15, 7),
            rec(at(2, 13, 33, 21), 2, 1, 15, 7),
            rec(at(2, 13, 56, 15), 3, 1, 15, 7),
            rec(at(2, 13, 56, 16), 4, 1, 15, 7),
            rec(at(2, 13, 40, 0), 5, 1, 16, 7), // different sid, untouched
        ];
        let out = mask_sensor_failures(stream.clone(), &[(sids.clone(), w)]);
        let pids: Vec<u32> = out.iter().map(|r| r.pid).collect();
        assert_eq!(pids, vec![1, 4, 5]);
        // Idempotent, and the empty mask is the identity.
        assert_eq!(mask_sensor_failures(out.clone(), &[(sids, w)]), out);
        assert_eq!(mask_sensor_failures(stream.clone(), &[]), stream);
    }

    #[test]
    fn csv_roundtrip_and_exact_line() {
        let dir = std::env::temp_dir().join("venuesim_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("one.csv");
        let stream = vec![rec(27_000, 1, 1, 15, 7)];
        emit_csv(&stream, &path, false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,pid,floor,x,y,sid\n27000,1,1,15,7,10715\n");
        assert_eq!(read_csv(&path).unwrap(), stream);

        // Header-only file for an empty stream.
        let empty = dir.join("empty.csv");
        emit_csv(&[], &empty, false).unwrap();
        assert_eq!(
            std::fs::read_to_string(&empty).unwrap(),
            "t,pid,floor,x,y,sid\n"
        );
        assert!(read_csv(&empty).unwrap().is_empty());
    }

    #[test]
    fn csv_reader_reports_line_numbers() {
        let dir = std::env::temp_dir().join("venuesim_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "t,pid,floor,x,y,sid\n100,1,1,5,7,10705\nnot,a,row\n").unwrap();
        match read_csv(&path) {
            Err(SimError::CsvParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        // sid mismatching coordinates is rejected.
        let path2 = dir.join("bad_sid.csv");
        std::fs::write(&path2, "t,pid,floor,x,y,sid\n100,1,1,5,7,10999\n").unwrap();
        assert!(matches!(
            read_csv(&path2),
            Err(SimError::CsvParse { line: 2, .. })
        ));
    }
}
