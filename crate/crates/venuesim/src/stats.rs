//! Dataset summaries: per-day record counts, unique pids, per-zone occupancy
//! series, and per-type entry/exit histograms.

use std::collections::BTreeMap;

use crate::model::VenueMap;
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::timebase::day_of;

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct DayStats {
    pub records: usize,
    pub unique_pids: usize,
    pub first_record_t: Option<i64>,
    pub last_record_t: Option<i64>,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct DatasetStats {
    pub records: usize,
    pub unique_pids: usize,
    pub days: BTreeMap<u8, DayStats>,
    /// Hour-of-day histograms of first/last daily records per personnel type.
    pub entries_by_type: BTreeMap<String, Vec<usize>>,
    pub exits_by_type: BTreeMap<String, Vec<usize>>,
    /// Integral of zone occupancy over time, equal to total person-seconds
    /// inside the venue.
    pub person_seconds: u64,
}

/// One row of the per-zone occupancy series (minute resolution).
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZoneOccupancyRow {
    pub t: i64,
    pub zone: String,
    pub occupancy: i64,
}

pub fn summarize(
    records: &[TrajectoryRecord],
    map: &VenueMap,
    profile: Option<&Profile>,
) -> DatasetStats {
    let mut stats = DatasetStats {
        records: records.len(),
        ..DatasetStats::default()
    };

    let mut by_pid: BTreeMap<u32, Vec<&TrajectoryRecord>> = BTreeMap::new();
    for r in records {
        by_pid.entry(r.pid).or_default().push(r);
        let day = stats.days.entry(day_of(r.t)).or_default();
        day.records += 1;
        day.first_record_t = Some(day.first_record_t.map_or(r.t, |t| t.min(r.t)));
        day.last_record_t = Some(day.last_record_t.map_or(r.t, |t| t.max(r.t)));
    }
    stats.unique_pids = by_pid.len();

    let mut day_pids: BTreeMap<u8, std::collections::HashSet<u32>> = BTreeMap::new();
    for r in records {
        day_pids.entry(day_of(r.t)).or_default().insert(r.pid);
    }
    for (day, pids) in day_pids {
        stats.days.entry(day).or_default().unique_pids = pids.len();
    }

    let type_of = |pid: u32| -> String {
        profile
            .and_then(|p| p.person_index(pid))
            .map(|i| profile.unwrap().roster[i].ptype.label().to_string())
            .unwrap_or_else(|| "unknown".into())
    };
    for t in crate::model::ALL_PERSON_TYPES {
        stats.entries_by_type.insert(t.label().into(), vec![0; 24]);
        stats.exits_by_type.insert(t.label().into(), vec![0; 24]);
    }
    stats.entries_by_type.insert("unknown".into(), vec![0; 24]);
    stats.exits_by_type.insert("unknown".into(), vec![0; 24]);

    for (pid, recs) in &by_pid {
        let label = type_of(*pid);
        let mut per_day: BTreeMap<u8, (i64, i64)> = BTreeMap::new();
        for r in recs {
            let e = per_day.entry(day_of(r.t)).or_insert((r.t, r.t));
            e.0 = e.0.min(r.t);
            e.1 = e.1.max(r.t);
        }
        for (_, (first, last)) in per_day {
            let fh = (first.rem_euclid(86_400) / 3600) as usize;
            let lh = (last.rem_euclid(86_400) / 3600) as usize;
            stats.entries_by_type.get_mut(&label).unwrap()[fh] += 1;
            stats.exits_by_type.get_mut(&label).unwrap()[lh] += 1;
        }
    }

    // Person-seconds: each record holds its cell until the pid's next record
    // of the same day, plus one minimum dwell after the daily last record.
    let mut total: u64 = 0;
    for recs in by_pid.values() {
        for (i, r) in recs.iter().enumerate() {
            let leave = match recs.get(i + 1) {
                Some(next) if day_of(next.t) == day_of(r.t) => next.t,
                _ => r.t + map.min_dwell(r.cell()),
            };
            total += (leave - r.t).max(0) as u64;
        }
    }
    stats.person_seconds = total;

    stats
}

/// Minute-resolution occupancy per zone, suitable for CSV export / plotting.
pub fn zone_series(records: &[TrajectoryRecord], map: &VenueMap) -> Vec<ZoneOccupancyRow> {
    let mut by_pid: BTreeMap<u32, Vec<&TrajectoryRecord>> = BTreeMap::new();
    for r in records {
        by_pid.entry(r.pid).or_default().push(r);
    }
    let mut deltas: BTreeMap<(u16, i64), i64> = BTreeMap::new();
    for recs in by_pid.values() {
        for (i, r) in recs.iter().enumerate() {
            let Some(zone) = map.zone_of(r.cell()) else {
                continue;
            };
            let leave = match recs.get(i + 1) {
                Some(next) if day_of(next.t) == day_of(r.t) => next.t,
                _ => r.t + map.min_dwell(r.cell()),
            };
            *deltas.entry((zone, r.t)).or_default() += 1;
            *deltas.entry((zone, leave)).or_default() -= 1;
        }
    }
    let mut rows = Vec::new();
    let mut level: BTreeMap<u16, i64> = BTreeMap::new();
    let mut last_minute: BTreeMap<u16, i64> = BTreeMap::new();
    for ((zone, t), d) in deltas {
        let minute = t / 60 * 60;
        let lvl = level.entry(zone).or_default();
        if last_minute.get(&zone) != Some(&minute) && *lvl != 0 {
            rows.push(ZoneOccupancyRow {
                t: minute,
                zone: map.zones[zone as usize].name.clone(),
                occupancy: *lvl,
            });
            last_minute.insert(zone, minute);
        }
        *lvl += d;
    }
    rows.sort_by(|a, b| (a.t, &a.zone).cmp(&(b.t, &b.zone)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CellRef;

    #[test]
    fn empty_dataset_yields_zeroed_summary() {
        let map = crate::config::build_map(&crate::config::default_map_file()).unwrap();
        let stats = summarize(&[], &map, None);
        assert_eq!(stats.records, 0);
        assert_eq!(stats.unique_pids, 0);
        assert_eq!(stats.person_seconds, 0);
        assert!(stats.days.is_empty());
    }

    #[test]
    fn person_seconds_integrates_presence() {
        let map = crate::config::build_map(&crate::config::default_map_file()).unwrap();
        // One pid in a corridor cell for 100s, then an adjacent cell.
        let recs = vec![
            TrajectoryRecord::new(30_000, 1, CellRef::new(1, 10, 7)),
            TrajectoryRecord::new(30_100, 1, CellRef::new(1, 11, 7)),
        ];
        let stats = summarize(&recs, &map, None);
        // 100s in the first cell + one min-dwell (8s) after the last record.
        assert_eq!(stats.person_seconds, 108);
    }
}
