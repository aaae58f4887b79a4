//! Dataset validation: physical-consistency checks and one rule-based
//! detector per builtin anomaly event. Works over any canonical CSV plus the
//! profile that generated it.

pub mod detectors;
mod physical;

pub use physical::check_physical;

use std::collections::BTreeMap;

use crate::error::{Result, Window};
use crate::events::executor::EventPlan;
use crate::model::{CellRef, VenueMap};
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::routing::GridGraph;

/// One validation finding, reproducible from the input file alone.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Finding {
    pub check: String,
    pub pids: Vec<u32>,
    pub window: Window,
    pub cells: Vec<CellRef>,
    pub message: String,
}

/// Continuity exemptions derived from the enabled scripts: sensor outages and
/// duplicate-badge overlay windows.
#[derive(Debug, Clone, Default)]
pub struct Waivers {
    pub sensor_masks: Vec<(Vec<u32>, Window)>,
    pub overlay_pids: Vec<(u32, Window)>,
}

impl Waivers {
    pub fn from_plan(plan: &EventPlan) -> Waivers {
        Waivers {
            sensor_masks: plan.sensor_masks.clone(),
            overlay_pids: plan.ghost_windows.clone(),
        }
    }

    pub fn pid_waived(&self, pid: u32, t1: i64, t2: i64) -> bool {
        self.overlay_pids
            .iter()
            .any(|(p, w)| *p == pid && (w.contains(t1) || w.contains(t2)))
    }
}

/// Oracle thresholds for the event detectors. These concretize narrative
/// descriptions; they are tuned for the default configuration and exposed so
/// other datasets can adjust them.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    /// E1: a hop needs at least this fraction of the uncongested travel time.
    pub e1_max_pair_gap_s: i64,
    /// E2: round trips within the span needed to flag an item search.
    pub e2_min_trips: usize,
    pub e2_span_s: i64,
    pub e2_near_s: i64,
    /// E3: cells qualify as busy below this median inter-record gap.
    pub e3_busy_median_s: i64,
    pub e3_min_gap_s: i64,
    pub e3_min_cells: usize,
    pub e3_min_daily_records: usize,
    /// Silence boundaries across the block must align this tightly.
    pub e3_edge_spread_s: i64,
    /// Ignore gaps within this margin of opening and closing, where arrival
    /// and departure waves align boundaries on their own.
    pub e3_day_edge_s: i64,
    /// E5: a session is packed at this multiple of its hall's median load.
    pub e5_ratio: f64,
    pub e5_min_mean: f64,
    pub e5_trim_s: i64,
    /// E6: saturation level and how long it must persist.
    pub e6_sc: f64,
    pub e6_sustain_s: i64,
    /// E7: dense-cluster shape inside the exhibition hall.
    pub e7_cell_occ: u32,
    pub e7_cluster_total: u32,
    pub e7_sustain_s: i64,
    /// Clusters beginning within this span after opening are the normal
    /// morning inflow, not a gathering.
    pub e7_day_start_margin_s: i64,
    /// E8: co-movement group shape.
    pub e8_min_group: usize,
    pub e8_lag_s: i64,
    pub e8_min_shared: usize,
    pub e8_min_records: usize,
    pub e8_first_gap_s: i64,
    /// E9: stationary time inside an active zone.
    pub e9_stationary_s: i64,
    /// E10: how early an exit counts as early.
    pub e10_early_s: i64,
    /// E12: lunch-shift detection shape.
    pub e12_episode_min_s: i64,
    pub e12_wave_share: f64,
    pub e12_union_share: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            e1_max_pair_gap_s: 900,
            e2_min_trips: 3,
            e2_span_s: 5400,
            e2_near_s: 1800,
            e3_busy_median_s: 30,
            e3_min_gap_s: 900,
            e3_min_cells: 6,
            e3_min_daily_records: 200,
            e3_edge_spread_s: 45,
            e3_day_edge_s: 5400,
            e5_ratio: 2.8,
            e5_min_mean: 800.0,
            e5_trim_s: 600,
            e6_sc: 0.88,
            e6_sustain_s: 240,
            e7_cell_occ: 27,
            e7_cluster_total: 300,
            e7_sustain_s: 900,
            e7_day_start_margin_s: 9000,
            e8_min_group: 50,
            e8_lag_s: 60,
            e8_min_shared: 15,
            e8_min_records: 15,
            e8_first_gap_s: 300,
            e9_stationary_s: 14_400,
            e10_early_s: 7200,
            e12_episode_min_s: 1200,
            e12_wave_share: 0.35,
            e12_union_share: 0.8,
        }
    }
}

/// Per-pid view of a dataset, shared by all checks.
pub struct DatasetIndex {
    /// Records sorted by (pid, t).
    pub by_pid: Vec<TrajectoryRecord>,
    /// pid -> range into `by_pid`.
    pub spans: Vec<(u32, std::ops::Range<usize>)>,
}

impl DatasetIndex {
    pub fn build(records: &[TrajectoryRecord]) -> DatasetIndex {
        let mut by_pid: Vec<TrajectoryRecord> = records.to_vec();
        by_pid.sort_unstable_by_key(|r| (r.pid, r.t, r.floor, r.y, r.x));
        let mut spans = Vec::new();
        let mut start = 0;
        for i in 1..=by_pid.len() {
            if i == by_pid.len() || by_pid[i].pid != by_pid[start].pid {
                spans.push((by_pid[start].pid, start..i));
                start = i;
            }
        }
        DatasetIndex { by_pid, spans }
    }

    pub fn pids(&self) -> impl Iterator<Item = u32> + '_ {
        self.spans.iter().map(|(pid, _)| *pid)
    }

    pub fn of(&self, pid: u32) -> &[TrajectoryRecord] {
        match self.spans.binary_search_by_key(&pid, |(p, _)| *p) {
            Ok(i) => &self.by_pid[self.spans[i].1.clone()],
            Err(_) => &[],
        }
    }
}

pub struct ValidationReport {
    pub physical: Vec<Finding>,
    pub events: BTreeMap<String, Vec<Finding>>,
}

impl ValidationReport {
    pub fn total_findings(&self) -> usize {
        self.physical.len() + self.events.values().map(Vec::len).sum::<usize>()
    }
}

pub const EVENT_IDS: [&str; 12] = [
    "E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "E10", "E11", "E12",
];

/// Run the physical suite and all twelve detectors.
pub fn validate_all(
    records: &[TrajectoryRecord],
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    waivers: &Waivers,
    params: &DetectorParams,
) -> Result<ValidationReport> {
    let index = DatasetIndex::build(records);
    let physical = check_physical(records, &index, profile, map, graph, waivers);
    let mut events = BTreeMap::new();
    for id in EVENT_IDS {
        let findings = detectors::detect_event(&index, profile, map, graph, id, params)?;
        events.insert(id.to_string(), findings);
    }
    Ok(ValidationReport { physical, events })
}
