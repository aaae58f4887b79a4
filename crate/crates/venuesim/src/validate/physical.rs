//! Physical-consistency suite: per-pid monotonicity, adjacency between
//! consecutive records, minimum dwell times, reconstructed occupancy against
//! capacity, and opening-hours confinement.

use std::collections::HashMap;

use crate::error::Window;
use crate::model::{CellRef, VenueMap, CELL_COUNT};
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::routing::{GridGraph, NodeId};
use crate::timebase::day_of;

use super::{DatasetIndex, Finding, Waivers};

const MAX_FINDINGS_PER_CHECK: usize = 40;

struct Collector {
    findings: Vec<Finding>,
    suppressed: HashMap<String, usize>,
}

impl Collector {
    fn new() -> Self {
        Collector {
            findings: Vec::new(),
            suppressed: HashMap::new(),
        }
    }

    fn push(&mut self, f: Finding) {
        let n = self
            .findings
            .iter()
            .filter(|x| x.check == f.check)
            .count();
        if n < MAX_FINDINGS_PER_CHECK {
            self.findings.push(f);
        } else {
            *self.suppressed.entry(f.check).or_default() += 1;
        }
    }

    fn finish(mut self) -> Vec<Finding> {
        for (check, n) in self.suppressed {
            self.findings.push(Finding {
                check: check.clone(),
                pids: vec![],
                window: Window::new(0, 0),
                cells: vec![],
                message: format!("{n} further findings suppressed"),
            });
        }
        self.findings
    }
}

pub fn check_physical(
    records: &[TrajectoryRecord],
    index: &DatasetIndex,
    profile: &Profile,
    map: &VenueMap,
    graph: &GridGraph,
    waivers: &Waivers,
) -> Vec<Finding> {
    let mut out = Collector::new();
    let hours = &profile.opening_hours;

    // Opening-hours confinement.
    for r in records {
        let day = day_of(r.t);
        let ok = hours.window(day).map(|w| w.contains(r.t)).unwrap_or(false);
        if !ok {
            out.push(Finding {
                check: "physical/opening-hours".into(),
                pids: vec![r.pid],
                window: Window::new(r.t, r.t),
                cells: vec![r.cell()],
                message: format!("record at {} outside opening hours", r.t),
            });
        }
    }

    // Per-pid continuity, dwell and monotonicity.
    let mut lb_cache: HashMap<NodeId, Vec<i64>> = HashMap::new();
    for (pid, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        for pair in recs.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if waivers.pid_waived(*pid, a.t, b.t) {
                continue;
            }
            if b.t == a.t {
                out.push(Finding {
                    check: "physical/monotonic".into(),
                    pids: vec![*pid],
                    window: Window::new(a.t, b.t),
                    cells: vec![a.cell(), b.cell()],
                    message: "two records at the same second".into(),
                });
                continue;
            }
            if day_of(a.t) != day_of(b.t) {
                continue;
            }
            let (na, nb) = (a.cell().index() as NodeId, b.cell().index() as NodeId);
            if na == nb {
                out.push(Finding {
                    check: "physical/duplicate".into(),
                    pids: vec![*pid],
                    window: Window::new(a.t, b.t),
                    cells: vec![a.cell()],
                    message: "consecutive records in the same cell survived dedup".into(),
                });
                continue;
            }
            if graph.adjacent(na, nb) {
                let dwell = map.min_dwell(a.cell());
                if b.t - a.t < dwell {
                    out.push(Finding {
                        check: "physical/dwell".into(),
                        pids: vec![*pid],
                        window: Window::new(a.t, b.t),
                        cells: vec![a.cell(), b.cell()],
                        message: format!(
                            "crossed {} in {}s, minimum is {dwell}s",
                            a.cell(),
                            b.t - a.t
                        ),
                    });
                }
                continue;
            }
            // Non-adjacent: acceptable only when the pair spans a sensor
            // outage and the elapsed time allows the unobserved walk.
            let spans_mask = waivers
                .sensor_masks
                .iter()
                .any(|(_, w)| a.t <= w.end && b.t >= w.start);
            if spans_mask {
                let lb = lb_cache
                    .entry(na)
                    .or_insert_with(|| graph.min_travel_times(map, na));
                if b.t - a.t >= lb[nb as usize] {
                    continue;
                }
            }
            out.push(Finding {
                check: "physical/adjacency".into(),
                pids: vec![*pid],
                window: Window::new(a.t, b.t),
                cells: vec![a.cell(), b.cell()],
                message: format!("{} -> {} is not a grid step", a.cell(), b.cell()),
            });
        }
    }

    // Reconstructed occupancy against capacity: a person holds a cell from a
    // record until the next one (or one minimum dwell after the day's last).
    let mut deltas: Vec<(i64, i32, u32)> = Vec::with_capacity(records.len() * 2);
    for (_, span) in &index.spans {
        let recs = &index.by_pid[span.clone()];
        for (i, r) in recs.iter().enumerate() {
            let idx = r.cell().index() as u32;
            let leave = match recs.get(i + 1) {
                Some(next) if day_of(next.t) == day_of(r.t) => next.t,
                _ => r.t + map.min_dwell(r.cell()),
            };
            deltas.push((r.t, 1, idx));
            deltas.push((leave, -1, idx));
        }
    }
    deltas.sort_unstable_by_key(|(t, d, _)| (*t, *d));
    let mut occ = vec![0i32; CELL_COUNT];
    let mut over_since = vec![i64::MIN; CELL_COUNT];
    let mut flagged = vec![false; CELL_COUNT];
    // Brief squeezes while scripted walkers cross an otherwise-full cell are
    // tolerated; sustained packing beyond capacity is not.
    const OVERFLOW_GRACE_S: i64 = 120;
    for (t, d, idx) in deltas {
        let i = idx as usize;
        if map.cell_at(i).is_none() {
            if d > 0 && !flagged[i] {
                flagged[i] = true;
                out.push(Finding {
                    check: "physical/walkable".into(),
                    pids: vec![],
                    window: Window::new(t, t),
                    cells: vec![CellRef::from_index(i)],
                    message: "record in a structural (non-walkable) cell".into(),
                });
            }
            continue;
        }
        let cap = map.cell_at(i).map(|c| c.capacity).unwrap_or(0) as i32;
        let was_over = occ[i] > cap;
        occ[i] += d;
        let is_over = occ[i] > cap;
        if is_over && !was_over {
            over_since[i] = t;
        }
        if is_over && !flagged[i] && t - over_since[i] >= OVERFLOW_GRACE_S {
            flagged[i] = true;
            out.push(Finding {
                check: "physical/capacity".into(),
                pids: vec![],
                window: Window::new(over_since[i], t),
                cells: vec![CellRef::from_index(i)],
                message: format!("reconstructed occupancy {} exceeds capacity {cap}", occ[i]),
            });
        }
    }

    out.finish()
}
