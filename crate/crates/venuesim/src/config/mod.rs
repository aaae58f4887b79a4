//! Configuration tree: the venue map, the schedule, roster and behavior
//! parameters, and the set of event scripts. All files are versioned JSON;
//! unknown keys are hard errors.

mod default;

pub use default::{default_map_file, default_tree, FAILED_SIDS, LATE_STAFF_PIDS, TECHNICIAN_PID};

use std::collections::BTreeMap;
use std::path::Path;

use crate::dynamics::{FormulaMode, Thresholds};
use crate::error::{Result, SimError, Window};
use crate::events::script::EventScript;
use crate::model::venue::{CellRef, GridCell, VenueMap, Zone, CELL_COUNT, GRID_H, GRID_W};
use crate::model::{Activity, ActivityKind, Permission, PersonType, ALL_PERSON_TYPES};
use crate::routing::GridGraph;
use crate::timebase::{hms, OpeningHours, DAY_SECONDS};

pub const CONFIG_VERSION: u32 = 1;

// ── Map file ────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneDef {
    pub key: char,
    pub name: String,
    pub capacity: u16,
    /// Empty list means unrestricted.
    #[serde(default)]
    pub restricted_to: Vec<PersonType>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub version: u32,
    /// Cell rows per floor, `floors[f][y]` is a 31-char string, `#` = wall.
    pub floors: Vec<Vec<String>>,
    pub zones: Vec<ZoneDef>,
    /// Vertical links: pairs of (floor, x, y) cells.
    pub stairs: Vec<((u8, u8, u8), (u8, u8, u8))>,
    pub entrance_zone: String,
    pub vip_entrance_zone: String,
    /// Monotone capacity -> max speed table; larger capacity, lower speed.
    pub speed_by_capacity: Vec<(u16, f64)>,
}

impl MapFile {
    pub fn speed_for(&self, capacity: u16) -> Option<f64> {
        self.speed_by_capacity
            .iter()
            .find(|(c, _)| *c == capacity)
            .map(|(_, s)| *s)
    }
}

/// Build and validate the venue map from its file form.
pub fn build_map(file: &MapFile) -> Result<VenueMap> {
    let mut problems = Vec::new();

    let mut table = file.speed_by_capacity.clone();
    table.sort_by_key(|(c, _)| *c);
    for w in table.windows(2) {
        if w[1].1 > w[0].1 {
            problems.push(format!(
                "speed table not monotone: capacity {} -> {} but {} -> {}",
                w[0].0, w[0].1, w[1].0, w[1].1
            ));
        }
    }

    let mut by_key: BTreeMap<char, usize> = BTreeMap::new();
    for (i, z) in file.zones.iter().enumerate() {
        if by_key.insert(z.key, i).is_some() {
            problems.push(format!("duplicate zone key `{}`", z.key));
        }
        if file.speed_for(z.capacity).is_none() {
            problems.push(format!(
                "zone `{}` capacity {} missing from the speed table",
                z.name, z.capacity
            ));
        }
    }

    if file.floors.len() != 2 {
        problems.push(format!("expected 2 floors, got {}", file.floors.len()));
    }

    let mut cells: Vec<Option<GridCell>> = vec![None; CELL_COUNT];
    let mut zones: Vec<Zone> = file
        .zones
        .iter()
        .map(|z| Zone {
            name: z.name.clone(),
            restricted_to: z.restricted_to.clone(),
            cells: Vec::new(),
            capacity_per_cell: z.capacity,
            max_speed: file.speed_for(z.capacity).unwrap_or(0.0),
        })
        .collect();

    for (f, rows) in file.floors.iter().enumerate().take(2) {
        if rows.len() != GRID_H as usize {
            problems.push(format!("floor {} has {} rows, expected {}", f + 1, rows.len(), GRID_H));
            continue;
        }
        for (y, row) in rows.iter().enumerate() {
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != GRID_W as usize {
                problems.push(format!(
                    "floor {} row {} has {} cells, expected {}",
                    f + 1,
                    y,
                    chars.len(),
                    GRID_W
                ));
                continue;
            }
            for (x, ch) in chars.iter().enumerate() {
                if *ch == '#' {
                    continue;
                }
                let Some(&zi) = by_key.get(ch) else {
                    problems.push(format!("floor {} ({x},{y}): unknown zone key `{ch}`", f + 1));
                    continue;
                };
                let cell = CellRef::new(f as u8 + 1, x as u8, y as u8);
                cells[cell.index()] = Some(GridCell {
                    zone: zi as u16,
                    capacity: zones[zi].capacity_per_cell,
                    max_speed: zones[zi].max_speed,
                });
                zones[zi].cells.push(cell);
            }
        }
    }

    let mut stairs = Vec::new();
    for (a, b) in &file.stairs {
        let ca = CellRef::new(a.0, a.1, a.2);
        let cb = CellRef::new(b.0, b.1, b.2);
        if a.0 == b.0 {
            problems.push(format!("stair {ca}-{cb} links cells on the same floor"));
        }
        for c in [ca, cb] {
            if !CellRef::valid(c.floor as i32, c.x as i32, c.y as i32)
                || cells[c.index()].is_none()
            {
                problems.push(format!("stair cell {c} is not walkable"));
            }
        }
        stairs.push((ca, cb));
    }

    let zone_cells = |name: &str| -> Vec<CellRef> {
        zones
            .iter()
            .find(|z| z.name == name)
            .map(|z| z.cells.clone())
            .unwrap_or_default()
    };
    // People enter and leave through the ground-level row of the entrance zones.
    let entrance_cells: Vec<CellRef> = zone_cells(&file.entrance_zone)
        .into_iter()
        .filter(|c| c.y == 0)
        .collect();
    let vip_cells: Vec<CellRef> = zone_cells(&file.vip_entrance_zone)
        .into_iter()
        .filter(|c| c.y == 0)
        .collect();
    if entrance_cells.is_empty() {
        problems.push(format!("entrance zone `{}` has no ground cells", file.entrance_zone));
    }
    if vip_cells.is_empty() {
        problems.push(format!(
            "vip entrance zone `{}` has no ground cells",
            file.vip_entrance_zone
        ));
    }

    if !problems.is_empty() {
        return Err(SimError::ConfigValidation(problems));
    }

    let map = VenueMap::new(cells, zones, stairs, entrance_cells, vip_cells);
    validate_reachability(&map)?;
    Ok(map)
}

/// Every personnel type must reach every zone it is allowed into from its own
/// entrance, walking only through permitted cells.
fn validate_reachability(map: &VenueMap) -> Result<()> {
    let graph = GridGraph::build(map);
    let mut problems = Vec::new();
    for ptype in ALL_PERSON_TYPES {
        let mask = graph.mask_for(map, ptype);
        let entrances = map.entrances_for(ptype);
        let Some(start) = entrances.first() else {
            problems.push(format!("{ptype}: no entrance cells"));
            continue;
        };
        let dist = graph.distances(start.index() as u16, &mask);
        for zone in &map.zones {
            if !zone.allows(ptype) || zone.cells.is_empty() {
                continue;
            }
            let reachable = zone
                .cells
                .iter()
                .any(|c| dist[c.index()] != u32::MAX);
            if !reachable {
                problems.push(format!("{ptype}: zone `{}` unreachable from entrance", zone.name));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(SimError::ConfigValidation(problems))
    }
}

// ── Schedule file ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivityDef {
    pub name: String,
    pub kind: ActivityKind,
    pub zone: String,
    pub day: u8,
    /// "H:MM" or "H:MM:SS" within the day; empty means the opening window edge.
    #[serde(default)]
    pub start: String,
    #[serde(default)]
    pub end: String,
    pub permission: Permission,
    pub priority: u8,
    #[serde(default)]
    pub standing: bool,
    /// Scales the drawn base attraction; below 1.0 marks niche content.
    #[serde(default = "default_appeal")]
    pub appeal: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub focus_cells: Vec<(u8, u8, u8)>,
}

fn default_appeal() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub version: u32,
    pub activities: Vec<ActivityDef>,
}

pub fn parse_clock(text: &str) -> Result<i64> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || SimError::ConfigValidation(vec![format!("bad clock time `{text}`")]);
    match parts.as_slice() {
        [h, m] => Ok(hms(
            h.parse().map_err(|_| bad())?,
            m.parse().map_err(|_| bad())?,
            0,
        )),
        [h, m, s] => Ok(hms(
            h.parse().map_err(|_| bad())?,
            m.parse().map_err(|_| bad())?,
            s.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

/// Resolve schedule definitions into concrete activities with absolute windows.
pub fn build_activities(
    schedule: &ScheduleFile,
    hours: &OpeningHours,
    map: &VenueMap,
) -> Result<Vec<Activity>> {
    let mut problems = Vec::new();
    let mut out = Vec::with_capacity(schedule.activities.len());
    for (i, def) in schedule.activities.iter().enumerate() {
        match build_one_activity(def, i as u32 + 1, hours, map) {
            Ok(a) => out.push(a),
            Err(SimError::ConfigValidation(mut v)) => problems.append(&mut v),
            Err(e) => problems.push(e.to_string()),
        }
    }
    let mut names = BTreeMap::new();
    for a in &out {
        if let Some(prev) = names.insert(a.name.clone(), a.aid) {
            problems.push(format!("duplicate activity name `{}` (aids {prev}, {})", a.name, a.aid));
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(SimError::ConfigValidation(problems))
    }
}

fn build_one_activity(
    def: &ActivityDef,
    aid: u32,
    hours: &OpeningHours,
    map: &VenueMap,
) -> Result<Activity> {
    let mut problems = Vec::new();
    if map.zone_id(&def.zone).is_err() {
        problems.push(format!("activity `{}` in unknown zone `{}`", def.name, def.zone));
    }
    let open = hours.window(def.day).map_err(|e| {
        SimError::ConfigValidation(vec![format!("activity `{}`: {e}", def.name)])
    })?;
    let base = (def.day as i64 - 1) * DAY_SECONDS;
    let start = if def.start.is_empty() {
        open.start
    } else {
        base + parse_clock(&def.start)?
    };
    let end = if def.end.is_empty() {
        open.end
    } else {
        base + parse_clock(&def.end)?
    };
    if start >= end {
        problems.push(format!("activity `{}`: start is not before end", def.name));
    }
    if start < open.start || end > open.end {
        problems.push(format!(
            "activity `{}`: window outside opening hours of day {}",
            def.name, def.day
        ));
    }
    for (f, x, y) in &def.focus_cells {
        let c = CellRef::new(*f, *x, *y);
        if !CellRef::valid(*f as i32, *x as i32, *y as i32) || !map.is_walkable(c) {
            problems.push(format!("activity `{}`: focus cell {c} not walkable", def.name));
        } else if map.zone_of(c) != map.zone_id(&def.zone).ok() {
            problems.push(format!("activity `{}`: focus cell {c} outside its zone", def.name));
        }
    }
    if !problems.is_empty() {
        return Err(SimError::ConfigValidation(problems));
    }
    Ok(Activity {
        aid,
        name: def.name.clone(),
        kind: def.kind,
        zone: def.zone.clone(),
        day: def.day,
        window: Window::new(start, end),
        permission: def.permission.clone(),
        priority: def.priority,
        standing: def.standing,
        appeal: def.appeal,
        focus_cells: def.focus_cells.clone(),
    })
}

// ── Master config ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosterConfig {
    pub counts: BTreeMap<PersonType, u32>,
    /// Pids that must exist with the given type (event actors).
    pub forced_pids: Vec<(u32, PersonType)>,
    pub pid_range: (u32, u32),
    pub age_ranges: BTreeMap<PersonType, (u8, u8)>,
    pub jobs: BTreeMap<PersonType, Vec<String>>,
}

impl RosterConfig {
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    /// Per-epoch decay for the youngest and oldest ages; interpolated between.
    pub edr_young: f64,
    pub edr_old: f64,
    /// Multiplicative jitter around the age value.
    pub edr_jitter: f64,
    pub e_min: (f64, f64),
    /// Exit threshold sits this far above the floor.
    pub et_margin: (f64, f64),
    /// Daily entry energy declines by up to this much with age.
    pub e0_age_penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorParams {
    pub decision_epoch_s: i64,
    pub entry_jitter_s: i64,
    pub exit_grace_s: i64,
    /// Staff duty begins this long after opening.
    pub staff_duty_offset_s: i64,
    pub staff_advance_s: (i64, i64),
    /// Duty-bound people head to their duty this long before it starts.
    pub duty_lead_s: i64,
    pub signin_dwell_s: (i64, i64),
    pub fidget_interval_s: (i64, i64),
    pub restroom_interval_s: (i64, i64),
    pub restroom_dwell_s: (i64, i64),
    pub workroom_visit_interval_s: (i64, i64),
    pub workroom_visit_dwell_s: (i64, i64),
    pub route_perturb_strength: f64,
    pub blocked_replan_s: i64,
    /// Upper bound on the congested per-cell crossing time. Full cells are
    /// handled by the admission gate, not by unbounded dwells.
    pub max_dwell_s: i64,
    pub formula_mode: FormulaMode,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterestParams {
    pub iv_max: (f64, f64),
    pub iv_min: (f64, f64),
    /// Initial interest as a fraction of `iv_max`.
    pub civ0_frac: (f64, f64),
    pub idr: (f64, f64),
    pub irr: (f64, f64),
    pub adr: (f64, f64),
    /// Share of pairings that lose interest over time (positive trend).
    pub adt_positive_share: f64,
    pub adt_positive: (f64, f64),
    pub adt_negative: (f64, f64),
    /// Base pull ranges per person type and activity kind; missing entries
    /// mean the type never chooses that kind.
    pub affinity: BTreeMap<PersonType, BTreeMap<ActivityKind, (f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasterConfig {
    pub version: u32,
    pub opening_hours: OpeningHours,
    pub thresholds: Thresholds,
    pub roster: RosterConfig,
    pub energy: EnergyParams,
    pub behavior: BehaviorParams,
    pub interest: InterestParams,
}

// ── Config tree ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTree {
    pub master: MasterConfig,
    pub map_file: MapFile,
    pub schedule: ScheduleFile,
    pub scripts: Vec<EventScript>,
}

impl ConfigTree {
    pub fn load(dir: &Path) -> Result<ConfigTree> {
        let master: MasterConfig = read_json(&dir.join("config.json"))?;
        let map_file: MapFile = read_json(&dir.join("map.json"))?;
        let schedule: ScheduleFile = read_json(&dir.join("schedule.json"))?;
        let events_dir = dir.join("events");
        let mut scripts = Vec::new();
        if events_dir.is_dir() {
            let mut paths: Vec<_> = std::fs::read_dir(&events_dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            paths.sort();
            for p in paths {
                scripts.push(read_json::<EventScript>(&p)?);
            }
        }
        let tree = ConfigTree {
            master,
            map_file,
            schedule,
            scripts,
        };
        tree.validate()?;
        Ok(tree)
    }

    pub fn save(&self, dir: &Path, force: bool) -> Result<()> {
        if dir.exists() {
            let occupied = std::fs::read_dir(dir)?.next().is_some();
            if occupied && !force {
                return Err(SimError::ConfigValidation(vec![format!(
                    "directory {} is not empty (use --force to overwrite)",
                    dir.display()
                )]));
            }
        }
        std::fs::create_dir_all(dir.join("events"))?;
        write_json(&dir.join("config.json"), &self.master)?;
        write_json(&dir.join("map.json"), &self.map_file)?;
        write_json(&dir.join("schedule.json"), &self.schedule)?;
        for s in &self.scripts {
            let num: String = s.id.chars().filter(char::is_ascii_digit).collect();
            let stem = format!("E{:02}", num.parse::<u32>().unwrap_or(0));
            write_json(&dir.join("events").join(format!("{stem}.json")), s)?;
        }
        Ok(())
    }

    /// Cross-file validation. Returns the built map on success so callers do
    /// not have to rebuild it.
    pub fn validate(&self) -> Result<VenueMap> {
        let mut problems = Vec::new();
        let map = build_map(&self.map_file)?;
        self.master.thresholds.validate()?;
        if let Err(SimError::ConfigValidation(mut v)) =
            build_activities(&self.schedule, &self.master.opening_hours, &map)
        {
            problems.append(&mut v);
        }

        let mut forced_by_type: BTreeMap<PersonType, u32> = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        for (pid, ptype) in &self.master.roster.forced_pids {
            if !seen.insert(*pid) {
                problems.push(format!("forced pid {pid} listed twice"));
            }
            *forced_by_type.entry(*ptype).or_default() += 1;
            let (lo, hi) = self.master.roster.pid_range;
            if *pid < lo || *pid > hi {
                problems.push(format!("forced pid {pid} outside pid range"));
            }
        }
        for (ptype, n) in &forced_by_type {
            let have = self.master.roster.counts.get(ptype).copied().unwrap_or(0);
            if have < *n {
                problems.push(format!("{ptype}: {n} forced pids but only {have} slots"));
            }
        }
        let (lo, hi) = self.master.roster.pid_range;
        if hi.saturating_sub(lo) + 1 < self.master.roster.total() {
            problems.push("pid range smaller than roster".into());
        }

        let mut ids = std::collections::HashSet::new();
        for s in &self.scripts {
            if let Err(e) = s.validate_shape() {
                problems.push(e.to_string());
            }
            if !ids.insert(s.id.clone()) {
                problems.push(format!("duplicate event id {}", s.id));
            }
            for p in &s.patches {
                if let crate::events::script::ProfilePatch::AttractBoost { activity, .. } = p {
                    let in_schedule =
                        self.schedule.activities.iter().any(|a| &a.name == activity);
                    let added = self.scripts.iter().any(|other| {
                        other.patches.iter().any(|q| {
                            matches!(q, crate::events::script::ProfilePatch::AddActivity { name, .. } if name == activity)
                        })
                    });
                    if !in_schedule && !added {
                        problems.push(format!(
                            "script {}: boost references unknown activity `{activity}`",
                            s.id
                        ));
                    }
                }
            }
        }

        if problems.is_empty() {
            Ok(map)
        } else {
            Err(SimError::ConfigValidation(problems))
        }
    }

    pub fn script(&self, id: &str) -> Option<&EventScript> {
        self.scripts.iter().find(|s| s.id == id)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| SimError::json(path.display().to_string(), e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| SimError::json(path.display().to_string(), e))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tree_validates() {
        let tree = default_tree();
        tree.validate().expect("default tree must validate");
    }

    #[test]
    fn default_schedule_counts() {
        let tree = default_tree();
        let main = tree
            .schedule
            .activities
            .iter()
            .filter(|a| a.kind == ActivityKind::AcademicMain)
            .count();
        let sub = tree
            .schedule
            .activities
            .iter()
            .filter(|a| a.kind == ActivityKind::AcademicSub)
            .count();
        assert_eq!(main, 12);
        assert_eq!(sub, 22);
    }

    #[test]
    fn default_scripts_enumerate_all_twelve() {
        let tree = default_tree();
        let mut ids: Vec<String> = tree.scripts.iter().map(|s| s.id.clone()).collect();
        ids.sort();
        let mut expect: Vec<String> = (1..=12).map(|i| format!("E{i}")).collect();
        expect.sort();
        assert_eq!(ids, expect);
    }

    #[test]
    fn permission_rules_on_default_map() {
        let map = build_map(&default_map_file()).unwrap();
        assert!(!map.permitted(PersonType::MediaReporter, "vip_lounge").unwrap());
        assert!(map.permitted(PersonType::VipGuest, "vip_lounge").unwrap());
        assert!(!map.permitted(PersonType::Visitor, "main_venue").unwrap());
        assert!(map.permitted(PersonType::Visitor, "exhibition_hall").unwrap());
        assert!(map.permitted(PersonType::MediaReporter, "media_room").unwrap());
        assert!(!map.permitted(PersonType::Staff, "media_room").unwrap());
        assert!(map.permitted(PersonType::Staff, "work_room").unwrap());
        assert!(map.permitted(PersonType::Staff, "main_venue").unwrap());
        assert!(map.permitted(PersonType::Staff, "hacking_contest").unwrap());
        assert!(!map.permitted(PersonType::OrdinaryGuest, "hacking_contest").unwrap());
        assert!(map.permitted(PersonType::OrdinaryGuest, "corridor").unwrap());
        assert!(map.permitted(PersonType::HackingContestant, "canteen").unwrap());
        assert!(!map.permitted(PersonType::Visitor, "canteen").unwrap());
        assert!(map.permitted(PersonType::VipGuest, "vip_channel").unwrap());
        assert!(!map.permitted(PersonType::Exhibitor, "vip_channel").unwrap());
        assert!(map.permitted(PersonType::VipGuest, "corridor").unwrap());
        assert!(matches!(
            map.permitted(PersonType::VipGuest, "atrium"),
            Err(SimError::UnknownZone(_))
        ));
    }

    #[test]
    fn tampered_speed_table_is_rejected() {
        let mut file = default_map_file();
        // Break monotonicity: large capacity gets a higher speed.
        for (c, s) in &mut file.speed_by_capacity {
            if *c == 400 {
                *s = 4.0;
            }
        }
        assert!(matches!(build_map(&file), Err(SimError::ConfigValidation(_))));
    }

    #[test]
    fn activity_in_unknown_zone_reports_all_violations() {
        let tree = default_tree();
        let map = build_map(&tree.map_file).unwrap();
        let mut schedule = tree.schedule.clone();
        schedule.activities[0].zone = "atlantis".into();
        schedule.activities[1].zone = "mars".into();
        match build_activities(&schedule, &tree.master.opening_hours, &map) {
            Err(SimError::ConfigValidation(v)) => {
                assert!(v.iter().any(|m| m.contains("atlantis")));
                assert!(v.iter().any(|m| m.contains("mars")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
