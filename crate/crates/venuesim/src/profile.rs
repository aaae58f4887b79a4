//! Profile construction: instantiating the entity models, drawing the
//! behavior parameters, wiring duties, and applying the enabled scripts'
//! initializer patches. A profile is fully determined by (config, seed,
//! scale, days, events) and serializes to a reload-exact JSON file.

use std::collections::BTreeMap;

use crate::config::{ConfigTree, MapFile, MasterConfig};
use crate::dynamics::{FormulaMode, Thresholds};
use crate::error::{Result, SimError, Window};
use crate::events::script::{CohortSel, EventScript, ProfilePatch};
use crate::model::{
    duty_role, Activity, ActivityKind, DutyStint, Gender, Permission, Person, PersonType,
    VenueMap,
};
use crate::rng::SimRng;
use crate::timebase::OpeningHours;

pub const PROFILE_VERSION: u32 = 1;

/// Which scripts a run enables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventSelection {
    All,
    None,
    Some(Vec<String>),
}

impl EventSelection {
    pub fn parse(text: &str) -> EventSelection {
        match text.trim() {
            "all" => EventSelection::All,
            "none" => EventSelection::None,
            other => EventSelection::Some(
                other
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            ),
        }
    }

    pub fn selects(&self, id: &str) -> bool {
        match self {
            EventSelection::All => true,
            EventSelection::None => false,
            EventSelection::Some(ids) => ids.iter().any(|i| i == id),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub seed: u64,
    pub scale: f64,
    pub days: Vec<u8>,
    pub events: EventSelection,
    pub formula_mode: Option<FormulaMode>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            seed: 20190422,
            scale: 1.0,
            days: vec![1, 2, 3],
            events: EventSelection::All,
            formula_mode: None,
        }
    }
}

/// Interest and attraction parameters of one (person, activity) pairing.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub civ0: f64,
    pub iv_min: f64,
    pub iv_max: f64,
    pub idr: f64,
    pub irr: f64,
    pub adt: f64,
    pub adr: f64,
    pub cav0: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub version: u32,
    pub seed: u64,
    pub scale: f64,
    pub days: Vec<u8>,
    pub enabled_events: Vec<String>,
    pub formula_mode: FormulaMode,
    pub opening_hours: OpeningHours,
    pub thresholds: Thresholds,
    pub behavior: crate::config::BehaviorParams,
    pub roster: Vec<Person>,
    pub activities: Vec<Activity>,
    /// Row-major pairing table: `pairs[person_index * activities.len() + act_index]`.
    pub pairs: Vec<PairParams>,
    /// Intended roles of scripted pids; lets scaled-down runs remap event
    /// actors onto surviving roster members of the same type.
    #[serde(default)]
    pub pid_roles: Vec<(u32, PersonType)>,
    pub map_file: MapFile,
}

impl Profile {
    #[inline]
    pub fn pair(&self, person_idx: usize, act_idx: usize) -> &PairParams {
        &self.pairs[person_idx * self.activities.len() + act_idx]
    }

    pub fn person_index(&self, pid: u32) -> Option<usize> {
        self.roster.binary_search_by_key(&pid, |p| p.pid).ok()
    }

    pub fn activity_by_name(&self, name: &str) -> Option<&Activity> {
        self.activities.iter().find(|a| a.name == name)
    }

    /// Pids of one type, ascending (the order role slices index into).
    pub fn role_members(&self, role: PersonType) -> Vec<u32> {
        self.roster
            .iter()
            .filter(|p| p.ptype == role)
            .map(|p| p.pid)
            .collect()
    }

    pub fn resolve_cohort(&self, sel: &CohortSel) -> Vec<u32> {
        let mut out = Vec::new();
        for role in &sel.roles {
            for (i, pid) in self.role_members(*role).into_iter().enumerate() {
                if sel.rems.contains(&(i as u32 % sel.modulo)) {
                    out.push(pid);
                }
            }
        }
        out
    }

    pub fn build_map(&self) -> Result<VenueMap> {
        crate::config::build_map(&self.map_file)
    }

    /// Resolve a scripted pid against this roster: present pids map to
    /// themselves, absent ones (reduced scales) to a same-type member.
    pub fn resolve_pid(&self, pid: u32) -> Option<u32> {
        if self.person_index(pid).is_some() {
            return Some(pid);
        }
        let role = self.pid_roles.iter().find(|(p, _)| *p == pid)?.1;
        let members = self.role_members(role);
        if members.is_empty() {
            None
        } else {
            Some(members[pid as usize % members.len()])
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        crate::config::write_json(path, self)
    }

    pub fn load(path: &std::path::Path) -> Result<Profile> {
        crate::config::read_json(path)
    }

    /// First duty beginning of `person` on `day`, if any.
    pub fn first_duty_start(&self, person: &Person, day: u8) -> Option<i64> {
        let open = self.opening_hours.window(day).ok()?;
        if person.is_staff() {
            return Some(open.start + self.behavior.staff_duty_offset_s);
        }
        person
            .duties
            .iter()
            .filter_map(|d| {
                let act = &self.activities[(d.aid - 1) as usize];
                let w = d.window.unwrap_or(act.window);
                (act.day == day).then_some(w.start)
            })
            .min()
    }
}

fn q4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

fn q6(x: f64) -> f64 {
    (x * 1_000_000.0).round() / 1_000_000.0
}

/// Instantiate entities and behavior models from a validated config tree.
pub fn init_profile(tree: &ConfigTree, opts: &GenOptions) -> Result<Profile> {
    let map = tree.validate()?;
    for day in &opts.days {
        tree.master.opening_hours.window(*day)?;
    }
    if opts.scale <= 0.0 {
        return Err(SimError::OutOfRange {
            what: "scale",
            value: opts.scale,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }

    let enabled: Vec<&EventScript> = tree
        .scripts
        .iter()
        .filter(|s| opts.events.selects(&s.id))
        .collect();
    if let EventSelection::Some(ids) = &opts.events {
        for id in ids {
            if tree.script(id).is_none() {
                return Err(SimError::ScriptValidation {
                    script: id.clone(),
                    problems: vec!["unknown event id".into()],
                });
            }
        }
    }

    let mut activities = crate::config::build_activities(
        &tree.schedule,
        &tree.master.opening_hours,
        &map,
    )?;
    apply_activity_patches(&mut activities, &enabled, &tree.master, &map)?;

    let roster = build_roster(&tree.master, opts)?;
    let pairs = build_pairs(&tree.master, &roster, &activities, opts.seed);

    let mut profile = Profile {
        version: PROFILE_VERSION,
        seed: opts.seed,
        scale: opts.scale,
        days: opts.days.clone(),
        enabled_events: enabled.iter().map(|s| s.id.clone()).collect(),
        formula_mode: opts
            .formula_mode
            .unwrap_or(tree.master.behavior.formula_mode),
        opening_hours: tree.master.opening_hours.clone(),
        thresholds: tree.master.thresholds,
        behavior: tree.master.behavior,
        roster,
        activities,
        pairs,
        pid_roles: tree.master.roster.forced_pids.clone(),
        map_file: tree.map_file.clone(),
    };
    assign_duties(&mut profile, &tree.master, &map);
    apply_attract_boosts(&mut profile, &enabled);
    Ok(profile)
}

fn apply_activity_patches(
    activities: &mut Vec<Activity>,
    enabled: &[&EventScript],
    master: &MasterConfig,
    map: &VenueMap,
) -> Result<()> {
    for script in enabled {
        for patch in &script.patches {
            if let ProfilePatch::AddActivity {
                name,
                activity_kind,
                zone,
                day,
                start_s,
                end_s,
                priority,
                focus_cells,
            } = patch
            {
                map.zone_id(zone)?;
                let open = master.opening_hours.window(*day)?;
                if *start_s < open.start || *end_s > open.end || start_s >= end_s {
                    return Err(SimError::ScriptValidation {
                        script: script.id.clone(),
                        problems: vec![format!("added activity `{name}` outside opening hours")],
                    });
                }
                activities.push(Activity {
                    aid: activities.len() as u32 + 1,
                    name: name.clone(),
                    kind: *activity_kind,
                    zone: zone.clone(),
                    day: *day,
                    window: Window::new(*start_s, *end_s),
                    permission: Permission::All,
                    priority: *priority,
                    standing: false,
                    appeal: 1.0,
                    focus_cells: focus_cells.clone(),
                });
            }
        }
    }
    Ok(())
}

fn build_roster(master: &MasterConfig, opts: &GenOptions) -> Result<Vec<Person>> {
    let roster_cfg = &master.roster;
    let mut counts: BTreeMap<PersonType, u32> = BTreeMap::new();
    for (ptype, n) in &roster_cfg.counts {
        counts.insert(*ptype, (f64::from(*n) * opts.scale).round() as u32);
    }

    // Deterministic pid pool, independent of roster composition.
    let (lo, hi) = roster_cfg.pid_range;
    let mut pool: Vec<u32> = (lo..=hi).collect();
    SimRng::derive(opts.seed, "roster/pids").shuffle(&mut pool);

    let forced: Vec<(u32, PersonType)> = roster_cfg.forced_pids.clone();
    let forced_set: std::collections::HashSet<u32> = forced.iter().map(|(p, _)| *p).collect();

    // Forced pids fill their type's slots first; at small scales the surplus
    // is dropped (scripts remap those actors to surviving members).
    let mut assigned: Vec<(u32, PersonType)> = Vec::new();
    let mut remaining = counts.clone();
    for (pid, ptype) in &forced {
        let slot = remaining.entry(*ptype).or_default();
        if *slot > 0 {
            *slot -= 1;
            assigned.push((*pid, *ptype));
        }
    }

    let mut labels: Vec<PersonType> = Vec::new();
    for (ptype, n) in &remaining {
        labels.extend(std::iter::repeat(*ptype).take(*n as usize));
    }
    SimRng::derive(opts.seed, "roster/types").shuffle(&mut labels);
    let mut pool_iter = pool.into_iter().filter(|p| !forced_set.contains(p));
    for label in labels {
        let pid = pool_iter.next().ok_or_else(|| {
            SimError::ConfigValidation(vec!["pid range exhausted".into()])
        })?;
        assigned.push((pid, label));
    }
    assigned.sort_unstable_by_key(|(pid, _)| *pid);

    let mut roster = Vec::with_capacity(assigned.len());
    for (pid, ptype) in assigned {
        roster.push(draw_person(master, pid, ptype, opts.seed));
    }
    Ok(roster)
}

fn draw_person(master: &MasterConfig, pid: u32, ptype: PersonType, seed: u64) -> Person {
    let mut rng = SimRng::derive_keyed(seed, "person", pid as u64);
    let (age_lo, age_hi) = master
        .roster
        .age_ranges
        .get(&ptype)
        .copied()
        .unwrap_or((20, 60));
    let age = rng.range_i64(age_lo as i64, age_hi as i64) as u8;
    let gender = if rng.chance(0.5) {
        Gender::Female
    } else {
        Gender::Male
    };
    let jobs = master.roster.jobs.get(&ptype);
    let job = jobs
        .and_then(|v| {
            if v.is_empty() {
                None
            } else {
                Some(v[rng.next_below(v.len() as u64) as usize].clone())
            }
        })
        .unwrap_or_else(|| "attendee".into());

    // Energy declines faster with age; the floor and exit margin vary per person.
    let mut erng = SimRng::derive_keyed(seed, "energy", pid as u64);
    let ep = &master.energy;
    let age_frac = f64::from(age.saturating_sub(18)) / 52.0;
    let base_edr = ep.edr_young + (ep.edr_old - ep.edr_young) * age_frac.clamp(0.0, 1.0);
    let edr = q6(base_edr * (1.0 + ep.edr_jitter * (erng.next_f64() * 2.0 - 1.0)));
    let e_min = q4(erng.range_f64(ep.e_min.0, ep.e_min.1));
    let et = q4(e_min + erng.range_f64(ep.et_margin.0, ep.et_margin.1));
    let e0 = q4(1.0 - ep.e0_age_penalty * age_frac.clamp(0.0, 1.0));

    Person {
        pid,
        ptype,
        gender,
        age,
        job,
        e0,
        e_min,
        edr,
        et,
        duties: Vec::new(),
        post_zone: None,
    }
}

fn build_pairs(
    master: &MasterConfig,
    roster: &[Person],
    activities: &[Activity],
    seed: u64,
) -> Vec<PairParams> {
    let ip = &master.interest;
    let mut pairs = vec![PairParams::default(); roster.len() * activities.len()];
    for (pi, person) in roster.iter().enumerate() {
        let affinity = ip.affinity.get(&person.ptype);
        for (ai, act) in activities.iter().enumerate() {
            if !act.permission.allows(person.ptype) {
                continue;
            }
            let Some((cav_lo, cav_hi)) = affinity.and_then(|m| m.get(&act.kind)).copied() else {
                continue;
            };
            let key = (person.pid as u64) << 24 | act.aid as u64;
            let mut rng = SimRng::derive_keyed(seed, "pair", key);
            let iv_max = q4(rng.range_f64(ip.iv_max.0, ip.iv_max.1));
            let iv_min = q4(rng.range_f64(ip.iv_min.0, ip.iv_min.1).min(iv_max));
            let civ0 = q4((rng.range_f64(ip.civ0_frac.0, ip.civ0_frac.1) * iv_max)
                .clamp(iv_min, iv_max));
            let idr = q4(rng.range_f64(ip.idr.0, ip.idr.1));
            let irr = q4(rng.range_f64(ip.irr.0, ip.irr.1));
            let adt = if rng.chance(ip.adt_positive_share) {
                q4(rng.range_f64(ip.adt_positive.0, ip.adt_positive.1))
            } else {
                q4(rng.range_f64(ip.adt_negative.0, ip.adt_negative.1))
            };
            let adr = q4(rng.range_f64(ip.adr.0, ip.adr.1));
            let cav0 = q4(rng.range_f64(cav_lo, cav_hi) * act.appeal);
            pairs[pi * activities.len() + ai] = PairParams {
                civ0,
                iv_min,
                iv_max,
                idr,
                irr,
                adt,
                adr,
                cav0,
            };
        }
    }
    pairs
}

/// Attach chairs and speakers to academic activities, bind contestants to the
/// contest rounds and exhibitors to booth shifts, and give staff their posts.
fn assign_duties(profile: &mut Profile, master: &MasterConfig, map: &VenueMap) {
    let forced: std::collections::HashSet<u32> = master
        .roster
        .forced_pids
        .iter()
        .map(|(p, _)| *p)
        .collect();

    let idx_of_type = |roster: &[Person], t: PersonType| -> Vec<usize> {
        roster
            .iter()
            .enumerate()
            .filter(|(_, p)| p.ptype == t && !forced.contains(&p.pid))
            .map(|(i, _)| i)
            .collect()
    };
    let vips = idx_of_type(&profile.roster, PersonType::VipGuest);
    let ordinary = idx_of_type(&profile.roster, PersonType::OrdinaryGuest);

    // Chairs and speakers, round-robin with overlap avoidance.
    let margin = 1800;
    let acts: Vec<(usize, Window, ActivityKind, u32)> = profile
        .activities
        .iter()
        .filter(|a| matches!(a.kind, ActivityKind::AcademicMain | ActivityKind::AcademicSub))
        .map(|a| ((a.aid - 1) as usize, a.window, a.kind, a.aid))
        .collect();
    let free = |person: &Person, acts: &[Activity], w: Window| {
        person.duties.iter().all(|d| {
            let aw = d.window.unwrap_or(acts[(d.aid - 1) as usize].window);
            !Window::new(aw.start - margin, aw.end + margin).overlaps(&w)
        })
    };
    let mut chair_cursor = 0usize;
    let mut speaker_cursor = 0usize;
    for (_, window, kind, aid) in &acts {
        let chair_pool = if *kind == ActivityKind::AcademicMain {
            &vips
        } else {
            &ordinary
        };
        for (role, count, pool, cursor) in [
            (duty_role::CHAIR, 1, chair_pool, &mut chair_cursor),
            (duty_role::SPEAKER, 2, &ordinary, &mut speaker_cursor),
        ] {
            let mut placed = 0;
            let mut tried = 0;
            while placed < count && tried < pool.len() {
                let pi = pool[*cursor % pool.len()];
                *cursor += 1;
                tried += 1;
                if free(&profile.roster[pi], &profile.activities, *window) {
                    profile.roster[pi].duties.push(DutyStint {
                        aid: *aid,
                        role_index: role,
                        window: None,
                    });
                    placed += 1;
                }
            }
        }
    }

    // Contestants sit every contest round.
    let contest_aids: Vec<u32> = profile
        .activities
        .iter()
        .filter(|a| a.kind == ActivityKind::Contest)
        .map(|a| a.aid)
        .collect();
    for p in &mut profile.roster {
        if p.ptype == PersonType::HackingContestant {
            for aid in &contest_aids {
                p.duties.push(DutyStint {
                    aid: *aid,
                    role_index: duty_role::CONTESTANT,
                    window: None,
                });
            }
        }
    }

    // Exhibitors hold their booth in two shifts around lunch.
    let exhibitions: Vec<(u32, Window)> = profile
        .activities
        .iter()
        .filter(|a| a.kind == ActivityKind::Exhibition)
        .map(|a| (a.aid, a.window))
        .collect();
    for p in &mut profile.roster {
        if p.ptype == PersonType::Exhibitor {
            for (aid, w) in &exhibitions {
                let lunch_start = (w.start / 86_400) * 86_400 + 12 * 3600;
                let lunch_end = lunch_start + 5400;
                if w.start < lunch_start && w.end > lunch_end {
                    for shift in [
                        Window::new(w.start, lunch_start),
                        Window::new(lunch_end, w.end),
                    ] {
                        p.duties.push(DutyStint {
                            aid: *aid,
                            role_index: duty_role::EXHIBITOR,
                            window: Some(shift),
                        });
                    }
                } else {
                    p.duties.push(DutyStint {
                        aid: *aid,
                        role_index: duty_role::EXHIBITOR,
                        window: None,
                    });
                }
            }
        }
    }

    // Staff posts cycle over the public zones.
    let post_zones: Vec<String> = [
        "entrance",
        "corridor",
        "main_venue",
        "sub_venue_a",
        "sub_venue_b",
        "exhibition_hall",
        "poster_area",
        "service_desk",
        "canteen",
        "corridor",
        "tea_break_1",
        "tea_break_2",
        "leisure_area",
        "hacking_contest",
        "corridor",
    ]
    .iter()
    .filter(|z| map.zone_id(z).is_ok())
    .map(|z| z.to_string())
    .collect();
    let mut staff_i = 0usize;
    for p in &mut profile.roster {
        if p.ptype == PersonType::Staff {
            p.post_zone = Some(post_zones[staff_i % post_zones.len()].clone());
            staff_i += 1;
        }
    }
}

fn apply_attract_boosts(profile: &mut Profile, enabled: &[&EventScript]) {
    for script in enabled {
        for patch in &script.patches {
            if let ProfilePatch::AttractBoost {
                activity,
                cohort,
                cav0_min,
                adt_max,
            } = patch
            {
                let Some(act) = profile.activity_by_name(activity) else {
                    continue;
                };
                let ai = (act.aid - 1) as usize;
                let n = profile.activities.len();
                for pid in profile.resolve_cohort(cohort) {
                    let Some(pi) = profile.person_index(pid) else {
                        continue;
                    };
                    let pair = &mut profile.pairs[pi * n + ai];
                    if pair.iv_max == 0.0 {
                        // Pairing was outside the type's normal tastes; give it
                        // ordinary interest bounds so the boost can act.
                        *pair = PairParams {
                            civ0: 0.7,
                            iv_min: 0.1,
                            iv_max: 0.9,
                            idr: 0.01,
                            irr: 0.01,
                            adt: 0.0,
                            adr: 0.05,
                            cav0: 0.0,
                        };
                    }
                    pair.cav0 = pair.cav0.max(*cav0_min);
                    if let Some(cap) = adt_max {
                        pair.adt = pair.adt.min(*cap);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_tree;

    #[test]
    fn default_roster_has_expected_size() {
        let tree = default_tree();
        let profile = init_profile(&tree, &GenOptions::default()).unwrap();
        assert_eq!(profile.roster.len(), 5256);
        let pids: std::collections::HashSet<u32> =
            profile.roster.iter().map(|p| p.pid).collect();
        assert_eq!(pids.len(), 5256, "pids must be unique");
        // Scripted actors are present with the right types.
        for (pid, expect) in [
            (16632, PersonType::VipGuest),
            (11260, PersonType::VipGuest),
            (19929, PersonType::VipGuest),
            (11201, PersonType::MediaReporter),
            (10733, PersonType::Staff),
            (18347, PersonType::Staff),
        ] {
            let p = &profile.roster[profile.person_index(pid).unwrap()];
            assert_eq!(p.ptype, expect, "pid {pid}");
        }
    }

    #[test]
    fn empty_roster_is_a_valid_profile() {
        let mut tree = default_tree();
        for n in tree.master.roster.counts.values_mut() {
            *n = 0;
        }
        tree.master.roster.forced_pids.clear();
        let profile = init_profile(&tree, &GenOptions::default()).unwrap();
        assert!(profile.roster.is_empty());
        assert!(!profile.activities.is_empty());
    }

    #[test]
    fn profile_is_deterministic_and_reload_exact() {
        let tree = default_tree();
        let mut opts = GenOptions::default();
        opts.scale = 0.02;
        let a = init_profile(&tree, &opts).unwrap();
        let b = init_profile(&tree, &opts).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let back: Profile = serde_json::from_str(&ja).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), ja);
    }

    #[test]
    fn chairs_do_not_overlap() {
        let tree = default_tree();
        let mut opts = GenOptions::default();
        opts.scale = 0.1;
        let profile = init_profile(&tree, &opts).unwrap();
        for p in &profile.roster {
            let windows: Vec<Window> = p
                .duties
                .iter()
                .map(|d| d.window.unwrap_or(profile.activities[(d.aid - 1) as usize].window))
                .collect();
            for (i, a) in windows.iter().enumerate() {
                for b in windows.iter().skip(i + 1) {
                    assert!(!a.overlaps(b), "pid {} double-booked", p.pid);
                }
            }
        }
        // Every academic activity has a chair at this scale.
        for a in profile
            .activities
            .iter()
            .filter(|a| matches!(a.kind, ActivityKind::AcademicMain | ActivityKind::AcademicSub))
        {
            let chairs = profile
                .roster
                .iter()
                .flat_map(|p| &p.duties)
                .filter(|d| d.aid == a.aid && d.role_index == duty_role::CHAIR)
                .count();
            assert_eq!(chairs, 1, "activity {} chairs", a.name);
        }
    }

    #[test]
    fn boost_patch_raises_cohort_pull() {
        let tree = default_tree();
        let mut opts = GenOptions {
            scale: 0.05,
            ..GenOptions::default()
        };
        opts.events = EventSelection::Some(vec!["E5".into()]);
        let boosted = init_profile(&tree, &opts).unwrap();
        opts.events = EventSelection::None;
        let plain = init_profile(&tree, &opts).unwrap();

        let act = boosted
            .activity_by_name("Internet of Things Security Forum")
            .unwrap();
        let ai = (act.aid - 1) as usize;
        let n = boosted.activities.len();
        let cohort = boosted.resolve_cohort(&CohortSel {
            roles: vec![PersonType::OrdinaryGuest, PersonType::Visitor],
            modulo: 3,
            rems: vec![0],
        });
        assert!(!cohort.is_empty());
        for pid in &cohort {
            let pi = boosted.person_index(*pid).unwrap();
            assert!(boosted.pairs[pi * n + ai].cav0 >= 0.92);
        }
        // Someone outside the cohort is untouched.
        let outsider = boosted
            .role_members(PersonType::OrdinaryGuest)
            .into_iter()
            .enumerate()
            .find(|(i, _)| i % 3 == 1)
            .map(|(_, pid)| pid)
            .unwrap();
        let pi = boosted.person_index(outsider).unwrap();
        assert_eq!(boosted.pairs[pi * n + ai], plain.pairs[pi * n + ai]);
    }
}
