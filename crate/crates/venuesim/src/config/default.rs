//! The shipped default configuration: a two-floor conference venue, a
//! three-day schedule (12 main-hall and 22 sub-forum academic activities, a
//! five-round hacking contest, exhibitions, posters, tea breaks, lunches and a
//! banquet), a 5256-person roster split over seven personnel types, and
//! twelve builtin anomaly scripts.

use std::collections::BTreeMap;

use crate::dynamics::{FormulaMode, Thresholds};
use crate::error::Window;
use crate::events::script::{
    ActorSel, ClaimSpec, CohortSel, Directive, EventScript, JointMode, Place, ProfilePatch,
};
use crate::model::{ActivityKind, Permission, PersonType};
use crate::timebase::{at, OpeningHours};

use super::{
    ActivityDef, BehaviorParams, ConfigTree, EnergyParams, InterestParams, MapFile, MasterConfig,
    RosterConfig, ScheduleFile, ZoneDef, CONFIG_VERSION,
};

const FLOOR1: [&str; 17] = [
    "##VVV#########EEEEE############",
    "#.VVV.rrr...........llll.PPPPP#",
    "#.VVV.ttt.DDDD......llll.PPPPP#",
    "#.VVV.ttt.DDDD......llll.PPPPP#",
    "#.VVV.ttt.DDDD......llll.PPPPP#",
    "#.VVV.ttt.DDDD......llll.PPPPP#",
    "#.VVV.SS..................SS..#",
    "#.............................#",
    "#.............................#",
    "#......................XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "#CCCCCCC.MMMMMMMMMMMMM.XXXXXXX#",
    "###############################",
];

const FLOOR2: [&str; 17] = [
    "###############################",
    "#LLLLLL.mmmmm.wwwwwww.uuuu.RRR#",
    "#LLLLLL.mmmmm.wwwwwww.uuuu.RRR#",
    "#LLLLLL.mmmmm.wwwwwww.uuuu.RRR#",
    "#LLLLLL.mmmmm.wwwwwww.uuuu....#",
    "#.............................#",
    "#.....SS..................SS..#",
    "#.............................#",
    "#.............................#",
    "#.............................#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "#AAAAAAAAA.BBBBBBBBB.HHHHHHHHH#",
    "###############################",
];

use PersonType::*;

pub fn default_map_file() -> MapFile {
    let all_but_visitor = vec![
        VipGuest,
        OrdinaryGuest,
        MediaReporter,
        HackingContestant,
        Staff,
        Exhibitor,
    ];
    MapFile {
        version: CONFIG_VERSION,
        floors: vec![
            FLOOR1.iter().map(|s| s.to_string()).collect(),
            FLOOR2.iter().map(|s| s.to_string()).collect(),
        ],
        zones: vec![
            zone('.', "corridor", 400, vec![]),
            zone('E', "entrance", 400, vec![]),
            zone('V', "vip_channel", 50, vec![VipGuest]),
            zone('S', "stairs", 400, vec![]),
            zone('D', "service_desk", 15, vec![]),
            zone('C', "canteen", 30, all_but_visitor.clone()),
            zone('M', "main_venue", 40, all_but_visitor),
            zone('X', "exhibition_hall", 30, vec![]),
            zone('P', "poster_area", 15, vec![]),
            zone('t', "tea_break_1", 20, vec![]),
            zone('u', "tea_break_2", 15, vec![]),
            zone('l', "leisure_area", 15, vec![]),
            zone('r', "restroom_1", 15, vec![]),
            zone('R', "restroom_2", 15, vec![]),
            zone('L', "vip_lounge", 6, vec![VipGuest]),
            zone('m', "media_room", 10, vec![MediaReporter]),
            zone('w', "work_room", 15, vec![Staff]),
            zone('A', "sub_venue_a", 30, vec![]),
            zone('B', "sub_venue_b", 30, vec![]),
            zone('H', "hacking_contest", 20, vec![HackingContestant, Staff]),
        ],
        stairs: vec![
            ((1, 6, 6), (2, 6, 6)),
            ((1, 7, 6), (2, 7, 6)),
            ((1, 26, 6), (2, 26, 6)),
            ((1, 27, 6), (2, 27, 6)),
        ],
        entrance_zone: "entrance".into(),
        vip_entrance_zone: "vip_channel".into(),
        speed_by_capacity: vec![
            (6, 4.0),
            (10, 3.5),
            (15, 3.5),
            (20, 3.0),
            (25, 3.0),
            (30, 2.5),
            (40, 2.0),
            (50, 2.0),
            (400, 1.0),
        ],
    }
}

fn zone(key: char, name: &str, capacity: u16, restricted_to: Vec<PersonType>) -> ZoneDef {
    ZoneDef {
        key,
        name: name.into(),
        capacity,
        restricted_to,
    }
}

// ── Schedule ────────────────────────────────────────────────────────────────

fn act(
    name: &str,
    kind: ActivityKind,
    zone: &str,
    day: u8,
    start: &str,
    end: &str,
    permission: Permission,
    priority: u8,
) -> ActivityDef {
    ActivityDef {
        name: name.into(),
        kind,
        zone: zone.into(),
        day,
        start: start.into(),
        end: end.into(),
        permission,
        priority,
        standing: false,
        appeal: 1.0,
        focus_cells: vec![],
    }
}

fn niche(def: ActivityDef, appeal: f64) -> ActivityDef {
    ActivityDef { appeal, ..def }
}

fn standing(name: &str, kind: ActivityKind, zone: &str, day: u8, permission: Permission) -> ActivityDef {
    ActivityDef {
        name: name.into(),
        kind,
        zone: zone.into(),
        day,
        start: String::new(),
        end: String::new(),
        permission,
        priority: 0,
        standing: true,
        appeal: 1.0,
        focus_cells: vec![],
    }
}

pub fn default_schedule() -> ScheduleFile {
    use ActivityKind::*;
    let guests = || Permission::AllExcept(vec![Visitor]);
    let meals = || Permission::AllExcept(vec![Visitor, Staff]);
    let all = || Permission::All;
    let mut a = Vec::new();

    // Main hall: keynotes preempt, sessions anchor the day.
    a.push(act("Opening Ceremony", AcademicMain, "main_venue", 1, "9:00", "9:45", guests(), 5));
    a.push(act("Keynote: Data Security Frontiers", AcademicMain, "main_venue", 1, "9:45", "10:45", guests(), 6));
    a.push(act("Main Session: IoT Device Integrity", AcademicMain, "main_venue", 1, "11:00", "12:00", guests(), 5));
    a.push(act("Main Session: Privacy Protection Practice", AcademicMain, "main_venue", 1, "13:30", "15:00", guests(), 5));
    a.push(act("Keynote: Intelligent Defense Systems", AcademicMain, "main_venue", 1, "15:30", "16:30", guests(), 6));
    a.push(act("Keynote: Mobile Ecosystems Under Attack", AcademicMain, "main_venue", 2, "9:00", "10:00", guests(), 6));
    a.push(act("Main Session: Smart Venue Security", AcademicMain, "main_venue", 2, "10:30", "12:00", guests(), 5));
    a.push(act("Main Session: Data Governance at Scale", AcademicMain, "main_venue", 2, "13:30", "15:00", guests(), 5));
    a.push(act("Keynote: Threat Intelligence at Scale", AcademicMain, "main_venue", 2, "15:30", "16:45", guests(), 6));
    a.push(act("Keynote: Privacy in the Large", AcademicMain, "main_venue", 3, "8:30", "9:30", guests(), 6));
    a.push(act("Main Session: Smart Security Innovation", AcademicMain, "main_venue", 3, "10:00", "11:30", guests(), 5));
    a.push(act("Closing Ceremony", AcademicMain, "main_venue", 3, "11:45", "12:30", guests(), 5));

    // Sub-forums, hall A.
    a.push(act("Sub-forum: Data Security I", AcademicSub, "sub_venue_a", 1, "9:45", "11:15", all(), 2));
    a.push(act("Sub-forum: Privacy Protection I", AcademicSub, "sub_venue_a", 1, "11:30", "12:30", all(), 2));
    a.push(act("Sub-forum: IoT Security I", AcademicSub, "sub_venue_a", 1, "13:15", "15:15", all(), 2));
    a.push(act("Sub-forum: Smart Venue I", AcademicSub, "sub_venue_a", 1, "15:45", "17:15", all(), 2));
    a.push(act("Sub-forum: Data Security II", AcademicSub, "sub_venue_a", 2, "9:15", "11:15", all(), 2));
    a.push(act("Sub-forum: Privacy Protection II", AcademicSub, "sub_venue_a", 2, "13:00", "14:30", all(), 2));
    a.push(act("Sub-forum: Smart Venue II", AcademicSub, "sub_venue_a", 2, "15:00", "16:30", all(), 2));
    a.push(act("Sub-forum: Mobile Security I", AcademicSub, "sub_venue_a", 2, "16:45", "17:45", all(), 2));
    a.push(act("Sub-forum: Data Security III", AcademicSub, "sub_venue_a", 3, "8:15", "9:45", all(), 2));
    a.push(niche(act("Intelligent Security Technology Innovation Forum", AcademicSub, "sub_venue_a", 3, "10:30", "11:30", all(), 2), 0.5));
    a.push(act("Sub-forum: Privacy Protection III", AcademicSub, "sub_venue_a", 3, "11:45", "12:45", all(), 2));

    // Sub-forums, hall B.
    a.push(act("Sub-forum: Mobile Security II", AcademicSub, "sub_venue_b", 1, "9:45", "11:15", all(), 2));
    a.push(act("Sub-forum: IoT Security II", AcademicSub, "sub_venue_b", 1, "11:30", "12:30", all(), 2));
    a.push(act("Sub-forum: Smart Security I", AcademicSub, "sub_venue_b", 1, "13:15", "15:15", all(), 2));
    a.push(act("Sub-forum: Data Security IV", AcademicSub, "sub_venue_b", 1, "15:45", "17:15", all(), 2));
    a.push(act("Sub-forum: Smart Security II", AcademicSub, "sub_venue_b", 2, "9:15", "11:15", all(), 2));
    a.push(act("Sub-forum: IoT Security III", AcademicSub, "sub_venue_b", 2, "11:45", "12:45", all(), 2));
    a.push(act("Internet of Things Security Forum", AcademicSub, "sub_venue_b", 2, "14:00", "16:15", all(), 2));
    a.push(act("Sub-forum: Privacy Protection IV", AcademicSub, "sub_venue_b", 2, "16:45", "17:45", all(), 2));
    a.push(act("Sub-forum: Smart Venue III", AcademicSub, "sub_venue_b", 3, "8:15", "9:15", all(), 2));
    a.push(act("Mobile Security Forum", AcademicSub, "sub_venue_b", 3, "9:30", "11:30", all(), 2));
    a.push(act("Sub-forum: Smart Security III", AcademicSub, "sub_venue_b", 3, "11:45", "12:45", all(), 2));

    // Hacking contest: knockout format, morning and afternoon rounds.
    let contestants = || Permission::Only(vec![HackingContestant]);
    a.push(act("Hacking Contest: Basic Assessment I", Contest, "hacking_contest", 1, "9:00", "12:00", contestants(), 4));
    a.push(act("Hacking Contest: Additional Assessment I", Contest, "hacking_contest", 1, "13:30", "17:30", contestants(), 4));
    a.push(act("Hacking Contest: Basic Assessment II", Contest, "hacking_contest", 2, "9:00", "12:00", contestants(), 4));
    a.push(act("Hacking Contest: Additional Assessment II", Contest, "hacking_contest", 2, "13:30", "17:30", contestants(), 4));
    a.push(act("Hacking Contest: Final Assessment", Contest, "hacking_contest", 3, "8:30", "12:00", contestants(), 4));

    // All-day floors.
    a.push(act("Business Exhibition (Day 1)", Exhibition, "exhibition_hall", 1, "8:00", "17:45", all(), 1));
    a.push(act("Business Exhibition (Day 2)", Exhibition, "exhibition_hall", 2, "8:30", "19:00", all(), 1));
    a.push(act("Business Exhibition (Day 3)", Exhibition, "exhibition_hall", 3, "8:00", "12:45", all(), 1));
    a.push(act("Poster Session (Day 1)", Poster, "poster_area", 1, "8:00", "17:45", all(), 1));
    a.push(act("Poster Session (Day 2)", Poster, "poster_area", 2, "8:30", "19:00", all(), 1));
    a.push(act("Poster Session (Day 3)", Poster, "poster_area", 3, "8:00", "12:45", all(), 1));

    // Tea breaks in both halls.
    a.push(act("Tea Break Morning 1 (Hall 1)", TeaBreak, "tea_break_1", 1, "10:30", "11:00", all(), 2));
    a.push(act("Tea Break Morning 1 (Hall 2)", TeaBreak, "tea_break_2", 1, "10:30", "11:00", all(), 2));
    a.push(act("Tea Break Afternoon 1 (Hall 1)", TeaBreak, "tea_break_1", 1, "15:00", "15:30", all(), 2));
    a.push(act("Tea Break Afternoon 1 (Hall 2)", TeaBreak, "tea_break_2", 1, "15:00", "15:30", all(), 2));
    a.push(act("Tea Break Morning 2 (Hall 1)", TeaBreak, "tea_break_1", 2, "10:15", "10:45", all(), 2));
    a.push(act("Tea Break Morning 2 (Hall 2)", TeaBreak, "tea_break_2", 2, "10:15", "10:45", all(), 2));
    a.push(act("Tea Break Afternoon 2 (Hall 1)", TeaBreak, "tea_break_1", 2, "15:15", "15:45", all(), 2));
    a.push(act("Tea Break Afternoon 2 (Hall 2)", TeaBreak, "tea_break_2", 2, "15:15", "15:45", all(), 2));
    a.push(act("Tea Break Morning 3 (Hall 1)", TeaBreak, "tea_break_1", 3, "9:45", "10:15", all(), 2));
    a.push(act("Tea Break Morning 3 (Hall 2)", TeaBreak, "tea_break_2", 3, "9:45", "10:15", all(), 2));

    // Meals. Staff dining is organised separately in the work room.
    a.push(act("Lunch Service (Day 1)", Lunch, "canteen", 1, "12:00", "13:30", meals(), 3));
    a.push(act("Lunch Service (Day 2)", Lunch, "canteen", 2, "12:00", "13:30", meals(), 3));
    a.push(act("Conference Banquet", Banquet, "canteen", 2, "17:45", "19:15", meals(), 5));

    // Standing areas, one per day.
    for day in 1..=3 {
        a.push(standing(&format!("VIP Lounge (Day {day})"), VipRest, "vip_lounge", day, Permission::Only(vec![VipGuest])));
        a.push(standing(&format!("Media Workroom (Day {day})"), MediaBase, "media_room", day, Permission::Only(vec![MediaReporter])));
        a.push(standing(&format!("Leisure Area (Day {day})"), Leisure, "leisure_area", day, Permission::All));
    }

    ScheduleFile {
        version: CONFIG_VERSION,
        activities: a,
    }
}

// ── Roster ──────────────────────────────────────────────────────────────────

/// Staff pids scripted to arrive late on day 1.
pub const LATE_STAFF_PIDS: [u32; 9] = [
    18347, 10345, 14859, 18059, 12856, 11396, 14678, 10762, 17576,
];
/// Staff members who inspect the failed sensor block, one per aisle.
pub const TECHNICIAN_PID: u32 = 10733;
pub const TECHNICIAN2_PID: u32 = 10860;

fn default_roster() -> RosterConfig {
    let mut counts = BTreeMap::new();
    counts.insert(VipGuest, 105);
    counts.insert(OrdinaryGuest, 2365);
    counts.insert(Visitor, 1577);
    counts.insert(MediaReporter, 158);
    counts.insert(HackingContestant, 263);
    counts.insert(Staff, 420);
    counts.insert(Exhibitor, 368);

    let mut forced = vec![
        (16632, VipGuest),
        (11260, VipGuest),
        (13344, VipGuest),
        (19929, VipGuest),
        (11201, MediaReporter),
        (16473, MediaReporter),
        (TECHNICIAN_PID, Staff),
        (TECHNICIAN2_PID, Staff),
    ];
    forced.extend(LATE_STAFF_PIDS.iter().map(|p| (*p, Staff)));

    let mut age_ranges = BTreeMap::new();
    age_ranges.insert(VipGuest, (45, 70));
    age_ranges.insert(OrdinaryGuest, (22, 60));
    age_ranges.insert(Visitor, (18, 55));
    age_ranges.insert(MediaReporter, (22, 45));
    age_ranges.insert(HackingContestant, (18, 30));
    age_ranges.insert(Staff, (20, 50));
    age_ranges.insert(Exhibitor, (22, 50));

    let mut jobs = BTreeMap::new();
    jobs.insert(VipGuest, strs(&["professor", "chief scientist", "director", "fellow"]));
    jobs.insert(OrdinaryGuest, strs(&["engineer", "researcher", "analyst", "lecturer", "consultant"]));
    jobs.insert(Visitor, strs(&["student", "developer", "enthusiast", "sales"]));
    jobs.insert(MediaReporter, strs(&["journalist", "photographer", "editor"]));
    jobs.insert(HackingContestant, strs(&["student", "security researcher", "engineer"]));
    jobs.insert(Staff, strs(&["organizer", "usher", "operator", "security"]));
    jobs.insert(Exhibitor, strs(&["sales engineer", "product manager", "solutions architect"]));

    RosterConfig {
        counts,
        forced_pids: forced,
        pid_range: (10000, 19999),
        age_ranges,
        jobs,
    }
}

fn strs(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

// ── Behavior parameters ─────────────────────────────────────────────────────

fn default_interest() -> InterestParams {
    use ActivityKind::*;
    let mut affinity: BTreeMap<PersonType, BTreeMap<ActivityKind, (f64, f64)>> = BTreeMap::new();
    let mut add = |p: PersonType, entries: &[(ActivityKind, f64, f64)]| {
        let m = affinity.entry(p).or_default();
        for (k, lo, hi) in entries {
            m.insert(*k, (*lo, *hi));
        }
    };
    add(VipGuest, &[
        (AcademicMain, 0.70, 1.00),
        (AcademicSub, 0.50, 0.90),
        (Exhibition, 0.20, 0.50),
        (Poster, 0.10, 0.40),
        (TeaBreak, 0.20, 0.50),
        (Lunch, 0.60, 0.90),
        (Banquet, 0.70, 1.00),
        (VipRest, 0.45, 0.70),
        (Leisure, 0.05, 0.20),
        (Special, 0.20, 0.50),
    ]);
    add(OrdinaryGuest, &[
        (AcademicMain, 0.50, 0.95),
        (AcademicSub, 0.40, 0.90),
        (Exhibition, 0.25, 0.70),
        (Poster, 0.20, 0.60),
        (TeaBreak, 0.15, 0.45),
        (Lunch, 0.60, 0.95),
        (Banquet, 0.20, 0.60),
        (Leisure, 0.05, 0.30),
        (Special, 0.20, 0.60),
    ]);
    add(Visitor, &[
        (AcademicSub, 0.30, 0.70),
        (Exhibition, 0.40, 0.85),
        (Poster, 0.40, 0.80),
        (TeaBreak, 0.15, 0.45),
        (Leisure, 0.10, 0.40),
        (Special, 0.30, 0.70),
    ]);
    add(MediaReporter, &[
        (AcademicMain, 0.40, 0.80),
        (AcademicSub, 0.30, 0.70),
        (Exhibition, 0.30, 0.60),
        (Poster, 0.20, 0.50),
        (TeaBreak, 0.10, 0.40),
        (Lunch, 0.50, 0.90),
        (Banquet, 0.30, 0.70),
        (MediaBase, 0.40, 0.70),
        (Leisure, 0.05, 0.20),
        (Special, 0.30, 0.60),
    ]);
    add(HackingContestant, &[
        (Contest, 0.90, 1.00),
        (AcademicMain, 0.05, 0.30),
        (AcademicSub, 0.05, 0.30),
        (Exhibition, 0.10, 0.40),
        (Poster, 0.05, 0.30),
        (TeaBreak, 0.10, 0.30),
        (Lunch, 0.60, 0.95),
        (Banquet, 0.10, 0.40),
        (Leisure, 0.05, 0.20),
    ]);
    // Staff movement is duty-driven; no interest-based attendance.
    add(Staff, &[]);
    add(Exhibitor, &[
        (Exhibition, 0.50, 0.80),
        (AcademicMain, 0.05, 0.25),
        (AcademicSub, 0.05, 0.20),
        (Poster, 0.10, 0.30),
        (TeaBreak, 0.10, 0.30),
        (Lunch, 0.60, 0.95),
        (Banquet, 0.20, 0.50),
        (Leisure, 0.05, 0.20),
        (Special, 0.10, 0.30),
    ]);

    InterestParams {
        iv_max: (0.60, 0.95),
        iv_min: (0.05, 0.20),
        civ0_frac: (0.40, 1.00),
        idr: (0.005, 0.050),
        irr: (0.002, 0.020),
        adr: (0.00, 0.30),
        adt_positive_share: 0.7,
        adt_positive: (0.0, 0.04),
        adt_negative: (-0.03, 0.0),
        affinity,
    }
}

fn default_master() -> MasterConfig {
    MasterConfig {
        version: CONFIG_VERSION,
        opening_hours: OpeningHours::default(),
        thresholds: Thresholds {
            liv: 0.05,
            siv: 0.15,
            miv: 0.35,
        },
        roster: default_roster(),
        energy: EnergyParams {
            edr_young: 0.0035,
            edr_old: 0.0095,
            edr_jitter: 0.20,
            e_min: (0.05, 0.12),
            et_margin: (0.01, 0.05),
            e0_age_penalty: 0.10,
        },
        behavior: BehaviorParams {
            decision_epoch_s: 60,
            entry_jitter_s: 600,
            exit_grace_s: 900,
            staff_duty_offset_s: 2700,
            staff_advance_s: (1200, 2700),
            duty_lead_s: 600,
            signin_dwell_s: (10, 60),
            fidget_interval_s: (1500, 4800),
            restroom_interval_s: (9000, 16200),
            restroom_dwell_s: (120, 360),
            workroom_visit_interval_s: (7200, 14400),
            workroom_visit_dwell_s: (480, 900),
            route_perturb_strength: 0.10,
            blocked_replan_s: 30,
            max_dwell_s: 45,
            formula_mode: FormulaMode::Contraction,
        },
        interest: default_interest(),
    }
}

// ── Builtin event scripts ───────────────────────────────────────────────────

/// The eight sensors that fail on day 2.
pub const FAILED_SIDS: [u32; 8] = [10715, 10716, 10717, 10718, 10815, 10816, 10817, 10818];

fn builtin_scripts() -> Vec<EventScript> {
    let mut scripts = Vec::new();

    // E1: a copied badge of VIP 16632 rests in the VIP lounge while the real
    // guest is kept walking the exhibition floor, so the merged track is
    // physically impossible.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E1".into(),
        name: "Copy of name badge".into(),
        narrative: "A copied badge of VIP guest 16632 entered the VIP lounge and stayed for about an hour; the wearer is suspected of theft.".into(),
        patches: vec![],
        directives: vec![
            Directive::ForcePresence {
                actor: ActorSel::GhostOf(16632),
                place: Place::Zone("vip_lounge".into()),
                window: Window::new(at(1, 12, 20, 0), at(1, 13, 16, 0)),
                fidget_s: Some((60, 105)),
                entry: JointMode::Entrance,
                exit: JointMode::Entrance,
                claim: ClaimSpec::Auto,
            },
            Directive::ForcePresence {
                actor: ActorSel::Pid(16632),
                place: Place::Zone("exhibition_hall".into()),
                window: Window::new(at(1, 12, 20, 0), at(1, 13, 16, 0)),
                fidget_s: Some((240, 420)),
                entry: JointMode::Background,
                exit: JointMode::Background,
                claim: ClaimSpec::Auto,
            },
        ],
    });

    // E2: VIP 11260 shuttles between the VIP lounge and the service desk
    // looking for a lost item.
    let lounge = |s: i64, e: i64, f: (i64, i64)| Directive::ForcePresence {
        actor: ActorSel::Pid(11260),
        place: Place::Zone("vip_lounge".into()),
        window: Window::new(s, e),
        fidget_s: Some(f),
        entry: JointMode::Background,
        exit: JointMode::Background,
        claim: ClaimSpec::Auto,
    };
    let desk = |s: i64, e: i64| Directive::ForcePresence {
        actor: ActorSel::Pid(11260),
        place: Place::Zone("service_desk".into()),
        window: Window::new(s, e),
        fidget_s: Some((45, 80)),
        entry: JointMode::Background,
        exit: JointMode::Background,
        claim: ClaimSpec::Auto,
    };
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E2".into(),
        name: "Item missing".into(),
        narrative: "VIP guest 11260 rested in the VIP lounge after lunch and went to the service desk repeatedly to ask about a missing item.".into(),
        patches: vec![],
        directives: vec![
            lounge(at(1, 13, 10, 0), at(1, 13, 20, 0), (90, 150)),
            desk(at(1, 13, 24, 0), at(1, 13, 26, 0)),
            lounge(at(1, 13, 30, 0), at(1, 13, 42, 0), (90, 150)),
            desk(at(1, 13, 46, 0), at(1, 13, 48, 0)),
            lounge(at(1, 13, 52, 0), at(1, 14, 6, 0), (90, 150)),
            desk(at(1, 14, 10, 0), at(1, 14, 12, 0)),
            lounge(at(1, 14, 16, 0), at(1, 14, 50, 0), (90, 150)),
        ],
    });

    // E3: eight central-corridor sensors fail for 23 minutes on day 2. A
    // technician walks the block right before the outage and immediately
    // after recovery.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E3".into(),
        name: "Equipment failure".into(),
        narrative: "Sensors 10715-10718 and 10815-10818 failed from 13:33:21 to 13:56:15 on day 2, leaving no sensing data.".into(),
        patches: vec![],
        directives: vec![
            Directive::SuppressSensors {
                sids: FAILED_SIDS.to_vec(),
                window: Window::new(at(2, 13, 33, 21), at(2, 13, 56, 15)),
            },
            // Two technicians sweep the block, one per aisle, right before
            // the failure and again right after recovery.
            Directive::ForceRoute {
                actor: ActorSel::Pid(TECHNICIAN_PID),
                cells: vec![
                    (1, 12, 7), (1, 13, 7), (1, 14, 7), (1, 15, 7), (1, 16, 7), (1, 17, 7),
                    (1, 18, 7),
                ],
                anchor_index: 6,
                anchor_t: at(2, 13, 33, 20),
                entry: JointMode::Background,
                exit: JointMode::Background,
            },
            Directive::ForceRoute {
                actor: ActorSel::Pid(TECHNICIAN2_PID),
                cells: vec![
                    (1, 12, 8), (1, 13, 8), (1, 14, 8), (1, 15, 8), (1, 16, 8), (1, 17, 8),
                    (1, 18, 8),
                ],
                anchor_index: 6,
                anchor_t: at(2, 13, 33, 20),
                entry: JointMode::Background,
                exit: JointMode::Background,
            },
            Directive::ForceRoute {
                actor: ActorSel::Pid(TECHNICIAN_PID),
                cells: vec![
                    (1, 19, 7), (1, 18, 7), (1, 17, 7), (1, 16, 7), (1, 15, 7), (1, 14, 7),
                ],
                anchor_index: 1,
                anchor_t: at(2, 13, 56, 16),
                entry: JointMode::Background,
                exit: JointMode::Background,
            },
            Directive::ForceRoute {
                actor: ActorSel::Pid(TECHNICIAN2_PID),
                cells: vec![
                    (1, 19, 8), (1, 18, 8), (1, 17, 8), (1, 16, 8), (1, 15, 8), (1, 14, 8),
                ],
                anchor_index: 1,
                anchor_t: at(2, 13, 56, 16),
                entry: JointMode::Background,
                exit: JointMode::Background,
            },
        ],
    });

    // E4: two media reporters slip into the VIP lounge on day 1; a VIP guest
    // enters the media room on day 2.
    let intrusion = |pid: u32, zone: &str, w: Window| Directive::ForcePresence {
        actor: ActorSel::Pid(pid),
        place: Place::Zone(zone.into()),
        window: w,
        fidget_s: Some((100, 160)),
        entry: JointMode::Background,
        exit: JointMode::Background,
        claim: ClaimSpec::Auto,
    };
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E4".into(),
        name: "Personnel ultra vires".into(),
        narrative: "Media reporters 11201 and 16473 entered the VIP lounge; VIP guest 13344 entered the media room.".into(),
        patches: vec![],
        directives: vec![
            intrusion(11201, "vip_lounge", Window::new(at(1, 9, 0, 0), at(1, 9, 20, 0))),
            intrusion(16473, "vip_lounge", Window::new(at(1, 10, 30, 0), at(1, 10, 50, 0))),
            intrusion(13344, "media_room", Window::new(at(2, 12, 29, 4), at(2, 12, 39, 50))),
        ],
    });

    // E5: three sub-forums draw unexpectedly large crowds.
    let boost = |activity: &str, rem: u32| ProfilePatch::AttractBoost {
        activity: activity.into(),
        cohort: CohortSel {
            roles: vec![OrdinaryGuest, Visitor],
            modulo: 3,
            rems: vec![rem],
        },
        cav0_min: 0.92,
        adt_max: Some(-0.20),
    };
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E5".into(),
        name: "Packed sub-venues".into(),
        narrative: "Three sub-venue forums attracted far more participants than usual.".into(),
        patches: vec![
            boost("Internet of Things Security Forum", 0),
            boost("Mobile Security Forum", 1),
            boost("Intelligent Security Technology Innovation Forum", 2),
        ],
        directives: vec![],
    });

    // E6: the day-1 morning tea break overwhelms both tea areas.
    // Roughly twice the tea areas' capacity wants in at once; the rest of the
    // crowd keeps circulating normally.
    let tea_boost = |activity: &str, rem: u32| ProfilePatch::AttractBoost {
        activity: activity.into(),
        cohort: CohortSel {
            roles: vec![OrdinaryGuest, Visitor, Exhibitor],
            modulo: 8,
            rems: vec![rem],
        },
        cav0_min: 0.95,
        adt_max: Some(-0.30),
    };
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E6".into(),
        name: "Venue congestion".into(),
        narrative: "Crowds overwhelmed the limited tea break areas during the day-1 morning break.".into(),
        patches: vec![
            tea_boost("Tea Break Morning 1 (Hall 1)", 0),
            tea_boost("Tea Break Morning 1 (Hall 2)", 1),
        ],
        directives: vec![],
    });

    // E7: a book signing packs one corner of the exhibition hall on day 2.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E7".into(),
        name: "Book signing".into(),
        narrative: "A book signing in the exhibition hall gathered a dense crowd from 13:00 to 14:30 on day 2.".into(),
        patches: vec![
            ProfilePatch::AddActivity {
                name: "Book Signing Session".into(),
                activity_kind: ActivityKind::Special,
                zone: "exhibition_hall".into(),
                day: 2,
                start_s: at(2, 13, 0, 0),
                end_s: at(2, 14, 30, 0),
                priority: 5,
                focus_cells: vec![
                    (1, 27, 13), (1, 28, 13), (1, 29, 13),
                    (1, 27, 14), (1, 28, 14), (1, 29, 14),
                    (1, 27, 15), (1, 28, 15), (1, 29, 15),
                ],
            },
            ProfilePatch::AttractBoost {
                activity: "Book Signing Session".into(),
                cohort: CohortSel {
                    roles: vec![OrdinaryGuest, Visitor],
                    modulo: 4,
                    rems: vec![0],
                },
                cav0_min: 0.95,
                adt_max: Some(-0.30),
            },
        ],
        directives: vec![],
    });

    // E8: four ~100-person visitor groups tour the exhibition hall and poster
    // area in single file.
    let tour_waypoints = vec![
        (1, 23, 9), (1, 29, 9), (1, 29, 12), (1, 23, 12), (1, 23, 15), (1, 29, 15),
        (1, 29, 5), (1, 29, 1), (1, 25, 1), (1, 25, 5),
    ];
    let tour = |rem: u32, day: u8, h: i64| Directive::SpawnGroup {
        members: ActorSel::RoleSlice {
            role: Visitor,
            modulo: 16,
            rem,
        },
        window: Window::new(at(day, h, 0, 0), at(day, h + 1, 0, 0)),
        waypoints: tour_waypoints.clone(),
        stagger_s: 4.0,
        pace_s: 8,
    };
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E8".into(),
        name: "Group visit".into(),
        narrative: "Four visiting groups of roughly one hundred people toured the exhibition hall and poster area together.".into(),
        patches: vec![],
        directives: vec![tour(0, 1, 10), tour(1, 1, 15), tour(2, 2, 10), tour(3, 2, 15)],
    });

    // E9: the contest chair leaves the badge on the podium all of day 2.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E9".into(),
        name: "Forgotten badge".into(),
        narrative: "VIP guest 19929, chair of the hacking contest, forgot the badge on the podium at 9:04 and fetched it around 17:30.".into(),
        patches: vec![],
        directives: vec![Directive::PinBadge {
            pid: 19929,
            cell: (2, 25, 15),
            window: Window::new(at(2, 9, 4, 0), at(2, 17, 30, 0)),
            entry: JointMode::Entrance,
            exit: JointMode::Entrance,
            claim: ClaimSpec::FullDay,
        }],
    });

    // E10: knockout eliminations push contestants out early on days 1 and 2.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E10".into(),
        name: "Early exit of hacking contestants".into(),
        narrative: "Contestants eliminated in the knockout rounds left the venue hours before the contest ended.".into(),
        patches: vec![],
        directives: vec![
            Directive::ForceExit {
                role: HackingContestant,
                day: 1,
                at_s: at(1, 15, 0, 0),
                fraction: 0.30,
            },
            Directive::ForceExit {
                role: HackingContestant,
                day: 2,
                at_s: at(2, 15, 0, 0),
                fraction: 0.40,
            },
        ],
    });

    // E11: nine staff members arrive after their duty has already started.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E11".into(),
        name: "Staff lateness".into(),
        narrative: "Nine staff members reported for duty late on day 1.".into(),
        patches: vec![],
        directives: vec![Directive::ShiftEntry {
            pids: LATE_STAFF_PIDS.to_vec(),
            day: 1,
            offsets_s: vec![3600, 4200, 4800, 5400, 6000, 6600, 7200, 7800, 8400],
        }],
    });

    // E12: staff lunch in two turns in the work room on day 1.
    scripts.push(EventScript {
        version: CONFIG_VERSION,
        id: "E12".into(),
        name: "Staff lunch turns".into(),
        narrative: "The staff split into two groups for lunch in the work room, 11:40-12:10 and 12:10-12:40 on day 1.".into(),
        patches: vec![],
        directives: vec![
            Directive::ForcePresence {
                actor: ActorSel::RoleSlice {
                    role: Staff,
                    modulo: 2,
                    rem: 0,
                },
                place: Place::Zone("work_room".into()),
                window: Window::new(at(1, 11, 40, 0), at(1, 12, 10, 0)),
                fidget_s: None,
                entry: JointMode::Background,
                exit: JointMode::Background,
                claim: ClaimSpec::Auto,
            },
            Directive::ForcePresence {
                actor: ActorSel::RoleSlice {
                    role: Staff,
                    modulo: 2,
                    rem: 1,
                },
                place: Place::Zone("work_room".into()),
                // A minute after the first turn nominally ends; members fan in
                // backward, so the room never holds both turns at once.
                window: Window::new(at(1, 12, 11, 0), at(1, 12, 40, 0)),
                fidget_s: None,
                entry: JointMode::Background,
                exit: JointMode::Background,
                claim: ClaimSpec::Auto,
            },
        ],
    });

    scripts
}

/// The complete default configuration tree.
pub fn default_tree() -> ConfigTree {
    ConfigTree {
        master: default_master(),
        map_file: default_map_file(),
        schedule: default_schedule(),
        scripts: builtin_scripts(),
    }
}
