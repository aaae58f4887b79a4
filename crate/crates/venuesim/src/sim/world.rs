//! Simulation world: occupancy state, per-person state machines, movement
//! mechanics and lazy interest/energy evaluation.
//!
//! Heavy per-pairing state advances once per decision epoch, and only
//! lazily: each pairing stores a base value and the epoch it was rebased at,
//! and the affine update rules are evaluated in closed form on demand. This
//! is bit-identical to stepping every pairing each epoch.

use crate::dynamics::{self, FormulaMode};
use crate::error::Result;
use crate::model::{CellRef, PersonType, VenueMap, CELL_COUNT};
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::routing::{dwell_seconds, perturb_route, GridGraph, Mask, NodeId, Route};
use crate::rng::SimRng;

use super::{IntentKind, IntentReason, MoveIntent};

pub const NO_NODE: NodeId = NodeId::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PState {
    Absent,
    Walking,
    Attending,
    /// Short stop with a wake time: sign-in, restroom, work-room visit.
    SideDwell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Idle,
    ToActivity(u16),
    /// Sign-in at the service desk, then continue to the target activity.
    ToSignIn(Option<u16>),
    ToRestroom,
    ToWorkroom,
    /// Walk back to the activity after a side stop.
    Return(u16),
    ToExit,
}

#[derive(Debug, Clone, Copy)]
pub enum WheelEvent {
    Enter(u32),
    Move(u32, u32),
    Wake(u32, u32),
}

/// Interest pairing phase.
pub const PAIR_FRESH: u8 = 0;
pub const PAIR_ATTENDING: u8 = 1;
pub const PAIR_VISITED: u8 = 2;

#[derive(Debug, Clone, Copy)]
pub struct PairState {
    pub mode: u8,
    pub base_civ: f64,
    pub base_epoch: u32,
}

#[derive(Debug, Clone)]
pub struct PersonSim {
    pub state: PState,
    pub pos: NodeId,
    pub pos_entered_t: i64,
    pub pos_dwell: i64,
    pub rng: SimRng,
    pub current_act: Option<u16>,
    pub cav_ref: f64,
    pub pair_state: Vec<PairState>,
    pub entry_epoch: u32,
    pub entered: bool,
    pub done: bool,
    pub eliminated: bool,
    pub next_fidget: i64,
    pub next_restroom: i64,
    pub next_workroom: i64,
    pub blocked_since: i64,
    pub gen: u32,
    pub route: Vec<NodeId>,
    pub route_idx: usize,
    pub purpose: Purpose,
    pub side_until: i64,
    pub occupied_now: bool,
    /// Resolved duty windows, ascending: (window, activity index or NONE for staff posts).
    pub duty_windows: Vec<(crate::error::Window, u16)>,
}

pub const NO_ACT: u16 = u16::MAX;

pub struct World<'p> {
    pub profile: &'p Profile,
    pub map: VenueMap,
    pub graph: GridGraph,
    masks: Vec<Mask>,
    pub clock: i64,
    pub day: u8,
    pub day_open: i64,
    pub day_close: i64,
    pub epoch_len: i64,

    cell_cap: Vec<u16>,
    cell_speed: Vec<f64>,
    cell_zone: Vec<u16>,
    pub occupancy: Vec<u16>,
    pub zone_occ: Vec<u32>,
    zone_cap: Vec<u32>,

    act_zone: Vec<u16>,
    pub act_attendees: Vec<u32>,
    /// Ongoing activity indices at the current epoch, priority-descending.
    pub ongoing: Vec<u16>,

    pub persons: Vec<PersonSim>,
    wheel: Vec<Vec<WheelEvent>>,

    pub records: Vec<TrajectoryRecord>,
    pub intents: Vec<MoveIntent>,
    pub person_seconds: u64,
    pub inside_count: u32,
    pub stragglers: u32,
}

impl<'p> World<'p> {
    pub fn new(profile: &'p Profile) -> Result<World<'p>> {
        let map = profile.build_map()?;
        let graph = GridGraph::build(&map);
        let masks = crate::model::ALL_PERSON_TYPES
            .iter()
            .map(|t| graph.mask_for(&map, *t))
            .collect();

        let mut cell_cap = vec![0u16; CELL_COUNT];
        let mut cell_speed = vec![0.0; CELL_COUNT];
        let mut cell_zone = vec![u16::MAX; CELL_COUNT];
        for c in map.walkable_cells() {
            let g = map.cell(c).unwrap();
            cell_cap[c.index()] = g.capacity;
            cell_speed[c.index()] = g.max_speed;
            cell_zone[c.index()] = g.zone;
        }
        let zone_cap: Vec<u32> = map.zones.iter().map(|z| z.total_capacity()).collect();
        let zone_count = map.zones.len();

        let act_zone = profile
            .activities
            .iter()
            .map(|a| map.zone_id(&a.zone))
            .collect::<Result<Vec<u16>>>()?;

        let n_acts = profile.activities.len();
        let persons = profile
            .roster
            .iter()
            .map(|p| {
                let mut duty_windows: Vec<(crate::error::Window, u16)> = p
                    .duties
                    .iter()
                    .map(|d| {
                        let act = &profile.activities[(d.aid - 1) as usize];
                        (d.window.unwrap_or(act.window), (d.aid - 1) as u16)
                    })
                    .collect();
                duty_windows.sort_by_key(|(w, _)| w.start);
                PersonSim {
                    state: PState::Absent,
                    pos: NO_NODE,
                    pos_entered_t: 0,
                    pos_dwell: 0,
                    rng: SimRng::derive_keyed(profile.seed, "behavior", p.pid as u64),
                    current_act: None,
                    cav_ref: 0.0,
                    pair_state: vec![
                        PairState {
                            mode: PAIR_FRESH,
                            base_civ: 0.0,
                            base_epoch: 0,
                        };
                        n_acts
                    ],
                    entry_epoch: 0,
                    entered: false,
                    done: false,
                    eliminated: false,
                    next_fidget: 0,
                    next_restroom: 0,
                    next_workroom: 0,
                    blocked_since: 0,
                    gen: 0,
                    route: Vec::new(),
                    route_idx: 0,
                    purpose: Purpose::Idle,
                    side_until: 0,
                    occupied_now: false,
                    duty_windows,
                }
            })
            .collect();

        Ok(World {
            profile,
            map,
            graph,
            masks,
            clock: 0,
            day: 0,
            day_open: 0,
            day_close: 0,
            epoch_len: profile.behavior.decision_epoch_s,
            cell_cap,
            cell_speed,
            cell_zone,
            occupancy: vec![0; CELL_COUNT],
            zone_occ: vec![0; zone_count],
            zone_cap,
            act_zone,
            act_attendees: vec![0; n_acts],
            ongoing: Vec::new(),
            persons,
            wheel: Vec::new(),
            records: Vec::new(),
            intents: Vec::new(),
            person_seconds: 0,
            inside_count: 0,
            stragglers: 0,
        })
    }

    // ── Small accessors ─────────────────────────────────────────────────────

    #[inline]
    pub fn mask_of(&self, ptype: PersonType) -> &Mask {
        &self.masks[ptype_index(ptype)]
    }

    #[inline]
    pub fn epoch_index(&self, t: i64) -> u32 {
        ((t - self.day_open) / self.epoch_len).max(0) as u32
    }

    #[inline]
    pub fn saturation(&self, node: NodeId) -> f64 {
        let cap = self.cell_cap[node as usize];
        if cap == 0 {
            return 1.0;
        }
        f64::from(self.occupancy[node as usize]) / f64::from(cap)
    }

    /// Current congestion-limited speed of a cell.
    pub fn current_max_speed(&self, node: NodeId) -> f64 {
        self.cell_speed[node as usize] * dynamics::speed_ratio_sat(self.saturation(node))
    }

    #[inline]
    pub fn cell_full(&self, node: NodeId) -> bool {
        self.occupancy[node as usize] >= self.cell_cap[node as usize]
    }

    pub fn zone_full(&self, zone: u16) -> bool {
        let cap = self.zone_cap[zone as usize];
        cap == 0 || f64::from(self.zone_occ[zone as usize]) >= 0.95 * f64::from(cap)
    }

    #[inline]
    pub fn zone_of_act(&self, act_idx: u16) -> u16 {
        self.act_zone[act_idx as usize]
    }

    pub fn zone_of_node(&self, node: NodeId) -> u16 {
        self.cell_zone[node as usize]
    }

    // ── Energy and interest (lazy closed forms) ─────────────────────────────

    pub fn energy_of(&self, pidx: usize, t: i64) -> f64 {
        let p = &self.persons[pidx];
        let person = &self.profile.roster[pidx];
        let n = self.epoch_index(t).saturating_sub(p.entry_epoch);
        let s = dynamics::EnergyState {
            e: person.e0,
            e_min: person.e_min,
            edr: person.edr,
            et: person.et,
        };
        match self.profile.formula_mode {
            FormulaMode::Contraction => dynamics::energy_after(&s, n),
            FormulaMode::Literal => dynamics::energy_after_literal(&s, n),
        }
    }

    pub fn civ_of(&self, pidx: usize, act_idx: usize, t: i64) -> f64 {
        let pair = self.profile.pair(pidx, act_idx);
        if pair.iv_max == 0.0 {
            return 0.0;
        }
        let ps = &self.persons[pidx].pair_state[act_idx];
        let n = self.epoch_index(t).saturating_sub(ps.base_epoch);
        let s = dynamics::InterestState {
            civ: ps.base_civ,
            idr: pair.idr,
            irr: pair.irr,
            iv_min: pair.iv_min,
            iv_max: pair.iv_max,
            adt: pair.adt,
        };
        let literal = self.profile.formula_mode == FormulaMode::Literal;
        match ps.mode {
            PAIR_FRESH => {
                if literal {
                    dynamics::recover_after_literal(&s, n)
                } else {
                    dynamics::recover_after(&s, n)
                }
            }
            PAIR_ATTENDING => {
                if literal {
                    dynamics::decay_after_literal(&s, n)
                } else {
                    dynamics::decay_after(&s, n)
                }
            }
            _ => ps.base_civ,
        }
    }

    /// Interest matching value of a person toward an activity at time `t`.
    /// Duty pairings are pinned at the maximum.
    pub fn imv_of(&self, pidx: usize, act_idx: usize, t: i64) -> f64 {
        let pair = self.profile.pair(pidx, act_idx);
        if pair.iv_max == 0.0 && pair.cav0 == 0.0 {
            return 0.0;
        }
        if self.is_duty_act(pidx, act_idx) {
            return 1.0;
        }
        let act = &self.profile.activities[act_idx];
        let progress = act.progress(t);
        let p = &self.persons[pidx];
        let cav = if p.current_act == Some(act_idx as u16) {
            p.cav_ref * (1.0 - progress)
        } else {
            pair.cav0 * (1.0 - pair.adr) * (1.0 - progress)
        };
        dynamics::imv(self.civ_of(pidx, act_idx, t), cav)
    }

    fn is_duty_act(&self, pidx: usize, act_idx: usize) -> bool {
        self.persons[pidx]
            .duty_windows
            .iter()
            .any(|(_, a)| *a == act_idx as u16)
    }

    /// The duty window covering `t` (or starting within the lead time).
    pub fn duty_at(&self, pidx: usize, t: i64) -> Option<(crate::error::Window, u16)> {
        let lead = self.profile.behavior.duty_lead_s;
        self.persons[pidx]
            .duty_windows
            .iter()
            .find(|(w, _)| t >= w.start - lead && t < w.end)
            .copied()
    }

    /// True while the person still has duty left today; obligations override
    /// the exit criteria.
    pub fn has_pending_duty(&self, pidx: usize, t: i64) -> bool {
        if self.profile.roster[pidx].ptype == PersonType::Staff {
            return !self.persons[pidx].eliminated;
        }
        self.persons[pidx]
            .duty_windows
            .iter()
            .any(|(w, _)| w.end > t && w.start >= self.day_open && w.start <= self.day_close)
    }

    // ── Records and occupancy ───────────────────────────────────────────────

    fn emit(&mut self, pidx: usize, node: NodeId, t: i64) {
        let pid = self.profile.roster[pidx].pid;
        self.records
            .push(TrajectoryRecord::new(t, pid, CellRef::from_index(node as usize)));
    }

    pub fn log_intent(
        &mut self,
        pidx: usize,
        kind: IntentKind,
        target: Option<u32>,
        reason: IntentReason,
    ) {
        self.intents.push(MoveIntent {
            issued_at: self.clock,
            pid: self.profile.roster[pidx].pid,
            kind,
            target,
            reason,
        });
    }

    /// Move a person into `node` at time `t`: transfers occupancy, emits the
    /// cell-entry record, fixes the dwell owed in the new cell.
    fn occupy(&mut self, pidx: usize, node: NodeId, t: i64) {
        let sc_before = self.saturation(node);
        let old = self.persons[pidx].pos;
        if old != NO_NODE {
            self.occupancy[old as usize] -= 1;
            self.zone_occ[self.cell_zone[old as usize] as usize] -= 1;
        }
        self.occupancy[node as usize] += 1;
        self.zone_occ[self.cell_zone[node as usize] as usize] += 1;
        let p = &mut self.persons[pidx];
        p.pos = node;
        p.pos_entered_t = t;
        p.pos_dwell = dwell_seconds(self.cell_speed[node as usize], sc_before)
            .min(self.profile.behavior.max_dwell_s);
        self.emit(pidx, node, t);
    }

    fn vacate(&mut self, pidx: usize) {
        let pos = self.persons[pidx].pos;
        if pos != NO_NODE {
            self.occupancy[pos as usize] -= 1;
            self.zone_occ[self.cell_zone[pos as usize] as usize] -= 1;
            self.persons[pidx].pos = NO_NODE;
        }
    }

    // ── Scheduling ──────────────────────────────────────────────────────────

    pub fn init_day(&mut self, day: u8) -> Result<()> {
        let w = self.profile.opening_hours.window(day)?;
        self.day = day;
        self.day_open = w.start;
        self.day_close = w.end;
        self.clock = w.start;
        let slots = (w.end - w.start + 1) as usize;
        self.wheel.clear();
        self.wheel.resize(slots, Vec::new());
        for ps in &mut self.persons {
            ps.state = PState::Absent;
            ps.pos = NO_NODE;
            ps.entered = false;
            ps.done = false;
            ps.current_act = None;
            ps.purpose = Purpose::Idle;
            ps.route.clear();
            ps.gen += 1;
            ps.occupied_now = false;
            // Daily re-initialization of the interest model.
            for s in ps.pair_state.iter_mut() {
                s.mode = PAIR_FRESH;
                s.base_epoch = 0;
                s.base_civ = 0.0; // patched below per pairing
            }
        }
        let n_acts = self.profile.activities.len();
        for pidx in 0..self.persons.len() {
            for ai in 0..n_acts {
                self.persons[pidx].pair_state[ai].base_civ = self.profile.pair(pidx, ai).civ0;
            }
        }
        self.act_attendees.iter_mut().for_each(|a| *a = 0);
        debug_assert!(self.occupancy.iter().all(|o| *o == 0));
        debug_assert_eq!(self.inside_count, 0);
        Ok(())
    }

    pub fn schedule(&mut self, t: i64, ev: WheelEvent) {
        if t <= self.day_close {
            let idx = (t.max(self.day_open) - self.day_open) as usize;
            self.wheel[idx].push(ev);
        }
        // Events past closing are dropped; closing logic has already routed
        // everyone out by then.
    }

    pub fn take_slot(&mut self, t: i64) -> Vec<WheelEvent> {
        let idx = (t - self.day_open) as usize;
        std::mem::take(&mut self.wheel[idx])
    }

    pub fn refresh_ongoing(&mut self, t: i64) {
        self.ongoing.clear();
        for (i, a) in self.profile.activities.iter().enumerate() {
            if a.ongoing(t) && a.day == self.day {
                self.ongoing.push(i as u16);
            }
        }
        let acts = &self.profile.activities;
        self.ongoing
            .sort_by_key(|i| (std::cmp::Reverse(acts[*i as usize].priority), acts[*i as usize].aid));
    }

    // ── Entry, movement, arrival ────────────────────────────────────────────

    pub fn enter(&mut self, pidx: usize, t: i64, target: Option<u16>) {
        if self.persons[pidx].done || self.persons[pidx].entered || self.persons[pidx].eliminated {
            return;
        }
        let ptype = self.profile.roster[pidx].ptype;
        let entrances: Vec<NodeId> = self
            .map
            .entrances_for(ptype)
            .iter()
            .map(|c| c.index() as NodeId)
            .collect();
        let pick = {
            let p = &mut self.persons[pidx];
            entrances[p.rng.next_below(entrances.len() as u64) as usize]
        };
        let gate = entrances
            .iter()
            .copied()
            .find(|n| !self.cell_full(*n))
            .unwrap_or(pick);
        let node = if self.cell_full(pick) { gate } else { pick };
        if self.cell_full(node) {
            // Entrance saturated; retry shortly.
            self.schedule(t + 2, WheelEvent::Enter(pidx as u32));
            return;
        }
        self.persons[pidx].entered = true;
        self.persons[pidx].entry_epoch = self.epoch_index(t);
        self.persons[pidx].state = PState::Attending;
        self.inside_count += 1;
        self.occupy(pidx, node, t);
        self.log_intent(pidx, IntentKind::EnterVenue, None, IntentReason::Admission);

        let b = &self.profile.behavior;
        let (f_lo, f_hi) = b.fidget_interval_s;
        let (r_lo, r_hi) = b.restroom_interval_s;
        let (w_lo, w_hi) = b.workroom_visit_interval_s;
        {
            let p = &mut self.persons[pidx];
            p.next_fidget = t + p.rng.range_i64(f_lo, f_hi);
            p.next_restroom = t + p.rng.range_i64(r_lo, r_hi);
            p.next_workroom = t + p.rng.range_i64(w_lo, w_hi);
        }

        // Sign-in for everyone but VIP guests and staff, then first target.
        let needs_signin =
            !matches!(ptype, PersonType::VipGuest | PersonType::Staff);
        if needs_signin {
            if let Some(desk) = self.pick_zone_cell_by_name(pidx, "service_desk") {
                if self.start_route_to(pidx, desk, Purpose::ToSignIn(target), t) {
                    return;
                }
            }
        }
        self.head_to_target(pidx, target, t);
    }

    fn head_to_target(&mut self, pidx: usize, target: Option<u16>, t: i64) {
        let ptype = self.profile.roster[pidx].ptype;
        if ptype == PersonType::Staff {
            if let Some(zone) = self.staff_post_zone(pidx) {
                if let Some(cell) = self.pick_zone_cell(pidx, zone, &[]) {
                    self.start_route_to(pidx, cell, Purpose::ToActivity(NO_ACT), t);
                    return;
                }
            }
            self.persons[pidx].state = PState::Attending;
            return;
        }
        let goal = target.or_else(|| self.best_target(pidx, t));
        match goal {
            Some(act_idx) => {
                if !self.go_to_activity(pidx, act_idx, t) {
                    self.persons[pidx].state = PState::Attending;
                }
            }
            None => {
                // Nothing appealing right now; linger and re-decide next epoch.
                self.persons[pidx].state = PState::Attending;
            }
        }
    }

    pub fn staff_post_zone(&self, pidx: usize) -> Option<u16> {
        self.profile.roster[pidx]
            .post_zone
            .as_deref()
            .and_then(|z| self.map.zone_id(z).ok())
    }

    /// Best admissible activity right now (ongoing or about to start), by IMV.
    pub fn best_target(&self, pidx: usize, t: i64) -> Option<u16> {
        let ptype = self.profile.roster[pidx].ptype;
        let mut best: Option<(f64, u32, u16)> = None;
        for (i, a) in self.profile.activities.iter().enumerate() {
            if a.day != self.day || !a.permission.allows(ptype) {
                continue;
            }
            if !(a.ongoing(t) || (a.window.start > t && a.window.start - t <= 1800)) {
                continue;
            }
            if self.zone_full(self.act_zone[i]) {
                continue;
            }
            let imv = self.imv_of(pidx, i, t.max(a.window.start));
            if imv <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, baid, _)) => imv > bi || (imv == bi && a.aid < baid),
            };
            if better {
                best = Some((imv, a.aid, i as u16));
            }
        }
        best.map(|(_, _, i)| i)
    }

    /// Plan and start a walk toward `act_idx`'s zone. Returns false when no
    /// placement or route exists.
    pub fn go_to_activity(&mut self, pidx: usize, act_idx: u16, t: i64) -> bool {
        let zone = self.act_zone[act_idx as usize];
        let focus: Vec<NodeId> = self.profile.activities[act_idx as usize]
            .focus_cells
            .iter()
            .map(|(f, x, y)| CellRef::new(*f, *x, *y).index() as NodeId)
            .collect();
        let Some(cell) = self.pick_zone_cell(pidx, zone, &focus) else {
            return false;
        };
        self.start_route_to(pidx, cell, Purpose::ToActivity(act_idx), t)
    }

    /// Free-cell pick inside a zone: focus cells first (packing outward ring
    /// by ring, so crowds gather around an anchor), then random probes, then
    /// a linear sweep. VIP guests prefer the front rows of session halls.
    pub fn pick_zone_cell(&mut self, pidx: usize, zone: u16, focus: &[NodeId]) -> Option<NodeId> {
        if !focus.is_empty() {
            let mut ring: Vec<NodeId> = focus
                .iter()
                .copied()
                .filter(|n| self.cell_zone[*n as usize] == zone)
                .collect();
            let mut seen: std::collections::HashSet<NodeId> = ring.iter().copied().collect();
            for _ in 0..6 {
                for &f in &ring {
                    if !self.cell_full(f) {
                        return Some(f);
                    }
                }
                let mut next = Vec::new();
                for &f in &ring {
                    for &n in self.graph.neighbors(f) {
                        if self.cell_zone[n as usize] == zone && seen.insert(n) {
                            next.push(n);
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                ring = next;
            }
        }
        let cells = &self.map.zones[zone as usize].cells;
        if cells.is_empty() {
            return None;
        }
        let ptype = self.profile.roster[pidx].ptype;
        let zone_name = &self.map.zones[zone as usize].name;
        if ptype == PersonType::VipGuest && (zone_name == "main_venue" || zone_name.starts_with("sub_venue")) {
            let max_y = cells.iter().map(|c| c.y).max().unwrap_or(0);
            for attempt in 0..16 {
                let p = &mut self.persons[pidx];
                let c = cells[p.rng.next_below(cells.len() as u64) as usize];
                let wanted_y = max_y - (attempt / 8) as u8;
                if c.y != wanted_y {
                    continue;
                }
                let n = c.index() as NodeId;
                if !self.cell_full(n) {
                    return Some(n);
                }
            }
        }
        // Two random probes, keep the emptier one; loads stay close to the
        // zone average instead of drifting toward per-cell saturation.
        for _ in 0..12 {
            let (a, b) = {
                let p = &mut self.persons[pidx];
                (
                    cells[p.rng.next_below(cells.len() as u64) as usize].index() as NodeId,
                    cells[p.rng.next_below(cells.len() as u64) as usize].index() as NodeId,
                )
            };
            let n = if self.occupancy[a as usize] <= self.occupancy[b as usize] {
                a
            } else {
                b
            };
            if !self.cell_full(n) {
                return Some(n);
            }
        }
        let start = {
            let p = &mut self.persons[pidx];
            p.rng.next_below(cells.len() as u64) as usize
        };
        for k in 0..cells.len() {
            let n = cells[(start + k) % cells.len()].index() as NodeId;
            if !self.cell_full(n) {
                return Some(n);
            }
        }
        None
    }

    pub fn pick_zone_cell_by_name(&mut self, pidx: usize, name: &str) -> Option<NodeId> {
        let zone = self.map.zone_id(name).ok()?;
        self.pick_zone_cell(pidx, zone, &[])
    }

    /// Plan a masked, perturbed route and begin walking it.
    pub fn start_route_to(&mut self, pidx: usize, to: NodeId, purpose: Purpose, t: i64) -> bool {
        let from = self.persons[pidx].pos;
        if from == NO_NODE {
            return false;
        }
        if from == to {
            self.persons[pidx].purpose = purpose;
            self.persons[pidx].state = PState::Walking;
            self.arrive(pidx, t);
            return true;
        }
        let ptype = self.profile.roster[pidx].ptype;
        let mask = &self.masks[ptype_index(ptype)];
        let Ok(route) = self.graph.shortest_route(from, to, mask) else {
            return false;
        };
        let strength = self.profile.behavior.route_perturb_strength;
        let route = {
            let p = &mut self.persons[pidx];
            perturb_route(&self.graph, &route, mask, &mut p.rng, strength)
        };
        self.begin_route(pidx, route, purpose, t);
        true
    }

    fn begin_route(&mut self, pidx: usize, route: Route, purpose: Purpose, t: i64) {
        let p = &mut self.persons[pidx];
        p.route = route.cells;
        p.route_idx = 0;
        p.purpose = purpose;
        p.state = PState::Walking;
        p.blocked_since = 0;
        p.gen += 1;
        let first_hop = (p.pos_entered_t + p.pos_dwell).max(t + 1);
        let gen = p.gen;
        self.schedule(first_hop, WheelEvent::Move(pidx as u32, gen));
    }

    /// One movement attempt along the current route.
    pub fn process_move(&mut self, pidx: usize, gen: u32, t: i64) {
        let p = &self.persons[pidx];
        if p.gen != gen || p.state != PState::Walking || p.done {
            return;
        }
        if p.route_idx + 1 >= p.route.len() {
            self.arrive(pidx, t);
            return;
        }
        let next = p.route[p.route_idx + 1];
        if self.cell_full(next) {
            // Saturated cell ahead: defer, and replan around it if stuck.
            let replan_after = self.profile.behavior.blocked_replan_s;
            let p = &mut self.persons[pidx];
            if p.blocked_since == 0 {
                p.blocked_since = t;
            }
            let stuck_for = t - p.blocked_since;
            let gen = p.gen;
            if stuck_for >= replan_after {
                self.replan_blocked(pidx, t);
            } else {
                self.schedule(t + 1, WheelEvent::Move(pidx as u32, gen));
            }
            return;
        }
        debug_assert_eq!(
            self.persons[pidx].route[self.persons[pidx].route_idx],
            self.persons[pidx].pos,
            "route cursor desynchronized from position"
        );
        self.persons[pidx].blocked_since = 0;
        self.occupy(pidx, next, t);
        let p = &mut self.persons[pidx];
        p.route_idx += 1;
        if p.route_idx + 1 >= p.route.len() {
            self.arrive(pidx, t);
        } else {
            let at = t + p.pos_dwell;
            let gen = p.gen;
            self.schedule(at, WheelEvent::Move(pidx as u32, gen));
        }
    }

    fn replan_blocked(&mut self, pidx: usize, t: i64) {
        let p = &self.persons[pidx];
        let mut to = *p.route.last().unwrap();
        let from = p.pos;
        let purpose = p.purpose;
        // A saturated destination cell is hopeless; pick another spot in the
        // same zone before routing around congestion.
        if self.cell_full(to) {
            let zone = self.cell_zone[to as usize];
            if let Some(fresh) = self.pick_zone_cell(pidx, zone, &[]) {
                to = fresh;
            }
        }
        let ptype = self.profile.roster[pidx].ptype;
        let mask = &self.masks[ptype_index(ptype)];
        let occ = &self.occupancy;
        let caps = &self.cell_cap;
        let avoid = move |n: NodeId| occ[n as usize] >= caps[n as usize];
        match self.graph.shortest_route_avoiding(from, to, mask, &avoid) {
            Ok(route) => {
                self.begin_route(pidx, route, purpose, t);
            }
            Err(_) => {
                // Removing saturated cells disconnects the goal; if it is an
                // activity, the target zone is effectively full. Re-decide at
                // the next epoch; meanwhile keep retrying in place.
                let p = &mut self.persons[pidx];
                p.blocked_since = t;
                let gen = p.gen;
                self.schedule(t + 1, WheelEvent::Move(pidx as u32, gen));
            }
        }
    }

    fn arrive(&mut self, pidx: usize, t: i64) {
        let purpose = self.persons[pidx].purpose;
        match purpose {
            Purpose::ToSignIn(target) => {
                let (lo, hi) = self.profile.behavior.signin_dwell_s;
                let p = &mut self.persons[pidx];
                p.state = PState::SideDwell;
                p.side_until = t + p.rng.range_i64(lo, hi);
                p.purpose = Purpose::ToSignIn(target);
                let (until, gen) = (p.side_until, p.gen);
                self.schedule(until, WheelEvent::Wake(pidx as u32, gen));
            }
            Purpose::ToRestroom => {
                let (lo, hi) = self.profile.behavior.restroom_dwell_s;
                let p = &mut self.persons[pidx];
                p.state = PState::SideDwell;
                p.side_until = t + p.rng.range_i64(lo, hi);
                let (until, gen) = (p.side_until, p.gen);
                self.schedule(until, WheelEvent::Wake(pidx as u32, gen));
            }
            Purpose::ToWorkroom => {
                let (lo, hi) = self.profile.behavior.workroom_visit_dwell_s;
                let p = &mut self.persons[pidx];
                p.state = PState::SideDwell;
                p.side_until = t + p.rng.range_i64(lo, hi);
                let (until, gen) = (p.side_until, p.gen);
                self.schedule(until, WheelEvent::Wake(pidx as u32, gen));
            }
            Purpose::ToActivity(act) => {
                self.join_activity(pidx, act, t);
            }
            Purpose::Return(act) => {
                let ongoing = act != NO_ACT
                    && self.profile.activities[act as usize].ongoing(t);
                if ongoing || act == NO_ACT {
                    let p = &mut self.persons[pidx];
                    p.state = PState::Attending;
                    p.purpose = Purpose::Idle;
                } else {
                    // It ended while we were away; settle and re-decide.
                    self.leave_current(pidx, t);
                    self.persons[pidx].state = PState::Attending;
                    self.persons[pidx].purpose = Purpose::Idle;
                }
            }
            Purpose::ToExit => {
                self.finish_exit(pidx);
            }
            Purpose::Idle => {
                self.persons[pidx].state = PState::Attending;
            }
        }
    }

    pub fn wake(&mut self, pidx: usize, gen: u32, t: i64) {
        let p = &self.persons[pidx];
        if p.gen != gen || p.state != PState::SideDwell || p.done {
            return;
        }
        match p.purpose {
            Purpose::ToSignIn(target) => self.head_to_target(pidx, target, t),
            Purpose::ToRestroom | Purpose::ToWorkroom => {
                let back = self.persons[pidx].current_act;
                match back {
                    Some(act) if self.profile.activities[act as usize].ongoing(t) => {
                        let zone = self.act_zone[act as usize];
                        if let Some(cell) = self.pick_zone_cell(pidx, zone, &[]) {
                            if self.start_route_to(pidx, cell, Purpose::Return(act), t) {
                                return;
                            }
                        }
                        self.persons[pidx].state = PState::Attending;
                        self.persons[pidx].purpose = Purpose::Idle;
                    }
                    _ => {
                        // Staff go back to the post; others re-decide in place.
                        if self.profile.roster[pidx].ptype == PersonType::Staff {
                            if let Some(zone) = self.staff_post_zone(pidx) {
                                if let Some(cell) = self.pick_zone_cell(pidx, zone, &[]) {
                                    if self.start_route_to(pidx, cell, Purpose::Return(NO_ACT), t) {
                                        return;
                                    }
                                }
                            }
                        }
                        self.leave_current(pidx, t);
                        self.persons[pidx].state = PState::Attending;
                        self.persons[pidx].purpose = Purpose::Idle;
                    }
                }
            }
            _ => {
                self.persons[pidx].state = PState::Attending;
            }
        }
    }

    fn join_activity(&mut self, pidx: usize, act: u16, t: i64) {
        self.leave_current(pidx, t);
        if act != NO_ACT {
            let epoch = self.epoch_index(t);
            let civ_now = self.civ_of(pidx, act as usize, t);
            let pair = *self.profile.pair(pidx, act as usize);
            let activity = &self.profile.activities[act as usize];
            let progress = activity.progress(t);
            let p = &mut self.persons[pidx];
            p.current_act = Some(act);
            p.cav_ref = pair.cav0 * (1.0 - pair.adr) * (1.0 - progress);
            let ps = &mut p.pair_state[act as usize];
            ps.mode = PAIR_ATTENDING;
            ps.base_civ = civ_now;
            ps.base_epoch = epoch;
            self.act_attendees[act as usize] += 1;
        }
        let p = &mut self.persons[pidx];
        p.state = PState::Attending;
        p.purpose = Purpose::Idle;
        p.occupied_now = false;
    }

    pub fn leave_current(&mut self, pidx: usize, t: i64) {
        if let Some(act) = self.persons[pidx].current_act.take() {
            let epoch = self.epoch_index(t);
            let civ_now = self.civ_of(pidx, act as usize, t);
            let p = &mut self.persons[pidx];
            let ps = &mut p.pair_state[act as usize];
            ps.mode = PAIR_VISITED;
            ps.base_civ = civ_now;
            ps.base_epoch = epoch;
            p.cav_ref = 0.0;
            self.act_attendees[act as usize] =
                self.act_attendees[act as usize].saturating_sub(1);
        }
    }

    /// Begin leaving the venue.
    pub fn start_exit(&mut self, pidx: usize, t: i64, reason: IntentReason) {
        if self.persons[pidx].done || matches!(self.persons[pidx].purpose, Purpose::ToExit) {
            return;
        }
        self.leave_current(pidx, t);
        self.log_intent(pidx, IntentKind::ExitVenue, None, reason);
        let ptype = self.profile.roster[pidx].ptype;
        let exits: Vec<NodeId> = self
            .map
            .entrances_for(ptype)
            .iter()
            .map(|c| c.index() as NodeId)
            .collect();
        let gate = {
            let p = &mut self.persons[pidx];
            exits[p.rng.next_below(exits.len() as u64) as usize]
        };
        if !self.start_route_to(pidx, gate, Purpose::ToExit, t) {
            // No route (should not happen on a validated map): vanish without
            // pretending to walk.
            self.finish_exit(pidx);
            self.stragglers += 1;
        }
    }

    fn finish_exit(&mut self, pidx: usize) {
        self.vacate(pidx);
        let p = &mut self.persons[pidx];
        p.state = PState::Absent;
        p.purpose = Purpose::Idle;
        p.done = true;
        p.route.clear();
        p.gen += 1;
        self.inside_count -= 1;
    }

    /// Small in-zone repositioning while attending.
    pub fn fidget(&mut self, pidx: usize, t: i64) {
        let p = &self.persons[pidx];
        let pos = p.pos;
        if p.state != PState::Attending || pos == NO_NODE || t < p.pos_entered_t + p.pos_dwell {
            return;
        }
        let zone = self.cell_zone[pos as usize];
        let candidates: Vec<NodeId> = self
            .graph
            .neighbors(pos)
            .iter()
            .copied()
            .filter(|n| self.cell_zone[*n as usize] == zone && !self.cell_full(*n))
            .collect();
        if candidates.is_empty() {
            return;
        }
        let pick = {
            let p = &mut self.persons[pidx];
            candidates[p.rng.next_below(candidates.len() as u64) as usize]
        };
        self.occupy(pidx, pick, t);
    }

    /// Forced end-of-day sweep; anyone still inside is dropped and counted.
    pub fn end_day(&mut self) {
        for pidx in 0..self.persons.len() {
            if self.persons[pidx].entered && !self.persons[pidx].done {
                self.vacate(pidx);
                let p = &mut self.persons[pidx];
                p.state = PState::Absent;
                p.done = true;
                self.inside_count -= 1;
                self.stragglers += 1;
            }
        }
    }
}

#[inline]
pub fn ptype_index(t: PersonType) -> usize {
    crate::model::ALL_PERSON_TYPES
        .iter()
        .position(|x| *x == t)
        .unwrap()
}

/// People currently positioned in a zone (any state).
pub fn zone_population(world: &World, zone: u16) -> Vec<usize> {
    world
        .persons
        .iter()
        .enumerate()
        .filter(|(_, p)| p.pos != NO_NODE && world.zone_of_node(p.pos) == zone)
        .map(|(i, _)| i)
        .collect()
}

/// Exhibitor booth kinds get deterministic anchors spread over the hall.
pub fn booth_anchor(world: &World, pidx: usize) -> Option<NodeId> {
    let person = &world.profile.roster[pidx];
    if person.ptype != PersonType::Exhibitor {
        return None;
    }
    let zone = world.map.zone_id("exhibition_hall").ok()?;
    let cells = &world.map.zones[zone as usize].cells;
    if cells.is_empty() {
        return None;
    }
    let k = (person.pid as usize * 2654435761) % cells.len();
    Some(cells[k].index() as NodeId)
}

/// Admission gate on a cell: enter only below full saturation.
pub fn gate_admits(occupancy: u16, capacity: u16) -> bool {
    occupancy < capacity
}
