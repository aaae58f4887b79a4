//! The six movement-decision strategies, applied to every present person once
//! per decision epoch in a fixed order: duty pull, preemption, loss of
//! interest / switching, exit, then movement gating (which lives with the
//! movement mechanics).

use crate::model::PersonType;
use crate::profile::Profile;
use crate::rng::SimRng;

use super::world::{PState, Purpose, World, NO_ACT};
use super::{IntentKind, IntentReason};

/// Strategy 1: admission time. Anchored to the day's highest-matching
/// activity, jittered, clipped to the opening window; duty holders come in
/// early enough for their first duty.
pub fn decide_admission(
    profile: &Profile,
    pidx: usize,
    day: u8,
    rng: &mut SimRng,
) -> Option<(i64, Option<u16>)> {
    let open = profile.opening_hours.window(day).ok()?;
    let person = &profile.roster[pidx];
    let b = &profile.behavior;

    if person.is_staff() {
        let duty_start = open.start + b.staff_duty_offset_s;
        let advance = rng.range_i64(b.staff_advance_s.0, b.staff_advance_s.1);
        return Some(((duty_start - advance).max(open.start), None));
    }

    // Highest interest match across the day's permitted activities, evaluated
    // with the freshly initialized interest model.
    let mut best: Option<(f64, u32, u16)> = None;
    let n = profile.activities.len();
    for (i, a) in profile.activities.iter().enumerate() {
        if a.day != day || !a.permission.allows(person.ptype) {
            continue;
        }
        let pair = profile.pair(pidx, i);
        if pair.iv_max == 0.0 || pair.cav0 == 0.0 {
            continue;
        }
        let civ = pair.civ0;
        let cav = pair.cav0 * (1.0 - pair.adr);
        let imv = civ * cav;
        let _ = n;
        let better = match best {
            None => imv > 0.0,
            Some((bi, baid, _)) => imv > bi || (imv == bi && a.aid < baid),
        };
        if better {
            best = Some((imv, a.aid, i as u16));
        }
    }

    let duty_start = profile.first_duty_start(person, day);
    let anchor = best.map(|(_, _, i)| i);
    let mut entry = match anchor {
        Some(i) => {
            let start = profile.activities[i as usize].window.start;
            let j = b.entry_jitter_s;
            start + rng.range_i64(-j, j)
        }
        None => return duty_start.map(|d| ((d - b.duty_lead_s).max(open.start), None)),
    };
    if let Some(duty) = duty_start {
        let lead = b.duty_lead_s + rng.range_i64(0, 600);
        entry = entry.min(duty - lead);
    }
    Some((entry.clamp(open.start, open.end - 600), anchor))
}

/// Strategy 2: loss of interest. Strictly below the losing threshold.
pub fn is_bored(imv: f64, liv: f64) -> bool {
    imv < liv
}

/// Strategy 3: switching. Candidates are (aid, imv) pairs already filtered
/// for permission, ongoing state and room; picks the highest match at or
/// above the switching threshold, ties to the lowest aid.
pub fn choose_switch(candidates: &[(u32, f64)], siv: f64) -> Option<u32> {
    let mut best: Option<(f64, u32)> = None;
    for (aid, imv) in candidates {
        if *imv < siv {
            continue;
        }
        let better = match best {
            None => true,
            Some((bi, baid)) => *imv > bi || (*imv == bi && *aid < baid),
        };
        if better {
            best = Some((*imv, *aid));
        }
    }
    best.map(|(_, aid)| aid)
}

/// Strategy 4: preemption. Among strictly higher-priority ongoing candidates
/// whose match reaches the mandatory threshold, the highest priority wins,
/// then the highest match, then the lowest aid.
pub fn check_preemption(
    current_priority: u8,
    candidates: &[(u32, u8, f64)],
    miv: f64,
) -> Option<u32> {
    let mut best: Option<(u8, f64, u32)> = None;
    for (aid, prio, imv) in candidates {
        if *prio <= current_priority || *imv < miv {
            continue;
        }
        let better = match best {
            None => true,
            Some((bp, bi, baid)) => {
                *prio > bp || (*prio == bp && (*imv > bi || (*imv == bi && *aid < baid)))
            }
        };
        if better {
            best = Some((*prio, *imv, *aid));
        }
    }
    best.map(|(_, _, aid)| aid)
}

/// Strategy 5: exit. Any of: energy spent, nothing left worth switching to,
/// or the venue is about to close.
pub fn should_exit(
    energy: f64,
    exit_threshold: f64,
    has_candidate: bool,
    t: i64,
    close: i64,
    grace: i64,
) -> bool {
    energy < exit_threshold || !has_candidate || t >= close - grace
}

impl World<'_> {
    /// The per-epoch pass: refresh ongoing activities, then run the strategy
    /// ladder for every present person in pid order.
    pub fn epoch_sweep(&mut self, t: i64) {
        self.refresh_ongoing(t);
        let closing = t >= self.day_close - self.profile.behavior.exit_grace_s;
        for pidx in 0..self.persons.len() {
            match self.persons[pidx].state {
                PState::Absent => {}
                PState::Walking => self.sweep_walking(pidx, t, closing),
                PState::SideDwell => {
                    if closing && !matches!(self.persons[pidx].purpose, Purpose::ToExit) {
                        self.persons[pidx].state = PState::Attending;
                        self.start_exit(pidx, t, IntentReason::Closing);
                    }
                }
                PState::Attending => self.sweep_attending(pidx, t, closing),
            }
        }
    }

    fn sweep_walking(&mut self, pidx: usize, t: i64, closing: bool) {
        if closing {
            if !matches!(self.persons[pidx].purpose, Purpose::ToExit) {
                self.start_exit(pidx, t, IntentReason::Closing);
            }
            return;
        }
        // A walk toward a zone that has filled up, or one stuck behind a jam
        // for minutes, is abandoned; the person re-decides in place.
        if let Purpose::ToActivity(act) = self.persons[pidx].purpose {
            let blocked = self.persons[pidx].blocked_since;
            let stuck = blocked > 0 && t - blocked >= 180;
            if (act != NO_ACT && self.zone_full(self.zone_of_act(act))) || stuck {
                self.persons[pidx].state = PState::Attending;
                self.persons[pidx].purpose = Purpose::Idle;
                self.persons[pidx].gen += 1;
                self.persons[pidx].blocked_since = 0;
                self.try_switch(pidx, t, None, IntentReason::Displaced);
            }
        }
    }

    fn sweep_attending(&mut self, pidx: usize, t: i64, closing: bool) {
        if closing {
            self.start_exit(pidx, t, IntentReason::Closing);
            return;
        }

        let person = &self.profile.roster[pidx];
        let ptype = person.ptype;

        // Duty pull dominates interest.
        let duty = self.duty_at(pidx, t);
        if let Some((window, act)) = duty {
            let is_staff = ptype == PersonType::Staff;
            let on_site = if is_staff {
                self.staff_post_zone(pidx)
                    .is_some_and(|z| self.zone_of_node(self.persons[pidx].pos) == z)
            } else {
                self.persons[pidx].current_act == Some(act)
            };
            self.persons[pidx].occupied_now = t >= window.start && on_site;
            if !on_site {
                let target = if is_staff { NO_ACT } else { act };
                if !is_staff || self.persons[pidx].current_act.is_none() {
                    self.log_intent(
                        pidx,
                        IntentKind::SwitchActivity,
                        (target != NO_ACT).then(|| self.profile.activities[target as usize].aid),
                        IntentReason::Duty,
                    );
                }
                if is_staff {
                    if let Some(zone) = self.staff_post_zone(pidx) {
                        if let Some(cell) = self.pick_zone_cell(pidx, zone, &[]) {
                            self.start_route_to(pidx, cell, Purpose::ToActivity(NO_ACT), t);
                        }
                    }
                } else {
                    self.go_to_activity(pidx, act, t);
                }
                return;
            }
            // On duty: hold position, small repositioning only.
            self.maybe_fidget(pidx, t);
            if ptype == PersonType::Staff {
                self.maybe_staff_workroom(pidx, t);
            }
            return;
        }
        self.persons[pidx].occupied_now = false;

        // Staff outside duty windows head for the exit only at closing; they
        // hold their post otherwise.
        if ptype == PersonType::Staff {
            self.maybe_fidget(pidx, t);
            self.maybe_staff_workroom(pidx, t);
            return;
        }

        // Strategy 4 before Strategy 2: a high-priority start preempts.
        let current = self.persons[pidx].current_act;
        let cur_priority = current
            .map(|a| self.profile.activities[a as usize].priority)
            .unwrap_or(0);
        let mut preempt_candidates: Vec<(u32, u8, f64)> = Vec::new();
        for &oi in &self.ongoing {
            let a = &self.profile.activities[oi as usize];
            if a.priority <= cur_priority
                || Some(oi) == current
                || !a.permission.allows(ptype)
                || self.zone_full(self.zone_of_act(oi))
            {
                continue;
            }
            preempt_candidates.push((a.aid, a.priority, self.imv_of(pidx, oi as usize, t)));
        }
        if let Some(aid) =
            check_preemption(cur_priority, &preempt_candidates, self.profile.thresholds.miv)
        {
            let act = (aid - 1) as u16;
            self.log_intent(pidx, IntentKind::SwitchActivity, Some(aid), IntentReason::Preempt);
            self.go_to_activity(pidx, act, t);
            return;
        }

        // Strategy 2: boredom with the current activity (or it ended).
        let needs_switch = match current {
            Some(act) => {
                let a = &self.profile.activities[act as usize];
                !a.ongoing(t) || is_bored(self.imv_of(pidx, act as usize, t), self.profile.thresholds.liv)
            }
            None => true,
        };

        // Strategy 5 criterion 1: energy, independent of boredom. Pending
        // duty keeps a person in the venue regardless.
        let pending_duty = self.has_pending_duty(pidx, t);
        let energy = self.energy_of(pidx, t);
        if energy < self.profile.roster[pidx].et && !pending_duty {
            self.start_exit(pidx, t, IntentReason::Energy);
            return;
        }

        if needs_switch {
            let reason = match current {
                Some(act) if !self.profile.activities[act as usize].ongoing(t) => {
                    IntentReason::NoInterest
                }
                Some(_) => IntentReason::Bored,
                None => IntentReason::NoInterest,
            };
            self.try_switch(pidx, t, current, reason);
            return;
        }

        self.maybe_restroom(pidx, t);
        self.maybe_fidget(pidx, t);
    }

    /// Strategy 3 with Strategy 5 criterion 2 as the fallback.
    fn try_switch(
        &mut self,
        pidx: usize,
        t: i64,
        current: Option<u16>,
        reason: IntentReason,
    ) {
        let ptype = self.profile.roster[pidx].ptype;
        let mut candidates: Vec<(u32, f64)> = Vec::new();
        for &oi in &self.ongoing {
            let a = &self.profile.activities[oi as usize];
            if Some(oi) == current
                || !a.permission.allows(ptype)
                || self.zone_full(self.zone_of_act(oi))
            {
                continue;
            }
            candidates.push((a.aid, self.imv_of(pidx, oi as usize, t)));
        }
        match choose_switch(&candidates, self.profile.thresholds.siv) {
            Some(aid) => {
                let act = (aid - 1) as u16;
                self.log_intent(pidx, IntentKind::SwitchActivity, Some(aid), reason);
                if !self.go_to_activity(pidx, act, t) {
                    // Zone filled up in the meantime; stay put, retry next epoch.
                    self.leave_current(pidx, t);
                }
            }
            None => {
                if self.has_pending_duty(pidx, t) {
                    // Nothing appealing, but duty later today: linger in place.
                    self.leave_current(pidx, t);
                } else {
                    self.start_exit(pidx, t, IntentReason::NoInterest);
                }
            }
        }
    }

    fn maybe_fidget(&mut self, pidx: usize, t: i64) {
        if t >= self.persons[pidx].next_fidget {
            self.fidget(pidx, t);
            let (lo, hi) = self.profile.behavior.fidget_interval_s;
            let p = &mut self.persons[pidx];
            p.next_fidget = t + p.rng.range_i64(lo, hi);
        }
    }

    fn maybe_restroom(&mut self, pidx: usize, t: i64) {
        if t < self.persons[pidx].next_restroom {
            return;
        }
        let (lo, hi) = self.profile.behavior.restroom_interval_s;
        {
            let p = &mut self.persons[pidx];
            p.next_restroom = t + p.rng.range_i64(lo, hi);
        }
        let floor = crate::model::CellRef::from_index(self.persons[pidx].pos as usize).floor;
        let zone_name = if floor == 1 { "restroom_1" } else { "restroom_2" };
        if let Some(cell) = self.pick_zone_cell_by_name(pidx, zone_name) {
            self.start_route_to(pidx, cell, Purpose::ToRestroom, t);
        }
    }

    fn maybe_staff_workroom(&mut self, pidx: usize, t: i64) {
        if t < self.persons[pidx].next_workroom {
            return;
        }
        let (lo, hi) = self.profile.behavior.workroom_visit_interval_s;
        {
            let p = &mut self.persons[pidx];
            p.next_workroom = t + p.rng.range_i64(lo, hi);
        }
        if let Some(cell) = self.pick_zone_cell_by_name(pidx, "work_room") {
            self.start_route_to(pidx, cell, Purpose::ToWorkroom, t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boredom_is_strict() {
        assert!(is_bored(0.05 - 1e-9, 0.05));
        assert!(!is_bored(0.05, 0.05));
        assert!(!is_bored(0.10, 0.05));
    }

    #[test]
    fn switch_picks_highest_with_low_aid_ties() {
        assert_eq!(choose_switch(&[(4, 0.5), (9, 0.5)], 0.15), Some(4));
        assert_eq!(choose_switch(&[(2, 0.6), (7, 0.7)], 0.15), Some(7));
        assert_eq!(choose_switch(&[(2, 0.10), (7, 0.14)], 0.15), None);
        assert_eq!(choose_switch(&[], 0.15), None);
    }

    #[test]
    fn switch_matches_exhaustive_two_candidate_oracle() {
        // Brute-force oracle over a small grid of values.
        let values = [0.0, 0.1, 0.15, 0.2, 0.5, 0.5, 0.9];
        for &v1 in &values {
            for &v2 in &values {
                let got = choose_switch(&[(4, v1), (9, v2)], 0.15);
                let expect = {
                    let mut best: Option<(f64, u32)> = None;
                    for (aid, v) in [(4u32, v1), (9u32, v2)] {
                        if v >= 0.15 && best.map_or(true, |(bv, ba)| v > bv || (v == bv && aid < ba))
                        {
                            best = Some((v, aid));
                        }
                    }
                    best.map(|(_, a)| a)
                };
                assert_eq!(got, expect, "v1={v1} v2={v2}");
            }
        }
    }

    #[test]
    fn switch_is_scale_invariant() {
        let mut rng = crate::rng::SimRng::new(99);
        for _ in 0..500 {
            let n = 1 + rng.next_below(6) as usize;
            let cands: Vec<(u32, f64)> = (0..n)
                .map(|i| (i as u32 + 1, rng.next_f64()))
                .collect();
            let siv = rng.next_f64() * 0.5;
            let k = 0.1 + rng.next_f64() * 5.0;
            let scaled: Vec<(u32, f64)> = cands.iter().map(|(a, v)| (*a, v * k)).collect();
            assert_eq!(
                choose_switch(&cands, siv),
                choose_switch(&scaled, siv * k),
                "argmax must be invariant under common positive scaling"
            );
        }
    }

    #[test]
    fn preemption_requires_strict_priority_and_threshold() {
        // Equal priority never preempts.
        assert_eq!(check_preemption(5, &[(2, 5, 0.9)], 0.35), None);
        // Higher priority below threshold does not fire.
        assert_eq!(check_preemption(1, &[(2, 6, 0.34)], 0.35), None);
        // At the threshold it fires.
        assert_eq!(check_preemption(1, &[(2, 6, 0.35)], 0.35), Some(2));
        // Highest priority wins over higher match.
        assert_eq!(
            check_preemption(1, &[(2, 6, 0.4), (3, 5, 0.9)], 0.35),
            Some(2)
        );
    }

    #[test]
    fn exit_criteria() {
        // Energy strictly below the trigger.
        assert!(should_exit(0.09, 0.10, true, 0, 1000, 100));
        assert!(!should_exit(0.10, 0.10, true, 0, 1000, 100));
        // Nothing to switch to.
        assert!(should_exit(0.5, 0.1, false, 0, 1000, 100));
        // Closing time.
        assert!(should_exit(0.5, 0.1, true, 900, 1000, 100));
        assert!(!should_exit(0.5, 0.1, true, 899, 1000, 100));
    }

    #[test]
    fn admission_anchors_to_highest_match() {
        use crate::config::default_tree;
        use crate::profile::{init_profile, GenOptions};
        let tree = default_tree();
        let opts = GenOptions {
            scale: 0.02,
            ..GenOptions::default()
        };
        let profile = init_profile(&tree, &opts).unwrap();
        let open = profile.opening_hours.window(1).unwrap();
        for pidx in 0..profile.roster.len() {
            let mut rng = SimRng::new(7);
            if let Some((entry, _)) = decide_admission(&profile, pidx, 1, &mut rng) {
                assert!(entry >= open.start && entry < open.end);
                if profile.roster[pidx].is_staff() {
                    let duty = open.start + profile.behavior.staff_duty_offset_s;
                    assert!(entry < duty, "staff must arrive before duty");
                }
            }
        }
    }
}
