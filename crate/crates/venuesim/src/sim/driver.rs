//! The time-slice driver: bins each opening day by seconds, replays scheduled
//! movement events, and runs the decision sweep at epoch boundaries.

use crate::error::Result;
use crate::profile::Profile;
use crate::record::TrajectoryRecord;
use crate::rng::SimRng;

use super::strategies::decide_admission;
use super::world::{WheelEvent, World};
use super::{IntentReason, MoveIntent, SimModifiers};

#[derive(Debug)]
pub struct BackgroundOutput {
    pub records: Vec<TrajectoryRecord>,
    pub intents: Vec<MoveIntent>,
    /// Integral of the inside-venue headcount over simulated seconds.
    pub person_seconds: u64,
    /// People force-dropped at close without an exit walk; zero in any healthy run.
    pub stragglers: u32,
}

pub fn run_background(profile: &Profile, modifiers: &SimModifiers) -> Result<BackgroundOutput> {
    run_background_with(profile, modifiers, |_, _| {})
}

/// Run the background simulation, calling `observer(world, t)` at every epoch
/// boundary before decisions are made.
pub fn run_background_with(
    profile: &Profile,
    modifiers: &SimModifiers,
    mut observer: impl FnMut(&World, i64),
) -> Result<BackgroundOutput> {
    let mut world = World::new(profile)?;
    let mut pending_target: Vec<Option<u16>> = vec![None; profile.roster.len()];

    let mut days = profile.days.clone();
    days.sort_unstable();
    days.dedup();

    for &day in &days {
        world.init_day(day)?;
        let open = world.day_open;
        let close = world.day_close;

        // Strategy 1 for everyone, with scripted entry shifts applied.
        for pidx in 0..profile.roster.len() {
            if world.persons[pidx].eliminated {
                continue;
            }
            let mut rng = SimRng::derive_keyed(
                profile.seed,
                "admission",
                ((profile.roster[pidx].pid as u64) << 8) | day as u64,
            );
            if let Some((mut entry, anchor)) = decide_admission(profile, pidx, day, &mut rng) {
                if let Some(shift) = modifiers
                    .entry_shifts
                    .get(&(profile.roster[pidx].pid, day))
                {
                    entry = (entry + shift).min(close - 600);
                }
                pending_target[pidx] = anchor;
                world.schedule(entry.max(open), WheelEvent::Enter(pidx as u32));
            }
        }

        let mut exits: Vec<&super::ForcedExit> = modifiers
            .forced_exits
            .iter()
            .filter(|fe| fe.day == day)
            .collect();
        exits.sort_by_key(|fe| fe.at_s);
        let mut exit_cursor = 0;

        let epoch = profile.behavior.decision_epoch_s;
        for t in open..=close {
            world.clock = t;
            world.person_seconds += u64::from(world.inside_count);

            for ev in world.take_slot(t) {
                match ev {
                    WheelEvent::Enter(p) => {
                        let pidx = p as usize;
                        world.enter(pidx, t, pending_target[pidx]);
                    }
                    WheelEvent::Move(p, gen) => world.process_move(p as usize, gen, t),
                    WheelEvent::Wake(p, gen) => world.wake(p as usize, gen, t),
                }
            }

            while exit_cursor < exits.len() && exits[exit_cursor].at_s <= t {
                let order = exits[exit_cursor];
                for pidx in 0..profile.roster.len() {
                    let pid = profile.roster[pidx].pid;
                    if order.pids.contains(&pid) {
                        world.persons[pidx].eliminated = true;
                        if world.persons[pidx].entered && !world.persons[pidx].done {
                            world.start_exit(pidx, t, IntentReason::Eliminated);
                        }
                    }
                }
                exit_cursor += 1;
            }

            if (t - open) % epoch == 0 {
                observer(&world, t);
                world.epoch_sweep(t);
            }
        }
        world.end_day();
    }

    Ok(BackgroundOutput {
        records: world.records,
        intents: world.intents,
        person_seconds: world.person_seconds,
        stragglers: world.stragglers,
    })
}
