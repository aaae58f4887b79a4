//! Time-stepped background simulation: the per-tick status update, the six
//! movement-decision strategies, and the day driver that turns a profile into
//! a stream of cell-entry records.

pub mod driver;
pub mod strategies;
pub mod world;

pub use driver::{run_background, run_background_with, BackgroundOutput};
pub use world::World;

use std::collections::{HashMap, HashSet};

/// What a person decided to do, for the intent log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntentKind {
    EnterVenue,
    SwitchActivity,
    ExitVenue,
    Stay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntentReason {
    Admission,
    Duty,
    Preempt,
    Bored,
    Displaced,
    NoInterest,
    Energy,
    Closing,
    Eliminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveIntent {
    pub issued_at: i64,
    pub pid: u32,
    pub kind: IntentKind,
    /// Target activity for switches, if any.
    pub target: Option<u32>,
    pub reason: IntentReason,
}

/// Background-behavior modifiers derived from enabled event scripts.
#[derive(Debug, Clone, Default)]
pub struct SimModifiers {
    /// (pid, day) -> entry delay in seconds.
    pub entry_shifts: HashMap<(u32, u8), i64>,
    /// Scheduled forced departures; affected pids never return.
    pub forced_exits: Vec<ForcedExit>,
}

#[derive(Debug, Clone)]
pub struct ForcedExit {
    pub at_s: i64,
    pub day: u8,
    pub pids: HashSet<u32>,
}
