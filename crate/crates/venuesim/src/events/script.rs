//! Event scripts: declarative storylines that force statuses, placements and
//! routes for anomalous episodes. Scripts are data files; the builtin set
//! ships with the default configuration.

use crate::error::{Result, SimError, Window};
use crate::model::{ActivityKind, PersonType};

/// Selects the people a directive applies to.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorSel {
    /// A single roster member.
    Pid(u32),
    /// A second, physically independent track recorded under an existing
    /// pid (a duplicated badge). Merged additively with the real track.
    GhostOf(u32),
    /// Deterministic slice of one type's roster, ordered by pid: members
    /// whose index satisfies `index % modulo == rem`.
    RoleSlice {
        role: PersonType,
        modulo: u32,
        rem: u32,
    },
}

/// How a forced track joins the background stream at its edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointMode {
    /// Stitch to the actor's background trajectory (default).
    #[default]
    Background,
    /// Synthesize a walk from/to the actor's entrance.
    Entrance,
}

/// Which background window a forced track claims (replaces).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimSpec {
    /// Exactly the span of the track's own records.
    #[default]
    Auto,
    /// The actor's whole opening day containing the track.
    FullDay,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Zone(String),
    Cell(u8, u8, u8),
}

/// One forced instruction inside a script timeline.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Directive {
    /// Hold the actor at a fixed cell for the window (status forced to stay).
    ForceStatus {
        actor: ActorSel,
        cell: (u8, u8, u8),
        window: Window,
        #[serde(default)]
        entry: JointMode,
        #[serde(default)]
        exit: JointMode,
        #[serde(default)]
        claim: ClaimSpec,
    },
    /// Keep the actor inside a zone (or at a cell) for the window, with
    /// optional small repositioning between `fidget_s` bounds.
    ForcePresence {
        actor: ActorSel,
        place: Place,
        window: Window,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fidget_s: Option<(i64, i64)>,
        #[serde(default)]
        entry: JointMode,
        #[serde(default)]
        exit: JointMode,
        #[serde(default)]
        claim: ClaimSpec,
    },
    /// Walk an explicit cell list. Entry into `cells[anchor_index]` happens at
    /// exactly `anchor_t`; every other entry follows from per-cell dwells.
    ForceRoute {
        actor: ActorSel,
        cells: Vec<(u8, u8, u8)>,
        anchor_index: usize,
        anchor_t: i64,
        #[serde(default)]
        entry: JointMode,
        #[serde(default)]
        exit: JointMode,
    },
    /// Drop every record of `sids` inside the window (sensor outage).
    SuppressSensors { sids: Vec<u32>, window: Window },
    /// A cohort tours `waypoints` together inside the window, each member
    /// lagging the previous by `stagger_s` seconds.
    SpawnGroup {
        members: ActorSel,
        window: Window,
        waypoints: Vec<(u8, u8, u8)>,
        stagger_s: f64,
        /// Extra per-cell pacing on top of the physical minimum dwell.
        #[serde(default)]
        pace_s: i64,
    },
    /// Delay the listed pids' first entry of `day` by the paired offsets.
    ShiftEntry {
        pids: Vec<u32>,
        day: u8,
        offsets_s: Vec<i64>,
    },
    /// At `at_s`, a deterministic `fraction` of `role` members still inside
    /// leave the venue; they remain absent for the rest of the conference.
    ForceExit {
        role: PersonType,
        day: u8,
        at_s: i64,
        fraction: f64,
    },
    /// A badge rests at one cell for the whole window, emitting no movement.
    PinBadge {
        pid: u32,
        cell: (u8, u8, u8),
        window: Window,
        #[serde(default)]
        entry: JointMode,
        #[serde(default)]
        exit: JointMode,
        #[serde(default)]
        claim: ClaimSpec,
    },
}

/// Cohort selector for profile patches.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortSel {
    pub roles: Vec<PersonType>,
    pub modulo: u32,
    pub rems: Vec<u32>,
}

/// Initializer-stage overrides applied before simulation when the script is
/// enabled (the manual-tuning hook of profile construction).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfilePatch {
    /// Raise a cohort's pull toward one activity (by name).
    AttractBoost {
        activity: String,
        cohort: CohortSel,
        cav0_min: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        adt_max: Option<f64>,
    },
    /// Add an extra activity to the schedule.
    AddActivity {
        name: String,
        activity_kind: ActivityKind,
        zone: String,
        day: u8,
        start_s: i64,
        end_s: i64,
        priority: u8,
        #[serde(default)]
        focus_cells: Vec<(u8, u8, u8)>,
    },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventScript {
    pub version: u32,
    /// Stable event id, "E1".."E12" for the builtin set.
    pub id: String,
    pub name: String,
    pub narrative: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patches: Vec<ProfilePatch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directives: Vec<Directive>,
}

impl EventScript {
    /// Sensor-outage windows declared by this script.
    pub fn sensor_failures(&self) -> Vec<(Vec<u32>, Window)> {
        self.directives
            .iter()
            .filter_map(|d| match d {
                Directive::SuppressSensors { sids, window } => Some((sids.clone(), *window)),
                _ => None,
            })
            .collect()
    }

    /// Pids whose tracks intentionally overlap their background track
    /// (duplicate badges); physical continuity is waived for them inside the
    /// given windows.
    pub fn ghost_windows(&self) -> Vec<(u32, Window)> {
        let mut out = Vec::new();
        for d in &self.directives {
            let (actor, window) = match d {
                Directive::ForcePresence { actor, window, .. } => (actor, *window),
                Directive::ForceStatus { actor, window, .. } => (actor, *window),
                Directive::ForceRoute {
                    actor,
                    anchor_t,
                    cells,
                    ..
                } => {
                    // Conservative: a route spans at most its cell count times
                    // a generous dwell on each side of the anchor.
                    let span = cells.len() as i64 * 32;
                    (actor, Window::new(anchor_t - span, anchor_t + span))
                }
                _ => continue,
            };
            if let ActorSel::GhostOf(pid) = actor {
                out.push((*pid, window));
            }
        }
        out
    }

    /// Structural validation that does not need a profile: window sanity and
    /// selector arithmetic. Roster-dependent checks happen at resolution time.
    pub fn validate_shape(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (i, d) in self.directives.iter().enumerate() {
            match d {
                Directive::ForceStatus { window, .. }
                | Directive::ForcePresence { window, .. }
                | Directive::PinBadge { window, .. }
                | Directive::SuppressSensors { window, .. }
                | Directive::SpawnGroup { window, .. } => {
                    if window.start > window.end {
                        problems.push(format!("directive {i}: window {window} is reversed"));
                    }
                }
                Directive::ForceRoute {
                    cells,
                    anchor_index,
                    ..
                } => {
                    if cells.is_empty() {
                        problems.push(format!("directive {i}: empty route"));
                    } else if *anchor_index >= cells.len() {
                        problems.push(format!(
                            "directive {i}: anchor index {} outside route of {} cells",
                            anchor_index,
                            cells.len()
                        ));
                    }
                }
                Directive::ShiftEntry { pids, offsets_s, .. } => {
                    if pids.len() != offsets_s.len() {
                        problems.push(format!(
                            "directive {i}: {} pids but {} offsets",
                            pids.len(),
                            offsets_s.len()
                        ));
                    }
                }
                Directive::ForceExit { fraction, .. } => {
                    if !(0.0..=1.0).contains(fraction) {
                        problems.push(format!("directive {i}: fraction {fraction} outside [0,1]"));
                    }
                }
            }
            if let Some(sel) = directive_actor(d) {
                if let ActorSel::RoleSlice { modulo, rem, .. } = sel {
                    if *modulo == 0 || rem >= modulo {
                        problems.push(format!("directive {i}: bad role slice {rem}%{modulo}"));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::ScriptValidation {
                script: self.id.clone(),
                problems,
            })
        }
    }
}

pub fn directive_actor(d: &Directive) -> Option<&ActorSel> {
    match d {
        Directive::ForceStatus { actor, .. }
        | Directive::ForcePresence { actor, .. }
        | Directive::ForceRoute { actor, .. }
        | Directive::SpawnGroup { members: actor, .. } => Some(actor),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_roundtrips_through_json() {
        let script = EventScript {
            version: 1,
            id: "E4".into(),
            name: "unauthorized access".into(),
            narrative: "test".into(),
            patches: vec![],
            directives: vec![Directive::ForcePresence {
                actor: ActorSel::Pid(11201),
                place: Place::Zone("vip_lounge".into()),
                window: Window::new(32_400, 33_600),
                fidget_s: Some((120, 300)),
                entry: JointMode::Background,
                exit: JointMode::Background,
                claim: ClaimSpec::Auto,
            }],
        };
        let text = serde_json::to_string_pretty(&script).unwrap();
        let back: EventScript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, script);
    }

    #[test]
    fn shape_validation_catches_reversed_windows() {
        let script = EventScript {
            version: 1,
            id: "X".into(),
            name: "bad".into(),
            narrative: String::new(),
            patches: vec![],
            directives: vec![Directive::SuppressSensors {
                sids: vec![10715],
                window: Window::new(10, 5),
            }],
        };
        assert!(script.validate_shape().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"version":1,"id":"E1","name":"x","narrative":"","bogus":3}"#;
        assert!(serde_json::from_str::<EventScript>(text).is_err());
    }
}
