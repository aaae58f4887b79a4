//! Machine-readable ground truth emitted next to every generated dataset.

use std::path::Path;

use crate::error::Result;
use crate::events::executor::{EventMeta, EventPlan};
use crate::profile::Profile;

pub const GROUND_TRUTH_VERSION: u32 = 1;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthReport {
    pub version: u32,
    pub seed: u64,
    pub scale: f64,
    pub days: Vec<u8>,
    pub enabled_events: Vec<String>,
    /// Scripted pids that were remapped onto this roster: (scripted, actual).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub remapped_pids: Vec<(u32, u32)>,
    pub events: Vec<EventMeta>,
}

impl GroundTruthReport {
    pub fn build(profile: &Profile, plan: &EventPlan) -> GroundTruthReport {
        GroundTruthReport {
            version: GROUND_TRUTH_VERSION,
            seed: profile.seed,
            scale: profile.scale,
            days: profile.days.clone(),
            enabled_events: profile.enabled_events.clone(),
            remapped_pids: plan.remaps.clone(),
            events: plan.meta.clone(),
        }
    }

    pub fn event(&self, id: &str) -> Option<&EventMeta> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::config::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<GroundTruthReport> {
        crate::config::read_json(path)
    }
}
