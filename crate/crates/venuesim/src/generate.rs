//! End-to-end dataset generation: profile -> background -> events -> fusion
//! -> masking -> dedup -> canonical stream plus ground truth.

use crate::config::ConfigTree;
use crate::error::Result;
use crate::events::executor::{build_plan, run_events, EventPlan};
use crate::events::script::EventScript;
use crate::groundtruth::GroundTruthReport;
use crate::pipeline;
use crate::profile::{init_profile, GenOptions, Profile};
use crate::record::TrajectoryRecord;
use crate::routing::GridGraph;
use crate::sim::MoveIntent;

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct GenerateSummary {
    pub people: usize,
    pub activities: usize,
    pub enabled_events: Vec<String>,
    pub background_records: usize,
    pub abnormal_records: usize,
    pub final_records: usize,
    pub unique_pids: usize,
    pub person_seconds: u64,
}

pub struct GenerateOutput {
    pub profile: Profile,
    pub records: Vec<TrajectoryRecord>,
    pub ground_truth: GroundTruthReport,
    pub intents: Vec<MoveIntent>,
    pub summary: GenerateSummary,
}

/// Run the whole generation pipeline for a validated config tree.
pub fn generate(tree: &ConfigTree, opts: &GenOptions) -> Result<GenerateOutput> {
    generate_with(tree, opts, |_, _| {})
}

/// Like [`generate`], with an observer called at every background epoch.
pub fn generate_with(
    tree: &ConfigTree,
    opts: &GenOptions,
    observer: impl FnMut(&crate::sim::World, i64),
) -> Result<GenerateOutput> {
    let profile = init_profile(tree, opts).map_err(|e| e.in_stage("init-profile"))?;
    let map = profile.build_map().map_err(|e| e.in_stage("map"))?;
    let graph = GridGraph::build(&map);

    let enabled: Vec<&EventScript> = tree
        .scripts
        .iter()
        .filter(|s| profile.enabled_events.contains(&s.id))
        .collect();
    let plan: EventPlan =
        build_plan(&profile, &map, &graph, &enabled).map_err(|e| e.in_stage("event-plan"))?;

    let background = crate::sim::run_background_with(&profile, &plan.modifiers, observer)
        .map_err(|e| e.in_stage("background"))?;
    let events =
        run_events(&profile, &map, &graph, &plan).map_err(|e| e.in_stage("events"))?;

    let background_records = background.records.len();
    let abnormal_records = events.records.len() + overlay_len(&events);

    let fused = pipeline::fuse(
        background.records,
        &events.records,
        &events.overlay,
        &events.claims,
        &profile,
        &map,
        &graph,
    )
    .map_err(|e| e.in_stage("fusion"))?;
    let masked = pipeline::mask_sensor_failures(fused, &plan.sensor_masks);
    let records = pipeline::dedup(masked);

    let unique_pids = {
        let mut pids: Vec<u32> = records.iter().map(|r| r.pid).collect();
        pids.sort_unstable();
        pids.dedup();
        pids.len()
    };

    let ground_truth = GroundTruthReport::build(&profile, &plan);
    let summary = GenerateSummary {
        people: profile.roster.len(),
        activities: profile.activities.len(),
        enabled_events: profile.enabled_events.clone(),
        background_records,
        abnormal_records,
        final_records: records.len(),
        unique_pids,
        person_seconds: background.person_seconds,
    };
    Ok(GenerateOutput {
        profile,
        records,
        ground_truth,
        intents: background.intents,
        summary,
    })
}

fn overlay_len(out: &crate::events::executor::EventOutput) -> usize {
    out.overlay.len()
}

/// Convenience wrapper: generate and write the three artifacts.
pub fn generate_to_dir(
    tree: &ConfigTree,
    opts: &GenOptions,
    out_dir: &std::path::Path,
    wallclock: bool,
) -> Result<GenerateOutput> {
    let out = generate(tree, opts)?;
    std::fs::create_dir_all(out_dir)?;
    pipeline::emit_csv(&out.records, &out_dir.join("dataset.csv"), wallclock)
        .map_err(|e| e.in_stage("emit"))?;
    out.ground_truth
        .save(&out_dir.join("ground_truth.json"))
        .map_err(|e| e.in_stage("ground-truth"))?;
    out.profile
        .save(&out_dir.join("profile.json"))
        .map_err(|e| e.in_stage("profile"))?;
    Ok(out)
}
