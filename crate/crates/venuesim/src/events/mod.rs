//! Anomaly event machinery: script format, forced-track executor, and the
//! ground-truth bookkeeping that accompanies generated datasets.

pub mod executor;
pub mod script;

pub use executor::{build_plan, run_events, Claim, EventMeta, EventOutput, EventPlan};
pub use script::{ActorSel, ClaimSpec, Directive, EventScript, JointMode, Place, ProfilePatch};
