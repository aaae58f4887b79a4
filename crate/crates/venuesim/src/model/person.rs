//! Conference personnel model.

use std::fmt;

/// The seven personnel types. Order is stable; indices are used in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonType {
    VipGuest,
    OrdinaryGuest,
    Visitor,
    MediaReporter,
    HackingContestant,
    Staff,
    Exhibitor,
}

pub const ALL_PERSON_TYPES: [PersonType; 7] = [
    PersonType::VipGuest,
    PersonType::OrdinaryGuest,
    PersonType::Visitor,
    PersonType::MediaReporter,
    PersonType::HackingContestant,
    PersonType::Staff,
    PersonType::Exhibitor,
];

impl PersonType {
    pub fn label(&self) -> &'static str {
        match self {
            PersonType::VipGuest => "vip_guest",
            PersonType::OrdinaryGuest => "ordinary_guest",
            PersonType::Visitor => "visitor",
            PersonType::MediaReporter => "media_reporter",
            PersonType::HackingContestant => "hacking_contestant",
            PersonType::Staff => "staff",
            PersonType::Exhibitor => "exhibitor",
        }
    }
}

impl fmt::Display for PersonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionStatus {
    Moving,
    Stay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorStatus {
    /// Not in the venue. Implies no position.
    Absent,
    /// In the venue, participating out of own interest.
    Focused,
    /// In the venue on assigned duty (chair, speaker, post).
    Occupied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
}

/// One duty stint binding a person to an activity for a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DutyStint {
    pub aid: u32,
    /// Passive role tag for reporting ("chair", "speaker", "contestant", ...).
    pub role_index: u8,
    /// Covers only part of the activity when set (e.g. booth shifts around
    /// lunch); the full activity window otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<crate::error::Window>,
}

pub mod duty_role {
    pub const CHAIR: u8 = 0;
    pub const SPEAKER: u8 = 1;
    pub const CONTESTANT: u8 = 2;
    pub const EXHIBITOR: u8 = 3;
    pub const STAFF_POST: u8 = 4;

    pub fn label(role: u8) -> &'static str {
        match role {
            CHAIR => "chair",
            SPEAKER => "speaker",
            CONTESTANT => "contestant",
            EXHIBITOR => "exhibitor",
            STAFF_POST => "staff_post",
            _ => "duty",
        }
    }
}

/// Static description of one person, as stored in the profile.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Person {
    pub pid: u32,
    pub ptype: PersonType,
    pub gender: Gender,
    pub age: u8,
    pub job: String,
    /// Initial energy at daily entry.
    pub e0: f64,
    /// Energy floor.
    pub e_min: f64,
    /// Per-epoch energy decay rate.
    pub edr: f64,
    /// Exit is triggered when energy drops below this.
    pub et: f64,
    /// Duty stints, if any (chairs, speakers, contestants, exhibitors, staff).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub duties: Vec<DutyStint>,
    /// Staff only: assigned post zone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_zone: Option<String>,
}

impl Person {
    pub fn is_staff(&self) -> bool {
        self.ptype == PersonType::Staff
    }

    pub fn duty_for(&self, aid: u32) -> Option<&DutyStint> {
        self.duties.iter().find(|d| d.aid == aid)
    }
}
