//! Conference activity model.

use crate::error::Window;
use crate::model::person::PersonType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityKind {
    AcademicMain,
    AcademicSub,
    Contest,
    Exhibition,
    Poster,
    TeaBreak,
    Lunch,
    Banquet,
    VipRest,
    MediaBase,
    StaffBase,
    Leisure,
    Special,
}

/// Which personnel types may attend an activity.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Permission {
    All,
    AllExcept(Vec<PersonType>),
    Only(Vec<PersonType>),
}

impl Permission {
    pub fn allows(&self, ptype: PersonType) -> bool {
        match self {
            Permission::All => true,
            Permission::AllExcept(v) => !v.contains(&ptype),
            Permission::Only(v) => v.contains(&ptype),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Activity {
    pub aid: u32,
    pub name: String,
    pub kind: ActivityKind,
    pub zone: String,
    pub day: u8,
    /// Absolute start/end seconds.
    pub window: Window,
    pub permission: Permission,
    /// 0..=6; higher preempts lower.
    pub priority: u8,
    /// Standing activities never progress (rest rooms, bases); their pull is constant.
    #[serde(default)]
    pub standing: bool,
    /// Base-attraction scale from the schedule; below 1.0 marks niche content.
    #[serde(default = "default_appeal")]
    pub appeal: f64,
    /// Optional placement anchor cells (e.g. a signing table); attendees cluster here.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub focus_cells: Vec<(u8, u8, u8)>,
}

fn default_appeal() -> f64 {
    1.0
}

impl Activity {
    /// Completion progress at time `t`, clamped to `[0, 1]`.
    /// Standing activities are pinned at zero progress.
    pub fn progress(&self, t: i64) -> f64 {
        if self.standing {
            return 0.0;
        }
        let span = self.window.duration();
        if span <= 0 {
            return 1.0;
        }
        let p = (t - self.window.start) as f64 / span as f64;
        p.clamp(0.0, 1.0)
    }

    pub fn ongoing(&self, t: i64) -> bool {
        t >= self.window.start && t < self.window.end
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(start: i64, end: i64) -> Activity {
        Activity {
            aid: 1,
            name: "x".into(),
            kind: ActivityKind::AcademicMain,
            zone: "main_venue".into(),
            day: 1,
            window: Window::new(start, end),
            permission: Permission::All,
            priority: 5,
            standing: false,
            appeal: 1.0,
            focus_cells: vec![],
        }
    }

    #[test]
    fn progress_clamps() {
        let a = act(100, 200);
        assert_eq!(a.progress(50), 0.0);
        assert_eq!(a.progress(100), 0.0);
        assert_eq!(a.progress(150), 0.5);
        assert_eq!(a.progress(200), 1.0);
        assert_eq!(a.progress(999), 1.0);
    }

    #[test]
    fn permission_filters() {
        let p = Permission::AllExcept(vec![PersonType::Visitor]);
        assert!(p.allows(PersonType::VipGuest));
        assert!(!p.allows(PersonType::Visitor));
        let q = Permission::Only(vec![PersonType::MediaReporter]);
        assert!(q.allows(PersonType::MediaReporter));
        assert!(!q.allows(PersonType::Staff));
    }
}
