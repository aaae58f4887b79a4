use std::fmt;

/// Time window in absolute simulation seconds, end inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub start: i64,
    pub end: i64,
}

impl Window {
    pub fn new(start: i64, end: i64) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn overlaps(&self, other: &Window) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn duration(&self) -> i64 {
        self.end - self.start
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("coordinate out of range: floor {floor}, x {x}, y {y}")]
    InvalidCoordinate { floor: u8, x: i32, y: i32 },

    #[error("unknown zone `{0}`")]
    UnknownZone(String),

    #[error("day {0} out of range (expected 1..=3)")]
    InvalidDay(u8),

    #[error("value {value} outside [{lo}, {hi}] for {what}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no route from {from} to {to} for {who}")]
    NoRoute {
        from: String,
        to: String,
        who: String,
    },

    #[error("cannot stitch trajectory joint for pid {pid} at window {window}")]
    UnstitchableJoint { pid: u32, window: Window },

    #[error("config validation failed:\n{}", .0.join("\n"))]
    ConfigValidation(Vec<String>),

    #[error("event script `{script}` invalid: {}", .problems.join("; "))]
    ScriptValidation {
        script: String,
        problems: Vec<String>,
    },

    #[error("parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SimError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl SimError {
    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        SimError::Json {
            context: context.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        SimError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
