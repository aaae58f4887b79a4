//! Simulation time base: integer seconds from day-1 00:00:00.

use crate::error::{Result, SimError, Window};

pub const DAY_SECONDS: i64 = 86_400;

/// Venue opening hours per day. Defaults follow the standard three-day plan.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpeningHours {
    /// `[open, close]` offsets within each day, seconds since that day's 00:00.
    pub days: Vec<(i64, i64)>,
}

impl Default for OpeningHours {
    fn default() -> Self {
        OpeningHours {
            days: vec![
                (hms(7, 30, 0), hms(18, 0, 0)),
                (hms(8, 0, 0), hms(19, 30, 0)),
                (hms(7, 30, 0), hms(13, 0, 0)),
            ],
        }
    }
}

impl OpeningHours {
    /// Absolute `[open, close]` window of `day` (1-based).
    pub fn window(&self, day: u8) -> Result<Window> {
        let idx = day
            .checked_sub(1)
            .map(usize::from)
            .filter(|i| *i < self.days.len())
            .ok_or(SimError::InvalidDay(day))?;
        let base = (day as i64 - 1) * DAY_SECONDS;
        let (open, close) = self.days[idx];
        Ok(Window::new(base + open, base + close))
    }

    pub fn day_count(&self) -> u8 {
        self.days.len() as u8
    }

    /// True when `t` falls inside any opening window.
    pub fn is_open(&self, t: i64) -> bool {
        (1..=self.day_count()).any(|d| self.window(d).map(|w| w.contains(t)).unwrap_or(false))
    }
}

#[inline]
pub fn hms(h: i64, m: i64, s: i64) -> i64 {
    h * 3600 + m * 60 + s
}

/// Day number (1-based) containing absolute second `t`.
#[inline]
pub fn day_of(t: i64) -> u8 {
    (t.div_euclid(DAY_SECONDS) + 1) as u8
}

/// Absolute second for `day` (1-based) at `hh:mm:ss`.
#[inline]
pub fn at(day: u8, h: i64, m: i64, s: i64) -> i64 {
    (day as i64 - 1) * DAY_SECONDS + hms(h, m, s)
}

/// Render an absolute second as `day hh:mm:ss`.
pub fn wallclock(t: i64) -> String {
    let day = day_of(t);
    let rem = t.rem_euclid(DAY_SECONDS);
    format!(
        "{} {:02}:{:02}:{:02}",
        day,
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_windows_match_plan() {
        let oh = OpeningHours::default();
        assert_eq!(oh.window(1).unwrap(), Window::new(27_000, 64_800));
        assert_eq!(oh.window(2).unwrap(), Window::new(115_200, 156_600));
        assert_eq!(oh.window(3).unwrap(), Window::new(199_800, 219_600));
    }

    #[test]
    fn day_out_of_range_is_an_error() {
        let oh = OpeningHours::default();
        assert!(oh.window(0).is_err());
        assert!(oh.window(4).is_err());
    }

    #[test]
    fn wallclock_rendering() {
        assert_eq!(wallclock(at(2, 13, 33, 21)), "2 13:33:21");
        assert_eq!(at(2, 13, 33, 21), 135_201);
        assert_eq!(at(2, 13, 56, 15), 136_575);
    }
}
