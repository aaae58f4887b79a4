//! Behavior dynamics: pure numeric update rules for energy, congestion speed,
//! interest and attraction, plus the interest matching value.
//!
//! All updates are affine contractions toward an explicit target
//! (`target + coefficient * (current - target)`), which keeps every state
//! variable inside its documented range and makes multi-step evaluation a
//! closed form: after `n` steps the gap to the target is exactly
//! `coefficient^n` times the initial gap. The simulation always evaluates the
//! closed forms so that lazily updated agents and eagerly updated agents see
//! bit-identical values.
//!
//! A literal-recurrence variant of the energy and interest rules is kept
//! behind [`FormulaMode::Literal`] for auditing; it reproduces the raw
//! recurrences including their divergent fixed points and is not meant for
//! data generation.

use crate::error::{Result, SimError};

/// Which family of update rules the simulation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaMode {
    #[default]
    Contraction,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyState {
    /// Current energy, in `[e_min, 1]`.
    pub e: f64,
    pub e_min: f64,
    /// Per-step decay rate.
    pub edr: f64,
    /// Exit trigger level, normally slightly above `e_min`.
    pub et: f64,
}

impl EnergyState {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("energy", self.e),
            ("e_min", self.e_min),
            ("edr", self.edr),
            ("et", self.et),
        ] {
            check_unit(what, v)?;
        }
        Ok(())
    }
}

/// Per (person, activity) interest state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterestState {
    /// Current interest value, in `[iv_min, iv_max]`.
    pub civ: f64,
    /// Interest decay ratio (applies while attending).
    pub idr: f64,
    /// Interest recovery ratio (applies while away).
    pub irr: f64,
    pub iv_min: f64,
    pub iv_max: f64,
    /// Attractiveness decay trend in `[-1, 1]`; negative means enjoyment.
    pub adt: f64,
}

/// Per (activity, person) attraction state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttractState {
    /// Pull at activity start for someone not yet involved.
    pub cav0: f64,
    /// Attractiveness decay ratio.
    pub adr: f64,
    /// Pull at the moment the person joined; drives the decline while present.
    pub cav_ref: f64,
}

/// Global decision thresholds: lose interest below `liv`, switch only to
/// candidates at or above `siv`, preempt at or above `miv`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub liv: f64,
    pub siv: f64,
    pub miv: f64,
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        check_unit("liv", self.liv)?;
        check_unit("siv", self.siv)?;
        check_unit("miv", self.miv)?;
        if !(self.liv <= self.siv && self.siv <= self.miv) {
            return Err(SimError::ConfigValidation(vec![format!(
                "thresholds must satisfy liv <= siv <= miv, got {} / {} / {}",
                self.liv, self.siv, self.miv
            )]));
        }
        Ok(())
    }
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(SimError::OutOfRange {
            what,
            value: v,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

// ── Energy ──────────────────────────────────────────────────────────────────

/// One energy step: decay toward the floor.
pub fn step_energy(s: &EnergyState) -> EnergyState {
    EnergyState {
        e: s.e_min + (1.0 - s.edr) * (s.e - s.e_min),
        ..*s
    }
}

/// Energy after `n` steps, closed form.
pub fn energy_after(s: &EnergyState, n: u32) -> f64 {
    s.e_min + (1.0 - s.edr).powi(n as i32) * (s.e - s.e_min)
}

/// One energy step under the literal recurrence (no floor offset).
pub fn step_energy_literal(s: &EnergyState) -> EnergyState {
    EnergyState {
        e: (1.0 - s.edr) * (s.e - s.e_min),
        ..*s
    }
}

/// Literal energy recurrence after `n` steps (affine closed form).
pub fn energy_after_literal(s: &EnergyState, n: u32) -> f64 {
    let a = 1.0 - s.edr;
    if s.edr == 0.0 {
        // x' = x - e_min: arithmetic drift.
        return s.e - n as f64 * s.e_min;
    }
    let fixed = -a * s.e_min / (1.0 - a);
    fixed + a.powi(n as i32) * (s.e - fixed)
}

// ── Congestion speed ────────────────────────────────────────────────────────

/// Speed ratio of a cell at saturation `sc`: `cos(2*pi*sc / (sc+1)^2)`.
/// Monotonically nonincreasing from 1 at `sc = 0` to 0 at `sc = 1`.
pub fn speed_ratio(sc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sc) || sc.is_nan() {
        return Err(SimError::OutOfRange {
            what: "saturation",
            value: sc,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(speed_ratio_sat(sc))
}

/// Saturating variant used by the simulation hot path.
#[inline]
pub fn speed_ratio_sat(sc: f64) -> f64 {
    let sc = sc.clamp(0.0, 1.0);
    let denom = (sc + 1.0) * (sc + 1.0);
    (std::f64::consts::TAU * sc / denom).cos()
}

// ── Interest ────────────────────────────────────────────────────────────────

/// One recovery step for an activity the person is not attending and has not
/// yet attended: interest climbs toward `iv_max`.
pub fn recover_interest(s: &InterestState) -> InterestState {
    InterestState {
        civ: s.iv_max - (1.0 - s.irr) * (s.iv_max - s.civ),
        ..*s
    }
}

/// Interest after `n` recovery steps, closed form.
pub fn recover_after(s: &InterestState, n: u32) -> f64 {
    s.iv_max - (1.0 - s.irr).powi(n as i32) * (s.iv_max - s.civ)
}

/// One decay step for the activity the person is attending. The trend `adt`
/// modulates the pace; a negative trend grows interest, capped at `iv_max`.
pub fn decay_interest(s: &InterestState) -> InterestState {
    let k = (1.0 - s.idr) * (1.0 - s.adt);
    InterestState {
        civ: (s.iv_min + k * (s.civ - s.iv_min)).clamp(s.iv_min, s.iv_max),
        ..*s
    }
}

/// Interest after `n` decay steps, closed form. The coefficient is
/// nonnegative, so the trajectory is monotone and the clamp commutes with
/// iteration.
pub fn decay_after(s: &InterestState, n: u32) -> f64 {
    let k = (1.0 - s.idr) * (1.0 - s.adt);
    (s.iv_min + k.powi(n as i32) * (s.civ - s.iv_min)).clamp(s.iv_min, s.iv_max)
}

/// Literal recovery recurrence (converges below `iv_max`).
pub fn recover_interest_literal(s: &InterestState) -> InterestState {
    InterestState {
        civ: (s.irr - 1.0) * (s.civ - s.iv_max),
        ..*s
    }
}

pub fn recover_after_literal(s: &InterestState, n: u32) -> f64 {
    // x' = a*(M - x), a = 1 - irr: alternating affine map.
    let a = 1.0 - s.irr;
    let fixed = a * s.iv_max / (1.0 + a);
    fixed + (-a).powi(n as i32) * (s.civ - fixed)
}

/// Literal decay recurrence (sign-flipping).
pub fn decay_interest_literal(s: &InterestState) -> InterestState {
    InterestState {
        civ: (s.idr - 1.0) * (1.0 - s.adt) * (s.civ - s.iv_min),
        ..*s
    }
}

pub fn decay_after_literal(s: &InterestState, n: u32) -> f64 {
    let k = (1.0 - s.idr) * (1.0 - s.adt);
    if k == 0.0 {
        return if n == 0 { s.civ } else { 0.0 };
    }
    let fixed = k * s.iv_min / (1.0 + k);
    fixed + (-k).powi(n as i32) * (s.civ - fixed)
}

// ── Attraction ──────────────────────────────────────────────────────────────

/// Pull of an activity on someone not yet involved, as a function of progress.
pub fn attract_prospective(a: &AttractState, progress: f64) -> Result<f64> {
    check_progress(progress)?;
    Ok(a.cav0 * (1.0 - a.adr) * (1.0 - progress))
}

/// Pull of an activity on someone already present; the decay ratio is left
/// out so it is not applied twice in the matching value.
pub fn attract_current(a: &AttractState, progress: f64) -> Result<f64> {
    check_progress(progress)?;
    Ok(a.cav_ref * (1.0 - progress))
}

fn check_progress(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(SimError::OutOfRange {
            what: "progress",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

// ── Matching ────────────────────────────────────────────────────────────────

/// Interest matching value: the product of interest and attraction.
#[inline]
pub fn imv(civ: f64, cav: f64) -> f64 {
    civ * cav
}

/// Pin a pairing for passive (duty-bound) participation: interest and pull are
/// held at the maximum and every change factor is zeroed.
pub fn pin_passive(s: &InterestState, _a: &AttractState) -> (InterestState, AttractState) {
    (
        InterestState {
            civ: 1.0,
            idr: 0.0,
            irr: 0.0,
            iv_min: s.iv_min,
            iv_max: 1.0,
            adt: 0.0,
        },
        AttractState {
            cav0: 1.0,
            adr: 0.0,
            cav_ref: 1.0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn interest(civ: f64, idr: f64, irr: f64, iv_min: f64, iv_max: f64, adt: f64) -> InterestState {
        InterestState {
            civ,
            idr,
            irr,
            iv_min,
            iv_max,
            adt,
        }
    }

    #[test]
    fn energy_step_examples() {
        let s = EnergyState {
            e: 1.0,
            e_min: 0.1,
            edr: 0.01,
            et: 0.15,
        };
        assert!((step_energy(&s).e - 0.991).abs() < EPS);

        let fixed = EnergyState {
            e: 0.1,
            e_min: 0.1,
            edr: 0.3,
            et: 0.15,
        };
        assert_eq!(step_energy(&fixed).e, 0.1);

        let frozen = EnergyState {
            e: 0.5,
            e_min: 0.1,
            edr: 0.0,
            et: 0.15,
        };
        assert_eq!(step_energy(&frozen).e, 0.5);
    }

    #[test]
    fn energy_gap_contracts_geometrically() {
        // The iterated gap to the floor must follow (1-edr)^n to 1e-9 relative
        // over 1e4 steps.
        let s0 = EnergyState {
            e: 0.97,
            e_min: 0.08,
            edr: 2e-5,
            et: 0.1,
        };
        let gap0 = s0.e - s0.e_min;
        let mut s = s0;
        for n in 1..=10_000u32 {
            s = step_energy(&s);
            let law = (1.0 - s0.edr).powi(n as i32) * gap0;
            let rel = ((s.e - s0.e_min) - law).abs() / law;
            assert!(rel < 1e-9, "rel error {rel} at n={n}");
            let closed = energy_after(&s0, n);
            assert!(((s.e - closed) / gap0).abs() < 1e-9);
        }
    }

    #[test]
    fn literal_energy_has_negative_fixed_point() {
        let s = EnergyState {
            e: 1.0,
            e_min: 0.1,
            edr: 0.01,
            et: 0.15,
        };
        let far = energy_after_literal(&s, 5_000);
        assert!(far < 0.0, "literal recurrence settles below zero, got {far}");
    }

    #[test]
    fn speed_ratio_anchor_points() {
        assert!((speed_ratio(0.0).unwrap() - 1.0).abs() < EPS);
        assert!(speed_ratio(1.0).unwrap().abs() < EPS);
        assert!((speed_ratio(0.5).unwrap() - 0.173_648_177_666_930_4).abs() < 1e-9);
        assert!(speed_ratio(-0.1).is_err());
        assert!(speed_ratio(1.1).is_err());
    }

    #[test]
    fn speed_ratio_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..=10_000 {
            let sr = speed_ratio(i as f64 / 10_000.0).unwrap();
            assert!(sr <= prev + 1e-15);
            assert!((-1e-15..=1.0 + 1e-15).contains(&sr));
            prev = sr;
        }
    }

    #[test]
    fn recover_examples() {
        let s = interest(0.2, 0.0, 0.5, 0.0, 0.8, 0.0);
        assert!((recover_interest(&s).civ - 0.5).abs() < EPS);

        let pinned = interest(0.8, 0.0, 0.5, 0.0, 0.8, 0.0);
        assert_eq!(recover_interest(&pinned).civ, 0.8);

        let instant = interest(0.1, 0.0, 1.0, 0.0, 0.9, 0.0);
        assert_eq!(recover_interest(&instant).civ, 0.9);
    }

    #[test]
    fn literal_recover_converges_short_of_max() {
        // The raw recurrence settles at (1-irr)/(2-irr) * iv_max.
        let s = interest(0.2, 0.0, 0.5, 0.0, 0.8, 0.0);
        let expect = 0.5 / 1.5 * 0.8;
        assert!((recover_after_literal(&s, 10_000) - expect).abs() < 1e-9);
    }

    #[test]
    fn decay_examples() {
        let s = interest(0.6, 0.5, 0.0, 0.2, 1.0, 0.0);
        assert!((decay_interest(&s).civ - 0.4).abs() < EPS);

        let drop = interest(0.6, 0.1, 0.0, 0.2, 1.0, 1.0);
        assert_eq!(decay_interest(&drop).civ, 0.2);

        let hold = interest(0.6, 0.0, 0.0, 0.2, 1.0, 0.0);
        assert_eq!(decay_interest(&hold).civ, 0.6);

        // Negative trend grows interest but the cap holds.
        let grow = interest(0.6, 0.0, 0.0, 0.2, 0.7, -1.0);
        assert_eq!(decay_interest(&grow).civ, 0.7);
    }

    #[test]
    fn attraction_examples() {
        let a = AttractState {
            cav0: 0.8,
            adr: 0.0,
            cav_ref: 0.6,
        };
        assert!((attract_prospective(&a, 0.0).unwrap() - 0.8).abs() < EPS);
        assert_eq!(attract_prospective(&a, 1.0).unwrap(), 0.0);

        let b = AttractState {
            cav0: 0.8,
            adr: 0.25,
            cav_ref: 0.6,
        };
        assert!((attract_prospective(&b, 0.5).unwrap() - 0.3).abs() < EPS);

        assert!((attract_current(&a, 0.0).unwrap() - 0.6).abs() < EPS);
        assert_eq!(attract_current(&a, 1.0).unwrap(), 0.0);
        assert!((attract_current(&a, 0.25).unwrap() - 0.45).abs() < EPS);

        assert!(attract_prospective(&a, 1.5).is_err());
        assert!(attract_current(&a, -0.1).is_err());
    }

    #[test]
    fn imv_examples() {
        assert!((imv(0.8, 0.5) - 0.4).abs() < EPS);
        assert_eq!(imv(0.0, 0.77), 0.0);
        assert_eq!(imv(1.0, 1.0), 1.0);
        assert_eq!(imv(0.3, 0.9), imv(0.9, 0.3));
    }

    #[test]
    fn pinned_pairing_stays_at_one() {
        let (i, a) = pin_passive(
            &interest(0.4, 0.3, 0.2, 0.1, 0.9, 0.5),
            &AttractState {
                cav0: 0.5,
                adr: 0.4,
                cav_ref: 0.5,
            },
        );
        // No update rule can move a pinned pairing.
        assert_eq!(decay_interest(&i).civ, 1.0);
        assert_eq!(recover_interest(&i).civ, 1.0);
        assert_eq!(attract_current(&a, 0.0).unwrap(), 1.0);
        assert_eq!(imv(i.civ, 1.0), 1.0);
    }

    #[test]
    fn thresholds_ordering_enforced() {
        assert!(Thresholds {
            liv: 0.05,
            siv: 0.15,
            miv: 0.35
        }
        .validate()
        .is_ok());
        assert!(Thresholds {
            liv: 0.2,
            siv: 0.1,
            miv: 0.3
        }
        .validate()
        .is_err());
    }
}
