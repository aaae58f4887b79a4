//! Property tests for the behavior-dynamics functions.

use proptest::prelude::*;
use venuesim::dynamics::{
    attract_current, attract_prospective, decay_after, decay_interest, energy_after, imv,
    recover_after, recover_interest, speed_ratio, step_energy, AttractState, EnergyState,
    InterestState,
};

fn interest_strategy() -> impl Strategy<Value = InterestState> {
    (
        0.0..1.0f64,
        0.0..1.0f64,
        0.0..1.0f64,
        0.0..0.5f64,
        0.5..1.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(c, idr, irr, iv_min, iv_max, adt)| InterestState {
            civ: iv_min + c * (iv_max - iv_min),
            idr,
            irr,
            iv_min,
            iv_max,
            adt,
        })
}

proptest! {
    #[test]
    fn recovery_climbs_toward_the_cap(s in interest_strategy()) {
        let next = recover_interest(&s).civ;
        prop_assert!(next >= s.civ - 1e-12);
        prop_assert!(next <= s.iv_max + 1e-12);
        // Multi-step closed form stays inside the box too.
        for n in [1u32, 7, 100, 10_000] {
            let v = recover_after(&s, n);
            prop_assert!(v >= s.iv_min - 1e-9 && v <= s.iv_max + 1e-9);
        }
    }

    #[test]
    fn decay_stays_inside_the_box(s in interest_strategy()) {
        let next = decay_interest(&s).civ;
        prop_assert!(next >= s.iv_min - 1e-12);
        prop_assert!(next <= s.iv_max + 1e-12);
        for n in [1u32, 7, 100, 10_000] {
            let v = decay_after(&s, n);
            prop_assert!(v >= s.iv_min - 1e-9 && v <= s.iv_max + 1e-9);
        }
    }

    #[test]
    fn energy_never_leaves_its_band(e0 in 0.0..1.0f64, e_min in 0.0..0.5f64, edr in 0.0..1.0f64) {
        let s = EnergyState { e: e_min + e0 * (1.0 - e_min), e_min, edr, et: e_min };
        let one = step_energy(&s).e;
        prop_assert!(one >= e_min - 1e-12 && one <= 1.0 + 1e-12);
        for n in [1u32, 10, 1000] {
            let v = energy_after(&s, n);
            prop_assert!(v >= e_min - 1e-9 && v <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn speed_ratio_bounded_and_monotone(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let sr_lo = speed_ratio(lo).unwrap();
        let sr_hi = speed_ratio(hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&sr_lo));
        prop_assert!(sr_hi <= sr_lo + 1e-12, "SR must not increase with saturation");
    }

    #[test]
    fn matching_value_is_a_bounded_product(civ in 0.0..1.0f64, cav in 0.0..1.0f64) {
        let v = imv(civ, cav);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(imv(civ, cav).to_bits(), imv(cav, civ).to_bits());
    }

    #[test]
    fn attraction_declines_with_progress(cav0 in 0.0..1.0f64, adr in 0.0..1.0f64, p1 in 0.0..1.0f64, p2 in 0.0..1.0f64) {
        let a = AttractState { cav0, adr, cav_ref: cav0 };
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        prop_assert!(attract_prospective(&a, hi).unwrap() <= attract_prospective(&a, lo).unwrap() + 1e-12);
        prop_assert!(attract_current(&a, hi).unwrap() <= attract_current(&a, lo).unwrap() + 1e-12);
        prop_assert!(attract_prospective(&a, 1.0).unwrap().abs() < 1e-12);
    }
}
