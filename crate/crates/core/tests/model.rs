use proptest::prelude::*;
use retire_core::model::habit::euler_habit;
use retire_core::model::{
    habit_from_consumption, habit_from_consumption_piecewise, propagate_habit,
    propagate_habit_as_printed, HabitSchedule, ModelParams, TimeGrid,
};

mod common;
use common::Wiggle;

fn wiggle() -> impl Strategy<Value = Wiggle> {
    (
        1.0..30.0f64,
        0.0..5.0f64,
        0.05..1.0f64,
        0.0..6.3f64,
        0.5..74.5f64,
        -0.9..5.0f64,
    )
        .prop_map(|(level, amplitude, omega, phase, knot, shift)| Wiggle {
            level,
            amplitude,
            omega,
            phase,
            knot,
            shift,
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn unified_and_piecewise_habit_agree(
        curve in wiggle(),
        tau in 25.0..55.0f64,
        l in 0.2..1.0f64,
        m in 0.1..1.0f64,
        h0 in 0.0..20.0f64,
        frac in 0.0..1.0f64,
    ) {
        let p = ModelParams { l, m, h0, ..ModelParams::baseline() };
        let sched = HabitSchedule::new(&p, tau);
        let t = frac * p.horizon;
        let unified = habit_from_consumption(&sched, h0, &curve, t);
        let piecewise = habit_from_consumption_piecewise(&sched, h0, &curve, t);
        prop_assert!((unified - piecewise).abs() <= 1e-10 * unified.abs().max(1e-300), "{} vs {}", unified, piecewise);
    }
}

#[test]
fn excess_form_matches_euler_and_printed_form_breaks_after_retirement() {
    let p = ModelParams::baseline();
    let sched = HabitSchedule::new(&p, 40.0);
    let excess = |t: f64| 2.0 + (0.3 * t).sin();
    for t in [20.0, 40.0, 60.0] {
        let exact = propagate_habit(&sched, p.h0, &excess, t);
        let euler = euler_habit(&sched, p.h0, &excess, t, 1e-4);
        assert!(
            (exact - euler).abs() < 1e-3 * exact,
            "t={t}: {exact} vs {euler}"
        );
    }
    let before = propagate_habit(&sched, p.h0, &excess, 30.0);
    assert!(
        (propagate_habit_as_printed(&sched, p.h0, &excess, 30.0) - before).abs() < 1e-10 * before
    );
    let after = propagate_habit(&sched, p.h0, &excess, 60.0);
    assert!((propagate_habit_as_printed(&sched, p.h0, &excess, 60.0) - after).abs() > 1e-2 * after);
}

#[test]
fn grid_snaps_breakpoints() {
    let g = TimeGrid::with_step(75.0, 0.02, &[25.0, 40.0]).unwrap();
    assert!(g.index_of(25.0).is_some() && g.index_of(40.0).is_some());
    assert_eq!(g.nodes().first(), Some(&0.0));
    assert_eq!(g.nodes().last(), Some(&75.0));
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
}
