use retire_core::dual::solve_nu;
use retire_core::model::{ModelParams, Side};
use retire_core::policy::{lower_bounds, PolicyEvaluator, SliceResolution};

fn baseline() -> PolicyEvaluator {
    PolicyEvaluator::new(&solve_nu(&ModelParams::baseline(), 40.0).unwrap())
}

#[test]
fn initial_wealth_is_zero() {
    let e = baseline();
    let x0 = e.wealth(0.0, 1.0, e.params.w0, 0.0);
    assert!(x0.abs() < 1e-6 * e.dual.a_val, "X0 = {x0}");
}

#[test]
fn initial_wealth_is_zero_on_the_path_resolution() {
    let sol = solve_nu(&ModelParams::baseline(), 40.0).unwrap();
    let e = PolicyEvaluator::with_resolution(&sol, SliceResolution::path());
    let x0 = e.wealth(0.0, 1.0, e.params.w0, 0.0);
    assert!(x0.abs() < 1e-6 * e.dual.a_val, "X0 = {x0}");
}

#[test]
fn terminal_wealth_is_zero() {
    let e = baseline();
    assert_eq!(e.slice(75.0).eval(0.3).f, 0.0);
    let x = e.wealth(75.0, 0.3, 20.0, 1.2);
    assert!(x.abs() < 1e-12, "{x}");
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let e = baseline();
    for (t, h) in [
        (0.0, 1.0),
        (10.0, 0.3),
        (24.9, 2.5),
        (39.5, 0.05),
        (41.0, 0.8),
        (60.0, 0.01),
        (70.0, 1.7),
    ] {
        let slice = e.slice(t);
        let eps = 1e-5;
        let ev = slice.eval(h);
        let fd = (slice.eval(h * (1.0 + eps)).f - slice.eval(h * (1.0 - eps)).f) / (2.0 * eps * h);
        let analytic = ev.s / h;
        assert!(
            (analytic - fd).abs() <= 1e-6 * analytic.abs().max(1e-3),
            "t={t} h={h}: {analytic} vs {fd}"
        );
        let x = h.ln();
        let fd2 = (slice.eval_log(x + eps).s - slice.eval_log(x - eps).s) / (2.0 * eps);
        assert!(
            (ev.s_prime - fd2).abs() <= 1e-5 * ev.s_prime.abs().max(1e-3),
            "t={t} h={h}: {} vs {fd2}",
            ev.s_prime
        );
    }
}

#[test]
fn portfolio_jumps_up_at_minimum_retirement_time() {
    let e = baseline();
    let p = e.params;
    let left = e.expected_portfolio(p.tau_min, Side::Left);
    let right = e.expected_portfolio(p.tau_min, Side::Right);
    let expected_wage = p.w0 * (p.alpha * p.tau_min).exp();
    let jump = (1.0 - p.k) * p.beta * expected_wage * e.curves().o(p.tau_min) / p.sigma;
    assert!(jump > 0.0);
    assert!(
        (right - left - jump).abs() < 1e-8 * jump.max(1.0),
        "{} vs {jump}",
        right - left
    );
}

#[test]
fn floor_excess_consumption_limits() {
    let e = baseline();
    assert_eq!(e.excess_consumption(5.0, 1e6), -e.params.max_gap);
    assert!(e.excess_consumption(5.0, 1e-12) > 1e6);
    let f0 = e.curves().f(0.0);
    let direct = (e.dual.nu * (1.0 + f0)).powf(-1.0 / e.params.gamma);
    assert!((e.excess_consumption(0.0, 1.0) - direct).abs() < 1e-12 * direct);
}

#[test]
fn lower_bounds_without_habit_or_gap() {
    let p = ModelParams {
        h0: 0.0,
        max_gap: 0.0,
        ..ModelParams::baseline()
    };
    let b = lower_bounds(&p, 40.0, 10.0).unwrap();
    assert_eq!(b.consumption, 0.0);
    assert!(b.wealth < 0.0);
}

#[test]
fn tabulated_slice_matches_direct_evaluation() {
    use retire_core::policy::SliceTable;
    let e = baseline();
    for t in [0.5, 20.0, 39.0, 60.0] {
        let slice = e.slice(t);
        let table = SliceTable::build(&slice, -6.0, 3.0, 0.05);
        for i in 0..200 {
            let xi = -5.97 + 8.9 * i as f64 / 200.0;
            let (a, b) = (slice.eval_log(xi), table.eval_log(xi));
            assert!(
                (a.f - b.f).abs() <= 1e-6 * a.f.abs().max(1.0),
                "t={t} xi={xi}: {} vs {}",
                a.f,
                b.f
            );
            assert!(
                (a.s - b.s).abs() <= 1e-5 * a.s.abs().max(1.0),
                "t={t} xi={xi}: {} vs {}",
                a.s,
                b.s
            );
        }
    }
}
