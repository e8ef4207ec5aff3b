use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use retire_core::analytics::Curves;
use retire_core::dual::{
    budget_gap, dual_map, solve_nu, solve_tangency, DualProblem, SUtility, Tangency,
};
use retire_core::model::ModelParams;
use retire_core::ModelError;

fn baseline_utility() -> SUtility {
    SUtility::from_params(&ModelParams::baseline())
}

#[test]
fn tangency_constants_match_high_precision_roots() {
    let goldens = [
        (1.5, 16.998_195_491_331_996_135_54),
        (2.25, 23.231_329_789_232_700_717_45),
        (5.0, 46.589_616_416_858_174_075_08),
    ];
    let mut last = 0.0;
    for (kappa, want) in goldens {
        let u = SUtility {
            kappa,
            ..baseline_utility()
        };
        let q = solve_tangency(&u).unwrap().q_star();
        assert!((q - want).abs() <= 1e-12 * want, "kappa={kappa}: {q}");
        assert!(q > last);
        last = q;
    }
}

#[test]
fn threshold_scales_with_time_preference() {
    let u = baseline_utility();
    let t = u.tangency().unwrap();
    for s in [1.0, 10.0, 50.0] {
        let ratio = u.threshold(t, s) / u.threshold(t, 0.0);
        assert!((ratio - (-u.rho * s).exp()).abs() < 1e-15);
    }
    let addictive = SUtility { max_gap: 0.0, ..u };
    assert_eq!(solve_tangency(&addictive).unwrap(), Tangency::Unbounded);
    assert!(solve_tangency(&SUtility { gamma: 1.2, ..u }).is_err());
}

#[test]
fn dual_map_branches() {
    let u = baseline_utility();
    let t = u.tangency().unwrap();
    let y0 = u.threshold(t, 7.0);
    assert_eq!(
        dual_map(&u, t, 7.0, y0 * (1.0 + 1e-12)).unwrap(),
        -u.max_gap
    );
    assert_eq!(dual_map(&u, t, 7.0, y0).unwrap(), -u.max_gap);
    assert!(dual_map(&u, t, 7.0, y0 * (1.0 - 1e-9)).unwrap() > 0.0);
    assert!(dual_map(&u, t, 7.0, 1e-10).unwrap() > dual_map(&u, t, 7.0, 1e-8).unwrap());
    assert!(dual_map(&u, t, 7.0, 0.0).is_err());
    assert!(dual_map(&u, t, 7.0, -1.0).is_err());
    let plain = SUtility {
        rho: 0.0,
        gamma: 0.5,
        ..u
    };
    let tp = plain.tangency().unwrap();
    let y = 0.3 * plain.threshold(tp, 3.0);
    assert!((dual_map(&plain, tp, 3.0, y).unwrap() - y.powi(-2)).abs() < 1e-12 * y.powi(-2));
}

#[test]
fn envelope_condition_below_threshold() {
    let u = baseline_utility();
    let t = u.tangency().unwrap();
    for s in [0.0, 12.0, 60.0] {
        let y0 = u.threshold(t, s);
        for frac in [1e-6, 1e-3, 0.1, 0.5, 0.999] {
            let y = frac * y0;
            let c = dual_map(&u, t, s, y).unwrap();
            assert!((u.marginal_at(s, c) - y).abs() <= 1e-10 * y, "s={s} y={y}");
        }
    }
}

#[test]
fn dual_value_is_convex_and_decreasing_below_threshold() {
    let u = baseline_utility();
    let t = u.tangency().unwrap();
    let y0 = u.threshold(t, 5.0);
    let ys: Vec<f64> = (0..200).map(|i| 0.5 * (0.05 * i as f64).exp()).collect();
    let v: Vec<f64> = ys.iter().map(|&y| u.dual_value(t, 5.0, y)).collect();
    for (w, y) in v.windows(2).zip(ys.windows(2)) {
        if y[1] < y0 {
            assert!(w[1] <= w[0], "y={}", y[1]);
        } else if y[0] >= y0 {
            let slope = (w[1] - w[0]) / (y[1] - y[0]);
            assert!((slope - u.max_gap).abs() < 1e-9, "y={}", y[0]);
        }
    }
    for i in 1..ys.len() - 1 {
        let left = (v[i] - v[i - 1]) / (ys[i] - ys[i - 1]);
        let right = (v[i + 1] - v[i]) / (ys[i + 1] - ys[i]);
        assert!(right - left >= -1e-8, "y={}", ys[i]);
    }
}

#[test]
fn budget_map_is_monotone_with_the_right_limit() {
    let p = ModelParams::baseline();
    let prob = DualProblem::new(&p, 40.0).unwrap();
    let xs: Vec<f64> = (0..20).map(|i| 10f64.powf(-4.0 + 0.4 * i as f64)).collect();
    let f: Vec<f64> = xs.iter().map(|&x| prob.budget_gap(x)).collect();
    assert!(f.windows(2).all(|w| w[1] <= w[0]));
    let c = Curves::new(&p, 40.0).unwrap();
    let floor = -p.max_gap
        * retire_core::quadrature::integrate(0.0, p.horizon, &[40.0], |s| {
            (1.0 + c.f(s)) * (-p.r * s).exp()
        });
    assert!((prob.budget_gap(f64::INFINITY) - floor).abs() <= 1e-10 * floor.abs());
    assert!((prob.budget_gap(1e12) - floor).abs() <= 1e-10 * floor.abs());
    assert!(budget_gap(&p, 40.0, 0.0).is_err());
}

#[test]
fn solved_multiplier_meets_the_budget() {
    let p = ModelParams::baseline();
    let sol = solve_nu(&p, 40.0).unwrap();
    let target = sol.a_val - p.h0 * sol.z_val;
    assert!((budget_gap(&p, 40.0, sol.nu).unwrap() - target).abs() <= 1e-8 * target.abs());
    assert!(sol.iterations <= 200);
    let fine = DualProblem::with_panels(&p, 40.0, 2.0)
        .unwrap()
        .solve()
        .unwrap();
    assert!(
        (fine.nu - sol.nu).abs() <= 1e-8 * sol.nu,
        "{} vs {}",
        fine.nu,
        sol.nu
    );
}

#[test]
fn budget_map_matches_randomized_time_sampling() {
    let p = ModelParams::baseline();
    let tau = 40.0;
    let prob = DualProblem::new(&p, tau).unwrap();
    let sol = solve_nu(&p, tau).unwrap();
    let c = Curves::new(&p, tau).unwrap();
    let u = SUtility::from_params(&p);
    let t = u.tangency().unwrap();
    let theta = p.theta();
    for (j, mult) in [0.1, 0.5, 1.0, 2.0, 10.0].into_iter().enumerate() {
        let x = mult * sol.nu;
        let mut rng = ChaCha8Rng::seed_from_u64(2718 + j as u64);
        let n = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let s = p.horizon * rng.gen::<f64>();
            let z: f64 = StandardNormal.sample(&mut rng);
            let h = (-(p.r + 0.5 * theta * theta) * s - theta * s.sqrt() * z).exp();
            let adj = 1.0 + c.f(s);
            let v = p.horizon * adj * dual_map(&u, t, s, x * adj * h).unwrap() * h;
            sum += v;
            sq += v * v;
        }
        let n = n as f64;
        let mean = sum / n;
        let se = ((sq / n - mean * mean) / (n - 1.0)).sqrt();
        let exact = prob.budget_gap(x);
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "x={x}: {mean} vs {exact} (se {se})"
        );
    }
}

#[test]
fn value_matches_randomized_time_sampling() {
    let p = ModelParams::baseline();
    let sol = solve_nu(&p, 40.0).unwrap();
    let c = sol.curves();
    let u = SUtility::from_params(&p);
    let t = u.tangency().unwrap();
    let theta = p.theta();
    let mut rng = ChaCha8Rng::seed_from_u64(1618);
    let n = 400_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..n {
        let s = p.horizon * rng.gen::<f64>();
        let z: f64 = StandardNormal.sample(&mut rng);
        let h = (-(p.r + 0.5 * theta * theta) * s - theta * s.sqrt() * z).exp();
        let y = sol.nu * (1.0 + c.f(s)) * h;
        let v = p.horizon * u.u_at(s, dual_map(&u, t, s, y).unwrap());
        sum += v;
        sq += v * v;
    }
    let n = n as f64;
    let mean = sum / n;
    let se = ((sq / n - mean * mean) / (n - 1.0)).sqrt();
    assert!(
        (mean - sol.value()).abs() <= 3.0 * se,
        "{mean} vs {} (se {se})",
        sol.value()
    );
}

#[test]
fn floor_budget_gives_the_sentinel_and_less_is_infeasible() {
    let p = ModelParams::baseline();
    let prob = DualProblem::new(&p, 40.0).unwrap();
    let h0 = (prob.a_val - prob.floor()) / prob.z_val;
    let edge = ModelParams { h0, ..p };
    let sol = solve_nu(&edge, 40.0).unwrap();
    assert!(sol.is_floor());
    assert_eq!(sol.nu, f64::INFINITY);
    let over = ModelParams { h0: h0 * 1.01, ..p };
    assert!(matches!(
        solve_nu(&over, 40.0),
        Err(ModelError::Infeasible { .. })
    ));
}

#[test]
fn richer_income_lowers_the_multiplier() {
    let p = ModelParams::baseline();
    let base = solve_nu(&p, 40.0).unwrap();
    let rich = solve_nu(
        &ModelParams {
            w0: 2.0 * p.w0,
            full_benefit: 2.0 * p.full_benefit,
            ..p
        },
        40.0,
    )
    .unwrap();
    assert!((rich.a_val - 2.0 * base.a_val).abs() < 1e-9 * base.a_val);
    assert!(rich.nu < base.nu);
}
