use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use retire_core::analytics::{normal_cdf, partial_power_moment, Curves, LognormalLaw};
use retire_core::model::ModelParams;
use retire_core::quadrature::integrate;

mod common;
use common::*;

#[test]
fn normal_cdf_matches_high_precision_values() {
    let cases = [
        (1.0, 0.841_344_746_068_542_948_585_2),
        (-3.5, 2.326_290_790_355_250_363_499e-4),
        (2.25, 0.987_775_527_344_955_296_8),
        (-0.3, 0.382_088_577_811_047_366_9),
    ];
    for (x, want) in cases {
        assert!((normal_cdf(x) - want).abs() <= 1e-15, "{x}");
        assert!(rel(normal_cdf(x), want) <= 1e-14, "{x}");
    }
    assert_eq!(normal_cdf(0.0), 0.5);
    assert!((normal_cdf(8.0) - 1.0).abs() <= 1e-12);
}

#[test]
fn partial_moment_matches_sampling() {
    let p = ModelParams::baseline();
    let law = LognormalLaw::state_price(&p, 0.0, 10.0).unwrap();
    let a = 1.0 - 1.0 / p.gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(314_159);
    let n = 2_000_000;
    let (mut below, mut below_sq, mut above, mut above_sq) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        let h = (law.mean_log + law.var_log.sqrt() * z).exp();
        let v = h.powf(a);
        if h < 1.0 {
            below += v;
            below_sq += v * v;
        } else {
            above += v;
            above_sq += v * v;
        }
    }
    let n = n as f64;
    for (sum, sq, flag) in [(below, below_sq, true), (above, above_sq, false)] {
        let mean = sum / n;
        let se = ((sq / n - mean * mean) / (n - 1.0)).sqrt();
        let exact = partial_power_moment(&law, a, 1.0, flag).unwrap();
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "below={flag}: {mean} vs {exact} (se {se})"
        );
    }
}

#[test]
fn closed_forms_match_quadrature_on_a_lattice() {
    let base = ModelParams::baseline();
    let variants = [
        base,
        ModelParams {
            psi: 0.03,
            eta: 0.07,
            l: 0.4,
            m: 0.6,
            ..base
        },
    ];
    let mut checked = 0;
    for p in variants {
        for tau in [25.0, 32.5, 40.0, 47.25, 55.0] {
            let c = Curves::new(&p, tau).unwrap();
            assert!(rel(c.a(), a_oracle(&p, tau)) <= 1e-8, "A tau={tau}");
            assert!(rel(c.z(), z_oracle(&p, tau)) <= 1e-8, "z tau={tau}");
            for t in [0.0, 10.0, 24.9, 25.0, 30.0, tau - 0.1, tau, 60.0, 74.9] {
                if t < 0.0 {
                    continue;
                }
                assert!(
                    rel(c.f(t), f_oracle(&p, tau, t)) <= 1e-8,
                    "F tau={tau} t={t}"
                );
                assert!(
                    rel(c.n(t), n_oracle(&p, tau, t)) <= 1e-8,
                    "N tau={tau} t={t}"
                );
                let o = o_oracle(&p, tau, t);
                if o == 0.0 {
                    assert_eq!(c.o(t), 0.0);
                } else {
                    assert!(rel(c.o(t), o) <= 1e-8, "O tau={tau} t={t}");
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 50);
}

#[test]
fn union_reading_of_the_wage_indicator_double_counts() {
    let p = ModelParams::baseline();
    let (tau, t) = (40.0, 10.0);
    let c = Curves::new(&p, tau).unwrap();
    let gw = p.wage_growth_adjusted();
    let flat = |s: f64| (gw * (p.tau_min - t)).exp() * (-p.r * (s - p.tau_min)).exp();
    let union = integrate(t, tau, &[p.tau_min], |s| {
        let growing = (gw * (s - t)).exp();
        growing + if s > p.tau_min { flat(s) } else { 0.0 }
    });
    let intersection = integrate(t, tau, &[p.tau_min], |s| {
        if s <= p.tau_min {
            (gw * (s - t)).exp()
        } else {
            flat(s)
        }
    });
    assert!(rel(c.o(t), intersection) <= 1e-10);
    assert!(rel(c.o(t), o_oracle(&p, tau, t)) <= 1e-8);
    assert!(union > intersection * 1.3, "{union} vs {intersection}");
}

#[test]
fn covariance_sign_in_the_wage_growth_rate() {
    let p = ModelParams::baseline();
    let direct = wage_ratio(&p, 0.0, 10.0);
    assert!(rel(direct, (10.0 * p.wage_growth_adjusted()).exp()) <= 1e-12);
    assert!(rel(direct, (10.0 * p.wage_growth_adjusted_as_printed()).exp()) > 1e-3);
}

#[test]
fn curve_limits() {
    let p = ModelParams {
        psi: 0.0,
        ..ModelParams::baseline()
    };
    let c = Curves::new(&p, 40.0).unwrap();
    assert!([0.0, 20.0, 50.0].iter().all(|&t| c.f(t) == 0.0));
    let b = ModelParams::baseline();
    let c = Curves::new(&b, 40.0).unwrap();
    assert_eq!(c.f(b.horizon), 0.0);
    assert_eq!(c.n(b.horizon), 1.0);
    assert_eq!(c.o(45.0), 0.0);
    let none = ModelParams {
        k: 1.0,
        full_benefit: 0.0,
        ..b
    };
    assert_eq!(Curves::new(&none, 40.0).unwrap().a(), 0.0);
    let plain = ModelParams {
        psi: 0.0,
        eta: 0.0,
        l: 1.0,
        ..b
    };
    let z = Curves::new(&plain, 40.0).unwrap().z();
    assert!(rel(z, -(-b.r * b.horizon).exp_m1() / b.r) <= 1e-12);
}

#[test]
fn income_value_orders() {
    let b = ModelParams::baseline();
    let a = |p: ModelParams| Curves::new(&p, 40.0).unwrap().a();
    assert!(a(ModelParams { w0: 12.0, ..b }) > a(b));
    assert!(
        a(ModelParams {
            full_benefit: 7.0,
            ..b
        }) > a(b)
    );
    assert!(a(ModelParams { k: 0.25, ..b }) < a(b));
}

#[test]
fn income_value_peaks_late_in_the_retirement_window() {
    let b = ModelParams::baseline();
    let values: Vec<f64> = (25..=55)
        .map(|t| Curves::new(&b, t as f64).unwrap().a())
        .collect();
    let peak = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .unwrap()
        .0
        + 25;
    assert_eq!(peak, 51);
    assert!(values[..=26].windows(2).all(|w| w[1] > w[0]));
    assert!(values[26..].windows(2).all(|w| w[1] < w[0]));
    assert!((values[26] - values[30]) / values[26] < 2e-3);
    let printed = |tau: f64| {
        let gw = b.wage_growth_adjusted_as_printed();
        let j = |a: f64, d: f64| -(-a * d).exp_m1() / a;
        let g = (-b.zeta * (b.tau_st - tau).max(0.0)).exp();
        (1.0 - b.k) * b.w0 * (j(-gw, b.tau_min) + (gw * b.tau_min).exp() * j(b.r, tau - b.tau_min))
            + g * b.full_benefit * ((b.xi - b.r) * tau).exp() * j(b.r - b.xi, b.horizon - tau)
    };
    assert!((25..55).all(|t| printed(t as f64 + 1.0) > printed(t as f64)));
}

#[test]
fn habit_adjustment_is_continuous_at_retirement() {
    use retire_core::model::Side;
    let p = ModelParams {
        l: 1.0,
        m: 1.0,
        ..ModelParams::baseline()
    };
    let c = Curves::new(&p, 40.0).unwrap();
    assert!(rel(c.f_at(40.0, Side::Left), c.f_at(40.0, Side::Right)) <= 1e-12);
    let b = ModelParams::baseline();
    let c = Curves::new(&b, 40.0).unwrap();
    assert!(rel(c.f_at(40.0, Side::Left), c.f(40.0 - 1e-9)) <= 1e-7);
}
