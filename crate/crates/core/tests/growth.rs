use std::sync::OnceLock;

use escape_speed::growthfn::{estimate_order, psi_m, PiecewisePhiSpec};
use escape_speed::grid::Grid;
use escape_speed::{Catalog, GrowthModel, TowerReal};
use proptest::prelude::*;

fn model(name: &str) -> GrowthModel {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::builtin).model(name).unwrap().clone()
}

fn tr(x: f64) -> TowerReal {
    TowerReal::from_f64(x).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    x.abs() + (-2.0 * x.abs()).exp().ln_1p() - std::f64::consts::LN_2
}

#[test]
fn log_max_modulus_examples() {
    let v = model("exp").max_modulus_log(&tr(5.0)).unwrap();
    assert!(close(v.to_f64(), 5.0, 1e-15));
    let v = model("lambda_exp_0.25").max_modulus_log(&tr(10.0)).unwrap();
    assert!(close(v.to_f64(), 10.0 + 0.25f64.ln(), 1e-14));
    assert!((v.to_f64() - 8.61371).abs() < 1e-5);
    let want = ln_cosh(3.0);
    for name in ["cosh", "cosh_series"] {
        let v = model(name).max_modulus_log(&tr(3.0)).unwrap().to_f64();
        assert!(close(v, want, 1e-9), "{name}: {v} vs {want}");
    }
}

#[test]
fn series_maximum_matches_dense_circle_sampling() {
    let f = model("cosh_series");
    for r in [0.5, 2.0, 7.5, 15.0] {
        // |cosh(r e^{i th})|^2 = sinh^2(r cos th) + cos^2(r sin th)
        let dense = (0..200_000)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / 200_000.0;
                let (x, y) = (r * th.cos(), r * th.sin());
                (x.sinh().powi(2) + y.cos().powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
            .ln();
        let got = f.max_modulus_log(&tr(r)).unwrap().to_f64();
        assert!(close(got, dense, 1e-9), "r={r}: {got} vs {dense}");
    }
}

#[test]
fn mu_examples() {
    let exp = model("exp");
    let v = exp.mu(2, 0.5, &tr(100.0)).unwrap();
    assert!(close(v.to_f64(), 10f64.exp(), 1e-12));
    assert!((v.to_f64() - 22026.4658).abs() < 1e-3);
    let v = exp.mu(1, 0.5, &tr(10.0)).unwrap();
    assert!((v.to_f64() - 148.413).abs() < 1e-3);
    for name in ["exp", "cosh", "exp_square", "lambda_exp_1"] {
        let f = model(name);
        let r = tr(50.0);
        for m in 1..=3 {
            let mu = f.mu(m, 1.0, &r).unwrap();
            assert!(mu.approx_eq(&f.max_modulus(&r).unwrap(), 1e-9), "{name} m={m}");
        }
    }
}

#[test]
fn iterate_examples() {
    let exp = model("exp");
    let v = exp.iterate_max_modulus(&tr(2.0), 3).unwrap();
    assert_eq!(v, TowerReal::exp_tower(3, 2.0).unwrap());
    assert_eq!(exp.iterate_mu(1, 0.5, &tr(8.0), 0).unwrap(), tr(8.0));
    // exp(0.5 exp(0.5 * 8)) by hand in f64
    let want = (0.5 * (0.5f64 * 8.0).exp()).exp();
    let got = exp.iterate_mu(1, 0.5, &tr(8.0), 2).unwrap().to_f64();
    assert!(close(got, want, 1e-12), "{got} vs {want}");
    assert!((got / 7.175e11 - 1.0).abs() < 1e-3);
}

#[test]
fn phi_psi_examples() {
    let exp = model("exp");
    let e = std::f64::consts::E;
    assert!(close(exp.phi_m(2, &tr(1.0)).unwrap().to_f64(), e, 1e-14));
    assert!(close(psi_m(0, 2, 2.0, &tr(e)).unwrap().to_f64(), e, 1e-12));
    let v = exp.phi_m_eps(2, 0.5, &tr(4.0)).unwrap().to_f64();
    assert!(close(v, 2f64.exp(), 1e-12));
}

#[test]
fn order_estimates() {
    // radii 10^1 .. 10^8
    let radii: Vec<TowerReal> = (0..30).map(|j| tr(10f64.powf(1.0 + 7.0 * j as f64 / 29.0))).collect();
    let est = estimate_order(&model("exp"), &radii).unwrap();
    assert_eq!((est.order, est.lower_order), (1.0, 1.0));
    let est = estimate_order(&model("exp_square"), &radii).unwrap();
    assert!(close(est.order, 2.0, 1e-12) && close(est.lower_order, 2.0, 1e-12));
    let est = estimate_order(&model("lambda_exp_0.25"), &radii).unwrap();
    assert!(est.order < 1.0 && est.lower_order > 0.9);
    assert!(est.order > 0.9999999);
    let est = estimate_order(&model("cosh"), &radii).unwrap();
    assert!((est.order - 1.0).abs() < 0.05);
    assert!(estimate_order(&model("exp"), &radii[..5]).is_err());
}

#[test]
fn r_min_is_where_m_exceeds_r() {
    // 0.25 e^r = r has a single root above 1: g is increasing there
    let g = |r: f64| r + 0.25f64.ln() - r.ln();
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r_min = model("lambda_exp_0.25").r_min().to_f64();
    assert!(close(r_min, hi, 1e-9), "{r_min} vs {hi}");
    // cosh r > r everywhere, so the first grid radius already qualifies
    let f = model("cosh");
    let r = f.r_min();
    assert!(f.max_modulus(&r).unwrap() > r);
    assert!(r <= TowerReal::ONE.exp().unwrap());
}

#[test]
fn conjugated_iteration_matches_direct() {
    for name in ["exp", "cosh", "lambda_exp_1"] {
        let f = model(name);
        let r = f.r_min().max(tr(3.0));
        for n in 1..=4 {
            let a = f.iterate_max_modulus_direct(&r, n).unwrap();
            let b = f.iterate_max_modulus_conjugated(&r, n, 2).unwrap();
            assert!(a.approx_eq(&b, 1e-9), "{name} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn piecewise_curve_is_continuous_at_breakpoints() {
    let spec = PiecewisePhiSpec::new(10.0).unwrap();
    for n in 1..=2 {
        let seg = spec.segment(n);
        let (lo, hi) = seg.log_bounds().unwrap();
        for edge in [lo, hi] {
            let t = TowerReal::exp_tower(1, edge).unwrap();
            let phi = spec.eval(&t).unwrap();
            let base = PiecewisePhiSpec::base(&t).unwrap();
            assert!(phi.approx_eq(&base, 1e-9), "segment {n} at {t}: {phi} vs {base}");
        }
    }
}

fn nested_model() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["exp", "lambda_exp_0.25", "lambda_exp_1", "cosh", "exp_square"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mu_is_nested_below_max_modulus(
        name in nested_model(),
        m in 2u32..=3,
        eps in 0.05f64..0.95,
        j in 0usize..64,
    ) {
        let f = model(name);
        let grid = Grid::tower(2..=3, 64);
        let r = grid.points()[j + 64];
        let big_m = f.max_modulus(&r).unwrap();
        let mu1 = f.mu(1, eps, &r).unwrap();
        let mum = f.mu(m, eps, &r).unwrap();
        prop_assert!(mum < mu1, "{name} m={m} eps={eps} r={r}: {mum} vs {mu1}");
        prop_assert!(mu1 < big_m);
    }

    #[test]
    fn mu_identity_holds(name in nested_model(), m in 1u32..=3, eps in 0.05f64..0.95, x in 0.0f64..1.0) {
        let f = model(name);
        let r = TowerReal::exp_tower(2, 1.0 + 1.7 * x).unwrap();
        let lhs = f.mu(m, eps, &r).unwrap().ln_n(m).unwrap();
        let rhs = f.iterated_log_max_modulus(m, &r).unwrap().scale(eps).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn conjugation_identity_holds(name in nested_model(), m in 2u32..=3, x in 0.0f64..1.0) {
        let f = model(name);
        let r = TowerReal::exp_tower(2, 1.0 + 1.7 * x).unwrap();
        let lhs = f.phi_m(m, &r.ln_n(m - 1).unwrap()).unwrap().exp_n(m - 1).unwrap();
        let rhs = f.max_modulus(&r).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn max_modulus_is_increasing(name in nested_model(), a in 1.0f64..1e6, b in 1.0f64..1e6) {
        prop_assume!((a - b).abs() > 1e-6 * a.max(b));
        let f = model(name);
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(f.max_modulus_log(&tr(lo)).unwrap() < f.max_modulus_log(&tr(hi)).unwrap());
    }
}
