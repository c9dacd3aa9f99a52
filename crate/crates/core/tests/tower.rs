use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use escape_speed::tower::{parse_magnitude, MANTISSA_TOL};
use escape_speed::TowerReal;
use proptest::prelude::*;

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

fn t(level: u32, m: f64) -> TowerReal {
    TowerReal::normalize(level, m).unwrap()
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    x.format(Radix::Dec, RM, cc).unwrap().parse().unwrap()
}

fn big_value(v: &TowerReal, cc: &mut Consts) -> BigFloat {
    let mut x = big(v.mantissa());
    for _ in 0..v.level() {
        x = x.exp(PREC, RM, cc);
    }
    x
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

#[test]
fn normalize_ten_to_the_ten() {
    // three natural logs at 256 bits
    let mut cc = Consts::new().unwrap();
    let mut x = big(1e10);
    for _ in 0..3 {
        x = x.ln(PREC, RM, &mut cc);
    }
    let want = to_f64(&x, &mut cc);
    let v = t(0, 1e10);
    assert_eq!(v.level(), 3);
    assert!(rel_err(v.mantissa(), want) < 1e-14, "{} vs {want}", v.mantissa());
    assert!((v.mantissa() - 1.14315).abs() < 1e-5);
}

#[test]
fn normalize_examples() {
    let v = t(2, std::f64::consts::E);
    assert_eq!(v.level(), 3);
    assert!((v.mantissa() - 1.0).abs() < 1e-15);
    let v = t(1, 1.5);
    assert_eq!((v.level(), v.mantissa()), (1, 1.5));
    assert!(TowerReal::normalize(1, f64::NAN).is_err());
}

#[test]
fn log_examples() {
    let v = t(3, 1.14315).ln().unwrap();
    assert_eq!((v.level(), v.mantissa()), (2, 1.14315));
    let e2 = std::f64::consts::E.powi(2);
    let v = t(0, e2).ln().unwrap();
    assert_eq!(v.level(), 0);
    assert!((v.mantissa() - 2.0).abs() < 1e-15);
    let v = t(1, 1.0).ln().unwrap();
    assert_eq!((v.level(), v.mantissa()), (0, 1.0));
    assert!(TowerReal::ZERO.ln().is_err());
    assert!(t(0, -1.0).ln().is_err());
}

#[test]
fn pow_and_cmp_examples() {
    let v = t(1, 2.0).pow(3.0).unwrap();
    assert_eq!(v.level(), 2);
    assert!((v.mantissa() - 6f64.ln()).abs() < 1e-12);
    assert!((v.mantissa() - 1.79176).abs() < 1e-5);
    assert_eq!(t(2, 3.0).cmp(&t(3, 1.0)), Ordering::Greater);
    let v = t(4, 1.7);
    assert_eq!(v.scale(1.0).unwrap(), v);
}

#[test]
fn text_form_round_trips() {
    let v = t(0, 1e10);
    assert_eq!(v.to_string().parse::<TowerReal>().unwrap(), v);
    assert_eq!(parse_magnitude("100").unwrap(), t(0, 100.0));
    assert_eq!(parse_magnitude(&v.to_string()).unwrap(), v);
    assert!("T(1,2)".parse::<TowerReal>().is_err());
    assert!(parse_magnitude("abc").is_err());
}

/// Canonical towers up to level 6.
fn canonical() -> impl Strategy<Value = TowerReal> {
    prop_oneof![
        (0.0f64..std::f64::consts::E).prop_map(|m| t(0, m)),
        (1u32..=6, 1.0f64..std::f64::consts::E).prop_map(|(l, m)| t(l, m)),
    ]
}

/// Towers with `exp^l(x) <= 1e300`, the oracle's comfortable range.
fn moderate() -> impl Strategy<Value = (u32, f64)> {
    prop_oneof![
        (-3.0f64..300.0).prop_map(|e| (0u32, 10f64.powf(e))),
        (-5.0f64..690.0).prop_map(|x| (1u32, x)),
        (-2.0f64..6.5).prop_map(|x| (2u32, x)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalized_form_is_canonical(l in 0u32..6, x in -10.0f64..1e6) {
        let v = TowerReal::normalize(l, x);
        if let Ok(v) = v {
            if v.level() >= 1 {
                prop_assert!(v.mantissa() >= 1.0 && v.mantissa() < std::f64::consts::E);
            } else {
                prop_assert!(v.mantissa() < std::f64::consts::E);
            }
        }
    }

    #[test]
    fn exp_then_log_round_trips(v in canonical()) {
        let back = v.exp().unwrap().ln().unwrap();
        prop_assert!(back.approx_eq(&v, MANTISSA_TOL), "{v} -> {back}");
    }

    #[test]
    fn operations_are_monotone(a in canonical(), b in canonical(), k in 0.1f64..10.0) {
        prop_assume!(!a.approx_eq(&b, MANTISSA_TOL));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(lo.exp().unwrap() <= hi.exp().unwrap());
        if lo.is_positive() {
            prop_assert!(lo.ln().unwrap() <= hi.ln().unwrap());
        }
        if lo.mantissa() >= 0.0 || lo.level() > 0 {
            prop_assert!(lo.pow(k).unwrap() <= hi.pow(k).unwrap());
        }
        prop_assert!(lo.scale(k).unwrap() <= hi.scale(k).unwrap());
    }

    #[test]
    fn order_is_total_and_transitive(a in canonical(), b in canonical(), c in canonical()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a == b, a.cmp(&b) == Ordering::Equal);
    }

    #[test]
    fn agrees_with_extended_precision((la, xa) in moderate(), (lb, xb) in moderate(), k in 0.2f64..5.0) {
        let mut cc = Consts::new().unwrap();
        let a = TowerReal::exp_tower(la, xa).unwrap();
        let b = TowerReal::exp_tower(lb, xb).unwrap();
        let (ea, eb) = (big_value(&a, &mut cc), big_value(&b, &mut cc));
        // exact values of the unnormalized inputs agree with the canonical forms
        let mut raw = big(xa);
        for _ in 0..la {
            raw = raw.exp(PREC, RM, &mut cc);
        }
        let (va, vr) = (to_f64(&ea, &mut cc), to_f64(&raw, &mut cc));
        prop_assert!(rel_err(va, vr) < 1e-9, "{a}: {va} vs {vr}");
        let gap = (va - to_f64(&eb, &mut cc)).abs() / va.abs().max(1.0);
        if gap > 1e-12 {
            let want = ea.cmp(&eb).unwrap().cmp(&0);
            prop_assert_eq!(a.cmp(&b), want);
        }
        if va > 0.0 && va.abs() <= 1e150 {
            // compared through one log so large powers stay finite
            let got = a.pow(k).unwrap().ln().unwrap().to_f64();
            let want = to_f64(&ea.ln(PREC, RM, &mut cc).mul(&big(k), PREC, RM), &mut cc);
            prop_assert!(rel_err(got, want) < 1e-9, "pow {a} {k}: {got} vs {want}");
            let got = a.scale(k).unwrap().to_f64();
            prop_assert!(rel_err(got, va * k) < 1e-9);
            let got = a.ln().unwrap().to_f64();
            let want = to_f64(&ea.ln(PREC, RM, &mut cc), &mut cc);
            prop_assert!(rel_err(got, want) < 1e-9, "ln {a}: {got} vs {want}");
        }
    }
}
