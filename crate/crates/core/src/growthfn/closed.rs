use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tower::TowerReal;

/// Entire functions whose maximum modulus has a closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedForm {
    /// `exp(z)`, `log M(r) = r`.
    Exp,
    /// `lambda * exp(z)` with `lambda > 0`, `log M(r) = r + ln lambda`.
    ScaledExp { lambda: f64 },
    /// `cosh(z)`, `log M(r) = ln cosh r`.
    Cosh,
    /// `exp(z^2)`, `log M(r) = r^2`.
    ExpSquare,
}

impl ClosedForm {
    pub fn log_max_modulus(&self, r: &TowerReal) -> Result<TowerReal> {
        if !r.is_positive() {
            return Err(Error::domain(format!("radius must be positive, got {r}")));
        }
        match *self {
            ClosedForm::Exp => Ok(*r),
            ClosedForm::ScaledExp { lambda } => r.offset(lambda.ln()),
            ClosedForm::Cosh => match r.small_value() {
                // ln cosh r = r - ln 2 + ln(1 + e^{-2r})
                Some(x) => {
                    TowerReal::from_f64(x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p())
                }
                None => Ok(*r),
            },
            ClosedForm::ExpSquare => r.pow(2.0),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            ClosedForm::Exp => z.exp(),
            ClosedForm::ScaledExp { lambda } => z.exp() * lambda,
            ClosedForm::Cosh => z.cosh(),
            ClosedForm::ExpSquare => (z * z).exp(),
        }
    }

    /// `ln |f(z)|`, finite even where `f(z)` overflows.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        match *self {
            ClosedForm::Exp => z.re,
            ClosedForm::ScaledExp { lambda } => lambda.ln() + z.re,
            ClosedForm::ExpSquare => z.re * z.re - z.im * z.im,
            ClosedForm::Cosh => {
                if z.re.abs() < 300.0 {
                    z.cosh().norm().ln()
                } else {
                    // cosh z = e^{s z}/2 * (1 + e^{-2 s z}) with s = sign(Re z)
                    let s = z.re.signum();
                    let tail = (Complex64::new(1.0, 0.0) + (z * (-2.0 * s)).exp()).norm();
                    z.re.abs() - std::f64::consts::LN_2 + tail.ln()
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            ClosedForm::Exp => "exp".into(),
            ClosedForm::ScaledExp { lambda } => format!("lambda_exp lambda={lambda}"),
            ClosedForm::Cosh => "cosh".into(),
            ClosedForm::ExpSquare => "exp_square".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> TowerReal {
        TowerReal::from_f64(x).unwrap()
    }

    #[test]
    fn log_max_modulus_examples() {
        assert_eq!(ClosedForm::Exp.log_max_modulus(&r(5.0)).unwrap(), r(5.0));
        let scaled = ClosedForm::ScaledExp { lambda: 0.25 }
            .log_max_modulus(&r(10.0))
            .unwrap()
            .to_f64();
        assert!((scaled - 8.613_705_638_880_11).abs() < 1e-13);
        let cosh = ClosedForm::Cosh.log_max_modulus(&r(3.0)).unwrap().to_f64();
        assert!((cosh - 3f64.cosh().ln()).abs() < 1e-14);
        let sq = ClosedForm::ExpSquare.log_max_modulus(&r(3.0)).unwrap().to_f64();
        assert!((sq - 9.0).abs() < 1e-12);
        assert!(ClosedForm::Exp.log_max_modulus(&TowerReal::ZERO).is_err());
    }

    #[test]
    fn log_abs_matches_direct_evaluation() {
        let pts = [
            Complex64::new(1.5, -0.7),
            Complex64::new(-3.0, 2.0),
            Complex64::new(0.2, 4.0),
        ];
        let forms = [
            ClosedForm::Exp,
            ClosedForm::ScaledExp { lambda: 0.25 },
            ClosedForm::Cosh,
            ClosedForm::ExpSquare,
        ];
        for f in forms {
            for z in pts {
                let direct = f.eval(z).norm().ln();
                assert!((f.log_abs(z) - direct).abs() < 1e-12, "{f:?} at {z}");
            }
        }
        // Past overflow the asymptotic branch still gives |cosh z|.
        let big = Complex64::new(800.0, 0.3);
        assert!((ClosedForm::Cosh.log_abs(big) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
