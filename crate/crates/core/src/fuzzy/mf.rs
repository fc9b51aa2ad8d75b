//! Generalized bell membership function `1 / (1 + |(x - c) / a|^(2b))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellMf {
    /// Half-width at the 0.5 crossover.
    pub a: f64,
    /// Slope exponent.
    pub b: f64,
    /// Center.
    pub c: f64,
}

/// Partial derivatives of a bell function with respect to its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BellGrad {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
}

impl BellMf {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let mf = Self { a, b, c };
        mf.validate()?;
        Ok(mf)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite() && self.b > 0.0 && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "bell membership needs a > 0, b > 0 and finite c, got {self:?}"
            )));
        }
        Ok(())
    }

    /// `2b * ln|z|`, i.e. the log of `|z|^(2b)`; `-inf` at the center.
    fn log_power(&self, x: f64) -> f64 {
        let z = ((x - self.c) / self.a).abs();
        if z == 0.0 {
            f64::NEG_INFINITY
        } else {
            2.0 * self.b * z.ln()
        }
    }

    /// Membership grade in `(0, 1]`. The power is taken through
    /// `exp(2b ln|z|)` so non-integer `b` is fine.
    pub fn eval(&self, x: f64) -> f64 {
        1.0 / (1.0 + self.log_power(x).exp())
    }

    /// Checked variant of [`BellMf::eval`].
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !x.is_finite() {
            return Err(Error::ParameterDomain(format!("membership of non-finite input {x}")));
        }
        Ok(self.eval(x))
    }

    /// Natural log of the grade, accurate far into the tails where the grade
    /// itself underflows.
    pub fn ln_eval(&self, x: f64) -> f64 {
        let s = self.log_power(x);
        if s > 0.0 {
            -(s + (-s).exp().ln_1p())
        } else {
            -s.exp().ln_1p()
        }
    }

    /// Analytic gradient. At `x == c` every component is 0.
    pub fn grad(&self, x: f64) -> BellGrad {
        let z = (x - self.c) / self.a;
        if z == 0.0 {
            return BellGrad::default();
        }
        let s = 2.0 * self.b * z.abs().ln();
        // f (1 - f) = q / (1 + q)^2 with q = e^s, evaluated without overflow
        let r = (-s.abs()).exp();
        let f_one_minus_f = r / ((1.0 + r) * (1.0 + r));
        BellGrad {
            da: 2.0 * self.b * f_one_minus_f / self.a,
            db: -2.0 * f_one_minus_f * z.abs().ln(),
            dc: 2.0 * self.b * f_one_minus_f / (z * self.a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn center_and_crossover() {
        assert_eq!(BellMf::new(2.0, 3.0, 5.0).unwrap().eval(5.0), 1.0);
        let mf = BellMf::new(2.0, 7.0, 5.0).unwrap();
        assert_eq!(mf.eval(7.0), 0.5);
        assert_eq!(mf.eval(3.0), 0.5);
    }

    #[test]
    fn hand_value() {
        let got = BellMf::new(2.0, 4.0, 6.0).unwrap().eval(9.0);
        let expect = 1.0 / (1.0 + 1.5f64.powi(8));
        assert!((got - expect).abs() < 1e-15);
        assert!((got - 0.037_553_1).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_parameters_and_inputs() {
        assert!(BellMf::new(0.0, 1.0, 0.0).is_err());
        assert!(BellMf::new(1.0, -1.0, 0.0).is_err());
        let mf = BellMf::new(1.0, 1.0, 0.0).unwrap();
        assert!(mf.try_eval(f64::NAN).is_err());
    }

    #[test]
    fn ln_eval_survives_underflow() {
        let mf = BellMf::new(0.01, 10.0, 0.0).unwrap();
        assert_eq!(mf.eval(1e20), 0.0);
        let ln = mf.ln_eval(1e20);
        assert!(ln.is_finite() && ln < -700.0);
        let near = BellMf::new(1.0, 2.0, 0.0).unwrap();
        assert!((near.ln_eval(0.7) - near.eval(0.7).ln()).abs() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_center() {
        let g = BellMf::new(1.3, 2.0, 0.4).unwrap().grad(0.4);
        assert_eq!((g.da, g.dc), (0.0, 0.0));
    }

    #[test]
    fn center_gradient_is_odd() {
        let mf = BellMf::new(1.5, 2.5, 1.0).unwrap();
        for d in [0.1, 0.7, 2.0] {
            assert!((mf.grad(1.0 + d).dc + mf.grad(1.0 - d).dc).abs() < 1e-14);
        }
    }

    fn central(f: impl Fn(f64) -> f64, at: f64, h: f64) -> f64 {
        (f(at + h) - f(at - h)) / (2.0 * h)
    }

    #[test]
    fn matches_finite_differences_at_reference_point() {
        let mf = BellMf::new(2.0, 4.0, 6.0).unwrap();
        let g = mf.grad(9.0);
        let h = 1e-5;
        let fa = central(|a| BellMf { a, ..mf }.eval(9.0), mf.a, h);
        let fb = central(|b| BellMf { b, ..mf }.eval(9.0), mf.b, h);
        let fc = central(|c| BellMf { c, ..mf }.eval(9.0), mf.c, h);
        for (an, fd) in [(g.da, fa), (g.db, fb), (g.dc, fc)] {
            assert!((an - fd).abs() <= 1e-6 * fd.abs(), "{an} vs {fd}");
        }
    }

    proptest! {
        #[test]
        fn grade_in_unit_interval(a in 0.01f64..10.0, b in 0.1f64..10.0, c in -5.0f64..5.0, x in -50.0f64..50.0) {
            let v = BellMf { a, b, c }.eval(x);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn gradient_matches_finite_differences(a in 0.2f64..3.0, b in 0.5f64..5.0, c in -2.0f64..2.0, off in 0.05f64..4.0, sign in prop::bool::ANY) {
            let mf = BellMf { a, b, c };
            let x = if sign { c + off } else { c - off };
            let g = mf.grad(x);
            let h = 1e-6;
            let fa = central(|a| BellMf { a, ..mf }.eval(x), a, h);
            let fb = central(|b| BellMf { b, ..mf }.eval(x), b, h);
            let fc = central(|c| BellMf { c, ..mf }.eval(x), c, h);
            for (an, fd) in [(g.da, fa), (g.db, fb), (g.dc, fc)] {
                let scale = an.abs().max(fd.abs());
                prop_assert!((an - fd).abs() <= 1e-4 * scale + 1e-9, "{} vs {}", an, fd);
            }
        }
    }
}
