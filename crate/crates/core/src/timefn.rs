//! Closed-form scalar functions of one variable with exact derivatives.
//!
//! Frame angles, dilatation scales, translations, and the per-axis potential
//! coefficients are all drawn from this small algebra so that first and
//! second derivatives are available in closed form. Finite differencing of
//! frame data would pollute the residual checks downstream, hence the
//! restriction to an explicit representation.

use serde::{Deserialize, Serialize};

/// A closed-form scalar function of one real variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeFunction {
    Constant {
        c: f64,
    },
    Linear {
        c0: f64,
        c1: f64,
    },
    /// Polynomial with coefficients in ascending order, degree at most 4.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// amplitude * sin(omega*t + phase) + offset
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
        offset: f64,
    },
    Sum {
        terms: Vec<TimeFunction>,
    },
    Product {
        factors: Box<(TimeFunction, TimeFunction)>,
    },
    /// c * t^n with integer n (possibly negative; then undefined at t = 0).
    Power {
        c: f64,
        n: i32,
    },
    /// c * exp(rate * t)
    Exp {
        c: f64,
        rate: f64,
    },
    /// c * sech^2(t)
    Sech2 {
        c: f64,
    },
}

impl TimeFunction {
    pub fn zero() -> Self {
        TimeFunction::Constant { c: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        TimeFunction::Constant { c }
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        TimeFunction::Linear { c0, c1 }
    }

    /// Rejects polynomials above degree 4 and empty coefficient lists.
    pub fn polynomial(coeffs: Vec<f64>) -> crate::Result<Self> {
        if coeffs.is_empty() || coeffs.len() > 5 {
            return Err(crate::Error::Config(format!(
                "polynomial must have 1..=5 coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(TimeFunction::Polynomial { coeffs })
    }

    pub fn sinusoid(amplitude: f64, omega: f64, phase: f64, offset: f64) -> Self {
        TimeFunction::Sinusoid { amplitude, omega, phase, offset }
    }

    pub fn power(c: f64, n: i32) -> Self {
        TimeFunction::Power { c, n }
    }

    pub fn exp(c: f64, rate: f64) -> Self {
        TimeFunction::Exp { c, rate }
    }

    pub fn sech2(c: f64) -> Self {
        TimeFunction::Sech2 { c }
    }

    pub fn sum(terms: Vec<TimeFunction>) -> Self {
        TimeFunction::Sum { terms }
    }

    pub fn product(f: TimeFunction, g: TimeFunction) -> Self {
        TimeFunction::Product { factors: Box::new((f, g)) }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { c } => *c,
            TimeFunction::Linear { c0, c1 } => c0 + c1 * t,
            TimeFunction::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
            }
            TimeFunction::Sinusoid { amplitude, omega, phase, offset } => {
                amplitude * (omega * t + phase).sin() + offset
            }
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.eval(t)).sum(),
            TimeFunction::Product { factors } => factors.0.eval(t) * factors.1.eval(t),
            TimeFunction::Power { c, n } => c * t.powi(*n),
            TimeFunction::Exp { c, rate } => c * (rate * t).exp(),
            TimeFunction::Sech2 { c } => {
                let s = 1.0 / t.cosh();
                c * s * s
            }
        }
    }

    /// Exact first derivative.
    pub fn d1(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { .. } => 0.0,
            TimeFunction::Linear { c1, .. } => *c1,
            TimeFunction::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (n, &c)| acc * t + n as f64 * c),
            TimeFunction::Sinusoid { amplitude, omega, phase, .. } => {
                amplitude * omega * (omega * t + phase).cos()
            }
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.d1(t)).sum(),
            TimeFunction::Product { factors } => {
                factors.0.d1(t) * factors.1.eval(t) + factors.0.eval(t) * factors.1.d1(t)
            }
            TimeFunction::Power { c, n } => c * *n as f64 * t.powi(n - 1),
            TimeFunction::Exp { c, rate } => c * rate * (rate * t).exp(),
            TimeFunction::Sech2 { c } => {
                let s = 1.0 / t.cosh();
                -2.0 * c * s * s * t.tanh()
            }
        }
    }

    /// Exact second derivative.
    pub fn d2(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { .. } | TimeFunction::Linear { .. } => 0.0,
            TimeFunction::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (n, &c)| acc * t + (n * (n - 1)) as f64 * c),
            TimeFunction::Sinusoid { amplitude, omega, phase, .. } => {
                -amplitude * omega * omega * (omega * t + phase).sin()
            }
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.d2(t)).sum(),
            TimeFunction::Product { factors } => {
                let (f, g) = (&factors.0, &factors.1);
                f.d2(t) * g.eval(t) + 2.0 * f.d1(t) * g.d1(t) + f.eval(t) * g.d2(t)
            }
            TimeFunction::Power { c, n } => c * (*n * (n - 1)) as f64 * t.powi(n - 2),
            TimeFunction::Exp { c, rate } => c * rate * rate * (rate * t).exp(),
            TimeFunction::Sech2 { c } => {
                // d/dt [-2 sech^2 tanh] = 4 sech^2 tanh^2 - 2 sech^4
                let s2 = 1.0 / t.cosh().powi(2);
                let th = t.tanh();
                c * (4.0 * s2 * th * th - 2.0 * s2 * s2)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeFunction::Constant { c } => *c == 0.0,
            _ => false,
        }
    }
}
