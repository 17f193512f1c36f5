//! Spin-space algebra: Pauli matrices, the unitary propagator U(t) that
//! absorbs the sigma.H term, and the multiplier Q of the separation Ansatz.
//!
//! U solves i dU/dt = -(e sigma.H(t)) U with U(0) = I, integrated by
//! fixed-step classical RK4 and tabulated for cubic Hermite interpolation,
//! so Q can be evaluated at arbitrary times without re-integration.

use crate::fields::s_phase;
use crate::frame::EulerFrame;
use crate::linalg::{frob2c, C64, Mat2C, Vec3};
use crate::{Error, Result};

/// Default RK4 step for the propagator.
pub const DEFAULT_U_STEP: f64 = 1e-3;
/// Unitarity drift beyond this aborts the integration.
pub const UNITARITY_DRIFT_LIMIT: f64 = 1e-6;

/// The standard Pauli matrix sigma_i, i in {1, 2, 3}.
pub fn pauli_sigma(i: usize) -> Result<Mat2C> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    match i {
        1 => Ok(Mat2C::new(o, l, l, o)),
        2 => Ok(Mat2C::new(o, C64::new(0.0, -1.0), C64::new(0.0, 1.0), o)),
        3 => Ok(Mat2C::new(l, o, o, -l)),
        _ => Err(Error::Domain(format!("Pauli index must be 1..=3, got {i}"))),
    }
}

/// sigma . h = h1 sigma_1 + h2 sigma_2 + h3 sigma_3 (Hermitian).
pub fn sigma_dot(h: Vec3) -> Mat2C {
    Mat2C::new(
        C64::new(h.z, 0.0),
        C64::new(h.x, -h.y),
        C64::new(h.x, h.y),
        C64::new(-h.z, 0.0),
    )
}

/// dU/dt = i (e sigma.H(t)) U
fn rhs(eh: &dyn Fn(f64) -> Vec3, t: f64, u: &Mat2C) -> Mat2C {
    sigma_dot(eh(t)).map(|z| z * C64::new(0.0, 1.0)) * u
}

/// The propagator tabulated on a uniform time grid.
#[derive(Debug, Clone)]
pub struct UPropagator {
    t0: f64,
    step: f64,
    table: Vec<Mat2C>,
    derivs: Vec<Mat2C>,
    /// Worst unitarity defect observed along the table.
    pub unitarity_defect: f64,
}

impl UPropagator {
    /// Integrates from t0 (where U = I) to t1 with fixed-step RK4.
    pub fn integrate<F: Fn(f64) -> Vec3>(eh: F, t0: f64, t1: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {step}")));
        }
        if !(t1 > t0) {
            return Err(Error::Config(format!(
                "propagator window must satisfy t0 < t1, got [{t0}, {t1}]"
            )));
        }
        let n = ((t1 - t0) / step).ceil() as usize;
        let h = (t1 - t0) / n as f64;
        let mut table = Vec::with_capacity(n + 1);
        let mut u = Mat2C::identity();
        table.push(u);
        let mut defect = 0.0f64;
        for i in 0..n {
            let t = t0 + i as f64 * h;
            let k1 = rhs(&eh, t, &u);
            let k2 = rhs(&eh, t + 0.5 * h, &(u + k1 * C64::new(0.5 * h, 0.0)));
            let k3 = rhs(&eh, t + 0.5 * h, &(u + k2 * C64::new(0.5 * h, 0.0)));
            let k4 = rhs(&eh, t + h, &(u + k3 * C64::new(h, 0.0)));
            u += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(h / 6.0, 0.0);
            let d = frob2c(&(u.adjoint() * u - Mat2C::identity()));
            defect = defect.max(d);
            if d > UNITARITY_DRIFT_LIMIT {
                return Err(Error::Integration(format!(
                    "unitarity drift {d:.3e} exceeds {UNITARITY_DRIFT_LIMIT:.0e} at t = {} \
                     (step {h:.3e} too large)",
                    t + h
                )));
            }
            table.push(u);
        }
        let derivs = table
            .iter()
            .enumerate()
            .map(|(i, u)| rhs(&eh, t0 + i as f64 * h, u))
            .collect();
        Ok(UPropagator { t0, step: h, table, derivs, unitarity_defect: defect })
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.step * (self.table.len() - 1) as f64
    }

    /// Cubic Hermite interpolation between tabulated nodes, with the ODE
    /// right-hand side supplying the endpoint derivatives.
    pub fn at(&self, t: f64) -> Result<Mat2C> {
        let span = self.t_end() - self.t0;
        let s = (t - self.t0) / self.step;
        if s < -1e-9 || t > self.t_end() + 1e-9 * span.max(1.0) {
            return Err(Error::Domain(format!(
                "t = {t} outside the tabulated window [{}, {}]",
                self.t0,
                self.t_end()
            )));
        }
        let i = (s.floor() as usize).min(self.table.len() - 2);
        let u = s - i as f64;
        let (p0, p1) = (&self.table[i], &self.table[i + 1]);
        let (m0, m1) = (
            self.derivs[i] * C64::new(self.step, 0.0),
            self.derivs[i + 1] * C64::new(self.step, 0.0),
        );
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        Ok(p0 * C64::new(h00, 0.0)
            + m0 * C64::new(h10, 0.0)
            + p1 * C64::new(h01, 0.0)
            + m1 * C64::new(h11, 0.0))
    }
}

/// One-shot solve of the propagator at a single time t >= 0 (from U(0) = I).
pub fn solve_u<F: Fn(f64) -> Vec3>(eh: F, t: f64, step: f64) -> Result<Mat2C> {
    if t < 0.0 {
        return Err(Error::Domain(format!("solve_u requires t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Mat2C::identity());
    }
    let prop = UPropagator::integrate(eh, 0.0, t, step)?;
    Ok(*prop.table.last().expect("table is never empty"))
}

/// The multiplier Q = U(t) (l1 l2 l3)^{-1/2} exp(i S) with the quadratic
/// phase S of the moving frame.
pub fn q_multiplier(
    frame: &EulerFrame,
    t: f64,
    x: Vec3,
    u: &Mat2C,
) -> Result<Mat2C> {
    let l = frame.scales(t);
    let prod = l.x * l.y * l.z;
    if prod <= 0.0 {
        return Err(Error::Domain(format!(
            "scale product must be positive for Q, got {prod} at t = {t}"
        )));
    }
    let xp = frame.x_prime(t, x);
    let phase = s_phase(frame, t, xp)?;
    let factor = C64::from_polar(prod.powf(-0.5), phase);
    Ok(u * C64::new(factor.re, factor.im))
}

/// The damping exponent S1 = -1/2 sum_a ln l_a, so e^{S1} = (l1 l2 l3)^{-1/2}.
pub fn s1_damping(frame: &EulerFrame, t: f64) -> Result<f64> {
    let l = frame.scales(t);
    if l.iter().any(|v| *v <= 0.0) {
        return Err(Error::Domain(format!(
            "S1 requires positive scales, got ({}, {}, {}) at t = {t}",
            l.x, l.y, l.z
        )));
    }
    Ok(-0.5 * (l.x.ln() + l.y.ln() + l.z.ln()))
}
