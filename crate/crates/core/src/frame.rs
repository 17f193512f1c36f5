//! Time-dependent rigid-motion frames: Euler rotations, dilatations,
//! translations, and the composed coordinate map x = O(t) L(t) (z(omega) + v(t)).
//!
//! All time dependence flows through [`TimeFunction`], so every derivative
//! used here is a closed form. The Euler convention is fixed to one specific
//! matrix; no alternatives are offered.

use crate::coords::{CoordSystemId, OmegaPoint, SplitClass};
use crate::linalg::{hat, Mat3, Vec3};
use crate::timefn::TimeFunction;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Samples used to validate scale constraints over the working interval.
const VALIDATION_SAMPLES: usize = 256;
/// Relative tolerance for the pairwise scale-identity checks.
const SCALE_EQ_TOL: f64 = 1e-12;

/// Serializable description of an Euler frame, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub alpha: TimeFunction,
    pub beta: TimeFunction,
    pub gamma: TimeFunction,
    pub l1: TimeFunction,
    pub l2: TimeFunction,
    pub l3: TimeFunction,
    pub v1: TimeFunction,
    pub v2: TimeFunction,
    pub v3: TimeFunction,
}

impl FrameSpec {
    /// Identity frame: no rotation, unit scales, no translation.
    pub fn identity() -> Self {
        FrameSpec {
            alpha: TimeFunction::zero(),
            beta: TimeFunction::zero(),
            gamma: TimeFunction::zero(),
            l1: TimeFunction::constant(1.0),
            l2: TimeFunction::constant(1.0),
            l3: TimeFunction::constant(1.0),
            v1: TimeFunction::zero(),
            v2: TimeFunction::zero(),
            v3: TimeFunction::zero(),
        }
    }

    /// Rotation about the third axis by angle alpha(t), everything else
    /// trivial.
    pub fn rotation_about_z(alpha: TimeFunction) -> Self {
        FrameSpec { alpha, ..FrameSpec::identity() }
    }
}

/// A validated moving frame bound to a coordinate system and a working time
/// interval.
///
/// Construction enforces the split-class constraint of the bound family
/// (l1 = l2 for the cylindrical-type families, l1 = l2 = l3 for the
/// non-split ones) and rejects scales that vanish anywhere on the interval.
#[derive(Debug, Clone)]
pub struct EulerFrame {
    spec: FrameSpec,
    system: CoordSystemId,
    t0: f64,
    t1: f64,
}

impl EulerFrame {
    pub fn new(system: CoordSystemId, spec: FrameSpec, t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(Error::Config(format!(
                "working interval must satisfy t0 < t1, got [{t0}, {t1}]"
            )));
        }
        let scales = [&spec.l1, &spec.l2, &spec.l3];
        for i in 0..=VALIDATION_SAMPLES {
            let t = t0 + (t1 - t0) * i as f64 / VALIDATION_SAMPLES as f64;
            let l: Vec<f64> = scales.iter().map(|f| f.eval(t)).collect();
            let mag = l.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            for (axis, v) in l.iter().enumerate() {
                if v.abs() < 1e-12 * mag {
                    return Err(Error::Config(format!(
                        "scale l{} vanishes near t = {t}",
                        axis + 1
                    )));
                }
            }
            match system.split_class() {
                SplitClass::FullySplit => {}
                SplitClass::PartiallySplit => {
                    if (l[0] - l[1]).abs() > SCALE_EQ_TOL * mag {
                        return Err(Error::Config(format!(
                            "family {} requires l1 = l2; they differ at t = {t}",
                            system.family().name()
                        )));
                    }
                }
                SplitClass::NonSplit => {
                    if (l[0] - l[1]).abs() > SCALE_EQ_TOL * mag
                        || (l[1] - l[2]).abs() > SCALE_EQ_TOL * mag
                    {
                        return Err(Error::Config(format!(
                            "family {} requires l1 = l2 = l3; they differ at t = {t}",
                            system.family().name()
                        )));
                    }
                }
            }
        }
        Ok(EulerFrame { spec, system, t0, t1 })
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }
    pub fn system(&self) -> &CoordSystemId {
        &self.system
    }
    pub fn interval(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    /// Scales (l1, l2, l3) at time t.
    pub fn scales(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.l1.eval(t), self.spec.l2.eval(t), self.spec.l3.eval(t))
    }

    /// Scale first derivatives.
    pub fn scales_d1(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.l1.d1(t), self.spec.l2.d1(t), self.spec.l3.d1(t))
    }

    /// Scale second derivatives.
    pub fn scales_d2(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.l1.d2(t), self.spec.l2.d2(t), self.spec.l3.d2(t))
    }

    /// Translation vector v(t).
    pub fn translation(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.v1.eval(t), self.spec.v2.eval(t), self.spec.v3.eval(t))
    }

    pub fn translation_d1(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.v1.d1(t), self.spec.v2.d1(t), self.spec.v3.d1(t))
    }

    pub fn translation_d2(&self, t: f64) -> Vec3 {
        Vec3::new(self.spec.v1.d2(t), self.spec.v2.d2(t), self.spec.v3.d2(t))
    }

    /// The orthogonal matrix O(t) in the fixed Euler convention.
    pub fn rotation_matrix(&self, t: f64) -> Mat3 {
        let (sa, ca) = self.spec.alpha.eval(t).sin_cos();
        let (sb, cb) = self.spec.beta.eval(t).sin_cos();
        let (sg, cg) = self.spec.gamma.eval(t).sin_cos();
        Mat3::new(
            ca * cb - sa * sb * cg,
            -ca * sb - sa * cb * cg,
            sa * sg,
            sa * cb + ca * sb * cg,
            -sa * sb + ca * cb * cg,
            -ca * sg,
            sb * sg,
            cb * sg,
            cg,
        )
    }

    /// Angular velocity Omega(t) of the rotating frame, closed form.
    pub fn angular_velocity(&self, t: f64) -> Vec3 {
        let (sa, ca) = self.spec.alpha.eval(t).sin_cos();
        let (sg, cg) = self.spec.gamma.eval(t).sin_cos();
        let da = self.spec.alpha.d1(t);
        let db = self.spec.beta.d1(t);
        let dg = self.spec.gamma.d1(t);
        Vec3::new(
            dg * ca + db * sa * sg,
            dg * sa - db * ca * sg,
            da + db * cg,
        )
    }

    /// The antisymmetric matrix dO/dt O^-1, closed form (the hat map of the
    /// angular velocity).
    pub fn rotation_rate_matrix(&self, t: f64) -> Mat3 {
        hat(self.angular_velocity(t))
    }

    /// Decomposition of the frame-rate matrix M = d(OL)/dt (OL)^-1 into its
    /// antisymmetric rotational part dO/dt O^-1 and symmetric dilatational
    /// part O (dL/dt L^-1) O^T.
    pub fn m_matrix(&self, t: f64) -> Result<(Mat3, Mat3)> {
        let l = self.scales(t);
        if l.iter().any(|v| *v == 0.0) {
            return Err(Error::Domain(format!("frame scale vanishes at t = {t}")));
        }
        let ld = self.scales_d1(t);
        let o = self.rotation_matrix(t);
        let rate = Mat3::from_diagonal(&ld.component_div(&l));
        Ok((self.rotation_rate_matrix(t), o * rate * o.transpose()))
    }

    /// The full coordinate map x = O(t) L(t) (z(omega) + v(t)).
    pub fn x_of_omega(&self, t: f64, w: OmegaPoint) -> Result<Vec3> {
        let z = self.system.z_of_omega(w)?;
        let arg = z + self.translation(t);
        Ok(self.rotation_matrix(t) * self.scales(t).component_mul(&arg))
    }

    /// Co-rotating coordinates x' = O^T x.
    pub fn x_prime(&self, t: f64, x: Vec3) -> Vec3 {
        self.rotation_matrix(t).transpose() * x
    }

    /// Inverse of the full map: omega from a laboratory point x.
    pub fn omega_of_x(&self, t: f64, x: Vec3, guess: Option<OmegaPoint>) -> Result<OmegaPoint> {
        let l = self.scales(t);
        if l.iter().any(|v| *v == 0.0) {
            return Err(Error::Domain(format!("frame scale vanishes at t = {t}")));
        }
        let z = self.x_prime(t, x).component_div(&l) - self.translation(t);
        match guess {
            Some(g) => self.system.omega_of_z(z, g),
            None => self.system.omega_of_z_auto(z),
        }
    }
}
