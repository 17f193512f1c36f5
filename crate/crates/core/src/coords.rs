//! The eleven orthogonal coordinate families, their eikonals and Stäckel
//! matrices, and numeric inversion of the coordinate maps.
//!
//! Each family supplies the map z(omega) in closed form together with its
//! exact Jacobian (elliptic-function derivatives included), the squared
//! gradient magnitudes R_a^{-2} ("eikonals"), the 3x3 Stäckel matrix whose
//! row a depends on omega_a only, and the T-functions coupling the time
//! equation to the separation constants. Inversion omega(z) is a damped
//! Newton iteration on the exact Jacobian.

use crate::linalg::{Mat3, Vec3};
use crate::specialfn::{complete_elliptic_k, jacobi_sn_cn_dn, EllipticModulus};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default margin from domain boundaries; closer evaluation is rejected.
pub const DOMAIN_MARGIN: f64 = 1e-6;

/// A point in curvilinear coordinates (omega_1, omega_2, omega_3).
pub type OmegaPoint = Vec3;

/// Whether the dilatation scales may differ, must pair, or must coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitClass {
    /// l1, l2, l3 independent (family 1).
    FullySplit,
    /// l1 = l2 (families 2-4).
    PartiallySplit,
    /// l1 = l2 = l3 (families 5-11).
    NonSplit,
}

/// Sign of the z3 offset in the prolate spheroidal II variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSign {
    Plus,
    Minus,
}

impl ShiftSign {
    fn value(self) -> f64 {
        match self {
            ShiftSign::Plus => 1.0,
            ShiftSign::Minus => -1.0,
        }
    }
}

/// The eleven coordinate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cartesian,
    Cylindrical,
    ParabolicCylindrical,
    EllipticCylindrical,
    Spherical,
    ProlateSpheroidal,
    OblateSpheroidal,
    Parabolic,
    Paraboloidal,
    Ellipsoidal,
    Conical,
}

impl Family {
    pub fn index(self) -> usize {
        match self {
            Family::Cartesian => 1,
            Family::Cylindrical => 2,
            Family::ParabolicCylindrical => 3,
            Family::EllipticCylindrical => 4,
            Family::Spherical => 5,
            Family::ProlateSpheroidal => 6,
            Family::OblateSpheroidal => 7,
            Family::Parabolic => 8,
            Family::Paraboloidal => 9,
            Family::Ellipsoidal => 10,
            Family::Conical => 11,
        }
    }

    pub fn needs_a(self) -> bool {
        matches!(
            self,
            Family::EllipticCylindrical
                | Family::ProlateSpheroidal
                | Family::OblateSpheroidal
                | Family::Paraboloidal
                | Family::Ellipsoidal
        )
    }

    pub fn needs_modulus(self) -> bool {
        matches!(self, Family::Ellipsoidal | Family::Conical)
    }

    pub fn split_class(self) -> SplitClass {
        match self.index() {
            1 => SplitClass::FullySplit,
            2..=4 => SplitClass::PartiallySplit,
            _ => SplitClass::NonSplit,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Cartesian => "cartesian",
            Family::Cylindrical => "cylindrical",
            Family::ParabolicCylindrical => "parabolic_cylindrical",
            Family::EllipticCylindrical => "elliptic_cylindrical",
            Family::Spherical => "spherical",
            Family::ProlateSpheroidal => "prolate_spheroidal",
            Family::OblateSpheroidal => "oblate_spheroidal",
            Family::Parabolic => "parabolic",
            Family::Paraboloidal => "paraboloidal",
            Family::Ellipsoidal => "ellipsoidal",
            Family::Conical => "conical",
        }
    }

    pub fn all() -> [Family; 11] {
        [
            Family::Cartesian,
            Family::Cylindrical,
            Family::ParabolicCylindrical,
            Family::EllipticCylindrical,
            Family::Spherical,
            Family::ProlateSpheroidal,
            Family::OblateSpheroidal,
            Family::Parabolic,
            Family::Paraboloidal,
            Family::Ellipsoidal,
            Family::Conical,
        ]
    }
}

/// A fully parameterized coordinate system descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordSystemId {
    family: Family,
    a: Option<f64>,
    modulus: Option<EllipticModulus>,
    /// Prolate spheroidal II: z3 gains a constant offset of +-a.
    variant2: Option<ShiftSign>,
}

impl CoordSystemId {
    pub fn new(
        family: Family,
        a: Option<f64>,
        k: Option<f64>,
        variant2: Option<ShiftSign>,
    ) -> Result<Self> {
        if family.needs_a() {
            match a {
                Some(v) if v > 0.0 => {}
                _ => {
                    return Err(Error::Config(format!(
                        "family {} requires geometric parameter a > 0",
                        family.name()
                    )))
                }
            }
        } else if a.is_some() {
            return Err(Error::Config(format!(
                "family {} takes no geometric parameter a",
                family.name()
            )));
        }
        let modulus = if family.needs_modulus() {
            match k {
                Some(v) => Some(EllipticModulus::new(v)?),
                None => {
                    return Err(Error::Config(format!(
                        "family {} requires elliptic modulus k",
                        family.name()
                    )))
                }
            }
        } else {
            if k.is_some() {
                return Err(Error::Config(format!(
                    "family {} takes no elliptic modulus",
                    family.name()
                )));
            }
            None
        };
        if variant2.is_some() && family != Family::ProlateSpheroidal {
            return Err(Error::Config(
                "variant II offset is only defined for the prolate spheroidal family".into(),
            ));
        }
        Ok(CoordSystemId { family, a, modulus, variant2 })
    }

    pub fn cartesian() -> Self {
        Self::new(Family::Cartesian, None, None, None).unwrap()
    }
    pub fn cylindrical() -> Self {
        Self::new(Family::Cylindrical, None, None, None).unwrap()
    }
    pub fn parabolic_cylindrical() -> Self {
        Self::new(Family::ParabolicCylindrical, None, None, None).unwrap()
    }
    pub fn elliptic_cylindrical(a: f64) -> Result<Self> {
        Self::new(Family::EllipticCylindrical, Some(a), None, None)
    }
    pub fn spherical() -> Self {
        Self::new(Family::Spherical, None, None, None).unwrap()
    }
    pub fn prolate_spheroidal(a: f64) -> Result<Self> {
        Self::new(Family::ProlateSpheroidal, Some(a), None, None)
    }
    /// Prolate spheroidal II: z3 = a (coth w1 tanh w2 +- 1).
    pub fn prolate_spheroidal_ii(a: f64, sign: ShiftSign) -> Result<Self> {
        Self::new(Family::ProlateSpheroidal, Some(a), None, Some(sign))
    }
    pub fn oblate_spheroidal(a: f64) -> Result<Self> {
        Self::new(Family::OblateSpheroidal, Some(a), None, None)
    }
    pub fn parabolic() -> Self {
        Self::new(Family::Parabolic, None, None, None).unwrap()
    }
    pub fn paraboloidal(a: f64) -> Result<Self> {
        Self::new(Family::Paraboloidal, Some(a), None, None)
    }
    pub fn ellipsoidal(a: f64, k: f64) -> Result<Self> {
        Self::new(Family::Ellipsoidal, Some(a), Some(k), None)
    }
    pub fn conical(k: f64) -> Result<Self> {
        Self::new(Family::Conical, None, Some(k), None)
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn split_class(&self) -> SplitClass {
        self.family.split_class()
    }
    pub fn param_a(&self) -> Option<f64> {
        self.a
    }
    pub fn modulus(&self) -> Option<EllipticModulus> {
        self.modulus
    }
    pub fn is_variant2(&self) -> bool {
        self.variant2.is_some()
    }
    pub fn variant2_sign(&self) -> Option<ShiftSign> {
        self.variant2
    }

    fn a(&self) -> f64 {
        self.a.unwrap_or(1.0)
    }

    fn k(&self) -> f64 {
        self.modulus.map(|m| m.k()).unwrap_or(0.0)
    }

    fn k_prime(&self) -> f64 {
        self.modulus.map(|m| m.k_prime()).unwrap_or(1.0)
    }

    /// Quarter periods (K, K') for the elliptic families.
    pub fn quarter_periods(&self) -> Result<(f64, f64)> {
        let m = self.modulus.ok_or_else(|| {
            Error::Config(format!("family {} has no elliptic modulus", self.family.name()))
        })?;
        Ok((complete_elliptic_k(m.k())?, complete_elliptic_k(m.k_prime())?))
    }

    /// Validates that omega lies inside the family's domain with margin eps.
    pub fn domain_check(&self, w: OmegaPoint, eps: f64) -> Result<()> {
        if !w.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("omega has non-finite components".into()));
        }
        let fail = |bound: &str| -> Result<()> {
            Err(Error::Domain(format!(
                "omega = ({}, {}, {}) violates bound `{bound}` of the {} family",
                w.x,
                w.y,
                w.z,
                self.family.name()
            )))
        };
        match self.family {
            Family::Cartesian | Family::Cylindrical | Family::Parabolic => Ok(()),
            Family::ParabolicCylindrical => {
                if w.x <= eps {
                    fail("omega_1 > 0")
                } else {
                    Ok(())
                }
            }
            Family::EllipticCylindrical => {
                if w.x <= eps {
                    fail("omega_1 > 0")
                } else {
                    Ok(())
                }
            }
            Family::Spherical | Family::ProlateSpheroidal | Family::Conical => {
                if w.x <= eps {
                    fail("omega_1 > 0")
                } else {
                    Ok(())
                }
            }
            Family::OblateSpheroidal => {
                if w.x <= eps || w.x >= std::f64::consts::FRAC_PI_2 - eps {
                    fail("0 < omega_1 < pi/2")
                } else {
                    Ok(())
                }
            }
            Family::Paraboloidal => {
                if w.y <= eps || w.y >= std::f64::consts::PI - eps {
                    fail("0 < omega_2 < pi")
                } else {
                    Ok(())
                }
            }
            Family::Ellipsoidal => {
                let (quarter_k, quarter_kp) = self.quarter_periods()?;
                if w.x <= eps || w.x >= quarter_k - eps {
                    fail("0 < omega_1 < K")
                } else if w.y.abs() >= quarter_kp - eps {
                    fail("-K' < omega_2 < K'")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// An interior box safe for random sampling: away from domain boundaries
    /// and from the loci where the coordinate map degenerates (axes, focal
    /// curves, quarter-period corners).
    pub fn sample_box(&self) -> ([f64; 3], [f64; 3]) {
        match self.family {
            Family::Cartesian => ([-1.5, -1.5, -1.5], [1.5, 1.5, 1.5]),
            Family::Cylindrical => ([-0.8, 0.3, -1.2], [0.8, 2.6, 1.2]),
            Family::ParabolicCylindrical => ([0.4, 0.3, -1.0], [1.5, 1.5, 1.0]),
            Family::EllipticCylindrical => ([0.35, 0.3, -1.0], [1.4, 1.3, 1.0]),
            Family::Spherical => ([0.5, -1.2, 0.3], [2.0, 1.2, 2.7]),
            Family::ProlateSpheroidal => ([0.4, -1.1, 0.3], [1.6, 1.1, 2.7]),
            Family::OblateSpheroidal => ([0.35, 0.35, 0.3], [1.15, 1.5, 2.7]),
            Family::Parabolic => ([-0.7, -0.7, 0.3], [0.7, 0.7, 2.7]),
            Family::Paraboloidal => ([0.2, 0.35, 0.25], [0.9, 1.2, 0.9]),
            Family::Ellipsoidal | Family::Conical => {
                let (quarter_k, quarter_kp) = self
                    .quarter_periods()
                    .expect("elliptic families always carry a modulus");
                let lo2 = 0.12 * quarter_kp;
                let hi2 = 0.88 * quarter_kp;
                let lo3 = 0.15 * quarter_k;
                let hi3 = 0.85 * quarter_k;
                if self.family == Family::Ellipsoidal {
                    ([0.15 * quarter_k, lo2, lo3], [0.85 * quarter_k, hi2, hi3])
                } else {
                    ([0.5, lo2, lo3], [1.6, hi2, hi3])
                }
            }
        }
    }

    /// Elliptic triples for omega_2 (modulus k') and omega_3 (modulus k).
    fn elliptic_pair(&self, w: OmegaPoint) -> Result<((f64, f64, f64), (f64, f64, f64))> {
        let e2 = jacobi_sn_cn_dn(w.y, self.k_prime())?;
        let e3 = jacobi_sn_cn_dn(w.z, self.k())?;
        Ok((e2, e3))
    }

    /// The coordinate map z(omega).
    pub fn z_of_omega(&self, w: OmegaPoint) -> Result<Vec3> {
        self.domain_check(w, DOMAIN_MARGIN)?;
        let a = self.a();
        Ok(match self.family {
            Family::Cartesian => w,
            Family::Cylindrical => {
                let r = w.x.exp();
                Vec3::new(r * w.y.cos(), r * w.y.sin(), w.z)
            }
            Family::ParabolicCylindrical => {
                Vec3::new(0.5 * (w.x * w.x - w.y * w.y), w.x * w.y, w.z)
            }
            Family::EllipticCylindrical => Vec3::new(
                a * w.x.cosh() * w.y.cos(),
                a * w.x.sinh() * w.y.sin(),
                w.z,
            ),
            Family::Spherical => {
                let inv = 1.0 / w.x;
                let sech = 1.0 / w.y.cosh();
                Vec3::new(inv * sech * w.z.cos(), inv * sech * w.z.sin(), inv * w.y.tanh())
            }
            Family::ProlateSpheroidal => {
                let csch = 1.0 / w.x.sinh();
                let coth = w.x.cosh() * csch;
                let sech = 1.0 / w.y.cosh();
                let shift = self.variant2.map(|s| s.value()).unwrap_or(0.0);
                Vec3::new(
                    a * csch * sech * w.z.cos(),
                    a * csch * sech * w.z.sin(),
                    a * (coth * w.y.tanh() + shift),
                )
            }
            Family::OblateSpheroidal => {
                let csc = 1.0 / w.x.sin();
                let cot = w.x.cos() * csc;
                let sech = 1.0 / w.y.cosh();
                Vec3::new(
                    a * csc * sech * w.z.cos(),
                    a * csc * sech * w.z.sin(),
                    a * cot * w.y.tanh(),
                )
            }
            Family::Parabolic => {
                let e = (w.x + w.y).exp();
                Vec3::new(
                    e * w.z.cos(),
                    e * w.z.sin(),
                    0.5 * ((2.0 * w.x).exp() - (2.0 * w.y).exp()),
                )
            }
            Family::Paraboloidal => Vec3::new(
                2.0 * a * w.x.cosh() * w.y.cos() * w.z.sinh(),
                2.0 * a * w.x.sinh() * w.y.sin() * w.z.cosh(),
                0.5 * a * ((2.0 * w.x).cosh() + (2.0 * w.y).cos() - (2.0 * w.z).cosh()),
            ),
            Family::Ellipsoidal => {
                let (s1, c1, d1) = jacobi_sn_cn_dn(w.x, self.k())?;
                let ((s2, c2, d2), (s3, c3, d3)) = self.elliptic_pair(w)?;
                Vec3::new(
                    a * d2 * s3 / s1,
                    a * d1 * c2 * c3 / s1,
                    a * c1 * s2 * d3 / s1,
                )
            }
            Family::Conical => {
                let inv = 1.0 / w.x;
                let ((s2, c2, d2), (s3, c3, d3)) = self.elliptic_pair(w)?;
                Vec3::new(inv * d2 * s3, inv * c2 * c3, inv * s2 * d3)
            }
        })
    }

    /// Exact Jacobian dz_i/domega_j.
    pub fn jacobian(&self, w: OmegaPoint) -> Result<Mat3> {
        self.domain_check(w, DOMAIN_MARGIN)?;
        let a = self.a();
        let j = match self.family {
            Family::Cartesian => Mat3::identity(),
            Family::Cylindrical => {
                let r = w.x.exp();
                let (s, c) = w.y.sin_cos();
                Mat3::new(r * c, -r * s, 0.0, r * s, r * c, 0.0, 0.0, 0.0, 1.0)
            }
            Family::ParabolicCylindrical => {
                Mat3::new(w.x, -w.y, 0.0, w.y, w.x, 0.0, 0.0, 0.0, 1.0)
            }
            Family::EllipticCylindrical => {
                let (sh, ch) = (w.x.sinh(), w.x.cosh());
                let (s, c) = w.y.sin_cos();
                Mat3::new(a * sh * c, -a * ch * s, 0.0, a * ch * s, a * sh * c, 0.0, 0.0, 0.0, 1.0)
            }
            Family::Spherical => {
                let inv = 1.0 / w.x;
                let inv2 = inv * inv;
                let sech = 1.0 / w.y.cosh();
                let tanh = w.y.tanh();
                let (s3, c3) = w.z.sin_cos();
                Mat3::new(
                    -inv2 * sech * c3,
                    -inv * sech * tanh * c3,
                    -inv * sech * s3,
                    -inv2 * sech * s3,
                    -inv * sech * tanh * s3,
                    inv * sech * c3,
                    -inv2 * tanh,
                    inv * sech * sech,
                    0.0,
                )
            }
            Family::ProlateSpheroidal => {
                let csch = 1.0 / w.x.sinh();
                let coth = w.x.cosh() * csch;
                let sech = 1.0 / w.y.cosh();
                let tanh = w.y.tanh();
                let (s3, c3) = w.z.sin_cos();
                Mat3::new(
                    -a * csch * coth * sech * c3,
                    -a * csch * sech * tanh * c3,
                    -a * csch * sech * s3,
                    -a * csch * coth * sech * s3,
                    -a * csch * sech * tanh * s3,
                    a * csch * sech * c3,
                    -a * csch * csch * tanh,
                    a * coth * sech * sech,
                    0.0,
                )
            }
            Family::OblateSpheroidal => {
                let csc = 1.0 / w.x.sin();
                let cot = w.x.cos() * csc;
                let sech = 1.0 / w.y.cosh();
                let tanh = w.y.tanh();
                let (s3, c3) = w.z.sin_cos();
                Mat3::new(
                    -a * csc * cot * sech * c3,
                    -a * csc * sech * tanh * c3,
                    -a * csc * sech * s3,
                    -a * csc * cot * sech * s3,
                    -a * csc * sech * tanh * s3,
                    a * csc * sech * c3,
                    -a * csc * csc * tanh,
                    a * cot * sech * sech,
                    0.0,
                )
            }
            Family::Parabolic => {
                let e = (w.x + w.y).exp();
                let (s3, c3) = w.z.sin_cos();
                Mat3::new(
                    e * c3,
                    e * c3,
                    -e * s3,
                    e * s3,
                    e * s3,
                    e * c3,
                    (2.0 * w.x).exp(),
                    -(2.0 * w.y).exp(),
                    0.0,
                )
            }
            Family::Paraboloidal => {
                let (sh1, ch1) = (w.x.sinh(), w.x.cosh());
                let (s2, c2) = w.y.sin_cos();
                let (sh3, ch3) = (w.z.sinh(), w.z.cosh());
                Mat3::new(
                    2.0 * a * sh1 * c2 * sh3,
                    -2.0 * a * ch1 * s2 * sh3,
                    2.0 * a * ch1 * c2 * ch3,
                    2.0 * a * ch1 * s2 * ch3,
                    2.0 * a * sh1 * c2 * ch3,
                    2.0 * a * sh1 * s2 * sh3,
                    a * (2.0 * w.x).sinh(),
                    -a * (2.0 * w.y).sin(),
                    -a * (2.0 * w.z).sinh(),
                )
            }
            Family::Ellipsoidal => {
                let k = self.k();
                let kp = self.k_prime();
                let (s1, c1, d1) = jacobi_sn_cn_dn(w.x, k)?;
                let ((s2, c2, d2), (s3, c3, d3)) = self.elliptic_pair(w)?;
                let inv1 = 1.0 / s1;
                let inv1sq = inv1 * inv1;
                Mat3::new(
                    -a * d2 * s3 * c1 * d1 * inv1sq,
                    -a * kp * kp * s2 * c2 * s3 * inv1,
                    a * d2 * c3 * d3 * inv1,
                    // d(d1/s1)/dw1 = -c1 (k^2 s1^2 + d1^2)/s1^2 = -c1/s1^2
                    -a * c2 * c3 * c1 * inv1sq,
                    -a * d1 * s2 * d2 * c3 * inv1,
                    -a * d1 * c2 * s3 * d3 * inv1,
                    // d(c1/s1)/dw1 = -d1 (s1^2 + c1^2)/s1^2 = -d1/s1^2
                    -a * s2 * d3 * d1 * inv1sq,
                    a * c1 * c2 * d2 * d3 * inv1,
                    -a * k * k * c1 * s2 * s3 * c3 * inv1,
                )
            }
            Family::Conical => {
                let k = self.k();
                let kp = self.k_prime();
                let inv = 1.0 / w.x;
                let inv2 = inv * inv;
                let ((s2, c2, d2), (s3, c3, d3)) = self.elliptic_pair(w)?;
                Mat3::new(
                    -inv2 * d2 * s3,
                    -inv * kp * kp * s2 * c2 * s3,
                    inv * d2 * c3 * d3,
                    -inv2 * c2 * c3,
                    -inv * s2 * d2 * c3,
                    -inv * c2 * s3 * d3,
                    -inv2 * s2 * d3,
                    inv * c2 * d2 * d3,
                    -inv * k * k * s2 * s3 * c3,
                )
            }
        };
        if j.determinant().abs() < 1e-12 {
            return Err(Error::Singular(format!(
                "coordinate Jacobian of {} is singular at omega = ({}, {}, {})",
                self.family.name(),
                w.x,
                w.y,
                w.z
            )));
        }
        Ok(j)
    }

    /// Inverts z(omega) = z by damped Newton iteration from `guess`.
    ///
    /// Convergence is only guaranteed within the branch of the map that
    /// contains the guess; multi-branch families (paraboloidal, ellipsoidal)
    /// resolve to the branch of the supplied starting point.
    pub fn omega_of_z(&self, z: Vec3, guess: OmegaPoint) -> Result<OmegaPoint> {
        let scale = 1.0 + z.norm();
        let mut w = guess;
        let mut res = self.z_of_omega(w)? - z;
        for _ in 0..50 {
            if res.norm() <= 1e-15 * scale {
                break;
            }
            let jac = self.jacobian(w)?;
            let step = jac.lu().solve(&(-res)).ok_or_else(|| {
                Error::Singular(format!(
                    "singular Jacobian during inversion of {}",
                    self.family.name()
                ))
            })?;
            // Damped update: halve the step while it fails to reduce the
            // residual or leaves the domain.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..20 {
                let trial = w + step * lambda;
                match self.z_of_omega(trial) {
                    Ok(zt) => {
                        let rt = zt - z;
                        if rt.norm() < res.norm() {
                            w = trial;
                            res = rt;
                            accepted = true;
                            break;
                        }
                    }
                    Err(_) => {}
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res.norm() > 1e-9 * scale {
            return Err(Error::Convergence(format!(
                "Newton inversion of {} stalled with residual {:.3e} at z = ({}, {}, {})",
                self.family.name(),
                res.norm(),
                z.x,
                z.y,
                z.z
            )));
        }
        Ok(w)
    }

    /// Inverts z(omega) = z with a coarse search over the sample box for the
    /// starting point, then Newton.
    pub fn omega_of_z_auto(&self, z: Vec3) -> Result<OmegaPoint> {
        if self.family == Family::Cartesian {
            return Ok(z);
        }
        let (lo, hi) = self.sample_box();
        let n = 10;
        let mut best = None;
        let mut best_dist = f64::INFINITY;
        for i in 0..=n {
            for jdx in 0..=n {
                for kdx in 0..=n {
                    let w = Vec3::new(
                        lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64,
                        lo[1] + (hi[1] - lo[1]) * jdx as f64 / n as f64,
                        lo[2] + (hi[2] - lo[2]) * kdx as f64 / n as f64,
                    );
                    if let Ok(zw) = self.z_of_omega(w) {
                        let d = (zw - z).norm();
                        if d < best_dist {
                            best_dist = d;
                            best = Some(w);
                        }
                    }
                }
            }
        }
        let guess = best.ok_or_else(|| {
            Error::Domain(format!(
                "no admissible starting point found for {} inversion",
                self.family.name()
            ))
        })?;
        self.omega_of_z(z, guess)
    }

    /// Squared gradient magnitudes R_a^{-2} of the curvilinear coordinates,
    /// with the scale functions h identified with the dilatations l.
    pub fn eikonal(&self, w: OmegaPoint, l: Vec3) -> Result<Vec3> {
        if l.iter().any(|v| *v == 0.0) {
            return Err(Error::Domain("dilatation scales must be nonzero".into()));
        }
        self.domain_check(w, DOMAIN_MARGIN)?;
        let a = self.a();
        let h1i2 = 1.0 / (l.x * l.x);
        let h3i2 = 1.0 / (l.z * l.z);
        Ok(match self.family {
            Family::Cartesian => Vec3::new(
                1.0 / (l.x * l.x),
                1.0 / (l.y * l.y),
                1.0 / (l.z * l.z),
            ),
            Family::Cylindrical => {
                let r = h1i2 * (-2.0 * w.x).exp();
                Vec3::new(r, r, h3i2)
            }
            Family::ParabolicCylindrical => {
                let r = h1i2 / (w.x * w.x + w.y * w.y);
                Vec3::new(r, r, h3i2)
            }
            Family::EllipticCylindrical => {
                let denom = w.x.cosh().powi(2) - w.y.cos().powi(2);
                let r = h1i2 / (a * a * denom);
                Vec3::new(r, r, h3i2)
            }
            Family::Spherical => {
                let r23 = h1i2 * w.x * w.x * w.y.cosh().powi(2);
                Vec3::new(h1i2 * w.x.powi(4), r23, r23)
            }
            Family::ProlateSpheroidal => {
                let sh2 = w.x.sinh().powi(2);
                let ch2 = w.y.cosh().powi(2);
                let denom = 1.0 / sh2 + 1.0 / ch2;
                let c = h1i2 / (a * a);
                Vec3::new(c * sh2 / denom, c * ch2 / denom, c * sh2 * ch2)
            }
            Family::OblateSpheroidal => {
                let s2 = w.x.sin().powi(2);
                let ch2 = w.y.cosh().powi(2);
                let denom = 1.0 / s2 - 1.0 / ch2;
                let c = h1i2 / (a * a);
                Vec3::new(c * s2 / denom, c * ch2 / denom, c * s2 * ch2)
            }
            Family::Parabolic => {
                let e1 = (2.0 * w.x).exp();
                let e2 = (2.0 * w.y).exp();
                Vec3::new(
                    h1i2 / (e1 * (e1 + e2)),
                    h1i2 / (e2 * (e1 + e2)),
                    h1i2 / (e1 * e2),
                )
            }
            Family::Paraboloidal => {
                let ch1 = (2.0 * w.x).cosh();
                let c2 = (2.0 * w.y).cos();
                let ch3 = (2.0 * w.z).cosh();
                let c = h1i2 / (a * a);
                Vec3::new(
                    c / ((ch1 - c2) * (ch1 + ch3)),
                    c / ((ch1 - c2) * (c2 + ch3)),
                    c / ((ch1 + ch3) * (c2 + ch3)),
                )
            }
            Family::Ellipsoidal => {
                let k = self.k();
                let kp = self.k_prime();
                let (s1, _, d1) = jacobi_sn_cn_dn(w.x, k)?;
                let ((_, c2, _), (_, c3, _)) = self.elliptic_pair(w)?;
                let q1 = (d1 / s1).powi(2);
                let q2 = kp * kp * c2 * c2;
                let q3 = k * k * c3 * c3;
                let c = h1i2 / (a * a);
                Vec3::new(
                    c / ((q1 - q2) * (q1 + q3)),
                    c / ((q1 - q2) * (q2 + q3)),
                    c / ((q1 + q3) * (q2 + q3)),
                )
            }
            Family::Conical => {
                let k = self.k();
                let kp = self.k_prime();
                let ((_, c2, _), (_, c3, _)) = self.elliptic_pair(w)?;
                let q2 = kp * kp * c2 * c2;
                let q3 = k * k * c3 * c3;
                let r23 = h1i2 * w.x * w.x / (q2 + q3);
                Vec3::new(h1i2 * w.x.powi(4), r23, r23)
            }
        })
    }

    /// The 3x3 Stäckel matrix of the family, row a depending on omega_a only.
    pub fn stackel_matrix(&self, w: OmegaPoint) -> Result<Mat3> {
        self.domain_check(w, DOMAIN_MARGIN)?;
        let a = self.a();
        Ok(match self.family {
            Family::Cartesian => Mat3::identity(),
            Family::Cylindrical => {
                Mat3::new((2.0 * w.x).exp(), -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
            }
            Family::ParabolicCylindrical => {
                Mat3::new(w.x * w.x, -1.0, 0.0, w.y * w.y, 1.0, 0.0, 0.0, 0.0, 1.0)
            }
            Family::EllipticCylindrical => Mat3::new(
                a * a * w.x.cosh().powi(2),
                1.0,
                0.0,
                -a * a * w.y.cos().powi(2),
                -1.0,
                0.0,
                0.0,
                0.0,
                1.0,
            ),
            Family::Spherical => Mat3::new(
                w.x.powi(-4),
                -w.x.powi(-2),
                0.0,
                0.0,
                w.y.cosh().powi(-2),
                -1.0,
                0.0,
                0.0,
                1.0,
            ),
            Family::ProlateSpheroidal => Mat3::new(
                a * a * w.x.sinh().powi(-4),
                -w.x.sinh().powi(-2),
                -1.0,
                a * a * w.y.cosh().powi(-4),
                w.y.cosh().powi(-2),
                -1.0,
                0.0,
                0.0,
                1.0,
            ),
            Family::OblateSpheroidal => Mat3::new(
                a * a * w.x.sin().powi(-4),
                -w.x.sin().powi(-2),
                1.0,
                -a * a * w.y.cosh().powi(-4),
                w.y.cosh().powi(-2),
                -1.0,
                0.0,
                0.0,
                1.0,
            ),
            Family::Parabolic => Mat3::new(
                (4.0 * w.x).exp(),
                -(2.0 * w.x).exp(),
                -1.0,
                (4.0 * w.y).exp(),
                (2.0 * w.y).exp(),
                -1.0,
                0.0,
                0.0,
                1.0,
            ),
            Family::Paraboloidal => {
                let ch1 = (2.0 * w.x).cosh();
                let c2 = (2.0 * w.y).cos();
                let ch3 = (2.0 * w.z).cosh();
                Mat3::new(
                    a * a * ch1 * ch1,
                    -a * ch1,
                    -1.0,
                    -a * a * c2 * c2,
                    a * c2,
                    1.0,
                    a * a * ch3 * ch3,
                    a * ch3,
                    -1.0,
                )
            }
            Family::Ellipsoidal => {
                let k = self.k();
                let kp = self.k_prime();
                let (s1, _, d1) = jacobi_sn_cn_dn(w.x, k)?;
                let ((_, c2, _), (_, c3, _)) = self.elliptic_pair(w)?;
                let q1 = (d1 / s1).powi(2);
                let q2 = kp * kp * c2 * c2;
                let q3 = k * k * c3 * c3;
                Mat3::new(
                    a * a * q1 * q1,
                    -q1,
                    1.0,
                    -a * a * q2 * q2,
                    q2,
                    -1.0,
                    a * a * q3 * q3,
                    q3,
                    1.0,
                )
            }
            Family::Conical => {
                let k = self.k();
                let kp = self.k_prime();
                let ((_, c2, _), (_, c3, _)) = self.elliptic_pair(w)?;
                let q2 = kp * kp * c2 * c2;
                let q3 = k * k * c3 * c3;
                Mat3::new(
                    w.x.powi(-4),
                    -w.x.powi(-2),
                    0.0,
                    0.0,
                    q2,
                    -1.0,
                    0.0,
                    q3,
                    1.0,
                )
            }
        })
    }

    /// The T-functions pairing the time equation with the separation
    /// constants; pattern fixed by the split class.
    pub fn t_functions(&self, l: Vec3) -> Result<Vec3> {
        if l.iter().any(|v| *v == 0.0) {
            return Err(Error::Domain("dilatation scales must be nonzero".into()));
        }
        Ok(match self.split_class() {
            SplitClass::FullySplit => {
                Vec3::new(1.0 / (l.x * l.x), 1.0 / (l.y * l.y), 1.0 / (l.z * l.z))
            }
            SplitClass::PartiallySplit => Vec3::new(1.0 / (l.x * l.x), 0.0, 1.0 / (l.z * l.z)),
            SplitClass::NonSplit => Vec3::new(1.0 / (l.x * l.x), 0.0, 0.0),
        })
    }

    /// Admissible scale triples for the split class, used by samplers.
    pub fn admissible_scales(&self, s1: f64, s3: f64) -> Vec3 {
        match self.split_class() {
            SplitClass::FullySplit => Vec3::new(s1, 0.5 * (s1 + s3), s3),
            SplitClass::PartiallySplit => Vec3::new(s1, s1, s3),
            SplitClass::NonSplit => Vec3::new(s1, s1, s1),
        }
    }
}

/// One representative descriptor per family, with fixed parameters, for
/// sweeps over all eleven families.
pub fn representative_systems() -> Vec<CoordSystemId> {
    vec![
        CoordSystemId::cartesian(),
        CoordSystemId::cylindrical(),
        CoordSystemId::parabolic_cylindrical(),
        CoordSystemId::elliptic_cylindrical(1.2).unwrap(),
        CoordSystemId::spherical(),
        CoordSystemId::prolate_spheroidal(0.9).unwrap(),
        CoordSystemId::oblate_spheroidal(1.1).unwrap(),
        CoordSystemId::parabolic(),
        CoordSystemId::paraboloidal(0.8).unwrap(),
        CoordSystemId::ellipsoidal(1.0, 0.6).unwrap(),
        CoordSystemId::conical(0.55).unwrap(),
    ]
}
