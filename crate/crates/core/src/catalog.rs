//! The catalog of Maxwell-compatible separable potentials: one
//! non-stationary case and seven stationary ones, with their frame ODEs and
//! printed closed forms, plus the worked spherical example with the
//! rotating-frame Coulomb potential.
//!
//! The stationary case S7 is anomalous as printed (a log term that is
//! neither dimensionally homogeneous nor axially symmetric, and a coordinate
//! map reusing omega_1 in both the radius and the angle). It is evaluable in
//! both the verbatim and an amended reading, but excluded from the Maxwell
//! verification; neither reading is promoted to canonical.

use crate::coords::CoordSystemId;
use crate::fields::{vector_potential, ElectromagneticPotential, FCoefficients, GridSpec};
use crate::frame::{EulerFrame, FrameSpec};
use crate::linalg::{Spinor2, Vec3};
use crate::separation::Scenario;
use crate::timefn::TimeFunction;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Distance below which a grid point is considered on a singular locus.
pub const SINGULAR_EPS: f64 = 1e-9;
/// Default exclusion radius around point singularities for Maxwell grids.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.5;

/// Which reading of the anomalous case S7 to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum S7Form {
    /// Exactly as printed: a ln(x1 + x2), map angle omega_1 - k t.
    Verbatim,
    /// The symmetric reading: a ln(x1^2 + x2^2), map angle omega_2 - k t.
    /// Non-canonical; offered for exploration only.
    Amended,
}

/// A catalog entry with its named parameters.
///
/// `NonStationary` has eH = (0, 0, a t + b); the stationary cases S1-S7 all
/// have eH = (0, 0, k) with k != 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogCase {
    /// eA0 = -(k/2)(x1^2 + x2^2 - 2 x3^2) + a1 x1 + a2 x2 + a3 x3.
    NonStationary { a: f64, b: f64, k: f64, a1: f64, a2: f64, a3: f64 },
    /// eA0 = -(k^2/12)(x1^2 + x2^2 - 2 x3^2) + a1 x1 + a2 x2 + a3 x3.
    S1 { k: f64, a1: f64, a2: f64, a3: f64 },
    /// eA0 = a/|x| - (k^2/12)(x1^2 + x2^2 - 2 x3^2), a != 0.
    S2 { k: f64, a: f64 },
    /// Quadratic term plus a1/r + a2 x3/r^3 + (a3/r^2)((x3/2r) ln((r+x3)/(r-x3)) - 1).
    S3 { k: f64, a1: f64, a2: f64, a3: f64 },
    /// Two Coulomb centers at x3 = -/+ a plus arctanh terms (two-center
    /// Kepler problem for k = a3 = 0).
    S4 { k: f64, a: f64, a1: f64, a2: f64, a3: f64 },
    /// Oblate analogue of S4 via the auxiliary functions f, f1.
    S5 { k: f64, a: f64, a1: f64, a2: f64, a3: f64 },
    /// eA0 = -(k^2/6)(x1^2 + x2^2 - 2 x3^2) + a1/r + a2 x3 + (a3/r) ln((r+x3)/(r-x3)).
    S6 { k: f64, a1: f64, a2: f64, a3: f64 },
    /// The anomalous case; `form` selects the verbatim or amended reading.
    S7 { k: f64, q: f64, a: f64, a3: f64, form: S7Form },
}

impl CatalogCase {
    /// Validates the case invariants: k != 0 for the stationary cases and
    /// a > 0 where it is a geometric half-distance.
    pub fn validate(&self) -> Result<()> {
        use CatalogCase::*;
        let stationary_k = match self {
            NonStationary { .. } => None,
            S1 { k, .. } | S2 { k, .. } | S3 { k, .. } | S4 { k, .. } | S5 { k, .. }
            | S6 { k, .. } | S7 { k, .. } => Some(*k),
        };
        if let Some(k) = stationary_k {
            if k == 0.0 {
                return Err(Error::Config(
                    "stationary catalog cases require k != 0".into(),
                ));
            }
        }
        match self {
            S2 { a, .. } if *a == 0.0 => {
                return Err(Error::Config("case S2 requires a != 0".into()));
            }
            S4 { a, .. } | S5 { a, .. } if *a <= 0.0 => {
                return Err(Error::Config(
                    "cases S4/S5 require the half-distance a > 0".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// The magnetic field of the case at time t.
    pub fn magnetic_field(&self, t: f64) -> Vec3 {
        use CatalogCase::*;
        match self {
            NonStationary { a, b, .. } => Vec3::new(0.0, 0.0, a * t + b),
            S1 { k, .. } | S2 { k, .. } | S3 { k, .. } | S4 { k, .. } | S5 { k, .. }
            | S6 { k, .. } | S7 { k, .. } => Vec3::new(0.0, 0.0, *k),
        }
    }

    /// The complete potential pair of the case as evaluable fields: eA from
    /// the (possibly time-dependent) homogeneous magnetic field and eA0 from
    /// the printed closed form.
    pub fn potential(&self) -> Result<ElectromagneticPotential> {
        self.validate()?;
        let case = *self;
        Ok(ElectromagneticPotential {
            eh: Box::new(move |t| case.magnetic_field(t)),
            ea: Box::new(move |t, x| vector_potential(case.magnetic_field(t), x)),
            ea0: Box::new(move |_, x| catalog_a0(&case, x)),
        })
    }

    /// A verification grid staying clear of the case's singular loci: point
    /// singularities are excluded as balls of the default radius, and cases
    /// with on-axis log/arctanh terms use an off-axis box.
    pub fn default_grid(&self) -> GridSpec {
        use CatalogCase::*;
        let axis_clear = GridSpec {
            lo: [0.6, 0.55, -1.2],
            hi: [2.0, 1.95, 1.2],
            n: 5,
            exclusions: Vec::new(),
        };
        match self {
            NonStationary { .. } | S1 { .. } => GridSpec::cube(1.5, 5),
            S2 { .. } => GridSpec::cube(1.5, 5)
                .with_exclusion([0.0; 3], DEFAULT_EXCLUSION_RADIUS),
            S3 { .. } | S6 { .. } => axis_clear,
            S4 { a, .. } => axis_clear
                .with_exclusion([0.0, 0.0, -a], DEFAULT_EXCLUSION_RADIUS)
                .with_exclusion([0.0, 0.0, *a], DEFAULT_EXCLUSION_RADIUS),
            // Keep x3 > 0 so the grid stays away from the focal ring
            // r = a, x3 = 0 and the disk f1 = 0.
            S5 { .. } => GridSpec {
                lo: [0.6, 0.55, 0.5],
                hi: [2.0, 1.95, 1.9],
                n: 5,
                exclusions: Vec::new(),
            },
            S7 { .. } => axis_clear,
        }
    }
}

/// Evaluates the printed closed form of the case's scalar potential.
pub fn catalog_a0(case: &CatalogCase, x: Vec3) -> Result<f64> {
    case.validate()?;
    let rho2 = x.x * x.x + x.y * x.y;
    let quad = rho2 - 2.0 * x.z * x.z;
    let r = (rho2 + x.z * x.z).sqrt();
    use CatalogCase::*;
    match *case {
        NonStationary { k, a1, a2, a3, .. } => {
            Ok(-0.5 * k * quad + a1 * x.x + a2 * x.y + a3 * x.z)
        }
        S1 { k, a1, a2, a3 } => {
            Ok(-k * k / 12.0 * quad + a1 * x.x + a2 * x.y + a3 * x.z)
        }
        S2 { k, a } => {
            if r < SINGULAR_EPS {
                return Err(Error::Domain("S2 potential is singular at the origin".into()));
            }
            Ok(a / r - k * k / 12.0 * quad)
        }
        S3 { k, a1, a2, a3 } => {
            if r < SINGULAR_EPS {
                return Err(Error::Domain("S3 potential is singular at the origin".into()));
            }
            if (a2 != 0.0 || a3 != 0.0) && rho2 < SINGULAR_EPS * SINGULAR_EPS {
                return Err(Error::Domain(
                    "S3 log term is singular on the x3 axis".into(),
                ));
            }
            let log_term = ((r + x.z) / (r - x.z)).ln();
            Ok(-k * k / 12.0 * quad
                + a1 / r
                + a2 * x.z / (r * r * r)
                + a3 / (r * r) * (x.z / (2.0 * r) * log_term - 1.0))
        }
        S4 { k, a, a1, a2, a3 } => {
            let zp = x.z + a;
            let zm = x.z - a;
            let rp = (rho2 + zp * zp).sqrt();
            let rm = (rho2 + zm * zm).sqrt();
            if rp < SINGULAR_EPS || rm < SINGULAR_EPS {
                return Err(Error::Domain(
                    "S4 potential is singular at a Coulomb center".into(),
                ));
            }
            if a3 != 0.0 && rho2 < SINGULAR_EPS * SINGULAR_EPS {
                return Err(Error::Domain(
                    "S4 arctanh terms are singular on the x3 axis".into(),
                ));
            }
            let arc = |z: f64, rr: f64| (z / rr).atanh();
            Ok(-k * k / 12.0 * quad
                + a1 / rp
                + a2 / rm
                + a3 * (arc(zp, rp) / rp - arc(zm, rm) / rm))
        }
        S5 { k, a, a1, a2, a3 } => {
            let f = ((a * a - r * r).powi(2) + 4.0 * a * a * x.z * x.z).sqrt();
            if f < SINGULAR_EPS {
                return Err(Error::Domain(
                    "S5 potential is singular on the focal ring".into(),
                ));
            }
            let f1 = ((-a * a + r * r + f) / (2.0 * a * a)).max(0.0).sqrt();
            if (a2 != 0.0 || a3 != 0.0) && f1 < SINGULAR_EPS {
                return Err(Error::Domain(
                    "S5 potential is singular on the focal disk".into(),
                ));
            }
            let arg = x.z / (a * f1);
            if a3 != 0.0 && arg.abs() >= 1.0 {
                return Err(Error::Domain(
                    "S5 arctanh argument reaches 1 (on the x3 axis)".into(),
                ));
            }
            let arccot = std::f64::consts::FRAC_PI_2 - f1.atan();
            Ok(-k * k / 12.0 * quad + 2.0 * a1 * a * f1 / f + 2.0 * a2 * x.z / (f * f1)
                - 2.0 * a3 * (a * f1 / f * arccot - x.z / (f * f1) * arg.atanh()))
        }
        S6 { k, a1, a2, a3 } => {
            if r < SINGULAR_EPS {
                return Err(Error::Domain("S6 potential is singular at the origin".into()));
            }
            if a3 != 0.0 && rho2 < SINGULAR_EPS * SINGULAR_EPS {
                return Err(Error::Domain(
                    "S6 log term is singular on the x3 axis".into(),
                ));
            }
            let log_term = ((r + x.z) / (r - x.z)).ln();
            Ok(-k * k / 6.0 * quad + a1 / r + a2 * x.z + a3 / r * log_term)
        }
        S7 { q, a, a3, form, .. } => {
            let log_arg = match form {
                S7Form::Verbatim => x.x + x.y,
                S7Form::Amended => rho2,
            };
            if a != 0.0 && log_arg <= SINGULAR_EPS {
                return Err(Error::Domain(
                    "S7 log argument is nonpositive at this point".into(),
                ));
            }
            Ok(-0.5 * q * quad + a * log_arg.ln() + a3 * x.z)
        }
    }
}

/// The equivalent complex-center form of the S5 potential (two conjugate
/// Coulomb centers at x3 = -/+ i a); real on the real domain, implemented as
/// a cross-check against the printed real form.
pub fn s5_complex_center_a0(case: &CatalogCase, x: Vec3) -> Result<f64> {
    let CatalogCase::S5 { k, a, a1, a2, a3 } = *case else {
        return Err(Error::Config("s5_complex_center_a0 requires case S5".into()));
    };
    case.validate()?;
    let rho2 = x.x * x.x + x.y * x.y;
    let quad = rho2 - 2.0 * x.z * x.z;
    let zp = C64::new(x.z, a);
    let zm = C64::new(x.z, -a);
    let rp = (C64::new(rho2, 0.0) + zp * zp).sqrt();
    let rm = (C64::new(rho2, 0.0) + zm * zm).sqrt();
    if rp.norm() < SINGULAR_EPS || rm.norm() < SINGULAR_EPS {
        return Err(Error::Domain("S5 complex-center form is singular here".into()));
    }
    // arctanh(w) = 1/2 ln((1+w)/(1-w)).
    let atanh = |w: C64| ((C64::new(1.0, 0.0) + w) / (C64::new(1.0, 0.0) - w)).ln() * 0.5;
    let i = C64::new(0.0, 1.0);
    let total = (C64::new(a1, a2)) / rp + (C64::new(a1, -a2)) / rm
        + i * a3 * (atanh(zp / rp) / rp - atanh(zm / rm) / rm);
    if total.im.abs() > 1e-8 * (1.0 + total.re.abs()) {
        return Err(Error::Domain(format!(
            "S5 complex-center form has residual imaginary part {:.3e}",
            total.im
        )));
    }
    Ok(-k * k / 12.0 * quad + total.re)
}

/// FD Maxwell residuals of the case's potential pair on the grid.
pub fn catalog_maxwell_check(
    case: &CatalogCase,
    grid: &GridSpec,
    t: f64,
) -> Result<(f64, f64, f64)> {
    let pot = case.potential()?;
    crate::fields::maxwell_residual(&pot, grid, t)
}

// ---------------------------------------------------------------------------
// Non-stationary frame ODEs (shared with S7's l3/v3 subsystem).
// ---------------------------------------------------------------------------

/// Parameters of the non-stationary frame system: field eH = (0, 0, a t + b),
/// potential constant k, separation constants c, c3, c11, c12, c13, linear
/// potential coefficients a1, a2, a3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case1Params {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub c: f64,
    pub c3: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Tabulated solution of the five coupled frame ODEs.
#[derive(Debug, Clone)]
pub struct Case1Solution {
    pub t: Vec<f64>,
    pub l: Vec<f64>,
    pub l3: Vec<f64>,
    pub v: Vec<Vec3>,
    /// First derivatives (RK4 companion states), for re-substitution.
    pub l_dot: Vec<f64>,
    pub l3_dot: Vec<f64>,
    pub v_dot: Vec<Vec3>,
}

/// Second derivatives dictated by the displayed system:
///
///   2c/l^4 - l''/(2l) + k = (a t + b)^2 / 2
///   c3/l3^4 - l3''/(4 l3) = k
///   l v1'' + 2 l' v1' + 4c v1/l^3 - 2 c11/l = -2(a1 cos A + a2 sin A)
///   l v2'' + 2 l' v2' + 4c v2/l^3 - 2 c12/l = -2(-a1 sin A + a2 cos A)
///   l3 v3'' + 2 l3' v3' + 4 c3 v3/l3^3 - 2 c13/l3 = -2 a3
///
/// with the rotation angle A = -a t^2/2 - b t.
fn case1_accels(
    p: &Case1Params,
    t: f64,
    l: f64,
    l_dot: f64,
    l3: f64,
    l3_dot: f64,
    v: Vec3,
    v_dot: Vec3,
) -> (f64, f64, Vec3) {
    let field = p.a * t + p.b;
    let l_dd = 4.0 * p.c / (l * l * l) + 2.0 * p.k * l - field * field * l;
    let l3_dd = 4.0 * p.c3 / (l3 * l3 * l3) - 4.0 * p.k * l3;
    let alpha = -0.5 * p.a * t * t - p.b * t;
    let (sa, ca) = alpha.sin_cos();
    let rhs1 = -2.0 * (p.a1 * ca + p.a2 * sa);
    let rhs2 = -2.0 * (-p.a1 * sa + p.a2 * ca);
    let rhs3 = -2.0 * p.a3;
    let v_dd = Vec3::new(
        (rhs1 - 2.0 * l_dot * v_dot.x - 4.0 * p.c * v.x / (l * l * l) + 2.0 * p.c11 / l) / l,
        (rhs2 - 2.0 * l_dot * v_dot.y - 4.0 * p.c * v.y / (l * l * l) + 2.0 * p.c12 / l) / l,
        (rhs3 - 2.0 * l3_dot * v_dot.z - 4.0 * p.c3 * v.z / (l3 * l3 * l3) + 2.0 * p.c13 / l3)
            / l3,
    );
    (l_dd, l3_dd, v_dd)
}

/// RK4 integration of the non-stationary frame system from initial scales
/// l(t0), l3(t0) (slopes zero) and v(t0) = v'(t0) = 0, over n uniform steps.
/// Integration aborts if either scale crosses zero.
pub fn case1_frame_solve(
    p: &Case1Params,
    l0: f64,
    l30: f64,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<Case1Solution> {
    if l0 == 0.0 || l30 == 0.0 {
        return Err(Error::Config("initial scales must be nonzero".into()));
    }
    if !(t1 > t0) || n < 4 {
        return Err(Error::Config(format!(
            "need t0 < t1 and n >= 4, got [{t0}, {t1}], n = {n}"
        )));
    }
    let h = (t1 - t0) / n as f64;
    // State: (l, l', l3, l3', v, v').
    type State = (f64, f64, f64, f64, Vec3, Vec3);
    let deriv = |t: f64, s: &State| -> State {
        let (ldd, l3dd, vdd) = case1_accels(p, t, s.0, s.1, s.2, s.3, s.4, s.5);
        (s.1, ldd, s.3, l3dd, s.5, vdd)
    };
    let advance = |s: &State, d: &State, f: f64| -> State {
        (
            s.0 + d.0 * f,
            s.1 + d.1 * f,
            s.2 + d.2 * f,
            s.3 + d.3 * f,
            s.4 + d.4 * f,
            s.5 + d.5 * f,
        )
    };
    let mut out = Case1Solution {
        t: Vec::with_capacity(n + 1),
        l: Vec::with_capacity(n + 1),
        l3: Vec::with_capacity(n + 1),
        v: Vec::with_capacity(n + 1),
        l_dot: Vec::with_capacity(n + 1),
        l3_dot: Vec::with_capacity(n + 1),
        v_dot: Vec::with_capacity(n + 1),
    };
    let mut s: State = (l0, 0.0, l30, 0.0, Vec3::zeros(), Vec3::zeros());
    let push = |out: &mut Case1Solution, t: f64, s: &State| {
        out.t.push(t);
        out.l.push(s.0);
        out.l_dot.push(s.1);
        out.l3.push(s.2);
        out.l3_dot.push(s.3);
        out.v.push(s.4);
        out.v_dot.push(s.5);
    };
    push(&mut out, t0, &s);
    for i in 0..n {
        let t = t0 + h * i as f64;
        let k1 = deriv(t, &s);
        let k2 = deriv(t + 0.5 * h, &advance(&s, &k1, 0.5 * h));
        let k3 = deriv(t + 0.5 * h, &advance(&s, &k2, 0.5 * h));
        let k4 = deriv(t + h, &advance(&s, &k3, h));
        let sum = (
            k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0,
            k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1,
            k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2,
            k1.3 + 2.0 * k2.3 + 2.0 * k3.3 + k4.3,
            k1.4 + k2.4 * 2.0 + k3.4 * 2.0 + k4.4,
            k1.5 + k2.5 * 2.0 + k3.5 * 2.0 + k4.5,
        );
        s = advance(&s, &sum, h / 6.0);
        let t_next = t + h;
        if s.0 * l0 <= 0.0 || s.2 * l30 <= 0.0 {
            return Err(Error::Integration(format!(
                "frame scale crossed zero near t = {t_next}; the coordinate \
                 change degenerates there"
            )));
        }
        push(&mut out, t_next, &s);
    }
    Ok(out)
}

impl Case1Solution {
    /// Worst re-substitution residual of the five ODEs over interior nodes,
    /// using 4th-order FD second derivatives of the tabulated values.
    pub fn resubstitution_residual(&self, p: &Case1Params) -> f64 {
        let n = self.t.len();
        let h = self.t[1] - self.t[0];
        let d2 = |y: &dyn Fn(usize) -> f64, i: usize| {
            (-y(i + 2) + 16.0 * y(i + 1) - 30.0 * y(i) + 16.0 * y(i - 1) - y(i - 2))
                / (12.0 * h * h)
        };
        let mut worst = 0.0f64;
        for i in 2..n - 2 {
            let t = self.t[i];
            let (l, l3, v) = (self.l[i], self.l3[i], self.v[i]);
            let (l_dot, l3_dot, v_dot) = (self.l_dot[i], self.l3_dot[i], self.v_dot[i]);
            let l_dd = d2(&|j| self.l[j], i);
            let l3_dd = d2(&|j| self.l3[j], i);
            let field = p.a * t + p.b;
            worst = worst
                .max((2.0 * p.c / l.powi(4) - 0.5 * l_dd / l + p.k - 0.5 * field * field).abs());
            worst = worst.max((p.c3 / l3.powi(4) - 0.25 * l3_dd / l3 - p.k).abs());
            let alpha = -0.5 * p.a * t * t - p.b * t;
            let (sa, ca) = alpha.sin_cos();
            let v_dd = Vec3::new(
                d2(&|j| self.v[j].x, i),
                d2(&|j| self.v[j].y, i),
                d2(&|j| self.v[j].z, i),
            );
            worst = worst.max(
                (l * v_dd.x + 2.0 * l_dot * v_dot.x + 4.0 * p.c * v.x / l.powi(3)
                    - 2.0 * p.c11 / l
                    + 2.0 * (p.a1 * ca + p.a2 * sa))
                    .abs(),
            );
            worst = worst.max(
                (l * v_dd.y + 2.0 * l_dot * v_dot.y + 4.0 * p.c * v.y / l.powi(3)
                    - 2.0 * p.c12 / l
                    + 2.0 * (-p.a1 * sa + p.a2 * ca))
                    .abs(),
            );
            worst = worst.max(
                (l3 * v_dd.z + 2.0 * l3_dot * v_dot.z + 4.0 * p.c3 * v.z / l3.powi(3)
                    - 2.0 * p.c13 / l3
                    + 2.0 * p.a3)
                    .abs(),
            );
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Stationary case S1: the printed closed forms for l(t).
// ---------------------------------------------------------------------------

/// The three printed branches of the S1 scale equation
/// k^2 + (3/2) l''/l = c/l^4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case2Variant {
    /// c = -1: l^2 = sqrt(C1^2 + 1/k^2) sin(2 sqrt(2/3) k t) + C1.
    Plus,
    /// c = +1: l^2 = sqrt(C1^2 - 1/k^2) sin(2 sqrt(2/3) k t) + C1.
    Minus,
    /// c = 0: l = C1 sin(sqrt(2/3) k t).
    Sine,
}

impl Case2Variant {
    /// The constant c of the scale equation for this branch.
    pub fn c(self) -> f64 {
        match self {
            Case2Variant::Plus => -1.0,
            Case2Variant::Minus => 1.0,
            Case2Variant::Sine => 0.0,
        }
    }
}

fn case2_l_squared(c1: f64, k: f64, variant: Case2Variant, t: f64) -> Result<(f64, f64, f64)> {
    if k == 0.0 {
        return Err(Error::Config("the S1 closed forms require k != 0".into()));
    }
    let mu = 2.0 * (2.0f64 / 3.0).sqrt() * k;
    let radicand = match variant {
        Case2Variant::Plus => c1 * c1 + 1.0 / (k * k),
        Case2Variant::Minus => c1 * c1 - 1.0 / (k * k),
        Case2Variant::Sine => unreachable!("sine branch handled separately"),
    };
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "radicand C1^2 - 1/k^2 = {radicand} is negative"
        )));
    }
    let amp = radicand.sqrt();
    let s = amp * (mu * t).sin() + c1;
    let s_dot = amp * mu * (mu * t).cos();
    let s_ddot = -mu * mu * (s - c1);
    Ok((s, s_dot, s_ddot))
}

/// Evaluates the printed closed form for l(t) on the chosen branch.
pub fn case2_l_closed_form(c1: f64, k: f64, variant: Case2Variant, t: f64) -> Result<f64> {
    if let Case2Variant::Sine = variant {
        if k == 0.0 {
            return Err(Error::Config("the S1 closed forms require k != 0".into()));
        }
        let l = c1 * ((2.0f64 / 3.0).sqrt() * k * t).sin();
        if l <= 0.0 {
            return Err(Error::Domain(format!("l = {l} <= 0 at t = {t}")));
        }
        return Ok(l);
    }
    let (s, _, _) = case2_l_squared(c1, k, variant, t)?;
    if s <= 0.0 {
        return Err(Error::Domain(format!("l^2 = {s} <= 0 at t = {t}")));
    }
    Ok(s.sqrt())
}

/// Residual of k^2 + (3/2) l''/l - c/l^4 using exact derivatives of the
/// closed form; independently validates the printed solution.
pub fn case2_ode_residual(c1: f64, k: f64, variant: Case2Variant, t: f64) -> Result<f64> {
    let c = variant.c();
    if let Case2Variant::Sine = variant {
        let nu = (2.0f64 / 3.0).sqrt() * k;
        let l = case2_l_closed_form(c1, k, variant, t)?;
        let l_dd = -nu * nu * l;
        return Ok((k * k + 1.5 * l_dd / l - c / l.powi(4)).abs());
    }
    let (s, s_dot, s_ddot) = case2_l_squared(c1, k, variant, t)?;
    if s <= 0.0 {
        return Err(Error::Domain(format!("l^2 = {s} <= 0 at t = {t}")));
    }
    let l = s.sqrt();
    let l_dot = s_dot / (2.0 * l);
    let l_dd = s_ddot / (2.0 * l) - l_dot * l_dot / l;
    Ok((k * k + 1.5 * l_dd / l - c / (s * s)).abs())
}

// ---------------------------------------------------------------------------
// The worked spherical example.
// ---------------------------------------------------------------------------

/// The scalar potential of the worked example:
/// eA0 = q/|x| - (c^2/12)(x1^2 + x2^2 - 2 x3^2).
pub fn proposition_a0(q: f64, c: f64, x: Vec3) -> Result<f64> {
    let r = x.norm();
    if r < SINGULAR_EPS {
        return Err(Error::Domain("Coulomb term is singular at the origin".into()));
    }
    Ok(q / r - c * c / 12.0 * (x.x * x.x + x.y * x.y - 2.0 * x.z * x.z))
}

/// The potential pair of the worked example: eH = (0, 0, c), eA = 1/2 eH x x.
pub fn proposition_potential(q: f64, c: f64) -> ElectromagneticPotential {
    let eh = Vec3::new(0.0, 0.0, c);
    ElectromagneticPotential {
        eh: Box::new(move |_| eh),
        ea: Box::new(move |_, x| vector_potential(eh, x)),
        ea0: Box::new(move |_, x| proposition_a0(q, c, x)),
    }
}

/// Builds the complete spherical scenario realizing the worked example:
/// frame rotating about the third axis with alpha = -c t (so eH = (0, 0, c)),
/// unit scales, no translation, and the F-coefficients
///
///   F10 = q w^-3 + (c^2/6) w^-6 + k1 w^-4 - k2 w^-2,
///   F20 = k2 sech^2 w - k3,  F30 = k3,  F00 = k1.
pub fn proposition_example(
    q: f64,
    c: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    lambda: Vec3,
    chi: Spinor2,
) -> Result<Scenario> {
    if q == 0.0 || c == 0.0 {
        return Err(Error::Config(
            "the worked example requires q != 0 and c != 0".into(),
        ));
    }
    let sys = CoordSystemId::spherical();
    let frame = EulerFrame::new(
        sys,
        FrameSpec::rotation_about_z(TimeFunction::linear(0.0, -c)),
        -1.0,
        1.0,
    )?;
    let coeffs = FCoefficients {
        f00: TimeFunction::constant(k1),
        f10: TimeFunction::sum(vec![
            TimeFunction::power(q, -3),
            TimeFunction::power(c * c / 6.0, -6),
            TimeFunction::power(k1, -4),
            TimeFunction::power(-k2, -2),
        ]),
        f20: TimeFunction::sum(vec![
            TimeFunction::sech2(k2),
            TimeFunction::constant(-k3),
        ]),
        f30: TimeFunction::constant(k3),
    };
    Ok(Scenario::new(sys, frame, coeffs, lambda, chi, (-0.5, 0.5)))
}

/// The three coordinate systems admitted by the rotating Coulomb potential:
/// spherical, prolate spheroidal II, and conical.
pub fn proposition_coordinate_menu() -> Vec<CoordSystemId> {
    vec![
        CoordSystemId::spherical(),
        CoordSystemId::prolate_spheroidal_ii(0.9, crate::coords::ShiftSign::Plus).unwrap(),
        CoordSystemId::conical(0.55).unwrap(),
    ]
}

/// A pauli-residual-ready scenario for the catalog's S1 case in Cartesian
/// coordinates on the c = 0 branch: frame alpha = -k t, l = C1 sin(...),
/// v = 0 (a = 0), with F-coefficients zero.
pub fn s1_cartesian_scenario(
    k: f64,
    c1: f64,
    lambda: Vec3,
    chi: Spinor2,
    window: (f64, f64),
) -> Result<Scenario> {
    if k == 0.0 {
        return Err(Error::Config("S1 requires k != 0".into()));
    }
    let nu = (2.0f64 / 3.0).sqrt() * k;
    // l = C1 sin(nu t) as a product of closed forms.
    let l = TimeFunction::sinusoid(c1, nu, 0.0, 0.0);
    let sys = CoordSystemId::cartesian();
    let mut spec = FrameSpec::rotation_about_z(TimeFunction::linear(0.0, -k));
    spec.l1 = l.clone();
    spec.l2 = l.clone();
    spec.l3 = l;
    let frame = EulerFrame::new(sys, spec, window.0 - 0.2, window.1 + 0.2)?;
    Ok(Scenario::new(sys, frame, FCoefficients::zero(), lambda, chi, window))
}
