//! Electromagnetic quantities of the moving-frame construction: the
//! homogeneous magnetic field generated by the rotation, its linear vector
//! potential, the separable scalar potential, gauge transformations, and
//! finite-difference Maxwell residuals.
//!
//! The charge e is never stored alone; every quantity carries it
//! premultiplied (eH, eA, eA0). Natural units throughout.

use crate::coords::CoordSystemId;
use crate::frame::EulerFrame;
use crate::linalg::Vec3;
use crate::parallel::parallel_map;
use crate::timefn::TimeFunction;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The per-axis separation coefficient functions and the pure time term.
///
/// F10, F20, F30 are functions of omega_1, omega_2, omega_3 respectively;
/// F00 is a function of t. All four live in the same closed-form algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FCoefficients {
    pub f00: TimeFunction,
    pub f10: TimeFunction,
    pub f20: TimeFunction,
    pub f30: TimeFunction,
}

impl FCoefficients {
    pub fn zero() -> Self {
        FCoefficients {
            f00: TimeFunction::zero(),
            f10: TimeFunction::zero(),
            f20: TimeFunction::zero(),
            f30: TimeFunction::zero(),
        }
    }

    /// F_a0(omega_a) for a = 1, 2, 3.
    pub fn spatial(&self, axis: usize, w: f64) -> f64 {
        match axis {
            0 => self.f10.eval(w),
            1 => self.f20.eval(w),
            2 => self.f30.eval(w),
            _ => unreachable!("axis index out of range"),
        }
    }
}

/// Magnetic field (times charge) induced by the rotating frame: eH = -Omega.
pub fn magnetic_field(frame: &EulerFrame, t: f64) -> Vec3 {
    -frame.angular_velocity(t)
}

/// Linear vector potential eA = 1/2 eH x x.
pub fn vector_potential(eh: Vec3, x: Vec3) -> Vec3 {
    0.5 * eh.cross(&x)
}

/// e^2 A.A as the displayed sum of squares, 4 e^2 A.A = |eH x x|^2.
pub fn a_squared(eh: Vec3, x: Vec3) -> f64 {
    let c = eh.cross(&x);
    0.25 * c.dot(&c)
}

/// The inhomogeneous quadratic P entering the scalar potential:
/// sum_a ( l''_a/l_a x'_a^2 + 2 (l_a v''_a + 2 l'_a v'_a) x'_a + l_a^2 v'_a^2 ).
pub fn p_function(frame: &EulerFrame, t: f64, xp: Vec3) -> Result<f64> {
    let l = frame.scales(t);
    if l.iter().any(|v| *v == 0.0) {
        return Err(Error::Domain(format!("frame scale vanishes at t = {t}")));
    }
    let ld1 = frame.scales_d1(t);
    let ld2 = frame.scales_d2(t);
    let vd1 = frame.translation_d1(t);
    let vd2 = frame.translation_d2(t);
    let mut sum = 0.0;
    for a in 0..3 {
        sum += ld2[a] / l[a] * xp[a] * xp[a]
            + 2.0 * (l[a] * vd2[a] + 2.0 * ld1[a] * vd1[a]) * xp[a]
            + l[a] * l[a] * vd1[a] * vd1[a];
    }
    Ok(sum)
}

/// The real phase S = 1/4 sum_a ( l'_a/l_a x'_a^2 + 2 l_a v'_a x'_a ).
pub fn s_phase(frame: &EulerFrame, t: f64, xp: Vec3) -> Result<f64> {
    let l = frame.scales(t);
    if l.iter().any(|v| *v == 0.0) {
        return Err(Error::Domain(format!("frame scale vanishes at t = {t}")));
    }
    let ld1 = frame.scales_d1(t);
    let vd1 = frame.translation_d1(t);
    let mut sum = 0.0;
    for a in 0..3 {
        sum += ld1[a] / l[a] * xp[a] * xp[a] + 2.0 * l[a] * vd1[a] * xp[a];
    }
    Ok(0.25 * sum)
}

/// The separable scalar potential
/// eA0 = sum_a F_a0(omega_a) R_a^-2 - F00(t) - e^2 A.A - P/4,
/// evaluated at a laboratory point x by inverting the coordinate map.
pub fn scalar_potential(
    sys: &CoordSystemId,
    frame: &EulerFrame,
    coeffs: &FCoefficients,
    t: f64,
    x: Vec3,
) -> Result<f64> {
    scalar_potential_guided(sys, frame, coeffs, t, x, None)
}

/// As [`scalar_potential`], with an optional warm-start for the inversion.
pub fn scalar_potential_guided(
    sys: &CoordSystemId,
    frame: &EulerFrame,
    coeffs: &FCoefficients,
    t: f64,
    x: Vec3,
    guess: Option<Vec3>,
) -> Result<f64> {
    let w = frame.omega_of_x(t, x, guess)?;
    let l = frame.scales(t);
    let r = sys.eikonal(w, l)?;
    let mut sum = 0.0;
    for a in 0..3 {
        sum += coeffs.spatial(a, w[a]) * r[a];
    }
    let eh = magnetic_field(frame, t);
    let xp = frame.x_prime(t, x);
    Ok(sum - coeffs.f00.eval(t) - a_squared(eh, x) - 0.25 * p_function(frame, t, xp)?)
}

/// A gauge function f(t, x) = c0(t) + c1(t) x1 + c2(t) x2 + c3(t) x3 with
/// exact time derivative and gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceTimeFunction {
    pub c0: TimeFunction,
    pub c1: TimeFunction,
    pub c2: TimeFunction,
    pub c3: TimeFunction,
}

impl SpaceTimeFunction {
    pub fn time_only(c0: TimeFunction) -> Self {
        SpaceTimeFunction {
            c0,
            c1: TimeFunction::zero(),
            c2: TimeFunction::zero(),
            c3: TimeFunction::zero(),
        }
    }

    pub fn eval(&self, t: f64, x: Vec3) -> f64 {
        self.c0.eval(t) + self.c1.eval(t) * x.x + self.c2.eval(t) * x.y + self.c3.eval(t) * x.z
    }

    pub fn dt(&self, t: f64, x: Vec3) -> f64 {
        self.c0.d1(t) + self.c1.d1(t) * x.x + self.c2.d1(t) * x.y + self.c3.d1(t) * x.z
    }

    pub fn gradient(&self, t: f64) -> Vec3 {
        Vec3::new(self.c1.eval(t), self.c2.eval(t), self.c3.eval(t))
    }
}

/// A complete electromagnetic potential as evaluable fields.
///
/// The closures carry whatever scenario state they need; all evaluation is
/// side-effect-free, so a potential may be shared across worker threads.
pub struct ElectromagneticPotential {
    pub eh: Box<dyn Fn(f64) -> Vec3 + Send + Sync>,
    pub ea: Box<dyn Fn(f64, Vec3) -> Vec3 + Send + Sync>,
    pub ea0: Box<dyn Fn(f64, Vec3) -> Result<f64> + Send + Sync>,
}

impl ElectromagneticPotential {
    /// The free potential: no field at all.
    pub fn free() -> Self {
        ElectromagneticPotential {
            eh: Box::new(|_| Vec3::zeros()),
            ea: Box::new(|_, _| Vec3::zeros()),
            ea0: Box::new(|_, _| Ok(0.0)),
        }
    }

    /// The standard frame-induced potential: eH = -Omega, eA = 1/2 eH x x,
    /// eA0 per the separable form with the given coefficients.
    pub fn from_scenario(
        sys: CoordSystemId,
        frame: EulerFrame,
        coeffs: FCoefficients,
    ) -> Self {
        let frame_a = frame.clone();
        let frame_h = frame.clone();
        ElectromagneticPotential {
            eh: Box::new(move |t| magnetic_field(&frame_h, t)),
            ea: Box::new(move |t, x| vector_potential(magnetic_field(&frame_a, t), x)),
            ea0: Box::new(move |t, x| scalar_potential(&sys, &frame, &coeffs, t, x)),
        }
    }

    /// Verifies on samples that eA is linear in x with antisymmetric
    /// coefficient matrix equal to the hat map of eH.
    pub fn check_linear_antisymmetric(&self, t: f64, tol: f64) -> Result<()> {
        let eh = (self.eh)(t);
        let pts = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.7, -1.3, 0.4),
            Vec3::new(-0.2, 0.9, 2.1),
        ];
        for x in pts {
            let direct = (self.ea)(t, x);
            let expect = vector_potential(eh, x);
            if (direct - expect).norm() > tol * (1.0 + expect.norm()) {
                return Err(Error::NotSeparable(format!(
                    "vector potential is not 1/2 eH x x at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Gauge transformation eA' = eA + grad f, eA0' = eA0 - df/dt.
pub fn gauge_transform(
    pot: ElectromagneticPotential,
    fgauge: SpaceTimeFunction,
) -> ElectromagneticPotential {
    let f_a = fgauge.clone();
    let ElectromagneticPotential { eh, ea, ea0 } = pot;
    ElectromagneticPotential {
        eh,
        ea: Box::new(move |t, x| ea(t, x) + f_a.gradient(t)),
        ea0: Box::new(move |t, x| Ok(ea0(t, x)? - fgauge.dt(t, x))),
    }
}

/// A rectangular evaluation grid with spherical exclusion zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    /// Points per axis.
    pub n: usize,
    /// Excluded balls (center, radius) around potential singularities.
    #[serde(default)]
    pub exclusions: Vec<([f64; 3], f64)>,
}

impl GridSpec {
    pub fn cube(half_width: f64, n: usize) -> Self {
        GridSpec {
            lo: [-half_width; 3],
            hi: [half_width; 3],
            n,
            exclusions: Vec::new(),
        }
    }

    pub fn with_exclusion(mut self, center: [f64; 3], radius: f64) -> Self {
        self.exclusions.push((center, radius));
        self
    }

    fn excluded(&self, x: Vec3) -> bool {
        self.exclusions
            .iter()
            .any(|(c, r)| (x - Vec3::new(c[0], c[1], c[2])).norm() < *r)
    }

    /// All retained grid points.
    pub fn points(&self) -> Result<Vec<Vec3>> {
        if self.n < 2 {
            return Err(Error::Config("grid needs at least 2 points per axis".into()));
        }
        let mut pts = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let frac = |idx: usize, ax: usize| {
                        self.lo[ax] + (self.hi[ax] - self.lo[ax]) * idx as f64
                            / (self.n - 1) as f64
                    };
                    let x = Vec3::new(frac(i, 0), frac(j, 1), frac(k, 2));
                    if !self.excluded(x) {
                        pts.push(x);
                    }
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::Domain(
                "grid exclusions removed every evaluation point".into(),
            ));
        }
        Ok(pts)
    }
}

/// Step size for the Maxwell finite differences.
pub const MAXWELL_FD_STEP: f64 = 1e-2;

/// Fourth-order central first derivative.
fn d1_4<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

/// Fourth-order central second derivative.
fn d2_4<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    Ok(
        (-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)?
            - f(x - 2.0 * h)?)
            / (12.0 * h * h),
    )
}

fn offset(x: Vec3, axis: usize, d: f64) -> Vec3 {
    let mut y = x;
    y[axis] += d;
    y
}

/// Max-norm residuals of the vacuum Maxwell equations on the grid at time t:
///
/// r_a0:  Box eA0 - d/dt (d eA0/dt + div eA)    (the d/dt^2 terms cancel)
/// r_a:   Box eA  + grad (d eA0/dt + div eA)
/// r_gauge: the coupling scalar d eA0/dt + div eA itself
///
/// with Box = d^2/dt^2 - Laplacian, all derivatives fourth-order central.
pub fn maxwell_residual(
    pot: &ElectromagneticPotential,
    grid: &GridSpec,
    t: f64,
) -> Result<(f64, f64, f64)> {
    let h = MAXWELL_FD_STEP;
    let pts = grid.points()?;
    let div_ea = |t: f64, x: Vec3| -> Result<f64> {
        let mut s = 0.0;
        for axis in 0..3 {
            s += d1_4(|u| Ok((pot.ea)(t, offset(x, axis, u - x[axis]))[axis]), x[axis], h)?;
        }
        Ok(s)
    };
    let gauge = |t: f64, x: Vec3| -> Result<f64> {
        Ok(d1_4(|u| (pot.ea0)(u, x), t, h)? + div_ea(t, x)?)
    };
    let results = parallel_map(&pts, |&x| -> Result<(f64, f64, f64)> {
        // Scalar equation. The d^2 eA0/dt^2 of the d'Alembertian cancels
        // the one inside the time derivative of the coupling identically
        // (same stencil), leaving -Lap eA0 - d/dt div eA.
        let mut lap_a0 = 0.0;
        for axis in 0..3 {
            lap_a0 += d2_4(|u| (pot.ea0)(t, offset(x, axis, u - x[axis])), x[axis], h)?;
        }
        let dt_div = d1_4(|u| div_ea(u, x), t, h)?;
        let r0 = (-lap_a0 - dt_div).abs();

        // Vector equation, component-wise.
        let g = gauge(t, x)?;
        let mut r1 = 0.0f64;
        for comp in 0..3 {
            let dtt = d2_4(|u| Ok((pot.ea)(u, x)[comp]), t, h)?;
            let mut lap = 0.0;
            for axis in 0..3 {
                lap += d2_4(
                    |u| Ok((pot.ea)(t, offset(x, axis, u - x[axis]))[comp]),
                    x[axis],
                    h,
                )?;
            }
            let grad_g = d1_4(|u| gauge(t, offset(x, comp, u - x[comp])), x[comp], h)?;
            r1 = r1.max((dtt - lap + grad_g).abs());
        }
        Ok((r0, r1, g.abs()))
    });
    let mut out = (0.0f64, 0.0f64, 0.0f64);
    for r in results {
        let (a, b, c) = r?;
        out = (out.0.max(a), out.1.max(b), out.2.max(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FrameSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spinning_frame(c: f64) -> EulerFrame {
        EulerFrame::new(
            CoordSystemId::cartesian(),
            FrameSpec::rotation_about_z(TimeFunction::linear(0.0, -c)),
            -2.0,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn field_is_minus_angular_velocity() {
        let spec = FrameSpec {
            alpha: TimeFunction::sinusoid(0.4, 1.2, 0.0, 0.0),
            beta: TimeFunction::linear(0.1, 0.6),
            gamma: TimeFunction::sinusoid(0.8, 0.5, 1.0, 0.2),
            ..FrameSpec::identity()
        };
        let f = EulerFrame::new(CoordSystemId::cartesian(), spec, -1.0, 1.0).unwrap();
        for &t in &[-0.9, 0.0, 0.4, 0.95] {
            let eh = magnetic_field(&f, t);
            assert!((eh + f.angular_velocity(t)).norm() < 1e-12);
        }
        // Uniform rotation alpha = -ct carries eH = (0, 0, c).
        let eh = magnetic_field(&spinning_frame(2.3), 0.7);
        assert!((eh - Vec3::new(0.0, 0.0, 2.3)).norm() < 1e-13);
    }

    #[test]
    fn vector_potential_examples() {
        let ea = vector_potential(Vec3::new(0.0, 0.0, 3.0), Vec3::new(1.0, 0.0, 0.0));
        assert!((ea - Vec3::new(0.0, 1.5, 0.0)).norm() < 1e-15);
        // Parallel field and position.
        let ea = vector_potential(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 5.0));
        assert!(ea.norm() == 0.0);
    }

    #[test]
    fn vector_potential_curl_and_divergence() {
        let eh = Vec3::new(0.4, -1.1, 0.8);
        let h = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let x = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let d = |axis: usize, comp: usize| {
                (vector_potential(eh, offset(x, axis, h))[comp]
                    - vector_potential(eh, offset(x, axis, -h))[comp])
                    / (2.0 * h)
            };
            let curl = Vec3::new(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
            assert!((curl - eh).norm() < 1e-8);
            let div = d(0, 0) + d(1, 1) + d(2, 2);
            assert!(div.abs() < 1e-8);
        }
    }

    #[test]
    fn a_squared_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let eh = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let x = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let direct = a_squared(eh, x);
            let via_a = vector_potential(eh, x).norm_squared();
            assert!((direct - via_a).abs() < 1e-13 * (1.0 + direct.abs()));
        }
        assert!((a_squared(Vec3::new(0.0, 0.0, 2.0), Vec3::new(1.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(a_squared(Vec3::new(1.0, 2.0, 3.0), Vec3::zeros()), 0.0);
    }

    #[test]
    fn p_and_s_examples() {
        // Static frame: both vanish.
        let f = EulerFrame::new(CoordSystemId::cartesian(), FrameSpec::identity(), 0.0, 1.0)
            .unwrap();
        assert_eq!(p_function(&f, 0.5, Vec3::new(1.0, 2.0, 3.0)).unwrap(), 0.0);
        assert_eq!(s_phase(&f, 0.5, Vec3::new(1.0, 2.0, 3.0)).unwrap(), 0.0);

        // v1 = t with unit scales: P = l^2 v'^2 = 1.
        let drift = EulerFrame::new(
            CoordSystemId::cartesian(),
            FrameSpec { v1: TimeFunction::linear(0.0, 1.0), ..FrameSpec::identity() },
            0.0,
            1.0,
        )
        .unwrap();
        assert!((p_function(&drift, 0.3, Vec3::new(1.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);

        // l1 = e^t: S = 1/4 (l'/l) x'^2 = 1/4 * 4 = 1.
        let grow = EulerFrame::new(
            CoordSystemId::cartesian(),
            FrameSpec {
                l1: TimeFunction::exp(1.0, 1.0),
                ..FrameSpec::identity()
            },
            0.0,
            1.0,
        )
        .unwrap();
        assert!((s_phase(&grow, 0.8, Vec3::new(2.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn p_matches_term_expansion() {
        let spec = FrameSpec {
            l1: TimeFunction::sinusoid(0.2, 1.1, 0.0, 1.4),
            l2: TimeFunction::sinusoid(0.2, 1.1, 0.0, 1.4),
            l3: TimeFunction::sinusoid(0.2, 1.1, 0.0, 1.4),
            v1: TimeFunction::polynomial(vec![0.1, 0.7, -0.3]).unwrap(),
            v2: TimeFunction::linear(0.0, 0.4),
            v3: TimeFunction::zero(),
            ..FrameSpec::identity()
        };
        let f = EulerFrame::new(CoordSystemId::spherical(), spec.clone(), -1.0, 1.0).unwrap();
        let t = 0.45;
        let xp = Vec3::new(0.8, -0.6, 1.2);
        // Independent term-by-term accumulation from the raw TimeFunctions.
        let fns = [
            (&spec.l1, &spec.v1),
            (&spec.l2, &spec.v2),
            (&spec.l3, &spec.v3),
        ];
        let mut expect = 0.0;
        for (a, (l, v)) in fns.iter().enumerate() {
            expect += l.d2(t) / l.eval(t) * xp[a] * xp[a]
                + 2.0 * (l.eval(t) * v.d2(t) + 2.0 * l.d1(t) * v.d1(t)) * xp[a]
                + l.eval(t).powi(2) * v.d1(t).powi(2);
        }
        assert!((p_function(&f, t, xp).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn scalar_potential_trivial_and_f00_shift() {
        let f = EulerFrame::new(CoordSystemId::cartesian(), FrameSpec::identity(), 0.0, 1.0)
            .unwrap();
        let sys = CoordSystemId::cartesian();
        let x = Vec3::new(0.3, -0.4, 0.9);
        let zero = scalar_potential(&sys, &f, &FCoefficients::zero(), 0.2, x).unwrap();
        assert_eq!(zero, 0.0);

        let shifted = FCoefficients {
            f00: TimeFunction::constant(2.5),
            ..FCoefficients::zero()
        };
        let v = scalar_potential(&sys, &f, &shifted, 0.2, x).unwrap();
        assert!((v - (zero - 2.5)).abs() < 1e-15);
    }

    #[test]
    fn gauge_transform_examples() {
        // Pure time gauge f = c t: eA unchanged, eA0 shifted by -c.
        let pot = ElectromagneticPotential::free();
        let gauged = gauge_transform(
            pot,
            SpaceTimeFunction::time_only(TimeFunction::linear(0.0, 1.7)),
        );
        let x = Vec3::new(0.4, 0.1, -0.8);
        assert_eq!((gauged.ea)(0.3, x), Vec3::zeros());
        assert!(((gauged.ea0)(0.3, x).unwrap() + 1.7).abs() < 1e-15);

        // Spatially linear gauge leaves the FD curl of eA unchanged.
        let frame = spinning_frame(1.0);
        let base = ElectromagneticPotential::from_scenario(
            CoordSystemId::cartesian(),
            frame,
            FCoefficients::zero(),
        );
        let curl_of = |pot: &ElectromagneticPotential, t: f64, x: Vec3| {
            let h = 1e-3;
            let d = |axis: usize, comp: usize| {
                ((pot.ea)(t, offset(x, axis, h))[comp] - (pot.ea)(t, offset(x, axis, -h))[comp])
                    / (2.0 * h)
            };
            Vec3::new(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0))
        };
        let before = curl_of(&base, 0.4, x);
        let gauged = gauge_transform(
            base,
            SpaceTimeFunction {
                c0: TimeFunction::zero(),
                c1: TimeFunction::sinusoid(0.5, 1.0, 0.0, 0.0),
                c2: TimeFunction::constant(0.3),
                c3: TimeFunction::zero(),
            },
        );
        let after = curl_of(&gauged, 0.4, x);
        assert!((before - after).norm() < 1e-8);
    }

    #[test]
    fn linear_antisymmetric_check() {
        let frame = spinning_frame(0.9);
        let pot = ElectromagneticPotential::from_scenario(
            CoordSystemId::cartesian(),
            frame,
            FCoefficients::zero(),
        );
        pot.check_linear_antisymmetric(0.6, 1e-12).unwrap();
        // A potential with a quadratic eA must be rejected.
        let bad = ElectromagneticPotential {
            eh: Box::new(|_| Vec3::new(0.0, 0.0, 1.0)),
            ea: Box::new(|_, x| Vec3::new(x.x * x.x, 0.0, 0.0)),
            ea0: Box::new(|_, _| Ok(0.0)),
        };
        assert!(bad.check_linear_antisymmetric(0.0, 1e-12).is_err());
    }

    #[test]
    fn maxwell_trivial_potential() {
        let pot = ElectromagneticPotential {
            eh: Box::new(|_| Vec3::zeros()),
            ea: Box::new(|_, _| Vec3::zeros()),
            ea0: Box::new(|_, _| Ok(3.2)),
        };
        let grid = GridSpec::cube(1.0, 4);
        let (r0, r1, rg) = maxwell_residual(&pot, &grid, 0.0).unwrap();
        // Rounding only: the stencil weights cancel a constant exactly up to
        // floating-point cancellation over 1/h^2.
        assert!(r0 < 1e-10 && r1 < 1e-10 && rg < 1e-10, "({r0}, {r1}, {rg})");
    }

    #[test]
    fn maxwell_coulomb_with_rotation() {
        // eA = 1/2 (0,0,c) x x, eA0 = q/|x| - c^2/12 (x1^2 + x2^2 - 2 x3^2)
        // satisfies the vacuum equations.
        let c = 1.3;
        let q = 0.7;
        let pot = ElectromagneticPotential {
            eh: Box::new(move |_| Vec3::new(0.0, 0.0, c)),
            ea: Box::new(move |_, x| vector_potential(Vec3::new(0.0, 0.0, c), x)),
            ea0: Box::new(move |_, x| {
                let r = x.norm();
                Ok(q / r - c * c / 12.0 * (x.x * x.x + x.y * x.y - 2.0 * x.z * x.z))
            }),
        };
        let grid = GridSpec::cube(1.0, 5).with_exclusion([0.0; 3], 0.5);
        let (r0, r1, rg) = maxwell_residual(&pot, &grid, 0.0).unwrap();
        assert!(r0 < 1e-4, "r0 = {r0}");
        assert!(r1 < 1e-4, "r1 = {r1}");
        assert!(rg < 1e-4, "rg = {rg}");
    }

    #[test]
    fn grid_exclusion_exhaustion() {
        let grid = GridSpec::cube(1.0, 3).with_exclusion([0.0; 3], 10.0);
        assert!(grid.points().is_err());
    }
}
