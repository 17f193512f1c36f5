//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Run with `--nocapture` to see the lines for passing
//! criteria as well.

use pauli_separator::catalog::{
    case1_frame_solve, case2_ode_residual, catalog_maxwell_check, proposition_example,
    proposition_potential, s5_complex_center_a0, catalog_a0, Case1Params, Case2Variant,
    CatalogCase, S7Form,
};
use pauli_separator::coords::{representative_systems, OmegaPoint};
use pauli_separator::fields::{
    magnetic_field, maxwell_residual, GridSpec, SpaceTimeFunction,
};
use pauli_separator::frame::{EulerFrame, FrameSpec};
use pauli_separator::linalg::{max_abs, Mat2C};
use pauli_separator::separation::{
    commutativity_check, free_particle_scenario, pauli_residual, rank_check,
    rotating_cylindrical_scenario, solve_scenario, Corruption, ReducedODECoefficients,
    Scenario,
};
use pauli_separator::specialfn::{complete_elliptic_k, jacobi_sn_cn_dn};
use pauli_separator::spinor::{solve_u, UPropagator};
use pauli_separator::timefn::TimeFunction;
use pauli_separator::{C64, Spinor2, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(number: u32, name: &str, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!("criterion {number:02} ({name}): PASS"),
        Err(msg) => {
            println!("criterion {number:02} ({name}): FAIL — {msg}");
            panic!("criterion {number:02} ({name}) failed: {msg}");
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn chi() -> Spinor2 {
    Spinor2::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8))
}

fn proposition_scenario() -> Scenario {
    proposition_example(0.9, 1.2, 0.4, -0.3, 0.2, Vec3::new(0.2, -0.4, 0.3), chi()).unwrap()
}

#[test]
fn criterion_01_coordinate_suite() {
    report(1, "coordinate suite", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for sys in representative_systems() {
            let (lo, hi) = sys.sample_box();
            for _ in 0..100 {
                let w = OmegaPoint::new(
                    rng.gen_range(lo[0]..hi[0]),
                    rng.gen_range(lo[1]..hi[1]),
                    rng.gen_range(lo[2]..hi[2]),
                );
                let name = sys.family().name();
                let j = sys.jacobian(w).map_err(|e| e.to_string())?;
                let jinv = j
                    .try_inverse()
                    .ok_or_else(|| format!("{name}: singular Jacobian at {w:?}"))?;
                // Orthogonality of the gradient rows.
                for b in 0..3 {
                    for c in (b + 1)..3 {
                        let gb = jinv.row(b);
                        let gc = jinv.row(c);
                        let rel = gb.dot(&gc).abs() / (gb.norm() * gc.norm());
                        ensure!(rel < 1e-6, "{name}: orthogonality defect {rel:.3e} at {w:?}");
                    }
                }
                // FD harmonicity of each omega component in z-space.
                // Fourth-order five-point second differences: the second-order
                // stencil's truncation error alone breaches 1e-4 where the
                // coordinate surfaces curve sharply (small radii).
                let z = sys.z_of_omega(w).map_err(|e| e.to_string())?;
                let h = 1e-3;
                let mut lap = -3.0 * 30.0 * w / (12.0 * h * h);
                for axis in 0..3 {
                    for (coef, sgn, mult) in [
                        (16.0, -1.0, 1.0),
                        (16.0, 1.0, 1.0),
                        (-1.0, -1.0, 2.0),
                        (-1.0, 1.0, 2.0),
                    ] {
                        let mut zp = z;
                        zp[axis] += sgn * mult * h;
                        let wp = sys.omega_of_z(zp, w).map_err(|e| e.to_string())?;
                        lap += coef * wp / (12.0 * h * h);
                    }
                }
                for a in 0..3 {
                    ensure!(
                        lap[a].abs() < 1e-4,
                        "{name}: |Lap omega_{a}| = {:.3e} at {w:?}",
                        lap[a].abs()
                    );
                }
                // Round-trip inversion from a perturbed guess.
                let guess = w
                    + OmegaPoint::new(
                        rng.gen_range(-0.05..0.05),
                        rng.gen_range(-0.05..0.05),
                        rng.gen_range(-0.05..0.05),
                    );
                let back = sys.omega_of_z(z, guess).map_err(|e| e.to_string())?;
                ensure!(
                    (back - w).norm() < 1e-9,
                    "{name}: round-trip error {:.3e}",
                    (back - w).norm()
                );
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_02_stackel_identity() {
    report(2, "Stackel identity", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for sys in representative_systems() {
            let (lo, hi) = sys.sample_box();
            for _ in 0..100 {
                let w = OmegaPoint::new(
                    rng.gen_range(lo[0]..hi[0]),
                    rng.gen_range(lo[1]..hi[1]),
                    rng.gen_range(lo[2]..hi[2]),
                );
                let l = sys.admissible_scales(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
                let s = sys.stackel_matrix(w).map_err(|e| e.to_string())?;
                let r = sys.eikonal(w, l).map_err(|e| e.to_string())?;
                let t = sys.t_functions(l).map_err(|e| e.to_string())?;
                let defect = (s.transpose() * r - t).amax();
                ensure!(
                    defect < 1e-10,
                    "{}: identity defect {defect:.3e} at {w:?}",
                    sys.family().name()
                );
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_03_special_functions() {
    report(3, "special functions", (|| {
        for ik in 1..=9 {
            let k = 0.1 * ik as f64;
            let kk = complete_elliptic_k(k).map_err(|e| e.to_string())?;
            for i in 0..=400 {
                let u = -4.0 * kk + 8.0 * kk * i as f64 / 400.0;
                let (sn, cn, dn) = jacobi_sn_cn_dn(u, k).map_err(|e| e.to_string())?;
                let p1 = (sn * sn + cn * cn - 1.0).abs();
                let p2 = (dn * dn - (1.0 - k * k * sn * sn)).abs();
                ensure!(p1 < 1e-12, "sn^2+cn^2 defect {p1:.3e} at u={u}, k={k}");
                ensure!(p2 < 1e-12, "dn^2 defect {p2:.3e} at u={u}, k={k}");
            }
        }
        let k0 = complete_elliptic_k(0.0).map_err(|e| e.to_string())?;
        ensure!(
            (k0 - std::f64::consts::FRAC_PI_2).abs() < 1e-14,
            "K(0) = {k0}, expected pi/2"
        );
        Ok(())
    })());
}

#[test]
fn criterion_04_propagator() {
    report(4, "propagator", (|| {
        let fields: [(&str, Box<dyn Fn(f64) -> Vec3>); 3] = [
            ("constant", Box::new(|_| Vec3::new(0.0, 0.0, 1.3))),
            ("linear", Box::new(|t| Vec3::new(0.0, 0.0, 0.4 * t + 0.2))),
            ("sinusoidal", Box::new(|t| Vec3::new(0.0, 0.0, 0.8 * t.sin()))),
        ];
        for (name, eh) in &fields {
            let u = UPropagator::integrate(eh, 0.0, 10.0, 1e-3).map_err(|e| e.to_string())?;
            ensure!(
                u.unitarity_defect < 1e-8,
                "{name}: unitarity defect {:.3e}",
                u.unitarity_defect
            );
        }
        // Constant-field closed form.
        let c = 1.3;
        let u = solve_u(|_| Vec3::new(0.0, 0.0, c), 10.0, 1e-3).map_err(|e| e.to_string())?;
        let expect = Mat2C::new(
            C64::from_polar(1.0, c * 10.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, -c * 10.0),
        );
        let diff = (u - expect).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        ensure!(diff < 1e-9, "closed-form mismatch {diff:.3e}");
        // RK4 convergence ratio under step halving, measured on the solution
        // error against the closed form.
        let t_end = 2.0;
        let err_at = |step: f64| -> Result<f64, String> {
            let u = solve_u(|_| Vec3::new(0.0, 0.0, c), t_end, step).map_err(|e| e.to_string())?;
            let exact = Mat2C::new(
                C64::from_polar(1.0, c * t_end),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, -c * t_end),
            );
            Ok((u - exact).iter().map(|z| z.norm()).fold(0.0f64, f64::max))
        };
        let ratio = err_at(2e-2)? / err_at(1e-2)?;
        ensure!(
            (12.0..=20.0).contains(&ratio),
            "convergence ratio {ratio:.2} outside [12, 20]"
        );
        Ok(())
    })());
}

#[test]
fn criterion_05_corollary() {
    report(5, "corollary eH = -Omega", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        let sys = pauli_separator::coords::CoordSystemId::cartesian();
        for i in 0..1000 {
            let spec = FrameSpec {
                alpha: TimeFunction::sinusoid(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(0.2..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-1.0..1.0),
                ),
                beta: TimeFunction::linear(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                gamma: TimeFunction::sinusoid(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.2..2.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-1.0..1.0),
                ),
                ..FrameSpec::identity()
            };
            let frame = EulerFrame::new(sys, spec, -2.0, 2.0).map_err(|e| e.to_string())?;
            let t = rng.gen_range(-2.0..2.0);
            let defect = (magnetic_field(&frame, t) + frame.angular_velocity(t)).norm();
            ensure!(defect < 1e-12, "frame {i}: defect {defect:.3e} at t = {t}");
            // Anchor the closed-form Omega against the rotation matrix
            // itself on a subsample (FD accuracy).
            if i % 100 == 0 {
                let h = 1e-6;
                let od = (frame.rotation_matrix(t + h) - frame.rotation_matrix(t - h))
                    / (2.0 * h);
                let rate = od * frame.rotation_matrix(t).transpose();
                let diff = max_abs(&(rate - frame.rotation_rate_matrix(t)));
                ensure!(diff < 1e-6, "frame {i}: FD anchor defect {diff:.3e}");
            }
        }
        Ok(())
    })());
}

fn scenario_residual(s: &Scenario, h: f64) -> Result<f64, String> {
    let sol = solve_scenario(s).map_err(|e| e.to_string())?;
    Ok(pauli_residual(s, &sol, h, None).map_err(|e| e.to_string())?.0)
}

#[test]
fn criterion_06_end_to_end_separability() {
    report(6, "end-to-end separability", (|| {
        let scenarios = [
            ("free-particle", free_particle_scenario(Vec3::new(-1.0, 0.7, -0.3), chi())
                .map_err(|e| e.to_string())?),
            ("rotating-cylindrical",
                rotating_cylindrical_scenario(1.0, 0.4, Vec3::new(0.3, -0.5, 0.2), chi())
                    .map_err(|e| e.to_string())?),
            ("proposition", proposition_scenario()),
        ];
        for (name, s) in &scenarios {
            let sol = solve_scenario(s).map_err(|e| e.to_string())?;
            let r = |h: f64| -> Result<f64, String> {
                Ok(pauli_residual(s, &sol, h, None).map_err(|e| e.to_string())?.0)
            };
            let fine = r(1e-3)?;
            ensure!(fine < 1e-4, "{name}: max_rel {fine:.3e} at h = 1e-3");
            // Two halvings: second-order stencils shrink the truncation
            // error by about 16x overall. The refinement pair is measured
            // at 4e-3 -> 1e-3, above the roundoff floor that residuals
            // below ~1e-7 sit on.
            let coarse = r(4e-3)?;
            let ratio = coarse / fine;
            ensure!(
                (8.0..=32.0).contains(&ratio),
                "{name}: refinement ratio {ratio:.2} outside [8, 32] \
                 (coarse {coarse:.3e}, fine {fine:.3e})"
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_07_gauge_invariance() {
    report(7, "gauge invariance", (|| {
        let s = rotating_cylindrical_scenario(1.0, 0.4, Vec3::new(0.3, -0.5, 0.2), chi())
            .map_err(|e| e.to_string())?;
        let sol = solve_scenario(&s).map_err(|e| e.to_string())?;
        // h = 1e-4 keeps the FD truncation error of the gauge phase itself
        // below the 1e-6 comparison tolerance.
        let h = 1e-4;
        let f = SpaceTimeFunction {
            c0: TimeFunction::zero(),
            c1: TimeFunction::linear(0.0, 1.0),
            c2: TimeFunction::zero(),
            c3: TimeFunction::zero(),
        };
        let (base, _) = pauli_residual(&s, &sol, h, None).map_err(|e| e.to_string())?;
        let (gauged, _) = pauli_residual(&s, &sol, h, Some(&f)).map_err(|e| e.to_string())?;
        ensure!(
            (base - gauged).abs() < 1e-6,
            "residual changed by {:.3e} (base {base:.3e}, gauged {gauged:.3e})",
            (base - gauged).abs()
        );
        Ok(())
    })());
}

#[test]
fn criterion_08_maxwell_catalog() {
    report(8, "Maxwell catalog", (|| {
        // The worked-example potential.
        let pot = proposition_potential(0.9, 1.2);
        let grid = GridSpec::cube(1.5, 5).with_exclusion([0.0; 3], 0.5);
        let (r0, r1, rg) = maxwell_residual(&pot, &grid, 0.0).map_err(|e| e.to_string())?;
        ensure!(
            r0 < 1e-4 && r1 < 1e-4 && rg < 1e-4,
            "worked example: r0 {r0:.3e}, r1 {r1:.3e}, rg {rg:.3e}"
        );
        // Catalog cases S1-S6 (the non-stationary case is checked in the
        // module tests; S7 is explicitly excluded as an open question).
        let cases = [
            CatalogCase::S1 { k: 1.2, a1: 0.3, a2: 0.1, a3: -0.4 },
            CatalogCase::S2 { k: 1.2, a: 0.8 },
            CatalogCase::S3 { k: 1.2, a1: 0.5, a2: 0.4, a3: 0.3 },
            CatalogCase::S4 { k: 1.2, a: 0.8, a1: 0.5, a2: 0.4, a3: 0.3 },
            CatalogCase::S5 { k: 1.2, a: 0.8, a1: 0.5, a2: 0.4, a3: 0.3 },
            CatalogCase::S6 { k: 1.2, a1: 0.5, a2: 0.4, a3: 0.3 },
        ];
        for case in &cases {
            let (r0, r1, rg) = catalog_maxwell_check(case, &case.default_grid(), 0.3)
                .map_err(|e| e.to_string())?;
            ensure!(
                r0 < 1e-4 && r1 < 1e-4 && rg < 1e-4,
                "{case:?}: r0 {r0:.3e}, r1 {r1:.3e}, rg {rg:.3e}"
            );
        }
        // S5's two printed forms agree.
        let s5 = CatalogCase::S5 { k: 1.2, a: 0.8, a1: 0.5, a2: 0.4, a3: 0.3 };
        let mut rng = ChaCha8Rng::seed_from_u64(108);
        for _ in 0..50 {
            let x = Vec3::new(
                rng.gen_range(0.6..2.0),
                rng.gen_range(0.55..1.95),
                rng.gen_range(0.5..1.9),
            );
            let real_form = catalog_a0(&s5, x).map_err(|e| e.to_string())?;
            let complex_form = s5_complex_center_a0(&s5, x).map_err(|e| e.to_string())?;
            ensure!(
                (real_form - complex_form).abs() < 1e-10,
                "S5 forms differ by {:.3e} at {x:?}",
                (real_form - complex_form).abs()
            );
        }
        // S7 excluded: its verbatim form is evaluable but carries no
        // Maxwell claim.
        let s7 = CatalogCase::S7 { k: 1.0, q: 0.9, a: 0.6, a3: 0.2, form: S7Form::Verbatim };
        ensure!(
            catalog_a0(&s7, Vec3::new(1.0, 1.0, 0.5)).is_ok(),
            "verbatim S7 must remain evaluable"
        );
        Ok(())
    })());
}

#[test]
fn criterion_09_closed_form_validation() {
    report(9, "closed-form validation", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for variant in [Case2Variant::Plus, Case2Variant::Minus, Case2Variant::Sine] {
            let mut checked = 0;
            while checked < 20 {
                let k: f64 = rng.gen_range(0.5..2.0);
                let c1 = rng.gen_range(2.0..5.0) / k.min(1.0);
                let t = rng.gen_range(0.0..2.0);
                match case2_ode_residual(c1, k, variant, t) {
                    Ok(r) => {
                        ensure!(r < 1e-8, "{variant:?}: ODE residual {r:.3e}");
                        checked += 1;
                    }
                    Err(_) => continue, // l <= 0 at this t; redraw
                }
            }
        }
        let p = Case1Params {
            a: 0.5, b: 0.3, k: 0.2, c: 0.2, c3: 0.1,
            c11: 0.3, c12: -0.2, c13: 0.1, a1: 0.6, a2: -0.4, a3: 0.2,
        };
        let sol = case1_frame_solve(&p, 1.0, 0.9, 0.0, 1.0, 1000).map_err(|e| e.to_string())?;
        let r = sol.resubstitution_residual(&p);
        ensure!(r < 1e-7, "non-stationary system re-substitution residual {r:.3e}");
        Ok(())
    })());
}

#[test]
fn criterion_10_structural_validators() {
    report(10, "structural validators", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(110);
        let mut samples = Vec::new();
        for _ in 0..10 {
            samples.push((
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ],
                Vec3::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ),
            ));
        }
        let f = || {
            [
                [
                    TimeFunction::sinusoid(0.5, 1.0, 0.0, 0.0),
                    TimeFunction::linear(0.2, 0.4),
                    TimeFunction::constant(0.9),
                    TimeFunction::zero(),
                ],
                [TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero()],
                [
                    TimeFunction::linear(0.0, 1.0),
                    TimeFunction::zero(),
                    TimeFunction::constant(-0.4),
                    TimeFunction::zero(),
                ],
                [TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero()],
            ]
        };
        // Shared-vector form accepted.
        let shared = ReducedODECoefficients::shared_vector(f(), f(), Vec3::new(0.6, -0.3, 0.9));
        ensure!(commutativity_check(&shared, &samples).0, "shared-vector form rejected");
        // Per-constant form accepted.
        let per = ReducedODECoefficients::per_constant(
            f(),
            [
                TimeFunction::constant(0.3),
                TimeFunction::linear(0.0, 0.7),
                TimeFunction::zero(),
                TimeFunction::sinusoid(0.2, 1.0, 0.0, 0.0),
            ],
            [
                Vec3::zeros(),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
        );
        ensure!(commutativity_check(&per, &samples).0, "per-constant form rejected");
        // Two-axis counterexample rejected.
        let zero_row = || {
            [TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero()]
        };
        let bad = ReducedODECoefficients {
            f: [zero_row(), zero_row(), zero_row(), zero_row()],
            g: [
                [
                    TimeFunction::constant(1.0),
                    TimeFunction::linear(0.0, 1.0),
                    TimeFunction::zero(),
                    TimeFunction::zero(),
                ],
                [
                    TimeFunction::linear(0.0, 1.0),
                    TimeFunction::constant(1.0),
                    TimeFunction::zero(),
                    TimeFunction::zero(),
                ],
                zero_row(),
                zero_row(),
            ],
            s: [
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::zeros(),
                Vec3::zeros(),
            ],
        };
        ensure!(!commutativity_check(&bad, &samples).0, "two-axis counterexample accepted");
        // rank_check across all 11 families, plus the synthetic failure.
        for sys in representative_systems() {
            let frame = EulerFrame::new(sys, FrameSpec::identity(), -1.0, 1.0)
                .map_err(|e| e.to_string())?;
            let s = Scenario::new(
                sys,
                frame,
                pauli_separator::fields::FCoefficients::zero(),
                Vec3::zeros(),
                chi(),
                (-0.5, 0.5),
            );
            let (lo, hi) = sys.sample_box();
            let pts: Vec<(f64, OmegaPoint)> = (0..20)
                .map(|_| {
                    (
                        rng.gen_range(-0.5..0.5),
                        OmegaPoint::new(
                            rng.gen_range(lo[0]..hi[0]),
                            rng.gen_range(lo[1]..hi[1]),
                            rng.gen_range(lo[2]..hi[2]),
                        ),
                    )
                })
                .collect();
            ensure!(
                rank_check(&s, &pts).map_err(|e| e.to_string())?,
                "rank_check false for {}",
                sys.family().name()
            );
            let mut degenerate = s.clone();
            degenerate.corruption = Some(Corruption::DuplicateStackelColumn { src: 0, dst: 1 });
            ensure!(
                !rank_check(&degenerate, &pts).map_err(|e| e.to_string())?,
                "rank_check true for degenerate {}",
                sys.family().name()
            );
        }
        Ok(())
    })());
}

#[test]
fn criterion_11_negative_controls() {
    report(11, "negative controls", (|| {
        let base = proposition_scenario();
        let corruptions = [
            Corruption::StackelEntry { row: 0, col: 0, delta: 0.5 },
            Corruption::LambdaCoupling { axis: 1, delta: 0.5 },
            Corruption::QPhase { eps: 0.5 },
        ];
        for c in corruptions {
            let mut s = base.clone();
            s.corruption = Some(c);
            let r = scenario_residual(&s, 1e-3)?;
            ensure!(r > 1e-2, "{c:?}: residual {r:.3e} did not exceed 1e-2");
        }
        Ok(())
    })());
}
