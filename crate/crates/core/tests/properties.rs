//! Property-based checks of the invariants the library promises to hold
//! for *all* admissible inputs, not just hand-picked samples.

use pauli_separator::coords::{representative_systems, CoordSystemId, OmegaPoint, SplitClass};
use pauli_separator::fields::vector_potential;
use pauli_separator::linalg::{hat, max_abs, polar_project, unhat};
use pauli_separator::specialfn::{complete_elliptic_k, jacobi_sn_cn_dn};
use pauli_separator::timefn::TimeFunction;
use pauli_separator::{Mat3, Vec3};
use proptest::prelude::*;

fn any_system() -> impl Strategy<Value = CoordSystemId> {
    (0usize..11).prop_map(|i| representative_systems()[i])
}

fn interior_point(sys: CoordSystemId) -> impl Strategy<Value = OmegaPoint> {
    let (lo, hi) = sys.sample_box();
    (lo[0]..hi[0], lo[1]..hi[1], lo[2]..hi[2]).prop_map(|(a, b, c)| OmegaPoint::new(a, b, c))
}

fn leaf_timefn() -> impl Strategy<Value = TimeFunction> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(TimeFunction::constant),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(c0, c1)| TimeFunction::linear(c0, c1)),
        (-1.5..1.5f64, 0.2..3.0f64, -3.0..3.0f64, -1.0..1.0f64)
            .prop_map(|(a, w, p, o)| TimeFunction::sinusoid(a, w, p, o)),
        (-1.0..1.0f64, -0.8..0.8f64).prop_map(|(c, r)| TimeFunction::exp(c, r)),
        (-1.5..1.5f64).prop_map(TimeFunction::sech2),
        prop::collection::vec(-1.0..1.0f64, 1..4)
            .prop_map(|c| TimeFunction::polynomial(c).unwrap()),
    ]
}

fn any_timefn() -> impl Strategy<Value = TimeFunction> {
    leaf_timefn().prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(TimeFunction::sum),
            (inner.clone(), inner).prop_map(|(f, g)| TimeFunction::product(f, g)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The defining identity of the coordinate tables: for every family,
    /// interior point, and admissible scale triple, S^T R^{-2} = T.
    #[test]
    fn stackel_identity_holds((sys, s1, s3, seed) in any_system()
        .prop_flat_map(|sys| (Just(sys), 0.5..2.0f64, 0.5..2.0f64, any::<u64>())))
    {
        let (lo, hi) = sys.sample_box();
        let f = |u: u64, a: f64, b: f64| a + (u % 1000) as f64 / 1000.0 * (b - a);
        let w = OmegaPoint::new(
            f(seed, lo[0], hi[0]),
            f(seed / 1000, lo[1], hi[1]),
            f(seed / 1_000_000, lo[2], hi[2]),
        );
        let l = sys.admissible_scales(s1, s3);
        let s = sys.stackel_matrix(w).unwrap();
        let r = sys.eikonal(w, l).unwrap();
        let t = sys.t_functions(l).unwrap();
        prop_assert!((s.transpose() * r - t).amax() < 1e-10);
    }

    /// Scale triples honour the family's split class: a fully split family
    /// takes independent scales, a partially split one ties l1 = l2, and a
    /// non-split one ties all three.
    #[test]
    fn admissible_scales_respect_split_class(
        sys in any_system(), s1 in 0.5..2.0f64, s3 in 0.5..2.0f64)
    {
        let l = sys.admissible_scales(s1, s3);
        prop_assert!(l.iter().all(|&v| v > 0.0));
        match sys.split_class() {
            SplitClass::FullySplit => {}
            SplitClass::PartiallySplit => prop_assert_eq!(l[0], l[1]),
            SplitClass::NonSplit => {
                prop_assert_eq!(l[0], l[1]);
                prop_assert_eq!(l[1], l[2]);
            }
        }
    }

    /// Coordinate inversion started from the true point is an exact
    /// round trip, and the Jacobian stays nonsingular on the interior.
    #[test]
    fn coordinate_round_trip((sys, w) in any_system()
        .prop_flat_map(|sys| (Just(sys), interior_point(sys))))
    {
        let z = sys.z_of_omega(w).unwrap();
        let back = sys.omega_of_z(z, w).unwrap();
        prop_assert!((back - w).norm() < 1e-9);
        prop_assert!(sys.jacobian(w).unwrap().determinant().abs() > 1e-12);
    }

    /// Jacobi elliptic functions satisfy both pointwise Pythagorean
    /// identities everywhere on the real line.
    #[test]
    fn jacobi_identities(u in -10.0..10.0f64, k in 0.01..0.99f64) {
        let (sn, cn, dn) = jacobi_sn_cn_dn(u, k).unwrap();
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((dn * dn - (1.0 - k * k * sn * sn)).abs() < 1e-12);
    }

    /// K(k) is monotonically increasing in the modulus and bounded below
    /// by pi/2.
    #[test]
    fn elliptic_k_monotone(k in 0.01..0.90f64, dk in 0.01..0.09f64) {
        let a = complete_elliptic_k(k).unwrap();
        let b = complete_elliptic_k(k + dk).unwrap();
        prop_assert!(a >= std::f64::consts::FRAC_PI_2);
        prop_assert!(b > a);
    }

    /// Time-function expressions survive a JSON round trip and the
    /// closed-form first derivative matches a central difference.
    #[test]
    fn timefn_serde_and_derivative(f in any_timefn(), t in -2.0..2.0f64) {
        let json = serde_json::to_string(&f).unwrap();
        let g: TimeFunction = serde_json::from_str(&json).unwrap();
        // serde_json's default float parser may be one ulp off the
        // shortest-representation output, so compare values, not bits.
        let (a, b) = (f.eval(t), g.eval(t));
        prop_assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));

        let h = 1e-5;
        let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        let scale = 1.0 + f.eval(t).abs() + f.d1(t).abs();
        prop_assert!((fd - f.d1(t)).abs() < 1e-7 * scale);
    }

    /// The second derivative is the derivative of the first derivative.
    #[test]
    fn timefn_second_derivative(f in any_timefn(), t in -2.0..2.0f64) {
        let h = 1e-5;
        let fd = (f.d1(t + h) - f.d1(t - h)) / (2.0 * h);
        let scale = 1.0 + f.d1(t).abs() + f.d2(t).abs();
        prop_assert!((fd - f.d2(t)).abs() < 1e-7 * scale);
    }

    /// hat() builds the cross-product matrix and unhat() inverts it.
    #[test]
    fn hat_unhat_cross_product(
        v in prop::array::uniform3(-3.0..3.0f64),
        w in prop::array::uniform3(-3.0..3.0f64))
    {
        let v = Vec3::from(v);
        let w = Vec3::from(w);
        prop_assert!((hat(v) * w - v.cross(&w)).norm() < 1e-14);
        prop_assert!((unhat(&hat(v)) - v).norm() < 1e-14);
    }

    /// Polar projection of a near-rotation is orthogonal with unit
    /// determinant.
    #[test]
    fn polar_projection_orthonormal(p in prop::array::uniform3(
        prop::array::uniform3(-0.05..0.05f64)))
    {
        let mut m = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += p[i][j];
            }
        }
        let o = polar_project(&m);
        prop_assert!(max_abs(&(o.transpose() * o - Mat3::identity())) < 1e-12);
        prop_assert!((o.determinant() - 1.0).abs() < 1e-12);
    }

    /// The symmetric-gauge vector potential (1/2) eH x x reproduces its
    /// field: curl eA = eH, by central differences.
    #[test]
    fn vector_potential_curl(
        eh in prop::array::uniform3(-2.0..2.0f64),
        x in prop::array::uniform3(-1.5..1.5f64))
    {
        let eh = Vec3::from(eh);
        let x = Vec3::from(x);
        let h = 1e-5;
        let mut curl = Vec3::zeros();
        for (c, i, j) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            curl[c] += (vector_potential(eh, xp)[j] - vector_potential(eh, xm)[j]) / (2.0 * h);
            let mut yp = x;
            let mut ym = x;
            yp[j] += h;
            ym[j] -= h;
            curl[c] -= (vector_potential(eh, yp)[i] - vector_potential(eh, ym)[i]) / (2.0 * h);
        }
        prop_assert!((curl - eh).norm() < 1e-9);
    }
}
