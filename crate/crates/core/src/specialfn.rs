//! Jacobi elliptic functions and the complete elliptic integral K.
//!
//! sn/cn/dn are computed by the descending Landen transformation: the modulus
//! sequence k_{n+1} = (1-k'_n)/(1+k'_n) converges quadratically to zero, the
//! argument is rescaled by u_{n+1} = u_n/(1+k_{n+1}), the trigonometric limit
//! is evaluated at the bottom and the Gauss ascending identities are applied
//! on the way back up. K(k) comes from the arithmetic-geometric mean.

use crate::{Error, Result};

/// Modulus terminating the Landen descent.
const LANDEN_EPS: f64 = 1e-15;
/// K(k) diverges logarithmically as k -> 1; evaluation is refused beyond this.
const K_MAX_MODULUS: f64 = 1.0 - 1e-12;

/// Elliptic modulus k with its complement k' = sqrt(1 - k^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    k_prime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain(format!("modulus k must lie in (0,1), got {k}")));
        }
        Ok(EllipticModulus { k, k_prime: (1.0 - k * k).sqrt() })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_prime(&self) -> f64 {
        self.k_prime
    }
}

/// Jacobi elliptic triple (sn(u,k), cn(u,k), dn(u,k)) for real u, k in [0,1].
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("argument u must be finite, got {u}")));
    }
    if !(0.0..=1.0).contains(&k) || !k.is_finite() {
        return Err(Error::Domain(format!("modulus k must lie in [0,1], got {k}")));
    }
    if k == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    if k == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok((u.tanh(), sech, sech));
    }

    // Reduce modulo the real period 4K so that large arguments keep full
    // precision through the argument rescaling.
    let quarter = complete_elliptic_k(k)?;
    let period = 4.0 * quarter;
    let u = u - period * (u / period).round();

    // Descend: moduli and the rescaled argument.
    let mut moduli = Vec::with_capacity(12);
    let mut kn = k;
    let mut un = u;
    while kn > LANDEN_EPS {
        let kp = (1.0 - kn * kn).sqrt();
        let knext = (1.0 - kp) / (1.0 + kp);
        moduli.push(knext);
        un /= 1.0 + knext;
        kn = knext;
    }

    // Trigonometric limit at the bottom of the descent.
    let (mut s, mut c, mut d) = (un.sin(), un.cos(), 1.0);

    // Ascend with the Gauss transformation.
    for &mu in moduli.iter().rev() {
        let denom = 1.0 + mu * s * s;
        let sn = (1.0 + mu) * s / denom;
        let cn = c * d / denom;
        let dn = (1.0 - mu * s * s) / denom;
        s = sn;
        c = cn;
        d = dn;
    }
    Ok((s, c, d))
}

/// Complete elliptic integral of the first kind, K(k), by AGM iteration.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..=K_MAX_MODULUS).contains(&k) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "K(k) requires 0 <= k <= {K_MAX_MODULUS}, got {k}"
        )));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..60 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}

/// Derivatives of the Jacobi triple with respect to u:
/// sn' = cn dn, cn' = -sn dn, dn' = -k^2 sn cn.
pub fn jacobi_derivatives(sn: f64, cn: f64, dn: f64, k: f64) -> (f64, f64, f64) {
    (cn * dn, -sn * dn, -k * k * sn * cn)
}
