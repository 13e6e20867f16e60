//! Jacobi elliptic functions cn, sn, dn and the complete integral K.
//!
//! Everything here is parameterized by the modulus k, not by the parameter
//! m = k^2 that scipy and Abramowitz & Stegun tables use. K(k) is computed
//! by the arithmetic-geometric mean; cn/sn/dn by the descending Landen
//! ladder built on the same AGM scale, which is accurate uniformly in k up
//! to the supported ceiling below. dn is recovered from dn^2 = 1 - k^2 sn^2,
//! so that identity holds to rounding by construction.

use crate::error::{Error, Result};

/// Largest supported modulus. Above this the quarter period grows past
/// ~14.86 and double precision stops resolving the Landen descent.
pub const MODULUS_MAX: f64 = 1.0 - 1e-12;

/// Elliptic modulus k in [0, MODULUS_MAX].
///
/// The complement 1 - k^2 is fixed at construction from whichever of k or
/// k^2 the caller supplied, so values extremely close to 1 keep their full
/// complement precision instead of dying in the subtraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulus {
    k: f64,
    comp_sq: f64,
}

impl Modulus {
    pub const ZERO: Modulus = Modulus {
        k: 0.0,
        comp_sq: 1.0,
    };

    /// Build from the modulus itself.
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || !(0.0..=MODULUS_MAX).contains(&k) {
            return Err(Error::domain("modulus", k, "0 <= k <= 1 - 1e-12"));
        }
        Ok(Modulus {
            k,
            comp_sq: (1.0 - k) * (1.0 + k),
        })
    }

    /// Build from the squared modulus.
    pub fn from_sq(k_sq: f64) -> Result<Self> {
        if !k_sq.is_finite() || !(0.0..=1.0 - 2e-12).contains(&k_sq) {
            return Err(Error::domain("modulus^2", k_sq, "0 <= k^2 <= 1 - 2e-12"));
        }
        Ok(Modulus {
            k: k_sq.sqrt(),
            comp_sq: 1.0 - k_sq,
        })
    }

    pub fn get(self) -> f64 {
        self.k
    }

    /// k^2.
    pub fn sq(self) -> f64 {
        self.k * self.k
    }

    /// 1 - k^2, carried at full precision.
    pub fn complement_sq(self) -> f64 {
        self.comp_sq
    }

    pub fn is_zero(self) -> bool {
        self.k == 0.0
    }
}

/// Values of the three Jacobi functions at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// First and second derivatives of cn and sn with respect to the argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiDerivatives {
    pub cn_d: f64,
    pub cn_dd: f64,
    pub sn_d: f64,
    pub sn_dd: f64,
}

const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind, K(k).
///
/// K(0) = pi/2 exactly; K grows monotonically and reaches ~14.86 at the
/// supported ceiling. One AGM loop, quadratic convergence.
pub fn quarter_period(k: Modulus) -> f64 {
    let mut a = 1.0_f64;
    let mut b = k.comp_sq.sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::FRAC_PI_2 / a
}

/// sn, cn, dn at argument `t`.
///
/// The argument is first reduced modulo the full period 4K so the functions
/// stay periodic to rounding for arbitrarily large |t|. At k = 0 this is
/// exactly (sin, cos, 1).
pub fn jacobi(t: f64, k: Modulus) -> Jacobi {
    if k.is_zero() {
        let (sn, cn) = t.sin_cos();
        return Jacobi { sn, cn, dn: 1.0 };
    }

    let period = 4.0 * quarter_period(k);
    let mut u = t - period * (t / period).floor();
    if u >= period {
        u -= period; // guards the floor rounding up at huge |t|
    }

    // Ascending AGM ladder: a_0 = 1, b_0 = k', c_0 = k, and for i >= 1
    // a_i = (a+b)/2, b_i = sqrt(ab), c_i = (a-b)/2 on the previous pair.
    let mut a_seq = [0.0_f64; AGM_MAX_ITER];
    let mut c_seq = [0.0_f64; AGM_MAX_ITER];
    let mut a = 1.0_f64;
    let mut b = k.comp_sq.sqrt();
    a_seq[0] = a;
    c_seq[0] = k.get();
    let mut n = 0;
    while c_seq[n].abs() > f64::EPSILON * a && n + 1 < AGM_MAX_ITER {
        n += 1;
        let an = 0.5 * (a + b);
        c_seq[n] = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        a_seq[n] = a;
    }

    // Amplitude recurrence back down the ladder:
    // phi_{i-1} = (phi_i + asin(c_i sin(phi_i) / a_i)) / 2.
    let mut phi = (1u64 << n) as f64 * a * u;
    for i in (1..=n).rev() {
        let s = (c_seq[i] * phi.sin() / a_seq[i]).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - k.sq() * sn * sn).max(k.comp_sq).sqrt();
    Jacobi { sn, cn, dn }
}

/// cn', cn'', sn', sn'' at argument `t`, from the closed forms
/// cn' = -sn dn, sn' = cn dn,
/// cn'' = -2 k^2 cn^3 - (1 - 2 k^2) cn,
/// sn'' = 2 k^2 sn^3 - (1 + k^2) sn.
pub fn jacobi_derivatives(t: f64, k: Modulus) -> JacobiDerivatives {
    let v = jacobi(t, k);
    derivatives_from_values(&v, k)
}

/// Same as [`jacobi_derivatives`] but reusing already computed values.
pub fn derivatives_from_values(v: &Jacobi, k: Modulus) -> JacobiDerivatives {
    let ksq = k.sq();
    JacobiDerivatives {
        cn_d: -v.sn * v.dn,
        cn_dd: -2.0 * ksq * v.cn.powi(3) - (1.0 - 2.0 * ksq) * v.cn,
        sn_d: v.cn * v.dn,
        sn_dd: 2.0 * ksq * v.sn.powi(3) - (1.0 + ksq) * v.sn,
    }
}
