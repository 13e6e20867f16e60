//! Scalar curvature of doubly warped fiber metrics and the O'Neill data of
//! a Riemannian submersion with totally geodesic fibers.
//!
//! The fiber model is a join: two round spheres of dimensions k1 and k2
//! warped over an interval [0, T] by profiles f1, f2. Its scalar curvature
//! at an interior point is
//!
//! ```text
//! -2 k1 f1''/f1 + k1 (k1-1) (1 - f1'^2) / f1^2
//! -2 k2 f2''/f2 + k2 (k2-1) (1 - f2'^2) / f2^2
//! -2 k1 k2 f1' f2' / (f1 f2)
//! ```
//!
//! The total scalar curvature of the submersion metric adds the base value
//! and subtracts the squared norm of the integrability tensor, which for
//! these bundles is a1^2 f1^2 + a2^2 f2^2. The same norm is also computed
//! from first principles as a quarter of the curvature quadratic form
//! xi(s, s) = sum_{i,j} |F_ij s|^2, so the two routes check each other.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Closed base manifold entering only through its dimension and (constant)
/// scalar curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseGeometry {
    dim: u32,
    scal: f64,
}

impl BaseGeometry {
    pub fn new(dim: u32, scal: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::domain("base dimension", dim as f64, "dim >= 1"));
        }
        if !scal.is_finite() {
            return Err(Error::domain("base scalar", scal, "finite"));
        }
        Ok(BaseGeometry { dim, scal })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn scal(&self) -> f64 {
        self.scal
    }
}

/// Dimensions of the two sphere factors and the two connection norms
/// a1, a2 >= 0 of the principal connections the bundle is assembled from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubmersionConstants {
    pub k1: u32,
    pub k2: u32,
    pub a1: f64,
    pub a2: f64,
}

impl SubmersionConstants {
    pub fn new(k1: u32, k2: u32, a1: f64, a2: f64) -> Result<Self> {
        if k1 + k2 < 1 {
            return Err(Error::domain("k1 + k2", (k1 + k2) as f64, "k1 + k2 >= 1"));
        }
        for (name, a) in [("a1", a1), ("a2", a2)] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::domain(name, a, "finite and >= 0"));
            }
        }
        Ok(SubmersionConstants { k1, k2, a1, a2 })
    }
}

type ProfileFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// One warping profile with its first two derivatives in closed form.
///
/// The functions must be defined in a neighborhood of [0, T], not just on
/// the closed interval, so endpoint derivatives can also be checked by
/// central differences.
pub struct Profile {
    value: ProfileFn,
    deriv: ProfileFn,
    second: ProfileFn,
}

impl Profile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Profile {
            value: Box::new(value),
            deriv: Box::new(deriv),
            second: Box::new(second),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }

    pub fn second(&self, t: f64) -> f64 {
        (self.second)(t)
    }
}

/// The pair (f1, f2) over the common interval [0, T].
pub struct ProfilePair {
    span: f64,
    pub first: Profile,
    pub second: Profile,
}

impl ProfilePair {
    pub fn new(span: f64, first: Profile, second: Profile) -> Result<Self> {
        if !span.is_finite() || span <= 0.0 {
            return Err(Error::domain("span", span, "T > 0"));
        }
        Ok(ProfilePair {
            span,
            first,
            second,
        })
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    fn require_interior(&self, t: f64) -> Result<()> {
        if !(t > 0.0 && t < self.span) {
            return Err(Error::domain("t", t, "0 < t < T"));
        }
        Ok(())
    }
}

/// Scalar curvature of the doubly warped fiber metric at an interior point.
pub fn scal_doubly_warped(k1: u32, k2: u32, p: &ProfilePair, t: f64) -> Result<f64> {
    if k1 + k2 < 1 {
        return Err(Error::domain("k1 + k2", (k1 + k2) as f64, "k1 + k2 >= 1"));
    }
    p.require_interior(t)?;
    let (k1, k2) = (k1 as f64, k2 as f64);

    let f1 = p.first.value(t);
    let f2 = p.second.value(t);
    if f1 <= 0.0 {
        return Err(Error::NonPositiveProfile {
            which: "f1",
            t,
            value: f1,
        });
    }
    if f2 <= 0.0 {
        return Err(Error::NonPositiveProfile {
            which: "f2",
            t,
            value: f2,
        });
    }
    let d1 = p.first.deriv(t);
    let d2 = p.second.deriv(t);
    let s1 = p.first.second(t);
    let s2 = p.second.second(t);

    Ok(
        -2.0 * k1 * s1 / f1 + k1 * (k1 - 1.0) * (1.0 - d1 * d1) / (f1 * f1) - 2.0 * k2 * s2 / f2
            + k2 * (k2 - 1.0) * (1.0 - d2 * d2) / (f2 * f2)
            - 2.0 * k1 * k2 * d1 * d2 / (f1 * f2),
    )
}

/// Total scalar curvature of the submersion metric at an interior point:
/// base + fiber - |A|^2 with |A|^2 = a1^2 f1^2 + a2^2 f2^2.
pub fn scal_join_total(
    base: &BaseGeometry,
    c: &SubmersionConstants,
    p: &ProfilePair,
    t: f64,
) -> Result<f64> {
    let fiber = scal_doubly_warped(c.k1, c.k2, p, t)?;
    Ok(base.scal() + fiber - oneill_norm_join(c, p, t)?)
}

/// |A|^2 of the join bundle at parameter t.
pub fn oneill_norm_join(c: &SubmersionConstants, p: &ProfilePair, t: f64) -> Result<f64> {
    let f1 = p.first.value(t);
    let f2 = p.second.value(t);
    Ok(c.a1 * c.a1 * f1 * f1 + c.a2 * c.a2 * f2 * f2)
}

/// Scalar curvature of the canonical-variation metric that scales the fiber
/// by c > 0: base + fiber/c - c |A|^2.
pub fn oneill_rescaled(scal_base: f64, scal_fiber: f64, a_sq: f64, c: f64) -> Result<f64> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain("c", c, "c > 0"));
    }
    Ok(scal_base + scal_fiber / c - c * a_sq)
}

/// Scalar curvature of a sphere bundle with round fibers of radius r and
/// connection norm a:  base + k (k-1) / r^2 - a^2 r^2.
pub fn sphere_bundle_scalar(base: &BaseGeometry, k: u32, a: f64, r: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("fiber dimension", k as f64, "k >= 1"));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::domain("fiber radius", r, "r > 0"));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(Error::domain("connection norm", a, "a >= 0"));
    }
    let kf = k as f64;
    Ok(base.scal() + kf * (kf - 1.0) / (r * r) - a * a * r * r)
}

/// Curvature components F_ij of a principal connection against an
/// orthonormal base frame: a family of skew-symmetric endomorphisms of the
/// fiber, antisymmetric in the frame indices (F_ij = -F_ji).
pub struct SkewFamily {
    base_dim: usize,
    fiber_dim: usize,
    mats: Vec<DMatrix<f64>>,
}

impl SkewFamily {
    const SKEW_TOL: f64 = 1e-12;

    /// All components start at zero.
    pub fn new(base_dim: usize, fiber_dim: usize) -> Result<Self> {
        if base_dim < 1 {
            return Err(Error::domain("base dimension", base_dim as f64, ">= 1"));
        }
        if fiber_dim < 1 {
            return Err(Error::domain("fiber dimension", fiber_dim as f64, ">= 1"));
        }
        Ok(SkewFamily {
            base_dim,
            fiber_dim,
            mats: vec![DMatrix::zeros(fiber_dim, fiber_dim); base_dim * base_dim],
        })
    }

    /// Install F_ij = mat and F_ji = -mat for i != j. `mat` must be
    /// skew-symmetric and of the fiber dimension.
    pub fn set_pair(&mut self, i: usize, j: usize, mat: DMatrix<f64>) -> Result<()> {
        if i >= self.base_dim || j >= self.base_dim || i == j {
            return Err(Error::domain(
                "frame index",
                i.max(j) as f64,
                "i != j, both < base dimension",
            ));
        }
        if mat.nrows() != self.fiber_dim || mat.ncols() != self.fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: self.fiber_dim,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        let defect = (&mat + mat.transpose()).abs().max();
        if defect > Self::SKEW_TOL {
            return Err(Error::NotSkew { defect });
        }
        self.mats[j * self.base_dim + i] = -&mat;
        self.mats[i * self.base_dim + j] = mat;
        Ok(())
    }

    pub fn component(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.mats[i * self.base_dim + j]
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }
}

/// The curvature quadratic form xi(s, s) = sum over ordered pairs (i, j) of
/// |F_ij s|^2, evaluated by direct summation.
pub fn xi_form(fam: &SkewFamily, s: &DVector<f64>) -> Result<f64> {
    if s.len() != fam.fiber_dim {
        return Err(Error::DimensionMismatch {
            expected: fam.fiber_dim,
            got: s.len(),
        });
    }
    let mut total = 0.0;
    for m in &fam.mats {
        total += (m * s).norm_squared();
    }
    Ok(total)
}

/// |A|^2 at a unit vertical vector s, namely xi(s, s) / 4.
pub fn oneill_norm_from_xi(fam: &SkewFamily, s: &DVector<f64>) -> Result<f64> {
    let norm = s.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { norm });
    }
    Ok(xi_form(fam, s)? / 4.0)
}

/// One checked endpoint condition of a profile pair.
#[derive(Clone, Debug)]
pub struct BoundaryCheck {
    pub label: String,
    /// Derivative order of the condition.
    pub order: u32,
    pub value: f64,
    pub residual: f64,
    pub pass: bool,
}

/// Endpoint verification of a profile pair.
#[derive(Clone, Debug, Default)]
pub struct BoundaryReport {
    pub checks: Vec<BoundaryCheck>,
}

impl BoundaryReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.residual))
    }

    fn push_eq(&mut self, label: &str, order: u32, value: f64, expect: f64, tol: f64) {
        let residual = (value - expect).abs();
        self.checks.push(BoundaryCheck {
            label: label.to_string(),
            order,
            value,
            residual,
            pass: residual <= tol,
        });
    }

    fn push_pos(&mut self, label: &str, value: f64) {
        self.checks.push(BoundaryCheck {
            label: label.to_string(),
            order: 0,
            value,
            residual: if value > 0.0 { 0.0 } else { -value },
            pass: value > 0.0,
        });
    }
}

/// Check the closing conditions of a profile pair at both ends of [0, T]
/// up to the requested derivative order (>= 1):
///
/// order 0:  f1(0) > 0,  f1(T) = 0,  f2(0) = 0,  f2(T) > 0
/// order 1:  f1'(0) = 0, f1'(T) = -1, f2'(0) = 1, f2'(T) = 0
/// order 2:  f1''(T) = 0, f2''(0) = 0
/// order n:  odd derivatives of f1 vanish at 0 and even ones at T, and the
///           mirrored statement for f2, obtained by central differences of
///           the closed-form second derivative.
///
/// Orders up to 2 use the closed forms and are judged against `tol`;
/// higher orders are finite-difference estimates judged against a floor of
/// 1e-5 to absorb the truncation error.
pub fn check_boundary(p: &ProfilePair, order: u32, tol: f64) -> Result<BoundaryReport> {
    if order < 1 {
        return Err(Error::domain("order", order as f64, "order >= 1"));
    }
    let t_end = p.span();
    let mut report = BoundaryReport::default();

    report.push_pos("f1(0) > 0", p.first.value(0.0));
    report.push_eq("f1(T) = 0", 0, p.first.value(t_end), 0.0, tol);
    report.push_eq("f2(0) = 0", 0, p.second.value(0.0), 0.0, tol);
    report.push_pos("f2(T) > 0", p.second.value(t_end));

    report.push_eq("f1'(0) = 0", 1, p.first.deriv(0.0), 0.0, tol);
    report.push_eq("f1'(T) = -1", 1, p.first.deriv(t_end), -1.0, tol);
    report.push_eq("f2'(0) = 1", 1, p.second.deriv(0.0), 1.0, tol);
    report.push_eq("f2'(T) = 0", 1, p.second.deriv(t_end), 0.0, tol);

    if order >= 2 {
        report.push_eq("f1''(T) = 0", 2, p.first.second(t_end), 0.0, tol);
        report.push_eq("f2''(0) = 0", 2, p.second.second(0.0), 0.0, tol);
    }

    // Higher orders: central differences of the closed-form second
    // derivative, step sized for a balance of truncation and rounding.
    let fd_tol = tol.max(1e-5);
    let h = 1e-3 * t_end.min(1.0);
    let d3 = |f: &Profile, t: f64| (f.second(t + h) - f.second(t - h)) / (2.0 * h);
    let d4 =
        |f: &Profile, t: f64| (f.second(t + h) - 2.0 * f.second(t) + f.second(t - h)) / (h * h);
    for n in 3..=order {
        match n % 2 {
            1 => {
                report.push_eq(
                    &format!("f1^({n})(0) = 0"),
                    n,
                    nth_odd(&p.first, 0.0, n, d3, h),
                    0.0,
                    fd_tol,
                );
                report.push_eq(
                    &format!("f2^({n})(T) = 0"),
                    n,
                    nth_odd(&p.second, t_end, n, d3, h),
                    0.0,
                    fd_tol,
                );
            }
            _ => {
                report.push_eq(
                    &format!("f1^({n})(T) = 0"),
                    n,
                    nth_even(&p.first, t_end, n, d4, h),
                    0.0,
                    fd_tol,
                );
                report.push_eq(
                    &format!("f2^({n})(0) = 0"),
                    n,
                    nth_even(&p.second, 0.0, n, d4, h),
                    0.0,
                    fd_tol,
                );
            }
        }
    }
    Ok(report)
}

fn nth_odd(f: &Profile, t: f64, n: u32, d3: impl Fn(&Profile, f64) -> f64, h: f64) -> f64 {
    // n odd, n >= 3: repeated symmetric second differences of f'' around t,
    // then one first difference. For n = 3 this is just d3.
    let mut order = 3;
    let mut eval: Box<dyn Fn(f64) -> f64> = Box::new(|x| d3(f, x));
    while order < n {
        let prev = eval;
        eval = Box::new(move |x| (prev(x + h) - 2.0 * prev(x) + prev(x - h)) / (h * h));
        order += 2;
    }
    eval(t)
}

fn nth_even(f: &Profile, t: f64, n: u32, d4: impl Fn(&Profile, f64) -> f64, h: f64) -> f64 {
    let mut order = 4;
    let mut eval: Box<dyn Fn(f64) -> f64> = Box::new(|x| d4(f, x));
    while order < n {
        let prev = eval;
        eval = Box::new(move |x| (prev(x + h) - 2.0 * prev(x) + prev(x - h)) / (h * h));
        order += 2;
    }
    eval(t)
}

/// Outcome of [`dichotomy_check`] for a single fiber scaling c.
#[derive(Clone, Copy, Debug)]
pub struct DichotomySample {
    pub c: f64,
    /// max - min of the rescaled scalar curvature over the grid.
    pub spread: f64,
    pub constant: bool,
}

/// Outcome of [`dichotomy_check`].
#[derive(Clone, Debug)]
pub struct DichotomyReport {
    /// Whether |A|^2 is constant on the grid.
    pub a_sq_constant: bool,
    /// Whether the unscaled total (c = 1) is constant on the grid; the
    /// dichotomy only speaks when it is.
    pub hypothesis_constant: bool,
    pub samples: Vec<DichotomySample>,
    /// True when every sample agrees with the dichotomy.
    pub consistent: bool,
}

/// Canonical-variation dichotomy on a sampled submersion: if |A|^2 is
/// constant then every rescaling c > 0 of a constant-scalar-curvature
/// metric again has constant scalar curvature; if |A|^2 is non-constant
/// then no rescaling with c != 1 does.
///
/// The three slices sample base scalar, fiber scalar and |A|^2 on a common
/// grid. Every c must be positive and different from 1.
pub fn dichotomy_check(
    scal_base: &[f64],
    scal_fiber: &[f64],
    a_sq: &[f64],
    c_values: &[f64],
    tol: f64,
) -> Result<DichotomyReport> {
    let n = scal_base.len();
    if n == 0 {
        return Err(Error::domain("grid size", 0.0, "at least one sample"));
    }
    for (len, _name) in [(scal_fiber.len(), "scal_fiber"), (a_sq.len(), "a_sq")] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    for &c in c_values {
        if !c.is_finite() || c <= 0.0 || c == 1.0 {
            return Err(Error::domain("c", c, "c > 0 and c != 1"));
        }
    }

    let spread = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let a_sq_constant = spread(a_sq) <= tol;
    let total: Vec<f64> = (0..n)
        .map(|i| scal_base[i] + scal_fiber[i] - a_sq[i])
        .collect();
    let hypothesis_constant = spread(&total) <= tol;

    let mut samples = Vec::with_capacity(c_values.len());
    let mut consistent = true;
    for &c in c_values {
        let rescaled: Vec<f64> = (0..n)
            .map(|i| scal_base[i] + scal_fiber[i] / c - c * a_sq[i])
            .collect();
        let sp = spread(&rescaled);
        let constant = sp <= tol;
        if hypothesis_constant && constant != a_sq_constant {
            consistent = false;
        }
        samples.push(DichotomySample {
            c,
            spread: sp,
            constant,
        });
    }

    Ok(DichotomyReport {
        a_sq_constant,
        hypothesis_constant,
        samples,
        consistent,
    })
}
