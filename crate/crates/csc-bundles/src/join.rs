//! One-parameter families of constant-scalar-curvature metrics on fiberwise
//! joins, built from elliptic warping profiles.
//!
//! For fiber dimensions k1, k2 >= 1 and connection norms a1, a2 >= 0 the
//! profiles
//!
//! ```text
//! f1(t) = cn_k(gamma t) / (gamma sqrt(1 - k^2)),   f2(t) = sn_k(gamma t) / gamma
//! ```
//!
//! on [0, T] with T = K(k)/gamma give the total metric constant scalar
//! curvature exactly when (gamma, k) solves the quartic parameter equation
//!
//! ```text
//! (k1+k2)(k1+k2+3) gamma^4 k^2 (1-k^2) = a1^2 - (1-k^2) a2^2 .
//! ```
//!
//! Each admissible modulus interval therefore carries a one-parameter family
//! of solutions; in the degenerate case k = 0 the profiles are round and
//! gamma itself is the free parameter. The resulting constant value is
//!
//! ```text
//! R = base + (k1+k2)(k1+k2+1) gamma^2 - 2 (k1+k2)(k1+1) gamma^2 k^2 - a2^2 / gamma^2 .
//! ```
//!
//! Everything here is verified downstream by evaluating the curvature
//! functional on the profiles and checking it is constant; see
//! [`verify_residual`].

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::curvature::{scal_join_total, BaseGeometry, Profile, ProfilePair, SubmersionConstants};
use crate::elliptic::{jacobi, jacobi_derivatives, quarter_period, Modulus};
use crate::error::{Error, Result};

/// Smallest modulus used when sampling toward an interval endpoint.
pub const PROBE_MODULUS_MIN: f64 = 1e-8;
/// Largest modulus used when sampling toward an interval endpoint.
pub const PROBE_MODULUS_MAX: f64 = 1.0 - 1e-10;

/// Input data of the join construction: the base geometry, the two sphere
/// dimensions and the two connection norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoinParams {
    pub base: BaseGeometry,
    pub k1: u32,
    pub k2: u32,
    pub a1: f64,
    pub a2: f64,
}

impl JoinParams {
    pub fn new(base: BaseGeometry, k1: u32, k2: u32, a1: f64, a2: f64) -> Result<Self> {
        if k1 < 1 || k2 < 1 {
            return Err(Error::domain(
                "sphere dimension",
                k1.min(k2) as f64,
                "k1 >= 1 and k2 >= 1",
            ));
        }
        for (name, a) in [("a1", a1), ("a2", a2)] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::domain(name, a, "finite and >= 0"));
            }
        }
        Ok(JoinParams {
            base,
            k1,
            k2,
            a1,
            a2,
        })
    }

    /// The same data with the two factors swapped.
    pub fn interchanged(&self) -> JoinParams {
        JoinParams {
            base: self.base,
            k1: self.k2,
            k2: self.k1,
            a1: self.a2,
            a2: self.a1,
        }
    }

    fn s(&self) -> f64 {
        (self.k1 + self.k2) as f64
    }

    fn constants(&self) -> SubmersionConstants {
        SubmersionConstants::new(self.k1, self.k2, self.a1, self.a2)
            .expect("JoinParams invariants imply valid constants")
    }
}

/// Which part of the solution set a family lives on. The names record the
/// relation between the two connection norms that selects the branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// a1 = a2 = 0, k = 0: round profiles, locally a product.
    Flat,
    /// a1 = a2 > 0, k = 0: round profiles with curved connections.
    Round,
    /// a1 > a2: elliptic profiles, every modulus in (0, 1) admissible.
    FirstDominant,
    /// a1 = a2 > 0: elliptic profiles, every modulus in (0, 1) admissible.
    Balanced,
    /// 0 < a1 < a2: elliptic profiles, admissible iff k^2 > 1 - a1^2/a2^2.
    SecondDominant,
}

impl BranchKind {
    pub fn label(&self) -> &'static str {
        match self {
            BranchKind::Flat => "flat",
            BranchKind::Round => "round",
            BranchKind::FirstDominant => "first-dominant",
            BranchKind::Balanced => "balanced",
            BranchKind::SecondDominant => "second-dominant",
        }
    }

    /// Whether the family is parameterized by gamma at k = 0 rather than by
    /// an elliptic modulus.
    pub fn is_flat(&self) -> bool {
        matches!(self, BranchKind::Flat | BranchKind::Round)
    }
}

/// One connected family of solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Family {
    pub branch: BranchKind,
    /// True when the family arises from the factor-swapped parameters.
    pub interchanged: bool,
    /// Open admissibility interval in k^2; None on the flat branches, where
    /// gamma > 0 is the family parameter.
    pub modulus_sq_range: Option<(f64, f64)>,
}

/// The admissible branches for the parameters in the given factor order.
/// No silent swapping happens here; use [`families`] for the full picture
/// including the interchanged order.
pub fn admissible_modulus_range(p: &JoinParams) -> Vec<Family> {
    let direct = |branch, range| Family {
        branch,
        interchanged: false,
        modulus_sq_range: range,
    };
    if p.a1 == 0.0 && p.a2 == 0.0 {
        vec![direct(BranchKind::Flat, None)]
    } else if p.a1 == p.a2 {
        vec![
            direct(BranchKind::Round, None),
            direct(BranchKind::Balanced, Some((0.0, 1.0))),
        ]
    } else if p.a1 > p.a2 {
        vec![direct(BranchKind::FirstDominant, Some((0.0, 1.0)))]
    } else if p.a1 > 0.0 {
        let lo = 1.0 - (p.a1 / p.a2) * (p.a1 / p.a2);
        vec![direct(BranchKind::SecondDominant, Some((lo, 1.0)))]
    } else {
        // a1 = 0 < a2: the right-hand side of the parameter equation is
        // negative for every k < 1, so this order admits no solution.
        Vec::new()
    }
}

/// Every family of solutions for the parameters, in both factor orders.
/// When a1 = a2 the two orders coincide and only the direct one is kept,
/// so the count realizes the trichotomy: both connections flat -> 1 family,
/// exactly one flat -> 1 family, neither flat -> 2 families.
pub fn families(p: &JoinParams) -> Vec<Family> {
    let mut out = admissible_modulus_range(p);
    if p.a1 != p.a2 {
        out.extend(
            admissible_modulus_range(&p.interchanged())
                .into_iter()
                .map(|f| Family {
                    interchanged: true,
                    ..f
                }),
        );
    }
    out
}

/// Solve the parameter equation for gamma at a fixed elliptic modulus.
pub fn gamma_from_modulus(p: &JoinParams, k: Modulus) -> Result<f64> {
    if k.is_zero() {
        return Err(Error::domain("modulus", 0.0, "k in (0, 1)"));
    }
    let num = p.a1 * p.a1 - k.complement_sq() * p.a2 * p.a2;
    if num <= 0.0 {
        let lo = if p.a2 > 0.0 {
            (1.0 - (p.a1 / p.a2) * (p.a1 / p.a2)).max(0.0)
        } else {
            0.0
        };
        return Err(Error::InadmissibleModulus {
            modulus_sq: k.sq(),
            lo,
            hi: 1.0,
        });
    }
    let s = p.s();
    Ok((num / (s * (s + 3.0) * k.sq() * k.complement_sq())).powf(0.25))
}

/// The constant scalar curvature produced by an admissible pair (k, gamma).
pub fn scalar_from_solution(p: &JoinParams, k: Modulus, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::domain("gamma", gamma, "gamma > 0"));
    }
    let s = p.s();
    let g2 = gamma * gamma;
    Ok(
        p.base.scal() - 2.0 * s * (p.k1 as f64 + 1.0) * g2 * k.sq() + s * (s + 1.0) * g2
            - p.a2 * p.a2 / g2,
    )
}

/// Residual of the parameter equation at (k, gamma); zero on exact solutions.
pub fn qe_residual(p: &JoinParams, k: Modulus, gamma: f64) -> f64 {
    let s = p.s();
    let g4 = gamma * gamma * gamma * gamma;
    (s * (s + 3.0) * g4 * k.sq() * k.complement_sq()
        - (p.a1 * p.a1 - k.complement_sq() * p.a2 * p.a2))
        .abs()
}

/// A solved point of one family: modulus, gamma, profile half-period and the
/// constant total scalar curvature it produces.
#[derive(Clone, Copy, Debug)]
pub struct WarpSolution {
    pub modulus: Modulus,
    pub gamma: f64,
    pub span: f64,
    pub scal_total: f64,
    pub branch: BranchKind,
    pub interchanged: bool,
}

impl WarpSolution {
    /// Solve on an elliptic branch at the given modulus. The branch tag is
    /// inferred from the connection norms.
    pub fn elliptic(p: &JoinParams, k: Modulus) -> Result<WarpSolution> {
        let gamma = gamma_from_modulus(p, k)?;
        let branch = if p.a1 == p.a2 {
            BranchKind::Balanced
        } else if p.a1 > p.a2 {
            BranchKind::FirstDominant
        } else {
            BranchKind::SecondDominant
        };
        Ok(WarpSolution {
            modulus: k,
            gamma,
            span: quarter_period(k) / gamma,
            scal_total: scalar_from_solution(p, k, gamma)?,
            branch,
            interchanged: false,
        })
    }

    /// Solve on a flat branch (k = 0), where gamma is free. Requires equal
    /// connection norms, since the parameter equation at k = 0 reads
    /// 0 = a1^2 - a2^2.
    pub fn flat(p: &JoinParams, gamma: f64) -> Result<WarpSolution> {
        if p.a1 != p.a2 {
            return Err(Error::domain(
                "a1 - a2",
                p.a1 - p.a2,
                "equal connection norms on a flat branch",
            ));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::domain("gamma", gamma, "gamma > 0"));
        }
        let branch = if p.a1 == 0.0 {
            BranchKind::Flat
        } else {
            BranchKind::Round
        };
        Ok(WarpSolution {
            modulus: Modulus::ZERO,
            gamma,
            span: FRAC_PI_2 / gamma,
            scal_total: scalar_from_solution(p, Modulus::ZERO, gamma)?,
            branch,
            interchanged: false,
        })
    }

    fn tagged(self, interchanged: bool) -> WarpSolution {
        WarpSolution {
            interchanged,
            ..self
        }
    }
}

/// The closed-form profile pair of a solution, with derivatives from the
/// elliptic closed forms. At k = 0 this degenerates to
/// f1 = cos(gamma t)/gamma, f2 = sin(gamma t)/gamma.
pub fn build_profiles(sol: &WarpSolution) -> ProfilePair {
    let k = sol.modulus;
    let g = sol.gamma;
    let c = k.complement_sq().sqrt();
    let first = Profile::new(
        move |t| jacobi(g * t, k).cn / (g * c),
        move |t| jacobi_derivatives(g * t, k).cn_d / c,
        move |t| g * jacobi_derivatives(g * t, k).cn_dd / c,
    );
    let second = Profile::new(
        move |t| jacobi(g * t, k).sn / g,
        move |t| jacobi_derivatives(g * t, k).sn_d,
        move |t| g * jacobi_derivatives(g * t, k).sn_dd,
    );
    ProfilePair::new(sol.span, first, second).expect("solution span is positive by construction")
}

/// Maximum deviation of the evaluated total scalar curvature from the
/// solution's constant over a uniform grid in [T/100, T - T/100]. This is
/// the independent check of the whole construction: the curvature
/// functional knows nothing about the parameter equation.
pub fn verify_residual(p: &JoinParams, sol: &WarpSolution, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::domain("grid size", grid_size as f64, ">= 2"));
    }
    let profiles = build_profiles(sol);
    let consts = p.constants();
    let lo = sol.span / 100.0;
    let hi = sol.span - lo;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let mut max_dev = 0.0f64;
    for i in 0..grid_size {
        let t = lo + step * i as f64;
        let value = scal_join_total(&p.base, &consts, &profiles, t)?;
        max_dev = max_dev.max((value - sol.scal_total).abs());
    }
    Ok(max_dev)
}

/// Largest violations of the two conservation identities
/// (1-k^2) f1^2 + f2^2 = 1/gamma^2 and (1-k^2) f1 f1' + f2 f2' = 0
/// over a uniform grid on [0, T].
pub fn conservation_residuals(sol: &WarpSolution, grid_size: usize) -> Result<(f64, f64)> {
    if grid_size < 2 {
        return Err(Error::domain("grid size", grid_size as f64, ">= 2"));
    }
    let profiles = build_profiles(sol);
    let comp = sol.modulus.complement_sq();
    let inv_g2 = 1.0 / (sol.gamma * sol.gamma);
    let step = sol.span / (grid_size - 1) as f64;
    let (mut metric, mut deriv) = (0.0f64, 0.0f64);
    for i in 0..grid_size {
        let t = step * i as f64;
        let f1 = profiles.first.value(t);
        let f2 = profiles.second.value(t);
        let d1 = profiles.first.deriv(t);
        let d2 = profiles.second.deriv(t);
        metric = metric.max((comp * f1 * f1 + f2 * f2 - inv_g2).abs());
        deriv = deriv.max((comp * f1 * d1 + f2 * d2).abs());
    }
    Ok((metric, deriv))
}

/// One family with its sampled solutions, ordered by increasing modulus
/// (flat branches: by increasing gamma).
#[derive(Clone, Debug)]
pub struct FamilySamples {
    pub family: Family,
    pub solutions: Vec<WarpSolution>,
}

/// Sample every family of the parameters. Elliptic branches take midpoint
/// samples of the admissible k^2 interval; flat branches sweep gamma
/// geometrically over [1/4, 4].
pub fn family_scan(p: &JoinParams, n_points: usize) -> Result<Vec<FamilySamples>> {
    if n_points < 2 {
        return Err(Error::domain("n_points", n_points as f64, ">= 2"));
    }
    families(p)
        .into_iter()
        .map(|family| {
            let oriented = if family.interchanged {
                p.interchanged()
            } else {
                *p
            };
            let solutions: Result<Vec<WarpSolution>> = match family.modulus_sq_range {
                Some((lo, hi)) => (0..n_points)
                    .into_par_iter()
                    .map(|j| {
                        let mid = lo + (hi - lo) * (j as f64 + 0.5) / n_points as f64;
                        let k_sq = mid.clamp(
                            PROBE_MODULUS_MIN * PROBE_MODULUS_MIN,
                            PROBE_MODULUS_MAX * PROBE_MODULUS_MAX,
                        );
                        let k = Modulus::from_sq(k_sq)?;
                        Ok(WarpSolution::elliptic(&oriented, k)?.tagged(family.interchanged))
                    })
                    .collect(),
                None => (0..n_points)
                    .into_par_iter()
                    .map(|j| {
                        let gamma = 0.25 * 16.0f64.powf(j as f64 / (n_points - 1) as f64);
                        Ok(WarpSolution::flat(&oriented, gamma)?.tagged(family.interchanged))
                    })
                    .collect(),
            };
            Ok(FamilySamples {
                family,
                solutions: solutions?,
            })
        })
        .collect()
}

/// Which end of the admissible modulus interval a probe approaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

/// One probe sample near an interval endpoint.
#[derive(Clone, Copy, Debug)]
pub struct LimitSample {
    pub k: f64,
    pub gamma: f64,
    /// R - base: the part of the constant that the limit statements control.
    pub scal_gap: f64,
}

/// Sample R - base along a geometric approach to an endpoint of the
/// family's modulus interval. Moduli are clamped to
/// [`PROBE_MODULUS_MIN`, `PROBE_MODULUS_MAX`], so this reports a sampled
/// tail, never an asserted limit. The j-th sample sits at distance
/// (hi - lo)/10^(j+1) from the endpoint, in modulus units.
pub fn limit_probe(
    p: &JoinParams,
    family: &Family,
    endpoint: Endpoint,
    n_points: usize,
) -> Result<Vec<LimitSample>> {
    let (lo_sq, _hi_sq) = family.modulus_sq_range.ok_or_else(|| {
        Error::domain("branch", 0.0, "an elliptic branch with a modulus interval")
    })?;
    if n_points < 1 {
        return Err(Error::domain("n_points", n_points as f64, ">= 1"));
    }
    let oriented = if family.interchanged {
        p.interchanged()
    } else {
        *p
    };
    let lo_k = lo_sq.sqrt();
    let span_k = 1.0 - lo_k;
    (0..n_points)
        .map(|j| {
            let delta = span_k / 10.0f64.powi(j as i32 + 1);
            let k_val = match endpoint {
                Endpoint::Lower => lo_k + delta,
                Endpoint::Upper => 1.0 - delta,
            };
            let k = Modulus::new(k_val.clamp(PROBE_MODULUS_MIN, PROBE_MODULUS_MAX))?;
            let gamma = gamma_from_modulus(&oriented, k)?;
            let scal = scalar_from_solution(&oriented, k, gamma)?;
            Ok(LimitSample {
                k: k.get(),
                gamma,
                scal_gap: scal - oriented.base.scal(),
            })
        })
        .collect()
}
