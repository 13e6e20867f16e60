//! Counting constant-scalar-curvature metrics in the conformal class of a
//! round sphere factor: eigenvalue threshold predicates and a shooting
//! counter for positive radial solutions of the subcritical equation
//!
//! ```text
//! -a_N  Δ v + R v = R v^{p_N - 1},    a_N = 4(N-1)/(N-2),  p_N = 2N/(N-2)
//! ```
//!
//! on S^d(r) with N > d. Solutions v > 0 correspond to constant-curvature
//! metrics in the conformal class; v = 1 is always one of them.
//!
//! Radial reduction: for a function of the polar distance t from a pole of
//! S^d(r), the Laplacian is Δv = v'' + ((d-1)/r) cot(t/r) v', since the
//! distance sphere at radius t has mean curvature (1/r) cot(t/r) in each of
//! its d-1 directions. Dividing by -a_N puts the equation in the form
//!
//! ```text
//! v'' + ((d-1)/r) cot(t/r) v' + (R/a_N) (v^{p_N - 1} - v) = 0,  t in (0, pi r),
//! ```
//!
//! with Neumann data at both poles (d = 1 is the circle, seen as [0, pi r]
//! with even reflection; the cot term is absent).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, Termination};

/// The subcritical problem data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YamabeProblem {
    n: u32,
    scal: f64,
    d: u32,
    radius: f64,
}

impl YamabeProblem {
    pub fn new(n: u32, scal: f64, d: u32, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("n", n as f64, "n >= 3"));
        }
        if d < 1 || d >= n {
            return Err(Error::domain("d", d as f64, "1 <= d < n"));
        }
        if !scal.is_finite() || scal <= 0.0 {
            return Err(Error::domain("scal", scal, "R > 0"));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::domain("radius", radius, "r > 0"));
        }
        Ok(YamabeProblem { n, scal, d, radius })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn scal(&self) -> f64 {
        self.scal
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// l-th nonzero Laplace eigenvalue of the round S^d(r).
    pub fn eigenvalue(&self, l: u32) -> f64 {
        let l = l as f64;
        l * (l + self.d as f64 - 1.0) / (self.radius * self.radius)
    }

    fn threshold(&self) -> f64 {
        self.scal / (self.n as f64 - 1.0)
    }
}

/// The dimensional constants (a_n, p_n) of the conformal Laplacian.
pub fn yamabe_constants(n: u32) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::domain("n", n as f64, "n >= 3"));
    }
    let nf = n as f64;
    Ok((4.0 * (nf - 1.0) / (nf - 2.0), 2.0 * nf / (nf - 2.0)))
}

/// Spectral bound under which v = 1 is the only positive solution:
/// lambda_1 >= R/(N-1) on the circle, and the slightly stronger Ricci form
/// d/r^2 >= R/(N-1) on spheres of dimension >= 2.
pub fn uniqueness_predicate(p: &YamabeProblem) -> bool {
    let lhs = if p.d == 1 {
        1.0 / (p.radius * p.radius)
    } else {
        p.d as f64 / (p.radius * p.radius)
    };
    lhs >= p.threshold()
}

/// True when lambda_l < R/(N-1), which guarantees at least l+1 radial
/// solutions.
pub fn multiplicity_predicate(p: &YamabeProblem, l: u32) -> Result<bool> {
    if l < 1 {
        return Err(Error::domain("l", l as f64, "l >= 1"));
    }
    Ok(p.eigenvalue(l) < p.threshold())
}

/// 1 + the largest l whose eigenvalue clears the multiplicity threshold
/// (1 when none does: only the constant solution is guaranteed).
pub fn guaranteed_lower_bound(p: &YamabeProblem) -> u32 {
    let mut l = 0;
    while p.eigenvalue(l + 1) < p.threshold() {
        l += 1;
    }
    1 + l
}

/// One evaluated threshold inequality. The margin is oriented so that a
/// positive value means the predicate holds.
#[derive(Clone, Copy, Debug)]
pub struct PredicateCheck {
    pub id: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl PredicateCheck {
    fn le(id: &'static str, lhs: f64, rhs: f64) -> Self {
        PredicateCheck {
            id,
            holds: lhs <= rhs,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    fn gt(id: &'static str, lhs: f64, rhs: f64) -> Self {
        PredicateCheck {
            id,
            holds: lhs > rhs,
            lhs,
            rhs,
            margin: lhs - rhs,
        }
    }
}

/// A batch of threshold predicates together with the scalar curvature of
/// the metric they describe.
#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub checks: Vec<PredicateCheck>,
    pub scal: f64,
}

/// The four predicates for the product S^m(1) x S^k(r), whose scalar
/// curvature is m(m-1) + k(k-1)/r^2:
///
/// - `product-1`: (m-1) r^2 <= k            (factor-one conformal regime)
/// - `product-2`: (k-1) / r^2 <= m          (same with the roles swapped)
/// - `product-3`: m(m-1) r^2 > l(l+k-1)(m+k-1) - k(k-1)
/// - `product-4`: k(k-1)/r^2 > l(l+m-1)(m+k-1) - m(m-1)
///
/// Predicates 3 and 4 are the multiplicity thresholds for a conformal
/// factor radial on the second and first sphere respectively; see
/// [`multiplicity_predicate`].
pub fn product_thresholds(m: u32, k: u32, r: f64, l: u32) -> Result<ThresholdReport> {
    if m < 1 || k < 1 || m + k < 3 {
        return Err(Error::domain(
            "m + k",
            (m + k) as f64,
            "m, k >= 1 and m + k >= 3",
        ));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::domain("r", r, "r > 0"));
    }
    if l < 1 {
        return Err(Error::domain("l", l as f64, "l >= 1"));
    }
    let (mf, kf, lf) = (m as f64, k as f64, l as f64);
    let scal = mf * (mf - 1.0) + kf * (kf - 1.0) / (r * r);
    let checks = vec![
        PredicateCheck::le("product-1", (mf - 1.0) * r * r, kf),
        PredicateCheck::le("product-2", (kf - 1.0) / (r * r), mf),
        PredicateCheck::gt(
            "product-3",
            mf * (mf - 1.0) * r * r,
            lf * (lf + kf - 1.0) * (mf + kf - 1.0) - kf * (kf - 1.0),
        ),
        PredicateCheck::gt(
            "product-4",
            kf * (kf - 1.0) / (r * r),
            lf * (lf + mf - 1.0) * (mf + kf - 1.0) - mf * (mf - 1.0),
        ),
    ];
    Ok(ThresholdReport { checks, scal })
}

/// The three predicates for a sphere bundle with fiber S^k(r), connection
/// norm a over a unit round base S^m; the scalar curvature is
/// m(m-1) + k(k-1)/r^2 - a^2 r^2. At a = 0 they reduce to the product
/// predicates 1, 2 and 4.
pub fn bundle_thresholds(m: u32, k: u32, a: f64, r: f64, l: u32) -> Result<ThresholdReport> {
    if m < 1 || k < 1 || m + k < 3 {
        return Err(Error::domain(
            "m + k",
            (m + k) as f64,
            "m, k >= 1 and m + k >= 3",
        ));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(Error::domain("a", a, "a >= 0"));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::domain("r", r, "r > 0"));
    }
    if l < 1 {
        return Err(Error::domain("l", l as f64, "l >= 1"));
    }
    let (mf, kf, lf) = (m as f64, k as f64, l as f64);
    let scal = mf * (mf - 1.0) + kf * (kf - 1.0) / (r * r) - a * a * r * r;
    let checks = vec![
        PredicateCheck::le(
            "bundle-1",
            -(a * a / mf) * r.powi(4) + (mf - 1.0) * r * r,
            kf,
        ),
        PredicateCheck::le("bundle-2", -(a * a / kf) * r * r + (kf - 1.0) / (r * r), mf),
        PredicateCheck::gt(
            "bundle-3",
            -a * a * r * r + kf * (kf - 1.0) / (r * r),
            lf * (lf + mf - 1.0) * (mf + kf - 1.0) - mf * (mf - 1.0),
        ),
    ];
    Ok(ThresholdReport { checks, scal })
}

/// Tuning of the shooting scan.
#[derive(Clone, Copy, Debug)]
pub struct ShootingConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_scan: usize,
    /// Far-pole mismatch below which a trajectory counts as a solution.
    pub match_tol: f64,
    /// Initial values closer than this collapse to one solution.
    pub dedup_tol: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_bisect: u32,
    /// Bound the mismatch must still satisfy when the integration is
    /// repeated at halved tolerances (integration-independence check).
    pub residual_cap: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            alpha_min: 0.05,
            alpha_max: 5.0,
            n_scan: 400,
            match_tol: 1e-9,
            dedup_tol: 1e-7,
            rtol: 1e-10,
            atol: 1e-12,
            max_bisect: 60,
            residual_cap: 1e-7,
        }
    }
}

/// Hard cap on |v| during integration; trajectories beyond it are treated
/// as blown up.
const BLOWUP_CAP: f64 = 1e6;
/// Relative offset of the integration endpoints from the poles (d >= 2).
const POLE_OFFSET: f64 = 1e-6;

/// One shot of the initial value problem from v(0) = alpha.
#[derive(Clone, Debug)]
pub struct Shot {
    pub alpha: f64,
    /// Pole-normalized far-end mismatch; None when the trajectory was
    /// excluded before reaching the far pole.
    pub mismatch: Option<f64>,
    /// Why the trajectory was excluded, when it was.
    pub excluded: Option<&'static str>,
    pub end_value: f64,
    pub min_value: f64,
    pub samples: Vec<(f64, f64)>,
}

struct Radial {
    lam: f64,
    exponent: f64,
    d: f64,
    radius: f64,
}

impl Radial {
    /// (R/a_N)(v^{p-1} - v), with the power extended oddly so transient
    /// negative excursions stay meaningful (they are rejected later by the
    /// positivity validation).
    fn forcing(&self, v: f64) -> f64 {
        self.lam * (v.signum() * v.abs().powf(self.exponent) - v)
    }
}

impl crate::ode::OdeSystem<2> for Radial {
    fn rhs(&self, t: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
        dy[0] = y[1];
        let cot = if self.d > 1.0 {
            (self.d - 1.0) / self.radius / (t / self.radius).tan()
        } else {
            0.0
        };
        dy[1] = -cot * y[1] - self.forcing(y[0]);
    }
}

/// Integrate one shot and evaluate the far-pole matching condition.
///
/// For d >= 2 the poles are regular-singular: the generic trajectory
/// diverges like tau^(2-d) in the distance tau from the far pole, while the
/// regular one obeys v'(t) = F(v) tau / d + O(tau^3). The mismatch is
/// therefore measured as (v' - F(v) tau0/d) tau0^(d-1) at tau0 = 1e-6 pi r,
/// which stays O(1) on divergent trajectories and vanishes on regular ones.
/// For d = 1 both poles are regular and the mismatch is plain v'(pi r).
pub fn boundary_mismatch(p: &YamabeProblem, alpha: f64, rtol: f64, atol: f64) -> Result<Shot> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::domain("alpha", alpha, "alpha > 0"));
    }
    let (a_n, p_n) = yamabe_constants(p.n)?;
    let sys = Radial {
        lam: p.scal / a_n,
        exponent: p_n - 1.0,
        d: p.d as f64,
        radius: p.radius,
    };
    let span = std::f64::consts::PI * p.radius;
    let solver = Dopri5 {
        rtol,
        atol,
        max_step: span / 200.0,
        max_steps: 1_000_000,
    };

    let (t0, y0) = if p.d == 1 {
        (0.0, [alpha, 0.0])
    } else {
        // Taylor start off the pole: v''(0) = -F(alpha)/d from the
        // regular-singular balance v'' + (d-1)/t v' + F = 0.
        let t0 = POLE_OFFSET * span;
        let vdd = -sys.forcing(alpha) / sys.d;
        (t0, [alpha + 0.5 * vdd * t0 * t0, vdd * t0])
    };
    let t_end = span - t0;

    let mut min_value = alpha;
    let monitor = |_t: f64, y: &[f64; 2]| {
        min_value = min_value.min(y[0]);
        if p.d == 1 {
            y[0] > 0.0
        } else {
            y[0].abs() < BLOWUP_CAP
        }
    };

    let run = solver.integrate(&sys, t0, y0, t_end, monitor);
    let shot = |mismatch, excluded, end_value, min_value, samples: Vec<(f64, [f64; 2])>| Shot {
        alpha,
        mismatch,
        excluded,
        end_value,
        min_value,
        samples: samples.into_iter().map(|(t, y)| (t, y[0])).collect(),
    };
    match run {
        Ok(out) if out.termination == Termination::Reached => {
            let tau0 = span - t_end;
            let mu = if p.d == 1 {
                out.y[1]
            } else {
                (out.y[1] - sys.forcing(out.y[0]) * tau0 / sys.d) * tau0.powi(p.d as i32 - 1)
            };
            Ok(shot(Some(mu), None, out.y[0], min_value, out.samples))
        }
        Ok(out) => {
            let reason = if p.d == 1 { "non-positive" } else { "blow-up" };
            Ok(shot(None, Some(reason), out.y[0], min_value, out.samples))
        }
        Err(_) => Ok(shot(
            None,
            Some("integration failure"),
            f64::NAN,
            min_value,
            vec![],
        )),
    }
}

/// One accepted radial solution.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub alpha: f64,
    /// Thinned (t, v) trace of the converged trajectory.
    pub samples: Vec<(f64, f64)>,
    /// Far-pole mismatch re-evaluated at halved integrator tolerances.
    pub boundary_residual: f64,
    pub is_constant: bool,
    pub end_value: f64,
}

/// Outcome of the shooting scan.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub count: usize,
    pub solutions: Vec<RadialSolution>,
    pub scan_range: (f64, f64),
    pub guaranteed_lower_bound: u32,
    /// Count after identifying reflection pairs v(t) <-> v(pi r - t).
    pub reflection_collapsed_count: usize,
    /// Initial values whose trajectories were excluded during the scan.
    pub excluded: Vec<f64>,
}

fn thin_samples(samples: &[(f64, f64)], keep: usize) -> Vec<(f64, f64)> {
    if samples.len() <= keep || keep < 2 {
        return samples.to_vec();
    }
    let mut out = Vec::with_capacity(keep);
    for i in 0..keep {
        let idx = i * (samples.len() - 1) / (keep - 1);
        out.push(samples[idx]);
    }
    out
}

/// Scan initial values, bracket sign changes of the far-pole mismatch,
/// bisect each bracket, and validate every converged positive trajectory.
/// The constant solution alpha = 1 is always injected into the scan.
pub fn count_radial_solutions(p: &YamabeProblem, cfg: &ShootingConfig) -> Result<CountReport> {
    if !(cfg.alpha_min > 0.0 && cfg.alpha_max > cfg.alpha_min) {
        return Err(Error::domain(
            "alpha range",
            cfg.alpha_min,
            "0 < alpha_min < alpha_max",
        ));
    }
    if cfg.n_scan < 10 {
        return Err(Error::domain("n_scan", cfg.n_scan as f64, ">= 10"));
    }

    let mut alphas: Vec<f64> = (0..cfg.n_scan)
        .map(|i| {
            cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * i as f64 / (cfg.n_scan - 1) as f64
        })
        .collect();
    if cfg.alpha_min < 1.0 && 1.0 < cfg.alpha_max {
        alphas.push(1.0);
        alphas.sort_by(f64::total_cmp);
        alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }

    let shots: Vec<Shot> = alphas
        .par_iter()
        .map(|&a| boundary_mismatch(p, a, cfg.rtol, cfg.atol))
        .collect::<Result<_>>()?;

    let excluded: Vec<f64> = shots
        .iter()
        .filter(|s| s.excluded.is_some())
        .map(|s| s.alpha)
        .collect();
    let valid: Vec<(f64, f64)> = shots
        .iter()
        .filter_map(|s| s.mismatch.map(|mu| (s.alpha, mu)))
        .collect();

    // Direct hits plus sign-change brackets between neighboring valid shots.
    let mut candidates: Vec<(f64, f64)> = valid
        .iter()
        .filter(|(_, mu)| mu.abs() < cfg.match_tol)
        .copied()
        .collect();
    let brackets: Vec<((f64, f64), (f64, f64))> = valid
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| (w[0], w[1]))
        .collect();
    let roots: Vec<Option<(f64, f64)>> = brackets
        .par_iter()
        .map(|&((mut a, mut mu_a), (mut b, _))| {
            for _ in 0..cfg.max_bisect {
                let mid = 0.5 * (a + b);
                let shot = boundary_mismatch(p, mid, cfg.rtol, cfg.atol).ok()?;
                let mu = shot.mismatch?;
                if mu.abs() < cfg.match_tol || b - a < 1e-13 * mid.max(1.0) {
                    return Some((mid, mu));
                }
                if mu.signum() == mu_a.signum() {
                    a = mid;
                    mu_a = mu;
                } else {
                    b = mid;
                }
            }
            None
        })
        .collect();
    candidates.extend(roots.into_iter().flatten());
    candidates.sort_by(|x, y| f64::total_cmp(&x.0, &y.0));

    // Collapse clusters of nearby candidates, keeping the best mismatch.
    let mut picked: Vec<(f64, f64)> = Vec::new();
    for c in candidates {
        match picked.last_mut() {
            Some(last) if (c.0 - last.0).abs() < cfg.dedup_tol => {
                if c.1.abs() < last.1.abs() {
                    *last = c;
                }
            }
            _ => picked.push(c),
        }
    }

    // Validate: positivity, mismatch under the matching tolerance, and
    // stability of the mismatch under halved integrator tolerances.
    let solutions: Vec<RadialSolution> = picked
        .par_iter()
        .filter_map(|&(alpha, _)| {
            let shot = boundary_mismatch(p, alpha, cfg.rtol, cfg.atol).ok()?;
            let mu = shot.mismatch?;
            if mu.abs() >= cfg.match_tol || shot.min_value <= 0.0 || shot.end_value <= 0.0 {
                return None;
            }
            let refined = boundary_mismatch(p, alpha, 0.5 * cfg.rtol, 0.5 * cfg.atol).ok()?;
            let residual = refined.mismatch?.abs();
            if residual >= cfg.residual_cap {
                return None;
            }
            let flat = shot
                .samples
                .iter()
                .fold(0.0f64, |m, &(_, v)| m.max((v - alpha).abs()));
            Some(RadialSolution {
                alpha,
                samples: thin_samples(&shot.samples, 201),
                boundary_residual: residual,
                is_constant: flat < 1e-9,
                end_value: shot.end_value,
            })
        })
        .collect();

    // Reflection pairing: a non-symmetric solution and its mirror satisfy
    // alpha_i ~ end_j and alpha_j ~ end_i. The far end carries the pole
    // truncation error, so the matching tolerance is loose.
    let mut paired = vec![false; solutions.len()];
    let mut pairs = 0;
    for i in 0..solutions.len() {
        if paired[i] {
            continue;
        }
        for j in i + 1..solutions.len() {
            if paired[j] {
                continue;
            }
            let tol = 1e-3 * solutions[i].alpha.max(1.0);
            if (solutions[i].alpha - solutions[j].end_value).abs() < tol
                && (solutions[j].alpha - solutions[i].end_value).abs() < tol
            {
                paired[i] = true;
                paired[j] = true;
                pairs += 1;
                break;
            }
        }
    }

    Ok(CountReport {
        count: solutions.len(),
        reflection_collapsed_count: solutions.len() - pairs,
        solutions,
        scan_range: (cfg.alpha_min, cfg.alpha_max),
        guaranteed_lower_bound: guaranteed_lower_bound(p),
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensional_constants() {
        assert_eq!(yamabe_constants(3).unwrap(), (8.0, 6.0));
        assert_eq!(yamabe_constants(4).unwrap(), (6.0, 4.0));
        assert_eq!(yamabe_constants(6).unwrap(), (5.0, 3.0));
        assert!(yamabe_constants(2).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(YamabeProblem::new(5, 3.5, 3, 2.0).is_ok());
        assert!(YamabeProblem::new(2, 1.0, 1, 1.0).is_err());
        assert!(YamabeProblem::new(3, 1.0, 3, 1.0).is_err());
        assert!(YamabeProblem::new(5, -1.0, 3, 1.0).is_err());
        assert!(YamabeProblem::new(5, 1.0, 3, 0.0).is_err());
    }

    #[test]
    fn uniqueness_examples() {
        let p = |n, scal, d, r| YamabeProblem::new(n, scal, d, r).unwrap();
        assert!(uniqueness_predicate(&p(3, 1.9, 1, 1.0)));
        assert!(uniqueness_predicate(&p(5, 3.0, 3, 1.0)));
        assert!(!uniqueness_predicate(&p(5, 14.0, 3, 2.0)));
    }

    #[test]
    fn multiplicity_examples() {
        let desk = YamabeProblem::new(5, 3.5, 3, 2.0).unwrap();
        assert!(multiplicity_predicate(&desk, 1).unwrap());
        assert!(!multiplicity_predicate(&desk, 2).unwrap());
        let unit = YamabeProblem::new(5, 3.0, 3, 1.0).unwrap();
        assert!(!multiplicity_predicate(&unit, 1).unwrap());
        assert!(multiplicity_predicate(&desk, 0).is_err());
        // Monotonicity: once false, false for all larger l.
        let mut seen_false = false;
        for l in 1..10 {
            let holds = multiplicity_predicate(&desk, l).unwrap();
            if seen_false {
                assert!(!holds);
            }
            seen_false |= !holds;
        }
    }

    #[test]
    fn lower_bound_examples() {
        let p = |n, scal, d, r| YamabeProblem::new(n, scal, d, r).unwrap();
        assert_eq!(guaranteed_lower_bound(&p(3, 1.9, 1, 1.0)), 1);
        assert_eq!(guaranteed_lower_bound(&p(5, 3.5, 3, 2.0)), 2);
        assert_eq!(guaranteed_lower_bound(&p(3, 2.5, 1, 1.0)), 2);
        // The bound grows without limit in R.
        assert!(guaranteed_lower_bound(&p(5, 4000.0, 3, 2.0)) > 10);
    }

    #[test]
    fn product_threshold_examples() {
        let rep = product_thresholds(2, 3, 1.0, 1).unwrap();
        assert!((rep.scal - 8.0).abs() < 1e-14);
        let p1 = &rep.checks[0];
        assert!(p1.holds && (p1.margin - 2.0).abs() < 1e-14);

        let rep = product_thresholds(2, 3, 2.0, 1).unwrap();
        assert!((rep.scal - 3.5).abs() < 1e-14);
        let p3 = &rep.checks[2];
        assert!(p3.holds && (p3.margin - 2.0).abs() < 1e-12, "{p3:?}");

        assert!(product_thresholds(1, 1, 1.0, 1).is_err());
        assert!(product_thresholds(2, 3, 0.0, 1).is_err());
        assert!(product_thresholds(2, 3, 1.0, 0).is_err());
    }

    #[test]
    fn product_predicate_matches_multiplicity_on_a_grid() {
        // product-3 must agree with the eigenvalue threshold for the
        // conformal factor radial on the second sphere: d = k, N = m + k,
        // R the product scalar curvature.
        let mut tested = 0;
        for m in 2..=5u32 {
            for k in 2..=6u32 {
                for i in 0..5 {
                    let r = 0.4 + 0.9 * i as f64;
                    let rep = product_thresholds(m, k, r, 1).unwrap();
                    let prob = YamabeProblem::new(m + k, rep.scal, k, r).unwrap();
                    assert_eq!(
                        rep.checks[2].holds,
                        multiplicity_predicate(&prob, 1).unwrap(),
                        "m={m} k={k} r={r}"
                    );
                    tested += 1;
                }
            }
        }
        assert!(tested >= 100);
    }

    #[test]
    fn bundle_threshold_examples() {
        // a = 0 reduces the first predicate to its product counterpart.
        let bundle = bundle_thresholds(2, 3, 0.0, 1.3, 1).unwrap();
        let product = product_thresholds(2, 3, 1.3, 1).unwrap();
        assert_eq!(bundle.checks[0].holds, product.checks[0].holds);
        assert!((bundle.checks[0].lhs - product.checks[0].lhs).abs() < 1e-14);
        assert!((bundle.scal - product.scal).abs() < 1e-14);

        let rep = bundle_thresholds(2, 3, 1.0, 1.0, 1).unwrap();
        let b3 = &rep.checks[2];
        assert!(!b3.holds && (b3.margin + 1.0).abs() < 1e-12, "{b3:?}");
        let rep = bundle_thresholds(2, 3, 1.0, 0.5, 1).unwrap();
        let b3 = &rep.checks[2];
        assert!(b3.holds && (b3.margin - 17.75).abs() < 1e-12, "{b3:?}");
    }

    #[test]
    fn bundle_predicate_matches_multiplicity_on_a_grid() {
        // bundle-3 is the threshold for a conformal factor radial on the
        // unit base sphere: d = m, radius 1, R the bundle scalar curvature.
        for m in 2..=4u32 {
            for k in 2..=4u32 {
                for (a, r) in [(0.3, 0.7), (0.5, 1.1), (1.0, 0.9), (0.2, 1.8)] {
                    let rep = bundle_thresholds(m, k, a, r, 1).unwrap();
                    if rep.scal <= 0.0 {
                        continue;
                    }
                    let prob = YamabeProblem::new(m + k, rep.scal, m, 1.0).unwrap();
                    assert_eq!(
                        rep.checks[2].holds,
                        multiplicity_predicate(&prob, 1).unwrap(),
                        "m={m} k={k} a={a} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn bundle_predicate_flips_at_the_margin_root() {
        // For m = 2, k = 3, a = 1, l = 1 the third predicate reads
        // -r^2 + 6/r^2 > 6; substituting x = r^2 gives x^2 + 6x - 6 = 0,
        // so the flip sits at r = sqrt(sqrt(15) - 3).
        let root = (15.0f64.sqrt() - 3.0).sqrt();
        let holds_at = |r: f64| bundle_thresholds(2, 3, 1.0, r, 1).unwrap().checks[2].holds;
        assert!(holds_at(0.5) && !holds_at(2.0));
        let (mut lo, mut hi) = (0.5f64, 2.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if holds_at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(
            (0.5 * (lo + hi) - root).abs() < 1e-9,
            "flip at {}",
            0.5 * (lo + hi)
        );
        let margin = bundle_thresholds(2, 3, 1.0, root, 1).unwrap().checks[2].margin;
        assert!(margin.abs() < 1e-12);
    }

    #[test]
    fn constant_solution_matches_exactly() {
        for (n, scal, d, r) in [(3u32, 2.5, 1u32, 1.0), (5, 3.5, 3, 2.0)] {
            let p = YamabeProblem::new(n, scal, d, r).unwrap();
            let shot = boundary_mismatch(&p, 1.0, 1e-10, 1e-12).unwrap();
            assert!(shot.excluded.is_none());
            assert!(shot.mismatch.unwrap().abs() < 1e-12, "{:?}", shot.mismatch);
            assert!((shot.end_value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_multiplicity_instance() {
        // N = 3, R = 2.5, d = 1, r = 1: lambda_1 = 1 < 1.25, so at least
        // two solutions are guaranteed; the scan finds three, one of them
        // the constant, the other two a reflection pair.
        let p = YamabeProblem::new(3, 2.5, 1, 1.0).unwrap();
        let report = count_radial_solutions(&p, &ShootingConfig::default()).unwrap();
        assert_eq!(report.count, 3, "{:#?}", report.solutions);
        assert_eq!(report.reflection_collapsed_count, 2);
        assert_eq!(report.guaranteed_lower_bound, 2);
        assert!(report.count >= report.guaranteed_lower_bound as usize);
        let alphas: Vec<f64> = report.solutions.iter().map(|s| s.alpha).collect();
        assert!((alphas[0] - 0.690512).abs() < 1e-4, "{alphas:?}");
        assert!((alphas[1] - 1.0).abs() < 1e-9);
        assert!((alphas[2] - 1.201543).abs() < 1e-4);
        assert!(report.solutions[1].is_constant);
        assert!(!report.solutions[0].is_constant);
        for s in &report.solutions {
            assert!(s.boundary_residual < 1e-7);
            assert!(s.samples.iter().all(|&(_, v)| v > 0.0));
        }
    }

    #[test]
    fn circle_uniqueness_instance() {
        // N = 3, R = 1.9, d = 1, r = 1 lies in the uniqueness regime; the
        // scan must find nothing besides the constant.
        let p = YamabeProblem::new(3, 1.9, 1, 1.0).unwrap();
        assert!(uniqueness_predicate(&p));
        let report = count_radial_solutions(&p, &ShootingConfig::default()).unwrap();
        assert_eq!(report.count, 1, "{:#?}", report.solutions);
        assert!((report.solutions[0].alpha - 1.0).abs() < 1e-9);
        assert_eq!(report.guaranteed_lower_bound, 1);
    }

    #[test]
    fn sphere_bundle_desk_instance() {
        // d = 3, N = 5, r = 2, R = 3.5: the product S^2 x S^3(2) case. The
        // far pole is regular-singular, so generic trajectories pick up the
        // divergent 1/tau mode; the pole-normalized mismatch keeps them
        // usable for bracketing. Three roots survive validation, two of
        // them forming a reflection pair; a fourth bracket near alpha 3.6
        // converges to a sign-changing profile and is rejected.
        let p = YamabeProblem::new(5, 3.5, 3, 2.0).unwrap();
        let report = count_radial_solutions(&p, &ShootingConfig::default()).unwrap();
        assert!(report.count >= 2, "{:#?}", report.solutions);
        assert_eq!(report.count, 3);
        assert_eq!(report.reflection_collapsed_count, 2);
        let alphas: Vec<f64> = report.solutions.iter().map(|s| s.alpha).collect();
        assert!((alphas[0] - 0.334918).abs() < 1e-3, "{alphas:?}");
        assert!((alphas[1] - 1.0).abs() < 1e-9);
        assert!((alphas[2] - 1.984753).abs() < 1e-3);
        for s in &report.solutions {
            assert!(s.boundary_residual < 1e-7);
            assert!(s.samples.iter().all(|&(_, v)| v > 0.0));
        }
    }

    #[test]
    fn scan_configuration_is_validated() {
        let p = YamabeProblem::new(3, 2.5, 1, 1.0).unwrap();
        let bad_range = ShootingConfig {
            alpha_min: 0.0,
            ..ShootingConfig::default()
        };
        assert!(count_radial_solutions(&p, &bad_range).is_err());
        let bad_scan = ShootingConfig {
            n_scan: 5,
            ..ShootingConfig::default()
        };
        assert!(count_radial_solutions(&p, &bad_scan).is_err());
        assert!(boundary_mismatch(&p, -1.0, 1e-10, 1e-12).is_err());
    }
}
