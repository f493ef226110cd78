//! Quadratic-form computations: the dissipativity sector angle and a
//! weighted Hardy-type inequality checker.
//!
//! The sector angle comes from the pointwise inequality
//! `a B^2 + C^2 >= l b B C` on the gradient/function parts of the rotated
//! form: the optimal `l` is `2 sqrt(a) / b` by AM-GM, with
//! `a = p - 1 - p alpha / (alpha - 2 + N)` and
//! `b = p - 2 + p alpha / (alpha - 2 + N)`. The angle `theta = atan(l)`
//! is positive exactly when `alpha < (N-2)(p-1)`; at or beyond that
//! threshold the form stops being sectorial and [`sector_angle`] reports it
//! as an error rather than returning a degenerate angle.
//!
//! The Hardy checker verifies, for compactly supported radial profiles,
//!
//! ```text
//! int |u|^p r^(gamma+N-1) dr
//!     <= (p/(gamma+N))^2 int |u|^(p-2) (u')^2 r^(gamma+N+1) dr
//! ```
//!
//! together with the intermediate first-power step
//! `int |u|^p r^(gamma+N-1) <= p/(gamma+N) int |u|^(p-1) |u'| r^(gamma+N)`.
//! Both sides are integrated cell-by-cell with the same quadrature so the
//! comparison is between consistently discretized quantities.

use crate::error::{Error, Result};
use crate::grid::RadialFunction;
use crate::params::OperatorParams;
use crate::quad::gauss_legendre16;
use crate::report::{params_map, BoundReport};

/// Relative slack in the Hardy reports: `LHS <= RHS * (1 + this)`.
pub const HARDY_REL_SLACK: f64 = 1e-8;

/// Log-spaced samples per axis in the independent 2-D minimization of the
/// form quotient (resolution ~0.008 in log, quadratic near the optimum, so
/// the grid minimum sits within ~3e-5 of the closed form).
const GRID_MIN_SAMPLES: usize = 600;

/// Sector-angle data for the rotated dissipativity form.
#[derive(Debug, Clone)]
pub struct SectorAngle {
    pub params: OperatorParams,
    /// Coefficient of the squared gradient part.
    pub a_coeff: f64,
    /// Coefficient of the mixed term.
    pub b_coeff: f64,
    /// Optimal ratio `2 sqrt(a)/b`: the form stays nonnegative after
    /// rotation by any angle with `|tan| <= l_alpha`.
    pub l_alpha: f64,
    /// `atan(l_alpha)`, in `(0, pi/2)`.
    pub theta_alpha: f64,
}

/// Computes the sector angle, failing with the analyticity threshold when
/// the gradient coefficient is nonpositive (`alpha >= (N-2)(p-1)`).
pub fn sector_angle(params: &OperatorParams) -> Result<SectorAngle> {
    let p = params.p_required()?;
    let nf = params.dim() as f64;
    let alpha = params.alpha();
    let x = p * alpha / (alpha - 2.0 + nf);
    let a = p - 1.0 - x;
    let b = p - 2.0 + x;
    if a <= 0.0 {
        return Err(Error::NonAnalyticRegime {
            alpha_limit: (nf - 2.0) * (p - 1.0),
        });
    }
    if b <= 0.0 {
        return Err(Error::InvalidParams(
            "mixed-term coefficient is nonpositive; the angle condition is vacuous".into(),
        ));
    }
    let l = 2.0 * a.sqrt() / b;
    Ok(SectorAngle {
        params: *params,
        a_coeff: a,
        b_coeff: b,
        l_alpha: l,
        theta_alpha: l.atan(),
    })
}

/// Independent oracle: minimizes `(a B^2 + C^2) / (b B C)` over a log-spaced
/// grid `(B, C) in [1e-2, 10]^2`. Agrees with `2 sqrt(a)/b` to the grid
/// resolution when the optimum's ratio `C/B = sqrt(a)` lies in range.
pub fn grid_minimum_quotient(a: f64, b: f64) -> f64 {
    let lo: f64 = 1e-2;
    let hi: f64 = 10.0;
    let step = (hi / lo).ln() / (GRID_MIN_SAMPLES as f64 - 1.0);
    let mut best = f64::INFINITY;
    for i in 0..GRID_MIN_SAMPLES {
        let bb = lo * ((i as f64) * step).exp();
        for j in 0..GRID_MIN_SAMPLES {
            let cc = lo * ((j as f64) * step).exp();
            let q = (a * bb * bb + cc * cc) / (b * bb * cc);
            if q < best {
                best = q;
            }
        }
    }
    best
}

/// Compares the closed-form `l_alpha` against the grid minimization within
/// `tolerance` (two-sided).
pub fn sector_angle_report(params: &OperatorParams, tolerance: f64) -> Result<BoundReport> {
    let angle = sector_angle(params)?;
    let probe = grid_minimum_quotient(angle.a_coeff, angle.b_coeff);
    let prm = params_map(&[
        ("n", params.dim() as f64),
        ("alpha", params.alpha()),
        ("p", params.p_required()?),
    ]);
    Ok(BoundReport::identity(
        "sector_angle_tangent",
        prm,
        angle.l_alpha,
        probe,
        tolerance,
    ))
}

/// Shared preparation for the Hardy checks.
fn hardy_preconditions(u: &RadialFunction, p: f64, gamma: f64) -> Result<()> {
    if !(p > 1.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidParams(
            "Hardy check needs p > 1 and gamma >= 0".into(),
        ));
    }
    if u.decay_exponent.is_some() {
        return Err(Error::InvalidParams(
            "Hardy check needs compactly supported profiles (no declared tail)".into(),
        ));
    }
    let sup = u.sup_norm();
    if u.values.last().copied().unwrap_or(1.0).abs() > 1e-12 * sup.max(1.0) {
        return Err(Error::InvalidParams(
            "profile must vanish at the end of its mesh".into(),
        ));
    }
    Ok(())
}

/// Integrates `g(u(r), u'(r), r)` over the mesh, treating `u` as piecewise
/// linear. Integrand evaluations at exact zeros of `u` use the limit-zero
/// convention for negative powers.
fn integrate_profile<G: Fn(f64, f64, f64) -> f64>(u: &RadialFunction, g: G) -> f64 {
    let nodes = u.grid.nodes();
    let mut total = 0.0;
    for c in 0..nodes.len() - 1 {
        let (a, b) = (nodes[c], nodes[c + 1]);
        let (ua, ub) = (u.values[c], u.values[c + 1]);
        let slope = (ub - ua) / (b - a);
        total += gauss_legendre16(|r: f64| g(ua + slope * (r - a), slope, r), a, b);
    }
    total
}

/// Whether the profile changes sign strictly inside its support (makes the
/// `|u|^(p-2)` factor singular for p < 2).
fn has_interior_sign_change(u: &RadialFunction) -> bool {
    u.values.iter().any(|&v| v < 0.0) && u.values.iter().any(|&v| v > 0.0)
}

/// Full Hardy inequality report: `probe = int |u|^p r^(gamma+N-1)`,
/// `closed = (p/(gamma+N))^2 int |u|^(p-2) u'^2 r^(gamma+N+1)`, satisfied
/// when `probe <= closed (1 + HARDY_REL_SLACK)`.
pub fn hardy_check(u: &RadialFunction, p: f64, gamma: f64, dim: u32) -> Result<BoundReport> {
    hardy_preconditions(u, p, gamma)?;
    let nf = dim as f64;
    let lhs = integrate_profile(u, |v, _, r| v.abs().powf(p) * r.powf(gamma + nf - 1.0));
    let rhs_integral = integrate_profile(u, |v, s, r| {
        if v == 0.0 {
            0.0
        } else {
            v.abs().powf(p - 2.0) * s * s * r.powf(gamma + nf + 1.0)
        }
    });
    let constant = (p / (gamma + nf)).powi(2);
    let closed = constant * rhs_integral;
    let prm = params_map(&[("n", nf), ("p", p), ("gamma", gamma)]);
    let mut report = BoundReport::new(
        "hardy_weighted_power_inequality",
        prm,
        closed,
        lhs,
        HARDY_REL_SLACK * closed.abs(),
    );
    if p < 2.0 && has_interior_sign_change(u) {
        report = report.with_note(
            "p < 2 with an interior sign change: singular integrand handled by the \
             limit-zero convention"
                .to_string(),
        );
    }
    Ok(report)
}

/// Intermediate first-power step of the Hardy proof:
/// `int |u|^p r^(gamma+N-1) <= p/(gamma+N) int |u|^(p-1) |u'| r^(gamma+N)`.
pub fn hardy_intermediate_check(
    u: &RadialFunction,
    p: f64,
    gamma: f64,
    dim: u32,
) -> Result<BoundReport> {
    hardy_preconditions(u, p, gamma)?;
    let nf = dim as f64;
    let lhs = integrate_profile(u, |v, _, r| v.abs().powf(p) * r.powf(gamma + nf - 1.0));
    let rhs_integral = integrate_profile(u, |v, s, r| {
        v.abs().powf(p - 1.0) * s.abs() * r.powf(gamma + nf)
    });
    let closed = p / (gamma + nf) * rhs_integral;
    let prm = params_map(&[("n", nf), ("p", p), ("gamma", gamma)]);
    Ok(BoundReport::new(
        "hardy_first_power_step",
        prm,
        closed,
        lhs,
        HARDY_REL_SLACK * closed.abs(),
    ))
}
