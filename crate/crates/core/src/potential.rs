//! The explicit inverse `T = (-L)^{-1}` on radial data, its gradient
//! companion `S`, the closed-form constants those operators satisfy, and a
//! demonstration of how the gradient estimate degenerates at the critical
//! coefficient growth.
//!
//! For radial `f` the N-dimensional Newtonian convolution collapses to the
//! exact one-dimensional Green's form
//!
//! ```text
//! u(r) = (N-2)^{-1} [ r^{2-N} int_0^r g(s) s^{N-1} ds + int_r^inf g(s) s ds ],
//! g = f / (1 + s^alpha),
//! ```
//!
//! which this module integrates product-exactly (piecewise-linear data
//! against power weights), so no singular cubature is ever needed.

use crate::error::{Error, Result};
use crate::grid::RadialFunction;
use crate::kernel::radial_kernel_integral;
use crate::params::OperatorParams;
use crate::quad::{
    integrate_panels, linear_cell_moment, radial_moment, unit_ball_volume, unit_sphere_area,
};
use crate::report::{params_map, BoundReport};

/// Relative tolerance for the closed-form kernel identity checks (the
/// quadrature itself is good to ~1e-12; 1e-9 leaves headroom).
const IDENTITY_REL_TOL: f64 = 1e-9;

/// Normalization of the Newtonian kernel: `C_N = 1/(N(2-N) w_N)`.
///
/// Negative in every dimension covered here; the inverse `T` is still a
/// positive operator because the constant multiplies a kernel written with
/// the opposite sign. The constant is stored (rather than its absolute
/// value) because the weighted-kernel identity below needs both sides with
/// their true signs.
pub fn newtonian_constant(dim: u32) -> f64 {
    let n = dim as f64;
    1.0 / (n * (2.0 - n) * unit_ball_volume(dim))
}

/// The radial Green's kernel of `-L` with its normalization.
#[derive(Debug, Clone, Copy)]
pub struct ResolventKernel {
    params: OperatorParams,
    /// `1/(N(2-N) w_N)`, kept with its (negative) sign.
    c_n: f64,
}

impl ResolventKernel {
    pub fn new(params: OperatorParams) -> Self {
        Self {
            params,
            c_n: newtonian_constant(params.dim()),
        }
    }

    pub fn params(&self) -> OperatorParams {
        self.params
    }

    pub fn normalization(&self) -> f64 {
        self.c_n
    }

    /// Kernel singularity exponent `N - 2`.
    pub fn exponent(&self) -> f64 {
        self.params.n() - 2.0
    }
}

/// Constant of the weighted-kernel identity: with `2 < beta < N`,
/// `C_N int |x-y|^{2-N} |y|^{-beta} dy = |x|^{2-beta} / ((2-beta)(N-beta))`.
/// Returns `1/((2-beta)(N-beta))` (negative: both sides are negative).
pub fn newtonian_weight_constant(dim: u32, beta: f64) -> Result<f64> {
    let n = dim as f64;
    if !(beta > 2.0 && beta < n) {
        return Err(Error::InvalidParams(format!(
            "weight exponent must satisfy 2 < beta < N = {n}, got {beta}"
        )));
    }
    Ok(1.0 / ((2.0 - beta) * (n - beta)))
}

/// Checks the weighted-kernel identity by quadrature at `|x| = x_norm`:
/// probe `C_N int |x-y|^{2-N}|y|^{-beta} dy` versus closed form
/// `|x|^{2-beta}/((2-beta)(N-beta))`.
pub fn verify_newtonian_weight_identity(dim: u32, beta: f64, x_norm: f64) -> Result<BoundReport> {
    let constant = newtonian_weight_constant(dim, beta)?;
    if !(x_norm > 0.0) {
        return Err(Error::InvalidParams(
            "identity check needs a positive radius (both sides diverge at 0)".into(),
        ));
    }
    let closed = constant * x_norm.powf(2.0 - beta);
    let kernel = radial_kernel_integral(
        x_norm,
        dim as f64 - 2.0,
        dim,
        &|rho: f64| rho.powf(-beta),
        beta,
    )?;
    let probe = newtonian_constant(dim) * kernel;
    Ok(BoundReport::identity(
        "newtonian_weight_identity",
        params_map(&[("n", dim as f64), ("beta", beta), ("x_norm", x_norm)]),
        closed,
        probe,
        IDENTITY_REL_TOL * closed.abs(),
    ))
}

/// Cumulative integrals of `g = f/(1+s^alpha)` needed by the Green's form:
/// `inner[i] = int_0^{r_i} g s^{N-1} ds` and
/// `outer[i] = int_{r_i}^inf g s ds` (analytic power tail past the grid).
fn greens_cumulatives(f: &RadialFunction, params: &OperatorParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = f.grid.nodes();
    if nodes[0] != 0.0 {
        return Err(Error::InvalidParams(
            "Green's form integrates from the origin; the grid must start at 0".into(),
        ));
    }
    let n = params.n();
    let g: Vec<f64> = nodes
        .iter()
        .zip(&f.values)
        .map(|(&r, &v)| v / params.coefficient(r))
        .collect();

    let mut inner = vec![0.0; nodes.len()];
    for i in 0..nodes.len() - 1 {
        inner[i + 1] =
            inner[i] + linear_cell_moment(nodes[i], nodes[i + 1], g[i], g[i + 1], n - 1.0);
    }

    // Tail of int g s ds: g ~ c s^{-(d_f + alpha)}; converges iff d_f + alpha > 2.
    let mut outer = vec![0.0; nodes.len()];
    let g_last = *g.last().unwrap();
    let r_max = *nodes.last().unwrap();
    let tail = match f.decay_exponent {
        Some(d_f) if g_last != 0.0 => {
            let d_g = d_f + params.alpha();
            if d_g <= 2.0 {
                return Err(Error::DivergentTail { rate: 1.0 - d_g });
            }
            g_last * r_max * r_max / (d_g - 2.0)
        }
        _ => 0.0,
    };
    let last = nodes.len() - 1;
    outer[last] = tail;
    for i in (0..last).rev() {
        outer[i] = outer[i + 1] + linear_cell_moment(nodes[i], nodes[i + 1], g[i], g[i + 1], 1.0);
    }
    Ok((inner, outer))
}

/// Decay exponent to tag onto `u = Tf`: the Newtonian rate `N-2` when the
/// source decays fast enough to have finite total mass against `s^{N-1}`,
/// otherwise the slower source-driven rate `d_f + alpha - 2`.
fn resolvent_decay(f: &RadialFunction, params: &OperatorParams) -> f64 {
    let n = params.n();
    match f.decay_exponent {
        Some(d_f) if d_f + params.alpha() <= n => d_f + params.alpha() - 2.0,
        _ => n - 2.0,
    }
}

/// `u = Tf`: the inverse of `-L` applied to radial data.
///
/// Output is tagged with the power rate at which `u` decays (usually `N-2`).
/// Fails with a divergence error when the source's tail is too fat for the
/// Green's integral.
pub fn apply_resolvent(f: &RadialFunction, params: &OperatorParams) -> Result<RadialFunction> {
    let (inner, outer) = greens_cumulatives(f, params)?;
    let nodes = f.grid.nodes();
    let n = params.n();
    let scale = 1.0 / (n - 2.0);
    let values: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if i == 0 {
                // r^{2-N} * inner vanishes like r^2 at the origin.
                scale * outer[0]
            } else {
                scale * (r.powf(2.0 - n) * inner[i] + outer[i])
            }
        })
        .collect();
    RadialFunction::new(f.grid.clone(), values, Some(resolvent_decay(f, params)))
}

/// `u'(r)` for `u = Tf`, computed analytically from the Green's form
/// (`u'(r) = -r^{1-N} int_0^r g s^{N-1} ds`), not by differencing `u`.
pub fn apply_gradient_operator(
    f: &RadialFunction,
    params: &OperatorParams,
) -> Result<RadialFunction> {
    let (inner, _) = greens_cumulatives(f, params)?;
    let nodes = f.grid.nodes();
    let n = params.n();
    let values: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if i == 0 {
                0.0
            } else {
                -r.powf(1.0 - n) * inner[i]
            }
        })
        .collect();
    let decay = resolvent_decay(f, params) + 1.0;
    RadialFunction::new(f.grid.clone(), values, Some(decay))
}

/// Closed-form constant of the weighted resolvent estimate
/// `|| |x|^beta Tf ||_p <= C || f ||_p`:
///
/// `C = p^2/((N + beta p)(Np - N - beta p - 2p))
///      * ((2+beta)/(alpha-2+beta))^((2+beta)/alpha)
///      * (alpha-2+beta)/(alpha+2beta)`.
pub fn chius_constant(params: &OperatorParams, beta: f64) -> Result<f64> {
    let p = params.p_required()?;
    let (n, alpha) = (params.n(), params.alpha());
    let p_conj = params.p_conjugate()?;
    if !(beta >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "weight exponent must be nonnegative, got {beta}"
        )));
    }
    if beta > alpha - 2.0 {
        return Err(Error::InvalidParams(format!(
            "weighted estimate needs beta <= alpha - 2 = {}, got {beta}",
            alpha - 2.0
        )));
    }
    if beta >= n / p_conj - 2.0 {
        return Err(Error::InvalidParams(format!(
            "weighted estimate needs beta < N/p' - 2 = {}, got {beta}",
            n / p_conj - 2.0
        )));
    }
    let kernel_factor = p * p / ((n + beta * p) * (n * p - n - beta * p - 2.0 * p));
    let coefficient_factor = ((2.0 + beta) / (alpha - 2.0 + beta)).powf((2.0 + beta) / alpha)
        * (alpha - 2.0 + beta)
        / (alpha + 2.0 * beta);
    Ok(kernel_factor * coefficient_factor)
}

/// Closed-form bound on the `L^p` operator norm of `T`
/// (the weighted constant at `beta = 0`):
/// `||T||_p <= (2/(alpha-2))^(2/alpha) (alpha-2)/alpha p^2/(N(Np-N-2p))`.
pub fn resolvent_norm_bound(params: &OperatorParams) -> Result<f64> {
    let p = params.p_required()?;
    let (n, alpha) = (params.n(), params.alpha());
    Ok(
        (2.0 / (alpha - 2.0)).powf(2.0 / alpha) * (alpha - 2.0) / alpha * p * p
            / (n * (n * p - n - 2.0 * p)),
    )
}

/// A family of test functions together with the weight exponents at which
/// the weighted resolvent estimate will be probed.
#[derive(Debug, Clone)]
pub struct WeightedEstimateProbe {
    pub beta: f64,
    pub gamma: f64,
    /// Closed-form constant for the `beta` branch.
    pub constant_c: f64,
    pub probe_functions: Vec<RadialFunction>,
}

impl WeightedEstimateProbe {
    /// Validates the exponents against the estimate's hypotheses and
    /// computes the closed-form constant.
    pub fn new(
        params: &OperatorParams,
        beta: f64,
        gamma: f64,
        probe_functions: Vec<RadialFunction>,
    ) -> Result<Self> {
        let constant_c = chius_constant(params, beta)?;
        let p_conj = params.p_conjugate()?;
        let (n, alpha) = (params.n(), params.alpha());
        if !(gamma >= 0.0) || gamma > alpha - 1.0 || gamma >= n / p_conj - 1.0 {
            return Err(Error::InvalidParams(format!(
                "gradient weight needs 0 <= gamma <= alpha-1 and gamma < N/p'-1, got {gamma}"
            )));
        }
        Ok(Self {
            beta,
            gamma,
            constant_c,
            probe_functions,
        })
    }
}

/// `(N w_N int |f|^p r^(q p + N - 1) dr)^(1/p)`: the `L^p` norm of
/// `|x|^q f`.
fn power_weighted_lp(f: &RadialFunction, p: f64, dim: u32, q: f64) -> Result<f64> {
    let integral = radial_moment(&f.abs_powered(p), dim as f64 - 1.0 + q * p)?;
    Ok((unit_sphere_area(dim) * integral).powf(1.0 / p))
}

/// Measures both branches of the weighted estimate over the probe family.
///
/// The report's closed form is the `beta`-branch constant; its probe value
/// is the worst measured ratio `|| |x|^beta Tf ||_p / ||f||_p`. The
/// gradient branch has no displayed closed-form constant, so its worst
/// ratio is checked for finiteness only and recorded in the note.
pub fn verify_weighted_estimate(
    probe: &WeightedEstimateProbe,
    params: &OperatorParams,
) -> Result<BoundReport> {
    let p = params.p_required()?;
    let dim = params.dim();
    let mut worst_beta: f64 = 0.0;
    let mut worst_gamma: f64 = 0.0;
    for f in &probe.probe_functions {
        let f_norm = power_weighted_lp(f, p, dim, 0.0)?;
        if f_norm == 0.0 {
            continue; // ratio defined as 0 for the zero function
        }
        let u = apply_resolvent(f, params)?;
        let du = apply_gradient_operator(f, params)?;
        let ratio_beta = power_weighted_lp(&u, p, dim, probe.beta)? / f_norm;
        let ratio_gamma = power_weighted_lp(&du, p, dim, probe.gamma)? / f_norm;
        if !ratio_gamma.is_finite() {
            return Err(Error::NonConvergence(
                "gradient-branch probe ratio is not finite".into(),
            ));
        }
        worst_beta = worst_beta.max(ratio_beta);
        worst_gamma = worst_gamma.max(ratio_gamma);
    }
    let report = BoundReport::new(
        "weighted_resolvent_estimate",
        params_map(&[
            ("n", dim as f64),
            ("alpha", params.alpha()),
            ("p", p),
            ("beta", probe.beta),
            ("gamma", probe.gamma),
        ]),
        probe.constant_c,
        worst_beta,
        1e-12,
    );
    Ok(report.with_note(format!(
        "gradient branch finite: worst ratio {worst_gamma:.6e} (no closed-form comparator)"
    )))
}

/// Quintic smoothstep: `0 -> 1` on `[0, 1]` with two vanishing derivatives
/// at both ends. `sup|s'| = 15/8`, `sup|s''| = 10 sqrt(3)/3 ~ 5.7735`.
pub(crate) fn smoothstep5(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

fn smoothstep5_d1(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

fn smoothstep5_d2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}

/// The cutoff profile for the failure demo: 1 on `[2, R]`, smoothly rising
/// on `[1, 2]` and falling on `[R, 2R]` (so `|phi'| <= (15/8)/R` on the
/// outer ramp and `|phi''| <= 5.78/R^2`).
fn cutoff(rho: f64, r: f64) -> (f64, f64, f64) {
    if rho < 2.0 {
        // Rising ramp on [1, 2].
        (
            smoothstep5(rho - 1.0),
            smoothstep5_d1(rho - 1.0),
            smoothstep5_d2(rho - 1.0),
        )
    } else if rho <= r {
        (1.0, 0.0, 0.0)
    } else {
        // Falling ramp on [R, 2R]: phi = s((2R - rho)/R).
        let t = (2.0 * r - rho) / r;
        (
            smoothstep5(t),
            -smoothstep5_d1(t) / r,
            smoothstep5_d2(t) / (r * r),
        )
    }
}

/// Demonstrates that the gradient estimate cannot hold with an
/// `R`-independent constant at the critical growth `alpha = N/p'`.
///
/// For each `R`, builds `u_R = phi_R(rho) rho^{2-N}` and returns
/// `(R, ||(1 + rho^{alpha-1}) u_R'||_p / ||L u_R||_p)`. The denominator is
/// bounded uniformly in `R` while the numerator grows like `(log R)^{1/p}`,
/// so the ratios must increase without bound.
pub fn estimate_failure_demo(params: &OperatorParams, r_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let p = params.p_required()?;
    let p_conj = params.p_conjugate()?;
    let (n, alpha) = (params.n(), params.alpha());
    if (alpha - n / p_conj).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "failure demo needs the critical growth alpha = N/p' = {}, got {alpha}",
            n / p_conj
        )));
    }
    if r_values.windows(2).any(|w| w[1] <= w[0]) || r_values.iter().any(|&r| r < 2.0) {
        return Err(Error::InvalidParams(
            "radii must be increasing and at least 2".into(),
        ));
    }
    let area = unit_sphere_area(params.dim());
    let mut out = Vec::with_capacity(r_values.len());
    for &r in r_values {
        // u = phi rho^{2-N}:
        //   u'      = phi' rho^{2-N} + (2-N) phi rho^{1-N}
        //   Delta u = phi'' rho^{2-N} + (3-N) phi' rho^{1-N}
        let num_integrand = |rho: f64| {
            let (phi, dphi, _) = cutoff(rho, r);
            let du = dphi * rho.powf(2.0 - n) + (2.0 - n) * phi * rho.powf(1.0 - n);
            ((1.0 + rho.powf(alpha - 1.0)) * du).abs().powf(p) * rho.powf(n - 1.0)
        };
        let den_integrand = |rho: f64| {
            let (_, dphi, ddphi) = cutoff(rho, r);
            let lap = ddphi * rho.powf(2.0 - n) + (3.0 - n) * dphi * rho.powf(1.0 - n);
            ((1.0 + rho.powf(alpha)) * lap).abs().powf(p) * rho.powf(n - 1.0)
        };
        // Panels respect the piecewise structure {1, 2, R, 2R}; the plateau
        // [2, R] spans decades, so subdivide it geometrically.
        let mut pts = vec![1.0, 1.25, 1.5, 1.75, 2.0];
        let decades = ((r / 2.0).log10() * 8.0).ceil().max(1.0) as usize;
        let plateau: Vec<f64> = (1..=decades)
            .map(|i| 2.0 * (r / 2.0).powf(i as f64 / decades as f64))
            .collect();
        pts.extend(plateau);
        pts.extend((1..=8).map(|i| r + r * i as f64 / 8.0));
        let num = (area * integrate_panels(num_integrand, &pts)).powf(1.0 / p);
        let den = (area * integrate_panels(den_integrand, &pts)).powf(1.0 / p);
        out.push((r, num / den));
    }
    Ok(out)
}

/// Least-squares slope of `ratio^p` against `log R` — the failure demo's
/// growth is consistent with `(log R)^{1/p}` exactly when this is near 1
/// after normalizing by the level (fits `ratio^p = a + b log R` and returns
/// the exponent estimate from a log-log fit of increments).
pub fn failure_growth_exponent(points: &[(f64, f64)], p: f64) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::FitFailure(
            "need at least three radii to fit the growth".into(),
        ));
    }
    // Fit log(ratio^p) = c + q log(log R): q is the exponent of log R.
    let xs: Vec<f64> = points.iter().map(|(r, _)| r.ln().ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|(_, ratio)| (ratio.powf(p)).ln())
        .collect();
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(Error::FitFailure("degenerate abscissae".into()));
    }
    Ok((m * sxy - sx * sy) / denom)
}
