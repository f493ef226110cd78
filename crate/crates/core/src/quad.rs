//! Quadrature: Gauss-Legendre panels, improper tails, and exact product
//! integration of grid functions against power weights.
//!
//! Two kinds of integrand live in this crate. Smooth closures (kernels,
//! coefficient functions) are integrated with composite 16-point
//! Gauss-Legendre panels whose breakpoints the caller chooses to isolate
//! singularities; tails at infinity use a logarithmic substitution so the
//! panel count is proportional to the number of decades, not the length.
//! Grid functions (outputs of solvers) are integrated *exactly* as the
//! piecewise-linear interpolants they are, against `r^q dr`, with an
//! analytic continuation of the declared power tail - so refining the grid
//! converges at the interpolation rate with no quadrature floor.

use crate::error::{Error, Result};
use crate::grid::RadialFunction;

/// Abscissae of the 16-point Gauss-Legendre rule on `[-1, 1]` (positive half).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

/// Weights paired with [`GL16_X`].
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// Relative size at which an improper-tail panel is considered converged.
const TAIL_PANEL_REL_EPS: f64 = 1e-16;

/// Panel budget for improper tails before giving up.
const TAIL_MAX_PANELS: usize = 2000;

/// 16-point Gauss-Legendre rule on `[a, b]` (exact through degree 31).
pub fn gauss_legendre16<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let dx = half * GL16_X[i];
        acc += GL16_W[i] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

/// Composite Gauss-Legendre over consecutive panels `[pts[i], pts[i+1]]`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, pts: &[f64]) -> f64 {
    pts.windows(2)
        .map(|w| gauss_legendre16(&f, w[0], w[1]))
        .sum()
}

/// Geometric breakpoints from `a` to `b` (`a < b`, both positive) with
/// `per_decade` panels per factor of 10. Endpoints are included exactly.
pub fn geometric_breakpoints(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && per_decade >= 1);
    let decades = (b / a).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let ratio = (b / a).powf(1.0 / n as f64);
    let mut pts = Vec::with_capacity(n + 1);
    let mut x = a;
    pts.push(a);
    for _ in 0..n - 1 {
        x *= ratio;
        pts.push(x);
    }
    pts.push(b);
    pts
}

/// `int_a^infty f(r) dr` for integrands decaying like `r^(-decay)`,
/// `decay > 1`. Uses the substitution `r = a e^u` (one Gauss-Legendre panel
/// per e-fold) and stops when a panel is negligible relative to the total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, decay: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParams(format!(
            "tail integral needs a positive finite lower limit, got {a}"
        )));
    }
    if decay <= 1.0 {
        return Err(Error::DivergentTail { rate: -decay });
    }
    let g = |u: f64| {
        let r = a * u.exp();
        f(r) * r
    };
    let mut acc = 0.0;
    let mut zero_streak = 0;
    for k in 0..TAIL_MAX_PANELS {
        let panel = gauss_legendre16(g, k as f64, (k + 1) as f64);
        acc += panel;
        if panel == 0.0 {
            zero_streak += 1;
        } else {
            zero_streak = 0;
        }
        let settled = panel.abs() <= TAIL_PANEL_REL_EPS * acc.abs().max(f64::MIN_POSITIVE);
        if (k >= 3 && settled) || zero_streak >= 2 {
            return Ok(acc);
        }
    }
    Err(Error::NonConvergence(format!(
        "tail integral from {a} still moving after {TAIL_MAX_PANELS} e-folds \
         (declared decay {decay})"
    )))
}

/// Volume of the unit ball in `R^n` via the two-step recursion
/// `w_n = w_{n-2} * 2 pi / n` with `w_1 = 2`, `w_2 = pi` (exact in
/// floating point up to rounding; avoids the gamma function).
pub fn unit_ball_volume(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Surface area of the unit sphere in `R^n`: `n * w_n`.
pub fn unit_sphere_area(n: u32) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// `int_a^b r^q dr`, with the logarithmic branch at `q = -1`.
fn power_primitive(q: f64, a: f64, b: f64) -> f64 {
    if (q + 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(q + 1.0) - a.powf(q + 1.0)) / (q + 1.0)
    }
}

/// Exact `int_a^b (fa + slope (r-a)) r^q dr` for the linear interpolant
/// through `(a, fa)` and `(b, fb)`. Requires `q > -1` when `a = 0`
/// (callers use `q >= 0` there); away from the origin any `q` works.
pub fn linear_cell_moment(a: f64, b: f64, fa: f64, fb: f64, q: f64) -> f64 {
    let slope = (fb - fa) / (b - a);
    if a == 0.0 {
        debug_assert!(q > -1.0);
        return fa * b.powf(q + 1.0) / (q + 1.0) + slope * b.powf(q + 2.0) / (q + 2.0);
    }
    let p0 = power_primitive(q, a, b);
    let p1 = power_primitive(q + 1.0, a, b);
    fa * p0 + slope * (p1 - a * p0)
}

/// `int_0^infty f(r) r^power dr` for a grid function `f`.
///
/// Inside the grid the piecewise-linear interpolant is integrated exactly
/// cell by cell. Beyond the last node the declared tail `c r^(-d)` (with `c`
/// matched to the last sample) is integrated in closed form; it must satisfy
/// `power - d < -1` or the integral diverges. A nonzero sample at the origin
/// requires `power > -1`; a zero sample there relaxes this to `power > -2`.
pub fn radial_moment(f: &RadialFunction, power: f64) -> Result<f64> {
    let nodes = f.grid.nodes();
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = (f.values[i], f.values[i + 1]);
        let slope = (fb - fa) / (b - a);
        if a == 0.0 {
            if fa != 0.0 {
                if power <= -1.0 {
                    return Err(Error::InvalidParams(format!(
                        "moment power {power} <= -1 with nonzero value at the origin"
                    )));
                }
                acc += fa * b.powf(power + 1.0) / (power + 1.0);
            }
            if slope != 0.0 {
                if power <= -2.0 {
                    return Err(Error::InvalidParams(format!(
                        "moment power {power} <= -2 diverges at the origin"
                    )));
                }
                acc += slope * b.powf(power + 2.0) / (power + 2.0);
            }
        } else {
            // f = fa + slope (r - a) on [a, b].
            let p0 = power_primitive(power, a, b);
            let p1 = power_primitive(power + 1.0, a, b);
            acc += fa * p0 + slope * (p1 - a * p0);
        }
    }
    // Analytic tail.
    let r_max = *nodes.last().unwrap();
    let f_last = *f.values.last().unwrap();
    if let Some(d) = f.decay_exponent {
        if f_last != 0.0 {
            if power - d >= -1.0 {
                return Err(Error::DivergentTail { rate: power - d });
            }
            let c = f_last * r_max.powf(d);
            acc += c * r_max.powf(power - d + 1.0) / (d - power - 1.0);
        }
    }
    Ok(acc)
}

/// `L^p(R^N)` norm of a radial grid function:
/// `(N w_N int |f|^p r^(N-1) dr)^(1/p)`.
pub fn lp_norm(f: &RadialFunction, p: f64, dim: u32) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "Lebesgue exponent must be >= 1, got {p}"
        )));
    }
    let integral = radial_moment(&f.abs_powered(p), dim as f64 - 1.0)?;
    Ok((unit_sphere_area(dim) * integral).powf(1.0 / p))
}

/// `L^p` norm against the invariant measure `r^(N-1)/(1 + r^alpha) dr`
/// (surface factor included).
pub fn lp_norm_weighted(f: &RadialFunction, p: f64, dim: u32, alpha: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "Lebesgue exponent must be >= 1, got {p}"
        )));
    }
    let powered = f.abs_powered(p);
    let weighted = RadialFunction::new(
        powered.grid.clone(),
        powered
            .grid
            .nodes()
            .iter()
            .zip(&powered.values)
            .map(|(&r, &v)| v / (1.0 + r.powf(alpha)))
            .collect(),
        powered.decay_exponent.map(|d| d + alpha),
    )?;
    let integral = radial_moment(&weighted, dim as f64 - 1.0)?;
    Ok((unit_sphere_area(dim) * integral).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridScheme, RadialGrid};
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_is_exact_for_high_degree_polynomials() {
        // degree 13 on an asymmetric interval
        let exact = (3.0f64.powi(14) - 1.0) / 14.0;
        let got = gauss_legendre16(|x: f64| x.powi(13), 1.0, 3.0);
        assert!((got - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn panels_integrate_oscillatory_integrands() {
        let pts: Vec<f64> = (0..=20).map(|i| i as f64 * PI / 20.0).collect();
        let got = integrate_panels(|x: f64| x.sin(), &pts);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn geometric_breakpoints_cover_the_interval() {
        let pts = geometric_breakpoints(1e-3, 10.0, 4);
        assert_eq!(pts[0], 1e-3);
        assert_eq!(*pts.last().unwrap(), 10.0);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        assert!(pts.len() >= 17); // 4 decades * 4 panels
    }

    #[test]
    fn improper_tail_matches_closed_forms() {
        let got = integrate_to_infinity(|r| r.powi(-2), 1.0, 2.0).unwrap();
        assert!((got - 1.0).abs() < 1e-13);
        let got = integrate_to_infinity(|r| r.powf(-1.5), 4.0, 1.5).unwrap();
        assert!((got - 1.0).abs() < 1e-12); // int_4^inf r^-1.5 = 2/sqrt(4)
        let got = integrate_to_infinity(|r| (-r).exp(), 1.0, 10.0).unwrap();
        assert!((got - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn improper_tail_rejects_slow_decay() {
        assert_eq!(
            integrate_to_infinity(|r| 1.0 / r, 1.0, 1.0),
            Err(Error::DivergentTail { rate: -1.0 })
        );
    }

    #[test]
    fn unit_ball_volumes_match_closed_forms() {
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-15);
        // w_5 = 8 pi^2 / 15
        assert!((unit_ball_volume(5) - 5.263_789_013_914_324).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn radial_moment_is_exact_for_linear_data() {
        // f(r) = 2r + 1 sampled on an uneven grid; int_0^2 (2r+1) r^2 dr
        // = 2*16/4 + 8/3 = 8 + 8/3 exactly.
        let grid =
            RadialGrid::from_nodes(vec![0.0, 0.3, 0.5, 1.1, 2.0], GridScheme::Uniform).unwrap();
        let f = RadialFunction::sample(grid, |r| 2.0 * r + 1.0, None).unwrap();
        let got = radial_moment(&f, 2.0).unwrap();
        let exact = 8.0 + 8.0 / 3.0;
        assert!((got - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn radial_moment_integrates_power_tails_exactly() {
        // f(r) = r^-3 on [1, 2] with declared tail; int_1^inf r^-3 dr = 1/2.
        let grid = RadialGrid::from_nodes(
            (0..=2000).map(|i| 1.0 + i as f64 * 5e-4).collect(),
            GridScheme::Uniform,
        )
        .unwrap();
        let f = RadialFunction::sample(grid, |r| r.powi(-3), Some(3.0)).unwrap();
        let got = radial_moment(&f, 0.0).unwrap();
        assert!(
            (got - 0.5).abs() < 1e-6,
            "got {got}, want 0.5 (interpolation error only)"
        );
    }

    #[test]
    fn radial_moment_flags_divergent_tails() {
        let grid = RadialGrid::uniform(1.0, 4).unwrap();
        let f = RadialFunction::sample(grid, |r| 1.0 + r, Some(1.0)).unwrap();
        match radial_moment(&f, 0.0) {
            Err(Error::DivergentTail { rate }) => assert!((rate + 1.0).abs() < 1e-12),
            other => panic!("expected DivergentTail, got {other:?}"),
        }
        // power - decay = -1 exactly is still divergent (log growth).
        let grid = RadialGrid::uniform(1.0, 4).unwrap();
        let f = RadialFunction::sample(grid, |r| 1.0 + r, Some(2.0)).unwrap();
        assert!(matches!(
            radial_moment(&f, 1.0),
            Err(Error::DivergentTail { .. })
        ));
    }

    #[test]
    fn lp_norm_matches_a_closed_form() {
        // ||e^{-|x|}||_2 in R^3: (4 pi int e^{-2r} r^2 dr)^{1/2} = sqrt(pi).
        let grid = RadialGrid::uniform(40.0, 4000).unwrap();
        let f = RadialFunction::sample(grid, |r| (-r).exp(), None).unwrap();
        let got = lp_norm(&f, 2.0, 3).unwrap();
        // Interpolation error ~ h^2/12 int (e^{-2r})'' r^2 dr ~ 3e-5 here.
        assert!((got - PI.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn weighted_norm_divides_by_the_coefficient() {
        // With f = 1 on [0, R] (truncated), weight (1+r^4)^-1 in R^3:
        // ||f||_1,mu = 4 pi int_0^R r^2/(1+r^4) dr; at R -> inf the integral
        // tends to pi sqrt(2)/4 = 1.1107207345395916 (frozen quadrature value).
        let grid = RadialGrid::uniform(4000.0, 200_000).unwrap();
        let f = RadialFunction::sample(grid, |_| 1.0, None).unwrap();
        let got = lp_norm_weighted(&f, 1.0, 3, 4.0).unwrap();
        let exact = 4.0 * PI * 1.110_720_734_539_591_6;
        // Truncation leaves a tail ~ 4 pi / R = 3e-3 unaccounted for.
        assert!(
            (got - exact).abs() < 5e-3,
            "got {got}, want {exact} up to truncation"
        );
    }
}
