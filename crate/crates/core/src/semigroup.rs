//! Parabolic solves on expanding balls: the minimal-semigroup construction.
//!
//! Integrates `u_t = (1 + r^alpha) [u'' + (N-1)/r u']` on `B_rho` with a
//! Dirichlet condition at `rho`, by Crank-Nicolson time stepping of the same
//! stiffness/mass pencil the spectral module assembles (so the parabolic and
//! eigenvalue computations share one discretization). The scheme is
//! unconditionally stable; the *default* time step additionally satisfies
//! `dt <= 2 M_i / K_ii` for every row, which makes the update matrix
//! entrywise nonnegative. With that step the discrete solution operator
//! preserves positivity and ordering exactly, so the maximum principle,
//! the comparison principle, and monotonicity in the ball radius hold to
//! roundoff rather than to discretization error.
//!
//! Uniform or power-graded meshes make that positivity step impractically
//! small (the coefficient reaches `1 + rho^alpha` at the boundary).
//! [`diffusion_graded_grid`] places nodes uniformly in the diffusion metric
//! `s(r) = int_0^r dr' / sqrt(1 + r'^alpha)`, which balances `2 M_i / K_ii`
//! across rows and keeps the step workable.
//!
//! Nested-ball comparisons truncate one master mesh at interior nodes and
//! reuse one time step for every member, so the runs being compared agree
//! node-for-node and step-for-step.

use crate::error::{Error, Result};
use crate::grid::{GridScheme, RadialFunction, RadialGrid};
use crate::params::OperatorParams;
use crate::quad::{integrate_panels, linear_cell_moment, unit_sphere_area};
use crate::report::{params_map, BoundReport};
use crate::spectral::assemble_arrays;
use crate::tridiag::TridiagLu;

/// Safety factor applied to the row-wise positivity bound on the time step.
const POSITIVITY_SAFETY: f64 = 0.9;

/// A step-over-step norm growth beyond this factor aborts the run.
const INSTABILITY_GROWTH: f64 = 1.0 + 1e-8;

/// Tolerance (relative to the initial sup) for nodewise monotonicity of the
/// expanding-ball family; anything beyond it signals a scheme bug.
const MONOTONE_NODEWISE_TOL: f64 = 1e-10;

/// One Dirichlet run on a ball.
#[derive(Debug, Clone)]
pub struct SemigroupRun {
    pub params: OperatorParams,
    pub rho: f64,
    pub dt: f64,
    /// Actual horizon: the requested horizon rounded up to a whole number
    /// of steps.
    pub t_end: f64,
    /// Exponent of the p-norm column in `norm_trace` (`f64::INFINITY`
    /// duplicates the sup column).
    pub trace_p: f64,
    /// `(t, u)` at t = 0, the requested times, and the horizon.
    pub snapshots: Vec<(f64, RadialFunction)>,
    /// Per-step `(t, sup_norm, p_norm)`.
    pub norm_trace: Vec<(f64, f64, f64)>,
    /// Per-step mass in the invariant measure `r^(N-1)/(1+r^alpha) dr`.
    pub mu_mass_trace: Vec<f64>,
    /// Per-step mass in the volume measure `r^(N-1) dr`.
    pub dx_mass_trace: Vec<f64>,
}

/// Expanding-ball family at a common probe time.
#[derive(Debug, Clone)]
pub struct ExpandingBallFamily {
    /// `(actual radius, solution at the probe time)` per ball, ascending.
    pub members: Vec<(f64, RadialFunction)>,
    /// Worst nodewise decrease between consecutive members, relative to the
    /// initial sup (0 when the family is perfectly monotone).
    pub max_monotonicity_violation: f64,
    /// Sup-norm of the difference between consecutive members on their
    /// common nodes.
    pub cauchy_differences: Vec<f64>,
}

/// Mesh with nodes uniform in the diffusion metric
/// `s(r) = int_0^r dr'/sqrt(1+r'^alpha)`, last node snapped to `rho`.
pub fn diffusion_graded_grid(
    params: &OperatorParams,
    rho: f64,
    n_cells: usize,
) -> Result<RadialGrid> {
    if !(rho > 0.0 && rho.is_finite()) || n_cells < 2 {
        return Err(Error::InvalidParams(
            "diffusion grid needs rho > 0 and at least 2 cells".into(),
        ));
    }
    let alpha = params.alpha();
    let speed = |r: f64| (1.0 + r.abs().powf(alpha)).sqrt();
    let metric_density = |r: f64| 1.0 / speed(r);
    // Total metric length by quadrature (panels: unit steps to rho).
    let mut pts = vec![0.0];
    let mut x = 1.0f64.min(rho);
    while x < rho {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(rho);
    let s_total = integrate_panels(metric_density, &pts);
    let h = s_total / n_cells as f64;
    // March dr/ds = sqrt(1+r^alpha) with RK4.
    let mut nodes = Vec::with_capacity(n_cells + 1);
    let mut r = 0.0f64;
    nodes.push(r);
    for _ in 0..n_cells {
        let k1 = speed(r);
        let k2 = speed(r + 0.5 * h * k1);
        let k3 = speed(r + 0.5 * h * k2);
        let k4 = speed(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        nodes.push(r);
    }
    // Quadrature and marching agree to ~1e-10; snap the endpoint exactly.
    let scale = rho / *nodes.last().unwrap();
    for v in nodes.iter_mut() {
        *v *= scale;
    }
    *nodes.last_mut().unwrap() = rho;
    RadialGrid::from_nodes(nodes, GridScheme::Graded)
}

/// Largest time step for which the Crank-Nicolson update matrix is
/// entrywise nonnegative (row-wise bound `2 M_i / K_ii`), times a safety
/// factor.
pub fn positivity_time_step(params: &OperatorParams, grid: &RadialGrid) -> Result<f64> {
    let (diag, _off, mass) = assemble_arrays(params, grid, 0)?;
    let bound = diag
        .iter()
        .zip(&mass)
        .map(|(&k, &m)| 2.0 * m / k)
        .fold(f64::INFINITY, f64::min);
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidParams(
            "degenerate positivity step bound".into(),
        ));
    }
    Ok(POSITIVITY_SAFETY * bound)
}

/// Lebesgue weights `int phi_i r^(N-1) dr` for the interior hats.
fn volume_weights(grid: &RadialGrid, dim: u32) -> Vec<f64> {
    let nodes = grid.nodes();
    let m = nodes.len() - 1;
    let q = dim as f64 - 1.0;
    let mut w = vec![0.0; m];
    for c in 0..nodes.len() - 1 {
        let (a, b) = (nodes[c], nodes[c + 1]);
        w[c] += linear_cell_moment(a, b, 1.0, 0.0, q);
        if c + 1 < m {
            w[c + 1] += linear_cell_moment(a, b, 0.0, 1.0, q);
        }
    }
    w
}

fn lumped_p_norm(u: &[f64], w: &[f64], area: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    let sum: f64 = u.iter().zip(w).map(|(&v, &wi)| wi * v.abs().powf(p)).sum();
    (area * sum).powf(1.0 / p)
}

/// Crank-Nicolson run on the ball `r <= rho`, where `rho` must equal the
/// mesh radius of `f0`. `dt = None` selects the positivity-preserving step.
/// Snapshots are taken at t = 0, at the first step past each requested
/// time, and at the horizon.
pub fn solve_on_ball(
    f0: &RadialFunction,
    params: &OperatorParams,
    rho: f64,
    dt: Option<f64>,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<SemigroupRun> {
    let grid = &f0.grid;
    if (grid.r_max() - rho).abs() > 1e-12 * rho.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "initial value lives on a mesh of radius {}, not rho = {rho}",
            grid.r_max()
        )));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let sup0 = f0.sup_norm();
    if f0.values.last().unwrap().abs() > 1e-12 * sup0.max(1.0) {
        return Err(Error::InvalidParams(
            "initial value must vanish at the Dirichlet boundary".into(),
        ));
    }
    let (kd, ko, mm) = assemble_arrays(params, grid, 0)?;
    let m = kd.len();
    let dt = match dt {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(_) => return Err(Error::InvalidParams("dt must be positive".into())),
        None => positivity_time_step(params, grid)?,
    };
    let steps = ((t_end / dt).ceil() as usize).max(1);
    let kappa = 0.5 * dt;
    let diag_a: Vec<f64> = mm
        .iter()
        .zip(&kd)
        .map(|(&mi, &ki)| mi + kappa * ki)
        .collect();
    let off_a: Vec<f64> = ko.iter().map(|&k| kappa * k).collect();
    let diag_b: Vec<f64> = mm
        .iter()
        .zip(&kd)
        .map(|(&mi, &ki)| mi - kappa * ki)
        .collect();
    let off_b: Vec<f64> = ko.iter().map(|&k| -kappa * k).collect();
    let lu = TridiagLu::new(&off_a, &diag_a, &off_a);
    let w_vol = volume_weights(grid, params.dim());
    let area = unit_sphere_area(params.dim());
    let trace_p = params.p().unwrap_or(f64::INFINITY);

    let mut u: Vec<f64> = f0.values[..m].to_vec();
    let as_mesh_function = |u: &[f64]| -> Result<RadialFunction> {
        let mut values = u.to_vec();
        values.push(0.0);
        RadialFunction::new(grid.clone(), values, None)
    };
    let mut wanted: Vec<f64> = snapshot_times.to_vec();
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_wanted = 0usize;

    let mut run = SemigroupRun {
        params: *params,
        rho,
        dt,
        t_end: steps as f64 * dt,
        trace_p,
        snapshots: vec![(0.0, as_mesh_function(&u)?)],
        norm_trace: Vec::with_capacity(steps + 1),
        mu_mass_trace: Vec::with_capacity(steps + 1),
        dx_mass_trace: Vec::with_capacity(steps + 1),
    };
    let record = |run: &mut SemigroupRun, t: f64, u: &[f64]| {
        let sup = u.iter().fold(0.0f64, |mx, x| mx.max(x.abs()));
        let pn = lumped_p_norm(u, &w_vol, area, trace_p);
        run.norm_trace.push((t, sup, pn));
        run.mu_mass_trace
            .push(u.iter().zip(&mm).map(|(&v, &mi)| mi * v).sum());
        run.dx_mass_trace
            .push(u.iter().zip(&w_vol).map(|(&v, &wi)| wi * v).sum());
    };
    record(&mut run, 0.0, &u);

    let mut rhs = vec![0.0; m];
    for step in 1..=steps {
        for i in 0..m {
            rhs[i] = diag_b[i] * u[i];
            if i > 0 {
                rhs[i] += off_b[i - 1] * u[i - 1];
            }
            if i + 1 < m {
                rhs[i] += off_b[i] * u[i + 1];
            }
        }
        u = lu.solve(&rhs);
        let t = step as f64 * dt;
        let (_, prev_sup, prev_pn) = *run.norm_trace.last().unwrap();
        record(&mut run, t, &u);
        let (_, sup, pn) = *run.norm_trace.last().unwrap();
        if sup > prev_sup * INSTABILITY_GROWTH || pn > prev_pn * INSTABILITY_GROWTH {
            return Err(Error::Instability {
                step,
                growth: (sup / prev_sup).max(pn / prev_pn),
            });
        }
        while next_wanted < wanted.len() && t + 1e-15 >= wanted[next_wanted] {
            run.snapshots.push((t, as_mesh_function(&u)?));
            next_wanted += 1;
        }
    }
    let t_final = steps as f64 * dt;
    if run
        .snapshots
        .last()
        .map(|(t, _)| (*t - t_final).abs() > 1e-15)
        .unwrap_or(true)
    {
        run.snapshots.push((t_final, as_mesh_function(&u)?));
    }
    Ok(run)
}

/// Reports the worst per-step increase of the p-norm trace (relative to the
/// initial norm). `p = infinity` checks the sup column; a finite `p` must
/// match the exponent the run was traced with.
pub fn lp_contraction_check(run: &SemigroupRun, p: f64) -> Result<BoundReport> {
    let column: Vec<f64> = if p.is_infinite() {
        run.norm_trace.iter().map(|&(_, sup, _)| sup).collect()
    } else {
        if !(p > run.params.critical_p()) {
            return Err(Error::InvalidParams(format!(
                "contraction check needs p > {}",
                run.params.critical_p()
            )));
        }
        if (p - run.trace_p).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "run traced the p-norm at p = {}, not p = {p}",
                run.trace_p
            )));
        }
        run.norm_trace.iter().map(|&(_, _, pn)| pn).collect()
    };
    let scale = column
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(f64::MIN_POSITIVE);
    let worst = column
        .windows(2)
        .map(|w| (w[1] - w[0]) / scale)
        .fold(0.0f64, f64::max);
    let mut prm = params_map(&[
        ("n", run.params.dim() as f64),
        ("alpha", run.params.alpha()),
        ("rho", run.rho),
    ]);
    let name = if p.is_infinite() {
        "semigroup_sup_norm_per_step_increase"
    } else {
        prm.insert("p".into(), p);
        "semigroup_p_norm_per_step_increase"
    };
    Ok(BoundReport::new(name, prm, 0.0, worst, 1e-10))
}

/// Solves on each ball of an increasing radius sequence, all truncations of
/// one master mesh sharing one time step, and compares members at the probe
/// time. Nodewise decreases beyond the tolerance are scheme bugs and error
/// out.
pub fn expanding_ball_limit(
    f0: &RadialFunction,
    params: &OperatorParams,
    rho_sequence: &[f64],
    t_probe: f64,
    master_cells: usize,
) -> Result<ExpandingBallFamily> {
    if rho_sequence.len() < 2 || rho_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "need an increasing sequence of at least two radii".into(),
        ));
    }
    if f0.values.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParams(
            "expanding-ball construction needs nonnegative data".into(),
        ));
    }
    let rho_max = *rho_sequence.last().unwrap();
    let master = diffusion_graded_grid(params, rho_max, master_cells)?;
    let dt = positivity_time_step(params, &master)?;
    let scale = f0.sup_norm().max(f64::MIN_POSITIVE);

    let mut members: Vec<(f64, RadialFunction)> = Vec::new();
    for &rho in rho_sequence {
        let idx = master.node_at_or_below(rho);
        if idx < 2 {
            return Err(Error::InvalidParams(format!(
                "radius {rho} truncates the master mesh too close to the origin"
            )));
        }
        let sub = master.truncate_at(idx)?;
        let rho_actual = sub.r_max();
        let mut values: Vec<f64> = sub.nodes().iter().map(|&r| f0.eval(r)).collect();
        *values.last_mut().unwrap() = 0.0;
        let start = RadialFunction::new(sub, values, None)?;
        let run = solve_on_ball(&start, params, rho_actual, Some(dt), t_probe, &[])?;
        let (_, end_state) = run.snapshots.last().unwrap().clone();
        members.push((rho_actual, end_state));
    }

    let mut worst = 0.0f64;
    let mut cauchy = Vec::new();
    for pair in members.windows(2) {
        let (_, small) = &pair[0];
        let (_, big) = &pair[1];
        let n_common = small.values.len() - 1; // interior of the smaller ball
        let mut sup_diff = 0.0f64;
        for i in 0..n_common {
            let diff = big.values[i] - small.values[i];
            sup_diff = sup_diff.max(diff.abs());
            worst = worst.max(-diff / scale);
        }
        cauchy.push(sup_diff);
    }
    if worst > MONOTONE_NODEWISE_TOL {
        return Err(Error::MonotonicityViolation(format!(
            "nested solutions decreased by {worst:.3e} of the initial sup"
        )));
    }
    Ok(ExpandingBallFamily {
        members,
        max_monotonicity_violation: worst,
        cauchy_differences: cauchy,
    })
}

/// Integrates `u_t = (1+r^alpha) Delta u + f` from `u = 0` until the update
/// stalls (or the horizon), returning the steady state. With Crank-Nicolson
/// the steady state solves the same linear system as the elliptic inverse
/// applied to `f`, so this ties the parabolic construction to the resolvent.
pub fn steady_state_with_source(
    source: &RadialFunction,
    params: &OperatorParams,
    dt: f64,
    t_max: f64,
) -> Result<RadialFunction> {
    if !(dt > 0.0 && t_max > dt) {
        return Err(Error::InvalidParams(
            "need 0 < dt < t_max for the steady-state run".into(),
        ));
    }
    let grid = &source.grid;
    let (kd, ko, mm) = assemble_arrays(params, grid, 0)?;
    let m = kd.len();
    let kappa = 0.5 * dt;
    let diag_a: Vec<f64> = mm
        .iter()
        .zip(&kd)
        .map(|(&mi, &ki)| mi + kappa * ki)
        .collect();
    let off_a: Vec<f64> = ko.iter().map(|&k| kappa * k).collect();
    let diag_b: Vec<f64> = mm
        .iter()
        .zip(&kd)
        .map(|(&mi, &ki)| mi - kappa * ki)
        .collect();
    let off_b: Vec<f64> = ko.iter().map(|&k| -kappa * k).collect();
    let lu = TridiagLu::new(&off_a, &diag_a, &off_a);
    let forcing: Vec<f64> = (0..m).map(|i| dt * mm[i] * source.values[i]).collect();
    let steps = (t_max / dt).ceil() as usize;
    let mut u = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut stalled = 0usize;
    for _ in 0..steps {
        for i in 0..m {
            rhs[i] = diag_b[i] * u[i] + forcing[i];
            if i > 0 {
                rhs[i] += off_b[i - 1] * u[i - 1];
            }
            if i + 1 < m {
                rhs[i] += off_b[i] * u[i + 1];
            }
        }
        let next = lu.solve(&rhs);
        let change = next
            .iter()
            .zip(&u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let scale = next.iter().fold(0.0f64, |mx, x| mx.max(x.abs()));
        u = next;
        if change <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let mut values = u;
    values.push(0.0);
    RadialFunction::new(grid.clone(), values, None)
}
