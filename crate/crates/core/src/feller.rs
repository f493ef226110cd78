//! Classification of the endpoint at infinity for the radial diffusion
//! `(1 + rho^alpha)(u'' + (N-1)/rho u')`.
//!
//! In Feller's scale/speed framework the endpoint type is decided by the
//! integrability at infinity of two canonical functions built from a
//! fundamental pair: here (with the bounded solution normalized on `[1, oo)`)
//!
//! ```text
//! W(rho) = rho^(N-3)
//! Q(rho) = (rho^(N-2) - 1) / ((N-2)(1 + rho^alpha) rho^(N-3))
//! R(rho) = rho^(N-3) * int_1^rho ds / ((1 + s^alpha) s^(N-3))
//! ```
//!
//! `Q` integrable and `R` not makes infinity an *entrance* endpoint: the
//! diffusion can come in from infinity but never reaches it. That is the
//! regime `alpha > 2`, and it is what forces every solution of the radial
//! equation independent of the bounded one to blow up — the source of the
//! `r^(2-N)` tail dichotomy used throughout the crate.
//!
//! Integrability is decided *numerically*: partial integrals over
//! `[1, 10^k]` are computed for `k = 1..6`, the per-decade increments are
//! fitted to a power of the decade edge, and the fitted rate decides. The
//! symbolic tails (`Q ~ rho^(1-alpha)/(N-2)`, `R ~ const rho^(N-3)`) are
//! used only as test oracles.

use serde::Serialize;

use crate::asymptotics::least_squares;
use crate::error::{Error, Result};
use crate::quad::{geometric_breakpoints, integrate_panels};

/// Partial integrals run over `[1, 10^k]` for `k = 1..=PARTIAL_DECADES`.
const PARTIAL_DECADES: usize = 6;

/// Quadrature panels per decade for the partial integrals.
const PANELS_PER_DECADE: usize = 16;

/// An increment-rate fit closer than this to the integrability threshold
/// is refused (the data cannot distinguish `rho^(-1)` from `rho^(-1 +- eps)`).
const RATE_DECISION_WINDOW: f64 = 0.05;

/// Feller's endpoint taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointKind {
    /// `Q` integrable, `R` not: reachable from, but never reached.
    Entrance,
    /// `R` integrable, `Q` not: reached in finite time, no re-entry.
    Exit,
    /// Neither integrable: invisible to the diffusion.
    Natural,
    /// Both integrable: an ordinary accessible boundary.
    Regular,
}

/// Outcome of the numeric classification, with the evidence attached.
#[derive(Debug, Clone, Serialize)]
pub struct EndpointClassification {
    pub q_integrable: bool,
    pub r_integrable: bool,
    pub classification: EndpointKind,
    /// `(M, int_1^M Q)` at decade edges.
    pub q_partial_integrals: Vec<(f64, f64)>,
    /// `(M, int_1^M R)` at decade edges.
    pub r_partial_integrals: Vec<(f64, f64)>,
}

fn validate(dim: u32, alpha: f64) -> Result<()> {
    if dim < 3 {
        return Err(Error::InvalidParams(format!(
            "dimension must be at least 3, got {dim}"
        )));
    }
    // Deliberately wider than the operator's alpha > 2: the classification
    // sweep includes the sub-critical range to exhibit the phase change.
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!(
            "coefficient exponent must be positive, got {alpha}"
        )));
    }
    Ok(())
}

/// The canonical triple `(W, Q, R)` at radius `rho >= 1`.
pub fn feller_functions(dim: u32, alpha: f64, rho: f64) -> Result<(f64, f64, f64)> {
    validate(dim, alpha)?;
    if !(rho >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "the classification normalizes at 1; need rho >= 1, got {rho}"
        )));
    }
    let n = dim as f64;
    let w = rho.powf(n - 3.0);
    let q = (rho.powf(n - 2.0) - 1.0) / ((n - 2.0) * (1.0 + rho.powf(alpha)) * w);
    let r = if rho == 1.0 {
        0.0
    } else {
        let integrand = |s: f64| 1.0 / ((1.0 + s.powf(alpha)) * s.powf(n - 3.0));
        let pts = geometric_breakpoints(1.0, rho, PANELS_PER_DECADE);
        w * integrate_panels(integrand, &pts)
    };
    Ok((w, q, r))
}

/// Fits `ln(increment)` against `ln(decade edge)`; the slope is the
/// increment's power rate in `M` (integrable integrand <=> negative slope).
fn increment_rate(edges: &[f64], increments: &[f64]) -> Result<f64> {
    if increments.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::FitFailure(
            "partial-integral increments must be positive".into(),
        ));
    }
    let ones = vec![1.0; edges.len()];
    let log_m: Vec<f64> = edges.iter().map(|m| m.ln()).collect();
    let log_d: Vec<f64> = increments.iter().map(|d| d.ln()).collect();
    let (coef, _) = least_squares(&[ones, log_m], &log_d)?;
    Ok(coef[1])
}

/// Decides integrability from a fitted increment rate, refusing the call
/// when the rate sits inside the decision window around 0 (that is,
/// integrand exponent within [`RATE_DECISION_WINDOW`] of -1).
fn decide(rate: f64, which: &str) -> Result<bool> {
    if rate.abs() < RATE_DECISION_WINDOW {
        return Err(Error::Inconclusive(format!(
            "{which}-increment rate {rate:.4} is within {RATE_DECISION_WINDOW} of the \
             integrability threshold"
        )));
    }
    Ok(rate < 0.0)
}

/// Classifies the endpoint at infinity for `(N, alpha)`.
///
/// Partial integrals of `Q` accumulate per-decade quadrature (no
/// subtractive cancellation: each decade is integrated on its own panels).
/// Partial integrals of `R` use the exact order swap
/// `int_1^M R drho = int_1^M h(s) (M^(N-2) - s^(N-2))/(N-2) ds`,
/// `h(s) = 1/((1+s^alpha) s^(N-3))`, collapsing the double integral.
pub fn classify_infinity(dim: u32, alpha: f64) -> Result<EndpointClassification> {
    validate(dim, alpha)?;
    let n = dim as f64;

    // Q: increments per decade, then prefix sums.
    let q = |rho: f64| {
        (rho.powf(n - 2.0) - 1.0) / ((n - 2.0) * (1.0 + rho.powf(alpha)) * rho.powf(n - 3.0))
    };
    let mut q_increments = Vec::with_capacity(PARTIAL_DECADES);
    // [1, 10] first, then decade by decade.
    for k in 0..PARTIAL_DECADES {
        let (lo, hi) = (10f64.powi(k as i32), 10f64.powi(k as i32 + 1));
        let pts = geometric_breakpoints(lo, hi, PANELS_PER_DECADE);
        q_increments.push(integrate_panels(q, &pts));
    }
    let mut q_partials = Vec::with_capacity(PARTIAL_DECADES);
    let mut acc = 0.0;
    for (k, dq) in q_increments.iter().enumerate() {
        acc += dq;
        q_partials.push((10f64.powi(k as i32 + 1), acc));
    }

    // R partial integrals by the order swap; one integral per decade edge.
    let h = |s: f64| 1.0 / ((1.0 + s.powf(alpha)) * s.powf(n - 3.0));
    let mut r_partials = Vec::with_capacity(PARTIAL_DECADES);
    for k in 1..=PARTIAL_DECADES {
        let m = 10f64.powi(k as i32);
        let integrand = |s: f64| h(s) * (m.powf(n - 2.0) - s.powf(n - 2.0)) / (n - 2.0);
        let pts = geometric_breakpoints(1.0, m, PANELS_PER_DECADE);
        // The integrand vanishes linearly at s = M; plain panels handle it.
        r_partials.push((m, integrate_panels(integrand, &pts)));
    }
    let r_increments: Vec<f64> = r_partials.windows(2).map(|w| w[1].1 - w[0].1).collect();

    // Rates against the decade lower edges.
    let edges: Vec<f64> = (1..PARTIAL_DECADES).map(|k| 10f64.powi(k as i32)).collect();
    let q_rate = increment_rate(&edges, &q_increments[1..])?;
    let r_rate = increment_rate(&edges, &r_increments)?;

    let q_integrable = decide(q_rate, "Q")?;
    let r_integrable = decide(r_rate, "R")?;
    let classification = match (q_integrable, r_integrable) {
        (true, false) => EndpointKind::Entrance,
        (false, true) => EndpointKind::Exit,
        (false, false) => EndpointKind::Natural,
        (true, true) => EndpointKind::Regular,
    };
    Ok(EndpointClassification {
        q_integrable,
        r_integrable,
        classification,
        q_partial_integrals: q_partials,
        r_partial_integrals: r_partials,
    })
}

/// Convenience: the `Q`-increment between two explicit limits, on its own
/// panels (used by the acceptance suite's Cauchy check).
pub fn q_partial_increment(dim: u32, alpha: f64, lo: f64, hi: f64) -> Result<f64> {
    validate(dim, alpha)?;
    if !(1.0 <= lo && lo < hi) {
        return Err(Error::InvalidParams("need 1 <= lo < hi".into()));
    }
    let n = dim as f64;
    let q = |rho: f64| {
        (rho.powf(n - 2.0) - 1.0) / ((n - 2.0) * (1.0 + rho.powf(alpha)) * rho.powf(n - 3.0))
    };
    let pts = geometric_breakpoints(lo, hi, PANELS_PER_DECADE);
    Ok(integrate_panels(q, &pts))
}
