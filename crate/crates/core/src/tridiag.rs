//! Symmetric tridiagonal *pencil* eigensolver and tridiagonal linear solves.
//!
//! Solves `K v = nu M v` with `K` symmetric tridiagonal and `M` positive
//! diagonal. The solver never forms `M^(-1/2) K M^(-1/2)`: the mass weights
//! here span hundreds of orders of magnitude (the invariant measure decays
//! like `r^(-alpha)` with `alpha` up to several hundred), so explicit
//! symmetrization overflows. Instead, eigenvalues come from Sturm-style
//! inertia counts of the shifted pencil `K - x M` — every intermediate is a
//! ratio that stays finite — refined by bisection, and eigenvectors from
//! inverse iteration with a partial-pivoting tridiagonal LU.
//!
//! Bisection runs in the `asinh` coordinate: the spectrum enclosure derived
//! from Gershgorin disks of the pencil can span `1e250` while the wanted
//! eigenvalues sit near 1, and `asinh` makes bisection contract *relative*
//! width everywhere on that range.

use crate::error::{Error, Result};

/// Bisection stops when the bracket's relative width falls below this.
const BISECT_REL_TOL: f64 = 1e-13;

/// Hard cap on bisection steps (the asinh trick needs ~900 for the widest
/// enclosures; 1200 leaves slack).
const BISECT_MAX_ITERS: usize = 1200;

/// Inverse-iteration sweeps (the shift is already accurate to ~1e-13, so
/// convergence is immediate; extra sweeps guard pathological starts).
const INVIT_SWEEPS: usize = 4;

/// A generalized symmetric tridiagonal eigenproblem `K v = nu M v`.
#[derive(Debug, Clone)]
pub struct TridiagPencil {
    /// Diagonal of `K`.
    diag: Vec<f64>,
    /// Off-diagonal of `K` (length `n - 1`).
    off: Vec<f64>,
    /// Diagonal of `M` (positive).
    mass: Vec<f64>,
}

impl TridiagPencil {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n || mass.len() != n {
            return Err(Error::InvalidParams(format!(
                "pencil shape mismatch: diag {n}, off {}, mass {}",
                off.len(),
                mass.len()
            )));
        }
        if let Some(node) = mass.iter().position(|&m| !(m.is_normal() && m > 0.0)) {
            return Err(Error::SingularMass { node });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("matrix entries must be finite".into()));
        }
        Ok(Self { diag, off, mass })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of pencil eigenvalues strictly below `x`: the count of
    /// negative pivots in the `L D L^T` factorization of `K - x M`.
    ///
    /// Pivots may overflow to infinity near an exact eigenvalue hit; the
    /// recurrence recovers on the next row (`e^2 / inf = 0`), which is the
    /// standard, safe behavior for Sturm counts.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        let mut count = 0usize;
        let mut d = self.diag[0] - x * self.mass[0];
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let e = self.off[i - 1];
            let mut di = (self.diag[i] - x * self.mass[i]) - e * (e / d);
            if di == 0.0 {
                di = -f64::MIN_POSITIVE;
            }
            if di < 0.0 {
                count += 1;
            }
            d = di;
        }
        count
    }

    /// Gershgorin enclosure of the pencil spectrum, computed without ever
    /// multiplying two mass entries together (their product underflows;
    /// their square roots do not).
    fn spectrum_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let s: Vec<f64> = self.mass.iter().map(|m| m.sqrt()).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let center = self.diag[i] / self.mass[i];
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs() / (s[i - 1] * s[i]);
            }
            if i + 1 < n {
                radius += self.off[i].abs() / (s[i] * s[i + 1]);
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }

    /// The `k` smallest pencil eigenvalues, ascending, each to relative
    /// accuracy [`BISECT_REL_TOL`].
    pub fn eigenvalues_smallest(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!(
                "requested {k} eigenvalues from a pencil of dimension {n}"
            )));
        }
        let (mut lo, mut hi) = self.spectrum_bounds();
        // Guard roundoff at the enclosure edges.
        lo = lo - lo.abs() * 1e-12 - f64::MIN_POSITIVE;
        hi = hi + hi.abs() * 1e-12 + f64::MIN_POSITIVE;
        if self.count_below(hi) < k {
            return Err(Error::NonConvergence(
                "spectrum enclosure failed to capture the requested count".into(),
            ));
        }
        let mut out = Vec::with_capacity(k);
        let mut lo_j = lo;
        for j in 1..=k {
            // Invariant: count(lo_j) < j <= count(hi_j).
            let (mut a, mut b) = (lo_j, hi);
            let (mut ta, mut tb) = (a.asinh(), b.asinh());
            for _ in 0..BISECT_MAX_ITERS {
                if (b - a).abs() <= BISECT_REL_TOL * a.abs().max(b.abs()).max(1e-30) {
                    break;
                }
                let tm = 0.5 * (ta + tb);
                let m = tm.sinh();
                if m <= a || m >= b {
                    break; // asinh grid exhausted at f64 resolution
                }
                if self.count_below(m) >= j {
                    b = m;
                    tb = tm;
                } else {
                    a = m;
                    ta = tm;
                }
            }
            let nu = 0.5 * (a + b);
            out.push(nu);
            lo_j = a; // eigenvalues are ascending; reuse the bracket floor
        }
        Ok(out)
    }

    /// Eigenvector for the converged eigenvalue `nu` by inverse iteration,
    /// `M`-normalized (`v^T M v = 1`) with its largest component positive.
    pub fn eigenvector(&self, nu: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let shifted_diag: Vec<f64> = self
            .diag
            .iter()
            .zip(&self.mass)
            .map(|(&d, &m)| d - nu * m)
            .collect();
        let lu = TridiagLu::new(&self.off, &shifted_diag, &self.off);
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..INVIT_SWEEPS {
            let mut w = lu.solve(&v);
            let peak = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if !(peak > 0.0) || !peak.is_finite() {
                return Err(Error::NonConvergence(
                    "inverse iteration produced a degenerate vector".into(),
                ));
            }
            for x in &mut w {
                *x /= peak;
            }
            v = w;
        }
        // M-normalize with peak scaling (mass entries may be subnormal-close).
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut nrm2 = 0.0;
        for (x, m) in v.iter().zip(&self.mass) {
            let t = x / peak;
            nrm2 += m * t * t;
        }
        let nrm = peak * nrm2.sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::NonConvergence(
                "eigenvector has vanishing M-norm".into(),
            ));
        }
        let imax = (0..n)
            .max_by(|&i, &j| v[i].abs().partial_cmp(&v[j].abs()).unwrap())
            .unwrap();
        let sign = if v[imax] < 0.0 { -1.0 } else { 1.0 };
        for x in &mut v {
            *x *= sign / nrm;
        }
        Ok(v)
    }

    /// Residual `max_i |(K v - nu M v)_i| / max_i |(K v)_i|` for diagnostics.
    pub fn residual(&self, nu: f64, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            let mut kv = self.diag[i] * v[i];
            if i > 0 {
                kv += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                kv += self.off[i] * v[i + 1];
            }
            worst = worst.max((kv - nu * self.mass[i] * v[i]).abs());
            scale = scale.max(kv.abs());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

/// Partial-pivoting LU of a general tridiagonal matrix, factored once so
/// repeated solves (time stepping, inverse iteration) reuse it.
///
/// Row interchanges introduce one extra superdiagonal (`du2`), exactly as
/// in the textbook Gaussian-elimination-with-pivoting scheme for banded
/// matrices. A vanishing pivot is replaced by a tiny value: the callers
/// that can hit it (inverse iteration at a converged shift) *want* the
/// nearly singular solve.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    n: usize,
    mult: Vec<f64>,
    swap: Vec<bool>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
}

impl TridiagLu {
    /// Factors the matrix with subdiagonal `sub`, diagonal `diag`,
    /// superdiagonal `sup` (`sub[i]` couples rows `i` and `i+1`).
    pub fn new(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 1 && sub.len() + 1 == n && sup.len() + 1 == n);
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        du.push(0.0);
        let mut dl = sub.to_vec();
        dl.push(0.0);
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swap = vec![false; n.saturating_sub(1)];
        let scale = d
            .iter()
            .chain(du.iter())
            .chain(dl.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let tiny = (scale + 1.0) * 1e-300;
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                // No interchange.
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                mult[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                // Interchange rows i and i+1.
                let fact = d[i] / dl[i];
                mult[i] = fact;
                swap[i] = true;
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - fact * tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                du[i] = tmp;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            n,
            mult,
            swap,
            d,
            du,
            du2,
        }
    }

    /// Solves `A x = b` using the stored factorization.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let saved = x[i];
                x[i] = x[i + 1];
                x[i + 1] = saved - self.mult[i] * x[i];
            } else {
                x[i + 1] -= self.mult[i] * x[i];
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}
