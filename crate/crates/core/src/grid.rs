//! Radial grids and grid functions.
//!
//! Everything downstream (quadrature, finite elements, time stepping) works
//! on a partition `0 = r_0 < r_1 < ... < r_n` of a finite interval, plus an
//! optional power-law tag describing how a function continues past the last
//! node. Keeping the tag on the function (not the grid) lets the quadrature
//! integrate truncated data and whole-space data with one code path.

use crate::error::{Error, Result};

/// How a grid's nodes were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    /// Equal cell widths.
    Uniform,
    /// Cell widths form a geometric progression, so nodes cluster where the
    /// resolved functions vary fastest (near the origin for kernels, near
    /// infinity for stiff diffusion).
    Graded,
}

/// A strictly increasing set of radial nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    scheme: GridScheme,
}

/// Largest admissible geometric cell ratio when grading a grid.
const MAX_GRADING_RATIO: f64 = 2.0;

/// Target size of the first graded cell, as a fraction of the outer radius.
const GRADED_FIRST_CELL_FRACTION: f64 = 1e-4;

impl RadialGrid {
    /// `n_cells` equal cells on `[0, r_max]`.
    pub fn uniform(r_max: f64, n_cells: usize) -> Result<Self> {
        Self::validate_extent(r_max, n_cells)?;
        let h = r_max / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
        *nodes.last_mut().unwrap() = r_max;
        Ok(Self {
            nodes,
            scheme: GridScheme::Uniform,
        })
    }

    /// `n_cells` geometrically growing cells on `[0, r_max]`, first cell
    /// about `1e-4 * r_max` wide.
    ///
    /// The common ratio solves `h0 * (q^n - 1)/(q - 1) = r_max` by bisection
    /// on `q in (1, 2)`. When `n_cells` is already large enough that uniform
    /// cells are as small as the target first cell, falls back to uniform
    /// (the ratio would be indistinguishable from 1).
    pub fn graded(r_max: f64, n_cells: usize) -> Result<Self> {
        Self::validate_extent(r_max, n_cells)?;
        let n = n_cells as f64;
        let h0 = GRADED_FIRST_CELL_FRACTION * r_max;
        if h0 * n >= r_max {
            return Self::uniform(r_max, n_cells);
        }
        // total(q) = h0 (q^n - 1)/(q - 1) is increasing in q; bracket and bisect.
        let total = |q: f64| h0 * (q.powf(n) - 1.0) / (q - 1.0);
        let (mut lo, mut hi) = (1.0 + 1e-12, MAX_GRADING_RATIO);
        if total(hi) < r_max {
            return Err(Error::InvalidParams(format!(
                "graded grid needs more cells: {n_cells} cells cannot span {r_max} \
                 with ratio <= {MAX_GRADING_RATIO}"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < r_max {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let mut nodes = Vec::with_capacity(n_cells + 1);
        let mut r = 0.0;
        let mut h = h0;
        nodes.push(0.0);
        for _ in 0..n_cells {
            r += h;
            h *= q;
            nodes.push(r);
        }
        // Bisection residual is relative ~1e-14; pin the endpoint exactly.
        *nodes.last_mut().unwrap() = r_max;
        Ok(Self {
            nodes,
            scheme: GridScheme::Graded,
        })
    }

    /// Wraps a caller-supplied node set (must be strictly increasing,
    /// nonnegative, with at least two nodes).
    pub fn from_nodes(nodes: Vec<f64>, scheme: GridScheme) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParams("grid needs at least two nodes".into()));
        }
        if nodes[0] < 0.0 || !nodes[0].is_finite() {
            return Err(Error::InvalidParams(
                "grid nodes must be nonnegative".into(),
            ));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidParams(
                    "grid nodes must be strictly increasing and finite".into(),
                ));
            }
        }
        Ok(Self { nodes, scheme })
    }

    fn validate_extent(r_max: f64, n_cells: usize) -> Result<()> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidParams(format!(
                "outer radius must be positive and finite, got {r_max}"
            )));
        }
        if n_cells < 1 {
            return Err(Error::InvalidParams("grid needs at least one cell".into()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Splits every cell at its midpoint (doubles the resolution while
    /// keeping every existing node, so grid functions transfer exactly).
    pub fn refine(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        Self {
            nodes,
            scheme: self.scheme,
        }
    }

    /// The sub-grid consisting of nodes `0..=node_index` (for nested-ball
    /// comparisons on a common master grid).
    pub fn truncate_at(&self, node_index: usize) -> Result<Self> {
        if node_index < 1 || node_index >= self.nodes.len() {
            return Err(Error::InvalidParams(format!(
                "truncation index {node_index} out of range 1..{}",
                self.nodes.len()
            )));
        }
        Ok(Self {
            nodes: self.nodes[..=node_index].to_vec(),
            scheme: self.scheme,
        })
    }

    /// Index of the last node `<= r` (nodes are sorted).
    pub fn node_at_or_below(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }
}

/// Samples of a radial function on a grid, with an optional power-law tail.
///
/// `decay_exponent = Some(d)` declares that beyond the last node the function
/// continues as `c * r^(-d)`, with `c` matched to the last sample. `None`
/// means the function is identically zero past the grid (truncated data).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub decay_exponent: Option<f64>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>, decay_exponent: Option<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::InvalidParams(format!(
                "expected {} samples, got {}",
                grid.nodes().len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("samples must be finite".into()));
        }
        Ok(Self {
            grid,
            values,
            decay_exponent,
        })
    }

    /// Samples a closure at the grid nodes.
    pub fn sample<F: Fn(f64) -> f64>(
        grid: RadialGrid,
        f: F,
        decay_exponent: Option<f64>,
    ) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, decay_exponent)
    }

    /// Piecewise-linear interpolation inside the grid; the declared power
    /// tail (or zero) outside it.
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r < nodes[0] {
            return self.values[0];
        }
        let last = *nodes.last().unwrap();
        if r > last {
            return match self.decay_exponent {
                Some(d) => {
                    let v_last = *self.values.last().unwrap();
                    v_last * (r / last).powf(-d)
                }
                None => 0.0,
            };
        }
        let i = self.grid.node_at_or_below(r);
        if i + 1 >= nodes.len() {
            return *self.values.last().unwrap();
        }
        let (a, b) = (nodes[i], nodes[i + 1]);
        let t = (r - a) / (b - a);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Largest absolute sample.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The function `|f|^p` as a new grid function (tail exponent scales by
    /// `p`). This is what the `L^p` quadrature integrates.
    pub fn abs_powered(&self, p: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs().powf(p)).collect(),
            decay_exponent: self.decay_exponent.map(|d| d * p),
        }
    }
}
