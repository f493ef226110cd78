//! Reference families of radial profiles for norm probes and randomized
//! suites.
//!
//! The standard family mixes sharply and slowly varying profiles, compact
//! and power-tailed ones, and shell-like shapes, so norm-bound probes
//! exercise several distinct balances between a function and its image
//! under the integral operators. The randomized family produces seeded,
//! reproducible compactly supported profiles (sums of signed Gaussian
//! bumps times a low-order polynomial, cut off smoothly) for inequality
//! sweeps that should not depend on hand-picked shapes.

use crate::error::Result;
use crate::grid::{RadialFunction, RadialGrid};
use crate::potential::smoothstep5;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mesh radius for the standard family: far enough out that every declared
/// power tail carries less than ~1e-6 of each norm.
const STANDARD_R_MAX: f64 = 40.0;

/// Cells for the standard family (piecewise-linear resolution ~1e-4 in the
/// norms being compared).
const STANDARD_CELLS: usize = 4000;

/// Ten fixed probe profiles with correct tail declarations.
pub fn standard_probe_family() -> Result<Vec<RadialFunction>> {
    let grid = RadialGrid::graded(STANDARD_R_MAX, STANDARD_CELLS)?;
    let mk = |f: &dyn Fn(f64) -> f64, decay: Option<f64>| -> Result<RadialFunction> {
        RadialFunction::sample(grid.clone(), f, decay)
    };
    Ok(vec![
        mk(&|r| (-r * r).exp(), None)?,
        mk(&|r| (-(r - 2.0) * (r - 2.0)).exp(), None)?,
        mk(&|r| smoothstep5(2.0 - r), None)?,
        mk(&|r| r * r * (-r).exp(), None)?,
        mk(&|r| 1.0 / (1.0 + r.powi(4)), Some(4.0))?,
        mk(&|r| (-r * r / 10.0).exp(), None)?,
        mk(&|r| r * r * (-(r - 3.0) * (r - 3.0)).exp(), None)?,
        mk(&|r| (-3.0 * r).exp(), None)?,
        mk(
            &|r| (-r * r).exp() + 0.5 * (-(r - 1.5) * (r - 1.5)).exp(),
            None,
        )?,
        mk(&|r| (1.0 + r * r).powi(-3), Some(6.0))?,
    ])
}

/// Seeded family of compactly supported profiles on `[0, 8]` (support
/// inside `[0, 7]`): 1-3 signed Gaussian bumps times `1 + c1 r + c2 r^2`,
/// multiplied by a smooth cutoff. Deterministic in `seed`.
pub fn random_compact_profiles(seed: u64, count: usize) -> Result<Vec<RadialFunction>> {
    let grid = RadialGrid::uniform(8.0, 2000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n_bumps = rng.gen_range(1..=3);
        let bumps: Vec<(f64, f64, f64)> = (0..n_bumps)
            .map(|_| {
                (
                    rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                    rng.gen_range(0.5..5.0),
                    rng.gen_range(0.3..1.5),
                )
            })
            .collect();
        let c1 = rng.gen_range(-0.3..0.3);
        let c2 = rng.gen_range(-0.3..0.3);
        let profile = move |r: f64| {
            let mut v = 0.0;
            for &(amp, center, width) in &bumps {
                let t = (r - center) / width;
                v += amp * (-t * t).exp();
            }
            v * (1.0 + c1 * r + c2 * r * r) * smoothstep5((7.0 - r) / 1.5)
        };
        out.push(RadialFunction::sample(grid.clone(), profile, None)?);
    }
    Ok(out)
}
