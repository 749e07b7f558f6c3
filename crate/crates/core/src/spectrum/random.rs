//! Seeded random test functions.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::LatticeConfig;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_half_ball, BallSpec};
use crate::rng::rng_for_task;

use super::{FourierCoeffs, FourierSpace};

/// Random element of the unit sphere of a Fourier-side space.
///
/// Draws iid standard normals for `(b_m, b'_m)` on the half-lattice points of
/// the ball of radius `r_max` (optionally on a random subset of `sparsity`
/// of them), then rescales to unit norm. Deterministic given
/// `(seed, parameters)`.
pub fn random_unit_ball(
    space: FourierSpace,
    dim: usize,
    s: f64,
    r_max: f64,
    sparsity: Option<usize>,
    seed: u64,
) -> Result<FourierCoeffs> {
    let cfg = LatticeConfig::default();
    let spec = BallSpec::from_radius(r_max, dim)?;
    let mut support = enumerate_half_ball(&spec, &cfg)?;
    if support.is_empty() {
        return Err(Error::domain(format!(
            "empty support: no half-lattice points with norm <= {r_max}"
        )));
    }
    let mut rng = rng_for_task(seed, "random-unit-ball");
    if let Some(n) = sparsity {
        if n == 0 || n > support.len() {
            return Err(Error::domain(format!(
                "sparsity {n} outside 1..={}",
                support.len()
            )));
        }
        support.shuffle(&mut rng);
        support.truncate(n);
        support.sort();
    }
    let mut f = FourierCoeffs::new(dim)?;
    for k in support {
        let b: f64 = rng.sample(StandardNormal);
        let bp: f64 = rng.sample(StandardNormal);
        f.set(k, (b, bp))?;
    }
    let norm = f.norm(space, s)?;
    f.scale(1.0 / norm);
    Ok(f)
}

/// Random unit-norm function with the critical decay profile: coefficient
/// standard deviations proportional to `‖m‖₂^{−s−d/2}`, the profile for
/// which the radius-truncation error actually decays like `R^{−s}`. Flat
/// profiles concentrate all norm near the outer shells and show no rate,
/// so rate experiments use this ensemble.
pub fn random_critical_unit(
    space: FourierSpace,
    dim: usize,
    s: f64,
    r_max: f64,
    seed: u64,
) -> Result<FourierCoeffs> {
    let cfg = LatticeConfig::default();
    let spec = BallSpec::from_radius(r_max, dim)?;
    let support = enumerate_half_ball(&spec, &cfg)?;
    if support.is_empty() {
        return Err(Error::domain(format!(
            "empty support: no half-lattice points with norm <= {r_max}"
        )));
    }
    let mut rng = rng_for_task(seed, "random-critical-unit");
    let exponent = -(s + dim as f64 / 2.0);
    let mut f = FourierCoeffs::new(dim)?;
    for k in support {
        let scale = k.two_norm().powf(exponent);
        let b: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
        let bp: f64 = rng.sample::<f64, _>(StandardNormal) * scale;
        f.set(k, (b, bp))?;
    }
    let norm = f.norm(space, s)?;
    f.scale(1.0 / norm);
    Ok(f)
}

/// `k`-sparse sawtooth coefficients planted on the radius-`r` dictionary:
/// uniformly chosen coefficient slots, magnitudes in `[0.5, 1.5)` with
/// random signs. Deterministic given the seed.
pub fn random_sparse_in_ball(
    dim: usize,
    radius: f64,
    k: usize,
    seed: u64,
) -> Result<crate::spectrum::RieszCoeffs> {
    let cfg = LatticeConfig::default();
    let spec = BallSpec::from_radius(radius, dim)?;
    let half = enumerate_half_ball(&spec, &cfg)?;
    let mut slots: Vec<(usize, bool)> = (0..half.len())
        .flat_map(|i| [(i, false), (i, true)])
        .collect();
    if slots.len() < k {
        return Err(Error::domain(format!(
            "cannot plant a {k}-sparse vector in {} slots",
            slots.len()
        )));
    }
    let mut rng = rng_for_task(seed, "sparse-truth");
    slots.shuffle(&mut rng);
    let mut truth = crate::spectrum::RieszCoeffs::new(dim)?;
    for &(i, is_sin) in slots.iter().take(k) {
        let magnitude = 0.5 + rng.gen::<f64>();
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        if is_sin {
            truth.add(half[i].clone(), 0.0, sign * magnitude)?;
        } else {
            truth.add(half[i].clone(), sign * magnitude, 0.0)?;
        }
    }
    Ok(truth)
}
