//! Conversion between cosine/sine and sawtooth coefficients.
//!
//! The forward direction rests on the dilation series
//! `cos(2πx) = (π²/8) Σ_ℓ μ(2ℓ+1)(2ℓ+1)^{−2} C_{2ℓ+1}(x)` and its sine
//! analogue with the extra alternating sign; the prefactor is stored as the
//! simplified exact value `π²/8` (a unit test asserts the identity with the
//! literature form `√3/(√2κ)`, `κ² = 96/π⁴`). The reverse direction uses the
//! Fourier series of the generators, whose odd-harmonic coefficients decay
//! quadratically. Both directions return a rigorous bound on the discarded
//! series tail.

use crate::basis::GeneratorKind;
use crate::error::{Error, Result};

use super::{mobius, FourierCoeffs, RieszCoeffs};

/// `π²/8`, the prefactor of the dilation series.
pub(crate) const SERIES_PREFACTOR: f64 = std::f64::consts::PI * std::f64::consts::PI / 8.0;

/// `p`-th Fourier coefficient of a generator: for the cosine generator
/// `8/(π²p²)` at odd `p` (0 at even); for the sine generator the same size
/// with sign `(−1)^{(p−1)/2}`.
pub fn generator_fourier_coefficient(kind: GeneratorKind, p: u64) -> f64 {
    if p == 0 || p % 2 == 0 {
        return 0.0;
    }
    let magnitude = 8.0 / (std::f64::consts::PI.powi(2) * (p * p) as f64);
    match kind {
        GeneratorKind::Cos => magnitude,
        GeneratorKind::Sin => {
            if ((p - 1) / 2) % 2 == 0 {
                magnitude
            } else {
                -magnitude
            }
        }
    }
}

/// Expand cosine/sine coefficients into sawtooth coefficients, keeping
/// dilation factors `2ℓ+1` with `ℓ ≤ trunc_l`.
///
/// Returns the coefficients and an upper bound on the ℓ1 mass of the
/// discarded terms: `(π²/8)·Σ(|b_m|+|b'_m|)·Σ_{ℓ>L}(2ℓ+1)^{−2}` with the
/// tail sum bounded by `1/(4L+2)`.
pub fn fourier_to_riesz(f: &FourierCoeffs, trunc_l: u64) -> Result<(RieszCoeffs, f64)> {
    let mut out = RieszCoeffs::new(f.dim())?;
    out.set_constant(f.a0());
    for (m, (b, bp)) in f.terms() {
        for l in 0..=trunc_l {
            let q = 2 * l + 1;
            let mu = mobius(q)?;
            if mu == 0 {
                continue;
            }
            let w = SERIES_PREFACTOR * mu as f64 / (q * q) as f64;
            let key = m.scaled(q as i64);
            let alpha = w * b;
            let beta = if l % 2 == 0 { w * bp } else { -w * bp };
            out.add(key, alpha, beta)?;
        }
    }
    let tail = SERIES_PREFACTOR * f.term_abs_mass() / (4 * trunc_l + 2) as f64;
    Ok((out, tail))
}

/// Expand sawtooth coefficients into cosine/sine coefficients, keeping odd
/// harmonics `p ≤ trunc_p`.
///
/// Returns the coefficients and an upper bound on the ℓ1 mass of the
/// discarded harmonics: `Σ(|α_k|+|β_k|)·(8/π²)·Σ_{odd p>P} p^{−2}` with the
/// tail sum bounded by `1/(2P)`.
pub fn riesz_to_fourier(g: &RieszCoeffs, trunc_p: u64) -> Result<(FourierCoeffs, f64)> {
    if trunc_p == 0 {
        return Err(Error::domain("harmonic cap must be >= 1"));
    }
    let mut out = FourierCoeffs::new(g.dim())?;
    out.set_constant(g.alpha0());
    for (k, (alpha, beta)) in g.terms() {
        let mut p = 1u64;
        while p <= trunc_p {
            let key = k.scaled(p as i64);
            let b = alpha * generator_fourier_coefficient(GeneratorKind::Cos, p);
            let bp = beta * generator_fourier_coefficient(GeneratorKind::Sin, p);
            out.add(key, b, bp)?;
            p += 2;
        }
    }
    let tail = g.term_abs_mass() * (8.0 / std::f64::consts::PI.powi(2)) / (2 * trunc_p) as f64;
    Ok((out, tail))
}
