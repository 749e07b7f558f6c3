//! The sawtooth generators and their multivariate dilations.
//!
//! `C` is the 1-periodic piecewise-linear interpolant of `cos(2πt)` at the
//! quarter-integers, evaluated through the closed form `4|frac(t) − 1/2| − 1`.
//! `S` interpolates `sin(2πt)` and is evaluated as `C(t + 3/4)`, so the
//! quarter-period shift identity holds to the last bit. Dilations are
//! `C_k(x) = C(k·x)` and `S_k(x) = S(k·x)` for integer frequency vectors `k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer frequency vector `k ∈ ℤ^d`. Ordering is lexicographic with the
/// most significant coordinate first, which fixes enumeration and assembly
/// order everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("multi-index must have dimension >= 1"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `‖k‖₁` as an exact integer.
    pub fn one_norm(&self) -> u64 {
        self.0.iter().map(|&e| e.unsigned_abs()).sum()
    }

    /// `‖k‖₂²` as an exact integer.
    pub fn two_norm_sq(&self) -> u128 {
        self.0
            .iter()
            .map(|&e| (e as i128 * e as i128) as u128)
            .sum()
    }

    /// `‖k‖₂` (inexact).
    pub fn two_norm(&self) -> f64 {
        (self.two_norm_sq() as f64).sqrt()
    }

    /// Entrywise scaling by a positive integer; preserves the half-lattice
    /// ordering.
    pub fn scaled(&self, factor: i64) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&e| e * factor).collect())
    }

    /// `(g, e)` with `g = gcd(|k₁|,…,|k_d|)` (zeros ignored) and `e = k/g`
    /// the primitive direction. `None` for the zero vector.
    pub fn primitive(&self) -> Option<(u64, MultiIndex)> {
        let g = self.0.iter().fold(0u64, |acc, &e| gcd(acc, e.unsigned_abs()));
        if g == 0 {
            return None;
        }
        let e = MultiIndex(self.0.iter().map(|&v| v / g as i64).collect());
        Some((g, e))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Half-lattice ordering predicate: `k ≠ 0` and the first nonzero entry of
/// `k` is positive. Exactly one of `{k, −k}` satisfies it for `k ≠ 0`.
pub fn is_positive_leading(k: &MultiIndex) -> bool {
    for &e in k.entries() {
        if e != 0 {
            return e > 0;
        }
    }
    false
}

/// Which sawtooth generator a dilation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Cos,
    Sin,
}

/// Identifier of one element of the basis `{1} ∪ {C_k, S_k}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisId {
    Const,
    Cos { k: MultiIndex },
    Sin { k: MultiIndex },
}

impl BasisId {
    /// `C_k`; requires `k ▷ 0`.
    pub fn cos(k: MultiIndex) -> Result<Self> {
        if !is_positive_leading(&k) {
            return Err(Error::domain(format!(
                "index {k} is not in the half-lattice (first nonzero entry must be positive)"
            )));
        }
        Ok(BasisId::Cos { k })
    }

    /// `S_k`; requires `k ▷ 0`.
    pub fn sin(k: MultiIndex) -> Result<Self> {
        if !is_positive_leading(&k) {
            return Err(Error::domain(format!(
                "index {k} is not in the half-lattice (first nonzero entry must be positive)"
            )));
        }
        Ok(BasisId::Sin { k })
    }

    pub fn index(&self) -> Option<&MultiIndex> {
        match self {
            BasisId::Const => None,
            BasisId::Cos { k } | BasisId::Sin { k } => Some(k),
        }
    }

    pub fn generator(&self) -> Option<GeneratorKind> {
        match self {
            BasisId::Const => None,
            BasisId::Cos { .. } => Some(GeneratorKind::Cos),
            BasisId::Sin { .. } => Some(GeneratorKind::Sin),
        }
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::Const => write!(f, "1"),
            BasisId::Cos { k } => write!(f, "C{k}"),
            BasisId::Sin { k } => write!(f, "S{k}"),
        }
    }
}

/// The periodic generator at a scalar argument.
///
/// `C(t) = 4|frac(t) − 1/2| − 1` with `frac(t) = t − ⌊t⌋`; `S(t) = C(t + 3/4)`.
/// Values lie in `[−1, 1]` and are exact at representable breakpoints.
pub fn eval_scalar(kind: GeneratorKind, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain(format!("non-finite argument {t}")));
    }
    Ok(match kind {
        GeneratorKind::Cos => sawtooth_cos(t),
        GeneratorKind::Sin => sawtooth_cos(t + 0.75),
    })
}

#[inline]
fn sawtooth_cos(t: f64) -> f64 {
    let u = t - t.floor();
    4.0 * (u - 0.5).abs() - 1.0
}

/// One basis function at a point of `[0,1]^d`.
///
/// `Const` ignores `x`; for dilations the frequency dimension must match.
pub fn eval_basis(id: &BasisId, x: &[f64]) -> Result<f64> {
    match id {
        BasisId::Const => Ok(1.0),
        BasisId::Cos { k } => eval_scalar(GeneratorKind::Cos, dot(k, x)?),
        BasisId::Sin { k } => eval_scalar(GeneratorKind::Sin, dot(k, x)?),
    }
}

/// Exact L2 norm of a basis function: 1 for the constant, `3^{−1/2}` for
/// every dilation.
pub fn basis_l2_norm(id: &BasisId) -> f64 {
    match id {
        BasisId::Const => 1.0,
        _ => 1.0 / 3f64.sqrt(),
    }
}

/// `k·x` with compensated (Neumaier) summation. Dot products of large
/// integer frequencies with reals lose bits under naive accumulation and the
/// exactness tests downstream notice.
pub fn dot(k: &MultiIndex, x: &[f64]) -> Result<f64> {
    if k.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: x.len(),
        });
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (&ki, &xi) in k.entries().iter().zip(x) {
        let term = ki as f64 * xi;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}
