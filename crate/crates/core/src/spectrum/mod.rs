//! Coefficient containers, norms, and exact L2 geometry.
//!
//! Two sparse containers share one layout: a constant term plus a map from
//! half-lattice indices `k ▷ 0` to a pair of reals. For [`FourierCoeffs`]
//! the pair is the real cosine/sine coefficients `(b_m, b'_m)` of
//! `f = a₀ + Σ b_m cos(2πm·x) + b'_m sin(2πm·x)`; for [`RieszCoeffs`] it is
//! `(α_k, β_k)` in `f = α₀ + Σ α_k C_k + β_k S_k`. Storing the real pair on
//! the half-lattice halves memory relative to complex modes on the full
//! lattice and removes the conjugate-symmetry invariant; the dictionary
//! conversion is `b_m = a_m + a_{−m}`, `b'_m = i(a_m − a_{−m})`.

mod gram;
mod mobius;
mod random;
mod transform;

pub use gram::{gram_entry, gram_matrix, GramMatrix};
pub use mobius::mobius;
pub use random::{random_critical_unit, random_sparse_in_ball, random_unit_ball};
pub use transform::{fourier_to_riesz, generator_fourier_coefficient, riesz_to_fourier};

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::basis::{is_positive_leading, BasisId, MultiIndex};
use crate::error::{Error, Result};

/// Norms defined through Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierSpace {
    /// Sobolev: `(a₀² + Σ ‖m‖₂^{2s}(b_m² + b'_m²)/2)^{1/2}`.
    Ws,
    /// Barron: `|a₀| + Σ ‖m‖₂^s (b_m² + b'_m²)^{1/2}`.
    Bs,
}

/// Norms defined through sawtooth coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RieszSpace {
    /// `(α₀² + Σ ‖k‖₂^{2s}(α_k² + β_k²))^{1/2}`.
    Fs,
    /// Sequence-side Barron: `|α₀| + Σ ‖k‖₂^s (|α_k| + |β_k|)`.
    BsSeq,
}

fn check_smoothness(s: f64) -> Result<()> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::domain(format!(
            "smoothness s must lie in [0,1) (norm equivalences hold only there), got {s}"
        )));
    }
    Ok(())
}

macro_rules! coeff_container {
    ($name:ident, $const_field:literal, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            dim: usize,
            constant: f64,
            terms: BTreeMap<MultiIndex, (f64, f64)>,
        }

        impl $name {
            pub fn new(dim: usize) -> Result<Self> {
                if dim == 0 {
                    return Err(Error::domain("dimension must be >= 1"));
                }
                Ok(Self {
                    dim,
                    constant: 0.0,
                    terms: BTreeMap::new(),
                })
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn constant(&self) -> f64 {
                self.constant
            }

            pub fn set_constant(&mut self, v: f64) {
                self.constant = v;
            }

            /// Insert or overwrite the pair at `k`; `k` must satisfy `k ▷ 0`
            /// and match the container dimension.
            pub fn set(&mut self, k: MultiIndex, pair: (f64, f64)) -> Result<()> {
                if k.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: k.dim(),
                    });
                }
                if !is_positive_leading(&k) {
                    return Err(Error::domain(format!(
                        "index {k} is not in the half-lattice"
                    )));
                }
                if pair == (0.0, 0.0) {
                    self.terms.remove(&k);
                } else {
                    self.terms.insert(k, pair);
                }
                Ok(())
            }

            /// Accumulate into the pair at `k` (same contract as `set`).
            pub fn add(&mut self, k: MultiIndex, first: f64, second: f64) -> Result<()> {
                let cur = self.terms.get(&k).copied().unwrap_or((0.0, 0.0));
                self.set(k, (cur.0 + first, cur.1 + second))
            }

            pub fn get(&self, k: &MultiIndex) -> (f64, f64) {
                self.terms.get(k).copied().unwrap_or((0.0, 0.0))
            }

            /// Sorted iteration over the support.
            pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &(f64, f64))> {
                self.terms.iter()
            }

            pub fn support_len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            /// Σ (|first| + |second|) over the support (constant excluded).
            pub fn term_abs_mass(&self) -> f64 {
                self.terms
                    .values()
                    .map(|(a, b)| a.abs() + b.abs())
                    .sum()
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeStruct;
                #[derive(Serialize)]
                struct Term<'a> {
                    k: &'a MultiIndex,
                    c: f64,
                    s: f64,
                }
                let mut st = serializer.serialize_struct(stringify!($name), 3)?;
                st.serialize_field("dim", &self.dim)?;
                st.serialize_field($const_field, &self.constant)?;
                let terms: Vec<Term> = self
                    .terms
                    .iter()
                    .map(|(k, (c, s))| Term { k, c: *c, s: *s })
                    .collect();
                st.serialize_field("terms", &terms)?;
                st.end()
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(
                deserializer: D,
            ) -> std::result::Result<Self, D::Error> {
                #[derive(Deserialize)]
                struct Term {
                    k: Vec<i64>,
                    c: f64,
                    s: f64,
                }
                #[derive(Deserialize)]
                struct Doc {
                    dim: usize,
                    #[serde(rename = $const_field)]
                    constant: f64,
                    terms: Vec<Term>,
                }
                let doc = Doc::deserialize(deserializer)?;
                let mut out = $name::new(doc.dim).map_err(D::Error::custom)?;
                out.set_constant(doc.constant);
                for t in doc.terms {
                    let k = MultiIndex::new(t.k).map_err(D::Error::custom)?;
                    out.add(k, t.c, t.s).map_err(D::Error::custom)?;
                }
                Ok(out)
            }
        }
    };
}

coeff_container!(
    FourierCoeffs,
    "a0",
    "Sparse real cosine/sine coefficients on the half-lattice."
);
coeff_container!(
    RieszCoeffs,
    "alpha0",
    "Sparse sawtooth coefficients on the half-lattice."
);

impl FourierCoeffs {
    pub fn a0(&self) -> f64 {
        self.constant()
    }

    /// Pointwise evaluation of the represented trigonometric polynomial.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = self.constant;
        for (k, (b, bp)) in self.terms() {
            let t = 2.0 * std::f64::consts::PI * crate::basis::dot(k, x)?;
            acc += b * t.cos() + bp * t.sin();
        }
        Ok(acc)
    }

    pub fn norm(&self, space: FourierSpace, s: f64) -> Result<f64> {
        check_smoothness(s)?;
        Ok(match space {
            FourierSpace::Ws => {
                let mut acc = self.constant * self.constant;
                for (m, (b, bp)) in self.terms() {
                    let w = (m.two_norm_sq() as f64).powf(s);
                    acc += w * (b * b + bp * bp) / 2.0;
                }
                acc.sqrt()
            }
            FourierSpace::Bs => {
                let mut acc = self.constant.abs();
                for (m, (b, bp)) in self.terms() {
                    let w = (m.two_norm_sq() as f64).powf(s / 2.0);
                    acc += w * (b * b + bp * bp).sqrt();
                }
                acc
            }
        })
    }

    /// Exact L2 norm: `(a₀² + Σ(b² + b'²)/2)^{1/2}` by orthonormality.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = self.constant * self.constant;
        for (_, (b, bp)) in self.terms() {
            acc += (b * b + bp * bp) / 2.0;
        }
        acc.sqrt()
    }

    /// Rescale all coefficients by `factor`.
    pub fn scale(&mut self, factor: f64) {
        self.constant *= factor;
        for v in self.terms.values_mut() {
            v.0 *= factor;
            v.1 *= factor;
        }
    }
}

impl RieszCoeffs {
    pub fn alpha0(&self) -> f64 {
        self.constant()
    }

    /// Pointwise evaluation of `α₀ + Σ α_k C_k + β_k S_k` by direct
    /// summation; the oracle all network constructions are tested against.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = self.constant;
        for (k, (a, b)) in self.terms() {
            let t = crate::basis::dot(k, x)?;
            if *a != 0.0 {
                acc += a * crate::basis::eval_scalar(crate::basis::GeneratorKind::Cos, t)?;
            }
            if *b != 0.0 {
                acc += b * crate::basis::eval_scalar(crate::basis::GeneratorKind::Sin, t)?;
            }
        }
        Ok(acc)
    }

    pub fn norm(&self, space: RieszSpace, s: f64) -> Result<f64> {
        check_smoothness(s)?;
        Ok(match space {
            RieszSpace::Fs => {
                let mut acc = self.constant * self.constant;
                for (k, (a, b)) in self.terms() {
                    let w = (k.two_norm_sq() as f64).powf(s);
                    acc += w * (a * a + b * b);
                }
                acc.sqrt()
            }
            RieszSpace::BsSeq => {
                let mut acc = self.constant.abs();
                for (k, (a, b)) in self.terms() {
                    let w = (k.two_norm_sq() as f64).powf(s / 2.0);
                    acc += w * (a.abs() + b.abs());
                }
                acc
            }
        })
    }

    pub fn scale(&mut self, factor: f64) {
        self.constant *= factor;
        for v in self.terms.values_mut() {
            v.0 *= factor;
            v.1 *= factor;
        }
    }

    /// Coefficientwise difference `self − other`.
    pub fn sub(&self, other: &RieszCoeffs) -> Result<RieszCoeffs> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        out.constant -= other.constant;
        for (k, (a, b)) in other.terms() {
            out.add(k.clone(), -a, -b)?;
        }
        Ok(out)
    }

    /// The basis ids carried by the support, in lexicographic order, cosine
    /// before sine per index; structurally zero slots are skipped.
    pub fn basis_ids(&self) -> Vec<BasisId> {
        let mut ids = Vec::new();
        for (k, (a, b)) in self.terms() {
            if *a != 0.0 {
                ids.push(BasisId::Cos { k: k.clone() });
            }
            if *b != 0.0 {
                ids.push(BasisId::Sin { k: k.clone() });
            }
        }
        ids
    }
}

/// Exact `L2([0,1]^d)` inner product of two represented functions.
///
/// The Gram form is block-diagonal across primitive directions (only
/// parallel indices interact), and within a direction it diagonalizes over
/// divisors: writing `m = 2^v·u` with `u` odd, the cosine pairing is
/// `[v = v']·gcd(u,u')⁴/(3u²u'²)` and `gcd⁴ = Σ_{d|u, d|u'} J₄(d)` (Jordan
/// totient), so with `γ_u = α_m/u²` each bucket contributes
/// `(1/3)·Σ_d J₄(d)·T_d(u-side)·T_d(v-side)` where `T_d = Σ_{d|u} γ_u`.
/// The sine pairing carries the extra factor `χ(u)χ(u')` with `χ` the
/// non-principal character mod 4, absorbed into `γ`. Cost is near-linear in
/// the support instead of quadratic per bucket.
pub fn l2_inner(u: &RieszCoeffs, v: &RieszCoeffs) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let mut acc = u.constant() * v.constant();
    let bu = direction_buckets(u);
    let bv = direction_buckets(v);
    let same = std::ptr::eq(u, v);
    let mut jordan = JordanCache::default();
    for (e, terms_u) in &bu {
        let terms_v = if same {
            Some(terms_u)
        } else {
            bv.get(e)
        };
        let Some(terms_v) = terms_v else { continue };
        let profile_u = divisor_profile(terms_u);
        let profile_v = if same {
            None
        } else {
            Some(divisor_profile(terms_v))
        };
        let profile_v = profile_v.as_ref().unwrap_or(&profile_u);
        for (key, (tc, ts)) in &profile_u {
            if let Some((tc_v, ts_v)) = profile_v.get(key) {
                let j4 = jordan.get(key.1);
                acc += j4 * (tc * tc_v + ts * ts_v) / 3.0;
            }
        }
    }
    Ok(acc)
}

/// `(2-adic valuation, odd divisor) → (Σ γ_u for cosine, Σ χ(u)γ_u for sine)`.
/// Ordered map: summation order must not depend on hash state, or repeated
/// runs drift in the last float bits and break byte-identical artifacts.
fn divisor_profile(terms: &[(u64, f64, f64)]) -> BTreeMap<(u32, u64), (f64, f64)> {
    let mut map: BTreeMap<(u32, u64), (f64, f64)> = BTreeMap::new();
    for &(m, a, b) in terms {
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let val = m.trailing_zeros();
        let odd = m >> val;
        let inv_sq = 1.0 / (odd as f64 * odd as f64);
        let chi = if odd % 4 == 1 { 1.0 } else { -1.0 };
        let gamma_c = a * inv_sq;
        let gamma_s = chi * b * inv_sq;
        for d in odd_divisors(odd) {
            let slot = map.entry((val, d)).or_insert((0.0, 0.0));
            slot.0 += gamma_c;
            slot.1 += gamma_s;
        }
    }
    map
}

fn odd_divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 2;
    }
    small.extend(large);
    small
}

/// Memoized Jordan totient `J₄(d) = d⁴·Π_{p|d}(1 − p^{−4})` for odd `d`.
#[derive(Default)]
struct JordanCache(HashMap<u64, f64>);

impl JordanCache {
    fn get(&mut self, d: u64) -> f64 {
        if let Some(&v) = self.0.get(&d) {
            return v;
        }
        let mut value = (d as f64).powi(4);
        let mut m = d;
        let mut p = 3u64;
        while p * p <= m {
            if m % p == 0 {
                value *= 1.0 - (p as f64).powi(-4);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 2;
        }
        if m > 1 {
            value *= 1.0 - (m as f64).powi(-4);
        }
        self.0.insert(d, value);
        value
    }
}

/// Exact L2 norm of the represented function.
pub fn l2_norm(u: &RieszCoeffs) -> f64 {
    l2_inner(u, u).expect("same container").max(0.0).sqrt()
}

pub(crate) fn direction_buckets(
    c: &RieszCoeffs,
) -> BTreeMap<MultiIndex, Vec<(u64, f64, f64)>> {
    let mut out: BTreeMap<MultiIndex, Vec<(u64, f64, f64)>> = BTreeMap::new();
    for (k, (a, b)) in c.terms() {
        let (g, e) = k.primitive().expect("support indices are nonzero");
        out.entry(e).or_default().push((g, *a, *b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let mut f = FourierCoeffs::new(2).unwrap();
        f.set(idx(&[1, 0]), (1.0, 0.0)).unwrap();
        assert!((f.norm(FourierSpace::Ws, 0.5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);

        let mut g = RieszCoeffs::new(1).unwrap();
        g.set_constant(3.0);
        assert_eq!(g.norm(RieszSpace::Fs, 0.3).unwrap(), 3.0);

        let mut g = RieszCoeffs::new(2).unwrap();
        g.set(idx(&[1, 1]), (2.0, 0.0)).unwrap();
        assert!(
            (g.norm(RieszSpace::BsSeq, 1.0 - 1e-14).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9
        );
    }

    #[test]
    fn smoothness_domain_enforced() {
        let f = FourierCoeffs::new(1).unwrap();
        assert!(f.norm(FourierSpace::Ws, 1.0).is_err());
        assert!(f.norm(FourierSpace::Ws, -0.1).is_err());
    }

    #[test]
    fn half_lattice_keys_enforced() {
        let mut f = RieszCoeffs::new(2).unwrap();
        assert!(f.set(idx(&[-1, 2]), (1.0, 0.0)).is_err());
        assert!(f.set(idx(&[0, 0]), (1.0, 0.0)).is_err());
        assert!(f.set(idx(&[1]), (1.0, 0.0)).is_err());
    }

    #[test]
    fn l2_inner_examples() {
        // constant against mean-zero term
        let mut u = RieszCoeffs::new(2).unwrap();
        u.set_constant(1.0);
        let mut v = RieszCoeffs::new(2).unwrap();
        v.set(idx(&[1, 0]), (0.7, -0.3)).unwrap();
        assert_eq!(l2_inner(&u, &v).unwrap(), 0.0);

        // single cosine dilation: norm² = 1/3
        let mut u = RieszCoeffs::new(2).unwrap();
        u.set(idx(&[1, 0]), (1.0, 0.0)).unwrap();
        assert!((l2_inner(&u, &u).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        // parallel pair 1,3
        let mut v = RieszCoeffs::new(2).unwrap();
        v.set(idx(&[3, 0]), (1.0, 0.0)).unwrap();
        assert!((l2_inner(&u, &v).unwrap() - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn l2_inner_matches_pairwise_gram_sum() {
        // the divisor-sum fast path against the quadratic closed-form sum
        use rand::Rng;
        let mut rng = crate::rng::rng_for_task(2, "l2-inner-check");
        for _ in 0..10 {
            let mut u = RieszCoeffs::new(2).unwrap();
            let mut v = RieszCoeffs::new(2).unwrap();
            for _ in 0..15 {
                let e: Vec<i64> = vec![rng.gen_range(0..4), rng.gen_range(-3..4)];
                if let Ok(k) = MultiIndex::new(e.clone()) {
                    if is_positive_leading(&k) {
                        let scale = rng.gen_range(1..9i64);
                        let k = k.scaled(scale);
                        let _ = u.add(k.clone(), rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                        if rng.gen::<bool>() {
                            let _ = v.add(k, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                        }
                    }
                }
            }
            let mut slow = u.constant() * v.constant();
            for (k, (a, b)) in u.terms() {
                for (kp, (ap, bp)) in v.terms() {
                    let cc = gram_entry(&BasisId::Cos { k: k.clone() }, &BasisId::Cos { k: kp.clone() })
                        .unwrap();
                    let ss = gram_entry(&BasisId::Sin { k: k.clone() }, &BasisId::Sin { k: kp.clone() })
                        .unwrap();
                    slow += a * ap * cc + b * bp * ss;
                }
            }
            let fast = l2_inner(&u, &v).unwrap();
            assert!(
                (fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()),
                "fast {fast} vs slow {slow}"
            );
        }
    }

    #[test]
    fn coeff_json_round_trip() {
        let mut f = RieszCoeffs::new(2).unwrap();
        f.set_constant(0.25);
        f.set(idx(&[1, -2]), (0.1, -0.9)).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"alpha0\""));
        let back: RieszCoeffs = serde_json::from_str(&text).unwrap();
        assert_eq!(f, back);

        let mut f = FourierCoeffs::new(1).unwrap();
        f.set(idx(&[3]), (1.5, 2.5)).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"a0\""));
        let back: FourierCoeffs = serde_json::from_str(&text).unwrap();
        assert_eq!(f, back);
    }
}
