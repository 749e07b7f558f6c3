//! Integer lattice points in Euclidean balls.
//!
//! `Z(t,d)` is the set of `k ∈ ℤ^d` with `‖k‖₂ ≤ t` and `N(t,d)` its size.
//! Membership is always decided by the exact integer comparison
//! `‖k‖₂² ≤ ⌊t²⌋`, so boundary radii like `√2` are classified correctly when
//! the ball is constructed from an integer squared radius.
//!
//! Counting is implemented three independent ways (shell-count convolution,
//! the one-coordinate-at-a-time recursion, and plain enumeration); the test
//! suite requires them to agree.

use std::collections::HashMap;

use crate::basis::{is_positive_leading, MultiIndex};
use crate::config::LatticeConfig;
use crate::error::{Error, Result};

/// A Euclidean ball `{‖k‖₂ ≤ t}` in a fixed dimension.
///
/// The squared radius is stored exactly when it is an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    dim: usize,
    radius_sq: RadiusSq,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RadiusSq {
    Exact(u128),
    Real(f64),
}

impl BallSpec {
    /// Ball of real radius `t ≥ 0`.
    pub fn from_radius(t: f64, dim: usize) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("radius must be finite and >= 0, got {t}")));
        }
        if dim == 0 {
            return Err(Error::domain("dimension must be >= 1"));
        }
        Ok(BallSpec {
            dim,
            radius_sq: RadiusSq::Real(t * t),
        })
    }

    /// Ball of radius `√q` for an integer `q`; exact at boundary shells.
    pub fn from_radius_sq(q: u128, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be >= 1"));
        }
        Ok(BallSpec {
            dim,
            radius_sq: RadiusSq::Exact(q),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        match self.radius_sq {
            RadiusSq::Exact(q) => (q as f64).sqrt(),
            RadiusSq::Real(t2) => t2.sqrt(),
        }
    }

    /// `⌊t²⌋` — the largest integer shell inside the ball.
    pub fn floor_radius_sq(&self) -> u128 {
        match self.radius_sq {
            RadiusSq::Exact(q) => q,
            RadiusSq::Real(t2) => t2.floor() as u128,
        }
    }

}

/// Number of representations of `q` as an ordered sum of `d` squares,
/// for all `q ≤ q_max`, via repeated convolution with the d=1 shell counts.
fn shell_counts(q_max: u128, d: usize) -> Vec<u128> {
    let q_max = q_max as usize;
    // d = 1: r[0] = 1 (k=0), r[j²] = 2.
    let mut one = vec![0u128; q_max + 1];
    one[0] = 1;
    let mut j = 1usize;
    while j * j <= q_max {
        one[j * j] = 2;
        j += 1;
    }
    let mut acc = one.clone();
    for _ in 1..d {
        let mut next = vec![0u128; q_max + 1];
        for q in 0..=q_max {
            if acc[q] == 0 {
                continue;
            }
            let mut jj = 0usize;
            while q + jj * jj <= q_max {
                next[q + jj * jj] += acc[q] * if jj == 0 { 1 } else { 2 };
                jj += 1;
            }
        }
        acc = next;
    }
    acc
}

/// `N(t,d)` by summing shell counts. Never materializes points.
pub fn count_ball(spec: &BallSpec) -> u128 {
    let q_max = spec.floor_radius_sq();
    shell_counts(q_max, spec.dim()).iter().sum()
}

/// `N(t,d)` by the one-coordinate recursion
/// `N(t,d) = Σ_{j=−⌊t⌋}^{⌊t⌋} N(√(t²−j²), d−1)`, memoized on `(⌊t²⌋, d)`.
/// Base case `d = 1` gives `2⌊t⌋ + 1`. Serves as the independent oracle for
/// [`count_ball`].
pub fn count_ball_recursive(spec: &BallSpec) -> u128 {
    fn rec(q: u128, d: usize, memo: &mut HashMap<(u128, usize), u128>) -> u128 {
        let t_floor = (q as f64).sqrt().floor() as u128;
        // isqrt guard against float rounding at perfect squares
        let t_floor = if (t_floor + 1) * (t_floor + 1) <= q {
            t_floor + 1
        } else if t_floor * t_floor > q {
            t_floor - 1
        } else {
            t_floor
        };
        if d == 1 {
            return 2 * t_floor + 1;
        }
        if let Some(&v) = memo.get(&(q, d)) {
            return v;
        }
        let mut total = rec(q, d - 1, memo);
        for j in 1..=t_floor {
            total += 2 * rec(q - j * j, d - 1, memo);
        }
        memo.insert((q, d), total);
        total
    }
    let mut memo = HashMap::new();
    rec(spec.floor_radius_sq(), spec.dim(), &mut memo)
}

/// All lattice points of the ball in lexicographic order (most significant
/// coordinate first). Errors if the count exceeds `cap`.
pub fn enumerate_ball(spec: &BallSpec, cfg: &LatticeConfig) -> Result<Vec<MultiIndex>> {
    let n = count_ball(spec);
    if n > cfg.enumeration_cap as u128 {
        return Err(Error::SizeLimit {
            detail: format!(
                "N(t={:.3}, d={}) = {} exceeds cap {} (analytic upper bound: {:.3e})",
                spec.radius(),
                spec.dim(),
                n,
                cfg.enumeration_cap,
                upper_bound_n(spec, cfg)
            ),
        });
    }
    let mut out = Vec::with_capacity(n as usize);
    let mut prefix = vec![0i64; spec.dim()];
    enumerate_rec(spec.floor_radius_sq(), spec.dim(), 0, &mut prefix, &mut out);
    Ok(out)
}

fn enumerate_rec(
    budget: u128,
    dim: usize,
    pos: usize,
    prefix: &mut Vec<i64>,
    out: &mut Vec<MultiIndex>,
) {
    if pos == dim {
        out.push(MultiIndex::new(prefix.clone()).expect("dim >= 1"));
        return;
    }
    let bound = (budget as f64).sqrt() as i64 + 1;
    let bound = (0..=bound).rev().find(|b| (*b as u128) * (*b as u128) <= budget).unwrap_or(0);
    for v in -bound..=bound {
        let used = (v as i128 * v as i128) as u128;
        prefix[pos] = v;
        enumerate_rec(budget - used, dim, pos + 1, prefix, out);
    }
    prefix[pos] = 0;
}

/// The half-lattice part of the ball: points with positive leading entry,
/// in lexicographic order. Its size is `(N(t,d) − 1)/2`.
pub fn enumerate_half_ball(spec: &BallSpec, cfg: &LatticeConfig) -> Result<Vec<MultiIndex>> {
    Ok(enumerate_ball(spec, cfg)?
        .into_iter()
        .filter(is_positive_leading_ref)
        .collect())
}

fn is_positive_leading_ref(k: &MultiIndex) -> bool {
    is_positive_leading(k)
}

/// Analytic upper bound on `N(t,d)`:
/// `(c₁ t/√d)^d` for `t ≥ √d/2`, `(c₂ d/t²)^{t²}` for `0 < t ≤ √d/2`,
/// computed in log space.
pub fn upper_bound_n(spec: &BallSpec, cfg: &LatticeConfig) -> f64 {
    let t = spec.radius();
    let d = spec.dim() as f64;
    if t == 0.0 {
        return 1.0;
    }
    if t >= d.sqrt() / 2.0 {
        (d * (cfg.c1 * t / d.sqrt()).ln()).exp()
    } else {
        let t2 = t * t;
        (t2 * (cfg.c2 * d / t2).ln()).exp()
    }
}

/// Iterator over half-lattice points ordered by increasing `‖k‖₂²`, ties in
/// lexicographic order. Expands one integer shell at a time, so it never
/// materializes a bounding ball; `n` points cost roughly the shells that
/// contain them.
pub struct HalfShellIter {
    dim: usize,
    next_q: u128,
    buf: std::vec::IntoIter<MultiIndex>,
}

impl HalfShellIter {
    pub fn new(dim: usize) -> Self {
        HalfShellIter {
            dim,
            next_q: 1,
            buf: Vec::new().into_iter(),
        }
    }

    fn refill(&mut self) {
        loop {
            let q = self.next_q;
            self.next_q += 1;
            let mut pts = Vec::new();
            let mut prefix = vec![0i64; self.dim];
            shell_rec(q, self.dim, 0, &mut prefix, &mut pts);
            let mut half: Vec<MultiIndex> =
                pts.into_iter().filter(|k| is_positive_leading(k)).collect();
            if !half.is_empty() {
                half.sort();
                self.buf = half.into_iter();
                return;
            }
            // Empty shells are common in high "q"; keep scanning. A shell with
            // points always exists (q a sum of d squares infinitely often for
            // d >= 1 via q = j²).
        }
    }
}

fn shell_rec(budget: u128, dim: usize, pos: usize, prefix: &mut Vec<i64>, out: &mut Vec<MultiIndex>) {
    if pos == dim {
        if budget == 0 {
            out.push(MultiIndex::new(prefix.clone()).expect("dim >= 1"));
        }
        return;
    }
    if pos == dim - 1 {
        // last coordinate must consume the remaining budget exactly
        let r = (budget as f64).sqrt().round() as i64;
        for cand in [r - 1, r, r + 1] {
            if cand >= 0 && (cand as u128) * (cand as u128) == budget {
                if cand == 0 {
                    prefix[pos] = 0;
                    out.push(MultiIndex::new(prefix.clone()).expect("dim >= 1"));
                } else {
                    prefix[pos] = -cand;
                    out.push(MultiIndex::new(prefix.clone()).expect("dim >= 1"));
                    prefix[pos] = cand;
                    out.push(MultiIndex::new(prefix.clone()).expect("dim >= 1"));
                }
                break;
            }
        }
        prefix[pos] = 0;
        return;
    }
    let mut bound = (budget as f64).sqrt() as i64 + 1;
    while bound > 0 && (bound as u128) * (bound as u128) > budget {
        bound -= 1;
    }
    for v in -bound..=bound {
        let used = (v as i128 * v as i128) as u128;
        prefix[pos] = v;
        shell_rec(budget - used, dim, pos + 1, prefix, out);
    }
    prefix[pos] = 0;
}

impl Iterator for HalfShellIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        if let Some(k) = self.buf.next() {
            return Some(k);
        }
        self.refill();
        self.buf.next()
    }
}

/// The `n` smallest values of `‖k‖₂^s` over the half-lattice, nondecreasing,
/// with their generating indices. Ties are broken lexicographically.
pub fn weight_rearrangement(
    n: usize,
    d: usize,
    s: f64,
    cfg: &LatticeConfig,
) -> Result<Vec<(MultiIndex, f64)>> {
    if d == 0 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::domain(format!("smoothness s must lie in [0,1), got {s}")));
    }
    if n as u64 > cfg.enumeration_cap {
        return Err(Error::SizeLimit {
            detail: format!("n = {n} exceeds enumeration cap {}", cfg.enumeration_cap),
        });
    }
    Ok(HalfShellIter::new(d)
        .take(n)
        .map(|k| {
            let w = (k.two_norm_sq() as f64).powf(s / 2.0);
            (k, w)
        })
        .collect())
}

/// `W(ℓ,s,d)`: prefix sum of the nondecreasing weight rearrangement.
pub fn weight_partial_sum(ell: usize, d: usize, s: f64, cfg: &LatticeConfig) -> Result<f64> {
    Ok(weight_rearrangement(ell, d, s, cfg)?
        .iter()
        .map(|(_, w)| w)
        .sum())
}

/// Piecewise lower bound on `W(ℓ,s,d)`:
/// `ℓ` for `ℓ ≤ c₂d`; `(1−s/2)·ℓ·(log ℓ / log(c₂d))^{s/2}` up to `(c₁/2)^d`;
/// `c·d^{s/2}·ℓ^{s/d+1}` beyond. When `c₂d > (c₁/2)^d` the middle regime is
/// empty and the first case takes precedence on the overlap.
pub fn lower_bound_w(ell: usize, d: usize, s: f64, cfg: &LatticeConfig) -> f64 {
    let l = ell as f64;
    let df = d as f64;
    let c2d = cfg.c2 * df;
    let vol_edge = (cfg.c1 / 2.0).powf(df);
    if l <= c2d {
        l
    } else if l <= vol_edge {
        (1.0 - s / 2.0) * l * (l.ln() / c2d.ln()).powf(s / 2.0)
    } else {
        cfg.w_lower_c * df.powf(s / 2.0) * l.powf(s / df + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> LatticeConfig {
        LatticeConfig::default()
    }

    fn brute_force_ball(t2_num: u128, t2_den: u128, d: usize, reach: i64) -> Vec<Vec<i64>> {
        // all k in [-reach, reach]^d with den*‖k‖² <= num
        let mut out = Vec::new();
        let mut k = vec![-reach; d];
        loop {
            let qq: u128 = k.iter().map(|&e| (e * e) as u128).sum();
            if qq * t2_den <= t2_num {
                out.push(k.clone());
            }
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                k[i] += 1;
                if k[i] > reach {
                    k[i] = -reach;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn tiny_balls() {
        let spec = BallSpec::from_radius(0.5, 3).unwrap();
        let pts = enumerate_ball(&spec, &cfg()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].is_zero());

        let spec = BallSpec::from_radius(0.99, 100).unwrap();
        assert_eq!(count_ball(&spec), 1);
    }

    #[test]
    fn ball_examples_against_brute_force() {
        // t = 1.5, d = 2 -> 9 points
        let spec = BallSpec::from_radius(1.5, 2).unwrap();
        let pts = enumerate_ball(&spec, &cfg()).unwrap();
        let brute = brute_force_ball(9, 4, 2, 2);
        assert_eq!(pts.len(), brute.len());
        assert_eq!(pts.len(), 9);

        // t = 2, d = 2 -> 13 points
        let spec = BallSpec::from_radius_sq(4, 2).unwrap();
        assert_eq!(enumerate_ball(&spec, &cfg()).unwrap().len(), 13);
        assert_eq!(count_ball(&spec), 13);
        assert_eq!(count_ball_recursive(&spec), 13);
    }

    #[test]
    fn unit_radius_counts() {
        let spec = BallSpec::from_radius(1.0, 4).unwrap();
        assert_eq!(count_ball(&spec), 9); // 2d+1
        let spec = BallSpec::from_radius(1.0, 1).unwrap();
        assert_eq!(count_ball_recursive(&spec), 3);
    }

    #[test]
    fn sqrt2_boundary_is_exact() {
        let spec = BallSpec::from_radius_sq(2, 2).unwrap();
        assert_eq!(count_ball(&spec), 9);
        assert_eq!(count_ball_recursive(&spec), 9);
        assert_eq!(enumerate_ball(&spec, &cfg()).unwrap().len(), 9);
    }

    #[test]
    fn half_ball_examples() {
        let spec = BallSpec::from_radius(1.5, 2).unwrap();
        let half = enumerate_half_ball(&spec, &cfg()).unwrap();
        let set: Vec<Vec<i64>> = half.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(half.len(), 4);
        for want in [[0i64, 1], [1, -1], [1, 0], [1, 1]] {
            assert!(set.contains(&want.to_vec()), "{want:?} missing");
        }

        let spec = BallSpec::from_radius(0.5, 2).unwrap();
        assert!(enumerate_half_ball(&spec, &cfg()).unwrap().is_empty());

        let spec = BallSpec::from_radius(1.0, 3).unwrap();
        let half = enumerate_half_ball(&spec, &cfg()).unwrap();
        assert_eq!(half.len(), 3);
        for k in &half {
            assert_eq!(k.one_norm(), 1);
        }
    }

    #[test]
    fn three_counting_routes_agree() {
        for d in 1..=6 {
            for q in [0u128, 1, 2, 4, 6, 9, 16, 25, 36] {
                let spec = BallSpec::from_radius_sq(q, d).unwrap();
                let a = count_ball(&spec);
                let b = count_ball_recursive(&spec);
                let c = enumerate_ball(&spec, &cfg()).unwrap().len() as u128;
                assert_eq!(a, b, "q={q} d={d}");
                assert_eq!(a, c, "q={q} d={d}");
                let half = enumerate_half_ball(&spec, &cfg()).unwrap().len() as u128;
                assert_eq!(2 * half + 1, a, "q={q} d={d}");
            }
        }
    }

    #[test]
    fn monotone_in_radius_and_dimension() {
        let mut prev = 0;
        for q in 0..=40u128 {
            let n = count_ball(&BallSpec::from_radius_sq(q, 3).unwrap());
            assert!(n >= prev);
            prev = n;
        }
        let mut prev = 0;
        for d in 1..=8 {
            let n = count_ball(&BallSpec::from_radius_sq(7, d).unwrap());
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn upper_bound_dominates_on_grid() {
        let c = cfg();
        for d in 1..=8 {
            for ti in 1..=12 {
                let t = 0.5 * ti as f64;
                let spec = BallSpec::from_radius(t, d).unwrap();
                let n = count_ball(&spec) as f64;
                let bound = upper_bound_n(&spec, &c);
                assert!(
                    bound >= n,
                    "bound {bound} < count {n} at t={t}, d={d}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_regime_boundary_value() {
        // t = sqrt(d)/2 with d = 4: bound = (c1/2)^4
        let c = cfg();
        let spec = BallSpec::from_radius(1.0, 4).unwrap();
        let b = upper_bound_n(&spec, &c);
        assert!((b - (c.c1 / 2.0).powi(4)).abs() < 1e-9 * b);

        // t = 1, d = 2 is the regime boundary t = sqrt(d)/2 exactly at d=4;
        // at d = 2, t = 1 >= sqrt(2)/2 so regime (i) applies
        let spec = BallSpec::from_radius(1.0, 2).unwrap();
        let b = upper_bound_n(&spec, &c);
        assert!((b - (c.c1 / 2f64.sqrt()).powi(2)).abs() < 1e-9 * b);
    }

    #[test]
    fn gauss_error_band_d2() {
        for ti in 1..=50u32 {
            let t = ti as f64;
            let n = count_ball(&BallSpec::from_radius_sq((ti * ti) as u128, 2).unwrap()) as f64;
            let err = (n - std::f64::consts::PI * t * t).abs();
            assert!(
                err <= 2.0 * 2f64.sqrt() * std::f64::consts::PI * t,
                "t={t}: |E| = {err}"
            );
        }
    }

    #[test]
    fn weight_rearrangement_small_cases() {
        let w = weight_rearrangement(3, 2, 1.0 - 1e-12, &cfg()).unwrap();
        // With s -> 1 the first three weights are 1, 1, sqrt(2)
        assert!((w[0].1 - 1.0).abs() < 1e-9);
        assert!((w[1].1 - 1.0).abs() < 1e-9);
        assert!((w[2].1 - 2f64.sqrt()).abs() < 1e-9);

        let w = weight_rearrangement(2, 5, 0.0, &cfg()).unwrap();
        assert_eq!(w.iter().map(|(_, v)| *v).collect::<Vec<_>>(), vec![1.0, 1.0]);
    }

    #[test]
    fn rearrangement_matches_brute_force_over_half_ball() {
        let c = cfg();
        for (d, s) in [(2usize, 0.5f64), (3, 0.25), (2, 0.75)] {
            let n = 40;
            let got = weight_rearrangement(n, d, s, &c).unwrap();
            // brute force: all half-ball points of a radius comfortably
            // containing n points, sorted by (norm², lex)
            let spec = BallSpec::from_radius(12.0, d).unwrap();
            let mut all = enumerate_half_ball(&spec, &c).unwrap();
            all.sort_by(|a, b| a.two_norm_sq().cmp(&b.two_norm_sq()).then(a.cmp(b)));
            for (i, (k, w)) in got.iter().enumerate() {
                assert_eq!(k, &all[i], "position {i}");
                assert!((w - all[i].two_norm().powf(s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rearranged_weight_exceeds_radius_when_ball_too_small() {
        // ω#_n > t^s whenever N(t,d) < n
        let c = cfg();
        let d = 3;
        let s = 0.5;
        let w = weight_rearrangement(200, d, s, &c).unwrap();
        for t in [1.0f64, 2.0, 3.0] {
            let n_ball = count_ball(&BallSpec::from_radius(t, d).unwrap());
            let half = (n_ball - 1) / 2;
            if (half as usize) < w.len() {
                assert!(
                    w[half as usize].1 > t.powf(s) - 1e-12,
                    "t={t}: ω#_{} = {} <= t^s = {}",
                    half + 1,
                    w[half as usize].1,
                    t.powf(s)
                );
            }
        }
    }

    #[test]
    fn partial_sum_basics() {
        let c = cfg();
        assert!((weight_partial_sum(1, 3, 0.5, &c).unwrap() - 1.0).abs() < 1e-12);
        // 2d smallest weights at s->1, d=2: 1, 1, sqrt2, sqrt2
        let w = weight_partial_sum(4, 2, 1.0 - 1e-12, &c).unwrap();
        assert!((w - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn lower_bound_w_regimes() {
        let c = cfg();
        // regime 1 returns ℓ
        assert_eq!(lower_bound_w(100, 2, 0.5, &c), 100.0);
        // s = 0 collapses regime 2's factor to 1 (evaluate just past c2*d)
        let l = (c.c2 * 8.0) as usize; // inside regime 1 boundary for d=8
        assert_eq!(lower_bound_w(l, 8, 0.0, &c), l as f64);
    }

    #[test]
    fn lower_bound_w_below_true_sum() {
        let c = cfg();
        for d in [2usize, 4, 8] {
            for s in [0.25, 0.75] {
                for ell in [1usize, 10, 100, 1000, 5000, 10000] {
                    let w = weight_partial_sum(ell, d, s, &c).unwrap();
                    let lb = lower_bound_w(ell, d, s, &c);
                    assert!(
                        lb <= w + 1e-9,
                        "d={d} s={s} ℓ={ell}: lower bound {lb} > W = {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_cap_errors_with_bound() {
        let mut c = cfg();
        c.enumeration_cap = 10;
        let spec = BallSpec::from_radius(3.0, 3).unwrap();
        match enumerate_ball(&spec, &c) {
            Err(Error::SizeLimit { detail }) => {
                assert!(detail.contains("upper bound") || detail.contains("e"), "{detail}");
            }
            other => panic!("expected size error, got {other:?}"),
        }
    }
}
