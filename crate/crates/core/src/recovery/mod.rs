//! Sample-based recovery of coefficient vectors.
//!
//! The search space for radius `R` is the span of the constant and all
//! dilations with `‖k‖₂ ≤ R`. Points are drawn iid uniform on the cube,
//! values are exact coefficient sums, and two estimators are provided:
//! unweighted least squares (the system is uniformly bounded, so no
//! weights are needed) and basis pursuit denoising.

mod bp;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::approx::{lp_norm_mc, LpEstimate};
use crate::basis::{eval_basis, BasisId};
use crate::config::{Config, GENERATOR_ID};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_half_ball, BallSpec};
use crate::rng::rng_for_task;
use crate::spectrum::{l2_norm, RieszCoeffs, RieszSpace};

/// Sampled function values with their provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSet {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub generator: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ls,
    Bp,
}

/// What a recovery run did and how well-posed it was.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub method: Method,
    pub radius: f64,
    pub n_basis: usize,
    pub n_samples: usize,
    /// `sqrt(1/N Σ (g(x_i) − f(x_i))²)` at the returned coefficients.
    pub residual_rms: f64,
    /// Exact L2 error against the truth; filled by callers that know it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_l2_exact: Option<f64>,
    /// Extreme singular values of `A/√N`.
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank_deficient: bool,
    pub iterations: u64,
    /// Sup-norm of `Aᵀ(Ac − y)`, scaled by `‖A‖·‖y‖` (least squares only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_eq_residual: Option<f64>,
    pub used_fallback: bool,
}

/// Draw `n` iid uniform points and evaluate `f` exactly at them.
pub fn draw_samples(f: &RieszCoeffs, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let mut rng = rng_for_task(seed, "draw-samples");
    let mut points = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..f.dim()).map(|_| rng.gen::<f64>()).collect();
        values.push(f.eval(&x)?);
        points.push(x);
    }
    Ok(SampleSet {
        dim: f.dim(),
        points,
        values,
        seed,
        generator: GENERATOR_ID.to_string(),
    })
}

/// Dictionary of the radius-`R` search space: the constant, then cosine and
/// sine dilations per half-lattice index in lexicographic order.
pub fn ids_for_radius(radius: f64, dim: usize, cfg: &Config) -> Result<Vec<BasisId>> {
    let spec = BallSpec::from_radius(radius, dim)?;
    let mut ids = vec![BasisId::Const];
    for k in enumerate_half_ball(&spec, &cfg.lattice)? {
        ids.push(BasisId::Cos { k: k.clone() });
        ids.push(BasisId::Sin { k });
    }
    Ok(ids)
}

/// `A[i][j] = basis_j(x_i)`; entries lie in `[−1, 1]`.
pub fn design_matrix(points: &[Vec<f64>], ids: &[BasisId]) -> Result<DMatrix<f64>> {
    let mut a = DMatrix::zeros(points.len(), ids.len());
    for (i, x) in points.iter().enumerate() {
        for (j, id) in ids.iter().enumerate() {
            a[(i, j)] = eval_basis(id, x)?;
        }
    }
    Ok(a)
}

fn coeffs_from_solution(ids: &[BasisId], x: &DVector<f64>, dim: usize) -> Result<RieszCoeffs> {
    let mut c = RieszCoeffs::new(dim)?;
    for (id, v) in ids.iter().zip(x.iter()) {
        match id {
            BasisId::Const => c.set_constant(*v),
            BasisId::Cos { k } => c.add(k.clone(), *v, 0.0)?,
            BasisId::Sin { k } => c.add(k.clone(), 0.0, *v)?,
        }
    }
    Ok(c)
}

/// Unweighted least squares over the radius-`R` dictionary.
///
/// Solved through the SVD of the design matrix; rank deficiency is flagged
/// and the minimum-norm solution returned. Requires `N ≥ n`.
pub fn least_squares_recover(
    samples: &SampleSet,
    radius: f64,
    cfg: &Config,
) -> Result<(RieszCoeffs, RecoveryReport)> {
    let ids = ids_for_radius(radius, samples.dim, cfg)?;
    let n_basis = ids.len();
    let n_samples = samples.points.len();
    if n_samples < n_basis {
        return Err(Error::usage(format!(
            "least squares needs N >= n: N = {n_samples}, n = {n_basis}"
        )));
    }
    let a = design_matrix(&samples.points, &ids)?;
    let y = DVector::from_column_slice(&samples.values);
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.amax();
    let rank_tol = sigma_max * (n_samples.max(n_basis) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|s| **s > rank_tol).count();
    let rank_deficient = rank < n_basis;
    let solution = svd
        .solve(&y, rank_tol)
        .map_err(|e| Error::Solver(e.to_string()))?;
    let sigma_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);

    let residual = &a * &solution - &y;
    let residual_rms = residual.norm() / (n_samples as f64).sqrt();
    let normal_eq = (a.transpose() * &residual).amax();
    let scale = sigma_max * y.norm();
    let report = RecoveryReport {
        method: Method::Ls,
        radius,
        n_basis,
        n_samples,
        residual_rms,
        error_l2_exact: None,
        sigma_min: sigma_min / (n_samples as f64).sqrt(),
        sigma_max: sigma_max / (n_samples as f64).sqrt(),
        rank_deficient,
        iterations: 1,
        normal_eq_residual: Some(if scale > 0.0 { normal_eq / scale } else { 0.0 }),
        used_fallback: false,
    };
    Ok((coeffs_from_solution(&ids, &solution, samples.dim)?, report))
}

/// Basis pursuit denoising over the radius-`R` dictionary: minimize the
/// absolute coefficient sum subject to empirical RMS at most `delta`.
pub fn basis_pursuit_recover(
    samples: &SampleSet,
    radius: f64,
    delta: f64,
    cfg: &Config,
) -> Result<(RieszCoeffs, RecoveryReport)> {
    let ids = ids_for_radius(radius, samples.dim, cfg)?;
    let n_basis = ids.len();
    let n_samples = samples.points.len();
    let root_n = (n_samples as f64).sqrt();
    let a = design_matrix(&samples.points, &ids)? / root_n;
    let y = DVector::from_column_slice(&samples.values) / root_n;

    let svd_values = a.clone().svd(false, false).singular_values;
    let sigma_max = svd_values.amax();
    let sigma_min = svd_values.iter().cloned().fold(f64::INFINITY, f64::min);

    let sol = bp::solve(&a, &y, delta, &cfg.recovery)?;
    let report = RecoveryReport {
        method: Method::Bp,
        radius,
        n_basis,
        n_samples,
        residual_rms: sol.residual,
        error_l2_exact: None,
        sigma_min,
        sigma_max,
        rank_deficient: false,
        iterations: sol.iterations,
        normal_eq_residual: None,
        used_fallback: sol.used_fallback,
    };
    Ok((coeffs_from_solution(&ids, &sol.coeffs, samples.dim)?, report))
}

/// Context for the display-only two-term recovery bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundContext {
    pub radius: f64,
    pub s: f64,
    pub k_sparsity: usize,
    pub c_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub error_l2_exact: f64,
    pub lp: Vec<LpEstimate>,
    /// `(p, C_s·(k^{−1/p}·σ_k(f,ℓ1,V_R) + k^{1/2−1/p}·R^{−s}·‖f‖))` rows for
    /// side-by-side display, when a context is supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_term_bound: Option<Vec<(f64, f64)>>,
}

/// `σ_k` of the truth in the absolute-coefficient norm over the radius-`R`
/// dictionary: mass outside the ball plus all but the `k` largest inside.
fn sigma_k_l1(truth: &RieszCoeffs, radius: f64, k: usize) -> f64 {
    let r_sq_floor = (radius * radius).floor().max(0.0) as u128;
    let mut outside = 0.0f64;
    let mut inside: Vec<f64> = Vec::new();
    for (key, (a, b)) in truth.terms() {
        if key.two_norm_sq() <= r_sq_floor {
            if *a != 0.0 {
                inside.push(a.abs());
            }
            if *b != 0.0 {
                inside.push(b.abs());
            }
        } else {
            outside += a.abs() + b.abs();
        }
    }
    inside.sort_by(|x, y| y.partial_cmp(x).unwrap());
    outside + inside.iter().skip(k).sum::<f64>()
}

/// Exact and sampled error metrics between truth and recovery.
pub fn recovery_error_report(
    truth: &RieszCoeffs,
    recovered: &RieszCoeffs,
    p_list: &[f64],
    mc_samples: usize,
    seed: u64,
    ctx: Option<BoundContext>,
) -> Result<ErrorReport> {
    let diff = truth.sub(recovered)?;
    let error_l2_exact = l2_norm(&diff);
    let mut lp = Vec::with_capacity(p_list.len());
    for &p in p_list {
        lp.push(lp_norm_mc(&diff, p, mc_samples, seed)?);
    }
    let two_term_bound = match ctx {
        None => None,
        Some(ctx) => {
            let sigma = sigma_k_l1(truth, ctx.radius, ctx.k_sparsity);
            let barron = truth.norm(RieszSpace::BsSeq, ctx.s)?;
            let kf = ctx.k_sparsity.max(1) as f64;
            Some(
                p_list
                    .iter()
                    .map(|&p| {
                        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
                        let bound = ctx.c_s
                            * (kf.powf(-inv_p) * sigma
                                + kf.powf(0.5 - inv_p) * ctx.radius.powf(-ctx.s) * barron);
                        (p, bound)
                    })
                    .collect(),
            )
        }
    };
    Ok(ErrorReport {
        error_l2_exact,
        lp,
        two_term_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::MultiIndex;

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn constant_function_samples() {
        let mut f = RieszCoeffs::new(2).unwrap();
        f.set_constant(1.0);
        let s = draw_samples(&f, 50, 7).unwrap();
        assert!(s.values.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn samples_are_deterministic() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[2]), (1.0, -0.5)).unwrap();
        let a = draw_samples(&f, 20, 3).unwrap();
        let b = draw_samples(&f, 20, 3).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn sample_mean_approximates_constant_term() {
        let mut f = RieszCoeffs::new(2).unwrap();
        f.set_constant(0.75);
        f.set(idx(&[1, 0]), (0.9, -0.4)).unwrap();
        f.set(idx(&[1, 2]), (0.0, 0.6)).unwrap();
        let s = draw_samples(&f, 10_000, 11).unwrap();
        let mean: f64 = s.values.iter().sum::<f64>() / s.values.len() as f64;
        // dilations are mean-zero; stderr of the sum is below ~0.01
        assert!((mean - 0.75).abs() < 0.04, "mean {mean}");
    }

    #[test]
    fn design_matrix_entries() {
        let ids = vec![BasisId::Const, BasisId::cos(idx(&[1])).unwrap()];
        let pts = vec![vec![0.0], vec![0.25]];
        let a = design_matrix(&pts, &ids).unwrap();
        assert_eq!(a[(0, 0)], 1.0);
        assert_eq!(a[(1, 0)], 1.0);
        assert_eq!(a[(0, 1)], 1.0);
        assert_eq!(a[(1, 1)], 0.0);
        assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn column_norms_match_basis_l2_norms() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[1]), (1.0, 0.0)).unwrap();
        let s = draw_samples(&f, 10_000, 5).unwrap();
        let ids = ids_for_radius(2.0, 1, &cfg()).unwrap();
        let a = design_matrix(&s.points, &ids).unwrap();
        for (j, id) in ids.iter().enumerate() {
            let col_norm = a.column(j).norm() / (s.points.len() as f64).sqrt();
            let want = crate::basis::basis_l2_norm(id);
            assert!(
                (col_norm - want).abs() < 0.03,
                "column {j} ({id}): {col_norm} vs {want}"
            );
        }
    }

    #[test]
    fn interpolation_regime_recovers_exactly() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set_constant(0.3);
        f.set(idx(&[1]), (1.0, -0.5)).unwrap();
        f.set(idx(&[2]), (0.0, 0.25)).unwrap();
        let radius = 2.0;
        let n_basis = ids_for_radius(radius, 1, &cfg()).unwrap().len();
        let samples = draw_samples(&f, 3 * n_basis, 17).unwrap();
        let (rec, report) = least_squares_recover(&samples, radius, &cfg()).unwrap();
        let err = l2_norm(&f.sub(&rec).unwrap());
        assert!(err <= 1e-8, "error {err}");
        assert!(report.residual_rms <= 1e-10);
        assert!(report.normal_eq_residual.unwrap() <= 1e-8);
        assert!(!report.rank_deficient);
    }

    #[test]
    fn least_squares_requires_enough_samples() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[1]), (1.0, 0.0)).unwrap();
        let samples = draw_samples(&f, 3, 1).unwrap();
        assert!(matches!(
            least_squares_recover(&samples, 2.0, &cfg()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn truth_with_tail_lower_bounded_by_projection() {
        let mut f = RieszCoeffs::new(1).unwrap();
        for m in 1..=8i64 {
            f.set(idx(&[m]), (1.0 / (m * m) as f64, 0.0)).unwrap();
        }
        let radius = 3.0;
        let best = crate::approx::best_l2_from_ball(&f, radius).unwrap();
        let n_basis = ids_for_radius(radius, 1, &cfg()).unwrap().len();
        let samples = draw_samples(&f, 6 * n_basis, 23).unwrap();
        let (rec, _) = least_squares_recover(&samples, radius, &cfg()).unwrap();
        let err = l2_norm(&f.sub(&rec).unwrap());
        assert!(err >= best - 1e-12, "err {err} below projection bound {best}");
    }

    #[test]
    fn bp_zero_is_returned_when_feasible() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[1]), (0.1, 0.0)).unwrap();
        let samples = draw_samples(&f, 30, 9).unwrap();
        let (rec, report) = basis_pursuit_recover(&samples, 2.0, 10.0, &cfg()).unwrap();
        assert!(rec.is_empty());
        assert_eq!(rec.alpha0(), 0.0);
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn bp_one_sparse_noiseless() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[2]), (0.0, 1.25)).unwrap();
        let radius = 3.0;
        let n_basis = ids_for_radius(radius, 1, &cfg()).unwrap().len();
        let samples = draw_samples(&f, 2 * n_basis, 31).unwrap();
        let (rec, report) = basis_pursuit_recover(&samples, radius, 0.0, &cfg()).unwrap();
        let err = l2_norm(&f.sub(&rec).unwrap());
        assert!(err <= 1e-6, "error {err}");
        assert!(report.residual_rms <= 1e-8);
    }

    #[test]
    fn bp_and_ls_agree_noiseless_in_span() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set_constant(-0.2);
        f.set(idx(&[1]), (0.6, 0.0)).unwrap();
        f.set(idx(&[3]), (0.0, -0.4)).unwrap();
        let radius = 3.0;
        let n_basis = ids_for_radius(radius, 1, &cfg()).unwrap().len();
        let samples = draw_samples(&f, 3 * n_basis, 13).unwrap();
        let (ls, _) = least_squares_recover(&samples, radius, &cfg()).unwrap();
        let (bp, _) = basis_pursuit_recover(&samples, radius, 0.0, &cfg()).unwrap();
        let gap = l2_norm(&ls.sub(&bp).unwrap());
        assert!(gap <= 1e-6, "LS/BP gap {gap}");
    }

    #[test]
    fn error_report_zero_for_identical() {
        let mut f = RieszCoeffs::new(2).unwrap();
        f.set(idx(&[1, 1]), (0.4, 0.0)).unwrap();
        let rep =
            recovery_error_report(&f, &f.clone(), &[2.0, f64::INFINITY], 500, 3, None).unwrap();
        assert_eq!(rep.error_l2_exact, 0.0);
        assert!(rep.lp.iter().all(|e| e.estimate == 0.0));
    }

    #[test]
    fn error_report_linf_dominates_l2() {
        let mut f = RieszCoeffs::new(1).unwrap();
        f.set(idx(&[2]), (0.5, 0.1)).unwrap();
        let g = RieszCoeffs::new(1).unwrap();
        let rep = recovery_error_report(
            &f,
            &g,
            &[2.0, f64::INFINITY],
            4000,
            19,
            Some(BoundContext {
                radius: 4.0,
                s: 0.5,
                k_sparsity: 1,
                c_s: 1.0,
            }),
        )
        .unwrap();
        assert!(rep.lp[1].estimate >= rep.lp[0].estimate);
        assert!(rep.two_term_bound.is_some());
    }
}
