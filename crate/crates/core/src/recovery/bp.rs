//! Basis pursuit denoising solver.
//!
//! Solves `min ‖c‖₁ subject to ‖Āc − ȳ‖₂ ≤ δ` (Ā and ȳ prescaled by
//! `1/√N`, so the constraint is on the empirical RMS). The primary path is
//! a primal-dual proximal iteration on the constrained form, whose two
//! proximal maps are closed-form: soft thresholding for the ℓ1 term and a
//! ball shrink for the conjugate of the ball indicator. A penalized-form
//! FISTA with bisection on the penalty weight serves as the fallback; both
//! paths are held to the same feasibility/optimality tolerances.

use nalgebra::{DMatrix, DVector};

use crate::config::RecoveryConfig;
use crate::error::{Error, Result};

pub struct BpSolution {
    pub coeffs: DVector<f64>,
    pub iterations: u64,
    pub residual: f64,
    pub used_fallback: bool,
}

fn soft_threshold(v: &mut DVector<f64>, t: f64) {
    for x in v.iter_mut() {
        *x = x.signum() * (x.abs() - t).max(0.0);
    }
}

/// `v · max(0, 1 − t/‖v‖)`.
fn ball_shrink(v: &mut DVector<f64>, t: f64) {
    let norm = v.norm();
    if norm <= t {
        v.fill(0.0);
    } else {
        *v *= 1.0 - t / norm;
    }
}

fn operator_norm(a: &DMatrix<f64>) -> f64 {
    // power iteration on AᵀA
    let n = a.ncols();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut norm_sq = 0.0;
    for _ in 0..60 {
        let w = a.transpose() * (a * &v);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            return 0.0;
        }
        norm_sq = w_norm;
        v = w / w_norm;
    }
    norm_sq.sqrt()
}

pub fn solve(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    delta: f64,
    cfg: &RecoveryConfig,
) -> Result<BpSolution> {
    if delta < 0.0 {
        return Err(Error::domain(format!("delta must be >= 0, got {delta}")));
    }
    // zero is feasible: the minimal-ℓ1 point is zero
    if y.norm() <= delta {
        return Ok(BpSolution {
            coeffs: DVector::zeros(a.ncols()),
            iterations: 0,
            residual: y.norm(),
            used_fallback: false,
        });
    }
    match primal_dual(a, y, delta, cfg) {
        Ok(sol) => Ok(sol),
        Err(_) => {
            let sol = fista_bisection(a, y, delta, cfg)?;
            Ok(BpSolution {
                used_fallback: true,
                ..sol
            })
        }
    }
}

fn primal_dual(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    delta: f64,
    cfg: &RecoveryConfig,
) -> Result<BpSolution> {
    let op = operator_norm(a);
    if op == 0.0 {
        return Err(Error::Solver("zero design matrix".into()));
    }
    let tau = 0.99 / op;
    let sigma = 0.99 / op;
    let n = a.ncols();
    let mut c = DVector::zeros(n);
    let mut c_bar = c.clone();
    let mut p = DVector::<f64>::zeros(a.nrows());
    let feas_tol = cfg.bp_tol_feasibility * y.norm().max(1.0);

    let mut iterations = 0u64;
    while iterations < cfg.bp_max_iter {
        // dual: prox of σ·(⟨·, ȳ⟩ + δ‖·‖₂)*  — shift then ball shrink
        let mut q = &p + sigma * (a * &c_bar) - sigma * y;
        ball_shrink(&mut q, sigma * delta);
        p = q;
        // primal: soft threshold
        let mut c_new = &c - tau * (a.transpose() * &p);
        soft_threshold(&mut c_new, tau);
        c_bar = 2.0 * &c_new - &c;
        let delta_c = (&c_new - &c).amax();
        c = c_new;
        iterations += 1;
        if iterations % 25 == 0 {
            let residual = (a * &c - y).norm();
            let scale = c.amax().max(1.0);
            if delta_c <= cfg.bp_tol_primal * scale && residual <= delta + feas_tol {
                return Ok(BpSolution {
                    coeffs: c,
                    iterations,
                    residual,
                    used_fallback: false,
                });
            }
        }
    }
    Err(Error::Solver(format!(
        "primal-dual iteration cap {} reached (primal change above tolerance or infeasible)",
        cfg.bp_max_iter
    )))
}

fn fista(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    lipschitz: f64,
    max_iter: u64,
    tol: f64,
) -> (DVector<f64>, u64) {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut z: DVector<f64> = x.clone();
    let mut theta = 1.0f64;
    let step = 1.0 / lipschitz;
    let mut iters = 0;
    for _ in 0..max_iter {
        let grad = a.transpose() * (a * &z - y);
        let mut x_new = &z - step * grad;
        soft_threshold(&mut x_new, lambda * step);
        let theta_new = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        let momentum = (theta - 1.0) / theta_new;
        z = &x_new + momentum * (&x_new - &x);
        let change = (&x_new - &x).amax();
        x = x_new;
        theta = theta_new;
        iters += 1;
        if change <= tol * x.amax().max(1.0) {
            break;
        }
    }
    (x, iters)
}

fn fista_bisection(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    delta: f64,
    cfg: &RecoveryConfig,
) -> Result<BpSolution> {
    let op = operator_norm(a);
    let lipschitz = op * op;
    let inner_iter = 4000u64;
    let inner_tol = cfg.bp_tol_primal.max(1e-12);
    let mut lo = 0.0f64;
    let mut hi = (a.transpose() * y).amax(); // c = 0 optimal above this
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut total_iters = 0u64;
    for _ in 0..60 {
        let lambda = 0.5 * (lo + hi);
        let (x, it) = fista(a, y, lambda.max(1e-300), lipschitz, inner_iter, inner_tol);
        total_iters += it;
        let residual = (a * &x - y).norm();
        if residual <= delta + cfg.bp_tol_feasibility * y.norm().max(1.0) {
            // feasible: try a larger penalty (smaller ℓ1)
            best = Some((x, residual));
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    match best {
        Some((coeffs, residual)) => Ok(BpSolution {
            coeffs,
            iterations: total_iters,
            residual,
            used_fallback: true,
        }),
        None => Err(Error::Solver(
            "penalized fallback found no feasible point".into(),
        )),
    }
}
