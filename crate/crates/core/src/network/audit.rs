//! Structural audits of built networks.
//!
//! The audit replays a network's metadata: width and depth against the
//! architecture's stated bounds, the weight bound for parallel-block nets,
//! and an exactness spot check of the evaluation against direct coefficient
//! summation at seeded random points.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::rng::rng_for_task;
use crate::spectrum::RieszCoeffs;
use crate::basis::MultiIndex;

use super::{ArchKind, ReluNetwork};

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub architecture: ArchKind,
    pub width: usize,
    pub width_bound: usize,
    pub depth: usize,
    pub depth_bound: f64,
    /// Largest weight/bias magnitude subject to the bound and its limit
    /// `8·max{1, |α_k|, |β_k|}`; present for parallel-block nets only (the
    /// inline collation shift legitimately exceeds it).
    pub weight_max: Option<f64>,
    pub weight_limit: Option<f64>,
    pub exactness_max_err: f64,
    pub exactness_tol: f64,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn snapshot_coeffs(net: &ReluNetwork) -> Result<RieszCoeffs> {
    let mut c = RieszCoeffs::new(net.dim_in())?;
    c.set_constant(net.metadata.coefficients.alpha0);
    for (k, a, b) in &net.metadata.coefficients.terms {
        c.add(MultiIndex::new(k.clone())?, *a, *b)?;
    }
    Ok(c)
}

/// Audit a network against the bounds of its declared architecture.
pub fn audit(net: &ReluNetwork) -> Result<AuditReport> {
    let coeffs = snapshot_coeffs(net)?;
    let n_indices = coeffs.support_len();
    let max_one_norm = coeffs
        .terms()
        .map(|(k, _)| k.one_norm())
        .max()
        .unwrap_or(1)
        .max(1);
    let log_term = (max_one_norm as f64).log2();
    let n_blocks = net.metadata.realized.len().max(1);

    let (width_bound, depth_bound) = match net.metadata.architecture {
        ArchKind::Atomic => (2, 4.0 + log_term),
        ArchKind::Stacked => {
            if n_indices == 0 {
                (1, 1.0)
            } else {
                (4 * n_indices, 4.0 + log_term)
            }
        }
        ArchKind::Inline => {
            if n_indices == 0 {
                (1, 1.0)
            } else {
                (
                    net.dim_in() + 3,
                    2.0 * n_indices as f64 * (16.0 * max_one_norm as f64).log2(),
                )
            }
        }
    };
    let _ = n_blocks;

    let mut violations = Vec::new();
    if net.width() > width_bound {
        violations.push(format!(
            "width {} exceeds bound {width_bound}",
            net.width()
        ));
    }
    if net.metadata.architecture == ArchKind::Inline && n_indices > 0 && net.width() != width_bound
    {
        violations.push(format!(
            "inline width {} differs from required {}",
            net.width(),
            width_bound
        ));
    }
    if (net.depth() as f64) > depth_bound + 1e-9 {
        violations.push(format!(
            "depth {} exceeds bound {depth_bound:.3}",
            net.depth()
        ));
    }

    // weight bound: stacked nets only; output bias carries α₀ verbatim and
    // is excluded.
    let (weight_max, weight_limit) = if net.metadata.architecture == ArchKind::Stacked {
        let coeff_max = coeffs
            .terms()
            .flat_map(|(_, (a, b))| [a.abs(), b.abs()])
            .fold(1.0f64, f64::max);
        let limit = 8.0 * coeff_max;
        let last = net.layers().len() - 1;
        let mut max_seen = 0.0f64;
        for (i, layer) in net.layers().iter().enumerate() {
            for w in layer.weights.iter().flatten() {
                max_seen = max_seen.max(w.abs());
            }
            for (r, b) in layer.bias.iter().enumerate() {
                if i == last && r == 0 {
                    continue;
                }
                max_seen = max_seen.max(b.abs());
            }
        }
        if max_seen > limit + 1e-12 {
            violations.push(format!(
                "weight magnitude {max_seen} exceeds 8·max{{1,|α|,|β|}} = {limit}"
            ));
        }
        (Some(max_seen), Some(limit))
    } else {
        (None, None)
    };

    // exactness spot check against direct summation
    let tol = 1e-9;
    let mut rng = rng_for_task(0, "net-audit");
    let mut max_err = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..net.dim_in()).map(|_| rng.gen::<f64>()).collect();
        let want = coeffs.eval(&x)?;
        let got = net.eval(&x)?;
        max_err = max_err.max((want - got).abs());
    }
    if max_err > tol {
        violations.push(format!(
            "evaluation deviates from coefficient sum by {max_err:.3e} (tolerance {tol:.1e})"
        ));
    }

    Ok(AuditReport {
        architecture: net.metadata.architecture,
        width: net.width(),
        width_bound,
        depth: net.depth(),
        depth_bound,
        weight_max,
        weight_limit,
        exactness_max_err: max_err,
        exactness_tol: tol,
        violations,
    })
}
