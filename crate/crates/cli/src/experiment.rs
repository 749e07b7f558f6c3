//! Experiment orchestration: a JSON config describes a parameter grid, each
//! cell runs deterministically from the experiment seed, and one CSV with a
//! provenance header is written. Identical config produces identical bytes;
//! cell failures land in the CSV error column without aborting the run.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rieszlab::approx::{best_n_term, lp_norm_mc, truncate_radius};
use rieszlab::config::GENERATOR_ID;
use rieszlab::lattice::{count_ball, BallSpec};
use rieszlab::network::{param_count, ReluNetwork};
use rieszlab::recovery::{basis_pursuit_recover, draw_samples, least_squares_recover};
use rieszlab::spectrum::{
    fourier_to_riesz, gram_matrix, l2_norm, random_critical_unit, random_unit_ball, FourierSpace,
};
use rieszlab::{BasisId, Config, Error, Result};

use crate::io::{fmt_float, sha256_hex, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RatesSobolev,
    RatesBarron,
    GramCheck,
    LatticeBounds,
    RecoverySweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchChoice {
    Stacked,
    Inline,
}

impl From<ArchChoice> for rieszlab::approx::Arch {
    fn from(a: ArchChoice) -> Self {
        match a {
            ArchChoice::Stacked => rieszlab::approx::Arch::Stacked,
            ArchChoice::Inline => rieszlab::approx::Arch::Inline,
        }
    }
}

fn default_r_max() -> f64 {
    64.0
}

fn default_arch() -> ArchChoice {
    ArchChoice::Stacked
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub s_values: Vec<f64>,
    /// Truncation radii (rates_sobolev, gram_check, recovery_sweep).
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Term counts (rates_barron).
    #[serde(default)]
    pub n_terms: Vec<usize>,
    /// Sample counts (recovery_sweep).
    #[serde(default)]
    pub n_samples: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Support radius of random test functions.
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_arch")]
    pub arch: ArchChoice,
    /// recovery_sweep: estimator.
    #[serde(default)]
    pub method: Option<Method2>,
    /// recovery_sweep: data-fit level for basis pursuit.
    #[serde(default)]
    pub delta: Option<f64>,
    /// recovery_sweep: sparsity of the planted truth.
    #[serde(default)]
    pub sparsity: Option<usize>,
    /// lattice_bounds: radii (may be non-integer).
    #[serde(default)]
    pub t_values: Vec<f64>,
    /// lattice_bounds: dimensions.
    #[serde(default)]
    pub d_values: Vec<usize>,
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method2 {
    Ls,
    Bp,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::validation(format!("invalid experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, field: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::validation(format!(
                    "experiment config field {field:?} is empty or invalid for kind {:?}",
                    self.kind
                )))
            }
        };
        for s in &self.s_values {
            if !(0.0 < *s && *s < 1.0) {
                return Err(Error::validation(format!(
                    "experiment config field \"s_values\" must lie in (0,1), got {s}"
                )));
            }
        }
        match self.kind {
            ExperimentKind::RatesSobolev => {
                need(!self.dims.is_empty(), "dims")?;
                need(!self.s_values.is_empty(), "s_values")?;
                need(!self.radii.is_empty(), "radii")?;
                need(!self.seeds.is_empty(), "seeds")?;
            }
            ExperimentKind::RatesBarron => {
                need(!self.dims.is_empty(), "dims")?;
                need(!self.s_values.is_empty(), "s_values")?;
                need(!self.n_terms.is_empty(), "n_terms")?;
                need(!self.seeds.is_empty(), "seeds")?;
            }
            ExperimentKind::GramCheck => {
                need(!self.dims.is_empty(), "dims")?;
                need(!self.radii.is_empty(), "radii")?;
            }
            ExperimentKind::LatticeBounds => {
                need(!self.t_values.is_empty(), "t_values")?;
                need(!self.d_values.is_empty(), "d_values")?;
            }
            ExperimentKind::RecoverySweep => {
                need(!self.dims.is_empty(), "dims")?;
                need(!self.s_values.is_empty(), "s_values")?;
                need(!self.radii.is_empty(), "radii")?;
                need(!self.n_samples.is_empty(), "n_samples")?;
                need(!self.seeds.is_empty(), "seeds")?;
                need(self.method.is_some(), "method")?;
            }
        }
        Ok(())
    }
}

/// One output row: a sort key for deterministic ordering plus the fields.
type Row = (Vec<String>, Vec<String>);

pub fn run(config: &ExperimentConfig, lib_cfg: &Config) -> Result<(String, String)> {
    config.validate()?;
    let canonical = serde_json::to_string(config).map_err(|e| Error::Parse(e.to_string()))?;
    let hash = sha256_hex(canonical.as_bytes());
    let (header, rows) = match config.kind {
        ExperimentKind::RatesSobolev => rates_sobolev(config, lib_cfg),
        ExperimentKind::RatesBarron => rates_barron(config, lib_cfg),
        ExperimentKind::GramCheck => gram_check(config, lib_cfg),
        ExperimentKind::LatticeBounds => lattice_bounds(config, lib_cfg),
        ExperimentKind::RecoverySweep => recovery_sweep(config, lib_cfg),
    };
    let mut rows = rows;
    rows.sort();
    let mut csv = Csv::new(
        &[
            ("config_hash", format!("sha256:{hash}")),
            ("generator", GENERATOR_ID.to_string()),
            ("kind", format!("{:?}", config.kind)),
        ],
        header,
    );
    for (_, fields) in rows {
        csv.row(&fields);
    }
    Ok((csv.finish(), hash))
}

pub fn run_to_file(config: &ExperimentConfig, lib_cfg: &Config) -> Result<String> {
    let (text, hash) = run(config, lib_cfg)?;
    std::fs::write(&config.output, text)
        .map_err(|e| Error::usage(format!("cannot write {}: {e}", config.output)))?;
    Ok(hash)
}

fn net_stats(net: &ReluNetwork) -> (usize, usize, u64, u64) {
    (
        net.width(),
        net.depth(),
        param_count(
            net.width().max(1) as u64,
            net.depth().max(1) as u64,
            net.dim_in() as u64,
        ),
        net.nonzero_params(),
    )
}

fn sort_key(parts: &[String]) -> Vec<String> {
    parts.iter().map(|p| format!("{p:>24}")).collect()
}

fn rates_sobolev(config: &ExperimentConfig, lib_cfg: &Config) -> (&'static str, Vec<Row>) {
    let header = "r,dim,s,seed,width,depth,params_total,params_nonzero,error_l2,certified_bound,error";
    let mut cells = Vec::new();
    for &d in &config.dims {
        for &s in &config.s_values {
            for &seed in &config.seeds {
                cells.push((d, s, seed));
            }
        }
    }
    let arch: rieszlab::approx::Arch = config.arch.into();
    let rows: Vec<Row> = cells
        .par_iter()
        .flat_map(|&(d, s, seed)| {
            let mut out = Vec::new();
            let prep = random_critical_unit(FourierSpace::Ws, d, s, config.r_max, seed)
                .and_then(|f| fourier_to_riesz(&f, lib_cfg.spectrum.trunc_l));
            match prep {
                Err(e) => {
                    for &r in &config.radii {
                        out.push(err_row(
                            &[r.to_string(), d.to_string(), s.to_string(), seed.to_string()],
                            7,
                            &e,
                        ));
                    }
                }
                Ok((riesz, conv_tail)) => {
                    for &r in &config.radii {
                        let key = vec![r.to_string(), d.to_string(), s.to_string(), seed.to_string()];
                        let (head, bound) = truncate_radius(&riesz, r, s);
                        let row = (|| -> Result<Vec<String>> {
                            let net = match arch {
                                rieszlab::approx::Arch::Stacked => {
                                    rieszlab::network::build_stacked(&head)?
                                }
                                rieszlab::approx::Arch::Inline => {
                                    rieszlab::network::build_inline(&head)?
                                }
                            };
                            let err = l2_norm(&riesz.sub(&head)?);
                            let (w, dep, pt, pn) = net_stats(&net);
                            Ok(vec![
                                fmt_float(r),
                                d.to_string(),
                                fmt_float(s),
                                seed.to_string(),
                                w.to_string(),
                                dep.to_string(),
                                pt.to_string(),
                                pn.to_string(),
                                fmt_float(err),
                                fmt_float(bound + conv_tail),
                                String::new(),
                            ])
                        })();
                        match row {
                            Ok(fields) => out.push((sort_key(&key), fields)),
                            Err(e) => out.push(err_row(&key, 7, &e)),
                        }
                    }
                }
            }
            out
        })
        .collect();
    (header, rows)
}

fn rates_barron(config: &ExperimentConfig, lib_cfg: &Config) -> (&'static str, Vec<Row>) {
    let header = "n,dim,s,seed,width,depth,params_total,params_nonzero,error_l2,sigma_n,error";
    let mut cells = Vec::new();
    for &d in &config.dims {
        for &s in &config.s_values {
            for &seed in &config.seeds {
                cells.push((d, s, seed));
            }
        }
    }
    let arch: rieszlab::approx::Arch = config.arch.into();
    let rows: Vec<Row> = cells
        .par_iter()
        .flat_map(|&(d, s, seed)| {
            let mut out = Vec::new();
            let prep = random_unit_ball(FourierSpace::Bs, d, s, config.r_max, None, seed)
                .and_then(|f| fourier_to_riesz(&f, lib_cfg.spectrum.trunc_l));
            match prep {
                Err(e) => {
                    for &n in &config.n_terms {
                        out.push(err_row(
                            &[n.to_string(), d.to_string(), s.to_string(), seed.to_string()],
                            6,
                            &e,
                        ));
                    }
                }
                Ok((riesz, _)) => {
                    for &n in &config.n_terms {
                        let key = vec![n.to_string(), d.to_string(), s.to_string(), seed.to_string()];
                        let row = (|| -> Result<Vec<String>> {
                            let (selected, sigma) = best_n_term(&riesz, n);
                            let net = match arch {
                                rieszlab::approx::Arch::Stacked => {
                                    rieszlab::network::build_stacked(&selected)?
                                }
                                rieszlab::approx::Arch::Inline => {
                                    rieszlab::network::build_inline(&selected)?
                                }
                            };
                            let err = l2_norm(&riesz.sub(&selected)?);
                            let (w, dep, pt, pn) = net_stats(&net);
                            Ok(vec![
                                n.to_string(),
                                d.to_string(),
                                fmt_float(s),
                                seed.to_string(),
                                w.to_string(),
                                dep.to_string(),
                                pt.to_string(),
                                pn.to_string(),
                                fmt_float(err),
                                fmt_float(sigma),
                                String::new(),
                            ])
                        })();
                        match row {
                            Ok(fields) => out.push((sort_key(&key), fields)),
                            Err(e) => out.push(err_row(&key, 6, &e)),
                        }
                    }
                }
            }
            out
        })
        .collect();
    (header, rows)
}

fn gram_check(config: &ExperimentConfig, lib_cfg: &Config) -> (&'static str, Vec<Row>) {
    let header = "dim,radius,n_ids,lambda_min,lambda_max,error";
    let mut cells = Vec::new();
    for &d in &config.dims {
        for &r in &config.radii {
            cells.push((d, r));
        }
    }
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(d, r)| {
            let key = vec![d.to_string(), r.to_string()];
            let row = (|| -> Result<Vec<String>> {
                let spec = BallSpec::from_radius(r, d)?;
                let mut ids = Vec::new();
                for k in rieszlab::lattice::enumerate_half_ball(&spec, &lib_cfg.lattice)? {
                    ids.push(BasisId::Cos { k: k.clone() });
                    ids.push(BasisId::Sin { k });
                }
                let gram = gram_matrix(&ids)?.normalized();
                let (lo, hi) = gram.eigen_range();
                Ok(vec![
                    d.to_string(),
                    fmt_float(r),
                    ids.len().to_string(),
                    fmt_float(lo),
                    fmt_float(hi),
                    String::new(),
                ])
            })();
            match row {
                Ok(fields) => (sort_key(&key), fields),
                Err(e) => err_row(&key, 4, &e),
            }
        })
        .collect();
    (header, rows)
}

fn lattice_bounds(config: &ExperimentConfig, lib_cfg: &Config) -> (&'static str, Vec<Row>) {
    let header = "t,d,count,bound_i,bound_ii,error";
    let mut cells = Vec::new();
    for &t in &config.t_values {
        for &d in &config.d_values {
            cells.push((t, d));
        }
    }
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(t, d)| {
            let key = vec![format!("{t}"), d.to_string()];
            let row = (|| -> Result<Vec<String>> {
                let spec = BallSpec::from_radius(t, d)?;
                let n = count_ball(&spec);
                // both bound regimes, evaluated unconditionally for the table
                let c = &lib_cfg.lattice;
                let df = d as f64;
                let bound_i = if t > 0.0 {
                    (df * (c.c1 * t / df.sqrt()).ln()).exp()
                } else {
                    1.0
                };
                let bound_ii = if t > 0.0 {
                    (t * t * (c.c2 * df / (t * t)).ln()).exp()
                } else {
                    1.0
                };
                Ok(vec![
                    fmt_float(t),
                    d.to_string(),
                    n.to_string(),
                    fmt_float(bound_i),
                    fmt_float(bound_ii),
                    String::new(),
                ])
            })();
            match row {
                Ok(fields) => (sort_key(&key), fields),
                Err(e) => err_row(&key, 4, &e),
            }
        })
        .collect();
    (header, rows)
}

fn recovery_sweep(config: &ExperimentConfig, lib_cfg: &Config) -> (&'static str, Vec<Row>) {
    let header =
        "method,dim,s,radius,n_basis,n_samples,seed,residual_rms,err_l2,err_linf,sigma_min,iterations,error";
    let method = config.method.expect("validated");
    let delta = config.delta.unwrap_or(0.0);
    let mut cells = Vec::new();
    for &d in &config.dims {
        for &s in &config.s_values {
            for &r in &config.radii {
                for &n in &config.n_samples {
                    for &seed in &config.seeds {
                        cells.push((d, s, r, n, seed));
                    }
                }
            }
        }
    }
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(d, s, r, n, seed)| {
            let method_name = match method {
                Method2::Ls => "ls",
                Method2::Bp => "bp",
            };
            let key = vec![
                method_name.to_string(),
                d.to_string(),
                s.to_string(),
                r.to_string(),
                n.to_string(),
                seed.to_string(),
            ];
            let row = (|| -> Result<Vec<String>> {
                let truth = match config.sparsity {
                    Some(k) => rieszlab::spectrum::random_sparse_in_ball(d, r, k, seed)?,
                    None => {
                        let f = random_unit_ball(FourierSpace::Bs, d, s, config.r_max, None, seed)?;
                        fourier_to_riesz(&f, lib_cfg.spectrum.trunc_l)?.0
                    }
                };
                let samples = draw_samples(&truth, n, seed)?;
                let (recovered, report) = match method {
                    Method2::Ls => least_squares_recover(&samples, r, lib_cfg)?,
                    Method2::Bp => basis_pursuit_recover(&samples, r, delta, lib_cfg)?,
                };
                let diff = truth.sub(&recovered)?;
                let err_l2 = l2_norm(&diff);
                let err_linf = lp_norm_mc(&diff, f64::INFINITY, 2048, seed)?.estimate;
                Ok(vec![
                    method_name.to_string(),
                    d.to_string(),
                    fmt_float(s),
                    fmt_float(r),
                    report.n_basis.to_string(),
                    n.to_string(),
                    seed.to_string(),
                    fmt_float(report.residual_rms),
                    fmt_float(err_l2),
                    fmt_float(err_linf),
                    fmt_float(report.sigma_min),
                    report.iterations.to_string(),
                    String::new(),
                ])
            })();
            match row {
                Ok(fields) => (sort_key(&key), fields),
                Err(e) => err_row(&key, 7, &e),
            }
        })
        .collect();
    (header, rows)
}

fn err_row(key: &[String], blank_fields: usize, e: &Error) -> Row {
    let mut fields: Vec<String> = key.to_vec();
    fields.extend(std::iter::repeat(String::new()).take(blank_fields));
    fields.push(format!("\"{}\"", e.to_string().replace('"', "'")));
    (sort_key(key), fields)
}
