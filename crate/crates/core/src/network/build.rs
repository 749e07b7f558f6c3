//! Exact network constructions.
//!
//! Every construction reduces to one trick: for an integer `n ≥ 2` and
//! `u ∈ [0,1]`, the tent `g_n(u) = (n/m)·ReLU(u) − (2n/m)·ReLU(u − m/n)`
//! with `m = ⌈n/2⌉` maps `[0,1]` into `[0,1]` and satisfies
//! `C(n·u) = C(m·g_n(u))` (the reflected branch lands on `C(2m − nu)`,
//! which equals `C(nu)` by evenness and 1-periodicity). Recursing until the
//! frequency reaches 1 and closing with the output layer `(−4, 8)·h + 1`
//! realizes `C(n·u)` exactly with `⌈log₂ n⌉ + 1` hidden layers of width 2.
//!
//! A dilation `C(k·x)` on `[0,1]^d` is brought into that form by the affine
//! fold `u = (k·x + neg)/‖k‖₁` with `neg = Σ max(0, −k_i)`: then `u ∈ [0,1]`
//! and `C(k·x) = C(‖k‖₁·u)` because the fold shift `neg` is an integer.
//! `S(k·x) = C(k·x + 3/4)` folds the same way with frequency `‖k‖₁ + 1`.
//! For `d = 1` this reproduces the classical architectures: `C_k` with
//! `⌈log₂ k⌉ + 1` hidden layers and `S = C₂(x/2 + 3/8)` with one more.

use crate::basis::{BasisId, GeneratorKind, MultiIndex};
use crate::error::{Error, Result};
use crate::spectrum::RieszCoeffs;

use super::{AffineMap, ArchKind, CoeffSnapshot, NetMetadata, ReluNetwork};

/// One hidden stage of a generator chain: the pre-activation of both
/// channels is `scale·(linear in previous channels or x) + offsets`.
struct Stage {
    /// Threshold of the second channel (`m/n` of the next tent, or 1/2 for
    /// the closing stage).
    threshold: f64,
    /// Multiplier `n_{j-1}/m_{j-1}` applied to the previous channel pair;
    /// unused at stage 0.
    multiplier: f64,
}

/// Plan for computing one generator `C_k` or `S_k` as a width-2 chain.
struct GeneratorPlan {
    /// Weights and bias producing `u₀` from `x`.
    input_weights: Vec<f64>,
    input_bias: f64,
    stages: Vec<Stage>,
}

impl GeneratorPlan {
    fn new(kind: GeneratorKind, k: &MultiIndex) -> Result<GeneratorPlan> {
        if k.is_zero() {
            return Err(Error::domain("generator frequency must be nonzero"));
        }
        let one_norm = k.one_norm();
        let neg: u64 = k.entries().iter().map(|&e| (-e).max(0) as u64).sum();
        let (n0, shift) = match kind {
            GeneratorKind::Cos => (one_norm, neg as f64),
            GeneratorKind::Sin => (one_norm + 1, neg as f64 + 0.75),
        };
        let input_weights: Vec<f64> = k.entries().iter().map(|&e| e as f64 / n0 as f64).collect();
        let input_bias = shift / n0 as f64;

        let mut freqs = vec![n0];
        while *freqs.last().unwrap() > 1 {
            let n = *freqs.last().unwrap();
            freqs.push(n / 2 + n % 2);
        }
        let stages = (0..freqs.len())
            .map(|j| {
                let n = freqs[j];
                let threshold = if n > 1 {
                    let m = n / 2 + n % 2;
                    m as f64 / n as f64
                } else {
                    0.5
                };
                let multiplier = if j == 0 {
                    0.0
                } else {
                    let prev = freqs[j - 1];
                    let m_prev = prev / 2 + prev % 2;
                    prev as f64 / m_prev as f64
                };
                Stage {
                    threshold,
                    multiplier,
                }
            })
            .collect();
        Ok(GeneratorPlan {
            input_weights,
            input_bias,
            stages,
        })
    }

    fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// Rows of stage `j` as (weights over the layer input, biases); the
    /// caller places them at `col` in a layer of input width `in_dim`.
    /// Stage 0 reads `x` (caller passes `col = 0`, `in_dim = d` semantics
    /// via `from_input = true`).
    fn stage_rows(&self, j: usize, in_dim: usize, col: usize) -> ([Vec<f64>; 2], [f64; 2]) {
        let stage = &self.stages[j];
        let mut row_u = vec![0.0; in_dim];
        let bias_u;
        if j == 0 {
            row_u[..self.input_weights.len()].copy_from_slice(&self.input_weights);
            bias_u = self.input_bias;
        } else {
            row_u[col] = stage.multiplier;
            row_u[col + 1] = -2.0 * stage.multiplier;
            bias_u = 0.0;
        }
        let row_t = row_u.clone();
        let bias_t = bias_u - stage.threshold;
        ([row_u, row_t], [bias_u, bias_t])
    }
}

fn empty_snapshot() -> CoeffSnapshot {
    CoeffSnapshot {
        alpha0: 0.0,
        terms: vec![],
    }
}

fn snapshot_of(coeffs: &RieszCoeffs) -> CoeffSnapshot {
    CoeffSnapshot {
        alpha0: coeffs.alpha0(),
        terms: coeffs
            .terms()
            .map(|(k, (a, b))| (k.entries().to_vec(), *a, *b))
            .collect(),
    }
}

/// The hat function `H ∈ Υ₁^{2,1}` with the classical weights
/// `(2, −4)·ReLU((1;1)x + (0;−1/2))`.
pub fn build_hat() -> ReluNetwork {
    let layers = vec![
        AffineMap::new(vec![vec![1.0], vec![1.0]], vec![0.0, -0.5]).unwrap(),
        AffineMap::new(vec![vec![2.0, -4.0]], vec![0.0]).unwrap(),
    ];
    ReluNetwork::new(
        1,
        layers,
        NetMetadata {
            architecture: ArchKind::Atomic,
            realized: vec![],
            coefficients: empty_snapshot(),
            collation_shift: None,
        },
    )
    .expect("hat network is well-formed")
}

/// A width-2 network computing `C(k·x)` or `S(k·x)` exactly on `[0,1]^d`.
pub fn build_generator_net(kind: GeneratorKind, k: &MultiIndex) -> Result<ReluNetwork> {
    let plan = GeneratorPlan::new(kind, k)?;
    let d = k.dim();
    let mut layers = Vec::with_capacity(plan.num_stages() + 1);
    for j in 0..plan.num_stages() {
        let in_dim = if j == 0 { d } else { 2 };
        let (rows, biases) = plan.stage_rows(j, in_dim, 0);
        layers.push(AffineMap::new(rows.to_vec(), biases.to_vec())?);
    }
    layers.push(AffineMap::new(vec![vec![-4.0, 8.0]], vec![1.0])?);
    let id = match kind {
        GeneratorKind::Cos => BasisId::Cos { k: k.clone() },
        GeneratorKind::Sin => BasisId::Sin { k: k.clone() },
    };
    let coeffs = CoeffSnapshot {
        alpha0: 0.0,
        terms: vec![(
            k.entries().to_vec(),
            if kind == GeneratorKind::Cos { 1.0 } else { 0.0 },
            if kind == GeneratorKind::Sin { 1.0 } else { 0.0 },
        )],
    };
    ReluNetwork::new(
        d,
        layers,
        NetMetadata {
            architecture: ArchKind::Atomic,
            realized: vec![id],
            coefficients: coeffs,
            collation_shift: None,
        },
    )
}

/// Extend a network to `target_depth` hidden layers without changing its
/// values on the domain, using one carry channel `c = ReLU(y + 1)` and the
/// `−1` shift folded into the new final affine. Requires the output to lie
/// in `[−1, 1]` on the domain.
pub fn pad_depth(net: &ReluNetwork, target_depth: usize) -> Result<ReluNetwork> {
    let depth = net.depth();
    if target_depth < depth {
        return Err(Error::usage(format!(
            "target depth {target_depth} below current depth {depth}"
        )));
    }
    if target_depth == depth {
        return Ok(net.clone());
    }
    let mut layers: Vec<AffineMap> = net.layers().to_vec();
    let final_affine = layers.pop().expect("nonempty");
    let mut shifted = final_affine.clone();
    shifted.bias[0] += 1.0;
    layers.push(shifted);
    for _ in 0..(target_depth - depth - 1) {
        layers.push(AffineMap::new(vec![vec![1.0]], vec![0.0])?);
    }
    layers.push(AffineMap::new(vec![vec![1.0]], vec![-1.0])?);
    ReluNetwork::new(net.dim_in(), layers, net.metadata.clone())
}

struct Block {
    plan: GeneratorPlan,
    coeff: f64,
    id: BasisId,
}

fn blocks_of(coeffs: &RieszCoeffs) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    for (k, (alpha, beta)) in coeffs.terms() {
        if *alpha != 0.0 {
            blocks.push(Block {
                plan: GeneratorPlan::new(GeneratorKind::Cos, k)?,
                coeff: *alpha,
                id: BasisId::Cos { k: k.clone() },
            });
        }
        if *beta != 0.0 {
            blocks.push(Block {
                plan: GeneratorPlan::new(GeneratorKind::Sin, k)?,
                coeff: *beta,
                id: BasisId::Sin { k: k.clone() },
            });
        }
    }
    Ok(blocks)
}

fn constant_net(dim: usize, alpha0: f64, arch: ArchKind) -> ReluNetwork {
    let layers = vec![
        AffineMap::new(vec![vec![0.0; dim]], vec![0.0]).unwrap(),
        AffineMap::new(vec![vec![0.0]], vec![alpha0]).unwrap(),
    ];
    ReluNetwork::new(
        dim,
        layers,
        NetMetadata {
            architecture: arch,
            realized: vec![],
            coefficients: CoeffSnapshot {
                alpha0,
                terms: vec![],
            },
            collation_shift: None,
        },
    )
    .expect("constant network is well-formed")
}

/// Parallel-block realization of `α₀ + Σ α_k C_k + β_k S_k`.
///
/// Each nonzero coefficient gets a width-2 chain; after its closing stage a
/// splitting layer emits `(ReLU(C), ReLU(−C))` so the value survives the
/// remaining ReLU layers as a difference of nonnegative channels and no bias
/// corrections accumulate. Coefficients appear only in the final affine
/// (`+γ, −γ` on the block's channel pair) and the output bias is `α₀`
/// verbatim. Hidden width is twice the block count, at most `4·#I`.
pub fn build_stacked(coeffs: &RieszCoeffs) -> Result<ReluNetwork> {
    let d = coeffs.dim();
    let blocks = blocks_of(coeffs)?;
    if blocks.is_empty() {
        return Ok(constant_net(d, coeffs.alpha0(), ArchKind::Stacked));
    }
    // stages + splitting layer, equalized across blocks
    let total_depth = blocks.iter().map(|b| b.plan.num_stages()).max().unwrap() + 1;
    let width = 2 * blocks.len();

    let mut layers = Vec::with_capacity(total_depth + 1);
    for layer_idx in 1..=total_depth {
        let in_dim = if layer_idx == 1 { d } else { width };
        let mut rows = Vec::with_capacity(width);
        let mut biases = Vec::with_capacity(width);
        for (b, block) in blocks.iter().enumerate() {
            let col = 2 * b;
            let stages = block.plan.num_stages();
            if layer_idx <= stages {
                let (r, bs) = block.plan.stage_rows(layer_idx - 1, in_dim, col);
                rows.extend(r);
                biases.extend(bs);
            } else if layer_idx == stages + 1 {
                // splitting layer: ±((−4, 8)·h + 1)
                let mut plus = vec![0.0; in_dim];
                plus[col] = -4.0;
                plus[col + 1] = 8.0;
                let mut minus = vec![0.0; in_dim];
                minus[col] = 4.0;
                minus[col + 1] = -8.0;
                rows.push(plus);
                rows.push(minus);
                biases.push(1.0);
                biases.push(-1.0);
            } else {
                // carry: both channels are nonnegative
                let mut first = vec![0.0; in_dim];
                first[col] = 1.0;
                let mut second = vec![0.0; in_dim];
                second[col + 1] = 1.0;
                rows.push(first);
                rows.push(second);
                biases.push(0.0);
                biases.push(0.0);
            }
        }
        layers.push(AffineMap::new(rows, biases)?);
    }
    let mut out_row = vec![0.0; width];
    for (b, block) in blocks.iter().enumerate() {
        out_row[2 * b] = block.coeff;
        out_row[2 * b + 1] = -block.coeff;
    }
    layers.push(AffineMap::new(vec![out_row], vec![coeffs.alpha0()])?);

    ReluNetwork::new(
        d,
        layers,
        NetMetadata {
            architecture: ArchKind::Stacked,
            realized: blocks.into_iter().map(|b| b.id).collect(),
            coefficients: snapshot_of(coeffs),
            collation_shift: None,
        },
    )
}

/// Sequential realization of the same sum at width exactly `d + 3`.
///
/// `d` source channels carry `x` (ReLU-transparent since `x ≥ 0`), one
/// collation channel carries the running sum shifted by
/// `B₀ = |α₀| + Σ(|α_k| + |β_k|)` so it stays nonnegative, and two working
/// channels evaluate one generator chain at a time. Each block's value is
/// absorbed into the collation channel by the layer that also starts the
/// next block; the final affine undoes the shift.
pub fn build_inline(coeffs: &RieszCoeffs) -> Result<ReluNetwork> {
    let d = coeffs.dim();
    let blocks = blocks_of(coeffs)?;
    if blocks.is_empty() {
        return Ok(constant_net(d, coeffs.alpha0(), ArchKind::Inline));
    }
    let width = d + 3;
    let col_collation = d;
    let col_work = d + 1;
    let shift: f64 = coeffs.alpha0().abs()
        + blocks.iter().map(|b| b.coeff.abs()).sum::<f64>();

    let total_depth: usize = blocks.iter().map(|b| b.plan.num_stages()).sum();
    let mut layers = Vec::with_capacity(total_depth + 1);

    let mut block_idx = 0usize;
    let mut stage_idx = 0usize;
    for layer_idx in 1..=total_depth {
        let in_dim = if layer_idx == 1 { d } else { width };
        let mut rows = vec![vec![0.0; in_dim]; width];
        let mut biases = vec![0.0; width];
        // source channels
        for i in 0..d {
            rows[i][i] = 1.0;
        }
        // collation channel
        if layer_idx == 1 {
            biases[col_collation] = shift + coeffs.alpha0();
        } else if stage_idx == 0 {
            // a new block starts here: absorb the previous block's value
            let gamma = blocks[block_idx - 1].coeff;
            rows[col_collation][col_collation] = 1.0;
            rows[col_collation][col_work] = -4.0 * gamma;
            rows[col_collation][col_work + 1] = 8.0 * gamma;
            biases[col_collation] = gamma;
        } else {
            rows[col_collation][col_collation] = 1.0;
        }
        // working channels: current block, current stage
        let block = &blocks[block_idx];
        let (stage_rows, stage_biases) = block.plan.stage_rows(stage_idx, in_dim, col_work);
        let [r_u, r_t] = stage_rows;
        rows[col_work] = r_u;
        rows[col_work + 1] = r_t;
        biases[col_work] = stage_biases[0];
        biases[col_work + 1] = stage_biases[1];

        layers.push(AffineMap::new(rows, biases)?);

        stage_idx += 1;
        if stage_idx == blocks[block_idx].plan.num_stages() {
            stage_idx = 0;
            block_idx += 1;
        }
    }
    // final affine absorbs the last block and removes the shift
    let gamma = blocks.last().unwrap().coeff;
    let mut out_row = vec![0.0; width];
    out_row[col_collation] = 1.0;
    out_row[col_work] = -4.0 * gamma;
    out_row[col_work + 1] = 8.0 * gamma;
    layers.push(AffineMap::new(vec![out_row], vec![gamma - shift])?);

    ReluNetwork::new(
        d,
        layers,
        NetMetadata {
            architecture: ArchKind::Inline,
            realized: blocks.into_iter().map(|b| b.id).collect(),
            coefficients: snapshot_of(coeffs),
            collation_shift: Some(shift),
        },
    )
}
