//! Feed-forward ReLU networks of uniform width.
//!
//! A network of width `W` and depth `L` on `ℝ^d` is a chain of `L+1` affine
//! maps with ReLU applied between consecutive maps (never after the last).
//! Construction code lives in [`build`]; structural audits in [`audit`].

mod audit;
mod build;

pub use audit::{audit, AuditReport};
pub use build::{build_generator_net, build_hat, build_inline, build_stacked, pad_depth};

use serde::{Deserialize, Serialize};

use crate::basis::BasisId;
use crate::error::{Error, Result};

/// One affine map `v ↦ Wv + b`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl AffineMap {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        let map = AffineMap { weights, bias };
        map.validate()?;
        Ok(map)
    }

    pub fn out_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.first().map_or(0, |r| r.len())
    }

    fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::validation("affine map with zero output width"));
        }
        let cols = self.weights[0].len();
        if self.weights.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("ragged weight matrix"));
        }
        if self.bias.len() != self.weights.len() {
            return Err(Error::validation(format!(
                "bias length {} does not match {} rows",
                self.bias.len(),
                self.weights.len()
            )));
        }
        let finite = self
            .weights
            .iter()
            .flatten()
            .chain(self.bias.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::validation("non-finite weight or bias"));
        }
        Ok(())
    }

    fn apply(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, b) in self.weights.iter().zip(&self.bias) {
            let mut acc = *b;
            for (w, v) in row.iter().zip(input) {
                acc += w * v;
            }
            out.push(acc);
        }
    }
}

/// How a network was constructed; drives the structural audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    /// Parallel per-coefficient blocks, width up to 4 per index.
    Stacked,
    /// Sequential blocks over source + collation + two working channels.
    Inline,
    /// A single basis function.
    Atomic,
}

/// Coefficient snapshot carried in metadata so audits can replay the build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSnapshot {
    pub alpha0: f64,
    /// `(k, α_k, β_k)` triples in lexicographic index order.
    pub terms: Vec<(Vec<i64>, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetMetadata {
    pub architecture: ArchKind,
    /// The basis functions this network realizes, in block order.
    pub realized: Vec<BasisId>,
    pub coefficients: CoeffSnapshot,
    /// Shift keeping the inline running sum nonnegative; `None` elsewhere.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub collation_shift: Option<f64>,
}

/// A ReLU network together with its provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    dim_in: usize,
    layers: Vec<AffineMap>,
    pub metadata: NetMetadata,
}

impl ReluNetwork {
    pub fn new(dim_in: usize, layers: Vec<AffineMap>, metadata: NetMetadata) -> Result<Self> {
        let net = ReluNetwork {
            dim_in,
            layers,
            metadata,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::validation("network needs at least one affine map"));
        }
        let mut expect = self.dim_in;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.validate()?;
            if layer.in_dim() != expect {
                return Err(Error::validation(format!(
                    "layer {i} expects input width {}, previous width is {expect}",
                    layer.in_dim()
                )));
            }
            expect = layer.out_dim();
        }
        if expect != 1 {
            return Err(Error::validation(format!(
                "final output width must be 1, got {expect}"
            )));
        }
        Ok(())
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn layers(&self) -> &[AffineMap] {
        &self.layers
    }

    /// Number of hidden layers (affine maps minus one).
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Maximum hidden width; 0 for a depth-0 (purely affine) network.
    pub fn width(&self) -> usize {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(AffineMap::out_dim)
            .max()
            .unwrap_or(0)
    }

    /// Forward pass: affine, ReLU, …, affine.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&cur, &mut next);
            if i != last {
                for v in next.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur[0])
    }

    /// Count of structurally nonzero weights and biases.
    pub fn nonzero_params(&self) -> u64 {
        self.layers
            .iter()
            .map(|l| {
                l.weights.iter().flatten().filter(|w| **w != 0.0).count() as u64
                    + l.bias.iter().filter(|b| **b != 0.0).count() as u64
            })
            .sum()
    }

    /// JSON document, versioned; floats as shortest round-trip decimals.
    pub fn serialize(&self) -> Vec<u8> {
        let doc = NetworkDoc {
            format_version: 1,
            dim_in: self.dim_in,
            width: self.width(),
            depth: self.depth(),
            activation: "relu".to_string(),
            layers: self.layers.clone(),
            metadata: self.metadata.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("network serializes");
        bytes.push(b'\n');
        bytes
    }

    /// Parse and validate a network document. Malformed JSON yields a parse
    /// error (with location); structural inconsistencies a validation error.
    pub fn deserialize(bytes: &[u8]) -> Result<ReluNetwork> {
        let doc: NetworkDoc =
            serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format_version != 1 {
            return Err(Error::validation(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        if doc.activation != "relu" {
            return Err(Error::validation(format!(
                "unsupported activation {:?}",
                doc.activation
            )));
        }
        let net = ReluNetwork::new(doc.dim_in, doc.layers, doc.metadata)?;
        if doc.width != net.width() || doc.depth != net.depth() {
            return Err(Error::validation(format!(
                "declared width/depth {}x{} disagree with layers {}x{}",
                doc.width,
                doc.depth,
                net.width(),
                net.depth()
            )));
        }
        Ok(net)
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    format_version: u32,
    dim_in: usize,
    width: usize,
    depth: usize,
    activation: String,
    layers: Vec<AffineMap>,
    metadata: NetMetadata,
}

/// Parameter count of the fully connected width-`W`, depth-`L` architecture
/// on `ℝ^d`: `W(d+1) + (L−1)W(W+1) + W + 1`.
pub fn param_count(width: u64, depth: u64, dim: u64) -> u64 {
    width * (dim + 1) + (depth - 1) * width * (width + 1) + width + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_count_examples() {
        assert_eq!(param_count(4, 3, 2), 57);
        assert_eq!(param_count(2, 1, 1), 7);
    }

    #[test]
    fn param_count_matches_explicit_enumeration() {
        // build a fully connected net with all-ones parameters and count them
        for (w, l, d) in [(3usize, 2usize, 2usize), (5, 4, 3), (1, 1, 1), (4, 3, 2)] {
            let mut layers = Vec::new();
            layers.push(AffineMap::new(vec![vec![1.0; d]; w], vec![1.0; w]).unwrap());
            for _ in 1..l {
                layers.push(AffineMap::new(vec![vec![1.0; w]; w], vec![1.0; w]).unwrap());
            }
            layers.push(AffineMap::new(vec![vec![1.0; w]], vec![1.0]).unwrap());
            let net = ReluNetwork::new(
                d,
                layers,
                NetMetadata {
                    architecture: ArchKind::Atomic,
                    realized: vec![],
                    coefficients: CoeffSnapshot {
                        alpha0: 0.0,
                        terms: vec![],
                    },
                    collation_shift: None,
                },
            )
            .unwrap();
            assert_eq!(
                net.nonzero_params(),
                param_count(w as u64, l as u64, d as u64),
                "W={w} L={l} d={d}"
            );
        }
    }

    #[test]
    fn validation_catches_width_chain_breaks() {
        let layers = vec![
            AffineMap::new(vec![vec![1.0], vec![1.0]], vec![0.0, 0.0]).unwrap(),
            AffineMap::new(vec![vec![1.0, 2.0, 3.0]], vec![0.0]).unwrap(),
        ];
        let md = NetMetadata {
            architecture: ArchKind::Atomic,
            realized: vec![],
            coefficients: CoeffSnapshot {
                alpha0: 0.0,
                terms: vec![],
            },
            collation_shift: None,
        };
        assert!(ReluNetwork::new(1, layers, md).is_err());
    }

    #[test]
    fn truncated_document_is_a_parse_error() {
        let net = build_hat();
        let mut bytes = net.serialize();
        bytes.truncate(bytes.len() / 2);
        assert!(matches!(
            ReluNetwork::deserialize(&bytes),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn inconsistent_header_is_a_validation_error() {
        let net = build_hat();
        let text = String::from_utf8(net.serialize()).unwrap();
        let tampered = text.replace("\"width\": 2", "\"width\": 5");
        assert!(matches!(
            ReluNetwork::deserialize(tampered.as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn serialization_round_trip_is_bitwise_stable() {
        let net = build_hat();
        let bytes = net.serialize();
        let back = ReluNetwork::deserialize(&bytes).unwrap();
        assert_eq!(net, back);
        assert_eq!(bytes, back.serialize());
    }

    #[test]
    fn hand_written_minimal_document_parses() {
        let doc = r#"{
            "format_version": 1,
            "dim_in": 1,
            "width": 2,
            "depth": 1,
            "activation": "relu",
            "layers": [
                {"weights": [[1.0],[1.0]], "bias": [0.0,-0.5]},
                {"weights": [[2.0,-4.0]], "bias": [0.0]}
            ],
            "metadata": {
                "architecture": "atomic",
                "realized": [],
                "coefficients": {"alpha0": 0.0, "terms": []}
            }
        }"#;
        let net = ReluNetwork::deserialize(doc.as_bytes()).unwrap();
        assert_eq!(net.eval(&[0.5]).unwrap(), 1.0);
    }
}
