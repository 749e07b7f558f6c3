//! Exact L2 inner products of basis functions.
//!
//! Everything follows from the generators' odd-harmonic Fourier series.
//! `C_k` has modes `pk` (odd `p`), so `⟨C_k, C_{k'}⟩` vanishes unless the
//! frequency equations `pk = qk'` have solutions, i.e. unless `k` and `k'`
//! are positive multiples `m·e, m'·e` of a common primitive direction
//! `e ▷ 0`. Writing `g = gcd(m, m')`, `a = m/g`, `b = m'/g`, solutions need
//! `a, b` both odd, and summing the coefficient products over the solution
//! family `p = bt, q = at` (odd `t`) gives `g⁴/(3m²m'²)` for cosine pairs
//! and the same value times `(−1)^{(a+b)/2−1}` for sine pairs. The test
//! suite validates this closed form against quadrature rather than trusting
//! the derivation.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::BasisId;
use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `⟨C_{m e}, C_{m' e}⟩` for a common primitive direction `e`.
pub(crate) fn parallel_cos_inner(m: u64, mp: u64) -> f64 {
    let g = gcd(m, mp);
    let (a, b) = (m / g, mp / g);
    if a % 2 == 0 || b % 2 == 0 {
        return 0.0;
    }
    let g4 = (g * g) as f64 * (g * g) as f64;
    g4 / (3.0 * (m * m) as f64 * (mp * mp) as f64)
}

/// `⟨S_{m e}, S_{m' e}⟩` for a common primitive direction `e`.
pub(crate) fn parallel_sin_inner(m: u64, mp: u64) -> f64 {
    let g = gcd(m, mp);
    let (a, b) = (m / g, mp / g);
    if a % 2 == 0 || b % 2 == 0 {
        return 0.0;
    }
    let sign = if ((a + b) / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * parallel_cos_inner(m, mp)
}

/// Exact `L2([0,1]^d)` inner product of two basis functions.
pub fn gram_entry(id1: &BasisId, id2: &BasisId) -> Result<f64> {
    match (id1.index(), id2.index()) {
        (Some(k1), Some(k2)) if k1.dim() != k2.dim() => {
            return Err(Error::DimensionMismatch {
                expected: k1.dim(),
                got: k2.dim(),
            })
        }
        _ => {}
    }
    Ok(match (id1, id2) {
        (BasisId::Const, BasisId::Const) => 1.0,
        (BasisId::Const, _) | (_, BasisId::Const) => 0.0,
        (BasisId::Cos { .. }, BasisId::Sin { .. })
        | (BasisId::Sin { .. }, BasisId::Cos { .. }) => 0.0,
        (BasisId::Cos { k }, BasisId::Cos { k: kp }) => {
            let (m, e) = k.primitive().expect("half-lattice index");
            let (mp, ep) = kp.primitive().expect("half-lattice index");
            if e != ep {
                0.0
            } else {
                parallel_cos_inner(m, mp)
            }
        }
        (BasisId::Sin { k }, BasisId::Sin { k: kp }) => {
            let (m, e) = k.primitive().expect("half-lattice index");
            let (mp, ep) = kp.primitive().expect("half-lattice index");
            if e != ep {
                0.0
            } else {
                parallel_sin_inner(m, mp)
            }
        }
    })
}

/// Symmetric matrix of exact inner products of a finite basis subset.
#[derive(Debug, Clone, Serialize)]
pub struct GramMatrix {
    ids: Vec<BasisId>,
    #[serde(skip)]
    entries: DMatrix<f64>,
    /// Whether rows/columns were rescaled to unit-norm basis functions.
    normalized: bool,
}

impl GramMatrix {
    pub fn ids(&self) -> &[BasisId] {
        &self.ids
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rescale to the unit-norm system (`√3·C_k`, `√3·S_k`, constant as is).
    pub fn normalized(&self) -> GramMatrix {
        let n = self.ids.len();
        let factors: Vec<f64> = self
            .ids
            .iter()
            .map(|id| 1.0 / crate::basis::basis_l2_norm(id))
            .collect();
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] *= factors[i] * factors[j];
            }
        }
        GramMatrix {
            ids: self.ids.clone(),
            entries,
            normalized: true,
        }
    }

    /// Eigenvalues of the symmetric matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.entries.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Smallest and largest eigenvalue.
    pub fn eigen_range(&self) -> (f64, f64) {
        let v = self.eigenvalues();
        (v[0], v[v.len() - 1])
    }
}

/// Assemble the Gram matrix of distinct ids (entrywise closed form).
pub fn gram_matrix(ids: &[BasisId]) -> Result<GramMatrix> {
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if ids[i] == ids[j] {
                return Err(Error::usage(format!("duplicate basis id {}", ids[i])));
            }
        }
    }
    let n = ids.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = gram_entry(&ids[i], &ids[j])?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(GramMatrix {
        ids: ids.to_vec(),
        entries,
        normalized: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::MultiIndex;
    use crate::config::LatticeConfig;
    use crate::lattice::{enumerate_half_ball, BallSpec};

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn cos_id(v: &[i64]) -> BasisId {
        BasisId::cos(idx(v)).unwrap()
    }

    fn sin_id(v: &[i64]) -> BasisId {
        BasisId::sin(idx(v)).unwrap()
    }

    #[test]
    fn diagonal_and_cross_entries() {
        assert_eq!(gram_entry(&cos_id(&[5, -3]), &cos_id(&[5, -3])).unwrap(), 1.0 / 3.0);
        assert_eq!(gram_entry(&BasisId::Const, &BasisId::Const).unwrap(), 1.0);
        assert_eq!(gram_entry(&BasisId::Const, &sin_id(&[2, 1])).unwrap(), 0.0);
        assert_eq!(gram_entry(&cos_id(&[1, 0]), &sin_id(&[1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn parallel_pairs() {
        assert!((gram_entry(&cos_id(&[1, 0]), &cos_id(&[3, 0])).unwrap() - 1.0 / 27.0).abs() < 1e-15);
        assert_eq!(gram_entry(&cos_id(&[1, 0]), &cos_id(&[2, 0])).unwrap(), 0.0);
        assert!((gram_entry(&sin_id(&[1]), &sin_id(&[3])).unwrap() + 1.0 / 27.0).abs() < 1e-15);
        // common factor: (2,0) and (6,0) behave like 1 and 3 scaled by g=2
        assert!(
            (gram_entry(&cos_id(&[2, 0]), &cos_id(&[6, 0])).unwrap() - 16.0 / (3.0 * 4.0 * 36.0))
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn non_parallel_pairs_vanish() {
        assert_eq!(gram_entry(&cos_id(&[1, 0]), &cos_id(&[0, 1])).unwrap(), 0.0);
        assert_eq!(gram_entry(&sin_id(&[1, 2]), &sin_id(&[2, 1])).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(gram_entry(&cos_id(&[1, 0]), &cos_id(&[1])).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        let ids = vec![cos_id(&[1, 0]), cos_id(&[1, 0])];
        assert!(matches!(gram_matrix(&ids), Err(Error::Usage(_))));
    }

    #[test]
    fn single_id_matrix() {
        let g = gram_matrix(&[cos_id(&[2, 1])]).unwrap();
        assert_eq!(g.entries()[(0, 0)], 1.0 / 3.0);
    }

    #[test]
    fn pairwise_non_parallel_gives_scaled_identity() {
        let ids = vec![cos_id(&[1, 0]), cos_id(&[0, 1]), cos_id(&[1, 2]), sin_id(&[2, 1])];
        let g = gram_matrix(&ids).unwrap();
        for i in 0..ids.len() {
            for j in 0..ids.len() {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert_eq!(g.entries()[(i, j)], want);
            }
        }
    }

    #[test]
    fn normalized_riesz_bounds_small() {
        // normalized system over the half-ball of radius 3 in d = 2:
        // all eigenvalues within [1/2, 3/2]
        let cfg = LatticeConfig::default();
        let spec = BallSpec::from_radius(3.0, 2).unwrap();
        let mut ids = Vec::new();
        for k in enumerate_half_ball(&spec, &cfg).unwrap() {
            ids.push(BasisId::Cos { k: k.clone() });
            ids.push(BasisId::Sin { k });
        }
        let g = gram_matrix(&ids).unwrap().normalized();
        let (lo, hi) = g.eigen_range();
        assert!(lo >= 0.5 - 1e-8, "λmin = {lo}");
        assert!(hi <= 1.5 + 1e-8, "λmax = {hi}");
    }
}
