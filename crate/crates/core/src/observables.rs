//! Expectation values and two-site reduced density matrices.
//!
//! Mixed states are kept as weighted sets of vectors; the full density
//! matrix is never formed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{bond_operators, BlockOperator, BondOperators};
use crate::hilbert::{ChainBasis, ChainSpec, SpinKind};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(DVector<f64>),
    /// Convex combination `Σ w_k |v_k⟩⟨v_k|` over orthonormal `v_k`.
    Mixed {
        weights: Vec<f64>,
        vectors: Vec<DVector<f64>>,
    },
}

impl QuantumState {
    pub fn pure(v: DVector<f64>) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("vector norm is {n}")));
        }
        Ok(QuantumState::Pure(v))
    }

    pub fn mixed(weights: Vec<f64>, vectors: Vec<DVector<f64>>) -> Result<Self> {
        if weights.len() != vectors.len() || vectors.is_empty() {
            return Err(Error::InvalidState("weights and vectors differ in length".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidState("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        let dim = vectors[0].len();
        for (a, va) in vectors.iter().enumerate() {
            if va.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: va.len() });
            }
            for vb in &vectors[..a] {
                if va.dot(vb).abs() > 1e-10 {
                    return Err(Error::InvalidState("vectors are not orthogonal".into()));
                }
            }
            if (va.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState("vector is not normalized".into()));
            }
        }
        Ok(QuantumState::Mixed { weights, vectors })
    }

    /// Product configuration `|config⟩`.
    pub fn basis_state(dimension: usize, config: usize) -> Self {
        let mut v = DVector::zeros(dimension);
        v[config] = 1.0;
        QuantumState::Pure(v)
    }

    pub fn dimension(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Mixed { vectors, .. } => vectors[0].len(),
        }
    }

    /// `(weight, vector)` pairs making up the state.
    pub fn components(&self) -> Box<dyn Iterator<Item = (f64, &DVector<f64>)> + '_> {
        match self {
            QuantumState::Pure(v) => Box::new(std::iter::once((1.0, v))),
            QuantumState::Mixed { weights, vectors } => Box::new(weights.iter().copied().zip(vectors.iter())),
        }
    }

    pub fn rank(&self) -> usize {
        self.components().filter(|(w, _)| *w > 0.0).count()
    }

    pub fn trace(&self) -> f64 {
        self.components().map(|(w, v)| w * v.norm_squared()).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let parts: Vec<_> = self.components().collect();
        let mut p = 0.0;
        for (wa, va) in &parts {
            for (wb, vb) in &parts {
                p += wa * wb * va.dot(vb).powi(2);
            }
        }
        p
    }
}

/// Builds a configuration from a ket label such as `"0120"`; character `k`
/// is the level of site `k + 1`.
pub fn config_from_ket(spec: &ChainSpec, ket: &str) -> usize {
    assert_eq!(ket.len(), spec.length(), "ket length");
    ket.bytes()
        .zip(spec.place_values())
        .map(|(ch, place)| {
            let level = (ch - b'0') as usize;
            assert!(level < spec.local_dim(), "level {level} out of range");
            level * place
        })
        .sum()
}

/// `Tr[O ρ]`.
pub fn expectation(state: &QuantumState, op: &BlockOperator) -> Result<f64> {
    if state.dimension() != op.dimension() {
        return Err(Error::DimensionMismatch { expected: op.dimension(), found: state.dimension() });
    }
    state.components().map(|(w, v)| op.quadratic_form(v).map(|x| w * x)).sum()
}

/// `⟨S_i·S_j⟩`, `⟨(S_i·S_j)²⟩` and `⟨swap_ij⟩` of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondExpectations {
    pub spin: SpinKind,
    pub heisenberg: f64,
    pub heisenberg_sq: f64,
    pub swap: f64,
}

impl BondExpectations {
    /// Fills in `⟨swap⟩` from the dot-product moments.
    pub fn from_moments(spin: SpinKind, heisenberg: f64, heisenberg_sq: f64) -> Self {
        let swap = match spin {
            SpinKind::Half => 2.0 * heisenberg + 0.5,
            SpinKind::One => heisenberg + heisenberg_sq - 1.0,
        };
        Self { spin, heisenberg, heisenberg_sq, swap }
    }

    /// Distance from the swap identity (`2h₁ + ½` or `h₁ + h₂ − 1`).
    pub fn identity_defect(&self) -> f64 {
        let implied = Self::from_moments(self.spin, self.heisenberg, self.heisenberg_sq).swap;
        (implied - self.swap).abs()
    }
}

pub fn bond_expectations_with(state: &QuantumState, ops: &BondOperators) -> Result<BondExpectations> {
    Ok(BondExpectations {
        spin: ops.swap.spec().spin(),
        heisenberg: expectation(state, &ops.heisenberg)?,
        heisenberg_sq: expectation(state, &ops.heisenberg_sq)?,
        swap: expectation(state, &ops.swap)?,
    })
}

pub fn bond_expectations(
    state: &QuantumState,
    spec: &ChainSpec,
    i: usize,
    j: usize,
) -> Result<BondExpectations> {
    spec.check_pair(i, j)?;
    let basis = ChainBasis::new(*spec);
    let ops = bond_operators(&basis, i, j)?;
    bond_expectations_with(state, &ops)
}

/// Reduced state of sites `(i, j)`; row/column index is `a_i * d + a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteRdm {
    pub spin: SpinKind,
    pub sites: (usize, usize),
    pub matrix: DMatrix<Complex64>,
}

impl TwoSiteRdm {
    pub fn local_dim(&self) -> usize {
        self.spin.local_dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigenvalues().min()
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Tr[ρ O]` for an operator on the pair.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> f64 {
        (&self.matrix * op).trace().re
    }

    pub fn scaled_add(&mut self, weight: f64, other: &TwoSiteRdm) {
        self.matrix += other.matrix.map(|z| z * weight);
    }

    pub fn zeros(spin: SpinKind, sites: (usize, usize)) -> Self {
        let n = spin.local_dim().pow(2);
        Self { spin, sites, matrix: DMatrix::zeros(n, n) }
    }
}

/// Real (unnormalized) pair RDM of one vector; entries `[a*d+b]` packed
/// row-major into a `d² × d²` buffer.
pub(crate) fn pair_rdm_of_vector(spec: &ChainSpec, v: &DVector<f64>, i: usize, j: usize) -> Vec<f64> {
    let d = spec.local_dim();
    let places = spec.place_values();
    let (pi, pj) = (places[i - 1], places[j - 1]);
    let n2 = d * d;
    let mut out = vec![0.0; n2 * n2];
    let mut amps = vec![0.0; n2];
    for rest in 0..spec.dimension() {
        if (rest / pi) % d != 0 || (rest / pj) % d != 0 {
            continue;
        }
        let mut any = false;
        for a in 0..d {
            for b in 0..d {
                let x = v[rest + a * pi + b * pj];
                amps[a * d + b] = x;
                any |= x != 0.0;
            }
        }
        if !any {
            continue;
        }
        for r in 0..n2 {
            if amps[r] == 0.0 {
                continue;
            }
            for c in 0..n2 {
                out[r * n2 + c] += amps[r] * amps[c];
            }
        }
    }
    out
}

pub fn reduced_density_matrix(
    state: &QuantumState,
    spec: &ChainSpec,
    i: usize,
    j: usize,
) -> Result<TwoSiteRdm> {
    spec.check_pair(i, j)?;
    if state.dimension() != spec.dimension() {
        return Err(Error::DimensionMismatch { expected: spec.dimension(), found: state.dimension() });
    }
    let n2 = spec.local_dim().pow(2);
    let mut acc = vec![0.0; n2 * n2];
    for (w, v) in state.components() {
        for (a, x) in acc.iter_mut().zip(pair_rdm_of_vector(spec, v, i, j)) {
            *a += w * x;
        }
    }
    Ok(TwoSiteRdm {
        spin: spec.spin(),
        sites: (i, j),
        matrix: DMatrix::from_fn(n2, n2, |r, c| Complex64::new(acc[r * n2 + c], 0.0)),
    })
}

/// `S·S`, `(S·S)²` and swap on two sites as `d² × d²` matrices.
pub fn pair_operators(spin: SpinKind) -> [DMatrix<Complex64>; 3] {
    let m = crate::hilbert::local_spin_matrices(spin);
    let dot = m
        .components()
        .iter()
        .map(|s| s.kronecker(s))
        .fold(None::<DMatrix<Complex64>>, |acc, t| Some(acc.map_or(t.clone(), |a| a + t)))
        .unwrap();
    let sq = &dot * &dot;
    let d = spin.local_dim();
    let swap = DMatrix::from_fn(d * d, d * d, |r, c| {
        let (a, b) = (c / d, c % d);
        if r == b * d + a {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    [dot, sq, swap]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpinKind::{Half, One};
    use crate::spectra::SolvedChain;

    fn chain(spin: SpinKind, l: usize) -> SolvedChain {
        SolvedChain::new(ChainSpec::antiferro(spin, l).unwrap()).unwrap()
    }

    fn singlet() -> (ChainSpec, QuantumState) {
        let spec = ChainSpec::antiferro(Half, 2).unwrap();
        let mut v = DVector::zeros(4);
        v[config_from_ket(&spec, "01")] = 1.0 / 2f64.sqrt();
        v[config_from_ket(&spec, "10")] = -1.0 / 2f64.sqrt();
        (spec, QuantumState::pure(v).unwrap())
    }

    #[test]
    fn three_qubit_ground_swap() {
        let c = chain(Half, 3);
        let s = c.level_state(0).unwrap();
        let ops = bond_operators(c.basis(), 1, 2).unwrap();
        assert!((expectation(&s, &ops.swap).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_spin_one_ground_dot() {
        let c = chain(One, 3);
        let s = c.level_state(0).unwrap();
        let be = bond_expectations(&s, c.spec(), 1, 2).unwrap();
        assert!((be.heisenberg + 1.5).abs() < 1e-12);
        assert!((be.swap - 1.0 / 6.0).abs() < 1e-12);
        assert!((be.heisenberg_sq - 8.0 / 3.0).abs() < 1e-12);
        assert!(be.identity_defect() < 1e-10);
    }

    #[test]
    fn three_spin_one_first_excited() {
        let c = chain(One, 3);
        let s = c.level_state(1).unwrap();
        let be = bond_expectations(&s, c.spec(), 1, 2).unwrap();
        assert!((be.heisenberg + 1.0).abs() < 1e-12);
        assert!((be.swap + 1.0).abs() < 1e-12);
        assert!((be.heisenberg_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_expectation_is_one() {
        let c = chain(Half, 4);
        let id = BlockOperator::identity(std::sync::Arc::clone(c.basis()));
        for k in 0..c.levels.len() {
            let s = c.level_state(k).unwrap();
            assert!((expectation(&s, &id).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aligned_product_state() {
        let spec = ChainSpec::antiferro(Half, 2).unwrap();
        let s = QuantumState::basis_state(4, config_from_ket(&spec, "00"));
        let be = bond_expectations(&s, &spec, 1, 2).unwrap();
        assert_eq!(be.heisenberg, 0.25);
        assert_eq!(be.swap, 1.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = chain(Half, 3);
        let s = QuantumState::basis_state(4, 0);
        let ops = bond_operators(c.basis(), 1, 2).unwrap();
        assert!(matches!(expectation(&s, &ops.swap), Err(Error::DimensionMismatch { .. })));
        assert!(reduced_density_matrix(&s, c.spec(), 1, 2).is_err());
    }

    #[test]
    fn singlet_rdm_is_the_singlet_projector() {
        let (spec, s) = singlet();
        let rdm = reduced_density_matrix(&s, &spec, 1, 2).unwrap();
        let expected = [[0.0, 0.0, 0.0, 0.0], [0.0, 0.5, -0.5, 0.0], [0.0, -0.5, 0.5, 0.0], [0.0; 4]];
        for (r, row) in expected.iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!((rdm.matrix[(r, c)].re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rdm_reproduces_full_space_expectations() {
        for (spin, l) in [(Half, 5), (One, 3), (One, 4)] {
            let c = chain(spin, l);
            let pair_ops = pair_operators(spin);
            for k in 0..c.levels.len().min(6) {
                let s = c.level_state(k).unwrap();
                for (i, j) in [(1, 2), (2, 3), (1, 3)] {
                    let rdm = reduced_density_matrix(&s, c.spec(), i, j).unwrap();
                    assert!((rdm.trace() - 1.0).abs() < 1e-12);
                    assert!(rdm.max_asymmetry() < 1e-12);
                    assert!(rdm.min_eigenvalue() > -1e-10);
                    let be = bond_expectations(&s, c.spec(), i, j).unwrap();
                    assert!((rdm.expectation(&pair_ops[0]) - be.heisenberg).abs() < 1e-10);
                    assert!((rdm.expectation(&pair_ops[1]) - be.heisenberg_sq).abs() < 1e-10);
                    assert!((rdm.expectation(&pair_ops[2]) - be.swap).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn mirror_and_sum_rules() {
        for (spin, l) in [(Half, 6), (Half, 7), (One, 5)] {
            let c = chain(spin, l);
            for level in &c.levels {
                let s = level.state();
                let bes: Vec<_> =
                    c.spec().bonds().map(|(i, j)| bond_expectations(&s, c.spec(), i, j).unwrap()).collect();
                for (a, b) in bes.iter().zip(bes.iter().rev()) {
                    assert!((a.swap - b.swap).abs() < 1e-9);
                    assert!((a.heisenberg - b.heisenberg).abs() < 1e-9);
                }
                let total: f64 = bes
                    .iter()
                    .map(|b| match spin {
                        Half => b.swap,
                        One => b.heisenberg,
                    })
                    .sum();
                assert!((total - level.energy).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mixed_state_validation() {
        let a = DVector::from_vec(vec![1.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0]);
        assert!(QuantumState::mixed(vec![0.5, 0.5], vec![a.clone(), b.clone()]).is_ok());
        assert!(QuantumState::mixed(vec![0.7, 0.5], vec![a.clone(), b.clone()]).is_err());
        assert!(QuantumState::mixed(vec![1.5, -0.5], vec![a.clone(), b]).is_err());
        assert!(QuantumState::mixed(vec![0.5, 0.5], vec![a.clone(), a]).is_err());
        assert!(QuantumState::pure(DVector::from_vec(vec![1.0, 1.0])).is_err());
    }
}
