//! Full diagonalization of sector blocks and degeneracy grouping.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::BlockOperator;
use crate::hilbert::{ChainBasis, ChainSpec};
use crate::observables::QuantumState;

/// Default relative tolerance for merging eigenvalues into one level.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigen-decomposition of one magnetization block, energies ascending.
#[derive(Debug, Clone)]
pub struct SectorEigen {
    pub energies: Vec<f64>,
    /// Columns are sector-local eigenvectors.
    pub vectors: DMatrix<f64>,
}

/// Reference to one eigenpair of the merged spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub sector: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    basis: Arc<ChainBasis>,
    sectors: Vec<SectorEigen>,
    merged: Vec<Eigenpair>,
}

impl Spectrum {
    pub fn basis(&self) -> &Arc<ChainBasis> {
        &self.basis
    }

    pub fn spec(&self) -> &ChainSpec {
        self.basis.spec()
    }

    pub fn sectors(&self) -> &[SectorEigen] {
        &self.sectors
    }

    /// All eigenpairs, ordered by `(energy, sector, index)`.
    pub fn eigenpairs(&self) -> &[Eigenpair] {
        &self.merged
    }

    pub fn energies(&self) -> Vec<f64> {
        self.merged.iter().map(|p| p.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.merged.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merged.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.merged[0].energy
    }

    /// Sector-local coefficients of an eigenpair.
    pub fn local_vector(&self, pair: &Eigenpair) -> Vec<f64> {
        self.sectors[pair.sector].vectors.column(pair.index).iter().copied().collect()
    }

    /// Eigenvector embedded in the full configuration space.
    pub fn full_vector(&self, pair: &Eigenpair) -> DVector<f64> {
        let mut v = DVector::zeros(self.basis.dimension());
        let sector = &self.basis.sectors()[pair.sector];
        let col = self.sectors[pair.sector].vectors.column(pair.index);
        for (k, &c) in sector.configs().iter().enumerate() {
            v[c] = col[k];
        }
        v
    }

    /// `⟨v_n|O|v_n⟩` for every eigenpair in merged order.
    pub fn diagonal_expectations(&self, op: &BlockOperator) -> Result<Vec<f64>> {
        if op.dimension() != self.basis.dimension() {
            return Err(Error::DimensionMismatch { expected: self.basis.dimension(), found: op.dimension() });
        }
        Ok(self
            .merged
            .par_iter()
            .map(|p| op.sector_quadratic_form(p.sector, &self.local_vector(p)))
            .collect())
    }
}

pub fn diagonalize(h: &BlockOperator) -> Result<Spectrum> {
    let basis = Arc::clone(h.basis());
    let sectors = basis
        .sectors()
        .par_iter()
        .zip(h.blocks().par_iter())
        .map(|(sector, block)| {
            let dense = block.to_dense();
            let eig = SymmetricEigen::try_new(dense, EIGEN_EPS, EIGEN_MAX_ITER)
                .ok_or(Error::EigensolverFailed { magnetization: sector.magnetization() })?;
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
            let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let n = block.dim();
            let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
            Ok(SectorEigen { energies, vectors })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut merged: Vec<Eigenpair> = sectors
        .iter()
        .enumerate()
        .flat_map(|(s, e)| {
            e.energies.iter().enumerate().map(move |(index, &energy)| Eigenpair { energy, sector: s, index })
        })
        .collect();
    merged.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then(a.sector.cmp(&b.sector)).then(a.index.cmp(&b.index))
    });
    Ok(Spectrum { basis, sectors, merged })
}

/// One distinct energy with its (orthonormal) eigenspace.
#[derive(Debug, Clone)]
pub struct EnergyLevel {
    pub index: usize,
    pub energy: f64,
    pub members: Vec<Eigenpair>,
    pub vectors: Vec<DVector<f64>>,
}

impl EnergyLevel {
    pub fn degeneracy(&self) -> usize {
        self.members.len()
    }

    /// Uniform mixture over the eigenspace; the pure state when `g = 1`.
    pub fn state(&self) -> QuantumState {
        if self.vectors.len() == 1 {
            QuantumState::Pure(self.vectors[0].clone())
        } else {
            let w = 1.0 / self.vectors.len() as f64;
            QuantumState::Mixed { weights: vec![w; self.vectors.len()], vectors: self.vectors.clone() }
        }
    }
}

fn same_level(a: f64, b: f64, tol: f64) -> bool {
    (b - a).abs() <= tol * a.abs().max(1.0)
}

pub fn group_levels(spectrum: &Spectrum, tol: f64) -> Result<Vec<EnergyLevel>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mut groups: Vec<Vec<Eigenpair>> = Vec::new();
    for pair in spectrum.eigenpairs() {
        match groups.last_mut() {
            Some(g) if same_level(g.last().unwrap().energy, pair.energy, tol) => g.push(*pair),
            _ => groups.push(vec![*pair]),
        }
    }
    Ok(groups
        .into_iter()
        .enumerate()
        .map(|(index, members)| {
            let energy = members.iter().map(|p| p.energy).sum::<f64>() / members.len() as f64;
            let vectors = members.iter().map(|p| spectrum.full_vector(p)).collect();
            EnergyLevel { index, energy, members, vectors }
        })
        .collect())
}

pub fn level_state(levels: &[EnergyLevel], k: usize) -> Result<QuantumState> {
    levels.get(k).map(EnergyLevel::state).ok_or(Error::LevelOutOfRange { index: k, count: levels.len() })
}

/// Hamiltonian, spectrum and levels of one chain, computed together.
#[derive(Debug, Clone)]
pub struct SolvedChain {
    pub hamiltonian: BlockOperator,
    pub spectrum: Spectrum,
    pub levels: Vec<EnergyLevel>,
}

impl SolvedChain {
    pub fn new(spec: ChainSpec) -> Result<Self> {
        Self::with_tolerance(spec, DEFAULT_DEGENERACY_TOL)
    }

    pub fn with_tolerance(spec: ChainSpec, tol: f64) -> Result<Self> {
        let basis = ChainBasis::new(spec);
        let hamiltonian = crate::hamiltonian::build_hamiltonian(&basis)?;
        let spectrum = diagonalize(&hamiltonian)?;
        let levels = group_levels(&spectrum, tol)?;
        Ok(Self { hamiltonian, spectrum, levels })
    }

    pub fn spec(&self) -> &ChainSpec {
        self.spectrum.spec()
    }

    pub fn basis(&self) -> &Arc<ChainBasis> {
        self.spectrum.basis()
    }

    pub fn level_state(&self, k: usize) -> Result<QuantumState> {
        level_state(&self.levels, k)
    }
}
