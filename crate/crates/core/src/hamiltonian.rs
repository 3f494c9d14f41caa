//! Sector-blocked sparse operators: the chain Hamiltonian and per-bond
//! observables.
//!
//! Every operator here is real symmetric in the `Sz` product basis, so blocks
//! store `f64` entries. `S_i·S_j` is written as `(S⁺S⁻ + S⁻S⁺)/2 + SzSz`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{ChainBasis, ChainSpec, SpinKind};

/// Compressed-row real matrix for one magnetization sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlock {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseBlock {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut block = Self { dim, row_ptr, cols, vals };
        block.prune();
        block
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, row_ptr: (0..=dim).collect(), cols: (0..dim).collect(), vals: vec![1.0; dim] }
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `⟨x|A|x⟩`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.dim).map(|r| x[r] * self.row(r).map(|(c, v)| v * x[c]).sum::<f64>()).sum()
    }

    pub fn matmul(&self, other: &SparseBlock) -> SparseBlock {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::new();
        let mut acc = vec![0.0; self.dim];
        let mut touched = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if acc[c] == 0.0 {
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &c in &touched {
                triplets.push((r, c, acc[c]));
                acc[c] = 0.0;
            }
            touched.clear();
        }
        SparseBlock::from_triplets(self.dim, triplets)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SparseBlock, beta: f64) -> SparseBlock {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            triplets.extend(self.row(r).map(|(c, v)| (r, c, alpha * v)));
            triplets.extend(other.row(r).map(|(c, v)| (r, c, beta * v)));
        }
        SparseBlock::from_triplets(self.dim, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }
}

/// Operator that is block diagonal in the magnetization sectors.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    basis: Arc<ChainBasis>,
    blocks: Vec<SparseBlock>,
}

impl BlockOperator {
    /// Assembles an operator from its action on product configurations.
    /// `action(config, emit)` must call `emit(target_config, amplitude)` for
    /// every `⟨target|O|config⟩ ≠ 0`.
    pub fn assemble<F>(basis: Arc<ChainBasis>, mut action: F) -> Result<Self>
    where
        F: FnMut(usize, &mut dyn FnMut(usize, f64)),
    {
        let mut blocks = Vec::with_capacity(basis.sectors().len());
        for (s, sector) in basis.sectors().iter().enumerate() {
            let mut triplets = Vec::new();
            let mut leak = None;
            for (col, &config) in sector.configs().iter().enumerate() {
                action(config, &mut |target, amp| {
                    let (ts, row) = basis.locate(target);
                    if ts != s {
                        leak.get_or_insert((ts, s));
                    } else {
                        triplets.push((row, col, amp));
                    }
                });
            }
            if let Some((to, from)) = leak {
                return Err(Error::SectorLeak {
                    from: basis.sectors()[from].magnetization(),
                    to: basis.sectors()[to].magnetization(),
                });
            }
            blocks.push(SparseBlock::from_triplets(sector.len(), triplets));
        }
        Ok(Self { basis, blocks })
    }

    pub fn identity(basis: Arc<ChainBasis>) -> Self {
        let blocks = basis.sectors().iter().map(|s| SparseBlock::identity(s.len())).collect();
        Self { basis, blocks }
    }

    pub fn basis(&self) -> &Arc<ChainBasis> {
        &self.basis
    }

    pub fn spec(&self) -> &ChainSpec {
        self.basis.spec()
    }

    pub fn blocks(&self) -> &[SparseBlock] {
        &self.blocks
    }

    pub fn block(&self, sector: usize) -> &SparseBlock {
        &self.blocks[sector]
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Sector-wise product `self · other`.
    pub fn compose(&self, other: &BlockOperator) -> BlockOperator {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.matmul(b)).collect();
        Self { basis: Arc::clone(&self.basis), blocks }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &BlockOperator, beta: f64) -> BlockOperator {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.combine(alpha, b, beta)).collect();
        Self { basis: Arc::clone(&self.basis), blocks }
    }

    /// `alpha * self + shift * I`.
    pub fn affine(&self, alpha: f64, shift: f64) -> BlockOperator {
        self.combine(alpha, &BlockOperator::identity(Arc::clone(&self.basis)), shift)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.blocks.iter().map(SparseBlock::max_asymmetry).fold(0.0, f64::max)
    }

    /// Applies the operator to a full-space vector (configuration order).
    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(v.len())?;
        let mut out = DVector::zeros(v.len());
        for (sector, block) in self.basis.sectors().iter().zip(&self.blocks) {
            let local: Vec<f64> = sector.configs().iter().map(|&c| v[c]).collect();
            for (k, y) in block.mul_vec(&local).into_iter().enumerate() {
                out[sector.config_of(k)] = y;
            }
        }
        Ok(out)
    }

    /// `⟨v|O|v⟩` for a full-space vector.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(v.len())?;
        let mut total = 0.0;
        for (sector, block) in self.basis.sectors().iter().zip(&self.blocks) {
            if sector.configs().iter().all(|&c| v[c] == 0.0) {
                continue;
            }
            let local: Vec<f64> = sector.configs().iter().map(|&c| v[c]).collect();
            total += block.quadratic_form(&local);
        }
        Ok(total)
    }

    /// `⟨u|O|u⟩` for a vector given in one sector's local basis.
    pub fn sector_quadratic_form(&self, sector: usize, local: &[f64]) -> f64 {
        self.blocks[sector].quadratic_form(local)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| (0..b.dim()).map(|r| b.get(r, r)).sum::<f64>()).sum()
    }

    /// Dense matrix in configuration order.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for (sector, block) in self.basis.sectors().iter().zip(&self.blocks) {
            for r in 0..block.dim() {
                for (c, v) in block.row(r) {
                    m[(sector.config_of(r), sector.config_of(c))] += v;
                }
            }
        }
        m
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        let expected = self.dimension();
        if found != expected {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }
}

/// `S_i·S_j`, its square and the swap of sites `i, j`.
#[derive(Debug, Clone)]
pub struct BondOperators {
    pub i: usize,
    pub j: usize,
    pub heisenberg: BlockOperator,
    pub heisenberg_sq: BlockOperator,
    pub swap: BlockOperator,
}

/// Emits the action of `S_i·S_j` (0-based place values) on `config`.
fn emit_dot(
    spin: SpinKind,
    config: usize,
    place_i: usize,
    place_j: usize,
    scale: f64,
    emit: &mut dyn FnMut(usize, f64),
) {
    let d = spin.local_dim();
    let s = spin.spin();
    let m = |a: usize| spin.twice_sz(a) as f64 / 2.0;
    // level a -> a-1 raises m; a -> a+1 lowers it
    let raise = |a: usize| (s * (s + 1.0) - m(a) * (m(a) + 1.0)).sqrt();
    let lower = |a: usize| (s * (s + 1.0) - m(a) * (m(a) - 1.0)).sqrt();

    let a = (config / place_i) % d;
    let b = (config / place_j) % d;
    emit(config, scale * m(a) * m(b));
    if a > 0 && b + 1 < d {
        let target = config - place_i + place_j;
        emit(target, scale * 0.5 * raise(a) * lower(b));
    }
    if a + 1 < d && b > 0 {
        let target = config + place_i - place_j;
        emit(target, scale * 0.5 * lower(a) * raise(b));
    }
}

fn places(spec: &ChainSpec, i: usize, j: usize) -> (usize, usize) {
    let p = spec.place_values();
    (p[i - 1], p[j - 1])
}

/// `S_i·S_j` on the full chain.
pub fn heisenberg_bond(basis: &Arc<ChainBasis>, i: usize, j: usize) -> Result<BlockOperator> {
    let spec = *basis.spec();
    spec.check_pair(i, j)?;
    let (pi, pj) = places(&spec, i, j);
    BlockOperator::assemble(Arc::clone(basis), |c, emit| emit_dot(spec.spin(), c, pi, pj, 1.0, emit))
}

/// Permutation exchanging the local states of sites `i` and `j`.
pub fn swap_bond(basis: &Arc<ChainBasis>, i: usize, j: usize) -> Result<BlockOperator> {
    let spec = *basis.spec();
    spec.check_pair(i, j)?;
    let (pi, pj) = places(&spec, i, j);
    let d = spec.local_dim();
    BlockOperator::assemble(Arc::clone(basis), |c, emit| {
        let a = (c / pi) % d;
        let b = (c / pj) % d;
        emit(c - a * pi - b * pj + b * pi + a * pj, 1.0);
    })
}

pub fn bond_operators(basis: &Arc<ChainBasis>, i: usize, j: usize) -> Result<BondOperators> {
    let heisenberg = heisenberg_bond(basis, i, j)?;
    let heisenberg_sq = heisenberg.compose(&heisenberg);
    let swap = swap_bond(basis, i, j)?;
    Ok(BondOperators { i, j, heisenberg, heisenberg_sq, swap })
}

/// Open-chain Hamiltonian. Spin-half: `Σ J(2 S_i·S_{i+1} + 1/2)`, which is
/// `J` times the sum of nearest-neighbour swaps. Spin-one: `Σ J S_i·S_{i+1}`.
pub fn build_hamiltonian(basis: &Arc<ChainBasis>) -> Result<BlockOperator> {
    let spec = *basis.spec();
    let j = spec.coupling();
    let place = spec.place_values();
    let (dot_scale, shift) = match spec.spin() {
        SpinKind::Half => (2.0 * j, 0.5 * j),
        SpinKind::One => (j, 0.0),
    };
    let n_bonds = (spec.length() - 1) as f64;
    BlockOperator::assemble(Arc::clone(basis), |c, emit| {
        for w in place.windows(2) {
            emit_dot(spec.spin(), c, w[0], w[1], dot_scale, emit);
        }
        if shift != 0.0 {
            emit(c, shift * n_bonds);
        }
    })
}
