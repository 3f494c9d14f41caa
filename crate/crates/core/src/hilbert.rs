//! Chain Hilbert space: product configurations grouped by total magnetization.
//!
//! A configuration is an integer in base `d`; site 1 is the least significant
//! digit. Local level 0 is the highest `Sz` eigenvalue (`+1/2` or `+1`), so
//! for spin-half `|0⟩ = |↑⟩` and for spin-one `|0⟩, |1⟩, |2⟩` carry
//! `m = +1, 0, -1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Hilbert dimension we are willing to enumerate.
pub const MAX_DIMENSION: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinKind {
    Half,
    One,
}

impl SpinKind {
    /// Local Hilbert dimension `2s + 1`.
    pub fn local_dim(self) -> usize {
        match self {
            SpinKind::Half => 2,
            SpinKind::One => 3,
        }
    }

    /// `2s`, kept integral so magnetizations stay exact.
    pub fn twice_spin(self) -> i32 {
        self.local_dim() as i32 - 1
    }

    pub fn spin(self) -> f64 {
        self.twice_spin() as f64 / 2.0
    }

    /// Twice the `Sz` eigenvalue of local level `level`.
    pub fn twice_sz(self, level: usize) -> i32 {
        self.twice_spin() - 2 * level as i32
    }

    /// Chain lengths the exact treatment is meant for.
    pub fn supported_lengths(self) -> std::ops::RangeInclusive<usize> {
        match self {
            SpinKind::Half => 2..=10,
            SpinKind::One => 2..=6,
        }
    }
}

impl fmt::Display for SpinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinKind::Half => f.write_str("half"),
            SpinKind::One => f.write_str("one"),
        }
    }
}

impl FromStr for SpinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "half" | "1/2" | "0.5" => Ok(SpinKind::Half),
            "one" | "1" => Ok(SpinKind::One),
            other => Err(Error::UnsupportedSpin(other.to_string())),
        }
    }
}

/// Physical problem definition: an open chain of `length` identical spins
/// with uniform nearest-neighbour coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    length: usize,
    spin: SpinKind,
    coupling: f64,
}

impl ChainSpec {
    pub fn new(spin: SpinKind, length: usize, coupling: f64) -> Result<Self> {
        if length < 2 {
            return Err(Error::ChainTooShort(length));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidCoupling(coupling));
        }
        let too_long = || Error::ChainTooLong { length, spin };
        let dim =
            u32::try_from(length).ok().and_then(|l| spin.local_dim().checked_pow(l)).ok_or_else(too_long)?;
        if dim > MAX_DIMENSION {
            return Err(too_long());
        }
        Ok(Self { length, spin, coupling })
    }

    /// Antiferromagnetic chain with `J = 1`.
    pub fn antiferro(spin: SpinKind, length: usize) -> Result<Self> {
        Self::new(spin, length, 1.0)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn spin(&self) -> SpinKind {
        self.spin
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn local_dim(&self) -> usize {
        self.spin.local_dim()
    }

    pub fn dimension(&self) -> usize {
        self.local_dim().pow(self.length as u32)
    }

    pub fn is_supported_length(&self) -> bool {
        self.spin.supported_lengths().contains(&self.length)
    }

    /// Checks a 1-based site pair `i < j`.
    pub fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || i >= j || j > self.length {
            return Err(Error::InvalidSitePair { i, j, length: self.length });
        }
        Ok(())
    }

    /// Nearest-neighbour bonds `(i, i + 1)`, 1-based.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> {
        (1..self.length).map(|i| (i, i + 1))
    }

    /// Base-`d` place value of each site (index 0 is site 1).
    pub fn place_values(&self) -> Vec<usize> {
        let d = self.local_dim();
        std::iter::successors(Some(1usize), |p| Some(p * d)).take(self.length).collect()
    }

    /// Local level of 1-based `site` in `config`.
    pub fn level_at(&self, config: usize, site: usize) -> usize {
        let d = self.local_dim();
        (config / d.pow(site as u32 - 1)) % d
    }

    /// Twice the total `Sz` of a configuration.
    pub fn twice_magnetization(&self, config: usize) -> i32 {
        let d = self.local_dim();
        let mut c = config;
        let mut total = 0;
        for _ in 0..self.length {
            total += self.spin.twice_sz(c % d);
            c /= d;
        }
        total
    }
}

/// The `Sx, Sy, Sz` matrices of a single site in the `Sz` eigenbasis
/// (descending `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpinMatrices {
    pub sx: DMatrix<Complex64>,
    pub sy: DMatrix<Complex64>,
    pub sz: DMatrix<Complex64>,
}

impl LocalSpinMatrices {
    pub fn components(&self) -> [&DMatrix<Complex64>; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

pub fn local_spin_matrices(spin: SpinKind) -> LocalSpinMatrices {
    let d = spin.local_dim();
    let s = spin.spin();
    let m = |a: usize| spin.twice_sz(a) as f64 / 2.0;

    // <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)); level a-1 has m one higher than level a
    let mut splus = DMatrix::<f64>::zeros(d, d);
    for a in 1..d {
        let ma = m(a);
        splus[(a - 1, a)] = (s * (s + 1.0) - ma * (ma + 1.0)).sqrt();
    }
    let sminus = splus.transpose();

    let sx = (&splus + &sminus).map(|x| Complex64::new(x / 2.0, 0.0));
    let sy = (&splus - &sminus).map(|x| Complex64::new(0.0, -x / 2.0));
    let sz =
        DMatrix::from_fn(
            d,
            d,
            |r, c| {
                if r == c {
                    Complex64::new(m(r), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        );
    LocalSpinMatrices { sx, sy, sz }
}

/// All configurations sharing one total magnetization, in ascending integer
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    twice_m: i32,
    configs: Vec<usize>,
}

impl SectorBasis {
    pub fn magnetization(&self) -> f64 {
        self.twice_m as f64 / 2.0
    }

    pub fn twice_magnetization(&self) -> i32 {
        self.twice_m
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[usize] {
        &self.configs
    }

    pub fn config_of(&self, index: usize) -> usize {
        self.configs[index]
    }

    pub fn index_of(&self, config: usize) -> Option<usize> {
        self.configs.binary_search(&config).ok()
    }
}

/// Magnetization sectors in ascending `m`, each with ascending configurations.
pub fn enumerate_basis(spec: &ChainSpec) -> Vec<SectorBasis> {
    let max_twice_m = spec.spin().twice_spin() * spec.length() as i32;
    // 2m moves in steps of 2 for both spin kinds
    let n_sectors = max_twice_m as usize + 1;
    let mut sectors: Vec<SectorBasis> = (0..n_sectors)
        .map(|k| SectorBasis { twice_m: -max_twice_m + 2 * k as i32, configs: Vec::new() })
        .collect();
    for config in 0..spec.dimension() {
        let tm = spec.twice_magnetization(config);
        sectors[sector_slot(tm, max_twice_m)].configs.push(config);
    }
    sectors
}

fn sector_slot(twice_m: i32, max_twice_m: i32) -> usize {
    ((twice_m + max_twice_m) / 2) as usize
}

/// Sector list plus a dense `configuration -> (sector, local index)` table.
#[derive(Debug, Clone)]
pub struct ChainBasis {
    spec: ChainSpec,
    sectors: Vec<SectorBasis>,
    locate: Vec<(u32, u32)>,
}

impl ChainBasis {
    pub fn new(spec: ChainSpec) -> Arc<Self> {
        let sectors = enumerate_basis(&spec);
        let mut locate = vec![(0u32, 0u32); spec.dimension()];
        for (s, sector) in sectors.iter().enumerate() {
            for (k, &c) in sector.configs.iter().enumerate() {
                locate[c] = (s as u32, k as u32);
            }
        }
        Arc::new(Self { spec, sectors, locate })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn sectors(&self) -> &[SectorBasis] {
        &self.sectors
    }

    pub fn dimension(&self) -> usize {
        self.locate.len()
    }

    /// `(sector, local index)` of a configuration.
    pub fn locate(&self, config: usize) -> (usize, usize) {
        let (s, k) = self.locate[config];
        (s as usize, k as usize)
    }

    pub fn sector_of(&self, config: usize) -> usize {
        self.locate[config].0 as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(spin: SpinKind, length: usize) -> Vec<(f64, usize)> {
        let spec = ChainSpec::antiferro(spin, length).unwrap();
        enumerate_basis(&spec).iter().map(|s| (s.magnetization(), s.len())).collect()
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn two_qubits_have_three_sectors() {
        assert_eq!(sizes(SpinKind::Half, 2), vec![(-1.0, 1), (0.0, 2), (1.0, 1)]);
    }

    #[test]
    fn spin_one_three_sites_has_seven_sectors() {
        let s = sizes(SpinKind::One, 3);
        assert_eq!(s.len(), 7);
        let ms: Vec<f64> = s.iter().map(|x| x.0).collect();
        assert_eq!(ms, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s[3].1, 7);
        assert_eq!(s.iter().map(|x| x.1).sum::<usize>(), 27);
    }

    #[test]
    fn ten_qubit_sectors_are_binomial() {
        let s = sizes(SpinKind::Half, 10);
        assert_eq!(s.len(), 11);
        for (k, (m, n)) in s.iter().enumerate() {
            assert_eq!(*m, k as f64 - 5.0);
            assert_eq!(*n, binomial(10, k));
        }
        assert_eq!(s.iter().map(|x| x.1).sum::<usize>(), 1024);
    }

    #[test]
    fn rejects_short_chain_and_bad_spin() {
        assert_eq!(ChainSpec::antiferro(SpinKind::Half, 1), Err(Error::ChainTooShort(1)));
        assert!(matches!("three-halves".parse::<SpinKind>(), Err(Error::UnsupportedSpin(_))));
        assert!(ChainSpec::new(SpinKind::Half, 4, f64::NAN).is_err());
        assert!(ChainSpec::antiferro(SpinKind::One, 40).is_err());
    }

    #[test]
    fn pair_validation() {
        let spec = ChainSpec::antiferro(SpinKind::Half, 4).unwrap();
        assert!(spec.check_pair(1, 2).is_ok());
        assert!(spec.check_pair(1, 4).is_ok());
        assert!(spec.check_pair(2, 2).is_err());
        assert!(spec.check_pair(0, 1).is_err());
        assert!(spec.check_pair(3, 5).is_err());
        assert!(spec.check_pair(3, 2).is_err());
    }

    #[test]
    fn local_sz_is_standard() {
        let half = local_spin_matrices(SpinKind::Half);
        let one = local_spin_matrices(SpinKind::One);
        let diag = |m: &DMatrix<Complex64>| (0..m.nrows()).map(|k| m[(k, k)].re).collect::<Vec<_>>();
        assert_eq!(diag(&half.sz), vec![0.5, -0.5]);
        assert_eq!(diag(&one.sz), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn local_spin_algebra() {
        for spin in [SpinKind::Half, SpinKind::One] {
            let m = local_spin_matrices(spin);
            let d = spin.local_dim();
            let i = Complex64::new(0.0, 1.0);
            let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
            let close = |a: DMatrix<Complex64>, b: DMatrix<Complex64>| (a - b).norm() < 1e-14;
            assert!(close(comm(&m.sx, &m.sy), m.sz.map(|z| z * i)));
            assert!(close(comm(&m.sy, &m.sz), m.sx.map(|z| z * i)));
            assert!(close(comm(&m.sz, &m.sx), m.sy.map(|z| z * i)));
            let s = spin.spin();
            let casimir = &m.sx * &m.sx + &m.sy * &m.sy + &m.sz * &m.sz;
            let expected = DMatrix::<Complex64>::identity(d, d).map(|z| z * s * (s + 1.0));
            assert!(close(casimir, expected));
            for c in m.components() {
                assert!(close(c.clone(), c.adjoint()));
            }
        }
    }

    #[test]
    fn locate_round_trips() {
        for (spin, l) in [(SpinKind::Half, 6), (SpinKind::One, 4)] {
            let basis = ChainBasis::new(ChainSpec::antiferro(spin, l).unwrap());
            let mut seen = vec![false; basis.dimension()];
            for (s, sector) in basis.sectors().iter().enumerate() {
                for (k, &c) in sector.configs().iter().enumerate() {
                    assert_eq!(sector.index_of(c), Some(k));
                    assert_eq!(basis.locate(c), (s, k));
                    assert_eq!(basis.spec().twice_magnetization(c), sector.twice_magnetization());
                    assert!(!seen[c]);
                    seen[c] = true;
                }
            }
            assert!(seen.into_iter().all(|x| x));
        }
    }

    #[test]
    fn site_one_is_least_significant() {
        let spec = ChainSpec::antiferro(SpinKind::One, 3).unwrap();
        // |0 1 2> : site1 = 0, site2 = 1, site3 = 2
        let config = 3 + 2 * 9;
        assert_eq!(spec.level_at(config, 1), 0);
        assert_eq!(spec.level_at(config, 2), 1);
        assert_eq!(spec.level_at(config, 3), 2);
        assert_eq!(spec.twice_magnetization(config), 0);
    }
}
