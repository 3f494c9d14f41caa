//! Thermal (Gibbs) states built from the full spectrum, thermal pairwise
//! entanglement and threshold temperatures. `k_B = 1`; temperatures are in
//! units of the coupling.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{
    concurrence_from_swap, negativity_from_moments, negativity_terms_from_moments, rdm_measure, Measure,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{bond_operators, BlockOperator};
use crate::hilbert::{ChainSpec, SpinKind};
use crate::observables::{pair_rdm_of_vector, BondExpectations, TwoSiteRdm};
use crate::spectra::{diagonalize, Spectrum};

/// Lowest temperature probed when deciding whether a bond is entangled at all.
pub const ENTANGLEMENT_PROBE_T: f64 = 1e-3;
/// Start of the upward doubling search for a threshold bracket.
pub const BRACKET_START_T: f64 = 0.1;
/// Highest temperature searched for a threshold.
pub const BRACKET_LIMIT_T: f64 = 100.0;
/// Default bisection tolerance.
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-7;

/// Boltzmann weights of every eigenpair (merged spectrum order).
#[derive(Debug, Clone)]
pub struct GibbsEnsemble {
    temperature: f64,
    weights: Vec<f64>,
    log_partition: f64,
}

impl GibbsEnsemble {
    pub fn new(spectrum: &Spectrum, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::NonPositiveTemperature(temperature));
        }
        let e0 = spectrum.ground_energy();
        let mut weights: Vec<f64> =
            spectrum.eigenpairs().iter().map(|p| (-(p.energy - e0) / temperature).exp()).collect();
        let shifted_z: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= shifted_z);
        Ok(Self { temperature, weights, log_partition: shifted_z.ln() - e0 / temperature })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `ln Z`; stays finite where `Z` itself would overflow.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn partition_function(&self) -> f64 {
        self.log_partition.exp()
    }

    /// `Σ_n w_n x_n` for per-eigenpair values `x_n`.
    pub fn average(&self, diagonal: &[f64]) -> f64 {
        self.weights.iter().zip(diagonal).map(|(w, x)| w * x).sum()
    }
}

/// `Tr[O ρ(T)]`.
pub fn gibbs_expectation(spectrum: &Spectrum, temperature: f64, op: &BlockOperator) -> Result<f64> {
    let ensemble = GibbsEnsemble::new(spectrum, temperature)?;
    Ok(ensemble.average(&spectrum.diagonal_expectations(op)?))
}

/// Per-eigenpair bond expectations, precomputed once so any temperature
/// costs a single weighted sum.
#[derive(Debug, Clone)]
pub struct ThermalBond {
    spin: SpinKind,
    pub sites: (usize, usize),
    heisenberg: Vec<f64>,
    heisenberg_sq: Vec<f64>,
    swap: Vec<f64>,
}

impl ThermalBond {
    pub fn new(spectrum: &Spectrum, i: usize, j: usize) -> Result<Self> {
        let ops = bond_operators(spectrum.basis(), i, j)?;
        Ok(Self {
            spin: spectrum.spec().spin(),
            sites: (i, j),
            heisenberg: spectrum.diagonal_expectations(&ops.heisenberg)?,
            heisenberg_sq: spectrum.diagonal_expectations(&ops.heisenberg_sq)?,
            swap: spectrum.diagonal_expectations(&ops.swap)?,
        })
    }

    pub fn expectations(&self, ensemble: &GibbsEnsemble) -> BondExpectations {
        BondExpectations {
            spin: self.spin,
            heisenberg: ensemble.average(&self.heisenberg),
            heisenberg_sq: ensemble.average(&self.heisenberg_sq),
            swap: ensemble.average(&self.swap),
        }
    }

    /// Thermal concurrence (spin-half) or thermal negativity (spin-one).
    pub fn measure(&self, ensemble: &GibbsEnsemble) -> f64 {
        let be = self.expectations(ensemble);
        match self.spin {
            SpinKind::Half => concurrence_from_swap(be.swap),
            SpinKind::One => negativity_from_moments(be.heisenberg, be.heisenberg_sq),
        }
    }

    /// Signed arguments of the max-terms, keyed by which term they belong to.
    pub fn root_arguments(&self, ensemble: &GibbsEnsemble) -> Vec<(RootTerm, f64)> {
        let be = self.expectations(ensemble);
        match self.spin {
            SpinKind::Half => vec![(RootTerm::Swap, -be.swap)],
            SpinKind::One => {
                let (a, b) = negativity_terms_from_moments(be.heisenberg, be.heisenberg_sq);
                vec![(RootTerm::SquaredMoment, a), (RootTerm::Singlet, b)]
            }
        }
    }
}

/// Per-eigenpair two-site RDMs of one pair, for the thermal RDM oracle.
#[derive(Debug, Clone)]
pub struct ThermalPairRdms {
    spin: SpinKind,
    sites: (usize, usize),
    per_state: Vec<Vec<f64>>,
}

impl ThermalPairRdms {
    pub fn new(spectrum: &Spectrum, i: usize, j: usize) -> Result<Self> {
        let spec = *spectrum.spec();
        spec.check_pair(i, j)?;
        let per_state = spectrum
            .eigenpairs()
            .par_iter()
            .map(|p| pair_rdm_of_vector(&spec, &spectrum.full_vector(p), i, j))
            .collect();
        Ok(Self { spin: spec.spin(), sites: (i, j), per_state })
    }

    pub fn rdm(&self, ensemble: &GibbsEnsemble) -> TwoSiteRdm {
        let n2 = self.spin.local_dim().pow(2);
        let mut acc = vec![0.0; n2 * n2];
        for (w, m) in ensemble.weights().iter().zip(&self.per_state) {
            if *w == 0.0 {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(m) {
                *a += w * x;
            }
        }
        TwoSiteRdm {
            spin: self.spin,
            sites: self.sites,
            matrix: DMatrix::from_fn(n2, n2, |r, c| Complex64::new(acc[r * n2 + c], 0.0)),
        }
    }

    pub fn oracle_measure(&self, ensemble: &GibbsEnsemble) -> f64 {
        rdm_measure(&self.rdm(ensemble))
    }
}

/// A chain diagonalized once for repeated thermal queries.
#[derive(Debug, Clone)]
pub struct ThermalChain {
    spectrum: Spectrum,
}

impl ThermalChain {
    pub fn new(spec: ChainSpec) -> Result<Self> {
        let basis = crate::hilbert::ChainBasis::new(spec);
        let h = crate::hamiltonian::build_hamiltonian(&basis)?;
        Ok(Self { spectrum: diagonalize(&h)? })
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn spec(&self) -> &ChainSpec {
        self.spectrum.spec()
    }

    pub fn ensemble(&self, temperature: f64) -> Result<GibbsEnsemble> {
        GibbsEnsemble::new(&self.spectrum, temperature)
    }

    pub fn bond(&self, i: usize, j: usize) -> Result<ThermalBond> {
        ThermalBond::new(&self.spectrum, i, j)
    }

    pub fn measure(&self, i: usize, j: usize, temperature: f64) -> Result<f64> {
        let ensemble = self.ensemble(temperature)?;
        Ok(self.bond(i, j)?.measure(&ensemble))
    }

    pub fn scan(&self, i: usize, j: usize, grid: &[f64], measure: Measure) -> Result<ThermalCurve> {
        let spec = *self.spec();
        measure.check_spin(spec.spin())?;
        validate_grid(grid)?;
        let bond = self.bond(i, j)?;
        let points = grid
            .par_iter()
            .map(|&t| Ok((t, bond.measure(&self.ensemble(t)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ThermalCurve { spec, bond: (i, j), measure, points })
    }

    pub fn threshold(&self, i: usize, j: usize, tol: f64) -> Result<ThresholdResult> {
        threshold_for_bond(self, &self.bond(i, j)?, tol)
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

pub fn thermal_concurrence(spec: &ChainSpec, i: usize, j: usize, temperature: f64) -> Result<f64> {
    Measure::Concurrence.check_spin(spec.spin())?;
    spec.check_pair(i, j)?;
    ThermalChain::new(*spec)?.measure(i, j, temperature)
}

pub fn thermal_negativity(spec: &ChainSpec, i: usize, j: usize, temperature: f64) -> Result<f64> {
    Measure::Negativity.check_spin(spec.spin())?;
    spec.check_pair(i, j)?;
    ThermalChain::new(*spec)?.measure(i, j, temperature)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalCurve {
    pub spec: ChainSpec,
    pub bond: (usize, usize),
    pub measure: Measure,
    pub points: Vec<(f64, f64)>,
}

pub fn thermal_scan(
    spec: &ChainSpec,
    i: usize,
    j: usize,
    grid: &[f64],
    measure: Measure,
) -> Result<ThermalCurve> {
    measure.check_spin(spec.spin())?;
    spec.check_pair(i, j)?;
    validate_grid(grid)?;
    ThermalChain::new(*spec)?.scan(i, j, grid, measure)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureScale {
    Lin,
    Log,
}

impl FromStr for TemperatureScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lin" | "linear" => Ok(TemperatureScale::Lin),
            "log" => Ok(TemperatureScale::Log),
            other => Err(format!("unknown temperature scale `{other}`")),
        }
    }
}

/// `steps` temperatures from `min` to `max` inclusive.
pub fn temperature_grid(min: f64, max: f64, steps: usize, scale: TemperatureScale) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(min > 0.0) || !(max >= min) || !max.is_finite() || (steps > 1 && max == min) {
        return Err(Error::InvalidGrid);
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let f = k as f64 / last;
            match scale {
                TemperatureScale::Lin => min + (max - min) * f,
                TemperatureScale::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
            }
        })
        .collect())
}

/// Which max-term argument the threshold is a root of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootTerm {
    /// `−⟨swap⟩` (spin-half concurrence).
    Swap,
    /// `⟨(S·S)²⟩ − 2` (first spin-one negativity term).
    SquaredMoment,
    /// `1 − ⟨S·S⟩ − ⟨(S·S)²⟩`, i.e. `−⟨swap⟩` (second spin-one term).
    Singlet,
}

impl fmt::Display for RootTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootTerm::Swap => "swap",
            RootTerm::SquaredMoment => "squared_moment",
            RootTerm::Singlet => "singlet",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub temperature: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub term: RootTerm,
}

impl ThresholdResult {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

struct Bisection {
    bracket: (f64, f64),
    iterations: usize,
}

/// Brackets the sign change of `f` (positive when entangled) by doubling up
/// from `BRACKET_START_T`, then bisects to `tol`.
fn bisect_root<F>(f: F, tol: f64, sites: (usize, usize)) -> Result<Bisection>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (ENTANGLEMENT_PROBE_T, BRACKET_START_T);
    while f(hi)? > 0.0 {
        if hi >= BRACKET_LIMIT_T {
            return Err(Error::NoUpperBracket { i: sites.0, j: sites.1, temperature: hi });
        }
        lo = hi;
        hi = (2.0 * hi).min(BRACKET_LIMIT_T);
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(Bisection { bracket: (lo, hi), iterations })
}

fn threshold_for_bond(chain: &ThermalChain, bond: &ThermalBond, tol: f64) -> Result<ThresholdResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let sites = bond.sites;
    let probe = bond.root_arguments(&chain.ensemble(ENTANGLEMENT_PROBE_T)?);
    let mut best: Option<ThresholdResult> = None;
    for (slot, &(term, value)) in probe.iter().enumerate() {
        if value <= 0.0 {
            continue;
        }
        let f = |t: f64| Ok(bond.root_arguments(&chain.ensemble(t)?)[slot].1);
        let b = bisect_root(f, tol, sites)?;
        let candidate = ThresholdResult {
            temperature: 0.5 * (b.bracket.0 + b.bracket.1),
            bracket: b.bracket,
            iterations: b.iterations,
            term,
        };
        if best.map_or(true, |r| candidate.temperature > r.temperature) {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::NoEntanglement { i: sites.0, j: sites.1 })
}

/// Temperature above which the bond's entanglement vanishes.
pub fn threshold_temperature(spec: &ChainSpec, i: usize, j: usize, tol: f64) -> Result<ThresholdResult> {
    spec.check_pair(i, j)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    ThermalChain::new(*spec)?.threshold(i, j, tol)
}
