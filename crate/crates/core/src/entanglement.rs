//! Pairwise entanglement: SU(2) closed forms driven by bond expectations, and
//! RDM-based measures (Wootters concurrence, partial-transpose negativity)
//! used to cross-check them.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::bond_operators;
use crate::hilbert::{ChainSpec, SpinKind};
use crate::observables::{bond_expectations_with, reduced_density_matrix, BondExpectations, TwoSiteRdm};
use crate::spectra::SolvedChain;

/// Eigenvalues of `ρ` below this are treated as exact zeros in the Wootters
/// decomposition.
const RANK_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Concurrence,
    Negativity,
}

impl Measure {
    /// The measure used for a given spin kind.
    pub fn for_spin(spin: SpinKind) -> Self {
        match spin {
            SpinKind::Half => Measure::Concurrence,
            SpinKind::One => Measure::Negativity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Concurrence => "concurrence",
            Measure::Negativity => "negativity",
        }
    }

    pub fn check_spin(self, spin: SpinKind) -> Result<()> {
        if Measure::for_spin(spin) != self {
            return Err(Error::IncompatibleMeasure { measure: self.name(), spin });
        }
        Ok(())
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "concurrence" => Ok(Measure::Concurrence),
            "negativity" => Ok(Measure::Negativity),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

/// `C = max{0, −⟨swap⟩}` for an SU(2)-invariant two-qubit state.
pub fn concurrence_su2(be: &BondExpectations) -> Result<f64> {
    Measure::Concurrence.check_spin(be.spin)?;
    Ok(concurrence_from_swap(be.swap))
}

pub fn concurrence_from_swap(swap: f64) -> f64 {
    (-swap).max(0.0)
}

/// Same quantity written through `⟨S_i·S_j⟩`: `max{0, −2⟨S·S⟩ − 1/2}`.
pub fn concurrence_from_heisenberg(heisenberg: f64) -> f64 {
    (-2.0 * heisenberg - 0.5).max(0.0)
}

/// `N = ½ max[0, ⟨swap⟩ − ⟨S·S⟩ − 1] + ⅓ max[0, −⟨swap⟩]` for two spin-1s.
pub fn negativity_su2(be: &BondExpectations) -> Result<f64> {
    Measure::Negativity.check_spin(be.spin)?;
    let (a, b) = negativity_terms_from_swap(be.heisenberg, be.swap);
    Ok(0.5 * a.max(0.0) + b.max(0.0) / 3.0)
}

/// Arguments of the two max-terms, `(⟨swap⟩ − ⟨S·S⟩ − 1, −⟨swap⟩)`.
pub fn negativity_terms_from_swap(heisenberg: f64, swap: f64) -> (f64, f64) {
    (swap - heisenberg - 1.0, -swap)
}

/// Arguments of the two max-terms in moment form, `(⟨(S·S)²⟩ − 2,
/// 1 − ⟨S·S⟩ − ⟨(S·S)²⟩)`.
pub fn negativity_terms_from_moments(heisenberg: f64, heisenberg_sq: f64) -> (f64, f64) {
    (heisenberg_sq - 2.0, 1.0 - heisenberg - heisenberg_sq)
}

pub fn negativity_from_moments(heisenberg: f64, heisenberg_sq: f64) -> f64 {
    let (a, b) = negativity_terms_from_moments(heisenberg, heisenberg_sq);
    0.5 * a.max(0.0) + b.max(0.0) / 3.0
}

fn hermitian_eigen(m: &DMatrix<Complex64>) -> nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn> {
    // symmetrize first; nalgebra only reads one triangle
    let herm = (m + m.adjoint()).map(|z| z * 0.5);
    herm.symmetric_eigen()
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The λ's are computed as singular values of `Wᵀ (σy⊗σy) W` with
/// `ρ = W W†`, which avoids square roots of rounding noise.
pub fn wootters_concurrence(rdm: &TwoSiteRdm) -> Result<f64> {
    if rdm.local_dim() != 2 {
        return Err(Error::IncompatibleMeasure { measure: "wootters concurrence", spin: rdm.spin });
    }
    let eig = hermitian_eigen(&rdm.matrix);
    let mut w = DMatrix::<Complex64>::zeros(4, 4);
    for k in 0..4 {
        let p = eig.eigenvalues[k];
        if p > RANK_CUTOFF {
            w.set_column(k, &eig.eigenvectors.column(k).map(|z| z * p.sqrt()));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut yy = DMatrix::<Complex64>::zeros(4, 4);
    yy[(0, 3)] = -one;
    yy[(1, 2)] = one;
    yy[(2, 1)] = one;
    yy[(3, 0)] = -one;
    let tau = w.transpose() * yy * &w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Partial transpose on the second site.
pub fn partial_transpose(rdm: &TwoSiteRdm) -> DMatrix<Complex64> {
    let d = rdm.local_dim();
    let n = d * d;
    DMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / d, r % d);
        let (ap, bp) = (c / d, c % d);
        rdm.matrix[(a * d + bp, ap * d + b)]
    })
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_B}`.
pub fn pt_negativity(rdm: &TwoSiteRdm) -> f64 {
    let eig = hermitian_eigen(&partial_transpose(rdm));
    eig.eigenvalues.iter().filter(|&&x| x < 0.0).map(|x| -x).sum()
}

/// Closed-form measure of the kind matching `be.spin`.
pub fn su2_measure(be: &BondExpectations) -> f64 {
    match be.spin {
        SpinKind::Half => concurrence_from_swap(be.swap),
        SpinKind::One => negativity_su2(be).expect("spin checked"),
    }
}

/// RDM oracle of the kind matching the pair's spin.
pub fn rdm_measure(rdm: &TwoSiteRdm) -> f64 {
    match rdm.spin {
        SpinKind::Half => wootters_concurrence(rdm).expect("spin checked"),
        SpinKind::One => pt_negativity(rdm),
    }
}

/// Nearest-neighbour entanglement along the chain for one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementProfile {
    pub spec: ChainSpec,
    pub level: usize,
    pub measure: Measure,
    /// Closed-form value for bond `(i, i + 1)` at index `i − 1`.
    pub values: Vec<f64>,
    /// Same bonds, from the pair RDM.
    pub oracle: Vec<f64>,
}

impl EntanglementProfile {
    pub fn max_oracle_gap(&self) -> f64 {
        self.values.iter().zip(&self.oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.values.iter().zip(self.values.iter().rev()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// True when bond 1 carries the largest value (ties allowed).
    pub fn edge_maximal(&self, tol: f64) -> bool {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.values[0] >= max - tol
    }
}

pub fn bond_profile_of(chain: &SolvedChain, level: usize, measure: Measure) -> Result<EntanglementProfile> {
    let spec = *chain.spec();
    measure.check_spin(spec.spin())?;
    let state = chain.level_state(level)?;
    let mut values = Vec::with_capacity(spec.length() - 1);
    let mut oracle = Vec::with_capacity(spec.length() - 1);
    for (i, j) in spec.bonds() {
        let ops = bond_operators(chain.basis(), i, j)?;
        let be = bond_expectations_with(&state, &ops)?;
        values.push(su2_measure(&be));
        oracle.push(rdm_measure(&reduced_density_matrix(&state, &spec, i, j)?));
    }
    Ok(EntanglementProfile { spec, level, measure, values, oracle })
}

pub fn bond_profile(spec: &ChainSpec, level: usize, measure: Measure) -> Result<EntanglementProfile> {
    measure.check_spin(spec.spin())?;
    bond_profile_of(&SolvedChain::new(*spec)?, level, measure)
}

/// How two profiles move relative to each other, judged on first differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseComparison {
    pub same: usize,
    pub opposite: usize,
    /// Differences where either profile is flat.
    pub flat: usize,
}

/// Minimum share of non-flat differences needed to call a phase relation.
pub const PHASE_MAJORITY: f64 = 2.0 / 3.0;

impl PhaseComparison {
    fn counted(&self) -> usize {
        self.same + self.opposite
    }

    pub fn out_of_phase(&self) -> bool {
        self.counted() > 0 && self.opposite as f64 >= PHASE_MAJORITY * self.counted() as f64
    }

    pub fn in_phase(&self) -> bool {
        self.counted() > 0 && self.same as f64 >= PHASE_MAJORITY * self.counted() as f64
    }
}

/// Compares the signs of `a[i+1] − a[i]` and `b[i+1] − b[i]`; steps smaller
/// than `flat_tol` in either profile are not counted.
pub fn compare_phase(a: &[f64], b: &[f64], flat_tol: f64) -> PhaseComparison {
    let mut cmp = PhaseComparison { same: 0, opposite: 0, flat: 0 };
    for (wa, wb) in a.windows(2).zip(b.windows(2)) {
        let da = wa[1] - wa[0];
        let db = wb[1] - wb[0];
        if da.abs() <= flat_tol || db.abs() <= flat_tol {
            cmp.flat += 1;
        } else if da.signum() == db.signum() {
            cmp.same += 1;
        } else {
            cmp.opposite += 1;
        }
    }
    cmp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpinKind::{Half, One};
    use crate::observables::{config_from_ket, pair_operators, QuantumState};
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn be(spin: SpinKind, heisenberg: f64, swap: f64) -> BondExpectations {
        let heisenberg_sq = match spin {
            Half => 3.0 / 16.0 - heisenberg / 2.0,
            One => swap - heisenberg + 1.0,
        };
        BondExpectations { spin, heisenberg, heisenberg_sq, swap }
    }

    fn rdm(spin: SpinKind, m: DMatrix<f64>) -> TwoSiteRdm {
        TwoSiteRdm { spin, sites: (1, 2), matrix: m.map(|x| Complex64::new(x, 0.0)) }
    }

    fn spin_one_singlet() -> TwoSiteRdm {
        let spec = ChainSpec::antiferro(One, 2).unwrap();
        let mut v = DVector::zeros(9);
        for (ket, a) in [("02", 1.0), ("11", -1.0), ("20", 1.0)] {
            v[config_from_ket(&spec, ket)] = a / 3f64.sqrt();
        }
        reduced_density_matrix(&QuantumState::pure(v).unwrap(), &spec, 1, 2).unwrap()
    }

    #[test]
    fn concurrence_closed_form() {
        assert_eq!(concurrence_su2(&be(Half, -0.5, -0.5)).unwrap(), 0.5);
        assert_eq!(concurrence_su2(&be(Half, 0.0, 0.5)).unwrap(), 0.0);
        assert_eq!(concurrence_su2(&be(Half, -0.75, -1.0)).unwrap(), 1.0);
        assert!(concurrence_su2(&be(One, -1.0, -1.0)).is_err());
    }

    #[test]
    fn negativity_closed_form() {
        let third = 1.0 / 3.0;
        assert!((negativity_su2(&be(One, -1.5, 1.0 / 6.0)).unwrap() - third).abs() < 1e-15);
        assert!((negativity_su2(&be(One, -1.0, -1.0)).unwrap() - third).abs() < 1e-15);
        // two-site singlet: h1 = -2, h2 = 4, swap = 1
        let singlet = BondExpectations::from_moments(One, -2.0, 4.0);
        assert!((negativity_su2(&singlet).unwrap() - 1.0).abs() < 1e-15);
        assert!(negativity_su2(&be(Half, -0.75, -1.0)).is_err());
    }

    #[test]
    fn wootters_known_cases() {
        let (spec, singlet) = {
            let spec = ChainSpec::antiferro(Half, 2).unwrap();
            let mut v = DVector::zeros(4);
            v[config_from_ket(&spec, "01")] = 1.0 / 2f64.sqrt();
            v[config_from_ket(&spec, "10")] = -1.0 / 2f64.sqrt();
            (spec, QuantumState::pure(v).unwrap())
        };
        let r = reduced_density_matrix(&singlet, &spec, 1, 2).unwrap();
        assert!((wootters_concurrence(&r).unwrap() - 1.0).abs() < 1e-12);
        let mixed = rdm(Half, DMatrix::identity(4, 4) / 4.0);
        assert!(wootters_concurrence(&mixed).unwrap().abs() < 1e-12);
        assert!(wootters_concurrence(&spin_one_singlet()).is_err());
    }

    #[test]
    fn wootters_on_product_and_bell_states() {
        // |00> is separable; (|00> + |11>)/sqrt2 is maximally entangled
        let mut prod = DMatrix::zeros(4, 4);
        prod[(0, 0)] = 1.0;
        assert!(wootters_concurrence(&rdm(Half, prod)).unwrap().abs() < 1e-12);
        let mut bell = DMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(r, c)] = 0.5;
        }
        assert!((wootters_concurrence(&rdm(Half, bell)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pt_negativity_known_cases() {
        // the partial transpose of the spin-one singlet has eigenvalues
        // +1/3 (x6) and -1/3 (x3)
        let pt = partial_transpose(&spin_one_singlet());
        let mut ev: Vec<f64> = pt.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (k, e) in ev.iter().enumerate() {
            let expected = if k < 3 { -1.0 / 3.0 } else { 1.0 / 3.0 };
            assert!((e - expected).abs() < 1e-12, "{ev:?}");
        }
        assert!((pt_negativity(&spin_one_singlet()) - 1.0).abs() < 1e-12);
        let mixed = rdm(One, DMatrix::identity(9, 9) / 9.0);
        assert!(pt_negativity(&mixed).abs() < 1e-12);
    }

    #[test]
    fn four_qubit_profiles() {
        let spec = ChainSpec::antiferro(Half, 4).unwrap();
        let c0 = (3.0 + 2.0 * 3f64.sqrt()) / (4.0 + 2.0 * 3f64.sqrt());
        let c1 = (1.0 + 2f64.sqrt()) / (2.0 + 2f64.sqrt());
        let g = bond_profile(&spec, 0, Measure::Concurrence).unwrap();
        let f = bond_profile(&spec, 1, Measure::Concurrence).unwrap();
        for (got, want) in g.values.iter().zip([c0, 0.0, c0]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in f.values.iter().zip([0.0, c1, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(g.max_oracle_gap() < 1e-8 && f.max_oracle_gap() < 1e-8);
    }

    #[test]
    fn measure_spin_pairing_is_enforced() {
        let spec = ChainSpec::antiferro(One, 3).unwrap();
        assert!(matches!(
            bond_profile(&spec, 0, Measure::Concurrence),
            Err(Error::IncompatibleMeasure { .. })
        ));
    }

    #[test]
    fn spin_one_five_site_profile_is_palindromic_and_matches_oracle() {
        let spec = ChainSpec::antiferro(One, 5).unwrap();
        let p = bond_profile(&spec, 0, Measure::Negativity).unwrap();
        assert!(p.max_asymmetry() < 1e-9);
        assert!(p.max_oracle_gap() < 1e-8);
        assert!(p.edge_maximal(1e-12));
    }

    #[test]
    fn phase_comparison_counts() {
        let a = [1.0, 0.0, 1.0, 0.0];
        let b = [0.0, 1.0, 0.0, 1.0];
        let cmp = compare_phase(&a, &b, 1e-12);
        assert_eq!(cmp, PhaseComparison { same: 0, opposite: 3, flat: 0 });
        assert!(cmp.out_of_phase() && !cmp.in_phase());
        let flat = compare_phase(&[1.0, 1.0], &[0.0, 2.0], 1e-12);
        assert_eq!(flat.flat, 1);
        assert!(!flat.in_phase() && !flat.out_of_phase());
    }

    proptest! {
        #[test]
        fn concurrence_forms_agree(h in -0.75f64..0.25) {
            let b = BondExpectations::from_moments(Half, h, 0.0);
            prop_assert!((concurrence_from_heisenberg(h) - concurrence_su2(&b).unwrap()).abs() < 1e-12);
            let c = concurrence_su2(&b).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }

        // SU(2)-invariant two-spin-1 states are mixtures of the total-spin
        // projectors; closed form and partial transpose must agree on all of them.
        #[test]
        fn negativity_forms_agree(p0 in 0.0f64..1.0, p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
            prop_assume!(p0 + p1 + p2 > 1e-3);
            let total = p0 + p1 + p2;
            let [dot, sq, swap] = pair_operators(One);
            let dense = dot.map(|z| z.re);
            let eig = dense.clone().symmetric_eigen();
            let mut rho = DMatrix::<f64>::zeros(9, 9);
            for k in 0..9 {
                let e = eig.eigenvalues[k];
                let (w, g) = if (e + 2.0).abs() < 1e-9 { (p0, 1.0) } else if (e + 1.0).abs() < 1e-9 { (p1, 3.0) } else { (p2, 5.0) };
                let v = eig.eigenvectors.column(k);
                rho += (v * v.transpose()) * (w / total / g);
            }
            let r = rdm(One, rho);
            let h1 = r.expectation(&dot);
            let h2 = r.expectation(&sq);
            let sw = r.expectation(&swap);
            let b = BondExpectations { spin: One, heisenberg: h1, heisenberg_sq: h2, swap: sw };
            prop_assert!(b.identity_defect() < 1e-12);
            let closed = negativity_su2(&b).unwrap();
            prop_assert!((closed - negativity_from_moments(h1, h2)).abs() < 1e-12);
            prop_assert!((closed - pt_negativity(&r)).abs() < 1e-10);
        }
    }
}
