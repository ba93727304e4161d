//! Quantum Fisher information expressed through the generator `𝓗`.
//!
//! Everything here works in the frame of the initial state: for
//! `ρ(α) = U ρ₀ U†` the Fisher information only depends on `ρ₀` and `𝓗`,
//! so no evolved state is ever formed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    check_normalized, commutator, max_norm, spectral_decompose, ComplexMatrix, DensityMatrix,
    HermitianOperator, SpectralDecomposition, StateVector,
};
use crate::tolerance::Tolerances;

mod bernoulli;
mod rld;
mod sld;

pub use bernoulli::{bernoulli_numbers, sld_coefficient_exact, sld_coefficients, SldCoefficients};
pub use rld::{rld_effective, rld_matrix, rld_matrix_pure};
pub use sld::{
    qfi_exponential, sld_effective_exponential, sld_effective_exponential_closed,
    sld_effective_pure, ExponentialState,
};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Clamps tiny negative Fisher values (roundoff) to zero and rejects larger ones.
fn clamp_fisher(value: f64, scale: f64) -> Result<f64> {
    let tol = Tolerances::default().fisher_clamp * (1.0 + scale);
    if value >= 0.0 {
        Ok(value)
    } else if value >= -tol {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent(format!("negative Fisher information {value:e}")))
    }
}

/// `Σ_i 4 p_i cov_i(A, B) - Σ_{i≠j} 8 p_i p_j/(p_i+p_j) Re(A_ij B_ji)` over the
/// support of `ρ₀`, with `A`, `B` already in the eigenbasis of `ρ₀`.
fn fisher_entry(spectrum: &SpectralDecomposition, cutoff: f64, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let p = &spectrum.eigenvalues;
    let n = p.len();
    let support: Vec<usize> = (0..n).filter(|&i| p[i] > cutoff).collect();
    let mut first = 0.0;
    for &i in &support {
        // cov_i(A, B) = Re Σ_{k≠i} A_ik B_ki
        let cov: f64 = (0..n).filter(|&k| k != i).map(|k| (a[(i, k)] * b[(k, i)]).re).sum();
        first += 4.0 * p[i] * cov;
    }
    let mut correction = 0.0;
    for &i in &support {
        for &j in &support {
            if i != j && p[i] + p[j] > cutoff {
                correction += 8.0 * p[i] * p[j] / (p[i] + p[j]) * (a[(i, j)] * b[(j, i)]).re;
            }
        }
    }
    first - correction
}

/// Fisher information of `ρ(α) = U ρ₀ U†` from the generator `𝓗`.
pub fn qfi_mixed(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let spectrum = rho.spectrum();
    let hb = spectrum.to_eigenbasis(h.matrix());
    let f = fisher_entry(spectrum, rho.support_cutoff(), &hb, &hb);
    clamp_fisher(f, max_norm(h.matrix()).powi(2))
}

/// Qubit shortcut `F = 4(2 Tr ρ² - 1) ⟨Δ²𝓗⟩` on an eigenstate of `ρ₀`.
///
/// Both eigenstates give the same variance in two dimensions; a mismatch
/// beyond `1e-10` is reported as an inconsistency.
pub fn qfi_qubit(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    check_dim(2, h.dim())?;
    let spectrum = rho.spectrum();
    let v1 = h.variance(&spectrum.eigenvector(0));
    let v2 = h.variance(&spectrum.eigenvector(1));
    if (v1 - v2).abs() > 1e-10 * (1.0 + v1.abs()) {
        return Err(Error::Inconsistent(format!(
            "eigenstate variances differ: {v1} vs {v2}"
        )));
    }
    let f = 4.0 * (2.0 * rho.purity() - 1.0) * v1;
    clamp_fisher(f, max_norm(h.matrix()).powi(2))
}

/// `F = 4⟨Δ²𝓗⟩` on a pure initial state.
pub fn qfi_pure(psi: &StateVector, h: &HermitianOperator) -> Result<f64> {
    check_normalized(psi, Tolerances::default().normalization)?;
    check_dim(h.dim(), psi.len())?;
    clamp_fisher(4.0 * h.variance(psi), max_norm(h.matrix()).powi(2))
}

/// Logarithmic-derivative convention of a [`QfiMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Symmetric logarithmic derivative: real symmetric.
    Sld,
    /// Right logarithmic derivative: complex Hermitian.
    Rld,
}

/// A Fisher information matrix over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiMatrix {
    names: Vec<String>,
    entries: DMatrix<Complex64>,
    flavor: Flavor,
}

impl QfiMatrix {
    /// Validates symmetry (Hermiticity for RLD), non-negative diagonal and
    /// positive semidefiniteness.
    pub fn new(names: Vec<String>, entries: DMatrix<Complex64>, flavor: Flavor) -> Result<Self> {
        let n = names.len();
        if n == 0 || entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        let scale = 1.0 + max_norm(&entries);
        if flavor == Flavor::Sld && entries.iter().any(|z| z.im.abs() > 1e-10 * scale) {
            return Err(Error::Inconsistent("SLD Fisher matrix must be real".into()));
        }
        let op = HermitianOperator::with_tolerance(entries.clone(), 1e-10)?;
        if (0..n).any(|i| entries[(i, i)].re < -1e-10) {
            return Err(Error::Inconsistent("negative diagonal Fisher element".into()));
        }
        let trace: f64 = (0..n).map(|i| entries[(i, i)].re).sum();
        let smallest = spectral_decompose(&op).eigenvalues[0];
        if smallest < -1e-8 * trace - 1e-14 {
            return Err(Error::Inconsistent(format!(
                "Fisher matrix not positive semidefinite (eigenvalue {smallest:e})"
            )));
        }
        Ok(Self {
            names,
            entries: op.into_matrix(),
            flavor,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Real part of the `(i, j)` element.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)].re
    }

    pub fn get_complex(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn real(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    /// Determinant of the real part.
    pub fn determinant(&self) -> f64 {
        self.real().determinant()
    }

    /// `Tr M⁻¹` of the real part, `None` when singular.
    pub fn trace_of_inverse(&self) -> Option<f64> {
        self.real().try_inverse().map(|inv| inv.trace())
    }
}

fn names_of(hs: &[(&str, &HermitianOperator)]) -> Result<Vec<String>> {
    if hs.is_empty() {
        return Err(Error::InvalidArgument("at least one generator is required".into()));
    }
    Ok(hs.iter().map(|(n, _)| n.to_string()).collect())
}

/// SLD Fisher matrix of a mixed initial state; the diagonal reproduces
/// [`qfi_mixed`] for each generator.
pub fn qfi_matrix(rho: &DensityMatrix, hs: &[(&str, &HermitianOperator)]) -> Result<QfiMatrix> {
    let names = names_of(hs)?;
    for (_, h) in hs {
        check_dim(rho.dim(), h.dim())?;
    }
    let spectrum = rho.spectrum();
    let cutoff = rho.support_cutoff();
    let rotated: Vec<ComplexMatrix> = hs.iter().map(|(_, h)| spectrum.to_eigenbasis(h.matrix())).collect();
    let n = hs.len();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        let diag = fisher_entry(spectrum, cutoff, &rotated[a], &rotated[a]);
        entries[(a, a)] = clamp_fisher(diag, max_norm(hs[a].1.matrix()).powi(2))?.into();
        for b in a + 1..n {
            let v = fisher_entry(spectrum, cutoff, &rotated[a], &rotated[b]);
            entries[(a, b)] = v.into();
            entries[(b, a)] = v.into();
        }
    }
    QfiMatrix::new(names, entries, Flavor::Sld)
}

/// `cov(A, B) = Re⟨AB⟩ - ⟨A⟩⟨B⟩` on a normalized state.
fn covariance(psi: &StateVector, a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    let apsi = a.matrix() * psi;
    let bpsi = b.matrix() * psi;
    apsi.dotc(&bpsi).re - a.expectation(psi) * b.expectation(psi)
}

/// Pure-state Fisher matrix `𝓕_αβ = 4 cov(𝓗_α, 𝓗_β)`.
pub fn qfi_matrix_pure(psi: &StateVector, hs: &[(&str, &HermitianOperator)]) -> Result<QfiMatrix> {
    check_normalized(psi, Tolerances::default().normalization)?;
    let names = names_of(hs)?;
    for (_, h) in hs {
        check_dim(psi.len(), h.dim())?;
    }
    let n = hs.len();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        let diag = 4.0 * covariance(psi, hs[a].1, hs[a].1);
        entries[(a, a)] = clamp_fisher(diag, max_norm(hs[a].1.matrix()).powi(2))?.into();
        for b in a + 1..n {
            let v = 4.0 * covariance(psi, hs[a].1, hs[b].1);
            entries[(a, b)] = v.into();
            entries[(b, a)] = v.into();
        }
    }
    QfiMatrix::new(names, entries, Flavor::Sld)
}

/// `⟨ψ₀|[𝓗_α, 𝓗_β]|ψ₀⟩` for one parameter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWitness {
    pub first: String,
    pub second: String,
    pub value: Complex64,
}

/// Outcome of the pure-state Cramér-Rao achievability test.
#[derive(Debug, Clone, PartialEq)]
pub struct Achievability {
    pub achievable: bool,
    pub witnesses: Vec<PairWitness>,
}

impl Achievability {
    pub fn max_violation(&self) -> f64 {
        self.witnesses.iter().fold(0.0, |acc, w| acc.max(w.value.norm()))
    }
}

/// The multiparameter bound is attainable for a pure state iff every
/// `⟨ψ₀|[𝓗_α, 𝓗_β]|ψ₀⟩` vanishes.
pub fn cr_achievable_pure(psi: &StateVector, hs: &[(&str, &HermitianOperator)]) -> Result<Achievability> {
    check_normalized(psi, Tolerances::default().normalization)?;
    names_of(hs)?;
    let mut witnesses = Vec::new();
    for (a, (name_a, ha)) in hs.iter().enumerate() {
        check_dim(psi.len(), ha.dim())?;
        for (name_b, hb) in hs.iter().skip(a + 1) {
            let comm = commutator(ha.matrix(), hb.matrix());
            let value = psi.dotc(&(comm * psi));
            witnesses.push(PairWitness {
                first: name_a.to_string(),
                second: name_b.to_string(),
                value,
            });
        }
    }
    let tol = Tolerances::default().achievability;
    let achievable = witnesses.iter().all(|w| w.value.norm() <= tol);
    Ok(Achievability {
        achievable,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c, density_from_bloch, pauli, BlochVector};

    fn ket(v: &[Complex64]) -> StateVector {
        StateVector::from_column_slice(v)
    }

    fn plus_x() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[c(s), c(s)])
    }

    #[test]
    fn pure_state_reduces_to_variance() {
        let psi = plus_x();
        let rho = DensityMatrix::pure(&psi).unwrap();
        let h = pauli::dot([0.2, -0.7, 0.4]);
        let mixed = qfi_mixed(&rho, &h).unwrap();
        assert!((mixed - 4.0 * h.variance(&psi)).abs() < 1e-12);
        assert!((qfi_qubit(&rho, &h).unwrap() - mixed).abs() < 1e-10);
        assert!((qfi_pure(&psi, &h).unwrap() - mixed).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit_has_no_information() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let h = pauli::dot([0.3, 0.1, -2.0]);
        assert_eq!(qfi_mixed(&rho, &h).unwrap(), 0.0);
        assert_eq!(qfi_qubit(&rho, &h).unwrap(), 0.0);
    }

    #[test]
    fn qubit_formula_scales_with_purity() {
        let h = pauli::y().scale(-1.0);
        let r = BlochVector::new([0.6, 0.0, 0.0]).unwrap();
        let rho = density_from_bloch(&r).unwrap();
        // |r|² · 4 · Var_{±x}(σ_y) = 0.36 · 4
        assert!((qfi_qubit(&rho, &h).unwrap() - 1.44).abs() < 1e-12);
        assert!((qfi_mixed(&rho, &h).unwrap() - 1.44).abs() < 1e-12);
    }

    #[test]
    fn dimension_checks() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(qfi_mixed(&rho, &pauli::x()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(qfi_qubit(&rho, &HermitianOperator::zeros(3)), Err(Error::NotQubit(3))));
    }

    #[test]
    fn single_generator_matrix() {
        let rho = density_from_bloch(&BlochVector::new([0.1, 0.5, -0.3]).unwrap()).unwrap();
        let h = pauli::dot([1.0, 0.2, 0.0]);
        let m = qfi_matrix(&rho, &[("a", &h)]).unwrap();
        assert_eq!(m.dim(), 1);
        assert!((m.get(0, 0) - qfi_mixed(&rho, &h).unwrap()).abs() < 1e-12);
        assert_eq!(m.flavor(), Flavor::Sld);
    }

    #[test]
    fn commuting_generators_reduce_to_covariance() {
        // H₁ = σ_z, H₂ = 𝟙 with 𝓗_i = -t H_i
        let t = 0.7;
        let h1 = pauli::z().scale(-t);
        let h2 = HermitianOperator::identity(2).scale(-t);
        let psi = plus_x();
        let m = qfi_matrix_pure(&psi, &[("a", &h1), ("b", &h2)]).unwrap();
        assert!((m.get(0, 0) - 4.0 * t * t).abs() < 1e-12);
        assert!(m.get(0, 1).abs() < 1e-14 && m.get(1, 1).abs() < 1e-14);
        assert!(cr_achievable_pure(&psi, &[("a", &h1), ("b", &h2)]).unwrap().achievable);
    }

    #[test]
    fn identical_generators_fill_the_matrix() {
        let h = pauli::dot([0.3, 0.3, 0.9]);
        let psi = plus_x();
        let m = qfi_matrix_pure(&psi, &[("a", &h), ("b", &h)]).unwrap();
        for (i, j) in [(0, 1), (1, 0), (1, 1)] {
            assert!((m.get(i, j) - m.get(0, 0)).abs() < 1e-14);
        }
        assert!(m.determinant().abs() < 1e-12);
    }

    #[test]
    fn pure_matrix_requires_normalized_state() {
        let bad = ket(&[c(1.0), c(1.0)]);
        assert!(matches!(
            qfi_matrix_pure(&bad, &[("a", &pauli::x())]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(cr_achievable_pure(&bad, &[("a", &pauli::x())]).is_err());
    }

    #[test]
    fn non_commuting_witness() {
        // ⟨+z|[σ_x, σ_y]|+z⟩ = 2i
        let up = ket(&[c(1.0), c(0.0)]);
        let a = cr_achievable_pure(&up, &[("x", &pauli::x()), ("y", &pauli::y())]).unwrap();
        assert!(!a.achievable);
        assert!((a.witnesses[0].value - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((a.max_violation() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_validation_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(1.0)]);
        assert!(QfiMatrix::new(vec!["a".into(), "b".into()], m, Flavor::Sld).is_err());
        let m = DMatrix::from_row_slice(1, 1, &[Complex64::new(1.0, 0.5)]);
        assert!(QfiMatrix::new(vec!["a".into()], m, Flavor::Sld).is_err());
    }
}
