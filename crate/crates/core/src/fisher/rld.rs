//! Right logarithmic derivative quantities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_dim, names_of, Flavor, QfiMatrix};
use crate::error::{Error, Result};
use crate::operator::{
    check_normalized, commutator, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector, I,
};
use crate::tolerance::Tolerances;

/// `ρ₀⁻¹` for a density matrix whose smallest eigenvalue clears the support cutoff.
fn inverse(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let smallest = rho.spectrum().eigenvalues[0];
    if smallest <= rho.support_cutoff() {
        return Err(Error::Singular { smallest });
    }
    Ok(rho.spectrum().map_spectrum(|p| (1.0 / p).into()))
}

/// `R_eff = i(ρ₀⁻¹ 𝓗 ρ₀ - 𝓗)`, generally not Hermitian.
pub fn rld_effective(rho: &DensityMatrix, h: &HermitianOperator) -> Result<ComplexMatrix> {
    check_dim(rho.dim(), h.dim())?;
    let inv = inverse(rho)?;
    let m = &inv * h.matrix() * rho.matrix() - h.matrix();
    Ok(m.map(|z| z * I))
}

/// `𝓙_αβ = Tr(𝓗_α ρ₀² 𝓗_β ρ₀⁻¹ - 2 𝓗_β 𝓗_α ρ₀ + 𝓗_α 𝓗_β ρ₀)` for a full-rank state.
pub fn rld_matrix(rho: &DensityMatrix, hs: &[(&str, &HermitianOperator)]) -> Result<QfiMatrix> {
    let names = names_of(hs)?;
    for (_, h) in hs {
        check_dim(rho.dim(), h.dim())?;
    }
    let inv = inverse(rho)?;
    let r = rho.matrix();
    let r2 = r * r;
    let n = hs.len();
    let entries = DMatrix::from_fn(n, n, |a, b| {
        let ha = hs[a].1.matrix();
        let hb = hs[b].1.matrix();
        (ha * &r2 * hb * &inv).trace() - (hb * ha * r).trace() * 2.0 + (ha * hb * r).trace()
    });
    QfiMatrix::new(names, entries, Flavor::Rld)
}

/// `𝓙_αβ = Tr(∂_α ρ ∂_β ρ)` for a pure state, with `∂ρ = i[𝓗, |ψ₀⟩⟨ψ₀|]` in
/// the initial frame. Equals half the SLD matrix.
pub fn rld_matrix_pure(psi: &StateVector, hs: &[(&str, &HermitianOperator)]) -> Result<QfiMatrix> {
    check_normalized(psi, Tolerances::default().normalization)?;
    let names = names_of(hs)?;
    let projector = psi * psi.adjoint();
    let mut derivs = Vec::with_capacity(hs.len());
    for (_, h) in hs {
        check_dim(psi.len(), h.dim())?;
        derivs.push(commutator(h.matrix(), &projector).map(|z| z * I));
    }
    let n = hs.len();
    let entries = DMatrix::from_fn(n, n, |a, b| -> Complex64 { (&derivs[a] * &derivs[b]).trace() });
    QfiMatrix::new(names, entries, Flavor::Rld)
}
