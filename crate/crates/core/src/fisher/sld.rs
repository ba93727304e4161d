//! Effective SLD operators for pure and exponential-form initial states.

use num_complex::Complex64;

use super::bernoulli::sld_coefficients;
use super::{check_dim, clamp_fisher};
use crate::error::{Error, Result};
use crate::operator::{
    check_normalized, commutator, hermitian_deviation, max_norm, spectral_decompose, ComplexMatrix,
    DensityMatrix, HermitianOperator, SpectralDecomposition, StateVector, I,
};
use crate::tolerance::Tolerances;

/// `L_eff = 2i[𝓗, |ψ₀⟩⟨ψ₀|]`, with `F = ⟨ψ₀|L_eff²|ψ₀⟩`.
pub fn sld_effective_pure(psi: &StateVector, h: &HermitianOperator) -> Result<HermitianOperator> {
    check_normalized(psi, Tolerances::default().normalization)?;
    check_dim(h.dim(), psi.len())?;
    let projector = psi * psi.adjoint();
    let l = commutator(h.matrix(), &projector).map(|z| z * 2.0 * I);
    HermitianOperator::hermitized(&l)
}

/// An initial state written as `ρ₀ = exp(G₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialState {
    g0: HermitianOperator,
    spectrum: SpectralDecomposition,
}

impl ExponentialState {
    /// Requires `Tr exp(G₀) = 1` to `1e-10`.
    pub fn new(g0: HermitianOperator) -> Result<Self> {
        let spectrum = spectral_decompose(&g0);
        let trace: f64 = spectrum.eigenvalues.iter().map(|a| a.exp()).sum();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("Tr exp(G0) = {trace}, expected 1")));
        }
        Ok(Self { g0, spectrum })
    }

    /// `G₀ = ln ρ₀` for a full-rank density matrix.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let smallest = rho.spectrum().eigenvalues[0];
        if smallest <= 0.0 {
            return Err(Error::Singular { smallest });
        }
        let g0 = rho.spectrum().map_spectrum(|p| p.ln().into());
        Self::new(HermitianOperator::hermitized(&g0)?)
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.g0
    }

    /// Eigenvalues `a_i` of `G₀`, ascending.
    pub fn exponents(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `exp(G₀)` as a density matrix.
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.spectrum.map_spectrum(|a| a.exp().into()))
    }
}

/// Truncated expansion `L_eff = -i Σ_{n=0}^{order} g_n (G₀^×)^{n+1} 𝓗`.
///
/// Fails with [`Error::NonConvergence`] when the even-order terms grow over
/// three consecutive orders, which happens once the spread of `G₀` leaves the
/// disc of convergence; [`sld_effective_exponential_closed`] has no such
/// restriction.
pub fn sld_effective_exponential(
    state: &ExponentialState,
    h: &HermitianOperator,
    order: usize,
) -> Result<HermitianOperator> {
    if order % 2 == 1 {
        return Err(Error::InvalidArgument(format!("SLD series order must be even, got {order}")));
    }
    check_dim(state.g0.dim(), h.dim())?;
    let g = sld_coefficients(order).g;
    let g0 = state.g0.matrix();
    let mut nested = h.matrix().clone();
    let mut sum = ComplexMatrix::zeros(h.dim(), h.dim());
    let mut norms: Vec<f64> = Vec::new();
    for (n, gn) in g.iter().enumerate() {
        nested = commutator(g0, &nested);
        if n % 2 == 1 {
            continue;
        }
        let term = nested.map(|z| z * -I * *gn);
        norms.push(max_norm(&term));
        sum += term;
        if let [.., a, b, c, d] = norms[..] {
            if a < b && b < c && c < d {
                return Err(Error::NonConvergence {
                    method: "SLD series (use the closed form)",
                    residual: d,
                });
            }
        }
    }
    let deviation = hermitian_deviation(&sum);
    if deviation > 1e-10 * (1.0 + max_norm(&sum)) {
        return Err(Error::NotHermitian { deviation });
    }
    HermitianOperator::hermitized(&sum)
}

/// Element-wise closed form `[L_eff]_ij = -2i tanh((a_i - a_j)/2) 𝓗_ij` in the
/// eigenbasis of `G₀`.
pub fn sld_effective_exponential_closed(
    state: &ExponentialState,
    h: &HermitianOperator,
) -> Result<HermitianOperator> {
    check_dim(state.g0.dim(), h.dim())?;
    let a = state.exponents();
    let hb = state.spectrum.to_eigenbasis(h.matrix());
    let lb = ComplexMatrix::from_fn(h.dim(), h.dim(), |i, j| {
        Complex64::new(0.0, -2.0) * ((a[i] - a[j]) / 2.0).tanh() * hb[(i, j)]
    });
    HermitianOperator::hermitized(&state.spectrum.from_eigenbasis(&lb))
}

/// `F = Σ_{i>j} 4(e^{a_i} + e^{a_j}) tanh²((a_i - a_j)/2) |𝓗_ij|²`.
pub fn qfi_exponential(state: &ExponentialState, h: &HermitianOperator) -> Result<f64> {
    check_dim(state.g0.dim(), h.dim())?;
    let a = state.exponents();
    let hb = state.spectrum.to_eigenbasis(h.matrix());
    let mut f = 0.0;
    for i in 0..a.len() {
        for j in 0..i {
            let th = ((a[i] - a[j]) / 2.0).tanh();
            f += 4.0 * (a[i].exp() + a[j].exp()) * th * th * hb[(i, j)].norm_sqr();
        }
    }
    clamp_fisher(f, max_norm(h.matrix()).powi(2))
}
