//! Seeded random instances and independent oracles shared by the
//! integration suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qfikit::generator::{HamiltonianFamily, Params, PolynomialFamily};
use qfikit::{evolve_unitary, Complex64, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// GUE-like Hermitian matrix with entries of size `scale`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianOperator {
    let g = gaussian_matrix(rng, n);
    let h = (&g + g.adjoint()).map(|z| z * (0.5 * scale));
    HermitianOperator::hermitized(&h).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let v = DVector::from_fn(n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v.map(|z| z / norm)
}

/// Full-rank density matrix `G G† / Tr(G G†)` mixed with a small multiple of
/// the identity to keep the smallest eigenvalue away from zero.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, n);
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m = m.map(|z| z / tr) * Complex64::new(0.9, 0.0)
        + ComplexMatrix::identity(n, n).map(|z| z * (0.1 / n as f64));
    DensityMatrix::new(m).unwrap()
}

/// Random unit Bloch vector.
pub fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// `H(a) = C₀ + a C₁ + a² C₂` with random coefficients and its parameters.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize) -> (PolynomialFamily, Params) {
    let coeffs = (0..3).map(|_| random_hermitian(rng, n, 0.7)).collect();
    let fam = PolynomialFamily::new("a", coeffs).unwrap();
    let a: f64 = rng.random_range(-1.0..1.0);
    let t: f64 = rng.random_range(0.1..2.0);
    (fam, Params::new().with("a", a).with("t", t))
}

/// Hermitian eigen-decomposition straight from nalgebra, `(values, vectors)`.
fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let e = m.clone().symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Exact generator in the eigenbasis of `H`:
/// `𝓗_kl = -(∂H)_kl ∫_0^t e^{isΔ_kl} ds`, `Δ_kl = E_k - E_l`.
pub fn generator_oracle(h: &ComplexMatrix, dh: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (e, v) = eigh(h);
    let x = v.adjoint() * dh * &v;
    let n = e.len();
    let g = DMatrix::from_fn(n, n, |k, l| {
        let d = e[k] - e[l];
        let integral = if (d * t).abs() < 1e-8 {
            Complex64::new(t, 0.5 * d * t * t)
        } else {
            (Complex64::new(0.0, d * t).exp() - 1.0) / Complex64::new(0.0, d)
        };
        -x[(k, l)] * integral
    });
    &v * g * v.adjoint()
}

pub fn family_oracle(fam: &dyn HamiltonianFamily, params: &Params, param: &str) -> ComplexMatrix {
    let h = fam.hamiltonian(params).unwrap();
    let dh = fam.derivative(params, param).unwrap();
    generator_oracle(h.matrix(), dh.matrix(), params.time().unwrap())
}

/// Fisher information from the SLD definition on the evolved state:
/// `F = Σ_{p_i+p_j>ε} 2|⟨i|∂ρ|j⟩|²/(p_i+p_j)` with a central difference
/// of `ρ(α) = U(α)ρ₀U(α)†`.
pub fn direct_sld_oracle(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
    rho0: &ComplexMatrix,
    step: f64,
) -> f64 {
    let t = params.time().unwrap();
    let evolve = |p: &Params| {
        let u = evolve_unitary(&fam.hamiltonian(p).unwrap(), t).unwrap();
        &u * rho0 * u.adjoint()
    };
    let plus = evolve(&params.shifted(param, step).unwrap());
    let minus = evolve(&params.shifted(param, -step).unwrap());
    let drho = (plus - minus).map(|z| z / (2.0 * step));
    let rho = evolve(params);
    let (p, v) = eigh(&rho);
    let d = v.adjoint() * drho * &v;
    let pmax = p.iter().cloned().fold(0.0, f64::max);
    let eps = 1e-12 * pmax;
    let mut f = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let s = p[i] + p[j];
            if s > eps {
                f += 2.0 * d[(i, j)].norm_sqr() / s;
            }
        }
    }
    f
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
