//! Dense complex linear algebra used throughout the crate: Hermitian
//! operators, spectral decompositions, unitary evolution, nested commutators,
//! density matrices and the qubit Bloch map.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry modulus, `max |M_ij|`.
pub fn max_norm(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Checks that `m` is a non-empty square matrix with finite entries.
pub fn check_matrix(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// `max |M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(M + M†) / 2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `[A, B] = AB - BA`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// `{A, B} = AB + BA`
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

/// Frobenius inner product `Tr(A† B)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// n-fold adjoint action `A^{×n}(X)` for arbitrary square matrices.
pub(crate) fn nested_commutator(a: &ComplexMatrix, x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut out = x.clone();
    for _ in 0..n {
        out = commutator(a, &out);
    }
    out
}

/// A dense Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity against the default tolerance and stores the
    /// exactly Hermitian part of `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        check_matrix(&matrix)?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > tol * (1.0 + max_norm(&matrix)) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    /// Wraps the Hermitian part of `matrix` without any tolerance check.
    pub fn hermitized(matrix: &ComplexMatrix) -> Result<Self> {
        check_matrix(matrix)?;
        Ok(Self {
            matrix: hermitian_part(matrix),
        })
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(c))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// `⟨ψ|H|ψ⟩`, real for Hermitian `H`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }

    /// `⟨ψ|H²|ψ⟩ - ⟨ψ|H|ψ⟩²` for a normalized `ψ`.
    pub fn variance(&self, psi: &StateVector) -> f64 {
        let hpsi = &self.matrix * psi;
        let second = hpsi.norm_squared();
        let first = psi.dotc(&hpsi).re;
        second - first * first
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

/// Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> HermitianOperator {
        HermitianOperator {
            matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        }
    }

    pub fn y() -> HermitianOperator {
        HermitianOperator {
            matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)]),
        }
    }

    pub fn z() -> HermitianOperator {
        HermitianOperator {
            matrix: ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
        }
    }

    /// `n · σ`
    pub fn dot(n: [f64; 3]) -> HermitianOperator {
        let m = x().matrix * c(n[0]) + y().matrix * c(n[1]) + z().matrix * c(n[2]);
        HermitianOperator { matrix: m }
    }
}

/// Eigen-decomposition `M = Σ λ_i v_i v_i†` with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> StateVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `V f(Λ) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fj = f(l);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(c)
    }

    /// `exp(-i t M)`
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::from_polar(1.0, -t * l))
    }

    /// Matrix elements of `X` in the eigenbasis, `V† X V`.
    pub fn to_eigenbasis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// Inverse of `to_eigenbasis`, `V X V†`.
    pub fn from_eigenbasis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * x * self.eigenvectors.adjoint()
    }
}

/// Rotates `v` so that its first largest-magnitude component is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let largest = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if largest == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= largest * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Spectral decomposition of a Hermitian operator.
///
/// Eigenvalues come out ascending; equal eigenvalues are ordered
/// lexicographically by their phase-fixed eigenvectors.
pub fn spectral_decompose(h: &HermitianOperator) -> SpectralDecomposition {
    let n = h.dim();
    let eig = h.matrix.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|j| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(j).iter().copied().collect();
            fix_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lexicographic(&a.1, &b.1)));

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (j, (l, v)) in pairs.into_iter().enumerate() {
        eigenvalues.push(l);
        for (i, z) in v.into_iter().enumerate() {
            eigenvectors[(i, j)] = z;
        }
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `U = exp(-i t H)` through the spectral decomposition of `H`.
pub fn evolve_unitary(h: &HermitianOperator, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("evolution time {t} is not finite")));
    }
    Ok(spectral_decompose(h).unitary(t))
}

/// `A^{×n}(X)`: the n-fold nested commutator `[A, [A, ... [A, X]]]`.
pub fn adjoint_apply(a: &HermitianOperator, x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    check_same_dim(a.matrix(), x)?;
    Ok(nested_commutator(a.matrix(), x, n))
}

/// A density matrix together with its (cached) spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    operator: HermitianOperator,
    spectrum: SpectralDecomposition,
    support_threshold: f64,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let operator = HermitianOperator::with_tolerance(matrix, tol.hermitian)?;
        let trace = operator.matrix().trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::InvalidDensity(format!("trace {trace} differs from one")));
        }
        let spectrum = spectral_decompose(&operator);
        let smallest = spectrum.eigenvalues[0];
        if smallest < -tol.positivity {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(Self {
            operator,
            spectrum,
            support_threshold: tol.support,
        })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        check_normalized(psi, Tolerances::default().normalization)?;
        Self::new(psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        Self::new(ComplexMatrix::identity(dim, dim).map(|z| z / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Relative threshold; see [`DensityMatrix::support_cutoff`].
    pub fn support_threshold(&self) -> f64 {
        self.support_threshold
    }

    pub fn with_support_threshold(mut self, threshold: f64) -> Self {
        self.support_threshold = threshold;
        self
    }

    /// Absolute eigenvalue cutoff: `support_threshold · max p_i`.
    pub fn support_cutoff(&self) -> f64 {
        let largest = self.spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        self.support_threshold * largest
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|p| p * p).sum()
    }
}

pub(crate) fn check_normalized(psi: &StateVector, tol: f64) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol || psi.is_empty() {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Qubit Bloch vector `r` with `|r| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let length = norm3(r);
        if !length.is_finite() || length > 1.0 + Tolerances::default().bloch {
            return Err(Error::BlochOutOfRange { length });
        }
        Ok(Self(r))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn length(&self) -> f64 {
        norm3(self.0)
    }

    pub fn dot(&self, n: [f64; 3]) -> f64 {
        dot3(self.0, n)
    }
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// `r_i = Tr(ρ σ_i)`
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let m = rho.matrix();
    let r = [
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ];
    BlochVector::new(r)
}

/// `ρ = 𝟙/2 + (r · σ)/2`
pub fn density_from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    let m = (ComplexMatrix::identity(2, 2) + pauli::dot(r.0).into_matrix()).map(|z| z * 0.5);
    DensityMatrix::new(m)
}
