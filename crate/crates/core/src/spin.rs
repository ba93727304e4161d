//! Collective spin `j` in a magnetic field, `H = B (cos θ J_x + sin θ J_z)`.
//!
//! Exact generators and Fisher information for `B` and `θ`, the thermal
//! qubit, and the rings of optimal Bloch vectors. The spin-`j` operators act
//! on the `(2j+1)`-dimensional symmetric representation with basis order
//! `m = j, j-1, ..., -j`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fisher::{ExponentialState, Flavor, QfiMatrix};
use crate::generator::{HamiltonianFamily, Params, TIME};
use crate::operator::{
    c, cross3, dot3, max_norm, norm3, BlochVector, ComplexMatrix, DensityMatrix, HermitianOperator,
    StateVector,
};

pub const FIELD: &str = "B";
pub const ANGLE: &str = "theta";

/// Below this `|sin(Bt/2)|` the θ-generator is treated as zero.
const DEGENERATE: f64 = 1e-12;

/// Default number of sample points on an optimal-state ring.
pub const RING_POINTS: usize = 32;

/// Spin size, field amplitude, field angle and evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    /// `2j`, a positive integer.
    pub two_j: u32,
    pub b: f64,
    pub theta: f64,
    pub t: f64,
}

impl SpinParams {
    pub fn new(two_j: u32, b: f64, theta: f64, t: f64) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidArgument("spin j must be positive".into()));
        }
        if ![b, theta, t].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { two_j, b, theta, t })
    }

    /// Spin one-half.
    pub fn qubit(b: f64, theta: f64, t: f64) -> Result<Self> {
        Self::new(1, b, theta, t)
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// `B t / 2`
    pub fn half_phase(&self) -> f64 {
        0.5 * self.b * self.t
    }

    /// Backend parameter map with entries `B`, `theta` and `t`.
    pub fn params(&self) -> Params {
        Params::new()
            .with(FIELD, self.b)
            .with(ANGLE, self.theta)
            .with(TIME, self.t)
    }
}

/// The directions `n₀`, `n₀'`, `n₁` and `n₂ = n₀ × n₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionVectors {
    pub n0: [f64; 3],
    pub n0_prime: [f64; 3],
    /// `None` when `sin(Bt/2)` vanishes.
    pub n1: Option<[f64; 3]>,
    pub n2: Option<[f64; 3]>,
    /// `sgn(sin(Bt/2))`, zero in the degenerate case.
    pub mu: i8,
}

impl DirectionVectors {
    pub fn new(p: &SpinParams) -> Self {
        let (st, ct) = p.theta.sin_cos();
        let (s, c) = p.half_phase().sin_cos();
        let n0 = [ct, 0.0, st];
        let n0_prime = [-st, 0.0, ct];
        let mu: i8 = if s.abs() <= DEGENERATE {
            0
        } else if s > 0.0 {
            1
        } else {
            -1
        };
        let (n1, n2) = if mu == 0 {
            (None, None)
        } else {
            let m = mu as f64;
            let n1 = [m * c * st, -m * s, -m * c * ct];
            (Some(n1), Some(cross3(n0, n1)))
        };
        Self {
            n0,
            n0_prime,
            n1,
            n2,
            mu,
        }
    }
}

/// `(J_x, J_y, J_z)` for spin `j = two_j / 2`.
pub fn collective_spin_operators(two_j: u32) -> Result<[HermitianOperator; 3]> {
    if two_j == 0 {
        return Err(Error::InvalidArgument("spin j must be positive".into()));
    }
    let n = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m = |k: usize| j - k as f64;
    let mut raise = ComplexMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let mk = m(k + 1);
        raise[(k, k + 1)] = c((j * (j + 1.0) - mk * (mk + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let jx = (&raise + &lower).map(|z| z * 0.5);
    let jy = (&raise - &lower).map(|z| z * Complex64::new(0.0, -0.5));
    let jz = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| c(m(k))));
    Ok([
        HermitianOperator::hermitized(&jx)?,
        HermitianOperator::hermitized(&jy)?,
        HermitianOperator::hermitized(&jz)?,
    ])
}

/// `H = B J_{n₀}` with parameters `B`, `theta` and time `t`.
#[derive(Debug, Clone)]
pub struct SpinFamily {
    two_j: u32,
    ops: [HermitianOperator; 3],
}

impl SpinFamily {
    pub fn new(two_j: u32) -> Result<Self> {
        Ok(Self {
            two_j,
            ops: collective_spin_operators(two_j)?,
        })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    /// `n · J`
    pub fn along(&self, n: [f64; 3]) -> HermitianOperator {
        let [x, y, z] = &self.ops;
        &(&x.scale(n[0]) + &y.scale(n[1])) + &z.scale(n[2])
    }
}

impl HamiltonianFamily for SpinFamily {
    fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    fn hamiltonian(&self, params: &Params) -> Result<HermitianOperator> {
        let b = params.get(FIELD)?;
        let theta = params.get(ANGLE)?;
        Ok(self.along([theta.cos(), 0.0, theta.sin()]).scale(b))
    }

    fn derivative(&self, params: &Params, param: &str) -> Result<HermitianOperator> {
        let b = params.get(FIELD)?;
        let theta = params.get(ANGLE)?;
        match param {
            FIELD => Ok(self.along([theta.cos(), 0.0, theta.sin()])),
            ANGLE => Ok(self.along([-theta.sin(), 0.0, theta.cos()]).scale(b)),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

/// The family for `p` together with its parameter map.
pub fn spin_hamiltonian_family(p: &SpinParams) -> Result<(SpinFamily, Params)> {
    Ok((SpinFamily::new(p.two_j)?, p.params()))
}

/// `𝓗_θ = 2|sin(Bt/2)| J_{n₁}`, cross-checked against
/// `[cos(Bt) - 1] J_y - sin(Bt) J_{n₀'}`.
pub fn h_analytic_theta(p: &SpinParams) -> Result<HermitianOperator> {
    let fam = SpinFamily::new(p.two_j)?;
    let dirs = DirectionVectors::new(p);
    let bt = p.b * p.t;
    let expanded = &fam.along([0.0, bt.cos() - 1.0, 0.0]) - &fam.along(dirs.n0_prime).scale(bt.sin());
    let Some(n1) = dirs.n1 else {
        return Ok(HermitianOperator::zeros(p.dim()));
    };
    let compact = fam.along(n1).scale(2.0 * p.half_phase().sin().abs());
    let gap = max_norm(&(compact.matrix() - expanded.matrix()));
    if gap > 1e-12 * p.j().max(1.0) {
        return Err(Error::Inconsistent(format!("θ-generator forms differ by {gap:e}")));
    }
    Ok(compact)
}

/// `𝓗_B = -t J_{n₀}`.
pub fn h_analytic_b(p: &SpinParams) -> Result<HermitianOperator> {
    let fam = SpinFamily::new(p.two_j)?;
    Ok(fam.along(DirectionVectors::new(p).n0).scale(-p.t))
}

fn unit_direction(r_e: &BlochVector) -> Result<[f64; 3]> {
    let len = r_e.length();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "eigenstate Bloch vector must be a unit vector, length {len}"
        )));
    }
    Ok(r_e.components())
}

/// `F_θ = 4 sin²(Bt/2) |r_in|² [1 - (n₁·r_e)²]` for a qubit with Bloch vector
/// `r_in` and eigenstate direction `r_e`.
pub fn qfi_theta_qubit(r_in: &BlochVector, r_e: &BlochVector, p: &SpinParams) -> Result<f64> {
    let e = unit_direction(r_e)?;
    let Some(n1) = DirectionVectors::new(p).n1 else {
        return Ok(0.0);
    };
    let s = p.half_phase().sin();
    let proj = dot3(n1, e);
    Ok(4.0 * s * s * r_in.length().powi(2) * (1.0 - proj * proj))
}

/// `F_B = t² |r_in|² [1 - (n₀·r_e)²]`.
pub fn qfi_b_qubit(r_in: &BlochVector, r_e: &BlochVector, p: &SpinParams) -> Result<f64> {
    let e = unit_direction(r_e)?;
    let proj = dot3(DirectionVectors::new(p).n0, e);
    Ok(p.t * p.t * r_in.length().powi(2) * (1.0 - proj * proj))
}

/// `ln(2 cosh β)` without overflow.
fn ln_partition(beta: f64) -> f64 {
    let a = beta.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `ρ₀ = exp(-β σ_z)/Z` with `Z = 2 cosh β`, and its exponential form
/// `G₀ = -β σ_z - ln Z`.
pub fn thermal_qubit(beta: f64) -> Result<(DensityMatrix, ExponentialState)> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature {beta} must be finite and >= 0")));
    }
    let ln_z = ln_partition(beta);
    let g0 = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(-beta - ln_z),
        c(beta - ln_z),
    ]));
    let state = ExponentialState::new(HermitianOperator::hermitized(&g0)?)?;
    let tanh = beta.tanh();
    let rho = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(0.5 * (1.0 - tanh)),
        c(0.5 * (1.0 + tanh)),
    ]));
    Ok((DensityMatrix::new(rho)?, state))
}

/// `F_T = 4 tanh²β sin²(Bt/2) [1 - cos²θ cos²(Bt/2)]` for the thermal qubit.
pub fn qfi_thermal(beta: f64, p: &SpinParams) -> Result<f64> {
    if p.two_j != 1 {
        return Err(Error::NotQubit(p.dim()));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature {beta} must be finite and >= 0")));
    }
    let (s, c) = p.half_phase().sin_cos();
    let ct = p.theta.cos();
    Ok(4.0 * beta.tanh().powi(2) * s * s * (1.0 - ct * ct * c * c))
}

/// Pure-state `(B, θ)` Fisher matrix
/// `[[t²(1-(n₀·r)²), 2t|s|(n₀·r)(n₁·r)], [·, 4s²(1-(n₁·r)²)]]`, `s = sin(Bt/2)`.
pub fn qfi_matrix_qubit_btheta(r_in: &BlochVector, p: &SpinParams) -> Result<QfiMatrix> {
    let r = unit_direction(r_in)
        .map_err(|_| Error::InvalidArgument("closed-form (B, θ) matrix requires a pure state".into()))?;
    let dirs = DirectionVectors::new(p);
    let s = p.half_phase().sin();
    let r0 = dot3(dirs.n0, r);
    let r1 = dirs.n1.map_or(0.0, |n1| dot3(n1, r));
    let fbb = p.t * p.t * (1.0 - r0 * r0);
    let ftt = 4.0 * s * s * (1.0 - r1 * r1);
    let fbt = 2.0 * p.t * s.abs() * r0 * r1;
    let entries = nalgebra::DMatrix::from_row_slice(2, 2, &[c(fbb), c(fbt), c(fbt), c(ftt)]);
    QfiMatrix::new(vec![FIELD.into(), ANGLE.into()], entries, Flavor::Sld)
}

/// Which field parameter is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatedParam {
    B,
    Theta,
}

impl EstimatedParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::B => FIELD,
            Self::Theta => ANGLE,
        }
    }
}

/// A great circle of pure Bloch vectors orthogonal to `axis`, all reaching
/// the maximal Fisher information.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalRing {
    pub param: EstimatedParam,
    pub axis: [f64; 3],
    pub points: Vec<[f64; 3]>,
    /// Fisher information at each point.
    pub qfi: Vec<f64>,
    pub qfi_max: f64,
}

/// Samples `k` equally spaced points `cos φ e₁ + sin φ e₂` of the optimal ring:
/// axis `n₁` with `e₁ = n₀`, `e₂ = n₂` for θ; axis `n₀` with `e₁ = ŷ`,
/// `e₂ = n₀ × ŷ` for B.
pub fn optimal_state_ring(p: &SpinParams, param: EstimatedParam, k: usize) -> Result<OptimalRing> {
    if k == 0 {
        return Err(Error::InvalidArgument("ring needs at least one point".into()));
    }
    let dirs = DirectionVectors::new(p);
    let (axis, e1, e2, qfi_max) = match param {
        EstimatedParam::Theta => {
            let (Some(n1), Some(n2)) = (dirs.n1, dirs.n2) else {
                return Err(Error::DegenerateEvolution(format!(
                    "sin(Bt/2) = 0 at Bt = {}, the θ-generator vanishes",
                    p.b * p.t
                )));
            };
            let s = p.half_phase().sin();
            (n1, dirs.n0, n2, 4.0 * s * s)
        }
        EstimatedParam::B => {
            let y = [0.0, 1.0, 0.0];
            (dirs.n0, y, cross3(dirs.n0, y), p.t * p.t)
        }
    };
    let mut points = Vec::with_capacity(k);
    let mut qfi = Vec::with_capacity(k);
    for i in 0..k {
        let phi = 2.0 * PI * i as f64 / k as f64;
        let (sp, cp) = phi.sin_cos();
        let r = [0, 1, 2].map(|d| cp * e1[d] + sp * e2[d]);
        let r = r.map(|x| x / norm3(r));
        let bloch = BlochVector::new(r)?;
        let f = match param {
            EstimatedParam::Theta => qfi_theta_qubit(&bloch, &bloch, p)?,
            EstimatedParam::B => qfi_b_qubit(&bloch, &bloch, p)?,
        };
        points.push(r);
        qfi.push(f);
    }
    Ok(OptimalRing {
        param,
        axis,
        points,
        qfi,
        qfi_max,
    })
}

/// Spin coherent state `e^{-iφJ_z} e^{-iϑJ_y} |j, j⟩` pointing along the
/// unit vector `n = (sin ϑ cos φ, sin ϑ sin φ, cos ϑ)`.
pub fn spin_coherent_state(two_j: u32, n: [f64; 3]) -> Result<StateVector> {
    let len = norm3(n);
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector, length {len}")));
    }
    let [_, jy, jz] = collective_spin_operators(two_j)?;
    let polar = n[2].clamp(-1.0, 1.0).acos();
    let azimuth = n[1].atan2(n[0]);
    let dim = two_j as usize + 1;
    let mut top = StateVector::zeros(dim);
    top[0] = c(1.0);
    let ry = crate::evolve_unitary(&jy, polar)?;
    let rz = crate::evolve_unitary(&jz, azimuth)?;
    Ok(rz * ry * top)
}
