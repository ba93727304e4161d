use std::f64::consts::PI;

use super::{evaluate, Backend, Diagnostics, GeneratorResult, HamiltonianFamily, Params};
use crate::error::{Error, Result};
use crate::operator::{max_norm, spectral_decompose, ComplexMatrix, HermitianOperator, SpectralDecomposition};
use crate::tolerance::Tolerances;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    rule
}

/// `-∫_0^t e^{isH} X e^{-isH} ds` with an `n`-node Gauss-Legendre rule.
fn integrate(spectrum: &SpectralDecomposition, dh: &ComplexMatrix, t: f64, n: usize) -> ComplexMatrix {
    let half = 0.5 * t;
    let mut acc = ComplexMatrix::zeros(dh.nrows(), dh.ncols());
    for (x, w) in gauss_legendre(n) {
        let s = half * (x + 1.0);
        // e^{isH} = exp(-i(-s)H)
        let u = spectrum.unitary(-s);
        acc += (&u * dh * u.adjoint()).map(|z| z * w);
    }
    acc.map(|z| -z * half)
}

/// Adaptive Gauss-Legendre integration of the generator: the node count
/// doubles from `nodes` until two successive estimates differ by less than
/// `tol` (max-norm) or `max_nodes` is exceeded.
pub fn generator_quadrature(
    h: &HermitianOperator,
    dh: &ComplexMatrix,
    t: f64,
    nodes: usize,
    max_nodes: usize,
    tol: f64,
) -> Result<(ComplexMatrix, Diagnostics)> {
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 2 nodes, got {nodes}"
        )));
    }
    let spectrum = spectral_decompose(h);
    let mut n = nodes;
    let mut estimate = integrate(&spectrum, dh, t, n);
    let mut residual = f64::INFINITY;
    while 2 * n <= max_nodes.max(2 * nodes) {
        let refined = integrate(&spectrum, dh, t, 2 * n);
        residual = max_norm(&(&refined - &estimate));
        n *= 2;
        estimate = refined;
        if residual < tol {
            let diagnostics = Diagnostics {
                nodes: Some(n),
                residual: Some(residual),
                ..Diagnostics::default()
            };
            return Ok((estimate, diagnostics));
        }
    }
    Err(Error::NonConvergence {
        method: "generator quadrature",
        residual,
    })
}

/// Quadrature backend with the default node cap and convergence threshold.
pub fn h_via_quadrature(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
    nodes: usize,
) -> Result<GeneratorResult> {
    let (h, dh, t) = evaluate(fam, params, param)?;
    let tol = Tolerances::default();
    let (m, diagnostics) = generator_quadrature(
        &h,
        dh.matrix(),
        t,
        nodes,
        tol.quadrature_max_nodes,
        tol.quadrature,
    )?;
    Ok(GeneratorResult {
        h: HermitianOperator::with_tolerance(m, 1e-10)?,
        backend: Backend::Quadrature,
        diagnostics,
    })
}
