use num_complex::Complex64;

use super::{evaluate, Backend, Cycle, Diagnostics, GeneratorResult, HamiltonianFamily, Params};
use crate::error::{Error, Result};
use crate::operator::{commutator, frobenius_inner, max_norm, ComplexMatrix, HermitianOperator, I};
use crate::tolerance::Tolerances;

/// Settings of the nested-commutator expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub max_order: usize,
    /// Truncate at the first term whose max-norm is below this.
    pub tol: f64,
    /// Look for `K_{n+2} = λ K_n` and resum it exactly.
    pub detect_cycles: bool,
    pub cycle_tol: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self {
            max_order: tol.series_max_order,
            tol: tol.series_term,
            detect_cycles: true,
            cycle_tol: tol.cycle,
        }
    }
}

/// `f_n = (it)^{n+1} / (n+1)!`
pub fn series_coefficient(t: f64, n: usize) -> Complex64 {
    let magnitude = (1..=n + 1).fold(1.0, |acc, k| acc * t / k as f64);
    I.powu(n as u32 + 1) * magnitude
}

/// `Σ_{k>=0} z^{p+2k} / (p+2k)!` for `p` in `1..=3`, via hyperbolic functions.
fn parity_tail(z: Complex64, p: usize) -> Complex64 {
    match p {
        1 => z.sinh(),
        2 => z.cosh() - 1.0,
        3 => z.sinh() - z,
        _ => unreachable!("cycle start is 0 or 1"),
    }
}

/// Scalar weights `(Σ_k f_{m+2k} λ^k, Σ_k f_{m+1+2k} λ^k)` of the two cycle
/// matrices `K_m` and `K_{m+1}`.
fn cycle_weights(t: f64, start: usize, ratio: Complex64) -> (Complex64, Complex64) {
    let omega = ratio.sqrt();
    let z = I * t * omega;
    if z.norm() > 1.0 {
        let p = start + 1;
        (
            parity_tail(z, p) / omega.powu(p as u32),
            parity_tail(z, p + 1) / omega.powu(p as u32 + 1),
        )
    } else {
        // Small |z|: plain power series, no cancellation.
        let mut even = Complex64::new(0.0, 0.0);
        let mut odd = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for k in 0..200 {
            let a = series_coefficient(t, start + 2 * k) * power;
            let b = series_coefficient(t, start + 1 + 2 * k) * power;
            even += a;
            odd += b;
            if a.norm() + b.norm() <= 1e-18 * (even.norm() + odd.norm()) {
                break;
            }
            power *= ratio;
        }
        (even, odd)
    }
}

/// Looks for `K_{m+2} = λ K_m` with `m ∈ {0, 1}` among the first four terms.
fn detect_cycle(terms: &[ComplexMatrix], h_norm: f64, rel_tol: f64) -> Option<Cycle> {
    let dim = terms[0].nrows() as f64;
    for start in 0..=1 {
        let a = &terms[start];
        let b = &terms[start + 2];
        let a_norm = max_norm(a);
        if a_norm == 0.0 {
            return Some(Cycle {
                start,
                ratio: Complex64::new(0.0, 0.0),
            });
        }
        let ratio = frobenius_inner(a, b) / frobenius_inner(a, a);
        let residual = max_norm(&(b - a.map(|z| z * ratio)));
        let roundoff = 4.0 * f64::EPSILON * (2.0 * dim * h_norm).powi(2) * a_norm;
        let scale = max_norm(b).max(ratio.norm() * a_norm);
        if residual <= rel_tol * scale + roundoff {
            return Some(Cycle { start, ratio });
        }
    }
    None
}

/// The expansion `i Σ_n f_n H^{×n}(X)` for arbitrary square `H` and `X`.
///
/// With `H` Hermitian and `X = ∂H` this is the generator `𝓗`. The
/// truncation order and the last term are recorded in the diagnostics; if a
/// two-term cycle is detected the infinite tail is summed in closed form.
pub fn generator_series(
    h: &ComplexMatrix,
    dh: &ComplexMatrix,
    t: f64,
    opts: &SeriesOptions,
) -> Result<(ComplexMatrix, Diagnostics)> {
    if opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("series tolerance must be positive".into()));
    }
    let mut diagnostics = Diagnostics::default();

    if opts.detect_cycles {
        let mut terms = vec![dh.clone()];
        for n in 1..4 {
            let next = commutator(h, &terms[n - 1]);
            terms.push(next);
        }
        if let Some(cycle) = detect_cycle(&terms, max_norm(h), opts.cycle_tol) {
            let m = cycle.start;
            let mut sum = ComplexMatrix::zeros(h.nrows(), h.ncols());
            for (n, k) in terms.iter().enumerate().take(m) {
                sum += k.map(|z| z * series_coefficient(t, n));
            }
            let (w0, w1) = cycle_weights(t, m, cycle.ratio);
            sum += terms[m].map(|z| z * w0) + terms[m + 1].map(|z| z * w1);
            diagnostics.order = Some(m + 1);
            diagnostics.cycle = Some(cycle);
            return Ok((sum.map(|z| z * I), diagnostics));
        }
    }

    let mut sum = ComplexMatrix::zeros(h.nrows(), h.ncols());
    let mut k = dh.clone();
    let mut last = f64::INFINITY;
    for n in 0..=opts.max_order {
        let term = k.map(|z| z * I * series_coefficient(t, n));
        last = max_norm(&term);
        sum += term;
        if last < opts.tol {
            diagnostics.order = Some(n);
            diagnostics.last_term_norm = Some(last);
            return Ok((sum, diagnostics));
        }
        k = commutator(h, &k);
    }
    Err(Error::NonConvergence {
        method: "generator series",
        residual: last,
    })
}

/// Series backend: `𝓗 = i Σ_{n=0}^{N} f_n H^{×n}(∂H)`.
pub fn h_via_series(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
    max_order: usize,
    tol: f64,
) -> Result<GeneratorResult> {
    let (h, dh, t) = evaluate(fam, params, param)?;
    let opts = SeriesOptions {
        max_order,
        tol,
        ..SeriesOptions::default()
    };
    let (m, diagnostics) = generator_series(h.matrix(), dh.matrix(), t, &opts)?;
    Ok(GeneratorResult {
        h: HermitianOperator::with_tolerance(m, 1e-10)?,
        backend: Backend::Series,
        diagnostics,
    })
}
