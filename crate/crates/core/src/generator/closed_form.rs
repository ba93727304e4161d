use num_complex::Complex64;

use super::{evaluate, Backend, Diagnostics, GeneratorResult, HamiltonianFamily, Params};
use crate::error::Result;
use crate::operator::{commutator, frobenius_inner, hermitian_deviation, max_norm, ComplexMatrix, HermitianOperator, I};
use crate::tolerance::Tolerances;

/// Commutator structure that admits an exact generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCase {
    /// `[H, ∂H] = 0`: `𝓗 = -t ∂H`.
    Commuting,
    /// `[H, ∂H] = C` with `[H, C] = 0`: `𝓗 = -t(∂H + itC/2)`.
    CentralCommutator,
    /// `[H, ∂H] = c ∂H`, real `c ≠ 0`: `𝓗 = (i/c)(e^{itc} - 1) ∂H`.
    EigenCommutator { c: f64 },
}

/// Detects which commutator case `(H, X)` falls into and evaluates the exact
/// generator. Works for arbitrary square matrices; `None` when no case
/// matches within `tol`.
///
/// For Hermitian `H` and `X` the eigen-commutator case only arises with
/// `X = 0` (the adjoint action of a Hermitian operator has real spectrum and
/// `Tr(X[H, X]) = 0`), so it is reachable through non-Hermitian pairs such as
/// ladder operators.
pub fn closed_form_generator(
    h: &ComplexMatrix,
    dh: &ComplexMatrix,
    t: f64,
    tol: f64,
) -> Option<(ComplexMatrix, ClosedFormCase)> {
    let dim = h.nrows() as f64;
    let h_norm = max_norm(h);
    let x_norm = max_norm(dh);
    let comm = commutator(h, dh);
    let c_norm = max_norm(&comm);

    if c_norm <= tol * (1.0 + 2.0 * dim * h_norm * x_norm) {
        return Some((dh.map(|z| z * -t), ClosedFormCase::Commuting));
    }

    let nested = commutator(h, &comm);
    if max_norm(&nested) <= tol * (1.0 + 2.0 * dim * h_norm * c_norm) {
        let m = (dh + comm.map(|z| z * I * t * 0.5)).map(|z| z * -t);
        return Some((m, ClosedFormCase::CentralCommutator));
    }

    let xx = frobenius_inner(dh, dh);
    if xx.norm() > 0.0 {
        let c: Complex64 = frobenius_inner(dh, &comm) / xx;
        let residual = max_norm(&(&comm - dh.map(|z| z * c)));
        let real = c.im.abs() <= tol * (1.0 + c.norm());
        if real && c.re.abs() > tol && residual <= tol * (1.0 + 2.0 * dim * h_norm * x_norm) {
            let c = c.re;
            let factor = I / c * ((I * t * c).exp() - 1.0);
            return Some((dh.map(|z| z * factor), ClosedFormCase::EigenCommutator { c }));
        }
    }
    None
}

/// Closed-form backend. `Ok(None)` means not applicable: no commutator case
/// matched, or the formula did not produce a Hermitian operator.
pub fn h_closed_form(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
) -> Result<Option<GeneratorResult>> {
    let (h, dh, t) = evaluate(fam, params, param)?;
    let tol = Tolerances::default().closed_form;
    let Some((m, case)) = closed_form_generator(h.matrix(), dh.matrix(), t, tol) else {
        return Ok(None);
    };
    if hermitian_deviation(&m) > tol * (1.0 + max_norm(&m)) {
        return Ok(None);
    }
    Ok(Some(GeneratorResult {
        h: HermitianOperator::hermitized(&m)?,
        backend: Backend::ClosedForm,
        diagnostics: Diagnostics {
            closed_form_case: Some(case),
            ..Diagnostics::default()
        },
    }))
}
