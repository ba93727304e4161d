use super::{evaluate, Backend, Diagnostics, GeneratorResult, HamiltonianFamily, Params};
use crate::error::{Error, Result};
use crate::operator::{evolve_unitary, hermitian_part, max_norm, HermitianOperator, I};

/// Numerical oracle for the definition `𝓗 = i(∂U†)U`: a central difference
/// of `U†` right-multiplied by `U` and then Hermitized.
///
/// The anti-Hermitian part of the raw estimate is reported as the residual;
/// when it exceeds `10 · step² · scale`, with
/// `scale = (1 + |t|(‖H‖_F + ‖∂H‖_F))³`, a warning is attached.
pub fn h_via_finite_difference(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
    step: f64,
) -> Result<GeneratorResult> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!("finite-difference step {step} must be positive")));
    }
    let (h, dh, t) = evaluate(fam, params, param)?;
    let h_plus = fam.hamiltonian(&params.shifted(param, step)?)?;
    let h_minus = fam.hamiltonian(&params.shifted(param, -step)?)?;

    let u = evolve_unitary(&h, t)?;
    let u_dag_plus = evolve_unitary(&h_plus, t)?.adjoint();
    let u_dag_minus = evolve_unitary(&h_minus, t)?.adjoint();
    let raw = ((u_dag_plus - u_dag_minus) * u).map(|z| z * I / (2.0 * step));

    let residual = max_norm(&(&raw - raw.adjoint())) * 0.5;
    let scale = (1.0 + t.abs() * (h.matrix().norm() + dh.matrix().norm())).powi(3);
    let bound = 10.0 * step * step * scale;
    let warning = (residual > bound).then(|| {
        format!("anti-Hermitian residual {residual:e} exceeds {bound:e}")
    });

    Ok(GeneratorResult {
        h: HermitianOperator::hermitized(&hermitian_part(&raw))?,
        backend: Backend::FiniteDifference,
        diagnostics: Diagnostics {
            residual: Some(residual),
            warning,
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{h_via_series, PolynomialFamily};
    use crate::operator::pauli;

    #[test]
    fn commuting_family() {
        let fam = PolynomialFamily::new("a", vec![HermitianOperator::zeros(2), pauli::z()]).unwrap();
        let p = Params::new().with("a", 0.9).with("t", 1.0);
        let r = h_via_finite_difference(&fam, &p, "a", 1e-5).unwrap();
        assert!(max_norm(&(r.h.matrix() + pauli::z().matrix())) < 1e-9);
        assert!(r.diagnostics.warning.is_none());
    }

    #[test]
    fn non_commuting_matches_series() {
        let fam = PolynomialFamily::new("a", vec![pauli::y().scale(0.3), pauli::x(), pauli::z().scale(0.2)])
            .unwrap();
        let p = Params::new().with("a", 0.7).with("t", 1.2);
        let fd = h_via_finite_difference(&fam, &p, "a", 1e-5).unwrap();
        let series = h_via_series(&fam, &p, "a", 64, 1e-12).unwrap();
        assert!(max_norm(&(fd.h.matrix() - series.h.matrix())) < 1e-8);
    }

    #[test]
    fn rejects_bad_step() {
        let fam = PolynomialFamily::new("a", vec![pauli::z()]).unwrap();
        let p = Params::new().with("a", 0.0).with("t", 1.0);
        assert!(h_via_finite_difference(&fam, &p, "a", 0.0).is_err());
        assert!(h_via_finite_difference(&fam, &p, "a", f64::NAN).is_err());
    }
}
