//! The generator `𝓗 = i(∂_α U†)U` of a unitary parametrization
//! `U = exp(-i t H_α)`.
//!
//! Four independent backends compute `𝓗`:
//!
//! - [`h_via_series`]: the nested-commutator expansion
//!   `𝓗 = i Σ_n f_n H^{×n}(∂H)` with `f_n = (it)^{n+1}/(n+1)!`, including
//!   closed-form resummation of two-term commutator cycles;
//! - [`h_via_quadrature`]: Gauss-Legendre evaluation of
//!   `𝓗 = -∫_0^t e^{isH}(∂H)e^{-isH} ds`;
//! - [`h_closed_form`]: the three commutator cases with exact formulas;
//! - [`h_via_finite_difference`]: the definition itself, differentiated
//!   numerically.
//!
//! The sign convention follows from differentiating `U†`, so a family whose
//! Hamiltonian commutes with its derivative yields `𝓗 = -t ∂H`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{max_norm, HermitianOperator};

mod closed_form;
mod finite_difference;
mod quadrature;
mod series;

pub use closed_form::{closed_form_generator, h_closed_form, ClosedFormCase};
pub use finite_difference::h_via_finite_difference;
pub use quadrature::{gauss_legendre, generator_quadrature, h_via_quadrature};
pub use series::{generator_series, h_via_series, series_coefficient, SeriesOptions};

/// Name of the evolution-time entry in [`Params`].
pub const TIME: &str = "t";

/// Named real parameters of a Hamiltonian family. Always includes the
/// evolution time under [`TIME`] when used by a backend.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.0
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }

    pub fn time(&self) -> Result<f64> {
        self.get(TIME)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Copy with `name` shifted by `delta`.
    pub fn shifted(&self, name: &str, delta: f64) -> Result<Self> {
        let value = self.get(name)?;
        Ok(self.clone().with(name, value + delta))
    }
}

/// A parametrized Hamiltonian `H_α` together with its exact parameter derivatives.
pub trait HamiltonianFamily {
    fn dim(&self) -> usize;

    /// `H_α` at the given parameters.
    fn hamiltonian(&self, params: &Params) -> Result<HermitianOperator>;

    /// `∂_m H_α` for the parameter named `param`.
    fn derivative(&self, params: &Params, param: &str) -> Result<HermitianOperator>;
}

/// `H(α) = Σ_k α^k C_k`, a polynomial family in a single named parameter.
#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    param: String,
    coefficients: Vec<HermitianOperator>,
}

impl PolynomialFamily {
    pub fn new(param: &str, coefficients: Vec<HermitianOperator>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidArgument("polynomial family needs a coefficient".into()))?;
        if param == TIME {
            return Err(Error::InvalidArgument("the evolution time cannot be the family parameter".into()));
        }
        for c in &coefficients {
            if c.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: c.dim(),
                });
            }
        }
        Ok(Self {
            param: param.to_string(),
            coefficients,
        })
    }

    pub fn param(&self) -> &str {
        &self.param
    }
}

impl HamiltonianFamily for PolynomialFamily {
    fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    fn hamiltonian(&self, params: &Params) -> Result<HermitianOperator> {
        let a = params.get(&self.param)?;
        let mut acc = HermitianOperator::zeros(self.dim());
        for c in self.coefficients.iter().rev() {
            acc = &acc.scale(a) + c;
        }
        Ok(acc)
    }

    fn derivative(&self, params: &Params, param: &str) -> Result<HermitianOperator> {
        if param != self.param {
            return Err(Error::UnknownParameter(param.to_string()));
        }
        let a = params.get(&self.param)?;
        let mut acc = HermitianOperator::zeros(self.dim());
        for (k, c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = &acc.scale(a) + &c.scale(k as f64);
        }
        Ok(acc)
    }
}

/// Max-norm gap between `derivative` and a central difference of
/// `hamiltonian` with the given step.
pub fn derivative_discrepancy(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
    step: f64,
) -> Result<f64> {
    let plus = fam.hamiltonian(&params.shifted(param, step)?)?;
    let minus = fam.hamiltonian(&params.shifted(param, -step)?)?;
    let fd = (plus.matrix() - minus.matrix()).map(|z| z / (2.0 * step));
    let exact = fam.derivative(params, param)?;
    Ok(max_norm(&(fd - exact.matrix())))
}

/// Which backend produced a [`GeneratorResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    ClosedForm,
    Series,
    Quadrature,
    FiniteDifference,
}

impl Backend {
    pub const ALL: [Backend; 4] = [
        Backend::ClosedForm,
        Backend::Series,
        Backend::Quadrature,
        Backend::FiniteDifference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Backend::ClosedForm => "closed_form",
            Backend::Series => "series",
            Backend::Quadrature => "quadrature",
            Backend::FiniteDifference => "finite_difference",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown backend `{s}`")))
    }
}

/// A resummed two-term cycle `K_{n+2} = ratio · K_n` for `n >= start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub start: usize,
    pub ratio: Complex64,
}

/// Backend-specific bookkeeping attached to a generator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Series: index of the last term that was summed.
    pub order: Option<usize>,
    /// Series: max-norm of that term.
    pub last_term_norm: Option<f64>,
    /// Series: the detected commutator cycle, if the sum was resummed.
    pub cycle: Option<Cycle>,
    /// Quadrature: node count of the accepted estimate.
    pub nodes: Option<usize>,
    /// Quadrature: gap to the previous estimate. Finite difference:
    /// anti-Hermitian residual before symmetrization.
    pub residual: Option<f64>,
    pub closed_form_case: Option<ClosedFormCase>,
    /// Non-fatal numerical warning.
    pub warning: Option<String>,
}

/// A computed generator together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorResult {
    pub h: HermitianOperator,
    pub backend: Backend,
    pub diagnostics: Diagnostics,
}

/// Evaluates `(H, ∂H, t)` and rejects time as an estimation parameter.
pub(crate) fn evaluate(
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
) -> Result<(HermitianOperator, HermitianOperator, f64)> {
    if param == TIME {
        return Err(Error::InvalidArgument(
            "the evolution time is not an estimable family parameter".into(),
        ));
    }
    let t = params.time()?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("evolution time {t} is not finite")));
    }
    params.get(param)?;
    let h = fam.hamiltonian(params)?;
    let dh = fam.derivative(params, param)?;
    for op in [&h, &dh] {
        if op.dim() != fam.dim() {
            return Err(Error::DimensionMismatch {
                expected: fam.dim(),
                found: op.dim(),
            });
        }
    }
    Ok((h, dh, t))
}

/// Computes the generator with the chosen backend using default settings.
/// `ClosedForm` yields `Ok(None)` when no commutator case applies.
pub fn compute_generator(
    backend: Backend,
    fam: &dyn HamiltonianFamily,
    params: &Params,
    param: &str,
) -> Result<Option<GeneratorResult>> {
    let tol = crate::Tolerances::default();
    match backend {
        Backend::ClosedForm => h_closed_form(fam, params, param),
        Backend::Series => {
            h_via_series(fam, params, param, tol.series_max_order, tol.series_term).map(Some)
        }
        Backend::Quadrature => h_via_quadrature(fam, params, param, tol.quadrature_nodes).map(Some),
        Backend::FiniteDifference => {
            h_via_finite_difference(fam, params, param, tol.fd_step).map(Some)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;

    fn quadratic() -> PolynomialFamily {
        PolynomialFamily::new("a", vec![pauli::z(), pauli::x(), pauli::y().scale(0.5)]).unwrap()
    }

    #[test]
    fn polynomial_family_evaluates() {
        let fam = quadratic();
        let p = Params::new().with("a", 2.0);
        let h = fam.hamiltonian(&p).unwrap();
        let expected = &(&pauli::z() + &pauli::x().scale(2.0)) + &pauli::y().scale(2.0);
        assert!(max_norm(&(h.matrix() - expected.matrix())) < 1e-15);
        let dh = fam.derivative(&p, "a").unwrap();
        let expected = &pauli::x() + &pauli::y().scale(2.0);
        assert!(max_norm(&(dh.matrix() - expected.matrix())) < 1e-15);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let fam = quadratic();
        let p = Params::new().with("a", 0.3);
        assert!(derivative_discrepancy(&fam, &p, "a", 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn unknown_and_time_parameters_are_rejected() {
        let fam = quadratic();
        let p = Params::new().with("a", 0.3).with(TIME, 1.0);
        assert!(matches!(fam.derivative(&p, "b"), Err(Error::UnknownParameter(_))));
        assert!(matches!(evaluate(&fam, &p, TIME), Err(Error::InvalidArgument(_))));
        let no_time = Params::new().with("a", 0.3);
        assert!(matches!(evaluate(&fam, &no_time, "a"), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn backend_names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("simpson".parse::<Backend>().is_err());
    }
}
