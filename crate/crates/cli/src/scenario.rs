//! Turning a [`ScenarioConfig`] into a grid of Fisher-information values.

use std::collections::BTreeSet;

use qfikit::fisher::{cr_achievable_pure, qfi_matrix_pure, qfi_mixed, qfi_pure};
use qfikit::generator::{compute_generator, Backend, HamiltonianFamily, Params, PolynomialFamily, TIME};
use qfikit::operator::norm3;
use qfikit::spin::{spin_coherent_state, thermal_qubit, DirectionVectors, SpinFamily, SpinParams, ANGLE, FIELD};
use qfikit::{density_from_bloch, BlochVector, Complex64, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector, Tolerances};
use serde::{Deserialize, Serialize};

use crate::config::{BaseParams, CustomSpec, CustomState, MatrixSpec, Model, ScenarioConfig, StateSpec};
use crate::error::{CliError, Result};

/// Name of the custom family parameter.
pub const CUSTOM_PARAM: &str = "alpha";

/// Where a table came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    /// Backends that produced at least one generator, in request order.
    pub backends: Vec<String>,
    pub series_tolerance: f64,
    pub quadrature_tolerance: f64,
}

/// A rectangular table: swept axes first, then computed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl SweepResult {
    /// Values of `column` in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// One grid point: the swept values and the full parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub axes: Vec<f64>,
    pub params: BaseParams,
}

/// Row-major grid, first sweep outermost.
pub fn grid(cfg: &ScenarioConfig) -> Result<Vec<GridPoint>> {
    let mut points = vec![GridPoint {
        axes: Vec::new(),
        params: cfg.params,
    }];
    for sweep in &cfg.sweeps {
        let mut next = Vec::with_capacity(points.len() * sweep.steps);
        for p in &points {
            for k in 0..sweep.steps {
                let v = sweep.value(k);
                let mut gp = p.clone();
                gp.axes.push(v);
                apply(&mut gp.params, &sweep.name, v)?;
                next.push(gp);
            }
        }
        points = next;
    }
    Ok(points)
}

fn apply(p: &mut BaseParams, name: &str, v: f64) -> Result<()> {
    match name {
        "B" => p.b = v,
        "theta" => p.theta = v,
        "t" => p.t = v,
        "alpha" => p.alpha = v,
        "beta" => {
            if v < 0.0 {
                return Err(CliError::Validation(format!("inverse temperature {v} is negative")));
            }
            p.beta = v;
        }
        "Bt" => {
            if p.b == 0.0 {
                return Err(CliError::Validation("sweeping Bt needs a nonzero params.B".into()));
            }
            p.t = v / p.b;
        }
        other => return Err(CliError::Validation(format!("cannot sweep `{other}`"))),
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

/// Family, parameters, state and estimated parameters at one grid point.
pub struct Problem {
    pub family: Box<dyn HamiltonianFamily>,
    pub params: Params,
    pub state: InitialState,
    pub estimated: Vec<&'static str>,
}

fn spin_state(spec: StateSpec, p: &SpinParams) -> Result<InitialState> {
    let dirs = DirectionVectors::new(p);
    let degenerate = |which: &str| {
        CliError::Library(qfikit::Error::DegenerateEvolution(format!(
            "state {which} is undefined at Bt = {}",
            p.b * p.t
        )))
    };
    let r = match spec {
        StateSpec::N0 => dirs.n0,
        StateSpec::N0Prime => dirs.n0_prime,
        StateSpec::N1 => dirs.n1.ok_or_else(|| degenerate("n1"))?,
        StateSpec::N2 => dirs.n2.ok_or_else(|| degenerate("n2"))?,
        StateSpec::X => [1.0, 0.0, 0.0],
        StateSpec::Y => [0.0, 1.0, 0.0],
        StateSpec::Z => [0.0, 0.0, 1.0],
        StateSpec::Bloch(r) => r,
    };
    let len = norm3(r);
    if (len - 1.0).abs() <= 1e-12 {
        return Ok(InitialState::Pure(spin_coherent_state(p.two_j, r.map(|x| x / len))?));
    }
    if p.two_j != 1 {
        return Err(CliError::Validation(
            "mixed Bloch states need j = 1/2; use a unit vector for larger spins".into(),
        ));
    }
    Ok(InitialState::Mixed(density_from_bloch(&BlochVector::new(r)?)?))
}

fn complex_matrix(spec: &MatrixSpec, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if spec.re.is_empty() && spec.im.is_none() {
        return Ok(ComplexMatrix::zeros(dim, dim));
    }
    let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == dim && rows.iter().all(|r| r.len() == dim);
    if !shape_ok(&spec.re) || spec.im.as_ref().is_some_and(|im| !shape_ok(im)) {
        return Err(CliError::Validation(format!("{what} must be {dim}x{dim}")));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        let im = spec.im.as_ref().map_or(0.0, |m| m[i][j]);
        Complex64::new(spec.re[i][j], im)
    }))
}

fn custom_parts(spec: &CustomSpec) -> Result<(PolynomialFamily, InitialState)> {
    let dim = spec.coefficients[0].re.len();
    if dim == 0 {
        return Err(CliError::Validation("custom.h0 is empty".into()));
    }
    let coefficients = spec
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, m)| Ok(HermitianOperator::new(complex_matrix(m, dim, &format!("custom.h{k}"))?)?))
        .collect::<Result<Vec<_>>>()?;
    let family = PolynomialFamily::new(CUSTOM_PARAM, coefficients)?;
    let state = match &spec.state {
        CustomState::Pure { re, im } => {
            if re.len() != dim || im.as_ref().is_some_and(|v| v.len() != dim) {
                return Err(CliError::Validation(format!("custom.psi must have {dim} entries")));
            }
            let psi = StateVector::from_fn(dim, |i, _| {
                Complex64::new(re[i], im.as_ref().map_or(0.0, |v| v[i]))
            });
            let norm = psi.norm();
            if (norm - 1.0).abs() > Tolerances::default().normalization {
                return Err(CliError::Library(qfikit::Error::NotNormalized { norm }));
            }
            InitialState::Pure(psi)
        }
        CustomState::Mixed(m) => InitialState::Mixed(DensityMatrix::new(complex_matrix(m, dim, "custom.rho")?)?),
    };
    Ok((family, state))
}

/// Builds the estimation problem at one parameter point.
pub fn problem(cfg: &ScenarioConfig, p: &BaseParams) -> Result<Problem> {
    if cfg.model == Model::CustomMatrix {
        let spec = cfg
            .custom
            .as_ref()
            .ok_or_else(|| CliError::Validation("custom_matrix needs custom.* keys".into()))?;
        let (family, state) = custom_parts(spec)?;
        return Ok(Problem {
            family: Box::new(family),
            params: Params::new().with(CUSTOM_PARAM, p.alpha).with(TIME, p.t),
            state,
            estimated: vec![CUSTOM_PARAM],
        });
    }
    let sp = SpinParams::new(p.two_j, p.b, p.theta, p.t)?;
    let family = Box::new(SpinFamily::new(sp.two_j)?);
    let (state, estimated) = match cfg.model {
        Model::SpinTheta => (spin_state(cfg.state, &sp)?, vec![ANGLE]),
        Model::SpinB => (spin_state(cfg.state, &sp)?, vec![FIELD]),
        Model::TwoParam => {
            let state = spin_state(cfg.state, &sp)?;
            if !matches!(state, InitialState::Pure(_)) {
                return Err(CliError::Validation("two_param needs a pure initial state".into()));
            }
            (state, vec![FIELD, ANGLE])
        }
        Model::Thermal => {
            if sp.two_j != 1 {
                return Err(CliError::Validation("thermal model is defined for j = 1/2".into()));
            }
            (InitialState::Mixed(thermal_qubit(p.beta)?.0), vec![ANGLE])
        }
        Model::CustomMatrix => unreachable!(),
    };
    Ok(Problem {
        family,
        params: sp.params(),
        state,
        estimated,
    })
}

/// First applicable backend in `backends` (closed form may not apply).
pub fn first_generator(prob: &Problem, param: &str, backends: &[Backend]) -> Result<(HermitianOperator, Backend)> {
    for &b in backends {
        if let Some(res) = compute_generator(b, prob.family.as_ref(), &prob.params, param)? {
            return Ok((res.h, b));
        }
    }
    Err(CliError::Validation(format!(
        "no requested backend applies to `{param}` (closed_form is NotApplicable here)"
    )))
}

/// Names of the value columns for a model.
pub fn value_columns(model: Model) -> Vec<String> {
    match model {
        Model::TwoParam => ["F_BB", "F_Btheta", "F_thetatheta", "det", "achievable"]
            .map(String::from)
            .to_vec(),
        _ => vec!["F".into()],
    }
}

/// Values at one point; also reports the backends used.
pub fn evaluate(cfg: &ScenarioConfig, p: &BaseParams, used: &mut BTreeSet<Backend>) -> Result<Vec<f64>> {
    let prob = problem(cfg, p)?;
    let mut gens = Vec::with_capacity(prob.estimated.len());
    for name in &prob.estimated {
        let (h, b) = first_generator(&prob, name, &cfg.backends)?;
        used.insert(b);
        gens.push((*name, h));
    }
    let values = match (&prob.state, cfg.model) {
        (InitialState::Pure(psi), Model::TwoParam) => {
            let hs: Vec<(&str, &HermitianOperator)> = gens.iter().map(|(n, h)| (*n, h)).collect();
            let m = qfi_matrix_pure(psi, &hs)?;
            let ach = cr_achievable_pure(psi, &hs)?;
            vec![
                m.get(0, 0),
                m.get(0, 1),
                m.get(1, 1),
                m.determinant(),
                if ach.achievable { 1.0 } else { 0.0 },
            ]
        }
        (InitialState::Pure(psi), _) => vec![qfi_pure(psi, &gens[0].1)?],
        (InitialState::Mixed(rho), _) => vec![qfi_mixed(rho, &gens[0].1)?],
    };
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Validation(format!("non-finite value {bad} at {:?}", p)));
    }
    Ok(values)
}

pub(crate) fn provenance(cfg: &ScenarioConfig, used: &BTreeSet<Backend>) -> Provenance {
    let tol = Tolerances::default();
    Provenance {
        model: cfg.model.name().into(),
        backends: cfg
            .backends
            .iter()
            .filter(|b| used.contains(b))
            .map(|b| b.name().to_string())
            .collect(),
        series_tolerance: tol.series_term,
        quadrature_tolerance: tol.quadrature,
    }
}

/// Evaluates the model over the whole grid. Deterministic.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SweepResult> {
    let axes: Vec<String> = cfg.sweeps.iter().map(|s| s.name.clone()).collect();
    let mut columns = axes.clone();
    columns.extend(value_columns(cfg.model));
    let mut used = BTreeSet::new();
    let mut rows = Vec::new();
    for gp in grid(cfg)? {
        let mut row = gp.axes.clone();
        row.extend(evaluate(cfg, &gp.params, &mut used)?);
        rows.push(row);
    }
    Ok(SweepResult {
        axes,
        columns,
        rows,
        provenance: provenance(cfg, &used),
    })
}
