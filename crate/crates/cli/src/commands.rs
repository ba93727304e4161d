//! Backend cross-validation, optimal-ring sampling and the built-in self test.

use std::collections::{BTreeMap, BTreeSet};

use qfikit::fisher::{qfi_matrix_pure, qfi_mixed, qfi_pure, rld_matrix_pure};
use qfikit::generator::{compute_generator, Backend};
use qfikit::operator::max_norm;
use qfikit::spin::{optimal_state_ring, spin_coherent_state, DirectionVectors, EstimatedParam, SpinParams};

use crate::config::{Model, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::scenario::{first_generator, grid, problem, provenance, Problem, SweepResult};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const TOLERANCE_ENV: &str = "QFIKIT_TOLERANCE";

/// `QFIKIT_TOLERANCE` if set, else [`DEFAULT_TOLERANCE`].
pub fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(s) => {
            let tol: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{TOLERANCE_ENV}=`{s}` is not a number")))?;
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Validation(format!("{TOLERANCE_ENV} must be positive, got {tol}")));
            }
            Ok(tol)
        }
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Axes, then `max_deviation` and `compared` per grid point.
    pub table: SweepResult,
    /// One `skipped: ...` line per backend that did not apply.
    pub skipped: Vec<String>,
    pub tolerance: f64,
    pub worst: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: max pairwise deviation {:e} over {} points (tolerance {:e})",
            if self.passed() { "agree" } else { "DEVIATION" },
            self.worst,
            self.table.rows.len(),
            self.tolerance
        )
    }
}

/// Backends to cross-check: the configured list, or all four when fewer
/// than two are configured.
fn validation_backends(cfg: &ScenarioConfig) -> Vec<Backend> {
    if cfg.backends.len() >= 2 {
        cfg.backends.clone()
    } else {
        Backend::ALL.to_vec()
    }
}

/// Computes the generator with every backend at every grid point and
/// reports the largest pairwise max-norm difference.
pub fn validate_backends(cfg: &ScenarioConfig, tolerance: f64) -> Result<ValidationReport> {
    let backends = validation_backends(cfg);
    let axes: Vec<String> = cfg.sweeps.iter().map(|s| s.name.clone()).collect();
    let mut columns = axes.clone();
    columns.extend(["max_deviation".to_string(), "compared".to_string()]);
    let mut skipped: BTreeMap<(Backend, &'static str), usize> = BTreeMap::new();
    let mut used = BTreeSet::new();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let points = grid(cfg)?;
    for gp in &points {
        let prob = problem(cfg, &gp.params)?;
        let mut deviation = 0.0f64;
        let mut compared = usize::MAX;
        for name in &prob.estimated {
            let mut gens = Vec::new();
            for &b in &backends {
                match compute_generator(b, prob.family.as_ref(), &prob.params, name)? {
                    Some(res) => {
                        used.insert(b);
                        gens.push(res.h);
                    }
                    None => *skipped.entry((b, *name)).or_default() += 1,
                }
            }
            if gens.len() < 2 {
                return Err(CliError::Validation(format!(
                    "fewer than two applicable backends for `{name}` at {:?}",
                    gp.axes
                )));
            }
            for (i, a) in gens.iter().enumerate() {
                for b in &gens[i + 1..] {
                    deviation = deviation.max(max_norm(&(a.matrix() - b.matrix())));
                }
            }
            compared = compared.min(gens.len());
        }
        worst = worst.max(deviation);
        let mut row = gp.axes.clone();
        row.extend([deviation, compared as f64]);
        rows.push(row);
    }
    let skipped = skipped
        .into_iter()
        .map(|((b, name), n)| format!("skipped: {b} NotApplicable for {name} at {n} of {} points", points.len()))
        .collect();
    let mut prov_cfg = cfg.clone();
    prov_cfg.backends = backends;
    Ok(ValidationReport {
        table: SweepResult {
            axes,
            columns,
            rows,
            provenance: provenance(&prov_cfg, &used),
        },
        skipped,
        tolerance,
        worst,
    })
}

fn ring_param(cfg: &ScenarioConfig) -> Result<EstimatedParam> {
    if let Some(p) = cfg.ring_param {
        return Ok(p);
    }
    match cfg.model {
        Model::SpinTheta => Ok(EstimatedParam::Theta),
        Model::SpinB => Ok(EstimatedParam::B),
        other => Err(CliError::Validation(format!(
            "ring needs model spin_theta or spin_B (or ring.param), got {}",
            other.name()
        ))),
    }
}

/// Samples `ring.points` optimal pure states. Each row carries the Bloch
/// vector, the ring axis, the Fisher information computed through the
/// generator backend and the analytic maximum.
pub fn emit_optimal_ring(cfg: &ScenarioConfig) -> Result<SweepResult> {
    let param = ring_param(cfg)?;
    if !cfg.sweeps.is_empty() {
        return Err(CliError::Validation("ring takes fixed parameters, remove sweep.* keys".into()));
    }
    let p = cfg.params;
    if p.two_j != 1 {
        return Err(CliError::Validation("optimal rings are Bloch-sphere circles, j must be 1/2".into()));
    }
    let sp = SpinParams::qubit(p.b, p.theta, p.t)?;
    let ring = optimal_state_ring(&sp, param, cfg.ring_points)?;
    let mut spin_cfg = cfg.clone();
    spin_cfg.model = match param {
        EstimatedParam::Theta => Model::SpinTheta,
        EstimatedParam::B => Model::SpinB,
    };
    let prob = problem(&spin_cfg, &p)?;
    let (h, b) = first_generator(&prob, param.name(), &cfg.backends)?;
    let mut rows = Vec::with_capacity(ring.points.len());
    for r in &ring.points {
        let psi = spin_coherent_state(1, *r)?;
        let f = qfi_pure(&psi, &h)?;
        if (f - ring.qfi_max).abs() > 1e-10 * (1.0 + ring.qfi_max) {
            return Err(CliError::Library(qfikit::Error::Inconsistent(format!(
                "ring point {r:?} reaches {f}, expected {}",
                ring.qfi_max
            ))));
        }
        let mut row = r.to_vec();
        row.extend(ring.axis);
        row.extend([f, ring.qfi_max]);
        rows.push(row);
    }
    let columns = ["x", "y", "z", "axis_x", "axis_y", "axis_z", "F", "F_max"]
        .map(String::from)
        .to_vec();
    Ok(SweepResult {
        axes: Vec::new(),
        columns,
        rows,
        provenance: provenance(&spin_cfg, &BTreeSet::from([b])),
    })
}

/// Outcome of one self-test check.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl SelfCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn spin_problem(model: Model, b: f64, theta: f64, t: f64, two_j: u32) -> Result<(ScenarioConfig, Problem)> {
    let mut cfg: ScenarioConfig = format!("model = {}", model.name()).parse()?;
    cfg.params.b = b;
    cfg.params.theta = theta;
    cfg.params.t = t;
    cfg.params.two_j = two_j;
    let prob = problem(&cfg, &cfg.params)?;
    Ok((cfg, prob))
}

fn check_thermal_peak() -> Result<f64> {
    let (_, prob) = spin_problem(Model::Thermal, 1.0, 0.0, std::f64::consts::PI, 1)?;
    let (h, _) = first_generator(&prob, "theta", &[Backend::Series])?;
    let crate::scenario::InitialState::Mixed(rho) = &prob.state else {
        unreachable!()
    };
    Ok((qfi_mixed(rho, &h)? - 4.0 * 1f64.tanh().powi(2)).abs())
}

fn check_backend_agreement() -> Result<f64> {
    let (_, prob) = spin_problem(Model::SpinTheta, 1.3, 0.4, 0.9, 2)?;
    let mut gens = Vec::new();
    for b in Backend::ALL {
        if let Some(res) = compute_generator(b, prob.family.as_ref(), &prob.params, "theta")? {
            gens.push(res.h);
        }
    }
    let mut dev = 0.0f64;
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            dev = dev.max(max_norm(&(a.matrix() - b.matrix())));
        }
    }
    Ok(dev)
}

fn check_coherent_state() -> Result<f64> {
    let (b, theta, t) = (0.8, 1.1, 1.7);
    let (_, prob) = spin_problem(Model::SpinTheta, b, theta, t, 4)?;
    let (h, _) = first_generator(&prob, "theta", &[Backend::Series])?;
    let n0 = DirectionVectors::new(&SpinParams::new(4, b, theta, t)?).n0;
    let psi = spin_coherent_state(4, n0)?;
    let s = (0.5 * b * t).sin();
    Ok((qfi_pure(&psi, &h)? - 8.0 * 2.0 * s * s).abs())
}

fn check_ring() -> Result<f64> {
    let mut cfg: ScenarioConfig = "model = spin_theta\nparams.B = 1.2\nparams.theta = 0.3\nparams.t = 2".parse()?;
    cfg.ring_points = 16;
    let ring = emit_optimal_ring(&cfg)?;
    let f = ring.column("F").unwrap_or_default();
    let s = (0.6f64 * 2.0).sin();
    Ok(f.iter().fold(0.0f64, |acc, x| acc.max((x - 4.0 * s * s).abs())))
}

fn check_pure_rld() -> Result<f64> {
    let (_, prob) = spin_problem(Model::TwoParam, 0.9, 0.7, 1.4, 1)?;
    let crate::scenario::InitialState::Pure(psi) = &prob.state else {
        unreachable!()
    };
    let (hb, _) = first_generator(&prob, "B", &[Backend::Series])?;
    let (ht, _) = first_generator(&prob, "theta", &[Backend::Series])?;
    let hs = [("B", &hb), ("theta", &ht)];
    let f = qfi_matrix_pure(psi, &hs)?;
    let j = rld_matrix_pure(psi, &hs)?;
    let diff = j.entries() - f.entries().map(|z| z / 2.0);
    Ok(diff.iter().fold(0.0f64, |acc, z| acc.max(z.norm())))
}

type Check = (&'static str, fn() -> Result<f64>, f64);

/// Runs a fixed set of end-to-end checks with known answers.
pub fn selftest() -> Result<Vec<SelfCheck>> {
    let checks: [Check; 5] = [
        ("thermal peak equals 4 tanh^2(1)", check_thermal_peak, 1e-9),
        ("backends agree for spin 1", check_backend_agreement, 1e-6),
        ("coherent state reaches 8 j sin^2(Bt/2)", check_coherent_state, 1e-9),
        ("optimal ring is flat at 4 sin^2(Bt/2)", check_ring, 1e-10),
        ("pure-state RLD equals half the QFI", check_pure_rld, 1e-12),
    ];
    checks
        .into_iter()
        .map(|(name, run, tolerance)| {
            Ok(SelfCheck {
                name,
                deviation: run()?,
                tolerance,
            })
        })
        .collect()
}
