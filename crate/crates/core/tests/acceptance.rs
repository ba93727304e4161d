//! Acceptance suite: eight end-to-end criteria, one status line each.
//!
//! Runs without the libtest harness so every line is printed regardless of
//! output capture; the process exits non-zero when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    direct_sld_oracle, family_oracle, max_abs, random_density, random_direction, random_family,
    random_hermitian, random_state, rng,
};
use qfikit::fisher::{
    cr_achievable_pure, qfi_exponential, qfi_matrix_pure, qfi_mixed, qfi_qubit, rld_matrix,
    rld_matrix_pure, sld_coefficients, sld_effective_exponential, sld_effective_exponential_closed,
    ExponentialState,
};
use qfikit::generator::{
    h_closed_form, h_via_finite_difference, h_via_quadrature, h_via_series, HamiltonianFamily, Params,
};
use qfikit::operator::dot3;
use qfikit::spin::{
    qfi_matrix_qubit_btheta, qfi_thermal, spin_hamiltonian_family, thermal_qubit,
    DirectionVectors, SpinParams, ANGLE, FIELD,
};
use qfikit::{density_from_bloch, BlochVector, Complex64, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pure_bloch(dir: [f64; 3]) -> StateVector {
    let rho = density_from_bloch(&BlochVector::new(dir).unwrap()).unwrap();
    rho.spectrum().eigenvector(1)
}

/// Order cap for the series backend; random dimension-8 families with
/// `t ≈ 2` need more than the default 64 terms to fall below `1e-12`.
const SERIES_MAX_ORDER: usize = 128;

fn series_generator(fam: &dyn HamiltonianFamily, params: &Params, param: &str) -> HermitianOperator {
    h_via_series(fam, params, param, SERIES_MAX_ORDER, 1e-12).unwrap().h
}

/// Spin-half θ estimation: the maximum over pure states of the generic
/// series pipeline equals `4 sin²(Bt/2)` on a 21-point Bt grid.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for i in 0..21 {
        let bt = 2.0 * PI * i as f64 / 20.0;
        let p = SpinParams::qubit(1.0, 0.3, bt).unwrap();
        let (fam, params) = spin_hamiltonian_family(&p).unwrap();
        let h = series_generator(&fam, &params, ANGLE);
        let dirs = DirectionVectors::new(&p);
        let mut candidates = vec![dirs.n0];
        candidates.extend((0..200).map(|_| random_direction(&mut r)));
        let best = candidates
            .iter()
            .map(|d| qfi_qubit(&DensityMatrix::pure(&pure_bloch(*d)).unwrap(), &h).unwrap())
            .fold(0.0, f64::max);
        let expected = 4.0 * (bt / 2.0).sin().powi(2);
        worst = worst.max((best - expected).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max |F_max - 4sin²(Bt/2)| = {worst:.3e}, runtime {elapsed:.2?}"),
    )
}

/// B estimation: `F_B = t²` for pure states orthogonal to `n₀`.
fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for (b, theta, t) in [(0.7, 0.0, 0.5), (1.3, 0.9, 1.7), (2.1, 2.5, 3.0), (0.4, -1.2, 2.2)] {
        let p = SpinParams::qubit(b, theta, t).unwrap();
        let (fam, params) = spin_hamiltonian_family(&p).unwrap();
        let h = h_closed_form(&fam, &params, FIELD).unwrap().unwrap().h;
        let d = DirectionVectors::new(&p);
        let y = [0.0, 1.0, 0.0];
        for k in 0..16 {
            let phi = 2.0 * PI * k as f64 / 16.0;
            let dir = [0, 1, 2].map(|i| phi.cos() * y[i] + phi.sin() * d.n0_prime[i]);
            let f = qfi_qubit(&DensityMatrix::pure(&pure_bloch(dir)).unwrap(), &h).unwrap();
            worst = worst.max((f - t * t).abs());
        }
    }
    check(worst <= 1e-10, format!("max |F_B - t²| = {worst:.3e}"))
}

/// Thermal T = 1 grid through three routes and the θ-independent maximum.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let beta = 1.0;
    let (rho, state) = thermal_qubit(beta).unwrap();
    let steps = 101;
    let grid = |k: usize| 2.0 * PI * k as f64 / (steps - 1) as f64;
    let mut worst = 0.0f64;
    let mut column_max = Vec::with_capacity(steps);
    let mut argmax_ok = true;
    for jt in 0..steps {
        let theta = grid(jt);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for ib in 0..steps {
            let p = SpinParams::qubit(1.0, theta, grid(ib)).unwrap();
            let closed = qfi_thermal(beta, &p).unwrap();
            let (fam, params) = spin_hamiltonian_family(&p).unwrap();
            let h = series_generator(&fam, &params, ANGLE);
            let exponential = qfi_exponential(&state, &h).unwrap();
            let mixed = qfi_mixed(&rho, &h).unwrap();
            worst = worst.max((closed - exponential).abs()).max((closed - mixed).abs());
            if closed > best.0 + 1e-13 {
                best = (closed, ib);
            }
        }
        argmax_ok &= best.1 == (steps - 1) / 2;
        column_max.push(best.0);
    }
    let target = 4.0 * beta.tanh().powi(2);
    let mean = column_max.iter().sum::<f64>() / steps as f64;
    let sd = (column_max.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / steps as f64).sqrt();
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9
            && argmax_ok
            && (mean - target).abs() <= 1e-9
            && sd <= 1e-12
            && elapsed < Duration::from_secs(30),
        format!(
            "pointwise dev {worst:.3e}, max {mean:.10} vs 4tanh²1 = {target:.10}, argmax at Bt=π: {argmax_ok}, θ-stddev {sd:.3e}, runtime {elapsed:.2?}"
        ),
    )
}

fn pairwise(results: &[(&str, ComplexMatrix)]) -> f64 {
    let mut worst = 0.0f64;
    for (i, (_, a)) in results.iter().enumerate() {
        for (_, b) in &results[i + 1..] {
            worst = worst.max(max_abs(&(a - b)));
        }
    }
    worst
}

/// Series, quadrature, finite difference and closed form agree pairwise.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut r = rng(104);
    let mut worst = 0.0f64;
    let mut closed_used = 0;
    let run = |fam: &dyn HamiltonianFamily, params: &Params, param: &str, closed_used: &mut usize| {
        let mut results = vec![
            ("series", series_generator(fam, params, param).into_matrix()),
            ("quadrature", h_via_quadrature(fam, params, param, 16).unwrap().h.into_matrix()),
            ("finite_difference", h_via_finite_difference(fam, params, param, 1e-5).unwrap().h.into_matrix()),
        ];
        if let Some(c) = h_closed_form(fam, params, param).unwrap() {
            *closed_used += 1;
            results.push(("closed_form", c.h.into_matrix()));
        }
        pairwise(&results)
    };
    for i in 0..200 {
        let n = 2 + i % 7;
        let (fam, params) = random_family(&mut r, n);
        worst = worst.max(run(&fam, &params, "a", &mut closed_used));
    }
    for two_j in 1..=10u32 {
        let p = SpinParams::new(two_j, r.random_range(0.2..2.0), r.random_range(0.0..PI), r.random_range(0.1..2.0))
            .unwrap();
        let (fam, params) = spin_hamiltonian_family(&p).unwrap();
        worst = worst.max(run(&fam, &params, ANGLE, &mut closed_used));
        worst = worst.max(run(&fam, &params, FIELD, &mut closed_used));
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-7 && elapsed < Duration::from_secs(120),
        format!("max pairwise dev {worst:.3e} ({closed_used} closed-form cases), runtime {elapsed:.2?}"),
    )
}

fn exponential_with_spread(r: &mut rand_chacha::ChaCha8Rng, n: usize, spread: f64) -> ExponentialState {
    let mut raw: Vec<f64> = (0..n).map(|_| r.random_range(0.0..spread)).collect();
    raw[0] = 0.0;
    raw[n - 1] = spread;
    let ln_z = raw.iter().map(|x| x.exp()).sum::<f64>().ln();
    let u = qfikit::spectral_decompose(&random_hermitian(r, n, 1.0)).eigenvectors;
    let diag = nalgebra::DVector::from_iterator(n, raw.iter().map(|x| Complex64::new(x - ln_z, 0.0)));
    let g0 = &u * nalgebra::DMatrix::from_diagonal(&diag) * u.adjoint();
    ExponentialState::new(HermitianOperator::hermitized(&g0).unwrap()).unwrap()
}

/// Exponential-state equivalence, order-30 SLD series, scalar tanh identity.
fn criterion_5() -> Outcome {
    let mut r = rng(105);
    let mut fisher_dev = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 5;
        let rho = random_density(&mut r, n);
        let h = random_hermitian(&mut r, n, 1.0);
        let state = ExponentialState::from_density(&rho).unwrap();
        fisher_dev = fisher_dev.max((qfi_exponential(&state, &h).unwrap() - qfi_mixed(&rho, &h).unwrap()).abs());
    }

    let mut series_dev = 0.0f64;
    let mut worst_spread = 0.0;
    for i in 0..100 {
        let n = 2 + i % 4;
        let spread = r.random_range(0.0..=2.0);
        let state = exponential_with_spread(&mut r, n, spread);
        let h = random_hermitian(&mut r, n, 1.0);
        let series = sld_effective_exponential(&state, &h, 30).unwrap();
        let closed = sld_effective_exponential_closed(&state, &h).unwrap();
        let dev = max_abs(&(series.matrix() - closed.matrix()));
        if dev > series_dev {
            series_dev = dev;
            worst_spread = spread;
        }
    }

    let order = 30;
    let long = sld_coefficients(400).g;
    let mut scalar_ok = true;
    let mut scalar_dev = 0.0f64;
    for k in 0..=40 {
        let x: f64 = -2.0 + 4.0 * k as f64 / 40.0;
        let term = |n: usize, g: f64| g * x.powi(n as i32 + 1);
        let partial: f64 = long[..=order].iter().enumerate().map(|(n, g)| term(n, *g)).sum();
        let remainder: f64 = long[order + 1..].iter().enumerate().map(|(n, g)| term(n + order + 1, *g).abs()).sum();
        let dev = (partial - 2.0 * (x / 2.0).tanh()).abs();
        scalar_dev = scalar_dev.max(dev);
        scalar_ok &= dev <= remainder + 1e-14;
    }

    check(
        fisher_dev <= 1e-8 && series_dev <= 1e-8 && scalar_ok,
        format!(
            "qfi_exponential vs qfi_mixed {fisher_dev:.3e}; order-30 series vs tanh form {series_dev:.3e} (spread {worst_spread:.3}); scalar identity within remainder: {scalar_ok} (max dev {scalar_dev:.3e})"
        ),
    )
}

/// The two-parameter (B, θ) spin-half example.
fn criterion_6() -> Outcome {
    let mut r = rng(106);
    let mut diag_dev = 0.0f64;
    let mut det_max = 0.0f64;
    let mut iff_ok = true;
    for _ in 0..20 {
        let p = SpinParams::qubit(r.random_range(0.2..3.0), r.random_range(0.0..PI), r.random_range(0.2..2.5))
            .unwrap();
        let d = DirectionVectors::new(&p);
        let (Some(n1), Some(n2)) = (d.n1, d.n2) else { continue };
        let (fam, params) = spin_hamiltonian_family(&p).unwrap();
        let hb = series_generator(&fam, &params, FIELD);
        let ht = series_generator(&fam, &params, ANGLE);
        let hs = [(FIELD, &hb), (ANGLE, &ht)];
        let s2 = (p.half_phase()).sin().powi(2);

        let m = qfi_matrix_pure(&pure_bloch(n2), &hs).unwrap();
        diag_dev = diag_dev
            .max((m.get(0, 0) - p.t * p.t).abs())
            .max((m.get(1, 1) - 4.0 * s2).abs())
            .max(m.get(0, 1).abs());
        iff_ok &= !cr_achievable_pure(&pure_bloch(n2), &hs).unwrap().achievable;

        for _ in 0..10 {
            let phi: f64 = r.random_range(0.0..2.0 * PI);
            let dir = [0, 1, 2].map(|i| phi.cos() * d.n0[i] + phi.sin() * n1[i]);
            let m = qfi_matrix_pure(&pure_bloch(dir), &hs).unwrap();
            let closed = qfi_matrix_qubit_btheta(&BlochVector::new(dir).unwrap(), &p).unwrap();
            det_max = det_max.max(m.determinant().abs()).max(closed.determinant().abs());
            iff_ok &= cr_achievable_pure(&pure_bloch(dir), &hs).unwrap().achievable;

            let other = random_direction(&mut r);
            let a = cr_achievable_pure(&pure_bloch(other), &hs).unwrap();
            iff_ok &= a.achievable == (dot3(n2, other).abs() <= 1e-10);
        }
    }
    check(
        diag_dev <= 1e-10 && det_max <= 1e-10 && iff_ok,
        format!("r=n₂ deviation {diag_dev:.3e}; in-plane max |det F| {det_max:.3e}; achievability iff |n₂·r| ≤ 1e-10: {iff_ok}"),
    )
}

/// Near-pure regularized RLD matrix against half the SLD matrix.
fn criterion_7() -> Outcome {
    let eps = 1e-6;
    let p = SpinParams::qubit(1.3, 0.6, 1.4).unwrap();
    let (fam, params) = spin_hamiltonian_family(&p).unwrap();
    let hb = series_generator(&fam, &params, FIELD);
    let ht = series_generator(&fam, &params, ANGLE);
    let hs = [(FIELD, &hb), (ANGLE, &ht)];
    let dir = [0.48, -0.6, 0.64];
    let psi = pure_bloch(dir);
    let rho = density_from_bloch(&BlochVector::new(dir.map(|x| x * (1.0 - 2.0 * eps))).unwrap()).unwrap();

    let f = qfi_matrix_pure(&psi, &hs).unwrap();
    let j = rld_matrix(&rho, &hs).unwrap();
    let mut entry_dev = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            entry_dev = entry_dev.max((j.get_complex(a, b) - f.get(a, b) / 2.0).norm());
        }
    }
    let tr_f_inv = f.trace_of_inverse().unwrap_or(f64::INFINITY);
    let tr_j_inv = j.trace_of_inverse().unwrap_or(f64::INFINITY);
    let exact = rld_matrix_pure(&psi, &hs).unwrap();
    let mut exact_dev = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            exact_dev = exact_dev.max((exact.get_complex(a, b) - f.get(a, b) / 2.0).norm());
        }
    }
    check(
        entry_dev <= 1e-3 && tr_f_inv >= tr_j_inv,
        format!(
            "ε = {eps:e}: max |J - F/2| = {entry_dev:.3e} (J_BB = {:.4e}, F_BB/2 = {:.4e}); Tr F⁻¹ = {tr_f_inv:.4} ≥ Tr Re(J)⁻¹ = {tr_j_inv:.4e}: {}; exact pure Tr(∂ρ∂ρ) vs F/2: {exact_dev:.3e}",
            j.get(0, 0),
            f.get(0, 0) / 2.0,
            tr_f_inv >= tr_j_inv
        ),
    )
}

/// `qfi_mixed` against the SLD eigenbasis oracle on the evolved state.
fn criterion_8() -> Outcome {
    let mut r = rng(108);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 5;
        let (fam, params) = random_family(&mut r, n);
        let rho = if i % 10 == 0 {
            DensityMatrix::pure(&random_state(&mut r, n)).unwrap()
        } else {
            random_density(&mut r, n)
        };
        let h = HermitianOperator::hermitized(&family_oracle(&fam, &params, "a")).unwrap();
        let f_series = qfi_mixed(&rho, &series_generator(&fam, &params, "a")).unwrap();
        let f_exact = qfi_mixed(&rho, &h).unwrap();
        let oracle = direct_sld_oracle(&fam, &params, "a", rho.matrix(), 1e-5);
        worst = worst.max((f_series - oracle).abs()).max((f_exact - oracle).abs());
    }
    check(worst <= 1e-6, format!("max |qfi_mixed - direct SLD oracle| = {worst:.3e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("spin-half θ maximum 4sin²(Bt/2)", criterion_1),
        ("B maximum t²", criterion_2),
        ("thermal T=1 grid", criterion_3),
        ("backend agreement", criterion_4),
        ("exponential-state equivalence", criterion_5),
        ("two-parameter (B, θ) example", criterion_6),
        ("RLD near-pure relation", criterion_7),
        ("direct SLD oracle", criterion_8),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail}", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, total {:.2?}", criteria.len() - failed, total.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
