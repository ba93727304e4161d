//! Numerical tolerances shared by every module.
//!
//! All thresholds live in one record so that tests, the CLI and the library
//! agree on what "equal" means. `Tolerances::default()` carries the values the
//! library is validated against.

/// Tolerance configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity check: `max |M_ij - conj(M_ji)| <= hermitian * (1 + max |M_ij|)`.
    pub hermitian: f64,
    /// Allowed deviation of a density matrix trace from one.
    pub trace: f64,
    /// Smallest eigenvalue a density matrix may have (as `-positivity`).
    pub positivity: f64,
    /// Bloch vectors may exceed unit length by this much.
    pub bloch: f64,
    /// State vectors must have unit norm to this precision.
    pub normalization: f64,
    /// Relative eigenvalue cutoff defining the support of a density matrix.
    pub support: f64,
    /// Series truncation: stop once a term's max-norm drops below this.
    pub series_term: f64,
    /// Default maximum expansion order of the generator series.
    pub series_max_order: usize,
    /// Relative tolerance of the two-term cycle detector.
    pub cycle: f64,
    /// Default starting node count of the Gauss-Legendre backend.
    pub quadrature_nodes: usize,
    /// Node cap of the adaptive quadrature.
    pub quadrature_max_nodes: usize,
    /// Convergence threshold between successive quadrature estimates.
    pub quadrature: f64,
    /// Default central-difference step.
    pub fd_step: f64,
    /// Residual threshold used by the closed-form commutator detector.
    pub closed_form: f64,
    /// Fisher values in `[-fisher_clamp, 0)` are clamped to zero.
    pub fisher_clamp: f64,
    /// Threshold for the pure-state Cramer-Rao achievability test.
    pub achievability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            trace: 1e-12,
            positivity: 1e-12,
            bloch: 1e-12,
            normalization: 1e-12,
            support: 1e-12,
            series_term: 1e-12,
            series_max_order: 64,
            cycle: 1e-10,
            quadrature_nodes: 16,
            quadrature_max_nodes: 1024,
            quadrature: 1e-10,
            fd_step: 1e-5,
            closed_form: 1e-10,
            fisher_clamp: 1e-10,
            achievability: 1e-10,
        }
    }
}
