//! Diagonal-constrained complex SDP
//!
//! ```text
//! maximize tr(U V)  subject to  V_nn = 1,  V ⪰ 0
//! ```
//!
//! which is the unit-modulus quadratic program `max xᴴUx, |x_n| = 1` with the
//! rank-one constraint dropped. Two solvers are provided: a low-rank
//! factorization `V = YYᴴ` with unit-norm rows optimized on the oblique
//! manifold (the default), and a dense primal-dual interior-point method used
//! as a cross-check on small instances. [`gaussian_randomize`] maps a relaxed
//! solution back to a unit-modulus vector.

mod interior_point;
mod low_rank;
mod randomize;

pub use randomize::{gaussian_randomize, randomization_candidates, Candidate};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigen, is_hermitian, CMatrix, CVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    u: CMatrix,
}

impl SdpProblem {
    /// Rejects non-square, non-finite or non-Hermitian cost matrices.
    pub fn new(u: CMatrix) -> Result<Self> {
        if !u.is_square() || u.nrows() == 0 {
            return Err(domain("SDP cost matrix must be square and nonempty"));
        }
        if !u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(domain("SDP cost matrix has non-finite entries"));
        }
        if !is_hermitian(&u, 1e-10) {
            return Err(domain("SDP cost matrix is not Hermitian"));
        }
        Ok(Self { u })
    }

    pub fn cost(&self) -> &CMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `xᴴUx` for a candidate vector.
    pub fn value(&self, x: &CVector) -> f64 {
        crate::linalg::quad_form(&self.u, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpMethod {
    LowRank,
    InteriorPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: SdpMethod,
    /// Factor rank for [`SdpMethod::LowRank`]; `None` picks `⌈√(2M)⌉`.
    pub factor_rank: Option<usize>,
    pub max_iterations: usize,
    /// Bound on the scale-free KKT residual (see [`SdpSolution::kkt_residual`]).
    pub stationarity_tolerance: f64,
    /// Number of Gaussian randomization draws G.
    pub randomizations: usize,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SdpMethod::LowRank,
            factor_rank: None,
            max_iterations: 20_000,
            stationarity_tolerance: 1e-8,
            randomizations: 100,
            rng_seed: 0x5d9_c0de,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.factor_rank == Some(0) {
            return Err(domain("factor rank must be at least 1"));
        }
        if self.randomizations == 0 {
            return Err(domain("randomization count must be at least 1"));
        }
        if !(self.stationarity_tolerance > 0.0) {
            return Err(domain("stationarity tolerance must be positive"));
        }
        Ok(())
    }

    pub fn rank_for(&self, m: usize) -> usize {
        self.factor_rank
            .unwrap_or_else(|| ((2 * m) as f64).sqrt().ceil() as usize)
            .clamp(1, m.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// Hermitian PSD with unit diagonal.
    pub v: CMatrix,
    /// `tr(U V)`.
    pub objective: f64,
    pub solver_iterations: usize,
    /// First-order stationarity residual relative to `‖U‖_F`: the Riemannian
    /// gradient norm (low-rank) or the relative duality gap (interior point).
    pub kkt_residual: f64,
    /// Upper bound on `max(0, −λ_min(Diag(y) − U)) / ‖U‖_F` for the dual
    /// estimate `y`; values at the tolerance certify near-global optimality.
    /// Exact when an eigendecomposition was needed, otherwise the diagonal
    /// shift under which a Cholesky factorization succeeded.
    pub dual_infeasibility: f64,
    /// `Y` with `V = YYᴴ` when the solver produced one.
    pub factor: Option<CMatrix>,
}

/// Solves the relaxation with the configured method.
pub fn solve_diag_sdp(problem: &SdpProblem, config: &SolverConfig) -> Result<SdpSolution> {
    solve_diag_sdp_warm(problem, config, None)
}

/// As [`solve_diag_sdp`], seeding the low-rank factor's first column with a
/// unit-modulus vector. Ignored by the interior-point method.
pub fn solve_diag_sdp_warm(
    problem: &SdpProblem,
    config: &SolverConfig,
    warm_start: Option<&CVector>,
) -> Result<SdpSolution> {
    config.validate()?;
    if let Some(w) = warm_start {
        if w.len() != problem.dim() {
            return Err(Error::DimensionMismatch(format!(
                "warm start has {} entries, problem has dimension {}",
                w.len(),
                problem.dim()
            )));
        }
    }
    match config.method {
        SdpMethod::LowRank => low_rank::solve(problem, config, warm_start),
        SdpMethod::InteriorPoint => interior_point::solve(problem, config),
    }
}

/// Clamps negative eigenvalues to zero and rescales to unit diagonal.
pub fn psd_project(v: &CMatrix) -> CMatrix {
    let n = v.nrows();
    let (vals, vecs) = hermitian_eigen(v);
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = vals[k];
        if lam > 0.0 {
            let col = vecs.column(k);
            out += (col * col.adjoint()) * Complex64::new(lam, 0.0);
        }
    }
    normalize_diagonal(&mut out);
    out
}

/// `V_ij / √(V_ii V_jj)`; a zero diagonal entry becomes an isolated 1.
pub(crate) fn normalize_diagonal(v: &mut CMatrix) {
    let n = v.nrows();
    let d: Vec<f64> = (0..n).map(|i| v[(i, i)].re).collect();
    for i in 0..n {
        for j in 0..n {
            let s = (d[i] * d[j]).sqrt();
            v[(i, j)] = if d[i] > 0.0 && d[j] > 0.0 {
                v[(i, j)] / s
            } else if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        v[(i, i)] = Complex64::new(1.0, 0.0);
    }
}

/// Scale used to make solver tolerances dimensionless.
pub(crate) fn cost_scale(u: &CMatrix) -> f64 {
    let f = u.norm();
    if f > 0.0 && f.is_finite() {
        f
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian, hermitian_part, min_eigenvalue, random_unit_modulus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(super) fn random_hermitian(seed: u64, m: usize) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        hermitian_part(&CMatrix::from_fn(m, m, |_, _| complex_gaussian(&mut rng)))
    }

    fn check_feasible(sol: &SdpSolution) {
        for i in 0..sol.v.nrows() {
            assert!((sol.v[(i, i)].re - 1.0).abs() < 1e-8);
            assert!(sol.v[(i, i)].im.abs() < 1e-8);
        }
        assert!(min_eigenvalue(&sol.v) >= -1e-8);
    }

    fn configs() -> [SolverConfig; 2] {
        [
            SolverConfig::default(),
            SolverConfig { method: SdpMethod::InteriorPoint, ..SolverConfig::default() },
        ]
    }

    #[test]
    fn identity_cost_gives_trace() {
        for cfg in configs() {
            let sol = solve_diag_sdp(&SdpProblem::new(CMatrix::identity(5, 5)).unwrap(), &cfg).unwrap();
            assert!((sol.objective - 5.0).abs() < 1e-7, "{:?}: {}", cfg.method, sol.objective);
            check_feasible(&sol);
        }
    }

    #[test]
    fn diagonal_cost_gives_diagonal_sum() {
        let d = [3.0, -1.0, 0.5, 2.0];
        let u = CMatrix::from_diagonal(&CVector::from_iterator(4, d.iter().map(|&x| Complex64::new(x, 0.0))));
        for cfg in configs() {
            let sol = solve_diag_sdp(&SdpProblem::new(u.clone()).unwrap(), &cfg).unwrap();
            assert!((sol.objective - 4.5).abs() < 1e-7, "{:?}: {}", cfg.method, sol.objective);
        }
    }

    #[test]
    fn non_hermitian_cost_is_rejected() {
        let mut u = CMatrix::identity(3, 3);
        u[(0, 1)] = Complex64::new(1.0, 1.0);
        assert!(matches!(SdpProblem::new(u), Err(Error::Domain(_))));
    }

    #[test]
    fn relaxation_dominates_monte_carlo_for_m3() {
        // Monte-Carlo lower-bound oracle over random unit-modulus vectors
        let u = random_hermitian(17, 3);
        let p = SdpProblem::new(u.clone()).unwrap();
        let sol = solve_diag_sdp(&p, &SolverConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..1_000_000 {
            best = best.max(p.value(&random_unit_modulus(&mut rng, 3)));
        }
        assert!(sol.objective >= best - 1e-6 * best.abs(), "{} < {}", sol.objective, best);
        check_feasible(&sol);
    }

    #[test]
    fn low_rank_and_interior_point_agree() {
        for seed in 0..20u64 {
            let m = 2 + (seed as usize % 11);
            let p = SdpProblem::new(random_hermitian(seed, m)).unwrap();
            let lr = solve_diag_sdp(&p, &SolverConfig::default()).unwrap();
            let ip = solve_diag_sdp(&p, &configs()[1]).unwrap();
            let rel = (lr.objective - ip.objective).abs() / ip.objective.abs().max(1.0);
            assert!(rel < 1e-4, "m={m}: lr={} ip={}", lr.objective, ip.objective);
            check_feasible(&lr);
            check_feasible(&ip);
            assert!(lr.kkt_residual <= SolverConfig::default().stationarity_tolerance);
        }
    }

    #[test]
    fn projection_is_idempotent_on_psd_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = CMatrix::from_fn(5, 3, |_, _| complex_gaussian(&mut rng));
        let mut v = &y * y.adjoint();
        normalize_diagonal(&mut v);
        let p = psd_project(&v);
        assert!((p - &v).norm() < 1e-12);
    }

    #[test]
    fn projection_clamps_negative_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_unit_modulus(&mut rng, 4);
        let (_, vecs) = hermitian_eigen(&random_hermitian(5, 4));
        let q = vecs.column(0).into_owned();
        let v = &x * x.adjoint() - (&q * q.adjoint()) * Complex64::new(1e-3, 0.0);
        assert!(min_eigenvalue(&v) < 0.0);
        let p = psd_project(&v);
        assert!(min_eigenvalue(&p) >= -1e-12);
        for i in 0..4 {
            assert!((p[(i, i)].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn warm_start_dimension_is_checked() {
        let p = SdpProblem::new(CMatrix::identity(3, 3)).unwrap();
        let w = CVector::from_element(2, Complex64::new(1.0, 0.0));
        assert!(solve_diag_sdp_warm(&p, &SolverConfig::default(), Some(&w)).is_err());
    }
}
