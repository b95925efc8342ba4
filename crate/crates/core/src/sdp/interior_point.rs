//! Dense primal-dual path-following method for the diagonal SDP.
//!
//! Primal `max ⟨A, X⟩, diag(X) = 1, X ⪰ 0`; dual `min 1ᵀy, Z = Diag(y) − A ⪰ 0`.
//! Search directions follow the HKM linearization of `XZ = μI`; the dual
//! step reduces to the real symmetric system `Re(X ∘ conj(Z⁻¹)) Δy = μ diag(Z⁻¹) − 1`.
//! Intended for small `M`; every iteration costs a few `O(M³)` factorizations.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use super::{cost_scale, normalize_diagonal, SdpProblem, SdpSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_part, min_eigenvalue, CMatrix};

const CENTERING: f64 = 0.1;
const STEP_FRACTION: f64 = 0.95;
const GAP_TOLERANCE: f64 = 1e-11;

/// Largest `α ≤ 1` keeping `P + α D ≻ 0`, scaled by [`STEP_FRACTION`].
fn max_step(p: &CMatrix, d: &CMatrix) -> f64 {
    let Some(chol) = Cholesky::new(p.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let scaled = &linv * d * linv.adjoint();
    let (vals, _) = hermitian_eigen(&hermitian_part(&scaled));
    let lam = vals[0];
    if lam >= 0.0 {
        1.0
    } else {
        (STEP_FRACTION * (-1.0 / lam)).min(1.0)
    }
}

fn real_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re tr(A B) for Hermitian A, B
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

pub(super) fn solve(problem: &SdpProblem, config: &SolverConfig) -> Result<SdpSolution> {
    let m = problem.dim();
    let scale = cost_scale(problem.cost());
    let a = problem.cost() / Complex64::new(scale, 0.0);

    let mut x = CMatrix::identity(m, m);
    let mut y = DVector::from_iterator(m, (0..m).map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>() + 1.0));
    let dual_slack = |y: &DVector<f64>| {
        let mut z = -a.clone();
        for i in 0..m {
            z[(i, i)] += y[i];
        }
        z
    };
    let mut z = dual_slack(&y);

    let mut iterations = 0;
    let mut gap = real_trace_product(&z, &x);
    let limit = config.max_iterations.min(500);
    while iterations < limit {
        let primal = real_trace_product(&a, &x);
        if gap <= GAP_TOLERANCE * (1.0 + primal.abs()) {
            break;
        }
        iterations += 1;
        let mu = CENTERING * gap / m as f64;
        let Some(zchol) = Cholesky::new(z.clone()) else {
            break;
        };
        let zinv = zchol.inverse();

        let schur = DMatrix::from_fn(m, m, |i, j| (x[(i, j)] * zinv[(j, i)]).re);
        let rhs = DVector::from_iterator(m, (0..m).map(|i| mu * zinv[(i, i)].re - 1.0));
        let Some(dy) = schur.clone().cholesky().map(|c| c.solve(&rhs)).or_else(|| schur.lu().solve(&rhs)) else {
            break;
        };

        let mut dz = CMatrix::zeros(m, m);
        for i in 0..m {
            dz[(i, i)] = Complex64::new(dy[i], 0.0);
        }
        let dx_raw = &zinv * Complex64::new(mu, 0.0) - &x - &x * &dz * &zinv;
        let dx = hermitian_part(&dx_raw);

        let alpha_p = max_step(&x, &dx);
        let alpha_d = max_step(&z, &dz);
        x += &dx * Complex64::new(alpha_p, 0.0);
        y += &dy * alpha_d;
        z = dual_slack(&y);
        gap = real_trace_product(&z, &x);
    }

    // remove diagonal drift accumulated by damped steps
    normalize_diagonal(&mut x);
    let primal = real_trace_product(&a, &x);
    let rel_gap = (y.sum() - primal).max(0.0) / (1.0 + primal.abs());
    let dual_infeasibility = (-min_eigenvalue(&dual_slack(&y))).max(0.0);
    let solution = SdpSolution {
        v: x,
        objective: primal * scale,
        solver_iterations: iterations,
        kkt_residual: rel_gap,
        dual_infeasibility,
        factor: None,
    };
    if rel_gap <= config.stationarity_tolerance {
        Ok(solution)
    } else {
        Err(Error::SdpNotConverged {
            residual: rel_gap,
            iterations,
            best: Box::new(solution),
        })
    }
}
