//! Low-rank factorization `V = YYᴴ` on the complex oblique manifold.
//!
//! Each row of `Y ∈ C^{M×r}` has unit norm, so `diag(V) = 1` holds by
//! construction. The objective `Re tr(Yᴴ U Y)` is maximized by Riemannian
//! gradient ascent with Barzilai-Borwein steps and a non-monotone Armijo safeguard. At a
//! stationary point the dual estimate `y_i = Re (U V)_ii` is checked: if
//! `Diag(y) − U` has a negative eigenvalue the factor gains a column along the
//! offending eigenvector and ascent resumes.

use std::collections::VecDeque;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cost_scale, SdpProblem, SdpSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, hermitian_eigen, CMatrix, CVector};

const ARMIJO: f64 = 1e-4;
/// Non-monotone window: a step must improve on the worst of the last few values.
const MEMORY: usize = 10;
const DUAL_TOLERANCE: f64 = 1e-6;

fn normalize_rows(y: &mut CMatrix) {
    for mut row in y.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= Complex64::new(n, 0.0);
        } else {
            row[0] = Complex64::new(1.0, 0.0);
        }
    }
}

/// `Re tr(Yᴴ (AY))`.
fn objective(y: &CMatrix, ay: &CMatrix) -> f64 {
    y.iter().zip(ay.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Row-wise tangent projection of the Euclidean gradient `2AY`.
fn riemannian_gradient(y: &CMatrix, ay: &CMatrix) -> CMatrix {
    let mut g = ay * Complex64::new(2.0, 0.0);
    for i in 0..y.nrows() {
        let inner: f64 = (0..y.ncols()).map(|k| (y[(i, k)].conj() * g[(i, k)]).re).sum();
        for k in 0..y.ncols() {
            g[(i, k)] -= y[(i, k)] * inner;
        }
    }
    g
}

fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

struct Certificate {
    dual_infeasibility: f64,
    direction: CVector,
}

/// Dual slack `Z = Diag(y) − A` for `y_i = Re⟨Y_i, (AY)_i⟩`. A Cholesky
/// factorization of `Z + τI` for a small shift `τ` certifies `λ_min(Z) > −τ`
/// cheaply; only when that fails is the eigendecomposition computed.
fn certificate(a: &CMatrix, y: &CMatrix, ay: &CMatrix) -> Certificate {
    let m = a.nrows();
    let mut z = -a.clone();
    for i in 0..m {
        let yi: f64 = (0..y.ncols()).map(|k| (y[(i, k)].conj() * ay[(i, k)]).re).sum();
        z[(i, i)] += yi;
    }
    for shift in [1e-12, DUAL_TOLERANCE] {
        let mut shifted = z.clone();
        for i in 0..m {
            shifted[(i, i)] += shift;
        }
        if shifted.cholesky().is_some() {
            return Certificate {
                dual_infeasibility: shift,
                direction: CVector::zeros(m),
            };
        }
    }
    let (vals, vecs) = hermitian_eigen(&z);
    Certificate {
        dual_infeasibility: (-vals[0]).max(0.0),
        direction: vecs.column(0).into_owned(),
    }
}

pub(super) fn solve(problem: &SdpProblem, config: &SolverConfig, warm: Option<&CVector>) -> Result<SdpSolution> {
    let m = problem.dim();
    let scale = cost_scale(problem.cost());
    let a = problem.cost() / Complex64::new(scale, 0.0);
    let mut rank = config.rank_for(m);
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let mut y = match warm {
        // a rank-one start: extra columns stay zero unless the certificate fails
        Some(w) => {
            let mut y = CMatrix::zeros(m, rank);
            y.set_column(0, w);
            y
        }
        None => CMatrix::from_fn(m, rank, |_, _| complex_gaussian(&mut rng)),
    };
    normalize_rows(&mut y);

    let mut ay = &a * &y;
    let mut f = objective(&y, &ay);
    let mut grad = riemannian_gradient(&y, &ay);
    let mut step = 1.0;
    let mut last_move: Option<(CMatrix, CMatrix)> = None;
    let mut gnorm = grad.norm();
    let mut recent: VecDeque<f64> = VecDeque::from([f]);

    let finish = |y: &CMatrix, f: f64, iterations: usize, gnorm: f64, dual: f64| {
        let v = y * y.adjoint();
        SdpSolution {
            v,
            objective: f * scale,
            solver_iterations: iterations,
            kkt_residual: gnorm,
            dual_infeasibility: dual,
            factor: Some(y.clone()),
        }
    };

    for iter in 0..config.max_iterations {
        if gnorm <= config.stationarity_tolerance {
            let cert = certificate(&a, &y, &ay);
            let dual = cert.dual_infeasibility;
            if dual <= DUAL_TOLERANCE || rank >= m {
                return Ok(finish(&y, f, iter, gnorm, dual));
            }
            // escape the saddle along the most negative dual direction
            rank += 1;
            let mut grown = CMatrix::zeros(m, rank);
            grown.view_mut((0, 0), (m, rank - 1)).copy_from(&y);
            grown.set_column(rank - 1, &(cert.direction * Complex64::new(0.3, 0.0)));
            y = grown;
            normalize_rows(&mut y);
            ay = &a * &y;
            f = objective(&y, &ay);
            grad = riemannian_gradient(&y, &ay);
            gnorm = grad.norm();
            last_move = None;
            step = 1.0;
            recent = VecDeque::from([f]);
            continue;
        }

        // Barzilai-Borwein proposal from the last accepted move
        let mut t = match &last_move {
            Some((dy, dg)) => {
                let sy = real_inner(dy, dg).abs();
                if sy > 0.0 {
                    (dy.norm_squared() / sy).clamp(1e-10, 1e10)
                } else {
                    step * 2.0
                }
            }
            None => step,
        };

        let g2 = gnorm * gnorm;
        let reference = recent.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = 8.0 * f64::EPSILON * (f.abs() + 1.0);
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand = &y + &grad * Complex64::new(t, 0.0);
            normalize_rows(&mut cand);
            let a_cand = &a * &cand;
            let f_cand = objective(&cand, &a_cand);
            if f_cand - reference >= ARMIJO * t * g2 - slack {
                accepted = Some((cand, a_cand, f_cand));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, a_cand, f_cand)) = accepted else {
            // no ascent representable in floating point
            let cert = certificate(&a, &y, &ay);
            return Ok(finish(&y, f, iter, gnorm, cert.dual_infeasibility));
        };
        let new_grad = riemannian_gradient(&cand, &a_cand);
        last_move = Some((&cand - &y, &grad - &new_grad));
        step = t;
        y = cand;
        ay = a_cand;
        f = f_cand;
        grad = new_grad;
        gnorm = grad.norm();
        recent.push_back(f);
        if recent.len() > MEMORY {
            recent.pop_front();
        }
    }

    let cert = certificate(&a, &y, &ay);
    let best = finish(&y, f, config.max_iterations, gnorm, cert.dual_infeasibility);
    Err(Error::SdpNotConverged {
        residual: gnorm,
        iterations: config.max_iterations,
        best: Box::new(best),
    })
}
