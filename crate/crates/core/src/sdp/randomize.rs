//! Gaussian randomization: rank-one extraction from a relaxed solution.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SdpSolution;
use crate::linalg::{complex_gaussian, hermitian_eigen, project_unit_modulus, quad_form, rotate_last_to_one, CMatrix, CVector};

/// Eigenvalues below this are treated as zero before sampling.
const CLAMP: f64 = 1e-10;

/// A unit-modulus vector with last entry 1 and its objective `xᴴUx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub x: CVector,
    pub value: f64,
}

/// Sampling factor `L` with `LLᴴ = V` (up to clamped eigenvalues).
fn sampling_factor(solution: &SdpSolution) -> CMatrix {
    if let Some(y) = &solution.factor {
        return y.clone();
    }
    let (vals, vecs) = hermitian_eigen(&solution.v);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > CLAMP).collect();
    let mut l = CMatrix::zeros(solution.v.nrows(), keep.len().max(1));
    for (c, &k) in keep.iter().enumerate() {
        l.set_column(c, &(vecs.column(k) * Complex64::new(vals[k].sqrt(), 0.0)));
    }
    l
}

/// Draws `count` vectors `ξ ~ CN(0, V)`, projects each entry to the unit
/// circle and rotates so the last entry is 1. Deterministic for a seed; the
/// first `k` candidates are the same for every `count ≥ k`.
pub fn randomization_candidates(solution: &SdpSolution, u: &CMatrix, count: usize, seed: u64) -> Vec<Candidate> {
    let l = sampling_factor(solution);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = CVector::from_fn(l.ncols(), |_, _| complex_gaussian(&mut rng));
            let x = rotate_last_to_one(&project_unit_modulus(&(&l * r)));
            let value = quad_form(u, &x);
            Candidate { x, value }
        })
        .collect()
}

/// Best of [`randomization_candidates`] by `xᴴUx`; the earliest draw wins ties.
pub fn gaussian_randomize(solution: &SdpSolution, u: &CMatrix, count: usize, seed: u64) -> Candidate {
    let mut best: Option<Candidate> = None;
    for cand in randomization_candidates(solution, u, count.max(1), seed) {
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    best.expect("at least one candidate")
}
