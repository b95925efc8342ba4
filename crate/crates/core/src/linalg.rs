//! Small dense complex linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `Re{xᴴ A x}`; exact for Hermitian `A`.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

/// Entrywise projection onto the unit circle. Zeros map to `1`.
pub fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 && r.is_finite() {
        z / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

pub fn project_unit_modulus(x: &CVector) -> CVector {
    x.map(unit_phase)
}

/// Multiply `x` by the conjugate phase of its last entry so that entry becomes real positive.
pub fn rotate_last_to_one(x: &CVector) -> CVector {
    match x.len() {
        0 => x.clone(),
        n => {
            let rot = unit_phase(x[n - 1]).conj();
            let mut y = x * rot;
            // exact homogenization entry for unit-modulus inputs
            if (x[n - 1].norm() - 1.0).abs() < 1e-12 {
                y[n - 1] = Complex64::new(1.0, 0.0);
            }
            y
        }
    }
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let n = a.nrows();
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// `(A + Aᴴ)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn hermitian_eigen(a: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Spectral norm of a Hermitian matrix (largest absolute eigenvalue).
pub fn spectral_norm_hermitian(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Circularly-symmetric standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_unit_modulus<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    })
}
