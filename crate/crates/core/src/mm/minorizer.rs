//! Quadratic minorizer of the quartic objective on the unit-modulus torus.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::linalg::{quad_form, spectral_norm_hermitian, CMatrix, CVector};
use crate::signal::{homogenize, QuadraticForms};

/// Smallest curvature ever used.
pub const CURVATURE_FLOOR: f64 = 1e-30;

/// Default constant for [`CurvatureMode::Fixed`].
pub const DEFAULT_FIXED_CURVATURE: f64 = 2.5e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureMode {
    /// Use this `ℓ` verbatim at every iteration.
    Fixed(f64),
    /// Backtrack on `ℓ` until the model lies below the objective at the new
    /// point, never exceeding [`QuarticObjective::curvature_bound`].
    Adaptive,
}

/// `G(v̄) = F(v̄) − κ(v̄ᴴSv̄ + c2)` with `F = (v̄ᴴRv̄ + c1)(v̄ᴴSv̄ + c2)`.
///
/// `κ = 0` is the plain quartic; `κ > 0` is the Dinkelbach inner objective.
#[derive(Debug, Clone, Copy)]
pub struct QuarticObjective<'a> {
    pub forms: &'a QuadraticForms,
    pub kappa: f64,
}

impl<'a> QuarticObjective<'a> {
    pub fn new(forms: &'a QuadraticForms) -> Self {
        Self { forms, kappa: 0.0 }
    }

    pub fn with_penalty(forms: &'a QuadraticForms, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(domain("penalty weight must be finite and nonnegative"));
        }
        Ok(Self { forms, kappa })
    }

    pub fn dim(&self) -> usize {
        self.forms.dim()
    }

    pub fn value(&self, v_bar: &CVector) -> f64 {
        let a = self.forms.first_hop(v_bar);
        let b = self.forms.second_hop(v_bar);
        a * b - self.kappa * b
    }

    /// `T − κS`; the Wirtinger gradient of `G` at `v̄₀` is `2(T − κS)v̄₀`.
    pub fn linearization(&self, anchor: &CVector) -> CMatrix {
        let f = self.forms;
        let rv = &f.r * anchor;
        let sv = &f.s * anchor;
        let mut t = &rv * sv.adjoint() + &sv * rv.adjoint();
        t += &f.r * Complex64::new(f.c2, 0.0);
        t += &f.s * Complex64::new(f.c1 - self.kappa, 0.0);
        t
    }

    /// Bound on the spectral norm of the real Hessian of `G` over the convex
    /// hull of the torus (`‖v̄‖² ≤ N + 1`).
    pub fn curvature_bound(&self) -> f64 {
        let f = self.forms;
        let nr = spectral_norm_hermitian(&f.r);
        let ns = spectral_norm_hermitian(&f.s);
        let m = f.dim() as f64;
        let bound = 12.0 * m * nr * ns + 2.0 * f.c2 * nr + 2.0 * f.c1 * ns + 2.0 * self.kappa * ns;
        bound.max(CURVATURE_FLOOR)
    }

    pub fn minorizer(&self, anchor: &CVector, curvature: f64) -> Result<MinorizerModel> {
        if anchor.len() != self.dim() {
            return Err(domain(format!("anchor has {} entries, expected {}", anchor.len(), self.dim())));
        }
        if anchor.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(domain("anchor must be unit-modulus"));
        }
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(domain("curvature must be positive and finite"));
        }
        let m = self.dim();
        let t = self.linearization(anchor);
        let g = &t * anchor;
        let q = -(&g * Complex64::new(2.0 / curvature, 0.0)) - anchor;

        let mut u = CMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            u[(i, i)] = Complex64::new(-1.0, 0.0);
            u[(i, m)] = -q[i];
            u[(m, i)] = -q[i].conj();
        }

        let constant = self.value(anchor) - 2.0 * quad_form(&t, anchor) - 0.5 * curvature * anchor.norm_squared();
        Ok(MinorizerModel {
            t,
            u,
            curvature,
            anchor: anchor.clone(),
            constant,
        })
    }
}

/// `G(v̄₀) + 2Re{(Tv̄₀)ᴴ(v̄ − v̄₀)} − (ℓ/2)‖v̄ − v̄₀‖²`, stored in lifted form
/// `(ℓ/2) v̄̄ᴴUv̄̄ + c` with `U = −[[I, q], [qᴴ, 0]]`, `q = −(2/ℓ)Tv̄₀ − v̄₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorizerModel {
    pub t: CMatrix,
    pub u: CMatrix,
    pub curvature: f64,
    pub anchor: CVector,
    pub constant: f64,
}

impl MinorizerModel {
    /// Model value at a unit-modulus `v̄`.
    pub fn value(&self, v_bar: &CVector) -> f64 {
        self.lifted_value(&homogenize(v_bar))
    }

    pub fn lifted_value(&self, v_bar_bar: &CVector) -> f64 {
        0.5 * self.curvature * quad_form(&self.u, v_bar_bar) + self.constant
    }

    /// Global maximizer of the model over the torus, `phase(v̄₀ + (2/ℓ)Tv̄₀)`,
    /// lifted with a trailing 1.
    pub fn closed_form_maximizer(&self) -> CVector {
        let m = self.anchor.len();
        CVector::from_fn(m + 1, |i, _| {
            if i == m {
                Complex64::new(1.0, 0.0)
            } else {
                crate::linalg::unit_phase(self.u[(i, m)])
            }
        })
    }
}

/// Curvature to use for `forms` under `mode`.
pub fn estimate_curvature(forms: &QuadraticForms, mode: CurvatureMode) -> f64 {
    match mode {
        CurvatureMode::Fixed(l) => l.max(CURVATURE_FLOOR),
        CurvatureMode::Adaptive => QuarticObjective::new(forms).curvature_bound(),
    }
}

/// Minorizer of the plain quartic `F` at `anchor`.
pub fn build_minorizer(forms: &QuadraticForms, anchor: &CVector, curvature: f64) -> Result<MinorizerModel> {
    QuarticObjective::new(forms).minorizer(anchor, curvature)
}
