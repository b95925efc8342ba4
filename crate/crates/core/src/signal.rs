//! Composite link gains, SNR and harvested power, and the quadratic forms
//! `R`, `S` whose product defines the quartic phase objective.
//!
//! With `v = [e^{jθ₁}, …, e^{jθ_N}]ᴴ` and `v̄ = [v; 1]`:
//!
//! ```text
//! ‖H1(Θ)‖² = v̄ᴴ R v̄ + c1,   c1 = ‖h_CT‖²
//! |H2(Θ)|² = v̄ᴴ S v̄ + c2,   c2 = |h_TR|²
//! F(v̄)     = ‖H1‖² · |H2|² = ‖H2 · H1‖²
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::error::{domain, Error, Result};
use crate::linalg::{quad_form, rotate_last_to_one, CMatrix, CVector};

/// Tag parameters. Only `|b|` enters the optimization since all impedance
/// states share one reflection magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TagParams {
    pub reflection_magnitude: f64,
    pub impedance_count: usize,
    pub power_split: f64,
    /// ξ, Watts.
    pub circuit_power: f64,
    /// η.
    pub harvest_efficiency: f64,
}

impl Default for TagParams {
    fn default() -> Self {
        Self {
            reflection_magnitude: 1.0,
            impedance_count: 2,
            power_split: 1.0,
            circuit_power: 0.0,
            harvest_efficiency: 1.0,
        }
    }
}

impl TagParams {
    pub fn validate(&self) -> Result<()> {
        let b = self.reflection_magnitude;
        if !(b > 0.0 && b <= 1.0) {
            return Err(domain(format!("|b| must lie in (0, 1], got {b}")));
        }
        if self.impedance_count == 0 {
            return Err(domain("tag needs at least one impedance"));
        }
        if !(0.0..=1.0).contains(&self.power_split) {
            return Err(domain("power split must lie in [0, 1]"));
        }
        if !(self.circuit_power >= 0.0 && self.circuit_power.is_finite()) {
            return Err(domain("circuit power must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.harvest_efficiency) {
            return Err(domain("harvest efficiency must lie in [0, 1]"));
        }
        Ok(())
    }

    /// `|b|²`.
    pub fn reflection_power(&self) -> f64 {
        self.reflection_magnitude * self.reflection_magnitude
    }

    pub fn with_power_split(mut self, alpha: f64) -> Self {
        self.power_split = alpha;
        self
    }
}

/// Reader SNR target and noise power, both linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTarget {
    pub snr_threshold: f64,
    /// σ_R², Watts.
    pub noise_power: f64,
}

impl LinkTarget {
    pub fn new(snr_threshold: f64, noise_power: f64) -> Result<Self> {
        if !(snr_threshold > 0.0 && snr_threshold.is_finite()) {
            return Err(domain("SNR threshold must be positive"));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(domain("noise power must be positive"));
        }
        Ok(Self { snr_threshold, noise_power })
    }

    pub fn from_db(snr_threshold_db: f64, noise_power_dbm: f64) -> Result<Self> {
        Self::new(db_to_linear(snr_threshold_db), dbm_to_watts(noise_power_dbm))
    }

    /// `γ_th σ_R²`.
    pub fn required_power(&self) -> f64 {
        self.snr_threshold * self.noise_power
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0 - 3.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// IRS phase shifts θ ∈ [0, 2π)ᴺ.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    theta: Vec<f64>,
}

impl PhaseVector {
    /// Wraps every angle into [0, 2π).
    pub fn new(theta: impl IntoIterator<Item = f64>) -> Self {
        Self {
            theta: theta.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self { theta: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Diagonal of Θ: `e^{jθ_n}`.
    pub fn reflection(&self) -> CVector {
        CVector::from_iterator(self.len(), self.theta.iter().map(|&t| Complex64::from_polar(1.0, t)))
    }

    /// `v = [e^{jθ₁}, …]ᴴ`, i.e. `v_n = e^{−jθ_n}`.
    pub fn v(&self) -> CVector {
        CVector::from_iterator(self.len(), self.theta.iter().map(|&t| Complex64::from_polar(1.0, -t)))
    }

    /// `v̄ = [v; 1]`.
    pub fn v_bar(&self) -> CVector {
        homogenize(&self.v())
    }

    /// `v̄̄ = [v̄; 1]`.
    pub fn v_bar_bar(&self) -> CVector {
        homogenize(&self.v_bar())
    }

    /// Recovers θ from a unit-modulus `v̄`, rotating by the conjugate phase of
    /// its last entry first so that entry is 1.
    pub fn from_v_bar(v_bar: &CVector) -> Self {
        let n = v_bar.len().saturating_sub(1);
        let v = rotate_last_to_one(v_bar);
        Self::new((0..n).map(|i| -v[i].arg()))
    }

    /// Two-stage de-homogenization of a lifted vector `v̄̄`.
    pub fn from_v_bar_bar(v_bar_bar: &CVector) -> Self {
        let m = v_bar_bar.len();
        let outer = rotate_last_to_one(v_bar_bar);
        let v_bar = outer.rows(0, m.saturating_sub(1)).into_owned();
        Self::from_v_bar(&v_bar)
    }
}

pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Appends a trailing `1`.
pub fn homogenize(x: &CVector) -> CVector {
    let mut out = CVector::zeros(x.len() + 1);
    out.rows_mut(0, x.len()).copy_from(x);
    out[x.len()] = Complex64::new(1.0, 0.0);
    out
}

/// Effective CE→tag row `H1` (length L) and tag→reader scalar `H2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeLinks {
    pub h1: CVector,
    pub h2: Complex64,
}

impl CompositeLinks {
    /// `H2 · H1` as a length-L vector.
    pub fn cascade(&self) -> CVector {
        &self.h1 * self.h2
    }

    /// `‖H2 H1‖²`.
    pub fn cascade_gain(&self) -> f64 {
        self.h1.norm_squared() * self.h2.norm_sqr()
    }

    /// `(H1 w)`, the scalar incident field at the tag.
    pub fn incident(&self, w: &CVector) -> Complex64 {
        self.h1.dot(w)
    }
}

/// `H1 = h_TIᴴ Θ H_CI + h_CT`, `H2 = h_RIᴴ Θ h_TI + h_TR`.
pub fn composite_links(channels: &ChannelSet, phases: &PhaseVector) -> Result<CompositeLinks> {
    let n = channels.elements();
    if phases.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} phases for {n} IRS elements",
            phases.len()
        )));
    }
    let refl = phases.reflection();
    let l = channels.antennas();
    let mut h1 = channels.h_ct.clone();
    let mut h2 = channels.h_tr;
    for i in 0..n {
        let a = channels.h_ti[i].conj() * refl[i];
        for j in 0..l {
            h1[j] += a * channels.h_ci[(i, j)];
        }
        h2 += channels.h_ri[i].conj() * refl[i] * channels.h_ti[i];
    }
    Ok(CompositeLinks { h1, h2 })
}

/// `α|b|² |H2 (H1 w)|² / σ_R²`.
pub fn received_snr(links: &CompositeLinks, w: &CVector, tag: &TagParams, noise_power: f64) -> f64 {
    let field = links.h2 * links.incident(w);
    tag.power_split * tag.reflection_power() * field.norm_sqr() / noise_power
}

/// `η(1 − α)|H1 w|²`.
pub fn harvested_power(links: &CompositeLinks, w: &CVector, tag: &TagParams) -> f64 {
    tag.harvest_efficiency * (1.0 - tag.power_split) * links.incident(w).norm_sqr()
}

/// Hermitian `R`, `S` and constants `c1`, `c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForms {
    pub r: CMatrix,
    pub s: CMatrix,
    pub c1: f64,
    pub c2: f64,
}

impl QuadraticForms {
    pub fn new(channels: &ChannelSet) -> Self {
        let (r, c1) = build_r(channels);
        let (s, c2) = build_s(channels);
        Self { r, s, c1, c2 }
    }

    /// Dimension of `v̄` (N + 1).
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// `‖H1‖² = v̄ᴴRv̄ + c1`.
    pub fn first_hop(&self, v_bar: &CVector) -> f64 {
        quad_form(&self.r, v_bar) + self.c1
    }

    /// `|H2|² = v̄ᴴSv̄ + c2`.
    pub fn second_hop(&self, v_bar: &CVector) -> f64 {
        quad_form(&self.s, v_bar) + self.c2
    }

    pub fn quartic(&self, v_bar: &CVector) -> f64 {
        quartic_f(&self.r, &self.s, self.c1, self.c2, v_bar)
    }
}

/// Assembles `[[ΦΦᴴ, Φ hᴴ], [h Φᴴ, 0]]` from an N×K block `Φ` and a K-row `h`.
fn homogenized_gram(phi: &CMatrix, direct: &CVector) -> CMatrix {
    let n = phi.nrows();
    let mut out = CMatrix::zeros(n + 1, n + 1);
    out.view_mut((0, 0), (n, n)).copy_from(&(phi * phi.adjoint()));
    // Φ hᴴ where h is a row: Σ_k Φ_{nk} conj(h_k)
    let cross = phi * direct.map(|z| z.conj());
    for i in 0..n {
        out[(i, n)] = cross[i];
        out[(n, i)] = cross[i].conj();
    }
    out
}

/// `R` with `Φ_CIT = diag(h_TIᴴ) H_CI`, and `c1 = ‖h_CT‖²`.
pub fn build_r(channels: &ChannelSet) -> (CMatrix, f64) {
    let mut phi = channels.h_ci.clone();
    for (i, mut row) in phi.row_iter_mut().enumerate() {
        row *= channels.h_ti[i].conj();
    }
    (homogenized_gram(&phi, &channels.h_ct), channels.h_ct.norm_squared())
}

/// `S` with `Φ_TIR = diag(h_RIᴴ) h_TI` (an N-vector), and `c2 = |h_TR|²`.
pub fn build_s(channels: &ChannelSet) -> (CMatrix, f64) {
    let n = channels.elements();
    let phi = CMatrix::from_fn(n, 1, |i, _| channels.h_ri[i].conj() * channels.h_ti[i]);
    let direct = CVector::from_element(1, channels.h_tr);
    (homogenized_gram(&phi, &direct), channels.h_tr.norm_sqr())
}

/// `F(v̄) = (v̄ᴴRv̄ + c1)(v̄ᴴSv̄ + c2)`.
pub fn quartic_f(r: &CMatrix, s: &CMatrix, c1: f64, c2: f64, v_bar: &CVector) -> f64 {
    (quad_form(r, v_bar) + c1) * (quad_form(s, v_bar) + c2)
}
