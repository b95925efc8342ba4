//! Reference schemes and brute-force oracles.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelSet;
use crate::error::{domain, Error, Result};
use crate::linalg::{complex_gaussian, CVector};
use crate::mm::{maximize_homogeneous_quadratic, QuarticObjective};
use crate::power::{monostatic_phases, p_star};
use crate::sdp::SolverConfig;
use crate::signal::{LinkTarget, PhaseVector, QuadraticForms, TagParams};

/// Largest enumeration [`grid_search_oracle`] accepts.
pub const GRID_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    MmSdr,
    NoIrs,
    RandomPhases,
    AlignCit,
    AlignTir,
    GridOracle,
    Monostatic,
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] = [
        SchemeId::MmSdr,
        SchemeId::NoIrs,
        SchemeId::RandomPhases,
        SchemeId::AlignCit,
        SchemeId::AlignTir,
        SchemeId::GridOracle,
        SchemeId::Monostatic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::MmSdr => "mm_sdr",
            SchemeId::NoIrs => "no_irs",
            SchemeId::RandomPhases => "random_phases",
            SchemeId::AlignCit => "align_cit",
            SchemeId::AlignTir => "align_tir",
            SchemeId::GridOracle => "grid_oracle",
            SchemeId::Monostatic => "monostatic",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| domain(format!("unknown scheme '{s}'")))
    }
}

/// Which single link an alignment benchmark favours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignTarget {
    /// Maximize `‖H1‖²` (CE→IRS→tag plus CE→tag).
    Cit,
    /// Maximize `|H2|` (tag→IRS→reader plus tag→reader).
    Tir,
}

/// Minimum power with the IRS switched off.
pub fn no_irs_power(channels: &ChannelSet, tag: &TagParams, target: &LinkTarget) -> Result<f64> {
    p_star(&channels.without_irs(), &PhaseVector::zeros(channels.elements()), tag, target)
}

/// Uniform random phases for `seed`.
pub fn random_phases(elements: usize, seed: u64) -> PhaseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PhaseVector::new((0..elements).map(|_| rng.random_range(0.0..std::f64::consts::TAU)))
}

/// Minimum power with one draw of uniform random phases.
pub fn random_phase_power(channels: &ChannelSet, tag: &TagParams, target: &LinkTarget, seed: u64) -> Result<f64> {
    p_star(channels, &random_phases(channels.elements(), seed), tag, target)
}

/// Phases maximizing the gain of one link only.
pub fn align_single_link(channels: &ChannelSet, which: AlignTarget, sdp: &SolverConfig) -> Result<PhaseVector> {
    if channels.elements() == 0 {
        return Err(domain("alignment needs at least one IRS element"));
    }
    match which {
        AlignTarget::Tir => Ok(monostatic_phases(channels)),
        AlignTarget::Cit => maximize_homogeneous_quadratic(&QuadraticForms::new(channels).r, sdp),
    }
}

/// Exhaustive search of `F` over `θ_n ∈ {2πk/levels}`. Ties go to the
/// lowest enumeration index, with element 0 varying fastest.
pub fn grid_search_oracle(channels: &ChannelSet, levels: usize) -> Result<(PhaseVector, f64)> {
    let n = channels.elements();
    if levels == 0 {
        return Err(domain("grid needs at least one level"));
    }
    let required = (levels as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > GRID_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            limit: GRID_BUDGET,
        });
    }
    let forms = QuadraticForms::new(channels);
    let step = std::f64::consts::TAU / levels as f64;
    let phases_of = |mut k: u64| {
        PhaseVector::new((0..n).map(|_| {
            let d = k % levels as u64;
            k /= levels as u64;
            d as f64 * step
        }))
    };
    let (value, index) = (0..required as u64)
        .into_par_iter()
        .map(|k| (forms.quartic(&phases_of(k).v_bar()), k))
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok((phases_of(index), value))
}

/// Worst error of the directional derivative `2Re{(Tv̄₀)ᴴδ}` against central
/// differences of `F` along `directions` random unit directions, relative to
/// the gradient norm `‖2Tv̄₀‖`.
pub fn finite_diff_gradient_check(forms: &QuadraticForms, anchor: &CVector, step: f64, directions: usize, seed: u64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(domain("finite-difference step must be positive"));
    }
    if anchor.len() != forms.dim() {
        return Err(Error::DimensionMismatch("anchor length differs from form dimension".into()));
    }
    let objective = QuarticObjective::new(forms);
    let g = objective.linearization(anchor) * anchor;
    let scale = 2.0 * g.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Complex64::new(step, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let mut d = CVector::from_fn(anchor.len(), |_, _| complex_gaussian(&mut rng));
        d /= Complex64::new(d.norm(), 0.0);
        let fd = (objective.value(&(anchor + &d * h)) - objective.value(&(anchor - &d * h))) / (2.0 * step);
        let analytic = 2.0 * g.dotc(&d).re;
        worst = worst.max((fd - analytic).abs() / scale);
    }
    Ok(worst)
}
