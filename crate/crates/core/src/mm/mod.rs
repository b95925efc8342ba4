//! Minorization-maximization over IRS phase shifts.
//!
//! Each iteration replaces the quartic objective by a concave quadratic
//! model that touches it at the current point, lifts the model to a
//! unit-modulus quadratic program, solves its SDP relaxation and extracts a
//! unit-modulus point by Gaussian randomization.

mod dinkelbach;
mod minorizer;

pub use dinkelbach::{optimize_phases_dinkelbach, DinkelbachConfig, DinkelbachTrace};
pub use minorizer::{
    build_minorizer, estimate_curvature, CurvatureMode, MinorizerModel, QuarticObjective, CURVATURE_FLOOR,
    DEFAULT_FIXED_CURVATURE,
};

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelSet;
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_part, quad_form, random_unit_modulus, rotate_last_to_one, CMatrix, CVector};
use crate::sdp::{
    gaussian_randomize, randomization_candidates, solve_diag_sdp, solve_diag_sdp_warm, SdpProblem, SolverConfig,
};
use crate::seeds::derive_seed;
use crate::signal::{homogenize, PhaseVector, QuadraticForms};

#[derive(Debug, Clone, PartialEq)]
pub struct MmConfig {
    pub curvature: CurvatureMode,
    /// Stop once `|F⁽ⁱ⁺¹⁾ − F⁽ⁱ⁾| < threshold · |F⁽ⁱ⁾|`.
    pub convergence_threshold: f64,
    pub max_iterations: usize,
    /// Random initial points; extra starts passed by the caller are added.
    pub starts: usize,
    pub sdp: SolverConfig,
    pub seed: u64,
}

impl Default for MmConfig {
    fn default() -> Self {
        Self {
            curvature: CurvatureMode::Adaptive,
            convergence_threshold: 1e-4,
            max_iterations: 50,
            starts: 3,
            sdp: SolverConfig::default(),
            seed: 0,
        }
    }
}

impl MmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.convergence_threshold > 0.0) {
            return Err(domain("convergence threshold must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(domain("max_iterations must be at least 1"));
        }
        if let CurvatureMode::Fixed(l) = self.curvature {
            if !(l > 0.0 && l.is_finite()) {
                return Err(domain("fixed curvature must be positive and finite"));
            }
        }
        self.sdp.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MmTrace {
    /// Objective at the initial point followed by one value per iteration.
    pub objective: Vec<f64>,
    pub phases: Vec<PhaseVector>,
    /// Accepted curvature per iteration.
    pub curvature: Vec<f64>,
    pub converged: bool,
    /// Iterations whose SDP solve hit its limit (the best iterate was used).
    pub sdp_failures: usize,
    pub wall_time: Duration,
}

impl MmTrace {
    pub fn iterations(&self) -> usize {
        self.objective.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> f64 {
        self.objective.last().copied().unwrap_or(f64::NAN)
    }

    /// True when no step decreased the objective by more than `slack · |F|`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.objective.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs())
    }
}

fn relative_change(new: f64, old: f64) -> f64 {
    if new == old {
        return 0.0;
    }
    (new - old).abs() / old.abs().max(f64::MIN_POSITIVE)
}

/// Maximizes the lifted model through SDP + randomization. The previous
/// iterate is always among the candidates. Returns the chosen `v̄` (not yet
/// rotated to a unit last entry) and whether the SDP solve fell short.
fn maximize_model(model: &MinorizerModel, sdp: &SolverConfig, seed: u64) -> Result<(CVector, bool)> {
    let problem = SdpProblem::new(model.u.clone())?;
    let warm = model.closed_form_maximizer();
    let (solution, failed) = match solve_diag_sdp_warm(&problem, sdp, Some(&warm)) {
        Ok(s) => (s, false),
        Err(Error::SdpNotConverged { best, .. }) => (*best, true),
        Err(e) => return Err(e),
    };
    let previous = homogenize(&model.anchor);
    let previous_value = quad_form(&model.u, &previous);
    let mut best: Option<(CVector, f64)> = None;
    let drawn = randomization_candidates(&solution, &model.u, sdp.randomizations, seed)
        .into_iter()
        .map(|c| (c.x, c.value));
    for (x, value) in drawn.chain(std::iter::once((previous, previous_value))) {
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((x, value));
        }
    }
    let lifted = rotate_last_to_one(&best.expect("nonempty candidate list").0);
    Ok((lifted.rows(0, model.anchor.len()).into_owned(), failed))
}

/// Runs MM from one initial `v̄` until convergence or the iteration cap.
pub fn run_mm(objective: &QuarticObjective, init: &CVector, config: &MmConfig, seed: u64) -> Result<(CVector, MmTrace)> {
    config.validate()?;
    let started = Instant::now();
    let bound = objective.curvature_bound();
    let mut v = rotate_last_to_one(init);
    let mut f = objective.value(&v);
    let mut trace = MmTrace {
        objective: vec![f],
        phases: vec![PhaseVector::from_v_bar(&v)],
        ..MmTrace::default()
    };
    let mut ell = match config.curvature {
        CurvatureMode::Fixed(l) => l,
        CurvatureMode::Adaptive => (bound * 1e-3).max(CURVATURE_FLOOR),
    };

    for iter in 0..config.max_iterations {
        let iter_seed = derive_seed(seed, &[iter as u64]);
        let (candidate, f_candidate, failed) = loop {
            let model = objective.minorizer(&v, ell)?;
            let adaptive = matches!(config.curvature, CurvatureMode::Adaptive) && ell < bound;
            if adaptive {
                // screen ℓ with the closed-form maximizer before paying for the SDP
                let cf = model.closed_form_maximizer().rows(0, v.len()).into_owned();
                if !dominates(objective.value(&cf), model.value(&cf)) {
                    ell = (ell * 4.0).min(bound);
                    continue;
                }
            }
            let (cand, failed) = maximize_model(&model, &config.sdp, iter_seed)?;
            let fc = objective.value(&cand);
            if adaptive && !dominates(fc, model.value(&cand)) {
                ell = (ell * 4.0).min(bound);
                continue;
            }
            break (cand, fc, failed);
        };
        if failed {
            trace.sdp_failures += 1;
        }
        let previous = f;
        if f_candidate >= f {
            v = rotate_last_to_one(&candidate);
            f = f_candidate;
        }
        trace.objective.push(f);
        trace.phases.push(PhaseVector::from_v_bar(&v));
        trace.curvature.push(ell);
        if matches!(config.curvature, CurvatureMode::Adaptive) {
            ell = (ell * 0.5).max(CURVATURE_FLOOR);
        }
        if relative_change(f, previous) < config.convergence_threshold {
            trace.converged = true;
            break;
        }
    }
    trace.wall_time = started.elapsed();
    Ok((v, trace))
}

fn dominates(objective: f64, model: f64) -> bool {
    objective >= model - 1e-12 * (objective.abs() + model.abs())
}

/// Maximizes `v̄ᴴQv̄` over unit-modulus `v̄` with one SDP solve and
/// Gaussian randomization. Used for the single-hop objective `‖H1‖²`.
pub fn maximize_homogeneous_quadratic(q: &CMatrix, sdp: &SolverConfig) -> Result<PhaseVector> {
    let problem = SdpProblem::new(hermitian_part(q))?;
    let solution = match solve_diag_sdp(&problem, sdp) {
        Ok(s) => s,
        Err(Error::SdpNotConverged { best, .. }) => *best,
        Err(e) => return Err(e),
    };
    let best = gaussian_randomize(&solution, problem.cost(), sdp.randomizations, sdp.rng_seed);
    Ok(PhaseVector::from_v_bar(&best.x))
}

/// Best-of-starts result of [`optimize_phases_nc`].
#[derive(Debug, Clone, PartialEq)]
pub struct MmResult {
    pub phases: PhaseVector,
    /// `F` at the returned phases.
    pub objective: f64,
    /// Trace of the winning start.
    pub trace: MmTrace,
    /// Total MM iterations over all starts.
    pub total_iterations: usize,
}

/// Maximizes `F = ‖H1‖²|H2|²` from `config.starts` random initial phases.
pub fn optimize_phases_nc(channels: &ChannelSet, config: &MmConfig) -> Result<MmResult> {
    optimize_phases_nc_from(channels, config, &[])
}

/// As [`optimize_phases_nc`], additionally starting from each of `extra`.
pub fn optimize_phases_nc_from(channels: &ChannelSet, config: &MmConfig, extra: &[PhaseVector]) -> Result<MmResult> {
    let forms = QuadraticForms::new(channels);
    optimize_objective(&QuarticObjective::new(&forms), config, extra)
}

pub(crate) fn optimize_objective(
    objective: &QuarticObjective,
    config: &MmConfig,
    extra: &[PhaseVector],
) -> Result<MmResult> {
    config.validate()?;
    let n = objective.dim() - 1;
    for p in extra {
        if p.len() != n {
            return Err(Error::DimensionMismatch(format!("initial phases have {} entries, expected {n}", p.len())));
        }
    }
    let mut inits: Vec<CVector> = extra.iter().map(PhaseVector::v_bar).collect();
    for k in 0..config.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[0x1417, k as u64]));
        inits.push(homogenize(&random_unit_modulus(&mut rng, n)));
    }
    if inits.is_empty() {
        inits.push(PhaseVector::zeros(n).v_bar());
    }

    let runs: Vec<Result<(CVector, MmTrace)>> = inits
        .par_iter()
        .enumerate()
        .map(|(k, init)| run_mm(objective, init, config, derive_seed(config.seed, &[0x3a7, k as u64])))
        .collect();

    let mut best: Option<(CVector, MmTrace)> = None;
    let mut total = 0;
    for run in runs {
        let (v, trace) = run?;
        total += trace.iterations();
        let better = best.as_ref().is_none_or(|(_, b)| trace.final_objective() > b.final_objective());
        if better {
            best = Some((v, trace));
        }
    }
    let (v, trace) = best.expect("at least one start");
    Ok(MmResult {
        phases: PhaseVector::from_v_bar(&v),
        objective: objective.value(&v),
        trace,
        total_iterations: total,
    })
}
