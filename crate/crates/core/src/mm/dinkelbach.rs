//! Dinkelbach iterations for the ratio `A(Θ)/B(Θ)` with a circuit constraint.

use crate::channel::ChannelSet;
use crate::error::{domain, Result};
use crate::seeds::derive_seed;
use crate::signal::{LinkTarget, PhaseVector, QuadraticForms, TagParams};

use super::{maximize_homogeneous_quadratic, optimize_objective, run_mm, MmConfig, MmTrace, QuarticObjective};

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachConfig {
    /// Stop once `A − yB < tolerance · yB`, i.e. `y` moved by less than
    /// `tolerance` relative. Also caps the inner MM convergence threshold.
    pub tolerance: f64,
    pub max_outer_iterations: usize,
}

impl Default for DinkelbachConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_outer_iterations: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DinkelbachTrace {
    /// `y⁽⁰⁾, y⁽¹⁾, …`
    pub y: Vec<f64>,
    /// One MM trace per outer iteration.
    pub inner: Vec<MmTrace>,
    pub converged: bool,
    /// MM iterations spent choosing the initial point.
    pub initial_iterations: usize,
}

impl DinkelbachTrace {
    pub fn mm_iterations(&self) -> usize {
        self.initial_iterations + self.inner.iter().map(MmTrace::iterations).sum::<usize>()
    }
}

/// `A = |b|²‖H2H1‖²` and `B = γσ² + (ξ/η)|b|²|H2|²` at `v̄`.
struct Ratio<'a> {
    forms: &'a QuadraticForms,
    reflection: f64,
    circuit: f64,
    required: f64,
}

impl Ratio<'_> {
    fn parts(&self, phases: &PhaseVector) -> (f64, f64) {
        let vb = phases.v_bar();
        let a = self.reflection * self.forms.quartic(&vb);
        let b = self.required + self.circuit * self.reflection * self.forms.second_hop(&vb);
        (a, b)
    }

    fn value(&self, phases: &PhaseVector) -> f64 {
        let (a, b) = self.parts(phases);
        a / b
    }
}

/// Maximizes `A/B` over phases. Each outer step maximizes `A − yB` with MM
/// warm-started from the previous phases, so `y` never decreases.
///
/// The initial phases are the better (by `A/B`) of the circuit-free MM
/// solution and the `‖H1‖²` maximizer.
pub fn optimize_phases_dinkelbach(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    mm: &MmConfig,
    config: &DinkelbachConfig,
    extra_starts: &[PhaseVector],
) -> Result<(PhaseVector, DinkelbachTrace)> {
    tag.validate()?;
    if !(tag.circuit_power > 0.0) {
        return Err(domain("Dinkelbach iterations need a positive circuit power; use the circuit-free optimizer"));
    }
    if !(tag.harvest_efficiency > 0.0) {
        return Err(domain("harvest efficiency must be positive when circuit power is positive"));
    }
    if !(config.tolerance > 0.0) || config.max_outer_iterations == 0 {
        return Err(domain("Dinkelbach tolerance and iteration cap must be positive"));
    }
    let forms = QuadraticForms::new(channels);
    let ratio = Ratio {
        forms: &forms,
        reflection: tag.reflection_power(),
        circuit: tag.circuit_power / tag.harvest_efficiency,
        required: target.required_power(),
    };

    let nc = optimize_objective(&QuarticObjective::new(&forms), mm, extra_starts)?;
    let first_hop = maximize_homogeneous_quadratic(&forms.r, &mm.sdp)?;
    let mut trace = DinkelbachTrace {
        initial_iterations: nc.total_iterations,
        ..DinkelbachTrace::default()
    };
    let mut phases = if ratio.value(&first_hop) > ratio.value(&nc.phases) {
        first_hop
    } else {
        nc.phases
    };
    let mut y = ratio.value(&phases);
    trace.y.push(y);
    let inner_mm = MmConfig {
        convergence_threshold: mm.convergence_threshold.min(config.tolerance),
        ..mm.clone()
    };

    for outer in 0..config.max_outer_iterations {
        // A − yB = |b|²(F − y(ξ/η)|H2|²) − yγσ²
        let objective = QuarticObjective::with_penalty(&forms, y * ratio.circuit)?;
        let seed = derive_seed(mm.seed, &[0xd1, outer as u64]);
        let (v, inner) = run_mm(&objective, &phases.v_bar(), &inner_mm, seed)?;
        trace.inner.push(inner);
        let next = PhaseVector::from_v_bar(&v);
        let (a, b) = ratio.parts(&next);
        let gap = a - y * b;
        phases = next;
        y = y.max(a / b);
        trace.y.push(y);
        if gap < config.tolerance * y * b {
            trace.converged = true;
            break;
        }
    }
    Ok((phases, trace))
}
