//! Beamforming, power splitting and minimum transmit power.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::error::{domain, Error, Result};
use crate::geometry::Architecture;
use crate::linalg::CVector;
use crate::mm::{
    maximize_homogeneous_quadratic, optimize_phases_dinkelbach, optimize_phases_nc_from, DinkelbachConfig,
    DinkelbachTrace, MmConfig, MmTrace,
};
use crate::signal::{composite_links, CompositeLinks, LinkTarget, PhaseVector, QuadraticForms, TagParams};

/// Which solution path produced a [`SolverSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    NoCircuit,
    Dinkelbach,
    CircuitLimited,
    NoiseLimited,
    Monostatic,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NoCircuit => "no_circuit",
            Regime::Dinkelbach => "dinkelbach",
            Regime::CircuitLimited => "circuit_limited",
            Regime::NoiseLimited => "noise_limited",
            Regime::Monostatic => "monostatic",
        }
    }
}

/// Requested path when the tag has a circuit power draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegimeChoice {
    /// Pick from the regime indicator and [`RegimeThresholds`].
    #[default]
    Auto,
    Dinkelbach,
    Circuit,
    Noise,
}

impl FromStr for RegimeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dinkelbach" => Ok(Self::Dinkelbach),
            "circuit" => Ok(Self::Circuit),
            "noise" => Ok(Self::Noise),
            other => Err(domain(format!("unknown regime '{other}' (expected auto|dinkelbach|circuit|noise)"))),
        }
    }
}

impl fmt::Display for RegimeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Dinkelbach => "dinkelbach",
            Self::Circuit => "circuit",
            Self::Noise => "noise",
        })
    }
}

/// Indicator `(ξ/η)|b|²|H2|² / (γσ²)` cut-offs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// At or above: circuit-limited shortcut.
    pub circuit_limited: f64,
    /// At or below: noise-limited shortcut.
    pub noise_limited: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            circuit_limited: 100.0,
            noise_limited: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerConfig {
    pub mm: MmConfig,
    pub dinkelbach: DinkelbachConfig,
    pub thresholds: RegimeThresholds,
    pub regime: RegimeChoice,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// MM iterations summed over starts and outer iterations.
    pub mm_iterations: usize,
    pub trace: Option<MmTrace>,
    pub dinkelbach: Option<DinkelbachTrace>,
    pub regime_indicator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSolution {
    pub w: CVector,
    pub theta: PhaseVector,
    pub alpha: f64,
    /// Watts; equals `‖w‖²`.
    pub p_star: f64,
    pub regime: Regime,
    pub diagnostics: Diagnostics,
}

/// `w = √P (H2H1)ᴴ / ‖H2H1‖`.
pub fn mrt_beamformer(links: &CompositeLinks, power: f64) -> Result<CVector> {
    if !(power >= 0.0 && power.is_finite()) {
        return Err(domain("beam power must be finite and nonnegative"));
    }
    let cascade = links.cascade();
    let norm = cascade.norm();
    if !(norm > 0.0) {
        return Err(domain("composite channel is zero; no beam direction"));
    }
    Ok(cascade.map(|z| z.conj()) * Complex64::new(power.sqrt() / norm, 0.0))
}

fn gains(channels: &ChannelSet, phases: &PhaseVector) -> Result<(CompositeLinks, f64, f64)> {
    let links = composite_links(channels, phases)?;
    let h1 = links.h1.norm_squared();
    let cascade = links.cascade_gain();
    if !(cascade > 0.0) || !(h1 > 0.0) {
        return Err(Error::Infeasible("composite channel vanishes".into()));
    }
    Ok((links, h1, cascade))
}

/// Power split equating the SNR and harvesting requirements.
pub fn alpha_star(channels: &ChannelSet, phases: &PhaseVector, tag: &TagParams, target: &LinkTarget) -> Result<f64> {
    tag.validate()?;
    let (_, h1, cascade) = gains(channels, phases)?;
    if tag.circuit_power == 0.0 {
        return Ok(1.0);
    }
    let lhs = tag.harvest_efficiency * target.required_power() * h1;
    Ok(lhs / (tag.circuit_power * tag.reflection_power() * cascade + lhs))
}

/// `(γσ² + (ξ/η)|b|²|H2|²) / (|b|²‖H2H1‖²)`.
pub fn p_star(channels: &ChannelSet, phases: &PhaseVector, tag: &TagParams, target: &LinkTarget) -> Result<f64> {
    tag.validate()?;
    let (links, _, cascade) = gains(channels, phases)?;
    let b2 = tag.reflection_power();
    let circuit = if tag.circuit_power > 0.0 {
        if !(tag.harvest_efficiency > 0.0) {
            return Err(Error::Infeasible("circuit power with zero harvesting efficiency".into()));
        }
        tag.circuit_power / tag.harvest_efficiency * b2 * links.h2.norm_sqr()
    } else {
        0.0
    };
    Ok((target.required_power() + circuit) / (b2 * cascade))
}

/// The two powers required by the SNR and harvesting constraints at split
/// `alpha`; the minimum transmit power for that split is their maximum.
pub fn power_branches(
    channels: &ChannelSet,
    phases: &PhaseVector,
    tag: &TagParams,
    target: &LinkTarget,
    alpha: f64,
) -> Result<(f64, f64)> {
    let (_, h1, cascade) = gains(channels, phases)?;
    let snr = target.required_power() / (alpha * tag.reflection_power() * cascade);
    let harvest = tag.circuit_power / (tag.harvest_efficiency * (1.0 - alpha) * h1);
    Ok((snr, harvest))
}

/// `(ξ/η)|b|²|H2|² / (γσ²)`.
pub fn regime_indicator(channels: &ChannelSet, phases: &PhaseVector, tag: &TagParams, target: &LinkTarget) -> Result<f64> {
    let links = composite_links(channels, phases)?;
    if tag.circuit_power == 0.0 {
        return Ok(0.0);
    }
    Ok(tag.circuit_power / tag.harvest_efficiency * tag.reflection_power() * links.h2.norm_sqr() / target.required_power())
}

fn finish(
    channels: &ChannelSet,
    theta: PhaseVector,
    tag: &TagParams,
    target: &LinkTarget,
    regime: Regime,
    diagnostics: Diagnostics,
) -> Result<SolverSolution> {
    let alpha = alpha_star(channels, &theta, tag, target)?;
    let p = p_star(channels, &theta, tag, target)?;
    let links = composite_links(channels, &theta)?;
    let w = mrt_beamformer(&links, p)?;
    Ok(SolverSolution {
        w,
        theta,
        alpha,
        p_star: p,
        regime,
        diagnostics,
    })
}

fn require_circuit(tag: &TagParams, want: bool) -> Result<()> {
    tag.validate()?;
    match (tag.circuit_power > 0.0, want) {
        (true, false) => Err(domain("this path assumes zero circuit power")),
        (false, true) => Err(domain("this path assumes positive circuit power")),
        _ => Ok(()),
    }
}

/// Minimum power for a tag with no circuit draw: MM phases, `α = 1`, MRT.
pub fn min_power_no_circuit(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    mm: &MmConfig,
    extra_starts: &[PhaseVector],
) -> Result<SolverSolution> {
    require_circuit(tag, false)?;
    let res = optimize_phases_nc_from(channels, mm, extra_starts)?;
    let diagnostics = Diagnostics {
        mm_iterations: res.total_iterations,
        trace: Some(res.trace),
        ..Diagnostics::default()
    };
    finish(channels, res.phases, tag, target, Regime::NoCircuit, diagnostics)
}

/// Circuit-dominated shortcut: phases maximize `‖H1‖²` alone.
pub fn solve_circuit_limited(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    mm: &MmConfig,
) -> Result<SolverSolution> {
    require_circuit(tag, true)?;
    let forms = QuadraticForms::new(channels);
    let theta = maximize_homogeneous_quadratic(&forms.r, &mm.sdp)?;
    let indicator = regime_indicator(channels, &theta, tag, target)?;
    let diagnostics = Diagnostics {
        regime_indicator: Some(indicator),
        ..Diagnostics::default()
    };
    finish(channels, theta, tag, target, Regime::CircuitLimited, diagnostics)
}

/// Noise-dominated shortcut: circuit-free MM phases, then `α*` and `P*`.
pub fn solve_noise_limited(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    mm: &MmConfig,
    extra_starts: &[PhaseVector],
) -> Result<SolverSolution> {
    require_circuit(tag, true)?;
    let res = optimize_phases_nc_from(channels, mm, extra_starts)?;
    let indicator = regime_indicator(channels, &res.phases, tag, target)?;
    let diagnostics = Diagnostics {
        mm_iterations: res.total_iterations,
        trace: Some(res.trace),
        regime_indicator: Some(indicator),
        ..Diagnostics::default()
    };
    finish(channels, res.phases, tag, target, Regime::NoiseLimited, diagnostics)
}

/// Full Dinkelbach maximization of `A/B`.
pub fn solve_dinkelbach(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    mm: &MmConfig,
    dinkelbach: &DinkelbachConfig,
    extra_starts: &[PhaseVector],
) -> Result<SolverSolution> {
    require_circuit(tag, true)?;
    let (theta, trace) = optimize_phases_dinkelbach(channels, tag, target, mm, dinkelbach, extra_starts)?;
    let indicator = regime_indicator(channels, &theta, tag, target)?;
    let diagnostics = Diagnostics {
        mm_iterations: trace.mm_iterations(),
        trace: trace.inner.last().cloned(),
        dinkelbach: Some(trace),
        regime_indicator: Some(indicator),
    };
    finish(channels, theta, tag, target, Regime::Dinkelbach, diagnostics)
}

/// Phases that co-phase every IRS path of the tag↔reader link with `h_TR`.
pub fn monostatic_phases(channels: &ChannelSet) -> PhaseVector {
    let base = channels.h_tr.arg();
    PhaseVector::new(
        channels
            .h_ri
            .iter()
            .zip(channels.h_ti.iter())
            .map(|(ri, ti)| base + ri.arg() - ti.arg()),
    )
}

/// Closed-form solution for a single-antenna monostatic reader.
pub fn solve_monostatic(channels: &ChannelSet, tag: &TagParams, target: &LinkTarget) -> Result<SolverSolution> {
    if channels.architecture != Architecture::Monostatic {
        return Err(domain("closed form requires a monostatic channel set"));
    }
    if channels.antennas() != 1 {
        return Err(domain("closed form requires a single-antenna reader"));
    }
    require_circuit(tag, false)?;
    finish(
        channels,
        monostatic_phases(channels),
        tag,
        target,
        Regime::Monostatic,
        Diagnostics::default(),
    )
}

/// Dispatches on architecture, circuit power and `config.regime`.
pub fn solve(
    channels: &ChannelSet,
    tag: &TagParams,
    target: &LinkTarget,
    config: &PowerConfig,
    extra_starts: &[PhaseVector],
) -> Result<SolverSolution> {
    tag.validate()?;
    if channels.architecture == Architecture::Monostatic && tag.circuit_power == 0.0 && channels.antennas() == 1 {
        return solve_monostatic(channels, tag, target);
    }
    if tag.circuit_power == 0.0 {
        return min_power_no_circuit(channels, tag, target, &config.mm, extra_starts);
    }
    match config.regime {
        RegimeChoice::Dinkelbach => solve_dinkelbach(channels, tag, target, &config.mm, &config.dinkelbach, extra_starts),
        RegimeChoice::Circuit => solve_circuit_limited(channels, tag, target, &config.mm),
        RegimeChoice::Noise => solve_noise_limited(channels, tag, target, &config.mm, extra_starts),
        RegimeChoice::Auto => {
            let probe = optimize_phases_nc_from(channels, &config.mm, extra_starts)?;
            let indicator = regime_indicator(channels, &probe.phases, tag, target)?;
            if indicator >= config.thresholds.circuit_limited {
                solve_circuit_limited(channels, tag, target, &config.mm)
            } else if indicator <= config.thresholds.noise_limited {
                let diagnostics = Diagnostics {
                    mm_iterations: probe.total_iterations,
                    trace: Some(probe.trace),
                    regime_indicator: Some(indicator),
                    ..Diagnostics::default()
                };
                finish(channels, probe.phases, tag, target, Regime::NoiseLimited, diagnostics)
            } else {
                solve_dinkelbach(channels, tag, target, &config.mm, &config.dinkelbach, extra_starts)
            }
        }
    }
}
