//! Experiment configuration: a TOML file in dB/dBm units, resolved once into
//! linear quantities.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use backcom_core::geometry::wavelength;
use backcom_core::{
    Architecture, DinkelbachConfig, IrsGeometry, LinkTarget, MmConfig, Position2D, PowerConfig, RegimeChoice,
    RegimeThresholds, SchemeId, SolverConfig, StandInPathLoss, SystemLayout, TagParams,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Single,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Single => "single",
        }
    }

    pub fn default_schemes(self) -> Vec<SchemeId> {
        match self {
            Experiment::Fig2 => vec![
                SchemeId::MmSdr,
                SchemeId::NoIrs,
                SchemeId::RandomPhases,
                SchemeId::AlignCit,
                SchemeId::AlignTir,
            ],
            Experiment::Fig3 | Experiment::Single => vec![SchemeId::MmSdr, SchemeId::NoIrs],
            Experiment::Fig4 => vec![SchemeId::Monostatic, SchemeId::NoIrs],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Experiment::Fig2),
            "fig3" => Ok(Experiment::Fig3),
            "fig4" => Ok(Experiment::Fig4),
            "single" => Ok(Experiment::Single),
            other => Err(CliError::Config(format!(
                "unknown experiment '{other}' (expected fig2|fig3|fig4|single)"
            ))),
        }
    }
}

/// On-disk layout. Every field has a default, so an empty file is valid.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub seed: u64,
    pub realizations: usize,
    pub schemes: Option<Vec<String>>,
    pub regime: String,
    pub out: Option<PathBuf>,
    pub record_timing: bool,
    pub layout: LayoutSection,
    pub link: LinkSection,
    pub tag: TagSection,
    pub solver: SolverSection,
    pub fig2: Fig2Section,
    pub fig3: Fig3Section,
    pub fig4: Fig4Section,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 1,
            realizations: 100,
            schemes: None,
            regime: "auto".into(),
            out: None,
            record_timing: false,
            layout: LayoutSection::default(),
            link: LinkSection::default(),
            tag: TagSection::default(),
            solver: SolverSection::default(),
            fig2: Fig2Section::default(),
            fig3: Fig3Section::default(),
            fig4: Fig4Section::default(),
        }
    }
}

/// Bistatic layout shared by `fig2`, `fig3` and `single`.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    pub ce: [f64; 2],
    pub reader: [f64; 2],
    pub tag: [f64; 2],
    pub irs_center: [f64; 2],
    pub irs_orientation: [f64; 2],
    pub elements: usize,
    /// Element width in carrier wavelengths.
    pub element_width: f64,
    pub carrier_hz: f64,
    pub ce_antennas: usize,
    pub path_loss_exponent: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        Self {
            ce: [0.0, 0.0],
            reader: [100.0, 0.0],
            tag: [20.0, 0.0],
            irs_center: [20.0, 20.0],
            irs_orientation: [0.0, -1.0],
            elements: 64,
            element_width: 1.0,
            carrier_hz: 915e6,
            ce_antennas: 4,
            path_loss_exponent: 2.1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub snr_threshold_db: f64,
    pub noise_power_dbm: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            snr_threshold_db: 8.0,
            noise_power_dbm: -110.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TagSection {
    pub reflection_magnitude: f64,
    pub impedance_count: usize,
    /// ξ in dBm; absent means no circuit draw.
    pub circuit_power_dbm: Option<f64>,
    pub harvest_efficiency: f64,
}

impl Default for TagSection {
    fn default() -> Self {
        Self {
            reflection_magnitude: 1.0,
            impedance_count: 2,
            circuit_power_dbm: None,
            harvest_efficiency: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub convergence_threshold: f64,
    pub max_iterations: usize,
    /// Random MM initial points.
    pub random_starts: usize,
    /// Also start MM from the two single-link alignments.
    pub aligned_starts: bool,
    pub randomizations: usize,
    pub sdp_method: String,
    pub sdp_tolerance: f64,
    pub sdp_max_iterations: usize,
    pub dinkelbach_tolerance: f64,
    pub dinkelbach_max_outer: usize,
    pub circuit_limited_threshold: f64,
    pub noise_limited_threshold: f64,
    pub grid_levels: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let mm = MmConfig::default();
        let sdp = SolverConfig::default();
        let dk = DinkelbachConfig::default();
        let th = RegimeThresholds::default();
        Self {
            convergence_threshold: mm.convergence_threshold,
            max_iterations: mm.max_iterations,
            random_starts: 1,
            aligned_starts: true,
            randomizations: sdp.randomizations,
            sdp_method: "low_rank".into(),
            sdp_tolerance: sdp.stationarity_tolerance,
            sdp_max_iterations: sdp.max_iterations,
            dinkelbach_tolerance: dk.tolerance,
            dinkelbach_max_outer: dk.max_outer_iterations,
            circuit_limited_threshold: th.circuit_limited,
            noise_limited_threshold: th.noise_limited,
            grid_levels: 16,
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.start.is_finite() && self.stop >= self.start) {
            return Err(CliError::Config(format!("invalid range {self:?}")));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Section {
    pub tag_x: Range,
}

impl Default for Fig2Section {
    fn default() -> Self {
        Self {
            tag_x: Range {
                start: 5.0,
                stop: 95.0,
                step: 5.0,
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Section {
    pub elements: Vec<usize>,
}

impl Default for Fig3Section {
    fn default() -> Self {
        Self {
            elements: vec![16, 36, 49, 64, 100],
        }
    }
}

/// Monostatic sweep: tag at `distance` from the reader along `angle`,
/// measured from the reader→IRS direction.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4Section {
    pub reader: [f64; 2],
    pub irs_center: [f64; 2],
    pub irs_orientation: [f64; 2],
    pub distances_m: Range,
    pub angles_deg: Vec<f64>,
}

impl Default for Fig4Section {
    fn default() -> Self {
        Self {
            reader: [0.0, 0.0],
            irs_center: [40.0, 0.0],
            irs_orientation: [-1.0, 0.0],
            distances_m: Range {
                start: 5.0,
                stop: 35.0,
                step: 5.0,
            },
            angles_deg: vec![0.0, 45.0, 90.0, 135.0, 180.0],
        }
    }
}

/// Resolved configuration, linear units throughout.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub realizations: usize,
    pub schemes: Vec<SchemeId>,
    pub out: PathBuf,
    pub record_timing: bool,
    /// Bistatic base layout; the sweeps modify tag position or `N`.
    pub layout: SystemLayout,
    pub path_loss: StandInPathLoss,
    pub target: LinkTarget,
    pub tag: TagParams,
    pub power: PowerConfig,
    pub random_starts: usize,
    pub aligned_starts: bool,
    pub grid_levels: usize,
    pub fig2_tag_x: Vec<f64>,
    pub fig3_elements: Vec<usize>,
    pub fig4_reader: Position2D,
    pub fig4_irs: IrsGeometry,
    pub fig4_distances: Vec<f64>,
    pub fig4_angles_deg: Vec<f64>,
}

fn position(p: [f64; 2]) -> Position2D {
    Position2D::new(p[0], p[1])
}

fn config_err(e: backcom_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Converts dB quantities and builds core configs. `fallback` is used when
    /// the file names no experiment.
    pub fn resolve(&self, fallback: Experiment) -> Result<ExperimentConfig> {
        let experiment = match &self.experiment {
            Some(name) => name.parse()?,
            None => fallback,
        };
        if self.realizations == 0 {
            return Err(CliError::Config("realizations must be at least 1".into()));
        }
        let schemes = match &self.schemes {
            Some(list) => parse_schemes(list.iter().map(String::as_str))?,
            None => experiment.default_schemes(),
        };

        let l = &self.layout;
        if !(l.carrier_hz > 0.0) {
            return Err(CliError::Config("carrier frequency must be positive".into()));
        }
        let lambda = wavelength(l.carrier_hz);
        let width = l.element_width * lambda;
        let irs = IrsGeometry::new(position(l.irs_center), l.irs_orientation, l.elements, width).map_err(config_err)?;
        let layout = SystemLayout {
            ce_position: position(l.ce),
            reader_position: position(l.reader),
            tag_position: position(l.tag),
            irs,
            wavelength: lambda,
            ce_antennas: l.ce_antennas,
            architecture: Architecture::Bistatic,
        };
        layout.validate().map_err(config_err)?;
        let path_loss = StandInPathLoss::new(l.path_loss_exponent).map_err(config_err)?;

        let target = LinkTarget::from_db(self.link.snr_threshold_db, self.link.noise_power_dbm).map_err(config_err)?;
        let tag = TagParams {
            reflection_magnitude: self.tag.reflection_magnitude,
            impedance_count: self.tag.impedance_count,
            power_split: 1.0,
            circuit_power: self.tag.circuit_power_dbm.map_or(0.0, backcom_core::signal::dbm_to_watts),
            harvest_efficiency: self.tag.harvest_efficiency,
        };
        tag.validate().map_err(config_err)?;

        let s = &self.solver;
        let method = match s.sdp_method.as_str() {
            "low_rank" => backcom_core::SdpMethod::LowRank,
            "interior_point" => backcom_core::SdpMethod::InteriorPoint,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sdp_method '{other}' (expected low_rank|interior_point)"
                )))
            }
        };
        let sdp = SolverConfig {
            method,
            max_iterations: s.sdp_max_iterations,
            stationarity_tolerance: s.sdp_tolerance,
            randomizations: s.randomizations,
            ..SolverConfig::default()
        };
        let mm = MmConfig {
            convergence_threshold: s.convergence_threshold,
            max_iterations: s.max_iterations,
            starts: s.random_starts,
            sdp,
            ..MmConfig::default()
        };
        mm.validate().map_err(config_err)?;
        if s.random_starts == 0 && !s.aligned_starts {
            return Err(CliError::Config("MM needs random or aligned starts".into()));
        }
        let power = PowerConfig {
            mm,
            dinkelbach: DinkelbachConfig {
                tolerance: s.dinkelbach_tolerance,
                max_outer_iterations: s.dinkelbach_max_outer,
            },
            thresholds: RegimeThresholds {
                circuit_limited: s.circuit_limited_threshold,
                noise_limited: s.noise_limited_threshold,
            },
            regime: self.regime.parse().map_err(config_err)?,
        };
        if s.grid_levels < 2 {
            return Err(CliError::Config("grid_levels must be at least 2".into()));
        }

        let f4 = &self.fig4;
        let fig4_irs = IrsGeometry::new(position(f4.irs_center), f4.irs_orientation, l.elements, width).map_err(config_err)?;
        if self.fig3.elements.is_empty() || self.fig3.elements.contains(&0) {
            return Err(CliError::Config("fig3.elements must be a nonempty list of positive counts".into()));
        }
        if f4.angles_deg.is_empty() {
            return Err(CliError::Config("fig4.angles_deg must not be empty".into()));
        }

        Ok(ExperimentConfig {
            experiment,
            seed: self.seed,
            realizations: self.realizations,
            schemes,
            out: self.out.clone().unwrap_or_else(|| PathBuf::from("results").join(experiment.name())),
            record_timing: self.record_timing,
            layout,
            path_loss,
            target,
            tag,
            power,
            random_starts: s.random_starts,
            aligned_starts: s.aligned_starts,
            grid_levels: s.grid_levels,
            fig2_tag_x: self.fig2.tag_x.values()?,
            fig3_elements: self.fig3.elements.clone(),
            fig4_reader: position(f4.reader),
            fig4_irs,
            fig4_distances: f4.distances_m.values()?,
            fig4_angles_deg: f4.angles_deg.clone(),
        })
    }
}

impl ExperimentConfig {
    /// Defaults for `experiment` with no config file.
    pub fn defaults(experiment: Experiment) -> Self {
        ConfigFile::default()
            .resolve(experiment)
            .expect("built-in defaults are valid")
    }
}

/// Parses scheme names, rejecting duplicates.
pub fn parse_schemes<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Vec<SchemeId>> {
    let mut out = Vec::new();
    for name in names {
        let id: SchemeId = name.trim().parse().map_err(config_err)?;
        if out.contains(&id) {
            return Err(CliError::Config(format!("scheme '{id}' listed twice")));
        }
        out.push(id);
    }
    if out.is_empty() {
        return Err(CliError::Config("at least one scheme is required".into()));
    }
    Ok(out)
}

/// Parses `--regime`.
pub fn parse_regime(s: &str) -> Result<RegimeChoice> {
    s.parse().map_err(config_err)
}
