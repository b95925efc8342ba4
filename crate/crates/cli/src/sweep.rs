//! Seeded Monte-Carlo sweeps.

use std::time::Instant;

use backcom_core::benchmarks::{align_single_link, grid_search_oracle, no_irs_power, random_phase_power};
use backcom_core::power::{p_star, solve, solve_monostatic};
use backcom_core::seeds::{derive_seed, label_seed};
use backcom_core::signal::watts_to_dbm;
use backcom_core::{
    synthesize_channels, AlignTarget, Architecture, ChannelSet, Error, IrsGeometry, PhaseVector, Position2D,
    SchemeId, SystemLayout,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};

/// One `results.csv` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub sweep_var_name: String,
    pub sweep_var_value: f64,
    pub scheme: String,
    pub realization: usize,
    /// Empty when infeasible.
    pub p_star_dbm: Option<f64>,
    pub feasible: bool,
    pub mm_iterations: usize,
    pub wall_ms: f64,
}

/// Rows sorted by (point, scheme, realization).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: Experiment,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub var_name: String,
    pub value: f64,
    pub layout: SystemLayout,
}

/// Sweep points for `experiment`, in output order.
pub fn sweep_points(cfg: &ExperimentConfig, experiment: Experiment) -> Result<Vec<SweepPoint>> {
    let base = &cfg.layout;
    let points = match experiment {
        Experiment::Single => vec![SweepPoint {
            var_name: "none".into(),
            value: 0.0,
            layout: base.clone(),
        }],
        Experiment::Fig2 => cfg
            .fig2_tag_x
            .iter()
            .map(|&x| SweepPoint {
                var_name: "tag_x_m".into(),
                value: x,
                layout: SystemLayout {
                    tag_position: Position2D::new(x, base.tag_position.y),
                    ..base.clone()
                },
            })
            .collect(),
        Experiment::Fig3 => cfg
            .fig3_elements
            .iter()
            .map(|&n| {
                let irs = IrsGeometry::new(base.irs.center, base.irs.orientation, n, base.irs.element_width)?;
                Ok(SweepPoint {
                    var_name: "elements".into(),
                    value: n as f64,
                    layout: SystemLayout { irs, ..base.clone() },
                })
            })
            .collect::<std::result::Result<_, Error>>()?,
        Experiment::Fig4 => {
            let reader = cfg.fig4_reader;
            let irs = cfg.fig4_irs.clone();
            let dx = irs.center.x - reader.x;
            let dy = irs.center.y - reader.y;
            let base_angle = dy.atan2(dx);
            let mut out = Vec::new();
            for &angle in &cfg.fig4_angles_deg {
                let a = base_angle + angle.to_radians();
                for &d in &cfg.fig4_distances {
                    out.push(SweepPoint {
                        var_name: format!("distance_m@angle_deg={angle}"),
                        value: d,
                        layout: SystemLayout {
                            ce_position: reader,
                            reader_position: reader,
                            tag_position: Position2D::new(reader.x + d * a.cos(), reader.y + d * a.sin()),
                            irs: irs.clone(),
                            wavelength: base.wavelength,
                            ce_antennas: 1,
                            architecture: Architecture::Monostatic,
                        },
                    });
                }
            }
            out
        }
    };
    for p in &points {
        p.layout.validate()?;
    }
    Ok(points)
}

/// Outcome of one scheme on one realization.
#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    p_star: Option<f64>,
    mm_iterations: usize,
    wall_ms: f64,
}

fn feasible(r: backcom_core::Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(p) if p.is_finite() && p > 0.0 => Ok(Some(p)),
        Ok(_) | Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Evaluates every configured scheme on one channel realization.
fn evaluate(cfg: &ExperimentConfig, channels: &ChannelSet, seed: u64) -> Result<Vec<(SchemeId, Outcome)>> {
    let tag = &cfg.tag;
    let target = &cfg.target;
    let wants = |id| cfg.schemes.contains(&id);
    let mut sdp = cfg.power.mm.sdp.clone();
    sdp.rng_seed = derive_seed(seed, &[label_seed("align_cit")]);

    let needs_aligned = cfg.aligned_starts && wants(SchemeId::MmSdr) && channels.elements() > 0;
    let mut cit: Option<(PhaseVector, f64)> = None;
    if wants(SchemeId::AlignCit) || needs_aligned {
        let t = Instant::now();
        let phases = align_single_link(channels, AlignTarget::Cit, &sdp)?;
        cit = Some((phases, elapsed_ms(t)));
    }
    let t = Instant::now();
    let tir = align_single_link(channels, AlignTarget::Tir, &sdp)?;
    let tir_ms = elapsed_ms(t);

    let mut out = Vec::with_capacity(cfg.schemes.len());
    for &id in &cfg.schemes {
        let start = Instant::now();
        let mut mm_iterations = 0;
        let mut extra_ms = 0.0;
        let p = match id {
            SchemeId::MmSdr => {
                let mut power = cfg.power.clone();
                power.mm.seed = derive_seed(seed, &[label_seed("mm_sdr")]);
                power.mm.sdp.rng_seed = derive_seed(seed, &[label_seed("mm_sdp")]);
                let extra = match (&cit, needs_aligned) {
                    (Some((c, c_ms)), true) => {
                        extra_ms = c_ms + tir_ms;
                        vec![tir.clone(), c.clone()]
                    }
                    _ => Vec::new(),
                };
                match solve(channels, tag, target, &power, &extra) {
                    Ok(sol) => {
                        mm_iterations = sol.diagnostics.mm_iterations;
                        feasible(Ok(sol.p_star))?
                    }
                    Err(e) => feasible(Err(e))?,
                }
            }
            SchemeId::NoIrs => feasible(no_irs_power(channels, tag, target))?,
            SchemeId::RandomPhases => feasible(random_phase_power(
                channels,
                tag,
                target,
                derive_seed(seed, &[label_seed("random_phases")]),
            ))?,
            SchemeId::AlignCit => {
                let (c, c_ms) = cit.as_ref().expect("computed above");
                extra_ms = *c_ms;
                feasible(p_star(channels, c, tag, target))?
            }
            SchemeId::AlignTir => {
                extra_ms = tir_ms;
                feasible(p_star(channels, &tir, tag, target))?
            }
            SchemeId::GridOracle => {
                let (phases, _) = grid_search_oracle(channels, cfg.grid_levels)?;
                feasible(p_star(channels, &phases, tag, target))?
            }
            SchemeId::Monostatic => match solve_monostatic(channels, tag, target) {
                Ok(sol) => feasible(Ok(sol.p_star))?,
                Err(e) => feasible(Err(e))?,
            },
        };
        out.push((
            id,
            Outcome {
                p_star: p,
                mm_iterations,
                wall_ms: elapsed_ms(start) + extra_ms,
            },
        ));
    }
    Ok(out)
}

/// Seed of realization `i` at sweep point `point`.
pub fn realization_seed(master: u64, experiment: Experiment, point: usize, i: usize) -> u64 {
    derive_seed(master, &[label_seed(experiment.name()), point as u64, i as u64])
}

fn check_schemes(cfg: &ExperimentConfig, experiment: Experiment) -> Result<()> {
    let monostatic = experiment == Experiment::Fig4;
    if !monostatic && cfg.schemes.contains(&SchemeId::Monostatic) {
        return Err(CliError::Config("scheme 'monostatic' needs the monostatic fig4 layout".into()));
    }
    if monostatic && cfg.tag.circuit_power > 0.0 && cfg.schemes.contains(&SchemeId::Monostatic) {
        return Err(CliError::Config("the monostatic closed form assumes zero circuit power".into()));
    }
    Ok(())
}

/// (point, scheme, realization)
type SortKey = (usize, SchemeId, usize);

/// Runs every (point, realization) pair and assembles sorted rows.
pub fn run_sweep(cfg: &ExperimentConfig, experiment: Experiment) -> Result<SweepResult> {
    check_schemes(cfg, experiment)?;
    let points = sweep_points(cfg, experiment)?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.realizations).map(move |i| (p, i)))
        .collect();

    let results: Vec<Result<Vec<(SortKey, Row)>>> = jobs
        .par_iter()
        .map(|&(p, i)| {
            let point = &points[p];
            let seed = realization_seed(cfg.seed, experiment, p, i);
            let channels = synthesize_channels(&point.layout, &cfg.path_loss, seed)?;
            let outcomes = evaluate(cfg, &channels, seed)?;
            Ok(outcomes
                .into_iter()
                .map(|(id, o)| {
                    let row = Row {
                        experiment: experiment.name().into(),
                        sweep_var_name: point.var_name.clone(),
                        sweep_var_value: point.value,
                        scheme: id.name().into(),
                        realization: i,
                        p_star_dbm: o.p_star.map(watts_to_dbm),
                        feasible: o.p_star.is_some(),
                        mm_iterations: o.mm_iterations,
                        wall_ms: if cfg.record_timing { o.wall_ms } else { 0.0 },
                    };
                    ((p, id, i), row)
                })
                .collect())
        })
        .collect();

    let mut keyed = Vec::with_capacity(jobs.len() * cfg.schemes.len());
    for r in results {
        keyed.extend(r?);
    }
    keyed.sort_by_key(|(key, _)| *key);
    Ok(SweepResult {
        experiment,
        rows: keyed.into_iter().map(|(_, row)| row).collect(),
    })
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(cfg, Experiment::Fig2)
}

pub fn run_fig3(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(cfg, Experiment::Fig3)
}

pub fn run_fig4(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(cfg, Experiment::Fig4)
}

pub fn run_single(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(cfg, Experiment::Single)
}

/// Runs `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(cfg, cfg.experiment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(experiment);
        cfg.realizations = 2;
        cfg
    }

    #[test]
    fn fig4_points_follow_angle_and_distance() {
        let cfg = ExperimentConfig::defaults(Experiment::Fig4);
        let pts = sweep_points(&cfg, Experiment::Fig4).unwrap();
        assert_eq!(pts.len(), cfg.fig4_angles_deg.len() * cfg.fig4_distances.len());
        let p = &pts[0];
        assert_eq!(p.var_name, "distance_m@angle_deg=0");
        assert!((p.layout.tag_position.x - 5.0).abs() < 1e-12);
        assert!(p.layout.tag_position.y.abs() < 1e-12);
        let right = pts.iter().find(|p| p.var_name.ends_with("=90") && p.value == 10.0).unwrap();
        assert!((right.layout.tag_position.y - 10.0).abs() < 1e-12);
        assert!(pts.iter().all(|p| p.layout.architecture == Architecture::Monostatic));
    }

    #[test]
    fn row_count_is_points_times_schemes_times_realizations() {
        let mut cfg = small(Experiment::Fig3);
        cfg.fig3_elements = vec![4, 9];
        let res = run(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2 * 2 * 2);
        let keys: Vec<_> = res
            .rows
            .iter()
            .map(|r| (r.sweep_var_value as usize, r.scheme.clone(), r.realization))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by_key(|k| (k.0, k.1.parse::<SchemeId>().unwrap(), k.2));
        assert_eq!(keys, sorted);
        assert!(res.rows.iter().all(|r| r.feasible && r.wall_ms == 0.0));
    }

    #[test]
    fn seeds_do_not_couple_points() {
        let a = realization_seed(1, Experiment::Fig2, 0, 3);
        assert_ne!(a, realization_seed(1, Experiment::Fig2, 1, 3));
        assert_ne!(a, realization_seed(1, Experiment::Fig3, 0, 3));
        assert_ne!(a, realization_seed(2, Experiment::Fig2, 0, 3));
    }

    #[test]
    fn monostatic_scheme_rejected_outside_fig4() {
        let mut cfg = small(Experiment::Single);
        cfg.schemes = vec![SchemeId::Monostatic];
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn fig4_monostatic_beats_no_irs() {
        let mut cfg = small(Experiment::Fig4);
        cfg.fig4_angles_deg = vec![0.0];
        cfg.fig4_distances = vec![20.0];
        cfg.layout.irs.element_count = 16;
        cfg.fig4_irs.element_count = 16;
        let res = run(&cfg).unwrap();
        for i in 0..2 {
            let get = |s: &str| {
                res.rows
                    .iter()
                    .find(|r| r.scheme == s && r.realization == i)
                    .unwrap()
                    .p_star_dbm
                    .unwrap()
            };
            assert!(get("monostatic") < get("no_irs"));
        }
    }
}
