//! `results.csv`, `summary.csv` and a gnuplot script of the mean curves.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sweep::{Row, SweepResult};

/// Per (point, scheme) statistics of `p_star_dbm` over feasible realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub sweep_var_name: String,
    pub sweep_var_value: f64,
    pub scheme: String,
    pub realizations: usize,
    pub feasible: usize,
    /// Mean of P* in dBm; empty when no realization was feasible.
    pub mean_dbm: Option<f64>,
    /// Sample standard deviation in dB.
    pub std_db: Option<f64>,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_results(path: &Path, rows: &[Row]) -> Result<()> {
    write_csv(path, rows)
}

pub fn read_results(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

/// Groups consecutive rows sharing (sweep variable, value, scheme).
pub fn summarize(rows: &[Row]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let same = out.last().is_some_and(|s| {
            s.sweep_var_name == row.sweep_var_name && s.sweep_var_value == row.sweep_var_value && s.scheme == row.scheme
        });
        if !same {
            out.push(SummaryRow {
                experiment: row.experiment.clone(),
                sweep_var_name: row.sweep_var_name.clone(),
                sweep_var_value: row.sweep_var_value,
                scheme: row.scheme.clone(),
                realizations: 0,
                feasible: 0,
                mean_dbm: None,
                std_db: None,
            });
            values.push(Vec::new());
        }
        let s = out.last_mut().expect("pushed above");
        s.realizations += 1;
        if let (true, Some(p)) = (row.feasible, row.p_star_dbm) {
            s.feasible += 1;
            values.last_mut().expect("pushed above").push(p);
        }
    }
    for (s, v) in out.iter_mut().zip(&values) {
        if v.is_empty() {
            continue;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        s.mean_dbm = Some(mean);
        s.std_db = Some(var.sqrt());
    }
    out
}

/// Gnuplot script with the mean curves inlined as data blocks.
pub fn plot_script(summary: &[SummaryRow]) -> String {
    // (sweep variable, scheme, [(x, mean, std)])
    type Curve = (String, String, Vec<(f64, f64, f64)>);
    let mut curves: Vec<Curve> = Vec::new();
    for s in summary {
        let (Some(mean), Some(std)) = (s.mean_dbm, s.std_db) else {
            continue;
        };
        let idx = match curves.iter().position(|c| c.0 == s.sweep_var_name && c.1 == s.scheme) {
            Some(i) => i,
            None => {
                curves.push((s.sweep_var_name.clone(), s.scheme.clone(), Vec::new()));
                curves.len() - 1
            }
        };
        curves[idx].2.push((s.sweep_var_value, mean, std));
    }
    let experiment = summary.first().map_or("", |s| s.experiment.as_str());
    let xlabel = summary
        .first()
        .map_or("", |s| s.sweep_var_name.split('@').next().unwrap_or(""));

    let mut g = String::new();
    let _ = writeln!(g, "set terminal svg size 800,500");
    let _ = writeln!(g, "set output 'plot.svg'");
    let _ = writeln!(g, "set title '{experiment}'");
    let _ = writeln!(g, "set xlabel '{xlabel}'");
    let _ = writeln!(g, "set ylabel 'mean P* (dBm)'");
    let _ = writeln!(g, "set key outside right");
    let _ = writeln!(g, "set grid");
    for (k, (_, _, pts)) in curves.iter().enumerate() {
        let _ = writeln!(g, "$c{k} << EOD");
        for (x, m, s) in pts {
            let _ = writeln!(g, "{x} {m} {s}");
        }
        let _ = writeln!(g, "EOD");
    }
    let plots: Vec<String> = curves
        .iter()
        .enumerate()
        .map(|(k, (name, scheme, _))| {
            let title = match name.split_once('@') {
                Some((_, tag)) => format!("{scheme} ({tag})"),
                None => scheme.clone(),
            };
            format!("$c{k} using 1:2 with linespoints title '{title}'")
        })
        .collect();
    if !plots.is_empty() {
        let _ = writeln!(g, "plot {}", plots.join(", \\\n     "));
    }
    g
}

/// Written file paths.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

/// Writes all three files into `dir`, creating it if needed.
pub fn emit_outputs(result: &SweepResult, dir: &Path) -> Result<Outputs> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let outputs = Outputs {
        results: dir.join("results.csv"),
        summary: dir.join("summary.csv"),
        plot: dir.join("plot.gp"),
    };
    write_results(&outputs.results, &result.rows)?;
    let summary = summarize(&result.rows);
    write_csv(&outputs.summary, &summary)?;
    fs::write(&outputs.plot, plot_script(&summary)).map_err(|source| CliError::Io {
        path: outputs.plot.clone(),
        source,
    })?;
    Ok(outputs)
}
