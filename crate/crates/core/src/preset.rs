//! Figure presets and CSV emission.
//!
//! Each CSV starts with `#` comment lines carrying the base configuration
//! hash and seed; [`strip_header`] removes them so bodies can be compared
//! byte for byte. Numbers are written with six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::antenna::linear_to_db;
use crate::config::SimConfig;
use crate::engine::{empirical_cdf, run_with_workers, sweep_parameter, RunResult, SweepAxis};
use crate::error::{Error, Result};
use crate::mac::AccessScheme;

/// Radar protection criterion drawn next to INR curves.
pub const INR_THRESHOLD_DB: f64 = -10.0;

/// Center distance used by the presets that do not sweep it, m.
pub const PRESET_DISTANCE: f64 = 2000.0;

pub const DEFAULT_DROPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// INR vs radar-to-region separation, four regimes.
    Fig3,
    /// NPPI CDF, four regimes.
    Fig4,
    /// INR and median NPPI vs threshold, EDCA with mitigation.
    Fig5,
    /// NPPI CDF per threshold, EDCA with mitigation.
    Fig6,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    /// Axis values used when none are given: separation in km for fig3,
    /// thresholds in degrees for fig5 and fig6.
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            Preset::Fig3 => (1..=10).map(f64::from).collect(),
            Preset::Fig4 => vec![],
            Preset::Fig5 => (0..=6).map(|i| 30.0 * i as f64).collect(),
            Preset::Fig6 => vec![30.0, 90.0, 180.0],
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            other => Err(format!(
                "unknown preset `{other}` (expected fig3, fig4, fig5 or fig6)"
            )),
        }
    }
}

/// Access scheme and mitigation switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regime {
    pub scheme: AccessScheme,
    pub mitigation: bool,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime {
            scheme: AccessScheme::Edca,
            mitigation: false,
        },
        Regime {
            scheme: AccessScheme::Edca,
            mitigation: true,
        },
        Regime {
            scheme: AccessScheme::Csma,
            mitigation: false,
        },
        Regime {
            scheme: AccessScheme::Csma,
            mitigation: true,
        },
    ];

    pub fn label(&self) -> String {
        if self.mitigation {
            format!("{}_mitigated", self.scheme.as_str())
        } else {
            self.scheme.as_str().to_string()
        }
    }

    pub fn apply(&self, config: &SimConfig) -> SimConfig {
        SimConfig {
            scheme: self.scheme,
            mitigation: self.mitigation,
            ..config.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct PresetOptions {
    pub drops: usize,
    pub seed: u64,
    pub values: Option<Vec<f64>>,
    pub workers: Option<usize>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            drops: DEFAULT_DROPS,
            seed: 1,
            values: None,
            workers: None,
        }
    }
}

/// A numeric table bound for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_sig6(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Everything a preset or a single run produces.
#[derive(Debug, Clone)]
pub struct Output {
    pub tables: Vec<Table>,
    pub manifest: String,
    pub runs: Vec<(String, RunResult)>,
}

impl Output {
    /// Writes the tables and `manifest.txt` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(&t.file_name);
            fs::write(&path, t.to_csv())?;
            written.push(path);
        }
        let path = dir.join("manifest.txt");
        fs::write(&path, &self.manifest)?;
        written.push(path);
        Ok(written)
    }
}

/// Formats `v` with exactly six significant digits, switching to
/// exponent notation outside `[1e-4, 1e6)`.
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if v == 0.0 || (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp.clamp(-4, 5)) as usize, v)
    } else {
        sci
    }
}

/// Drops the leading `#` comment lines of a CSV.
pub fn strip_header(csv: &str) -> String {
    csv.lines()
        .skip_while(|l| l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn header(kind: &str, base: &SimConfig) -> Vec<String> {
    vec![
        format!("coexsim {} {kind}", env!("CARGO_PKG_VERSION")),
        format!("config_hash={} seed={}", base.hash(), base.seed),
    ]
}

/// Base configuration of every preset.
pub fn preset_base(options: &PresetOptions) -> SimConfig {
    SimConfig {
        n_drops: options.drops,
        seed: options.seed,
        ..SimConfig::with_distance(PRESET_DISTANCE)
    }
}

fn manifest(kind: &str, base: &SimConfig, runs: &[(String, RunResult)]) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "# coexsim {} run manifest", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "experiment = {kind}");
    let _ = writeln!(m, "base_config_hash = {}", base.hash());
    let _ = writeln!(m, "seed = {}", base.seed);
    let _ = writeln!(m, "\n[base]\n{}", base.to_text());
    for (label, r) in runs {
        let _ = writeln!(m, "[run {label}]");
        let _ = writeln!(m, "config_hash = {}", r.config.hash());
        let _ = writeln!(m, "seed = {}", r.config.seed);
        let _ = writeln!(m, "d = {}", r.config.d);
        let _ = writeln!(m, "theta_deg = {}", r.config.theta_deg);
        let _ = writeln!(m, "drops = {}", r.drop_count);
        let _ = writeln!(m, "mmai_dbm = {}", format_sig6(r.mmai_mean_dbm));
        let _ = writeln!(m, "inr_db = {}", format_sig6(r.inr_mean_db));
        let _ = writeln!(m, "sweep_fallbacks = {}", r.sweep_fallbacks);
        let _ = writeln!(m, "sweep_violations = {}", r.sweep_violations);
        let _ = writeln!(m, "wall_time_s = {:.3}\n", r.wall_time.as_secs_f64());
    }
    m
}

/// CDF of several NPPI sample sets on a common 1 dB grid.
pub fn cdf_table(
    file_name: &str,
    comments: Vec<String>,
    sets: &[(String, &RunResult)],
) -> Result<Table> {
    let db: Vec<Vec<f64>> = sets.iter().map(|(_, r)| r.nppi_db()).collect();
    let finite = db.iter().flatten().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min).floor();
    let hi = finite.fold(f64::NEG_INFINITY, f64::max).ceil();
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptySampleSet);
    }
    let mut columns = vec!["nppi_db".to_string()];
    columns.extend(sets.iter().map(|(label, _)| format!("cdf_{label}")));
    let mut rows = Vec::new();
    let mut x = lo;
    while x <= hi {
        let mut row = vec![x];
        for samples in &db {
            row.push(empirical_cdf(samples, x)?);
        }
        rows.push(row);
        x += 1.0;
    }
    Ok(Table {
        file_name: file_name.into(),
        comments,
        columns,
        rows,
    })
}

/// Runs `preset` and returns its tables and manifest.
pub fn run_preset(preset: Preset, options: &PresetOptions) -> Result<Output> {
    let base = preset_base(options);
    let values = options
        .values
        .clone()
        .unwrap_or_else(|| preset.default_values());
    let kind = preset.name();
    let comments = header(kind, &base);
    let mut runs: Vec<(String, RunResult)> = Vec::new();

    let table = match preset {
        Preset::Fig3 => {
            let meters: Vec<f64> = values.iter().map(|km| km * 1000.0).collect();
            let mut per_regime = Vec::new();
            for regime in Regime::ALL {
                let results = sweep_parameter(
                    &regime.apply(&base),
                    SweepAxis::Separation,
                    &meters,
                    options.workers,
                )?;
                for (km, r) in values.iter().zip(&results) {
                    runs.push((format!("{} separation_km={km}", regime.label()), r.clone()));
                }
                per_regime.push(results);
            }
            let mut columns = vec!["separation_km".to_string()];
            columns.extend(Regime::ALL.iter().map(|r| format!("inr_{}_db", r.label())));
            columns.push("inr_threshold_db".into());
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, &km)| {
                    let mut row = vec![km];
                    row.extend(per_regime.iter().map(|rs| rs[i].inr_mean_db));
                    row.push(INR_THRESHOLD_DB);
                    row
                })
                .collect();
            Table {
                file_name: "fig3.csv".into(),
                comments,
                columns,
                rows,
            }
        }
        Preset::Fig4 => {
            for regime in Regime::ALL {
                runs.push((
                    regime.label(),
                    run_with_workers(&regime.apply(&base), options.workers)?,
                ));
            }
            let sets: Vec<(String, &RunResult)> =
                runs.iter().map(|(l, r)| (l.clone(), r)).collect();
            cdf_table("fig4.csv", comments, &sets)?
        }
        Preset::Fig5 | Preset::Fig6 => {
            let cfg = Regime {
                scheme: AccessScheme::Edca,
                mitigation: true,
            }
            .apply(&base);
            let results = sweep_parameter(&cfg, SweepAxis::Threshold, &values, options.workers)?;
            for (theta, r) in values.iter().zip(results) {
                runs.push((format!("theta_{theta}"), r));
            }
            if preset == Preset::Fig6 {
                let sets: Vec<(String, &RunResult)> =
                    runs.iter().map(|(l, r)| (l.clone(), r)).collect();
                cdf_table("fig6.csv", comments, &sets)?
            } else {
                let columns = [
                    "theta_deg",
                    "inr_db",
                    "nppi_median_db",
                    "fallback_rate",
                    "inr_threshold_db",
                ]
                .map(String::from)
                .to_vec();
                let rows = values
                    .iter()
                    .zip(&runs)
                    .map(|(&theta, (_, r))| {
                        Ok(vec![
                            theta,
                            r.inr_mean_db,
                            r.nppi_quantile_db(0.5)?,
                            r.fallback_rate(),
                            INR_THRESHOLD_DB,
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                Table {
                    file_name: "fig5.csv".into(),
                    comments,
                    columns,
                    rows,
                }
            }
        }
    };
    Ok(Output {
        manifest: manifest(kind, &base, &runs),
        tables: vec![table],
        runs,
    })
}

/// A single run from a user configuration: a one-row summary and the
/// NPPI CDF.
pub fn run_single(config: &SimConfig, workers: Option<usize>) -> Result<Output> {
    let result = run_with_workers(config, workers)?;
    let comments = header("run", config);
    let columns = [
        "d_m",
        "theta_deg",
        "drops",
        "mmai_dbm",
        "inr_db",
        "mmai_std_error_db",
        "nppi_median_db",
        "sweep_fallbacks",
        "sweep_violations",
        "inr_threshold_db",
    ]
    .map(String::from)
    .to_vec();
    // relative standard error expressed in dB
    let se_db = linear_to_db(1.0 + result.mmai_std_error_mw / result.mmai_mean_mw);
    let median = result.nppi_quantile_db(0.5).unwrap_or(f64::NAN);
    let summary = Table {
        file_name: "summary.csv".into(),
        comments: comments.clone(),
        columns,
        rows: vec![vec![
            config.d,
            config.theta_deg,
            result.drop_count as f64,
            result.mmai_mean_dbm,
            result.inr_mean_db,
            se_db,
            median,
            result.sweep_fallbacks as f64,
            result.sweep_violations as f64,
            INR_THRESHOLD_DB,
        ]],
    };
    let runs = vec![("run".to_string(), result)];
    let mut tables = vec![summary];
    if !runs[0].1.nppi_samples.is_empty() {
        tables.push(cdf_table(
            "nppi_cdf.csv",
            comments,
            &[("run".to_string(), &runs[0].1)],
        )?);
    }
    Ok(Output {
        manifest: manifest("run", config, &runs),
        tables,
        runs,
    })
}
