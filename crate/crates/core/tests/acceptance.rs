//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.
//! Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use coexsim::antenna::{linear_to_db, WifiArrayPattern};
use coexsim::config::SimConfig;
use coexsim::engine::run_with_workers;
use coexsim::geometry::{Point2D, RadarState};
use coexsim::interference::{campbell_cases, individual_interference, Models};
use coexsim::mac::{Node, Role};
use coexsim::preset::{run_preset, strip_header, Preset, PresetOptions, Regime};
use coexsim::propagation::{coastal_path_gain, CoastalPathModel};

const FIG_DROPS: usize = 2000;
const SAFETY_DROPS: usize = 10_000;
const CAMPBELL_TRIALS: usize = 100_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn formulas() -> Outcome {
    let radar = RadarState::new(15.0).unwrap();
    let ap = Node {
        id: 0,
        role: Role::Ap,
        position: Point2D::new(1000.0, 0.0),
        priority: 7,
        tx_power_dbm: 30.0,
        beam_target: Point2D::ORIGIN,
    };
    let p = linear_to_db(
        individual_interference(&ap, &radar.with_boresight(0.0), 0.0, &Models::default()).unwrap(),
    );
    let path = linear_to_db(coastal_path_gain(&CoastalPathModel::default(), 1000.0).unwrap());
    let peak = WifiArrayPattern::default().peak_gain_dbi();
    check(
        (p - -23.3).abs() <= 0.05 && (path - -94.97).abs() <= 0.05 && (peak - 8.17).abs() <= 0.01,
        format!("interference {p:.3} dBm (−23.3 ± 0.05), path gain {path:.3} dB (−94.97 ± 0.05), peak {peak:.4} dBi (8.17 ± 0.01)"),
    )
}

fn campbell() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for case in campbell_cases(CAMPBELL_TRIALS, 2024) {
        let z = case.estimate.z_score();
        ok &= z < 3.0;
        parts.push(format!("{} z={z:.2}", case.name));
    }
    check(
        ok,
        format!(
            "{} realizations, {} (< 3)",
            CAMPBELL_TRIALS,
            parts.join(", ")
        ),
    )
}

fn fig3() -> Outcome {
    let separations = [1.0, 2.0, 5.0, 10.0];
    let options = PresetOptions {
        drops: FIG_DROPS,
        values: Some(separations.to_vec()),
        ..PresetOptions::default()
    };
    let out = run_preset(Preset::Fig3, &options).map_err(|e| e.to_string())?;
    let rows = &out.tables[0].rows;
    // columns: separation, edca, edca_mitigated, csma, csma_mitigated, threshold
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<_>>();
    let decreasing = (1..=4).all(|c| col(c).windows(2).all(|w| w[1] < w[0]));
    let edca_ge_csma = rows.iter().all(|r| r[1] >= r[3]);
    let mitigation_helps = rows.iter().all(|r| r[2] < r[1]);
    let gap_shrinks = rows.iter().all(|r| r[2] - r[4] < r[1] - r[3]);
    let table: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{}km[{:.1}/{:.1}/{:.1}/{:.1}]",
                r[0], r[1], r[2], r[3], r[4]
            )
        })
        .collect();
    check(
        decreasing && edca_ge_csma && mitigation_helps && gap_shrinks,
        format!(
            "(a) {decreasing} (b) {edca_ge_csma} (c) {mitigation_helps} (d) {gap_shrinks}; INR dB edca/edca_mit/csma/csma_mit {}",
            table.join(" ")
        ),
    )
}

fn concavity() -> Outcome {
    let options = PresetOptions {
        drops: FIG_DROPS,
        values: Some(vec![30.0, 90.0, 180.0]),
        ..PresetOptions::default()
    };
    let out = run_preset(Preset::Fig5, &options).map_err(|e| e.to_string())?;
    let inr: Vec<f64> = out.runs.iter().map(|(_, r)| r.inr_mean_db).collect();
    let med: Vec<f64> = out
        .runs
        .iter()
        .map(|(_, r)| r.nppi_quantile_db(0.5).unwrap())
        .collect();
    check(
        inr[1] > inr[0] && inr[1] > inr[2] && med[1] > med[0] && med[1] > med[2],
        format!(
            "INR 30/90/180 = {:.2}/{:.2}/{:.2} dB, median NPPI = {:.2}/{:.2}/{:.2} dB",
            inr[0], inr[1], inr[2], med[0], med[1], med[2]
        ),
    )
}

fn nppi_shift() -> Outcome {
    let base = SimConfig {
        n_drops: FIG_DROPS,
        ..SimConfig::with_distance(2000.0)
    };
    let off = run_with_workers(&Regime::ALL[0].apply(&base), None).map_err(|e| e.to_string())?;
    let on = run_with_workers(&Regime::ALL[1].apply(&base), None).map_err(|e| e.to_string())?;
    let shifts: Vec<f64> = (1..=9)
        .map(|k| {
            let q = k as f64 / 10.0;
            off.nppi_quantile_db(q).unwrap() - on.nppi_quantile_db(q).unwrap()
        })
        .collect();
    let ok = shifts.iter().all(|&s| s > 0.0 && s <= 20.0);
    let list: Vec<String> = shifts.iter().map(|s| format!("{s:.1}")).collect();
    check(
        ok,
        format!("EDCA decile shifts (dB, want (0, 20]): {}", list.join(" ")),
    )
}

fn safety() -> Outcome {
    let cfg = SimConfig {
        n_drops: SAFETY_DROPS,
        mitigation: true,
        theta_deg: 30.0,
        ..SimConfig::with_distance(2000.0)
    };
    let r = run_with_workers(&cfg, None).map_err(|e| e.to_string())?;
    check(
        r.sweep_violations == 0,
        format!(
            "{} drops, {} sweep winners, {} violations, {} fallbacks ({:.4}%)",
            r.drop_count,
            r.sweep_winners,
            r.sweep_violations,
            r.sweep_fallbacks,
            100.0 * r.fallback_rate()
        ),
    )
}

fn determinism() -> Outcome {
    let body = |workers| -> Result<String, String> {
        let options = PresetOptions {
            drops: 40,
            workers: Some(workers),
            ..PresetOptions::default()
        };
        let out = run_preset(Preset::Fig3, &options).map_err(|e| e.to_string())?;
        Ok(strip_header(&out.tables[0].to_csv()))
    };
    let (a, b) = (body(1)?, body(3)?);
    check(
        a == b && !a.is_empty(),
        format!(
            "fig3 body with 1 and 3 workers: {} bytes, identical = {}",
            a.len(),
            a == b
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("formula exactness", formulas),
        ("Campbell oracle", campbell),
        ("fig3 qualitative", fig3),
        ("fig5/6 concavity", concavity),
        ("fig4 NPPI shift", nppi_shift),
        ("mitigation safety", safety),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
