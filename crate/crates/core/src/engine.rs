//! Monte Carlo driver: per-drop simulation, parallel aggregation and
//! parameter sweeps.
//!
//! Every drop owns a ChaCha stream selected by its index, and each random
//! purpose inside a drop reads from its own far-apart block of that stream.
//! Results are therefore identical for any worker count.

use std::time::{Duration, Instant as Clock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::antenna::linear_to_db;
use crate::config::{RtwSampling, SimConfig};
use crate::error::{Error, Result};
use crate::geometry::{off_axis_wifi, sample_drop, Point2D, RadarState, RegionSpec};
use crate::interference::{
    batch_means_std_error, inr_db, max_over_rotation, pairwise_mean, rtw_interference,
    sinr_and_nppi, DropMetrics, Models, NetworkMetrics, RegimeWinners,
};
use crate::mac::{
    assign_priorities, build_network, build_sweep_schedule, draw_ap_targets, select_tx_mitigated,
    select_tx_unmitigated, Node, Role, SweepSchedule,
};

/// What a random stream is used for inside a drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Layout = 0,
    Priorities = 1,
    BeamTargets = 2,
    TieBreak = 3,
    Instant = 4,
    PositionError = 5,
}

impl Purpose {
    pub const ALL: [Purpose; 6] = [
        Purpose::Layout,
        Purpose::Priorities,
        Purpose::BeamTargets,
        Purpose::TieBreak,
        Purpose::Instant,
        Purpose::PositionError,
    ];
}

// 2^48 words per purpose, far more than a drop ever consumes.
const PURPOSE_WORD_SPACING: u128 = 1 << 48;

/// Generator for `purpose` in drop `drop_index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, drop_index: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(drop_index);
    rng.set_word_pos(purpose as u128 * PURPOSE_WORD_SPACING);
    rng
}

/// Quantities shared by all drops of a run.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub models: Models,
    pub radar: RadarState,
    /// When the beam covers the region, regardless of mitigation.
    pub sweep: SweepSchedule,
    /// When sweep-period contention is in force (never without mitigation).
    pub schedule: SweepSchedule,
    pub threshold: f64,
    pub time_step: f64,
}

impl RunContext {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let models = config.models();
        models.wifi.validate()?;
        models.radar.validate()?;
        models.coastal.validate()?;
        let radar = RadarState::new(config.rho)?;
        let region = RegionSpec::on_x_axis(config.d, config.r_reg, config.r_net)?;
        let sweep = build_sweep_schedule(&region, &radar, config.beamwidth_margin_rad())?;
        let schedule = if config.mitigation {
            sweep.with_mitigation_lead(config.tau)
        } else {
            SweepSchedule::never(radar.rotation_period())
        };
        Ok(Self {
            models,
            radar,
            sweep,
            schedule,
            threshold: config.threshold_rad(),
            time_step: config.effective_time_step(),
        })
    }
}

/// Off-axis angles toward the radar as each node would compute them from
/// its own (possibly noisy) position estimate and that of its beam target.
fn estimated_theta_w<R: Rng + ?Sized>(
    network: &[Node],
    ap_target: Option<usize>,
    origin: Point2D,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if sigma <= 0.0 {
        return network
            .iter()
            .map(|n| off_axis_wifi(n.position, n.beam_target, origin))
            .collect();
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let est: Vec<Point2D> = network
        .iter()
        .map(|n| n.position + Point2D::new(noise.sample(rng), noise.sample(rng)))
        .collect();
    network
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let target = match (n.role, ap_target) {
                (Role::Ap, Some(s)) => est[s + 1],
                // lone AP: keep the true pointing direction
                (Role::Ap, None) => est[i] + (n.beam_target - n.position),
                (Role::Sta, _) => est[0],
            };
            off_axis_wifi(est[i], target, origin)
        })
        .collect()
}

/// Runs drop number `drop_index`.
pub fn simulate_drop(config: &SimConfig, ctx: &RunContext, drop_index: u64) -> Result<DropMetrics> {
    let rng = |p| stream_rng(config.seed, drop_index, p);
    let layout = sample_drop(config, &mut rng(Purpose::Layout))?;
    let priorities = assign_priorities(&layout, &mut rng(Purpose::Priorities));
    let targets = draw_ap_targets(&layout, &mut rng(Purpose::BeamTargets));
    let powers = config.tx_powers();
    let networks: Vec<Vec<Node>> = (0..layout.network_count())
        .map(|k| build_network(&layout, k, &priorities[k], targets[k], powers))
        .collect();

    let mut tie = rng(Purpose::TieBreak);
    let safe_idx: Vec<usize> = networks
        .iter()
        .map(|net| select_tx_unmitigated(net, config.scheme, &mut tie))
        .collect();

    let mut sweep_idx = safe_idx.clone();
    let (mut fallbacks, mut violations) = (0, 0);
    if config.mitigation {
        let mut perr = rng(Purpose::PositionError);
        for (k, net) in networks.iter().enumerate() {
            let est = estimated_theta_w(
                net,
                targets[k],
                ctx.radar.origin,
                config.position_error,
                &mut perr,
            )?;
            let sel = select_tx_mitigated(net, config.scheme, &est, ctx.threshold, &mut tie);
            sweep_idx[k] = sel.winner;
            if sel.fallback {
                fallbacks += 1;
            } else {
                let w = &net[sel.winner];
                if off_axis_wifi(w.position, w.beam_target, ctx.radar.origin)? <= ctx.threshold {
                    violations += 1;
                }
            }
        }
    }

    let pick =
        |idx: &[usize]| -> Vec<Node> { idx.iter().zip(&networks).map(|(&i, n)| n[i]).collect() };
    let safe = pick(&safe_idx);
    let sweep = pick(&sweep_idx);
    let regimes = RegimeWinners {
        safe: &safe,
        sweep: &sweep,
        schedule: ctx.schedule,
    };
    let peak = max_over_rotation(&regimes, &ctx.radar, &ctx.models, ctx.time_step)?;

    let u: f64 = rng(Purpose::Instant).random();
    let t_star = match config.rtw_sampling {
        RtwSampling::Sweep => ctx.sweep.sweep_instant(u),
        RtwSampling::Rotation => u * ctx.radar.rotation_period(),
    };
    let active_idx = if ctx.schedule.mitigated_at(t_star) {
        &sweep_idx
    } else {
        &safe_idx
    };

    // links: transmitter, receiver (pointed back at the transmitter)
    let links: Vec<(Node, Node)> = networks
        .iter()
        .zip(active_idx)
        .enumerate()
        .filter_map(|(k, (net, &w))| {
            let tx = net[w];
            let rx = if w == 0 { net[targets[k]? + 1] } else { net[0] };
            Some((
                tx,
                Node {
                    beam_target: tx.position,
                    ..rx
                },
            ))
        })
        .collect();
    let victims: Vec<Node> = links.iter().map(|(_, rx)| *rx).collect();
    let rtw = rtw_interference(&victims, &ctx.radar, t_star, &ctx.models)?;
    let per_network = links
        .iter()
        .map(|(tx, rx)| {
            let q = sinr_and_nppi(tx, rx, rtw, config.scheme, &ctx.models)?;
            Ok(NetworkMetrics {
                sinr: q.sinr,
                nppi: q.nppi,
                winner_id: tx.id,
                winner_priority: tx.priority,
                winner_role: tx.role,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DropMetrics {
        mmai_sample: peak.max_power,
        networks: networks.len(),
        argmax_t: peak.argmax_t,
        inr_db: inr_db(peak.max_power, &ctx.models),
        per_network,
        sweep_fallbacks: fallbacks,
        sweep_violations: violations,
        sweep_ap_wins: sweep.iter().filter(|n| n.role == Role::Ap).count(),
    })
}

/// Aggregated outcome of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: SimConfig,
    pub mmai_mean_mw: f64,
    pub mmai_mean_dbm: f64,
    /// INR of the mean peak power, dB.
    pub inr_mean_db: f64,
    /// Batch-means standard error of `mmai_mean_mw`.
    pub mmai_std_error_mw: f64,
    /// Per-link NPPI values, linear, sorted ascending.
    pub nppi_samples: Vec<f64>,
    /// Per-link SINR values, linear, sorted ascending.
    pub sinr_samples: Vec<f64>,
    pub drop_count: usize,
    pub sweep_winners: usize,
    pub sweep_fallbacks: usize,
    pub sweep_violations: usize,
    pub sweep_ap_wins: usize,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn nppi_db(&self) -> Vec<f64> {
        self.nppi_samples.iter().map(|&v| linear_to_db(v)).collect()
    }

    /// NPPI quantile in dB.
    pub fn nppi_quantile_db(&self, q: f64) -> Result<f64> {
        quantile(&self.nppi_samples, q).map(linear_to_db)
    }

    pub fn fallback_rate(&self) -> f64 {
        if self.sweep_winners == 0 {
            0.0
        } else {
            self.sweep_fallbacks as f64 / self.sweep_winners as f64
        }
    }
}

const SE_BATCHES: usize = 20;

fn aggregate(
    config: &SimConfig,
    models: &Models,
    drops: Vec<DropMetrics>,
    wall_time: Duration,
) -> RunResult {
    let peaks: Vec<f64> = drops.iter().map(|d| d.mmai_sample).collect();
    let mean = pairwise_mean(&peaks);
    let se = batch_means_std_error(&peaks, SE_BATCHES).unwrap_or(f64::NAN);
    let mut nppi: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.per_network.iter().map(|n| n.nppi))
        .collect();
    let mut sinr: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.per_network.iter().map(|n| n.sinr))
        .collect();
    nppi.sort_by(f64::total_cmp);
    sinr.sort_by(f64::total_cmp);
    let sweep_winners = if config.mitigation {
        drops.iter().map(|d| d.networks).sum()
    } else {
        0
    };
    RunResult {
        config: config.clone(),
        mmai_mean_mw: mean,
        mmai_mean_dbm: linear_to_db(mean),
        inr_mean_db: inr_db(mean, models),
        mmai_std_error_mw: se,
        nppi_samples: nppi,
        sinr_samples: sinr,
        drop_count: drops.len(),
        sweep_winners,
        sweep_fallbacks: drops.iter().map(|d| d.sweep_fallbacks).sum(),
        sweep_violations: drops.iter().map(|d| d.sweep_violations).sum(),
        sweep_ap_wins: drops.iter().map(|d| d.sweep_ap_wins).sum(),
        wall_time,
    }
}

/// Runs all drops on rayon's global pool.
pub fn run(config: &SimConfig) -> Result<RunResult> {
    run_with_workers(config, None)
}

/// Runs all drops on a dedicated pool of `workers` threads (all cores when
/// `None`). The result does not depend on the worker count.
pub fn run_with_workers(config: &SimConfig, workers: Option<usize>) -> Result<RunResult> {
    let ctx = RunContext::new(config)?;
    let start = Clock::now();
    let work = || {
        (0..config.n_drops as u64)
            .into_par_iter()
            .map(|i| simulate_drop(config, &ctx, i))
            .collect::<Result<Vec<_>>>()
    };
    let drops = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(aggregate(config, &ctx.models, drops, start.elapsed()))
}

/// Parameter varied by [`sweep_parameter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Radar to region-center distance, m.
    Distance,
    /// Radar to region-edge separation, m.
    Separation,
    /// Mitigation threshold, degrees.
    Threshold,
}

impl SweepAxis {
    pub fn apply(&self, config: &mut SimConfig, value: f64) {
        match self {
            SweepAxis::Distance => config.d = value,
            SweepAxis::Separation => config.d = value + config.r_reg,
            SweepAxis::Threshold => config.theta_deg = value,
        }
    }
}

/// One run per value. The `i`-th run uses seed `base.seed + i`, so runs of
/// different configurations at the same index share their seed.
pub fn sweep_parameter(
    base: &SimConfig,
    axis: SweepAxis,
    values: &[f64],
    workers: Option<usize>,
) -> Result<Vec<RunResult>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut cfg = base.clone();
            axis.apply(&mut cfg, v);
            cfg.seed = base.seed.wrapping_add(i as u64);
            run_with_workers(&cfg, workers)
        })
        .collect()
}

/// Fraction of `sorted` samples that are `<= x`.
pub fn empirical_cdf(sorted: &[f64], x: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    Ok(sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64)
}

/// Linearly interpolated quantile of ascending `sorted` samples.
pub fn quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}
