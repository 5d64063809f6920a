//! Interference metrics: Wi-Fi-to-radar power (individual, aggregate and
//! its per-rotation peak), radar-to-Wi-Fi power, SINR and NPPI.
//!
//! All powers are linear milliwatts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::antenna::{db_to_linear, linear_to_db, RadarPattern, WifiArrayPattern};
use crate::error::{Error, Result};
use crate::geometry::{
    angular_separation, off_axis_radar, off_axis_wifi, Annulus, Point2D, RadarState,
};
use crate::mac::{AccessScheme, Node, Role, SweepSchedule};
use crate::propagation::{
    coastal_path_gain, noise_power_mw, umi_path_gain, CoastalPathModel, NoiseBudget, System,
    UmiPathModel,
};

/// Antenna, propagation and noise models shared by every metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Models {
    pub wifi: WifiArrayPattern,
    pub radar: RadarPattern,
    pub coastal: CoastalPathModel,
    pub umi: UmiPathModel,
    pub noise: NoiseBudget,
    pub radar_tx_power_dbm: f64,
    pub bandwidth_overlap: bool,
}

impl Default for Models {
    fn default() -> Self {
        Self {
            wifi: WifiArrayPattern::default(),
            radar: RadarPattern::default(),
            coastal: CoastalPathModel::default(),
            umi: UmiPathModel::default(),
            noise: NoiseBudget::default(),
            radar_tx_power_dbm: 90.0,
            bandwidth_overlap: false,
        }
    }
}

impl Models {
    fn wtr_scale(&self) -> f64 {
        if self.bandwidth_overlap {
            self.noise.overlap_factor()
        } else {
            1.0
        }
    }

    pub fn radar_noise_mw(&self) -> f64 {
        noise_power_mw(&self.noise, System::Radar)
    }

    pub fn wifi_noise_mw(&self) -> f64 {
        noise_power_mw(&self.noise, System::Wifi)
    }
}

/// One evaluated interference link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub tx: Node,
    pub rx_kind: System,
    pub theta_w: f64,
    pub theta_r: f64,
    pub path_gain: f64,
    pub power_rx: f64,
}

/// Interference a single Wi-Fi transmitter puts into the radar at `t`.
pub fn wtr_link(tx: &Node, radar: &RadarState, t: f64, models: &Models) -> Result<LinkSample> {
    let radar_t = radar.at(t);
    let theta_w = off_axis_wifi(tx.position, tx.beam_target, radar.origin)?;
    let theta_r = off_axis_radar(tx.position, &radar_t)?;
    let path_gain = coastal_path_gain(&models.coastal, tx.position.distance(radar.origin))?;
    let power_rx = tx.tx_power_mw()
        * models.wifi.gain(theta_w)
        * models.radar.gain(theta_r)
        * path_gain
        * models.wtr_scale();
    Ok(LinkSample {
        tx: *tx,
        rx_kind: System::Radar,
        theta_w,
        theta_r,
        path_gain,
        power_rx,
    })
}

/// `P_T · G_T(θ_w) · G_R(θ_r(t)) · l(‖tx‖)`.
pub fn individual_interference(
    tx: &Node,
    radar: &RadarState,
    t: f64,
    models: &Models,
) -> Result<f64> {
    wtr_link(tx, radar, t, models).map(|l| l.power_rx)
}

/// Sum of the individual interference of every network's transmitter.
pub fn aggregate_wtr(winners: &[Node], radar: &RadarState, t: f64, models: &Models) -> Result<f64> {
    let terms = winners
        .iter()
        .map(|w| individual_interference(w, radar, t, models))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Transmitters in force during the safe and the sweep periods.
#[derive(Debug, Clone, Copy)]
pub struct RegimeWinners<'a> {
    pub safe: &'a [Node],
    pub sweep: &'a [Node],
    pub schedule: SweepSchedule,
}

impl<'a> RegimeWinners<'a> {
    /// The same transmitters for the whole rotation.
    pub fn uniform(winners: &'a [Node], rotation_period: f64) -> Self {
        Self {
            safe: winners,
            sweep: winners,
            schedule: SweepSchedule::never(rotation_period),
        }
    }

    pub fn at(&self, t: f64) -> &'a [Node] {
        if self.schedule.mitigated_at(t) {
            self.sweep
        } else {
            self.safe
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationPeak {
    pub max_power: f64,
    pub argmax_t: f64,
    pub samples: usize,
}

struct Emitter {
    azimuth: f64,
    strength: f64,
}

fn emitters(winners: &[Node], radar: &RadarState, models: &Models) -> Result<Vec<Emitter>> {
    winners
        .iter()
        .map(|w| {
            let theta_w = off_axis_wifi(w.position, w.beam_target, radar.origin)?;
            let rel = w.position - radar.origin;
            let path = coastal_path_gain(&models.coastal, rel.norm())?;
            Ok(Emitter {
                azimuth: rel.azimuth(),
                strength: w.tx_power_mw() * models.wifi.gain(theta_w) * path * models.wtr_scale(),
            })
        })
        .collect()
}

/// Peak of the aggregate Wi-Fi-to-radar power over one rotation sampled
/// every `time_step` seconds, together with the instant it occurs.
pub fn max_over_rotation(
    winners: &RegimeWinners<'_>,
    radar: &RadarState,
    models: &Models,
    time_step: f64,
) -> Result<RotationPeak> {
    let period = radar.rotation_period();
    let samples = if time_step > 0.0 {
        (period / time_step + 1e-9).floor() as usize
    } else {
        0
    };
    let required = crate::config::MIN_SAMPLES_PER_ROTATION;
    if samples < required {
        return Err(Error::ResolutionTooCoarse { samples, required });
    }
    let safe = emitters(winners.safe, radar, models)?;
    let sweep = emitters(winners.sweep, radar, models)?;
    let gain = models.radar.evaluator();

    let mut best = RotationPeak {
        max_power: f64::NEG_INFINITY,
        argmax_t: 0.0,
        samples,
    };
    for i in 0..samples {
        let t = i as f64 * time_step;
        let active = if winners.schedule.mitigated_at(t) {
            &sweep
        } else {
            &safe
        };
        let boresight = radar.at(t).boresight_angle;
        let power: f64 = active
            .iter()
            .map(|e| e.strength * gain.gain(angular_separation(e.azimuth, boresight)))
            .sum();
        if power > best.max_power {
            best.max_power = power;
            best.argmax_t = t;
        }
    }
    Ok(best)
}

/// Per-network outcome of one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkMetrics {
    pub sinr: f64,
    pub nppi: f64,
    pub winner_id: usize,
    pub winner_priority: u8,
    pub winner_role: Role,
}

/// Everything measured in one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropMetrics {
    /// Peak aggregate Wi-Fi-to-radar power over the rotation, mW.
    pub mmai_sample: f64,
    pub networks: usize,
    pub argmax_t: f64,
    pub inr_db: f64,
    pub per_network: Vec<NetworkMetrics>,
    /// Sweep-period winners picked by the largest-angle fallback.
    pub sweep_fallbacks: usize,
    /// Sweep-period winners at or under the threshold that were not fallbacks.
    pub sweep_violations: usize,
    pub sweep_ap_wins: usize,
}

/// Interference-to-noise ratio at the radar, dB.
pub fn inr_db(interference_mw: f64, models: &Models) -> f64 {
    linear_to_db(interference_mw / models.radar_noise_mw())
}

/// Mean of the per-drop rotation peaks.
pub fn mmai(drops: &[DropMetrics]) -> f64 {
    let samples: Vec<f64> = drops.iter().map(|d| d.mmai_sample).collect();
    pairwise_mean(&samples)
}

/// Radar power averaged over all victim receivers: each victim points its
/// beam at its own transmitter, so its off-axis angle toward the radar sets
/// the receive gain.
pub fn rtw_interference(
    victims: &[Node],
    radar: &RadarState,
    t: f64,
    models: &Models,
) -> Result<f64> {
    if victims.is_empty() {
        return Ok(0.0);
    }
    let radar_t = radar.at(t);
    let p_radar = db_to_linear(models.radar_tx_power_dbm);
    let terms = victims
        .iter()
        .map(|v| {
            let theta_r = off_axis_radar(v.position, &radar_t)?;
            let theta_w = off_axis_wifi(v.position, v.beam_target, radar.origin)?;
            let path = coastal_path_gain(&models.coastal, v.position.distance(radar.origin))?;
            Ok(p_radar * models.radar.gain(theta_r) * models.wifi.gain(theta_w) * path)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms) / victims.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQuality {
    pub sinr: f64,
    pub nppi: f64,
}

/// SINR of the `tx → rx` Wi-Fi link under radar interference `rtw`, and the
/// priority-scaled NPPI (`SINR·(p+1)/8` under EDCA, `SINR` under CSMA).
pub fn sinr_and_nppi(
    tx: &Node,
    rx: &Node,
    rtw: f64,
    scheme: AccessScheme,
    models: &Models,
) -> Result<LinkQuality> {
    let g_tx = models
        .wifi
        .gain(off_axis_wifi(tx.position, tx.beam_target, rx.position)?);
    let g_rx = models
        .wifi
        .gain(off_axis_wifi(rx.position, rx.beam_target, tx.position)?);
    let path = umi_path_gain(&models.umi, tx.position.distance(rx.position))?;
    let signal = tx.tx_power_mw() * g_tx * g_rx * path;
    let sinr = signal / (rtw + models.wifi_noise_mw());
    Ok(LinkQuality {
        sinr,
        nppi: nppi(sinr, tx.priority, scheme),
    })
}

pub fn nppi(sinr: f64, priority: u8, scheme: AccessScheme) -> f64 {
    match scheme {
        AccessScheme::Edca => sinr * (priority as f64 + 1.0) / 8.0,
        AccessScheme::Csma => sinr,
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, not on how they were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Standard error of the mean estimated from `batches` contiguous batch
/// means. Returns `None` with fewer than two usable batches.
pub fn batch_means_std_error(values: &[f64], batches: usize) -> Option<f64> {
    let size = values.len() / batches.max(1);
    if batches < 2 || size == 0 {
        return None;
    }
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(pairwise_mean)
        .collect();
    let grand = pairwise_mean(&means);
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Some((var / batches as f64).sqrt())
}

/// Empirical and analytic mean of `Σ_{u∈Φ} h(u)` for a Poisson process `Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampbellEstimate {
    pub empirical_mean: f64,
    pub empirical_std_error: f64,
    pub analytic_mean: f64,
    pub trials: usize,
}

impl CampbellEstimate {
    /// `|empirical − analytic|` in units of the empirical standard error.
    pub fn z_score(&self) -> f64 {
        (self.empirical_mean - self.analytic_mean).abs() / self.empirical_std_error
    }
}

/// `∫_region h` by composite Simpson in polar coordinates about the
/// annulus centre.
pub fn integrate_over_annulus(region: &Annulus, h: &(dyn Fn(Point2D) -> f64 + Sync)) -> f64 {
    const N_R: usize = 400;
    const N_PHI: usize = 720;
    let simpson_weight = |i: usize, n: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let dr = (region.outer - region.inner) / N_R as f64;
    let dphi = std::f64::consts::TAU / N_PHI as f64;
    let mut total = 0.0;
    for i in 0..=N_R {
        let r = region.inner + i as f64 * dr;
        if r == 0.0 {
            continue;
        }
        // periodic in φ: the plain rectangle rule is spectrally accurate
        let ring: f64 = (0..N_PHI)
            .map(|j| h(region.center + Point2D::from_polar(r, j as f64 * dphi)))
            .sum::<f64>()
            * dphi;
        total += simpson_weight(i, N_R) * ring * r;
    }
    total * dr / 3.0
}

/// Checks Campbell's theorem `E[Σ h(u)] = λ ∫ h` on a Poisson process of
/// `density` points per m² over `region`, using `trials` realizations.
pub fn campbell_mean_oracle(
    density: f64,
    region: &Annulus,
    h: &(dyn Fn(Point2D) -> f64 + Sync),
    trials: usize,
    seed: u64,
) -> CampbellEstimate {
    const BATCH: usize = 1000;
    let mean_count = density * region.area();
    let poisson = Poisson::new(mean_count).expect("positive expected count");
    let batches = trials.div_ceil(BATCH);
    let sums: Vec<f64> = (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = BATCH.min(trials - b * BATCH);
            (0..n)
                .map(|_| {
                    let count = poisson.sample(&mut rng) as usize;
                    let vals: Vec<f64> = (0..count).map(|_| h(region.sample(&mut rng))).collect();
                    pairwise_sum(&vals)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mean = pairwise_mean(&sums);
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sums.len() - 1).max(1) as f64;
    CampbellEstimate {
        empirical_mean: mean,
        empirical_std_error: (var / sums.len() as f64).sqrt(),
        analytic_mean: density * integrate_over_annulus(region, h),
        trials,
    }
}

/// One of the standard Campbell checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CampbellCase {
    pub name: &'static str,
    pub estimate: CampbellEstimate,
    /// Exact `λ ∫ h` where a closed form exists.
    pub closed_form: Option<f64>,
}

/// `λ ∫ c·r^-a dA` over the annulus `inner ≤ r ≤ outer` centred on the origin.
pub fn power_law_annulus_integral(
    density: f64,
    coefficient: f64,
    exponent: f64,
    inner: f64,
    outer: f64,
) -> f64 {
    density
        * coefficient
        * std::f64::consts::TAU
        * (inner.powf(2.0 - exponent) - outer.powf(2.0 - exponent))
        / (exponent - 2.0)
}

/// Counting measure with 100 expected points, the coastal path gain over
/// an annulus around the radar, and the same at twice the density.
pub fn campbell_cases(trials: usize, seed: u64) -> Vec<CampbellCase> {
    let disc = Annulus {
        center: Point2D::new(2000.0, 0.0),
        inner: 0.0,
        outer: 1000.0,
    };
    let ring = Annulus {
        center: Point2D::ORIGIN,
        inner: 1000.0,
        outer: 3000.0,
    };
    let coastal = CoastalPathModel::default();
    let path = move |u: Point2D| coastal.coefficient * u.norm().powf(-coastal.exponent);
    let density = 100.0 / ring.area();
    let closed = |lambda: f64| {
        power_law_annulus_integral(
            lambda,
            coastal.coefficient,
            coastal.exponent,
            ring.inner,
            ring.outer,
        )
    };
    vec![
        CampbellCase {
            name: "count",
            estimate: campbell_mean_oracle(100.0 / disc.area(), &disc, &|_| 1.0, trials, seed),
            closed_form: Some(100.0),
        },
        CampbellCase {
            name: "path_gain",
            estimate: campbell_mean_oracle(density, &ring, &path, trials, seed.wrapping_add(1)),
            closed_form: Some(closed(density)),
        },
        CampbellCase {
            name: "path_gain_double_density",
            estimate: campbell_mean_oracle(
                2.0 * density,
                &ring,
                &path,
                trials,
                seed.wrapping_add(2),
            ),
            closed_form: Some(closed(2.0 * density)),
        },
    ]
}
