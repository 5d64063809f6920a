//! Scenario configuration and its flat `key = value` text format.
//!
//! ```text
//! # separation to the region centre, meters
//! d = 3000
//! scheme = csma
//! mitigation = true
//! theta_deg = 90
//! ```
//!
//! Keys are the [`SimConfig`] field names. Lines starting with `#` and
//! trailing `# ...` are comments. Everything not given keeps its default
//! except `d`, which must be set.

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::antenna::{ParabolicPattern, RadarPattern, TabulatedPattern, WifiArrayPattern};
use crate::error::ConfigError;
use crate::interference::Models;
use crate::mac::{AccessScheme, TxPowers};
use crate::propagation::{CoastalPathModel, NoiseBudget, UmiCondition, UmiPathModel};

/// Minimum number of boresight samples per rotation for the peak search.
pub const MIN_SAMPLES_PER_ROTATION: usize = 3600;

/// When the radar-to-Wi-Fi snapshot of a drop is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtwSampling {
    /// Uniform instant inside the sweep period.
    Sweep,
    /// Uniform instant over the whole rotation.
    Rotation,
}

impl FromStr for RtwSampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sweep" => Ok(RtwSampling::Sweep),
            "rotation" => Ok(RtwSampling::Rotation),
            other => Err(format!(
                "unknown sampling `{other}` (expected sweep or rotation)"
            )),
        }
    }
}

impl RtwSampling {
    fn as_str(&self) -> &'static str {
        match self {
            RtwSampling::Sweep => "sweep",
            RtwSampling::Rotation => "rotation",
        }
    }
}

fn umi_condition_str(c: UmiCondition) -> &'static str {
    match c {
        UmiCondition::Los => "los",
        UmiCondition::Nlos => "nlos",
    }
}

/// Every scenario parameter. Lengths are meters, powers dBm, gains dBi,
/// angles degrees (converted at use).
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Radar to Wi-Fi region centre.
    pub d: f64,
    pub r_reg: f64,
    pub r_net: f64,
    pub lambda_ap: usize,
    pub lambda_sta: usize,
    pub scheme: AccessScheme,
    pub mitigation: bool,
    /// Off-axis threshold `Θ`.
    pub theta_deg: f64,
    /// Radar revolutions per minute.
    pub rho: f64,
    /// Mitigation lead time before each sweep, seconds.
    pub tau: f64,
    pub n_drops: usize,
    /// Peak-search step, seconds; `None` means 3600 steps per rotation.
    pub time_step: Option<f64>,
    pub seed: u64,
    /// Poisson-distributed node counts instead of exact counts.
    pub poisson_counts: bool,
    /// Scale Wi-Fi-to-radar power by the radar/Wi-Fi bandwidth ratio.
    pub bandwidth_overlap: bool,
    /// Standard deviation of each node's own position estimate, meters.
    pub position_error: f64,
    pub rtw_sampling: RtwSampling,
    /// Extra sweep width beyond the region's angular size; `None` uses the
    /// radar 3 dB beamwidth.
    pub beamwidth_margin_deg: Option<f64>,

    pub ap_tx_power_dbm: f64,
    pub sta_tx_power_dbm: f64,
    pub radar_tx_power_dbm: f64,

    pub wifi_element_gain_dbi: f64,
    pub wifi_num_elements: usize,
    pub wifi_element_spacing: f64,
    pub wifi_element_exponent: f64,
    pub wifi_front_to_back_db: f64,

    pub radar_peak_gain_dbi: f64,
    pub radar_beamwidth_deg: f64,
    pub radar_sidelobe_depth_db: f64,
    /// Replaces the parabolic radar pattern when set.
    pub radar_pattern_table: Option<TabulatedPattern>,

    pub coastal_coefficient: f64,
    pub coastal_exponent: f64,
    pub umi_condition: UmiCondition,
    pub carrier_ghz: f64,
    pub bandwidth_wifi_hz: f64,
    pub bandwidth_radar_hz: f64,
    pub noise_wifi_dbm: f64,
    pub noise_radar_dbm: f64,
}

impl SimConfig {
    /// Table and numerical-setup defaults at the given radar distance.
    pub fn with_distance(d: f64) -> Self {
        let wifi = WifiArrayPattern::default();
        let noise = NoiseBudget::default();
        let coastal = CoastalPathModel::default();
        Self {
            d,
            // 3.14 km² region, 0.04 km² networks
            r_reg: 1000.0,
            r_net: (0.04e6 / std::f64::consts::PI).sqrt(),
            lambda_ap: 100,
            lambda_sta: 10,
            scheme: AccessScheme::Edca,
            mitigation: false,
            theta_deg: 30.0,
            rho: 15.0,
            tau: 1e-3,
            n_drops: 10_000,
            time_step: None,
            seed: 1,
            poisson_counts: false,
            bandwidth_overlap: false,
            position_error: 0.0,
            rtw_sampling: RtwSampling::Sweep,
            beamwidth_margin_deg: None,
            ap_tx_power_dbm: 30.0,
            sta_tx_power_dbm: 10.0,
            radar_tx_power_dbm: 90.0,
            wifi_element_gain_dbi: wifi.element_gain_dbi,
            wifi_num_elements: wifi.num_elements,
            wifi_element_spacing: wifi.element_spacing,
            wifi_element_exponent: wifi.element_exponent,
            wifi_front_to_back_db: wifi.front_to_back_db,
            radar_peak_gain_dbi: 33.5,
            radar_beamwidth_deg: 2.0,
            radar_sidelobe_depth_db: 43.5,
            radar_pattern_table: None,
            coastal_coefficient: coastal.coefficient,
            coastal_exponent: coastal.exponent,
            umi_condition: UmiCondition::Nlos,
            carrier_ghz: 3.5,
            bandwidth_wifi_hz: noise.bandwidth_wifi_hz,
            bandwidth_radar_hz: noise.bandwidth_radar_hz,
            noise_wifi_dbm: noise.noise_power_wifi_dbm,
            noise_radar_dbm: noise.noise_power_radar_dbm,
        }
    }

    pub fn with_counts(mut self, lambda_ap: usize, lambda_sta: usize) -> Self {
        self.lambda_ap = lambda_ap;
        self.lambda_sta = lambda_sta;
        self
    }

    pub fn threshold_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    pub fn rotation_period(&self) -> f64 {
        60.0 / self.rho
    }

    pub fn effective_time_step(&self) -> f64 {
        self.time_step
            .unwrap_or(self.rotation_period() / MIN_SAMPLES_PER_ROTATION as f64)
    }

    pub fn beamwidth_margin_rad(&self) -> f64 {
        self.beamwidth_margin_deg
            .unwrap_or(self.radar_beamwidth_deg)
            .to_radians()
    }

    pub fn tx_powers(&self) -> TxPowers {
        TxPowers {
            ap_dbm: self.ap_tx_power_dbm,
            sta_dbm: self.sta_tx_power_dbm,
        }
    }

    pub fn wifi_pattern(&self) -> WifiArrayPattern {
        WifiArrayPattern {
            element_gain_dbi: self.wifi_element_gain_dbi,
            num_elements: self.wifi_num_elements,
            element_spacing: self.wifi_element_spacing,
            element_exponent: self.wifi_element_exponent,
            front_to_back_db: self.wifi_front_to_back_db,
        }
    }

    pub fn radar_pattern(&self) -> RadarPattern {
        match &self.radar_pattern_table {
            Some(table) => RadarPattern::Tabulated(table.clone()),
            None => RadarPattern::Parabolic(ParabolicPattern {
                peak_gain_dbi: self.radar_peak_gain_dbi,
                beamwidth_3db: self.radar_beamwidth_deg.to_radians(),
                sidelobe_depth_db: self.radar_sidelobe_depth_db,
            }),
        }
    }

    pub fn models(&self) -> Models {
        Models {
            wifi: self.wifi_pattern(),
            radar: self.radar_pattern(),
            coastal: CoastalPathModel {
                coefficient: self.coastal_coefficient,
                exponent: self.coastal_exponent,
            },
            umi: UmiPathModel {
                carrier_ghz: self.carrier_ghz,
                condition: self.umi_condition,
            },
            noise: NoiseBudget {
                bandwidth_wifi_hz: self.bandwidth_wifi_hz,
                bandwidth_radar_hz: self.bandwidth_radar_hz,
                noise_power_wifi_dbm: self.noise_wifi_dbm,
                noise_power_radar_dbm: self.noise_radar_dbm,
            },
            radar_tx_power_dbm: self.radar_tx_power_dbm,
            bandwidth_overlap: self.bandwidth_overlap,
        }
    }

    /// Lists every violated invariant.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        check(
            self.d.is_finite() && self.d > self.r_reg,
            format!(
                "d ({}) must exceed r_reg ({}) so the region excludes the radar",
                self.d, self.r_reg
            ),
        );
        check(
            self.r_net > 0.0 && self.r_reg > self.r_net,
            format!("need r_reg ({}) > r_net ({}) > 0", self.r_reg, self.r_net),
        );
        check(self.lambda_ap >= 1, "lambda_ap must be ≥ 1".into());
        check(self.lambda_sta >= 1, "lambda_sta must be ≥ 1".into());
        check(
            (0.0..=180.0).contains(&self.theta_deg),
            format!("theta_deg ({}) must lie in [0, 180]", self.theta_deg),
        );
        check(
            self.rho > 0.0 && self.rho.is_finite(),
            format!("rho ({}) must be > 0", self.rho),
        );
        check(
            self.tau >= 0.0 && self.tau.is_finite(),
            format!("tau ({}) must be ≥ 0", self.tau),
        );
        check(self.n_drops >= 1, "n_drops must be ≥ 1".into());
        if let Some(step) = self.time_step {
            let samples = if step > 0.0 {
                (self.rotation_period() / step).floor()
            } else {
                0.0
            };
            check(samples >= MIN_SAMPLES_PER_ROTATION as f64, format!(
                "time_step ({step}) gives {samples} samples per rotation, need ≥ {MIN_SAMPLES_PER_ROTATION}"));
        }
        check(
            self.position_error >= 0.0 && self.position_error.is_finite(),
            "position_error must be ≥ 0".into(),
        );
        if let Some(m) = self.beamwidth_margin_deg {
            check(
                (0.0..=360.0).contains(&m),
                "beamwidth_margin_deg must lie in [0, 360]".into(),
            );
        }
        for (name, v) in [
            ("ap_tx_power_dbm", self.ap_tx_power_dbm),
            ("sta_tx_power_dbm", self.sta_tx_power_dbm),
            ("radar_tx_power_dbm", self.radar_tx_power_dbm),
            ("noise_wifi_dbm", self.noise_wifi_dbm),
            ("noise_radar_dbm", self.noise_radar_dbm),
        ] {
            check(v.is_finite(), format!("{name} must be finite"));
        }
        check(self.carrier_ghz > 0.0, "carrier_ghz must be > 0".into());
        check(
            self.bandwidth_wifi_hz > 0.0 && self.bandwidth_radar_hz > 0.0,
            "bandwidths must be > 0".into(),
        );
        let models = self.models();
        for res in [
            models.wifi.validate(),
            models.radar.validate(),
            models.coastal.validate(),
        ] {
            if let Err(e) = res {
                errs.push(e.to_string());
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(errs))
        }
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "d" => self.d = parse_f64(value)?,
            "r_reg" => self.r_reg = parse_f64(value)?,
            "r_net" => self.r_net = parse_f64(value)?,
            "lambda_ap" => self.lambda_ap = parse_usize(value)?,
            "lambda_sta" => self.lambda_sta = parse_usize(value)?,
            "scheme" => self.scheme = value.parse()?,
            "mitigation" => self.mitigation = parse_bool(value)?,
            "theta_deg" => self.theta_deg = parse_f64(value)?,
            "rho" => self.rho = parse_f64(value)?,
            "tau" => self.tau = parse_f64(value)?,
            "n_drops" => self.n_drops = parse_usize(value)?,
            "time_step" => self.time_step = parse_optional(value, parse_f64)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| format!("`{value}` is not a 64-bit seed"))?
            }
            "poisson_counts" => self.poisson_counts = parse_bool(value)?,
            "bandwidth_overlap" => self.bandwidth_overlap = parse_bool(value)?,
            "position_error" => self.position_error = parse_f64(value)?,
            "rtw_sampling" => self.rtw_sampling = value.parse()?,
            "beamwidth_margin_deg" => self.beamwidth_margin_deg = parse_optional(value, parse_f64)?,
            "ap_tx_power_dbm" => self.ap_tx_power_dbm = parse_f64(value)?,
            "sta_tx_power_dbm" => self.sta_tx_power_dbm = parse_f64(value)?,
            "radar_tx_power_dbm" => self.radar_tx_power_dbm = parse_f64(value)?,
            "wifi_element_gain_dbi" => self.wifi_element_gain_dbi = parse_f64(value)?,
            "wifi_num_elements" => self.wifi_num_elements = parse_usize(value)?,
            "wifi_element_spacing" => self.wifi_element_spacing = parse_f64(value)?,
            "wifi_element_exponent" => self.wifi_element_exponent = parse_f64(value)?,
            "wifi_front_to_back_db" => self.wifi_front_to_back_db = parse_f64(value)?,
            "radar_peak_gain_dbi" => self.radar_peak_gain_dbi = parse_f64(value)?,
            "radar_beamwidth_deg" => self.radar_beamwidth_deg = parse_f64(value)?,
            "radar_sidelobe_depth_db" => self.radar_sidelobe_depth_db = parse_f64(value)?,
            "radar_pattern_table" => {
                self.radar_pattern_table = parse_optional(value, TabulatedPattern::parse)?
            }
            "coastal_coefficient" => self.coastal_coefficient = parse_f64(value)?,
            "coastal_exponent" => self.coastal_exponent = parse_f64(value)?,
            "umi_condition" => {
                self.umi_condition = match value.to_ascii_lowercase().as_str() {
                    "los" => UmiCondition::Los,
                    "nlos" => UmiCondition::Nlos,
                    other => {
                        return Err(format!(
                            "unknown UMi condition `{other}` (expected los or nlos)"
                        ))
                    }
                }
            }
            "carrier_ghz" => self.carrier_ghz = parse_f64(value)?,
            "bandwidth_wifi_hz" => self.bandwidth_wifi_hz = parse_f64(value)?,
            "bandwidth_radar_hz" => self.bandwidth_radar_hz = parse_f64(value)?,
            "noise_wifi_dbm" => self.noise_wifi_dbm = parse_f64(value)?,
            "noise_radar_dbm" => self.noise_radar_dbm = parse_f64(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Canonical text form; parses back to an identical config.
    pub fn to_text(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
        }
        let table = self.radar_pattern_table.as_ref().map_or_else(
            || "none".to_string(),
            |t| {
                t.points()
                    .iter()
                    .map(|(th, g)| format!("{:?}:{g:?}", th.to_degrees()))
                    .collect::<Vec<_>>()
                    .join(",")
            },
        );
        let entries: Vec<(&str, String)> = vec![
            ("d", format!("{:?}", self.d)),
            ("r_reg", format!("{:?}", self.r_reg)),
            ("r_net", format!("{:?}", self.r_net)),
            ("lambda_ap", self.lambda_ap.to_string()),
            ("lambda_sta", self.lambda_sta.to_string()),
            ("scheme", self.scheme.to_string()),
            ("mitigation", self.mitigation.to_string()),
            ("theta_deg", format!("{:?}", self.theta_deg)),
            ("rho", format!("{:?}", self.rho)),
            ("tau", format!("{:?}", self.tau)),
            ("n_drops", self.n_drops.to_string()),
            ("time_step", opt(self.time_step)),
            ("seed", self.seed.to_string()),
            ("poisson_counts", self.poisson_counts.to_string()),
            ("bandwidth_overlap", self.bandwidth_overlap.to_string()),
            ("position_error", format!("{:?}", self.position_error)),
            ("rtw_sampling", self.rtw_sampling.as_str().to_string()),
            ("beamwidth_margin_deg", opt(self.beamwidth_margin_deg)),
            ("ap_tx_power_dbm", format!("{:?}", self.ap_tx_power_dbm)),
            ("sta_tx_power_dbm", format!("{:?}", self.sta_tx_power_dbm)),
            (
                "radar_tx_power_dbm",
                format!("{:?}", self.radar_tx_power_dbm),
            ),
            (
                "wifi_element_gain_dbi",
                format!("{:?}", self.wifi_element_gain_dbi),
            ),
            ("wifi_num_elements", self.wifi_num_elements.to_string()),
            (
                "wifi_element_spacing",
                format!("{:?}", self.wifi_element_spacing),
            ),
            (
                "wifi_element_exponent",
                format!("{:?}", self.wifi_element_exponent),
            ),
            (
                "wifi_front_to_back_db",
                format!("{:?}", self.wifi_front_to_back_db),
            ),
            (
                "radar_peak_gain_dbi",
                format!("{:?}", self.radar_peak_gain_dbi),
            ),
            (
                "radar_beamwidth_deg",
                format!("{:?}", self.radar_beamwidth_deg),
            ),
            (
                "radar_sidelobe_depth_db",
                format!("{:?}", self.radar_sidelobe_depth_db),
            ),
            ("radar_pattern_table", table),
            (
                "coastal_coefficient",
                format!("{:?}", self.coastal_coefficient),
            ),
            ("coastal_exponent", format!("{:?}", self.coastal_exponent)),
            (
                "umi_condition",
                umi_condition_str(self.umi_condition).to_string(),
            ),
            ("carrier_ghz", format!("{:?}", self.carrier_ghz)),
            ("bandwidth_wifi_hz", format!("{:?}", self.bandwidth_wifi_hz)),
            (
                "bandwidth_radar_hz",
                format!("{:?}", self.bandwidth_radar_hz),
            ),
            ("noise_wifi_dbm", format!("{:?}", self.noise_wifi_dbm)),
            ("noise_radar_dbm", format!("{:?}", self.noise_radar_dbm)),
        ];
        let mut out = String::new();
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`to_text`](Self::to_text).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8]
            .iter()
            .fold(String::with_capacity(16), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

fn parse_f64(value: &str) -> Result<f64, String> {
    let v: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{value}` is not finite"))
    }
}

fn parse_usize(value: &str) -> Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("`{value}` is not a non-negative integer"))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{value}` is not a boolean")),
    }
}

fn parse_optional<T>(
    value: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, String> {
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse(value).map(Some)
    }
}

/// Parses a config file body plus `key=value` overrides (which win).
///
/// Override errors report line 0.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::with_distance(f64::NAN);
    let mut have_d = false;

    let file_entries = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
        (!line.is_empty()).then_some((i + 1, line))
    });
    for (line_no, line) in file_entries {
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            field: line.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        cfg.set(key, value.trim())
            .map_err(|message| ConfigError::Parse {
                line: line_no,
                field: key.to_string(),
                message,
            })?;
        have_d |= key == "d";
    }
    for (key, value) in overrides {
        let key = key.trim();
        cfg.set(key, value.trim())
            .map_err(|message| ConfigError::Parse {
                line: 0,
                field: key.to_string(),
                message,
            })?;
        have_d |= key == "d";
    }
    if !have_d {
        return Err(ConfigError::Validation(vec![
            "d (radar to region centre, meters) is required".into(),
        ]));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Splits `key=value` (as given to `--set`).
pub fn parse_override(arg: &str) -> Result<(String, String), String> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| format!("override `{arg}` is not `key=value`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Parses a comma-separated list of finite numbers, e.g. `1,2,5,10`.
pub fn parse_value_list(text: &str) -> Result<Vec<f64>, String> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_f64)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("value list is empty".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_follow_the_numerical_setup() {
        let cfg = parse_config("d = 2000\n", &[]).unwrap();
        assert_eq!(cfg.lambda_ap, 100);
        assert_eq!(cfg.lambda_sta, 10);
        assert_eq!(cfg.ap_tx_power_dbm, 30.0);
        assert_eq!(cfg.sta_tx_power_dbm, 10.0);
        assert_eq!(cfg.radar_tx_power_dbm, 90.0);
        assert_eq!(cfg.radar_peak_gain_dbi, 33.5);
        assert_eq!(cfg.noise_wifi_dbm, -100.99);
        assert_eq!(cfg.noise_radar_dbm, -104.0);
        assert_eq!(cfg.n_drops, 10_000);
        let reg_km2 = std::f64::consts::PI * cfg.r_reg * cfg.r_reg / 1e6;
        let net_km2 = std::f64::consts::PI * cfg.r_net * cfg.r_net / 1e6;
        // quoted as about 3.14 km²
        assert!((3.13..3.15).contains(&reg_km2));
        assert!((net_km2 - 0.04).abs() < 1e-9);
    }

    #[test]
    fn empty_file_requires_d() {
        match parse_config("# nothing here\n\n", &[]) {
            Err(ConfigError::Validation(msgs)) => assert!(msgs[0].contains("d ")),
            other => panic!("{other:?}"),
        }
        let cfg = parse_config("", &[("d".into(), "3000".into())]).unwrap();
        assert_eq!(cfg.d, 3000.0);
    }

    #[test]
    fn theta_out_of_range_is_rejected() {
        let err = parse_config("d = 2000\ntheta_deg = 200\n", &[]).unwrap_err();
        match err {
            ConfigError::Validation(msgs) => assert!(msgs.iter().any(|m| m.contains("theta_deg"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overrides_win() {
        let cfg = parse_config(
            "d = 2000\nlambda_ap = 100\n",
            &[("lambda_ap".into(), "50".into())],
        )
        .unwrap();
        assert_eq!(cfg.lambda_ap, 50);
    }

    #[test]
    fn parse_errors_carry_line_and_field() {
        let err = parse_config("d = 2000\n\nlambda_ap = many\n", &[]).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 3,
                field: "lambda_ap".into(),
                message: "`many` is not a non-negative integer".into()
            }
        );
        assert!(matches!(
            parse_config("d = 2000\nfrobnicate = 1\n", &[]),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("d 2000\n", &[]),
            Err(ConfigError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_enums() {
        let text = "d = 5000 # km? no, meters\nscheme = CSMA\nmitigation = yes\n\
                    rtw_sampling = rotation\numi_condition = los\nradar_pattern_table = 0:33.5,3:-10\n";
        let cfg = parse_config(text, &[]).unwrap();
        assert_eq!(cfg.scheme, AccessScheme::Csma);
        assert!(cfg.mitigation);
        assert_eq!(cfg.rtw_sampling, RtwSampling::Rotation);
        assert_eq!(cfg.umi_condition, UmiCondition::Los);
        assert!(matches!(cfg.radar_pattern(), RadarPattern::Tabulated(_)));
    }

    #[test]
    fn validation_lists_every_violation() {
        let err = parse_config("d = 500\nrho = 0\nn_drops = 0\n", &[]).unwrap_err();
        match err {
            ConfigError::Validation(msgs) => assert!(msgs.len() >= 3, "{msgs:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coarse_time_step_is_rejected() {
        assert!(parse_config("d = 2000\ntime_step = 0.01\n", &[]).is_err());
        assert!(parse_config("d = 2000\ntime_step = 0.001\n", &[]).is_ok());
    }

    #[test]
    fn value_lists() {
        assert_eq!(
            parse_value_list("1, 2,5,10").unwrap(),
            vec![1.0, 2.0, 5.0, 10.0]
        );
        assert!(parse_value_list("").is_err());
        assert!(parse_value_list("1,x").is_err());
        assert!(parse_value_list("inf").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SimConfig::with_distance(2000.0);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(
            d in 1001.0..20_000.0f64, theta in 0.0..=180.0f64, seed in any::<u64>(),
            ap in 1usize..200, sta in 1usize..20, csma in any::<bool>(), mit in any::<bool>(),
            step in proptest::option::of(1e-5..1e-3f64),
        ) {
            let mut cfg = SimConfig::with_distance(d).with_counts(ap, sta);
            cfg.theta_deg = theta;
            cfg.seed = seed;
            cfg.scheme = if csma { AccessScheme::Csma } else { AccessScheme::Edca };
            cfg.mitigation = mit;
            cfg.time_step = step;
            let back = parse_config(&cfg.to_text(), &[]).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
