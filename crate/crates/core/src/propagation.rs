//! Path-gain models and the thermal noise budget.

use crate::antenna::{db_to_linear, linear_to_db};
use crate::error::{Error, Result};

/// Power-law loss between the coastal radar and a Wi-Fi node:
/// `gain = coefficient · distance^-exponent`, distance in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoastalPathModel {
    pub coefficient: f64,
    pub exponent: f64,
}

impl Default for CoastalPathModel {
    fn default() -> Self {
        Self {
            coefficient: 259.0,
            exponent: 3.97,
        }
    }
}

impl CoastalPathModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.coefficient > 0.0) || !(self.exponent > 2.0) {
            return Err(Error::InvalidConfig(
                "coastal path model needs coefficient > 0 and exponent > 2".into(),
            ));
        }
        Ok(())
    }
}

pub fn coastal_path_gain(model: &CoastalPathModel, distance: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::ZeroDistance);
    }
    Ok(model.coefficient * distance.powf(-model.exponent))
}

/// Line-of-sight condition of the urban-micro model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UmiCondition {
    Los,
    Nlos,
}

/// 3GPP urban-micro hexagonal path loss:
/// `PL = slope·log10(d) + intercept + frequency_slope·log10(f_GHz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmiPathModel {
    pub carrier_ghz: f64,
    pub condition: UmiCondition,
}

impl Default for UmiPathModel {
    fn default() -> Self {
        Self {
            carrier_ghz: 3.5,
            condition: UmiCondition::Nlos,
        }
    }
}

impl UmiPathModel {
    pub const MIN_DISTANCE: f64 = 1.0;

    fn terms(&self) -> (f64, f64, f64) {
        match self.condition {
            UmiCondition::Nlos => (36.7, 22.7, 26.0),
            UmiCondition::Los => (22.0, 28.0, 20.0),
        }
    }

    pub fn loss_db(&self, distance: f64) -> Result<f64> {
        if !(distance >= Self::MIN_DISTANCE) {
            return Err(Error::BelowMinimumDistance(distance));
        }
        let (slope, intercept, freq) = self.terms();
        Ok(slope * distance.log10() + intercept + freq * self.carrier_ghz.log10())
    }
}

pub fn umi_path_gain(model: &UmiPathModel, distance: f64) -> Result<f64> {
    Ok(db_to_linear(-model.loss_db(distance)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Wifi,
    Radar,
}

/// Receiver noise floors of both systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBudget {
    pub bandwidth_wifi_hz: f64,
    pub bandwidth_radar_hz: f64,
    pub noise_power_wifi_dbm: f64,
    pub noise_power_radar_dbm: f64,
}

impl Default for NoiseBudget {
    fn default() -> Self {
        Self {
            bandwidth_wifi_hz: 20e6,
            bandwidth_radar_hz: 10e6,
            noise_power_wifi_dbm: -100.99,
            noise_power_radar_dbm: -104.0,
        }
    }
}

/// Thermal noise density at room temperature.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

impl NoiseBudget {
    pub fn thermal_noise_dbm(bandwidth_hz: f64) -> f64 {
        THERMAL_NOISE_DBM_PER_HZ + linear_to_db(bandwidth_hz)
    }

    /// Whether both noise powers match `kTB` within `tolerance_db`.
    pub fn is_thermal(&self, tolerance_db: f64) -> bool {
        (self.noise_power_wifi_dbm - Self::thermal_noise_dbm(self.bandwidth_wifi_hz)).abs()
            <= tolerance_db
            && (self.noise_power_radar_dbm - Self::thermal_noise_dbm(self.bandwidth_radar_hz)).abs()
                <= tolerance_db
    }

    /// Fraction of the Wi-Fi channel that falls inside the radar receiver.
    pub fn overlap_factor(&self) -> f64 {
        (self.bandwidth_radar_hz / self.bandwidth_wifi_hz).min(1.0)
    }
}

pub fn noise_power(budget: &NoiseBudget, system: System) -> f64 {
    match system {
        System::Wifi => budget.noise_power_wifi_dbm,
        System::Radar => budget.noise_power_radar_dbm,
    }
}

/// Noise power in mW.
pub fn noise_power_mw(budget: &NoiseBudget, system: System) -> f64 {
    db_to_linear(noise_power(budget, system))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coastal_examples() {
        let m = CoastalPathModel::default();
        let g1 = coastal_path_gain(&m, 1000.0).unwrap();
        assert!((g1 / 3.19e-10 - 1.0).abs() < 0.01, "{g1}");
        assert!((linear_to_db(g1) - -94.97).abs() < 0.05);
        let g10 = coastal_path_gain(&m, 10_000.0).unwrap();
        assert!((linear_to_db(g10) - -134.67).abs() < 0.05);
        let ratio = coastal_path_gain(&m, 2400.0).unwrap() / coastal_path_gain(&m, 1200.0).unwrap();
        assert!((ratio - 2f64.powf(-3.97)).abs() < 1e-12);
        assert!(matches!(
            coastal_path_gain(&m, 0.0),
            Err(Error::ZeroDistance)
        ));
    }

    #[test]
    fn umi_examples() {
        let m = UmiPathModel::default();
        assert!((m.loss_db(100.0).unwrap() - 110.25).abs() < 0.01);
        assert!((m.loss_db(10.0).unwrap() - 73.55).abs() < 0.01);
        assert!(m.loss_db(200.0).unwrap() > m.loss_db(100.0).unwrap());
        assert!(matches!(
            umi_path_gain(&m, 0.5),
            Err(Error::BelowMinimumDistance(_))
        ));
        let los = UmiPathModel {
            condition: UmiCondition::Los,
            ..m
        };
        assert!(los.loss_db(100.0).unwrap() < m.loss_db(100.0).unwrap());
    }

    #[test]
    fn noise_examples() {
        let b = NoiseBudget::default();
        assert_eq!(noise_power(&b, System::Wifi), -100.99);
        assert_eq!(noise_power(&b, System::Radar), -104.0);
        assert!((NoiseBudget::thermal_noise_dbm(2e7) - -100.99).abs() < 0.05);
        assert!(b.is_thermal(0.05));
        assert_eq!(b.overlap_factor(), 0.5);
    }

    proptest! {
        #[test]
        fn coastal_log_slope_is_exponent(d1 in 10.0..1e5f64, k in 1.01..100.0f64) {
            let m = CoastalPathModel::default();
            let d2 = d1 * k;
            let slope = (coastal_path_gain(&m, d2).unwrap().log10()
                - coastal_path_gain(&m, d1).unwrap().log10())
                / (d2.log10() - d1.log10());
            prop_assert!((slope + 3.97).abs() < 1e-9);
        }

        #[test]
        fn gains_in_unit_interval(d in 10.0..1e5f64) {
            let c = coastal_path_gain(&CoastalPathModel::default(), d).unwrap();
            let u = umi_path_gain(&UmiPathModel::default(), d).unwrap();
            prop_assert!(c > 0.0 && c < 1.0);
            prop_assert!(u > 0.0 && u < 1.0);
        }
    }
}
