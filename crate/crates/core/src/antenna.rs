//! Azimuth gain patterns evaluated at an off-axis angle.
//!
//! Gains are returned as linear power ratios; dB appears only in the
//! constructors and the `*_db` helpers.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Uniform linear array used by both APs and stations.
///
/// The array factor of `num_elements` elements spaced `element_spacing`
/// wavelengths apart is weighted by a directional element factor
/// `max(cos²(θ/2)^element_exponent, -front_to_back_db)`, which models the
/// reflector behind an outdoor panel. With `element_exponent = 0` the
/// elements are isotropic in azimuth and the pattern is front/back
/// symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WifiArrayPattern {
    pub element_gain_dbi: f64,
    pub num_elements: usize,
    pub element_spacing: f64,
    pub element_exponent: f64,
    pub front_to_back_db: f64,
}

impl Default for WifiArrayPattern {
    fn default() -> Self {
        Self {
            element_gain_dbi: 2.15,
            num_elements: 4,
            element_spacing: 0.5,
            element_exponent: 1.0,
            front_to_back_db: 25.0,
        }
    }
}

impl WifiArrayPattern {
    /// The plain array with isotropic elements.
    pub fn isotropic_elements(self) -> Self {
        Self {
            element_exponent: 0.0,
            front_to_back_db: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_elements == 0 {
            return Err(Error::InvalidConfig(
                "wifi array needs at least one element".into(),
            ));
        }
        if !(self.element_spacing > 0.0) || !self.element_gain_dbi.is_finite() {
            return Err(Error::InvalidConfig(
                "wifi element spacing must be > 0".into(),
            ));
        }
        if !(self.element_exponent >= 0.0) || !(self.front_to_back_db >= 0.0) {
            return Err(Error::InvalidConfig(
                "wifi element exponent and front-to-back ratio must be ≥ 0".into(),
            ));
        }
        Ok(())
    }

    pub fn peak_gain_dbi(&self) -> f64 {
        self.element_gain_dbi + linear_to_db(self.num_elements as f64)
    }

    /// `|AF(θ)|²` for `AF(θ) = Σₖ exp(-2πj·k·δ·sinθ)`.
    pub fn array_factor_power(&self, theta: f64) -> f64 {
        let n = self.num_elements as f64;
        let half_psi = PI * self.element_spacing * theta.sin();
        let den = half_psi.sin();
        if den.abs() < 1e-12 {
            return n * n;
        }
        let num = (n * half_psi).sin();
        (num * num) / (den * den)
    }

    pub fn element_factor(&self, theta: f64) -> f64 {
        if self.element_exponent == 0.0 {
            return 1.0;
        }
        let cardioid = (0.5 * (1.0 + theta.cos())).powf(self.element_exponent);
        cardioid.max(db_to_linear(-self.front_to_back_db))
    }

    /// Linear power gain at off-axis angle `theta`.
    pub fn gain(&self, theta: f64) -> f64 {
        db_to_linear(self.element_gain_dbi)
            * self.element_factor(theta)
            * self.array_factor_power(theta)
            / self.num_elements as f64
    }

    pub fn gain_db(&self, theta: f64) -> f64 {
        linear_to_db(self.gain(theta))
    }
}

/// Parabolic mainlobe in dB down to a constant sidelobe floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicPattern {
    pub peak_gain_dbi: f64,
    /// Full 3 dB beamwidth; the mainlobe is 3 dB down at half this angle.
    pub beamwidth_3db: f64,
    /// Floor depth below the peak, dB.
    pub sidelobe_depth_db: f64,
}

impl ParabolicPattern {
    /// Off-axis angle where the mainlobe meets the floor.
    pub fn floor_breakpoint(&self) -> f64 {
        self.beamwidth_3db * (self.sidelobe_depth_db / 12.0).sqrt()
    }

    pub fn gain_db(&self, theta: f64) -> f64 {
        let x = theta / self.beamwidth_3db;
        (self.peak_gain_dbi - 12.0 * x * x).max(self.peak_gain_dbi - self.sidelobe_depth_db)
    }
}

/// Piecewise-linear (in dB) pattern through `(θ, dBi)` points, flat beyond
/// the last point.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPattern {
    points: Vec<(f64, f64)>,
}

impl TabulatedPattern {
    /// Points must start at θ = 0, have strictly increasing angles within
    /// `[0, π]` and non-increasing gains.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, String> {
        let Some(&(first, _)) = points.first() else {
            return Err("pattern table is empty".into());
        };
        if first != 0.0 {
            return Err("pattern table must start at 0 degrees".into());
        }
        for &(theta, gain) in &points {
            if !theta.is_finite() || !gain.is_finite() || !(0.0..=PI + 1e-12).contains(&theta) {
                return Err(format!("table point ({theta}, {gain}) out of range"));
            }
        }
        for pair in points.windows(2) {
            let ((t0, g0), (t1, g1)) = (pair[0], pair[1]);
            if t1 <= t0 {
                return Err("table angles must be strictly increasing".into());
            }
            if g1 > g0 {
                return Err("table gains must be non-increasing".into());
            }
        }
        Ok(Self { points })
    }

    /// Parses `deg:dBi` pairs separated by commas, e.g. `0:33.5, 2:21.5, 4:-10`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut points = Vec::new();
        for item in text.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (deg, gain) = item
                .split_once(':')
                .ok_or_else(|| format!("expected `deg:dBi`, got `{item}`"))?;
            let deg: f64 = deg
                .trim()
                .parse()
                .map_err(|_| format!("bad angle `{deg}`"))?;
            let gain: f64 = gain
                .trim()
                .parse()
                .map_err(|_| format!("bad gain `{gain}`"))?;
            points.push((deg.to_radians(), gain));
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn gain_db(&self, theta: f64) -> f64 {
        let pts = &self.points;
        let idx = pts.partition_point(|&(t, _)| t <= theta);
        if idx == 0 {
            return pts[0].1;
        }
        if idx == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, g0) = pts[idx - 1];
        let (t1, g1) = pts[idx];
        g0 + (g1 - g0) * (theta - t0) / (t1 - t0)
    }
}

/// High-gain radar antenna.
#[derive(Debug, Clone, PartialEq)]
pub enum RadarPattern {
    Parabolic(ParabolicPattern),
    Tabulated(TabulatedPattern),
}

impl Default for RadarPattern {
    fn default() -> Self {
        RadarPattern::Parabolic(ParabolicPattern {
            peak_gain_dbi: 33.5,
            beamwidth_3db: 2f64.to_radians(),
            sidelobe_depth_db: 43.5,
        })
    }
}

impl RadarPattern {
    pub fn peak_gain_dbi(&self) -> f64 {
        match self {
            RadarPattern::Parabolic(p) => p.peak_gain_dbi,
            RadarPattern::Tabulated(t) => t.points[0].1,
        }
    }

    /// Sidelobe floor in dBi.
    pub fn floor_gain_dbi(&self) -> f64 {
        match self {
            RadarPattern::Parabolic(p) => p.peak_gain_dbi - p.sidelobe_depth_db,
            RadarPattern::Tabulated(t) => t.points[t.points.len() - 1].1,
        }
    }

    /// Off-axis angle beyond which the gain equals the floor.
    pub fn floor_breakpoint(&self) -> f64 {
        match self {
            RadarPattern::Parabolic(p) => p.floor_breakpoint(),
            RadarPattern::Tabulated(t) => t.points[t.points.len() - 1].0,
        }
    }

    /// The high-gain model is only meaningful for 22 < G_max < 48 dBi.
    pub fn validate(&self) -> Result<()> {
        let peak = self.peak_gain_dbi();
        if !(22.0 < peak && peak < 48.0) {
            return Err(Error::InvalidConfig(format!(
                "radar peak gain {peak} dBi outside the (22, 48) dBi high-gain range"
            )));
        }
        if let RadarPattern::Parabolic(p) = self {
            if !(p.beamwidth_3db > 0.0 && p.beamwidth_3db < PI) || !(p.sidelobe_depth_db >= 0.0) {
                return Err(Error::InvalidConfig(
                    "radar beamwidth must be in (0, 180) deg and sidelobe depth ≥ 0".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn gain_db(&self, theta: f64) -> f64 {
        match self {
            RadarPattern::Parabolic(p) => p.gain_db(theta),
            RadarPattern::Tabulated(t) => t.gain_db(theta),
        }
    }

    /// Linear power gain at off-axis angle `theta ∈ [0, π]`.
    pub fn gain(&self, theta: f64) -> f64 {
        db_to_linear(self.gain_db(theta))
    }

    /// Precomputes the floor so sweeps over many angles skip the `powf`
    /// outside the mainlobe.
    pub fn evaluator(&self) -> RadarGainEvaluator<'_> {
        RadarGainEvaluator {
            pattern: self,
            breakpoint: self.floor_breakpoint(),
            floor: db_to_linear(self.floor_gain_dbi()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RadarGainEvaluator<'a> {
    pattern: &'a RadarPattern,
    breakpoint: f64,
    floor: f64,
}

impl RadarGainEvaluator<'_> {
    #[inline]
    pub fn gain(&self, theta: f64) -> f64 {
        if theta >= self.breakpoint {
            self.floor
        } else {
            self.pattern.gain(theta)
        }
    }
}

/// Grid over `[0, π]` used by the pattern tests and the CLI sanity checks.
pub fn angle_grid(step: f64) -> impl Iterator<Item = f64> {
    let n = (PI / step).round() as usize;
    (0..=n).map(move |i| (i as f64 * step).min(PI))
}

#[doc(hidden)]
pub fn full_circle_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| -PI + TAU * i as f64 / (points - 1) as f64)
}
