//! Planar geometry of the coexistence scene.
//!
//! The radar sits at the origin and rotates its boresight at a constant
//! rate. Wi-Fi access points are scattered uniformly over a circular region
//! centred on the positive x-axis, and each AP is surrounded by its stations
//! inside a smaller network disc. All angles are radians.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::SimConfig;
use crate::error::{Error, Result};

/// A position on the azimuth plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: Point2D) -> f64 {
        (*self - other).norm()
    }

    pub fn dot(&self, other: Point2D) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Azimuth of the point seen from the origin, in `[0, 2π)`.
    pub fn azimuth(&self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }

    /// Mirror image about the x-axis.
    pub fn reflect_x(&self) -> Self {
        Self::new(self.x, -self.y)
    }
}

impl std::ops::Add for Point2D {
    type Output = Point2D;
    fn add(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2D {
    type Output = Point2D;
    fn sub(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Absolute angular separation of two azimuths, in `[0, π]`.
pub fn angular_separation(a: f64, b: f64) -> f64 {
    let diff = (a - b).rem_euclid(TAU);
    if diff > PI {
        TAU - diff
    } else {
        diff
    }
}

/// The Wi-Fi region disc and the common radius of every network disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub center: Point2D,
    pub radius_region: f64,
    pub radius_network: f64,
}

impl RegionSpec {
    /// Region centred at `(d, 0)`.
    pub fn on_x_axis(d: f64, radius_region: f64, radius_network: f64) -> Result<Self> {
        let region = Self {
            center: Point2D::new(d, 0.0),
            radius_region,
            radius_network,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn distance_to_radar(&self) -> f64 {
        self.center.norm()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_network > 0.0 && self.radius_region > self.radius_network) {
            return Err(Error::InvalidGeometry(format!(
                "need radius_region > radius_network > 0, got {} and {}",
                self.radius_region, self.radius_network
            )));
        }
        let d = self.distance_to_radar();
        if d <= self.radius_region {
            return Err(Error::InvalidGeometry(format!(
                "region of radius {} m at distance {d} m contains the radar",
                self.radius_region
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point2D) -> bool {
        p.distance(self.center) <= self.radius_region
    }
}

/// One realized deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct DropLayout {
    pub ap_positions: Vec<Point2D>,
    /// `sta_positions[k]` holds the stations of the network around AP `k`.
    pub sta_positions: Vec<Vec<Point2D>>,
    pub region: RegionSpec,
}

impl DropLayout {
    pub fn network_count(&self) -> usize {
        self.ap_positions.len()
    }

    /// Checks the placement invariants: APs in the region disc and every
    /// station within the network radius of its AP.
    pub fn validate(&self) -> Result<()> {
        if self.ap_positions.len() != self.sta_positions.len() {
            return Err(Error::InvalidGeometry(
                "station lists do not match AP count".into(),
            ));
        }
        for (ap, stas) in self.ap_positions.iter().zip(&self.sta_positions) {
            if !ap.is_finite() || !self.region.contains(*ap) {
                return Err(Error::InvalidGeometry(format!("AP {ap:?} outside region")));
            }
            for sta in stas {
                if !sta.is_finite() || sta.distance(*ap) > self.region.radius_network {
                    return Err(Error::InvalidGeometry(format!(
                        "station {sta:?} farther than r_net from AP {ap:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The rotating radar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarState {
    pub origin: Point2D,
    pub rpm: f64,
    pub boresight_angle: f64,
}

impl RadarState {
    pub fn new(rpm: f64) -> Result<Self> {
        if !(rpm > 0.0 && rpm.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "radar rpm must be > 0, got {rpm}"
            )));
        }
        Ok(Self {
            origin: Point2D::ORIGIN,
            rpm,
            boresight_angle: 0.0,
        })
    }

    /// Seconds per revolution.
    pub fn rotation_period(&self) -> f64 {
        60.0 / self.rpm
    }

    /// The same radar with its boresight at the rotation angle reached at `t`.
    pub fn at(&self, t: f64) -> Self {
        Self {
            boresight_angle: boresight_at(self, t),
            ..*self
        }
    }

    pub fn with_boresight(&self, angle: f64) -> Self {
        Self {
            boresight_angle: wrap_angle(angle),
            ..*self
        }
    }
}

/// Rotation angle `2πρt/60`, wrapped to `[0, 2π)`.
pub fn boresight_at(radar: &RadarState, t: f64) -> f64 {
    // reduce time first so large t keeps its precision
    let t = t.rem_euclid(radar.rotation_period());
    wrap_angle(TAU * radar.rpm / 60.0 * t)
}

fn angle_between(u: Point2D, v: Point2D) -> Option<f64> {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0).acos())
}

/// Off-axis angle of a Wi-Fi transmitter: the angle between its beam
/// (toward `beam_target`) and the interference axis toward `victim`.
pub fn off_axis_wifi(tx: Point2D, beam_target: Point2D, victim: Point2D) -> Result<f64> {
    angle_between(beam_target - tx, victim - tx).ok_or(Error::DegenerateGeometry(
        "zero-length Wi-Fi beam or interference axis",
    ))
}

/// Off-axis angle of the radar toward `node` for the current boresight.
pub fn off_axis_radar(node: Point2D, radar: &RadarState) -> Result<f64> {
    let axis = node - radar.origin;
    if axis.norm() == 0.0 {
        return Err(Error::DegenerateGeometry("node at radar origin"));
    }
    Ok(angular_separation(axis.azimuth(), radar.boresight_angle))
}

/// A uniform point on the disc of `radius` around `center`.
pub fn sample_uniform_disc<R: Rng + ?Sized>(rng: &mut R, center: Point2D, radius: f64) -> Point2D {
    let r = radius * rng.random::<f64>().sqrt();
    let a = TAU * rng.random::<f64>();
    center + Point2D::from_polar(r, a)
}

/// A uniform point on the annulus `inner ≤ |p - center| ≤ outer`.
pub fn sample_uniform_annulus<R: Rng + ?Sized>(
    rng: &mut R,
    center: Point2D,
    inner: f64,
    outer: f64,
) -> Point2D {
    let u: f64 = rng.random();
    let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
    let a = TAU * rng.random::<f64>();
    center + Point2D::from_polar(r, a)
}

/// Annulus `inner ≤ |p - center| ≤ outer`; `inner = 0` gives a disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub center: Point2D,
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn area(&self) -> f64 {
        PI * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        sample_uniform_annulus(rng, self.center, self.inner, self.outer)
    }
}

/// Stations closer than this to their AP are redrawn so the intra-network
/// path model stays inside its validity range.
pub const MIN_LINK_DISTANCE: f64 = 1.0;

fn point_count<R: Rng + ?Sized>(rng: &mut R, mean: usize, poisson: bool) -> usize {
    if !poisson {
        return mean;
    }
    let dist = Poisson::new(mean as f64).expect("positive Poisson mean");
    dist.sample(rng) as usize
}

/// Draws one deployment: `λ_ap` APs uniform on the region disc and, for
/// each, `λ_sta` stations uniform on its network disc.
///
/// With `poisson_counts` set, both counts become Poisson with those means
/// instead, and networks may end up empty.
pub fn sample_drop<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<DropLayout> {
    if config.lambda_ap == 0 || config.lambda_sta == 0 {
        return Err(Error::InvalidConfig(
            "lambda_ap and lambda_sta must be ≥ 1".into(),
        ));
    }
    let region = RegionSpec::on_x_axis(config.d, config.r_reg, config.r_net)?;

    let n_ap = point_count(rng, config.lambda_ap, config.poisson_counts);
    let mut ap_positions = Vec::with_capacity(n_ap);
    let mut sta_positions = Vec::with_capacity(n_ap);
    for _ in 0..n_ap {
        let ap = sample_uniform_disc(rng, region.center, region.radius_region);
        let n_sta = point_count(rng, config.lambda_sta, config.poisson_counts);
        let stas = (0..n_sta)
            .map(|_| loop {
                let sta = sample_uniform_disc(rng, ap, region.radius_network);
                if sta.distance(ap) >= MIN_LINK_DISTANCE {
                    break sta;
                }
            })
            .collect();
        ap_positions.push(ap);
        sta_positions.push(stas);
    }
    Ok(DropLayout {
        ap_positions,
        sta_positions,
        region,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    const EPS: f64 = 1e-12;

    fn config(lambda_ap: usize, lambda_sta: usize) -> SimConfig {
        SimConfig::with_distance(2000.0).with_counts(lambda_ap, lambda_sta)
    }

    #[test]
    fn drop_has_exact_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layout = sample_drop(&config(100, 10), &mut rng).unwrap();
        assert_eq!(layout.ap_positions.len(), 100);
        assert_eq!(
            layout.sta_positions.iter().map(Vec::len).sum::<usize>(),
            1000
        );
        layout.validate().unwrap();
    }

    #[test]
    fn minimal_drop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = config(1, 1);
        let layout = sample_drop(&cfg, &mut rng).unwrap();
        assert_eq!(layout.ap_positions.len(), 1);
        let ap = layout.ap_positions[0];
        let sta = layout.sta_positions[0][0];
        assert!(layout.region.contains(ap));
        assert!(sta.distance(ap) <= cfg.r_net);
        assert!(sta.distance(ap) >= MIN_LINK_DISTANCE);
    }

    #[test]
    fn region_must_exclude_radar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cfg = config(1, 1);
        cfg.d = cfg.r_reg;
        assert!(matches!(
            sample_drop(&cfg, &mut rng),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(RegionSpec::on_x_axis(500.0, 1000.0, 100.0).is_err());
        assert!(RegionSpec::on_x_axis(5000.0, 100.0, 100.0).is_err());
    }

    #[test]
    fn ap_x_mean_matches_region_center() {
        // uniform disc: E[x] = cx, Var[x] = R²/4
        let cfg = config(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_uniform_disc(&mut rng, Point2D::new(cfg.d, 0.0), cfg.r_reg).x;
        }
        let mean = sum / n as f64;
        let se = (cfg.r_reg * cfg.r_reg / 4.0 / n as f64).sqrt();
        assert!((mean - cfg.d).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn ap_positions_pass_chi_square_on_equal_area_annuli() {
        let cfg = config(100, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bins = 20;
        let mut counts = vec![0usize; bins];
        let mut total = 0usize;
        while total < 100_000 {
            let layout = sample_drop(&cfg, &mut rng).unwrap();
            for ap in &layout.ap_positions {
                let frac = (ap.distance(layout.region.center) / cfg.r_reg).powi(2);
                counts[((frac * bins as f64) as usize).min(bins - 1)] += 1;
                total += 1;
            }
        }
        let expected = total as f64 / bins as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let critical = ChiSquared::new((bins - 1) as f64)
            .unwrap()
            .inverse_cdf(0.99);
        assert!(stat < critical, "chi2 {stat} ≥ {critical}");
    }

    #[test]
    fn poisson_counts_vary() {
        let mut cfg = config(20, 5);
        cfg.poisson_counts = true;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sizes: Vec<usize> = (0..50)
            .map(|_| sample_drop(&cfg, &mut rng).unwrap().network_count())
            .collect();
        assert!(sizes.iter().any(|&n| n != 20));
    }

    #[test]
    fn boresight_examples() {
        let radar60 = RadarState::new(60.0).unwrap();
        let a = boresight_at(&radar60, 1.0);
        assert!(a < EPS || (TAU - a) < EPS, "{a}");
        let radar15 = RadarState::new(15.0).unwrap();
        assert!((boresight_at(&radar15, 1.0) - PI / 2.0).abs() < EPS);
        assert_eq!(boresight_at(&radar15, 0.0), 0.0);
        assert!(RadarState::new(0.0).is_err());
    }

    #[test]
    fn off_axis_wifi_examples() {
        let o = Point2D::ORIGIN;
        let tx = Point2D::new(1000.0, 0.0);
        assert!(
            off_axis_wifi(tx, Point2D::new(900.0, 0.0), o)
                .unwrap()
                .abs()
                < EPS
        );
        assert!((off_axis_wifi(tx, Point2D::new(1100.0, 0.0), o).unwrap() - PI).abs() < EPS);
        assert!(
            (off_axis_wifi(tx, Point2D::new(1000.0, 100.0), o).unwrap() - PI / 2.0).abs() < EPS
        );
        assert!(off_axis_wifi(tx, tx, o).is_err());
        assert!(off_axis_wifi(o, tx, o).is_err());
    }

    #[test]
    fn off_axis_radar_examples() {
        let radar = RadarState::new(15.0).unwrap();
        let node = Point2D::new(1000.0, 0.0);
        assert!(off_axis_radar(node, &radar).unwrap().abs() < EPS);
        let turned = radar.with_boresight(PI / 2.0);
        assert!((off_axis_radar(node, &turned).unwrap() - PI / 2.0).abs() < EPS);
        let diag = Point2D::new(1000.0, 1000.0);
        assert!((off_axis_radar(diag, &radar).unwrap() - PI / 4.0).abs() < EPS);
        assert!(off_axis_radar(Point2D::ORIGIN, &radar).is_err());
    }

    fn coord() -> impl Strategy<Value = f64> {
        -5000.0..5000.0f64
    }

    proptest! {
        #[test]
        fn off_axis_symmetric_under_reflection(
            tx in (coord(), coord()), tgt in (coord(), coord()), bore in 0.0..TAU,
        ) {
            let tx = Point2D::new(tx.0, tx.1);
            let tgt = Point2D::new(tgt.0, tgt.1);
            prop_assume!(tx.norm() > 1.0 && tx.distance(tgt) > 1.0);
            let w = off_axis_wifi(tx, tgt, Point2D::ORIGIN).unwrap();
            let wr = off_axis_wifi(tx.reflect_x(), tgt.reflect_x(), Point2D::ORIGIN).unwrap();
            prop_assert!((w - wr).abs() < 1e-9);

            let radar = RadarState::new(15.0).unwrap().with_boresight(bore);
            let mirrored = radar.with_boresight(-bore);
            let r = off_axis_radar(tx, &radar).unwrap();
            let rr = off_axis_radar(tx.reflect_x(), &mirrored).unwrap();
            prop_assert!((r - rr).abs() < 1e-9);
            prop_assert!((0.0..=PI).contains(&r));
            prop_assert!((0.0..=PI).contains(&w));
        }

        #[test]
        fn boresight_is_periodic(rpm in 0.5..120.0f64, t in 0.0..600.0f64) {
            let radar = RadarState::new(rpm).unwrap();
            let a = boresight_at(&radar, t);
            let b = boresight_at(&radar, t + 60.0 / rpm);
            prop_assert!(angular_separation(a, b) < 1e-9);
            prop_assert!((0.0..TAU).contains(&a));
        }

        #[test]
        fn stations_stay_in_network_disc(seed in any::<u64>()) {
            let cfg = config(5, 8);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let layout = sample_drop(&cfg, &mut rng).unwrap();
            prop_assert!(layout.validate().is_ok());
        }
    }
}
