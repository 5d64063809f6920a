//! Medium access: priorities, per-network transmitter selection and the
//! sweep/safe partition of a radar rotation.
//!
//! Contention is collapsed to a single winner per network per snapshot.
//! Under EDCA the highest priority wins; under plain CSMA every node has the
//! same chance. While the radar sweeps the Wi-Fi region only nodes whose
//! beam is more than `Θ` off the radar axis may win (see
//! [`select_tx_mitigated`]).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{DropLayout, Point2D, RadarState, RegionSpec};

pub const AP_PRIORITY_RANGE: std::ops::RangeInclusive<u8> = 4..=7;
pub const STA_PRIORITY_RANGE: std::ops::RangeInclusive<u8> = 0..=7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Ap,
    Sta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessScheme {
    Edca,
    Csma,
}

impl AccessScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            AccessScheme::Edca => "edca",
            AccessScheme::Csma => "csma",
        }
    }
}

impl fmt::Display for AccessScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AccessScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "edca" => Ok(AccessScheme::Edca),
            "csma" => Ok(AccessScheme::Csma),
            other => Err(format!(
                "unknown access scheme `{other}` (expected edca or csma)"
            )),
        }
    }
}

/// A Wi-Fi node. `id` is the node's index in its network (the AP is 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub role: Role,
    pub position: Point2D,
    pub priority: u8,
    pub tx_power_dbm: f64,
    pub beam_target: Point2D,
}

impl Node {
    pub fn tx_power_mw(&self) -> f64 {
        crate::antenna::db_to_linear(self.tx_power_dbm)
    }
}

/// Priorities per network, AP first.
pub type Priorities = Vec<Vec<u8>>;

/// Independent uniform priorities: APs in 4..=7, stations in 0..=7.
pub fn assign_priorities<R: Rng + ?Sized>(layout: &DropLayout, rng: &mut R) -> Priorities {
    layout
        .sta_positions
        .iter()
        .map(|stas| {
            let mut p = Vec::with_capacity(stas.len() + 1);
            p.push(rng.random_range(AP_PRIORITY_RANGE));
            p.extend((0..stas.len()).map(|_| rng.random_range(STA_PRIORITY_RANGE)));
            p
        })
        .collect()
}

/// Draws, for every network, which station its AP beams toward.
pub fn draw_ap_targets<R: Rng + ?Sized>(layout: &DropLayout, rng: &mut R) -> Vec<Option<usize>> {
    layout
        .sta_positions
        .iter()
        .map(|stas| (!stas.is_empty()).then(|| rng.random_range(0..stas.len())))
        .collect()
}

/// Transmit powers by role, dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPowers {
    pub ap_dbm: f64,
    pub sta_dbm: f64,
}

impl Default for TxPowers {
    fn default() -> Self {
        Self {
            ap_dbm: 30.0,
            sta_dbm: 10.0,
        }
    }
}

/// Assembles the node list of network `k`: the AP beams at its drawn
/// station (or at the radar axis' opposite if it has none), every station
/// beams at the AP.
pub fn build_network(
    layout: &DropLayout,
    k: usize,
    priorities: &[u8],
    ap_target: Option<usize>,
    powers: TxPowers,
) -> Vec<Node> {
    let ap = layout.ap_positions[k];
    let stas = &layout.sta_positions[k];
    // a lone AP points away from the radar
    let ap_beam = match ap_target {
        Some(i) => stas[i],
        None => ap + ap,
    };
    let mut nodes = Vec::with_capacity(stas.len() + 1);
    nodes.push(Node {
        id: 0,
        role: Role::Ap,
        position: ap,
        priority: priorities[0],
        tx_power_dbm: powers.ap_dbm,
        beam_target: ap_beam,
    });
    nodes.extend(stas.iter().enumerate().map(|(i, &sta)| Node {
        id: i + 1,
        role: Role::Sta,
        position: sta,
        priority: priorities[i + 1],
        tx_power_dbm: powers.sta_dbm,
        beam_target: ap,
    }));
    nodes
}

/// Contention without interference mitigation. Returns the winner's index.
pub fn select_tx_unmitigated<R: Rng + ?Sized>(
    network: &[Node],
    scheme: AccessScheme,
    rng: &mut R,
) -> usize {
    assert!(!network.is_empty(), "contention needs at least one node");
    match scheme {
        AccessScheme::Csma => rng.random_range(0..network.len()),
        AccessScheme::Edca => {
            let top = network.iter().map(|n| n.priority).max().unwrap_or(0);
            let tied: Vec<usize> = (0..network.len())
                .filter(|&i| network[i].priority == top)
                .collect();
            tied[rng.random_range(0..tied.len())]
        }
    }
}

/// The ordered sets behind a mitigated selection.
#[derive(Debug, Clone, PartialEq)]
pub struct EligibilitySets {
    /// All node indices by descending priority (`S_p`).
    pub by_priority: Vec<usize>,
    /// All node indices by descending off-axis angle (`S_θw`).
    pub by_angle: Vec<usize>,
    pub threshold: f64,
    /// Number of nodes with `θ_w > Θ`.
    pub eligible: usize,
    /// Candidates in contention-window order; empty when the fallback fired.
    pub selected_order: Vec<usize>,
}

impl EligibilitySets {
    pub fn eligible_by_angle(&self) -> &[usize] {
        &self.by_angle[..self.eligible]
    }

    pub fn eligible_by_priority(&self) -> &[usize] {
        &self.by_priority[..self.eligible]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MitigatedSelection {
    pub winner: usize,
    /// The candidate set was empty and the largest-angle node was taken.
    pub fallback: bool,
    pub sets: EligibilitySets,
}

fn descending_order<T: PartialOrd + Copy>(values: &[T], keys: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(Ordering::Equal)
            .then(keys[a].cmp(&keys[b]))
    });
    order
}

/// Contention while the radar sweeps the region.
///
/// With `m` nodes above the threshold, EDCA takes the first `m` entries of
/// both the priority order and the angle order, keeps their intersection in
/// angle order and lets the first one transmit. CSMA has no priority order,
/// so the first eligible node by angle wins. If nothing qualifies the node
/// with the largest off-axis angle transmits and `fallback` is set.
pub fn select_tx_mitigated<R: Rng + ?Sized>(
    network: &[Node],
    scheme: AccessScheme,
    theta_w: &[f64],
    threshold: f64,
    rng: &mut R,
) -> MitigatedSelection {
    assert!(!network.is_empty(), "contention needs at least one node");
    assert_eq!(network.len(), theta_w.len(), "one off-axis angle per node");

    let keys: Vec<u64> = (0..network.len()).map(|_| rng.random()).collect();
    let priorities: Vec<u8> = network.iter().map(|n| n.priority).collect();
    let by_angle = descending_order(theta_w, &keys);
    let by_priority = descending_order(&priorities, &keys);
    let eligible = theta_w.iter().filter(|&&t| t > threshold).count();

    let selected_order: Vec<usize> = match scheme {
        AccessScheme::Csma => by_angle[..eligible].to_vec(),
        AccessScheme::Edca => {
            let top_priority: HashSet<usize> = by_priority[..eligible].iter().copied().collect();
            by_angle[..eligible]
                .iter()
                .copied()
                .filter(|i| top_priority.contains(i))
                .collect()
        }
    };
    let (winner, fallback) = match selected_order.first() {
        Some(&w) => (w, false),
        None => (by_angle[0], true),
    };
    MitigatedSelection {
        winner,
        fallback,
        sets: EligibilitySets {
            by_priority,
            by_angle,
            threshold,
            eligible,
            selected_order,
        },
    }
}

/// Partition of one rotation into the sweep period (beam over the Wi-Fi
/// region) and the safe period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSchedule {
    pub rotation_period: f64,
    /// Instant the boresight crosses the region centre, in `[0, period)`.
    pub sweep_center: f64,
    pub sweep_duration: f64,
    /// Lead time `τ` before the sweep during which mitigation already applies.
    pub mitigation_lead: f64,
}

impl SweepSchedule {
    /// A schedule with no sweep period at all.
    pub fn never(rotation_period: f64) -> Self {
        Self {
            rotation_period,
            sweep_center: 0.0,
            sweep_duration: 0.0,
            mitigation_lead: 0.0,
        }
    }

    pub fn with_mitigation_lead(self, tau: f64) -> Self {
        Self {
            mitigation_lead: tau.max(0.0),
            ..self
        }
    }

    /// `[start, end]` of the sweep; `start` may be negative, times are
    /// taken modulo the rotation period.
    pub fn sweep_interval(&self) -> (f64, f64) {
        let half = 0.5 * self.sweep_duration;
        (self.sweep_center - half, self.sweep_center + half)
    }

    pub fn safe_duration(&self) -> f64 {
        self.rotation_period - self.sweep_duration
    }

    fn in_window(&self, t: f64, start: f64, length: f64) -> bool {
        if length >= self.rotation_period {
            return true;
        }
        (t - start).rem_euclid(self.rotation_period) < length
    }

    pub fn in_sweep(&self, t: f64) -> bool {
        self.in_window(t, self.sweep_interval().0, self.sweep_duration)
    }

    pub fn in_safe(&self, t: f64) -> bool {
        !self.in_sweep(t)
    }

    /// Whether sweep-period contention rules are in force at `t`, which
    /// includes the lead time before the sweep.
    pub fn mitigated_at(&self, t: f64) -> bool {
        if self.sweep_duration <= 0.0 {
            return false;
        }
        let start = self.sweep_interval().0 - self.mitigation_lead;
        self.in_window(t, start, self.sweep_duration + self.mitigation_lead)
    }

    /// Maps `u ∈ [0, 1)` onto the sweep period.
    pub fn sweep_instant(&self, u: f64) -> f64 {
        let (start, _) = self.sweep_interval();
        (start + u * self.sweep_duration).rem_euclid(self.rotation_period)
    }
}

/// Sweep period for a region seen from the radar: the region subtends
/// `2·asin(r_reg/d)`, widened by `beamwidth_margin`, centred on the instant
/// the boresight crosses the region centre.
pub fn build_sweep_schedule(
    region: &RegionSpec,
    radar: &RadarState,
    beamwidth_margin: f64,
) -> Result<SweepSchedule> {
    let d = region.distance_to_radar();
    if d <= region.radius_region {
        return Err(Error::InvalidGeometry(format!(
            "radar inside region (d = {d} m, r_reg = {} m)",
            region.radius_region
        )));
    }
    let period = radar.rotation_period();
    let width = (2.0 * (region.radius_region / d).asin() + beamwidth_margin.max(0.0)).min(TAU);
    let center_azimuth = (region.center - radar.origin).azimuth();
    Ok(SweepSchedule {
        rotation_period: period,
        sweep_center: center_azimuth / TAU * period,
        sweep_duration: width / TAU * period,
        mitigation_lead: 0.0,
    })
}

/// A node may contend right before a sweep only if its packet finishes
/// within the mitigation time; otherwise it defers by `T_sweep`.
pub fn is_eligible_near_transition(packet_duration: f64, tau: f64) -> bool {
    packet_duration < tau
}
