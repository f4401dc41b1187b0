//! Quasi-static model of the trapezoidal crawling robot.
//!
//! The body is an isosceles trapezoid: a top edge of length `l1` with two
//! legs of length `l2` splayed outward at angle `alpha` from the top edge
//! (measured so the feet sit outboard). Actuation rotates a leg by `dtheta`.
//! Locomotion is resolved as a sequence of static equilibria: at each pose
//! transition the change in foot separation is absorbed entirely by the
//! foot carrying the lower normal force, since under a uniform friction
//! coefficient that foot slips first. The friction coefficient therefore
//! orders the feet but never enters the displacement itself.

use crate::signal::{Level, SquareWave};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CrawlerError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid pose sequence: {0}")]
    InvalidSequence(String),
    #[error("poses must differ in exactly one leg")]
    InvalidTransition,
    #[error("predicted displacement must be positive")]
    NonPositivePrediction,
    #[error("actuation time constant must be positive")]
    InvalidActuationTime,
}

/// Robot dimensions and environment.
#[derive(Debug, Clone, Copy)]
pub struct CrawlerGeometry {
    /// Top-edge length (mm).
    pub l1: f64,
    /// Leg length (mm).
    pub l2: f64,
    /// Initial leg angle from the top edge (deg); must exceed 90°.
    pub alpha: f64,
    /// Rotation increment (deg); `alpha + dtheta < 180°`.
    pub dtheta: f64,
    /// Total weight (arbitrary force unit).
    pub weight: f64,
    /// Uniform floor friction coefficient.
    pub mu: f64,
}

impl CrawlerGeometry {
    pub fn validate(&self) -> Result<(), CrawlerError> {
        let bad = |msg: String| Err(CrawlerError::InvalidGeometry(msg));
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            return bad(format!("l1 and l2 must be positive, got {} / {}", self.l1, self.l2));
        }
        if !(self.weight > 0.0) {
            return bad(format!("weight must be positive, got {}", self.weight));
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.dtheta >= 0.0) {
            return bad(format!("dtheta must be non-negative, got {}", self.dtheta));
        }
        if !(self.alpha > 90.0 && self.alpha + self.dtheta < 180.0) {
            return bad(format!(
                "need 90 < alpha and alpha + dtheta < 180, got alpha {} dtheta {}",
                self.alpha, self.dtheta
            ));
        }
        Ok(())
    }
}

/// Which legs are rotated to `alpha + dtheta` (true) vs resting at `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegPose {
    pub front_rotated: bool,
    pub back_rotated: bool,
}

impl LegPose {
    pub const fn new(front_rotated: bool, back_rotated: bool) -> Self {
        Self {
            front_rotated,
            back_rotated,
        }
    }

    /// Forward gait: rotate front out, rotate back out, return front,
    /// return back. Cyclic (last equals first).
    pub fn default_cycle() -> Vec<LegPose> {
        vec![
            LegPose::new(false, false),
            LegPose::new(true, false),
            LegPose::new(true, true),
            LegPose::new(false, true),
            LegPose::new(false, false),
        ]
    }

    pub fn bits(&self) -> String {
        format!(
            "{}{}",
            self.front_rotated as u8, self.back_rotated as u8
        )
    }
}

/// Leg angles (deg) for a pose: `alpha` resting, `alpha + dtheta` rotated.
pub fn leg_angles(geom: &CrawlerGeometry, pose: LegPose) -> (f64, f64) {
    let angle = |rotated: bool| {
        if rotated {
            geom.alpha + geom.dtheta
        } else {
            geom.alpha
        }
    };
    (angle(pose.front_rotated), angle(pose.back_rotated))
}

#[derive(Debug, Clone, Copy)]
pub struct FootPositions {
    pub x_back: f64,
    pub x_front: f64,
    /// Foot separation.
    pub c: f64,
}

/// Horizontal reach of one leg: `l2·sin(theta − 90°)` with theta measured
/// from the top edge, so the reach is the offset from the attachment point.
fn leg_reach(l2: f64, theta_deg: f64) -> f64 {
    l2 * (theta_deg - 90.0).to_radians().sin()
}

/// Foot positions with the back attachment at x = 0, front attachment at
/// x = l1; forward is +x, so the back foot sits behind its attachment.
pub fn foot_positions_at(geom: &CrawlerGeometry, angles: (f64, f64)) -> FootPositions {
    let s_front = leg_reach(geom.l2, angles.0);
    let s_back = leg_reach(geom.l2, angles.1);
    let x_back = -s_back;
    let x_front = geom.l1 + s_front;
    FootPositions {
        x_back,
        x_front,
        c: geom.l1 + (s_front + s_back),
    }
}

pub fn foot_positions(geom: &CrawlerGeometry, pose: LegPose) -> FootPositions {
    foot_positions_at(geom, leg_angles(geom, pose))
}

/// Signed center-of-mass offset from the mid-foot point, with uniform
/// linear density over the top edge and both legs. Reduces algebraically to
/// `(l1 + l2)(s_back − s_front) / (2(l1 + 2 l2))`, which is exactly
/// antisymmetric under mirroring, so symmetric poses are balanced to the
/// last bit.
fn cm_offset_at(geom: &CrawlerGeometry, angles: (f64, f64)) -> f64 {
    let s_front = leg_reach(geom.l2, angles.0);
    let s_back = leg_reach(geom.l2, angles.1);
    (geom.l1 + geom.l2) * (s_back - s_front) / (2.0 * (geom.l1 + 2.0 * geom.l2))
}

/// Distance from the back foot to the center of mass.
pub fn center_of_mass_at(geom: &CrawlerGeometry, angles: (f64, f64)) -> f64 {
    let fp = foot_positions_at(geom, angles);
    fp.c * 0.5 + cm_offset_at(geom, angles)
}

pub fn center_of_mass(geom: &CrawlerGeometry, pose: LegPose) -> f64 {
    center_of_mass_at(geom, leg_angles(geom, pose))
}

#[derive(Debug, Clone, Copy)]
pub struct StaticsResult {
    pub c: f64,
    pub x_cm: f64,
    pub n_front: f64,
    pub n_back: f64,
}

/// Moment balance about the feet: `n_front = (x_cm/c)·W`, remainder on the
/// back foot. Written as `W/2 ± W·(offset/c)` so a symmetric pose yields
/// exactly W/2 each and mirror poses swap the forces bit-for-bit.
pub fn normal_forces_at(geom: &CrawlerGeometry, angles: (f64, f64)) -> StaticsResult {
    let fp = foot_positions_at(geom, angles);
    let d = cm_offset_at(geom, angles);
    let r = d / fp.c;
    let half = geom.weight * 0.5;
    let shift = geom.weight * r;
    StaticsResult {
        c: fp.c,
        x_cm: fp.c * 0.5 + d,
        n_front: half + shift,
        n_back: half - shift,
    }
}

pub fn normal_forces(geom: &CrawlerGeometry, pose: LegPose) -> StaticsResult {
    normal_forces_at(geom, leg_angles(geom, pose))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlidingFoot {
    Front,
    Back,
    /// Exact tie in endpoint-averaged normal forces; the separation change
    /// is split equally between the feet.
    Both,
}

impl SlidingFoot {
    pub fn as_str(self) -> &'static str {
        match self {
            SlidingFoot::Front => "front",
            SlidingFoot::Back => "back",
            SlidingFoot::Both => "both",
        }
    }
}

/// One resolved pose transition.
#[derive(Debug, Clone)]
pub struct TransitionReport {
    pub from_bits: String,
    pub to_bits: String,
    pub sliding: SlidingFoot,
    pub front_disp: f64,
    pub back_disp: f64,
    /// Robot displacement: mean of the two foot displacements.
    pub displacement: f64,
    pub tie: bool,
}

/// Resolves a transition between two angle configurations. The separation
/// change `Δc` is absorbed by the foot whose normal force, averaged over
/// the two endpoint poses, is lower; the other foot stays anchored.
pub fn step_transition_at(
    geom: &CrawlerGeometry,
    from: (f64, f64),
    to: (f64, f64),
    from_bits: String,
    to_bits: String,
) -> TransitionReport {
    let before = normal_forces_at(geom, from);
    let after = normal_forces_at(geom, to);
    let dc = after.c - before.c;
    let avg_front = 0.5 * (before.n_front + after.n_front);
    let avg_back = 0.5 * (before.n_back + after.n_back);

    let (sliding, front_disp, back_disp, tie) = if avg_front < avg_back {
        (SlidingFoot::Front, dc, 0.0, false)
    } else if avg_back < avg_front {
        (SlidingFoot::Back, 0.0, -dc, false)
    } else {
        (SlidingFoot::Both, dc * 0.5, -dc * 0.5, true)
    };
    TransitionReport {
        from_bits,
        to_bits,
        sliding,
        front_disp,
        back_disp,
        displacement: 0.5 * (front_disp + back_disp),
        tie,
    }
}

/// Pose-level transition; the poses must differ in exactly one leg.
pub fn step_transition(
    geom: &CrawlerGeometry,
    from: LegPose,
    to: LegPose,
) -> Result<TransitionReport, CrawlerError> {
    geom.validate()?;
    let diffs = (from.front_rotated != to.front_rotated) as u8
        + (from.back_rotated != to.back_rotated) as u8;
    if diffs != 1 {
        return Err(CrawlerError::InvalidTransition);
    }
    Ok(step_transition_at(
        geom,
        leg_angles(geom, from),
        leg_angles(geom, to),
        from.bits(),
        to.bits(),
    ))
}

/// Outcome of one gait cycle (or one signal-driven cycle).
#[derive(Debug, Clone)]
pub struct GaitReport {
    pub transitions: Vec<TransitionReport>,
    /// Net robot displacement: sum of per-transition displacements.
    pub d_cycle: f64,
    pub cycle_period: Option<f64>,
    pub speed: Option<f64>,
    pub ties: usize,
}

impl GaitReport {
    fn from_transitions(transitions: Vec<TransitionReport>) -> Self {
        let d_cycle = transitions.iter().map(|t| t.displacement).sum();
        let ties = transitions.iter().filter(|t| t.tie).count();
        Self {
            transitions,
            d_cycle,
            cycle_period: None,
            speed: None,
            ties,
        }
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.cycle_period = Some(period);
        self.speed = Some(self.d_cycle / period);
        self
    }
}

/// Runs a cyclic pose sequence (last pose equals the first, consecutive
/// poses differ in one leg) and sums the per-transition robot
/// displacements. With the default sequence this reproduces the closed-form
/// per-cycle displacement exactly.
pub fn run_cycle(geom: &CrawlerGeometry, sequence: &[LegPose]) -> Result<GaitReport, CrawlerError> {
    geom.validate()?;
    if sequence.len() < 2 {
        return Err(CrawlerError::InvalidSequence(
            "need at least two poses".into(),
        ));
    }
    if sequence.first() != sequence.last() {
        return Err(CrawlerError::InvalidSequence(
            "sequence must be cyclic (last pose equals first)".into(),
        ));
    }
    let mut transitions = Vec::with_capacity(sequence.len() - 1);
    for pair in sequence.windows(2) {
        transitions.push(step_transition(geom, pair[0], pair[1])?);
    }
    Ok(GaitReport::from_transitions(transitions))
}

/// `d = 2·l2·[sin(alpha + dtheta − 90°) − sin(alpha − 90°)]`, the per-cycle
/// displacement of the default gait. Strictly increasing in `dtheta` on the
/// admissible domain.
pub fn displacement_closed_form(geom: &CrawlerGeometry) -> f64 {
    2.0 * (leg_reach(geom.l2, geom.alpha + geom.dtheta) - leg_reach(geom.l2, geom.alpha))
}

/// `(d_pred − d_meas)/d_pred`: the fraction of the predicted advance lost
/// per cycle.
pub fn backsliding_ratio(d_pred: f64, d_meas: f64) -> Result<f64, CrawlerError> {
    if !(d_pred > 0.0) {
        return Err(CrawlerError::NonPositivePrediction);
    }
    Ok((d_pred - d_meas) / d_pred)
}

/// Rotation actually reached when the actuator is driven for `t_on`
/// seconds: first-order saturation `dtheta·(1 − exp(−t_on/tau_act))`.
pub fn effective_rotation(
    geom: &CrawlerGeometry,
    t_on: f64,
    tau_act: f64,
) -> Result<f64, CrawlerError> {
    if !(tau_act > 0.0) {
        return Err(CrawlerError::InvalidActuationTime);
    }
    if !(t_on >= 0.0) {
        return Err(CrawlerError::InvalidActuationTime);
    }
    Ok(geom.dtheta * (1.0 - (-t_on / tau_act).exp()))
}

/// Which leg state the ON (high) signal level commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnMapsTo {
    Rotated,
    Unrotated,
}

#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub x_front: f64,
    pub x_back: f64,
    pub front_on: bool,
    pub back_on: bool,
}

/// Signal-driven execution result.
#[derive(Debug, Clone)]
pub struct DriveReport {
    pub trajectory: Vec<TrajectoryPoint>,
    /// One report per complete front-wave cycle.
    pub cycles: Vec<GaitReport>,
    pub warnings: Vec<String>,
    pub quadrature_ok: bool,
    pub total_displacement: f64,
}

impl DriveReport {
    pub fn mean_cycle_displacement(&self) -> Option<f64> {
        if self.cycles.is_empty() {
            return None;
        }
        Some(self.cycles.iter().map(|c| c.d_cycle).sum::<f64>() / self.cycles.len() as f64)
    }

    pub fn mean_speed(&self) -> Option<f64> {
        let speeds: Vec<f64> = self.cycles.iter().filter_map(|c| c.speed).collect();
        if speeds.is_empty() {
            return None;
        }
        Some(speeds.iter().sum::<f64>() / speeds.len() as f64)
    }
}

/// Executes pose transitions at the edges of the two drive waves.
///
/// An edge that turns a leg ON starts an actuation; the rotation achieved
/// over that window is `effective_rotation` of the window's actual
/// duration (the waves are known in full, so the duration is read ahead).
/// The OFF edge returns the leg to its resting state. Degraded signals are
/// reported as warnings, not failures: the robot still moves.
pub fn drive_with_signals(
    geom: &CrawlerGeometry,
    w_front: &SquareWave,
    w_back: &SquareWave,
    mapping: OnMapsTo,
    tau_act: f64,
) -> Result<DriveReport, CrawlerError> {
    geom.validate()?;
    if !(tau_act > 0.0) {
        return Err(CrawlerError::InvalidActuationTime);
    }

    let check = crate::signal::validate_quadrature(w_front, w_back);
    let mut warnings = Vec::new();
    if !check.ok {
        warnings.push(format!(
            "drive waves are not clean quadrature: {} violation(s)",
            check.violations.len().max(1)
        ));
    }

    // Angle held while the signal is OFF, and the angle the actuator pulls
    // toward while ON.
    let (off_angle, on_angle_full) = match mapping {
        OnMapsTo::Rotated => (geom.alpha, geom.alpha + geom.dtheta),
        OnMapsTo::Unrotated => (geom.alpha + geom.dtheta, geom.alpha),
    };

    #[derive(Clone, Copy)]
    struct Ev {
        time: f64,
        front: bool,
        to_level: Level,
    }
    let mut events: Vec<Ev> = Vec::new();
    for (wave, front) in [(w_front, true), (w_back, false)] {
        let mut level = wave.initial_level;
        for e in &wave.edges {
            level = level.flipped();
            events.push(Ev {
                time: e.time,
                front,
                to_level: level,
            });
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(b.front.cmp(&a.front)));
    let horizon = events.last().map(|e| e.time).unwrap_or(0.0);

    // Next edge time per wave, for reading off ON durations.
    let next_edge_after = |wave: &SquareWave, t: f64| -> f64 {
        wave.edges
            .iter()
            .map(|e| e.time)
            .find(|&x| x > t)
            .unwrap_or(horizon)
    };

    // Legs start saturated in the state their wave's initial level commands.
    let start_angle = |level: Level| match level {
        Level::High => on_angle_full,
        Level::Low => off_angle,
    };
    let mut angles = (
        start_angle(w_front.initial_level),
        start_angle(w_back.initial_level),
    );
    let mut levels = (
        w_front.initial_level == Level::High,
        w_back.initial_level == Level::High,
    );
    let fp0 = foot_positions_at(geom, angles);
    let (mut x_back, mut x_front) = (fp0.x_back, fp0.x_front);

    let mut trajectory = vec![TrajectoryPoint {
        time: events.first().map(|e| e.time).unwrap_or(0.0),
        x_front,
        x_back,
        front_on: levels.0,
        back_on: levels.1,
    }];
    let mut transitions: Vec<(f64, TransitionReport)> = Vec::new();

    for ev in &events {
        let leg_on = ev.to_level == Level::High;
        let target = if leg_on {
            // Actuation achieves only the fraction the window allows.
            let wave = if ev.front { w_front } else { w_back };
            let t_on = next_edge_after(wave, ev.time) - ev.time;
            let frac = 1.0 - (-t_on / tau_act).exp();
            off_angle + (on_angle_full - off_angle) * frac
        } else {
            // Passive return completes.
            off_angle
        };
        let from = angles;
        let to = if ev.front {
            (target, angles.1)
        } else {
            (angles.0, target)
        };
        if to != from {
            let bits = |l: (bool, bool)| format!("{}{}", l.0 as u8, l.1 as u8);
            let new_levels = if ev.front {
                (leg_on, levels.1)
            } else {
                (levels.0, leg_on)
            };
            let rep = step_transition_at(geom, from, to, bits(levels), bits(new_levels));
            x_front += rep.front_disp;
            x_back += rep.back_disp;
            levels = new_levels;
            angles = to;
            trajectory.push(TrajectoryPoint {
                time: ev.time,
                x_front,
                x_back,
                front_on: levels.0,
                back_on: levels.1,
            });
            transitions.push((ev.time, rep));
        } else if ev.front {
            levels.0 = leg_on;
        } else {
            levels.1 = leg_on;
        }
    }

    // One gait report per complete front-wave cycle (rising to rising).
    let rising = w_front.rising_times();
    let mut cycles = Vec::new();
    for w in rising.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let in_cycle: Vec<TransitionReport> = transitions
            .iter()
            .filter(|(t, _)| *t >= t0 && *t < t1)
            .map(|(_, r)| r.clone())
            .collect();
        if !in_cycle.is_empty() {
            cycles.push(GaitReport::from_transitions(in_cycle).with_period(t1 - t0));
        }
    }

    let total_displacement = transitions.iter().map(|(_, r)| r.displacement).sum();
    Ok(DriveReport {
        trajectory,
        cycles,
        warnings,
        quadrature_ok: check.ok,
        total_displacement,
    })
}
