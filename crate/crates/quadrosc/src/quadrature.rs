//! Coupled three-oscillator network. The central oscillator's split biased
//! contacts gate drive power to the two peripheral oscillators: whichever
//! side the central beam rests on closes one peripheral's circuit. A powered
//! peripheral runs its own snap logic; an unpowered one just cools. In a
//! fault-free run each peripheral snaps exactly once per central half-cycle,
//! giving four square waves in quadrature over an eight-stage cycle.
//!
//! The exactly-once property is emergent, not enforced: a peripheral that
//! reaches threshold twice inside one window does double-snap, and the sync
//! checker reports it as a fault.

use crate::oscillator::{OscillatorConfig, OscillatorState, Side, Stalled};
use crate::signal::{Level, SignalTrace, SquareWave};
use crate::sma::{self, SmaState, SmaThermalParams, TimeToThreshold};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PeripheralId {
    P1,
    P2,
}

impl PeripheralId {
    pub fn other(self) -> PeripheralId {
        match self {
            PeripheralId::P1 => PeripheralId::P2,
            PeripheralId::P2 => PeripheralId::P1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PeripheralId::P1 => "p1",
            PeripheralId::P2 => "p2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorId {
    Central,
    Peripheral(PeripheralId),
}

impl OscillatorId {
    pub fn as_str(self) -> &'static str {
        match self {
            OscillatorId::Central => "central",
            OscillatorId::Peripheral(p) => p.as_str(),
        }
    }
}

/// Bijection between the central contact sides and the peripherals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gating {
    /// Left contact powers P1, right powers P2 (default).
    LeftP1,
    /// Swapped map.
    LeftP2,
}

impl Gating {
    pub fn peripheral_for(self, side: Side) -> PeripheralId {
        match (self, side) {
            (Gating::LeftP1, Side::Left) | (Gating::LeftP2, Side::Right) => PeripheralId::P1,
            _ => PeripheralId::P2,
        }
    }
}

/// Per-half-cycle multiplicative lognormal jitter on each actuator's thermal
/// time constant; the stand-in for ambient-airflow variability.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub sigma_tau: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub central: OscillatorConfig,
    pub p1: OscillatorConfig,
    pub p2: OscillatorConfig,
    pub gating: Gating,
    pub noise: Option<NoiseSpec>,
    pub rng_seed: u64,
}

impl QuadratureConfig {
    /// Identical SMA parameters everywhere; peripherals driven at
    /// `surplus`× the central current (the timing buffer that makes each
    /// peripheral snap before its window closes).
    pub fn matched(params: SmaThermalParams, central_current: f64, surplus: f64) -> Self {
        Self {
            central: OscillatorConfig::symmetric(params, central_current, "central"),
            p1: OscillatorConfig::symmetric(params, central_current * surplus, "p1"),
            p2: OscillatorConfig::symmetric(params, central_current * surplus, "p2"),
            gating: Gating::LeftP1,
            noise: None,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemState {
    pub central: OscillatorState,
    pub p1: OscillatorState,
    pub p2: OscillatorState,
    pub powered: PeripheralId,
    pub clock: f64,
}

/// Stage index 1..=8 within the quadrature cycle. Stage 1 is anchored to
/// "central beam on its initial side, first peripheral just powered".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncFaultKind {
    DoubleSnap,
    MissedSnap,
    Stalled,
}

impl SyncFaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SyncFaultKind::DoubleSnap => "double_snap",
            SyncFaultKind::MissedSnap => "missed_snap",
            SyncFaultKind::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncFault {
    pub kind: SyncFaultKind,
    pub oscillator: OscillatorId,
    pub at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemEvent {
    CentralSnap {
        new_side: Side,
        now_powered: PeripheralId,
    },
    PeripheralSnap {
        id: PeripheralId,
        new_side: Side,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedEvent {
    pub time: f64,
    pub event: SystemEvent,
    pub stage_after: StageId,
}

/// Time-ordered event log plus the initial gating so the sync checker is
/// self-contained.
#[derive(Debug, Clone)]
pub struct EventLog {
    pub initial_powered: PeripheralId,
    pub events: Vec<LoggedEvent>,
}

/// The one peripheral whose circuit the central beam currently closes.
pub fn gates_closed(state: &SystemState, config: &QuadratureConfig) -> PeripheralId {
    config.gating.peripheral_for(state.central.beam.side)
}

fn jittered(params: &SmaThermalParams, j: f64) -> SmaThermalParams {
    SmaThermalParams {
        tau: params.tau * j,
        tau_cool: params.tau_cool.map(|t| t * j),
        ..*params
    }
}

/// Event-driven simulator with exact closed-form next-event times.
pub struct QuadratureSim {
    config: QuadratureConfig,
    pub state: SystemState,
    /// tau multipliers, indexed `[oscillator][side]` as
    /// [central L, central R, p1 L, p1 R, p2 L, p2 R].
    jitter: [f64; 6],
    rng: ChaCha8Rng,
    central_snaps: usize,
}

impl QuadratureSim {
    pub fn new(config: &QuadratureConfig) -> Self {
        let state = SystemState {
            central: OscillatorState::initial(&config.central),
            p1: OscillatorState::initial(&config.p1),
            p2: OscillatorState::initial(&config.p2),
            powered: config.gating.peripheral_for(Side::Left),
            clock: 0.0,
        };
        let mut sim = Self {
            config: config.clone(),
            state,
            jitter: [1.0; 6],
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            central_snaps: 0,
        };
        for i in 0..6 {
            sim.jitter[i] = sim.draw_jitter();
        }
        sim
    }

    fn draw_jitter(&mut self) -> f64 {
        match self.config.noise {
            Some(NoiseSpec { sigma_tau }) if sigma_tau > 0.0 => {
                LogNormal::new(0.0, sigma_tau)
                    .expect("sigma_tau validated non-negative")
                    .sample(&mut self.rng)
            }
            _ => 1.0,
        }
    }

    fn jitter_index(osc: OscillatorId, side: Side) -> usize {
        let base = match osc {
            OscillatorId::Central => 0,
            OscillatorId::Peripheral(PeripheralId::P1) => 2,
            OscillatorId::Peripheral(PeripheralId::P2) => 4,
        };
        base + match side {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    fn osc_state(&self, id: OscillatorId) -> &OscillatorState {
        match id {
            OscillatorId::Central => &self.state.central,
            OscillatorId::Peripheral(PeripheralId::P1) => &self.state.p1,
            OscillatorId::Peripheral(PeripheralId::P2) => &self.state.p2,
        }
    }

    fn osc_state_mut(&mut self, id: OscillatorId) -> &mut OscillatorState {
        match id {
            OscillatorId::Central => &mut self.state.central,
            OscillatorId::Peripheral(PeripheralId::P1) => &mut self.state.p1,
            OscillatorId::Peripheral(PeripheralId::P2) => &mut self.state.p2,
        }
    }

    fn osc_config(&self, id: OscillatorId) -> &OscillatorConfig {
        match id {
            OscillatorId::Central => &self.config.central,
            OscillatorId::Peripheral(PeripheralId::P1) => &self.config.p1,
            OscillatorId::Peripheral(PeripheralId::P2) => &self.config.p2,
        }
    }

    fn sma_params(&self, osc: OscillatorId, side: Side) -> SmaThermalParams {
        let cfg = self.osc_config(osc);
        let base = match side {
            Side::Left => &cfg.left_sma,
            Side::Right => &cfg.right_sma,
        };
        jittered(base, self.jitter[Self::jitter_index(osc, side)])
    }

    fn sma_state(&self, osc: OscillatorId, side: Side) -> SmaState {
        let s = self.osc_state(osc);
        match side {
            Side::Left => s.left,
            Side::Right => s.right,
        }
    }

    fn set_sma_state(&mut self, osc: OscillatorId, side: Side, v: SmaState) {
        let s = self.osc_state_mut(osc);
        match side {
            Side::Left => s.left = v,
            Side::Right => s.right = v,
        }
    }

    /// Time until `osc`'s active-side actuator reaches its activation
    /// threshold at the oscillator's own drive current.
    fn time_to_snap(&self, osc: OscillatorId) -> TimeToThreshold {
        let side = self.osc_state(osc).beam.side;
        let params = self.sma_params(osc, side);
        sma::time_to_threshold(
            &self.sma_state(osc, side),
            &params,
            self.osc_config(osc).current,
            params.t_act,
        )
    }

    /// Advances every actuator temperature exactly to `dt` from now. The
    /// central active side and the powered peripheral's active side heat at
    /// their own currents; everything else cools toward ambient.
    fn advance_temperatures(&mut self, dt: f64) {
        let powered = OscillatorId::Peripheral(self.state.powered);
        for osc in [
            OscillatorId::Central,
            OscillatorId::Peripheral(PeripheralId::P1),
            OscillatorId::Peripheral(PeripheralId::P2),
        ] {
            let active_side = self.osc_state(osc).beam.side;
            let drives = osc == OscillatorId::Central || osc == powered;
            for side in [Side::Left, Side::Right] {
                let current = if drives && side == active_side {
                    self.osc_config(osc).current
                } else {
                    0.0
                };
                let params = self.sma_params(osc, side);
                let next = sma::step(self.sma_state(osc, side), &params, current, dt);
                self.set_sma_state(osc, side, next);
            }
        }
        self.state.clock += dt;
        self.state.central.clock = self.state.clock;
        self.state.p1.clock = self.state.clock;
        self.state.p2.clock = self.state.clock;
    }

    /// Processes the next snap event. Ties between the central and the
    /// powered peripheral are broken in favor of the peripheral, matching
    /// the intended "peripheral snaps before the central switches".
    pub fn advance_event(&mut self) -> Result<(f64, SystemEvent), Stalled> {
        let dt_central = match self.time_to_snap(OscillatorId::Central) {
            TimeToThreshold::In(t) => t,
            TimeToThreshold::Never => return Err(Stalled),
        };
        let powered = OscillatorId::Peripheral(self.state.powered);
        let dt_peripheral = self.time_to_snap(powered).finite();

        let (dt, who) = match dt_peripheral {
            Some(dp) if dp <= dt_central => (dp, powered),
            _ => (dt_central, OscillatorId::Central),
        };
        self.advance_temperatures(dt);

        // Flip the snapping beam; the actuator that fired latches contracted.
        let side = self.osc_state(who).beam.side;
        let mut fired = self.sma_state(who, side);
        fired.contracted = true;
        self.set_sma_state(who, side, fired);
        let new_side = side.flipped();
        self.osc_state_mut(who).beam.side = new_side;

        // New half-cycle for the snapped oscillator: redraw its jitter.
        self.jitter[Self::jitter_index(who, Side::Left)] = self.draw_jitter();
        self.jitter[Self::jitter_index(who, Side::Right)] = self.draw_jitter();

        let time = self.state.clock;
        let event = match who {
            OscillatorId::Central => {
                self.central_snaps += 1;
                self.state.powered = self.config.gating.peripheral_for(new_side);
                SystemEvent::CentralSnap {
                    new_side,
                    now_powered: self.state.powered,
                }
            }
            OscillatorId::Peripheral(id) => SystemEvent::PeripheralSnap { id, new_side },
        };
        Ok((time, event))
    }
}

#[derive(Debug, Clone)]
pub struct WavePair {
    pub primary: SquareWave,
    pub complement: SquareWave,
}

/// Full simulation output: the event log, all six complementary waves (the
/// P1/P2 pairs are the four quadrature signals), sampled beam traces, the
/// stage sequence and any synchronization faults.
#[derive(Debug, Clone)]
pub struct QuadratureRun {
    pub log: EventLog,
    pub central: WavePair,
    pub p1: WavePair,
    pub p2: WavePair,
    pub traces: Vec<SignalTrace>,
    pub stages: Vec<StageId>,
    pub faults: Vec<SyncFault>,
}

impl QuadratureRun {
    /// The four quadrature outputs in phase order 0°, 90°, 180°, 270°.
    pub fn quadrature_waves(&self) -> [&SquareWave; 4] {
        [
            &self.p1.primary,
            &self.p2.primary,
            &self.p1.complement,
            &self.p2.complement,
        ]
    }

    /// Per-peripheral lead time (window-opening central snap to the
    /// peripheral snap) of the last completed window, or None if a
    /// peripheral never snapped after a central snap.
    pub fn steady_leads(&self) -> Option<(f64, f64)> {
        let mut last_central: Option<f64> = None;
        let mut lead1 = None;
        let mut lead2 = None;
        for e in &self.log.events {
            match e.event {
                SystemEvent::CentralSnap { .. } => last_central = Some(e.time),
                SystemEvent::PeripheralSnap { id, .. } => {
                    if let Some(tc) = last_central {
                        match id {
                            PeripheralId::P1 => lead1 = Some(e.time - tc),
                            PeripheralId::P2 => lead2 = Some(e.time - tc),
                        }
                    }
                }
            }
        }
        Some((lead1?, lead2?))
    }
}

/// Runs `n_cycles` quadrature cycles (4 central snaps each) from a fresh
/// start. A central stall terminates the run early and is reported as a
/// fault; peripheral misbehavior never aborts the run.
pub fn simulate(
    config: &QuadratureConfig,
    n_cycles: usize,
    sample_period: Option<f64>,
) -> QuadratureRun {
    assert!(n_cycles >= 1);
    let mut sim = QuadratureSim::new(config);
    let initial_powered = sim.state.powered;
    let target_central_snaps = 4 * n_cycles;

    let mut events = Vec::new();
    let mut faults = Vec::new();
    let mut stages = Vec::new();
    let mut central_count = 0usize;

    while central_count < target_central_snaps {
        match sim.advance_event() {
            Ok((time, event)) => {
                let is_peripheral = matches!(event, SystemEvent::PeripheralSnap { .. });
                if !is_peripheral {
                    central_count += 1;
                }
                let stage = StageId((2 * (central_count % 4) + 1 + is_peripheral as usize) as u8);
                events.push(LoggedEvent {
                    time,
                    event,
                    stage_after: stage,
                });
                stages.push(stage);
            }
            Err(Stalled) => {
                faults.push(SyncFault {
                    kind: SyncFaultKind::Stalled,
                    oscillator: OscillatorId::Central,
                    at: sim.state.clock,
                });
                break;
            }
        }
    }

    let log = EventLog {
        initial_powered,
        events,
    };
    faults.extend(check_sync(&log));

    let toggle_times = |want: OscillatorId| -> Vec<f64> {
        log.events
            .iter()
            .filter(|e| match (e.event, want) {
                (SystemEvent::CentralSnap { .. }, OscillatorId::Central) => true,
                (
                    SystemEvent::PeripheralSnap { id, .. },
                    OscillatorId::Peripheral(p),
                ) => id == p,
                _ => false,
            })
            .map(|e| e.time)
            .collect()
    };

    let make_pair = |id: OscillatorId, label: &str| -> WavePair {
        let times = toggle_times(id);
        let primary = SquareWave::from_toggle_times(Level::High, &times, label)
            .expect("event times strictly increasing per oscillator");
        let complement = primary.complement(format!("{label}_inv"));
        WavePair {
            primary,
            complement,
        }
    };
    let central = make_pair(OscillatorId::Central, &config.central.label);
    let p1 = make_pair(OscillatorId::Peripheral(PeripheralId::P1), &config.p1.label);
    let p2 = make_pair(OscillatorId::Peripheral(PeripheralId::P2), &config.p2.label);

    let mut traces = Vec::new();
    if let Some(dt) = sample_period {
        let t_end = sim.state.clock;
        for (pair, label) in [
            (&central, &config.central.label),
            (&p1, &config.p1.label),
            (&p2, &config.p2.label),
        ] {
            let mut samples = Vec::new();
            let mut t = 0.0;
            while t <= t_end {
                // Primary high while the beam sits Left; displacement is
                // -amplitude on Left, +amplitude on Right.
                let y = match pair.primary.level_at(t) {
                    Level::High => -1.0,
                    Level::Low => 1.0,
                };
                samples.push((t, y));
                t += dt;
            }
            if samples.len() >= 2 {
                traces.push(
                    SignalTrace::new(samples, label.clone())
                        .expect("sampled trace is monotone"),
                );
            }
        }
    }

    QuadratureRun {
        log,
        central,
        p1,
        p2,
        traces,
        stages,
        faults,
    }
}

/// Scans a time-ordered event log for windows (intervals between
/// consecutive central snaps) in which the powered peripheral snapped zero
/// times (MissedSnap, flagged at the window-closing central snap) or two or
/// more times (DoubleSnap, flagged at the second snap).
pub fn check_sync(log: &EventLog) -> Vec<SyncFault> {
    let mut faults = Vec::new();
    let mut window_peripheral = log.initial_powered;
    let mut snaps_in_window = 0usize;
    for e in &log.events {
        match e.event {
            SystemEvent::PeripheralSnap { id, .. } if id == window_peripheral => {
                snaps_in_window += 1;
                if snaps_in_window == 2 {
                    faults.push(SyncFault {
                        kind: SyncFaultKind::DoubleSnap,
                        oscillator: OscillatorId::Peripheral(id),
                        at: e.time,
                    });
                }
            }
            SystemEvent::PeripheralSnap { .. } => {}
            SystemEvent::CentralSnap { now_powered, .. } => {
                if snaps_in_window == 0 {
                    faults.push(SyncFault {
                        kind: SyncFaultKind::MissedSnap,
                        oscillator: OscillatorId::Peripheral(window_peripheral),
                        at: e.time,
                    });
                }
                window_peripheral = now_powered;
                snaps_in_window = 0;
            }
        }
    }
    faults
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal;

    fn params(tau: f64, k: f64) -> SmaThermalParams {
        SmaThermalParams::default_fiber(tau, k)
    }

    /// Calibration-scale parameters known to run fault-free at 5% surplus.
    fn matched_config() -> QuadratureConfig {
        QuadratureConfig::matched(params(1.05, 900.0), 0.24, 1.05)
    }

    #[test]
    fn gating_follows_central_side() {
        let config = matched_config();
        let sim = QuadratureSim::new(&config);
        assert_eq!(gates_closed(&sim.state, &config), PeripheralId::P1);
        let mut swapped = config.clone();
        swapped.gating = Gating::LeftP2;
        let sim2 = QuadratureSim::new(&swapped);
        assert_eq!(gates_closed(&sim2.state, &swapped), PeripheralId::P2);
    }

    #[test]
    fn degenerate_unpowered_peripherals_only_central_snaps() {
        let mut config = matched_config();
        config.p1.current = 0.0;
        config.p2.current = 0.0;
        let run = simulate(&config, 2, None);
        assert!(run
            .log
            .events
            .iter()
            .all(|e| matches!(e.event, SystemEvent::CentralSnap { .. })));
        // Every window is a missed snap.
        assert_eq!(run.faults.len(), 8);
        assert!(run
            .faults
            .iter()
            .all(|f| f.kind == SyncFaultKind::MissedSnap));
    }

    #[test]
    fn fault_free_run_alternates_peripheral_and_central() {
        let run = simulate(&matched_config(), 5, None);
        assert!(run.faults.is_empty(), "{:?}", run.faults);
        // Event pattern per cycle: P, C, P, C, ...
        for (i, e) in run.log.events.iter().enumerate() {
            let is_peripheral = matches!(e.event, SystemEvent::PeripheralSnap { .. });
            assert_eq!(is_peripheral, i % 2 == 0, "event {i}: {:?}", e.event);
        }
    }

    #[test]
    fn stage_sequence_cycles_one_to_eight() {
        let run = simulate(&matched_config(), 4, None);
        assert!(run.faults.is_empty());
        // Stage 1 is the initial interval; the first event enters stage 2.
        let expected: Vec<u8> = (0..run.stages.len())
            .map(|i| ((i + 1) % 8 + 1) as u8)
            .collect();
        let got: Vec<u8> = run.stages.iter().map(|s| s.0).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn peripheral_period_doubles_central() {
        let run = simulate(&matched_config(), 25, None);
        assert!(run.faults.is_empty());
        let t0 = run.log.events[run.log.events.len() / 2].time;
        let central = run.central.primary.after(t0, "c");
        let p1 = run.p1.primary.after(t0, "p1");
        let (tc, _, _) = signal::period_stats(&central).unwrap();
        let (tp, _, _) = signal::period_stats(&p1).unwrap();
        assert!(
            (tp - 2.0 * tc).abs() / (2.0 * tc) < 1e-6,
            "central {tc}, peripheral {tp}"
        );
    }

    #[test]
    fn matched_run_is_quadrature_at_ninety_degrees() {
        let run = simulate(&matched_config(), 30, None);
        assert!(run.faults.is_empty());
        let t0 = run.log.events[run.log.events.len() * 2 / 3].time;
        let p1 = run.p1.primary.after(t0, "p1");
        let p2 = run.p2.primary.after(t0, "p2");
        let rep = signal::phase_offset(&p1, &p2).unwrap();
        assert!((rep.dphi_avg - 90.0).abs() < 1e-6, "{}", rep.dphi_avg);
        let check = signal::validate_quadrature(&p1, &p2);
        assert!(check.ok, "{:?}", check.violations);
    }

    #[test]
    fn swapped_gating_inverts_roles() {
        let mut config = matched_config();
        config.gating = Gating::LeftP2;
        let run = simulate(&config, 3, None);
        assert!(run.faults.is_empty());
        match run.log.events[0].event {
            SystemEvent::PeripheralSnap { id, .. } => assert_eq!(id, PeripheralId::P2),
            ref other => panic!("expected peripheral snap first, got {other:?}"),
        }
    }

    #[test]
    fn double_snap_detected_with_high_surplus() {
        let mut config = matched_config();
        config.p1.current = 0.30; // far above the central drive
        let run = simulate(&config, 2, None);
        assert!(
            run.faults
                .iter()
                .any(|f| f.kind == SyncFaultKind::DoubleSnap
                    && f.oscillator == OscillatorId::Peripheral(PeripheralId::P1)),
            "{:?}",
            run.faults
        );
    }

    #[test]
    fn missed_snap_detected_with_slow_peripheral() {
        let mut config = matched_config();
        config.p1.current = 0.233; // just above stall but slower than the window
        let run = simulate(&config, 2, None);
        assert!(
            run.faults
                .iter()
                .any(|f| f.kind == SyncFaultKind::MissedSnap
                    && f.oscillator == OscillatorId::Peripheral(PeripheralId::P1)),
            "{:?}",
            run.faults
        );
    }

    #[test]
    fn central_stall_reported() {
        let mut config = matched_config();
        config.central.current = 0.2;
        let run = simulate(&config, 2, None);
        assert_eq!(run.faults[0].kind, SyncFaultKind::Stalled);
        assert_eq!(run.faults[0].oscillator, OscillatorId::Central);
        assert!(run.log.events.is_empty());
    }

    #[test]
    fn check_sync_flags_second_snap_time() {
        // Hand-built log: P1 snaps twice in the first window.
        let ev = |time, event| LoggedEvent {
            time,
            event,
            stage_after: StageId(1),
        };
        let log = EventLog {
            initial_powered: PeripheralId::P1,
            events: vec![
                ev(1.0, SystemEvent::PeripheralSnap { id: PeripheralId::P1, new_side: Side::Right }),
                ev(1.7, SystemEvent::PeripheralSnap { id: PeripheralId::P1, new_side: Side::Left }),
                ev(2.0, SystemEvent::CentralSnap { new_side: Side::Right, now_powered: PeripheralId::P2 }),
            ],
        };
        let faults = check_sync(&log);
        assert_eq!(faults.len(), 1);
        assert_eq!(faults[0].kind, SyncFaultKind::DoubleSnap);
        assert_eq!(faults[0].at, 1.7);
    }

    #[test]
    fn identical_seeds_give_identical_logs() {
        let mut config = matched_config();
        config.noise = Some(NoiseSpec { sigma_tau: 0.02 });
        config.rng_seed = 1234;
        let a = simulate(&config, 10, None);
        let b = simulate(&config, 10, None);
        assert_eq!(a.log.events.len(), b.log.events.len());
        for (x, y) in a.log.events.iter().zip(&b.log.events) {
            assert_eq!(x, y);
        }
        let mut other = config.clone();
        other.rng_seed = 1235;
        let c = simulate(&other, 10, None);
        assert!(a
            .log
            .events
            .iter()
            .zip(&c.log.events)
            .any(|(x, y)| x.time != y.time));
    }

    #[test]
    fn noisy_runs_stay_fault_free_at_small_sigma() {
        let mut config = matched_config();
        config.noise = Some(NoiseSpec { sigma_tau: 0.02 });
        let mut clean = 0;
        for seed in 0..20 {
            config.rng_seed = seed;
            let run = simulate(&config, 20, None);
            if run.faults.is_empty() {
                clean += 1;
            }
        }
        assert!(clean >= 19, "only {clean}/20 clean");
    }
}
