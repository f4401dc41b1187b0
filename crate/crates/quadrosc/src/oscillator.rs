//! Single self-sustained oscillator: a two-state bi-stable beam driven by a
//! pair of antagonistic SMA actuators. The contact on the beam's current
//! side closes its circuit, so that side's actuator heats until it reaches
//! the activation threshold and snaps the beam over; the other side then
//! heats while the fired side cools. Snap-through itself is instantaneous
//! compared to the thermal times.

use crate::signal::{Level, SignalTrace, SquareWave};
use crate::sma::{self, SmaState, SmaThermalParams, TimeToThreshold};
use thiserror::Error;

/// Drive current cannot raise the active actuator to its activation
/// threshold, so the oscillator never fires.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("oscillator stalled: steady-state temperature below activation threshold")]
pub struct Stalled;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Current stable equilibrium of the beam plus the rendered center-point
/// displacement magnitude. Sign convention: +amplitude for Right, −amplitude
/// for Left.
#[derive(Debug, Clone, Copy)]
pub struct BeamState {
    pub side: Side,
    pub amplitude: f64,
}

impl BeamState {
    pub fn displacement(&self) -> f64 {
        match self.side {
            Side::Left => -self.amplitude,
            Side::Right => self.amplitude,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OscillatorConfig {
    pub left_sma: SmaThermalParams,
    pub right_sma: SmaThermalParams,
    /// Drive current (A); the closed circuit always carries this current.
    pub current: f64,
    pub label: String,
}

impl OscillatorConfig {
    pub fn symmetric(params: SmaThermalParams, current: f64, label: impl Into<String>) -> Self {
        Self {
            left_sma: params,
            right_sma: params,
            current,
            label: label.into(),
        }
    }

    fn params_for(&self, side: Side) -> &SmaThermalParams {
        match side {
            Side::Left => &self.left_sma,
            Side::Right => &self.right_sma,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OscillatorState {
    pub beam: BeamState,
    pub left: SmaState,
    pub right: SmaState,
    pub clock: f64,
}

impl OscillatorState {
    /// Fresh start: beam Left, both actuators at ambient, clock zero.
    pub fn initial(config: &OscillatorConfig) -> Self {
        Self {
            beam: BeamState {
                side: Side::Left,
                amplitude: 1.0,
            },
            left: SmaState::at_ambient(&config.left_sma),
            right: SmaState::at_ambient(&config.right_sma),
            clock: 0.0,
        }
    }

    fn sma_for(&self, side: Side) -> &SmaState {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn sma_for_mut(&mut self, side: Side) -> &mut SmaState {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// The grounded contact is the one on the beam's current side.
pub fn active_contact(state: &OscillatorState) -> Side {
    state.beam.side
}

/// Heats the active-side actuator to its activation threshold, cools the
/// other side over the same interval, then flips the beam. Returns the time
/// to the snap and the post-snap state.
pub fn advance_to_next_snap(
    state: &OscillatorState,
    config: &OscillatorConfig,
) -> Result<(f64, OscillatorState), Stalled> {
    let active = state.beam.side;
    let params = config.params_for(active);
    let dt = match sma::time_to_threshold(
        state.sma_for(active),
        params,
        config.current,
        params.t_act,
    ) {
        TimeToThreshold::In(t) => t,
        TimeToThreshold::Never => return Err(Stalled),
    };
    let mut next = *state;
    *next.sma_for_mut(active) = sma::step(*state.sma_for(active), params, config.current, dt);
    // The snap is the contraction event; latch the flag regardless of the
    // one-ulp landing error of the exponential.
    next.sma_for_mut(active).contracted = true;
    let inactive = active.flipped();
    *next.sma_for_mut(inactive) = sma::step(
        *state.sma_for(inactive),
        config.params_for(inactive),
        0.0,
        dt,
    );
    next.beam.side = inactive;
    next.clock += dt;
    Ok((dt, next))
}

/// Output of a free-running simulation: the sampled beam displacement and
/// the complementary control-signal pair (primary high when the beam is
/// Left).
#[derive(Debug, Clone)]
pub struct OscillatorRun {
    pub beam_trace: SignalTrace,
    pub primary: SquareWave,
    pub complement: SquareWave,
    pub snap_times: Vec<f64>,
}

impl OscillatorRun {
    /// Steady-state period taken from the last full cycle; the first cycle
    /// starts from ambient and is atypically long.
    pub fn steady_period(&self) -> Option<f64> {
        let n = self.snap_times.len();
        if n < 3 {
            return None;
        }
        Some(self.snap_times[n - 1] - self.snap_times[n - 3])
    }
}

/// Runs `n_snaps` snap events from a fresh start and renders the traces.
pub fn simulate(
    config: &OscillatorConfig,
    n_snaps: usize,
    sample_period: f64,
) -> Result<OscillatorRun, Stalled> {
    assert!(n_snaps >= 2, "need at least 2 snaps to form a trace");
    assert!(sample_period > 0.0);
    let mut state = OscillatorState::initial(config);
    let mut snap_times = Vec::with_capacity(n_snaps);
    let mut sides = vec![state.beam.side];
    for _ in 0..n_snaps {
        let (_, next) = advance_to_next_snap(&state, config)?;
        state = next;
        snap_times.push(state.clock);
        sides.push(state.beam.side);
    }

    let amplitude = state.beam.amplitude;
    let t_end = state.clock;
    let mut samples = Vec::new();
    let mut t = 0.0;
    while t <= t_end {
        let snapped = snap_times.iter().take_while(|&&s| s <= t).count();
        let side = sides[snapped];
        let y = match side {
            Side::Left => -amplitude,
            Side::Right => amplitude,
        };
        samples.push((t, y));
        t += sample_period;
    }
    let beam_trace = SignalTrace::new(samples, config.label.clone())
        .expect("sampled trace is monotone by construction");

    let initial = if sides[0] == Side::Left {
        Level::High
    } else {
        Level::Low
    };
    let primary = SquareWave::from_toggle_times(initial, &snap_times, config.label.clone())
        .expect("snap times are strictly increasing");
    let complement = primary.complement(format!("{}_inv", config.label));
    Ok(OscillatorRun {
        beam_trace,
        primary,
        complement,
        snap_times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal;

    fn config(tau: f64, k: f64, current: f64) -> OscillatorConfig {
        OscillatorConfig::symmetric(SmaThermalParams::default_fiber(tau, k), current, "osc")
    }

    #[test]
    fn active_contact_matches_side_and_alternates() {
        let cfg = config(2.0, 1000.0, 0.3);
        let state = OscillatorState::initial(&cfg);
        assert_eq!(active_contact(&state), Side::Left);
        let (_, next) = advance_to_next_snap(&state, &cfg).unwrap();
        assert_eq!(active_contact(&next), Side::Right);
        assert_ne!(active_contact(&next), active_contact(&state));
    }

    #[test]
    fn first_snap_time_closed_form() {
        let cfg = config(2.0, 1000.0, 0.3);
        let state = OscillatorState::initial(&cfg);
        let (dt, next) = advance_to_next_snap(&state, &cfg).unwrap();
        assert!((dt - 2.0 * (90.0f64 / 45.0).ln()).abs() < 1e-12);
        assert!((next.left.temperature - 70.0).abs() < 1e-9);
        assert!(next.left.contracted);
        assert_eq!(next.right.temperature, 25.0);
    }

    #[test]
    fn symmetric_fresh_start_equal_first_two_snaps() {
        let cfg = config(2.0, 1000.0, 0.3);
        let state = OscillatorState::initial(&cfg);
        let (t1, s1) = advance_to_next_snap(&state, &cfg).unwrap();
        let (t2, _) = advance_to_next_snap(&s1, &cfg).unwrap();
        assert!((t1 - t2).abs() < 1e-12);
    }

    #[test]
    fn stall_below_threshold_current() {
        let cfg = config(2.0, 1000.0, 0.2); // T_ss = 65 < 70
        let state = OscillatorState::initial(&cfg);
        assert_eq!(advance_to_next_snap(&state, &cfg).err(), Some(Stalled));
        assert!(simulate(&cfg, 4, 0.01).is_err());
    }

    #[test]
    fn waves_are_complementary_at_every_sample() {
        let cfg = config(1.0, 1200.0, 0.28);
        let run = simulate(&cfg, 8, 0.01).unwrap();
        let mut t = 0.0;
        while t < *run.snap_times.last().unwrap() {
            let a = run.primary.level_at(t);
            let b = run.complement.level_at(t);
            assert_ne!(a, b);
            t += 0.37;
        }
    }

    #[test]
    fn side_sequence_strictly_alternates() {
        let cfg = config(1.0, 1200.0, 0.28);
        let mut state = OscillatorState::initial(&cfg);
        let mut prev = state.beam.side;
        for _ in 0..12 {
            let (_, next) = advance_to_next_snap(&state, &cfg).unwrap();
            assert_eq!(next.beam.side, prev.flipped());
            prev = next.beam.side;
            state = next;
        }
    }

    #[test]
    fn half_periods_converge_monotonically() {
        let cfg = config(1.0, 900.0, 0.24);
        let mut state = OscillatorState::initial(&cfg);
        let mut halves = Vec::new();
        for _ in 0..16 {
            let (dt, next) = advance_to_next_snap(&state, &cfg).unwrap();
            halves.push(dt);
            state = next;
        }
        // First two start from ambient and are equal; afterwards strictly
        // decreasing toward the fixed point.
        assert!((halves[0] - halves[1]).abs() < 1e-12);
        for w in halves[1..].windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        let a = halves[10];
        let b = halves[11];
        assert!((a - b).abs() / b < 1e-6, "halves {a} vs {b}");
    }

    #[test]
    fn steady_duty_is_half() {
        let cfg = config(1.0, 900.0, 0.24);
        let run = simulate(&cfg, 30, 0.01).unwrap();
        let window = (run.snap_times[20], run.snap_times[28]);
        let duty = signal::duty_cycle(&run.primary, window).unwrap();
        assert!((duty - 0.5).abs() < 1e-9, "duty {duty}");
        let duty_c = signal::duty_cycle(&run.complement, window).unwrap();
        assert!((duty_c - 0.5).abs() < 1e-9);
    }

    #[test]
    fn calibrated_endpoints_reproduce_measured_periods() {
        // Fitted to 6.0 s at 0.23 A and 2.2 s at 0.26 A; the wave-level
        // steady period must land within 1% at both endpoints.
        let params = SmaThermalParams::default_fiber(1.0534, 900.0);
        for (current, want) in [(0.23, 6.0), (0.26, 2.2)] {
            let cfg = OscillatorConfig::symmetric(params, current, "osc");
            let run = simulate(&cfg, 20, 0.05).unwrap();
            let period = run.steady_period().unwrap();
            assert!(
                (period - want).abs() / want < 0.01,
                "period {period} at {current} A"
            );
        }
    }

    #[test]
    fn period_strictly_decreasing_in_current() {
        let mut prev = f64::INFINITY;
        for i in 0..6 {
            let current = 0.23 + 0.006 * i as f64;
            let cfg = config(1.0, 1500.0, current);
            let run = simulate(&cfg, 14, 0.02).unwrap();
            let period = run.steady_period().unwrap();
            assert!(period < prev, "period {period} at {current}");
            prev = period;
        }
    }
}
