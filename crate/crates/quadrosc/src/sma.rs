//! Lumped-capacitance thermal model of one SMA actuator.
//!
//! A single thermal node relaxes exponentially toward a current-dependent
//! steady state `T_ss = t_amb + k·I²`. Heating and release of the actuator
//! are thresholded with hysteresis: the element contracts when it reaches
//! `t_act` and releases only after cooling below `t_rel`. All updates use
//! the closed-form exponential, so stepping is exact (no integrator error)
//! and every downstream event time is deterministic.

/// Actuator construction; both kinds share the same thermal model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActuatorKind {
    Fiber,
    Spring,
}

/// Fitted/lumped parameters of one SMA actuator.
///
/// `tau` and `k` absorb electrical resistance, convection and heat capacity;
/// they are the two quantities identifiable from period-vs-current data.
#[derive(Debug, Clone, Copy)]
pub struct SmaThermalParams {
    /// Thermal time constant (s).
    pub tau: f64,
    /// Steady-state heating coefficient (°C/A²).
    pub k: f64,
    /// Ambient temperature (°C).
    pub t_amb: f64,
    /// Activation (contraction) threshold (°C).
    pub t_act: f64,
    /// Release threshold (°C); must satisfy `t_amb < t_rel <= t_act`.
    pub t_rel: f64,
    /// Optional separate time constant for cooling segments.
    pub tau_cool: Option<f64>,
    pub kind: ActuatorKind,
}

impl SmaThermalParams {
    /// Typical low-transition-temperature SMA defaults; `tau` and `k` are
    /// intended to be replaced by calibration.
    pub fn default_fiber(tau: f64, k: f64) -> Self {
        Self {
            tau,
            k,
            t_amb: 25.0,
            t_act: 70.0,
            t_rel: 65.0,
            tau_cool: None,
            kind: ActuatorKind::Fiber,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.tau > 0.0) {
            return Err(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.k > 0.0) {
            return Err(format!("k must be positive, got {}", self.k));
        }
        if let Some(tc) = self.tau_cool {
            if !(tc > 0.0) {
                return Err(format!("tau_cool must be positive, got {tc}"));
            }
        }
        if !(self.t_amb < self.t_rel && self.t_rel <= self.t_act) {
            return Err(format!(
                "temperatures must satisfy t_amb < t_rel <= t_act, got {} / {} / {}",
                self.t_amb, self.t_rel, self.t_act
            ));
        }
        Ok(())
    }

    fn cooling_tau(&self) -> f64 {
        self.tau_cool.unwrap_or(self.tau)
    }
}

/// Instantaneous state of one actuator: temperature plus the hysteretic
/// contraction flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmaState {
    pub temperature: f64,
    pub contracted: bool,
}

impl SmaState {
    pub fn at_ambient(params: &SmaThermalParams) -> Self {
        Self {
            temperature: params.t_amb,
            contracted: false,
        }
    }
}

/// Result of a time-to-threshold query. `Never` means the steady-state
/// temperature at this current cannot reach the threshold; the oscillator
/// reports it as a stall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeToThreshold {
    In(f64),
    Never,
}

impl TimeToThreshold {
    pub fn finite(self) -> Option<f64> {
        match self {
            TimeToThreshold::In(t) => Some(t),
            TimeToThreshold::Never => None,
        }
    }
}

/// Joule-heating balance: `t_amb + k·I²`.
pub fn steady_state_temp(params: &SmaThermalParams, current: f64) -> f64 {
    debug_assert!(current >= 0.0);
    params.t_amb + params.k * current * current
}

/// Exact exponential update over `dt` seconds at constant drive current.
///
/// The contraction flag latches at `t_act` and clears below `t_rel`;
/// trajectories that stay inside `[t_rel, t_act)` leave it untouched.
pub fn step(state: SmaState, params: &SmaThermalParams, current: f64, dt: f64) -> SmaState {
    debug_assert!(dt >= 0.0);
    if dt == 0.0 {
        return state;
    }
    let t_ss = steady_state_temp(params, current);
    let tau = if t_ss < state.temperature {
        params.cooling_tau()
    } else {
        params.tau
    };
    let temperature = t_ss + (state.temperature - t_ss) * (-dt / tau).exp();
    let contracted = if temperature >= params.t_act {
        true
    } else if temperature < params.t_rel {
        false
    } else {
        state.contracted
    };
    SmaState {
        temperature,
        contracted,
    }
}

/// Exact time for the temperature to rise to `threshold` at constant
/// current: `tau·ln((T_ss − T)/(T_ss − threshold))`.
///
/// Returns 0 if already at or above the threshold, `Never` if the steady
/// state cannot reach it.
pub fn time_to_threshold(
    state: &SmaState,
    params: &SmaThermalParams,
    current: f64,
    threshold: f64,
) -> TimeToThreshold {
    debug_assert!(current >= 0.0);
    if state.temperature >= threshold {
        return TimeToThreshold::In(0.0);
    }
    let t_ss = steady_state_temp(params, current);
    if t_ss <= threshold {
        return TimeToThreshold::Never;
    }
    let t = params.tau * ((t_ss - state.temperature) / (t_ss - threshold)).ln();
    TimeToThreshold::In(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(tau: f64, k: f64) -> SmaThermalParams {
        SmaThermalParams::default_fiber(tau, k)
    }

    #[test]
    fn steady_state_no_heating_at_zero_current() {
        let p = params(2.0, 1000.0);
        assert_eq!(steady_state_temp(&p, 0.0), p.t_amb);
    }

    #[test]
    fn steady_state_direct_value() {
        let p = params(2.0, 1000.0);
        assert!((steady_state_temp(&p, 0.3) - 115.0).abs() < 1e-12);
    }

    #[test]
    fn steady_state_monotone_in_current() {
        let p = params(2.0, 1000.0);
        assert!(steady_state_temp(&p, 0.26) > steady_state_temp(&p, 0.23));
    }

    #[test]
    fn step_zero_dt_is_identity() {
        let p = params(2.0, 1000.0);
        let s = SmaState {
            temperature: 42.0,
            contracted: true,
        };
        assert_eq!(step(s, &p, 0.3, 0.0), s);
    }

    #[test]
    fn step_ambient_fixed_point() {
        let p = params(2.0, 1000.0);
        let s = SmaState::at_ambient(&p);
        let s2 = step(s, &p, 0.0, 7.3);
        assert_eq!(s2.temperature, p.t_amb);
    }

    #[test]
    fn step_half_life_example() {
        // (115-25)*e^{-ln 2} = 45, so T = 70 after tau*ln2 doubling time
        let p = params(2.0, 1000.0);
        let s = SmaState::at_ambient(&p);
        let dt = 2.0 * std::f64::consts::LN_2;
        let s2 = step(s, &p, 0.3, dt);
        assert!((s2.temperature - 70.0).abs() < 1e-9, "{}", s2.temperature);
        assert!(s2.contracted);
    }

    #[test]
    fn time_to_threshold_already_there() {
        let p = params(2.0, 1000.0);
        let s = SmaState {
            temperature: 80.0,
            contracted: true,
        };
        assert_eq!(
            time_to_threshold(&s, &p, 0.3, 70.0),
            TimeToThreshold::In(0.0)
        );
    }

    #[test]
    fn time_to_threshold_unreachable() {
        let p = params(2.0, 1000.0);
        let s = SmaState::at_ambient(&p);
        // T_ss = 25 + 1000*0.04 = 65 < 70
        assert_eq!(time_to_threshold(&s, &p, 0.2, 70.0), TimeToThreshold::Never);
    }

    #[test]
    fn time_to_threshold_closed_form() {
        let p = params(2.0, 1000.0);
        let s = SmaState::at_ambient(&p);
        let t = time_to_threshold(&s, &p, 0.3, 70.0).finite().unwrap();
        assert!((t - 2.0 * (90.0_f64 / 45.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn hysteresis_band_preserves_flag() {
        let p = params(2.0, 1000.0);
        // Trajectory oscillating strictly inside (t_rel, t_act): alternate a
        // warm and a cool drive chosen so the temperature stays in (65, 70).
        for start_contracted in [false, true] {
            let mut s = SmaState {
                temperature: 67.0,
                contracted: start_contracted,
            };
            for i in 0..40 {
                let current = if i % 2 == 0 { 0.2093 } else { 0.2035 }; // T_ss 68.8 / 66.4
                s = step(s, &p, current, 0.37);
                assert!(s.temperature > p.t_rel && s.temperature < p.t_act);
                assert_eq!(s.contracted, start_contracted);
            }
        }
    }

    #[test]
    fn release_below_t_rel() {
        let p = params(2.0, 1000.0);
        let s = SmaState {
            temperature: 70.0,
            contracted: true,
        };
        let s2 = step(s, &p, 0.0, 20.0);
        assert!(s2.temperature < p.t_rel);
        assert!(!s2.contracted);
    }

    #[test]
    fn cooling_uses_tau_cool_when_set() {
        let mut p = params(2.0, 1000.0);
        p.tau_cool = Some(4.0);
        let hot = SmaState {
            temperature: 70.0,
            contracted: true,
        };
        let cooled = step(hot, &p, 0.0, 4.0);
        let expected = 25.0 + 45.0 * (-1.0_f64).exp();
        assert!((cooled.temperature - expected).abs() < 1e-12);
        // Heating still uses tau.
        let heated = step(SmaState::at_ambient(&p), &p, 0.3, 2.0 * std::f64::consts::LN_2);
        assert!((heated.temperature - 70.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn step_semigroup(tau in 0.5f64..10.0, k in 200.0f64..5000.0,
                          current in 0.0f64..0.4, t0 in 25.0f64..120.0,
                          a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let p = params(tau, k);
            let s = SmaState { temperature: t0, contracted: false };
            let one = step(s, &p, current, a + b);
            let two = step(step(s, &p, current, a), &p, current, b);
            let scale = one.temperature.abs().max(1.0);
            prop_assert!((one.temperature - two.temperature).abs() / scale < 1e-12);
        }

        #[test]
        fn step_lands_on_threshold(tau in 0.5f64..10.0, k in 500.0f64..5000.0,
                                   current in 0.25f64..0.4) {
            let p = params(tau, k);
            let s = SmaState::at_ambient(&p);
            if let TimeToThreshold::In(t) = time_to_threshold(&s, &p, current, p.t_act) {
                let landed = step(s, &p, current, t);
                prop_assert!((landed.temperature - p.t_act).abs() < 1e-9);
            }
        }

        #[test]
        fn time_to_threshold_decreasing_in_current(tau in 0.5f64..10.0, k in 500.0f64..5000.0,
                                                   i1 in 0.3f64..0.35, di in 0.01f64..0.1) {
            let p = params(tau, k);
            let s = SmaState::at_ambient(&p);
            let t1 = time_to_threshold(&s, &p, i1, p.t_act);
            let t2 = time_to_threshold(&s, &p, i1 + di, p.t_act);
            if let (TimeToThreshold::In(a), TimeToThreshold::In(b)) = (t1, t2) {
                prop_assert!(b < a);
            }
        }
    }
}
