//! Trace processing and square-wave metrics: hysteresis binarization, edge
//! lists, period statistics, phase offset between two waves, duty cycle and
//! quadrature state-sequence validation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("trace must have at least 2 samples with strictly increasing time")]
    InvalidTrace,
    #[error("binarization thresholds must satisfy low < high")]
    InvalidThresholds,
    #[error("square wave edges must be strictly increasing and alternate")]
    InvalidWave,
    #[error("not enough edges for the requested statistic")]
    InsufficientEdges,
    #[error("no edge pairs matched the pairing rule")]
    NoPairableEdges,
    #[error("analysis window must span at least one full period")]
    WindowTooShort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Low,
    High,
}

impl Level {
    pub fn flipped(self) -> Level {
        match self {
            Level::Low => Level::High,
            Level::High => Level::Low,
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            Level::Low => 0,
            Level::High => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDir {
    Rising,
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub time: f64,
    pub dir: EdgeDir,
}

/// Sampled time series; times strictly increasing, at least two samples.
#[derive(Debug, Clone)]
pub struct SignalTrace {
    pub samples: Vec<(f64, f64)>,
    pub label: String,
}

impl SignalTrace {
    pub fn new(samples: Vec<(f64, f64)>, label: impl Into<String>) -> Result<Self, SignalError> {
        if samples.len() < 2 || samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SignalError::InvalidTrace);
        }
        Ok(Self {
            samples,
            label: label.into(),
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].0 - self.samples[0].0
    }
}

/// Logic-level signal represented by its initial level and edge list.
#[derive(Debug, Clone)]
pub struct SquareWave {
    pub initial_level: Level,
    pub edges: Vec<Edge>,
    pub label: String,
}

impl SquareWave {
    pub fn new(
        initial_level: Level,
        edges: Vec<Edge>,
        label: impl Into<String>,
    ) -> Result<Self, SignalError> {
        let mut expect = match initial_level {
            Level::Low => EdgeDir::Rising,
            Level::High => EdgeDir::Falling,
        };
        let mut prev = f64::NEG_INFINITY;
        for e in &edges {
            if e.time <= prev || e.dir != expect {
                return Err(SignalError::InvalidWave);
            }
            prev = e.time;
            expect = match expect {
                EdgeDir::Rising => EdgeDir::Falling,
                EdgeDir::Falling => EdgeDir::Rising,
            };
        }
        Ok(Self {
            initial_level,
            edges,
            label: label.into(),
        })
    }

    /// Builds the alternating edge list from toggle instants.
    pub fn from_toggle_times(
        initial_level: Level,
        times: &[f64],
        label: impl Into<String>,
    ) -> Result<Self, SignalError> {
        let mut level = initial_level;
        let mut edges = Vec::with_capacity(times.len());
        for &t in times {
            let dir = match level {
                Level::Low => EdgeDir::Rising,
                Level::High => EdgeDir::Falling,
            };
            edges.push(Edge { time: t, dir });
            level = level.flipped();
        }
        Self::new(initial_level, edges, label)
    }

    /// Complementary wave (levels inverted, same toggle instants).
    pub fn complement(&self, label: impl Into<String>) -> SquareWave {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                time: e.time,
                dir: match e.dir {
                    EdgeDir::Rising => EdgeDir::Falling,
                    EdgeDir::Falling => EdgeDir::Rising,
                },
            })
            .collect();
        SquareWave {
            initial_level: self.initial_level.flipped(),
            edges,
            label: label.into(),
        }
    }

    /// Level in effect at time `t` (right-continuous at edges).
    pub fn level_at(&self, t: f64) -> Level {
        let toggles = self.edges.iter().take_while(|e| e.time <= t).count();
        if toggles % 2 == 0 {
            self.initial_level
        } else {
            self.initial_level.flipped()
        }
    }

    /// Restriction of the wave to times strictly after `t0`; the initial
    /// level becomes the level in effect at `t0`. Used to analyze the
    /// steady-state portion of a simulated run.
    pub fn after(&self, t0: f64, label: impl Into<String>) -> SquareWave {
        let initial_level = self.level_at(t0);
        let edges = self
            .edges
            .iter()
            .filter(|e| e.time > t0)
            .copied()
            .collect();
        SquareWave {
            initial_level,
            edges,
            label: label.into(),
        }
    }

    pub fn rising_times(&self) -> Vec<f64> {
        self.edges
            .iter()
            .filter(|e| e.dir == EdgeDir::Rising)
            .map(|e| e.time)
            .collect()
    }
}

/// Binarization output; `degenerate` flags a trace that never left the
/// hysteresis band (empty edge list).
#[derive(Debug, Clone)]
pub struct Binarized {
    pub wave: SquareWave,
    pub degenerate: bool,
}

/// Hysteresis comparator: high at the first sample with `y >= high_thr`,
/// low at the first with `y <= low_thr`; edge times linearly interpolated
/// between the bracketing samples. The dead band guarantees alternation.
pub fn binarize(
    trace: &SignalTrace,
    low_thr: f64,
    high_thr: f64,
) -> Result<Binarized, SignalError> {
    if !(low_thr < high_thr) {
        return Err(SignalError::InvalidThresholds);
    }
    let mut state: Option<Level> = None;
    let mut edges = Vec::new();
    let mut prev = trace.samples[0];
    for &(t, y) in &trace.samples {
        let new = if y >= high_thr {
            Some(Level::High)
        } else if y <= low_thr {
            Some(Level::Low)
        } else {
            None
        };
        if let Some(new) = new {
            match state {
                None => state = Some(new),
                Some(old) if old != new => {
                    let (thr, dir) = match new {
                        Level::High => (high_thr, EdgeDir::Rising),
                        Level::Low => (low_thr, EdgeDir::Falling),
                    };
                    let (t0, y0) = prev;
                    let time = t0 + (thr - y0) / (y - y0) * (t - t0);
                    edges.push(Edge { time, dir });
                    state = Some(new);
                }
                _ => {}
            }
        }
        prev = (t, y);
    }
    let degenerate = edges.is_empty();
    // For a wave with edges, the initial level is the opposite of the first
    // edge direction; for degenerate traces fall back to the established
    // state (or Low if the trace never left the band).
    let initial_level = match edges.first() {
        Some(e) => match e.dir {
            EdgeDir::Rising => Level::Low,
            EdgeDir::Falling => Level::High,
        },
        None => state.unwrap_or(Level::Low),
    };
    Ok(Binarized {
        wave: SquareWave::new(initial_level, edges, trace.label.clone())?,
        degenerate,
    })
}

/// Default comparator thresholds: midrange ± half of the half-amplitude.
pub fn default_thresholds(trace: &SignalTrace) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(_, y) in &trace.samples {
        lo = lo.min(y);
        hi = hi.max(y);
    }
    let mid = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    (mid - 0.5 * half, mid + 0.5 * half)
}

/// Period statistics over consecutive rising edges: mean and population
/// standard deviation.
pub fn period_stats(wave: &SquareWave) -> Result<(f64, f64, usize), SignalError> {
    let rising = wave.rising_times();
    if rising.len() < 2 {
        return Err(SignalError::InsufficientEdges);
    }
    let periods: Vec<f64> = rising.windows(2).map(|w| w[1] - w[0]).collect();
    let n = periods.len();
    let mean = periods.iter().sum::<f64>() / n as f64;
    let var = periods.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n as f64;
    Ok((mean, var.sqrt(), n))
}

/// Phase statistics between a reference wave and another wave.
#[derive(Debug, Clone, Copy)]
pub struct PhaseReport {
    /// Mean reference period (s).
    pub t_avg: f64,
    /// Population standard deviation of reference periods (s).
    pub sigma_t: f64,
    /// Mean paired edge offset (s).
    pub dt_avg: f64,
    /// Mean phase offset `360·dt_avg/t_avg` (degrees).
    pub dphi_avg: f64,
    /// Population standard deviation of the per-pair phase offsets (degrees).
    pub sigma_dphi: f64,
    /// Number of reference periods analyzed.
    pub n_cycles: usize,
}

/// Pairs each reference edge with the earliest same-direction edge of the
/// other wave that follows it within one local reference period, then
/// averages the offsets: `dphi_avg = 360·dt_avg/t_avg`.
///
/// Both rising and falling edges contribute. Reference edges without a
/// same-direction successor (no local period) are skipped.
pub fn phase_offset(reference: &SquareWave, other: &SquareWave) -> Result<PhaseReport, SignalError> {
    let (t_avg, sigma_t, n_cycles) = period_stats(reference)?;
    if other.rising_times().len() < 2 {
        return Err(SignalError::InsufficientEdges);
    }
    let mut offsets = Vec::new();
    for dir in [EdgeDir::Rising, EdgeDir::Falling] {
        let refs: Vec<f64> = reference
            .edges
            .iter()
            .filter(|e| e.dir == dir)
            .map(|e| e.time)
            .collect();
        let others: Vec<f64> = other
            .edges
            .iter()
            .filter(|e| e.dir == dir)
            .map(|e| e.time)
            .collect();
        for w in refs.windows(2) {
            let (t1, local_period) = (w[0], w[1] - w[0]);
            if let Some(&t2) = others
                .iter()
                .find(|&&t2| t2 >= t1 && t2 - t1 < local_period)
            {
                offsets.push(t2 - t1);
            }
        }
    }
    if offsets.is_empty() {
        return Err(SignalError::NoPairableEdges);
    }
    let n = offsets.len() as f64;
    let dt_avg = offsets.iter().sum::<f64>() / n;
    let dphi_avg = 360.0 * dt_avg / t_avg;
    let phis: Vec<f64> = offsets.iter().map(|dt| 360.0 * dt / t_avg).collect();
    let var = phis
        .iter()
        .map(|p| (p - dphi_avg) * (p - dphi_avg))
        .sum::<f64>()
        / n;
    Ok(PhaseReport {
        t_avg,
        sigma_t,
        dt_avg,
        dphi_avg,
        sigma_dphi: var.sqrt(),
        n_cycles,
    })
}

/// Fraction of the window spent at the high level.
pub fn duty_cycle(wave: &SquareWave, window: (f64, f64)) -> Result<f64, SignalError> {
    let (t0, t1) = window;
    if wave.edges.len() < 2 {
        return Err(SignalError::InsufficientEdges);
    }
    if !(t1 > t0) {
        return Err(SignalError::WindowTooShort);
    }
    let mut high_time = 0.0;
    let mut level = wave.level_at(t0);
    let mut cursor = t0;
    for e in wave.edges.iter().filter(|e| e.time > t0 && e.time < t1) {
        if level == Level::High {
            high_time += e.time - cursor;
        }
        cursor = e.time;
        level = level.flipped();
    }
    if level == Level::High {
        high_time += t1 - cursor;
    }
    Ok(high_time / (t1 - t0))
}

/// Two-bit state of a (front, back) wave pair.
pub type QuadState = (u8, u8);

#[derive(Debug, Clone, PartialEq)]
pub enum QuadViolation {
    /// Two edges at the same instant flipped both bits at once.
    StateSkip { at: f64, from: QuadState, to: QuadState },
    /// A single-bit transition ran against the expected cyclic order.
    WrongOrder { at: f64, from: QuadState, to: QuadState },
}

#[derive(Debug, Clone)]
pub struct QuadratureCheck {
    pub states: Vec<(f64, QuadState)>,
    pub violations: Vec<QuadViolation>,
    pub ok: bool,
}

fn gray_successor(s: QuadState) -> QuadState {
    // Fixed cyclic order 10 -> 11 -> 01 -> 00 -> 10.
    match s {
        (1, 0) => (1, 1),
        (1, 1) => (0, 1),
        (0, 1) => (0, 0),
        (0, 0) => (1, 0),
        _ => unreachable!(),
    }
}

/// Merges two waves into a 2-bit state sequence and checks it walks the
/// four-state cycle `10 -> 11 -> 01 -> 00` (in any rotation) without skips.
pub fn validate_quadrature(w_front: &SquareWave, w_back: &SquareWave) -> QuadratureCheck {
    #[derive(Clone, Copy)]
    struct Ev {
        time: f64,
        front: bool,
    }
    let mut evs: Vec<Ev> = w_front
        .edges
        .iter()
        .map(|e| Ev {
            time: e.time,
            front: true,
        })
        .chain(w_back.edges.iter().map(|e| Ev {
            time: e.time,
            front: false,
        }))
        .collect();
    evs.sort_by(|a, b| a.time.total_cmp(&b.time).then(b.front.cmp(&a.front)));

    let mut state = (
        w_front.initial_level.as_bit(),
        w_back.initial_level.as_bit(),
    );
    let mut states = vec![(f64::NEG_INFINITY, state)];
    let mut violations = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(state);

    let mut i = 0;
    while i < evs.len() {
        let t = evs[i].time;
        let mut j = i;
        let mut next = state;
        while j < evs.len() && evs[j].time == t {
            if evs[j].front {
                next.0 ^= 1;
            } else {
                next.1 ^= 1;
            }
            j += 1;
        }
        if j - i > 1 {
            violations.push(QuadViolation::StateSkip {
                at: t,
                from: state,
                to: next,
            });
        } else if next != gray_successor(state) {
            violations.push(QuadViolation::WrongOrder {
                at: t,
                from: state,
                to: next,
            });
        }
        state = next;
        seen.insert(state);
        states.push((t, state));
        i = j;
    }
    let ok = violations.is_empty() && seen.len() == 4;
    QuadratureCheck {
        states,
        violations,
        ok,
    }
}
