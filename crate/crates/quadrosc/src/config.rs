//! Line-oriented run configuration: `[section]` headers and `key = value`
//! pairs. Parsing is strict — unknown sections or keys, duplicates, and
//! malformed values are hard errors with line numbers — so a typo can never
//! silently fall back to a default. Physical quantities carry their unit in
//! the key name (`l1_mm`, `current_a`, `tau_s`).

use crate::crawler::{CrawlerGeometry, OnMapsTo};
use crate::quadrature::Gating;
use crate::sma::{ActuatorKind, SmaThermalParams};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: duplicate key '{key}' in [{section}]")]
    DuplicateKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("missing section [{0}] required by this mode")]
    MissingSection(String),
    #[error("missing key '{key}' in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("line {line}: bad value for '{key}' in [{section}]: {msg}")]
    BadValue {
        line: usize,
        section: String,
        key: String,
        msg: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Oscillator,
    Quadrature,
    Crawler,
    Pipeline,
    Analyze,
    Calibrate,
    Sweep,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Oscillator => "oscillator",
            Mode::Quadrature => "quadrature",
            Mode::Crawler => "crawler",
            Mode::Pipeline => "pipeline",
            Mode::Analyze => "analyze",
            Mode::Calibrate => "calibrate",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SmaBlock {
    pub tau_s: f64,
    pub k_c_per_a2: f64,
    pub t_amb_c: f64,
    pub t_act_c: f64,
    pub t_rel_c: f64,
    pub tau_cool_s: Option<f64>,
    pub kind: ActuatorKind,
}

impl SmaBlock {
    pub fn to_params(&self) -> SmaThermalParams {
        SmaThermalParams {
            tau: self.tau_s,
            k: self.k_c_per_a2,
            t_amb: self.t_amb_c,
            t_act: self.t_act_c,
            t_rel: self.t_rel_c,
            tau_cool: self.tau_cool_s,
            kind: self.kind,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OscillatorBlock {
    pub current_a: f64,
    pub n_snaps: u64,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct QuadratureBlock {
    pub central_current_a: f64,
    pub p1_current_a: f64,
    pub p2_current_a: f64,
    pub n_cycles: u64,
    pub warmup_cycles: u64,
    pub gating: Gating,
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseBlock {
    pub sigma_tau: f64,
}

#[derive(Debug, Clone)]
pub struct CrawlerBlock {
    pub l1_mm: f64,
    pub l2_mm: f64,
    pub alpha_deg: f64,
    pub dtheta_deg: f64,
    pub weight: f64,
    pub mu: f64,
    pub tau_act_s: f64,
    pub on_maps_to: OnMapsTo,
    pub cycle_period_s: Option<f64>,
}

impl CrawlerBlock {
    pub fn to_geometry(&self) -> CrawlerGeometry {
        CrawlerGeometry {
            l1: self.l1_mm,
            l2: self.l2_mm,
            alpha: self.alpha_deg,
            dtheta: self.dtheta_deg,
            weight: self.weight,
            mu: self.mu,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeBlock {
    pub input_csv: String,
    pub time_col: String,
    pub value_cols: Vec<String>,
    pub low_thr: Option<f64>,
    pub high_thr: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CalibrateBlock {
    pub currents_a: Vec<f64>,
    pub periods_s: Vec<f64>,
    pub t_amb_c: f64,
    pub t_act_c: f64,
    pub t_rel_c: f64,
}

#[derive(Debug, Clone)]
pub struct SweepBlock {
    pub objective: String,
    pub axis: String,
    pub values: Vec<f64>,
    pub axis2: Option<String>,
    pub values2: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub rng_seed: u64,
    pub rng_seed_explicit: bool,
    pub sample_rate_hz: f64,
    pub out_dir: String,
    pub sma: Option<SmaBlock>,
    pub oscillator: Option<OscillatorBlock>,
    pub quadrature: Option<QuadratureBlock>,
    pub noise: Option<NoiseBlock>,
    pub crawler: Option<CrawlerBlock>,
    pub analyze: Option<AnalyzeBlock>,
    pub calibrate: Option<CalibrateBlock>,
    pub sweep: Option<SweepBlock>,
}

// ---------------------------------------------------------------------------
// Raw strict parsing
// ---------------------------------------------------------------------------

struct RawSection {
    name: String,
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

fn parse_raw(text: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    msg: format!("unterminated section header '{trimmed}'"),
                })?
                .trim()
                .to_string();
            if sections.iter().any(|s| s.name == name) {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("duplicate section [{name}]"),
                });
            }
            sections.push(RawSection {
                name,
                line,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("expected 'key = value', got '{trimmed}'"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let Some(section) = sections.last_mut() else {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("key '{key}' appears before any [section] header"),
            });
        };
        if section.entries.contains_key(&key) {
            return Err(ConfigError::DuplicateKey {
                line,
                section: section.name.clone(),
                key,
            });
        }
        section.entries.insert(key, (line, value));
    }
    Ok(sections)
}

/// Typed view over one raw section that tracks which keys were consumed, so
/// leftovers can be rejected as unknown.
struct SectionReader {
    name: String,
    entries: BTreeMap<String, (usize, String)>,
}

impl SectionReader {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn bad(&self, line: usize, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            line,
            section: self.name.clone(),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::MissingKey {
            section: self.name.clone(),
            key: key.to_string(),
        }
    }

    fn parse_f64(&self, line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
        let x: f64 = v
            .parse()
            .map_err(|_| self.bad(line, key, format!("'{v}' is not a number")))?;
        if !x.is_finite() {
            return Err(self.bad(line, key, "value must be finite"));
        }
        Ok(x)
    }

    fn f64_req(&mut self, key: &str) -> Result<f64, ConfigError> {
        let (line, v) = self.take(key).ok_or_else(|| self.missing(key))?;
        self.parse_f64(line, key, &v)
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            Some((line, v)) => Ok(Some(self.parse_f64(line, key, &v)?)),
            None => Ok(None),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.take(key) {
            Some((line, v)) => v
                .parse()
                .map_err(|_| self.bad(line, key, format!("'{v}' is not a non-negative integer"))),
            None => Ok(default),
        }
    }

    fn string_req(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take(key)
            .map(|(_, v)| v)
            .ok_or_else(|| self.missing(key))
    }

    fn string_or(&mut self, key: &str, default: &str) -> String {
        self.take(key)
            .map(|(_, v)| v)
            .unwrap_or_else(|| default.to_string())
    }

    fn parse_f64_list(&self, line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
        v.split(',')
            .map(|cell| self.parse_f64(line, key, cell.trim()))
            .collect()
    }

    fn f64_list_req(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let (line, v) = self.take(key).ok_or_else(|| self.missing(key))?;
        self.parse_f64_list(line, key, &v)
    }

    fn f64_list_opt(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            Some((line, v)) => Ok(Some(self.parse_f64_list(line, key, &v)?)),
            None => Ok(None),
        }
    }

    fn string_list_req(&mut self, key: &str) -> Result<Vec<String>, ConfigError> {
        let (_, v) = self.take(key).ok_or_else(|| self.missing(key))?;
        Ok(v.split(',').map(|s| s.trim().to_string()).collect())
    }

    fn reject_leftovers(self) -> Result<(), ConfigError> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(ConfigError::UnknownKey {
                line,
                section: self.name,
                key,
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Typed loading
// ---------------------------------------------------------------------------

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = parse_raw(text)?;
    let mut run = None;
    let mut sma = None;
    let mut oscillator = None;
    let mut quadrature = None;
    let mut noise = None;
    let mut crawler = None;
    let mut analyze = None;
    let mut calibrate = None;
    let mut sweep = None;

    for section in raw {
        let section_line = section.line;
        let mut r = SectionReader {
            name: section.name.clone(),
            entries: section.entries,
        };
        match section.name.as_str() {
            "run" => {
                let (mode_line, mode_str) =
                    r.take("mode").ok_or_else(|| r.missing("mode"))?;
                let mode = match mode_str.as_str() {
                    "oscillator" => Mode::Oscillator,
                    "quadrature" => Mode::Quadrature,
                    "crawler" => Mode::Crawler,
                    "pipeline" => Mode::Pipeline,
                    "analyze" => Mode::Analyze,
                    "calibrate" => Mode::Calibrate,
                    "sweep" => Mode::Sweep,
                    other => {
                        return Err(r.bad(mode_line, "mode", format!("unknown mode '{other}'")))
                    }
                };
                let (rng_seed, rng_seed_explicit) = match r.take("rng_seed") {
                    Some((line, v)) => (
                        v.parse().map_err(|_| {
                            r.bad(line, "rng_seed", format!("'{v}' is not a non-negative integer"))
                        })?,
                        true,
                    ),
                    None => (0, false),
                };
                let sample_rate_hz = r.f64_or("sample_rate_hz", 100.0)?;
                let out_dir = r.string_or("out_dir", "out");
                r.reject_leftovers()?;
                run = Some((mode, rng_seed, rng_seed_explicit, sample_rate_hz, out_dir));
            }
            "sma" => {
                let block = SmaBlock {
                    tau_s: r.f64_req("tau_s")?,
                    k_c_per_a2: r.f64_req("k_c_per_a2")?,
                    t_amb_c: r.f64_or("t_amb_c", 25.0)?,
                    t_act_c: r.f64_or("t_act_c", 70.0)?,
                    t_rel_c: r.f64_or("t_rel_c", 65.0)?,
                    tau_cool_s: r.f64_opt("tau_cool_s")?,
                    kind: match r.string_or("kind", "fiber").as_str() {
                        "fiber" => ActuatorKind::Fiber,
                        "spring" => ActuatorKind::Spring,
                        other => {
                            return Err(ConfigError::Invalid(format!(
                                "[sma] kind must be fiber or spring, got '{other}'"
                            )))
                        }
                    },
                };
                r.reject_leftovers()?;
                sma = Some(block);
            }
            "oscillator" => {
                let block = OscillatorBlock {
                    current_a: r.f64_req("current_a")?,
                    n_snaps: r.u64_or("n_snaps", 24)?,
                    label: r.string_or("label", "osc"),
                };
                r.reject_leftovers()?;
                oscillator = Some(block);
            }
            "quadrature" => {
                let block = QuadratureBlock {
                    central_current_a: r.f64_req("central_current_a")?,
                    p1_current_a: r.f64_req("p1_current_a")?,
                    p2_current_a: r.f64_req("p2_current_a")?,
                    n_cycles: r.u64_or("n_cycles", 20)?,
                    warmup_cycles: r.u64_or("warmup_cycles", 8)?,
                    gating: match r.string_or("gating", "left_p1").as_str() {
                        "left_p1" => Gating::LeftP1,
                        "left_p2" => Gating::LeftP2,
                        other => {
                            return Err(ConfigError::Invalid(format!(
                                "[quadrature] gating must be left_p1 or left_p2, got '{other}'"
                            )))
                        }
                    },
                };
                r.reject_leftovers()?;
                quadrature = Some(block);
            }
            "noise" => {
                let block = NoiseBlock {
                    sigma_tau: r.f64_req("sigma_tau")?,
                };
                if block.sigma_tau < 0.0 {
                    return Err(ConfigError::Invalid(
                        "[noise] sigma_tau must be non-negative".into(),
                    ));
                }
                r.reject_leftovers()?;
                noise = Some(block);
            }
            "crawler" => {
                let block = CrawlerBlock {
                    l1_mm: r.f64_req("l1_mm")?,
                    l2_mm: r.f64_req("l2_mm")?,
                    alpha_deg: r.f64_req("alpha_deg")?,
                    dtheta_deg: r.f64_req("dtheta_deg")?,
                    weight: r.f64_or("weight", 1.0)?,
                    mu: r.f64_or("mu", 0.5)?,
                    tau_act_s: r.f64_or("tau_act_s", 0.5)?,
                    on_maps_to: match r.string_or("on_maps_to", "rotated").as_str() {
                        "rotated" => OnMapsTo::Rotated,
                        "unrotated" => OnMapsTo::Unrotated,
                        other => {
                            return Err(ConfigError::Invalid(format!(
                                "[crawler] on_maps_to must be rotated or unrotated, got '{other}'"
                            )))
                        }
                    },
                    cycle_period_s: r.f64_opt("cycle_period_s")?,
                };
                r.reject_leftovers()?;
                crawler = Some(block);
            }
            "analyze" => {
                let block = AnalyzeBlock {
                    input_csv: r.string_req("input_csv")?,
                    time_col: r.string_req("time_col")?,
                    value_cols: r.string_list_req("value_cols")?,
                    low_thr: r.f64_opt("low_thr")?,
                    high_thr: r.f64_opt("high_thr")?,
                };
                if block.value_cols.is_empty() || block.value_cols.len() > 2 {
                    return Err(ConfigError::Invalid(
                        "[analyze] value_cols must name one or two columns".into(),
                    ));
                }
                r.reject_leftovers()?;
                analyze = Some(block);
            }
            "calibrate" => {
                let block = CalibrateBlock {
                    currents_a: r.f64_list_req("currents_a")?,
                    periods_s: r.f64_list_req("periods_s")?,
                    t_amb_c: r.f64_or("t_amb_c", 25.0)?,
                    t_act_c: r.f64_or("t_act_c", 70.0)?,
                    t_rel_c: r.f64_or("t_rel_c", 65.0)?,
                };
                if block.currents_a.len() != block.periods_s.len() {
                    return Err(ConfigError::Invalid(format!(
                        "[calibrate] currents_a has {} entries but periods_s has {}",
                        block.currents_a.len(),
                        block.periods_s.len()
                    )));
                }
                r.reject_leftovers()?;
                calibrate = Some(block);
            }
            "sweep" => {
                let block = SweepBlock {
                    objective: r.string_req("objective")?,
                    axis: r.string_req("axis")?,
                    values: r.f64_list_req("values")?,
                    axis2: r.take("axis2").map(|(_, v)| v),
                    values2: r.f64_list_opt("values2")?,
                };
                if block.axis2.is_some() != block.values2.is_some() {
                    return Err(ConfigError::Invalid(
                        "[sweep] axis2 and values2 must be given together".into(),
                    ));
                }
                r.reject_leftovers()?;
                sweep = Some(block);
            }
            other => {
                return Err(ConfigError::UnknownSection {
                    line: section_line,
                    name: other.to_string(),
                })
            }
        }
    }

    let (mode, rng_seed, rng_seed_explicit, sample_rate_hz, out_dir) =
        run.ok_or_else(|| ConfigError::MissingSection("run".into()))?;
    let config = RunConfig {
        mode,
        rng_seed,
        rng_seed_explicit,
        sample_rate_hz,
        out_dir,
        sma,
        oscillator,
        quadrature,
        noise,
        crawler,
        analyze,
        calibrate,
        sweep,
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Mode-specific completeness and basic invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let need = |present: bool, name: &str| -> Result<(), ConfigError> {
            if present {
                Ok(())
            } else {
                Err(ConfigError::MissingSection(name.into()))
            }
        };
        if !(self.sample_rate_hz > 0.0) {
            return Err(ConfigError::Invalid(
                "sample_rate_hz must be positive".into(),
            ));
        }
        match self.mode {
            Mode::Oscillator => {
                need(self.sma.is_some(), "sma")?;
                need(self.oscillator.is_some(), "oscillator")?;
            }
            Mode::Quadrature => {
                need(self.sma.is_some(), "sma")?;
                need(self.quadrature.is_some(), "quadrature")?;
            }
            Mode::Crawler => need(self.crawler.is_some(), "crawler")?,
            Mode::Pipeline => {
                need(self.sma.is_some(), "sma")?;
                need(self.quadrature.is_some(), "quadrature")?;
                need(self.crawler.is_some(), "crawler")?;
            }
            Mode::Analyze => need(self.analyze.is_some(), "analyze")?,
            Mode::Calibrate => need(self.calibrate.is_some(), "calibrate")?,
            Mode::Sweep => {
                need(self.sweep.is_some(), "sweep")?;
                let sweep = self.sweep.as_ref().unwrap();
                match sweep.objective.as_str() {
                    "period" => need(self.sma.is_some(), "sma")?,
                    "d_cycle" => need(self.crawler.is_some(), "crawler")?,
                    "speed" => {
                        need(self.sma.is_some(), "sma")?;
                        need(self.crawler.is_some(), "crawler")?;
                    }
                    other => {
                        return Err(ConfigError::Invalid(format!(
                            "[sweep] objective must be period, d_cycle or speed, got '{other}'"
                        )))
                    }
                }
            }
        }
        if let Some(sma) = &self.sma {
            sma.to_params()
                .validate()
                .map_err(|msg| ConfigError::Invalid(format!("[sma] {msg}")))?;
        }
        if let Some(c) = &self.crawler {
            c.to_geometry()
                .validate()
                .map_err(|e| ConfigError::Invalid(format!("[crawler] {e}")))?;
            if !(c.tau_act_s > 0.0) {
                return Err(ConfigError::Invalid(
                    "[crawler] tau_act_s must be positive".into(),
                ));
            }
        }
        if let Some(o) = &self.oscillator {
            if !(o.current_a > 0.0) {
                return Err(ConfigError::Invalid(
                    "[oscillator] current_a must be positive".into(),
                ));
            }
            if o.n_snaps < 2 {
                return Err(ConfigError::Invalid(
                    "[oscillator] n_snaps must be at least 2".into(),
                ));
            }
        }
        if let Some(q) = &self.quadrature {
            if !(q.central_current_a > 0.0) {
                return Err(ConfigError::Invalid(
                    "[quadrature] central_current_a must be positive".into(),
                ));
            }
            if q.n_cycles < 1 {
                return Err(ConfigError::Invalid(
                    "[quadrature] n_cycles must be at least 1".into(),
                ));
            }
            if q.warmup_cycles >= q.n_cycles {
                return Err(ConfigError::Invalid(
                    "[quadrature] warmup_cycles must be smaller than n_cycles".into(),
                ));
            }
        }
        if self.noise.is_some()
            && matches!(self.mode, Mode::Quadrature | Mode::Pipeline)
            && !self.rng_seed_explicit
        {
            return Err(ConfigError::Invalid(
                "rng_seed is mandatory when [noise] is enabled".into(),
            ));
        }
        Ok(())
    }

    /// Canonical serialization: every resolved value written explicitly,
    /// sections and keys in schema order, floats in shortest round-trip
    /// form. `parse(serialize(c))` resolves to the same configuration.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "mode = {}", self.mode.as_str());
        let _ = writeln!(s, "rng_seed = {}", self.rng_seed);
        let _ = writeln!(s, "sample_rate_hz = {}", self.sample_rate_hz);
        let _ = writeln!(s, "out_dir = {}", self.out_dir);
        if let Some(b) = &self.sma {
            let _ = writeln!(s, "\n[sma]");
            let _ = writeln!(s, "tau_s = {}", b.tau_s);
            let _ = writeln!(s, "k_c_per_a2 = {}", b.k_c_per_a2);
            let _ = writeln!(s, "t_amb_c = {}", b.t_amb_c);
            let _ = writeln!(s, "t_act_c = {}", b.t_act_c);
            let _ = writeln!(s, "t_rel_c = {}", b.t_rel_c);
            if let Some(tc) = b.tau_cool_s {
                let _ = writeln!(s, "tau_cool_s = {tc}");
            }
            let kind = match b.kind {
                ActuatorKind::Fiber => "fiber",
                ActuatorKind::Spring => "spring",
            };
            let _ = writeln!(s, "kind = {kind}");
        }
        if let Some(b) = &self.oscillator {
            let _ = writeln!(s, "\n[oscillator]");
            let _ = writeln!(s, "current_a = {}", b.current_a);
            let _ = writeln!(s, "n_snaps = {}", b.n_snaps);
            let _ = writeln!(s, "label = {}", b.label);
        }
        if let Some(b) = &self.quadrature {
            let _ = writeln!(s, "\n[quadrature]");
            let _ = writeln!(s, "central_current_a = {}", b.central_current_a);
            let _ = writeln!(s, "p1_current_a = {}", b.p1_current_a);
            let _ = writeln!(s, "p2_current_a = {}", b.p2_current_a);
            let _ = writeln!(s, "n_cycles = {}", b.n_cycles);
            let _ = writeln!(s, "warmup_cycles = {}", b.warmup_cycles);
            let gating = match b.gating {
                Gating::LeftP1 => "left_p1",
                Gating::LeftP2 => "left_p2",
            };
            let _ = writeln!(s, "gating = {gating}");
        }
        if let Some(b) = &self.noise {
            let _ = writeln!(s, "\n[noise]");
            let _ = writeln!(s, "sigma_tau = {}", b.sigma_tau);
        }
        if let Some(b) = &self.crawler {
            let _ = writeln!(s, "\n[crawler]");
            let _ = writeln!(s, "l1_mm = {}", b.l1_mm);
            let _ = writeln!(s, "l2_mm = {}", b.l2_mm);
            let _ = writeln!(s, "alpha_deg = {}", b.alpha_deg);
            let _ = writeln!(s, "dtheta_deg = {}", b.dtheta_deg);
            let _ = writeln!(s, "weight = {}", b.weight);
            let _ = writeln!(s, "mu = {}", b.mu);
            let _ = writeln!(s, "tau_act_s = {}", b.tau_act_s);
            let on = match b.on_maps_to {
                OnMapsTo::Rotated => "rotated",
                OnMapsTo::Unrotated => "unrotated",
            };
            let _ = writeln!(s, "on_maps_to = {on}");
            if let Some(p) = b.cycle_period_s {
                let _ = writeln!(s, "cycle_period_s = {p}");
            }
        }
        if let Some(b) = &self.analyze {
            let _ = writeln!(s, "\n[analyze]");
            let _ = writeln!(s, "input_csv = {}", b.input_csv);
            let _ = writeln!(s, "time_col = {}", b.time_col);
            let _ = writeln!(s, "value_cols = {}", b.value_cols.join(", "));
            if let Some(v) = b.low_thr {
                let _ = writeln!(s, "low_thr = {v}");
            }
            if let Some(v) = b.high_thr {
                let _ = writeln!(s, "high_thr = {v}");
            }
        }
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        if let Some(b) = &self.calibrate {
            let _ = writeln!(s, "\n[calibrate]");
            let _ = writeln!(s, "currents_a = {}", join(&b.currents_a));
            let _ = writeln!(s, "periods_s = {}", join(&b.periods_s));
            let _ = writeln!(s, "t_amb_c = {}", b.t_amb_c);
            let _ = writeln!(s, "t_act_c = {}", b.t_act_c);
            let _ = writeln!(s, "t_rel_c = {}", b.t_rel_c);
        }
        if let Some(b) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]");
            let _ = writeln!(s, "objective = {}", b.objective);
            let _ = writeln!(s, "axis = {}", b.axis);
            let _ = writeln!(s, "values = {}", join(&b.values));
            if let (Some(a2), Some(v2)) = (&b.axis2, &b.values2) {
                let _ = writeln!(s, "axis2 = {a2}");
                let _ = writeln!(s, "values2 = {}", join(v2));
            }
        }
        s
    }
}
