//! Deterministic simulator and analysis toolkit for an electronics-free
//! quadrature oscillation system — three coupled SMA-driven bi-stable
//! oscillators — and the quasi-static crawling robot it drives.
//!
//! The crate is organized bottom-up:
//!
//! - [`sma`]: exact lumped thermal model of one actuator.
//! - [`oscillator`]: one self-sustained bi-stable oscillator.
//! - [`quadrature`]: the gated three-oscillator network and its event loop.
//! - [`signal`]: trace binarization, period/phase statistics, quadrature
//!   validation.
//! - [`crawler`]: statics and quasi-static gait of the trapezoid robot,
//!   including signal-driven execution.
//! - [`calibrate`]: period-vs-current fitting, grid sweeps, scalar search.
//! - [`config`], [`trace_io`], [`report`], [`plot`], [`run`]: the file
//!   formats and the command-line orchestration around the model.

pub mod calibrate;
pub mod config;
pub mod crawler;
pub mod oscillator;
pub mod plot;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod signal;
pub mod sma;
pub mod trace_io;
