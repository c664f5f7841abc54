//! Online GRNN altitude control of a quadcopter.
//!
//! The plant is a damped double integrator, `m z'' = u - m g - c z'`, stepped
//! with semi-implicit Euler. The controller keeps a GRNN inverse model that
//! maps a transition `(y_k, y_{k+1})` to the thrust above hover that produced
//! it. Each step the inverse model is queried with `(y_k, r_{k+1})`; when the
//! query is inside the covered region its answer plus a proportional term is
//! applied, otherwise a PD law takes over. Every observed transition is then
//! offered to the pattern store through the growth gate.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::NormStats;
use crate::growth::GrowthPolicy;
use crate::grnn::{GrnnModel, Pattern};
use crate::{Error, Result};

/// Magnitude of altitude or velocity treated as a blown-up simulation.
pub const STATE_BOUND: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadParams {
    /// kg
    pub mass: f64,
    /// m/s²
    pub gravity: f64,
    /// Linear drag, N·s/m.
    pub drag: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            gravity: 9.81,
            drag: 0.3,
        }
    }
}

impl QuadParams {
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadAltitudeState {
    /// m
    pub z: f64,
    /// m/s
    pub vz: f64,
}

/// One semi-implicit Euler step under thrust `u` (N).
pub fn quad_altitude_step(
    params: &QuadParams,
    state: QuadAltitudeState,
    u: f64,
    dt: f64,
) -> Result<QuadAltitudeState> {
    if !(0.0..=0.1).contains(&dt) {
        return Err(Error::InvalidParameter(format!("dt must lie in [0, 0.1], got {dt}")));
    }
    if !(state.z.is_finite() && state.vz.is_finite() && u.is_finite()) {
        return Err(Error::NonFinite("quadcopter state or thrust"));
    }
    let acc = (u - params.mass * params.gravity - params.drag * state.vz) / params.mass;
    let vz = state.vz + dt * acc;
    let z = state.z + dt * vz;
    if !(z.abs() <= STATE_BOUND && vz.abs() <= STATE_BOUND) {
        return Err(Error::BlowUp { step: 0 });
    }
    Ok(QuadAltitudeState { z, vz })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerConfig {
    pub kp: f64,
    pub kd: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Smoothing parameter on scaled inputs.
    pub sigma: f64,
    /// Altitudes are divided by this before they reach the inverse model.
    pub input_scale: f64,
    pub policy: GrowthPolicy,
    pub dt: f64,
    pub plant: QuadParams,
    /// When false the inverse model never learns and the loop is pure PD.
    pub adapt: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kp: 6.0,
            kd: 4.0,
            u_min: 0.0,
            u_max: 30.0,
            sigma: 0.05,
            input_scale: 1.0,
            policy: GrowthPolicy {
                novelty_radius: 1e-3,
                error_gate: 0.5,
                max_patterns: 500,
            },
            dt: 0.02,
            plant: QuadParams::default(),
            adapt: true,
        }
    }
}

/// Which branch produced a control output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlMode {
    InverseModel,
    Fallback,
}

#[derive(Clone, Debug)]
pub struct OnlineController {
    config: ControllerConfig,
    model: GrnnModel,
    prev_y: Option<f64>,
}

impl OnlineController {
    pub fn new(config: ControllerConfig) -> Result<Self> {
        if !(config.u_max > config.u_min) {
            return Err(Error::InvalidParameter("u_max must exceed u_min".into()));
        }
        if !(config.input_scale > 0.0 && config.dt > 0.0 && config.dt <= 0.1) {
            return Err(Error::InvalidParameter("input_scale and dt must be positive, dt <= 0.1".into()));
        }
        let policy = GrowthPolicy::new(
            config.policy.novelty_radius,
            config.policy.error_gate,
            config.policy.max_patterns,
        )?;
        let scale = NormStats::from_parts(vec![0.0; 2], vec![config.input_scale; 2])?;
        let model = GrnnModel::empty(2, 1, config.sigma)?
            .with_norm_stats(scale)?
            .with_policy(policy);
        Ok(Self {
            config,
            model,
            prev_y: None,
        })
    }

    /// Replaces the inverse model, e.g. with one loaded from disk. It must map
    /// two inputs to one output.
    pub fn with_model(mut self, model: GrnnModel) -> Result<Self> {
        if model.d_in() != 2 || model.d_out() != 1 {
            return Err(Error::Dimension {
                expected: 2,
                got: model.d_in(),
            });
        }
        self.model = model;
        Ok(self)
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn model(&self) -> &GrnnModel {
        &self.model
    }

    pub fn n_patterns(&self) -> usize {
        self.model.len()
    }

    /// Forgets the derivative history, keeping the learned patterns.
    pub fn reset_episode(&mut self) {
        self.prev_y = None;
    }

    /// Computes the saturated thrust for the current altitude `y_k` and the
    /// next reference `r_next`.
    pub fn step(&mut self, y_k: f64, r_next: f64) -> Result<f64> {
        Ok(self.step_with_mode(y_k, r_next)?.0)
    }

    pub fn step_with_mode(&mut self, y_k: f64, r_next: f64) -> Result<(f64, ControlMode)> {
        let c = &self.config;
        let vz_est = self.prev_y.map_or(0.0, |p| (y_k - p) / c.dt);
        self.prev_y = Some(y_k);
        let err = r_next - y_k;
        let query = [y_k, r_next];
        let covered = match self.model.nearest(&query)? {
            Some((_, d)) => d <= c.policy.novelty_radius,
            None => false,
        };
        let (action, mode) = if covered {
            (self.model.predict(&query)?[0] + c.kp * err, ControlMode::InverseModel)
        } else {
            (c.kp * err - c.kd * vz_est, ControlMode::Fallback)
        };
        let u = (c.plant.hover_thrust() + action).clamp(c.u_min, c.u_max);
        Ok((u, mode))
    }

    /// Offers the observed transition to the inverse model. Returns whether a
    /// pattern was stored.
    pub fn adapt(&mut self, y_k: f64, y_next: f64, u_applied: f64) -> Result<bool> {
        if !self.config.adapt {
            return Ok(false);
        }
        let residual = u_applied - self.config.plant.hover_thrust();
        let candidate = Pattern::new(vec![y_k, y_next], vec![residual])?;
        self.model.insert_bounded(&candidate, &self.config.policy)
    }
}

/// Reference profiles, as functions of time in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    Step { from: f64, to: f64, at: f64 },
    Square { low: f64, high: f64, period: f64 },
    Constant(f64),
}

impl Scenario {
    pub fn reference(&self, t: f64) -> f64 {
        match *self {
            Scenario::Step { from, to, at } => {
                if t < at {
                    from
                } else {
                    to
                }
            }
            Scenario::Square { low, high, period } => {
                if (t / period).rem_euclid(1.0) < 0.5 {
                    high
                } else {
                    low
                }
            }
            Scenario::Constant(r) => r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackingSample {
    pub k: usize,
    /// Time at the end of step `k`, s.
    pub t: f64,
    /// Reference for the end of step `k`.
    pub r: f64,
    /// Altitude at the end of step `k`.
    pub z: f64,
    pub u: f64,
    pub n_patterns: usize,
    pub mode: ControlMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackingReport {
    pub samples: Vec<TrackingSample>,
    /// Time from the last reference change until the altitude stays inside
    /// the ±5% band for good; `None` if it never settles.
    pub settling_time: Option<f64>,
    pub band: f64,
    /// Mean |r - z| over the final 10% of the run.
    pub steady_state_error: f64,
    /// Integral of |r - z| over the run (m·s).
    pub cumulative_abs_error: f64,
    pub max_patterns_seen: usize,
}

impl TrackingReport {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut s = String::from("k,t,r,z,u,n_patterns\n");
        for x in &self.samples {
            let _ = writeln!(s, "{},{},{},{},{},{}", x.k, x.t, x.r, x.z, x.u, x.n_patterns);
        }
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }
}

/// Closed loop: read altitude, compute thrust, step the plant, adapt.
pub fn run_tracking(
    controller: &mut OnlineController,
    scenario: &Scenario,
    initial: QuadAltitudeState,
    horizon_steps: usize,
) -> Result<TrackingReport> {
    if horizon_steps == 0 {
        return Err(Error::InvalidParameter("horizon must be at least one step".into()));
    }
    controller.reset_episode();
    let dt = controller.config.dt;
    let plant = controller.config.plant;
    let mut state = initial;
    let mut samples = Vec::with_capacity(horizon_steps);
    for k in 0..horizon_steps {
        let t_next = (k + 1) as f64 * dt;
        let r_next = scenario.reference(t_next);
        let y_k = state.z;
        let (u, mode) = controller.step_with_mode(y_k, r_next)?;
        state = quad_altitude_step(&plant, state, u, dt).map_err(|e| match e {
            Error::BlowUp { .. } => Error::BlowUp { step: k },
            other => other,
        })?;
        controller.adapt(y_k, state.z, u)?;
        samples.push(TrackingSample {
            k,
            t: t_next,
            r: r_next,
            z: state.z,
            u,
            n_patterns: controller.n_patterns(),
            mode,
        });
    }
    Ok(summarize(samples, initial.z, dt))
}

fn summarize(samples: Vec<TrackingSample>, z0: f64, dt: f64) -> TrackingReport {
    let n = samples.len();
    let seg = (1..n).rev().find(|&i| samples[i].r != samples[i - 1].r).unwrap_or(0);
    let r_final = samples[n - 1].r;
    let z_start = if seg == 0 { z0 } else { samples[seg - 1].z };
    let amplitude = (r_final - z_start).abs();
    let band = 0.05
        * if amplitude > 1e-9 {
            amplitude
        } else if r_final.abs() > 1e-9 {
            r_final.abs()
        } else {
            1.0
        };
    let outside_last = samples[seg..].iter().rposition(|s| (s.z - s.r).abs() > band);
    let t_start = if seg == 0 { 0.0 } else { samples[seg - 1].t };
    let settling_time = match outside_last {
        None => Some(0.0),
        Some(i) if seg + i + 1 < n => Some(samples[seg + i].t - t_start),
        Some(_) => None,
    };
    let tail = (n / 10).max(1);
    let steady_state_error = samples[n - tail..].iter().map(|s| (s.r - s.z).abs()).sum::<f64>() / tail as f64;
    let cumulative_abs_error = samples.iter().map(|s| (s.r - s.z).abs()).sum::<f64>() * dt;
    let max_patterns_seen = samples.iter().map(|s| s.n_patterns).max().unwrap_or(0);
    TrackingReport {
        samples,
        settling_time,
        band,
        steady_state_error,
        cumulative_abs_error,
        max_patterns_seen,
    }
}
