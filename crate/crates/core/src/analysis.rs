//! Concurrence time series, sudden-death detection, the non-Markovianity
//! witness and the scans built on them.

use rayon::prelude::*;

use crate::dynamics::{Evolver, QuenchState};
use crate::entanglement::raw_concurrence;
use crate::error::{Error, Result};
use crate::model::{DispersionConvention, ModelParams, DEFAULT_N_K};

/// Which nearest-neighbour pair to follow, relative to the initial Bell
/// pair at `(m, m+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pair {
    /// `(m, m+1)`.
    System,
    /// `(m+1, m+2)`, straddling system and environment.
    Edge,
    /// `(m+2, m+3)`, the environment pair next to the system.
    Environment,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::System, Pair::Edge, Pair::Environment];

    /// Offset of the left site from `m`.
    pub fn offset(self) -> i64 {
        match self {
            Pair::System => 0,
            Pair::Edge => 1,
            Pair::Environment => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Pair::System => "system",
            Pair::Edge => "edge",
            Pair::Environment => "environment",
        }
    }
}

/// Uniform grid `t₀ + i·Δt`, `i = 0..len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    /// Grid from `t0` to `t_max` (inclusive when `t_max − t0` is a multiple
    /// of `dt`).
    pub fn new(t0: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(t0.is_finite() && t_max.is_finite() && dt.is_finite()) {
            return Err(Error::params("time grid bounds must be finite"));
        }
        if dt <= 0.0 {
            return Err(Error::params(format!("dt = {dt} must be positive")));
        }
        if t0 < 0.0 {
            return Err(Error::params(format!("t0 = {t0} must be non-negative")));
        }
        if t_max <= t0 {
            return Err(Error::params(format!(
                "t_max = {t_max} must exceed t0 = {t0}"
            )));
        }
        let steps = (t_max - t0) / dt;
        let rounded = steps.round();
        let n = if (steps - rounded).abs() <= 1e-9 * steps.max(1.0) {
            rounded
        } else {
            steps.floor()
        };
        Ok(Self {
            t0,
            dt,
            len: n as usize + 1,
        })
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }
}

/// Concurrence of one pair sampled on a uniform time grid.
#[derive(Clone, Debug)]
pub struct ConcurrenceSeries {
    pub pair: Pair,
    pub alpha: f64,
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    /// `max(0, raw)`.
    pub c_values: Vec<f64>,
    /// `2(|Z| − √(X⁺X⁻))`.
    pub raw_values: Vec<f64>,
    source: Option<QuenchState>,
}

impl ConcurrenceSeries {
    /// A series from given samples, with no underlying dynamics. Refinement
    /// of event times then interpolates between samples.
    pub fn from_samples(
        pair: Pair,
        alpha: f64,
        grid: TimeGrid,
        raw_values: Vec<f64>,
    ) -> Result<Self> {
        if raw_values.len() != grid.len {
            return Err(Error::params(format!(
                "{} samples for a grid of {} points",
                raw_values.len(),
                grid.len
            )));
        }
        Ok(Self {
            pair,
            alpha,
            grid,
            times: grid.times(),
            c_values: raw_values.iter().map(|r| r.max(0.0)).collect(),
            raw_values,
            source: None,
        })
    }

    /// The evolved state behind the series, if any.
    pub fn source(&self) -> Option<&QuenchState> {
        self.source.as_ref()
    }

    /// Raw concurrence at an arbitrary time: exact when the series has a
    /// source, otherwise linear interpolation of the samples.
    pub fn raw_at(&self, t: f64) -> f64 {
        match &self.source {
            Some(state) => raw_at(&Evolver::new(state), self.pair, t),
            None => {
                let g = &self.grid;
                let x = ((t - g.t0) / g.dt).clamp(0.0, (g.len - 1) as f64);
                let i = (x.floor() as usize).min(g.len.saturating_sub(2));
                let w = x - i as f64;
                if g.len == 1 {
                    return self.raw_values[0];
                }
                (1.0 - w) * self.raw_values[i] + w * self.raw_values[i + 1]
            }
        }
    }
}

fn raw_at(evolver: &Evolver, pair: Pair, t: f64) -> f64 {
    let i = evolver.state().m + pair.offset();
    let c = evolver.at(t).correlators(i);
    // single-excitation correlators are physical by construction
    raw_concurrence(&c).expect("evolved correlators are consistent")
}

/// Samples the concurrence of `pair` on `[t0, t_max]` with step `dt`.
/// Time points are evaluated independently and in parallel.
pub fn concurrence_series(
    pair: Pair,
    t0: f64,
    t_max: f64,
    dt: f64,
    state: &QuenchState,
) -> Result<ConcurrenceSeries> {
    let grid = TimeGrid::new(t0, t_max, dt)?;
    let state = QuenchState::new(state.m, state.phi, state.params)?;
    let evolver = Evolver::new(&state);
    let raw_values: Vec<f64> = (0..grid.len)
        .into_par_iter()
        .map(|i| raw_at(&evolver, pair, grid.time(i)))
        .collect();
    Ok(ConcurrenceSeries {
        pair,
        alpha: state.params.alpha,
        grid,
        times: grid.times(),
        c_values: raw_values.iter().map(|r| r.max(0.0)).collect(),
        raw_values,
        source: Some(state),
    })
}

/// Sudden-death detection settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EsdOptions {
    /// Width to which event times are refined.
    pub refine_tol: f64,
    /// A local minimum of the concurrence at or below this value counts as
    /// the concurrence reaching zero.
    pub dip_floor: f64,
}

impl Default for EsdOptions {
    fn default() -> Self {
        Self {
            refine_tol: 1e-4,
            dip_floor: 1e-2,
        }
    }
}

/// Entanglement sudden deaths and revivals of one series.
///
/// Two kinds of events are reported. Where the raw concurrence becomes
/// non-positive on an interval, death and revival are its two boundaries.
/// Where it only touches zero (or dips to at most
/// [`EsdOptions::dip_floor`]) at an isolated minimum, death and revival
/// coincide at that minimum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EsdEvents {
    pub death_times: Vec<f64>,
    pub revival_times: Vec<f64>,
}

impl EsdEvents {
    pub fn first_death(&self) -> Option<f64> {
        self.death_times.first().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.death_times.is_empty() && self.revival_times.is_empty()
    }
}

/// Finds death and revival times of `series`, refined to
/// `opts.refine_tol` on the continuous-time raw concurrence.
pub fn esd_times(series: &ConcurrenceSeries, opts: EsdOptions) -> Result<EsdEvents> {
    if opts.refine_tol.is_nan()
        || opts.refine_tol <= 0.0
        || opts.dip_floor.is_nan()
        || opts.dip_floor < 0.0
    {
        return Err(Error::params(
            "refine_tol must be positive and dip_floor non-negative",
        ));
    }
    let evolver = series.source.as_ref().map(Evolver::new);
    let eval = |t: f64| match &evolver {
        Some(ev) => raw_at(ev, series.pair, t),
        None => series.raw_at(t),
    };
    let raw = &series.raw_values;
    let t = &series.times;
    let n = raw.len();
    let tol = opts.refine_tol;
    let mut events = EsdEvents::default();

    // intervals where the sampled raw concurrence is non-positive
    for i in 0..n {
        if raw[i] > 0.0 {
            continue;
        }
        if i > 0 && raw[i - 1] > 0.0 {
            events
                .death_times
                .push(bisect_zero(&eval, t[i - 1], t[i], tol));
        }
        if i + 1 < n && raw[i + 1] > 0.0 {
            events
                .revival_times
                .push(bisect_zero(&eval, t[i + 1], t[i], tol));
        }
    }

    // isolated minima reaching (numerically) zero between positive samples
    for i in 1..n.saturating_sub(1) {
        let is_dip = raw[i] > 0.0 && raw[i - 1] > raw[i] && raw[i] <= raw[i + 1];
        if !is_dip {
            continue;
        }
        let (t_min, c_min) = if evolver.is_some() {
            golden_min(&eval, t[i - 1], t[i + 1], tol)
        } else {
            parabola_min(t[i - 1], t[i], t[i + 1], raw[i - 1], raw[i], raw[i + 1])
        };
        if c_min <= 0.0 {
            events
                .death_times
                .push(bisect_zero(&eval, t[i - 1], t_min, tol));
            events
                .revival_times
                .push(bisect_zero(&eval, t[i + 1], t_min, tol));
        } else if c_min <= opts.dip_floor {
            events.death_times.push(t_min);
            events.revival_times.push(t_min);
        }
    }

    events.death_times.sort_by(f64::total_cmp);
    events.revival_times.sort_by(f64::total_cmp);
    Ok(events)
}

/// Boundary between `positive` (raw > 0) and `dead` (raw ≤ 0), in either
/// order.
fn bisect_zero(f: &impl Fn(f64) -> f64, positive: f64, dead: f64, tol: f64) -> f64 {
    let (mut p, mut d) = (positive, dead);
    while (p - d).abs() > tol {
        let mid = 0.5 * (p + d);
        if f(mid) > 0.0 {
            p = mid;
        } else {
            d = mid;
        }
    }
    0.5 * (p + d)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

fn golden_max(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (t, v) = golden_min(&|x| -f(x), a, b, tol);
    (t, -v)
}

fn parabola_min(t0: f64, t1: f64, t2: f64, f0: f64, f1: f64, f2: f64) -> (f64, f64) {
    let h = t1 - t0;
    let curvature = f0 - 2.0 * f1 + f2;
    if curvature <= 0.0 {
        return (t1, f1);
    }
    let shift = (0.5 * h * (f0 - f2) / curvature).clamp(-h, h);
    let value = f1 - 0.125 * (f0 - f2) * (f0 - f2) / curvature;
    let _ = t2;
    (t1 + shift, value.min(f1))
}

/// The non-Markovianity witness over a series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessResult {
    /// `∫|dC/dt| dt − ΔC`.
    pub i_value: f64,
    /// `C(t₀) − C(t_max)`.
    pub delta_c: f64,
    pub t0: f64,
    pub t_max: f64,
    pub alpha: f64,
}

/// Witness from the total variation of the sampled concurrence,
/// `Σ|ΔC| − (C(t₀) − C(t_max)) = 2 Σ max(0, ΔC)`. Exactly zero iff the
/// samples never increase.
pub fn witness(series: &ConcurrenceSeries) -> WitnessResult {
    let c = &series.c_values;
    let rises: f64 = c.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum();
    WitnessResult {
        i_value: 2.0 * rises,
        delta_c: c[0] - c[c.len() - 1],
        t0: series.grid.t0,
        t_max: series.grid.t_max(),
        alpha: series.alpha,
    }
}

/// Shared settings for the parameter scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSettings {
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
    pub phi: f64,
    pub n_k: usize,
    pub convention: DispersionConvention,
    /// `α̂_c` is the smallest `α` whose witness exceeds this.
    pub onset_threshold: f64,
    pub esd: EsdOptions,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t_max: 40.0,
            dt: 0.01,
            phi: 0.0,
            n_k: DEFAULT_N_K,
            convention: DispersionConvention::default(),
            onset_threshold: 1e-3,
            esd: EsdOptions::default(),
        }
    }
}

impl ScanSettings {
    /// Bell pair at `m = 0` for the given `α`.
    pub fn state(&self, alpha: f64) -> Result<QuenchState> {
        let params = ModelParams::new(alpha)?
            .with_n_k(self.n_k)?
            .with_convention(self.convention);
        QuenchState::new(0, self.phi, params)
    }
}

/// `min, min + step, …` up to `max` inclusive (with a 1e-9 relative slack).
pub fn alpha_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(Error::params(
            "alpha range needs finite bounds and a positive step",
        ));
    }
    if max < min {
        return Err(Error::params(format!("empty alpha range [{min}, {max}]")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Witness values over an `α` grid plus the onset estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessScan {
    pub results: Vec<WitnessResult>,
    /// Smallest `α` with `I > onset_threshold`.
    pub onset: Option<f64>,
}

pub fn witness_scan(alphas: &[f64], settings: &ScanSettings) -> Result<WitnessScan> {
    if alphas.is_empty() {
        return Err(Error::params("alpha grid is empty"));
    }
    let results = alphas
        .par_iter()
        .map(|&alpha| {
            let state = settings.state(alpha)?;
            let series = concurrence_series(
                Pair::System,
                settings.t0,
                settings.t_max,
                settings.dt,
                &state,
            )?;
            Ok(witness(&series))
        })
        .collect::<Result<Vec<_>>>()?;
    let onset = results
        .iter()
        .filter(|w| w.i_value > settings.onset_threshold)
        .map(|w| w.alpha)
        .min_by(f64::total_cmp);
    Ok(WitnessScan { results, onset })
}

/// `C_{m,m+1}(t)` against `α` at one fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticCurve {
    pub t: f64,
    pub values: Vec<f64>,
    /// `None` when the curve is flat to 1e-12.
    pub argmax: Option<f64>,
    /// Whether `t` lies beyond the first sudden death at that `α`.
    pub past_first_death: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticScan {
    pub alphas: Vec<f64>,
    pub curves: Vec<StaticCurve>,
}

pub fn static_concurrence_scan(
    alphas: &[f64],
    times: &[f64],
    settings: &ScanSettings,
) -> Result<StaticScan> {
    if alphas.is_empty() {
        return Err(Error::params("alpha grid is empty"));
    }
    if times.is_empty() {
        return Err(Error::params("no times requested"));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::params(format!(
            "time {t} must be finite and non-negative"
        )));
    }
    let horizon = times.iter().copied().fold(0.0, f64::max);
    // per α: concurrence at each time, first death up to the horizon
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let state = settings.state(alpha)?;
            let evolver = Evolver::new(&state);
            let values: Vec<f64> = times
                .iter()
                .map(|&t| raw_at(&evolver, Pair::System, t).max(0.0))
                .collect();
            let first_death = if horizon > 0.0 {
                let series = concurrence_series(
                    Pair::System,
                    0.0,
                    horizon + settings.dt,
                    settings.dt,
                    &state,
                )?;
                esd_times(&series, settings.esd)?.first_death()
            } else {
                None
            };
            Ok((values, first_death))
        })
        .collect::<Result<Vec<_>>>()?;

    let curves = times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let values: Vec<f64> = rows.iter().map(|(v, _)| v[j]).collect();
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let argmax = if max - min <= 1e-12 {
                None
            } else {
                values.iter().position(|&v| v == max).map(|i| alphas[i])
            };
            let past_first_death = rows.iter().map(|(_, d)| d.is_some_and(|d| t > d)).collect();
            StaticCurve {
                t,
                values,
                argmax,
                past_first_death,
            }
        })
        .collect();
    Ok(StaticScan {
        alphas: alphas.to_vec(),
        curves,
    })
}

/// Two estimates of the critical `α`: witness onset and the static peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalEstimate {
    pub onset: Option<f64>,
    /// Mean argmax over the non-flat static curves.
    pub static_peak: Option<f64>,
}

impl CriticalEstimate {
    pub fn new(witness: &WitnessScan, statics: &StaticScan) -> Self {
        let peaks: Vec<f64> = statics.curves.iter().filter_map(|c| c.argmax).collect();
        let static_peak =
            (!peaks.is_empty()).then(|| peaks.iter().sum::<f64>() / peaks.len() as f64);
        Self {
            onset: witness.onset,
            static_peak,
        }
    }

    /// Whether both estimates exist and lie within `tol` of each other.
    pub fn agree(&self, tol: f64) -> bool {
        matches!((self.onset, self.static_peak), (Some(a), Some(b)) if (a - b).abs() <= tol)
    }
}

/// A series with its sudden-death events.
#[derive(Clone, Debug)]
pub struct PairDynamics {
    pub series: ConcurrenceSeries,
    pub events: EsdEvents,
}

/// System, edge and environment pairs evolved together.
#[derive(Clone, Debug)]
pub struct EnvironmentComparison {
    pub system: PairDynamics,
    pub edge: PairDynamics,
    pub environment: PairDynamics,
    /// First local maximum of the system concurrence after its first death.
    pub system_revival_peak: Option<f64>,
    pub environment_first_death: Option<f64>,
}

impl EnvironmentComparison {
    /// `system_revival_peak − environment_first_death`.
    pub fn peak_offset(&self) -> Option<f64> {
        Some(self.system_revival_peak? - self.environment_first_death?)
    }

    pub fn pair(&self, pair: Pair) -> &PairDynamics {
        match pair {
            Pair::System => &self.system,
            Pair::Edge => &self.edge,
            Pair::Environment => &self.environment,
        }
    }
}

pub fn environment_comparison(
    state: &QuenchState,
    t0: f64,
    t_max: f64,
    dt: f64,
    opts: EsdOptions,
) -> Result<EnvironmentComparison> {
    let run = |pair| -> Result<PairDynamics> {
        let series = concurrence_series(pair, t0, t_max, dt, state)?;
        let events = esd_times(&series, opts)?;
        Ok(PairDynamics { series, events })
    };
    let system = run(Pair::System)?;
    let edge = run(Pair::Edge)?;
    let environment = run(Pair::Environment)?;
    let system_revival_peak = system
        .events
        .first_death()
        .and_then(|d| first_peak_after(&system.series, d, opts.refine_tol));
    let environment_first_death = environment.events.first_death();
    Ok(EnvironmentComparison {
        system,
        edge,
        environment,
        system_revival_peak,
        environment_first_death,
    })
}

fn first_peak_after(series: &ConcurrenceSeries, after: f64, tol: f64) -> Option<f64> {
    let c = &series.c_values;
    let t = &series.times;
    let i = (1..c.len().saturating_sub(1))
        .find(|&i| t[i] > after && c[i - 1] < c[i] && c[i] >= c[i + 1])?;
    Some(match series.source() {
        Some(state) => {
            let ev = Evolver::new(state);
            golden_max(&|x| raw_at(&ev, series.pair, x), t[i - 1], t[i + 1], tol).0
        }
        None => t[i],
    })
}
