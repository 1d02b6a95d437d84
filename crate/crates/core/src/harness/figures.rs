//! Data behind each figure, ready for an external plotter.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::dynamics::{Field, State};
use crate::error::{Error, Result};
use crate::integrate::{integrate_record, integrate_with, step_count, PeriodSearch, Trajectory};
use crate::invariants::{drift_integrand, observable_vector};
use crate::multiscale::{run_multiscale, Method, ObservableSeries};

use super::config::Settings;
use super::csv::{CsvExport, CsvTable};
use super::reference::reference_series;

/// RK4 steps per fast period for direct runs when no `dt` is given.
pub const REFERENCE_STEPS_PER_PERIOD: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Fast trajectory winding around its torus.
    Torus,
    /// First component along the fast trajectory.
    U1Signal,
    /// `[3,2,1,3,2,1]` staying on the `U_k = U_{k+3}` submanifold.
    LocalInvariant,
    /// `grad v_3 . D` along the fast trajectory.
    DriftSignal,
    /// Running average of the same signal.
    DriftAverage,
    /// Young-measure slow observables next to a direct run.
    SlowYm,
    /// One fast period of the full system every 600 periods.
    ToriDecay,
    /// `v_3` of the full system at every step, early times.
    V3Early,
    /// Equation-free slow observables next to a direct run.
    SlowEf,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Torus,
        Figure::U1Signal,
        Figure::LocalInvariant,
        Figure::DriftSignal,
        Figure::DriftAverage,
        Figure::SlowYm,
        Figure::ToriDecay,
        Figure::V3Early,
        Figure::SlowEf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Torus => "torus",
            Figure::U1Signal => "u1-signal",
            Figure::LocalInvariant => "local-invariant",
            Figure::DriftSignal => "drift-signal",
            Figure::DriftAverage => "drift-average",
            Figure::SlowYm => "slow-ym",
            Figure::ToriDecay => "tori-decay",
            Figure::V3Early => "v3-early",
            Figure::SlowEf => "slow-ef",
        }
    }

    /// Settings the figure is drawn with unless overridden.
    pub fn defaults(&self) -> Settings {
        let fast = |init: Vec<f64>| Settings {
            init: Some(init),
            nu: Some(0.0),
            dt: Some(1e-3),
            periods: Some(10),
            ..Settings::default()
        };
        let slow = |periods: usize| Settings {
            init: Some(vec![1., 1., 1., 1., 4., 1.]),
            nu: Some(1e-4),
            periods: Some(periods),
            euler_step: Some(3),
            avg_periods: Some(1),
            steps_per_period: Some(50),
            ..Settings::default()
        };
        match self {
            Figure::Torus | Figure::U1Signal | Figure::DriftSignal | Figure::DriftAverage => {
                fast(vec![1., 1., 1., 3., 2., 1.])
            }
            Figure::LocalInvariant => fast(vec![3., 2., 1., 3., 2., 1.]),
            Figure::SlowYm | Figure::SlowEf | Figure::ToriDecay => slow(3000),
            Figure::V3Early => slow(20),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureData {
    Trajectory(Trajectory),
    Series(Vec<ObservableSeries>),
    Table(CsvTable),
}

impl CsvExport for FigureData {
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        match self {
            FigureData::Trajectory(t) => t.write_csv(w),
            FigureData::Series(s) => s.as_slice().write_csv(w),
            FigureData::Table(t) => t.write_csv(w),
        }
    }
}

fn fast_period(state: &State) -> Result<f64> {
    Ok(PeriodSearch::for_state(state).run(state)?.period)
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing setting `{what}`")))
}

fn fast_run(s: &Settings) -> Result<Trajectory> {
    let state = s.state()?;
    let period = fast_period(&state)?;
    let dt = need(s.dt, "dt")?;
    integrate_record(Field::Fast, &state, need(s.periods, "periods")? as f64 * period, dt, 1)
}

/// Computes the data for `fig` from fully resolved settings.
pub fn figure_data(fig: Figure, s: &Settings) -> Result<FigureData> {
    match fig {
        Figure::Torus => Ok(FigureData::Trajectory(fast_run(s)?)),
        Figure::U1Signal => {
            let tr = fast_run(s)?;
            let mut t = CsvTable::new(["time", "U_1"]);
            for (time, st) in tr.times.iter().zip(&tr.states) {
                t.push(vec![*time, st[0]]);
            }
            Ok(FigureData::Table(t))
        }
        Figure::LocalInvariant => {
            let tr = fast_run(s)?;
            let n = tr.final_state.len();
            let h = n / 2;
            let mut header = vec!["time".to_string()];
            header.extend((1..=n).map(|k| format!("U_{k}")));
            header.push("max_local_defect".into());
            let mut t = CsvTable::new(header);
            for (time, st) in tr.times.iter().zip(&tr.states) {
                let u = st.as_slice();
                let defect = (0..h).map(|k| (u[k] - u[k + h]).abs()).fold(0.0, f64::max);
                let mut row = vec![*time];
                row.extend_from_slice(u);
                row.push(defect);
                t.push(row);
            }
            Ok(FigureData::Table(t))
        }
        Figure::DriftSignal | Figure::DriftAverage => {
            let tr = fast_run(s)?;
            let label = if fig == Figure::DriftSignal { "drift_v3" } else { "running_average_v3" };
            let mut t = CsvTable::new(["time", label]);
            let mut sum = 0.0;
            for (i, (time, st)) in tr.times.iter().zip(&tr.states).enumerate() {
                let g = drift_integrand(st, 3)?;
                sum += g;
                let y = if fig == Figure::DriftSignal { g } else { sum / (i + 1) as f64 };
                t.push(vec![*time, y]);
            }
            Ok(FigureData::Table(t))
        }
        Figure::SlowYm | Figure::SlowEf => {
            let state = s.state()?;
            let cfg = s.projective()?;
            let periods = need(s.periods, "periods")?;
            let method = if fig == Figure::SlowYm { Method::YoungMeasure } else { Method::EquationFree };
            let ms = run_multiscale(method, &state, &cfg, periods)?;
            let p0 = ms.periods[0];
            let dt = s.dt.unwrap_or(p0 / REFERENCE_STEPS_PER_PERIOD as f64);
            let per_period = ((p0 / dt).round() as usize).max(1);
            let reference = reference_series(&state, cfg.nu, ms.end_time(), dt, per_period)?;
            Ok(FigureData::Series(vec![reference, ms]))
        }
        Figure::ToriDecay => {
            let state = s.state()?;
            let nu = s.nu_or(1e-4);
            let periods = need(s.periods, "periods")?;
            let p0 = fast_period(&state)?;
            let dt = s.dt.unwrap_or(p0 / REFERENCE_STEPS_PER_PERIOD as f64);
            let n = state.len();
            let mut header = vec!["periods".to_string(), "time".to_string()];
            header.extend((1..=n).map(|k| format!("U_{k}")));
            let mut t = CsvTable::new(header);
            let marks: Vec<usize> = (600..=periods).step_by(600).collect();
            let windows: Vec<(usize, usize, usize)> = marks
                .iter()
                .map(|&m| {
                    let a = step_count(m as f64 * p0, dt);
                    (m, a, a + step_count(p0, dt))
                })
                .collect();
            let last = windows.last().map_or(0, |w| w.2);
            integrate_with(Field::Full { nu }, &state, dt, last, |i, time, u| {
                if let Some(&(m, _, _)) = windows.iter().find(|w| i >= w.1 && i <= w.2) {
                    let mut row = vec![m as f64, time];
                    row.extend_from_slice(u);
                    t.push(row);
                }
            })?;
            Ok(FigureData::Table(t))
        }
        Figure::V3Early => {
            let state = s.state()?;
            let nu = s.nu_or(1e-4);
            let p0 = fast_period(&state)?;
            let dt = s.dt.unwrap_or(p0 / REFERENCE_STEPS_PER_PERIOD as f64);
            let steps = step_count(need(s.periods, "periods")? as f64 * p0, dt);
            let mut t = CsvTable::new(["time", "v_3"]);
            integrate_with(Field::Full { nu }, &state, dt, steps, |_, time, u| {
                let st = State::new(u.to_vec()).expect("stepper keeps states positive");
                t.push(vec![time, observable_vector(&st).v(3)]);
            })?;
            Ok(FigureData::Table(t))
        }
    }
}
