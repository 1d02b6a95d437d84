use std::fmt::Write as _;
use std::thread;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::invariants::ObservableVector;
use crate::multiscale::{initial_period, run_multiscale, Method, ProjectiveConfig};

use super::reference::reference_series;

/// Projective Euler steps compared in the error tables, in fast periods.
pub const TABLE_STEPS: [usize; 3] = [3, 6, 12];

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub euler_step_periods: usize,
    /// `|v_proj - v_ref| * 1e3` for `v_2, v_3, ...`.
    pub errors: Vec<f64>,
    /// `(v_proj - v_ref) * 1e3`, same columns.
    pub signed: Vec<f64>,
    pub rhs_evals: u64,
}

/// Scaled checkpoint errors of one projective method against a direct run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub method: Method,
    pub nu: f64,
    pub checkpoint_periods: usize,
    /// Fast period detected at the initial state.
    pub period: f64,
    /// `checkpoint_periods * period`.
    pub checkpoint_time: f64,
    pub reference: ObservableVector,
    pub reference_rhs_evals: u64,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// Column labels `v_2, v_3, ...`.
    pub fn columns(&self) -> Vec<String> {
        (2..=self.reference.len()).map(|j| format!("v_{j}")).collect()
    }

    pub fn row(&self, euler_step_periods: usize) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.euler_step_periods == euler_step_periods)
    }

    /// Entries of observable `v_j` down the rows.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.errors[j - 2]).collect()
    }

    /// Plain-text rendering, one row per Euler step.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} errors (x1e3) at t = {:.2} ({} periods of {:.4}), nu = {:e}",
            self.method, self.checkpoint_time, self.checkpoint_periods, self.period, self.nu
        );
        let _ = write!(out, "{:>6}", "step");
        for c in self.columns() {
            let _ = write!(out, "{c:>12}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:>6}", r.euler_step_periods);
            for e in &r.errors {
                let _ = write!(out, "{e:>12.4}");
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `method` once per entry of `step_set` and a direct reference, all
/// from `state0`, and compares them at `checkpoint_periods` fast periods.
///
/// The period is detected at `state0` with the same search the projective
/// runs use, so every run shares one time grid. The reference resolves each
/// period with `cfg.integration_steps_per_period()` RK4 steps. Rows run on
/// separate threads; the table is assembled in `step_set` order.
pub fn make_error_table(
    method: Method,
    state0: &State,
    nu: f64,
    checkpoint_periods: usize,
    step_set: &[usize],
    cfg: &ProjectiveConfig,
) -> Result<ErrorTable> {
    if method == Method::Reference {
        return Err(Error::InvalidArgument("error tables compare a projective method".into()));
    }
    if checkpoint_periods == 0 || step_set.is_empty() || step_set.contains(&0) {
        return Err(Error::InvalidArgument(
            "need a positive checkpoint and positive Euler steps".into(),
        ));
    }
    let cfg = ProjectiveConfig { nu, ..*cfg };
    let period = initial_period(state0, &cfg)?.period;
    let t_check = checkpoint_periods as f64 * period;
    let spp = cfg.integration_steps_per_period();

    let (reference, rows) = thread::scope(|scope| {
        let reference = scope.spawn(|| {
            reference_series(state0, nu, t_check, period / spp as f64, spp * checkpoint_periods)
        });
        let rows: Vec<_> = step_set
            .iter()
            .map(|&k| {
                let cfg = ProjectiveConfig {
                    euler_step_periods: k,
                    ..cfg
                };
                scope.spawn(move || run_multiscale(method, state0, &cfg, checkpoint_periods))
            })
            .collect();
        let rows: Vec<_> = rows
            .into_iter()
            .map(|h| h.join().expect("table row panicked"))
            .collect();
        (reference.join().expect("reference run panicked"), rows)
    });

    let reference = reference?;
    let v_ref = reference
        .value_at(t_check)
        .expect("reference ends at the checkpoint");
    let rows = step_set
        .iter()
        .zip(rows)
        .map(|(&k, series)| {
            let series = series.map_err(|e| Error::TableCell {
                euler_step: k,
                source: Box::new(e),
            })?;
            let v = series
                .value_at(t_check)
                .expect("projective run covers the checkpoint");
            let signed: Vec<f64> = v.as_slice()[1..]
                .iter()
                .zip(&v_ref.as_slice()[1..])
                .map(|(p, r)| (p - r) * 1e3)
                .collect();
            Ok(ErrorRow {
                euler_step_periods: k,
                errors: signed.iter().map(|e| e.abs()).collect(),
                signed,
                rhs_evals: series.rhs_eval_count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ErrorTable {
        method,
        nu,
        checkpoint_periods,
        period,
        checkpoint_time: t_check,
        reference: v_ref,
        reference_rhs_evals: reference.rhs_eval_count(),
        rows,
    })
}
