use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lattice_multiscale::dynamics::{parse_state, Field, State};
use lattice_multiscale::error::{Error, ErrorClass, Result};
use lattice_multiscale::harness::{
    export_csv, figure_data, make_error_table, CsvExport, CsvTable, Figure, Preset, Settings,
    SpeedupScenario, TABLE_STEPS,
};
use lattice_multiscale::integrate::{integrate_record, linear_period_guess, PeriodSearch};
use lattice_multiscale::invariants::{observable_vector, product_invariants};
use lattice_multiscale::multiscale::{run_multiscale, Method};

/// Fast-slow KdV-Burgers lattice: simulation, slow observables and
/// projective integration.
#[derive(Parser)]
#[command(name = "lattice-multiscale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Initial state as a comma list, e.g. 1,1,1,1,4,1
    #[arg(long, global = true, value_name = "U1,U2,...")]
    init: Option<String>,
    /// Lattice size (even, >= 6)
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// RK4 step
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Run length in fast periods
    #[arg(long, global = true)]
    periods: Option<usize>,
    /// Projective Euler step in fast periods
    #[arg(long = "euler-step", global = true)]
    euler_step: Option<usize>,
    /// Fast periods averaged per Young-measure step
    #[arg(long = "avg-periods", global = true)]
    avg_periods: Option<usize>,
    /// Samples per fast period
    #[arg(long = "steps-per-period", global = true)]
    steps_per_period: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file with the same keys as the long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory of the fast (nu = 0) system as CSV
    SimulateFast,
    /// Trajectory of the full system as CSV
    SimulateFull,
    /// Nearest-return fast period
    Period,
    /// Slow observables and product invariants of the initial state
    Observables,
    /// Young-measure projective run as CSV
    ProjectYm,
    /// Equation-free projective run as CSV
    ProjectEf,
    /// Young-measure checkpoint error table
    Table1,
    /// Equation-free checkpoint error table
    Table2,
    /// Direct vs projective cost at nu and nu/10
    Speedup,
    /// Data behind one figure as CSV
    Export {
        /// torus, u1-signal, local-invariant, drift-signal, drift-average,
        /// slow-ym, tori-decay, v3-early or slow-ef
        figure: String,
    },
}

impl Flags {
    fn settings(&self) -> Result<Settings> {
        Ok(Settings {
            init: self.init.as_deref().map(parse_state).transpose()?.map(State::into_vec),
            n: self.n,
            nu: self.nu,
            dt: self.dt,
            periods: self.periods,
            euler_step: self.euler_step,
            avg_periods: self.avg_periods,
            steps_per_period: self.steps_per_period,
            out: self.out.clone(),
        })
    }
}

fn emit<T: CsvExport + ?Sized>(item: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => export_csv(item, p),
        None => {
            let mut lock = io::stdout().lock();
            quiet_pipe(item.write_csv(&mut lock).and_then(|_| lock.flush()).map_err(stdout_err))
        }
    }
}

fn say(text: &str) -> Result<()> {
    quiet_pipe(io::stdout().write_all(text.as_bytes()).map_err(stdout_err))
}

fn stdout_err(source: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// A closed pipe (`| head`) is the reader's choice, not a failure.
fn quiet_pipe(r: Result<()>) -> Result<()> {
    match r {
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

/// Period used as the time unit; a fixed point falls back to the
/// small-oscillation period about its mean.
fn time_unit(state: &State) -> Result<f64> {
    match PeriodSearch::for_state(state).run(state) {
        Ok(est) => Ok(est.period),
        Err(Error::FixedPoint { .. }) => Ok(linear_period_guess(state)),
        Err(e) => Err(e),
    }
}

fn run(cli: Cli) -> Result<()> {
    let preset = match &cli.command {
        Command::SimulateFast | Command::Period | Command::Observables => Some(Preset::FigTorus),
        Command::SimulateFull | Command::ProjectYm | Command::ProjectEf => Some(Preset::FigDecay),
        Command::Table1 => Some(Preset::Table1),
        Command::Table2 => Some(Preset::Table2),
        Command::Speedup => Some(Preset::Speedup),
        Command::Export { .. } => None,
    };
    let mut base = match (&cli.command, preset) {
        (Command::Export { figure }, _) => figure.parse::<Figure>()?.defaults(),
        (_, Some(p)) => p.settings(),
        (_, None) => Settings::default(),
    };
    if let Some(path) = &cli.flags.config {
        base = base.merged(Settings::from_file(path)?);
    }
    let s = base.merged(cli.flags.settings()?);
    let out = s.out.clone();

    match cli.command {
        Command::SimulateFast | Command::SimulateFull => {
            let state = s.state()?;
            let field = match cli.command {
                Command::SimulateFast => Field::Fast,
                _ => Field::Full { nu: s.nu_or(1e-4) },
            };
            let dt = s.dt.unwrap_or(1e-3);
            let unit = time_unit(&state)?;
            // full runs are long; keep about 50 rows per period
            let every = match field {
                Field::Fast => 1,
                Field::Full { .. } => ((unit / (50.0 * dt)).round() as usize).max(1),
            };
            let tr = integrate_record(field, &state, s.periods.unwrap_or(10) as f64 * unit, dt, every)?;
            emit(&tr, out.as_deref())
        }
        Command::Period => {
            let state = s.state()?;
            let mut search = PeriodSearch::for_state(&state);
            if let Some(dt) = s.dt {
                search.dt = dt;
            }
            let est = search.run(&state)?;
            say(&format!(
                "period {:.6}\nreturn_distance {:.3e}\nconfident {}\n600 periods {:.2}\n",
                est.period,
                est.return_distance,
                est.confident,
                600.0 * est.period
            ))
        }
        Command::Observables => {
            let state = s.state()?;
            let v = observable_vector(&state);
            let p = product_invariants(&state);
            let mut text = String::new();
            for (j, x) in v.as_slice().iter().enumerate() {
                text.push_str(&format!("v_{} {x:.16e}\n", j + 1));
            }
            text.push_str(&format!(
                "product {:.16e}\nproduct_even_sites {:.16e}\nproduct_odd_sites {:.16e}\n",
                p.all, p.even, p.odd
            ));
            say(&text)
        }
        Command::ProjectYm | Command::ProjectEf => {
            let method = match cli.command {
                Command::ProjectYm => Method::YoungMeasure,
                _ => Method::EquationFree,
            };
            let series = run_multiscale(method, &s.state()?, &s.projective()?, s.periods.unwrap_or(600))?;
            emit(&series, out.as_deref())
        }
        Command::Table1 | Command::Table2 => {
            let method = match cli.command {
                Command::Table1 => Method::YoungMeasure,
                _ => Method::EquationFree,
            };
            let cfg = s.projective()?;
            let steps = s.euler_step.map_or(TABLE_STEPS.to_vec(), |k| vec![k]);
            let t = make_error_table(method, &s.state()?, cfg.nu, s.periods.unwrap_or(600), &steps, &cfg)?;
            say(&t.render())?;
            if let Some(p) = out.as_deref() {
                let mut csv = CsvTable::new(std::iter::once("euler_step_periods".to_string()).chain(t.columns()));
                for r in &t.rows {
                    csv.push(std::iter::once(r.euler_step_periods as f64).chain(r.errors.iter().copied()).collect());
                }
                export_csv(&csv, p)?;
            }
            Ok(())
        }
        Command::Speedup => {
            let nu = s.nu_or(1e-3);
            let mut text = String::new();
            for nu in [nu, nu / 10.0] {
                let mut sc = SpeedupScenario::worked_example(nu);
                sc.state0 = s.state()?;
                sc.steps_per_period = s.steps_per_period.unwrap_or(sc.steps_per_period);
                sc.averaging_periods = s.avg_periods.unwrap_or(sc.averaging_periods);
                text.push_str(&sc.run()?.render());
            }
            say(&text)
        }
        Command::Export { figure } => {
            let data = figure_data(figure.parse()?, &s)?;
            emit(&data, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::InvalidInput => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Io => 4,
            })
        }
    }
}
