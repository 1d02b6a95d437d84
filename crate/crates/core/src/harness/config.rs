//! Experiment settings: presets, flat `key = value` config files and
//! command-line overrides, merged in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::{parse_state, State};
use crate::error::{Error, Result};
use crate::multiscale::ProjectiveConfig;

/// Named experiment defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Fast flow from `[1,1,1,3,2,1]`.
    FigTorus,
    /// Full system from `[1,1,1,1,4,1]` over 3000 periods.
    FigDecay,
    Table1,
    Table2,
    Speedup,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::FigTorus,
        Preset::FigDecay,
        Preset::Table1,
        Preset::Table2,
        Preset::Speedup,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FigTorus => "fig-torus",
            Preset::FigDecay => "fig-decay",
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Speedup => "speedup",
        }
    }

    pub fn settings(&self) -> Settings {
        let base = Settings {
            avg_periods: Some(1),
            steps_per_period: Some(50),
            ..Settings::default()
        };
        match self {
            Preset::FigTorus => Settings {
                init: Some(vec![1., 1., 1., 3., 2., 1.]),
                nu: Some(0.0),
                dt: Some(1e-3),
                periods: Some(10),
                ..base
            },
            Preset::FigDecay => Settings {
                init: Some(vec![1., 1., 1., 1., 4., 1.]),
                nu: Some(1e-4),
                periods: Some(3000),
                euler_step: Some(3),
                ..base
            },
            Preset::Table1 | Preset::Table2 => Settings {
                init: Some(vec![1., 1., 1., 1., 4., 1.]),
                nu: Some(1e-4),
                periods: Some(600),
                ..base
            },
            Preset::Speedup => Settings {
                init: Some(vec![1., 1., 1., 3., 2., 1.]),
                nu: Some(1e-3),
                ..base
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

/// Every knob is optional so that layers can be merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub init: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub nu: Option<f64>,
    pub dt: Option<f64>,
    pub periods: Option<usize>,
    pub euler_step: Option<usize>,
    pub avg_periods: Option<usize>,
    pub steps_per_period: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: bad value `{value}` for `{key}`")))
}

impl Settings {
    /// Parses `key = value` lines. Keys mirror the long flag names; blank
    /// lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let ln = i + 1;
            match key {
                "init" => {
                    let st = parse_state(value)
                        .map_err(|e| Error::Config(format!("line {ln}: init: {e}")))?;
                    s.init = Some(st.into_vec());
                }
                "n" => s.n = Some(parse_value(key, value, ln)?),
                "nu" => s.nu = Some(parse_value(key, value, ln)?),
                "dt" => s.dt = Some(parse_value(key, value, ln)?),
                "periods" => s.periods = Some(parse_value(key, value, ln)?),
                "euler-step" => s.euler_step = Some(parse_value(key, value, ln)?),
                "avg-periods" => s.avg_periods = Some(parse_value(key, value, ln)?),
                "steps-per-period" => s.steps_per_period = Some(parse_value(key, value, ln)?),
                "out" => s.out = Some(PathBuf::from(value)),
                _ => return Err(Error::Config(format!("line {ln}: unknown key `{key}`"))),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// `self` with every value set in `over` replaced.
    pub fn merged(self, over: Settings) -> Settings {
        Settings {
            init: over.init.or(self.init),
            n: over.n.or(self.n),
            nu: over.nu.or(self.nu),
            dt: over.dt.or(self.dt),
            periods: over.periods.or(self.periods),
            euler_step: over.euler_step.or(self.euler_step),
            avg_periods: over.avg_periods.or(self.avg_periods),
            steps_per_period: over.steps_per_period.or(self.steps_per_period),
            out: over.out.or(self.out),
        }
    }

    /// Initial state from `init`, checked against `n` when both are set. With
    /// only `n`, a unit lattice with a bump of 4 at site `N - 1` (the
    /// `[1,1,1,1,4,1]` shape).
    pub fn state(&self) -> Result<State> {
        match (&self.init, self.n) {
            (Some(u), Some(n)) if u.len() != n => Err(Error::DimensionMismatch {
                expected: n,
                found: u.len(),
            }),
            (Some(u), _) => State::new(u.clone()),
            (None, Some(n)) => {
                crate::dynamics::check_lattice_size(n)?;
                let mut u = vec![1.0; n];
                u[n - 2] = 4.0;
                State::new(u)
            }
            (None, None) => Err(Error::Config("no initial state given".into())),
        }
    }

    pub fn nu_or(&self, default: f64) -> f64 {
        self.nu.unwrap_or(default)
    }

    /// Projective settings with `nu`, averaging, sampling and Euler step
    /// taken from here when set.
    pub fn projective(&self) -> Result<ProjectiveConfig> {
        let d = ProjectiveConfig::default();
        let cfg = ProjectiveConfig {
            averaging_periods: self.avg_periods.unwrap_or(d.averaging_periods),
            steps_per_period: self.steps_per_period.unwrap_or(d.steps_per_period),
            euler_step_periods: self.euler_step.unwrap_or(d.euler_step_periods),
            nu: self.nu.unwrap_or(d.nu),
            ..d
        };
        if cfg.averaging_periods == 0 || cfg.steps_per_period < 2 || cfg.euler_step_periods == 0 {
            return Err(Error::InvalidArgument(
                "avg-periods and euler-step must be >= 1, steps-per-period >= 2".into(),
            ));
        }
        if !(cfg.nu >= 0.0 && cfg.nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu must be >= 0, got {}", cfg.nu)));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let s = Settings::parse(
            "# table run\ninit = 1,1,1,1,4,1\nnu=1e-4\n\neuler-step = 6\nout = t.csv\n",
        )
        .unwrap();
        assert_eq!(s.init.as_deref(), Some(&[1., 1., 1., 1., 4., 1.][..]));
        assert_eq!(s.nu, Some(1e-4));
        assert_eq!(s.euler_step, Some(6));
        assert_eq!(s.out, Some(PathBuf::from("t.csv")));
        assert_eq!(s.periods, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Settings::parse("speed = 3"), Err(Error::Config(_))));
        assert!(matches!(Settings::parse("nu = fast"), Err(Error::Config(_))));
        assert!(matches!(Settings::parse("just words"), Err(Error::Config(_))));
        assert!(matches!(Settings::parse("init = 1,2,3"), Err(Error::Config(_))));
    }

    #[test]
    fn later_layers_win() {
        let file = Settings::parse("nu = 1e-3\nperiods = 20").unwrap();
        let flags = Settings {
            nu: Some(1e-2),
            ..Settings::default()
        };
        let s = Preset::Table1.settings().merged(file).merged(flags);
        assert_eq!(s.nu, Some(1e-2));
        assert_eq!(s.periods, Some(20));
        assert_eq!(s.init.as_deref(), Some(&[1., 1., 1., 1., 4., 1.][..]));
    }

    #[test]
    fn state_from_init_or_size() {
        let s = Settings {
            n: Some(8),
            ..Settings::default()
        };
        assert_eq!(s.state().unwrap().as_slice(), &[1., 1., 1., 1., 1., 1., 4., 1.]);
        let s = Settings {
            init: Some(vec![1.0; 6]),
            n: Some(8),
            ..Settings::default()
        };
        assert!(matches!(s.state(), Err(Error::DimensionMismatch { .. })));
        assert!(Settings::default().state().is_err());
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig-9".parse::<Preset>().is_err());
    }
}
