//! Experiment runner: direct reference runs, checkpoint error tables, cost
//! accounting, figure data and CSV output.

mod config;
mod cost;
mod csv;
mod figures;
mod reference;
mod table;

pub use config::{Preset, Settings};
pub use cost::{cost_report, decay_horizon, CostReport, SpeedupRun, SpeedupScenario};
pub use csv::{export_csv, CsvExport, CsvTable};
pub use figures::{figure_data, Figure, FigureData, REFERENCE_STEPS_PER_PERIOD};
pub use reference::run_reference;
pub use table::{make_error_table, ErrorRow, ErrorTable, TABLE_STEPS};
