//! Writes the data behind every figure into a directory (default
//! `figures/`). The long slow-observable runs take a few seconds each.

use std::path::PathBuf;

use lattice_multiscale::harness::{export_csv, figure_data, Figure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("figures"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    for fig in Figure::ALL {
        let data = figure_data(fig, &fig.defaults())?;
        let path = dir.join(format!("{fig}.csv"));
        export_csv(&data, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
