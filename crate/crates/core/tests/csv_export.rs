use sha2::{Digest, Sha256};

use lattice_multiscale::dynamics::{Field, State};
use lattice_multiscale::error::Error;
use lattice_multiscale::harness::{export_csv, figure_data, CsvExport, Figure, Settings};
use lattice_multiscale::integrate::integrate_record;
use lattice_multiscale::multiscale::{run_multiscale, Method, ProjectiveConfig};

fn digest(bytes: &[u8]) -> Vec<u8> {
    Sha256::digest(bytes).to_vec()
}

fn quick(fig: Figure) -> Settings {
    fig.defaults().merged(Settings {
        periods: Some(if fig.defaults().euler_step.is_some() { 12 } else { 2 }),
        dt: Some(0.01),
        ..Settings::default()
    })
}

#[test]
fn repeated_exports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for fig in Figure::ALL {
        let s = quick(fig);
        let a = dir.path().join(format!("{fig}-a.csv"));
        let b = dir.path().join(format!("{fig}-b.csv"));
        export_csv(&figure_data(fig, &s).unwrap(), &a).unwrap();
        export_csv(&figure_data(fig, &s).unwrap(), &b).unwrap();
        let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        assert!(!a.is_empty(), "{fig}");
        assert_eq!(digest(&a), digest(&b), "{fig}");
    }
}

#[test]
fn trajectory_csv_round_trips() {
    let s = State::new(vec![1., 1., 1., 3., 2., 1.]).unwrap();
    let tr = integrate_record(Field::Fast, &s, 1.0, 0.01, 10).unwrap();
    let text = tr.to_csv_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,U_1,U_2,U_3,U_4,U_5,U_6"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), tr.len());
    for ((row, t), u) in rows.iter().zip(&tr.times).zip(&tr.states) {
        assert_eq!(row[0], *t);
        assert_eq!(&row[1..], u.as_slice());
    }
}

#[test]
fn series_csv_carries_the_method() {
    let s = State::new(vec![1., 1., 1., 1., 4., 1.]).unwrap();
    let ms = run_multiscale(Method::EquationFree, &s, &ProjectiveConfig::default(), 6).unwrap();
    let text = ms.to_csv_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,v_1,v_2,v_3,v_4,method"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), ms.len());
    assert!(body.iter().all(|l| l.ends_with(",equation_free")));
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    let data = figure_data(Figure::Torus, &quick(Figure::Torus)).unwrap();
    match export_csv(&data, &path) {
        Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
        other => panic!("expected an io error, got {other:?}"),
    }
}
