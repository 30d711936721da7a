use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use piv_core::painleve::PivParams;
use piv_core::{Complex64, Grid, GridFunction};
use serde::Serialize;

use crate::{CliError, Format};

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Output(format!("cannot write {}: {e}", path.display()))
}

/// 17 significant digits: enough to reproduce every f64 exactly.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sidecar listing masked grid points, one `x` per line.
pub fn mask_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".mask");
    PathBuf::from(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_error(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(w).map_err(io_error(path))?;
    w.flush().map_err(io_error(path))
}

#[derive(Serialize)]
struct GJson<'a> {
    params: &'a PivParams,
    x: Vec<f64>,
    re_g: Vec<f64>,
    im_g: Vec<f64>,
    masked: Vec<f64>,
}

/// Writes `g`, omitting masked points; CSV output also gets a `.mask` sidecar.
pub fn write_g(
    path: &Path,
    format: Format,
    grid: Grid,
    values: &[Option<Complex64>],
    params: &PivParams,
) -> Result<(), CliError> {
    let masked: Vec<f64> = (0..grid.n).filter(|&i| values[i].is_none()).map(|i| grid.x(i)).collect();
    let present = || (0..grid.n).filter_map(|i| Some((grid.x(i), values[i]?)));
    match format {
        Format::Json => write_json(
            path,
            &GJson {
                params,
                x: present().map(|(x, _)| x).collect(),
                re_g: present().map(|(_, g)| g.re).collect(),
                im_g: present().map(|(_, g)| g.im).collect(),
                masked,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
            w.write_record(["x", "re_g", "im_g"]).map_err(csv_error(path))?;
            for (x, g) in present() {
                w.write_record([fmt(x), fmt(g.re), fmt(g.im)]).map_err(csv_error(path))?;
            }
            w.flush().map_err(io_error(path))?;
            let sidecar = mask_path(path);
            let mut m = BufWriter::new(File::create(&sidecar).map_err(io_error(&sidecar))?);
            for x in masked {
                writeln!(m, "{}", fmt(x)).map_err(io_error(&sidecar))?;
            }
            m.flush().map_err(io_error(&sidecar))
        }
    }
}

#[derive(Serialize)]
struct StateJson<'a> {
    label: &'a str,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize)]
struct StatesJson<'a> {
    x: Vec<f64>,
    states: Vec<StateJson<'a>>,
}

/// Writes sampled states side by side: `x,re_<label>,im_<label>,…`.
pub fn write_states(path: &Path, format: Format, grid: Grid, states: &[GridFunction]) -> Result<(), CliError> {
    let label = |i: usize, s: &GridFunction| s.label.clone().unwrap_or_else(|| format!("psi{}", i + 1));
    match format {
        Format::Json => write_json(
            path,
            &StatesJson {
                x: grid.points().collect(),
                states: states
                    .iter()
                    .map(|s| StateJson { label: s.label.as_deref().unwrap_or(""), re: s.real_parts(), im: s.imag_parts() })
                    .collect(),
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
            let mut header = vec!["x".to_string()];
            for (i, s) in states.iter().enumerate() {
                let l = label(i, s);
                header.push(format!("re_{l}"));
                header.push(format!("im_{l}"));
            }
            w.write_record(&header).map_err(csv_error(path))?;
            for i in 0..grid.n {
                let mut row = vec![fmt(grid.x(i))];
                for s in states {
                    row.push(fmt(s.samples[i].re));
                    row.push(fmt(s.samples[i].im));
                }
                w.write_record(&row).map_err(csv_error(path))?;
            }
            w.flush().map_err(io_error(path))
        }
    }
}
