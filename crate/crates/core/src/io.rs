//! CSV persistence. Every writer can prefix a `# manifest: <path>` comment line;
//! readers skip `#` lines. Floats use the shortest representation that round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::classical::Orbit;
use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, WaveFunction};
use crate::observables::{TimeSeries, WignerGrid};
use crate::spectral::Spectrum;

fn open_writer(path: &Path, manifest: Option<&str>) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = BufWriter::new(File::create(path)?);
    if let Some(m) = manifest {
        writeln!(out, "# manifest: {m}")?;
    }
    Ok(csv::Writer::from_writer(out))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn parse_f64(field: &str, path: &Path) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Io(format!("{}: cannot parse '{field}' as a number", path.display())))
}

/// Generic table with a header row.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
    manifest: Option<&str>,
) -> Result<()> {
    let mut w = open_writer(path, manifest)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Shape(format!(
                "row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `x,re,im`.
pub fn write_wavefunction(path: &Path, psi: &WaveFunction, manifest: Option<&str>) -> Result<()> {
    let mut w = open_writer(path, manifest)?;
    w.write_record(["x", "re", "im"])?;
    let grid = psi.grid();
    for (j, a) in psi.amps().iter().enumerate() {
        w.write_record([grid.x(j).to_string(), a.re.to_string(), a.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,re,im` file; the grid is rebuilt from the first sample and the spacing.
pub fn read_wavefunction(path: &Path) -> Result<WaveFunction> {
    let mut xs = Vec::new();
    let mut amps = Vec::new();
    for record in reader(path)?.records() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::Io(format!("{}: expected x,re,im rows", path.display())));
        }
        xs.push(parse_f64(&record[0], path)?);
        amps.push(Complex64::new(
            parse_f64(&record[1], path)?,
            parse_f64(&record[2], path)?,
        ));
    }
    if xs.len() < 2 {
        return Err(Error::Io(format!("{}: too few samples", path.display())));
    }
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let grid = SpatialGrid::with_bounds(n, xs[0], xs[0] + n as f64 * dx)?;
    WaveFunction::from_amplitudes(grid, amps)
}

/// `orbit_id,step,x,p`.
pub fn write_orbits(path: &Path, orbits: &[Orbit], manifest: Option<&str>) -> Result<()> {
    let mut w = open_writer(path, manifest)?;
    w.write_record(["orbit_id", "step", "x", "p"])?;
    for (id, orbit) in orbits.iter().enumerate() {
        for (step, pt) in orbit.points.iter().enumerate() {
            w.write_record([
                id.to_string(),
                step.to_string(),
                pt.x.to_string(),
                pt.p.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `kick,value`.
pub fn write_series(path: &Path, series: &TimeSeries, manifest: Option<&str>) -> Result<()> {
    let mut w = open_writer(path, manifest)?;
    w.write_record(["kick", "value"])?;
    for (kick, v) in series.points() {
        w.write_record([kick.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `kick,value` file; kicks must be consecutive.
pub fn read_series(path: &Path, label: &str) -> Result<TimeSeries> {
    let mut start = None;
    let mut values = Vec::new();
    for record in reader(path)?.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::Io(format!("{}: expected kick,value rows", path.display())));
        }
        let kick: usize = record[0]
            .parse()
            .map_err(|_| Error::Io(format!("{}: bad kick '{}'", path.display(), &record[0])))?;
        let first = *start.get_or_insert(kick);
        if kick != first + values.len() {
            return Err(Error::Io(format!(
                "{}: kicks are not consecutive at {kick}",
                path.display()
            )));
        }
        values.push(parse_f64(&record[1], path)?);
    }
    Ok(TimeSeries::from_values(label, start.unwrap_or(0), values))
}

/// `nu,magnitude`.
pub fn write_spectrum(path: &Path, spec: &Spectrum, manifest: Option<&str>) -> Result<()> {
    let mut w = open_writer(path, manifest)?;
    w.write_record(["nu", "magnitude"])?;
    for (nu, m) in spec.frequencies.iter().zip(&spec.magnitudes) {
        w.write_record([nu.to_string(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rectangular region and sampling stride for Wigner snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerView {
    pub stride: usize,
    pub x_range: Option<(f64, f64)>,
    pub p_range: Option<(f64, f64)>,
}

impl Default for WignerView {
    fn default() -> Self {
        Self {
            stride: 1,
            x_range: None,
            p_range: None,
        }
    }
}

fn in_range(v: f64, range: Option<(f64, f64)>) -> bool {
    range.is_none_or(|(lo, hi)| v >= lo && v <= hi)
}

/// `x,p,w`, row-major in `x`.
pub fn write_wigner(
    path: &Path,
    wigner: &WignerGrid,
    view: &WignerView,
    manifest: Option<&str>,
) -> Result<()> {
    if view.stride == 0 {
        return Err(Error::Config("Wigner stride must be at least 1".into()));
    }
    let mut w = open_writer(path, manifest)?;
    w.write_record(["x", "p", "w"])?;
    let xs = wigner.xs();
    let ps = wigner.ps();
    for (j, &x) in xs.iter().enumerate().step_by(view.stride) {
        if !in_range(x, view.x_range) {
            continue;
        }
        let row = wigner.row(j);
        for (l, &p) in ps.iter().enumerate().step_by(view.stride) {
            if !in_range(p, view.p_range) {
                continue;
            }
            w.write_record([x.to_string(), p.to_string(), row[l].to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
