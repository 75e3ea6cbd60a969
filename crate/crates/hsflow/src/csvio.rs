//! Deterministic CSV output (RFC 4180: CRLF records, '.' decimal separator).
//! Floats are written with 17 significant digits so they round-trip exactly.

use crate::energy::DissipationAtom;
use crate::metric::EnergyAtom;
use crate::plfunc::PiecewiseLinearFn;
use std::fs;
use std::io;
use std::path::Path;

pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.join(","));
        out.push_str("\r\n");
    }
    fs::write(path, out)
}

/// Breakpoint samples (x, u) of a piecewise-linear function; together with
/// the constant tails this is the complete function.
pub fn write_function_csv(path: &Path, f: &PiecewiseLinearFn) -> io::Result<()> {
    let rows: Vec<Vec<String>> = f
        .breakpoints()
        .iter()
        .zip(f.values())
        .map(|(x, u)| vec![format_float(*x), format_float(*u)])
        .collect();
    write_csv(path, &["x", "u"], &rows)
}

pub fn write_atoms_csv(path: &Path, atoms: &[DissipationAtom]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = atoms
        .iter()
        .map(|a| {
            vec![
                format_float(a.epoch),
                format_float(a.location),
                format_float(a.mass),
            ]
        })
        .collect();
    write_csv(path, &["epoch", "location", "mass"], &rows)
}

pub fn write_energy_atoms_csv(path: &Path, atoms: &[EnergyAtom]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = atoms
        .iter()
        .map(|a| {
            vec![
                format_float(a.x),
                format_float(a.u),
                format_float(a.w),
                format_float(a.mass),
            ]
        })
        .collect();
    write_csv(path, &["x", "u", "w", "mass"], &rows)
}

/// Right-continuous step curve rows (t, value).
pub fn write_curve_csv(path: &Path, name: &str, rows: &[(f64, f64)]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(t, v)| vec![format_float(*t), format_float(*v)])
        .collect();
    write_csv(path, &["t", name], &rows)
}
