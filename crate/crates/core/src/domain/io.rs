//! Field serialization: a JSON grid header plus CSV rows
//! `i[,j],value`, one per cell, values printed with 17 significant digits.

use std::io::{BufRead, Write};

use super::{DomainError, Field, Grid, GridHeader};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(field: &Field, mut out: W) -> std::io::Result<()> {
    let grid = field.grid();
    if grid.dim() == 1 {
        writeln!(out, "i,value")?;
    } else {
        writeln!(out, "i,j,value")?;
    }
    for (idx, &v) in field.values().iter().enumerate() {
        let [i, j] = grid.unflat(idx);
        if grid.dim() == 1 {
            writeln!(out, "{i},{}", fmt_f64(v))?;
        } else {
            writeln!(out, "{i},{j},{}", fmt_f64(v))?;
        }
    }
    Ok(())
}

pub fn header_json(grid: &Grid) -> String {
    serde_json::to_string(&grid.header()).expect("grid header serializes")
}

/// Reads a field back from its header and CSV body. Rows may appear in any
/// order; every cell must be present exactly once.
pub fn read_csv<R: BufRead>(header: &GridHeader, input: R) -> Result<Field, DomainError> {
    let grid = Grid::from_header(header)?;
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| DomainError::Parse(e.to_string()))?;
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != grid.dim() + 1 {
            return Err(DomainError::Parse(format!("line {}: expected {} columns", lineno + 1, grid.dim() + 1)));
        }
        let parse_idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| DomainError::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let i = parse_idx(parts[0])?;
        let j = if grid.dim() == 2 { parse_idx(parts[1])? } else { 0 };
        if i >= grid.cells_along(0) || j >= grid.cells_along(1) {
            return Err(DomainError::Parse(format!("line {}: cell index out of range", lineno + 1)));
        }
        let v = parts[grid.dim()]
            .parse::<f64>()
            .map_err(|e| DomainError::Parse(format!("line {}: {e}", lineno + 1)))?;
        let k = grid.flat(i, j);
        if seen[k] {
            return Err(DomainError::Parse(format!("line {}: duplicate cell", lineno + 1)));
        }
        seen[k] = true;
        values[k] = v;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(DomainError::Parse(format!("cell {missing} missing")));
    }
    Field::new(grid, values)
}
