//! Output writers (CSV with provenance header, legacy VTK, JSON) and the
//! residual-state file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coupling::ResidualState;
use crate::mech::Sym;
use crate::mesh::{ElementKind, Mesh2D};
use crate::{Error, Result};

/// SHA-256 of the configuration text, hex encoded.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A CSV column: name and unit.
#[derive(Debug, Clone, Copy)]
pub struct Column<'a> {
    pub name: &'a str,
    pub unit: &'a str,
}

pub const fn col<'a>(name: &'a str, unit: &'a str) -> Column<'a> {
    Column { name, unit }
}

/// Writes `# key: value` lines, a `# units:` line, the header row and the
/// rows. Floats use the shortest round-trip representation.
pub fn write_csv(path: &Path, title: &str, hash: &str, columns: &[Column], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "# config_hash: {hash}");
    let units: Vec<String> = columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
    let _ = writeln!(out, "# units: {}", units.join(", "));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns.iter().map(|c| c.name))?;
    for r in rows {
        if r.len() != columns.len() {
            return Err(Error::Invalid(format!("row has {} values for {} columns", r.len(), columns.len())));
        }
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    f.write_all(&body)?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] (comment lines skipped).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let names = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("{}: `{s}`: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((names, rows))
}

/// Config hash recorded in a CSV header, if present.
pub fn read_csv_hash(path: &Path) -> Result<Option<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().take_while(|l| l.starts_with('#')).find_map(|l| {
        l.strip_prefix("# config_hash: ").map(|h| h.trim().to_string())
    }))
}

const RESIDUAL_COLUMNS: [Column<'static>; 15] = [
    col("element", "-"),
    col("gauss", "-"),
    col("eps_e_xx", "-"),
    col("eps_e_yy", "-"),
    col("eps_e_zz", "-"),
    col("eps_e_xy", "-"),
    col("eps_p_xx", "-"),
    col("eps_p_yy", "-"),
    col("eps_p_zz", "-"),
    col("eps_p_xy", "-"),
    col("eps_bar", "-"),
    col("sigma_xx", "MPa"),
    col("sigma_yy", "MPa"),
    col("sigma_zz", "MPa"),
    col("sigma_xy", "MPa"),
];

/// One row per quadrature point keyed by (element, gauss index); tensor
/// shear components are tensorial.
pub fn write_residual_state(path: &Path, mesh: &Mesh2D, state: &ResidualState, hash: &str) -> Result<()> {
    if state.len() != mesh.quad_point_count() {
        return Err(Error::Invalid("residual state does not match the mesh".into()));
    }
    let mut rows = Vec::with_capacity(state.len());
    for e in 0..mesh.element_count() {
        for (g, k) in mesh.quad_points(e).enumerate() {
            let mut r = vec![e as f64, g as f64];
            r.extend_from_slice(&state.eps_e[k].0);
            r.extend_from_slice(&state.eps_p[k].0);
            r.push(state.eps_bar[k]);
            r.extend_from_slice(&state.sigma[k].0);
            rows.push(r);
        }
    }
    write_csv(path, "weldfrac residual state", hash, &RESIDUAL_COLUMNS, &rows)
}

pub fn read_residual_state(path: &Path, mesh: &Mesh2D) -> Result<ResidualState> {
    let (names, rows) = read_csv(path)?;
    let expected: Vec<&str> = RESIDUAL_COLUMNS.iter().map(|c| c.name).collect();
    if names != expected {
        return Err(Error::Config(format!("{} is not a residual-state file", path.display())));
    }
    let nq = mesh.quad_point_count();
    let mut s = ResidualState {
        eps_e: vec![Sym::ZERO; nq],
        eps_p: vec![Sym::ZERO; nq],
        eps_bar: vec![0.0; nq],
        sigma: vec![Sym::ZERO; nq],
    };
    let mut seen = vec![false; nq];
    for r in rows {
        let (e, g) = (r[0] as usize, r[1] as usize);
        if e >= mesh.element_count() || g >= mesh.quad_points(e).len() {
            return Err(Error::Config(format!("residual state point ({e}, {g}) not in mesh")));
        }
        let k = mesh.quad_points(e).start + g;
        let t = |o: usize| Sym([r[o], r[o + 1], r[o + 2], r[o + 3]]);
        s.eps_e[k] = t(2);
        s.eps_p[k] = t(6);
        s.eps_bar[k] = r[10];
        s.sigma[k] = t(11);
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|&v| !v) {
        return Err(Error::Config(format!("residual state misses quadrature point {k}")));
    }
    Ok(s)
}

/// Field attached to a VTK file.
pub enum VtkField<'a> {
    PointScalar(&'a str, &'a [f64]),
    PointVector(&'a str, &'a [[f64; 2]]),
    CellScalar(&'a str, &'a [f64]),
}

/// Legacy ASCII VTK (3.0) unstructured grid of the active elements.
pub fn write_vtk(path: &Path, title: &str, mesh: &Mesh2D, fields: &[VtkField]) -> Result<()> {
    let mut s = String::new();
    let active: Vec<usize> = (0..mesh.element_count()).filter(|&e| mesh.is_active(e)).collect();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.node_count());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} 0", p[0], p[1]);
    }
    let size: usize = active.iter().map(|&e| 1 + mesh.elements[e].nodes().len()).sum();
    let _ = writeln!(s, "CELLS {} {}", active.len(), size);
    for &e in &active {
        let n = mesh.elements[e].nodes();
        let ids: Vec<String> = n.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{} {}", n.len(), ids.join(" "));
    }
    let _ = writeln!(s, "CELL_TYPES {}", active.len());
    for &e in &active {
        let t = match mesh.elements[e].kind {
            ElementKind::Tri3 => 5,
            ElementKind::Quad4 => 9,
        };
        let _ = writeln!(s, "{t}");
    }
    let point: Vec<&VtkField> = fields.iter().filter(|f| !matches!(f, VtkField::CellScalar(..))).collect();
    let cell: Vec<&VtkField> = fields.iter().filter(|f| matches!(f, VtkField::CellScalar(..))).collect();
    if !point.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.node_count());
        for f in point {
            match f {
                VtkField::PointScalar(name, v) => {
                    check_len(name, v.len(), mesh.node_count())?;
                    let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                    for x in v.iter() {
                        let _ = writeln!(s, "{x}");
                    }
                }
                VtkField::PointVector(name, v) => {
                    check_len(name, v.len(), mesh.node_count())?;
                    let _ = writeln!(s, "VECTORS {name} double");
                    for x in v.iter() {
                        let _ = writeln!(s, "{} {} 0", x[0], x[1]);
                    }
                }
                VtkField::CellScalar(..) => unreachable!(),
            }
        }
    }
    if !cell.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", active.len());
        for f in cell {
            if let VtkField::CellScalar(name, v) = f {
                check_len(name, v.len(), mesh.element_count())?;
                let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for &e in &active {
                    let _ = writeln!(s, "{}", v[e]);
                }
            }
        }
    }
    fs::write(path, s)?;
    Ok(())
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Invalid(format!("field {name} has {got} values, expected {want}")));
    }
    Ok(())
}

/// Element averages of a quadrature-point field.
pub fn element_average(mesh: &Mesh2D, qp: &[f64]) -> Vec<f64> {
    (0..mesh.element_count())
        .map(|e| {
            let r = mesh.quad_points(e);
            let n = r.len() as f64;
            r.map(|k| qp[k]).sum::<f64>() / n
        })
        .collect()
}

/// Pretty JSON with the config hash alongside the payload.
pub fn write_json<T: Serialize>(path: &Path, hash: &str, value: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        config_hash: &'a str,
        #[serde(flatten)]
        value: &'a T,
    }
    let text = serde_json::to_string_pretty(&Wrapped { config_hash: hash, value })?;
    fs::write(path, text + "\n")?;
    Ok(())
}
