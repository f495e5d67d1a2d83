//! OBJ meshes and CSV residual tables.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::SampledField;
use crate::quat::ImPoint;
use crate::report::ResidualReport;

/// Writes `v x y z` lines in row-major node order with 17 significant
/// digits, then one quad `f a b c d` per grid cell.
pub fn write_obj<W: Write>(mut out: W, field: &SampledField<ImPoint>) -> Result<()> {
    let grid = field.grid;
    for x in &field.values {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", x.x1, x.x2, x.x3)?;
    }
    for q in 0..grid.nv.saturating_sub(1) {
        for p in 0..grid.nu.saturating_sub(1) {
            let a = grid.index(p, q) + 1;
            let b = grid.index(p + 1, q) + 1;
            let c = grid.index(p + 1, q + 1) + 1;
            let d = grid.index(p, q + 1) + 1;
            writeln!(out, "f {a} {b} {c} {d}")?;
        }
    }
    Ok(())
}

pub fn export_obj(field: &SampledField<ImPoint>, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_obj(&mut buf, field)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Vertices and faces of an OBJ document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjMesh {
    pub vertices: Vec<ImPoint>,
    pub faces: Vec<Vec<usize>>,
}

pub fn read_obj<R: BufRead>(input: R) -> Result<ObjMesh> {
    let mut mesh = ObjMesh::default();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let bad = |msg: &str| Error::InvalidParameter(format!("obj line {}: {msg}", k + 1));
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c = parts
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| bad(&e.to_string()))?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                mesh.vertices.push(ImPoint::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let f = parts
                    .map(str::parse::<usize>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| bad(&e.to_string()))?;
                mesh.faces.push(f);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

pub const REPORT_CSV_HEADER: &str = "name,class,max,mean,spacing,order_estimate,tolerance,pass";

/// A report judged against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Judged {
    pub report: ResidualReport,
    pub tolerance: f64,
}

impl Judged {
    /// NaN never passes.
    pub fn pass(&self) -> bool {
        self.report.max <= self.tolerance
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_report_csv<W: Write>(mut out: W, rows: &[Judged]) -> Result<()> {
    writeln!(out, "{REPORT_CSV_HEADER}")?;
    for row in rows {
        let r = &row.report;
        let order = r
            .order_estimate
            .map(|o| format!("{o:.4}"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{:.6e},{:.6e},{},{},{:e},{}",
            csv_field(&r.name),
            r.class.name(),
            r.max,
            r.mean,
            r.spacing,
            order,
            row.tolerance,
            row.pass()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_map, ConformalGrid};
    use crate::report::ResidualClass;

    #[test]
    fn two_by_two_plane() {
        let grid = ConformalGrid {
            u0: 0.0,
            v0: 0.0,
            du: 1.0,
            dv: 1.0,
            nu: 2,
            nv: 2,
        };
        let plane = sample_map(grid, |u, v| ImPoint::new(u, v, 0.0));
        let mut buf = Vec::new();
        write_obj(&mut buf, &plane).unwrap();
        let mesh = read_obj(buf.as_slice()).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.faces, vec![vec![1, 2, 4, 3]]);
    }

    #[test]
    fn cylinder_counts_and_round_trip() {
        let grid = ConformalGrid::new(0.0, 0.0, 0.1, 0.1, 64, 64).unwrap();
        let cyl = sample_map(grid, |u, v| ImPoint::new(u.cos(), u.sin(), v / 3.0));
        let mut buf = Vec::new();
        write_obj(&mut buf, &cyl).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let mesh = read_obj(text.as_bytes()).unwrap();
        assert_eq!(mesh.vertices.len(), 4096);
        assert_eq!(mesh.faces.len(), 3969);
        assert_eq!(mesh.vertices, cyl.values);
    }

    #[test]
    fn csv_rows() {
        let mut r = ResidualReport::single("a, b", ResidualClass::Fd, 0.05, 2e-3);
        r.order_estimate = Some(2.0);
        let rows = [
            Judged {
                report: r,
                tolerance: 1e-2,
            },
            Judged {
                report: ResidualReport::single("nan", ResidualClass::Ode, 0.05, f64::NAN),
                tolerance: 1.0,
            },
        ];
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert!(lines[1].starts_with("\"a, b\",fd,2.000000e-3"));
        assert!(lines[1].ends_with(",2.0000,1e-2,true"));
        assert!(lines[2].ends_with("false"));
    }
}
