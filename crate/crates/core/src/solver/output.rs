use super::residual::FieldState;
use super::steady::LogEntry;
use crate::error::{Error, Result};
use crate::euler::{kernels, GasModel};
use crate::mesh::{Mesh2D, Point};
use std::io::Write;

/// Point data ρ, u, v, p, Mach of a flow field.
pub fn flow_point_data(field: &FieldState, gas: &GasModel) -> Vec<(String, Vec<f64>)> {
    let mut cols: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(field.len())).collect();
    for w in &field.w {
        let p = kernels::pressure(w, gas.gamma);
        let (u, v) = (w[1] / w[0], w[2] / w[0]);
        let c = (gas.gamma * p / w[0]).sqrt();
        for (col, x) in cols.iter_mut().zip([w[0], u, v, p, u.hypot(v) / c]) {
            col.push(x);
        }
    }
    ["rho", "u", "v", "p", "Mach"].iter().map(|s| s.to_string()).zip(cols).collect()
}

/// Legacy ASCII VTK unstructured grid with scalar point data.
pub fn write_vtk<W: Write>(mut out: W, mesh: &Mesh2D, title: &str, data: &[(String, Vec<f64>)]) -> Result<()> {
    let n = mesh.n_vertices();
    writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for p in mesh.vertices() {
        writeln!(out, "{:.16e} {:.16e} 0", p[0], p[1])?;
    }
    let nt = mesh.triangles().len();
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    for (name, values) in data {
        if values.len() != n {
            return Err(Error::Structural(format!("point data '{name}' has {} values for {n} vertices", values.len())));
        }
        writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default")?;
        for x in values {
            writeln!(out, "{x:.16e}")?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSample {
    pub s: f64,
    pub point: Point,
    pub values: Vec<f64>,
}

/// Values interpolated (P¹) at `count` equally spaced points of the segment
/// a → b; points outside the mesh are skipped.
pub fn line_probe(mesh: &Mesh2D, data: &[(String, Vec<f64>)], a: Point, b: Point, count: usize) -> Vec<ProbeSample> {
    (0..count)
        .filter_map(|k| {
            let s = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let (t, l) = mesh.locate(p)?;
            let tri = mesh.triangles()[t];
            let values = data.iter().map(|(_, v)| (0..3).map(|i| l[i] * v[tri[i]]).sum()).collect();
            Some(ProbeSample { s, point: p, values })
        })
        .collect()
}

pub fn write_probe_csv<W: Write>(mut out: W, names: &[String], samples: &[ProbeSample]) -> Result<()> {
    write!(out, "s,x,y")?;
    for n in names {
        write!(out, ",{n}")?;
    }
    writeln!(out)?;
    for p in samples {
        write!(out, "{:.10e},{:.10e},{:.10e}", p.s, p.point[0], p.point[1])?;
        for v in &p.values {
            write!(out, ",{v:.10e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(mut out: W, log: &[LogEntry]) -> Result<()> {
    writeln!(out, "step,res_rho,res_mx,res_my,res_e,cfl,linear_iterations")?;
    for e in log {
        let r = e.residual;
        writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            e.step, r[0], r[1], r[2], r[3], e.cfl, e.linear_iterations
        )?;
    }
    Ok(())
}
