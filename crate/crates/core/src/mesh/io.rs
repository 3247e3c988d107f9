//! Plain-text mesh format: a header "nv nt nbe", then nv lines "x y",
//! nt lines "i j k" and nbe lines "i j tag", indices 1-based. Lines
//! starting with '#' are comments.

use super::{BoundaryEdge, BoundaryTag, Mesh2D, Point, RawMesh};
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn write_mesh(mesh: &Mesh2D, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(std::fs::File::create(path)?);
    write_to(mesh, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn write_to<W: Write>(mesh: &Mesh2D, f: &mut W) -> Result<()> {
    writeln!(f, "{} {} {}", mesh.n_vertices(), mesh.triangles().len(), mesh.boundary_edges().len())?;
    for p in mesh.vertices() {
        // 17 significant digits round-trip every f64
        writeln!(f, "{:.16e} {:.16e}", p[0], p[1])?;
    }
    for t in mesh.triangles() {
        writeln!(f, "{} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    for b in mesh.boundary_edges() {
        writeln!(f, "{} {} {}", b.v[0] + 1, b.v[1] + 1, b.tag)?;
    }
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<Mesh2D> {
    read_from(BufReader::new(std::fs::File::open(path)?))
}

pub fn read_from<R: BufRead>(reader: R) -> Result<Mesh2D> {
    let mut lines = reader.lines().enumerate().filter_map(|(k, l)| match l {
        Ok(s) if s.trim_start().starts_with('#') || s.trim().is_empty() => None,
        other => Some((k + 1, other)),
    });
    let mut last_line = 0;
    let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
        match lines.next() {
            Some((k, Ok(s))) => {
                last_line = k;
                Ok((k, s.split_whitespace().map(str::to_owned).collect()))
            }
            Some((k, Err(e))) => Err(Error::Parse { line: k, msg: e.to_string() }),
            None => Err(Error::Parse { line: last_line + 1, msg: format!("unexpected end of file, expected {what}") }),
        }
    };
    fn fields<T: std::str::FromStr>(line: usize, tok: &[String], n: usize, what: &str) -> Result<Vec<T>> {
        if tok.len() != n {
            return Err(Error::Parse { line, msg: format!("expected {n} fields for {what}, found {}", tok.len()) });
        }
        tok.iter()
            .map(|t| t.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("bad {what} field '{t}'") }))
            .collect()
    }
    fn index(line: usize, v: usize, nv: usize) -> Result<usize> {
        if v == 0 || v > nv {
            return Err(Error::Parse { line, msg: format!("vertex index {v} outside 1..={nv}") });
        }
        Ok(v - 1)
    }

    let (k, tok) = next("header")?;
    let h: Vec<usize> = fields(k, &tok, 3, "header")?;
    let (nv, nt, nb) = (h[0], h[1], h[2]);
    let mut raw = RawMesh::default();
    for _ in 0..nv {
        let (k, tok) = next("vertex")?;
        let p: Vec<f64> = fields(k, &tok, 2, "vertex")?;
        raw.vertices.push([p[0], p[1]] as Point);
    }
    for _ in 0..nt {
        let (k, tok) = next("triangle")?;
        let t: Vec<usize> = fields(k, &tok, 3, "triangle")?;
        raw.triangles.push([index(k, t[0], nv)?, index(k, t[1], nv)?, index(k, t[2], nv)?]);
    }
    for _ in 0..nb {
        let (k, tok) = next("boundary edge")?;
        if tok.len() != 3 {
            return Err(Error::Parse { line: k, msg: format!("expected 3 fields for boundary edge, found {}", tok.len()) });
        }
        let e: Vec<usize> = fields(k, &tok[..2], 2, "boundary edge")?;
        let tag: BoundaryTag = tok[2].parse().map_err(|e: Error| Error::Parse { line: k, msg: e.to_string() })?;
        raw.boundary_edges.push(BoundaryEdge { v: [index(k, e[0], nv)?, index(k, e[1], nv)?], tag });
    }
    if let Some((k, _)) = lines.next() {
        return Err(Error::Parse { line: k, msg: "trailing data after the last boundary edge".into() });
    }
    super::build_dual(raw)
}
