//! Triangular meshes with vertex-centred median-dual control volumes.

mod generate;
mod io;

pub use generate::{generate_wedge_channel, Diagonal, StructuredChannel, WallSide, WedgeChannelParams, WedgeShape};
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    SlipWall,
    InflowFreestream,
    OutflowFree,
    Ground,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] =
        [BoundaryTag::SlipWall, BoundaryTag::InflowFreestream, BoundaryTag::OutflowFree, BoundaryTag::Ground];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::SlipWall => "slip_wall",
            BoundaryTag::InflowFreestream => "inflow_freestream",
            BoundaryTag::OutflowFree => "outflow_free",
            BoundaryTag::Ground => "ground",
        }
    }

    /// Rank used when a corner vertex touches several tags (lower wins):
    /// inflow, outflow, slip wall, ground.
    pub fn priority(self) -> u8 {
        match self {
            BoundaryTag::InflowFreestream => 0,
            BoundaryTag::OutflowFree => 1,
            BoundaryTag::SlipWall => 2,
            BoundaryTag::Ground => 3,
        }
    }

    /// Both wall kinds carry the slip condition.
    pub fn is_wall(self) -> bool {
        matches!(self, BoundaryTag::SlipWall | BoundaryTag::Ground)
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundaryTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Structural(format!("unknown boundary tag '{s}'")))
    }
}

/// Boundary segment a → b with the domain on its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulation before dual construction.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RawMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

/// Mesh edge i < j with the integrated dual-face normal n_ij pointing from
/// C_i into C_j.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub normal: Point,
    pub triangles: [Option<usize>; 2],
}

/// Half of a boundary edge attached to one of its end vertices, with the
/// outward normal of that half (length-weighted).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFace {
    pub vertex: usize,
    pub edge: usize,
    pub normal: Point,
    pub tag: BoundaryTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    volumes: Vec<f64>,
    edges: Vec<Edge>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_triangles: Vec<Vec<usize>>,
    boundary_faces: Vec<BoundaryFace>,
    vertex_faces: Vec<Vec<usize>>,
    boundary_normals: Vec<Option<Point>>,
}

#[inline]
fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Signed area of a triangle (positive when counter-clockwise).
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

pub fn build_dual(raw: RawMesh) -> Result<Mesh2D> {
    let RawMesh { vertices, triangles, boundary_edges } = raw;
    let nv = vertices.len();
    if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Structural("non-finite vertex coordinate".into()));
    }

    // directed half-edges of every triangle
    let mut half: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
    let mut volumes = vec![0.0; nv];
    let mut vertex_triangles = vec![Vec::new(); nv];
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= nv) {
            return Err(Error::Structural(format!("triangle {t} references a missing vertex")));
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::Structural(format!("triangle {t} repeats a vertex")));
        }
        let [a, b, c] = tri.map(|v| vertices[v]);
        let area = signed_area(a, b, c);
        let scale = norm(sub(b, a)).max(norm(sub(c, a))).powi(2);
        if area.abs() <= 1e-14 * scale {
            return Err(Error::Structural(format!("triangle {t} has zero area")));
        }
        if area < 0.0 {
            return Err(Error::Structural(format!("triangle {t} is clockwise (inconsistent orientation)")));
        }
        for k in 0..3 {
            let (p, q) = (tri[k], tri[(k + 1) % 3]);
            if half.insert((p, q), t).is_some() {
                return Err(Error::Structural(format!(
                    "edge ({p}, {q}) appears twice with the same orientation (triangle {t}); mesh is non-conforming or inconsistently oriented"
                )));
            }
            volumes[tri[k]] += area / 3.0;
            vertex_triangles[tri[k]].push(t);
        }
    }

    // undirected edges with their dual faces
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut keys: Vec<(usize, usize)> = half.keys().map(|&(p, q)| (p.min(q), p.max(q))).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut edges: Vec<Edge> = keys
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| {
            edge_index.insert((i, j), e);
            Edge { i, j, normal: [0.0; 2], triangles: [None, None] }
        })
        .collect();
    for (t, tri) in triangles.iter().enumerate() {
        let g = tri.iter().fold([0.0; 2], |s, &v| [s[0] + vertices[v][0] / 3.0, s[1] + vertices[v][1] / 3.0]);
        for k in 0..3 {
            let (p, q) = (tri[k], tri[(k + 1) % 3]);
            let e = edge_index[&(p.min(q), p.max(q))];
            let edge = &mut edges[e];
            let (pi, pj) = (vertices[edge.i], vertices[edge.j]);
            let m = [0.5 * (pi[0] + pj[0]), 0.5 * (pi[1] + pj[1])];
            let seg = sub(g, m);
            let mut n = [seg[1], -seg[0]];
            if dot(n, sub(pj, pi)) < 0.0 {
                n = [-n[0], -n[1]];
            }
            edge.normal[0] += n[0];
            edge.normal[1] += n[1];
            if edge.triangles[0].is_none() {
                edge.triangles[0] = Some(t);
            } else {
                edge.triangles[1] = Some(t);
            }
        }
    }

    // boundary: every single-sided edge needs exactly one tag
    let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
    let mut boundary = Vec::with_capacity(boundary_edges.len());
    for (b, be) in boundary_edges.iter().enumerate() {
        let [p, q] = be.v;
        let oriented = if half.contains_key(&(p, q)) && !half.contains_key(&(q, p)) {
            [p, q]
        } else if half.contains_key(&(q, p)) && !half.contains_key(&(p, q)) {
            [q, p]
        } else {
            return Err(Error::Structural(format!("boundary edge {b} ({p}, {q}) is not on the mesh boundary")));
        };
        if tagged.insert((p.min(q), p.max(q)), b).is_some() {
            return Err(Error::Structural(format!("boundary edge {b} ({p}, {q}) is tagged twice")));
        }
        boundary.push(BoundaryEdge { v: oriented, tag: be.tag });
    }
    for &(p, q) in half.keys() {
        if !half.contains_key(&(q, p)) && !tagged.contains_key(&(p.min(q), p.max(q))) {
            return Err(Error::Structural(format!("boundary edge ({p}, {q}) has no tag")));
        }
    }

    let mut boundary_faces = Vec::with_capacity(2 * boundary.len());
    let mut vertex_faces = vec![Vec::new(); nv];
    let mut normal_sum = vec![[0.0; 2]; nv];
    let mut on_boundary = vec![false; nv];
    for (b, be) in boundary.iter().enumerate() {
        let d = sub(vertices[be.v[1]], vertices[be.v[0]]);
        let n = [0.5 * d[1], -0.5 * d[0]];
        for &v in &be.v {
            vertex_faces[v].push(boundary_faces.len());
            boundary_faces.push(BoundaryFace { vertex: v, edge: b, normal: n, tag: be.tag });
            normal_sum[v][0] += n[0];
            normal_sum[v][1] += n[1];
            on_boundary[v] = true;
        }
    }
    let boundary_normals = (0..nv)
        .map(|v| {
            on_boundary[v].then(|| {
                let l = norm(normal_sum[v]);
                [normal_sum[v][0] / l, normal_sum[v][1] / l]
            })
        })
        .collect();

    let mut vertex_edges = vec![Vec::new(); nv];
    for (e, edge) in edges.iter().enumerate() {
        vertex_edges[edge.i].push(e);
        vertex_edges[edge.j].push(e);
    }
    if let Some(v) = (0..nv).find(|&v| vertex_triangles[v].is_empty()) {
        return Err(Error::Structural(format!("vertex {v} belongs to no triangle")));
    }

    Ok(Mesh2D {
        vertices,
        triangles,
        boundary_edges: boundary,
        volumes,
        edges,
        vertex_edges,
        vertex_triangles,
        boundary_faces,
        vertex_faces,
        boundary_normals,
    })
}

impl Mesh2D {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<BoundaryEdge>) -> Result<Self> {
        build_dual(RawMesh { vertices, triangles, boundary_edges })
    }

    pub fn raw(&self) -> RawMesh {
        RawMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
        }
    }

    /// Same connectivity and tags on moved vertices.
    pub fn with_vertices(&self, vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::Structural("vertex count changed".into()));
        }
        build_dual(RawMesh { vertices, ..self.raw() })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// |C_i|.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    /// 𝒱(P_i).
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertex_edges[v].iter().map(move |&e| {
            let edge = &self.edges[e];
            if edge.i == v {
                edge.j
            } else {
                edge.i
            }
        })
    }

    /// n_vw for an existing edge, oriented out of C_v.
    pub fn edge_normal_from(&self, e: usize, v: usize) -> Point {
        let edge = &self.edges[e];
        if edge.i == v {
            edge.normal
        } else {
            [-edge.normal[0], -edge.normal[1]]
        }
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn vertex_boundary_faces(&self, v: usize) -> impl Iterator<Item = &BoundaryFace> + '_ {
        self.vertex_faces[v].iter().map(move |&f| &self.boundary_faces[f])
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_normals[v].is_some()
    }

    /// Length-weighted unit outward normal at a boundary vertex.
    pub fn boundary_normal(&self, v: usize) -> Option<Point> {
        self.boundary_normals[v]
    }

    /// Tags touching a vertex, in priority order.
    pub fn vertex_tags(&self, v: usize) -> Vec<BoundaryTag> {
        let mut tags: Vec<BoundaryTag> = self.vertex_boundary_faces(v).map(|f| f.tag).collect();
        tags.sort_by_key(|t| t.priority());
        tags.dedup();
        tags
    }

    /// Highest-priority tag at a vertex.
    pub fn vertex_tag(&self, v: usize) -> Option<BoundaryTag> {
        self.vertex_tags(v).first().copied()
    }

    /// Vertices touching `tag` whose boundary faces all carry that tag
    /// (corners shared with another tag excluded), sorted along the boundary.
    pub fn pure_tag_vertices(&self, tag: BoundaryTag) -> Vec<usize> {
        self.tag_chain(tag).into_iter().filter(|&v| self.vertex_tags(v) == [tag]).collect()
    }

    /// Vertices of the boundary edges with `tag`, ordered along the boundary
    /// (domain on the left); disjoint pieces are concatenated.
    pub fn tag_chain(&self, tag: BoundaryTag) -> Vec<usize> {
        let segs: Vec<[usize; 2]> = self.boundary_edges.iter().filter(|b| b.tag == tag).map(|b| b.v).collect();
        let next: HashMap<usize, usize> = segs.iter().map(|s| (s[0], s[1])).collect();
        let has_prev: std::collections::HashSet<usize> = segs.iter().map(|s| s[1]).collect();
        let mut starts: Vec<usize> = segs.iter().map(|s| s[0]).filter(|v| !has_prev.contains(v)).collect();
        starts.sort_unstable();
        if starts.is_empty() && !segs.is_empty() {
            starts.push(segs.iter().map(|s| s[0]).min().unwrap());
        }
        let mut out = Vec::new();
        for s in starts {
            let mut v = s;
            out.push(v);
            while let Some(&w) = next.get(&v) {
                if w == s {
                    break;
                }
                out.push(w);
                v = w;
            }
        }
        out
    }

    /// Quadrature weight of each vertex on the `tag` boundary (half of each
    /// adjacent tagged edge length): trapezoidal rule.
    pub fn boundary_weights(&self, tag: BoundaryTag) -> Vec<f64> {
        let mut w = vec![0.0; self.n_vertices()];
        for be in self.boundary_edges.iter().filter(|b| b.tag == tag) {
            let l = norm(sub(self.vertices[be.v[1]], self.vertices[be.v[0]]));
            w[be.v[0]] += 0.5 * l;
            w[be.v[1]] += 0.5 * l;
        }
        w
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        signed_area(a, b, c)
    }

    /// Gradients of the three P¹ hat functions on triangle t.
    pub fn hat_gradients(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        let two_area = 2.0 * signed_area(a, b, c);
        let g = |p: Point, q: Point| [(p[1] - q[1]) / two_area, (q[0] - p[0]) / two_area];
        [g(b, c), g(c, a), g(a, b)]
    }

    /// Σⱼ n_ij + boundary normals of C_i (zero for a closed cell).
    pub fn closure_residual(&self, v: usize) -> Point {
        let mut s = [0.0; 2];
        for &e in &self.vertex_edges[v] {
            let n = self.edge_normal_from(e, v);
            s[0] += n[0];
            s[1] += n[1];
        }
        for f in self.vertex_boundary_faces(v) {
            s[0] += f.normal[0];
            s[1] += f.normal[1];
        }
        s
    }

    /// Perimeter of the dual cell.
    pub fn dual_perimeter(&self, v: usize) -> f64 {
        self.vertex_edges[v].iter().map(|&e| norm(self.edges[e].normal)).sum::<f64>()
            + self.vertex_boundary_faces(v).map(|f| norm(f.normal)).sum::<f64>()
    }

    /// Upwind triangles (K_ij, K_ji) of edge e, with i = edges[e].i.
    pub fn upwind_triangles(&self, e: usize) -> (usize, usize) {
        let Edge { i, j, .. } = self.edges[e];
        (self.upwind_triangle(i, j), self.upwind_triangle(j, i))
    }

    /// Triangle at P_i crossed by the half-line from P_j through P_i beyond
    /// P_i; near the boundary, the triangle at P_i whose angular sector is
    /// closest to that direction.
    pub fn upwind_triangle(&self, i: usize, j: usize) -> usize {
        let pi = self.vertices[i];
        let d = sub(pi, self.vertices[j]);
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for &t in &self.vertex_triangles[i] {
            let tri = self.triangles[t];
            let k = tri.iter().position(|&v| v == i).unwrap();
            let a = sub(self.vertices[tri[(k + 1) % 3]], pi);
            let b = sub(self.vertices[tri[(k + 2) % 3]], pi);
            // d inside the CCW sector from a to b
            if cross(a, d) >= 0.0 && cross(d, b) >= 0.0 {
                return t;
            }
            let dn = norm(d);
            let score = (dot(a, d) / (norm(a) * dn)).max(dot(b, d) / (norm(b) * dn));
            if score > best.0 {
                best = (score, t);
            }
        }
        best.1
    }

    /// Triangle containing p and its barycentric coordinates (brute force).
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|v| self.vertices[v]);
            let area = signed_area(a, b, c);
            let l = [signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area];
            let worst = l.iter().cloned().fold(f64::INFINITY, f64::min);
            if worst >= -1e-12 {
                return Some((t, l));
            }
            if best.is_none_or(|(w, _, _)| worst > w) {
                best = Some((worst, t, l));
            }
        }
        best.filter(|(w, _, _)| *w > -1e-9).map(|(_, t, l)| (t, l))
    }

    /// Median edge length, a representative h.
    pub fn median_edge_length(&self) -> f64 {
        let mut l: Vec<f64> =
            self.edges.iter().map(|e| norm(sub(self.vertices[e.j], self.vertices[e.i]))).collect();
        l.sort_by(f64::total_cmp);
        l[l.len() / 2]
    }

    /// Local length scale at a vertex: square root of its dual volume.
    pub fn local_h(&self, v: usize) -> f64 {
        self.volumes[v].sqrt()
    }
}
