use crate::mesh::{BoundaryTag, Mesh2D, Point};
use std::collections::HashSet;

/// An edge is a jump candidate when |Δf| exceeds θ times the local field
/// scale and a floor of floor_fraction·max |Δf| over the whole mesh. The
/// local scale is the mean over both endpoints of the median |Δf| of the
/// edges within `rings` vertex rings, wide enough that a smeared shock
/// band does not dominate it. Smooth fields stay unflagged when they vary
/// slowly over that many rings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpDetector {
    pub theta: f64,
    pub floor_fraction: f64,
    pub rings: usize,
}

impl Default for JumpDetector {
    fn default() -> Self {
        JumpDetector { theta: 3.0, floor_fraction: 0.2, rings: 8 }
    }
}

impl JumpDetector {
    /// Median |Δf| over the edges within `rings` rings of each vertex.
    pub fn vertex_scales(&self, values: &[f64], mesh: &Mesh2D) -> Vec<f64> {
        let edges = mesh.edges();
        let d: Vec<f64> = edges.iter().map(|e| (values[e.j] - values[e.i]).abs()).collect();
        let nv = mesh.n_vertices();
        let mut incident = vec![Vec::new(); nv];
        for (k, e) in edges.iter().enumerate() {
            incident[e.i].push(k);
            incident[e.j].push(k);
        }
        let mut seen_v = vec![usize::MAX; nv];
        let mut seen_e = vec![usize::MAX; edges.len()];
        (0..nv)
            .map(|v| {
                let mut front = vec![v];
                seen_v[v] = v;
                let mut local = Vec::new();
                for _ in 0..self.rings.max(1) {
                    let mut next = Vec::new();
                    for &u in &front {
                        for &k in &incident[u] {
                            if seen_e[k] != v {
                                seen_e[k] = v;
                                local.push(d[k]);
                                let w = if edges[k].i == u { edges[k].j } else { edges[k].i };
                                if seen_v[w] != v {
                                    seen_v[w] = v;
                                    next.push(w);
                                }
                            }
                        }
                    }
                    front = next;
                }
                if local.is_empty() {
                    return 0.0;
                }
                local.sort_by(f64::total_cmp);
                local[local.len() / 2]
            })
            .collect()
    }

    /// Thresholds, one per edge.
    pub fn thresholds(&self, values: &[f64], mesh: &Mesh2D) -> Vec<f64> {
        let scale = self.vertex_scales(values, mesh);
        let edges = mesh.edges();
        let floor = self.floor_fraction * edges.iter().map(|e| (values[e.j] - values[e.i]).abs()).fold(0.0, f64::max);
        edges.iter().map(|e| (self.theta * 0.5 * (scale[e.i] + scale[e.j])).max(floor)).collect()
    }

    /// Edges whose jump exceeds its threshold.
    pub fn detect(&self, values: &[f64], mesh: &Mesh2D) -> Vec<usize> {
        let t = self.thresholds(values, mesh);
        mesh.edges()
            .iter()
            .enumerate()
            .filter(|&(k, e)| {
                let d = (values[e.j] - values[e.i]).abs();
                d > t[k] && d > 0.0
            })
            .map(|(k, _)| k)
            .collect()
    }
}

pub fn jump_detector(values: &[f64], mesh: &Mesh2D) -> Vec<usize> {
    JumpDetector::default().detect(values, mesh)
}

/// Comparison of the density and adjoint-density jump sets on an outflow case.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpGeography {
    pub density_edges: Vec<usize>,
    pub adjoint_edges: Vec<usize>,
    /// Density jump edges farther than the margin from the outflow.
    pub shock_edges: usize,
    /// Of those, the edges where the adjoint also jumps.
    pub overlap: usize,
    /// Downstream end of the density jump set.
    pub intersection: Option<Point>,
    /// Adjoint-only jump edges within the radius of the intersection.
    pub emanating: usize,
}

impl JumpGeography {
    pub fn overlap_fraction(&self) -> f64 {
        if self.shock_edges == 0 {
            0.0
        } else {
            self.overlap as f64 / self.shock_edges as f64
        }
    }
}

fn edge_midpoint(mesh: &Mesh2D, e: usize) -> Point {
    let ed = &mesh.edges()[e];
    let (a, b) = (mesh.vertex(ed.i), mesh.vertex(ed.j));
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn distance_to_tag(mesh: &Mesh2D, p: Point, tag: BoundaryTag) -> f64 {
    mesh.boundary_edges()
        .iter()
        .filter(|b| b.tag == tag)
        .map(|b| segment_distance(p, mesh.vertex(b.v[0]), mesh.vertex(b.v[1])))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Jump sets of ρ and W₁*: overlap along the shock away from the outflow
/// (beyond `margin`), and adjoint jumps within `radius` of the point where
/// the density jump set meets the outflow.
pub fn jump_geography(
    density: &[f64],
    adjoint_density: &[f64],
    mesh: &Mesh2D,
    detector: JumpDetector,
    margin: f64,
    radius: f64,
) -> JumpGeography {
    let density_edges = detector.detect(density, mesh);
    let adjoint_edges = detector.detect(adjoint_density, mesh);
    let in_adjoint: HashSet<usize> = adjoint_edges.iter().copied().collect();
    let in_density: HashSet<usize> = density_edges.iter().copied().collect();
    let mut shock_edges = 0;
    let mut overlap = 0;
    let mut intersection: Option<(f64, Point)> = None;
    for &e in &density_edges {
        let m = edge_midpoint(mesh, e);
        let d = distance_to_tag(mesh, m, BoundaryTag::OutflowFree);
        if intersection.is_none_or(|(best, _)| d < best) {
            intersection = Some((d, m));
        }
        if d > margin {
            shock_edges += 1;
            overlap += in_adjoint.contains(&e) as usize;
        }
    }
    let intersection = intersection.map(|(_, p)| p);
    let emanating = intersection.map_or(0, |p| {
        adjoint_edges
            .iter()
            .filter(|e| !in_density.contains(e))
            .filter(|&&e| {
                let m = edge_midpoint(mesh, e);
                (m[0] - p[0]).hypot(m[1] - p[1]) <= radius
            })
            .count()
    });
    JumpGeography { density_edges, adjoint_edges, shock_edges, overlap, intersection, emanating }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_wedge_channel, WedgeChannelParams};

    fn mesh() -> Mesh2D {
        generate_wedge_channel(&WedgeChannelParams { edge_length: 0.1, wedge_angle_deg: 0.0, ..Default::default() })
            .unwrap()
            .mesh
    }

    #[test]
    fn smooth_field_has_no_jumps() {
        let m = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.025, wedge_angle_deg: 0.0, ..Default::default() })
            .unwrap()
            .mesh;
        let f: Vec<f64> = m.vertices().iter().map(|p| (p[0] + 0.5 * p[1]).sin()).collect();
        assert!(jump_detector(&f, &m).is_empty());
        let g: Vec<f64> = m.vertices().iter().map(|p| (3.0 * p[0]).sin() * p[1].cos()).collect();
        assert!(jump_detector(&g, &m).is_empty());
    }

    #[test]
    fn step_is_detected_on_crossing_edges_only() {
        let m = mesh();
        let f: Vec<f64> = m.vertices().iter().map(|p| if p[0] < 1.03 { 1.0 } else { 2.0 }).collect();
        let found = jump_detector(&f, &m);
        let crossing: Vec<usize> = m
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| (m.vertex(e.i)[0] < 1.03) != (m.vertex(e.j)[0] < 1.03))
            .map(|(k, _)| k)
            .collect();
        assert_eq!(found, crossing);
    }
}
