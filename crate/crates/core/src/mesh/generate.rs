use super::{BoundaryEdge, BoundaryTag, Mesh2D, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallSide {
    Bottom,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeShape {
    /// Compression ramp followed by a plateau to the outflow.
    Ramp,
    /// Symmetric wedge: rises over the first half, falls back over the second.
    Diamond,
}

/// Quad splitting pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagonal {
    Forward,
    Alternating,
}

/// Channel [0, length] × [0, height] with a wedge on one wall. Left is a
/// free-stream inflow, right a free outflow, the wedge a slip wall; the
/// remaining parts of the two walls take `bottom_tag` / `top_tag`.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeChannelParams {
    pub length: f64,
    pub height: f64,
    pub wedge_start: f64,
    pub wedge_length: f64,
    pub wedge_angle_deg: f64,
    pub wedge_side: WallSide,
    pub wedge_shape: WedgeShape,
    pub edge_length: f64,
    pub bottom_tag: BoundaryTag,
    pub top_tag: BoundaryTag,
    pub diagonal: Diagonal,
}

impl Default for WedgeChannelParams {
    /// 10° compression ramp at x = 0.5 in a 2 × 1.5 channel, ≈5k vertices.
    fn default() -> Self {
        WedgeChannelParams {
            length: 2.0,
            height: 1.5,
            wedge_start: 0.5,
            wedge_length: 1.5,
            wedge_angle_deg: 10.0,
            wedge_side: WallSide::Bottom,
            wedge_shape: WedgeShape::Ramp,
            edge_length: 0.025,
            bottom_tag: BoundaryTag::SlipWall,
            top_tag: BoundaryTag::SlipWall,
            diagonal: Diagonal::Alternating,
        }
    }
}

impl WedgeChannelParams {
    /// Wedge thickness w(x) ≥ 0.
    pub fn wedge_profile(&self, x: f64) -> f64 {
        let t = self.wedge_angle_deg.to_radians().tan();
        let s = x - self.wedge_start;
        if s <= 0.0 {
            return 0.0;
        }
        match self.wedge_shape {
            WedgeShape::Ramp => t * s.min(self.wedge_length),
            WedgeShape::Diamond => {
                let half = 0.5 * self.wedge_length;
                if s >= self.wedge_length {
                    0.0
                } else {
                    t * s.min(self.wedge_length - s).min(half)
                }
            }
        }
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k = vec![self.wedge_start];
        if self.wedge_shape == WedgeShape::Diamond {
            k.push(self.wedge_start + 0.5 * self.wedge_length);
        }
        k.push(self.wedge_start + self.wedge_length);
        k.retain(|&x| x > 0.0 && x < self.length);
        k
    }

    pub fn bottom(&self, x: f64) -> f64 {
        match self.wedge_side {
            WallSide::Bottom => self.wedge_profile(x),
            WallSide::Top => 0.0,
        }
    }

    pub fn top(&self, x: f64) -> f64 {
        match self.wedge_side {
            WallSide::Bottom => self.height,
            WallSide::Top => self.height - self.wedge_profile(x),
        }
    }

    fn on_wedge(&self, x0: f64, x1: f64) -> bool {
        let xm = 0.5 * (x0 + x1);
        match self.wedge_shape {
            WedgeShape::Ramp => xm > self.wedge_start,
            WedgeShape::Diamond => xm > self.wedge_start && xm < self.wedge_start + self.wedge_length,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [self.length, self.height, self.wedge_length, self.edge_length];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Range("channel sizes and edge length must be positive".into()));
        }
        if !(self.wedge_angle_deg >= 0.0 && self.wedge_angle_deg < 60.0) {
            return Err(Error::Range(format!("wedge angle {}° outside [0, 60)", self.wedge_angle_deg)));
        }
        if !(self.wedge_start >= 0.0 && self.wedge_start < self.length) {
            return Err(Error::Range("wedge must start inside the channel".into()));
        }
        let thickest = self
            .kinks()
            .iter()
            .chain(&[self.length])
            .map(|&x| self.wedge_profile(x))
            .fold(0.0, f64::max);
        if thickest >= self.height {
            return Err(Error::Structural(format!(
                "wedge of thickness {thickest:.4} meets the opposite wall (self-intersection)"
            )));
        }
        Ok(())
    }
}

/// Mapped structured channel: column i at x = columns[i], rows blended
/// linearly between the bottom and top curves.
#[derive(Clone, Debug)]
pub struct StructuredChannel {
    pub mesh: Mesh2D,
    pub params: WedgeChannelParams,
    pub columns: Vec<f64>,
    pub ny: usize,
}

impl StructuredChannel {
    pub fn nx(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    /// Vertices of one wall, left to right.
    pub fn wall_vertices(&self, side: WallSide) -> Vec<usize> {
        let j = match side {
            WallSide::Bottom => 0,
            WallSide::Top => self.ny,
        };
        (0..=self.nx()).map(|i| self.index(i, j)).collect()
    }

    /// Moves the wall vertices of `side` by `displacement` (one vector per
    /// column) and blends the motion linearly to the opposite wall.
    pub fn deform_wall(&self, side: WallSide, displacement: &[Point]) -> Result<Mesh2D> {
        if displacement.len() != self.columns.len() {
            return Err(Error::Structural("one displacement per column required".into()));
        }
        let mut pts = self.mesh.vertices().to_vec();
        for (i, d) in displacement.iter().enumerate() {
            for j in 0..=self.ny {
                let s = match side {
                    WallSide::Top => j as f64 / self.ny as f64,
                    WallSide::Bottom => (self.ny - j) as f64 / self.ny as f64,
                };
                let v = self.index(i, j);
                pts[v][0] += s * d[0];
                pts[v][1] += s * d[1];
            }
        }
        self.mesh.with_vertices(pts)
    }
}

pub fn generate_wedge_channel(params: &WedgeChannelParams) -> Result<StructuredChannel> {
    params.validate()?;
    let h = params.edge_length;
    let mut breaks = vec![0.0];
    breaks.extend(params.kinks());
    breaks.push(params.length);
    let mut columns = vec![0.0];
    for w in breaks.windows(2) {
        let cells = ((w[1] - w[0]) / h).round().max(1.0) as usize;
        for k in 1..=cells {
            columns.push(if k == cells { w[1] } else { w[0] + (w[1] - w[0]) * k as f64 / cells as f64 });
        }
    }
    let nx = columns.len() - 1;
    let ny = (params.height / h).round().max(2.0) as usize;
    let idx = |i: usize, j: usize| i * (ny + 1) + j;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for &x in &columns {
        let (yb, yt) = (params.bottom(x), params.top(x));
        for j in 0..=ny {
            vertices.push([x, yb + (yt - yb) * j as f64 / ny as f64]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let forward = match params.diagonal {
                Diagonal::Forward => true,
                Diagonal::Alternating => (i + j) % 2 == 0,
            };
            if forward {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    let mut boundary = Vec::with_capacity(2 * (nx + ny));
    let wall_tag = |side: WallSide, i: usize| {
        let default = match side {
            WallSide::Bottom => params.bottom_tag,
            WallSide::Top => params.top_tag,
        };
        if side == params.wedge_side && params.wedge_angle_deg > 0.0 && params.on_wedge(columns[i], columns[i + 1]) {
            BoundaryTag::SlipWall
        } else {
            default
        }
    };
    for i in 0..nx {
        boundary.push(BoundaryEdge { v: [idx(i, 0), idx(i + 1, 0)], tag: wall_tag(WallSide::Bottom, i) });
    }
    for j in 0..ny {
        boundary.push(BoundaryEdge { v: [idx(nx, j), idx(nx, j + 1)], tag: BoundaryTag::OutflowFree });
    }
    for i in (0..nx).rev() {
        boundary.push(BoundaryEdge { v: [idx(i + 1, ny), idx(i, ny)], tag: wall_tag(WallSide::Top, i) });
    }
    for j in (0..ny).rev() {
        boundary.push(BoundaryEdge { v: [idx(0, j + 1), idx(0, j)], tag: BoundaryTag::InflowFreestream });
    }

    let mesh = Mesh2D::new(vertices, triangles, boundary)?;
    Ok(StructuredChannel { mesh, params: params.clone(), columns, ny })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_channel_has_rectangle_area() {
        let p = WedgeChannelParams { wedge_angle_deg: 0.0, edge_length: 0.1, ..Default::default() };
        let c = generate_wedge_channel(&p).unwrap();
        assert!((c.mesh.volumes().iter().sum::<f64>() - 3.0).abs() < 1e-12);
        assert!(c.mesh.boundary_edges().iter().all(|b| b.tag != BoundaryTag::Ground));
    }

    #[test]
    fn refinement_quadruples_triangles() {
        let p = WedgeChannelParams { edge_length: 0.1, ..Default::default() };
        let a = generate_wedge_channel(&p).unwrap().mesh.triangles().len();
        let b = generate_wedge_channel(&WedgeChannelParams { edge_length: 0.05, ..p }).unwrap().mesh.triangles().len();
        assert_eq!(b, 4 * a);
    }

    #[test]
    fn ramp_area_and_tags() {
        let p = WedgeChannelParams { edge_length: 0.05, ..Default::default() };
        let c = generate_wedge_channel(&p).unwrap();
        let t = 10f64.to_radians().tan();
        let area = 2.0 * 1.5 - 0.5 * 1.5 * 1.5 * t;
        assert!((c.mesh.total_area() - area).abs() < 1e-12);
        assert!(c.columns.contains(&0.5));
        let out = c.mesh.tag_chain(BoundaryTag::OutflowFree);
        assert_eq!(out.len(), c.ny + 1);
        assert!(out.windows(2).all(|w| c.mesh.vertex(w[1])[1] > c.mesh.vertex(w[0])[1]));
    }

    #[test]
    fn diamond_over_ground() {
        let p = WedgeChannelParams {
            wedge_side: WallSide::Top,
            wedge_shape: WedgeShape::Diamond,
            wedge_start: 0.3,
            wedge_length: 0.6,
            bottom_tag: BoundaryTag::Ground,
            edge_length: 0.05,
            ..Default::default()
        };
        let c = generate_wedge_channel(&p).unwrap();
        assert!(c.mesh.boundary_edges().iter().any(|b| b.tag == BoundaryTag::Ground));
        let apex = p.wedge_start + 0.3;
        assert!((p.top(apex) - (1.5 - 0.3 * 10f64.to_radians().tan())).abs() < 1e-15);
        assert_eq!(p.top(1.95), 1.5);
    }

    #[test]
    fn self_intersection_is_rejected() {
        let p = WedgeChannelParams { wedge_angle_deg: 50.0, height: 0.5, ..Default::default() };
        assert!(matches!(generate_wedge_channel(&p), Err(Error::Structural(_))));
    }
}
