//! Marching cubes over a [`ScalarField`].
//!
//! Cells with any non-finite corner are skipped, which clips level surfaces
//! to the physical region. Vertices are shared between neighbouring cells:
//! each crossing grid edge yields exactly one vertex, interpolated from its
//! lower to its upper endpoint.

use std::collections::HashMap;

use super::tables::TRIANGLES;
use super::ScalarField;
use crate::par::Execution;

/// Corner offsets `(di, dj, dk)` in the usual marching-cubes order.
const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Corner pairs joined by each of the twelve cell edges.
const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [3, 2],
    [0, 3],
    [4, 5],
    [5, 6],
    [7, 6],
    [4, 7],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsoMesh {
    pub level: f64,
    /// Positions in cube coordinates `(c1, c2, c3)`.
    pub vertices: Vec<[f64; 3]>,
    /// Grid indices of the two samples bracketing each vertex, lower first.
    pub sources: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl IsoMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Grid edge keyed by its lower endpoint and axis.
type EdgeKey = (usize, u8);

/// Extracts the `level` surface. Cells are processed in parallel by layer; the
/// merged mesh is identical for every execution strategy.
pub fn extract_isosurface(field: &ScalarField, level: f64, exec: Execution) -> IsoMesh {
    let n = field.n;
    let layers = exec.map(n - 1, |k| {
        let mut triangles: Vec<[EdgeKey; 3]> = Vec::new();
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                polygonize(field, [i, j, k], level, &mut triangles);
            }
        }
        triangles
    });

    let mut mesh = IsoMesh {
        level,
        ..IsoMesh::default()
    };
    let mut lookup: HashMap<EdgeKey, usize> = HashMap::new();
    for triangle in layers.into_iter().flatten() {
        let indices = triangle.map(|key| {
            *lookup.entry(key).or_insert_with(|| {
                let (lower, upper) = edge_endpoints(field, key);
                mesh.vertices.push(interpolate(field, lower, upper, level));
                mesh.sources.push([lower, upper]);
                mesh.vertices.len() - 1
            })
        });
        mesh.triangles.push(indices);
    }
    mesh
}

fn polygonize(field: &ScalarField, cell: [usize; 3], level: f64, out: &mut Vec<[EdgeKey; 3]>) {
    let corner_index = |c: usize| {
        let o = CORNERS[c];
        field.index(cell[0] + o[0], cell[1] + o[1], cell[2] + o[2])
    };
    let mut mask = 0usize;
    for c in 0..8 {
        let v = field.values[corner_index(c)];
        if !v.is_finite() {
            return;
        }
        if v < level {
            mask |= 1 << c;
        }
    }
    if mask == 0 || mask == 255 {
        return;
    }
    let row = &TRIANGLES[mask];
    for tri in row.chunks_exact(3).take_while(|t| t[0] >= 0) {
        out.push([0, 1, 2].map(|t| {
            let [a, b] = EDGES[tri[t] as usize];
            let axis = (0..3)
                .find(|&d| CORNERS[a][d] != CORNERS[b][d])
                .expect("edge spans one axis");
            let lower = if CORNERS[a][axis] < CORNERS[b][axis] {
                a
            } else {
                b
            };
            (corner_index(lower), axis as u8)
        }));
    }
}

fn edge_endpoints(field: &ScalarField, (lower, axis): EdgeKey) -> (usize, usize) {
    let stride = match axis {
        0 => 1,
        1 => field.n,
        _ => field.n * field.n,
    };
    (lower, lower + stride)
}

fn interpolate(field: &ScalarField, lower: usize, upper: usize, level: f64) -> [f64; 3] {
    let (v0, v1) = (field.values[lower], field.values[upper]);
    let t = (level - v0) / (v1 - v0);
    let (p0, p1) = (field.point(lower), field.point(upper));
    [0, 1, 2].map(|a| p0[a] + t * (p1[a] - p0[a]))
}
