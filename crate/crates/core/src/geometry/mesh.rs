//! Closed triangle meshes of analytic shapes.
//!
//! Primitives are meshed from a geodesic icosphere: every icosahedron face is
//! split into `n^2` triangles on a barycentric lattice, the lattice points are
//! projected to the unit sphere and then carried through the shape's affine
//! map `y = c + R diag(a) x`. Facet normals and areas are computed from the
//! mapped flat triangles.
//!
//! An inscribed polyhedron sits inside the curved surface by the facet sagitta,
//! which shows up directly as a phase error in oscillatory surface integrals.
//! The lattice sphere is therefore inflated radially until it encloses exactly
//! the ball volume `4 pi / 3`; the affine map preserves that match, so every
//! meshed primitive has its analytic volume.

use std::collections::HashMap;
use std::io::Write;

use super::shape::Shape;
use super::vector::{Mat3, UnitVec, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Outward unit normal per triangle.
    pub normals: Vec<UnitVec>,
    pub areas: Vec<f64>,
    pub centroids: Vec<Vec3>,
}

impl TriangleMesh {
    fn from_parts(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        let mut centroids = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let n = (b - a).cross(c - a);
            let len = n.norm();
            normals.push(UnitVec::new_unchecked(n / len));
            areas.push(0.5 * len);
            centroids.push((a + b + c) / 3.0);
        }
        TriangleMesh {
            vertices,
            triangles,
            normals,
            areas,
            centroids,
        }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| {
                [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
                    .map(|(i, j)| self.vertices[i].distance(self.vertices[j]))
            })
            .fold(0.0, f64::max)
    }

    /// Whether every directed edge appears exactly once and its reverse exactly
    /// once, i.e. the surface is closed and consistently oriented.
    pub fn is_closed_oriented(&self) -> bool {
        let mut directed: HashMap<(usize, usize), u32> = HashMap::new();
        for t in &self.triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *directed.entry((i, j)).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(i, j), &count)| count == 1 && directed.get(&(j, i)) == Some(&1))
    }

    /// Number of edge-connected components.
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2])] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut roots: Vec<usize> = self
            .triangles
            .iter()
            .map(|t| find(&mut parent, t[0]))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Writes one `v x y z` line per vertex and one 1-based `f i j k` line per
    /// triangle.
    pub fn write_triangle_soup<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    fn append(&mut self, other: TriangleMesh) {
        let offset = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.triangles
            .extend(other.triangles.into_iter().map(|t| t.map(|i| i + offset)));
        self.normals.extend(other.normals);
        self.areas.extend(other.areas);
        self.centroids.extend(other.centroids);
    }
}

/// Indices of the triangles with `normal . d < 0`. Facets with `normal . d`
/// exactly zero belong to the shadow side.
pub fn illuminated(mesh: &TriangleMesh, d: UnitVec) -> Vec<usize> {
    mesh.normals
        .iter()
        .enumerate()
        .filter(|(_, n)| n.dot(*d) < 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Meshes `shape` so that no edge exceeds `max_edge`.
pub fn mesh_shape(shape: &Shape, max_edge: f64) -> Result<TriangleMesh> {
    if !(max_edge > 0.0 && max_edge.is_finite()) {
        return Err(Error::invalid(format!("max_edge must be positive, got {max_edge}")));
    }
    let mut mesh = TriangleMesh::from_parts(Vec::new(), Vec::new());
    for part in shape.parts() {
        let (center, axes, rotation) = match part {
            Shape::Ball { center, radius } => (*center, [*radius; 3], Mat3::IDENTITY),
            Shape::Ellipsoid {
                center,
                semi_axes,
                rotation,
            } => (*center, *semi_axes, *rotation),
            Shape::Union(_) => unreachable!("parts are primitive"),
        };
        mesh.append(mesh_primitive(center, axes, &rotation, max_edge));
    }
    Ok(mesh)
}

fn mesh_primitive(center: Vec3, axes: [f64; 3], rotation: &Mat3, max_edge: f64) -> TriangleMesh {
    let map = |v: Vec3| center + rotation.mul_vec(Vec3::new(axes[0] * v.x, axes[1] * v.y, axes[2] * v.z));
    let flip = rotation.det() < 0.0;
    let build = |n: usize| {
        let (mut verts, mut tris) = geodesic_sphere(n);
        let scale = (4.0 * std::f64::consts::PI / 3.0 / enclosed_volume(&verts, &tris)).cbrt();
        for v in &mut verts {
            *v = *v * scale;
        }
        if flip {
            for t in &mut tris {
                t.swap(1, 2);
            }
        }
        TriangleMesh::from_parts(verts.into_iter().map(map).collect(), tris)
    };

    let longest = axes.iter().cloned().fold(0.0, f64::max);
    let mut n = ((1.05 * longest / max_edge).ceil() as usize).max(1);
    let mut mesh = build(n);
    let mut edge = mesh.max_edge();
    if edge > max_edge {
        n = ((n as f64 * edge / max_edge).ceil() as usize).max(n + 1);
        mesh = build(n);
        edge = mesh.max_edge();
    }
    while edge > max_edge {
        n += 1;
        mesh = build(n);
        edge = mesh.max_edge();
    }
    mesh
}

/// Signed volume enclosed by an outward-oriented closed triangle surface.
fn enclosed_volume(vertices: &[Vec3], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])))
        .sum::<f64>()
        / 6.0
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron_vertices() -> [Vec3; 12] {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    [
        Vec3::new(-1.0, t, 0.0),
        Vec3::new(1.0, t, 0.0),
        Vec3::new(-1.0, -t, 0.0),
        Vec3::new(1.0, -t, 0.0),
        Vec3::new(0.0, -1.0, t),
        Vec3::new(0.0, 1.0, t),
        Vec3::new(0.0, -1.0, -t),
        Vec3::new(0.0, 1.0, -t),
        Vec3::new(t, 0.0, -1.0),
        Vec3::new(t, 0.0, 1.0),
        Vec3::new(-t, 0.0, -1.0),
        Vec3::new(-t, 0.0, 1.0),
    ]
    .map(|v| v / v.norm())
}

/// Unit-sphere geodesic mesh with each icosahedron edge split into `n` parts.
/// Lattice points shared between faces are keyed by their integer barycentric
/// weights so the result is watertight.
fn geodesic_sphere(n: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let base = icosahedron_vertices();
    let mut index: HashMap<[(usize, usize); 3], usize> = HashMap::new();
    let mut vertices = Vec::with_capacity(10 * n * n + 2);
    let mut triangles = Vec::with_capacity(20 * n * n);

    let mut vertex = |weights: [(usize, usize); 3]| -> usize {
        let mut key = weights.map(|(v, w)| if w == 0 { (usize::MAX, 0) } else { (v, w) });
        key.sort_unstable();
        *index.entry(key).or_insert_with(|| {
            let p = weights
                .iter()
                .fold(Vec3::ZERO, |acc, &(v, w)| acc + base[v] * w as f64);
            vertices.push(p / p.norm());
            vertices.len() - 1
        })
    };

    for face in ICOSAHEDRON_FACES {
        let [a, b, c] = face;
        let mut lattice = vec![vec![0usize; n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                lattice[i][j] = vertex([(a, n - i - j), (b, i), (c, j)]);
            }
        }
        for i in 0..n {
            for j in 0..(n - i) {
                triangles.push([lattice[i][j], lattice[i + 1][j], lattice[i][j + 1]]);
                if i + j + 1 < n {
                    triangles.push([lattice[i + 1][j], lattice[i + 1][j + 1], lattice[i][j + 1]]);
                }
            }
        }
    }
    (vertices, triangles)
}
