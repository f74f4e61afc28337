//! Geodesic triangulation: the N-fold subdivided icosahedron, radially projected.
//!
//! Each base face with unit corners `A, B, C` carries the lattice
//! `(a*A + b*B + c*C) / N`, `a + b + c = N`, projected onto the sphere. Lattice
//! points on shared edges and corners are identified combinatorially (never by
//! coordinate hashing) in a canonical vertex order: the 12 icosahedron corners,
//! then interior edge points (each edge directed from its lower to its higher
//! corner id), then face interiors in lexicographic `(b, c)` order. The result
//! has `10*N^2 + 2` vertices, `30*N^2` edges and `20*N^2` faces.

use std::collections::HashMap;

use crate::sphere::{self, radial_project, UnitPoint};
use crate::{Error, Result};

/// Subdivided icosahedral triangulation of the sphere.
#[derive(Clone, Debug)]
pub struct IcosaTriangulation {
    n: u32,
    points: Vec<UnitPoint>,
    faces: Vec<[u32; 3]>,
    /// `face_adj[f][s]` is the face across the edge opposite corner `s` of `f`.
    face_adj: Vec<[u32; 3]>,
    adj_offsets: Vec<u32>,
    adj: Vec<u32>,
}

/// Minimal planar angle guarantee `pi - 2 * arccos((6*sqrt(5) - 13) / 2)`, about 0.41965.
pub fn min_angle_bound() -> f64 {
    std::f64::consts::PI - 2.0 * ((6.0 * 5.0_f64.sqrt() - 13.0) / 2.0).acos()
}

fn icosahedron() -> ([[f64; 3]; 12], [[u32; 3]; 20]) {
    let p = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let norm = (1.0 + p * p).sqrt();
    let mut corners = [[0.0; 3]; 12];
    for (i, v) in raw.iter().enumerate() {
        corners[i] = [v[0] / norm, v[1] / norm, v[2] / norm];
    }
    let faces = [
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
    (corners, faces)
}

/// Builds the subdivision of depth `n >= 1`.
pub fn build_triangulation(n: u32) -> Result<IcosaTriangulation> {
    if n < 1 {
        return Err(Error::Parameter("subdivision depth N must be >= 1".into()));
    }
    let nu = n as usize;
    let (corners, base_faces) = icosahedron();

    // Canonical edge list: sorted corner pairs in lexicographic order.
    let mut base_edges: Vec<(u32, u32)> = Vec::with_capacity(30);
    for f in &base_faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let e = (a.min(b), a.max(b));
            if !base_edges.contains(&e) {
                base_edges.push(e);
            }
        }
    }
    base_edges.sort_unstable();
    debug_assert_eq!(base_edges.len(), 30);
    let edge_index: HashMap<(u32, u32), usize> =
        base_edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    let per_edge = nu - 1;
    let per_face = if nu >= 2 { (nu - 1) * (nu - 2) / 2 } else { 0 };
    let vertex_count = 12 + 30 * per_edge + 20 * per_face;

    let mut points = Vec::with_capacity(vertex_count);
    for c in &corners {
        points.push(radial_project(*c)?);
    }
    for &(lo, hi) in &base_edges {
        let (a, b) = (corners[lo as usize], corners[hi as usize]);
        for t in 1..nu {
            let w = t as f64 / n as f64;
            points.push(radial_project([
                a[0] * (1.0 - w) + b[0] * w,
                a[1] * (1.0 - w) + b[1] * w,
                a[2] * (1.0 - w) + b[2] * w,
            ])?);
        }
    }
    for f in &base_faces {
        let (a, b, c) = (
            corners[f[0] as usize],
            corners[f[1] as usize],
            corners[f[2] as usize],
        );
        for bb in 1..nu {
            for cc in 1..nu.saturating_sub(bb) {
                let aa = nu - bb - cc;
                let (wa, wb, wc) = (aa as f64 / n as f64, bb as f64 / n as f64, cc as f64 / n as f64);
                points.push(radial_project([
                    a[0] * wa + b[0] * wb + c[0] * wc,
                    a[1] * wa + b[1] * wb + c[1] * wc,
                    a[2] * wa + b[2] * wb + c[2] * wc,
                ])?);
            }
        }
    }
    debug_assert_eq!(points.len(), vertex_count);

    // Global id of lattice point (a, b, c) on base face (ga, gb, gc).
    let interior_base = 12 + 30 * per_edge;
    let lattice_id = |face_idx: usize, ga: u32, gb: u32, gc: u32, a: usize, b: usize, c: usize| -> u32 {
        if a == nu {
            return ga;
        }
        if b == nu {
            return gb;
        }
        if c == nu {
            return gc;
        }
        // Edge points: parameter measured from the lower-indexed corner.
        let edge_point = |u: u32, v: u32, t_from_u: usize| -> u32 {
            let key = (u.min(v), u.max(v));
            let e = edge_index[&key];
            let t = if u < v { t_from_u } else { nu - t_from_u };
            (12 + e * per_edge + (t - 1)) as u32
        };
        if c == 0 {
            return edge_point(ga, gb, b);
        }
        if a == 0 {
            return edge_point(gb, gc, c);
        }
        if b == 0 {
            return edge_point(gc, ga, a);
        }
        let offset: usize = (1..b).map(|bp| nu - 1 - bp).sum::<usize>() + (c - 1);
        (interior_base + face_idx * per_face + offset) as u32
    };

    let mut faces = Vec::with_capacity(20 * nu * nu);
    for (fi, f) in base_faces.iter().enumerate() {
        let (ga, gb, gc) = (f[0], f[1], f[2]);
        let id = |a: usize, b: usize, c: usize| lattice_id(fi, ga, gb, gc, a, b, c);
        for b in 0..nu {
            for c in 0..nu - b {
                let a = nu - b - c;
                faces.push([id(a, b, c), id(a - 1, b + 1, c), id(a - 1, b, c + 1)]);
                if b + c + 2 <= nu {
                    faces.push([id(a - 1, b + 1, c), id(a - 2, b + 1, c + 1), id(a - 1, b, c + 1)]);
                }
            }
        }
    }
    debug_assert_eq!(faces.len(), 20 * nu * nu);

    // Face adjacency across shared edges; every edge must appear in exactly two faces.
    let mut half_edges: HashMap<(u32, u32), (u32, u32)> = HashMap::with_capacity(30 * nu * nu);
    let mut face_adj = vec![[u32::MAX; 3]; faces.len()];
    for (fi, f) in faces.iter().enumerate() {
        for s in 0..3 {
            let (u, v) = (f[(s + 1) % 3], f[(s + 2) % 3]);
            let key = (u.min(v), u.max(v));
            match half_edges.remove(&key) {
                None => {
                    half_edges.insert(key, (fi as u32, s as u32));
                }
                Some((other_f, other_s)) => {
                    face_adj[fi][s] = other_f;
                    face_adj[other_f as usize][other_s as usize] = fi as u32;
                }
            }
        }
    }
    if !half_edges.is_empty() {
        return Err(Error::Invariant(format!(
            "{} edges are not shared by exactly two faces",
            half_edges.len()
        )));
    }

    // Vertex adjacency in CSR form, from the deduplicated edge set.
    let mut edges: Vec<u64> = Vec::with_capacity(3 * faces.len());
    for f in &faces {
        for (u, v) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let (lo, hi) = (u.min(v) as u64, u.max(v) as u64);
            edges.push(lo << 32 | hi);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut degree = vec![0u32; vertex_count];
    for &e in &edges {
        degree[(e >> 32) as usize] += 1;
        degree[(e & 0xffff_ffff) as usize] += 1;
    }
    let mut adj_offsets = vec![0u32; vertex_count + 1];
    for v in 0..vertex_count {
        adj_offsets[v + 1] = adj_offsets[v] + degree[v];
    }
    let mut adj = vec![0u32; 2 * edges.len()];
    let mut cursor: Vec<u32> = adj_offsets[..vertex_count].to_vec();
    for &e in &edges {
        let (u, v) = ((e >> 32) as usize, (e & 0xffff_ffff) as usize);
        adj[cursor[u] as usize] = v as u32;
        cursor[u] += 1;
        adj[cursor[v] as usize] = u as u32;
        cursor[v] += 1;
    }

    Ok(IcosaTriangulation {
        n,
        points,
        faces,
        face_adj,
        adj_offsets,
        adj,
    })
}

impl IcosaTriangulation {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn point(&self, v: usize) -> &UnitPoint {
        &self.points[v]
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    /// Neighbors of vertex `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.adj_offsets[v] as usize..self.adj_offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Face across the edge opposite corner `slot` of face `f`.
    pub fn face_neighbor(&self, f: usize, slot: usize) -> usize {
        self.face_adj[f][slot] as usize
    }

    /// Contract bound `sqrt(3) (3 - sqrt(5)) / N` on curvilinear face diameters.
    pub fn diameter_bound(&self) -> f64 {
        crate::tri_diameter_coeff() / self.n as f64
    }

    /// Maximum sampled Euclidean diameter over the projected (curvilinear)
    /// faces; boundary great-circle arcs carry `per_arc` interior samples.
    pub fn max_curvilinear_diameter(&self, per_arc: usize) -> f64 {
        let steps = per_arc + 1;
        let mut samples: Vec<[f64; 3]> = Vec::with_capacity(3 * steps);
        let mut max2 = 0.0f64;
        for f in &self.faces {
            samples.clear();
            let pts = [
                self.points[f[0] as usize].as_array(),
                self.points[f[1] as usize].as_array(),
                self.points[f[2] as usize].as_array(),
            ];
            for s in 0..3 {
                let (a, b) = (pts[s], pts[(s + 1) % 3]);
                for t in 0..steps {
                    let w = t as f64 / steps as f64;
                    let v = [
                        a[0] * (1.0 - w) + b[0] * w,
                        a[1] * (1.0 - w) + b[1] * w,
                        a[2] * (1.0 - w) + b[2] * w,
                    ];
                    let norm = sphere::norm(v);
                    samples.push([v[0] / norm, v[1] / norm, v[2] / norm]);
                }
            }
            for (i, p) in samples.iter().enumerate() {
                for q in &samples[i + 1..] {
                    let dx = p[0] - q[0];
                    let dy = p[1] - q[1];
                    let dz = p[2] - q[2];
                    let d2 = dx * dx + dy * dy + dz * dz;
                    if d2 > max2 {
                        max2 = d2;
                    }
                }
            }
        }
        max2.sqrt()
    }

    /// Minimum interior angle over all planar faces (corner vertices on the sphere).
    pub fn min_planar_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for f in &self.faces {
            let pts = [
                self.points[f[0] as usize].as_array(),
                self.points[f[1] as usize].as_array(),
                self.points[f[2] as usize].as_array(),
            ];
            for s in 0..3 {
                let o = pts[s];
                let u = sub(pts[(s + 1) % 3], o);
                let v = sub(pts[(s + 2) % 3], o);
                let angle = sphere::norm(sphere::cross(u, v)).atan2(sphere::dot(u, v));
                if angle < min {
                    min = angle;
                }
            }
        }
        min
    }

    /// Smallest distance from a face plane to the origin; positive for every
    /// face means barycentric point location along radial rays is well posed.
    pub fn min_plane_offset(&self) -> f64 {
        let mut min = f64::INFINITY;
        for f in &self.faces {
            let a = self.points[f[0] as usize].as_array();
            let b = self.points[f[1] as usize].as_array();
            let c = self.points[f[2] as usize].as_array();
            let normal = sphere::cross(sub(b, a), sub(c, a));
            let nn = sphere::norm(normal);
            let d = sphere::dot(normal, a).abs() / nn;
            if d < min {
                min = d;
            }
        }
        min
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
