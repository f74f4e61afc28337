//! Piecewise linear scalar fields on a triangulation.
//!
//! A field stores one value per vertex plus the Lipschitz bound of the input
//! it was sampled from. Vertices are ordered by the strict total order
//! `(value, index)`, so ties are broken combinatorially and no numeric
//! perturbation is ever applied. Off-vertex evaluation interpolates
//! barycentrically on the planar face hit by the radial ray through the query
//! point, located by a neighbor-to-neighbor walk.

use crate::function::InputFunction;
use crate::sphere::{self, UnitPoint};
use crate::triangulation::IcosaTriangulation;
use crate::{Error, Result};

/// Scalar field given by values at the vertices of a triangulation.
#[derive(Clone, Debug)]
pub struct ScalarField<'a> {
    tri: &'a IcosaTriangulation,
    values: Vec<f64>,
    lip_bound: f64,
    /// One face incident to each base corner, used to seed point location.
    start_faces: [u32; 12],
}

impl<'a> ScalarField<'a> {
    /// Samples `f` at every vertex.
    pub fn sample(tri: &'a IcosaTriangulation, f: &InputFunction) -> Result<ScalarField<'a>> {
        let values = match f {
            InputFunction::VertexTable(t) => {
                if t.n != tri.n() {
                    return Err(Error::Parameter(format!(
                        "vertex table is for N = {} but the triangulation has N = {}",
                        t.n,
                        tri.n()
                    )));
                }
                (0..tri.vertex_count())
                    .map(|v| f.evaluate_at_vertex(v, tri.point(v)))
                    .collect::<Result<Vec<f64>>>()?
            }
            InputFunction::Polynomial(_) => tri
                .points()
                .iter()
                .map(|p| f.evaluate(p))
                .collect::<Result<Vec<f64>>>()?,
        };
        Self::from_values(tri, values, f.lip_bound()?)
    }

    /// Wraps explicit per-vertex values with a Lipschitz bound for the input.
    pub fn from_values(
        tri: &'a IcosaTriangulation,
        values: Vec<f64>,
        lip_bound: f64,
    ) -> Result<ScalarField<'a>> {
        if values.len() != tri.vertex_count() {
            return Err(Error::Parameter(format!(
                "{} values for {} vertices",
                values.len(),
                tri.vertex_count()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("field values must be finite".into()));
        }
        if !(lip_bound.is_finite() && lip_bound >= 0.0) {
            return Err(Error::Parameter("Lipschitz bound must be finite and >= 0".into()));
        }
        let mut start_faces = [u32::MAX; 12];
        let mut found = 0;
        for (fi, face) in tri.faces().iter().enumerate() {
            for &v in face {
                if v < 12 && start_faces[v as usize] == u32::MAX {
                    start_faces[v as usize] = fi as u32;
                    found += 1;
                }
            }
            if found == 12 {
                break;
            }
        }
        Ok(ScalarField {
            tri,
            values,
            lip_bound,
            start_faces,
        })
    }

    pub fn triangulation(&self) -> &'a IcosaTriangulation {
        self.tri
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn lip_bound(&self) -> f64 {
        self.lip_bound
    }

    /// Strict total order on vertices: by value, ties by index.
    pub fn less(&self, u: usize, v: usize) -> bool {
        (self.values[u], u) < (self.values[v], v)
    }

    /// Vertex indices sorted ascending in the strict total order.
    pub fn order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.values.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            let (x, y) = (self.values[a as usize], self.values[b as usize]);
            x.partial_cmp(&y).unwrap().then(a.cmp(&b))
        });
        order
    }

    /// Minimum vertex in the strict total order.
    pub fn global_min_vertex(&self) -> usize {
        (0..self.values.len()).reduce(|a, b| if self.less(b, a) { b } else { a }).unwrap()
    }

    /// Sup-norm bound `lip * sqrt(3) (3 - sqrt(5)) / N` on the replacement error.
    pub fn pl_sup_error_bound(&self) -> f64 {
        self.lip_bound * crate::tri_diameter_coeff() / self.tri.n() as f64
    }

    /// Lipschitz bound `lip * pi (13 + 6 sqrt(5)) / 11` of the interpolant itself.
    pub fn pl_lip_bound(&self) -> f64 {
        self.lip_bound * crate::pl_lip_factor()
    }

    /// Interpolated value at an arbitrary point of the sphere.
    pub fn evaluate(&self, p: &UnitPoint) -> f64 {
        let f = self.locate_face(p);
        let lambda = self.radial_barycentric(f, p).1;
        let face = self.tri.faces()[f];
        lambda[0] * self.values[face[0] as usize]
            + lambda[1] * self.values[face[1] as usize]
            + lambda[2] * self.values[face[2] as usize]
    }

    /// Face whose radial cone contains `p`.
    pub fn locate_face(&self, p: &UnitPoint) -> usize {
        let start = self.start_faces[self.nearest_corner(p)] as usize;
        let max_steps = 10 * self.tri.n() as usize + 100;
        let mut f = start;
        let mut prev = usize::MAX;
        for _ in 0..max_steps {
            let (w, _) = self.radial_barycentric(f, p);
            let mut worst = 0;
            for s in 1..3 {
                if w[s] < w[worst] {
                    worst = s;
                }
            }
            if w[worst] >= -1e-12 {
                return f;
            }
            let next = self.tri.face_neighbor(f, worst);
            if next == prev {
                // Local ping-pong on a shared edge; accept the better side.
                return f;
            }
            prev = f;
            f = next;
        }
        log::warn!("face walk did not converge, falling back to exhaustive scan");
        let mut best = (f64::NEG_INFINITY, 0usize);
        for fi in 0..self.tri.face_count() {
            let (w, _) = self.radial_barycentric(fi, p);
            let min = w[0].min(w[1]).min(w[2]);
            if min > best.0 {
                best = (min, fi);
            }
        }
        best.1
    }

    /// Solves `p = w0 A + w1 B + w2 C` by Cramer's rule and returns both the
    /// raw weights (signs locate `p` relative to the radial cone) and the
    /// normalized barycentric coordinates on the face plane.
    fn radial_barycentric(&self, f: usize, p: &UnitPoint) -> ([f64; 3], [f64; 3]) {
        let face = self.tri.faces()[f];
        let a = self.tri.point(face[0] as usize).as_array();
        let b = self.tri.point(face[1] as usize).as_array();
        let c = self.tri.point(face[2] as usize).as_array();
        let q = p.as_array();
        let det = sphere::dot(a, sphere::cross(b, c));
        let w = [
            sphere::dot(q, sphere::cross(b, c)) / det,
            sphere::dot(a, sphere::cross(q, c)) / det,
            sphere::dot(a, sphere::cross(b, q)) / det,
        ];
        let sum = w[0] + w[1] + w[2];
        (w, [w[0] / sum, w[1] / sum, w[2] / sum])
    }

    fn nearest_corner(&self, p: &UnitPoint) -> usize {
        let q = p.as_array();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for c in 0..12 {
            let d = sphere::dot(self.tri.point(c).as_array(), q);
            if d > best.0 {
                best = (d, c);
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::InputFunction;
    use crate::sphere::radial_project;
    use crate::triangulation::build_triangulation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> UnitPoint {
        loop {
            let v = [
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n < 1.0 {
                return radial_project(v).unwrap();
            }
        }
    }

    #[test]
    fn sampling_z_stores_vertex_heights() {
        let tri = build_triangulation(4).unwrap();
        let f = InputFunction::builtin("z").unwrap();
        let field = ScalarField::sample(&tri, &f).unwrap();
        for v in 0..tri.vertex_count() {
            assert_eq!(field.value(v), tri.point(v).z());
        }
        let expected = 3.0_f64.sqrt() * crate::tri_diameter_coeff() / 4.0;
        assert!((field.pl_sup_error_bound() - expected).abs() < 1e-15);
        assert!((field.pl_lip_bound() - 3.0_f64.sqrt() * crate::pl_lip_factor()).abs() < 1e-15);
    }

    #[test]
    fn from_values_validates_input() {
        let tri = build_triangulation(2).unwrap();
        let n = tri.vertex_count();
        assert!(ScalarField::from_values(&tri, vec![0.0; n - 1], 1.0).is_err());
        assert!(ScalarField::from_values(&tri, vec![f64::NAN; n], 1.0).is_err());
        assert!(ScalarField::from_values(&tri, vec![0.0; n], -1.0).is_err());
        assert!(ScalarField::from_values(&tri, vec![0.0; n], 1.0).is_ok());
    }

    #[test]
    fn vertex_table_depth_must_match() {
        let tri = build_triangulation(3).unwrap();
        let json = format!(
            "{{\"N\": 2, \"values\": {:?}, \"lip_bound\": 1.0}}",
            vec![0.0; 42]
        );
        let f = InputFunction::from_json_str(&json).unwrap();
        assert!(ScalarField::sample(&tri, &f).is_err());
    }

    #[test]
    fn constant_field_orders_by_index() {
        let tri = build_triangulation(2).unwrap();
        let field = ScalarField::from_values(&tri, vec![7.0; tri.vertex_count()], 0.0).unwrap();
        let order = field.order();
        assert!(order.iter().enumerate().all(|(i, &v)| i == v as usize));
        assert_eq!(field.global_min_vertex(), 0);
    }

    #[test]
    fn order_is_a_permutation_sorted_by_value() {
        let tri = build_triangulation(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = ScalarField::from_values(&tri, values, 1.0).unwrap();
        let order = field.order();
        let mut seen = vec![false; tri.vertex_count()];
        for w in order.windows(2) {
            assert!(field.less(w[0] as usize, w[1] as usize));
        }
        for &v in &order {
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(field.global_min_vertex(), order[0] as usize);
    }

    #[test]
    fn evaluation_reproduces_vertex_values() {
        let tri = build_triangulation(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let field = ScalarField::from_values(&tri, values.clone(), 1.0).unwrap();
        for v in 0..tri.vertex_count() {
            let got = field.evaluate(tri.point(v));
            assert!((got - values[v]).abs() < 1e-9, "vertex {v}: {got} vs {}", values[v]);
        }
    }

    #[test]
    fn evaluation_stays_between_field_extremes() {
        let tri = build_triangulation(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..tri.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let field = ScalarField::from_values(&tri, values, 1.0).unwrap();
        for _ in 0..500 {
            let p = random_point(&mut rng);
            let v = field.evaluate(&p);
            assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }
    }

    #[test]
    fn interpolation_error_respects_sup_bound() {
        let tri = build_triangulation(8).unwrap();
        let f = InputFunction::builtin("z-shift-sq").unwrap();
        let field = ScalarField::sample(&tri, &f).unwrap();
        let bound = field.pl_sup_error_bound();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = random_point(&mut rng);
            let err = (field.evaluate(&p) - f.evaluate(&p).unwrap()).abs();
            assert!(err <= bound, "{err} > {bound}");
        }
    }

    #[test]
    fn locate_face_agrees_with_exhaustive_best() {
        let tri = build_triangulation(4).unwrap();
        let f = InputFunction::builtin("z").unwrap();
        let field = ScalarField::sample(&tri, &f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = random_point(&mut rng);
            let f1 = field.locate_face(&p);
            let (w, _) = field.radial_barycentric(f1, &p);
            assert!(w[0].min(w[1]).min(w[2]) >= -1e-12);
            // The walked face interpolates to the same value as the best
            // exhaustive face even when p lies on a shared edge.
            let mut best = (f64::NEG_INFINITY, 0usize);
            for fi in 0..tri.face_count() {
                let (w, _) = field.radial_barycentric(fi, &p);
                let min = w[0].min(w[1]).min(w[2]);
                if min > best.0 {
                    best = (min, fi);
                }
            }
            let via_best = {
                let lam = field.radial_barycentric(best.1, &p).1;
                let face = tri.faces()[best.1];
                lam[0] * field.value(face[0] as usize)
                    + lam[1] * field.value(face[1] as usize)
                    + lam[2] * field.value(face[2] as usize)
            };
            assert!((field.evaluate(&p) - via_best).abs() < 1e-9);
        }
    }
}
