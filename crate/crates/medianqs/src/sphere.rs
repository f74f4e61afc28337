//! Points on the unit sphere and the two metrics used by the solver.
//!
//! Colatitude `theta` runs in `[0, pi]` from the north pole `(0, 0, 1)`;
//! azimuth `phi` runs in `[0, 2*pi)` counterclockwise from the positive x
//! axis. Both representations are stored so partition lookups never pay for
//! a coordinate transform.

use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A point on the unit sphere, kept in both Cartesian and spherical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitPoint {
    x: f64,
    y: f64,
    z: f64,
    theta: f64,
    phi: f64,
}

impl UnitPoint {
    /// Builds a point from Cartesian coordinates; the norm must be 1 within 1e-12.
    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm2 = x * x + y * y + z * z;
        if (norm2 - 1.0).abs() > 3e-12 {
            return Err(Error::Parameter(format!(
                "point ({x}, {y}, {z}) is not on the unit sphere (|p|^2 = {norm2})"
            )));
        }
        let theta = z.clamp(-1.0, 1.0).acos();
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += TWO_PI;
        }
        if phi >= TWO_PI {
            phi = 0.0;
        }
        Ok(UnitPoint { x, y, z, theta, phi })
    }

    /// Builds a point from colatitude `theta in [0, pi]` and azimuth `phi in [0, 2*pi)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Parameter(format!(
                "colatitude {theta} outside [0, pi]"
            )));
        }
        if !(0.0..TWO_PI).contains(&phi) {
            return Err(Error::Parameter(format!("azimuth {phi} outside [0, 2*pi)")));
        }
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        Ok(UnitPoint {
            x: st * cp,
            y: st * sp,
            z: ct,
            theta,
            phi,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Colatitude in `[0, pi]`, measured from `(0, 0, 1)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Azimuth in `[0, 2*pi)`, measured from the positive x axis.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Radially projects a nonzero vector onto the sphere; the zero vector is rejected.
pub fn radial_project(v: [f64; 3]) -> Result<UnitPoint> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Parameter(format!(
            "cannot radially project ({}, {}, {}): norm {norm}",
            v[0], v[1], v[2]
        )));
    }
    UnitPoint::from_xyz(v[0] / norm, v[1] / norm, v[2] / norm)
}

/// Chordal (Euclidean) distance between two points on the sphere.
pub fn euclidean_dist(p: &UnitPoint, q: &UnitPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Geodesic (great-circle) distance; the dot product is clamped to [-1, 1]
/// before `acos` so near-antipodal rounding cannot produce NaN.
pub fn spherical_dist(p: &UnitPoint, q: &UnitPoint) -> f64 {
    let dot = p.x * q.x + p.y * q.y + p.z * q.z;
    dot.clamp(-1.0, 1.0).acos()
}

/// Row-major rotation matrix acting on column vectors.
pub type Rotation = [[f64; 3]; 3];

/// Deterministic generic rotation: a seeded random axis and a small angle.
/// Used to break symmetry in inputs whose level sets align with the mesh.
pub fn rotation_from_seed(seed: u64) -> Rotation {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let axis = loop {
        let v = [
            rng.gen_range(-1.0f64..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = norm(v);
        if (0.1..=1.0).contains(&n) {
            break [v[0] / n, v[1] / n, v[2] / n];
        }
    };
    let angle = rng.gen_range(0.15f64..0.55);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [ux, uy, uz] = axis;
    [
        [c + ux * ux * t, ux * uy * t - uz * s, ux * uz * t + uy * s],
        [uy * ux * t + uz * s, c + uy * uy * t, uy * uz * t - ux * s],
        [uz * ux * t - uy * s, uz * uy * t + ux * s, c + uz * uz * t],
    ]
}

/// Applies a rotation to a point, renormalizing away rounding drift.
pub fn rotate_point(r: &Rotation, p: &UnitPoint) -> UnitPoint {
    let v = p.as_array();
    let out = [
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    ];
    radial_project(out).expect("rotation of a unit vector is nonzero")
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> UnitPoint {
        // Rejection-sampled Gaussian direction, uniform on the sphere.
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = norm(v);
            if n > 1e-3 {
                return radial_project(v).unwrap();
            }
        }
    }

    #[test]
    fn poles_and_equator() {
        let north = UnitPoint::from_xyz(0.0, 0.0, 1.0).unwrap();
        let south = UnitPoint::from_xyz(0.0, 0.0, -1.0).unwrap();
        let east = UnitPoint::from_xyz(1.0, 0.0, 0.0).unwrap();
        assert_eq!(north.theta(), 0.0);
        assert_eq!(south.theta(), std::f64::consts::PI);
        assert!((east.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(east.phi(), 0.0);
        assert_eq!(euclidean_dist(&north, &south), 2.0);
        assert!((spherical_dist(&north, &south) - std::f64::consts::PI).abs() < 1e-15);
        assert!((spherical_dist(&north, &east) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn from_spherical_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let phi = rng.gen_range(0.0..TWO_PI);
            let p = UnitPoint::from_spherical(theta, phi).unwrap();
            let q = UnitPoint::from_xyz(p.x(), p.y(), p.z()).unwrap();
            assert!((p.theta() - q.theta()).abs() < 1e-12);
            assert!((p.phi() - q.phi()).abs() < 1e-9 || (p.phi() - q.phi()).abs() > TWO_PI - 1e-9);
        }
    }

    #[test]
    fn radial_project_scales_and_rejects_zero() {
        let p = radial_project([0.3, -0.4, 1.2]).unwrap();
        let q = radial_project([3.0, -4.0, 12.0]).unwrap();
        assert!(euclidean_dist(&p, &q) < 1e-15);
        assert!(radial_project([0.0, 0.0, 0.0]).is_err());
        assert!(radial_project([f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn seam_azimuth_is_zero_not_two_pi() {
        // atan2 returns -0.0 for points with y = -0.0; phi must normalize to 0.
        let p = UnitPoint::from_xyz(1.0, -0.0, 0.0).unwrap();
        assert_eq!(p.phi(), 0.0);
    }

    #[test]
    fn metric_comparison_on_random_pairs() {
        // d <= D <= (pi/2) d on 1e5 random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100_000 {
            let p = random_point(&mut rng);
            let q = random_point(&mut rng);
            let d = euclidean_dist(&p, &q);
            let big_d = spherical_dist(&p, &q);
            assert!(d <= big_d + 1e-12);
            assert!(big_d <= std::f64::consts::FRAC_PI_2 * d + 1e-12);
        }
    }

    #[test]
    fn seeded_rotation_is_orthogonal_and_deterministic() {
        let r = rotation_from_seed(9);
        let r2 = rotation_from_seed(9);
        assert_eq!(r, r2);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(r[i], r[j]) - expect).abs() < 1e-14);
            }
        }
        let p = UnitPoint::from_xyz(0.0, 0.0, 1.0).unwrap();
        let q = rotate_point(&r, &p);
        let moved = spherical_dist(&p, &q);
        assert!(moved > 0.0 && moved < 0.6);
    }

    #[test]
    fn near_antipodal_dot_is_clamped() {
        let p = UnitPoint::from_xyz(1.0, 0.0, 0.0).unwrap();
        let eps = 1e-8;
        let q = radial_project([-1.0, eps, 0.0]).unwrap();
        let d = spherical_dist(&p, &q);
        assert!(d.is_finite());
        assert!(d <= std::f64::consts::PI);
        assert!(d > std::f64::consts::PI - 1e-7);
    }
}
