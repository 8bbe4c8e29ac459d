//! Points, closed contours and oriented solid angles in the three-dimensional
//! parameter space `R = (X, Y, Z)` surrounding a degeneracy.

use std::f64::consts::{FRAC_PI_8, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("degenerate contour: {0}")]
    DegenerateContour(String),
}

/// A point of parameter space with its spherical coordinates cached.
///
/// `theta` is in `[0, pi]`, `phi` in `[0, 2 pi)`. At the origin both angles
/// are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    x: f64,
    y: f64,
    z: f64,
    r: f64,
    theta: f64,
    phi: f64,
}

impl ParamPoint {
    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        let r = (x * x + y * y + z * z).sqrt();
        let theta = if r > 0.0 { (z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        let phi = {
            let p = y.atan2(x);
            if p < 0.0 {
                (p + TAU).min(TAU.next_down())
            } else {
                p
            }
        };
        Self { x, y, z, r, theta, phi }
    }

    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let mut p = Self::from_cartesian(r * st * cp, r * st * sp, r * ct);
        // keep the caller's angles exactly when they are already canonical
        if r > 0.0 && (0.0..=PI).contains(&theta) {
            p.theta = theta;
            p.phi = phi.rem_euclid(TAU);
        }
        p
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::from_cartesian(v.x, v.y, v.z)
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
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn unit(&self) -> Vector3<f64> {
        self.vector() / self.r
    }
}

/// A closed, ordered loop of points on a sphere about the origin.
///
/// Only the distinct samples are stored; the segment from the last sample back
/// to the first closes the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    points: Vec<ParamPoint>,
}

pub const MIN_CONTOUR_SAMPLES: usize = 16;
const MAX_SEPARATION: f64 = FRAC_PI_8;

impl Contour {
    /// Validate and wrap a list of samples. If the list repeats its first
    /// point at the end, the duplicate is dropped.
    pub fn new(mut points: Vec<ParamPoint>) -> Result<Self, GeometryError> {
        if points.len() >= 2 {
            let first = points[0].vector();
            let last = points[points.len() - 1].vector();
            if (first - last).norm() <= 1e-12 * first.norm().max(1.0) {
                points.pop();
            }
        }
        if points.len() < MIN_CONTOUR_SAMPLES {
            return Err(GeometryError::BadArgument(format!(
                "a contour needs at least {MIN_CONTOUR_SAMPLES} samples, got {}",
                points.len()
            )));
        }
        let r0 = points[0].r();
        if !(r0 > 0.0) {
            return Err(GeometryError::BadArgument("contour radius must be positive".into()));
        }
        if let Some(bad) = points.iter().find(|p| (p.r() - r0).abs() > 1e-10 * r0.max(1.0)) {
            return Err(GeometryError::BadArgument(format!(
                "contour points must share one radius ({r0} vs {})",
                bad.r()
            )));
        }
        let n = points.len();
        for k in 0..n {
            let a = points[k].unit();
            let b = points[(k + 1) % n].unit();
            let sep = a.dot(&b).clamp(-1.0, 1.0).acos();
            if sep > MAX_SEPARATION * (1.0 + 1e-12) {
                return Err(GeometryError::BadArgument(format!(
                    "adjacent samples {k} and {} are {sep:.4} rad apart (limit pi/8)",
                    (k + 1) % n
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ParamPoint] {
        &self.points
    }

    pub fn samples(&self) -> usize {
        self.points.len()
    }

    pub fn radius(&self) -> f64 {
        self.points[0].r()
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Apply a rotation matrix to every sample.
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Result<Self, GeometryError> {
        Self::new(
            self.points
                .iter()
                .map(|p| ParamPoint::from_vector(&(rotation * p.vector())))
                .collect(),
        )
    }

    /// Iterate over the closing segments `(p_k, p_{k+1})`, including the last
    /// one back to the start.
    pub fn segments(&self) -> impl Iterator<Item = (&ParamPoint, &ParamPoint)> {
        let n = self.points.len();
        (0..n).map(move |k| (&self.points[k], &self.points[(k + 1) % n]))
    }
}

impl Serialize for Contour {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rows: Vec<[f64; 3]> = self.points.iter().map(|p| [p.x, p.y, p.z]).collect();
        rows.push(rows[0]);
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<[f64; 3]>::deserialize(deserializer)?;
        Contour::new(
            rows.into_iter()
                .map(|[x, y, z]| ParamPoint::from_cartesian(x, y, z))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Latitude circle `theta = const` traversed counterclockwise seen from `+z`.
pub fn latitude_contour(r: f64, theta: f64, samples: usize) -> Result<Contour, GeometryError> {
    if !(r > 0.0) {
        return Err(GeometryError::BadArgument(format!("radius must be positive, got {r}")));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(GeometryError::BadArgument(format!(
            "polar angle must lie strictly inside (0, pi), got {theta}"
        )));
    }
    let points = (0..samples)
        .map(|k| ParamPoint::from_spherical(r, theta, TAU * k as f64 / samples as f64))
        .collect();
    Contour::new(points)
}

/// Signed area of the spherical triangle spanned by three unit vectors,
/// positive for counterclockwise order seen from outside.
fn triangle_excess(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Oriented solid angle enclosed by a contour, as the fan of spherical
/// triangles anchored at the north pole.
///
/// Counterclockwise loops seen from `+z` are positive. The fan is summed
/// without reduction, so a loop that winds `k` times returns `k` times the
/// area; values for loops that separate the poles are defined modulo `4 pi`.
pub fn solid_angle(c: &Contour) -> Result<f64, GeometryError> {
    let north = Vector3::z();
    let mut total = 0.0;
    for (k, (p, q)) in c.segments().enumerate() {
        let a = p.unit();
        let b = q.unit();
        if (a - b).norm() < 1e-14 {
            return Err(GeometryError::DegenerateContour(format!(
                "samples {k} and {} coincide",
                (k + 1) % c.samples()
            )));
        }
        if (a + north).norm() < 1e-12 || (b + north).norm() < 1e-12 {
            return Err(GeometryError::DegenerateContour(
                "contour passes through the south pole, the enclosed area is ambiguous".into(),
            ));
        }
        total += triangle_excess(&north, &a, &b);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spherical_round_trip() {
        let p = ParamPoint::from_cartesian(0.3, -1.2, 0.7);
        let q = ParamPoint::from_spherical(p.r(), p.theta(), p.phi());
        assert_abs_diff_eq!((p.vector() - q.vector()).norm(), 0.0, epsilon = 1e-12 * p.r());
        assert!(p.phi() >= 0.0 && p.phi() < TAU);
    }

    #[test]
    fn equator_lies_in_the_plane() {
        let c = latitude_contour(1.0, PI / 2.0, 360).unwrap();
        assert!(c.points().iter().all(|p| p.z().abs() < 1e-15));
        assert_abs_diff_eq!(solid_angle(&c).unwrap(), TAU, epsilon = 1e-9);
    }

    #[test]
    fn latitude_height_matches() {
        let c = latitude_contour(2.0, PI / 3.0, 64).unwrap();
        assert!(c.points().iter().all(|p| (p.z() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn poles_and_bad_radius_rejected() {
        assert!(matches!(latitude_contour(1.0, 0.0, 64), Err(GeometryError::BadArgument(_))));
        assert!(matches!(latitude_contour(1.0, PI, 64), Err(GeometryError::BadArgument(_))));
        assert!(matches!(latitude_contour(0.0, 1.0, 64), Err(GeometryError::BadArgument(_))));
        assert!(matches!(latitude_contour(1.0, 1.0, 8), Err(GeometryError::BadArgument(_))));
    }

    #[test]
    fn cap_area_and_reversal() {
        let theta = 0.9;
        let c = latitude_contour(1.0, theta, 20_000).unwrap();
        let omega = solid_angle(&c).unwrap();
        // geodesic chords cut the small circle, O(1/n^2) short of the cap
        assert_abs_diff_eq!(omega, TAU * (1.0 - theta.cos()), epsilon = 1e-7);
        assert_abs_diff_eq!(solid_angle(&c.reversed()).unwrap(), -omega, epsilon = 1e-12);
    }

    #[test]
    fn coincident_samples_rejected() {
        let mut pts: Vec<ParamPoint> = latitude_contour(1.0, 1.0, 32).unwrap().points().to_vec();
        let dup = pts[3];
        pts.insert(3, dup);
        let c = Contour { points: pts };
        assert!(matches!(solid_angle(&c), Err(GeometryError::DegenerateContour(_))));
    }

    #[test]
    fn json_round_trip_closes_loop() {
        let c = latitude_contour(1.5, 1.1, 16).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let rows: Vec<[f64; 3]> = serde_json::from_str(&text).unwrap();
        assert_eq!(rows.len(), 17);
        assert_eq!(rows[0], rows[16]);
        let back: Contour = serde_json::from_str(&text).unwrap();
        assert_eq!(back.samples(), 16);
    }
}
