//! Planar vector primitives, counterclockwise angles, bearings, and the
//! signed boundary-distance measurement model.
//!
//! Everything here is a pure function of value types. The field is a flat
//! plane in units of 100 m; no geodetic corrections.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Distance below which a bearing toward the estimated center is treated
/// as singular. The closed loop keeps agents strictly away from the
/// center, so a violation indicates a bug and is reported as an error
/// rather than regularized.
pub const SINGULARITY_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate zero-length vector in angle computation")]
    DegenerateVector,
    #[error("bearing singularity: agent within {distance:e} of the estimated center")]
    BearingSingularity { distance: f64 },
    #[error("invalid target radius {r} (must be > 0)")]
    InvalidRadius { r: f64 },
}

/// Planar position or velocity in field units (1 unit = 100 m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product of the two vectors embedded in
    /// the plane; positive when `other` is counterclockwise of `self`.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Largest absolute component.
    #[inline]
    pub fn amax(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An angle normalized into [0, 2π) at construction; never stored outside
/// that range, which makes the angular-separation positivity invariant
/// directly assertable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps an arbitrary finite angle into [0, 2π).
    pub fn new(radians: f64) -> Self {
        debug_assert!(radians.is_finite());
        let mut r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs.
        if r >= TAU {
            r = 0.0;
        }
        Angle(r)
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// Quarter-turn rotation `E·v = (v_y, -v_x)`; the perpendicular used by
/// the tangential component of the control law.
#[inline]
pub fn rotate90(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// Counterclockwise angle from `v1` to `v2`, in [0, 2π).
///
/// Computed as `atan2(cross, dot)` wrapped into [0, 2π); for planar
/// vectors this matches the half-angle form used in consensus analyses.
pub fn ccw_angle(v1: Vec2, v2: Vec2) -> Result<Angle, GeometryError> {
    if v1.norm_squared() == 0.0 || v2.norm_squared() == 0.0 {
        return Err(GeometryError::DegenerateVector);
    }
    Ok(Angle::new(v1.cross(v2).atan2(v1.dot(v2))))
}

/// Unit vector from `p` toward the estimated center `c_hat`.
pub fn bearing(c_hat: Vec2, p: Vec2) -> Result<Vec2, GeometryError> {
    let d = c_hat - p;
    let dist = d.norm();
    if dist <= SINGULARITY_EPS {
        return Err(GeometryError::BearingSingularity { distance: dist });
    }
    Ok(d * (1.0 / dist))
}

/// Signed distance from `p` to the boundary of the circle `(c, r)`:
/// positive outside, negative inside, zero on the boundary.
pub fn signed_boundary_distance(p: Vec2, c: Vec2, r: f64) -> Result<f64, GeometryError> {
    if !(r > 0.0) {
        return Err(GeometryError::InvalidRadius { r });
    }
    Ok((c - p).norm() - r)
}
