//! Lattice, direction and phase-circle primitives.
//!
//! The surface lies in the `z = 0` plane, centered on the origin, with its
//! normal along `+z`. Polar angles are measured from `+z`, azimuths from `+x`.
//! Grids are stored row-major with `j` (the y index) selecting the row, so
//! element `(i, j)` lives at `j * nx + i`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, RisError};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Rectangular planar lattice of `nx * ny` cells with uniform pitch (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    nx: usize,
    ny: usize,
    pitch: f64,
}

impl ArrayGeometry {
    pub fn new(nx: usize, ny: usize, pitch: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(RisError::invalid(format!(
                "array dimensions must be at least 1x1, got {nx}x{ny}"
            )));
        }
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(RisError::invalid(format!(
                "pitch must be positive and finite, got {pitch}"
            )));
        }
        Ok(Self { nx, ny, pitch })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major index of element `(i, j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// x coordinate of column `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx as f64 - 1.0) / 2.0) * self.pitch
    }

    /// y coordinate of row `j`.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny as f64 - 1.0) / 2.0) * self.pitch
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Vec3 {
        [self.x(i), self.y(j), 0.0]
    }

    /// Physical side lengths `(nx * pitch, ny * pitch)` of the aperture.
    pub fn aperture(&self) -> (f64, f64) {
        (self.nx as f64 * self.pitch, self.ny as f64 * self.pitch)
    }
}

/// Positions of every element, row-major.
pub fn element_positions(g: &ArrayGeometry) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            out.push(g.position(i, j));
        }
    }
    out
}

/// `positions` displaced by `d`.
pub fn translate_positions(positions: &[Vec3], d: &Vec3) -> Vec<Vec3> {
    positions.iter().map(|p| add(p, d)).collect()
}

/// A direction on the unit sphere, `theta` from `+z` and `phi` from `+x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(RisError::invalid("direction angles must be finite"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(RisError::invalid(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !(-PI..PI).contains(&phi) {
            return Err(RisError::invalid(format!(
                "phi must lie in [-pi, pi), got {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(
            theta_deg.to_radians(),
            normalize_azimuth(phi_deg.to_radians()),
        )
    }

    pub fn broadside() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// Direction for a signed polar angle in the azimuth cut `phi_cut`.
    ///
    /// Negative `theta` maps to the opposite half of the cut, `(|theta|, phi_cut + pi)`.
    pub fn from_cut(theta: f64, phi_cut: f64) -> Result<Self> {
        if theta >= 0.0 {
            Self::new(theta, normalize_azimuth(phi_cut))
        } else {
            Self::new(-theta, normalize_azimuth(phi_cut + PI))
        }
    }

    /// Inverse of [`Direction::unit`]. The input need not be normalized.
    pub fn from_unit(v: &Vec3) -> Result<Self> {
        let r = norm(v);
        if !(r.is_finite() && r > 0.0) {
            return Err(RisError::invalid(
                "cannot take the direction of a zero vector",
            ));
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = normalize_azimuth(v[1].atan2(v[0]));
        Self::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit(&self) -> Vec3 {
        direction_to_unit(self)
    }
}

pub fn direction_to_unit(d: &Direction) -> Vec3 {
    let (st, ct) = d.theta.sin_cos();
    let (sp, cp) = d.phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Illumination of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedModel {
    /// Positioned source with a `cos^q` taper about its boresight, which is
    /// pointed at the array center. `spreading` applies a `1/r` amplitude.
    PointSource {
        position: Vec3,
        taper_exponent: f64,
        spreading: bool,
    },
    /// Plane wave arriving from `incidence` (the direction toward the source).
    PlaneWave {
        incidence: Direction,
        amplitude: f64,
    },
}

impl FeedModel {
    pub fn point_source(position: Vec3, taper_exponent: f64, spreading: bool) -> Result<Self> {
        if !position.iter().all(|c| c.is_finite()) || position[2] <= 0.0 {
            return Err(RisError::invalid(format!(
                "point source must sit above the surface (z > 0), got {position:?}"
            )));
        }
        if !(taper_exponent.is_finite() && taper_exponent >= 0.0) {
            return Err(RisError::invalid(format!(
                "taper exponent must be >= 0, got {taper_exponent}"
            )));
        }
        Ok(FeedModel::PointSource {
            position,
            taper_exponent,
            spreading,
        })
    }

    pub fn plane_wave(incidence: Direction, amplitude: f64) -> Result<Self> {
        if incidence.theta() >= PI / 2.0 {
            return Err(RisError::invalid(format!(
                "plane wave must arrive from the upper half-space, got theta = {}",
                incidence.theta()
            )));
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(RisError::invalid(format!(
                "plane wave amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(FeedModel::PlaneWave {
            incidence,
            amplitude,
        })
    }

    /// The same feed displaced by `d`. Plane waves are unaffected.
    pub fn translated(&self, d: &Vec3) -> Self {
        match *self {
            FeedModel::PointSource {
                position,
                taper_exponent,
                spreading,
            } => FeedModel::PointSource {
                position: add(&position, d),
                taper_exponent,
                spreading,
            },
            pw @ FeedModel::PlaneWave { .. } => pw,
        }
    }
}

/// Map an azimuth into `[-pi, pi)`.
pub fn normalize_azimuth(phi: f64) -> f64 {
    let p = (phi + PI).rem_euclid(TAU) - PI;
    if p >= PI {
        -PI
    } else {
        p
    }
}

/// Reduce a phase to `[0, 2pi)`.
pub fn wrap_phase(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(RisError::invalid(format!(
            "cannot wrap non-finite phase {x}"
        )));
    }
    Ok(wrap(x))
}

#[inline]
pub(crate) fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two phases on the circle, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TAU - d)
}

/// Wrap a phase difference to `(-pi, pi]`, i.e. the nearest branch.
#[inline]
pub(crate) fn nearest_branch(d: f64) -> f64 {
    let w = wrap(d);
    if w > PI {
        w - TAU
    } else {
        w
    }
}
