//! Node placement, link geometry and random-waypoint UAV mobility.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::num::Real;

/// Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3D<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Position3D<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Horizontal (xy-plane) distance to `other`.
    pub fn horizontal_distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn cast<U: Real>(&self) -> Position3D<U> {
        Position3D::new(
            U::lit(self.x.as_f64()),
            U::lit(self.y.as_f64()),
            U::lit(self.z.as_f64()),
        )
    }
}

/// Euclidean distance between two nodes.
pub fn distance<T: Real>(a: &Position3D<T>, b: &Position3D<T>) -> T {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let dz = b.z - a.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Elevation angle in degrees between two nodes, `asin(|dz| / d)`.
pub fn elevation_angle_deg<T: Real>(a: &Position3D<T>, b: &Position3D<T>) -> Result<T> {
    let d = distance(a, b);
    if d <= T::zero() {
        return Err(Error::Domain(
            "elevation angle undefined for coincident points".into(),
        ));
    }
    let ratio = ((b.z - a.z).abs() / d).min(T::one());
    Ok(ratio.asin().to_degrees())
}

/// Positions of the center user (C), edge user (E), fusion center (F) and UAV (U),
/// plus the radius of the disk the UAV roams in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Topology<T> {
    pub pos_c: Position3D<T>,
    pub pos_e: Position3D<T>,
    pub pos_f: Position3D<T>,
    pub pos_u: Position3D<T>,
    pub mobility_radius: T,
}

impl<T: Real> Topology<T> {
    /// Builds a topology with the mobility radius set to half the C-F distance.
    pub fn new(
        pos_c: Position3D<T>,
        pos_e: Position3D<T>,
        pos_f: Position3D<T>,
        pos_u: Position3D<T>,
    ) -> Result<Self> {
        let radius = distance(&pos_c, &pos_f) / T::lit(2.0);
        let topo = Self {
            pos_c,
            pos_e,
            pos_f,
            pos_u,
            mobility_radius: radius,
        };
        topo.validate()?;
        Ok(topo)
    }

    /// Reference placement used throughout the numerical experiments.
    pub fn reference() -> Self {
        Self::new(
            Position3D::new(T::lit(-1.96), T::lit(7.33), T::zero()),
            Position3D::new(T::lit(-13.49), T::lit(-18.85), T::lit(0.23)),
            Position3D::new(T::zero(), T::zero(), T::zero()),
            Position3D::new(T::lit(-6.66), T::lit(-7.62), T::lit(6.77)),
        )
        .expect("reference topology is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let nodes = [
            ("pos_c", self.pos_c),
            ("pos_e", self.pos_e),
            ("pos_f", self.pos_f),
            ("pos_u", self.pos_u),
        ];
        for (name, p) in nodes {
            if !p.is_finite() {
                return Err(invalid(name, "coordinates must be finite"));
            }
            if p.z < T::zero() {
                return Err(invalid(name, "altitude must be non-negative"));
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if distance(&nodes[i].1, &nodes[j].1) <= T::zero() {
                    return Err(invalid(nodes[i].0, format!("coincides with {}", nodes[j].0)));
                }
            }
        }
        if !(self.mobility_radius > T::zero()) {
            return Err(invalid("mobility_radius", "must be positive"));
        }
        Ok(())
    }

    /// Same topology with the UAV moved to `pos_u`.
    pub fn with_uav(&self, pos_u: Position3D<T>) -> Self {
        Self { pos_u, ..*self }
    }

    /// UAV placed at `(r cos angle, r sin angle, z)` around the fusion center.
    pub fn with_uav_polar(&self, radius: T, angle_deg: T, altitude: T) -> Self {
        let a = angle_deg.to_radians();
        self.with_uav(Position3D::new(
            self.pos_f.x + radius * a.cos(),
            self.pos_f.y + radius * a.sin(),
            altitude,
        ))
    }
}

/// State of the random-waypoint process. Pause time at waypoints is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwpState<T> {
    pub current: Position3D<T>,
    pub waypoint: Position3D<T>,
    /// Meters travelled per step on the current leg.
    pub speed: T,
    pub center: Position3D<T>,
    pub radius: T,
    pub v_min: T,
    pub v_max: T,
}

impl<T: Real> RwpState<T> {
    /// Starts at `start` (normally the disk center) with a fresh waypoint and speed.
    pub fn new<R: Rng + ?Sized>(
        start: Position3D<T>,
        center: Position3D<T>,
        radius: T,
        v_min: T,
        v_max: T,
        rng: &mut R,
    ) -> Result<Self> {
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(invalid("radius", "must be finite and non-negative"));
        }
        if !(v_min > T::zero() && v_min <= v_max) {
            return Err(invalid("v_min", "require 0 < v_min <= v_max"));
        }
        let mut state = Self {
            current: start,
            waypoint: start,
            speed: v_min,
            center,
            radius,
            v_min,
            v_max,
        };
        if start.horizontal_distance(&center) > radius * (T::one() + T::epsilon()) {
            return Err(invalid("start", "must lie inside the mobility disk"));
        }
        state.waypoint = rwp_sample_waypoint(&state, rng);
        state.speed = sample_speed(&state, rng);
        Ok(state)
    }
}

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.gen::<f64>())
}

fn sample_speed<T: Real, R: Rng + ?Sized>(state: &RwpState<T>, rng: &mut R) -> T {
    state.v_min + (state.v_max - state.v_min) * uniform::<T, R>(rng)
}

/// Draws a waypoint uniformly over the mobility disk at the UAV altitude.
pub fn rwp_sample_waypoint<T: Real, R: Rng + ?Sized>(
    state: &RwpState<T>,
    rng: &mut R,
) -> Position3D<T> {
    let r = state.radius * uniform::<T, R>(rng).sqrt();
    let phi = T::TAU() * uniform::<T, R>(rng);
    Position3D::new(
        state.center.x + r * phi.cos(),
        state.center.y + r * phi.sin(),
        state.current.z,
    )
}

/// Advances one unit time step along the current leg.
pub fn rwp_step<T: Real, R: Rng + ?Sized>(state: &RwpState<T>, rng: &mut R) -> RwpState<T> {
    let mut next = *state;
    let remaining = state.current.horizontal_distance(&state.waypoint);
    if remaining <= state.speed {
        next.current = Position3D::new(state.waypoint.x, state.waypoint.y, state.current.z);
        next.waypoint = rwp_sample_waypoint(&next, rng);
        next.speed = sample_speed(&next, rng);
        return next;
    }
    // heading = sgn(dy) * acos(dx / |d|), with sgn(0) taken as +1
    let dx = state.waypoint.x - state.current.x;
    let dy = state.waypoint.y - state.current.y;
    let sign = if dy < T::zero() { -T::one() } else { T::one() };
    let heading = sign * (dx / remaining).max(-T::one()).min(T::one()).acos();
    next.current.x = state.current.x + state.speed * heading.cos();
    next.current.y = state.current.y + state.speed * heading.sin();
    next
}

/// Runs the process for `steps` steps and returns the visited positions,
/// starting with the initial one.
pub fn rwp_trace<T: Real, R: Rng + ?Sized>(
    state: &RwpState<T>,
    steps: usize,
    rng: &mut R,
) -> Vec<Position3D<T>> {
    let mut out = Vec::with_capacity(steps);
    let mut s = *state;
    for _ in 0..steps {
        out.push(s.current);
        s = rwp_step(&s, rng);
    }
    out
}
