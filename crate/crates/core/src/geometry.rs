//! Embedding domains, uniform point sampling, metrics and the density of
//! pairwise distances.
//!
//! Two unit-volume domain families are supported in dimensions 1–3: the unit
//! interval/square/cube (with boundary) and the unit torus, where each
//! coordinate difference wraps around.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, Integral, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `[0,1]^d` with boundary.
    Cube,
    /// `[0,1)^d` with periodic identification.
    Torus,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Cube => f.write_str("cube"),
            Shape::Torus => f.write_str("torus"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" | "square" | "interval" => Ok(Shape::Cube),
            "torus" => Ok(Shape::Torus),
            other => Err(Error::invalid(format!("unknown domain shape '{other}'"))),
        }
    }
}

/// A compact unit-volume embedding space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainSpec {
    dimension: usize,
    shape: Shape,
}

impl DomainSpec {
    pub fn new(dimension: usize, shape: Shape) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::UnsupportedDimension(dimension));
        }
        Ok(DomainSpec { dimension, shape })
    }

    pub fn unit_square() -> Self {
        DomainSpec {
            dimension: 2,
            shape: Shape::Cube,
        }
    }

    pub fn unit_torus(dimension: usize) -> Result<Self> {
        Self::new(dimension, Shape::Torus)
    }

    pub fn unit_cube(dimension: usize) -> Result<Self> {
        Self::new(dimension, Shape::Cube)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn volume(&self) -> f64 {
        1.0
    }

    /// Largest possible distance between two points.
    pub fn diameter(&self) -> f64 {
        let d = (self.dimension as f64).sqrt();
        match self.shape {
            Shape::Cube => d,
            Shape::Torus => 0.5 * d,
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for p in [a, b] {
            if p.len() != self.dimension {
                return Err(Error::Dimension {
                    expected: self.dimension,
                    got: p.len(),
                });
            }
        }
        Ok(self.distance_unchecked(a, b))
    }

    /// Distance without the dimension check; slices must have length `d`.
    #[inline]
    pub fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sq = 0.0;
        for (x, y) in a.iter().zip(b) {
            let mut delta = (x - y).abs();
            if self.shape == Shape::Torus && delta > 0.5 {
                delta = 1.0 - delta;
            }
            sq += delta * delta;
        }
        sq.sqrt()
    }

    /// `n` i.i.d. uniform points.
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PointSet {
        let coords = (0..n * self.dimension).map(|_| rng.gen::<f64>()).collect();
        PointSet {
            dimension: self.dimension,
            coords,
        }
    }

    /// Density `f_K(r)` of the distance between two independent uniform
    /// points.
    pub fn pair_distance_density(&self, r: f64) -> Result<f64> {
        let diameter = self.diameter();
        if !(0.0..=diameter).contains(&r) {
            return Err(Error::domain(format!(
                "distance {r} outside [0, {diameter}] for {self}"
            )));
        }
        Ok(self.density_unchecked(r))
    }

    pub(crate) fn density_unchecked(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return if self.dimension == 1 { 2.0 } else { 0.0 };
        }
        let value = match (self.shape, self.dimension) {
            (Shape::Cube, 1) => 2.0 * (1.0 - r),
            (Shape::Torus, 1) => {
                if r < 0.5 {
                    2.0
                } else {
                    0.0
                }
            }
            (Shape::Cube, 2) => square_density(r),
            (Shape::Torus, 2) => 4.0 * r * torus_arc(r),
            (Shape::Cube, 3) => cube3_density(r),
            (Shape::Torus, 3) => torus3_density(r),
            _ => unreachable!("dimension validated at construction"),
        };
        value.max(0.0)
    }

    /// `E[g(R)]` for the distance `R` between two uniform points, by
    /// quadrature over `[0, diameter]`. `scale` is the length on which `g`
    /// varies; geometric breakpoints around it resolve the peak.
    pub fn expect_over_distance<G: Fn(f64) -> f64>(&self, g: G, scale: f64) -> Result<Integral> {
        let diameter = self.diameter();
        let mut points = vec![0.0, diameter];
        points.extend(self.density_breakpoints());
        if scale > 0.0 {
            let mut x = scale / 64.0;
            while x < diameter && x < 64.0 * scale {
                points.push(x);
                x *= 2.0;
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        integrate_with_breaks(
            |r| self.density_unchecked(r) * g(r),
            &points,
            Tolerance::new(1e-300, 1e-12),
        )
    }

    /// Radii where the density changes analytic branch.
    pub fn density_breakpoints(&self) -> Vec<f64> {
        match (self.shape, self.dimension) {
            (Shape::Cube, 1) | (Shape::Torus, 1) => vec![],
            (Shape::Cube, 2) => vec![1.0],
            (Shape::Torus, 2) => vec![0.5],
            (Shape::Cube, 3) => vec![1.0, 2f64.sqrt()],
            (Shape::Torus, 3) => vec![0.5, 0.5 * 2f64.sqrt()],
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.shape, self.dimension)
    }
}

/// `omega_d`, the small-r coefficient with `f_K(r) ~ omega_d r^(d-1)`: the
/// surface area of the unit sphere in `R^d`.
pub fn small_r_sphere_area(d: usize) -> Result<f64> {
    match d {
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Square line picking.
fn square_density(r: f64) -> f64 {
    if r <= 1.0 {
        2.0 * r * (PI - 4.0 * r + r * r)
    } else {
        let arcsec = (1.0 / r).acos();
        2.0 * r * (4.0 * (r * r - 1.0).sqrt() - (r * r + 2.0 - PI) - 4.0 * arcsec)
    }
}

/// Angular measure of `{theta in [0, pi/2] : a cos(theta) <= 1/2, a sin(theta) <= 1/2}`.
fn torus_arc(a: f64) -> f64 {
    if a <= 0.5 {
        return FRAC_PI_2;
    }
    let c = (0.5 / a).min(1.0);
    (c.asin() - c.acos()).max(0.0)
}

/// `int (1 - a cos t)(1 - a sin t) dt` over the quarter circle where both
/// factors are non-negative.
fn cube_arc(a: f64) -> f64 {
    let (t1, t2) = if a <= 1.0 {
        (0.0, FRAC_PI_2)
    } else {
        let c = 1.0 / a;
        (c.acos(), c.asin())
    };
    if t2 <= t1 {
        return 0.0;
    }
    let antiderivative = |t: f64| t - a * t.sin() + a * t.cos() + 0.5 * a * a * t.sin().powi(2);
    (antiderivative(t2) - antiderivative(t1)).max(0.0)
}

fn angular_tolerance() -> Tolerance {
    Tolerance::new(1e-15, 1e-12)
}

fn cube3_density(r: f64) -> f64 {
    let lower = if r > 1.0 { (1.0 / r).acos() } else { 0.0 };
    let mut points = vec![lower];
    for edge in [1.0, 2f64.sqrt()] {
        if r > edge {
            let phi = (edge / r).asin();
            if phi > lower {
                points.push(phi);
            }
        }
    }
    points.push(FRAC_PI_2);
    points.sort_by(f64::total_cmp);
    let integrand = |phi: f64| phi.sin() * (1.0 - r * phi.cos()).max(0.0) * cube_arc(r * phi.sin());
    let inner = integrate_with_breaks(integrand, &points, angular_tolerance())
        .map(|i| i.value)
        .unwrap_or(f64::NAN);
    8.0 * r * r * inner
}

fn torus3_density(r: f64) -> f64 {
    let lower = if r > 0.5 { (0.5 / r).acos() } else { 0.0 };
    let mut points = vec![lower];
    for edge in [0.5, 0.5 * 2f64.sqrt()] {
        if r > edge {
            let phi = (edge / r).asin();
            if phi > lower {
                points.push(phi);
            }
        }
    }
    points.push(FRAC_PI_2);
    points.sort_by(f64::total_cmp);
    let integrand = |phi: f64| phi.sin() * torus_arc(r * phi.sin());
    let inner = integrate_with_breaks(integrand, &points, angular_tolerance())
        .map(|i| i.value)
        .unwrap_or(f64::NAN);
    8.0 * r * r * inner
}

/// `n` points in `[0,1]^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dimension: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dimension: usize, coords: Vec<f64>) -> Result<Self> {
        if dimension == 0 || coords.len() % dimension != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not form points of dimension {dimension}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::domain(format!("coordinate {bad} outside [0, 1]")));
        }
        Ok(PointSet { dimension, coords })
    }

    pub fn empty(dimension: usize) -> Self {
        PointSet {
            dimension,
            coords: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dimension)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}
