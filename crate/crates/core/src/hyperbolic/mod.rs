//! Upper half-space model of hyperbolic 3-space.
//!
//! Points are pairs `(z, t)` with `z` a horizontal complex coordinate and
//! `t > 0` the height. Orientation-preserving isometries are 2x2 complex
//! matrices of determinant 1 acting by the quaternionic Mobius extension
//! of their boundary action. Distances come from
//! `cosh d = 1 + (|z - z'|^2 + (t - t')^2) / (2 t t')`.

use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

pub mod feasibility;

/// Half-width of the fuzzy band around the parabolic/elliptic trace locus
/// inside which `classify` refuses to pick a type.
pub const CLASSIFY_BOUNDARY_TOL: f64 = 1e-9;

/// Determinant residue allowed after normalization.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("point must have positive finite height, got t = {t}")]
    InvalidPoint { t: f64 },
    #[error("matrix is numerically singular (|det| = {det_abs:.3e})")]
    SingularMatrix { det_abs: f64 },
    #[error("numeric overflow while applying isometry")]
    NumericOverflow,
    #[error("classification ambiguous within {tol:.1e} of the parabolic boundary (trace {trace})")]
    IndeterminateClassification { trace: Complex64, tol: f64 },
    #[error("geodesic endpoints must be distinct")]
    DegenerateGeodesic,
    #[error("element is not loxodromic ({got})")]
    NotLoxodromic { got: &'static str },
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of upper half-space: horizontal coordinate `z`, height `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    z: Complex64,
    t: f64,
}

impl Point {
    pub fn new(z: Complex64, t: f64) -> Result<Self, GeomError> {
        if !(t > 0.0) || !t.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(GeomError::InvalidPoint { t });
        }
        Ok(Point { z, t })
    }

    pub fn from_coords(x: f64, y: f64, t: f64) -> Result<Self, GeomError> {
        Point::new(Complex64::new(x, y), t)
    }

    /// Internal constructor for values that are positive by construction.
    pub(crate) fn raw(z: Complex64, t: f64) -> Self {
        debug_assert!(t > 0.0 && t.is_finite());
        Point { z, t }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Chart coordinates `(x, y, ln t)`; every chart triple is a valid point.
    pub fn chart(&self) -> [f64; 3] {
        [self.z.re, self.z.im, self.t.ln()]
    }

    pub fn from_chart(c: [f64; 3]) -> Self {
        Point::raw(Complex64::new(c[0], c[1]), c[2].exp())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}{:+.6}i, {:.6})", self.z.re, self.z.im, self.t)
    }
}

/// Hyperbolic distance between two points.
pub fn distance(p: &Point, q: &Point) -> f64 {
    let dz = p.z - q.z;
    let dt = p.t - q.t;
    let cosh_d = 1.0 + (dz.norm_sqr() + dt * dt) / (2.0 * p.t * q.t);
    cosh_d.max(1.0).acosh()
}

// ---------------------------------------------------------------------------
// Isometries
// ---------------------------------------------------------------------------

/// An orientation-preserving isometry, stored as a matrix normalized to
/// determinant 1. The matrices `g` and `-g` act identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Isometry {
    /// Builds an isometry from matrix entries, rescaling to determinant 1.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeomError> {
        let det = a * d - b * c;
        let det_abs = det.norm();
        if !det_abs.is_finite() || det_abs < 1e-30 {
            return Err(GeomError::SingularMatrix { det_abs });
        }
        let s = det.sqrt();
        let g = Isometry {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        };
        // residue scales with the cancellation in ad - bc
        let scale = 1.0 + g.a.norm_sqr().max(g.b.norm_sqr()).max(g.c.norm_sqr()).max(g.d.norm_sqr());
        debug_assert!((g.det() - Complex64::new(1.0, 0.0)).norm() <= DET_TOL * scale);
        Ok(g)
    }

    pub fn from_reals(m: [f64; 8]) -> Result<Self, GeomError> {
        Isometry::new(
            Complex64::new(m[0], m[1]),
            Complex64::new(m[2], m[3]),
            Complex64::new(m[4], m[5]),
            Complex64::new(m[6], m[7]),
        )
    }

    pub fn identity() -> Self {
        Isometry {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// Diagonal isometry `diag(mu, 1/mu)`; loxodromic with axis `(0, inf)`
    /// when `|mu| != 1`.
    pub fn diagonal(mu: Complex64) -> Result<Self, GeomError> {
        if mu.norm() < 1e-30 {
            return Err(GeomError::SingularMatrix { det_abs: 0.0 });
        }
        Ok(Isometry {
            a: mu,
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: 1.0 / mu,
        })
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn to_reals(&self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Matrix product; `self.compose(other)` acts as `self` after `other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Re-divides by the square root of the determinant; long products drift.
    pub fn renormalized(&self) -> Result<Isometry, GeomError> {
        Isometry::new(self.a, self.b, self.c, self.d)
    }

    pub fn conjugate(&self, by: &Isometry) -> Isometry {
        by.compose(self).compose(&by.inverse())
    }

    /// Sup-norm distance between matrices identified up to sign.
    pub fn proj_dist(&self, other: &Isometry) -> f64 {
        let plus = (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm());
        let minus = (self.a + other.a)
            .norm()
            .max((self.b + other.b).norm())
            .max((self.c + other.c).norm())
            .max((self.d + other.d).norm());
        plus.min(minus)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.proj_dist(&Isometry::identity()) <= tol
    }

    /// Quaternionic Mobius action on upper half-space.
    pub fn apply(&self, p: &Point) -> Result<Point, GeomError> {
        let w = self.c * p.z + self.d;
        let denom = w.norm_sqr() + self.c.norm_sqr() * p.t * p.t;
        if !denom.is_finite() || denom <= 0.0 {
            return Err(GeomError::NumericOverflow);
        }
        let num = (self.a * p.z + self.b) * w.conj() + self.a * self.c.conj() * p.t * p.t;
        let z = num / denom;
        let t = p.t / denom;
        if !t.is_finite() || t <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(GeomError::NumericOverflow);
        }
        Ok(Point::raw(z, t))
    }

    /// Boundary Mobius action on the Riemann sphere.
    pub fn mobius(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.norm() == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }
}

/// Hyperbolic displacement `d(p, g.p)`.
pub fn displacement(g: &Isometry, p: &Point) -> Result<f64, GeomError> {
    Ok(distance(p, &g.apply(p)?))
}

// ---------------------------------------------------------------------------
// Boundary points and geodesics
// ---------------------------------------------------------------------------

/// A point of the sphere at infinity: a complex number or the point at
/// infinity of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(Complex64),
    Infinity,
}

impl BoundaryPoint {
    /// Stereographic coordinates on the unit sphere; infinity is the north
    /// pole. Used for tolerance comparisons that must treat all boundary
    /// points uniformly.
    pub fn chart(&self) -> [f64; 3] {
        match self {
            BoundaryPoint::Infinity => [0.0, 0.0, 1.0],
            BoundaryPoint::Finite(z) => {
                let n = z.norm_sqr();
                let d = 1.0 + n;
                [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
            }
        }
    }

    pub fn chart_dist(&self, other: &BoundaryPoint) -> f64 {
        let a = self.chart();
        let b = other.chart();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => write!(f, "inf"),
            BoundaryPoint::Finite(z) => write!(f, "{:.6}{:+.6}i", z.re, z.im),
        }
    }
}

/// An unoriented-usable geodesic line given by its two distinct endpoints at
/// infinity. Loxodromic axes are stored `(repelling, attracting)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub e1: BoundaryPoint,
    pub e2: BoundaryPoint,
}

impl Geodesic {
    pub fn new(e1: BoundaryPoint, e2: BoundaryPoint) -> Result<Self, GeomError> {
        if e1.chart_dist(&e2) < 1e-14 {
            return Err(GeomError::DegenerateGeodesic);
        }
        Ok(Geodesic { e1, e2 })
    }

    /// The vertical axis `(0, inf)`.
    pub fn vertical_axis() -> Self {
        Geodesic {
            e1: BoundaryPoint::Finite(Complex64::new(0.0, 0.0)),
            e2: BoundaryPoint::Infinity,
        }
    }

    pub fn map(&self, g: &Isometry) -> Geodesic {
        Geodesic {
            e1: g.mobius(&self.e1),
            e2: g.mobius(&self.e2),
        }
    }

    /// Endpoint-set comparison, ignoring order, in the sphere chart.
    pub fn unordered_eq(&self, other: &Geodesic, tol: f64) -> bool {
        let straight =
            self.e1.chart_dist(&other.e1).max(self.e2.chart_dist(&other.e2));
        let crossed =
            self.e1.chart_dist(&other.e2).max(self.e2.chart_dist(&other.e1));
        straight.min(crossed) <= tol
    }

    /// An isometry sending `e1 -> 0` and `e2 -> inf`.
    pub fn to_standard(&self) -> Result<Isometry, GeomError> {
        match (self.e1, self.e2) {
            (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => Isometry::new(
                Complex64::new(1.0, 0.0),
                -p,
                Complex64::new(1.0, 0.0),
                -q,
            ),
            (BoundaryPoint::Finite(p), BoundaryPoint::Infinity) => Isometry::new(
                Complex64::new(1.0, 0.0),
                -p,
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ),
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(q)) => Isometry::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                -q,
            ),
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => {
                Err(GeomError::DegenerateGeodesic)
            }
        }
    }
}

/// Distance from a point to a geodesic line: conjugate the line to the
/// vertical axis, where `sinh(dist) = |z| / t`.
pub fn dist_point_to_line(p: &Point, line: &Geodesic) -> Result<f64, GeomError> {
    let m = line.to_standard()?;
    let q = m.apply(p)?;
    Ok((q.z().norm() / q.t()).asinh())
}

/// Orthogonal projection of a point onto a geodesic line.
pub fn nearest_point_on_line(p: &Point, line: &Geodesic) -> Result<Point, GeomError> {
    let m = line.to_standard()?;
    let q = m.apply(p)?;
    let h = (q.z().norm_sqr() + q.t() * q.t()).sqrt();
    m.inverse().apply(&Point::raw(Complex64::new(0.0, 0.0), h))
}

/// Distance between two geodesic lines (0 when they meet or share an
/// endpoint). Computed by a golden-section minimization of the distance
/// from points of the first line to the second; this function of arclength
/// is convex, so the minimum found is global to line-search tolerance.
pub fn dist_between_lines(l1: &Geodesic, l2: &Geodesic) -> Result<f64, GeomError> {
    if l1.e1.chart_dist(&l2.e1) < 1e-13
        || l1.e1.chart_dist(&l2.e2) < 1e-13
        || l1.e2.chart_dist(&l2.e1) < 1e-13
        || l1.e2.chart_dist(&l2.e2) < 1e-13
    {
        return Ok(0.0); // asymptotic or equal lines
    }
    let path = GeodesicPath::from_line(l1)?;
    let f = |s: f64| dist_point_to_line(&path.at(s), l2).unwrap_or(f64::INFINITY);
    let (_, d) = feasibility::golden_min(&f, 0.0, 1e-12);
    Ok(d.max(0.0))
}

/// Feet of the shortest segment between two lines: `(foot on l1, foot on l2)`.
pub fn closest_pair_on_lines(l1: &Geodesic, l2: &Geodesic) -> Result<(Point, Point), GeomError> {
    let path = GeodesicPath::from_line(l1)?;
    let f = |s: f64| dist_point_to_line(&path.at(s), l2).unwrap_or(f64::INFINITY);
    let (s_star, _) = feasibility::golden_min(&f, 0.0, 1e-12);
    let foot1 = path.at(s_star);
    let foot2 = nearest_point_on_line(&foot1, l2)?;
    Ok((foot1, foot2))
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Translation length, rotation angle, and axis of a loxodromic element.
/// `length = 2 ln |mu|` and `angle = 2 arg mu` for the eigenvalue with
/// `|mu| > 1`; the axis runs from the repelling to the attracting fixed
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoxodromicData {
    pub length: f64,
    pub angle: f64,
    pub axis: Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic(LoxodromicData),
}

impl Classification {
    pub fn kind(&self) -> &'static str {
        match self {
            Classification::Identity => "identity",
            Classification::Elliptic => "elliptic",
            Classification::Parabolic => "parabolic",
            Classification::Loxodromic(_) => "loxodromic",
        }
    }
}

/// Distance in the complex plane from `u` to the real segment `[0, 4]`,
/// the trace-squared locus of non-loxodromic elements.
fn dist_to_trace_segment(u: Complex64) -> f64 {
    if u.re < 0.0 {
        u.norm()
    } else if u.re > 4.0 {
        (u - Complex64::new(4.0, 0.0)).norm()
    } else {
        u.im.abs()
    }
}

/// Classifies an isometry with the default boundary tolerance.
pub fn classify(g: &Isometry) -> Result<Classification, GeomError> {
    classify_with_tol(g, CLASSIFY_BOUNDARY_TOL)
}

/// Classifies an isometry. An element is loxodromic exactly when its squared
/// trace lies off the real segment `[0, 4]`; elements whose squared trace
/// falls inside the fuzzy band of width `tol` around that locus (other than
/// exact parabolics and exact elliptics) are refused as indeterminate rather
/// than silently classified.
pub fn classify_with_tol(g: &Isometry, tol: f64) -> Result<Classification, GeomError> {
    if g.is_identity(tol) {
        return Ok(Classification::Identity);
    }
    let tau = g.trace();
    let u = tau * tau;
    let seg = dist_to_trace_segment(u);
    if seg > tol {
        return Ok(Classification::Loxodromic(loxodromic_data(g, tau)?));
    }
    // Inside the band: only bit-exact parabolic / elliptic traces survive.
    let to4 = (u - Complex64::new(4.0, 0.0)).norm();
    if to4 == 0.0 {
        return Ok(Classification::Parabolic);
    }
    if u.im == 0.0 && u.re >= 0.0 && u.re < 4.0 - tol {
        return Ok(Classification::Elliptic);
    }
    Err(GeomError::IndeterminateClassification { trace: tau, tol })
}

fn loxodromic_data(g: &Isometry, tau: Complex64) -> Result<LoxodromicData, GeomError> {
    let disc = (tau * tau - 4.0).sqrt();
    let mut mu = (tau + disc) / 2.0;
    if mu.norm() < 1.0 {
        mu = (tau - disc) / 2.0;
    }
    let length = 2.0 * mu.norm().ln();
    if !(length > 0.0) {
        return Err(GeomError::NotLoxodromic {
            got: "unit-modulus eigenvalue",
        });
    }
    let mut angle = 2.0 * mu.arg();
    // Normalize to (-pi, pi]; arg already is, but doubling can leave it out.
    while angle > std::f64::consts::PI {
        angle -= 2.0 * std::f64::consts::PI;
    }
    while angle <= -std::f64::consts::PI {
        angle += 2.0 * std::f64::consts::PI;
    }
    let [a, _, c, d] = [g.a, g.b, g.c, g.d];
    let axis = if c.norm() > 1e-14 {
        // Fixed point of the eigenvalue mu is (a - d + delta) / (2c) with
        // delta = 2 mu - tau; that one is attracting.
        let delta = 2.0 * mu - tau;
        let attract = (a - d + delta) / (2.0 * c);
        let repel = (a - d - delta) / (2.0 * c);
        Geodesic::new(BoundaryPoint::Finite(repel), BoundaryPoint::Finite(attract))?
    } else {
        // c = 0: fixed points are inf and b/(d - a).
        let other = g.b / (d - a);
        if mu.norm() > 1.0 && (a - mu).norm() < (d - mu).norm() {
            // eigenvalue mu belongs to column fixing inf
            Geodesic::new(BoundaryPoint::Finite(other), BoundaryPoint::Infinity)?
        } else {
            Geodesic::new(BoundaryPoint::Infinity, BoundaryPoint::Finite(other))?
        }
    };
    Ok(LoxodromicData {
        length,
        angle,
        axis,
    })
}

// ---------------------------------------------------------------------------
// Tubes
// ---------------------------------------------------------------------------

/// Displacement of a loxodromic with translation length `length` and rotation
/// angle `angle` at a point lying at distance `rho` from its axis:
/// `sinh^2(d/2) = cosh^2(rho) sinh^2(l/2) + sinh^2(rho) sin^2(theta/2)`.
pub fn tube_displacement(length: f64, angle: f64, rho: f64) -> f64 {
    let sh = (length / 2.0).sinh();
    let s = rho.cosh().powi(2) * sh * sh + rho.sinh().powi(2) * (angle / 2.0).sin().powi(2);
    2.0 * s.sqrt().asinh()
}

/// Radius of the open tube `{ d(P, g.P) < lambda }`: the unique `r > 0`
/// solving the tube equation when `lambda > length`, and `None` when the
/// sublevel set is empty (`lambda <= length`). Returning an explicit empty
/// marker keeps a degenerate tube distinct from its axis.
pub fn cylinder_radius(length: f64, angle: f64, lambda: f64) -> Option<f64> {
    if !(lambda > length) || !(length > 0.0) {
        return None;
    }
    let num = (lambda / 2.0).sinh().powi(2) - (length / 2.0).sinh().powi(2);
    let den = (length / 2.0).sinh().powi(2) + (angle / 2.0).sin().powi(2);
    Some((num / den).sqrt().asinh())
}

/// An open metric neighborhood of a geodesic line, tagged by the index of
/// the cyclic subgroup that defines it.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub core: Geodesic,
    pub radius: f64,
    pub lambda: f64,
    pub label: usize,
}

impl Cylinder {
    pub fn contains(&self, p: &Point) -> Result<bool, GeomError> {
        Ok(dist_point_to_line(p, &self.core)? < self.radius)
    }
}

// ---------------------------------------------------------------------------
// Parametrized geodesics
// ---------------------------------------------------------------------------

/// A unit-speed parametrization of a geodesic: either a vertical ray or a
/// semicircle `(c + u R tanh s, R sech s)` over a boundary line.
#[derive(Debug, Clone, Copy)]
pub enum GeodesicPath {
    Vertical { z: Complex64, t0: f64 },
    Arc {
        center: Complex64,
        dir: Complex64,
        radius: f64,
        s0: f64,
    },
}

impl GeodesicPath {
    pub fn at(&self, s: f64) -> Point {
        match *self {
            GeodesicPath::Vertical { z, t0 } => Point::raw(z, t0 * s.exp()),
            GeodesicPath::Arc {
                center,
                dir,
                radius,
                s0,
            } => {
                let sig = s0 + s;
                Point::raw(center + dir * radius * sig.tanh(), radius / sig.cosh())
            }
        }
    }

    /// Path through `p` and `q` with `at(0) = p` and `at(d) = q` where `d`
    /// is the hyperbolic distance. Returns the pair `(path, d)`.
    pub fn through(p: &Point, q: &Point) -> (GeodesicPath, f64) {
        let dz = q.z() - p.z();
        let xi = dz.norm();
        if xi <= 1e-15 * (1.0 + p.z().norm() + q.z().norm()) {
            let s_q = (q.t() / p.t()).ln();
            return (
                GeodesicPath::Vertical {
                    z: p.z(),
                    t0: p.t(),
                },
                s_q,
            );
        }
        let u = dz / xi;
        let (tp, tq) = (p.t(), q.t());
        let m = (xi * xi + tq * tq - tp * tp) / (2.0 * xi);
        let radius = (m * m + tp * tp).sqrt();
        let s_p = (-m / radius).atanh();
        let s_q = ((xi - m) / radius).atanh();
        (
            GeodesicPath::Arc {
                center: p.z() + u * m,
                dir: u,
                radius,
                s0: s_p,
            },
            s_q - s_p,
        )
    }

    /// Geodesic through `p` with horizontal initial tangent in direction
    /// `dir` (a unit complex number).
    pub fn horizontal(p: &Point, dir: Complex64) -> GeodesicPath {
        GeodesicPath::Arc {
            center: p.z(),
            dir,
            radius: p.t(),
            s0: 0.0,
        }
    }

    pub fn vertical(p: &Point) -> GeodesicPath {
        GeodesicPath::Vertical {
            z: p.z(),
            t0: p.t(),
        }
    }

    /// Unit-speed parametrization of a geodesic line given by endpoints.
    pub fn from_line(line: &Geodesic) -> Result<GeodesicPath, GeomError> {
        match (line.e1, line.e2) {
            (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
                let d = q - p;
                let r = d.norm() / 2.0;
                if r < 1e-15 {
                    return Err(GeomError::DegenerateGeodesic);
                }
                Ok(GeodesicPath::Arc {
                    center: (p + q) / 2.0,
                    dir: d / d.norm(),
                    radius: r,
                    s0: 0.0,
                })
            }
            (BoundaryPoint::Finite(p), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(p)) => {
                Ok(GeodesicPath::Vertical { z: p, t0: 1.0 })
            }
            _ => Err(GeomError::DegenerateGeodesic),
        }
    }

    /// Midpoint of the geodesic segment from `p` to `q`.
    pub fn midpoint(p: &Point, q: &Point) -> Point {
        let (path, d) = GeodesicPath::through(p, q);
        path.at(d / 2.0)
    }
}
