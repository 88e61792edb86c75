//! Deterministic point sampling in a hyperbolic ball.
//!
//! Points come from a Halton low-discrepancy sequence in a ball-model chart
//! of the sample region (direction from the first two coordinates, radius
//! from the third), pushed forward by the exponential map at the region
//! center. A seeded random rotation of the direction sphere makes the
//! stream depend on the scenario seed while keeping the prefix property:
//! sample `i` never depends on the total count.

use crate::hyperbolic::Point;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The `i`-th element (1-based) of the van der Corput sequence in `base`.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Geodesic exponential map: the point at arclength `s` from `center` in
/// the unit tangent direction `dir = (x, y, vertical)`, directions taken in
/// the frame that normalizes `center` to `(0, 1)`.
pub fn exp_map(center: &Point, dir: [f64; 3], s: f64) -> Point {
    let h = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    let norm = (h * h + dir[2] * dir[2]).sqrt();
    debug_assert!(norm > 0.0);
    let (h, c) = (h / norm, dir[2] / norm);
    let local = if h < 1e-12 {
        Point::from_coords(0.0, 0.0, (s * c.signum()).exp()).unwrap()
    } else {
        let u = Complex64::new(dir[0], dir[1]) / (h * norm);
        // geodesic through (0,1) with tangent (h, c): a semicircle with
        // center cot(a) and radius 1/sin(a) where a = angle from vertical
        let a = h.atan2(c);
        let (sin_a, cos_a) = (a.sin(), a.cos());
        let m = cos_a / sin_a;
        let radius = 1.0 / sin_a;
        let s0 = (-cos_a).atanh();
        let sig = s0 + s;
        let x = m + radius * sig.tanh();
        let t = radius / sig.cosh();
        Point::new(u * x, t).unwrap()
    };
    // denormalize: z -> z0 + t0 z, t -> t0 t
    Point::new(
        center.z() + local.z() * center.t(),
        center.t() * local.t(),
    )
    .unwrap()
}

/// A random rotation matrix from the seed (uniform via a quaternion).
fn seeded_rotation(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5a3b_17);
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (t1, t2) = (
        std::f64::consts::TAU * u2,
        std::f64::consts::TAU * u3,
    );
    let q = [a * t1.sin(), a * t1.cos(), b * t2.sin(), b * t2.cos()];
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn rotate(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// The `i`-th sample point (0-based) of the seeded low-discrepancy stream
/// in the ball of the given hyperbolic radius around `center`.
pub fn sample_point(center: &Point, radius: f64, seed: u64, i: u64) -> Point {
    let rot = seeded_rotation(seed);
    let (u1, u2, u3) = (halton(i + 1, 2), halton(i + 1, 3), halton(i + 1, 5));
    let cos_phi = 1.0 - 2.0 * u1;
    let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    let psi = std::f64::consts::TAU * u2;
    let dir = rotate(
        &rot,
        [sin_phi * psi.cos(), sin_phi * psi.sin(), cos_phi],
    );
    let s = radius * u3.cbrt();
    if s < 1e-12 {
        return *center;
    }
    exp_map(center, dir, s)
}
