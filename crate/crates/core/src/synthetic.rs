//! Seeded generators of labeled complexes and tube covers, used by the test
//! suites and as demo input.

use crate::foldings::FreeWord;
use crate::hyperbolic::{
    distance, dist_point_to_line, BoundaryPoint, Geodesic, GeomError, Point,
};
use crate::nerve::{Complex, Labeling, Simplex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random labeled complex: a handful of maximal simplices over a small
/// vertex pool, closed downward and capped in size, with primitive
/// free-word labels over a 2-letter alphabet.
pub fn random_labeled_complex(seed: u64, max_simplices: usize) -> (Complex, Labeling) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n_vertices = rng.gen_range(4..=8u32);
        let n_maximal = rng.gen_range(2..=5);
        let mut maximal: Vec<Simplex> = Vec::new();
        for _ in 0..n_maximal {
            let dim = rng.gen_range(1..=3usize.min(n_vertices as usize - 1));
            let mut s: Simplex = Vec::new();
            while s.len() < dim + 1 {
                let v = rng.gen_range(0..n_vertices);
                if !s.contains(&v) {
                    s.push(v);
                }
            }
            s.sort_unstable();
            maximal.push(s);
        }
        let cx = Complex::from_simplices(maximal);
        if cx.len() > max_simplices {
            continue;
        }
        let mut labeling = Labeling::default();
        for v in cx.vertices() {
            labeling.0.insert(v, random_primitive(&mut rng));
        }
        return (cx, labeling);
    }
}

/// A random primitive word (not a proper power) of length 1..=3 over {a, b}.
fn random_primitive(rng: &mut ChaCha8Rng) -> FreeWord {
    loop {
        let len = rng.gen_range(1..=3usize);
        let w = FreeWord::new((0..len).map(|_| {
            let g = rng.gen_range(1..=2i8);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        }));
        if !w.is_empty() && w.len() == len && !w.is_proper_power() {
            return w.cyclic_normal();
        }
    }
}

// ---------------------------------------------------------------------------
// Certified tube covers
// ---------------------------------------------------------------------------

/// A tube around a geodesic line.
#[derive(Debug, Clone)]
pub struct Tube {
    pub line: Geodesic,
    pub radius: f64,
}

/// Grid certificate that the tubes cover the hyperbolic ball
/// `B(center, radius)`: on a chart grid fine enough that each cell has
/// hyperbolic diameter below the observed slack, every cell center meeting
/// the region lies strictly inside some tube. Distance functions are
/// 1-Lipschitz, so the certificate is rigorous.
#[derive(Debug, Clone)]
pub struct CoverCertificate {
    pub cells_checked: usize,
    pub worst_slack: f64,
}

#[derive(Debug, Clone)]
pub struct CoverGap {
    pub at: Point,
    pub deficit: f64,
}

/// Verifies covering by the Lipschitz grid argument. `mesh` is the chart
/// step; the hyperbolic diameter of a cell at height `t` is bounded by
/// `sqrt(2) * mesh / t_min + mesh` (straight chart path), which the slack
/// must exceed.
pub fn certify_cover(
    center: &Point,
    radius: f64,
    tubes: &[Tube],
    mesh: f64,
) -> Result<Result<CoverCertificate, CoverGap>, GeomError> {
    // Chart box enclosing the ball: Euclidean ball centered (z0, t0 cosh R)
    // with radius t0 sinh R.
    let t0 = center.t();
    let ec = t0 * radius.cosh();
    let er = t0 * radius.sinh();
    let (x0, y0) = (center.z().re, center.z().im);
    let t_lo = (ec - er).max(1e-9);
    let t_hi = ec + er;
    let mut cells_checked = 0usize;
    let mut worst_slack = f64::INFINITY;
    let nx = ((2.0 * er) / (mesh * t_lo)).ceil() as i64 + 1;
    let nt = (((t_hi / t_lo).ln() / mesh) + 1.0).ceil() as i64;
    // vertical step chosen in log-space so cells have comparable hyperbolic size
    let lt_step = (t_hi / t_lo).ln() / nt as f64;
    for ix in 0..=nx {
        let x = x0 - er + 2.0 * er * ix as f64 / nx as f64;
        for iy in 0..=nx {
            let y = y0 - er + 2.0 * er * iy as f64 / nx as f64;
            for it in 0..=nt {
                let t = t_lo * (lt_step * it as f64).exp();
                let p = Point::from_coords(x, y, t)?;
                // hyperbolic diameter bound of the surrounding cell
                let cell = (2.0f64.sqrt() * (2.0 * er / nx as f64)) / (t * (-lt_step).exp())
                    + lt_step;
                if distance(&p, center) > radius + cell {
                    continue; // cell entirely outside the region
                }
                cells_checked += 1;
                let mut slack = f64::NEG_INFINITY;
                for tube in tubes {
                    let margin = tube.radius - dist_point_to_line(&p, &tube.line)?;
                    slack = slack.max(margin);
                }
                if slack <= cell {
                    return Ok(Err(CoverGap {
                        at: p,
                        deficit: cell - slack,
                    }));
                }
                worst_slack = worst_slack.min(slack - cell);
            }
        }
    }
    Ok(Ok(CoverCertificate {
        cells_checked,
        worst_slack,
    }))
}

/// Region-restricted nerve of a tube family: a subfamily spans a simplex
/// when the tubes and the region ball admit a common point.
pub fn tube_cover_nerve(
    center: &Point,
    radius: f64,
    tubes: &[Tube],
    cfg: &crate::hyperbolic::feasibility::FeasConfig,
) -> Result<crate::nerve::NerveBuild, crate::nerve::NerveError> {
    use crate::hyperbolic::feasibility::{decide, ConvexPiece, Feasibility};
    use crate::nerve::{nerve, NerveOptions, OracleAnswer};
    let pieces: Vec<ConvexPiece> = tubes
        .iter()
        .map(|t| ConvexPiece::tube(t.line, t.radius))
        .collect();
    let region = ConvexPiece::ball(*center, radius);
    let mut oracle = |family: &[usize]| -> OracleAnswer {
        let mut fam: Vec<ConvexPiece> = family.iter().map(|&i| pieces[i].clone()).collect();
        fam.push(region.clone());
        match decide(&fam, &[], cfg) {
            Feasibility::Feasible { .. } => OracleAnswer::Yes,
            Feasibility::Empty { .. } => OracleAnswer::No,
            Feasibility::Undecided { .. } => OracleAnswer::Undecided,
        }
    };
    nerve(tubes.len(), &mut oracle, &NerveOptions::default())
}

/// Semicircular geodesic over two real boundary points.
pub fn semicircle(a: f64, b: f64) -> Geodesic {
    Geodesic::new(
        BoundaryPoint::Finite(Complex64::new(a, 0.0)),
        BoundaryPoint::Finite(Complex64::new(b, 0.0)),
    )
    .expect("distinct endpoints")
}

/// A chain of three tubes covering a small ball: consecutive tubes overlap
/// inside the region, the outer pair stays apart. Its nerve is a path.
pub fn chain_cover() -> (Point, f64, Vec<Tube>) {
    let center = Point::from_coords(0.0, 0.0, 1.0).unwrap();
    let radius = 0.55;
    let tubes = vec![
        Tube {
            line: semicircle(-4.4, -0.52),
            radius: 0.70,
        },
        Tube {
            line: semicircle(-1.3, 1.3),
            radius: 0.95,
        },
        Tube {
            line: semicircle(0.52, 4.4),
            radius: 0.70,
        },
    ];
    (center, radius, tubes)
}

/// Three tubes through a common region: each is wide enough to contain the
/// whole region (radius set from the measured axis distance), so the nerve
/// is a full triangle.
pub fn triangle_cover() -> (Point, f64, Vec<Tube>) {
    let center = Point::from_coords(0.0, 0.0, 1.0).unwrap();
    let radius = 0.5;
    let lines = vec![
        semicircle(-3.0, 1.2),
        semicircle(-1.2, 3.0),
        Geodesic::new(
            BoundaryPoint::Finite(Complex64::new(0.0, -2.0)),
            BoundaryPoint::Finite(Complex64::new(0.0, 2.0)),
        )
        .unwrap(),
    ];
    let tubes = lines
        .into_iter()
        .map(|line| {
            let r = dist_point_to_line(&center, &line).unwrap() + radius + 0.15;
            Tube { line, radius: r }
        })
        .collect();
    (center, radius, tubes)
}
