//! Finite word-ball truncations of discrete matrix groups.
//!
//! A group is given by named generator matrices; everything downstream works
//! with the set of reduced words up to a cutoff length, classified as
//! loxodromic, grouped into maximal cyclic subgroups by shared axis, and
//! filtered by translation length. All set computations are "within the
//! word ball of radius R" and reports must carry that truncation radius.

use crate::foldings::{FreeWord, Letter};
use crate::hyperbolic::{
    classify, cylinder_radius, displacement, dist_point_to_line, tube_displacement,
    Classification, GeomError, Geodesic, Isometry, LoxodromicData, Point,
};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("ball radius must be at least 1")]
    BadBallRadius,
    #[error("need at least one generator")]
    NoGenerators,
    #[error("word {word} is not purely loxodromic at this tolerance: {kind}")]
    NotPurelyLoxodromic { word: String, kind: String },
    #[error("words {w1} and {w2} share an axis but their lengths {l1} and {l2} are not commensurable within {tol:e}")]
    IncommensurableLengths {
        w1: String,
        w2: String,
        l1: f64,
        l2: f64,
        tol: f64,
    },
    #[error("conjugate of {word} lands outside the word ball of radius {radius}")]
    OutOfTruncation { word: String, radius: usize },
    #[error("generator {index} has c = 0; isometric circles are undefined")]
    NoIsometricCircle { index: usize },
    #[error("isometric disks {i} and {j} overlap (gap {gap:.6}); ping-pong fails")]
    DisksOverlap { i: usize, j: usize, gap: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

// ---------------------------------------------------------------------------
// Group input and the element table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NamedGenerator {
    pub name: String,
    pub matrix: Isometry,
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub generators: Vec<NamedGenerator>,
    /// Word-length cutoff of the enumerated ball.
    pub ball_radius: usize,
    /// Two entries closer than this (up to sign) are the same group element.
    pub matrix_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub word: FreeWord,
    pub matrix: Isometry,
    pub lox: LoxodromicData,
}

/// All nontrivial reduced words of length at most the ball radius, with
/// their matrices and loxodromic data. Closed under inversion; deduplicated
/// by matrix proximity up to sign. `relations` counts reduced words that
/// collided with an earlier entry or the identity; it is zero exactly when
/// the ball is consistent with a free group.
#[derive(Debug, Clone)]
pub struct ElementTable {
    pub spec_radius: usize,
    pub matrix_tolerance: f64,
    pub n_generators: usize,
    pub elements: Vec<Element>,
    pub relations: usize,
}

/// Enumerates the word ball. Any nontrivial entry that fails to classify as
/// loxodromic is a hard error: the machinery downstream assumes a purely
/// loxodromic group.
pub fn enumerate_ball(spec: &GroupSpec) -> Result<ElementTable, GroupError> {
    if spec.ball_radius < 1 {
        return Err(GroupError::BadBallRadius);
    }
    if spec.generators.is_empty() {
        return Err(GroupError::NoGenerators);
    }
    let n = spec.generators.len();
    let letters: Vec<(Letter, Isometry)> = (0..n)
        .flat_map(|i| {
            let g = spec.generators[i].matrix;
            [
                ((i + 1) as Letter, g),
                (-((i + 1) as Letter), g.inverse()),
            ]
        })
        .collect();

    let mut elements: Vec<Element> = Vec::new();
    let mut relations = 0usize;
    let mut frontier: Vec<(FreeWord, Isometry)> = vec![(FreeWord::identity(), Isometry::identity())];
    for _ in 0..spec.ball_radius {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for (l, lm) in &letters {
                if w.letters().last() == Some(&-l) {
                    continue; // immediate cancellation: not reduced
                }
                let nw = FreeWord::new(w.letters().iter().copied().chain([*l]));
                let nm = m.compose(lm).renormalized()?;
                next.push((nw, nm));
            }
        }
        for (w, m) in &next {
            // relations dedup to their earliest representative; only a
            // non-loxodromic nontrivial element is fatal
            if m.is_identity(spec.matrix_tolerance) {
                relations += 1;
                continue;
            }
            if elements
                .iter()
                .any(|e| e.matrix.proj_dist(m) <= spec.matrix_tolerance)
            {
                relations += 1;
                continue;
            }
            let lox = match classify(m) {
                Ok(Classification::Loxodromic(ld)) => ld,
                Ok(other) => {
                    return Err(GroupError::NotPurelyLoxodromic {
                        word: w.to_string(),
                        kind: other.kind().to_string(),
                    })
                }
                Err(e) => {
                    return Err(GroupError::NotPurelyLoxodromic {
                        word: w.to_string(),
                        kind: e.to_string(),
                    })
                }
            };
            elements.push(Element {
                word: w.clone(),
                matrix: *m,
                lox,
            });
        }
        frontier = next;
    }
    Ok(ElementTable {
        spec_radius: spec.ball_radius,
        matrix_tolerance: spec.matrix_tolerance,
        n_generators: n,
        elements,
        relations,
    })
}

impl ElementTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Matrix of a reduced word, when the word stays inside the ball.
    pub fn lookup(&self, w: &FreeWord) -> Option<&Element> {
        self.elements.iter().find(|e| &e.word == w)
    }
}

// ---------------------------------------------------------------------------
// Maximal cyclic subgroups
// ---------------------------------------------------------------------------

/// Axis-matching tolerance (endpoints compared on the unit-sphere chart).
pub const AXIS_MATCH_TOL: f64 = 1e-7;

/// Commensurability tolerance for translation lengths on a shared axis.
pub const LENGTH_COMMENSURATE_TOL: f64 = 1e-7;

/// A maximal cyclic subgroup observed in the ball: a shortest primitive
/// representative, its loxodromic data, and the tube radius information for
/// membership tests.
#[derive(Debug, Clone)]
pub struct CyclicLabel {
    pub id: usize,
    pub primitive: FreeWord,
    pub matrix: Isometry,
    pub lox: LoxodromicData,
    /// Ball elements of this subgroup as `(word, length, angle)` triples;
    /// used for the effective tube radius of the length-lambda cylinder.
    pub powers: Vec<(FreeWord, f64, f64)>,
}

impl CyclicLabel {
    /// Radius of the cylinder `Z_lambda` of this subgroup: the largest tube
    /// radius over the subgroup elements seen in the ball. `None` when the
    /// cylinder is empty (`lambda <= length` for all of them).
    pub fn effective_radius(&self, lambda: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (_, l, th) in &self.powers {
            if let Some(r) = cylinder_radius(*l, *th, lambda) {
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
        best
    }

    /// The ball element realizing the effective radius.
    pub fn realizing_power(&self, lambda: f64) -> Option<&(FreeWord, f64, f64)> {
        let mut best: Option<(&(FreeWord, f64, f64), f64)> = None;
        for p in &self.powers {
            if let Some(r) = cylinder_radius(p.1, p.2, lambda) {
                if best.map_or(true, |(_, br)| r > br) {
                    best = Some((p, r));
                }
            }
        }
        best.map(|(p, _)| p)
    }
}

/// The family of maximal cyclic subgroups with primitive translation length
/// below `lambda`, observed within the ball.
#[derive(Debug, Clone)]
pub struct LabelSet {
    pub lambda: f64,
    pub truncation_radius: usize,
    pub labels: Vec<CyclicLabel>,
}

impl LabelSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The label whose axis matches the given one, if present.
    pub fn find_by_axis(&self, axis: &Geodesic, tol: f64) -> Option<&CyclicLabel> {
        self.labels
            .iter()
            .find(|c| c.lox.axis.unordered_eq(axis, tol))
    }
}

/// Groups ball elements by shared axis and reports, per axis class, the
/// label of minimal primitive translation length, retaining only labels
/// with primitive length below `lambda`. Elements on a shared axis whose
/// lengths are not near-integer multiples of the shortest one violate
/// discreteness at this tolerance and abort the computation.
pub fn maximal_cyclics(table: &ElementTable, lambda: f64) -> Result<LabelSet, GroupError> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, e) in table.elements.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|cl| table.elements[cl[0]].lox.axis.unordered_eq(&e.lox.axis, AXIS_MATCH_TOL))
        {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    let mut labels = Vec::new();
    for class in &classes {
        // primitive: minimal length, ties broken by the shortest then
        // lexicographically least word (after inverse normalization)
        let min_len = class
            .iter()
            .map(|&i| table.elements[i].lox.length)
            .fold(f64::INFINITY, f64::min);
        for &i in class {
            let e = &table.elements[i];
            let ratio = e.lox.length / min_len;
            let nearest = ratio.round();
            if (e.lox.length - nearest * min_len).abs() > LENGTH_COMMENSURATE_TOL {
                let first = &table.elements[class[0]];
                return Err(GroupError::IncommensurableLengths {
                    w1: first.word.to_string(),
                    w2: e.word.to_string(),
                    l1: min_len,
                    l2: e.lox.length,
                    tol: LENGTH_COMMENSURATE_TOL,
                });
            }
        }
        let mut candidates: Vec<&Element> = class
            .iter()
            .map(|&i| &table.elements[i])
            .filter(|e| (e.lox.length - min_len).abs() <= LENGTH_COMMENSURATE_TOL)
            .collect();
        candidates.sort_by(|a, b| {
            a.word
                .len()
                .cmp(&b.word.len())
                .then_with(|| a.word.cyclic_normal().cmp(&b.word.cyclic_normal()))
                .then_with(|| a.word.cmp(&b.word))
        });
        let prim = candidates[0];
        if prim.lox.length >= lambda {
            continue;
        }
        let powers = class
            .iter()
            .map(|&i| {
                let e = &table.elements[i];
                (e.word.clone(), e.lox.length, e.lox.angle)
            })
            .collect();
        labels.push(CyclicLabel {
            id: 0,
            primitive: prim.word.cyclic_normal(),
            matrix: prim.matrix,
            lox: prim.lox,
            powers,
        });
    }
    labels.sort_by(|a, b| {
        a.primitive
            .len()
            .cmp(&b.primitive.len())
            .then_with(|| a.primitive.cmp(&b.primitive))
    });
    for (i, l) in labels.iter_mut().enumerate() {
        l.id = i;
    }
    Ok(LabelSet {
        lambda,
        truncation_radius: table.spec_radius,
        labels,
    })
}

// ---------------------------------------------------------------------------
// Short sets
// ---------------------------------------------------------------------------

pub const MARGINAL_DISPLACEMENT_TOL: f64 = 1e-6;

/// The set of labels whose cylinder contains a point, with marginal
/// flagging: any label whose defining displacement sits within the marginal
/// band of `lambda` taints the whole result as non-certified.
#[derive(Debug, Clone)]
pub struct ShortSet {
    pub label_ids: Vec<usize>,
    pub marginal_ids: Vec<usize>,
    pub certified: bool,
}

/// Labels with some ball element displacing `p` by less than `lambda`
/// (equivalently labels whose cylinder contains `p`), computed by scanning
/// displacements of the class elements.
pub fn short_set(
    labels: &LabelSet,
    p: &Point,
    lambda: f64,
    marginal_tol: f64,
) -> Result<ShortSet, GroupError> {
    let mut ids = Vec::new();
    let mut marginal = Vec::new();
    for c in &labels.labels {
        let rho = dist_point_to_line(p, &c.lox.axis)?;
        let mut inside = false;
        let mut near = false;
        for (_, l, th) in &c.powers {
            let d = tube_displacement(*l, *th, rho);
            if d < lambda {
                inside = true;
            }
            if (d - lambda).abs() <= marginal_tol {
                near = true;
            }
        }
        if inside {
            ids.push(c.id);
        }
        if near {
            marginal.push(c.id);
        }
    }
    let certified = marginal.is_empty();
    Ok(ShortSet {
        label_ids: ids,
        marginal_ids: marginal,
        certified,
    })
}

/// Membership route: the point is in the cylinder exactly when its distance
/// to the axis is below the effective radius. Used to cross-check
/// [`short_set`].
pub fn short_set_by_membership(
    labels: &LabelSet,
    p: &Point,
    lambda: f64,
) -> Result<Vec<usize>, GroupError> {
    let mut ids = Vec::new();
    for c in &labels.labels {
        if let Some(r) = c.effective_radius(lambda) {
            if dist_point_to_line(p, &c.lox.axis)? < r {
                ids.push(c.id);
            }
        }
    }
    Ok(ids)
}

/// Primitive generator words of the labels in a short set, ready for the
/// rank machinery.
pub fn short_set_words(labels: &LabelSet, set: &ShortSet) -> Vec<FreeWord> {
    set.label_ids
        .iter()
        .map(|&i| labels.labels[i].primitive.clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Conjugation of labels
// ---------------------------------------------------------------------------

/// Label of the conjugated subgroup `g C g^-1`, looked up by its transported
/// axis. Errors when the conjugate is not representable within the ball.
pub fn conjugate_label<'a>(
    labels: &'a LabelSet,
    g: &Isometry,
    c: &CyclicLabel,
) -> Result<&'a CyclicLabel, GroupError> {
    let moved = c.lox.axis.map(g);
    labels
        .find_by_axis(&moved, AXIS_MATCH_TOL)
        .ok_or_else(|| GroupError::OutOfTruncation {
            word: c.primitive.to_string(),
            radius: labels.truncation_radius,
        })
}

// ---------------------------------------------------------------------------
// Displacement bound report
// ---------------------------------------------------------------------------

/// Evaluation of the free-group displacement bound at one point: the sum
/// `sum_i 1/(1 + e^{d_i})`, the max displacement, and the two thresholds
/// `1/2` and `log(2k - 1)`.
#[derive(Debug, Clone)]
pub struct LogBoundReport {
    pub k: usize,
    pub displacements: Vec<f64>,
    pub sum: f64,
    pub max: f64,
    pub sum_bound: f64,
    pub max_bound: f64,
    pub sum_ok: bool,
    pub max_ok: bool,
}

/// Pure evaluation of the displacement bound for `k` generators at a point.
pub fn check_log_bound(gens: &[Isometry], p: &Point) -> Result<LogBoundReport, GroupError> {
    let k = gens.len();
    let mut displacements = Vec::with_capacity(k);
    for g in gens {
        displacements.push(displacement(g, p)?);
    }
    let sum: f64 = displacements.iter().map(|d| 1.0 / (1.0 + d.exp())).sum();
    let max = displacements.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_bound = ((2 * k - 1) as f64).ln();
    Ok(LogBoundReport {
        k,
        displacements,
        sum,
        max,
        sum_bound: 0.5,
        max_bound,
        sum_ok: sum <= 0.5,
        max_ok: max >= max_bound,
    })
}

// ---------------------------------------------------------------------------
// Schottky construction and ping-pong certification
// ---------------------------------------------------------------------------

/// A disk in the boundary plane.
#[derive(Debug, Clone, Copy)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

/// Certificate that the generators play ping-pong on their isometric disks:
/// all `2k` disks are pairwise disjoint, with the minimal gap recorded.
/// Each generator maps the exterior of its isometric disk onto the interior
/// of its inverse's, so disjointness certifies a free, discrete, purely
/// loxodromic group.
#[derive(Debug, Clone)]
pub struct PingPongCertificate {
    pub disks: Vec<Disk>,
    pub min_gap: f64,
}

/// Recomputes the isometric disks of the generators from their matrices and
/// checks pairwise disjointness with at least `margin` gap.
pub fn verify_ping_pong(
    gens: &[Isometry],
    margin: f64,
) -> Result<PingPongCertificate, GroupError> {
    let mut disks = Vec::with_capacity(2 * gens.len());
    for (i, g) in gens.iter().enumerate() {
        let [a, _, c, d] = g.entries();
        if c.norm() < 1e-12 {
            return Err(GroupError::NoIsometricCircle { index: i });
        }
        let r = 1.0 / c.norm();
        disks.push(Disk {
            center: -d / c,
            radius: r,
        });
        disks.push(Disk {
            center: a / c,
            radius: r,
        });
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let gap = (disks[i].center - disks[j].center).norm()
                - disks[i].radius
                - disks[j].radius;
            if gap < margin {
                return Err(GroupError::DisksOverlap { i, j, gap });
            }
            min_gap = min_gap.min(gap);
        }
    }
    Ok(PingPongCertificate { disks, min_gap })
}

/// Loxodromic element pairing the circle of radius `r` around `c1` with the
/// one around `c2`: it maps the exterior of the first onto the interior of
/// the second, and those circles are exactly its isometric circles.
pub fn circle_pairing(
    c1: Complex64,
    c2: Complex64,
    r: f64,
    twist: f64,
) -> Result<Isometry, GroupError> {
    let phase = Complex64::from_polar(r * r, twist);
    Ok(Isometry::new(c2, phase - c1 * c2, Complex64::new(1.0, 0.0), -c1)?)
}

/// Seeded rank-2 Schottky pair with short translation lengths: jittered
/// copies of a template with one horizontal and one vertical circle pair,
/// twists tuned so the traces stay near the real axis. Certified by
/// [`verify_ping_pong`]; lengths land near 1.0-1.2, below log 5.
pub fn random_short_pair(seed: u64) -> Result<(Vec<Isometry>, PingPongCertificate), GroupError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7001);
    let pi = std::f64::consts::PI;
    loop {
        let jit = |rng: &mut rand_chacha::ChaCha8Rng, s: f64| rng.gen_range(-s..s);
        let half_a = 0.5 + jit(&mut rng, 0.05);
        let x_b = 1.5 + jit(&mut rng, 0.1);
        let half_b = 0.5 + jit(&mut rng, 0.05);
        let r_a = (0.42 + jit(&mut rng, 0.03)) * 2.0 * half_a;
        let r_b = (0.42 + jit(&mut rng, 0.03)) * 2.0 * half_b;
        let a = circle_pairing(
            Complex64::new(-half_a, jit(&mut rng, 0.05)),
            Complex64::new(half_a, jit(&mut rng, 0.05)),
            r_a,
            pi + jit(&mut rng, 0.3),
        )?;
        let b = circle_pairing(
            Complex64::new(x_b + jit(&mut rng, 0.05), -half_b),
            Complex64::new(x_b + jit(&mut rng, 0.05), half_b),
            r_b,
            jit(&mut rng, 0.3),
        )?;
        let gens = vec![a, b];
        if let Ok(cert) = verify_ping_pong(&gens, 0.01) {
            // reject draws whose lengths crept above the log 5 cutoff
            let short = gens.iter().all(|g| match classify(g) {
                Ok(Classification::Loxodromic(ld)) => ld.length < 1.55,
                _ => false,
            });
            if short {
                return Ok((gens, cert));
            }
        }
    }
}

/// Schottky group of the given rank from seeded disk configurations:
/// centers on a circle, equal radii shrunk until all disks clear each other
/// by a margin. The result is certified by [`verify_ping_pong`].
pub fn random_schottky(
    rank: usize,
    seed: u64,
    spread: f64,
) -> Result<(Vec<Isometry>, PingPongCertificate), GroupError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n_disks = 2 * rank;
    loop {
        let base = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut centers = Vec::with_capacity(n_disks);
        for i in 0..n_disks {
            let angle = base
                + i as f64 * std::f64::consts::TAU / n_disks as f64
                + rng.gen_range(-0.1..0.1);
            let rad = spread * rng.gen_range(0.85..1.15);
            centers.push(Complex64::from_polar(rad, angle));
        }
        let mut min_sep = f64::INFINITY;
        for i in 0..n_disks {
            for j in (i + 1)..n_disks {
                min_sep = min_sep.min((centers[i] - centers[j]).norm());
            }
        }
        let r = rng.gen_range(0.30..0.46) * min_sep;
        let mut gens = Vec::with_capacity(rank);
        for i in 0..rank {
            let twist = rng.gen_range(0.0..std::f64::consts::TAU);
            gens.push(circle_pairing(centers[2 * i], centers[2 * i + 1], r, twist)?);
        }
        match verify_ping_pong(&gens, 0.02 * min_sep) {
            Ok(cert) => return Ok((gens, cert)),
            Err(_) => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::distance;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two loxodromics with well-separated isometric circles.
    fn schottky_pair() -> Vec<Isometry> {
        vec![
            circle_pairing(c(-3.0, 0.0), c(3.0, 0.0), 1.0, 0.0).unwrap(),
            circle_pairing(c(0.0, -3.0), c(0.0, 3.0), 1.0, 0.5).unwrap(),
        ]
    }

    fn spec(gens: Vec<Isometry>, radius: usize) -> GroupSpec {
        GroupSpec {
            generators: gens
                .into_iter()
                .enumerate()
                .map(|(i, matrix)| NamedGenerator {
                    name: ((b'a' + i as u8) as char).to_string(),
                    matrix,
                })
                .collect(),
            ball_radius: radius,
            matrix_tolerance: 1e-8,
        }
    }

    #[test]
    fn ball_counts_reduced_words() {
        let t1 = enumerate_ball(&spec(schottky_pair(), 1)).unwrap();
        assert_eq!(t1.len(), 4);
        let t2 = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        assert_eq!(t2.len(), 16);
        let t3 = enumerate_ball(&spec(schottky_pair(), 3)).unwrap();
        assert_eq!(t3.len(), 4 + 12 + 36);
    }

    #[test]
    fn ball_is_closed_under_inverse() {
        let t = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        for e in &t.elements {
            let inv = e.word.inverse();
            assert!(t.lookup(&inv).is_some(), "missing inverse of {}", e.word);
        }
    }

    #[test]
    fn ball_rejects_parabolic_generator() {
        let parabolic =
            Isometry::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let err = enumerate_ball(&spec(vec![parabolic], 1)).unwrap_err();
        assert!(matches!(err, GroupError::NotPurelyLoxodromic { .. }));
    }

    #[test]
    fn ball_rejects_elliptic_generator() {
        let elliptic = Isometry::new(
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, -1.0),
        )
        .unwrap();
        assert!(enumerate_ball(&spec(vec![elliptic], 1)).is_err());
    }

    #[test]
    fn schottky_pair_has_no_dedup_collisions() {
        // widely separated isometric circles: ping-pong certifies freeness,
        // so every reduced word is a distinct element
        let gens = schottky_pair();
        verify_ping_pong(&gens, 0.1).unwrap();
        let t = enumerate_ball(&spec(gens, 3)).unwrap();
        for (i, e1) in t.elements.iter().enumerate() {
            for e2 in &t.elements[i + 1..] {
                assert!(
                    e1.matrix.proj_dist(&e2.matrix) > 1e-6,
                    "{} and {} collide",
                    e1.word,
                    e2.word
                );
            }
        }
    }

    #[test]
    fn powers_collapse_to_one_label() {
        let g = schottky_pair()[0];
        let single = spec(vec![g], 3);
        let t = enumerate_ball(&single).unwrap();
        // ball = {g, g^-1, g^2, g^-2, g^3, g^-3}
        assert_eq!(t.len(), 6);
        let labels = maximal_cyclics(&t, 100.0).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels.labels[0].powers.len(), 6);
        assert_eq!(labels.labels[0].primitive.len(), 1);
    }

    #[test]
    fn distinct_axes_make_distinct_labels() {
        let t = enumerate_ball(&spec(schottky_pair(), 1)).unwrap();
        let labels = maximal_cyclics(&t, 100.0).unwrap();
        assert_eq!(labels.len(), 2);
    }

    #[test]
    fn conjugates_get_their_own_labels() {
        let t = enumerate_ball(&spec(schottky_pair(), 3)).unwrap();
        let labels = maximal_cyclics(&t, 100.0).unwrap();
        // bab^-1 has the same length as a but a different axis
        let a = t.lookup(&FreeWord::parse("a").unwrap()).unwrap();
        let bab = t.lookup(&FreeWord::parse("baB").unwrap()).unwrap();
        assert_relative_eq!(a.lox.length, bab.lox.length, epsilon = 1e-9);
        assert!(!a.lox.axis.unordered_eq(&bab.lox.axis, 1e-6));
        let la = labels.find_by_axis(&a.lox.axis, AXIS_MATCH_TOL).unwrap();
        let lb = labels.find_by_axis(&bab.lox.axis, AXIS_MATCH_TOL).unwrap();
        assert_ne!(la.id, lb.id);
    }

    #[test]
    fn incommensurable_lengths_on_a_shared_axis_are_an_error() {
        // two coaxial loxodromics with length ratio 1.5 cannot both lie in
        // a discrete cyclic subgroup
        let g1 = Isometry::diagonal(c((0.5f64).exp(), 0.0)).unwrap();
        let g2 = Isometry::diagonal(c((0.75f64).exp(), 0.0)).unwrap();
        let mk = |w: &str, m: Isometry| Element {
            word: FreeWord::parse(w).unwrap(),
            matrix: m,
            lox: match classify(&m).unwrap() {
                Classification::Loxodromic(ld) => ld,
                _ => unreachable!(),
            },
        };
        let table = ElementTable {
            spec_radius: 1,
            matrix_tolerance: 1e-8,
            n_generators: 2,
            elements: vec![mk("a", g1), mk("b", g2)],
            relations: 0,
        };
        let err = maximal_cyclics(&table, 10.0).unwrap_err();
        assert!(matches!(err, GroupError::IncommensurableLengths { .. }));
    }

    #[test]
    fn redundant_generator_dedups_as_a_relation() {
        // two generators with the same matrix: every b-word collides with
        // its a-counterpart and dedups to it
        let g = schottky_pair()[0];
        let t = enumerate_ball(&spec(vec![g, g], 1)).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.relations, 2);
        let free = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        assert_eq!(free.relations, 0);
    }

    #[test]
    fn boundary_displacement_is_flagged_marginal() {
        let t = enumerate_ball(&spec(schottky_pair(), 1)).unwrap();
        let lam = 6.0;
        let labels = maximal_cyclics(&t, lam).unwrap();
        let label = &labels.labels[0];
        let r = label.effective_radius(lam).unwrap();
        // a point at axis distance exactly r displaces by exactly lambda
        let m = label.lox.axis.to_standard().unwrap();
        let p = m
            .inverse()
            .apply(&Point::from_coords(r.sinh(), 0.0, 1.0).unwrap())
            .unwrap();
        let s = short_set(&labels, &p, lam, MARGINAL_DISPLACEMENT_TOL).unwrap();
        assert!(
            s.marginal_ids.contains(&label.id),
            "expected a marginal flag at the tube boundary"
        );
        assert!(!s.certified);
    }

    #[test]
    fn lambda_filters_long_labels() {
        let t = enumerate_ball(&spec(schottky_pair(), 1)).unwrap();
        let all = maximal_cyclics(&t, 100.0).unwrap();
        assert_eq!(all.len(), 2);
        let shortest = all
            .labels
            .iter()
            .map(|l| l.lox.length)
            .fold(f64::INFINITY, f64::min);
        let none = maximal_cyclics(&t, shortest * 0.99).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn short_set_far_point_is_empty() {
        let t = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        let labels = maximal_cyclics(&t, 6.0).unwrap();
        assert!(!labels.is_empty());
        let far = Point::from_coords(0.0, 0.0, 2000.0).unwrap();
        let s = short_set(&labels, &far, 6.0, MARGINAL_DISPLACEMENT_TOL).unwrap();
        assert!(s.label_ids.is_empty());
        assert!(s.certified);
    }

    #[test]
    fn short_set_on_axis_contains_label() {
        let t = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        let labels = maximal_cyclics(&t, 6.0).unwrap();
        let a = &labels.labels[0];
        let lam = a.lox.length + 0.5;
        let on_axis = crate::hyperbolic::nearest_point_on_line(
            &Point::from_coords(0.0, 0.0, 1.0).unwrap(),
            &a.lox.axis,
        )
        .unwrap();
        let s = short_set(&labels, &on_axis, lam, MARGINAL_DISPLACEMENT_TOL).unwrap();
        assert!(s.label_ids.contains(&a.id));
    }

    #[test]
    fn short_set_routes_agree_on_a_grid() {
        let t = enumerate_ball(&spec(schottky_pair(), 2)).unwrap();
        let lam = 6.0;
        let labels = maximal_cyclics(&t, lam).unwrap();
        let mut checked = 0;
        for ix in -3..=3 {
            for iy in -3..=3 {
                for it in 0..4 {
                    let p = Point::from_coords(
                        ix as f64 * 1.3,
                        iy as f64 * 1.3,
                        0.4 * (1.6f64).powi(it),
                    )
                    .unwrap();
                    let scan = short_set(&labels, &p, lam, MARGINAL_DISPLACEMENT_TOL).unwrap();
                    if !scan.certified {
                        continue; // marginal points are exempt from the protocol
                    }
                    let member = short_set_by_membership(&labels, &p, lam).unwrap();
                    assert_eq!(scan.label_ids, member, "routes disagree at {p}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn conjugate_label_identity_and_transport() {
        let gens = schottky_pair();
        let t = enumerate_ball(&spec(gens.clone(), 3)).unwrap();
        let labels = maximal_cyclics(&t, 100.0).unwrap();
        let a = labels
            .find_by_axis(
                &t.lookup(&FreeWord::parse("a").unwrap()).unwrap().lox.axis,
                AXIS_MATCH_TOL,
            )
            .unwrap();
        // identity conjugation returns the same label
        let same = conjugate_label(&labels, &Isometry::identity(), a).unwrap();
        assert_eq!(same.id, a.id);
        // conjugation by b transports the axis and preserves the length
        let cb = conjugate_label(&labels, &gens[1], a).unwrap();
        assert_relative_eq!(cb.lox.length, a.lox.length, epsilon = 1e-10);
        let moved = a.lox.axis.map(&gens[1]);
        assert!(cb.lox.axis.unordered_eq(&moved, 1e-6));
        assert_ne!(cb.id, a.id);
    }

    #[test]
    fn conjugate_label_out_of_truncation() {
        let gens = schottky_pair();
        let t = enumerate_ball(&spec(gens.clone(), 1)).unwrap();
        let labels = maximal_cyclics(&t, 100.0).unwrap();
        let axis_a = t.lookup(&FreeWord::parse("a").unwrap()).unwrap().lox.axis;
        let a = labels.find_by_axis(&axis_a, AXIS_MATCH_TOL).unwrap();
        // radius 1 ball cannot represent bab^-1
        let err = conjugate_label(&labels, &gens[1], a).unwrap_err();
        assert!(matches!(err, GroupError::OutOfTruncation { .. }));
    }

    #[test]
    fn log_bound_k1_is_trivial() {
        let g = schottky_pair()[0];
        let p = Point::from_coords(0.3, 0.1, 1.0).unwrap();
        let rep = check_log_bound(&[g], &p).unwrap();
        assert!(rep.sum_ok);
        assert!(rep.max_ok); // log(1) = 0
        assert_eq!(rep.max_bound, 0.0);
    }

    #[test]
    fn log_bound_holds_for_schottky_pair() {
        let gens = schottky_pair();
        verify_ping_pong(&gens, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = Point::from_coords(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.1..8.0),
            )
            .unwrap();
            let rep = check_log_bound(&gens, &p).unwrap();
            assert!(rep.sum_ok, "sum bound failed at {p}: {}", rep.sum);
            assert!(
                rep.max >= 3.0f64.ln() - 1e-9,
                "max bound failed at {p}: {}",
                rep.max
            );
        }
    }

    #[test]
    fn ping_pong_rejects_overlapping_disks() {
        let gens = vec![
            circle_pairing(c(-1.0, 0.0), c(1.0, 0.0), 1.2, 0.0).unwrap(),
            circle_pairing(c(0.0, -1.0), c(0.0, 1.0), 1.2, 0.0).unwrap(),
        ];
        assert!(matches!(
            verify_ping_pong(&gens, 0.0),
            Err(GroupError::DisksOverlap { .. })
        ));
    }

    #[test]
    fn circle_pairing_maps_circle_to_circle() {
        let g = circle_pairing(c(-2.0, 0.5), c(3.0, -1.0), 0.8, 1.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = c(-2.0, 0.5) + Complex64::from_polar(0.8, th);
            match g.mobius(&crate::hyperbolic::BoundaryPoint::Finite(z)) {
                crate::hyperbolic::BoundaryPoint::Finite(w) => {
                    assert_relative_eq!((w - c(3.0, -1.0)).norm(), 0.8, epsilon = 1e-9);
                }
                _ => panic!("circle image escaped to infinity"),
            }
        }
    }

    #[test]
    fn random_schottky_is_certified_and_loxodromic() {
        for seed in 0..5 {
            let (gens, cert) = random_schottky(2, seed, 3.0).unwrap();
            assert!(cert.min_gap > 0.0);
            let t = enumerate_ball(&spec(gens, 2)).unwrap();
            assert_eq!(t.len(), 16);
        }
    }

    #[test]
    fn random_short_pairs_are_certified_and_short() {
        for seed in 0..8 {
            let (gens, cert) = random_short_pair(seed).unwrap();
            assert!(cert.min_gap > 0.0);
            for g in &gens {
                match classify(g).unwrap() {
                    Classification::Loxodromic(ld) => {
                        assert!(ld.length < 5.0f64.ln(), "length {}", ld.length)
                    }
                    other => panic!("{other:?}"),
                }
            }
            // the whole radius-2 ball must classify loxodromic
            enumerate_ball(&spec(gens, 2)).unwrap();
        }
    }

    #[test]
    fn dedup_is_an_equivalence_on_the_corpus() {
        // no chains a ~ b ~ c with a !~ c at the chosen tolerance
        let t = enumerate_ball(&spec(schottky_pair(), 3)).unwrap();
        let tol = t.matrix_tolerance;
        let n = t.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, cc) = (
                        &t.elements[i].matrix,
                        &t.elements[j].matrix,
                        &t.elements[k].matrix,
                    );
                    if a.proj_dist(b) <= tol && b.proj_dist(cc) <= tol {
                        assert!(a.proj_dist(cc) <= 2.0 * tol);
                    }
                }
            }
        }
    }

    #[test]
    fn displacement_grows_with_axis_distance() {
        let g = schottky_pair()[0];
        let ld = match classify(&g).unwrap() {
            Classification::Loxodromic(ld) => ld,
            _ => unreachable!(),
        };
        let base = crate::hyperbolic::nearest_point_on_line(
            &Point::from_coords(0.0, 0.0, 1.0).unwrap(),
            &ld.axis,
        )
        .unwrap();
        let d0 = displacement(&g, &base).unwrap();
        assert_relative_eq!(d0, ld.length, epsilon = 1e-9);
        let far = Point::from_coords(base.z().re, base.z().im + 2.0, base.t()).unwrap();
        assert!(displacement(&g, &far).unwrap() > d0);
        let _ = distance(&base, &far);
    }
}
