//! Independent reference implementations used by the test suites.
//!
//! Everything here deliberately avoids the primary code paths it is used to
//! check: distances by numeric arc-length integration instead of the closed
//! form, subgroup ranks by brute-force Nielsen reduction instead of folded
//! graphs, and adjacency by quadratic scans instead of indexed builds.

use crate::foldings::FreeWord;
use crate::hyperbolic::{distance, BoundaryPoint, Geodesic, Point};

/// Hyperbolic distance by Simpson integration of the arc length along the
/// connecting circular arc (or vertical segment), constructed by elementary
/// Euclidean geometry in the vertical plane of the two points.
pub fn distance_by_integration(p: &Point, q: &Point, steps: usize) -> f64 {
    let dz = q.z() - p.z();
    let xi = dz.norm();
    if xi < 1e-14 {
        return (q.t() / p.t()).ln().abs();
    }
    // Circle orthogonal to the boundary through 2D points (0, t_p), (xi, t_q):
    // center (m, 0), radius R.
    let (tp, tq) = (p.t(), q.t());
    let m = (xi * xi + tq * tq - tp * tp) / (2.0 * xi);
    let r = (m * m + tp * tp).sqrt();
    // Parametrize by the angle phi in (0, pi): gamma(phi) = (m + R cos phi, R sin phi),
    // |gamma'| = R, so ds = d phi / sin phi.
    let phi_p = tp.atan2(0.0 - m);
    let phi_q = tq.atan2(xi - m);
    let (a, b) = if phi_p < phi_q {
        (phi_p, phi_q)
    } else {
        (phi_q, phi_p)
    };
    let n = steps.max(8) & !1; // even
    let h = (b - a) / n as f64;
    let f = |phi: f64| 1.0 / phi.sin();
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let phi = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(phi);
    }
    let _ = r;
    sum * h / 3.0
}

/// Distance from a point to a line by golden-section search over the line's
/// own parametrization, independent of the normalization formula.
pub fn dist_point_to_line_by_search(p: &Point, line: &Geodesic) -> f64 {
    let eval = |s: f64| -> f64 {
        let q = point_on_line(line, s);
        distance(p, &q)
    };
    // expanding bracket then golden section
    let mut lo = -40.0f64;
    let mut hi = 40.0f64;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    eval(0.5 * (lo + hi))
}

/// Point on a geodesic line at arclength parameter `s`, parametrized from
/// elementary data (semicircle over finite endpoints, vertical ray else).
fn point_on_line(line: &Geodesic, s: f64) -> Point {
    match (line.e1, line.e2) {
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
            let mid = (a + b) / 2.0;
            let half = (b - a) / 2.0;
            let r = half.norm();
            let u = half / r;
            Point::new(mid + u * r * s.tanh(), r / s.cosh()).unwrap()
        }
        (BoundaryPoint::Finite(a), BoundaryPoint::Infinity)
        | (BoundaryPoint::Infinity, BoundaryPoint::Finite(a)) => {
            Point::new(a, s.exp()).unwrap()
        }
        _ => unreachable!("degenerate geodesic"),
    }
}

// ---------------------------------------------------------------------------
// Brute-force Nielsen reduction
// ---------------------------------------------------------------------------

/// Rank of the subgroup generated by `words`, computed by brute-force
/// Nielsen reduction: elementary transformations replace some `u_i` by
/// `u_i u_j^±` or `u_j^± u_i`, trivial words are dropped, and a word and
/// its inverse count as the same element. Descent by total length alone can
/// stall (a collapse sometimes needs an equal-length move first), so stuck
/// states are searched breadth-first through their constant-length plateau
/// until a strictly shorter state appears; length-non-increasing sequences
/// reach a Nielsen-reduced set, whose cardinality is the rank.
pub fn nielsen_rank(words: &[FreeWord]) -> usize {
    let mut set: Vec<FreeWord> = words.iter().map(|w| w.cyclic_normal()).collect();
    normalize(&mut set);
    loop {
        if let Some(next) = strict_descent(&set) {
            set = next;
            continue;
        }
        match plateau_search(&set) {
            Some(next) => set = next,
            None => break,
        }
    }
    set.len()
}

fn total_len(set: &[FreeWord]) -> usize {
    set.iter().map(FreeWord::len).sum()
}

fn normalize(set: &mut Vec<FreeWord>) {
    for w in set.iter_mut() {
        *w = w.cyclic_normal();
    }
    set.retain(|w| !w.is_empty());
    set.sort();
    set.dedup();
}

/// States one elementary transformation away whose replaced word did not
/// grow; growing moves are never needed, since length-non-increasing
/// sequences already reach a Nielsen-reduced set.
fn non_increasing_neighbors(set: &[FreeWord]) -> Vec<Vec<FreeWord>> {
    let mut out = Vec::new();
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i == j {
                continue;
            }
            for candidate in [
                set[i].concat(&set[j]),
                set[i].concat(&set[j].inverse()),
                set[j].concat(&set[i]),
                set[j].inverse().concat(&set[i]),
            ] {
                if candidate.len() > set[i].len() {
                    continue;
                }
                let mut next = set.to_vec();
                next[i] = candidate;
                normalize(&mut next);
                out.push(next);
            }
        }
    }
    out
}

fn strict_descent(set: &[FreeWord]) -> Option<Vec<FreeWord>> {
    let len = total_len(set);
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i == j {
                continue;
            }
            for candidate in [
                set[i].concat(&set[j]),
                set[i].concat(&set[j].inverse()),
                set[j].concat(&set[i]),
                set[j].inverse().concat(&set[i]),
            ] {
                if candidate.len() >= set[i].len() {
                    continue;
                }
                let mut next = set.to_vec();
                next[i] = candidate;
                normalize(&mut next);
                if total_len(&next) < len {
                    return Some(next);
                }
            }
        }
    }
    None
}

/// Breadth-first search of the constant-total-length plateau around a stuck
/// state; returns the first strictly shorter state reachable through it.
fn plateau_search(set: &[FreeWord]) -> Option<Vec<FreeWord>> {
    use std::collections::{BTreeSet, VecDeque};
    let len = total_len(set);
    let mut visited: BTreeSet<Vec<FreeWord>> = BTreeSet::new();
    visited.insert(set.to_vec());
    let mut queue: VecDeque<Vec<FreeWord>> = VecDeque::from([set.to_vec()]);
    let budget = 50_000usize;
    let mut expanded = 0usize;
    while let Some(cur) = queue.pop_front() {
        expanded += 1;
        assert!(
            expanded <= budget,
            "Nielsen plateau exceeded the search budget at total length {len}"
        );
        for next in non_increasing_neighbors(&cur) {
            let l = total_len(&next);
            if l < len {
                return Some(next);
            }
            if l == len && visited.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    None
}
