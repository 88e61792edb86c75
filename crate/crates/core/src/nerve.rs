//! Finite simplicial complexes, nerves of indexed covers, links,
//! internal-rank filtrations, stratum components, and Betti numbers over
//! the two-element field.
//!
//! Complexes store their full downward-closed simplex family; simplices are
//! sorted vertex-id vectors. Saturated sets are plain simplex sets with no
//! closure requirement. Vertex labels are free-word primitives of cyclic
//! subgroups, so the rank machinery of [`crate::foldings`] applies directly.

use crate::foldings::{self, FoldError, FreeWord};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Nerves refusing to grow past this dimension indicate a truncation
/// artifact; the covers of interest are finite-dimensional.
pub const DIMENSION_CAP: usize = 8;

/// Simplex-count cap for the homology routine.
pub const HOMOLOGY_CAP: usize = 20_000;

pub type Simplex = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NerveError {
    #[error("intersection oracle returned undecided on family {family:?}")]
    Undecided { family: Vec<usize> },
    #[error("nerve dimension exceeded the cap of {cap} (finite-dimensionality assertion)")]
    DimensionCap { cap: usize },
    #[error("simplex {0:?} is not in the complex")]
    NoSuchSimplex(Simplex),
    #[error("complex has {n} simplices, above the homology cap {cap}")]
    TooLargeForHomology { n: usize, cap: usize },
    #[error(transparent)]
    Fold(#[from] FoldError),
}

// ---------------------------------------------------------------------------
// Complexes
// ---------------------------------------------------------------------------

/// A finite abstract simplicial complex: a downward-closed family of
/// nonempty vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Complex {
    simplices: BTreeSet<Simplex>,
}

impl Complex {
    pub fn empty() -> Self {
        Complex::default()
    }

    /// Builds the downward closure of the given simplices.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(sims: I) -> Self {
        let mut cx = Complex::empty();
        for s in sims {
            cx.insert_closed(s);
        }
        debug_assert!(cx.is_downward_closed());
        cx
    }

    pub fn insert_closed(&mut self, mut s: Simplex) {
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return;
        }
        for sub in nonempty_subsets(&s) {
            self.simplices.insert(sub);
        }
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn vertices(&self) -> Vec<u32> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| s[0])
            .collect()
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    /// Every nonempty proper subset of every simplex is present.
    pub fn is_downward_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            s.len() == 1
                || (0..s.len()).all(|i| {
                    let mut f = s.clone();
                    f.remove(i);
                    self.simplices.contains(&f)
                })
        })
    }

    /// Maximal simplices (those that are faces of nothing else).
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices
            .iter()
            .filter(|s| {
                !self
                    .simplices
                    .iter()
                    .any(|t| t.len() > s.len() && is_subset(s, t))
            })
            .cloned()
            .collect()
    }

    /// Line-oriented text form: sorted maximal simplices, one per line,
    /// vertices space-separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in self.maximal_simplices() {
            let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    /// Link of a simplex: all simplices disjoint from it whose union with it
    /// is again a simplex.
    pub fn link(&self, sigma: &Simplex) -> Result<Complex, NerveError> {
        let mut s = sigma.clone();
        s.sort_unstable();
        if !self.contains(&s) {
            return Err(NerveError::NoSuchSimplex(s));
        }
        let mut link = Complex::empty();
        for tau in &self.simplices {
            if tau.iter().any(|v| s.contains(v)) {
                continue;
            }
            let mut union: Simplex = tau.iter().chain(s.iter()).copied().collect();
            union.sort_unstable();
            if self.contains(&union) {
                link.simplices.insert(tau.clone());
            }
        }
        debug_assert!(link.is_downward_closed());
        Ok(link)
    }
}

fn is_subset(a: &Simplex, b: &Simplex) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

fn nonempty_subsets(s: &Simplex) -> Vec<Simplex> {
    let n = s.len();
    let mut out = Vec::with_capacity((1 << n) - 1);
    for mask in 1usize..(1 << n) {
        out.push(
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| s[i])
                .collect(),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Labelings and saturated sets
// ---------------------------------------------------------------------------

/// Assignment of a cyclic-subgroup primitive to every vertex. Distinct
/// vertices may carry equal labels (non-faithful indexing is allowed).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling(pub BTreeMap<u32, FreeWord>);

impl Labeling {
    pub fn get(&self, v: u32) -> Option<&FreeWord> {
        self.0.get(&v)
    }
}

/// A set of (open) simplices of a complex; NOT required to be closed under
/// faces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SaturatedSet(pub BTreeSet<Simplex>);

impl SaturatedSet {
    pub fn from_iter<I: IntoIterator<Item = Simplex>>(it: I) -> Self {
        SaturatedSet(it.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Generator family of a simplex: the labels of its vertices, deduplicated
/// as cyclic-subgroup labels (a word and its inverse name the same
/// subgroup).
pub fn theta_simplex(labeling: &Labeling, sigma: &Simplex) -> Result<Vec<FreeWord>, NerveError> {
    let mut seen: BTreeSet<FreeWord> = BTreeSet::new();
    for v in sigma {
        let w = labeling
            .get(*v)
            .ok_or_else(|| NerveError::NoSuchSimplex(vec![*v]))?;
        seen.insert(w.cyclic_normal());
    }
    Ok(seen.into_iter().collect())
}

/// Generator family of a saturated set: the union of the per-simplex
/// families.
pub fn theta_saturated(
    labeling: &Labeling,
    sat: &SaturatedSet,
) -> Result<Vec<FreeWord>, NerveError> {
    let mut seen: BTreeSet<FreeWord> = BTreeSet::new();
    for s in &sat.0 {
        for w in theta_simplex(labeling, s)? {
            seen.insert(w);
        }
    }
    Ok(seen.into_iter().collect())
}

/// Rank of the subgroup generated by a simplex's labels.
pub fn rank_theta_simplex(labeling: &Labeling, sigma: &Simplex) -> Result<usize, NerveError> {
    Ok(foldings::subgroup_from_words(&theta_simplex(labeling, sigma)?).rank())
}

/// Internal rank of a simplex: the internal rank of its label family, which
/// equals the maximum of `rank theta(tau)` over all faces `tau`.
pub fn internal_rank_of_simplex(
    labeling: &Labeling,
    sigma: &Simplex,
) -> Result<usize, NerveError> {
    Ok(foldings::internal_rank(&theta_simplex(labeling, sigma)?)?.rank)
}

/// The face-maximum form of internal rank, enumerated over the faces of
/// `sigma` directly; used to cross-check `internal_rank_of_simplex`.
pub fn internal_rank_by_faces(labeling: &Labeling, sigma: &Simplex) -> Result<usize, NerveError> {
    let mut best = 0;
    for face in nonempty_subsets(sigma) {
        best = best.max(rank_theta_simplex(labeling, &face)?);
    }
    Ok(best)
}

/// Subcomplex of all simplices of internal rank at most `m`. Downward
/// closure of the result is a theorem (internal rank is monotone under
/// faces), so a failed closure audit is a bug.
pub fn filtered_subcomplex(
    cx: &Complex,
    labeling: &Labeling,
    m: usize,
) -> Result<Complex, NerveError> {
    let mut out = Complex::empty();
    for s in cx.simplices() {
        if internal_rank_of_simplex(labeling, s)? <= m {
            out.simplices.insert(s.clone());
        }
    }
    assert!(
        out.is_downward_closed(),
        "internal-rank filtration produced a non-closed family"
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// Nerve construction
// ---------------------------------------------------------------------------

/// Answer of a three-valued intersection oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleAnswer {
    Yes,
    No,
    Undecided,
}

#[derive(Debug, Clone, Copy)]
pub struct NerveOptions {
    pub dimension_cap: usize,
    /// When true, undecided families are excluded (and reported) instead of
    /// aborting the construction.
    pub exclude_undecided: bool,
}

impl Default for NerveOptions {
    fn default() -> Self {
        NerveOptions {
            dimension_cap: DIMENSION_CAP,
            exclude_undecided: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NerveBuild {
    pub complex: Complex,
    /// Families the oracle could not certify, present only when
    /// `exclude_undecided` is set.
    pub undecided: Vec<Vec<usize>>,
    pub queries: usize,
}

/// Nerve of an indexed cover with `n` indices: one vertex per index, one
/// simplex per subfamily the oracle certifies as intersecting. Candidate
/// families are grown level by level (a family can only intersect if all
/// its facets do), so the oracle is consulted exactly once per candidate.
///
/// Indexing need not be faithful: two indices with identical sets still get
/// distinct vertices.
pub fn nerve(
    n: usize,
    oracle: &mut dyn FnMut(&[usize]) -> OracleAnswer,
    opts: &NerveOptions,
) -> Result<NerveBuild, NerveError> {
    let mut cx = Complex::empty();
    let mut undecided = Vec::new();
    let mut queries = 0usize;
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let fam = vec![i];
        queries += 1;
        match oracle(&fam) {
            OracleAnswer::Yes => {
                cx.simplices.insert(vec![i as u32]);
                frontier.push(fam);
            }
            OracleAnswer::No => {}
            OracleAnswer::Undecided => {
                if opts.exclude_undecided {
                    undecided.push(fam);
                } else {
                    return Err(NerveError::Undecided { family: fam });
                }
            }
        }
    }
    let mut level = 1usize;
    while !frontier.is_empty() {
        if level > opts.dimension_cap {
            return Err(NerveError::DimensionCap {
                cap: opts.dimension_cap,
            });
        }
        let members: BTreeSet<Vec<usize>> = frontier.iter().cloned().collect();
        let mut next: Vec<Vec<usize>> = Vec::new();
        let mut tried: BTreeSet<Vec<usize>> = BTreeSet::new();
        for fam in &frontier {
            for j in (fam[fam.len() - 1] + 1)..n {
                let mut cand = fam.clone();
                cand.push(j);
                if !tried.insert(cand.clone()) {
                    continue;
                }
                // all facets must already be simplices
                let all_facets = (0..cand.len()).all(|i| {
                    let mut f = cand.clone();
                    f.remove(i);
                    members.contains(&f)
                });
                if !all_facets {
                    continue;
                }
                queries += 1;
                match oracle(&cand) {
                    OracleAnswer::Yes => {
                        cx.simplices
                            .insert(cand.iter().map(|&i| i as u32).collect());
                        next.push(cand);
                    }
                    OracleAnswer::No => {}
                    OracleAnswer::Undecided => {
                        if opts.exclude_undecided {
                            undecided.push(cand);
                        } else {
                            return Err(NerveError::Undecided { family: cand });
                        }
                    }
                }
            }
        }
        frontier = next;
        level += 1;
    }
    debug_assert!(cx.is_downward_closed());
    Ok(NerveBuild {
        complex: cx,
        undecided,
        queries,
    })
}

// ---------------------------------------------------------------------------
// Strata
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Strata {
    /// `(r, components of the stratum X_r)` for `r = k-2` then `r = k-1`.
    pub by_rank: Vec<(usize, Vec<SaturatedSet>)>,
    /// Simplices of internal rank at least `k` (violating the rank-bound
    /// hypothesis), reported rather than fatal.
    pub violations: Vec<(Simplex, usize)>,
}

/// Splits the simplices of internal rank above `k - 3` into the strata
/// `X_{k-2}` and `X_{k-1}` and lists the face-adjacency components of each.
/// Two stratum simplices are adjacent when one is a proper face of the
/// other.
pub fn strata_components(
    cx: &Complex,
    labeling: &Labeling,
    k: usize,
) -> Result<Strata, NerveError> {
    assert!(k >= 3, "strata need k >= 3");
    let mut violations = Vec::new();
    let mut stratum: BTreeMap<usize, Vec<Simplex>> = BTreeMap::new();
    for s in cx.simplices() {
        let ir = internal_rank_of_simplex(labeling, s)?;
        if ir <= k - 3 {
            continue;
        }
        if ir >= k {
            violations.push((s.clone(), ir));
            continue;
        }
        stratum.entry(ir).or_default().push(s.clone());
    }
    let mut by_rank = Vec::new();
    for r in [k - 2, k - 1] {
        let sims = stratum.remove(&r).unwrap_or_default();
        by_rank.push((r, components_of(&sims)));
    }
    Ok(Strata {
        by_rank,
        violations,
    })
}

/// Face-adjacency components of every constant-internal-rank stratum,
/// listed as `(r, components of { simplices with IR = r })` for each rank
/// value present. Every component is a connected saturated set of constant
/// internal rank by construction.
pub fn ir_strata_all(
    cx: &Complex,
    labeling: &Labeling,
) -> Result<Vec<(usize, Vec<SaturatedSet>)>, NerveError> {
    let mut stratum: BTreeMap<usize, Vec<Simplex>> = BTreeMap::new();
    for s in cx.simplices() {
        let ir = internal_rank_of_simplex(labeling, s)?;
        stratum.entry(ir).or_default().push(s.clone());
    }
    Ok(stratum
        .into_iter()
        .map(|(r, sims)| (r, components_of(&sims)))
        .collect())
}

fn components_of(sims: &[Simplex]) -> Vec<SaturatedSet> {
    let n = sims.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, v: usize) -> usize {
        if p[v] != v {
            let r = find(p, p[v]);
            p[v] = r;
        }
        p[v]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&sims[i], &sims[j]);
            let face = (a.len() < b.len() && is_subset(a, b))
                || (b.len() < a.len() && is_subset(b, a));
            if face {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, SaturatedSet> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().0.insert(sims[i].clone());
    }
    groups.into_values().collect()
}

// ---------------------------------------------------------------------------
// Homology over GF(2)
// ---------------------------------------------------------------------------

/// Betti numbers over the two-element field, one entry per dimension from 0
/// up to the complex's dimension (at least three entries).
pub fn homology_z2(cx: &Complex) -> Result<Vec<usize>, NerveError> {
    if cx.len() > HOMOLOGY_CAP {
        return Err(NerveError::TooLargeForHomology {
            n: cx.len(),
            cap: HOMOLOGY_CAP,
        });
    }
    let dim = cx.dim().unwrap_or(0);
    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); dim + 1];
    for s in cx.simplices() {
        by_dim[s.len() - 1].push(s);
    }
    let index: Vec<BTreeMap<&Simplex, usize>> = by_dim
        .iter()
        .map(|v| v.iter().enumerate().map(|(i, s)| (*s, i)).collect())
        .collect();
    // rank of the boundary map from dimension d to d-1, over GF(2)
    let mut boundary_rank = vec![0usize; dim + 2];
    for d in 1..=dim {
        let rows: Vec<Vec<u64>> = by_dim[d]
            .iter()
            .map(|s| {
                let ncols = by_dim[d - 1].len();
                let mut row = vec![0u64; (ncols + 63) / 64];
                for i in 0..s.len() {
                    let mut f: Simplex = s.to_vec();
                    f.remove(i);
                    let col = index[d - 1][&f];
                    row[col / 64] ^= 1 << (col % 64);
                }
                row
            })
            .collect();
        boundary_rank[d] = gf2_rank(rows);
    }
    let mut betti = Vec::with_capacity(dim + 1);
    for d in 0..=dim {
        let n_d = by_dim[d].len();
        betti.push(n_d - boundary_rank[d] - boundary_rank[d + 1]);
    }
    while betti.len() < 3 {
        betti.push(0);
    }
    Ok(betti)
}

fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let ncols = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..ncols {
        let (w, b) = (col / 64, col % 64);
        let pivot = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1);
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][w] >> b & 1 == 1 {
                let (head, tail) = rows.split_at_mut(rank.max(r));
                let (src, dst) = if r < rank {
                    (&tail[0], &mut head[r])
                } else {
                    (&head[rank], &mut tail[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d ^= *s;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse(s).unwrap()
    }

    fn label(pairs: &[(u32, &str)]) -> Labeling {
        Labeling(pairs.iter().map(|(v, s)| (*v, w(s))).collect())
    }

    #[test]
    fn downward_closure_on_build() {
        let cx = Complex::from_simplices([vec![0, 1, 2]]);
        assert_eq!(cx.len(), 7);
        assert!(cx.is_downward_closed());
        assert!(cx.contains(&vec![0, 2]));
    }

    #[test]
    fn link_in_a_lone_edge() {
        let cx = Complex::from_simplices([vec![0, 1]]);
        let link = cx.link(&vec![0]).unwrap();
        assert_eq!(link.len(), 1);
        assert!(link.contains(&vec![1]));
    }

    #[test]
    fn link_of_vertex_in_triangle_is_opposite_edge() {
        let cx = Complex::from_simplices([vec![0, 1, 2]]);
        let link = cx.link(&vec![0]).unwrap();
        assert_eq!(link.len(), 3);
        assert!(link.contains(&vec![1, 2]));
        assert!(link.contains(&vec![1]));
        assert!(link.contains(&vec![2]));
    }

    #[test]
    fn link_of_missing_simplex_errors() {
        let cx = Complex::from_simplices([vec![0, 1]]);
        assert!(matches!(
            cx.link(&vec![0, 2]),
            Err(NerveError::NoSuchSimplex(_))
        ));
    }

    #[test]
    fn nerve_of_pairwise_family_without_triple() {
        // Pairwise intersecting, empty triple: the boundary of a triangle.
        let mut oracle = |fam: &[usize]| {
            if fam.len() <= 2 {
                OracleAnswer::Yes
            } else {
                OracleAnswer::No
            }
        };
        let built = nerve(3, &mut oracle, &NerveOptions::default()).unwrap();
        assert_eq!(built.complex.len(), 6);
        assert!(!built.complex.contains(&vec![0, 1, 2]));
        let betti = homology_z2(&built.complex).unwrap();
        assert_eq!(&betti[..3], &[1, 1, 0]);
    }

    #[test]
    fn nerve_single_index() {
        let mut oracle = |_: &[usize]| OracleAnswer::Yes;
        let built = nerve(1, &mut oracle, &NerveOptions::default()).unwrap();
        assert_eq!(built.complex.len(), 1);
    }

    #[test]
    fn nerve_undecided_aborts_by_default() {
        let mut oracle = |fam: &[usize]| {
            if fam.len() == 2 {
                OracleAnswer::Undecided
            } else {
                OracleAnswer::Yes
            }
        };
        match nerve(2, &mut oracle, &NerveOptions::default()) {
            Err(NerveError::Undecided { family }) => assert_eq!(family, vec![0, 1]),
            other => panic!("expected undecided error, got {other:?}"),
        }
        let mut oracle = |fam: &[usize]| {
            if fam.len() == 2 {
                OracleAnswer::Undecided
            } else {
                OracleAnswer::Yes
            }
        };
        let opts = NerveOptions {
            exclude_undecided: true,
            ..Default::default()
        };
        let built = nerve(2, &mut oracle, &opts).unwrap();
        assert_eq!(built.undecided, vec![vec![0, 1]]);
        assert_eq!(built.complex.len(), 2);
    }

    #[test]
    fn nerve_dimension_cap_errors() {
        let mut oracle = |_: &[usize]| OracleAnswer::Yes;
        let opts = NerveOptions {
            dimension_cap: 2,
            ..Default::default()
        };
        assert!(matches!(
            nerve(5, &mut oracle, &opts),
            Err(NerveError::DimensionCap { cap: 2 })
        ));
    }

    #[test]
    fn theta_collects_and_dedups_labels() {
        let lab = label(&[(0, "a"), (1, "b"), (2, "BA")]);
        let gens = theta_simplex(&lab, &vec![0, 1]).unwrap();
        assert_eq!(gens.len(), 2);
        // a face's family is contained in the simplex's family
        let face = theta_simplex(&lab, &vec![0]).unwrap();
        assert!(face.iter().all(|g| gens.contains(g)));
        // (ab)^-1 labels the same cyclic subgroup as ab
        let lab2 = label(&[(0, "ab"), (1, "BA")]);
        assert_eq!(theta_simplex(&lab2, &vec![0, 1]).unwrap().len(), 1);
    }

    #[test]
    fn theta_saturated_is_union_of_simplex_families() {
        let lab = label(&[(0, "a"), (1, "b"), (2, "c")]);
        let sat = SaturatedSet::from_iter([vec![0, 1], vec![1, 2]]);
        let gens = theta_saturated(&lab, &sat).unwrap();
        assert_eq!(gens.len(), 3);
    }

    #[test]
    fn internal_rank_of_simple_labels() {
        let lab = label(&[(0, "a"), (1, "a"), (2, "b")]);
        assert_eq!(internal_rank_of_simplex(&lab, &vec![0]).unwrap(), 1);
        // same subgroup on both endpoints: still rank 1
        assert_eq!(internal_rank_of_simplex(&lab, &vec![0, 1]).unwrap(), 1);
        // a free basis on an edge
        assert_eq!(internal_rank_of_simplex(&lab, &vec![0, 2]).unwrap(), 2);
    }

    #[test]
    fn internal_rank_agrees_with_face_maximum() {
        let lab = label(&[(0, "a"), (1, "bb"), (2, "baB"), (3, "b")]);
        let cx = Complex::from_simplices([vec![0, 1, 2, 3]]);
        for s in cx.simplices() {
            assert_eq!(
                internal_rank_of_simplex(&lab, s).unwrap(),
                internal_rank_by_faces(&lab, s).unwrap(),
                "mismatch at {s:?}"
            );
        }
    }

    #[test]
    fn filtration_is_nested_and_exhaustive() {
        let lab = label(&[(0, "a"), (1, "b"), (2, "ab")]);
        let cx = Complex::from_simplices([vec![0, 1, 2]]);
        let f0 = filtered_subcomplex(&cx, &lab, 0).unwrap();
        assert!(f0.is_empty());
        let f1 = filtered_subcomplex(&cx, &lab, 1).unwrap();
        let f2 = filtered_subcomplex(&cx, &lab, 2).unwrap();
        assert!(f1.simplices().all(|s| f2.contains(s)));
        assert_eq!(f2.len(), cx.len(), "m >= max IR keeps everything");
    }

    #[test]
    fn strata_of_two_vertices_joined_by_edge() {
        // k = 3: vertices have IR 1 = k - 2, the edge IR 2 = k - 1.
        let lab = label(&[(0, "a"), (1, "b")]);
        let cx = Complex::from_simplices([vec![0, 1]]);
        let strata = strata_components(&cx, &lab, 3).unwrap();
        assert!(strata.violations.is_empty());
        let (r1, comps1) = &strata.by_rank[0];
        let (r2, comps2) = &strata.by_rank[1];
        assert_eq!((*r1, comps1.len()), (1, 2));
        assert_eq!((*r2, comps2.len()), (2, 1));
    }

    #[test]
    fn strata_report_rank_violations() {
        // a triangle with a rank-3 label family at k = 3 is a violation
        let lab = label(&[(0, "a"), (1, "bb"), (2, "baB")]);
        let cx = Complex::from_simplices([vec![0, 1, 2]]);
        let strata = strata_components(&cx, &lab, 3).unwrap();
        assert_eq!(strata.violations.len(), 1);
        assert_eq!(strata.violations[0].0, vec![0, 1, 2]);
    }

    #[test]
    fn homology_of_single_simplex() {
        let cx = Complex::from_simplices([vec![0, 1, 2, 3]]);
        let betti = homology_z2(&cx).unwrap();
        assert_eq!(&betti[..3], &[1, 0, 0]);
    }

    #[test]
    fn homology_of_sphere_boundary() {
        // boundary of a tetrahedron: a 2-sphere
        let cx = Complex::from_simplices([
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
        ]);
        let betti = homology_z2(&cx).unwrap();
        assert_eq!(&betti[..3], &[1, 0, 1]);
    }

    #[test]
    fn homology_counts_components() {
        let cx = Complex::from_simplices([vec![0, 1], vec![2, 3]]);
        let betti = homology_z2(&cx).unwrap();
        assert_eq!(&betti[..3], &[2, 0, 0]);
    }

    #[test]
    fn homology_refuses_oversized_complexes() {
        // the closure of a 15-vertex simplex has 2^15 - 1 faces
        let cx = Complex::from_simplices([(0u32..15).collect::<Vec<_>>()]);
        assert!(matches!(
            homology_z2(&cx),
            Err(NerveError::TooLargeForHomology { .. })
        ));
    }

    #[test]
    fn complex_text_roundtrips_maximal_simplices() {
        let cx = Complex::from_simplices([vec![0, 1, 2], vec![2, 3]]);
        let text = cx.to_text();
        assert_eq!(text, "0 1 2\n2 3\n");
    }
}
