//! Subgroup rank calculus in free groups via folded core graphs.
//!
//! Finitely generated subgroups are represented by folded, trimmed labeled
//! graphs with a basepoint; the rank of the subgroup is the first Betti
//! number `E - V + 1` of its graph. On top of that sit the internal rank of
//! a finite generator family (the maximum rank over all subsets) and the
//! step-by-step rank audit along face-connected orderings of labeled
//! simplex sets.

use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoldError {
    #[error("word contains a character outside a-z / A-Z: {0:?}")]
    BadCharacter(char),
    #[error("internal rank scan over {n} generators exceeds the cap of {cap}")]
    SubsetCapExceeded { n: usize, cap: usize },
    #[error("simplex set is not connected under the face relation")]
    NotFaceConnected,
    #[error("simplex set is empty")]
    EmptySimplexSet,
    #[error("simplex {0} references a vertex without a label")]
    MissingLabel(usize),
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// A letter of a ranked alphabet: `+i` is the `i`-th generator (1-based),
/// `-i` its inverse.
pub type Letter = i8;

/// A freely reduced word. The string form writes generator `i` as the
/// lowercase letter `'a' + i - 1` and its inverse as the uppercase letter,
/// so `"abA"` is `a b a^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(Vec<Letter>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    /// Builds a word from letters, freely reducing.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not allowed");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    pub fn generator(i: u8) -> Self {
        FreeWord(vec![i as Letter])
    }

    pub fn parse(s: &str) -> Result<Self, FoldError> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            if ch.is_ascii_lowercase() {
                letters.push((ch as u8 - b'a' + 1) as Letter);
            } else if ch.is_ascii_uppercase() {
                letters.push(-((ch as u8 - b'A' + 1) as Letter));
            } else {
                return Err(FoldError::BadCharacter(ch));
            }
        }
        Ok(FreeWord::new(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i32) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn conjugate(&self, by: &FreeWord) -> FreeWord {
        by.concat(self).concat(&by.inverse())
    }

    /// The smaller of the word and its inverse under an order that prefers
    /// uninverted letters (`a < A < b < B`); two words generate the same
    /// cyclic subgroup exactly when their normal forms agree (for words
    /// that are not proper powers).
    pub fn cyclic_normal(&self) -> FreeWord {
        let key = |w: &FreeWord| -> Vec<(u8, u8)> {
            w.0.iter()
                .map(|&l| (l.unsigned_abs(), u8::from(l < 0)))
                .collect()
        };
        let inv = self.inverse();
        if key(&inv) < key(self) {
            inv
        } else {
            self.clone()
        }
    }

    /// Whether the word is a proper power `v^n` with `n >= 2`.
    pub fn is_proper_power(&self) -> bool {
        let n = self.len();
        for d in 1..n {
            if n % d == 0 && d < n {
                let root = FreeWord(self.0[..d].to_vec());
                if root.pow((n / d) as i32) == *self {
                    return true;
                }
            }
        }
        false
    }

    pub fn max_generator(&self) -> u8 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            let ch = if l > 0 {
                (b'a' + l as u8 - 1) as char
            } else {
                (b'A' + (-l) as u8 - 1) as char
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Subgroup graphs
// ---------------------------------------------------------------------------

/// A folded core graph over a ranked alphabet, with basepoint 0.
///
/// Folded means no vertex carries two outgoing or two incoming edges with
/// the same label; core means no non-basepoint vertex has degree at most 1.
/// The reduced loops at the basepoint are exactly the elements of the
/// represented subgroup, whose rank is `edges - vertices + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGraph {
    n_letters: u8,
    /// out[v][x] = w for each edge v --x--> w
    out: Vec<BTreeMap<u8, usize>>,
    /// inn[w][x] = v for the same edge
    inn: Vec<BTreeMap<u8, usize>>,
}

impl SubgroupGraph {
    pub fn trivial(n_letters: u8) -> Self {
        SubgroupGraph {
            n_letters,
            out: vec![BTreeMap::new()],
            inn: vec![BTreeMap::new()],
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.out.len()
    }

    pub fn n_edges(&self) -> usize {
        self.out.iter().map(|m| m.len()).sum()
    }

    pub fn n_letters(&self) -> u8 {
        self.n_letters
    }

    /// First Betti number of the folded core: the subgroup rank.
    pub fn rank(&self) -> usize {
        self.n_edges() + 1 - self.n_vertices()
    }

    /// Whether the reduced word traces a loop at the basepoint.
    pub fn accepts(&self, w: &FreeWord) -> bool {
        let mut v = 0usize;
        for &l in w.letters() {
            let next = if l > 0 {
                self.out[v].get(&(l as u8)).copied()
            } else {
                self.inn[v].get(&((-l) as u8)).copied()
            };
            match next {
                Some(u) => v = u,
                None => return false,
            }
        }
        v == 0
    }

    /// Deterministic breadth-first relabeling from the basepoint; two folded
    /// core graphs represent the same subgroup exactly when their canonical
    /// forms agree.
    pub fn canonical_form(&self) -> Vec<(usize, u8, usize)> {
        let mut order: Vec<Option<usize>> = vec![None; self.out.len()];
        order[0] = Some(0);
        let mut next_id = 1usize;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for x in 1..=self.n_letters {
                if let Some(&w) = self.out[v].get(&x) {
                    if order[w].is_none() {
                        order[w] = Some(next_id);
                        next_id += 1;
                        queue.push_back(w);
                    }
                }
                if let Some(&w) = self.inn[v].get(&x) {
                    if order[w].is_none() {
                        order[w] = Some(next_id);
                        next_id += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut edges = Vec::with_capacity(self.n_edges());
        for (v, m) in self.out.iter().enumerate() {
            for (&x, &w) in m {
                edges.push((order[v].unwrap(), x, order[w].unwrap()));
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Plain-text adjacency listing: one `v --x--> w` line per edge, with
    /// the basepoint vertex 0 first.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = format!(
            "vertices {} edges {} rank {} basepoint 0\n",
            self.n_vertices(),
            self.n_edges(),
            self.rank()
        );
        for (v, x, w) in self.canonical_form() {
            let ch = (b'a' + x - 1) as char;
            s.push_str(&format!("{v} --{ch}--> {w}\n"));
        }
        s
    }
}

/// Raw graph used during construction; folded into a `SubgroupGraph`.
struct RawGraph {
    n_letters: u8,
    edges: Vec<(usize, u8, usize)>,
    n_vertices: usize,
}

impl RawGraph {
    fn new(n_letters: u8) -> Self {
        RawGraph {
            n_letters,
            edges: Vec::new(),
            n_vertices: 1,
        }
    }

    fn fresh_vertex(&mut self) -> usize {
        self.n_vertices += 1;
        self.n_vertices - 1
    }

    fn add_word_loop(&mut self, w: &FreeWord) {
        if w.is_empty() {
            return;
        }
        let mut cur = 0usize;
        let n = w.len();
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == n { 0 } else { self.fresh_vertex() };
            if l > 0 {
                self.edges.push((cur, l as u8, next));
            } else {
                self.edges.push((next, (-l) as u8, cur));
            }
            cur = next;
        }
    }

    /// Identifies vertices until no two edges with the same label share a
    /// source or a target, then compacts. `reverse_scan` picks the opposite
    /// scan order; folding is confluent, so both orders yield the same
    /// canonical graph.
    fn fold(self, reverse_scan: bool) -> SubgroupGraph {
        let mut parent: Vec<usize> = (0..self.n_vertices).collect();
        fn find(parent: &mut Vec<usize>, v: usize) -> usize {
            if parent[v] != v {
                let r = find(parent, parent[v]);
                parent[v] = r;
            }
            parent[v]
        }
        loop {
            let mut union: Option<(usize, usize)> = None;
            let mut by_out: HashMap<(usize, u8), usize> = HashMap::new();
            let mut by_in: HashMap<(usize, u8), usize> = HashMap::new();
            let iter: Box<dyn Iterator<Item = &(usize, u8, usize)>> = if reverse_scan {
                Box::new(self.edges.iter().rev())
            } else {
                Box::new(self.edges.iter())
            };
            for &(v, x, w) in iter {
                let rv = find(&mut parent, v);
                let rw = find(&mut parent, w);
                if let Some(&prev) = by_out.get(&(rv, x)) {
                    if prev != rw {
                        union = Some((prev, rw));
                        break;
                    }
                } else {
                    by_out.insert((rv, x), rw);
                }
                if let Some(&prev) = by_in.get(&(rw, x)) {
                    if prev != rv {
                        union = Some((prev, rv));
                        break;
                    }
                } else {
                    by_in.insert((rw, x), rv);
                }
            }
            match union {
                Some((a, b)) => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    // Keep the basepoint's root stable at the root of 0.
                    let r0 = find(&mut parent, 0);
                    if ra == r0 {
                        parent[rb] = ra;
                    } else {
                        parent[ra] = rb;
                    }
                }
                None => break,
            }
        }
        // Compact to root space with basepoint first.
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let r0 = find(&mut parent, 0);
        ids.insert(r0, 0);
        for v in 0..self.n_vertices {
            let r = find(&mut parent, v);
            let next = ids.len();
            ids.entry(r).or_insert(next);
        }
        let mut edge_set: BTreeSet<(usize, u8, usize)> = BTreeSet::new();
        for &(v, x, w) in &self.edges {
            let rv = ids[&find(&mut parent, v)];
            let rw = ids[&find(&mut parent, w)];
            edge_set.insert((rv, x, rw));
        }
        let n = ids.len();
        let mut g = SubgroupGraph {
            n_letters: self.n_letters,
            out: vec![BTreeMap::new(); n],
            inn: vec![BTreeMap::new(); n],
        };
        for (v, x, w) in edge_set {
            g.out[v].insert(x, w);
            g.inn[w].insert(x, v);
        }
        trim_core(&mut g);
        g
    }
}

/// Removes non-basepoint vertices of degree at most one until none remain,
/// then compacts vertex numbering (basepoint stays 0).
fn trim_core(g: &mut SubgroupGraph) {
    loop {
        let mut leaf = None;
        for v in 1..g.out.len() {
            let deg = g.out[v].len() + g.inn[v].len();
            if deg <= 1 {
                leaf = Some(v);
                break;
            }
        }
        let Some(v) = leaf else { break };
        let out: Vec<(u8, usize)> = g.out[v].iter().map(|(&x, &w)| (x, w)).collect();
        for (x, w) in out {
            g.inn[w].remove(&x);
        }
        let inn: Vec<(u8, usize)> = g.inn[v].iter().map(|(&x, &u)| (x, u)).collect();
        for (x, u) in inn {
            g.out[u].remove(&x);
        }
        g.out.remove(v);
        g.inn.remove(v);
        // shift indices above v down by one
        for m in g.out.iter_mut().chain(g.inn.iter_mut()) {
            for tgt in m.values_mut() {
                if *tgt > v {
                    *tgt -= 1;
                }
            }
        }
    }
}

fn alphabet_size(words: &[FreeWord]) -> u8 {
    words.iter().map(|w| w.max_generator()).max().unwrap_or(1).max(1)
}

/// Stallings construction: wedge of word loops at the basepoint, folded to
/// completion and trimmed to the core.
pub fn subgroup_from_words(words: &[FreeWord]) -> SubgroupGraph {
    subgroup_from_words_scan(words, false)
}

pub(crate) fn subgroup_from_words_scan(words: &[FreeWord], reverse_scan: bool) -> SubgroupGraph {
    let mut raw = RawGraph::new(alphabet_size(words));
    for w in words {
        raw.add_word_loop(w);
    }
    raw.fold(reverse_scan)
}

/// Graph of the join `<H1, H2>`: wedge at basepoints, refolded, trimmed.
pub fn join(g1: &SubgroupGraph, g2: &SubgroupGraph) -> SubgroupGraph {
    let n_letters = g1.n_letters.max(g2.n_letters);
    let mut raw = RawGraph::new(n_letters);
    raw.n_vertices = g1.n_vertices() + g2.n_vertices() - 1;
    let off = g1.n_vertices();
    let map2 = |v: usize| if v == 0 { 0 } else { off + v - 1 };
    for (v, m) in g1.out.iter().enumerate() {
        for (&x, &w) in m {
            raw.edges.push((v, x, w));
        }
    }
    for (v, m) in g2.out.iter().enumerate() {
        for (&x, &w) in m {
            raw.edges.push((map2(v), x, map2(w)));
        }
    }
    raw.fold(false)
}

/// Core of the based fiber product: the graph of `H1 /\ H2` (the component
/// of the basepoint pair).
pub fn intersect(g1: &SubgroupGraph, g2: &SubgroupGraph) -> SubgroupGraph {
    let n_letters = g1.n_letters.max(g2.n_letters);
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    ids.insert((0, 0), 0);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut edges: BTreeSet<(usize, u8, usize)> = BTreeSet::new();
    let mut n_vertices = 1usize;
    while let Some((u, v)) = queue.pop_front() {
        let uid = ids[&(u, v)];
        for x in 1..=n_letters {
            if let (Some(&u2), Some(&v2)) = (g1.out[u].get(&x), g2.out[v].get(&x)) {
                let nid = *ids.entry((u2, v2)).or_insert_with(|| {
                    n_vertices += 1;
                    queue.push_back((u2, v2));
                    n_vertices - 1
                });
                edges.insert((uid, x, nid));
            }
            if let (Some(&u2), Some(&v2)) = (g1.inn[u].get(&x), g2.inn[v].get(&x)) {
                let nid = *ids.entry((u2, v2)).or_insert_with(|| {
                    n_vertices += 1;
                    queue.push_back((u2, v2));
                    n_vertices - 1
                });
                edges.insert((nid, x, uid));
            }
        }
    }
    let mut g = SubgroupGraph {
        n_letters,
        out: vec![BTreeMap::new(); n_vertices],
        inn: vec![BTreeMap::new(); n_vertices],
    };
    for (v, x, w) in edges {
        g.out[v].insert(x, w);
        g.inn[w].insert(x, v);
    }
    trim_core(&mut g);
    g
}

// ---------------------------------------------------------------------------
// Internal rank
// ---------------------------------------------------------------------------

/// Default cap on the subset scan: `2^16` folds is seconds at desk scale,
/// beyond that the tool refuses rather than approximates.
pub const SUBSET_SCAN_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalRank {
    pub rank: usize,
    /// Indices into the input family of one maximizing subset (the one with
    /// the smallest bitmask among maximizers).
    pub witness: Vec<usize>,
}

/// Internal rank of a finite generator family: the maximum over all subsets
/// `T` of `rank <T>`, with the empty set contributing 0.
pub fn internal_rank(gens: &[FreeWord]) -> Result<InternalRank, FoldError> {
    internal_rank_capped(gens, SUBSET_SCAN_CAP)
}

pub fn internal_rank_capped(gens: &[FreeWord], cap: usize) -> Result<InternalRank, FoldError> {
    if gens.len() > cap {
        return Err(FoldError::SubsetCapExceeded {
            n: gens.len(),
            cap,
        });
    }
    let n = gens.len();
    if n == 0 {
        return Ok(InternalRank {
            rank: 0,
            witness: Vec::new(),
        });
    }
    let total = 1usize << n;
    let eval = |mask: usize| -> (usize, usize) {
        let subset: Vec<FreeWord> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| gens[i].clone())
            .collect();
        (subgroup_from_words(&subset).rank(), mask)
    };
    let best = if total > 512 {
        (1..total)
            .into_par_iter()
            .map(eval)
            .reduce(|| (0, 0), better_subset)
    } else {
        (1..total).map(eval).fold((0, 0), better_subset)
    };
    let witness = (0..n).filter(|i| best.1 & (1 << i) != 0).collect();
    Ok(InternalRank {
        rank: best.0,
        witness,
    })
}

/// Deterministic reduce: higher rank wins, ties go to the smaller bitmask.
fn better_subset(a: (usize, usize), b: (usize, usize)) -> (usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 != 0 && (a.1 == 0 || b.1 < a.1)) {
        b
    } else {
        a
    }
}

// ---------------------------------------------------------------------------
// Rank audit along face-connected orderings
// ---------------------------------------------------------------------------

/// A finite saturated simplex set with free-word vertex labels, the input of
/// [`rank_lemma_run`]. Simplices are vertex-id sets; every referenced vertex
/// must carry a label.
#[derive(Debug, Clone)]
pub struct LabeledSimplexSet {
    pub simplices: Vec<Vec<u32>>,
    pub labels: BTreeMap<u32, FreeWord>,
}

impl LabeledSimplexSet {
    fn label_words(&self, simplex_ids: &[usize]) -> Result<Vec<FreeWord>, FoldError> {
        let mut seen: BTreeSet<FreeWord> = BTreeSet::new();
        for &si in simplex_ids {
            for v in &self.simplices[si] {
                let w = self
                    .labels
                    .get(v)
                    .ok_or(FoldError::MissingLabel(si))?;
                seen.insert(w.cyclic_normal());
            }
        }
        Ok(seen.into_iter().collect())
    }
}

#[derive(Debug, Clone)]
pub struct RankLemmaStep {
    /// Index (into the input list) of the simplex added at this step.
    pub simplex: usize,
    /// Rank of the subgroup generated by all labels seen so far.
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct RankLemmaTrace {
    pub r: usize,
    pub order: Vec<usize>,
    pub steps: Vec<RankLemmaStep>,
    /// Simplices whose internal rank differs from `r` (violating the
    /// constant-internal-rank hypothesis), with their actual internal ranks.
    pub ir_violations: Vec<(usize, usize)>,
    pub pass: bool,
    pub fail_step: Option<usize>,
}

/// Orders the simplices of a connected saturated set so that each one after
/// the first is a proper face or coface of an earlier one (breadth-first
/// over the face relation), then folds the accumulated vertex labels at each
/// step and checks `rank <= r` throughout. The internal rank of each simplex
/// is audited against the constant-rank hypothesis and mismatches are
/// reported in the trace.
pub fn rank_lemma_run(
    set: &LabeledSimplexSet,
    r: usize,
    root: usize,
) -> Result<RankLemmaTrace, FoldError> {
    let n = set.simplices.len();
    if n == 0 {
        return Err(FoldError::EmptySimplexSet);
    }
    assert!(root < n, "root simplex index out of range");
    // Face-relation adjacency: one is a proper face of the other.
    let is_face = |a: &[u32], b: &[u32]| -> bool {
        a.len() < b.len() && a.iter().all(|v| b.contains(v))
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if is_face(&set.simplices[i], &set.simplices[j])
                || is_face(&set.simplices[j], &set.simplices[i])
            {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return Err(FoldError::NotFaceConnected);
    }

    let mut ir_violations = Vec::new();
    for i in 0..n {
        let words = set.label_words(&[i])?;
        let ir = internal_rank(&words)?.rank;
        if ir != r {
            ir_violations.push((i, ir));
        }
    }

    let mut steps = Vec::with_capacity(n);
    let mut fail_step = None;
    for i in 0..n {
        let words = set.label_words(&order[..=i])?;
        let rank = subgroup_from_words(&words).rank();
        steps.push(RankLemmaStep {
            simplex: order[i],
            rank,
        });
        if rank > r && fail_step.is_none() {
            fail_step = Some(i);
        }
    }
    Ok(RankLemmaTrace {
        r,
        order,
        steps,
        ir_violations,
        pass: fail_step.is_none(),
        fail_step,
    })
}
