//! The bipartite graph on stratum components and its tree test.
//!
//! Nodes are the face-adjacency components of the two top internal-rank
//! strata; an edge joins a lower-stratum component to an upper-stratum one
//! whenever some simplex of one is a proper face of a simplex of the other.

use crate::foldings;
use crate::kleinian::{conjugate_label, GroupError, LabelSet};
use crate::nerve::{theta_saturated, Labeling, NerveError, SaturatedSet, Simplex, Strata};
use crate::hyperbolic::Isometry;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One node of the component graph: a stratum rank and the saturated set of
/// simplices forming the component.
#[derive(Debug, Clone)]
pub struct ComponentNode {
    pub rank: usize,
    pub simplices: SaturatedSet,
}

/// Bipartite graph on the components of the two strata. Nodes are indexed
/// with the lower stratum first; every edge joins a lower node to an upper
/// node by construction, and `audit_bipartite` re-checks it.
#[derive(Debug, Clone)]
pub struct ComponentGraph {
    pub nodes: Vec<ComponentNode>,
    pub lower_rank: usize,
    pub upper_rank: usize,
    pub n_lower: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl ComponentGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_lower(&self, v: usize) -> bool {
        v < self.n_lower
    }

    pub fn audit_bipartite(&self) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| self.is_lower(a) != self.is_lower(b))
    }

    /// Standard edge-list text: one `u v` pair per line, after a header of
    /// node descriptions.
    pub fn to_edge_list_text(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            s.push_str(&format!(
                "# node {i} stratum {} simplices {}\n",
                n.rank,
                n.simplices.len()
            ));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

/// Builds the component graph from the strata computed by
/// [`crate::nerve::strata_components`]. An edge is recorded per adjacent
/// pair of components, deduplicated.
pub fn build(strata: &Strata) -> ComponentGraph {
    let (lower_rank, lower) = &strata.by_rank[0];
    let (upper_rank, upper) = &strata.by_rank[1];
    let n_lower = lower.len();
    let mut nodes = Vec::with_capacity(n_lower + upper.len());
    for c in lower {
        nodes.push(ComponentNode {
            rank: *lower_rank,
            simplices: c.clone(),
        });
    }
    for c in upper {
        nodes.push(ComponentNode {
            rank: *upper_rank,
            simplices: c.clone(),
        });
    }
    let mut edges = BTreeSet::new();
    for (i, lo) in lower.iter().enumerate() {
        for (j, hi) in upper.iter().enumerate() {
            if adjacent(lo, hi) {
                edges.insert((i, n_lower + j));
            }
        }
    }
    let g = ComponentGraph {
        nodes,
        lower_rank: *lower_rank,
        upper_rank: *upper_rank,
        n_lower,
        edges,
    };
    debug_assert!(g.audit_bipartite());
    g
}

/// Two components are adjacent when some simplex of one is a proper face of
/// a simplex of the other.
pub fn adjacent(a: &SaturatedSet, b: &SaturatedSet) -> bool {
    for s in &a.0 {
        for t in &b.0 {
            if proper_face(s, t) || proper_face(t, s) {
                return true;
            }
        }
    }
    false
}

fn proper_face(a: &Simplex, b: &Simplex) -> bool {
    a.len() < b.len() && a.iter().all(|v| b.binary_search(v).is_ok())
}

// ---------------------------------------------------------------------------
// Tree test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeVerdict {
    Tree,
    /// Two nodes with no path between them (or the empty graph, by
    /// convention).
    Disconnected { witness: Option<(usize, usize)> },
    /// A cycle, listed as a closed node sequence.
    HasCycle { cycle: Vec<usize> },
}

impl TreeVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            TreeVerdict::Tree => "tree",
            TreeVerdict::Disconnected { .. } => "disconnected",
            TreeVerdict::HasCycle { .. } => "has_cycle",
        }
    }
}

/// Connected with `|E| = |V| - 1` means tree; otherwise a witness component
/// split or cycle is produced. The empty graph reports as disconnected.
pub fn is_tree(g: &ComponentGraph) -> TreeVerdict {
    let n = g.n_nodes();
    if n == 0 {
        return TreeVerdict::Disconnected { witness: None };
    }
    // BFS forest with parent tracking; a cross edge closes a cycle.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let adj: Vec<Vec<usize>> = {
        let mut a = vec![Vec::new(); n];
        for &(u, v) in &g.edges {
            a[u].push(v);
            a[v].push(u);
        }
        a
    };
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut visited = 1usize;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                visited += 1;
                queue.push_back(v);
            } else if parent[u] != Some(v) {
                // path u -> root and v -> root meet; assemble the cycle
                return TreeVerdict::HasCycle {
                    cycle: cycle_through(&parent, u, v),
                };
            }
        }
    }
    if visited < n {
        let outside = (0..n).find(|&v| !seen[v]).unwrap();
        return TreeVerdict::Disconnected {
            witness: Some((0, outside)),
        };
    }
    TreeVerdict::Tree
}

fn cycle_through(parent: &[Option<usize>], u: usize, v: usize) -> Vec<usize> {
    let chain = |mut x: usize| -> Vec<usize> {
        let mut path = vec![x];
        while let Some(p) = parent[x] {
            path.push(p);
            x = p;
        }
        path
    };
    let (pu, pv) = (chain(u), chain(v));
    // find the lowest common ancestor by set membership
    let su: std::collections::BTreeSet<usize> = pu.iter().copied().collect();
    let lca = *pv.iter().find(|x| su.contains(x)).unwrap();
    let mut cycle: Vec<usize> = pu.iter().take_while(|&&x| x != lca).copied().collect();
    cycle.push(lca);
    let mut tail: Vec<usize> = pv.iter().take_while(|&&x| x != lca).copied().collect();
    tail.reverse();
    cycle.extend(tail);
    cycle.push(u);
    cycle
}

/// Independent check used by the test suites: union-find connectivity plus
/// the edge count.
pub fn is_tree_by_union_find(g: &ComponentGraph) -> bool {
    let n = g.n_nodes();
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, v: usize) -> usize {
        if p[v] != v {
            let r = find(p, p[v]);
            p[v] = r;
        }
        p[v]
    }
    let mut components = n;
    for &(u, v) in &g.edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components == 1 && g.edges.len() == n - 1
}

// ---------------------------------------------------------------------------
// Partial action on components
// ---------------------------------------------------------------------------

/// Outcome of transporting the component structure along one group element.
/// The map is partial: components whose labels do not all conjugate into
/// the truncated label set stay undefined, which is the expected desk-scale
/// outcome and is reported via the coverage fraction.
#[derive(Debug, Clone)]
pub struct ActionReport {
    /// `node_map[i] = Some(j)` when component `i` transports onto `j`.
    pub node_map: Vec<Option<usize>>,
    pub coverage: f64,
    /// Per mapped node: `rank theta(W)` before and after transport.
    pub theta_ranks: Vec<(usize, usize, usize)>,
    pub rank_preserved: bool,
    pub stratum_preserved: bool,
    /// Edges with both endpoints mapped that land on an edge again.
    pub edges_checked: usize,
    pub edges_preserved: bool,
}

/// Maps each component along `gamma` by conjugating its vertex labels and
/// finding the component of the transported simplex set; verifies that
/// `rank theta` and the stratum survive wherever the map is defined.
pub fn action_on_components(
    g: &ComponentGraph,
    labels: &LabelSet,
    labeling: &Labeling,
    vertex_of_label: &dyn Fn(usize) -> Option<u32>,
    label_of_vertex: &dyn Fn(u32) -> Option<usize>,
    gamma: &Isometry,
) -> Result<ActionReport, TreeError> {
    let mut node_map: Vec<Option<usize>> = vec![None; g.n_nodes()];
    let mut theta_ranks = Vec::new();
    let mut rank_preserved = true;
    let mut stratum_preserved = true;
    for (i, node) in g.nodes.iter().enumerate() {
        let mut image = SaturatedSet::default();
        let mut ok = true;
        'simplices: for s in &node.simplices.0 {
            let mut moved: Simplex = Vec::with_capacity(s.len());
            for &v in s {
                let Some(lid) = label_of_vertex(v) else {
                    ok = false;
                    break 'simplices;
                };
                let Ok(conj) = conjugate_label(labels, gamma, &labels.labels[lid]) else {
                    ok = false;
                    break 'simplices;
                };
                let Some(w) = vertex_of_label(conj.id) else {
                    ok = false;
                    break 'simplices;
                };
                moved.push(w);
            }
            moved.sort_unstable();
            moved.dedup();
            if moved.len() != s.len() {
                ok = false;
                break;
            }
            image.0.insert(moved);
        }
        if !ok {
            continue;
        }
        // find the unique component containing the image
        let target = g.nodes.iter().position(|n| {
            image.0.iter().all(|s| n.simplices.0.contains(s))
        });
        let Some(j) = target else { continue };
        node_map[i] = Some(j);
        if g.nodes[j].rank != node.rank {
            stratum_preserved = false;
        }
        let r_before = foldings::subgroup_from_words(&theta_saturated(labeling, &node.simplices)?)
            .rank();
        let r_after =
            foldings::subgroup_from_words(&theta_saturated(labeling, &g.nodes[j].simplices)?)
                .rank();
        if r_before != r_after {
            rank_preserved = false;
        }
        theta_ranks.push((i, r_before, r_after));
    }
    let defined = node_map.iter().filter(|m| m.is_some()).count();
    let coverage = if g.n_nodes() == 0 {
        0.0
    } else {
        defined as f64 / g.n_nodes() as f64
    };
    let mut edges_checked = 0;
    let mut edges_preserved = true;
    for &(u, v) in &g.edges {
        if let (Some(mu), Some(mv)) = (node_map[u], node_map[v]) {
            edges_checked += 1;
            let e = if mu < mv { (mu, mv) } else { (mv, mu) };
            if !g.edges.contains(&e) {
                edges_preserved = false;
            }
        }
    }
    Ok(ActionReport {
        node_map,
        coverage,
        theta_ranks,
        rank_preserved,
        stratum_preserved,
        edges_checked,
        edges_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::SaturatedSet;

    fn sat(sims: &[&[u32]]) -> SaturatedSet {
        SaturatedSet::from_iter(sims.iter().map(|s| s.to_vec()))
    }

    fn graph_from(lower: Vec<SaturatedSet>, upper: Vec<SaturatedSet>) -> ComponentGraph {
        build(&Strata {
            by_rank: vec![(1, lower), (2, upper)],
            violations: vec![],
        })
    }

    #[test]
    fn single_adjacent_pair_gives_one_edge() {
        let g = graph_from(vec![sat(&[&[0]])], vec![sat(&[&[0, 1]])]);
        assert_eq!(g.edges.len(), 1);
        assert!(g.audit_bipartite());
        assert_eq!(is_tree(&g), TreeVerdict::Tree);
        assert!(is_tree_by_union_find(&g));
    }

    #[test]
    fn disjoint_strata_give_edgeless_graph() {
        let g = graph_from(vec![sat(&[&[0]])], vec![sat(&[&[5, 6]])]);
        assert!(g.edges.is_empty());
        assert!(matches!(is_tree(&g), TreeVerdict::Disconnected { .. }));
        assert!(!is_tree_by_union_find(&g));
    }

    #[test]
    fn indexed_build_matches_quadratic_scan() {
        let lower = vec![sat(&[&[0]]), sat(&[&[2]]), sat(&[&[9]])];
        let upper = vec![sat(&[&[0, 1], &[1, 2]]), sat(&[&[3, 4]])];
        let g = graph_from(lower.clone(), upper.clone());
        let mut brute = BTreeSet::new();
        for (i, lo) in lower.iter().enumerate() {
            for (j, hi) in upper.iter().enumerate() {
                if adjacent(lo, hi) {
                    brute.insert((i, lower.len() + j));
                }
            }
        }
        assert_eq!(g.edges, brute);
    }

    #[test]
    fn four_cycle_is_detected_with_witness() {
        // two lower and two upper components, all cross-adjacent
        let lower = vec![sat(&[&[0]]), sat(&[&[1]])];
        let upper = vec![sat(&[&[0, 1]]), sat(&[&[0, 1, 2]])];
        // both uppers contain faces of both lowers: 4-cycle
        let g = graph_from(lower, upper);
        assert_eq!(g.edges.len(), 4);
        match is_tree(&g) {
            TreeVerdict::HasCycle { cycle } => {
                assert!(cycle.len() >= 4, "cycle witness too short: {cycle:?}")
            }
            other => panic!("expected cycle, got {other:?}"),
        }
        assert!(!is_tree_by_union_find(&g));
    }

    #[test]
    fn path_of_five_is_a_tree() {
        // lower components {0},{2},{4}; uppers {0,1},... wiring a path
        let lower = vec![sat(&[&[0]]), sat(&[&[2]]), sat(&[&[4]])];
        let upper = vec![sat(&[&[0, 2]]), sat(&[&[2, 4]])];
        let g = graph_from(lower, upper);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(is_tree(&g), TreeVerdict::Tree);
        assert!(is_tree_by_union_find(&g));
    }

    #[test]
    fn empty_graph_is_disconnected_by_convention() {
        let g = graph_from(vec![], vec![]);
        assert_eq!(is_tree(&g), TreeVerdict::Disconnected { witness: None });
    }

    #[test]
    fn edge_list_text_has_header_and_edges() {
        let g = graph_from(vec![sat(&[&[0]])], vec![sat(&[&[0, 1]])]);
        let text = g.to_edge_list_text();
        assert!(text.contains("# node 0 stratum 1"));
        assert!(text.contains("0 1\n"));
    }
}
