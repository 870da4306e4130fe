//! Plain undirected graphs and a backtracking embedding search.
//!
//! The search maps pattern vertices one at a time in a connectivity order
//! (each vertex after the first in its component has an already-mapped
//! neighbour), so candidates come from a host adjacency list instead of the
//! whole host. Injectivity, degree and adjacency constraints are checked
//! against every earlier vertex.

use crate::budget::Budget;

/// Simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u != v, "loops are not allowed");
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        SimpleGraph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn sorted_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }
}

/// Which host structure an embedding must respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedMode {
    /// Pattern edges map to host edges; non-edges are unconstrained.
    Subgraph,
    /// Pattern edges and non-edges are both preserved.
    Induced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    /// `false` when the budget ran out or the visitor stopped the search.
    pub exhausted: bool,
    pub nodes: u64,
}

struct Plan {
    order: Vec<usize>,
    /// For each position, the earlier positions adjacent in the pattern.
    earlier_adjacent: Vec<Vec<usize>>,
    /// For each position, the earlier positions not adjacent in the pattern.
    earlier_other: Vec<Vec<usize>>,
}

fn plan(pattern: &SimpleGraph) -> Plan {
    let n = pattern.vertex_count();
    let mut placed = vec![false; n];
    let mut mapped_nbrs = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        // Most already-placed neighbours first, then higher degree, then index.
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                (mapped_nbrs[a], pattern.degree(a))
                    .cmp(&(mapped_nbrs[b], pattern.degree(b)))
                    .then(b.cmp(&a))
            })
            .expect("unplaced vertex exists");
        placed[next] = true;
        order.push(next);
        for &w in pattern.neighbors(next) {
            mapped_nbrs[w] += 1;
        }
    }
    let mut earlier_adjacent = vec![Vec::new(); n];
    let mut earlier_other = vec![Vec::new(); n];
    for (i, &v) in order.iter().enumerate() {
        for (j, &u) in order.iter().enumerate().take(i) {
            if pattern.has_edge(u, v) {
                earlier_adjacent[i].push(j);
            } else {
                earlier_other[i].push(j);
            }
        }
    }
    Plan {
        order,
        earlier_adjacent,
        earlier_other,
    }
}

/// Enumerates injective maps `pattern -> host` under `mode`.
///
/// `visit` receives `map[pattern_vertex] = host_vertex` and returns whether
/// to keep searching.
pub fn for_each_embedding(
    pattern: &SimpleGraph,
    host: &SimpleGraph,
    mode: EmbedMode,
    budget: &mut Budget,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> SearchOutcome {
    let n = pattern.vertex_count();
    let start_nodes = budget.nodes();
    if n == 0 {
        visit(&[]);
        return SearchOutcome {
            exhausted: true,
            nodes: 0,
        };
    }
    if n > host.vertex_count() {
        return SearchOutcome {
            exhausted: true,
            nodes: 0,
        };
    }
    let plan = plan(pattern);
    let mut by_position = vec![usize::MAX; n];
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; host.vertex_count()];
    let mut stopped = false;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        pos: usize,
        plan: &Plan,
        pattern: &SimpleGraph,
        host: &SimpleGraph,
        mode: EmbedMode,
        by_position: &mut [usize],
        map: &mut [usize],
        used: &mut [bool],
        budget: &mut Budget,
        stopped: &mut bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) {
        if pos == plan.order.len() {
            if !visit(map) {
                *stopped = true;
            }
            return;
        }
        let v = plan.order[pos];
        let need = pattern.degree(v);
        let all: Vec<usize>;
        let candidates: &[usize] = match plan.earlier_adjacent[pos].first() {
            Some(&j) => host.neighbors(by_position[j]),
            None => {
                all = (0..host.vertex_count()).collect();
                &all
            }
        };
        for &c in candidates {
            if *stopped {
                return;
            }
            if !budget.tick() {
                *stopped = true;
                return;
            }
            if used[c] || host.degree(c) < need {
                continue;
            }
            if !plan.earlier_adjacent[pos]
                .iter()
                .all(|&j| host.has_edge(by_position[j], c))
            {
                continue;
            }
            if mode == EmbedMode::Induced
                && plan.earlier_other[pos]
                    .iter()
                    .any(|&j| host.has_edge(by_position[j], c))
            {
                continue;
            }
            used[c] = true;
            by_position[pos] = c;
            map[v] = c;
            rec(
                pos + 1,
                plan,
                pattern,
                host,
                mode,
                by_position,
                map,
                used,
                budget,
                stopped,
                visit,
            );
            used[c] = false;
            map[v] = usize::MAX;
        }
    }

    rec(
        0,
        &plan,
        pattern,
        host,
        mode,
        &mut by_position,
        &mut map,
        &mut used,
        budget,
        &mut stopped,
        &mut visit,
    );
    SearchOutcome {
        exhausted: !stopped,
        nodes: budget.nodes() - start_nodes,
    }
}

/// Finds an isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &SimpleGraph, b: &SimpleGraph) -> Option<Vec<usize>> {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.sorted_degrees() != b.sorted_degrees()
    {
        return None;
    }
    let mut found = None;
    let mut budget = Budget::unlimited();
    for_each_embedding(a, b, EmbedMode::Induced, &mut budget, |map| {
        found = Some(map.to_vec());
        false
    });
    found
}

pub fn is_isomorphic(a: &SimpleGraph, b: &SimpleGraph) -> bool {
    find_isomorphism(a, b).is_some()
}
