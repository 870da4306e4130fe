//! Brute-force oracles: enumeration of pattern copies in a host, and
//! exact-cover search (dancing links) for perfect vertex packings and
//! perfect edge decompositions.
//!
//! Search order is fixed: copies are sorted, and the solver always branches
//! on the column with the fewest remaining rows, lowest index first, trying
//! rows in index order. Results are therefore reproducible run to run.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{for_each_embedding, EmbedMode, SimpleGraph};
use crate::torus::{Ambient, Pattern, TorusVertex};
use crate::transforms::is_induced_copy;

/// Largest host the enumerators accept.
const MAX_HOST: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CopyMode {
    /// Vertex sets inducing a graph isomorphic to the pattern.
    Induced,
    /// Vertex sets carrying the pattern as a (not necessarily induced) subgraph.
    Subgraph,
    /// Translates of the pattern only.
    TranslateOnly,
}

/// All placements found, as sorted vertex-index sets in the host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyEnumeration {
    pub mode: CopyMode,
    pub placements: Vec<Vec<u64>>,
    /// `false` if the budget ran out; the list is then not usable for
    /// completeness claims.
    pub complete: bool,
    pub nodes: u64,
}

/// Enumerates the distinct vertex sets of copies of `p` in `host`.
pub fn enumerate_copies(
    p: &Pattern,
    host: &Ambient,
    mode: CopyMode,
    budget: &mut Budget,
) -> Result<CopyEnumeration> {
    if host.vertex_count() > MAX_HOST {
        return Err(Error::Resource(format!("host {host} too large to enumerate")));
    }
    let mut found = BTreeSet::new();
    let start = budget.nodes();
    let complete = match mode {
        CopyMode::TranslateOnly => {
            let t = host.torus()?;
            let pt = p.torus()?;
            if pt.k() != t.k() || p.dim() > t.dim() {
                return Err(Error::param(format!(
                    "pattern in {} cannot be translated inside {host}",
                    p.ambient()
                )));
            }
            let padded = p.pad_to(t.dim())?;
            let idx: Vec<u64> = padded.vertices().iter().map(|v| t.index(v.coords())).collect();
            let mut coords = vec![0; t.dim()];
            let mut complete = true;
            for w in t.vertices() {
                if !budget.tick() {
                    complete = false;
                    break;
                }
                let mut set: Vec<u64> = idx
                    .iter()
                    .map(|&i| {
                        t.decode_into(i, &mut coords);
                        for (c, s) in coords.iter_mut().zip(w.coords()) {
                            *c = (*c + s) % t.k();
                        }
                        t.index(&coords)
                    })
                    .collect();
                set.sort_unstable();
                found.insert(set);
            }
            complete
        }
        CopyMode::Induced | CopyMode::Subgraph => {
            let embed = if mode == CopyMode::Induced {
                EmbedMode::Induced
            } else {
                EmbedMode::Subgraph
            };
            let outcome = for_each_embedding(&p.graph(), &host.graph(), embed, budget, |map| {
                let mut set: Vec<u64> = map.iter().map(|&i| i as u64).collect();
                set.sort_unstable();
                found.insert(set);
                true
            });
            outcome.exhausted
        }
    };
    Ok(CopyEnumeration {
        mode,
        placements: found.into_iter().collect(),
        complete,
        nodes: budget.nodes() - start,
    })
}

/// Rows over the universe `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactCoverInstance {
    pub universe: usize,
    pub rows: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Solved,
    Infeasible,
    /// The budget ran out; nothing is claimed.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactCoverResult {
    pub verdict: Verdict,
    /// Indices of the chosen rows, in the order chosen.
    pub solution: Option<Vec<usize>>,
    pub nodes: u64,
}

impl ExactCoverInstance {
    fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(&x) = row.iter().find(|&&x| x >= self.universe) {
                return Err(Error::param(format!("row {i} has element {x} outside the universe")));
            }
            let distinct: BTreeSet<_> = row.iter().collect();
            if distinct.len() != row.len() {
                return Err(Error::param(format!("row {i} repeats an element")));
            }
        }
        Ok(())
    }

    /// Whether `rows` (indices) partition the universe.
    pub fn is_exact_cover(&self, rows: &[usize]) -> bool {
        let mut seen = vec![false; self.universe];
        for &r in rows {
            for &x in &self.rows[r] {
                if std::mem::replace(&mut seen[x], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Knuth's dancing links over a sparse 0/1 matrix. Node 0 is the root,
/// nodes `1..=columns` are column headers.
struct Dlx {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    column: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
}

enum Search {
    Found,
    Exhausted,
    Stopped,
}

impl Dlx {
    fn new(inst: &ExactCoverInstance) -> Self {
        let headers = inst.universe + 1;
        let mut dlx = Dlx {
            left: (0..headers).map(|i| (i + headers - 1) % headers).collect(),
            right: (0..headers).map(|i| (i + 1) % headers).collect(),
            up: (0..headers).collect(),
            down: (0..headers).collect(),
            column: (0..headers).collect(),
            row: vec![usize::MAX; headers],
            size: vec![0; headers],
        };
        for (r, elements) in inst.rows.iter().enumerate() {
            let mut sorted = elements.clone();
            sorted.sort_unstable();
            let first = dlx.left.len();
            for (pos, &x) in sorted.iter().enumerate() {
                let c = x + 1;
                let node = dlx.left.len();
                let prev = if pos == 0 { node } else { node - 1 };
                dlx.left.push(prev);
                dlx.right.push(first);
                dlx.right[prev] = node;
                dlx.left[first] = node;
                dlx.up.push(dlx.up[c]);
                dlx.down.push(c);
                let above = dlx.up[c];
                dlx.down[above] = node;
                dlx.up[c] = node;
                dlx.column.push(c);
                dlx.row.push(r);
                dlx.size[c] += 1;
            }
        }
        dlx
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.column[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.size[self.column[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    fn search(&mut self, partial: &mut Vec<usize>, budget: &mut Budget) -> Search {
        if self.right[0] == 0 {
            return Search::Found;
        }
        let mut c = self.right[0];
        let mut j = self.right[c];
        while j != 0 {
            if self.size[j] < self.size[c] {
                c = j;
            }
            j = self.right[j];
        }
        if self.size[c] == 0 {
            return Search::Exhausted;
        }
        self.cover(c);
        let mut i = self.down[c];
        while i != c {
            if !budget.tick() {
                self.uncover(c);
                return Search::Stopped;
            }
            partial.push(self.row[i]);
            let mut j = self.right[i];
            while j != i {
                self.cover(self.column[j]);
                j = self.right[j];
            }
            let result = self.search(partial, budget);
            if let Search::Found = result {
                return result;
            }
            let mut j = self.left[i];
            while j != i {
                self.uncover(self.column[j]);
                j = self.left[j];
            }
            partial.pop();
            if let Search::Stopped = result {
                self.uncover(c);
                return result;
            }
            i = self.down[i];
        }
        self.uncover(c);
        Search::Exhausted
    }
}

/// Finds rows partitioning the universe, or proves none exist.
pub fn solve_exact_cover(inst: &ExactCoverInstance, budget: &mut Budget) -> Result<ExactCoverResult> {
    inst.validate()?;
    let start = budget.nodes();
    let mut dlx = Dlx::new(inst);
    let mut partial = Vec::new();
    let outcome = dlx.search(&mut partial, budget);
    let nodes = budget.nodes() - start;
    Ok(match outcome {
        Search::Found => {
            debug_assert!(inst.is_exact_cover(&partial));
            ExactCoverResult {
                verdict: Verdict::Solved,
                solution: Some(partial),
                nodes,
            }
        }
        Search::Exhausted => ExactCoverResult {
            verdict: Verdict::Infeasible,
            solution: None,
            nodes,
        },
        Search::Stopped => ExactCoverResult {
            verdict: Verdict::Unknown,
            solution: None,
            nodes,
        },
    })
}

/// Exhaustive subset search; an independent oracle for small instances.
pub fn brute_force_exact_cover(inst: &ExactCoverInstance) -> Result<bool> {
    inst.validate()?;
    if inst.rows.len() > 24 {
        return Err(Error::Resource(format!(
            "{} rows is too many for subset search",
            inst.rows.len()
        )));
    }
    let rows: Vec<usize> = (0..inst.rows.len()).collect();
    Ok((0u32..1 << rows.len()).any(|mask| {
        let chosen: Vec<usize> = rows.iter().copied().filter(|&r| mask >> r & 1 == 1).collect();
        inst.is_exact_cover(&chosen)
    }))
}

/// A perfect vertex packing attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    pub verdict: Verdict,
    pub placements: Vec<Vec<TorusVertex>>,
    pub candidate_copies: usize,
    pub nodes: u64,
    pub note: String,
}

/// Searches a perfect packing of `host` by copies of `p` under `mode`.
/// A returned packing has been re-validated.
pub fn pack_vertices(p: &Pattern, host: &Ambient, mode: CopyMode, budget: &mut Budget) -> Result<PackingResult> {
    if p.is_empty() {
        return Err(Error::param("cannot pack with an empty pattern"));
    }
    let n = host.vertex_count();
    if !n.is_multiple_of(p.size() as u64) {
        return Ok(PackingResult {
            verdict: Verdict::Infeasible,
            placements: Vec::new(),
            candidate_copies: 0,
            nodes: 0,
            note: format!("{} does not divide {n}", p.size()),
        });
    }
    let copies = enumerate_copies(p, host, mode, budget)?;
    if !copies.complete {
        return Ok(PackingResult {
            verdict: Verdict::Unknown,
            placements: Vec::new(),
            candidate_copies: copies.placements.len(),
            nodes: copies.nodes,
            note: "copy enumeration ran out of budget".into(),
        });
    }
    let inst = ExactCoverInstance {
        universe: n as usize,
        rows: copies
            .placements
            .iter()
            .map(|s| s.iter().map(|&i| i as usize).collect())
            .collect(),
    };
    let result = solve_exact_cover(&inst, budget)?;
    let placements: Vec<Vec<TorusVertex>> = result
        .solution
        .iter()
        .flatten()
        .map(|&r| copies.placements[r].iter().map(|&i| host.vertex(i)).collect())
        .collect();
    if result.verdict == Verdict::Solved {
        validate_packing(p, host, mode, &placements)?;
    }
    Ok(PackingResult {
        verdict: result.verdict,
        candidate_copies: copies.placements.len(),
        nodes: copies.nodes + result.nodes,
        note: format!("{} candidate copies", copies.placements.len()),
        placements,
    })
}

/// Checks disjointness, full coverage and that every placement is a copy
/// of `p` under `mode`.
pub fn validate_packing(p: &Pattern, host: &Ambient, mode: CopyMode, placements: &[Vec<TorusVertex>]) -> Result<()> {
    let mut seen = vec![false; host.vertex_count() as usize];
    for placement in placements {
        for v in placement {
            if !host.contains(v) {
                return Err(Error::param(format!("vertex {v} is not in {host}")));
            }
            if std::mem::replace(&mut seen[host.index(v) as usize], true) {
                return Err(Error::NotPacking {
                    vertex: v.coords().to_vec(),
                    count: 2,
                });
            }
        }
        let copy = Pattern::new(*host, placement.iter().cloned())?;
        let ok = match mode {
            CopyMode::Induced | CopyMode::TranslateOnly => is_induced_copy(&copy, p),
            CopyMode::Subgraph => {
                let mut found = false;
                for_each_embedding(&p.graph(), &copy.graph(), EmbedMode::Subgraph, &mut Budget::unlimited(), |_| {
                    found = true;
                    false
                });
                found
            }
        };
        if !ok {
            return Err(Error::verification("packing", format!("placement {placement:?} is not a copy")));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::NotPacking {
            vertex: host.vertex(i as u64).coords().to_vec(),
            count: 0,
        });
    }
    Ok(())
}

/// A perfect edge decomposition attempt of `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCoverResult {
    pub verdict: Verdict,
    /// Each copy as its list of host edges.
    pub copies: Vec<Vec<(TorusVertex, TorusVertex)>>,
    pub candidate_copies: usize,
    pub nodes: u64,
    pub note: String,
}

/// Searches a decomposition of `E(Q_n)` into edge-disjoint (not necessarily
/// induced) copies of `pattern`.
pub fn solve_edge_cover(pattern: &SimpleGraph, n: usize, budget: &mut Budget) -> Result<EdgeCoverResult> {
    let cube = crate::torus::Hypercube::new(n)?;
    let host = cube.graph();
    let host_edges = host.edges();
    let pe = pattern.edges();
    if pe.is_empty() {
        return Err(Error::param("pattern has no edges"));
    }
    if host_edges.len() % pe.len() != 0 {
        return Ok(EdgeCoverResult {
            verdict: Verdict::Infeasible,
            copies: Vec::new(),
            candidate_copies: 0,
            nodes: 0,
            note: format!("{} does not divide {}", pe.len(), host_edges.len()),
        });
    }
    if host.vertex_count() as u64 > MAX_HOST {
        return Err(Error::Resource(format!("Q_{n} too large")));
    }
    let start = budget.nodes();
    let mut rows = BTreeSet::new();
    let outcome = for_each_embedding(pattern, &host, EmbedMode::Subgraph, budget, |map| {
        let mut row: Vec<usize> = pe
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (map[a].min(map[b]), map[a].max(map[b]));
                host_edges.binary_search(&(u, v)).expect("embedded edge is a host edge")
            })
            .collect();
        row.sort_unstable();
        rows.insert(row);
        true
    });
    if !outcome.exhausted {
        return Ok(EdgeCoverResult {
            verdict: Verdict::Unknown,
            copies: Vec::new(),
            candidate_copies: rows.len(),
            nodes: budget.nodes() - start,
            note: "copy enumeration ran out of budget".into(),
        });
    }
    let inst = ExactCoverInstance {
        universe: host_edges.len(),
        rows: rows.into_iter().collect(),
    };
    let result = solve_exact_cover(&inst, budget)?;
    let amb = Ambient::Cube(cube);
    let copies: Vec<Vec<(TorusVertex, TorusVertex)>> = result
        .solution
        .iter()
        .flatten()
        .map(|&r| {
            inst.rows[r]
                .iter()
                .map(|&e| {
                    let (u, v) = host_edges[e];
                    (amb.vertex(u as u64), amb.vertex(v as u64))
                })
                .collect()
        })
        .collect();
    if result.verdict == Verdict::Solved {
        validate_edge_cover(pattern, n, &copies)?;
    }
    Ok(EdgeCoverResult {
        verdict: result.verdict,
        candidate_copies: inst.rows.len(),
        nodes: budget.nodes() - start,
        note: format!("{} candidate copies", inst.rows.len()),
        copies,
    })
}

/// Checks that `copies` are edge-disjoint, use every edge of `Q_n` and are
/// each isomorphic to `pattern` as edge sets.
pub fn validate_edge_cover(pattern: &SimpleGraph, n: usize, copies: &[Vec<(TorusVertex, TorusVertex)>]) -> Result<()> {
    let amb = Ambient::Cube(crate::torus::Hypercube::new(n)?);
    let host_edges = amb.graph().edges();
    let mut seen = vec![false; host_edges.len()];
    for copy in copies {
        let mut verts: Vec<u64> = Vec::new();
        for (u, v) in copy {
            let (a, b) = (amb.index(u), amb.index(v));
            let e = host_edges
                .binary_search(&(a.min(b) as usize, a.max(b) as usize))
                .map_err(|_| Error::verification("edge-cover", format!("{u}-{v} is not an edge")))?;
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::verification("edge-cover", format!("edge {u}-{v} used twice")));
            }
            verts.extend([a, b]);
        }
        verts.sort_unstable();
        verts.dedup();
        let local = |x: u64| verts.binary_search(&x).expect("endpoint recorded");
        let g = SimpleGraph::from_edges(
            verts.len(),
            copy.iter().map(|(u, v)| (local(amb.index(u)), local(amb.index(v)))),
        );
        if !crate::graph::is_isomorphic(&g, &strip_isolated(pattern)) {
            return Err(Error::verification("edge-cover", "copy is not isomorphic to the pattern"));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::verification("edge-cover", "some edge is uncovered"));
    }
    Ok(())
}

fn strip_isolated(g: &SimpleGraph) -> SimpleGraph {
    let keep: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
    let local = |x: usize| keep.binary_search(&x).expect("non-isolated");
    SimpleGraph::from_edges(keep.len(), g.edges().into_iter().map(|(u, v)| (local(u), local(v))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{Hypercube, Torus};

    fn pat(k: u32, m: usize, vs: &[&[u32]]) -> Pattern {
        Pattern::new(
            Ambient::Torus(Torus::new(k, m).unwrap()),
            vs.iter().map(|c| TorusVertex::new(c.to_vec())),
        )
        .unwrap()
    }

    fn torus(k: u32, m: usize) -> Ambient {
        Ambient::Torus(Torus::new(k, m).unwrap())
    }

    #[test]
    fn copy_counts() {
        let k2 = pat(4, 1, &[&[0], &[1]]);
        let e = enumerate_copies(&k2, &torus(4, 1), CopyMode::Induced, &mut Budget::unlimited()).unwrap();
        assert_eq!(e.placements.len(), 4);
        assert!(e.complete);
        let point = pat(3, 2, &[&[0, 0]]);
        let e = enumerate_copies(&point, &torus(3, 2), CopyMode::TranslateOnly, &mut Budget::unlimited()).unwrap();
        assert_eq!(e.placements.len(), 9);
        // Q_3 has 6 square faces and no other 4-cycles.
        let square = Pattern::new(
            Ambient::Cube(Hypercube::new(2).unwrap()),
            [[0, 0], [0, 1], [1, 0], [1, 1]].map(|c| TorusVertex::new(c.to_vec())),
        )
        .unwrap();
        let q3 = Ambient::Cube(Hypercube::new(3).unwrap());
        let e = enumerate_copies(&square, &q3, CopyMode::Induced, &mut Budget::unlimited()).unwrap();
        assert_eq!(e.placements.len(), 6);
    }

    #[test]
    fn dlx_small_examples() {
        let k2 = pat(4, 1, &[&[0], &[1]]);
        let r = pack_vertices(&k2, &torus(4, 1), CopyMode::Induced, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Solved);
        let sets: Vec<Vec<u32>> = r
            .placements
            .iter()
            .map(|p| p.iter().map(|v| v.coords()[0]).collect())
            .collect();
        assert_eq!(sets, vec![vec![0, 1], vec![2, 3]]);

        let p3 = pat(4, 1, &[&[0], &[1], &[2]]);
        let r = pack_vertices(&p3, &torus(4, 1), CopyMode::Induced, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);

        let r = pack_vertices(&k2, &torus(4, 2), CopyMode::Induced, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Solved);
        assert_eq!(r.placements.len(), 8);
    }

    #[test]
    fn dlx_agrees_with_subsets() {
        let inst = ExactCoverInstance {
            universe: 4,
            rows: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 2]],
        };
        let r = solve_exact_cover(&inst, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Solved);
        assert!(brute_force_exact_cover(&inst).unwrap());
        let none = ExactCoverInstance {
            universe: 3,
            rows: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        };
        let r = solve_exact_cover(&none, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(!brute_force_exact_cover(&none).unwrap());
        let empty = ExactCoverInstance {
            universe: 0,
            rows: vec![],
        };
        assert_eq!(
            solve_exact_cover(&empty, &mut Budget::unlimited()).unwrap().solution,
            Some(vec![])
        );
    }

    #[test]
    fn dlx_budget_gives_unknown() {
        let rows: Vec<Vec<usize>> = (0..30).map(|i| vec![i, (i + 1) % 30]).collect();
        let inst = ExactCoverInstance { universe: 31, rows };
        let r = solve_exact_cover(&inst, &mut Budget::unlimited().with_nodes(5)).unwrap();
        assert_ne!(r.verdict, Verdict::Solved);
    }

    #[test]
    fn edge_cover_examples() {
        let edge = SimpleGraph::from_edges(2, [(0, 1)]);
        let r = solve_edge_cover(&edge, 3, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Solved);
        assert_eq!(r.copies.len(), 12);
        let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]);
        let r = solve_edge_cover(&path, 2, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Solved);
        assert_eq!(r.copies.len(), 2);
        let triangle_free_three = SimpleGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let r = solve_edge_cover(&triangle_free_three, 2, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
    }
}
