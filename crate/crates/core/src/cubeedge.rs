//! Spanning subgraphs `H_k ⊆ Q_k` whose copies never partition the edges of
//! any hypercube: equal edge counts per direction, stiffness, and the count
//! `c = |E(H_k)| / k` that never divides `2^{n-1}`.
//!
//! Cube vertices are bit strings; coordinate 1 is the most significant bit,
//! so vertex order is lexicographic order of coordinate vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{for_each_embedding, EmbedMode, SimpleGraph};
use crate::torus::Hypercube;

/// Bit mask of coordinate `c` (1-based) in `Q_n`.
fn bit(n: usize, c: usize) -> u64 {
    1u64 << (n - c)
}

/// Coordinate (1-based) in which the endpoints of a cube edge differ.
pub fn edge_direction(n: usize, u: u64, v: u64) -> Option<usize> {
    let x = u ^ v;
    (x.count_ones() == 1).then(|| n - x.trailing_zeros() as usize)
}

/// Coordinates of a cube vertex, coordinate 1 first.
pub fn cube_coords(n: usize, v: u64) -> Vec<u8> {
    (1..=n).map(|c| ((v & bit(n, c)) != 0) as u8).collect()
}

fn cube_index(coords: &[u8]) -> u64 {
    coords.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

/// A spanning subgraph of `Q_n` given by its edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSubgraph {
    n: usize,
    edges: BTreeSet<(u64, u64)>,
}

#[derive(Serialize, Deserialize)]
struct CubeSubgraphJson {
    n: usize,
    edges: Vec<[Vec<u8>; 2]>,
}

impl Serialize for CubeSubgraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CubeSubgraphJson {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| [cube_coords(self.n, u), cube_coords(self.n, v)])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubeSubgraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CubeSubgraphJson::deserialize(d)?;
        let edges = raw.edges.iter().map(|[u, v]| {
            if u.len() != raw.n || v.len() != raw.n || u.iter().chain(v).any(|&b| b > 1) {
                return Err(Error::param(format!("edge {u:?}-{v:?} is not in Q_{}", raw.n)));
            }
            Ok((cube_index(u), cube_index(v)))
        });
        let edges = edges.collect::<Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        CubeSubgraph::new(raw.n, edges).map_err(serde::de::Error::custom)
    }
}

impl CubeSubgraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        Hypercube::new(n)?;
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >> n != 0 || v >> n != 0 || edge_direction(n, u, v).is_none() {
                return Err(Error::param(format!(
                    "{:?}-{:?} is not an edge of Q_{n}",
                    cube_coords(n, u),
                    cube_coords(n, v)
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(CubeSubgraph { n, edges: set })
    }

    /// All edges of `Q_n`.
    pub fn full(n: usize) -> Result<Self> {
        Hypercube::new(n)?;
        let edges = (0..1u64 << n).flat_map(|u| (1..=n).map(move |c| (u, u ^ bit(n, c))));
        Self::new(n, edges)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cube subgraph serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(u64, u64)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: u64, v: u64) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: u64) -> usize {
        (1..=self.n).filter(|&c| self.has_edge(v, v ^ bit(self.n, c))).count()
    }

    pub fn remove_edge(&mut self, u: u64, v: u64) -> bool {
        self.edges.remove(&(u.min(v), u.max(v)))
    }

    /// Edges of `Q_n` that are not in this subgraph.
    pub fn missing_edges(&self) -> Vec<(u64, u64)> {
        let full = Self::full(self.n).expect("n already validated");
        full.edges.difference(&self.edges).copied().collect()
    }

    /// The graph on all `2^n` vertices.
    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(1 << self.n, self.edges.iter().map(|&(u, v)| (u as usize, v as usize)))
    }

    /// Whether the face `{v : v_c = value}` induces a full `Q_{n-1}`.
    pub fn face_is_full(&self, c: usize, value: u8) -> bool {
        let b = bit(self.n, c);
        (0..1u64 << self.n)
            .filter(|&v| ((v & b) != 0) == (value == 1))
            .all(|v| {
                (1..=self.n)
                    .filter(|&d| d != c)
                    .all(|d| self.has_edge(v, v ^ bit(self.n, d)))
            })
    }

    /// First face (by coordinate, then value) inducing a full `Q_{n-1}`.
    pub fn full_face(&self) -> Option<(usize, u8)> {
        (1..=self.n)
            .flat_map(|c| [(c, 0), (c, 1)])
            .find(|&(c, v)| self.face_is_full(c, v))
    }
}

/// `H_5`: `Q_5` without five edges, one per direction.
pub fn build_h5() -> CubeSubgraph {
    const DELETED: [([u8; 5], [u8; 5]); 5] = [
        ([0, 1, 1, 0, 1], [1, 1, 1, 0, 1]),
        ([1, 0, 1, 1, 0], [1, 1, 1, 1, 0]),
        ([1, 0, 0, 0, 1], [1, 0, 1, 0, 1]),
        ([1, 1, 0, 0, 0], [1, 1, 0, 1, 0]),
        ([1, 0, 0, 1, 0], [1, 0, 0, 1, 1]),
    ];
    let mut h = CubeSubgraph::full(5).expect("Q_5");
    for (u, v) in DELETED {
        assert!(h.remove_edge(cube_index(&u), cube_index(&v)));
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkProperties {
    pub n: usize,
    pub edges: usize,
    pub direction_counts: Vec<usize>,
    pub equal_counts: bool,
    pub min_degree: usize,
    pub full_face: Option<(usize, u8)>,
}

impl HkProperties {
    /// The three properties the extension step relies on.
    pub fn holds(&self) -> bool {
        self.equal_counts && self.min_degree + 1 >= self.n && self.full_face.is_some()
    }
}

pub fn direction_counts(h: &CubeSubgraph) -> Vec<usize> {
    let mut counts = vec![0; h.n];
    for &(u, v) in &h.edges {
        counts[edge_direction(h.n, u, v).expect("cube edge") - 1] += 1;
    }
    counts
}

pub fn hk_properties(h: &CubeSubgraph) -> HkProperties {
    let counts = direction_counts(h);
    HkProperties {
        n: h.n,
        edges: h.edge_count(),
        equal_counts: counts.windows(2).all(|w| w[0] == w[1]),
        direction_counts: counts,
        min_degree: (0..1u64 << h.n).map(|v| h.degree(v)).min().unwrap_or(0),
        full_face: h.full_face(),
    }
}

/// `H_{k+1}`: `H_k` on the face `v_1 = 0`, a full `Q_k` on `v_1 = 1`, and all
/// edges between them except at the least vertex of the `v_1 = 0` face that
/// meets no missing edge.
pub fn extend_hk(h: &CubeSubgraph) -> Result<CubeSubgraph> {
    let props = hk_properties(h);
    if !props.holds() {
        return Err(Error::param(format!("H_{} lacks the extension properties: {props:?}", h.n)));
    }
    let k = h.n;
    let top = 1u64 << k;
    let mut touched = vec![false; 1 << k];
    for (u, v) in h.missing_edges() {
        touched[u as usize] = true;
        touched[v as usize] = true;
    }
    let skip = (0..top)
        .find(|&x| !touched[x as usize])
        .ok_or_else(|| Error::param("every vertex meets a missing edge"))?;
    let lower = h.edges.iter().copied();
    let upper = CubeSubgraph::full(k)?
        .edges
        .into_iter()
        .map(|(u, v)| (u | top, v | top));
    let cross = (0..top).filter(|&x| x != skip).map(|x| (x, x | top));
    CubeSubgraph::new(k + 1, lower.chain(upper).chain(cross).collect::<Vec<_>>())
}

/// `H_k` for `k >= 5`, by repeated extension of `H_5`.
pub fn build_hk(k: usize) -> Result<CubeSubgraph> {
    if k < 5 {
        return Err(Error::param(format!("H_k is defined for k >= 5, got {k}")));
    }
    if k > 20 {
        return Err(Error::Resource(format!("H_{k} has more than 2^20 vertices")));
    }
    let mut h = build_h5();
    while h.n < k {
        h = extend_hk(&h)?;
    }
    Ok(h)
}

/// An edge ordering witnessing stiffness: it opens with the `n` edges at a
/// full-degree anchor inside a full face, and each later edge lies in a
/// 4-cycle of `H` together with two earlier edges that share a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StiffnessOrdering {
    pub anchor: Vec<u8>,
    pub order: Vec<(u64, u64)>,
    pub complete: bool,
    pub unreached: usize,
}

/// The squares of `H` through edge `(u, v)`: the other three edges, listed
/// as (side at `u`, opposite side, side at `v`).
fn squares_through(h: &CubeSubgraph, u: u64, v: u64) -> Vec<[(u64, u64); 3]> {
    let n = h.n;
    let dir = edge_direction(n, u, v).expect("cube edge");
    (1..=n)
        .filter(|&d| d != dir)
        .filter_map(|d| {
            let (u2, v2) = (u ^ bit(n, d), v ^ bit(n, d));
            let sides = [(u, u2), (u2, v2), (v, v2)];
            sides
                .iter()
                .all(|&(a, b)| h.has_edge(a, b))
                .then(|| sides.map(|(a, b)| (a.min(b), a.max(b))))
        })
        .collect()
}

fn forced_by(h: &CubeSubgraph, e: (u64, u64), placed: &BTreeSet<(u64, u64)>) -> bool {
    squares_through(h, e.0, e.1).iter().any(|[side_u, opposite, side_v]| {
        placed.contains(opposite) && (placed.contains(side_u) || placed.contains(side_v))
    })
}

fn stiffness_anchor(h: &CubeSubgraph) -> Result<u64> {
    let (c, value) = h
        .full_face()
        .ok_or_else(|| Error::param(format!("no face of H_{} induces Q_{}", h.n, h.n - 1)))?;
    (0..1u64 << h.n)
        .filter(|&v| ((v & bit(h.n, c)) != 0) == (value == 1))
        .find(|&v| h.degree(v) == h.n)
        .ok_or_else(|| Error::param("the full face has no vertex of full degree"))
}

pub fn stiffness_ordering(h: &CubeSubgraph) -> Result<StiffnessOrdering> {
    let anchor = stiffness_anchor(h)?;
    let mut placed = BTreeSet::new();
    let mut order = Vec::with_capacity(h.edge_count());
    for c in 1..=h.n {
        let w = anchor ^ bit(h.n, c);
        let e = (anchor.min(w), anchor.max(w));
        placed.insert(e);
        order.push(e);
    }
    loop {
        let mut progress = false;
        for &e in &h.edges {
            if !placed.contains(&e) && forced_by(h, e, &placed) {
                placed.insert(e);
                order.push(e);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let unreached = h.edge_count() - order.len();
    Ok(StiffnessOrdering {
        anchor: cube_coords(h.n, anchor),
        order,
        complete: unreached == 0,
        unreached,
    })
}

/// Re-checks every step of a stiffness ordering.
pub fn validate_stiffness_ordering(h: &CubeSubgraph, ord: &StiffnessOrdering) -> bool {
    if ord.anchor.len() != h.n || ord.order.len() != h.edge_count() || ord.order.len() < h.n {
        return false;
    }
    let anchor = cube_index(&ord.anchor);
    if h.degree(anchor) != h.n {
        return false;
    }
    let mut placed = BTreeSet::new();
    for (i, &e) in ord.order.iter().enumerate() {
        if !h.has_edge(e.0, e.1) || placed.contains(&e) {
            return false;
        }
        let ok = if i < h.n {
            e.0 == anchor || e.1 == anchor
        } else {
            forced_by(h, e, &placed)
        };
        if !ok {
            return false;
        }
        placed.insert(e);
    }
    true
}

/// Exhaustive check of stiffness over all subgraph embeddings `H -> Q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StiffnessBrute {
    pub pattern_n: usize,
    pub host_n: usize,
    pub embeddings: u64,
    /// Every embedding sends each direction class into a single direction,
    /// distinct classes to distinct directions.
    pub partition_preserving: bool,
    /// Distinct maps from pattern directions to host directions observed.
    pub direction_maps: usize,
    pub complete: bool,
    pub nodes: u64,
}

pub fn stiffness_brute(h: &CubeSubgraph, host_n: usize, budget: &mut Budget) -> Result<StiffnessBrute> {
    if host_n < h.n {
        return Err(Error::param(format!("Q_{host_n} is smaller than Q_{}", h.n)));
    }
    if host_n > 16 {
        return Err(Error::Resource(format!("Q_{host_n} too large for exhaustive embedding")));
    }
    // Embed only the non-isolated vertices.
    let active: Vec<u64> = (0..1u64 << h.n).filter(|&v| h.degree(v) > 0).collect();
    let pos: BTreeMap<u64, usize> = active.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let pattern = SimpleGraph::from_edges(active.len(), h.edges.iter().map(|(u, v)| (pos[u], pos[v])));
    let host = CubeSubgraph::full(host_n)?.graph();
    let edge_dirs: Vec<(usize, usize, usize)> = h
        .edges
        .iter()
        .map(|&(u, v)| (pos[&u], pos[&v], edge_direction(h.n, u, v).expect("cube edge")))
        .collect();
    let mut embeddings = 0u64;
    let mut preserving = true;
    let mut maps = BTreeSet::new();
    let outcome = for_each_embedding(&pattern, &host, EmbedMode::Subgraph, budget, |map| {
        embeddings += 1;
        let mut f: BTreeMap<usize, usize> = BTreeMap::new();
        let mut ok = true;
        for &(a, b, d) in &edge_dirs {
            let image = edge_direction(host_n, map[a] as u64, map[b] as u64).expect("host edge");
            if *f.entry(d).or_insert(image) != image {
                ok = false;
            }
        }
        let images: BTreeSet<usize> = f.values().copied().collect();
        ok &= images.len() == f.len();
        preserving &= ok;
        maps.insert(f.into_iter().collect::<Vec<_>>());
        true
    });
    Ok(StiffnessBrute {
        pattern_n: h.n,
        host_n,
        embeddings,
        partition_preserving: preserving,
        direction_maps: maps.len(),
        complete: outcome.exhausted,
        nodes: outcome.nodes,
    })
}

fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    let mut result = 1 % m as u128;
    let mut b = base as u128 % m as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    result as u64
}

/// Evidence that no `Q_n` has an `H_k`-decomposition of its edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCertificate {
    pub k: usize,
    pub edges: usize,
    pub direction_counts: Vec<usize>,
    pub equal_counts: bool,
    /// Edges per direction, `c = |E(H_k)| / k`.
    pub per_direction: usize,
    /// `2^{k-1} - 1`, the count the construction yields.
    pub expected_per_direction: u64,
    /// The count as printed in the source text, `k·2^{k-1} - 1`.
    pub stated_formula: u64,
    /// Whether the printed formula disagrees with the built graph.
    pub formula_discrepancy: bool,
    pub c_is_odd: bool,
    pub checked_up_to: u64,
    /// `n` in `1..=checked_up_to` with `c | 2^{n-1}` (should be empty).
    pub dividing_n: Vec<u64>,
    pub stiffness_complete: bool,
    pub stiffness_valid: bool,
    pub valid: bool,
    pub failures: Vec<String>,
    pub conclusion: String,
}

pub fn edge_obstruction_certificate(k: usize, n_max: u64) -> Result<EdgeCertificate> {
    let h = build_hk(k)?;
    let props = hk_properties(&h);
    let mut failures = Vec::new();
    if !props.holds() {
        failures.push(format!("H_{k} properties fail: {props:?}"));
    }
    let c = props.direction_counts[0];
    let expected = (1u64 << (k - 1)) - 1;
    if c as u64 != expected {
        failures.push(format!("{c} edges per direction, expected {expected}"));
    }
    let c_is_odd = c % 2 == 1 && c > 1;
    let dividing_n: Vec<u64> = (1..=n_max).filter(|&n| pow_mod(2, n - 1, c as u64) == 0).collect();
    if !c_is_odd || !dividing_n.is_empty() {
        failures.push(format!("c = {c} divides 2^(n-1) for n in {dividing_n:?}"));
    }
    let ord = stiffness_ordering(&h)?;
    let stiffness_valid = ord.complete && validate_stiffness_ordering(&h, &ord);
    if !stiffness_valid {
        failures.push(format!("stiffness closure stalled with {} edges unreached", ord.unreached));
    }
    let stated = k as u64 * (1u64 << (k - 1)) - 1;
    let valid = failures.is_empty();
    Ok(EdgeCertificate {
        k,
        edges: h.edge_count(),
        direction_counts: props.direction_counts.clone(),
        equal_counts: props.equal_counts,
        per_direction: c,
        expected_per_direction: expected,
        stated_formula: stated,
        formula_discrepancy: stated != c as u64,
        c_is_odd,
        checked_up_to: n_max,
        dividing_n,
        stiffness_complete: ord.complete,
        stiffness_valid,
        valid,
        failures,
        conclusion: if valid {
            format!(
                "H_{k} is stiff, so every copy in Q_n uses the same number c = {c} of edges in \
                 each of k directions; a decomposition would need c | 2^(n-1) edges per \
                 direction, impossible for odd c > 1"
            )
        } else {
            "certificate invalid".into()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h5_shape() {
        let h = build_h5();
        let p = hk_properties(&h);
        assert_eq!(p.edges, 75);
        assert_eq!(p.direction_counts, vec![15; 5]);
        assert_eq!(p.min_degree, 4);
        assert_eq!((0..32).filter(|&v| h.degree(v) == 4).count(), 10);
        assert_eq!(p.full_face, Some((1, 0)));
        assert!(p.holds());
    }

    #[test]
    fn extension_counts() {
        let h6 = extend_hk(&build_h5()).unwrap();
        assert_eq!(h6.edge_count(), 186);
        assert_eq!(direction_counts(&h6), vec![31; 6]);
        assert!(h6.face_is_full(1, 1));
        let h7 = build_hk(7).unwrap();
        assert_eq!(direction_counts(&h7), vec![63; 7]);
        assert!(build_hk(4).is_err());
    }

    #[test]
    fn json_round_trip() {
        let h = build_h5();
        let back = CubeSubgraph::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(CubeSubgraph::from_json(r#"{"n":2,"edges":[[[0,0],[1,1]]]}"#).is_err());
    }

    #[test]
    fn stiffness_orderings() {
        for k in [5, 6] {
            let h = build_hk(k).unwrap();
            let ord = stiffness_ordering(&h).unwrap();
            assert!(ord.complete, "H_{k}");
            assert!(validate_stiffness_ordering(&h, &ord));
        }
        assert_eq!(stiffness_ordering(&build_h5()).unwrap().anchor, vec![0; 5]);
        // A 6-cycle in Q_3 has no square and no full face to anchor in.
        let hexagon = CubeSubgraph::new(3, [(0, 1), (1, 3), (3, 7), (7, 6), (6, 4), (4, 0)]).unwrap();
        assert!(stiffness_ordering(&hexagon).map_or(true, |o| !o.complete));
    }

    #[test]
    fn brute_force_small() {
        let mut b = Budget::unlimited();
        let edge = CubeSubgraph::new(1, [(0, 1)]).unwrap();
        let r = stiffness_brute(&edge, 3, &mut b).unwrap();
        assert_eq!(r.embeddings, 24);
        assert_eq!(r.direction_maps, 3);
        let square = CubeSubgraph::full(2).unwrap();
        let r = stiffness_brute(&square, 3, &mut b).unwrap();
        assert_eq!(r.embeddings, 6 * 8);
        assert!(r.partition_preserving);
        assert!(r.complete);
    }

    #[test]
    fn certificates() {
        let c = edge_obstruction_certificate(5, 64).unwrap();
        assert!(c.valid, "{:?}", c.failures);
        assert_eq!(c.per_direction, 15);
        assert!(c.formula_discrepancy);
        assert!(edge_obstruction_certificate(4, 64).is_err());
    }
}
