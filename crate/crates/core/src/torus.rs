//! Ambient graphs (torus powers `C_k^m` and hypercubes `Q_n`), their
//! vertices, and patterns: finite vertex sets together with the edges they
//! induce.
//!
//! Vertices are fixed-length residue sequences. A vertex of `C_k^m` also has
//! a dense index in `0..k^m`, computed with coordinate 1 as the most
//! significant digit, so index order coincides with lexicographic order and
//! layer `C_k^m(j) = {v : v_1 = j}` is a contiguous index range.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{for_each_embedding, EmbedMode, SimpleGraph};

/// Largest number of vertices an ambient may have; keeps indices in `u64`.
const MAX_VERTICES: u128 = 1 << 62;

/// The torus `C_k^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Torus {
    k: u32,
    m: usize,
}

impl Torus {
    pub fn new(k: u32, m: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::param(format!(
                "torus cycle length must be at least 3, got {k}"
            )));
        }
        if (k as u128).checked_pow(m as u32).is_none_or(|c| c > MAX_VERTICES) {
            return Err(Error::Resource(format!("C_{k}^{m} has too many vertices")));
        }
        Ok(Torus { k, m })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> u64 {
        (self.k as u64).pow(self.m as u32)
    }

    /// Same cycle length, different dimension.
    pub fn with_dim(&self, m: usize) -> Result<Torus> {
        Torus::new(self.k, m)
    }

    pub fn contains(&self, v: &TorusVertex) -> bool {
        v.len() == self.m && v.0.iter().all(|&c| c < self.k)
    }

    pub fn index(&self, coords: &[u32]) -> u64 {
        debug_assert_eq!(coords.len(), self.m);
        coords
            .iter()
            .fold(0u64, |acc, &c| acc * self.k as u64 + c as u64)
    }

    pub fn decode_into(&self, mut index: u64, out: &mut [u32]) {
        debug_assert_eq!(out.len(), self.m);
        let k = self.k as u64;
        for slot in out.iter_mut().rev() {
            *slot = (index % k) as u32;
            index /= k;
        }
    }

    pub fn vertex(&self, index: u64) -> TorusVertex {
        let mut coords = vec![0; self.m];
        self.decode_into(index, &mut coords);
        TorusVertex(coords)
    }

    /// All vertices in lexicographic order.
    pub fn vertices(&self) -> impl Iterator<Item = TorusVertex> + '_ {
        (0..self.vertex_count()).map(move |i| self.vertex(i))
    }

    /// The `2m` neighbours of a vertex index.
    pub fn neighbors(&self, index: u64) -> Vec<u64> {
        let k = self.k as u64;
        let mut out = Vec::with_capacity(2 * self.m);
        let mut place = 1u64;
        for _ in 0..self.m {
            let digit = (index / place) % k;
            let base = index - digit * place;
            out.push(base + ((digit + 1) % k) * place);
            out.push(base + ((digit + k - 1) % k) * place);
            place *= k;
        }
        out
    }

    pub fn graph(&self) -> SimpleGraph {
        let n = self.vertex_count() as usize;
        SimpleGraph::from_edges(
            n,
            (0..n as u64).flat_map(|i| {
                self.neighbors(i)
                    .into_iter()
                    .filter(move |&j| i < j)
                    .map(move |j| (i as usize, j as usize))
            }),
        )
    }

    /// Layer `C_k^m(j)`; requires `m >= 1`.
    pub fn layer(&self, j: u32) -> Result<Layer> {
        if self.m == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if j >= self.k {
            return Err(Error::param(format!("layer {j} out of range for k={}", self.k)));
        }
        Ok(Layer { torus: *self, j })
    }
}

impl fmt::Display for Torus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}^{}", self.k, self.m)
    }
}

/// `C_k^m(j) = {v in C_k^m : v_1 = j}`, a copy of `C_k^{m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layer {
    torus: Torus,
    j: u32,
}

impl Layer {
    pub fn level(&self) -> u32 {
        self.j
    }

    /// Index range of the layer inside the ambient torus.
    pub fn index_range(&self) -> std::ops::Range<u64> {
        let size = (self.torus.k as u64).pow(self.torus.m as u32 - 1);
        self.j as u64 * size..(self.j as u64 + 1) * size
    }

    pub fn vertices(&self) -> impl Iterator<Item = TorusVertex> + '_ {
        self.index_range().map(move |i| self.torus.vertex(i))
    }

    /// The torus this layer is isomorphic to.
    pub fn as_torus(&self) -> Torus {
        Torus {
            k: self.torus.k,
            m: self.torus.m - 1,
        }
    }
}

/// The hypercube `Q_n` on `{0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hypercube {
    n: usize,
}

impl Hypercube {
    pub fn new(n: usize) -> Result<Self> {
        if n > 62 {
            return Err(Error::Resource(format!("Q_{n} has too many vertices")));
        }
        Ok(Hypercube { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> u64 {
        1 << self.n
    }

    pub fn graph(&self) -> SimpleGraph {
        let n = self.vertex_count() as usize;
        SimpleGraph::from_edges(
            n,
            (0..n).flat_map(|u| {
                (0..self.n)
                    .map(move |b| u ^ (1 << b))
                    .filter(move |&v| u < v)
                    .map(move |v| (u, v))
            }),
        )
    }
}

/// A vertex: one residue per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusVertex(pub Vec<u32>);

impl TorusVertex {
    pub fn new(coords: impl Into<Vec<u32>>) -> Self {
        TorusVertex(coords.into())
    }

    /// `0^n`.
    pub fn zeros(n: usize) -> Self {
        TorusVertex(vec![0; n])
    }

    /// `e_j^n`, with `j` counted from 1.
    pub fn basis(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::param(format!("basis index {j} outside 1..={n}")));
        }
        let mut v = vec![0; n];
        v[j - 1] = 1;
        Ok(TorusVertex(v))
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x × y`: coordinates of `self` followed by those of `other`.
    pub fn concat(&self, other: &TorusVertex) -> TorusVertex {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        TorusVertex(v)
    }
}

impl fmt::Display for TorusVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `x × y` for vertices.
pub fn concat(x: &TorusVertex, y: &TorusVertex) -> TorusVertex {
    x.concat(y)
}

/// `X × y`: every vertex of the set extended by `y`.
pub fn concat_set<'a>(
    xs: impl IntoIterator<Item = &'a TorusVertex>,
    y: &TorusVertex,
) -> BTreeSet<TorusVertex> {
    xs.into_iter().map(|x| x.concat(y)).collect()
}

/// `X × Y`.
pub fn concat_sets(xs: &BTreeSet<TorusVertex>, ys: &BTreeSet<TorusVertex>) -> BTreeSet<TorusVertex> {
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| x.concat(y)))
        .collect()
}

/// Adjacency in `C_k^m`: exactly one coordinate differs, by ±1 mod k.
pub fn torus_adjacent(u: &TorusVertex, v: &TorusVertex, k: u32) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    if let Some(c) = u.0.iter().chain(&v.0).find(|&&c| c >= k) {
        return Err(Error::param(format!("coordinate {c} out of range for k={k}")));
    }
    let mut differing = u.0.iter().zip(&v.0).filter(|(a, b)| a != b);
    let Some((&a, &b)) = differing.next() else {
        return Ok(false);
    };
    if differing.next().is_some() {
        return Ok(false);
    }
    let d = (a + k - b) % k;
    Ok(d == 1 || d == k - 1)
}

fn cube_adjacent(u: &TorusVertex, v: &TorusVertex) -> bool {
    u.len() == v.len() && u.0.iter().zip(&v.0).filter(|(a, b)| a != b).count() == 1
}

/// The graph a pattern lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AmbientRepr", into = "AmbientRepr")]
pub enum Ambient {
    Torus(Torus),
    Cube(Hypercube),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum AmbientRepr {
    Torus { k: u32, m: usize },
    Cube { n: usize },
}

impl TryFrom<AmbientRepr> for Ambient {
    type Error = Error;
    fn try_from(r: AmbientRepr) -> Result<Self> {
        match r {
            AmbientRepr::Torus { k, m } => Ok(Ambient::Torus(Torus::new(k, m)?)),
            AmbientRepr::Cube { n } => Ok(Ambient::Cube(Hypercube::new(n)?)),
        }
    }
}

impl From<Ambient> for AmbientRepr {
    fn from(a: Ambient) -> Self {
        match a {
            Ambient::Torus(t) => AmbientRepr::Torus { k: t.k, m: t.m },
            Ambient::Cube(c) => AmbientRepr::Cube { n: c.n },
        }
    }
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Torus(t) => t.m,
            Ambient::Cube(c) => c.n,
        }
    }

    /// Number of values a coordinate can take.
    pub fn radix(&self) -> u32 {
        match self {
            Ambient::Torus(t) => t.k,
            Ambient::Cube(_) => 2,
        }
    }

    pub fn vertex_count(&self) -> u64 {
        match self {
            Ambient::Torus(t) => t.vertex_count(),
            Ambient::Cube(c) => c.vertex_count(),
        }
    }

    pub fn contains(&self, v: &TorusVertex) -> bool {
        v.len() == self.dim() && v.0.iter().all(|&c| c < self.radix())
    }

    pub fn adjacent(&self, u: &TorusVertex, v: &TorusVertex) -> bool {
        match self {
            Ambient::Torus(t) => torus_adjacent(u, v, t.k).unwrap_or(false),
            Ambient::Cube(_) => cube_adjacent(u, v),
        }
    }

    pub fn index(&self, v: &TorusVertex) -> u64 {
        let r = self.radix() as u64;
        v.0.iter().fold(0, |acc, &c| acc * r + c as u64)
    }

    pub fn vertex(&self, mut index: u64) -> TorusVertex {
        let r = self.radix() as u64;
        let mut coords = vec![0; self.dim()];
        for slot in coords.iter_mut().rev() {
            *slot = (index % r) as u32;
            index /= r;
        }
        TorusVertex(coords)
    }

    pub fn graph(&self) -> SimpleGraph {
        match self {
            Ambient::Torus(t) => t.graph(),
            Ambient::Cube(c) => c.graph(),
        }
    }

    pub fn torus(&self) -> Result<Torus> {
        match self {
            Ambient::Torus(t) => Ok(*t),
            Ambient::Cube(c) => Err(Error::param(format!(
                "operation needs a torus ambient, got Q_{}",
                c.n
            ))),
        }
    }

    pub fn with_dim(&self, n: usize) -> Result<Ambient> {
        Ok(match self {
            Ambient::Torus(t) => Ambient::Torus(Torus::new(t.k, n)?),
            Ambient::Cube(_) => Ambient::Cube(Hypercube::new(n)?),
        })
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Torus(t) => t.fmt(f),
            Ambient::Cube(c) => write!(f, "Q_{}", c.n),
        }
    }
}

/// A finite vertex set in an ambient graph, with the edges it induces.
///
/// Vertices are kept sorted; `edges` index into that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct Pattern {
    ambient: Ambient,
    vertices: Vec<TorusVertex>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    ambient: Ambient,
    vertices: Vec<TorusVertex>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    empty: bool,
}

impl TryFrom<PatternRepr> for Pattern {
    type Error = Error;
    fn try_from(r: PatternRepr) -> Result<Self> {
        if r.empty && r.vertices.is_empty() {
            return Ok(Pattern::empty(r.ambient));
        }
        Pattern::new(r.ambient, r.vertices)
    }
}

impl From<Pattern> for PatternRepr {
    fn from(p: Pattern) -> Self {
        PatternRepr {
            ambient: p.ambient,
            empty: p.vertices.is_empty(),
            vertices: p.vertices,
        }
    }
}

impl Pattern {
    /// Builds a non-empty pattern; rejects duplicates and out-of-range vertices.
    pub fn new(ambient: Ambient, vertices: impl IntoIterator<Item = TorusVertex>) -> Result<Self> {
        let mut vs: Vec<TorusVertex> = vertices.into_iter().collect();
        if vs.is_empty() {
            return Err(Error::param("pattern has no vertices"));
        }
        for v in &vs {
            if v.len() != ambient.dim() {
                return Err(Error::Dimension {
                    expected: ambient.dim(),
                    found: v.len(),
                });
            }
            if !ambient.contains(v) {
                return Err(Error::param(format!("vertex {v} is not in {ambient}")));
            }
        }
        vs.sort();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate vertex {}", w[0])));
        }
        Ok(Self::from_sorted(ambient, vs))
    }

    /// The explicitly empty pattern.
    pub fn empty(ambient: Ambient) -> Self {
        Pattern {
            ambient,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub(crate) fn from_sorted(ambient: Ambient, vertices: Vec<TorusVertex>) -> Self {
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if ambient.adjacent(&vertices[i], &vertices[j]) {
                    edges.push((i, j));
                }
            }
        }
        Pattern {
            ambient,
            vertices,
            edges,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pattern serializes")
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[TorusVertex] {
        &self.vertices
    }

    /// Induced edges, as index pairs into [`Pattern::vertices`].
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, v: &TorusVertex) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.size(), self.edges.iter().copied())
    }

    pub fn torus(&self) -> Result<Torus> {
        self.ambient.torus()
    }

    /// `H × 0^{n-m}` in the `n`-dimensional ambient of the same family.
    pub fn pad_to(&self, n: usize) -> Result<Pattern> {
        if n < self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: n,
            });
        }
        let zeros = TorusVertex::zeros(n - self.dim());
        let ambient = self.ambient.with_dim(n)?;
        let vertices = self.vertices.iter().map(|v| v.concat(&zeros)).collect();
        Ok(Self::from_sorted(ambient, vertices))
    }

    /// Smallest coordinate (1-based) on which every vertex agrees, with its value.
    pub fn constant_coordinate(&self) -> Option<(usize, u32)> {
        let first = self.vertices.first()?;
        (0..self.dim())
            .find(|&i| self.vertices.iter().all(|v| v.0[i] == first.0[i]))
            .map(|i| (i + 1, first.0[i]))
    }

    /// Removes coordinate `pos` (1-based) from every vertex.
    pub fn drop_coordinate(&self, pos: usize) -> Result<Pattern> {
        if pos == 0 || pos > self.dim() {
            return Err(Error::param(format!("coordinate {pos} outside 1..={}", self.dim())));
        }
        let ambient = self.ambient.with_dim(self.dim() - 1)?;
        let mut vertices: Vec<TorusVertex> = self
            .vertices
            .iter()
            .map(|v| {
                let mut c = v.0.clone();
                c.remove(pos - 1);
                TorusVertex(c)
            })
            .collect();
        vertices.sort();
        let before = vertices.len();
        vertices.dedup();
        if vertices.len() != before {
            return Err(Error::param(format!(
                "coordinate {pos} is not constant; dropping it merges vertices"
            )));
        }
        Ok(Self::from_sorted(ambient, vertices))
    }

    /// `H_j`: the vertices with first coordinate `j`.
    pub fn layer_part(&self, j: u32) -> Vec<TorusVertex> {
        self.vertices
            .iter()
            .filter(|v| v.0.first() == Some(&j))
            .cloned()
            .collect()
    }
}

/// Whether a pattern avoids the wraparound value `k-1`: `m = 0`, or every
/// coordinate lies in `{0,…,k-2}`. Cube patterns never wrap.
pub fn does_not_wrap(p: &Pattern) -> bool {
    match p.ambient {
        Ambient::Torus(t) => t.m == 0 || p.vertices.iter().all(|v| v.0.iter().all(|&c| c + 2 <= t.k)),
        Ambient::Cube(_) => true,
    }
}

/// First vertex of a torus pattern that uses `k-1`, with the offending coordinate.
pub(crate) fn first_wrap(p: &Pattern) -> Option<(usize, &TorusVertex)> {
    let Ambient::Torus(t) = p.ambient else {
        return None;
    };
    p.vertices.iter().find_map(|v| {
        v.0.iter()
            .position(|&c| c == t.k - 1)
            .map(|i| (i + 1, v))
    })
}

/// The two necessary conditions for a perfect `H`-packing of a host torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseConditionReport {
    pub pattern_vertices: usize,
    pub host_vertices: u128,
    pub divides: bool,
    pub quotient: Option<u128>,
    pub remainder: u128,
    pub embeds_induced: bool,
}

impl BaseConditionReport {
    pub fn holds(&self) -> bool {
        self.divides && self.embeds_induced
    }
}

/// Checks `|V(H)|` divides `k^n` and that `H` is an induced subgraph of `C_k^n`.
pub fn base_conditions(p: &Pattern, host: &Torus) -> Result<BaseConditionReport> {
    let t = p.torus()?;
    if t.k != host.k {
        return Err(Error::param(format!(
            "pattern lives in C_{}, host is C_{}",
            t.k, host.k
        )));
    }
    let host_vertices = (host.k as u128).pow(host.m as u32);
    let size = p.size() as u128;
    let (divides, quotient, remainder) = if size == 0 {
        (false, None, host_vertices)
    } else {
        let r = host_vertices % size;
        (r == 0, (r == 0).then_some(host_vertices / size), r)
    };
    let embeds_induced = if p.dim() <= host.m {
        true
    } else if host.vertex_count() <= 1 << 16 {
        let mut found = false;
        for_each_embedding(
            &p.graph(),
            &host.graph(),
            EmbedMode::Induced,
            &mut Budget::seconds(10.0),
            |_| {
                found = true;
                false
            },
        );
        found
    } else {
        return Err(Error::Resource(format!(
            "host {host} too large for the induced-embedding check"
        )));
    };
    Ok(BaseConditionReport {
        pattern_vertices: p.size(),
        host_vertices,
        divides,
        quotient,
        remainder,
        embeds_induced,
    })
}

/// Checks that `packing` covers every vertex of `host` exactly once.
pub fn check_perfect_packing(host: &Torus, packing: &[Vec<TorusVertex>]) -> Result<()> {
    let n = host.vertex_count();
    if n > 1 << 28 {
        return Err(Error::Resource(format!("{host} too large to check")));
    }
    let mut count = vec![0usize; n as usize];
    for placement in packing {
        for v in placement {
            if !host.contains(v) {
                return Err(Error::param(format!("vertex {v} is not in {host}")));
            }
            count[host.index(&v.0) as usize] += 1;
        }
    }
    if let Some(i) = count.iter().position(|&c| c != 1) {
        return Err(Error::NotPacking {
            vertex: host.vertex(i as u64).0,
            count: count[i],
        });
    }
    Ok(())
}

/// Lifts a perfect packing of `C_k^n` to `C_k^{n+1}`: one copy per value of
/// the new last coordinate.
///
/// An empty packing lifts to the empty packing without further checks.
pub fn lift_packing(host: &Torus, packing: &[Vec<TorusVertex>]) -> Result<Vec<Vec<TorusVertex>>> {
    if packing.is_empty() {
        return Ok(Vec::new());
    }
    check_perfect_packing(host, packing)?;
    let mut out = Vec::with_capacity(packing.len() * host.k as usize);
    for a in 0..host.k {
        let y = TorusVertex(vec![a]);
        for placement in packing {
            out.push(placement.iter().map(|v| v.concat(&y)).collect());
        }
    }
    Ok(out)
}
