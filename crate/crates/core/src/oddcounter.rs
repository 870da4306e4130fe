//! The non-packable pattern for `k = a·b` with `a < b` odd and coprime:
//! a union of `a^t` aligned `a×a` boxes in `C_{ab}^2`, and the checks that
//! certify no torus power `C_{ab}^n` has a perfect packing by it.
//!
//! Coordinates are 1-based here; the `(v_0, v_1)` of the construction are
//! coordinates 1 and 2.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::torus::{Ambient, Pattern, Torus, TorusVertex};

/// Which bound `t` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TBound {
    /// `2b-1 <= a^t < b^2`.
    Stated,
    /// `2b-1 <= a^t <= b^2`: every extra box still fits in the torus.
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddParams {
    pub a: u32,
    pub b: u32,
    pub t: u32,
    pub bound: TBound,
}

fn check_ab(a: u32, b: u32) -> Result<()> {
    if a.is_multiple_of(2) || b.is_multiple_of(2) {
        return Err(Error::param(format!("a={a} and b={b} must both be odd")));
    }
    if a >= b {
        return Err(Error::param(format!("need a < b, got a={a}, b={b}")));
    }
    if a < 3 {
        return Err(Error::param("need a >= 3"));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::param(format!("a={a} and b={b} are not coprime")));
    }
    if (a as u64 * b as u64) > u32::MAX as u64 {
        return Err(Error::param("a·b too large"));
    }
    Ok(())
}

/// Least `t` with `2b-1 <= a^t < b^2`.
pub fn choose_t(a: u32, b: u32) -> Result<u32> {
    check_ab(a, b)?;
    let (lo, hi) = (2 * b as u64 - 1, b as u64 * b as u64);
    let mut power = 1u64;
    for t in 1.. {
        power *= a as u64;
        if power >= hi {
            break;
        }
        if power >= lo {
            return Ok(t);
        }
    }
    Err(Error::param(format!("no t with {lo} <= {a}^t < {hi}")))
}

impl OddParams {
    /// Parameters with the least `t` under the stated bound.
    pub fn new(a: u32, b: u32) -> Result<Self> {
        Ok(OddParams {
            a,
            b,
            t: choose_t(a, b)?,
            bound: TBound::Stated,
        })
    }

    /// Parameters with an explicit `t`, accepted under the weaker bound
    /// `2b-1 <= a^t <= b^2`.
    pub fn with_t(a: u32, b: u32, t: u32) -> Result<Self> {
        check_ab(a, b)?;
        let power = (a as u64).checked_pow(t).unwrap_or(u64::MAX);
        let (lo, hi) = (2 * b as u64 - 1, b as u64 * b as u64);
        if power < lo || power > hi {
            return Err(Error::param(format!(
                "{a}^{t} = {power} outside [{lo}, {hi}]: {} boxes cannot form the cross \
                 and fit among the {hi} boxes of C_{}^2",
                power,
                a * b
            )));
        }
        Ok(OddParams {
            a,
            b,
            t,
            bound: if power < hi {
                TBound::Stated
            } else {
                TBound::Override
            },
        })
    }

    pub fn k(&self) -> u32 {
        self.a * self.b
    }

    pub fn boxes(&self) -> u64 {
        (self.a as u64).pow(self.t)
    }
}

/// The constructed pattern with its box decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddInstance {
    pub params: OddParams,
    pub pattern: Pattern,
    /// Box corners (multiples of `a`) on the two axis arms.
    pub cross_boxes: Vec<(u32, u32)>,
    /// Additional box corners, lexicographically first off the arms.
    pub extra_boxes: Vec<(u32, u32)>,
}

/// `B_v = {v + (i,j) : 0 <= i,j < a}`.
pub fn box_vertices(a: u32, k: u32, corner: (u32, u32)) -> Vec<TorusVertex> {
    let mut out = Vec::with_capacity((a * a) as usize);
    for i in 0..a {
        for j in 0..a {
            out.push(TorusVertex::new(vec![(corner.0 + i) % k, (corner.1 + j) % k]));
        }
    }
    out
}

/// Builds `H`: the cross of `2b-1` boxes through the origin plus the first
/// `a^t-(2b-1)` off-cross boxes in `(v_1, v_2)` lexicographic order.
pub fn build_odd_h(params: &OddParams) -> Result<OddInstance> {
    let OddParams { a, b, .. } = *params;
    let k = params.k();
    let corners: Vec<(u32, u32)> = (0..b)
        .flat_map(|x| (0..b).map(move |y| (x * a, y * a)))
        .collect();
    let (cross, off): (Vec<_>, Vec<_>) = corners.into_iter().partition(|&(x, y)| x == 0 || y == 0);
    let extra = params.boxes() as usize - cross.len();
    if extra > off.len() {
        return Err(Error::param(format!(
            "{} extra boxes requested but only {} lie off the cross",
            extra,
            off.len()
        )));
    }
    let extra_boxes = off[..extra].to_vec();
    let vertices = cross
        .iter()
        .chain(&extra_boxes)
        .flat_map(|&c| box_vertices(a, k, c));
    let pattern = Pattern::new(Ambient::Torus(Torus::new(k, 2)?), vertices)?;
    Ok(OddInstance {
        params: *params,
        pattern,
        cross_boxes: cross,
        extra_boxes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: Vec<u32>,
    pub count: usize,
}

/// Number of pattern vertices in each class of coordinatewise residues mod `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub a: u32,
    pub dim: usize,
    /// All `a^dim` classes in lexicographic order.
    pub classes: Vec<ClassCount>,
}

impl ClassProfile {
    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn all_divisible(&self) -> bool {
        self.classes.iter().all(|c| c.count % self.a as usize == 0)
    }
}

pub fn class_profile(p: &Pattern, a: u32) -> Result<ClassProfile> {
    let t = p.torus()?;
    if a == 0 || t.k() % a != 0 {
        return Err(Error::param(format!("a={a} does not divide k={}", t.k())));
    }
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    // Enumerate all residue tuples, including empty classes.
    for i in 0..(a as u64).pow(p.dim() as u32) {
        let mut c = vec![0; p.dim()];
        let mut x = i;
        for slot in c.iter_mut().rev() {
            *slot = (x % a as u64) as u32;
            x /= a as u64;
        }
        counts.insert(c, 0);
    }
    for v in p.vertices() {
        let key: Vec<u32> = v.coords().iter().map(|&c| c % a).collect();
        *counts.get_mut(&key).expect("every class listed") += 1;
    }
    Ok(ClassProfile {
        a,
        dim: p.dim(),
        classes: counts
            .into_iter()
            .map(|(class, count)| ClassCount { class, count })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundCycle {
    pub vertices: Vec<TorusVertex>,
    /// `Some(i)` when the cycle is `{origin + ℓ·e_i}`.
    pub line_direction: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleOracleReport {
    pub k: u32,
    pub n: usize,
    pub length: usize,
    pub cycles: Vec<FoundCycle>,
    pub count: usize,
    pub all_lines: bool,
    pub nodes: u64,
}

/// Least `|T - d|_1` over lifts `T ∈ kℤ^n` of the origin with
/// `|T - d|_1 ≡ parity (mod 2)`.
fn lift_distance(d: &[i64], k: i64, parity: i64) -> Option<i64> {
    // best[p]: least cost so far with cost parity p.
    let mut best = [Some(0i64), None];
    for &x in d {
        let q = x.div_euclid(k);
        let mut next = [None, None];
        for cand in q - 1..=q + 2 {
            let cost = (cand * k - x).abs();
            for (p, prev) in best.iter().enumerate() {
                if let Some(b) = prev {
                    let slot = &mut next[(p as i64 + cost).rem_euclid(2) as usize];
                    let total = b + cost;
                    if slot.is_none_or(|s| total < s) {
                        *slot = Some(total);
                    }
                }
            }
        }
        best = next;
    }
    best[parity.rem_euclid(2) as usize]
}

/// All cycles of length `length` through `origin` in `C_k^n`, each listed
/// once, by depth-first search over simple paths.
///
/// A partial path with lifted displacement `d` and `R` steps left is pruned
/// unless some lift of the origin lies within `R` steps with matching
/// parity; this is a necessary condition, so the search stays exhaustive.
pub fn cycle_line_oracle(
    k: u32,
    n: usize,
    length: usize,
    origin: &TorusVertex,
    budget: &mut Budget,
) -> Result<CycleOracleReport> {
    let torus = Torus::new(k, n)?;
    if !torus.contains(origin) {
        return Err(Error::param(format!("origin {origin} is not in {torus}")));
    }
    if length < 3 {
        return Err(Error::param("cycle length must be at least 3"));
    }
    if torus.vertex_count() > 1 << 24 {
        return Err(Error::Resource(format!("{torus} too large for the cycle oracle")));
    }
    let start = torus.index(origin.coords());
    let mut visited = vec![false; torus.vertex_count() as usize];
    visited[start as usize] = true;
    let mut path = vec![start];
    let mut disp = vec![0i64; n];
    let mut found = Vec::new();
    let start_nodes = budget.nodes();

    struct Search<'a> {
        torus: Torus,
        length: usize,
        start: u64,
        budget: &'a mut Budget,
        stopped: bool,
    }

    fn step_of(torus: &Torus, from: u64, to: u64) -> (usize, i64) {
        let k = torus.k() as u64;
        let mut place = 1u64;
        for i in (0..torus.dim()).rev() {
            let a = (from / place) % k;
            let b = (to / place) % k;
            if a != b {
                return (i, if (a + 1) % k == b { 1 } else { -1 });
            }
            place *= k;
        }
        unreachable!("neighbours differ in one coordinate")
    }

    fn dfs(
        s: &mut Search<'_>,
        path: &mut Vec<u64>,
        visited: &mut [bool],
        disp: &mut [i64],
        found: &mut Vec<Vec<u64>>,
    ) {
        if s.stopped {
            return;
        }
        if !s.budget.tick() {
            s.stopped = true;
            return;
        }
        let last = *path.last().expect("path starts at origin");
        let remaining = (s.length - path.len()) as i64;
        for next in s.torus.neighbors(last) {
            let (axis, sign) = step_of(&s.torus, last, next);
            disp[axis] += sign;
            if remaining == 0 {
                // Closing edge back to the origin.
                if next == s.start && path.len() > 2 && path[1] < path[path.len() - 1] {
                    found.push(path.clone());
                }
            } else if !visited[next as usize]
                && lift_distance(disp, s.torus.k() as i64, remaining)
                    .is_some_and(|d| d <= remaining)
            {
                visited[next as usize] = true;
                path.push(next);
                dfs(s, path, visited, disp, found);
                path.pop();
                visited[next as usize] = false;
            }
            disp[axis] -= sign;
            if s.stopped {
                return;
            }
        }
    }

    let mut s = Search {
        torus,
        length,
        start,
        budget,
        stopped: false,
    };
    let mut raw = Vec::new();
    dfs(&mut s, &mut path, &mut visited, &mut disp, &mut raw);
    if s.stopped {
        return Err(Error::Resource(format!(
            "cycle search ran out of budget after {} cycles",
            raw.len()
        )));
    }
    let nodes = s.budget.nodes() - start_nodes;
    for cyc in raw {
        let vertices: Vec<TorusVertex> = cyc.iter().map(|&i| torus.vertex(i)).collect();
        let differing: Vec<usize> = (0..n)
            .filter(|&i| vertices.iter().any(|v| v.coords()[i] != origin.coords()[i]))
            .collect();
        let line_direction = (differing.len() == 1 && length == k as usize).then(|| differing[0] + 1);
        found.push(FoundCycle {
            vertices,
            line_direction,
        });
    }
    let all_lines = found.iter().all(|c| c.line_direction.is_some());
    Ok(CycleOracleReport {
        k,
        n,
        length,
        count: found.len(),
        all_lines,
        cycles: found,
        nodes,
    })
}

/// An ordering of a pattern's vertices starting with the two axis cycles
/// through the origin, where every later vertex closes a 4-cycle with three
/// earlier ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityOrdering {
    pub order: Vec<TorusVertex>,
    pub prefix_len: usize,
    pub complete: bool,
    /// Vertices that could not be reached when the closure stalled.
    pub unreached: usize,
}

/// The two axis cycles through the origin, in order.
fn axis_prefix(k: u32) -> Vec<TorusVertex> {
    let mut out: Vec<TorusVertex> = (0..k).map(|l| TorusVertex::new(vec![l, 0])).collect();
    out.extend((1..k).map(|l| TorusVertex::new(vec![0, l])));
    out
}

/// Greedy 4-cycle closure from the axis cycles.
pub fn rigidity_ordering(p: &Pattern) -> Result<RigidityOrdering> {
    let t = p.torus()?;
    if p.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: p.dim(),
        });
    }
    let k = t.k();
    let n = t.vertex_count() as usize;
    let mut in_h = vec![false; n];
    for v in p.vertices() {
        in_h[t.index(v.coords()) as usize] = true;
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(p.size());
    let prefix = axis_prefix(k);
    for v in &prefix {
        let i = t.index(v.coords()) as usize;
        if !in_h[i] {
            return Ok(RigidityOrdering {
                order,
                prefix_len: prefix.len(),
                complete: false,
                unreached: p.size(),
            });
        }
        placed[i] = true;
        order.push(v.clone());
    }
    loop {
        let mut progress = false;
        for v in p.vertices() {
            let vi = t.index(v.coords());
            if placed[vi as usize] || !closes_square(&t, vi, &in_h, &placed) {
                continue;
            }
            placed[vi as usize] = true;
            order.push(v.clone());
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let unreached = p.size() - order.len();
    Ok(RigidityOrdering {
        complete: unreached == 0,
        prefix_len: prefix.len(),
        order,
        unreached,
    })
}

/// Whether `v` has placed neighbours `u1`, `u2` in different directions
/// whose fourth square corner is placed too.
fn closes_square(t: &Torus, v: u64, in_h: &[bool], placed: &[bool]) -> bool {
    let nbrs: Vec<u64> = t.neighbors(v).into_iter().filter(|&u| placed[u as usize]).collect();
    for (i, &u1) in nbrs.iter().enumerate() {
        for &u2 in &nbrs[i + 1..] {
            let opposite = t
                .neighbors(u1)
                .into_iter()
                .find(|&w| w != v && t.neighbors(u2).contains(&w));
            if let Some(w) = opposite {
                if in_h[w as usize] && placed[w as usize] {
                    return true;
                }
            }
        }
    }
    false
}

/// Re-checks an ordering: the prefix is the two axis cycles and every later
/// vertex closes a 4-cycle with three strictly earlier vertices.
pub fn validate_rigidity_ordering(p: &Pattern, ord: &RigidityOrdering) -> Result<bool> {
    let t = p.torus()?;
    let prefix = axis_prefix(t.k());
    if ord.order.len() != p.size() || ord.order[..prefix.len().min(ord.order.len())] != prefix[..] {
        return Ok(false);
    }
    let n = t.vertex_count() as usize;
    let mut in_h = vec![false; n];
    for v in p.vertices() {
        in_h[t.index(v.coords()) as usize] = true;
    }
    let mut placed = vec![false; n];
    for (pos, v) in ord.order.iter().enumerate() {
        let vi = t.index(v.coords());
        if !in_h[vi as usize] || placed[vi as usize] {
            return Ok(false);
        }
        if pos >= prefix.len() && !closes_square(&t, vi, &in_h, &placed) {
            return Ok(false);
        }
        placed[vi as usize] = true;
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coprimality {
    pub gcd: u32,
    /// `b^n mod a` for `n = 1, 2, …` over one full period.
    pub class_size_residues: Vec<u32>,
    pub never_divisible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub count: usize,
    pub all_lines: bool,
}

/// Bundled, re-checkable evidence that no `C_{ab}^n` has a perfect
/// packing by the constructed pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub params: OddParams,
    pub k: u32,
    pub boxes: usize,
    pub vertices: usize,
    pub lex_order: String,
    pub class_profile: ClassProfile,
    pub classes_divisible: bool,
    pub coprimality: Coprimality,
    pub cycle_oracle: CycleSummary,
    pub ordering_found: bool,
    pub ordering_len: usize,
    pub valid: bool,
    pub failures: Vec<String>,
    pub conclusion: String,
}

/// Runs every check for the given parameters.
pub fn obstruction_certificate(params: &OddParams, budget: &mut Budget) -> Result<ObstructionCertificate> {
    let inst = build_odd_h(params)?;
    let OddParams { a, b, .. } = *params;
    let k = params.k();
    let mut failures = Vec::new();

    let profile = class_profile(&inst.pattern, a)?;
    let classes_divisible = profile.all_divisible();
    if !classes_divisible {
        failures.push("some class count is not divisible by a".to_string());
    }

    let gcd = a.gcd(&b);
    let mut residues = Vec::new();
    let mut x = b % a;
    while !residues.contains(&x) {
        residues.push(x);
        x = x * b % a;
    }
    let never_divisible = gcd == 1 && !residues.contains(&0);
    if !never_divisible {
        failures.push("class cardinality b^n is divisible by a for some n".to_string());
    }

    let cycles = cycle_line_oracle(k, 2, k as usize, &TorusVertex::zeros(2), budget)?;
    if !cycles.all_lines || cycles.count != 2 {
        failures.push(format!(
            "found {} cycles of length {k} through the origin; expected the 2 axis lines",
            cycles.count
        ));
    }

    let ordering = rigidity_ordering(&inst.pattern)?;
    let ordering_ok = ordering.complete && validate_rigidity_ordering(&inst.pattern, &ordering)?;
    if !ordering_ok {
        failures.push(format!("4-cycle closure stalled with {} vertices unreached", ordering.unreached));
    }

    let valid = failures.is_empty();
    Ok(ObstructionCertificate {
        params: *params,
        k,
        boxes: inst.cross_boxes.len() + inst.extra_boxes.len(),
        vertices: inst.pattern.size(),
        lex_order: "box corners ordered by (v_1, v_2) ascending".into(),
        classes_divisible,
        class_profile: profile,
        coprimality: Coprimality {
            gcd,
            class_size_residues: residues,
            never_divisible,
        },
        cycle_oracle: CycleSummary {
            count: cycles.count,
            all_lines: cycles.all_lines,
        },
        ordering_found: ordering_ok,
        ordering_len: ordering.order.len(),
        valid,
        failures,
        conclusion: if valid {
            format!(
                "every copy of H in C_{k}^n is a translate of H × 0^(n-2), so it meets each \
                 residue class mod {a} in a multiple of {a} points; each class has b^n points, \
                 never a multiple of {a}; hence no C_{k}^n has a perfect H-packing"
            )
        } else {
            "certificate invalid".into()
        },
    })
}
