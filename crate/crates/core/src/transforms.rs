//! Placement maps: translates, bends and constant-coordinate inserts, their
//! composition into restricted copies, and lifting of a composed map across
//! an extra identity coordinate.
//!
//! Every step acts on single vertices, so the same code serves patterns
//! ([`apply_sequence`]) and whole covers (see `covers`).

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::is_isomorphic;
use crate::torus::{does_not_wrap, first_wrap, Ambient, Pattern, Torus, TorusVertex};

/// `T_w`: coordinatewise addition of `w` modulo `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Translate {
    pub w: TorusVertex,
}

/// `S^{n,s}_{i,j}`: folds coordinate `i` at level `j` into the fresh
/// coordinate `s` of an appended block, taking dimension `m` to `n`.
///
/// A vertex with `v_i < j` maps to `v × 0^{n-m}`; a vertex with
/// `v_i = j-1+t` has coordinate `i` clamped to `j-1` and `t·e_s` appended.
/// Indices `i` and `s` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bend {
    pub i: usize,
    pub j: u32,
    pub s: usize,
    pub n: usize,
}

/// Inserts a coordinate with constant `value` so that it becomes coordinate
/// `at` (1-based) of the image.
///
/// Not one of the two classical primitives: it expresses `X × y` and the
/// embedding of a cover into a fixed layer, which the cover recursions need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Insert {
    pub at: usize,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Step {
    Translate(Translate),
    Bend(Bend),
    Insert(Insert),
}

impl Step {
    pub fn translate(w: impl Into<Vec<u32>>) -> Step {
        Step::Translate(Translate {
            w: TorusVertex::new(w),
        })
    }

    pub fn bend(i: usize, j: u32, s: usize, n: usize) -> Step {
        Step::Bend(Bend { i, j, s, n })
    }

    pub fn insert(at: usize, value: u32) -> Step {
        Step::Insert(Insert { at, value })
    }

    /// Checks the step's parameters against input dimension `m` and cycle
    /// length `k`, returning the output dimension.
    pub fn out_dim(&self, k: u32, m: usize) -> Result<usize> {
        match self {
            Step::Translate(t) => {
                if t.w.len() != m {
                    return Err(Error::Dimension {
                        expected: m,
                        found: t.w.len(),
                    });
                }
                if let Some(c) = t.w.coords().iter().find(|&&c| c >= k) {
                    return Err(Error::param(format!("shift entry {c} out of range for k={k}")));
                }
                Ok(m)
            }
            Step::Bend(b) => {
                if b.i == 0 || b.i > m {
                    return Err(Error::param(format!("bend coordinate i={} outside 1..={m}", b.i)));
                }
                // j = 0 would clamp to -1: every image vertex wraps.
                if b.j == 0 || b.j + 2 > k {
                    return Err(Error::param(format!(
                        "bend level j={} outside 1..={}",
                        b.j,
                        k.saturating_sub(2)
                    )));
                }
                if b.n <= m {
                    return Err(Error::param(format!(
                        "bend target dimension n={} must exceed m={m}",
                        b.n
                    )));
                }
                if b.s == 0 || b.s > b.n - m {
                    return Err(Error::param(format!(
                        "bend direction s={} outside 1..={}",
                        b.s,
                        b.n - m
                    )));
                }
                Ok(b.n)
            }
            Step::Insert(ins) => {
                if ins.at == 0 || ins.at > m + 1 {
                    return Err(Error::param(format!(
                        "insert position {} outside 1..={}",
                        ins.at,
                        m + 1
                    )));
                }
                if ins.value >= k {
                    return Err(Error::param(format!(
                        "insert value {} out of range for k={k}",
                        ins.value
                    )));
                }
                Ok(m + 1)
            }
        }
    }

    /// Image of one vertex. Parameters must already be validated with
    /// [`Step::out_dim`]. A bend rejects vertices whose folded coordinate is
    /// `k-1`: folding through the wraparound edge would not be a copy.
    pub fn map_vertex(&self, k: u32, v: &[u32], out: &mut Vec<u32>) -> Result<()> {
        out.clear();
        match self {
            Step::Translate(t) => {
                out.extend(v.iter().zip(t.w.coords()).map(|(&a, &b)| (a + b) % k));
            }
            Step::Bend(b) => {
                let vi = v[b.i - 1];
                if vi == k - 1 {
                    return Err(Error::Wrapping {
                        coordinate: b.i,
                        vertex: v.to_vec(),
                    });
                }
                out.extend_from_slice(v);
                out.resize(b.n, 0);
                if vi >= b.j {
                    out[b.i - 1] = b.j - 1;
                    out[v.len() + b.s - 1] = vi + 1 - b.j;
                }
            }
            Step::Insert(ins) => {
                out.extend_from_slice(&v[..ins.at - 1]);
                out.push(ins.value);
                out.extend_from_slice(&v[ins.at - 1..]);
            }
        }
        Ok(())
    }
}

/// A composed map: pad to `base_dim` with zeros, then apply `steps` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransformSeq {
    base_dim: usize,
    steps: Vec<Step>,
}

impl TransformSeq {
    pub fn identity(base_dim: usize) -> Self {
        TransformSeq {
            base_dim,
            steps: Vec::new(),
        }
    }

    pub fn new(base_dim: usize, steps: Vec<Step>) -> Self {
        TransformSeq { base_dim, steps }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// Output dimension, checking that dimensions chain step to step.
    pub fn final_dim(&self, k: u32) -> Result<usize> {
        self.steps
            .iter()
            .enumerate()
            .try_fold(self.base_dim, |m, (idx, s)| s.out_dim(k, m).map_err(|e| e.at_step(idx)))
    }

    /// Image of one vertex (already padded to `base_dim`).
    pub fn map_vertex(&self, k: u32, v: &[u32]) -> Result<Vec<u32>> {
        let mut cur = v.to_vec();
        let mut next = Vec::new();
        for (idx, step) in self.steps.iter().enumerate() {
            step.out_dim(k, cur.len()).map_err(|e| e.at_step(idx))?;
            step.map_vertex(k, &cur, &mut next).map_err(|e| e.at_step(idx))?;
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// `lift_at(1)`: the identity on a new first coordinate, `self` on the rest.
    pub fn lift_with_prefix(&self) -> TransformSeq {
        self.lift_at(1).0
    }

    /// Lifts across a new identity coordinate inserted at position `p` of the
    /// input. Returns the lifted sequence and the position the carried
    /// coordinate occupies in the output.
    pub fn lift_at(&self, p: usize) -> (TransformSeq, usize) {
        let mut pos = p;
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let (lifted, next) = lift_step(s, pos);
                pos = next;
                lifted
            })
            .collect();
        (
            TransformSeq {
                base_dim: self.base_dim + 1,
                steps,
            },
            pos,
        )
    }
}

/// Lifts one step across a carried coordinate at position `pos`; returns the
/// lifted step and the carried coordinate's position afterwards.
fn lift_step(step: &Step, pos: usize) -> (Step, usize) {
    match step {
        Step::Translate(t) => {
            let mut w = t.w.coords().to_vec();
            w.insert(pos - 1, 0);
            (Step::translate(w), pos)
        }
        Step::Bend(b) => (
            Step::Bend(Bend {
                i: if b.i < pos { b.i } else { b.i + 1 },
                j: b.j,
                s: b.s,
                n: b.n + 1,
            }),
            pos,
        ),
        // An insert before original coordinate `at` lands after the carried
        // coordinate exactly when `at >= pos`.
        Step::Insert(ins) if ins.at >= pos => (Step::insert(ins.at + 1, ins.value), pos),
        Step::Insert(_) => (step.clone(), pos + 1),
    }
}

/// Shared, persistent form of a [`TransformSeq`]: a cons list from the
/// latest step back to the base dimension. Covers attach one to every
/// placement; derived covers share their parents' chains.
#[derive(Debug, Clone)]
pub struct Provenance(Arc<ProvNode>);

#[derive(Debug)]
enum ProvNode {
    Root { base_dim: usize },
    Step { prev: Provenance, step: Step, dim: usize },
}

impl Provenance {
    pub fn root(base_dim: usize) -> Self {
        Provenance(Arc::new(ProvNode::Root { base_dim }))
    }

    pub fn from_seq(seq: &TransformSeq, k: u32) -> Result<Self> {
        seq.steps
            .iter()
            .enumerate()
            .try_fold(Provenance::root(seq.base_dim), |p, (idx, s)| {
                p.then(s.clone(), k).map_err(|e| e.at_step(idx))
            })
    }

    /// Appends a step, validating it against the current dimension.
    pub fn then(&self, step: Step, k: u32) -> Result<Self> {
        let dim = step.out_dim(k, self.dim())?;
        Ok(self.then_unchecked(step, dim))
    }

    pub(crate) fn then_unchecked(&self, step: Step, dim: usize) -> Self {
        Provenance(Arc::new(ProvNode::Step {
            prev: self.clone(),
            step,
            dim,
        }))
    }

    pub fn dim(&self) -> usize {
        match &*self.0 {
            ProvNode::Root { base_dim } => *base_dim,
            ProvNode::Step { dim, .. } => *dim,
        }
    }

    pub fn to_seq(&self) -> TransformSeq {
        let mut steps = Vec::new();
        let mut cur = self;
        loop {
            match &*cur.0 {
                ProvNode::Root { base_dim } => {
                    steps.reverse();
                    return TransformSeq {
                        base_dim: *base_dim,
                        steps,
                    };
                }
                ProvNode::Step { prev, step, .. } => {
                    steps.push(step.clone());
                    cur = prev;
                }
            }
        }
    }

    fn key(&self) -> *const ProvNode {
        Arc::as_ptr(&self.0)
    }
}

/// Lifts many provenance chains across a new coordinate at position `p`,
/// sharing work between chains with common prefixes.
pub struct Lifter {
    p: usize,
    // The original node is kept alive so its address stays a valid key.
    memo: HashMap<*const ProvNode, (Provenance, Provenance, usize)>,
}

impl Lifter {
    pub fn new(p: usize) -> Self {
        Lifter {
            p,
            memo: HashMap::new(),
        }
    }

    /// Lifted chain and the carried coordinate's final position.
    pub fn lift(&mut self, prov: &Provenance) -> (Provenance, usize) {
        let mut pending = Vec::new();
        let mut cur = prov.clone();
        let (mut lifted, mut pos) = loop {
            if let Some((_, l, pos)) = self.memo.get(&cur.key()) {
                break (l.clone(), *pos);
            }
            match &*cur.0 {
                ProvNode::Root { base_dim } => {
                    let l = Provenance::root(base_dim + 1);
                    self.memo.insert(cur.key(), (cur.clone(), l.clone(), self.p));
                    break (l, self.p);
                }
                ProvNode::Step { prev, .. } => {
                    let prev = prev.clone();
                    pending.push(cur);
                    cur = prev;
                }
            }
        };
        while let Some(node) = pending.pop() {
            let ProvNode::Step { step, dim, .. } = &*node.0 else {
                unreachable!("only step nodes are pending");
            };
            let (s, next) = lift_step(step, pos);
            lifted = lifted.then_unchecked(s, dim + 1);
            pos = next;
            self.memo.insert(node.key(), (node.clone(), lifted.clone(), pos));
        }
        (lifted, pos)
    }
}

/// A pattern image together with the sequence that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedCopy {
    pub image: Pattern,
    pub transform: TransformSeq,
}

fn torus_of(p: &Pattern) -> Result<Torus> {
    p.torus()
}

fn apply_step_to_pattern(step: &Step, p: &Pattern) -> Result<Pattern> {
    let t = torus_of(p)?;
    let out_dim = step.out_dim(t.k(), t.dim())?;
    let ambient = Ambient::Torus(t.with_dim(out_dim)?);
    let mut buf = Vec::new();
    let mut image = Vec::with_capacity(p.size());
    for v in p.vertices() {
        step.map_vertex(t.k(), v.coords(), &mut buf)?;
        image.push(TorusVertex::new(buf.clone()));
    }
    if image.is_empty() {
        return Ok(Pattern::empty(ambient));
    }
    Pattern::new(ambient, image)
}

/// `T_w(p)`.
pub fn apply_translate(t: &Translate, p: &Pattern) -> Result<Pattern> {
    apply_step_to_pattern(&Step::Translate(t.clone()), p)
}

/// `S^{n,s}_{i,j}(p)`. Only the folded coordinate must avoid `k-1`; other
/// coordinates are carried unchanged, so a translate applied earlier in a
/// sequence does not disqualify a later bend.
pub fn apply_bend(b: &Bend, p: &Pattern) -> Result<Pattern> {
    apply_step_to_pattern(&Step::Bend(*b), p)
}

/// The restricted copy `seq(p × 0^{base_dim-m})`.
pub fn apply_sequence(seq: &TransformSeq, p: &Pattern) -> Result<RestrictedCopy> {
    if !does_not_wrap(p) {
        let (coordinate, vertex) = first_wrap(p).expect("wrapping pattern has a witness");
        return Err(Error::Wrapping {
            coordinate,
            vertex: vertex.coords().to_vec(),
        });
    }
    let mut cur = p.pad_to(seq.base_dim)?;
    for (idx, step) in seq.steps.iter().enumerate() {
        cur = apply_step_to_pattern(step, &cur).map_err(|e| e.at_step(idx))?;
    }
    Ok(RestrictedCopy {
        image: cur,
        transform: seq.clone(),
    })
}

/// Whether `image` induces a graph isomorphic to the one `original` induces.
pub fn is_induced_copy(image: &Pattern, original: &Pattern) -> bool {
    image.ambient().radix() == original.ambient().radix()
        && image.size() == original.size()
        && image.edges().len() == original.edges().len()
        && is_isomorphic(&image.graph(), &original.graph())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(k: u32, m: usize, vs: &[&[u32]]) -> Pattern {
        Pattern::new(
            Ambient::Torus(Torus::new(k, m).unwrap()),
            vs.iter().map(|c| TorusVertex::new(c.to_vec())),
        )
        .unwrap()
    }

    fn verts(p: &Pattern) -> Vec<Vec<u32>> {
        p.vertices().iter().map(|v| v.coords().to_vec()).collect()
    }

    #[test]
    fn translate_examples() {
        let p = pat(4, 2, &[&[0, 0], &[0, 1]]);
        let t = Translate {
            w: TorusVertex::new(vec![1, 0]),
        };
        assert_eq!(verts(&apply_translate(&t, &p).unwrap()), vec![vec![1, 0], vec![1, 1]]);
        let zero = Translate {
            w: TorusVertex::zeros(2),
        };
        assert_eq!(apply_translate(&zero, &p).unwrap(), p);
        let q = pat(4, 1, &[&[1]]);
        let t3 = Translate {
            w: TorusVertex::new(vec![3]),
        };
        assert_eq!(verts(&apply_translate(&t3, &q).unwrap()), vec![vec![0]]);
        assert!(matches!(
            apply_translate(&t3, &p),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn bend_of_figure_one_setup() {
        let y = pat(4, 1, &[&[0], &[1], &[2]]);
        let b = Bend { i: 1, j: 2, s: 1, n: 2 };
        let image = apply_bend(&b, &y).unwrap();
        assert_eq!(verts(&image), vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert!(is_induced_copy(&image, &y));
        assert!(does_not_wrap(&image));
    }

    #[test]
    fn bend_above_every_vertex_pads() {
        let y = pat(6, 1, &[&[0], &[1]]);
        let b = Bend { i: 1, j: 4, s: 2, n: 3 };
        assert_eq!(apply_bend(&b, &y).unwrap(), y.pad_to(3).unwrap());
    }

    #[test]
    fn bend_rejects_wrapping_and_bad_ranges() {
        let w = pat(4, 1, &[&[2], &[3]]);
        let b = Bend { i: 1, j: 1, s: 1, n: 2 };
        assert!(matches!(
            apply_bend(&b, &w),
            Err(Error::Wrapping { coordinate: 1, .. })
        ));
        let y = pat(4, 1, &[&[0]]);
        for bad in [
            Bend { i: 2, j: 1, s: 1, n: 2 },
            Bend { i: 1, j: 0, s: 1, n: 2 },
            Bend { i: 1, j: 3, s: 1, n: 2 },
            Bend { i: 1, j: 1, s: 2, n: 2 },
            Bend { i: 1, j: 1, s: 1, n: 1 },
        ] {
            assert!(matches!(apply_bend(&bad, &y), Err(Error::Parameter(_))), "{bad:?}");
        }
    }

    #[test]
    fn sequence_examples() {
        let p = pat(4, 1, &[&[0], &[1]]);
        let empty = TransformSeq::identity(3);
        assert_eq!(apply_sequence(&empty, &p).unwrap().image, p.pad_to(3).unwrap());

        let seq = TransformSeq::new(1, vec![Step::translate(vec![1]), Step::bend(1, 2, 1, 2)]);
        // (0),(1) -> (1),(2) -> (1,0),(1,1)
        let copy = apply_sequence(&seq, &p).unwrap();
        assert_eq!(verts(&copy.image), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(copy.transform, seq);

        let wraps = TransformSeq::new(1, vec![Step::translate(vec![2]), Step::bend(1, 1, 1, 2)]);
        match apply_sequence(&wraps, &p) {
            Err(Error::Step { step: 1, source }) => {
                assert!(matches!(*source, Error::Wrapping { .. }))
            }
            other => panic!("expected failure at step 1, got {other:?}"),
        }
    }

    #[test]
    fn lift_examples() {
        let t = TransformSeq::new(1, vec![Step::translate(vec![2])]);
        assert_eq!(t.lift_with_prefix().steps(), &[Step::translate(vec![0, 2])]);
        let b = TransformSeq::new(1, vec![Step::bend(1, 2, 1, 2)]);
        let lifted = b.lift_with_prefix();
        assert_eq!(lifted.base_dim(), 2);
        assert_eq!(lifted.steps(), &[Step::bend(2, 2, 1, 3)]);
    }

    #[test]
    fn lift_carries_prefix_through_inserts() {
        let k = 5;
        let seq = TransformSeq::new(
            2,
            vec![
                Step::translate(vec![4, 1]),
                Step::insert(1, 4),
                Step::bend(3, 1, 1, 4),
                Step::insert(5, 2),
            ],
        );
        for p in 1..=3 {
            let (lifted, pos) = seq.lift_at(p);
            for x in [[0u32, 0], [1, 2], [3, 0]] {
                for c in 0..k {
                    let mut input = x.to_vec();
                    input.insert(p - 1, c);
                    let out = lifted.map_vertex(k, &input).unwrap();
                    let mut expected = seq.map_vertex(k, &x).unwrap();
                    expected.insert(pos - 1, c);
                    assert_eq!(out, expected, "p={p} x={x:?} c={c}");
                }
            }
        }
    }

    #[test]
    fn provenance_lifting_matches_sequence_lifting() {
        let k = 6;
        let root = Provenance::root(1);
        let a = root.then(Step::translate(vec![2]), k).unwrap();
        let b = a.then(Step::bend(1, 2, 1, 3), k).unwrap();
        let c = a.then(Step::insert(1, 5), k).unwrap();
        let mut lifter = Lifter::new(1);
        for prov in [&b, &c, &a, &root] {
            let (lifted, pos) = lifter.lift(prov);
            let (expected, expected_pos) = prov.to_seq().lift_at(1);
            assert_eq!(lifted.to_seq(), expected);
            assert_eq!(pos, expected_pos);
        }
        assert_eq!(Provenance::from_seq(&b.to_seq(), k).unwrap().to_seq(), b.to_seq());
    }

    #[test]
    fn induced_copy_checks() {
        let p = pat(6, 2, &[&[0, 0], &[0, 1], &[1, 1]]);
        let t = Translate {
            w: TorusVertex::new(vec![5, 5]),
        };
        assert!(is_induced_copy(&apply_translate(&t, &p).unwrap(), &p));
        let smaller = pat(6, 2, &[&[0, 0], &[0, 1]]);
        assert!(!is_induced_copy(&smaller, &p));
        let spread = pat(6, 2, &[&[0, 0], &[0, 2], &[1, 1]]);
        assert!(!is_induced_copy(&spread, &p));
    }

    #[test]
    fn step_json_format() {
        let seq = vec![Step::translate(vec![1, 0]), Step::bend(1, 2, 1, 2)];
        let json = serde_json::to_string(&seq).unwrap();
        assert_eq!(
            json,
            r#"[{"op":"translate","w":[1,0]},{"op":"bend","i":1,"j":2,"s":1,"n":2}]"#
        );
        let back: Vec<Step> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seq);
    }
}
