//! Constructions of `(1 mod r)`-covers by restricted copies.
//!
//! * [`widen_layered`], [`lift_dimension`] and [`reduce_weight`] are the
//!   ladder steps that turn a `(1,0,…,0,-1)`-layered cover into a
//!   `(1 mod r)`-cover ([`onemodr_from_layered`]).
//! * [`build_layered`] produces the layered cover by recursion on the top
//!   layer of the pattern; [`onemodr_cover`] ties the two together.
//! * [`packability_report`] runs the whole pipeline for a pattern whose size
//!   divides `k^m`, checking both covers the packing theorem needs.
//!
//! Every stage re-verifies its output by direct weight evaluation; nothing
//! is trusted from the construction.

use std::time::Instant;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::covers::{translate_cover, CoverMultiset};
use crate::error::{Error, Result};
use crate::graph::{for_each_embedding, EmbedMode, SimpleGraph};
use crate::packsearch::{pack_vertices, CopyMode, Verdict};
use crate::torus::{base_conditions, does_not_wrap, first_wrap, Ambient, BaseConditionReport, Pattern, TorusVertex};
use crate::transforms::{is_induced_copy, Lifter, Provenance, Step};

/// Limits for the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnemodrConfig {
    /// Largest torus dimension any intermediate cover may live in.
    pub max_dim: usize,
    /// Wall-clock limit per stage, checked when the stage finishes.
    pub stage_seconds: f64,
    /// Replay provenance and check induced copies on the final cover.
    pub check_copies: bool,
}

impl Default for OnemodrConfig {
    fn default() -> Self {
        OnemodrConfig {
            max_dim: 16,
            stage_seconds: 60.0,
            check_copies: true,
        }
    }
}

/// One verified construction stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub depth: usize,
    pub dim: usize,
    pub placements: usize,
    pub verified: bool,
    pub elapsed_ms: u64,
}

/// Shared state of one construction: limits and the stage log.
pub struct Tracer {
    cfg: OnemodrConfig,
    depth: usize,
    records: Vec<StageRecord>,
}

impl Tracer {
    pub fn new(cfg: OnemodrConfig) -> Self {
        Tracer {
            cfg,
            depth: 0,
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[StageRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<StageRecord> {
        self.records
    }

    fn check_dim(&self, stage: &str, dim: usize) -> Result<()> {
        if dim > self.cfg.max_dim {
            return Err(Error::Resource(format!(
                "{stage} needs dimension {dim}, above the cap {}",
                self.cfg.max_dim
            )));
        }
        Ok(())
    }

    fn record(&mut self, stage: &str, started: Instant, cover: &CoverMultiset) -> Result<()> {
        let elapsed = started.elapsed();
        self.records.push(StageRecord {
            stage: stage.to_string(),
            depth: self.depth,
            dim: cover.torus().dim(),
            placements: cover.len(),
            verified: true,
            elapsed_ms: elapsed.as_millis() as u64,
        });
        if elapsed.as_secs_f64() > self.cfg.stage_seconds {
            return Err(Error::Resource(format!(
                "stage {stage} took {:.1}s, above the {}s budget",
                elapsed.as_secs_f64(),
                self.cfg.stage_seconds
            )));
        }
        Ok(())
    }
}

/// `(1, 0, …, 0, -1)`.
pub fn edge_layers(k: u32) -> Vec<i64> {
    let mut a = vec![0; k as usize];
    a[0] = 1;
    a[k as usize - 1] = -1;
    a
}

/// `(1, …, 1, 1-k)`.
pub fn ladder_layers(k: u32) -> Vec<i64> {
    let mut a = vec![1; k as usize];
    a[k as usize - 1] = 1 - k as i64;
    a
}

fn pow_mod(base: u64, exp: u64, r: u64) -> u64 {
    let mut result = 1 % r as u128;
    let mut b = base as u128 % r as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % r as u128;
        }
        b = b * b % r as u128;
        e >>= 1;
    }
    result as u64
}

fn with_modulus(c: &CoverMultiset, r: u64) -> Result<CoverMultiset> {
    if c.modulus() == Some(r) {
        Ok(c.clone())
    } else {
        c.reduce_mod(r)
    }
}

fn basis_shift(dim: usize, coordinate: usize, amount: u32) -> Step {
    let mut w = vec![0; dim];
    w[coordinate - 1] = amount;
    Step::translate(w)
}

/// `Z' = Σ_{a=0}^{k-2} T_{a·e_1}((k-1-a)·Z)`: turns a `(1,0,…,0,-1)`-layered
/// cover into a `(1,…,1,1-k)`-layered one.
pub fn widen_layered(z: &CoverMultiset, r: u64) -> Result<CoverMultiset> {
    let k = z.torus().k();
    let z = with_modulus(z, r)?;
    z.verify_layered(&edge_layers(k), r)?
        .require("widen_layered/input")?;
    let dim = z.torus().dim();
    let mut out = CoverMultiset::new(z.torus(), Some(r))?;
    for a in 0..k - 1 {
        let scaled = z.scale((k - 1 - a) as u64);
        out.add_assign(&scaled.map_step(&basis_shift(dim, 1, a))?)?;
    }
    out.verify_layered(&ladder_layers(k), r)?
        .require("widen_layered/output")?;
    Ok(out)
}

/// `Y' = Σ_a Y × (a)`: the same layer profile one dimension up.
pub fn lift_dimension(y: &CoverMultiset, r: u64) -> Result<CoverMultiset> {
    let k = y.torus().k();
    let y = with_modulus(y, r)?;
    y.verify_layered(&ladder_layers(k), r)?
        .require("lift_dimension/input")?;
    let target = y.torus().with_dim(y.torus().dim() + 1)?;
    let mut out = CoverMultiset::new(target, Some(r))?;
    for a in 0..k {
        out.add_assign(&y.product_with_layer(&TorusVertex::new(vec![a]))?)?;
    }
    out.verify_layered(&ladder_layers(k), r)?
        .require("lift_dimension/output")?;
    Ok(out)
}

/// One weight-reduction step: from uniform weight `k^e` on `C_k^m` to
/// uniform weight `k^{e-1}` on `C_k^{m+1}`, via `W' = W_0 + k^{e-1}·ladder`
/// where `W_0` places `W` in layer `k-1`.
pub fn reduce_weight(
    w: &CoverMultiset,
    exponent: u32,
    ladder: &CoverMultiset,
    r: u64,
) -> Result<CoverMultiset> {
    if exponent == 0 {
        return Err(Error::param("reduce_weight needs exponent at least 1"));
    }
    let k = w.torus().k();
    let w = with_modulus(w, r)?;
    let ladder = with_modulus(ladder, r)?;
    if ladder.torus() != w.torus().with_dim(w.torus().dim() + 1)? {
        return Err(Error::param(format!(
            "ladder lives in {}, expected dimension {}",
            ladder.torus(),
            w.torus().dim() + 1
        )));
    }
    let current = pow_mod(k as u64, exponent as u64, r);
    w.verify_uniform(current as i64, r)?
        .require("reduce_weight/input")?;
    ladder
        .verify_layered(&ladder_layers(k), r)?
        .require("reduce_weight/ladder")?;
    let next = pow_mod(k as u64, exponent as u64 - 1, r);
    let mut out = w.map_step(&Step::insert(1, k - 1))?;
    out.add_assign(&ladder.scale(next))?;
    out.verify_uniform(next as i64, r)?
        .require("reduce_weight/output")?;
    Ok(out)
}

/// Smallest exponent `e` with some `t` satisfying `t·size ≡ k^e (mod r)`,
/// together with the least such `t`.
pub fn seed_exponent(size: usize, k: u32, r: u64) -> Result<(u32, u64)> {
    let s = (size as u64 % r) as i128;
    let ri = r as i128;
    let g = s.gcd(&ri);
    // k^e mod r is periodic after at most log2(r) steps with period below r.
    for e in 0..=(r + 64) as u32 {
        let target = pow_mod(k as u64, e as u64, r) as i128;
        if target % g != 0 {
            continue;
        }
        let modulus = ri / g;
        let t = if modulus == 1 {
            0
        } else {
            let inv = (s / g).extended_gcd(&modulus).x;
            ((target / g) * inv).rem_euclid(modulus)
        };
        return Ok((e, t as u64));
    }
    Err(Error::SeedUnsolvable {
        pattern_size: size,
        modulus: r,
    })
}

/// Builds a `(1 mod r)`-cover from a `(1,0,…,0,-1)`-layered cover `z` by
/// restricted copies of `p`.
pub fn onemodr_from_layered(
    z: &CoverMultiset,
    p: &Pattern,
    r: u64,
    cfg: &OnemodrConfig,
) -> Result<CoverMultiset> {
    from_layered_in(&mut Tracer::new(*cfg), z, p, r)
}

fn from_layered_in(tr: &mut Tracer, z: &CoverMultiset, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let torus = p.torus()?;
    let k = torus.k();
    if z.torus().k() != k {
        return Err(Error::param("layered cover and pattern use different k"));
    }
    if r == 0 {
        return Err(Error::param("modulus must be positive"));
    }
    if r == 1 {
        return CoverMultiset::new(torus.with_dim(0)?, Some(1));
    }
    let z = with_modulus(z, r)?;
    z.verify_layered(&edge_layers(k), r)?
        .require("onemodr_from_layered/input")?;

    let (e, t) = seed_exponent(p.size(), k, r)?;
    let base = if e == 0 {
        p.dim()
    } else {
        p.dim().max(z.torus().dim() - 1)
    };
    tr.check_dim("onemodr_from_layered", base + e as usize)?;

    let started = Instant::now();
    let mut w = translate_cover(&p.pad_to(base)?)?.reduce_mod(r)?.scale(t);
    w.verify_uniform(pow_mod(k as u64, e as u64, r) as i64, r)?
        .require("onemodr_from_layered/seed")?;
    tr.record("seed", started, &w)?;

    if e > 0 {
        let started = Instant::now();
        let mut ladder = widen_layered(&z, r)?;
        while ladder.torus().dim() < base + 1 {
            ladder = lift_dimension(&ladder, r)?;
        }
        tr.record("ladder", started, &ladder)?;
        for step in 0..e {
            let started = Instant::now();
            w = reduce_weight(&w, e - step, &ladder, r)?;
            tr.record("reduce_weight", started, &w)?;
            if step + 1 < e {
                ladder = lift_dimension(&ladder, r)?;
            }
        }
    }
    w.verify_uniform(1, r)?.require("onemodr_from_layered/output")?;
    Ok(w)
}

/// Lifts every placement of `c` (a cover by restricted copies of `p` minus
/// its first coordinate) to a placement of `p` itself by replaying the
/// prefix-lifted provenance on `p`. The first coordinate of every vertex is
/// checked to be preserved.
fn lift_prefix_cover(c: &CoverMultiset, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let k = c.torus().k();
    let target = c.torus().with_dim(c.torus().dim() + 1)?;
    let mut out = CoverMultiset::new(target, Some(r))?;
    let mut lifter = Lifter::new(1);
    for placement in c.placements() {
        let prov = placement.provenance.ok_or_else(|| {
            Error::verification("lift", "placement without provenance cannot be lifted")
        })?;
        let (lifted, _) = lifter.lift(prov);
        let seq = lifted.to_seq();
        let mut image = Vec::with_capacity(p.size());
        for v in p.vertices() {
            let mut padded = v.coords().to_vec();
            padded.resize(seq.base_dim(), 0);
            let mapped = seq.map_vertex(k, &padded)?;
            if mapped[0] != padded[0] {
                return Err(Error::verification(
                    "lift/P2",
                    format!("vertex {v} left its layer"),
                ));
            }
            image.push(target.index(&mapped));
        }
        out.insert_indices(image, placement.multiplicity, Some(lifted))?;
    }
    Ok(out)
}

/// A `(1,0,…,0,-1)`-layered cover (mod `r`) by restricted copies of `p`.
pub fn build_layered(p: &Pattern, r: u64, cfg: &OnemodrConfig) -> Result<CoverMultiset> {
    build_layered_in(&mut Tracer::new(*cfg), p, r)
}

fn require_non_wrapping(p: &Pattern) -> Result<()> {
    if let Some((coordinate, vertex)) = first_wrap(p) {
        return Err(Error::Wrapping {
            coordinate,
            vertex: vertex.coords().to_vec(),
        });
    }
    Ok(())
}

fn build_layered_in(tr: &mut Tracer, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let torus = p.torus()?;
    let k = torus.k();
    if p.is_empty() {
        return Err(Error::param("cannot cover with an empty pattern"));
    }
    if r == 0 {
        return Err(Error::param("modulus must be positive"));
    }
    require_non_wrapping(p)?;
    let started = Instant::now();
    let out = if p.dim() == 0 {
        // A point: weight 1 on (0) and r-1 ≡ -1 on (k-1).
        let c1 = torus.with_dim(1)?;
        let mut out = CoverMultiset::new(c1, Some(r))?;
        let root = Provenance::root(1);
        out.insert_indices(vec![0], 1, Some(root.clone()))?;
        out.insert_indices(
            vec![(k - 1) as u64],
            r - 1,
            Some(root.then(Step::translate(vec![k - 1]), k)?),
        )?;
        out
    } else if let Some((1, c)) = p.constant_coordinate().filter(|&(pos, _)| pos == 1) {
        // All of p sits in layer c: cover the rest, then put one copy of the
        // cover in layer 0 and r-1 copies in layer k-1.
        let inner = p.drop_coordinate(1)?;
        tr.depth += 1;
        let c_inner = onemodr_in(tr, &inner, r)?;
        tr.depth -= 1;
        let lifted = lift_prefix_cover(&c_inner, p, r)?;
        let dim = lifted.torus().dim();
        let mut out = lifted.map_step(&basis_shift(dim, 1, (k - c) % k))?;
        out.add_assign(&lifted.map_step(&basis_shift(dim, 1, k - 1 - c))?.scale(r - 1))?;
        out
    } else {
        general_layered(tr, p, r)?
    };
    out.verify_layered(&edge_layers(k), r)?
        .require("build_layered/output")?;
    tr.record("build_layered", started, &out)?;
    Ok(out)
}

fn general_layered(tr: &mut Tracer, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let torus = p.torus()?;
    let k = torus.k();
    let tau = p
        .vertices()
        .iter()
        .map(|v| v.coords()[0])
        .max()
        .expect("pattern is non-empty");
    let top: Vec<TorusVertex> = p
        .layer_part(tau)
        .into_iter()
        .map(|v| TorusVertex::new(v.coords()[1..].to_vec()))
        .collect();
    let top = Pattern::new(Ambient::Torus(torus.with_dim(p.dim() - 1)?), top)?;

    // C' covers C_k^{m0} (1 mod r) by copies of the top layer.
    tr.depth += 1;
    let c_top = onemodr_in(tr, &top, r)?;
    tr.depth -= 1;
    let m0 = c_top.torus().dim();

    // X: the same maps applied to all of p; layer tau has weight 1.
    let started = Instant::now();
    let x = lift_prefix_cover(&c_top, p, r)?;
    tr.check_dim("build_layered/X", m0 + 1)?;
    let weights = x.weights()?;
    let layer = x.torus().layer(tau)?;
    if let Some(i) = layer.index_range().find(|&i| weights[i as usize] % r != 1 % r) {
        return Err(Error::verification(
            "build_layered/X",
            format!(
                "vertex {} in layer {tau} has weight {} (mod {r})",
                x.torus().vertex(i),
                weights[i as usize]
            ),
        ));
    }
    tr.record("X", started, &x)?;

    // Y = X × 0^{r-1} + Σ_d S^{n0,d}_{1,tau}(X).
    let n0 = m0 + r as usize;
    tr.check_dim("build_layered/Y", n0)?;
    let started = Instant::now();
    let mut y = x.product_with_layer(&TorusVertex::zeros(r as usize - 1))?;
    for d in 1..r as usize {
        y.add_assign(&x.map_step(&Step::bend(1, tau, d, n0))?)?;
    }
    tr.record("Y", started, &y)?;

    // Z = Σ_w T_{-tau·e_1 + 0^{m0} × w}(Y) over all tails w ∈ C_k^{r-1}.
    let started = Instant::now();
    let tails = torus.with_dim(r as usize - 1)?;
    let mut z = CoverMultiset::new(y.torus(), Some(r))?;
    for w in tails.vertices() {
        let mut shift = vec![0; m0 + 1];
        shift[0] = (k - tau) % k;
        shift.extend_from_slice(w.coords());
        z.add_assign(&y.map_step(&Step::translate(shift))?)?;
    }
    tr.record("Z", started, &z)?;
    Ok(z)
}

/// A `(1 mod r)`-cover of some `C_k^n` by restricted copies of `p`.
pub fn onemodr_cover(p: &Pattern, r: u64, cfg: &OnemodrConfig) -> Result<CoverMultiset> {
    let mut tr = Tracer::new(*cfg);
    onemodr_traced(&mut tr, p, r)
}

/// [`onemodr_cover`] with the stage log kept in `tr`; also replays and
/// checks every placement when the config asks for it.
pub fn onemodr_traced(tr: &mut Tracer, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let out = onemodr_in(tr, p, r)?;
    out.verify_uniform(1, r)?.require("onemodr_cover/output")?;
    if tr.cfg.check_copies {
        out.verify_restricted(p)?;
    }
    Ok(out)
}

fn onemodr_in(tr: &mut Tracer, p: &Pattern, r: u64) -> Result<CoverMultiset> {
    let torus = p.torus()?;
    let k = torus.k();
    if p.is_empty() {
        return Err(Error::param("cannot cover with an empty pattern"));
    }
    if r == 0 {
        return Err(Error::param("modulus must be positive"));
    }
    require_non_wrapping(p)?;
    tr.check_dim("onemodr_cover", p.dim())?;
    if r == 1 {
        return CoverMultiset::new(torus.with_dim(0)?, Some(1));
    }
    let started = Instant::now();
    let out = if p.size() == 1 {
        translate_cover(p)?.reduce_mod(r)?
    } else if let Some((1, c)) = p.constant_coordinate().filter(|&(pos, _)| pos == 1) {
        let inner = p.drop_coordinate(1)?;
        tr.depth += 1;
        let c_inner = onemodr_in(tr, &inner, r)?;
        tr.depth -= 1;
        let lifted = lift_prefix_cover(&c_inner, p, r)?;
        let dim = lifted.torus().dim();
        let mut out = CoverMultiset::new(lifted.torus(), Some(r))?;
        for a in 0..k {
            out.add_assign(&lifted.map_step(&basis_shift(dim, 1, (a + k - c) % k))?)?;
        }
        out
    } else {
        let z = build_layered_in(tr, p, r)?;
        from_layered_in(tr, &z, p, r)?
    };
    out.verify_uniform(1, r)?.require("onemodr_cover")?;
    tr.record("onemodr_cover", started, &out)?;
    Ok(out)
}

/// An induced, non-wrapping copy of a torus pattern, obtained through an
/// induced `k`-cycle in a hypercube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonWrappingEmbedding {
    pub pattern: Pattern,
    /// Dimension of the hypercube holding the induced cycle.
    pub cube_dim: usize,
    /// The induced cycle, in order, as `{0,1}` vectors.
    pub coil: Vec<TorusVertex>,
}

/// Searches `Q_2, Q_3, …, Q_{max_cube_dim}` for an induced `k`-cycle.
pub fn find_coil(k: u32, max_cube_dim: usize, budget: &mut Budget) -> Result<(usize, Vec<TorusVertex>)> {
    for d in 2..=max_cube_dim {
        if (k as u64) > 1 << d {
            continue;
        }
        let cube = crate::torus::Hypercube::new(d)?;
        let cycle = SimpleGraph::from_edges(k as usize, (0..k as usize).map(|i| (i, (i + 1) % k as usize)));
        let mut found = None;
        let outcome = for_each_embedding(&cycle, &cube.graph(), EmbedMode::Induced, budget, |map| {
            found = Some(map.to_vec());
            false
        });
        if let Some(map) = found {
            let amb = Ambient::Cube(cube);
            return Ok((d, map.iter().map(|&i| amb.vertex(i as u64)).collect()));
        }
        if !outcome.exhausted {
            return Err(Error::Resource(format!(
                "induced {k}-cycle search in Q_{d} ran out of budget"
            )));
        }
    }
    Err(Error::Resource(format!(
        "no induced {k}-cycle in hypercubes up to dimension {max_cube_dim}"
    )))
}

/// Maps `p ⊆ C_k^m` into `C_k^{dm}` through an induced `k`-cycle of `Q_d`,
/// so the image only uses coordinates 0 and 1.
pub fn embed_nonwrapping(p: &Pattern, max_cube_dim: usize, budget: &mut Budget) -> Result<NonWrappingEmbedding> {
    let torus = p.torus()?;
    let k = torus.k();
    if k % 2 == 1 || k < 4 {
        return Err(Error::param(format!(
            "non-wrapping embedding needs even k >= 4, got {k}"
        )));
    }
    let (d, coil) = find_coil(k, max_cube_dim, budget)?;
    let target = torus.with_dim(d * p.dim())?;
    let image = p.vertices().iter().map(|v| {
        TorusVertex::new(
            v.coords()
                .iter()
                .flat_map(|&c| coil[c as usize].coords().iter().copied())
                .collect::<Vec<_>>(),
        )
    });
    let pattern = if p.is_empty() {
        Pattern::empty(Ambient::Torus(target))
    } else {
        Pattern::new(Ambient::Torus(target), image)?
    };
    if !does_not_wrap(&pattern) {
        return Err(Error::verification("embed_nonwrapping", "image wraps"));
    }
    if !is_induced_copy(&pattern, p) {
        return Err(Error::verification("embed_nonwrapping", "image is not an induced copy"));
    }
    Ok(NonWrappingEmbedding {
        pattern,
        cube_dim: d,
        coil,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSummary {
    pub dim: usize,
    pub placements: usize,
    pub verified: bool,
    pub replayed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingAttempt {
    pub dim: usize,
    pub verdict: Verdict,
    pub copies: usize,
    pub placements: Vec<Vec<TorusVertex>>,
}

/// Outcome of the packability pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub k: u32,
    pub pattern_size: usize,
    pub modulus: u64,
    pub base: BaseConditionReport,
    /// Present when the pattern wrapped and had to be re-embedded.
    pub embedding: Option<NonWrappingEmbedding>,
    /// Dimension of the non-wrapping copy used for the covers.
    pub m0: usize,
    /// Dimension of the `(1 mod r)`-cover as constructed.
    pub n0: usize,
    /// Dimension where both covers are verified.
    pub final_dim: usize,
    pub r_cover: CoverSummary,
    pub onemodr_cover: CoverSummary,
    pub stages: Vec<StageRecord>,
    pub packings: Vec<PackingAttempt>,
    pub premises_hold: bool,
    pub conclusion: String,
}

/// Runs the packing pipeline: re-embed if needed, build the `r`-cover and
/// the `(1 mod r)`-cover in a common dimension, verify both, and search
/// explicit perfect packings in dimensions `pack_dims`.
pub fn packability_report(
    p: &Pattern,
    cfg: &OnemodrConfig,
    pack_dims: &[usize],
    pack_seconds: f64,
) -> Result<PipelineReport> {
    let torus = p.torus()?;
    let k = torus.k();
    if k % 2 == 1 {
        return Err(Error::param(format!("packing pipeline needs even k, got {k}")));
    }
    let base = base_conditions(p, &torus)?;
    if !base.divides {
        return Err(Error::BaseCondition(format!(
            "|V(H)| = {} does not divide {}^{} = {}",
            p.size(),
            k,
            p.dim(),
            base.host_vertices
        )));
    }
    let r = p.size() as u64;
    let embedding = if does_not_wrap(p) {
        None
    } else {
        Some(embed_nonwrapping(p, 8, &mut Budget::seconds(cfg.stage_seconds))?)
    };
    let q = embedding.as_ref().map_or(p, |e| &e.pattern);

    let mut tr = Tracer::new(*cfg);
    let one = onemodr_traced(&mut tr, q, r)?;
    let n0 = one.torus().dim();
    let final_dim = n0.max(q.dim());
    let one = pad_cover(&one, final_dim, r)?;
    one.verify_uniform(1, r)?.require("pipeline/onemodr")?;
    let replayed = if cfg.check_copies {
        one.verify_restricted(q)?.replayed
    } else {
        0
    };

    let started = Instant::now();
    let r_cover = translate_cover(&q.pad_to(final_dim)?)?;
    r_cover.verify_uniform(r as i64, 0)?.require("pipeline/r-cover")?;
    tr.record("r_cover", started, &r_cover)?;

    let mut packings = Vec::new();
    for &n in pack_dims {
        let host = Ambient::Torus(torus.with_dim(n)?);
        let result = pack_vertices(p, &host, CopyMode::Induced, &mut Budget::seconds(pack_seconds))?;
        packings.push(PackingAttempt {
            dim: n,
            verdict: result.verdict,
            copies: result.placements.len(),
            placements: result.placements,
        });
    }

    Ok(PipelineReport {
        k,
        pattern_size: p.size(),
        modulus: r,
        base,
        m0: q.dim(),
        n0,
        final_dim,
        r_cover: CoverSummary {
            dim: final_dim,
            placements: r_cover.len(),
            verified: true,
            replayed: 0,
        },
        onemodr_cover: CoverSummary {
            dim: final_dim,
            placements: one.len(),
            verified: true,
            replayed,
        },
        embedding,
        stages: tr.into_records(),
        packings,
        premises_hold: true,
        conclusion: format!(
            "C_{k}^{final_dim} has both an exact {r}-cover and a (1 mod {r})-cover by copies of H; \
             by the cover-to-packing theorem, C_{k}^n has a perfect induced H-packing \
             for all sufficiently large n"
        ),
    })
}

/// Extends a `(1 mod r)`-cover of `C_k^n` to `C_k^N` (`N ≥ n`) by taking
/// every value of each new last coordinate.
fn pad_cover(c: &CoverMultiset, dim: usize, r: u64) -> Result<CoverMultiset> {
    let mut cur = with_modulus(c, r)?;
    let k = cur.torus().k();
    while cur.torus().dim() < dim {
        let target = cur.torus().with_dim(cur.torus().dim() + 1)?;
        let mut next = CoverMultiset::new(target, Some(r))?;
        for a in 0..k {
            next.add_assign(&cur.product_with_layer(&TorusVertex::new(vec![a]))?)?;
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::Torus;

    fn pat(k: u32, m: usize, vs: &[&[u32]]) -> Pattern {
        Pattern::new(
            Ambient::Torus(Torus::new(k, m).unwrap()),
            vs.iter().map(|c| TorusVertex::new(c.to_vec())),
        )
        .unwrap()
    }

    fn k2(k: u32) -> Pattern {
        pat(k, 1, &[&[0], &[1]])
    }

    fn seed_z() -> CoverMultiset {
        let mut z = CoverMultiset::new(Torus::new(4, 1).unwrap(), Some(2)).unwrap();
        let prov = Provenance::root(1).then(Step::translate(vec![3]), 4).unwrap();
        z.insert(
            &[TorusVertex::new(vec![3]), TorusVertex::new(vec![0])],
            1,
            Some(prov),
        )
        .unwrap();
        z
    }

    #[test]
    fn widen_k2_weights() {
        let z = seed_z();
        let zp = widen_layered(&z.reduce_mod(2).unwrap(), 2).unwrap();
        // Without reduction the weights would be (5,3,1,3); mod 2 they are all 1.
        assert_eq!(zp.weights().unwrap(), vec![1, 1, 1, 1]);
        let mut plain = CoverMultiset::new(Torus::new(4, 1).unwrap(), None).unwrap();
        plain
            .insert(&[TorusVertex::new(vec![3]), TorusVertex::new(vec![0])], 1, None)
            .unwrap();
        let mut exact = CoverMultiset::new(Torus::new(4, 1).unwrap(), None).unwrap();
        for a in 0..3u32 {
            let shifted = plain.map_step(&Step::translate(vec![a])).unwrap();
            exact.add_assign(&shifted.scale((3 - a) as u64)).unwrap();
        }
        assert_eq!(exact.weights().unwrap(), vec![5, 3, 1, 3]);
    }

    #[test]
    fn widen_rejects_bad_input() {
        let empty = CoverMultiset::new(Torus::new(4, 1).unwrap(), Some(2)).unwrap();
        assert!(matches!(
            widen_layered(&empty, 2),
            Err(Error::Verification { .. })
        ));
        // Mod 1 everything passes.
        assert!(widen_layered(&empty, 1).is_ok());
    }

    #[test]
    fn lift_dimension_replicates() {
        let zp = widen_layered(&seed_z(), 2).unwrap();
        let y = lift_dimension(&zp, 2).unwrap();
        assert_eq!(y.torus().dim(), 2);
        assert_eq!(y.len(), zp.len() * 4);
    }

    #[test]
    fn seed_exponents() {
        assert_eq!(seed_exponent(2, 4, 2).unwrap(), (1, 0));
        assert_eq!(seed_exponent(1, 4, 3).unwrap(), (0, 1));
        // 2t ≡ 3^e (mod 4) never holds: 3^e is odd.
        assert!(matches!(
            seed_exponent(2, 3, 4),
            Err(Error::SeedUnsolvable { .. })
        ));
    }

    #[test]
    fn reduce_weight_k2() {
        let ladder = lift_dimension(&widen_layered(&seed_z(), 2).unwrap(), 2).unwrap();
        let seed = translate_cover(&k2(4)).unwrap().reduce_mod(2).unwrap();
        let out = reduce_weight(&seed, 1, &ladder, 2).unwrap();
        assert_eq!(out.torus().dim(), 2);
        assert!(out.verify_uniform(1, 2).unwrap().passed);
        assert!(reduce_weight(&seed, 1, &seed_z(), 2).is_err());
    }

    #[test]
    fn from_layered_k2() {
        let cfg = OnemodrConfig::default();
        let c = onemodr_from_layered(&seed_z(), &k2(4), 2, &cfg).unwrap();
        assert!(c.verify_uniform(1, 2).unwrap().passed);
        c.verify_restricted(&k2(4)).unwrap();
        let trivial = onemodr_from_layered(&seed_z(), &k2(4), 1, &cfg).unwrap();
        assert_eq!(trivial.torus().dim(), 0);
        assert!(trivial.is_empty());
    }

    #[test]
    fn build_layered_cases() {
        let cfg = OnemodrConfig::default();
        let point = pat(4, 0, &[&[]]);
        let z = build_layered(&point, 3, &cfg).unwrap();
        assert!(z.verify_layered(&edge_layers(4), 3).unwrap().passed);

        let z = build_layered(&k2(4), 2, &cfg).unwrap();
        assert!(z.verify_layered(&edge_layers(4), 2).unwrap().passed);
        z.verify_restricted(&k2(4)).unwrap();

        let flat = pat(4, 2, &[&[1, 0], &[1, 1]]);
        let z = build_layered(&flat, 2, &cfg).unwrap();
        z.verify_restricted(&flat).unwrap();

        assert!(matches!(
            build_layered(&pat(4, 1, &[&[2], &[3]]), 2, &cfg),
            Err(Error::Wrapping { .. })
        ));
    }

    #[test]
    fn onemodr_small_patterns() {
        let cfg = OnemodrConfig::default();
        for p in [
            pat(4, 1, &[&[0]]),
            k2(4),
            k2(6),
            pat(4, 2, &[&[0, 1], &[1, 1]]),
            pat(6, 2, &[&[0, 0], &[0, 1], &[1, 1]]),
        ] {
            let r = p.size() as u64;
            let c = onemodr_cover(&p, r, &cfg).unwrap();
            assert!(c.verify_uniform(1, r).unwrap().passed, "{}", p.to_json());
        }
    }

    #[test]
    fn coils() {
        let mut b = Budget::seconds(10.0);
        assert_eq!(find_coil(4, 6, &mut b).unwrap().0, 2);
        assert_eq!(find_coil(6, 6, &mut b).unwrap().0, 3);
        assert_eq!(find_coil(8, 6, &mut b).unwrap().0, 4);
        let wraps = pat(4, 1, &[&[3], &[0]]);
        let e = embed_nonwrapping(&wraps, 6, &mut b).unwrap();
        assert_eq!(e.pattern.dim(), 2);
        assert!(does_not_wrap(&e.pattern));
        assert!(embed_nonwrapping(&pat(5, 1, &[&[0]]), 6, &mut b).is_err());
    }

    #[test]
    fn packability_domino() {
        let rep = packability_report(&k2(4), &OnemodrConfig::default(), &[1, 2], 10.0).unwrap();
        assert!(rep.premises_hold);
        assert_eq!(rep.packings[0].verdict, Verdict::Solved);
        assert_eq!(rep.packings[1].copies, 8);
        let tri = pat(4, 1, &[&[0], &[1], &[2]]);
        assert!(matches!(
            packability_report(&tri, &OnemodrConfig::default(), &[], 1.0),
            Err(Error::BaseCondition(_))
        ));
    }
}
