//! Multisets of placements in a torus: algebra, weights and verification.
//!
//! A placement is stored as the sorted list of its vertex indices. Entries
//! with the same vertex set merge (weights only depend on vertex sets); the
//! merged entry keeps the provenance of the first one. When a modulus `r`
//! is set, multiplicities live in `0..r`, so `-1` is stored as `r-1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{Ambient, Pattern, Torus, TorusVertex};
use crate::transforms::{apply_sequence, is_induced_copy, Provenance, Step, TransformSeq};

/// Largest weight table built for verification.
pub const MAX_TABLE: u64 = 1 << 25;

#[derive(Debug, Clone)]
struct Entry {
    multiplicity: u64,
    provenance: Option<Provenance>,
}

/// A multiset of vertex sets in `C_k^n`, optionally reduced modulo `r`.
#[derive(Debug, Clone)]
pub struct CoverMultiset {
    torus: Torus,
    modulus: Option<u64>,
    entries: BTreeMap<Box<[u64]>, Entry>,
}

/// A borrowed view of one entry.
#[derive(Debug, Clone, Copy)]
pub struct PlacementRef<'a> {
    pub vertices: &'a [u64],
    pub multiplicity: u64,
    pub provenance: Option<&'a Provenance>,
}

impl CoverMultiset {
    pub fn new(torus: Torus, modulus: Option<u64>) -> Result<Self> {
        if modulus == Some(0) {
            return Err(Error::param("cover modulus must be positive"));
        }
        Ok(CoverMultiset {
            torus,
            modulus,
            entries: BTreeMap::new(),
        })
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    /// Number of distinct vertex sets.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of multiplicities (as stored, i.e. reduced when a modulus is set).
    pub fn total_multiplicity(&self) -> u128 {
        self.entries.values().map(|e| e.multiplicity as u128).sum()
    }

    pub fn placements(&self) -> impl Iterator<Item = PlacementRef<'_>> {
        self.entries.iter().map(|(v, e)| PlacementRef {
            vertices: v,
            multiplicity: e.multiplicity,
            provenance: e.provenance.as_ref(),
        })
    }

    fn reduce(&self, x: u128) -> u64 {
        match self.modulus {
            Some(r) => (x % r as u128) as u64,
            None => u64::try_from(x).expect("multiplicity overflow"),
        }
    }

    /// Adds `multiplicity` copies of a vertex set given by indices.
    pub fn insert_indices(
        &mut self,
        mut vertices: Vec<u64>,
        multiplicity: u64,
        provenance: Option<Provenance>,
    ) -> Result<()> {
        let n = self.torus.vertex_count();
        if let Some(&bad) = vertices.iter().find(|&&i| i >= n) {
            return Err(Error::param(format!("vertex index {bad} outside {}", self.torus)));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("placement repeats a vertex"));
        }
        self.insert_sorted(vertices.into_boxed_slice(), multiplicity as u128, provenance);
        Ok(())
    }

    /// Adds `multiplicity` copies of a vertex set.
    pub fn insert(
        &mut self,
        vertices: &[TorusVertex],
        multiplicity: u64,
        provenance: Option<Provenance>,
    ) -> Result<()> {
        let mut idx = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !self.torus.contains(v) {
                return Err(Error::param(format!("vertex {v} is not in {}", self.torus)));
            }
            idx.push(self.torus.index(v.coords()));
        }
        self.insert_indices(idx, multiplicity, provenance)
    }

    fn insert_sorted(&mut self, key: Box<[u64]>, multiplicity: u128, provenance: Option<Provenance>) {
        let m = self.reduce(multiplicity);
        if m == 0 {
            return;
        }
        let modulus = self.modulus;
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(Entry {
                    multiplicity: m,
                    provenance,
                });
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().multiplicity as u128 + m as u128;
                let total = match modulus {
                    Some(r) => (sum % r as u128) as u64,
                    None => u64::try_from(sum).expect("multiplicity overflow"),
                };
                if total == 0 {
                    slot.remove();
                } else {
                    slot.get_mut().multiplicity = total;
                }
            }
        }
    }

    /// Every multiplicity multiplied by `t`.
    pub fn scale(&self, t: u64) -> CoverMultiset {
        let mut out = CoverMultiset {
            entries: BTreeMap::new(),
            ..*self
        };
        for (k, e) in &self.entries {
            out.insert_sorted(k.clone(), e.multiplicity as u128 * t as u128, e.provenance.clone());
        }
        out
    }

    /// Pointwise sum of multiplicities.
    pub fn add(&self, other: &CoverMultiset) -> Result<CoverMultiset> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &CoverMultiset) -> Result<()> {
        if self.torus != other.torus {
            return Err(Error::param(format!(
                "cannot add covers of {} and {}",
                self.torus, other.torus
            )));
        }
        if self.modulus != other.modulus {
            return Err(Error::param("cannot add covers with different moduli"));
        }
        for (k, e) in &other.entries {
            self.insert_sorted(k.clone(), e.multiplicity as u128, e.provenance.clone());
        }
        Ok(())
    }

    /// The same cover with multiplicities reduced modulo `r`.
    pub fn reduce_mod(&self, r: u64) -> Result<CoverMultiset> {
        if let Some(old) = self.modulus {
            if old % r != 0 {
                return Err(Error::param(format!(
                    "cannot reduce a mod-{old} cover modulo {r}"
                )));
            }
        }
        let mut out = CoverMultiset::new(self.torus, Some(r))?;
        for (k, e) in &self.entries {
            out.insert_sorted(k.clone(), e.multiplicity as u128, e.provenance.clone());
        }
        Ok(out)
    }

    /// Applies one step to every placement; multiplicities are preserved and
    /// provenance chains are extended.
    pub fn map_step(&self, step: &Step) -> Result<CoverMultiset> {
        let k = self.torus.k();
        let dim = step.out_dim(k, self.torus.dim())?;
        let target = self.torus.with_dim(dim)?;
        let mut out = CoverMultiset::new(target, self.modulus)?;
        let mut coords = vec![0; self.torus.dim()];
        let mut image = Vec::with_capacity(dim);
        for (key, e) in &self.entries {
            let mut mapped = Vec::with_capacity(key.len());
            for &i in key.iter() {
                self.torus.decode_into(i, &mut coords);
                step.map_vertex(k, &coords, &mut image)?;
                mapped.push(target.index(&image));
            }
            mapped.sort_unstable();
            let prov = e
                .provenance
                .as_ref()
                .map(|p| p.then_unchecked(step.clone(), dim));
            out.insert_sorted(mapped.into_boxed_slice(), e.multiplicity as u128, prov);
        }
        Ok(out)
    }

    /// `𝒳 × y`: every placement extended by the coordinates of `y`.
    pub fn product_with_layer(&self, y: &TorusVertex) -> Result<CoverMultiset> {
        let mut out = self.clone();
        for (offset, &c) in y.coords().iter().enumerate() {
            out = out.map_step(&Step::insert(self.torus.dim() + offset + 1, c))?;
        }
        Ok(out)
    }

    /// Weight of one vertex (reduced when a modulus is set).
    pub fn weight(&self, v: &TorusVertex) -> Result<u64> {
        if !self.torus.contains(v) {
            return Err(Error::param(format!("vertex {v} is not in {}", self.torus)));
        }
        let idx = self.torus.index(v.coords());
        let w: u128 = self
            .entries
            .iter()
            .filter(|(k, _)| k.binary_search(&idx).is_ok())
            .map(|(_, e)| e.multiplicity as u128)
            .sum();
        Ok(self.reduce(w))
    }

    /// Weights of all vertices, indexed like the torus.
    pub fn weights(&self) -> Result<Vec<u64>> {
        let n = self.torus.vertex_count();
        if n > MAX_TABLE {
            return Err(Error::Resource(format!(
                "weight table for {} has {n} entries (cap {MAX_TABLE})",
                self.torus
            )));
        }
        let mut table = vec![0u64; n as usize];
        for (k, e) in &self.entries {
            for &i in k.iter() {
                let slot = &mut table[i as usize];
                *slot = match self.modulus {
                    Some(r) => ((*slot as u128 + e.multiplicity as u128) % r as u128) as u64,
                    None => slot
                        .checked_add(e.multiplicity)
                        .expect("weight overflow"),
                };
            }
        }
        Ok(table)
    }

    /// Checks that every vertex in layer `j` has weight `≡ a[j] (mod r)`;
    /// `r = 0` demands exact weights.
    pub fn verify_layered(&self, a: &[i64], r: u64) -> Result<LayeredReport> {
        let k = self.torus.k() as usize;
        if a.len() != k {
            return Err(Error::param(format!(
                "layer vector has length {}, expected k = {k}",
                a.len()
            )));
        }
        if self.torus.dim() == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        match (self.modulus, r) {
            (Some(m), 0) => {
                return Err(Error::param(format!(
                    "exact weights requested from a mod-{m} cover"
                )))
            }
            (Some(m), r) if m % r != 0 => {
                return Err(Error::param(format!(
                    "mod-{r} weights requested from a mod-{m} cover"
                )))
            }
            _ => {}
        }
        let expected: Vec<u64> = a
            .iter()
            .map(|&x| {
                if r == 0 {
                    u64::try_from(x).map_err(|_| Error::param("negative exact weight"))
                } else {
                    Ok(x.rem_euclid(r as i64) as u64)
                }
            })
            .collect::<Result<_>>()?;
        let table = self.weights()?;
        let layer_size = table.len() / k;
        let failure = table.iter().enumerate().find_map(|(i, &w)| {
            let layer = i / layer_size;
            let got = if r == 0 { w } else { w % r };
            (got != expected[layer]).then(|| WeightFailure {
                vertex: self.torus.vertex(i as u64).coords().to_vec(),
                layer: layer as u32,
                weight: got,
                expected: expected[layer],
            })
        });
        Ok(LayeredReport {
            passed: failure.is_none(),
            modulus: r,
            target: a.to_vec(),
            checked: table.len() as u64,
            failure,
        })
    }

    /// Checks that every vertex has weight `≡ a (mod r)` (`r = 0`: exactly `a`).
    pub fn verify_uniform(&self, a: i64, r: u64) -> Result<LayeredReport> {
        if self.torus.dim() == 0 {
            // C_k^0 is one vertex; treat it as a single layer.
            let w = self.weights()?[0];
            let expected = if r == 0 { a as u64 } else { a.rem_euclid(r as i64) as u64 };
            let got = if r == 0 { w } else { w % r };
            return Ok(LayeredReport {
                passed: got == expected,
                modulus: r,
                target: vec![a],
                checked: 1,
                failure: (got != expected).then(|| WeightFailure {
                    vertex: Vec::new(),
                    layer: 0,
                    weight: got,
                    expected,
                }),
            });
        }
        self.verify_layered(&vec![a; self.torus.k() as usize], r)
    }

    /// Replays every placement's provenance on `pattern` and checks that it
    /// reproduces the stored vertex set as an induced copy.
    pub fn verify_restricted(&self, pattern: &Pattern) -> Result<RestrictedReport> {
        let mut replayed = 0;
        let mut iso_checks = 0;
        for (key, e) in &self.entries {
            let Some(prov) = &e.provenance else {
                return Err(Error::verification(
                    "provenance",
                    "placement without provenance",
                ));
            };
            let seq = prov.to_seq();
            let copy = apply_sequence(&seq, pattern)?;
            let idx: Vec<u64> = copy
                .image
                .vertices()
                .iter()
                .map(|v| self.torus.index(v.coords()))
                .collect();
            if copy.image.dim() != self.torus.dim() || idx.as_slice() != &key[..] {
                return Err(Error::verification(
                    "provenance",
                    format!("replayed transform does not reproduce placement {key:?}"),
                ));
            }
            replayed += 1;
            if !is_induced_copy(&copy.image, pattern) {
                return Err(Error::verification(
                    "induced-copy",
                    format!("placement {key:?} is not an induced copy"),
                ));
            }
            iso_checks += 1;
        }
        Ok(RestrictedReport {
            replayed,
            induced_copies: iso_checks,
        })
    }

    pub fn to_json(&self) -> CoverJson {
        CoverJson {
            ambient: Ambient::Torus(self.torus),
            modulus: self.modulus,
            placements: self
                .entries
                .iter()
                .map(|(k, e)| PlacementJson {
                    vertices: k.iter().map(|&i| self.torus.vertex(i)).collect(),
                    multiplicity: e.multiplicity,
                    transform: e.provenance.as_ref().map(|p| p.to_seq().steps().to_vec()),
                    base_dim: e.provenance.as_ref().map(|p| p.to_seq().base_dim()),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &CoverJson) -> Result<Self> {
        let torus = json.ambient.torus()?;
        let mut out = CoverMultiset::new(torus, json.modulus)?;
        for p in &json.placements {
            let prov = match &p.transform {
                Some(steps) => {
                    let base = p.base_dim.unwrap_or(torus.dim());
                    let seq = TransformSeq::new(base, steps.clone());
                    let prov = Provenance::from_seq(&seq, torus.k())?;
                    if prov.dim() != torus.dim() {
                        return Err(Error::Dimension {
                            expected: torus.dim(),
                            found: prov.dim(),
                        });
                    }
                    Some(prov)
                }
                None => None,
            };
            out.insert(&p.vertices, p.multiplicity, prov)?;
        }
        Ok(out)
    }
}

/// `{T_w(p) : w ∈ C_k^m}`: every vertex has weight exactly `|V(p)|`.
pub fn translate_cover(p: &Pattern) -> Result<CoverMultiset> {
    let t = p.torus()?;
    if p.is_empty() {
        return Err(Error::param("translate cover of an empty pattern"));
    }
    let mut base = CoverMultiset::new(t, None)?;
    base.insert(p.vertices(), 1, Some(Provenance::root(t.dim())))?;
    all_translates(&base)
}

/// `Σ_w T_w(c)` over all shifts `w` of the ambient torus.
pub fn all_translates(c: &CoverMultiset) -> Result<CoverMultiset> {
    let t = c.torus();
    let mut out = CoverMultiset::new(t, c.modulus())?;
    for w in t.vertices() {
        out.add_assign(&c.map_step(&Step::Translate(crate::transforms::Translate { w }))?)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFailure {
    pub vertex: Vec<u32>,
    pub layer: u32,
    pub weight: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredReport {
    pub passed: bool,
    pub modulus: u64,
    pub target: Vec<i64>,
    pub checked: u64,
    pub failure: Option<WeightFailure>,
}

impl LayeredReport {
    /// Turns a failed report into a verification error tagged with `stage`.
    pub fn require(self, stage: &str) -> Result<Self> {
        match &self.failure {
            None => Ok(self),
            Some(f) => Err(Error::verification(
                stage,
                format!(
                    "vertex {:?} (layer {}) has weight {} but needs {} mod {}",
                    f.vertex, f.layer, f.weight, f.expected, self.modulus
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedReport {
    pub replayed: usize,
    pub induced_copies: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementJson {
    pub vertices: Vec<TorusVertex>,
    pub multiplicity: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Vec<Step>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverJson {
    pub ambient: Ambient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    pub placements: Vec<PlacementJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(c: &[u32]) -> TorusVertex {
        TorusVertex::new(c.to_vec())
    }

    fn c4() -> Torus {
        Torus::new(4, 1).unwrap()
    }

    fn cover(t: Torus, modulus: Option<u64>, entries: &[(&[u32], u64)]) -> CoverMultiset {
        let mut c = CoverMultiset::new(t, modulus).unwrap();
        for (vs, m) in entries {
            let vs: Vec<_> = vs.iter().map(|&x| tv(&[x])).collect();
            c.insert(&vs, *m, None).unwrap();
        }
        c
    }

    #[test]
    fn scale_examples() {
        let c = cover(c4(), None, &[(&[0, 1], 2)]);
        assert_eq!(c.scale(1).total_multiplicity(), 2);
        assert!(c.scale(0).is_empty());
        assert_eq!(c.scale(3).total_multiplicity(), 6);
        let m = c.reduce_mod(4).unwrap();
        assert_eq!(m.scale(3).total_multiplicity(), 2);
    }

    #[test]
    fn add_examples() {
        let p = cover(c4(), None, &[(&[0, 1], 1)]);
        let empty = CoverMultiset::new(c4(), None).unwrap();
        assert_eq!(p.add(&empty).unwrap().total_multiplicity(), 1);
        assert_eq!(p.add(&p).unwrap().total_multiplicity(), 2);
        let p2 = p.reduce_mod(2).unwrap();
        assert!(p2.add(&p2).unwrap().is_empty());
        assert!(p.add(&p2).is_err());
        let other = CoverMultiset::new(Torus::new(4, 2).unwrap(), None).unwrap();
        assert!(p.add(&other).is_err());
    }

    #[test]
    fn weight_examples() {
        let c = cover(c4(), None, &[(&[3, 0], 3), (&[0, 1], 2), (&[1, 2], 1)]);
        assert_eq!(c.weight(&tv(&[0])).unwrap(), 5);
        assert_eq!(c.weight(&tv(&[1])).unwrap(), 3);
        assert_eq!(c.weight(&tv(&[2])).unwrap(), 1);
        assert_eq!(c.weights().unwrap(), vec![5, 3, 1, 3]);
        let lone = cover(c4(), None, &[(&[1], 3)]);
        assert_eq!(lone.weight(&tv(&[0])).unwrap(), 0);
        assert_eq!(lone.weight(&tv(&[1])).unwrap(), 3);
    }

    #[test]
    fn translate_cover_examples() {
        let single = Pattern::new(Ambient::Torus(c4()), [tv(&[0])]).unwrap();
        let c = translate_cover(&single).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.verify_uniform(1, 0).unwrap().passed);

        let k2 = Pattern::new(Ambient::Torus(c4()), [tv(&[0]), tv(&[1])]).unwrap();
        let c = translate_cover(&k2).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.verify_uniform(2, 0).unwrap().passed);
        c.verify_restricted(&k2).unwrap();

        let l = Pattern::new(
            Ambient::Torus(Torus::new(4, 2).unwrap()),
            [tv(&[0, 0]), tv(&[0, 1]), tv(&[1, 0])],
        )
        .unwrap();
        let c = translate_cover(&l).unwrap();
        assert_eq!(c.len(), 16);
        assert!(c.weights().unwrap().iter().all(|&w| w == 3));
    }

    #[test]
    fn layered_examples() {
        let z = cover(c4(), Some(2), &[(&[3, 0], 1)]);
        assert!(z.verify_layered(&[1, 0, 0, 1], 2).unwrap().passed);
        let bad = z.verify_layered(&[1, 1, 0, 0], 2).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.failure.unwrap().vertex, vec![1]);
        assert!(z.verify_layered(&[1, 0, 0], 2).is_err());
        // -1 ≡ 1 (mod 2)
        assert!(z.verify_layered(&[1, 0, 0, -1], 2).unwrap().passed);
    }

    #[test]
    fn product_with_layer_examples() {
        let c = cover(c4(), None, &[(&[0, 1], 1)]);
        let same = c.product_with_layer(&tv(&[])).unwrap();
        assert_eq!(same.torus(), c.torus());
        let lifted = c.product_with_layer(&tv(&[2])).unwrap();
        let p = lifted.placements().next().unwrap();
        let t2 = Torus::new(4, 2).unwrap();
        let vs: Vec<_> = p.vertices.iter().map(|&i| t2.vertex(i)).collect();
        assert_eq!(vs, vec![tv(&[0, 2]), tv(&[1, 2])]);
        for v in 0..4 {
            assert_eq!(
                lifted.weight(&tv(&[v, 2])).unwrap(),
                c.weight(&tv(&[v])).unwrap()
            );
        }
    }

    #[test]
    fn json_round_trip_keeps_provenance() {
        let k2 = Pattern::new(Ambient::Torus(c4()), [tv(&[0]), tv(&[1])]).unwrap();
        let c = translate_cover(&k2).unwrap().reduce_mod(2).unwrap();
        let json = serde_json::to_string(&c.to_json()).unwrap();
        let back = CoverMultiset::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.weights().unwrap(), c.weights().unwrap());
        back.verify_restricted(&k2).unwrap();
    }
}
