//! End-to-end constructions across modules.

use torus_packing::budget::Budget;
use torus_packing::error::Error;
use torus_packing::onemodr::{onemodr_cover, packability_report, OnemodrConfig};
use torus_packing::packsearch::{pack_vertices, CopyMode, Verdict};
use torus_packing::torus::{check_perfect_packing, lift_packing, Ambient, Pattern, Torus, TorusVertex};

fn pattern(k: u32, m: usize, vs: &[&[u32]]) -> Pattern {
    Pattern::new(
        Ambient::Torus(Torus::new(k, m).unwrap()),
        vs.iter().map(|v| TorusVertex::new(v.to_vec())),
    )
    .unwrap()
}

#[test]
fn onemodr_covers_for_assorted_patterns() {
    let cases = [
        (pattern(6, 2, &[&[0, 0], &[0, 1], &[1, 0]]), 3),
        (pattern(6, 1, &[&[0], &[1], &[2]]), 3),
        (pattern(4, 2, &[&[0, 0], &[1, 1]]), 2),
        (pattern(6, 2, &[&[2, 0], &[2, 1]]), 2),
    ];
    for (p, r) in cases {
        let cover = onemodr_cover(&p, r, &OnemodrConfig::default()).unwrap();
        assert!(cover.verify_uniform(1, r).unwrap().passed, "{:?}", p.vertices());
        let replay = cover.verify_restricted(&p).unwrap();
        assert_eq!(replay.induced_copies, cover.len());
    }
    // 3 never divides a power of 4, so no seed multiplicity exists.
    let l4 = pattern(4, 2, &[&[0, 0], &[0, 1], &[1, 0]]);
    assert!(matches!(
        onemodr_cover(&l4, 3, &OnemodrConfig::default()),
        Err(Error::SeedUnsolvable { .. })
    ));
}

#[test]
fn wrapping_pattern_is_reembedded() {
    // The edge {3, 0} crosses the wraparound, so the pipeline first finds a
    // non-wrapping copy.
    let wrapped = pattern(4, 1, &[&[3], &[0]]);
    let report = packability_report(&wrapped, &OnemodrConfig::default(), &[1], 10.0).unwrap();
    assert!(report.embedding.is_some());
    assert!(report.premises_hold);
    assert_eq!(report.packings[0].verdict, Verdict::Solved);
}

#[test]
fn packings_lift_to_higher_dimensions() {
    let domino = pattern(4, 1, &[&[0], &[1]]);
    let host = Torus::new(4, 1).unwrap();
    let found = pack_vertices(&domino, &Ambient::Torus(host), CopyMode::Induced, &mut Budget::unlimited()).unwrap();
    let mut packing = found.placements;
    let mut t = host;
    for _ in 0..2 {
        packing = lift_packing(&t, &packing).unwrap();
        t = t.with_dim(t.dim() + 1).unwrap();
        check_perfect_packing(&t, &packing).unwrap();
    }
    assert_eq!(packing.len(), 32);
}
