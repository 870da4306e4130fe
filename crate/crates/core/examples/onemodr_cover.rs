//! A (1 mod r)-cover by restricted copies, with its construction stages.
//!
//! Run: cargo run --release --example onemodr_cover

use torus_packing::onemodr::{onemodr_traced, OnemodrConfig, Tracer};
use torus_packing::torus::{Ambient, Pattern, Torus, TorusVertex};

fn main() -> torus_packing::error::Result<()> {
    let l_tromino = Pattern::new(
        Ambient::Torus(Torus::new(6, 2)?),
        [[0, 0], [0, 1], [1, 0]].map(|c| TorusVertex::new(c.to_vec())),
    )?;
    let r = 3;
    let mut tracer = Tracer::new(OnemodrConfig::default());
    let cover = onemodr_traced(&mut tracer, &l_tromino, r)?;
    for s in tracer.records() {
        println!("{:<16} depth {} dim {:>2} placements {:>7}", s.stage, s.depth, s.dim, s.placements);
    }
    let replay = cover.verify_restricted(&l_tromino)?;
    println!(
        "(1 mod {r})-cover in {} with {} placements; {} replayed to induced copies",
        cover.torus(),
        cover.len(),
        replay.induced_copies
    );
    Ok(())
}
