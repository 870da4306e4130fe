//! The full packability pipeline: both covers verified in a common
//! dimension, then explicit perfect packings found by exact cover.
//!
//! Run: cargo run --release --example packability_pipeline [-- cycle]
//! With `cycle` the pattern is the whole 4-cycle, which wraps and is first
//! re-embedded as a non-wrapping induced copy.

use torus_packing::onemodr::{packability_report, OnemodrConfig};
use torus_packing::torus::{Ambient, Pattern, Torus, TorusVertex};

fn main() -> torus_packing::error::Result<()> {
    let cycle = std::env::args().nth(1).as_deref() == Some("cycle");
    let coords: &[u32] = if cycle { &[0, 1, 2, 3] } else { &[0, 1] };
    let pattern = Pattern::new(
        Ambient::Torus(Torus::new(4, 1)?),
        coords.iter().map(|&c| TorusVertex::new(vec![c])),
    )?;
    let cfg = OnemodrConfig {
        check_copies: !cycle,
        ..OnemodrConfig::default()
    };
    let report = packability_report(&pattern, &cfg, &[1, 2], 30.0)?;
    println!("re-embedded: {}", report.embedding.is_some());
    println!(
        "r-cover: dim {} verified {}; (1 mod r)-cover: dim {} verified {}",
        report.r_cover.dim, report.r_cover.verified, report.onemodr_cover.dim, report.onemodr_cover.verified
    );
    for attempt in &report.packings {
        println!("C_4^{}: {:?} with {} copies", attempt.dim, attempt.verdict, attempt.copies);
    }
    println!("{}", report.conclusion);
    Ok(())
}
