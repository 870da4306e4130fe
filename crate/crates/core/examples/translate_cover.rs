//! All translates of a pattern cover every torus vertex exactly |V(H)| times.
//!
//! Run: cargo run --example translate_cover

use torus_packing::covers::translate_cover;
use torus_packing::torus::{Ambient, Pattern, Torus, TorusVertex};

fn main() -> torus_packing::error::Result<()> {
    let t_tetromino = Pattern::new(
        Ambient::Torus(Torus::new(6, 2)?),
        [[0, 0], [1, 0], [2, 0], [1, 1]].map(|c| TorusVertex::new(c.to_vec())),
    )?;
    let cover = translate_cover(&t_tetromino)?;
    let report = cover.verify_uniform(t_tetromino.size() as i64, 0)?;
    println!(
        "{} translates of a {}-vertex pattern in {}: every weight is {} -> {}",
        cover.len(),
        t_tetromino.size(),
        cover.torus(),
        t_tetromino.size(),
        if report.passed { "verified" } else { "FAILED" }
    );
    Ok(())
}
