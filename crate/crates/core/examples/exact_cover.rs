//! Perfect packings and edge decompositions by exact cover.
//!
//! Run: cargo run --example exact_cover

use torus_packing::budget::Budget;
use torus_packing::graph::SimpleGraph;
use torus_packing::packsearch::{pack_vertices, solve_edge_cover, CopyMode};
use torus_packing::torus::{Ambient, Pattern, Torus, TorusVertex};

fn main() -> torus_packing::error::Result<()> {
    let host = Ambient::Torus(Torus::new(4, 2)?);
    let square = Pattern::new(
        host,
        [[0, 0], [0, 1], [1, 0], [1, 1]].map(|c| TorusVertex::new(c.to_vec())),
    )?;
    let packing = pack_vertices(&square, &host, CopyMode::Induced, &mut Budget::seconds(10.0))?;
    println!("squares in C_4^2: {:?}, {} copies", packing.verdict, packing.placements.len());

    let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]);
    let edges = solve_edge_cover(&path, 3, &mut Budget::seconds(10.0))?;
    println!("2-edge paths decomposing Q_3: {:?}, {} copies", edges.verdict, edges.copies.len());
    Ok(())
}
