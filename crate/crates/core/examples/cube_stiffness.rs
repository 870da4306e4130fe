//! H_5 is stiff: a 4-cycle closure ordering from a full-degree anchor, and an
//! exhaustive check of every embedding into Q_5.
//!
//! Run: cargo run --release --example cube_stiffness

use torus_packing::budget::Budget;
use torus_packing::cubeedge::{build_h5, hk_properties, stiffness_brute, stiffness_ordering};

fn main() -> torus_packing::error::Result<()> {
    let h = build_h5();
    let props = hk_properties(&h);
    println!("H_5: {} edges, per direction {:?}, min degree {}", props.edges, props.direction_counts, props.min_degree);
    let ord = stiffness_ordering(&h)?;
    println!("ordering from anchor {:?}: {} of {} edges", ord.anchor, ord.order.len(), h.edge_count());
    let brute = stiffness_brute(&h, 5, &mut Budget::seconds(600.0))?;
    println!(
        "{} embeddings into Q_5 (complete: {}), all direction-preserving: {}",
        brute.embeddings, brute.complete, brute.partition_preserving
    );
    Ok(())
}
