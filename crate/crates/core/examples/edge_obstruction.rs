//! No hypercube decomposes into copies of H_k, for k = 5..8.
//!
//! Run: cargo run --example edge_obstruction

use torus_packing::cubeedge::edge_obstruction_certificate;

fn main() -> torus_packing::error::Result<()> {
    for k in 5..=8 {
        let cert = edge_obstruction_certificate(k, 64)?;
        println!(
            "k={k}: {} edges, c={} per direction, divides 2^(n-1) for n<=64: {:?}, valid: {}",
            cert.edges, cert.per_direction, cert.dividing_n, cert.valid
        );
    }
    Ok(())
}
