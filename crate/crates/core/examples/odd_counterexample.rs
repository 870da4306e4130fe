//! Certificate that no power of C_15 has a perfect packing by the 81-vertex
//! box pattern.
//!
//! Run: cargo run --example odd_counterexample [-- a b [t]]

use torus_packing::budget::Budget;
use torus_packing::oddcounter::{obstruction_certificate, OddParams};

fn main() -> torus_packing::error::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let params = match args.as_slice() {
        [a, b, t] => OddParams::with_t(*a, *b, *t)?,
        [a, b] => OddParams::new(*a, *b)?,
        _ => OddParams::new(3, 5)?,
    };
    let cert = obstruction_certificate(&params, &mut Budget::seconds(120.0))?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(())
}
