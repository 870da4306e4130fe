//! Exhaustive enumeration of cycles through the origin: in C_15^2 the only
//! 15-cycles are the two coordinate lines, while C_4^2 also has squares.
//!
//! Run: cargo run --example cycle_oracle

use torus_packing::budget::Budget;
use torus_packing::oddcounter::cycle_line_oracle;
use torus_packing::torus::TorusVertex;

fn main() -> torus_packing::error::Result<()> {
    for (k, n) in [(15, 1), (15, 2), (4, 2)] {
        let report = cycle_line_oracle(k, n, k as usize, &TorusVertex::zeros(n), &mut Budget::seconds(60.0))?;
        println!(
            "C_{k}^{n}: {} cycles of length {k} through the origin, all lines: {} ({} nodes)",
            report.count, report.all_lines, report.nodes
        );
    }
    Ok(())
}
