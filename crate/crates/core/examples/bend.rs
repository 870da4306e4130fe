//! Bends fold a non-wrapping pattern into a fresh coordinate and keep it an
//! induced copy.
//!
//! Run: cargo run --example bend

use torus_packing::figure::{bend_examples, Artifact};
use torus_packing::torus::does_not_wrap;
use torus_packing::transforms::{apply_bend, is_induced_copy};

fn main() -> torus_packing::error::Result<()> {
    for artifact in bend_examples()? {
        let Artifact::Bend { pattern, bend } = artifact else { continue };
        let image = apply_bend(&bend, &pattern)?;
        println!("bend {bend:?}");
        println!("  H     = {:?}", pattern.vertices());
        println!("  image = {:?}", image.vertices());
        println!(
            "  induced copy: {}, non-wrapping: {}",
            is_induced_copy(&image, &pattern),
            does_not_wrap(&image)
        );
    }
    Ok(())
}
