//! Writes SVG and DOT drawings of the bend examples, the box pattern and H_5.
//!
//! Run: cargo run --example figures [-- out_dir]

use std::path::PathBuf;

use torus_packing::cubeedge::build_h5;
use torus_packing::figure::{bend_examples, emit_figure, Artifact, Format};
use torus_packing::oddcounter::{build_odd_h, OddParams};

fn main() -> torus_packing::error::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut artifacts: Vec<(String, Artifact)> = bend_examples()?
        .into_iter()
        .enumerate()
        .map(|(i, a)| (format!("bend{i}"), a))
        .collect();
    artifacts.push(("odd_h".into(), Artifact::OddH(build_odd_h(&OddParams::new(3, 5)?)?)));
    artifacts.push(("h5".into(), Artifact::Cube(build_h5())));
    for (name, artifact) in &artifacts {
        for (format, ext) in [(Format::Svg, "svg"), (Format::Dot, "dot")] {
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, emit_figure(artifact, format)?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
