//! DOT and SVG renderings of bends, the odd-`k` box pattern, and `H_k`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cubeedge::{cube_coords, edge_direction, CubeSubgraph};
use crate::error::{Error, Result};
use crate::oddcounter::OddInstance;
use crate::torus::{Ambient, Pattern, Torus, TorusVertex};
use crate::transforms::{apply_bend, Bend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dot,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Format::Dot),
            "svg" => Ok(Format::Svg),
            other => Err(Error::param(format!("unsupported figure format `{other}`"))),
        }
    }
}

/// Something that can be drawn.
#[derive(Debug, Clone)]
pub enum Artifact {
    /// A pattern next to its bend image.
    Bend { pattern: Pattern, bend: Bend },
    /// The box pattern in `C_{ab}^2`.
    OddH(OddInstance),
    /// A spanning subgraph of a hypercube; missing edges are drawn dashed.
    Cube(CubeSubgraph),
}

/// The two bends of the standard illustration: `Y = {0,1,2} ⊆ C_4^1` bent
/// by `(1,2,1)` into `C_4^2`, and an L-shaped `X ⊆ C_4^2` bent by `(2,2,1)`
/// into `C_4^3`.
pub fn bend_examples() -> Result<Vec<Artifact>> {
    let y = Pattern::new(
        Ambient::Torus(Torus::new(4, 1)?),
        (0..3).map(|v| TorusVertex::new(vec![v])),
    )?;
    let x = Pattern::new(
        Ambient::Torus(Torus::new(4, 2)?),
        [[0, 0], [0, 1], [0, 2], [1, 2], [2, 2], [2, 1]].map(|c| TorusVertex::new(c.to_vec())),
    )?;
    Ok(vec![
        Artifact::Bend {
            pattern: y,
            bend: Bend { i: 1, j: 2, s: 1, n: 2 },
        },
        Artifact::Bend {
            pattern: x,
            bend: Bend { i: 2, j: 2, s: 1, n: 3 },
        },
    ])
}

pub fn emit_figure(artifact: &Artifact, format: Format) -> Result<String> {
    match artifact {
        Artifact::Bend { pattern, bend } => {
            let image = apply_bend(bend, pattern)?;
            let title = format!("({},{},{})-bend into C_{}^{}", bend.i, bend.j, bend.s, image.torus()?.k(), bend.n);
            let panels = [("H", pattern, "#4c72b0"), ("bend of H", &image, "#dd8452")];
            match format {
                Format::Svg => grid_svg(&title, &panels),
                Format::Dot => grid_dot(&title, &panels),
            }
        }
        Artifact::OddH(inst) => odd_h(inst, format),
        Artifact::Cube(h) => Ok(match format {
            Format::Svg => cube_svg(h),
            Format::Dot => cube_dot(h),
        }),
    }
}

const CELL: usize = 24;
const GAP: usize = 20;

/// Panels of a torus pattern of dimension at most 3; dimension 3 is drawn
/// as one `k×k` grid per value of coordinate 3.
fn slices(p: &Pattern) -> Result<(Torus, Vec<Vec<TorusVertex>>)> {
    let t = p.torus()?;
    let k = t.k();
    match p.dim() {
        1 | 2 => Ok((t, vec![p.vertices().to_vec()])),
        3 => Ok((
            t,
            (0..k)
                .map(|z| p.vertices().iter().filter(|v| v.coords()[2] == z).cloned().collect())
                .collect(),
        )),
        d => Err(Error::param(format!("cannot draw a pattern of dimension {d}"))),
    }
}

fn grid_svg(title: &str, panels: &[(&str, &Pattern, &str)]) -> Result<String> {
    let mut body = String::new();
    let mut x0 = GAP;
    let mut height = 0;
    for (label, p, colour) in panels {
        let (t, layers) = slices(p)?;
        let k = t.k() as usize;
        let rows = if p.dim() == 1 { 1 } else { k };
        for (z, layer) in layers.iter().enumerate() {
            let caption = if layers.len() > 1 {
                format!("{label}, v3={z}")
            } else {
                label.to_string()
            };
            let _ = writeln!(body, r#"<text x="{x0}" y="{}" font-size="12">{caption}</text>"#, GAP + 26);
            let y0 = GAP + 34;
            for r in 0..rows {
                for c in 0..k {
                    let coords: Vec<u32> = match p.dim() {
                        1 => vec![c as u32],
                        2 => vec![c as u32, r as u32],
                        _ => vec![c as u32, r as u32, z as u32],
                    };
                    let filled = layer.iter().any(|v| v.coords() == coords.as_slice());
                    // Coordinate 2 grows upwards.
                    let y = y0 + (rows - 1 - r) * CELL;
                    let _ = writeln!(
                        body,
                        r##"<rect x="{}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888"/>"##,
                        x0 + c * CELL,
                        if filled { colour } else { "white" }
                    );
                }
            }
            height = height.max(y0 + rows * CELL);
            x0 += k * CELL + GAP;
        }
        x0 += GAP;
    }
    Ok(svg_document(title, x0, height + GAP, &body))
}

fn svg_document(title: &str, width: usize, height: usize, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         font-family=\"sans-serif\">\n<title>{title}</title>\n\
         <text x=\"{GAP}\" y=\"{}\" font-size=\"14\">{title}</text>\n{body}</svg>\n",
        GAP
    )
}

fn vertex_label(v: &TorusVertex) -> String {
    v.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn grid_dot(title: &str, panels: &[(&str, &Pattern, &str)]) -> Result<String> {
    let mut out = format!("graph figure {{\n  label=\"{title}\";\n  node [shape=box, style=filled];\n");
    for (n, (label, p, colour)) in panels.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{n} {{\n    label=\"{label}\";");
        for v in p.vertices() {
            let _ = writeln!(out, "    \"p{n}_{0}\" [label=\"{0}\", fillcolor=\"{colour}\"];", vertex_label(v));
        }
        for (a, b) in p.edges() {
            let _ = writeln!(
                out,
                "    \"p{n}_{}\" -- \"p{n}_{}\";",
                vertex_label(&p.vertices()[*a]),
                vertex_label(&p.vertices()[*b])
            );
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    Ok(out)
}

fn odd_h(inst: &OddInstance, format: Format) -> Result<String> {
    let a = inst.params.a as usize;
    let k = inst.params.k() as usize;
    let title = format!(
        "H for a={}, b={}, t={} in C_{k}^2 ({} boxes)",
        inst.params.a,
        inst.params.b,
        inst.params.t,
        inst.cross_boxes.len() + inst.extra_boxes.len()
    );
    let kinds: Vec<(&(u32, u32), &str, &str)> = inst
        .cross_boxes
        .iter()
        .map(|b| (b, "cross", "#4c72b0"))
        .chain(inst.extra_boxes.iter().map(|b| (b, "extra", "#55a868")))
        .collect();
    match format {
        Format::Svg => {
            let mut body = String::new();
            let y0 = GAP + 10;
            for (&(x, y), _, colour) in &kinds {
                let _ = writeln!(
                    body,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{colour}"/>"#,
                    GAP + x as usize * CELL / 2,
                    y0 + (k - a - y as usize) * CELL / 2,
                    a * CELL / 2,
                    a * CELL / 2
                );
            }
            for i in 0..=k {
                let (w, colour) = if i % a == 0 { (2, "#333") } else { (1, "#ccc") };
                let p = i * CELL / 2;
                let end = k * CELL / 2;
                let _ = writeln!(
                    body,
                    r#"<line x1="{}" y1="{y0}" x2="{}" y2="{}" stroke="{colour}" stroke-width="{w}"/>"#,
                    GAP + p,
                    GAP + p,
                    y0 + end
                );
                let _ = writeln!(
                    body,
                    r#"<line x1="{GAP}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="{w}"/>"#,
                    y0 + p,
                    GAP + end,
                    y0 + p
                );
            }
            Ok(svg_document(&title, 2 * GAP + k * CELL / 2, y0 + k * CELL / 2 + GAP, &body))
        }
        Format::Dot => {
            let mut out = format!("graph odd_h {{\n  label=\"{title}\";\n  node [shape=square, style=filled];\n");
            for (&(x, y), kind, colour) in &kinds {
                let _ = writeln!(
                    out,
                    "  \"B_{x}_{y}\" [label=\"{x},{y}\", fillcolor=\"{colour}\", kind={kind}, pos=\"{},{}!\"];",
                    x / inst.params.a,
                    y / inst.params.a
                );
            }
            out.push_str("}\n");
            Ok(out)
        }
    }
}

fn bits(n: usize, v: u64) -> String {
    cube_coords(n, v).iter().map(|b| char::from(b'0' + b)).collect()
}

fn cube_dot(h: &CubeSubgraph) -> String {
    let n = h.n();
    let mut out = format!("graph H_{n} {{\n  node [shape=circle, fontsize=9];\n");
    for v in 0..1u64 << n {
        let _ = writeln!(out, "  \"{}\" [degree={}];", bits(n, v), h.degree(v));
    }
    let full = CubeSubgraph::full(n).expect("dimension already valid");
    for &(u, v) in full.edges() {
        let dir = edge_direction(n, u, v).expect("cube edge");
        let style = if h.has_edge(u, v) {
            String::new()
        } else {
            ", style=dashed, color=red".into()
        };
        let _ = writeln!(out, "  \"{}\" -- \"{}\" [direction={dir}{style}];", bits(n, u), bits(n, v));
    }
    out.push_str("}\n");
    out
}

/// Vertices in columns by Hamming weight; missing edges dashed red.
fn cube_svg(h: &CubeSubgraph) -> String {
    let n = h.n();
    let mut columns: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for v in 0..1u64 << n {
        columns[v.count_ones() as usize].push(v);
    }
    let tallest = columns.iter().map(Vec::len).max().unwrap_or(1);
    let (dx, dy) = (120usize, 28usize);
    let height = tallest * dy + 3 * GAP;
    let pos = |v: u64| {
        let col = &columns[v.count_ones() as usize];
        let row = col.iter().position(|&w| w == v).expect("vertex in its column");
        let offset = (tallest - col.len()) * dy / 2;
        (GAP + 30 + v.count_ones() as usize * dx, 2 * GAP + offset + row * dy)
    };
    let mut body = String::new();
    let full = CubeSubgraph::full(n).expect("dimension already valid");
    for &(u, v) in full.edges() {
        let ((x1, y1), (x2, y2)) = (pos(u), pos(v));
        let style = if h.has_edge(u, v) {
            r##"stroke="#999" stroke-width="0.6""##
        } else {
            r##"stroke="#c44e52" stroke-width="2" stroke-dasharray="5,3""##
        };
        let _ = writeln!(body, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {style}/>"#);
    }
    for v in 0..1u64 << n {
        let (x, y) = pos(v);
        let fill = if h.degree(v) < n { "#c44e52" } else { "#4c72b0" };
        let _ = writeln!(body, r#"<circle cx="{x}" cy="{y}" r="4" fill="{fill}"/>"#);
        let _ = writeln!(body, r#"<text x="{}" y="{}" font-size="9">{}</text>"#, x + 6, y - 4, bits(n, v));
    }
    let title = format!("H_{n}: {} of {} edges of Q_{n}", h.edge_count(), full.edge_count());
    svg_document(&title, 2 * GAP + 60 + n * dx, height, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubeedge::build_h5;
    use crate::oddcounter::{build_odd_h, OddParams};

    #[test]
    fn bend_figures() {
        for art in bend_examples().unwrap() {
            let svg = emit_figure(&art, Format::Svg).unwrap();
            assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
            let dot = emit_figure(&art, Format::Dot).unwrap();
            assert!(dot.contains("cluster_1"));
        }
        // The 3-dimensional image is drawn as four slices, two of them empty.
        let svg = emit_figure(&bend_examples().unwrap()[1], Format::Svg).unwrap();
        assert!(svg.contains("v3=3"));
    }

    #[test]
    fn odd_h_figure() {
        let inst = build_odd_h(&OddParams::new(3, 5).unwrap()).unwrap();
        let svg = emit_figure(&Artifact::OddH(inst.clone()), Format::Svg).unwrap();
        assert_eq!(svg.matches("<rect").count(), 9);
        let dot = emit_figure(&Artifact::OddH(inst), Format::Dot).unwrap();
        assert_eq!(dot.matches("kind=cross").count(), 9);
    }

    #[test]
    fn cube_figure() {
        let h = build_h5();
        let dot = emit_figure(&Artifact::Cube(h.clone()), Format::Dot).unwrap();
        assert_eq!(dot.matches("style=dashed").count(), 5);
        let svg = emit_figure(&Artifact::Cube(h), Format::Svg).unwrap();
        assert_eq!(svg.matches("stroke-dasharray").count(), 5);
        assert_eq!(svg.matches("<circle").count(), 32);
        assert!("png".parse::<Format>().is_err());
    }
}
