//! The `torpack` command line: JSON in, JSON (or DOT/SVG) out.
//!
//! Exit status: 0 for a verified positive result, 1 for a verified negative
//! result (an obstruction certificate, an infeasible packing, a failed weight
//! check), 2 for errors and inconclusive searches.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::budget::Budget;
use crate::covers::{translate_cover, CoverJson, CoverMultiset};
use crate::cubeedge::{
    build_hk, edge_obstruction_certificate, hk_properties, stiffness_brute, stiffness_ordering,
    validate_stiffness_ordering, CubeSubgraph,
};
use crate::error::{Error, Result};
use crate::figure::{bend_examples, emit_figure, Artifact, Format};
use crate::oddcounter::{build_odd_h, cycle_line_oracle, obstruction_certificate, OddParams};
use crate::onemodr::{onemodr_traced, packability_report, OnemodrConfig, Tracer};
use crate::packsearch::{pack_vertices, solve_edge_cover, CopyMode, Verdict};
use crate::torus::{base_conditions, does_not_wrap, Ambient, Pattern, TorusVertex};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "torpack", version, about = "Perfect packings of torus powers and hypercubes")]
pub struct Cli {
    /// Wall-clock budget for searches, in seconds.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub budget_seconds: f64,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a pattern file.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Build or verify covers.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// End-to-end packability pipeline.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Non-packability certificates for torus powers.
    #[command(subcommand)]
    Counterexample(CounterexampleCmd),
    /// Hypercube edge-decomposition obstructions.
    #[command(subcommand)]
    Cube(CubeCmd),
    /// Exact-cover packing searches.
    #[command(subcommand)]
    Pack(PackCmd),
    /// Independent exhaustive oracles.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Render a construction as DOT or SVG.
    Figure(FigureArgs),
}

#[derive(Debug, Subcommand)]
pub enum PatternCmd {
    Validate {
        #[arg(long)]
        pattern: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CoverCmd {
    /// All translates of a pattern: an exact |V(H)|-cover.
    Translates {
        #[arg(long)]
        pattern: PathBuf,
    },
    /// A verified (1 mod r)-cover by restricted copies.
    Onemodr {
        #[arg(long)]
        pattern: PathBuf,
        /// Defaults to |V(H)|.
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
    },
    /// Check every vertex weight of a cover file.
    Verify {
        #[arg(long)]
        cover: PathBuf,
        /// Required weight (residue when a modulus is given).
        #[arg(long)]
        weight: i64,
        /// Check weights mod this; omit for exact weights.
        #[arg(long)]
        modulus: Option<u64>,
        /// Also replay provenance against this pattern.
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PipelineCmd {
    Pack {
        #[arg(long)]
        pattern: PathBuf,
        /// Dimensions in which to search an explicit packing.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        pack_dims: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleCmd {
    Odd {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        /// Use this t, accepted under the weaker bound a^t <= b^2.
        #[arg(long)]
        t_override: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CubeCmd {
    /// Build H_k.
    Build {
        #[arg(long)]
        k: usize,
    },
    /// Stiffness ordering, plus exhaustive embeddings into Q_{brute-dim}.
    Stiff {
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Use this subgraph instead of H_k.
        #[arg(long)]
        cube: Option<PathBuf>,
        #[arg(long)]
        brute_dim: Option<usize>,
    },
    /// Divisibility certificate against edge decompositions of Q_n.
    Obstruct {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Induced,
    Subgraph,
    TranslateOnly,
}

impl From<ModeArg> for CopyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Induced => CopyMode::Induced,
            ModeArg::Subgraph => CopyMode::Subgraph,
            ModeArg::TranslateOnly => CopyMode::TranslateOnly,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum PackCmd {
    /// Perfect vertex packing of C_k^n (or Q_n) by copies of a pattern.
    Vertices {
        #[arg(long)]
        pattern: PathBuf,
        /// Host dimension; the host has the pattern's radix.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Induced)]
        mode: ModeArg,
    },
    /// Decomposition of E(Q_n) into copies of a pattern's graph.
    Edges {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// All cycles of a given length through a vertex of C_k^n.
    Cycles {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        /// Defaults to k.
        #[arg(long)]
        length: Option<usize>,
        /// Comma-separated coordinates; defaults to the origin.
        #[arg(long, value_delimiter = ',')]
        origin: Option<Vec<u32>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Bend,
    Odd,
    Cube,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub kind: FigureKind,
    #[arg(long, default_value = "svg")]
    pub format: String,
    /// Which bend example (0 or 1).
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, default_value_t = 3)]
    pub a: u32,
    #[arg(long, default_value_t = 5)]
    pub b: u32,
    #[arg(long)]
    pub t_override: Option<u32>,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
}

/// What a command produced.
pub struct Outcome {
    pub status: i32,
    pub artifact: String,
}

fn json_outcome(status: i32, value: &impl Serialize) -> Result<Outcome> {
    Ok(Outcome {
        status,
        artifact: serde_json::to_string_pretty(value)? + "\n",
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::param(format!("{}: {e}", path.display())))
}

/// Loads a pattern, naming the file in parse diagnostics (serde reports the
/// line, column and offending field).
pub fn load_pattern(path: &Path) -> Result<Pattern> {
    Pattern::from_json(&read(path)?).map_err(|e| Error::param(format!("{}: {e}", path.display())))
}

pub fn load_cover(path: &Path) -> Result<CoverMultiset> {
    let json: CoverJson =
        serde_json::from_str(&read(path)?).map_err(|e| Error::param(format!("{}: {e}", path.display())))?;
    CoverMultiset::from_json(&json)
}

fn status_for(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Solved => EXIT_POSITIVE,
        Verdict::Infeasible => EXIT_NEGATIVE,
        Verdict::Unknown => EXIT_ERROR,
    }
}

/// Runs one command and returns its exit status and artifact.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let mut budget = Budget::seconds(cli.budget_seconds);
    match &cli.command {
        Command::Pattern(PatternCmd::Validate { pattern }) => {
            let p = load_pattern(pattern)?;
            let base = match p.ambient() {
                Ambient::Torus(t) => Some(base_conditions(&p, &t)?),
                Ambient::Cube(_) => None,
            };
            json_outcome(
                EXIT_POSITIVE,
                &json!({
                    "ambient": p.ambient(),
                    "size": p.size(),
                    "edges": p.edges().len(),
                    "does_not_wrap": matches!(p.ambient(), Ambient::Torus(_)) && does_not_wrap(&p),
                    "constant_coordinate": p.constant_coordinate(),
                    "base_conditions": base,
                }),
            )
        }
        Command::Cover(CoverCmd::Translates { pattern }) => {
            let p = load_pattern(pattern)?;
            let cover = translate_cover(&p)?;
            cover.verify_uniform(p.size() as i64, 0)?.require("translates")?;
            json_outcome(EXIT_POSITIVE, &cover.to_json())
        }
        Command::Cover(CoverCmd::Onemodr {
            pattern,
            modulus,
            max_dim,
        }) => {
            let p = load_pattern(pattern)?;
            let r = modulus.unwrap_or(p.size() as u64);
            let mut tr = Tracer::new(OnemodrConfig {
                max_dim: *max_dim,
                stage_seconds: cli.budget_seconds,
                check_copies: true,
            });
            let cover = onemodr_traced(&mut tr, &p, r)?;
            for s in tr.records() {
                eprintln!(
                    "stage {:<28} depth {} dim {:>2} placements {:>8} {} ms",
                    s.stage, s.depth, s.dim, s.placements, s.elapsed_ms
                );
            }
            json_outcome(EXIT_POSITIVE, &cover.to_json())
        }
        Command::Cover(CoverCmd::Verify {
            cover,
            weight,
            modulus,
            pattern,
        }) => {
            let c = load_cover(cover)?;
            let report = c.verify_uniform(*weight, modulus.unwrap_or(0))?;
            let replay = match pattern {
                Some(path) => Some(c.verify_restricted(&load_pattern(path)?)?),
                None => None,
            };
            let status = if report.passed { EXIT_POSITIVE } else { EXIT_NEGATIVE };
            json_outcome(status, &json!({ "weights": report, "replay": replay }))
        }
        Command::Pipeline(PipelineCmd::Pack {
            pattern,
            pack_dims,
            max_dim,
        }) => {
            let p = load_pattern(pattern)?;
            let cfg = OnemodrConfig {
                max_dim: *max_dim,
                stage_seconds: cli.budget_seconds,
                check_copies: true,
            };
            let report = packability_report(&p, &cfg, pack_dims, cli.budget_seconds)?;
            let status = if report.premises_hold { EXIT_POSITIVE } else { EXIT_ERROR };
            json_outcome(status, &report)
        }
        Command::Counterexample(CounterexampleCmd::Odd { a, b, t_override }) => {
            let params = match t_override {
                Some(t) => OddParams::with_t(*a, *b, *t)?,
                None => OddParams::new(*a, *b)?,
            };
            let cert = obstruction_certificate(&params, &mut budget)?;
            json_outcome(if cert.valid { EXIT_NEGATIVE } else { EXIT_ERROR }, &cert)
        }
        Command::Cube(CubeCmd::Build { k }) => {
            let h = build_hk(*k)?;
            json_outcome(EXIT_POSITIVE, &json!({ "graph": h, "properties": hk_properties(&h) }))
        }
        Command::Cube(CubeCmd::Stiff { k, cube, brute_dim }) => {
            let h = match cube {
                Some(path) => CubeSubgraph::from_json(&read(path)?)
                    .map_err(|e| Error::param(format!("{}: {e}", path.display())))?,
                None => build_hk(*k)?,
            };
            let ordering = stiffness_ordering(&h)?;
            let ordering_valid = ordering.complete && validate_stiffness_ordering(&h, &ordering);
            let brute = match brute_dim {
                Some(n) => Some(stiffness_brute(&h, *n, &mut budget)?),
                None => None,
            };
            let verdict = match &brute {
                Some(b) if b.complete && !b.partition_preserving => "not stiff",
                Some(b) if b.complete => "stiff: ordering and exhaustive search agree",
                Some(_) if ordering_valid => "ordering-certified (exhaustive search out of budget)",
                _ if ordering_valid => "ordering-certified",
                _ => "unknown",
            };
            let status = match verdict {
                "not stiff" => EXIT_NEGATIVE,
                "unknown" => EXIT_ERROR,
                _ => EXIT_POSITIVE,
            };
            json_outcome(
                status,
                &json!({
                    "graph": h,
                    "ordering": ordering,
                    "ordering_valid": ordering_valid,
                    "brute": brute,
                    "verdict": verdict,
                }),
            )
        }
        Command::Cube(CubeCmd::Obstruct { k, n_max }) => {
            let cert = edge_obstruction_certificate(*k, *n_max)?;
            json_outcome(if cert.valid { EXIT_NEGATIVE } else { EXIT_ERROR }, &cert)
        }
        Command::Pack(PackCmd::Vertices { pattern, n, mode }) => {
            let p = load_pattern(pattern)?;
            let host = p.ambient().with_dim(*n)?;
            let result = pack_vertices(&p, &host, (*mode).into(), &mut budget)?;
            json_outcome(status_for(result.verdict), &result)
        }
        Command::Pack(PackCmd::Edges { pattern, n }) => {
            let p = load_pattern(pattern)?;
            let result = solve_edge_cover(&p.graph(), *n, &mut budget)?;
            json_outcome(status_for(result.verdict), &result)
        }
        Command::Oracle(OracleCmd::Cycles { k, n, length, origin }) => {
            let origin = match origin {
                Some(c) => TorusVertex::new(c.clone()),
                None => TorusVertex::zeros(*n),
            };
            let report = cycle_line_oracle(*k, *n, length.unwrap_or(*k as usize), &origin, &mut budget)?;
            json_outcome(EXIT_POSITIVE, &report)
        }
        Command::Figure(args) => {
            let format: Format = args.format.parse()?;
            let artifact = match args.kind {
                FigureKind::Bend => bend_examples()?
                    .into_iter()
                    .nth(args.index)
                    .ok_or_else(|| Error::param(format!("no bend example {}", args.index)))?,
                FigureKind::Odd => {
                    let params = match args.t_override {
                        Some(t) => OddParams::with_t(args.a, args.b, t)?,
                        None => OddParams::new(args.a, args.b)?,
                    };
                    Artifact::OddH(build_odd_h(&params)?)
                }
                FigureKind::Cube => Artifact::Cube(build_hk(args.k)?),
            };
            Ok(Outcome {
                status: EXIT_POSITIVE,
                artifact: emit_figure(&artifact, format)?,
            })
        }
    }
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partial artifact.
fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Parses arguments, runs the command, writes the artifact, and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_POSITIVE };
        }
    };
    let outcome = execute(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => write_atomically(path, &o.artifact)?,
            None => print!("{}", o.artifact),
        }
        Ok(o.status)
    });
    match outcome {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

