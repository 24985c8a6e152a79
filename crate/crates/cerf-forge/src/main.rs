use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cerf_forge::doc::{parse_document, serialize_document, to_canonical_json, Document};
use cerf_forge::family_one::{
    assemble_cyclic_family, assemble_interval_family, classify_interval, interpolate_cut_systems,
    standard_family_from_trisection, CerfGraphic1,
};
use cerf_forge::family_two::{
    assemble_disk_family, classify_polygon, validate_decomposition, PolygonDecomposition,
};
use cerf_forge::invariants::{
    trisection_euler_characteristic, trisection_h1, trisection_signature, validate_trisection,
    TrisectionDiagram,
};
use cerf_forge::morse::{cut_system_from_morse, reeb_graph, SlicedMorseFunction};
use cerf_forge::render::{render_decomposition_svg, render_graphic_svg};
use cerf_forge::ribbon::{switch_census, triple_census, RibbonNeighborhood};
use cerf_forge::surface::{validate_cut_system, CutSystem, SymplecticLattice};
use cerf_forge::ValidationReport;

/// Desk toolkit for sliced surface functions, cut systems, one- and
/// two-parameter families, and trisection bookkeeping.
#[derive(Parser)]
#[command(name = "cerf-forge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and check all of its structural invariants
    Validate {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Build the Reeb graph of a sliced function document
    Reeb {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Read a cut system off a sliced function, written as a surface document
    CutSystem {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Classify every segment of a one-parameter graphic as type 0 or type 1
    ClassifyInterval {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Classify every polygon of a two-parameter decomposition
    ClassifyPolygon {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Replay an interval family and report the four-manifold record
    #[command(name = "assemble-b1")]
    AssembleB1 {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Replay a cyclic family and report whether it closes up
    #[command(name = "assemble-s1")]
    AssembleS1 {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compile a trisection diagram into a cyclic graphic document
    CompileTrisection {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Factor one cut system into another through handle slides
    Interpolate {
        /// Starting surface document
        #[arg(value_name = "FROM")]
        from: Option<PathBuf>,
        /// Target surface document
        #[arg(value_name = "TO")]
        to: Option<PathBuf>,
        /// Starting surface document
        #[arg(long, value_name = "PATH", conflicts_with = "from")]
        input: Option<PathBuf>,
        /// Target surface document
        #[arg(long, value_name = "PATH", conflicts_with = "to")]
        target: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cap a polygon decomposition and report the projective-plane balance
    #[command(name = "assemble-b2")]
    AssembleB2 {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Euler characteristic, first-homology rank, and signature of a trisection
    Invariants {
        #[command(flatten)]
        io: IoArgs,
        /// Trisection document (alias for --input)
        #[arg(long, value_name = "PATH", conflicts_with_all = ["path", "input"])]
        trisection: Option<PathBuf>,
    },
    /// List a saddle-neighborhood census in canonical order
    Enumerate {
        #[arg(value_enum, value_name = "CENSUS")]
        census: CensusKind,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw a graphic or decomposition document as SVG
    Render {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Input document path (reads standard input when omitted)
    #[arg(value_name = "PATH")]
    path: Option<PathBuf>,
    /// Input document path
    #[arg(long, value_name = "PATH", conflicts_with = "path")]
    input: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

impl IoArgs {
    fn input(&self) -> Option<&PathBuf> {
        self.input.as_ref().or(self.path.as_ref())
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output path (writes standard output when omitted)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format; reports default to json, render defaults to svg
    #[arg(long, value_enum, value_name = "FORMAT")]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CensusKind {
    Figure1,
    Triple,
}

struct Failure {
    code: String,
    message: String,
    exit: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: "USAGE".into(), message: message.into(), exit: 2 }
    }

    fn io(context: String, e: std::io::Error) -> Failure {
        Failure { code: "IO_ERROR".into(), message: format!("{}: {}", context, e), exit: 1 }
    }

    fn kind(expected: &str, got: &str) -> Failure {
        Failure {
            code: "UNEXPECTED_KIND".into(),
            message: format!("expected a {} document, got {}", expected, got),
            exit: 1,
        }
    }
}

impl From<cerf_forge::Error> for Failure {
    fn from(e: cerf_forge::Error) -> Failure {
        Failure { code: e.code().to_string(), message: e.to_string(), exit: 1 }
    }
}

/// A failed deep-validation report keyed by its first failure code.
fn report_failure(r: ValidationReport) -> Failure {
    let code =
        r.failures.first().map(|f| f.code.clone()).unwrap_or_else(|| "INVALID".to_string());
    Failure { code, message: r.summary(), exit: 1 }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprint!("{}", to_canonical_json(&json!({ "code": f.code, "message": f.message })));
            ExitCode::from(f.exit)
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Failure::io(format!("reading {}", p.display()), e)),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::io("reading standard input".to_string(), e))?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::io(format!("writing {}", p.display()), e))
        }
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn demand_json(out: &OutputArgs) -> Result<(), Failure> {
    if out.format == Some(Format::Svg) {
        return Err(Failure::usage("this subcommand reports json; use `render` for svg"));
    }
    Ok(())
}

fn load(io: &IoArgs) -> Result<Document, Failure> {
    let text = read_input(io.input())?;
    Ok(parse_document(&text)?)
}

fn demand_morse(doc: Document) -> Result<SlicedMorseFunction, Failure> {
    match doc {
        Document::Morse(f) => Ok(f),
        other => Err(Failure::kind("morse", other.kind())),
    }
}

fn demand_graphic(doc: Document) -> Result<(CerfGraphic1, CutSystem), Failure> {
    match doc {
        Document::Graphic1 { graphic, start_system } => Ok((graphic, start_system)),
        other => Err(Failure::kind("graphic1", other.kind())),
    }
}

fn demand_trisection(doc: Document) -> Result<TrisectionDiagram, Failure> {
    match doc {
        Document::Trisection(t) => Ok(t),
        other => Err(Failure::kind("trisection", other.kind())),
    }
}

fn demand_decomposition(doc: Document) -> Result<PolygonDecomposition, Failure> {
    match doc {
        Document::Decomposition(d) => Ok(d),
        other => Err(Failure::kind("decomposition", other.kind())),
    }
}

fn demand_surface(doc: Document) -> Result<(usize, CutSystem), Failure> {
    match doc {
        Document::Surface { genus, system } => Ok((genus, system)),
        other => Err(Failure::kind("surface", other.kind())),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { io } => {
            demand_json(&io.out)?;
            let report = validate_report(load(&io)?)?;
            write_output(io.out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::Reeb { io } => {
            demand_json(&io.out)?;
            let f = demand_morse(load(&io)?)?;
            let graph = reeb_graph(&f)?;
            write_output(io.out.output.as_ref(), &to_canonical_json(&graph))
        }
        Command::CutSystem { io } => {
            demand_json(&io.out)?;
            let f = demand_morse(load(&io)?)?;
            let genus = f.genus()?;
            let lattice = SymplecticLattice::new(genus);
            let system = cut_system_from_morse(&f, &lattice, None)?;
            let doc = Document::Surface { genus, system };
            write_output(io.out.output.as_ref(), &serialize_document(&doc))
        }
        Command::ClassifyInterval { io } => {
            demand_json(&io.out)?;
            let (graphic, _) = demand_graphic(load(&io)?)?;
            let mut types = Vec::with_capacity(graphic.segments.len());
            for seg in &graphic.segments {
                types.push(classify_interval(seg)?.to_string());
            }
            let type1 = types.iter().filter(|t| t.as_str() == "type1").count();
            let report = json!({
                "segment_types": types,
                "type0": graphic.segments.len() - type1,
                "type1": type1,
            });
            write_output(io.out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::ClassifyPolygon { io } => {
            demand_json(&io.out)?;
            let dec = demand_decomposition(load(&io)?)?;
            let mut types = Vec::with_capacity(dec.polygons.len());
            let mut counts = [0usize; 3];
            for poly in &dec.polygons {
                let t = classify_polygon(poly)?;
                counts[match t {
                    cerf_forge::family_two::PolygonType::Type0 => 0,
                    cerf_forge::family_two::PolygonType::Type1 => 1,
                    cerf_forge::family_two::PolygonType::Type2 { .. } => 2,
                }] += 1;
                types.push(t.to_string());
            }
            let report = json!({
                "polygon_types": types,
                "type0": counts[0],
                "type1": counts[1],
                "type2": counts[2],
            });
            write_output(io.out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::AssembleB1 { io } => {
            demand_json(&io.out)?;
            let (graphic, start) = demand_graphic(load(&io)?)?;
            let record = assemble_interval_family(&graphic, &start)?;
            write_output(io.out.output.as_ref(), &to_canonical_json(&record))
        }
        Command::AssembleS1 { io } => {
            demand_json(&io.out)?;
            let (graphic, start) = demand_graphic(load(&io)?)?;
            let record = assemble_cyclic_family(&graphic, &start)?;
            write_output(io.out.output.as_ref(), &to_canonical_json(&record))
        }
        Command::CompileTrisection { io } => {
            demand_json(&io.out)?;
            let t = demand_trisection(load(&io)?)?;
            let family = standard_family_from_trisection(&t)?;
            let doc =
                Document::Graphic1 { graphic: family.graphic, start_system: t.alpha.clone() };
            write_output(io.out.output.as_ref(), &serialize_document(&doc))
        }
        Command::Interpolate { from, to, input, target, out } => {
            demand_json(&out)?;
            let from = input.or(from).ok_or_else(|| {
                Failure::usage("interpolate needs a starting document (FROM or --input)")
            })?;
            let to = target.or(to).ok_or_else(|| {
                Failure::usage("interpolate needs a target document (TO or --target)")
            })?;
            let (g_from, sys_from) = demand_surface(parse_document(&read_input(Some(&from))?)?)?;
            let (g_to, sys_to) = demand_surface(parse_document(&read_input(Some(&to))?)?)?;
            if g_from != g_to {
                return Err(Failure {
                    code: "DIMENSION_MISMATCH".into(),
                    message: format!("genus {} does not match genus {}", g_from, g_to),
                    exit: 1,
                });
            }
            let lattice = SymplecticLattice::new(g_from);
            let plan = interpolate_cut_systems(&lattice, &sys_from, &sys_to)?;
            write_output(out.output.as_ref(), &to_canonical_json(&plan))
        }
        Command::AssembleB2 { io } => {
            demand_json(&io.out)?;
            let dec = demand_decomposition(load(&io)?)?;
            let r = assemble_disk_family(&dec)?;
            let report = json!({
                "boundary_closes": r.boundary_closes,
                "boundary_edges": r.boundary_edges,
                "boundary_signature": r.boundary_signature,
                "boundary_type1_edges": r.boundary_type1_edges,
                "genus": r.genus,
                "negative_triples": r.negative_triples,
                "polygon_types": r.polygon_types.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "positive_triples": r.positive_triples,
                "signature_balanced": r.signature_balanced,
            });
            write_output(io.out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::Invariants { io, trisection } => {
            demand_json(&io.out)?;
            let text = read_input(trisection.as_ref().or(io.input()))?;
            let t = demand_trisection(parse_document(&text)?)?;
            let report = json!({
                "chi": trisection_euler_characteristic(&t),
                "h1_rank": trisection_h1(&t)?.rank,
                "sigma": trisection_signature(&t)?,
            });
            write_output(io.out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::Enumerate { census, out } => {
            demand_json(&out)?;
            let (name, entries): (&str, Vec<RibbonNeighborhood>) = match census {
                CensusKind::Figure1 => ("figure1", switch_census()),
                CensusKind::Triple => ("triple", triple_census()),
            };
            let list: Vec<Value> = entries
                .iter()
                .map(|rn| {
                    json!({
                        "boundary_circles": rn.boundary_circles(),
                        "corners": rn.corner_string(),
                        "genus": rn.genus(),
                        "partner": rn.partner(),
                        "vertices": rn.vertices(),
                    })
                })
                .collect();
            let report = json!({ "census": name, "count": list.len(), "entries": list });
            write_output(out.output.as_ref(), &to_canonical_json(&report))
        }
        Command::Render { io } => {
            if io.out.format == Some(Format::Json) {
                return Err(Failure::usage("render emits svg; report subcommands emit json"));
            }
            let svg = match load(&io)? {
                Document::Graphic1 { graphic, .. } => render_graphic_svg(&graphic)?,
                Document::Decomposition(dec) => render_decomposition_svg(&dec)?,
                other => {
                    return Err(Failure::kind("graphic1 or decomposition", other.kind()));
                }
            };
            write_output(io.out.output.as_ref(), &svg)
        }
    }
}

/// Deep validation past the parse-level shape checks: cut systems must be
/// genuine cut systems, graphics must replay, decompositions must glue.
fn validate_report(doc: Document) -> Result<Value, Failure> {
    match doc {
        Document::Surface { genus, system } => {
            let lattice = SymplecticLattice::new(genus);
            let r = validate_cut_system(&lattice, &system);
            if !r.valid() {
                return Err(report_failure(r));
            }
            Ok(json!({
                "curves": system.curves.len(),
                "genus": genus,
                "kind": "surface",
                "valid": true,
            }))
        }
        Document::Morse(f) => {
            let genus = f.genus()?;
            Ok(json!({
                "events": f.events.len(),
                "genus": genus,
                "kind": "morse",
                "valid": true,
            }))
        }
        Document::Graphic1 { graphic, start_system } => {
            if graphic.cyclic {
                assemble_cyclic_family(&graphic, &start_system)?;
            } else {
                assemble_interval_family(&graphic, &start_system)?;
            }
            Ok(json!({
                "cyclic": graphic.cyclic,
                "genus": graphic.genus,
                "kind": "graphic1",
                "segments": graphic.segments.len(),
                "valid": true,
            }))
        }
        Document::Trisection(t) => {
            let r = validate_trisection(&t);
            if !r.valid() {
                return Err(report_failure(r));
            }
            Ok(json!({
                "genus": t.genus,
                "k": t.k,
                "kind": "trisection",
                "valid": true,
            }))
        }
        Document::Decomposition(dec) => {
            validate_decomposition(&dec)?;
            Ok(json!({
                "genus": dec.genus,
                "kind": "decomposition",
                "polygons": dec.polygons.len(),
                "valid": true,
            }))
        }
    }
}
