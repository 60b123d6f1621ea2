use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bohr_core::colorings::{
    build_cayley, chromatic_number_bounded, component_histogram, components_classify,
    hypergraph_chromatic, verify, BoundedChromatic, Graph, Target, Witness,
};
use bohr_core::experiments::{
    exp_bog_scan, exp_ep_roundtrip, exp_lift_transfer, exp_poincare, exp_profile_scan,
    exp_s_square, BogParams, ExperimentReport, FamilySpec, LiftParams, PoincareParams,
    ProfileFamily, ProfileParams,
};
use bohr_core::families::weight_d_set;
use bohr_core::io;
use bohr_core::{bohr::bohr_deficiency_named, Error, VecSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_INPUT: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "bohrlab", version, about = "Recurrence and coloring experiments over F_p^n")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Attach wall time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Least codimension of a subgroup avoiding a set.
    Deficiency(DeficiencyArgs),
    /// Chromatic number of a graph file.
    Chi(ChiArgs),
    /// Build Cay(V, S) and report its components and chromatic number.
    Cayley(CayleyArgs),
    /// Chromatic number of a hypergraph file.
    HypergraphChi {
        #[arg(long)]
        hypergraph: PathBuf,
    },
    /// Partition/subgroup round trip on a hypergraph file.
    Bridge {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        p: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named experiment.
    Exp {
        #[command(subcommand)]
        name: ExpCmd,
    },
}

#[derive(Args)]
struct SetSource {
    /// Vector set file.
    #[arg(long, conflicts_with = "weight")]
    set: Option<PathBuf>,
    /// Use all 0/1 vectors of this weight in F_p^n instead of a file.
    #[arg(long, requires_all = ["p", "n"])]
    weight: Option<usize>,
    #[arg(long)]
    p: Option<u8>,
    #[arg(long)]
    n: Option<usize>,
}

impl SetSource {
    fn load(&self) -> Result<VecSet, Error> {
        let s = match (&self.set, self.weight) {
            (Some(path), _) => io::parse_vecset(&read(path)?)?,
            (None, Some(d)) => weight_d_set(self.p.unwrap(), self.n.unwrap(), d)?,
            (None, None) => return Err(Error::Input("give --set FILE or --weight D".into())),
        };
        if let Some(p) = self.p.filter(|&p| p != s.p()) {
            return Err(Error::ModulusMismatch { expected: p, found: s.p() });
        }
        if let Some(n) = self.n.filter(|&n| n != s.dim()) {
            return Err(Error::DimensionMismatch { expected: n, found: s.dim() });
        }
        Ok(s)
    }

    fn describe(&self) -> String {
        match (&self.set, self.weight) {
            (Some(path), _) => path.display().to_string(),
            (None, Some(d)) => format!("weight-{d}"),
            _ => String::new(),
        }
    }
}

#[derive(Args)]
struct DeficiencyArgs {
    #[command(flatten)]
    source: SetSource,
    #[arg(long)]
    k_max: usize,
}

#[derive(Args)]
struct ChiArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 16)]
    r_max: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Args)]
struct CayleyArgs {
    #[command(flatten)]
    source: SetSource,
    /// Vertex set file; defaults to the whole group.
    #[arg(long)]
    vertices: Option<PathBuf>,
    /// Also write the graph as an edge list.
    #[arg(long)]
    export: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    r_max: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundtripFamily {
    Ap3,
    GallaiSquares,
    AllSubsets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanFamily {
    Weight,
    WeightWithZero,
    Ap3,
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Squares in a W x W window.
    SSquare {
        #[arg(long)]
        w: usize,
    },
    EpRoundtrip {
        #[arg(long)]
        p: u8,
        #[arg(long, value_enum)]
        family: RoundtripFamily,
        /// Vertex count for ap3 and all-subsets.
        #[arg(long)]
        n: Option<usize>,
        /// Window side for gallai-squares.
        #[arg(long)]
        w: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    LiftTransfer {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Poincare {
        #[arg(long)]
        p: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    ProfileScan {
        #[arg(long)]
        p: u8,
        #[arg(long, value_enum)]
        family: ScanFamily,
        /// Weight for the weight families; defaults to p.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        k_max: usize,
        #[arg(long, default_value_t = 16)]
        r_max: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    BogScan {
        #[arg(long)]
        p: u8,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Covers to sample when enumerating all r^(p^n) is not feasible.
        #[arg(long, default_value_t = 200)]
        covers: usize,
        /// Subgroup containment checks per cover.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// What a verb produced: a JSON document and whether its checks passed.
enum Output {
    Report(ExperimentReport),
    Doc { value: Value, valid: bool },
}

fn flat_tsv(v: &Value) -> String {
    match v {
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect(),
        other => format!("{other}\n"),
    }
}

fn bounded_json(b: &BoundedChromatic, g: &Graph) -> Result<(Value, Value, bool), Error> {
    Ok(match b {
        BoundedChromatic::Infinite => (json!("infinite"), Value::Null, true),
        BoundedChromatic::Exact { chi, coloring } => {
            let ok = verify(Witness::Coloring(coloring), Target::Graph(g))?.is_valid();
            (json!(chi), json!(coloring.colors), ok)
        }
        BoundedChromatic::Exceeds { r_max } => (json!(format!(">{r_max}")), Value::Null, true),
        BoundedChromatic::Unresolved { lower, upper } => {
            (json!({ "lower": lower, "upper": upper }), Value::Null, true)
        }
    })
}

fn run(cmd: Cmd) -> Result<Output, Error> {
    match cmd {
        Cmd::Deficiency(a) => {
            let s = a.source.load()?;
            let report = bohr_deficiency_named(&s, a.k_max, &a.source.describe())?;
            let valid = match report.witness() {
                Some(h) => verify(Witness::Subgroup(h), Target::Set(&s))?.is_valid(),
                None => true,
            };
            Ok(Output::Doc { value: report.to_json(None), valid })
        }
        Cmd::Chi(a) => {
            let g = io::parse_graph(&read(&a.graph)?)?;
            let b = chromatic_number_bounded(&g, a.r_max, a.budget);
            let (chi, coloring, valid) = bounded_json(&b, &g)?;
            Ok(Output::Doc {
                value: json!({
                    "vertices": g.n(), "edges": g.edge_count(), "chi": chi, "coloring": coloring,
                }),
                valid,
            })
        }
        Cmd::Cayley(a) => {
            let s = a.source.load()?;
            let verts = match &a.vertices {
                Some(path) => io::parse_vecset(&read(path)?)?,
                None => VecSet::everything(s.p(), s.dim())?,
            };
            let cay = build_cayley(&verts, &s)?;
            let g = &cay.graph;
            if let Some(path) = &a.export {
                fs::write(path, io::write_graph(g))
                    .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            }
            let info = components_classify(g);
            let b = chromatic_number_bounded(g, a.r_max, a.budget);
            let (chi, coloring, valid) = bounded_json(&b, g)?;
            Ok(Output::Doc {
                value: json!({
                    "p": s.p(), "n": s.dim(), "vertices": g.n(), "edges": g.edge_count(),
                    "self_loop": g.has_self_loop(),
                    "components": info.len(),
                    "component_histogram": component_histogram(&info),
                    "chi": chi, "coloring": coloring,
                }),
                valid,
            })
        }
        Cmd::HypergraphChi { hypergraph } => {
            let h = io::parse_hypergraph(&read(&hypergraph)?)?;
            let (chi, part) = hypergraph_chromatic(&h)?;
            let valid = verify(Witness::Partition(&part), Target::Hypergraph(&h))?.is_valid();
            Ok(Output::Doc {
                value: json!({
                    "vertices": h.n(), "edges": h.edges().len(), "chi": chi, "partition": part.cells(),
                }),
                valid,
            })
        }
        Cmd::Bridge { hypergraph, p, seed } => {
            let h = io::parse_hypergraph(&read(&hypergraph)?)?;
            Ok(Output::Report(exp_ep_roundtrip(p, &FamilySpec::Custom(h), seed)?))
        }
        Cmd::Exp { name } => run_exp(name).map(Output::Report),
    }
}

fn run_exp(name: ExpCmd) -> Result<ExperimentReport, Error> {
    match name {
        ExpCmd::SSquare { w } => exp_s_square(w),
        ExpCmd::EpRoundtrip { p, family, n, w, seed } => {
            let need_n = || n.ok_or_else(|| Error::Input("this family needs --n".into()));
            let spec = match family {
                RoundtripFamily::Ap3 => FamilySpec::Ap3 { n: need_n()? },
                RoundtripFamily::AllSubsets => FamilySpec::AllSubsets { n: need_n()? },
                RoundtripFamily::GallaiSquares => FamilySpec::GallaiSquares {
                    w: w.ok_or_else(|| Error::Input("gallai-squares needs --w".into()))?,
                },
            };
            exp_ep_roundtrip(p, &spec, seed)
        }
        ExpCmd::LiftTransfer { source, d, m, k_max, seed } => {
            let s = source.load()?;
            let params = LiftParams { p: s.p(), d, n: s.dim(), m, k_max, seed };
            exp_lift_transfer(&params, &s)
        }
        ExpCmd::Poincare { p, n, k, trials, seed } => {
            exp_poincare(&PoincareParams { p, n, k, trials, seed })
        }
        ExpCmd::ProfileScan { p, family, d, n_min, n_max, k_max, r_max, budget } => {
            let d = d.unwrap_or(p as usize);
            let family = match family {
                ScanFamily::Weight => ProfileFamily::Weight { d },
                ScanFamily::WeightWithZero => ProfileFamily::WeightWithZero { d },
                ScanFamily::Ap3 => ProfileFamily::Ap3,
            };
            exp_profile_scan(&ProfileParams {
                p,
                family,
                n_min,
                n_max,
                k_max,
                r_max,
                node_budget: budget,
            })
        }
        ExpCmd::BogScan { p, d, n, r, covers, budget, seed } => {
            exp_bog_scan(&BogParams { p, d, n, r, covers, budget, seed })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let start = Instant::now();
    let out = match run(cli.cmd) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::ResourceGuard { .. }) { EXIT_GUARD } else { EXIT_INPUT };
            return ExitCode::from(code);
        }
    };
    let ms = start.elapsed().as_millis() as u64;
    let (text, valid) = match out {
        Output::Report(mut r) => {
            if cli.timing {
                r = r.with_wall_time(ms);
            }
            let valid = r.passed();
            let text = match cli.format {
                Format::Json => r.to_json_string(),
                Format::Tsv => r.to_tsv(),
            };
            (text, valid)
        }
        Output::Doc { mut value, valid } => {
            if let (true, Value::Object(m)) = (cli.timing, &mut value) {
                m.insert("wall_time_ms".into(), json!(ms));
            }
            let text = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&value).expect("json");
                    s.push('\n');
                    s
                }
                Format::Tsv => flat_tsv(&value),
            };
            (text, valid)
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{text}"),
    }
    if valid {
        ExitCode::SUCCESS
    } else {
        eprintln!("validation failed");
        ExitCode::from(EXIT_VALIDATION)
    }
}
