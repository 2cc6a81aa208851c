//! The `jsjkit` command line. [`run`] does all the work and returns the
//! output and exit code, so the binary is a thin wrapper.
//!
//! Exit codes: 0 on success, 1 when a validation or verification fails,
//! 2 for usage and parse errors.

use std::path::Path;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use jsjkit_core::catalog;
use jsjkit_core::format::parse_spec;
use jsjkit_core::gog::{GraphOfGroups, VertexKind};
use jsjkit_core::manifold::{GraphManifoldSpec, PieceKind, Severity, Validation};
use jsjkit_core::seifert::SeifertGroup;
use jsjkit_core::splitting::{brute_force_verify, step_classifier, SplitError, StepReport, Witness};
use jsjkit_core::symbol::{Move, SeifertSymbol};
use jsjkit_core::tree::{leaf_intersection, tree_ball, LeafIntersectionReport};

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema of every document printed with `--json`.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Parser)]
#[command(name = "jsjkit", version, about = "Graph manifolds, JSJ splittings and malnormality checks")]
pub struct Cli {
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a manifold file and list diagnostics.
    Validate { file: String },
    /// Pieces with their geometry, and the splitting case of every edge.
    Classify { file: String },
    /// Canonical symbol of a Seifert piece.
    Canonicalize { file: String, piece: String },
    /// Euler number of a Seifert piece.
    Euler { file: String, piece: String },
    /// Presentation of the fundamental group.
    Present { file: String },
    /// Multiply graph-of-groups words and print the reduced product.
    Wp {
        file: String,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Classify an edge and brute-force its malnormality step.
    Verify {
        file: String,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        bound: i64,
        /// Extra syllable lengths checked beyond the first forbidden one.
        #[arg(long, default_value_t = 2)]
        slack: usize,
    },
    /// Dump a ball of the Bass-Serre tree of the peripheral extension.
    Tree {
        file: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Radius of the vertex-group balls supplying coset letters.
        #[arg(long, default_value_t = 1)]
        letters: usize,
    },
    /// Intersect the stabilizers of two leaves of the tree ball.
    Leaves {
        file: String,
        #[arg(long)]
        v1: usize,
        #[arg(long)]
        v2: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 1)]
        letters: usize,
    },
    /// Randomized self-checks of symbol moves and group laws.
    Check {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Classify { .. } => "classify",
            Command::Canonicalize { .. } => "canonicalize",
            Command::Euler { .. } => "euler",
            Command::Present { .. } => "present",
            Command::Wp { .. } => "wp",
            Command::Verify { .. } => "verify",
            Command::Tree { .. } => "tree",
            Command::Leaves { .. } => "leaves",
            Command::Check { .. } => "check",
        }
    }
}

pub struct Outcome {
    pub output: String,
    pub code: i32,
}

#[derive(Debug)]
enum Failure {
    /// Bad invocation or unreadable input.
    Usage(String),
    /// The input is fine but fails the requested check.
    Rejected(String, Option<Value>),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Rejected(..) => 1,
        }
    }
}

/// A finished command: its JSON report, text rendering and verdict.
struct Done {
    report: Value,
    text: String,
    ok: bool,
}

fn done<T: Serialize>(report: &T, text: String, ok: bool) -> Result<Done, Failure> {
    Ok(Done { report: serde_json::to_value(report).expect("reports serialize"), text, ok })
}

/// Reads a manifold file; `catalog:NAME` names a shipped sample.
fn load(file: &str) -> Result<GraphManifoldSpec, Failure> {
    let text = match file.strip_prefix("catalog:") {
        Some(name) => catalog::get(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| Failure::Usage(format!("no catalog entry `{name}`")))?,
        None => std::fs::read_to_string(Path::new(file)).map_err(|e| Failure::Usage(format!("{file}: {e}")))?,
    };
    parse_spec(&text).map_err(|e| Failure::Usage(format!("{file}: {e}")))
}

fn render_validation(v: &Validation) -> String {
    let mut out = String::from(if v.valid { "valid\n" } else { "invalid\n" });
    for d in &v.diagnostics {
        let sev = match d.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        };
        out += &format!("{sev}[{}]: {}\n", d.code, d.message);
    }
    out
}

fn load_valid(file: &str) -> Result<GraphManifoldSpec, Failure> {
    let spec = load(file)?;
    let v = spec.validate();
    if !v.valid {
        let report = serde_json::to_value(&v).expect("serializes");
        return Err(Failure::Rejected(render_validation(&v), Some(report)));
    }
    Ok(spec)
}

fn seifert_piece(spec: &GraphManifoldSpec, piece: &str) -> Result<SeifertSymbol, Failure> {
    let k = spec.piece_index(piece).ok_or_else(|| Failure::Usage(format!("no piece `{piece}`")))?;
    match &spec.pieces[k].kind {
        PieceKind::Seifert(s) => Ok(s.clone()),
        other => Err(Failure::Usage(format!("piece {piece} is {}, not a Seifert piece", other.label()))),
    }
}

#[derive(Serialize)]
struct PieceRow {
    name: String,
    kind: &'static str,
    symbol: Option<String>,
    special: Option<String>,
    base: Option<String>,
    geometry: Option<String>,
    euler: Option<String>,
    slots: u32,
}

#[derive(Serialize)]
struct EdgeRow {
    edge: String,
    minus: String,
    plus: String,
    separating: bool,
    #[serde(flatten)]
    step: Option<StepReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ClassifyReport {
    pieces: Vec<PieceRow>,
    edges: Vec<EdgeRow>,
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        Some(w) => format!(
            "  witness: {} conjugates {} to {} (syllable length {}, {})\n",
            w.conjugator,
            w.element,
            w.image,
            w.syllable_length,
            if w.confirmed { "confirmed" } else { "NOT confirmed" }
        ),
        None => String::new(),
    }
}

fn classify(file: &str) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    let mut text = String::new();
    let mut pieces = Vec::new();
    for p in &spec.pieces {
        let row = match &p.kind {
            PieceKind::Seifert(s) => {
                let base = s.base_orbifold();
                PieceRow {
                    name: p.name.clone(),
                    kind: p.kind.label(),
                    symbol: Some(s.to_string()),
                    special: Some(format!("{:?}", s.recognize_special())),
                    base: Some(base.to_string()),
                    geometry: Some(format!("{:?}", base.geometry())),
                    euler: Some(s.euler_number().to_string()),
                    slots: p.kind.slots(),
                }
            }
            _ => PieceRow {
                name: p.name.clone(),
                kind: p.kind.label(),
                symbol: None,
                special: None,
                base: None,
                geometry: None,
                euler: None,
                slots: p.kind.slots(),
            },
        };
        text += &match &row.symbol {
            Some(sym) => format!(
                "piece {}: {sym}, base {} ({}), {}, euler {}\n",
                row.name,
                row.base.as_deref().unwrap_or(""),
                row.geometry.as_deref().unwrap_or(""),
                row.special.as_deref().unwrap_or(""),
                row.euler.as_deref().unwrap_or("")
            ),
            None => format!("piece {}: {}, {} boundary tori\n", row.name, row.kind, row.slots),
        };
        pieces.push(row);
    }
    let mut edges = Vec::new();
    let mut ok = true;
    for (e, g) in spec.gluings.iter().enumerate() {
        let name = GraphManifoldSpec::edge_name(e);
        let slot = |s: jsjkit_core::manifold::TorusSlot| format!("{}.{}", spec.pieces[s.piece].name, s.index);
        let separating = spec.edge_separating(e).unwrap_or(false);
        let (step, error) = match step_classifier(&spec, &name) {
            Ok(r) => {
                text += &format!(
                    "edge {name}: {}, step {}, acyl {}\n  case {}, {} -> {}\n",
                    if separating { "amalgam" } else { "HNN" },
                    r.step,
                    r.acylindricity,
                    r.case,
                    slot(g.minus),
                    slot(g.plus)
                );
                text += &witness_text(&r.witness);
                ok &= r.passed();
                (Some(r), None)
            }
            Err(err) => {
                text += &format!("edge {name}: {err}\n");
                ok = false;
                (None, Some(err.to_string()))
            }
        };
        edges.push(EdgeRow { edge: name, minus: slot(g.minus), plus: slot(g.plus), separating, step, error });
    }
    done(&ClassifyReport { pieces, edges }, text, ok)
}

#[derive(Serialize)]
struct SymbolReport {
    piece: String,
    symbol: String,
    canonical: Option<String>,
    euler: Option<String>,
    euler_value: Option<String>,
    mod_one: Option<bool>,
}

fn symbol_command(file: &str, piece: &str, euler: bool) -> Result<Done, Failure> {
    let spec = load(file)?;
    let s = seifert_piece(&spec, piece)?;
    if euler {
        let e = s.euler_number();
        let r = SymbolReport {
            piece: piece.to_string(),
            symbol: s.to_string(),
            canonical: None,
            euler: Some(e.to_string()),
            euler_value: Some(e.value.to_string()),
            mod_one: Some(e.mod_one),
        };
        let text = format!("{e}\n");
        done(&r, text, true)
    } else {
        let c = s.canonicalize();
        let r = SymbolReport {
            piece: piece.to_string(),
            symbol: s.to_string(),
            canonical: Some(c.to_string()),
            euler: None,
            euler_value: None,
            mod_one: None,
        };
        done(&r, format!("{c}\n"), true)
    }
}

fn present(file: &str) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    let gog = GraphOfGroups::jsj(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = gog.presentation_text();
    let stable: Vec<String> =
        gog.edges.iter().zip(&gog.tree).filter(|(_, &t)| !t).map(|(e, _)| format!("t_{}", e.name)).collect();
    done(&json!({ "presentation": text, "stable_letters": stable }), text, true)
}

fn wp(file: &str, words: &[String]) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    let gog = GraphOfGroups::jsj(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut product = None;
    for w in words {
        let x = gog.parse_word(w).map_err(|e| Failure::Usage(format!("`{w}`: {e}")))?;
        product = Some(match product {
            None => gog.reduce(&x),
            Some(p) => {
                if gog.end_vertex(&p) != x.start {
                    return Err(Failure::Usage(format!("`{w}` does not start where the previous word ends")));
                }
                gog.multiply(&p, &x)
            }
        });
    }
    let p = product.expect("at least one word");
    let identity = gog.is_identity(&p);
    let lengths: serde_json::Map<String, Value> =
        gog.edges.iter().enumerate().map(|(e, edge)| (edge.name.clone(), json!(gog.e_length(&p, e)))).collect();
    let nf = gog.display(&p);
    let mut text = format!("{nf}\n");
    if identity {
        text += "identity\n";
    }
    let lens: Vec<String> = lengths.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if !lens.is_empty() {
        text += &format!("edge lengths: {}\n", lens.join(" "));
    }
    done(&json!({ "words": words, "normal_form": nf, "identity": identity, "edge_lengths": lengths }), text, true)
}

fn verify(file: &str, edge: &str, radius: usize, bound: i64, slack: usize) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    if spec.edge_index(edge).is_none() {
        return Err(Failure::Usage(format!("no edge `{edge}`")));
    }
    let r = match brute_force_verify(&spec, edge, radius, bound, slack) {
        Ok(r) => r,
        Err(e @ (SplitError::Gog(_) | SplitError::Manifold(jsjkit_core::manifold::ManifoldError::UnknownEdge(_)))) => {
            return Err(Failure::Usage(e.to_string()))
        }
        Err(e) => return Err(Failure::Rejected(format!("{e}\n"), None)),
    };
    let mut text = format!(
        "edge {}: {}, step {}, acyl {}\n  case {}\n",
        r.edge,
        if r.kind == jsjkit_core::manifold::SplitKind::Amalgam { "amalgam" } else { "HNN" },
        r.step,
        r.acylindricity,
        r.case
    );
    text += &witness_text(&r.witness);
    if let Some(v) = &r.verification {
        text += &format!(
            "  checked syllable lengths {}..={} at radius {}, bound {}: {} conjugators, {} pairs, {} counterexamples\n",
            v.min_length,
            v.max_length,
            v.radius,
            v.bound,
            v.conjugators,
            v.pairs,
            v.counterexamples.len()
        );
        for h in &v.counterexamples {
            text += &format!("  counterexample: {} conjugates {} to {}\n", h.conjugator, h.element, h.image);
        }
    }
    let ok = r.passed();
    done(&r, text, ok)
}

#[derive(Serialize)]
struct NodeRow {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    vertex: String,
    kind: VertexKind,
    word: String,
    leaf: bool,
    truncated: bool,
}

#[derive(Serialize)]
struct TreeReport {
    radius: usize,
    letters: usize,
    peripheral_extension: bool,
    nodes: Vec<NodeRow>,
    leaves: usize,
}

fn tree_gog(spec: &GraphManifoldSpec) -> Result<(GraphOfGroups, bool), Failure> {
    let ext = !spec.boundary_tori().is_empty();
    let gog = if ext { GraphOfGroups::peripheral_extension(spec) } else { GraphOfGroups::jsj(spec) };
    Ok((gog.map_err(|e| Failure::Usage(e.to_string()))?, ext))
}

fn tree(file: &str, radius: usize, letters: usize) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    let (gog, ext) = tree_gog(&spec)?;
    let ball = tree_ball(&gog, radius, letters);
    let nodes: Vec<NodeRow> = ball
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| NodeRow {
            id: i,
            parent: n.parent,
            depth: n.depth,
            vertex: gog.vertices[n.vertex].name.clone(),
            kind: ball.kind(&gog, i),
            word: gog.display(&ball.word(&gog, i)),
            leaf: ball.is_leaf(&gog, i),
            truncated: n.truncated,
        })
        .collect();
    let leaves = nodes.iter().filter(|n| n.leaf).count();
    let mut text = format!("{} tree vertices within radius {radius}, {leaves} leaves\n", nodes.len());
    for n in &nodes {
        let kind = serde_json::to_value(n.kind).expect("serializes");
        text += &format!(
            "{}[{}] {} ({}) {}{}\n",
            "  ".repeat(n.depth),
            n.id,
            n.vertex,
            kind.as_str().unwrap_or(""),
            n.word,
            if n.truncated { " ..." } else { "" }
        );
    }
    done(&TreeReport { radius, letters, peripheral_extension: ext, nodes, leaves }, text, true)
}

fn leaves(file: &str, v1: usize, v2: usize, bound: i64, radius: usize, letters: usize) -> Result<Done, Failure> {
    let spec = load_valid(file)?;
    let (gog, _) = tree_gog(&spec)?;
    let ball = tree_ball(&gog, radius, letters);
    let r: LeafIntersectionReport =
        leaf_intersection(&gog, &ball, v1, v2, bound).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut text = match &r.descriptor {
        jsjkit_core::tree::IntersectionDescriptor::Trivial => format!("leaves {v1} and {v2}: trivial intersection\n"),
        jsjkit_core::tree::IntersectionDescriptor::FiberConjugate { node, piece, conjugator } => format!(
            "leaves {v1} and {v2}: fiber of {piece} conjugated by {conjugator} (tree vertex {node})\n"
        ),
    };
    text += &format!(
        "  box |a|,|b| <= {bound}: {} elements found, {}\n",
        r.found.len(),
        if r.consistent { "consistent" } else { "INCONSISTENT" }
    );
    let ok = r.consistent;
    done(&r, text, ok)
}

fn random_symbol(rng: &mut ChaCha8Rng) -> SeifertSymbol {
    let genus = rng.gen_range(-2..=2);
    let boundary = rng.gen_range(0..=2);
    let n = rng.gen_range(0..=4);
    let pairs = (0..n)
        .map(|_| loop {
            let p: i64 = rng.gen_range(1..=7);
            let q: i64 = rng.gen_range(-10..=10);
            if num_gcd(p, q) == 1 {
                break (p, q);
            }
        })
        .collect();
    SeifertSymbol::new(genus, boundary, pairs).expect("coprime pairs")
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        num_gcd(b, a % b)
    }
}

fn random_move(rng: &mut ChaCha8Rng, s: &SeifertSymbol) -> Move {
    let n = s.pairs().len().max(1);
    match rng.gen_range(0..5) {
        0 => Move::Shift { from: rng.gen_range(0..n), to: rng.gen_range(0..n) },
        1 => Move::AddTrivial,
        2 => Move::RemoveTrivial(rng.gen_range(0..n)),
        3 => Move::Twist { index: rng.gen_range(0..n), up: rng.gen() },
        _ => Move::Swap(rng.gen_range(0..n), rng.gen_range(0..n)),
    }
}

fn check(seed: u64, cases: usize) -> Result<Done, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let s = random_symbol(&mut rng);
        let mut t = s.clone();
        for _ in 0..rng.gen_range(0..=20) {
            if let Ok(next) = t.apply_move(random_move(&mut rng, &t)) {
                t = next;
            }
        }
        if s.canonicalize() != t.canonicalize() || s.euler_number() != t.euler_number() {
            failures.push(format!("moves change the invariants of {s} (reached {t})"));
        }
    }
    let group = SeifertGroup::new(&"S(0,3;(2,1))".parse().expect("symbol")).expect("group");
    let gens = group.generators(true);
    let word = |rng: &mut ChaCha8Rng| {
        (0..rng.gen_range(0..=30)).fold(group.identity(), |w, _| group.multiply(&w, &gens[rng.gen_range(0..gens.len())]))
    };
    for _ in 0..cases {
        let (x, y, z) = (word(&mut rng), word(&mut rng), word(&mut rng));
        let assoc = group.multiply(&group.multiply(&x, &y), &z) == group.multiply(&x, &group.multiply(&y, &z));
        let inv = group.multiply(&x, &group.inverse(&x)) == group.identity();
        if !assoc || !inv {
            failures.push(format!("group laws fail for {}", group.display(&x)));
        }
    }
    let ok = failures.is_empty();
    let text = format!("seed {seed}: {} cases, {} failures\n{}", cases, failures.len(), failures.join("\n"));
    done(&json!({ "seed": seed, "cases": cases, "failures": failures }), text, ok)
}

fn dispatch(cli: &Cli) -> Result<Done, Failure> {
    match &cli.command {
        Command::Validate { file } => {
            let spec = load(file)?;
            let v = spec.validate();
            let text = render_validation(&v);
            let ok = v.valid;
            done(&v, text, ok)
        }
        Command::Classify { file } => classify(file),
        Command::Canonicalize { file, piece } => symbol_command(file, piece, false),
        Command::Euler { file, piece } => symbol_command(file, piece, true),
        Command::Present { file } => present(file),
        Command::Wp { file, words } => wp(file, words),
        Command::Verify { file, edge, radius, bound, slack } => verify(file, edge, *radius, *bound, *slack),
        Command::Tree { file, radius, letters } => tree(file, *radius, *letters),
        Command::Leaves { file, v1, v2, bound, radius, letters } => leaves(file, *v1, *v2, *bound, *radius, *letters),
        Command::Check { cases } => check(cli.seed, *cases),
    }
}

fn document(command: &str, ok: bool, report: Option<Value>, error: Option<(&str, String)>) -> String {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command, "ok": ok });
    if let Some(r) = report {
        doc["report"] = r;
    }
    if let Some((kind, message)) = error {
        doc["error"] = json!({ "kind": kind, "message": message.trim_end() });
    }
    serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let wants_json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { output: e.to_string(), code: 0 };
            }
            let output = if wants_json { document("usage", false, None, Some(("usage", e.to_string()))) } else { e.to_string() };
            return Outcome { output, code: 2 };
        }
    };
    let command = cli.command.name();
    match dispatch(&cli) {
        Ok(d) => {
            let code = if d.ok { 0 } else { 1 };
            let output = if cli.json { document(command, d.ok, Some(d.report), None) } else { d.text };
            Outcome { output, code }
        }
        Err(f) => {
            let code = f.code();
            let output = match (&f, cli.json) {
                (Failure::Usage(m), true) => document(command, false, None, Some(("usage", m.clone()))),
                (Failure::Rejected(m, report), true) => document(command, false, report.clone(), Some(("rejected", m.clone()))),
                (Failure::Usage(m), false) => format!("error: {m}\n"),
                (Failure::Rejected(m, _), false) => m.clone(),
            };
            Outcome { output, code }
        }
    }
}
