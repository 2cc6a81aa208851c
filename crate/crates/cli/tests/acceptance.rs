//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show up in `cargo test` output.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use jsjkit::{run, SCHEMA};
use jsjkit_core::catalog::{self, ENTRIES};
use jsjkit_core::format::{parse_spec, print_spec};
use jsjkit_core::gog::{GraphOfGroups, VertexKind};
use jsjkit_core::manifold::{GraphManifoldSpec, PieceKind, SplitCase};
use jsjkit_core::orbifold::FreeProductSignature;
use jsjkit_core::seifert::{SeifertElement, SeifertGroup};
use jsjkit_core::splitting::{brute_force_verify, step_classifier};
use jsjkit_core::symbol::{isomorphic_unoriented, same_manifold, Move, SeifertSymbol};
use jsjkit_core::tree::{leaf_intersection, tree_ball, IntersectionDescriptor, TreeBall};

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;

/// Id, title, check and time limit in seconds.
type Criterion = (&'static str, &'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sym(s: &str) -> SeifertSymbol {
    s.parse().expect("symbol")
}

fn spec(name: &str) -> GraphManifoldSpec {
    parse_spec(catalog::get(name).expect("catalog entry").text).expect("catalog parses")
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn random_symbol(rng: &mut ChaCha8Rng) -> SeifertSymbol {
    let genus = rng.gen_range(-3..=3);
    let boundary = rng.gen_range(0..=3);
    let pairs = (0..rng.gen_range(0..=5))
        .map(|_| loop {
            let p: i64 = rng.gen_range(1..=9);
            let q: i64 = rng.gen_range(-12..=12);
            if gcd(p, q) == 1 {
                break (p, q);
            }
        })
        .collect();
    SeifertSymbol::new(genus, boundary, pairs).expect("coprime pairs")
}

fn random_move(rng: &mut ChaCha8Rng, n: usize) -> Move {
    let n = n.max(1);
    match rng.gen_range(0..5) {
        0 => Move::Shift { from: rng.gen_range(0..n), to: rng.gen_range(0..n) },
        1 => Move::AddTrivial,
        2 => Move::RemoveTrivial(rng.gen_range(0..n)),
        3 => Move::Twist { index: rng.gen_range(0..n), up: rng.gen() },
        _ => Move::Swap(rng.gen_range(0..n), rng.gen_range(0..n)),
    }
}

/// Classification under moves, plus the families with several fibrations.
fn ac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut applied = 0usize;
    for _ in 0..1000 {
        let s = random_symbol(&mut rng);
        let mut t = s.clone();
        for _ in 0..rng.gen_range(0..=20) {
            if let Ok(next) = t.apply_move(random_move(&mut rng, t.pairs().len())) {
                t = next;
                applied += 1;
            }
        }
        ensure!(s.canonicalize() == t.canonicalize(), "canonical form of {s} changed to {}", t.canonicalize());
        let (es, et) = (s.euler_number(), t.euler_number());
        ensure!(es == et, "euler number of {s} ({es}) differs from {t} ({et})");
        ensure!(es.mod_one == (s.boundary() > 0), "euler number of {s} has the wrong modulus flag");
    }
    let solid = [("S(0,1;(2,1))", "S(0,1;(5,2))"), ("S(0,1;)", "S(0,1;(3,1))")];
    for (a, b) in solid {
        ensure!(same_manifold(&sym(a), &sym(b)) == Ok(true), "{a} and {b} not recognized as solid tori");
    }
    let pairs = [("S(-1,1;)", "S(0,1;(2,1),(2,-1))"), ("S(-2,0;)", "S(0,0;(2,1),(2,1),(2,-1),(2,-1))")];
    for (a, b) in pairs {
        let (a, b) = (sym(a), sym(b));
        ensure!(same_manifold(&a, &b) == Ok(true), "{a} and {b} not recognized as the same manifold");
        ensure!(!isomorphic_unoriented(&a, &b), "{a} and {b} reported as isomorphic fibrations");
    }
    Ok(format!("1000 symbols, {applied} moves applied, 3 exceptional families"))
}

fn random_word(rng: &mut ChaCha8Rng, g: &SeifertGroup, gens: &[SeifertElement]) -> SeifertElement {
    (0..rng.gen_range(0..=30)).fold(g.identity(), |w, _| g.multiply(&w, &gens[rng.gen_range(0..gens.len())]))
}

/// Normal forms in two boundary Seifert groups, one with a non-orientable base.
fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut ball_total = 0;
    for name in ["S(-1,2;(3,2))", "S(0,3;(2,1))"] {
        let g = SeifertGroup::new(&sym(name)).map_err(|e| e.to_string())?;
        let gens = g.generators(true);
        let sig = g.signature();
        for _ in 0..500 {
            let x = random_word(&mut rng, &g, &gens);
            let y = random_word(&mut rng, &g, &gens);
            let z = random_word(&mut rng, &g, &gens);
            let xy = g.multiply(&x, &y);
            ensure!(g.multiply(&xy, &z) == g.multiply(&x, &g.multiply(&y, &z)), "associativity fails in {name}");
            ensure!(g.multiply(&x, &g.inverse(&x)) == g.identity(), "x x^-1 != 1 in {name}");
            ensure!(g.multiply(&g.inverse(&x), &x) == g.identity(), "x^-1 x != 1 in {name}");
            ensure!(g.epsilon(&xy) == g.epsilon(&x) * g.epsilon(&y), "epsilon not multiplicative in {name}");
            ensure!(
                g.project(&xy) == sig.multiply(&g.project(&x), &g.project(&y)),
                "projection not a homomorphism in {name}"
            );
        }
        let ball = g.ball(6, true);
        let f = g.fiber_power(1);
        for w in &ball {
            let eps = i64::from(g.epsilon(w));
            ensure!(g.conjugate(w, &f) == g.fiber_power(eps), "{} f {}^-1 != f^{eps}", g.display(w), g.display(w));
        }
        ball_total += ball.len();
    }
    Ok(format!("500 triples per group, fiber conjugation over {ball_total} ball elements"))
}

/// Peripheral subgroups of S(0,3;(2,1)): malnormality in the orbifold group,
/// and conjugate intersections equal to the fiber.
fn ac3() -> Outcome {
    let s = sym("S(0,3;(2,1))");
    let sig = FreeProductSignature::from_symbol(&s).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for i in 1..=3 {
        let cert = sig.malnormality_certificate(i, 5).map_err(|e| e.to_string())?;
        ensure!(cert.ok, "certificate for d{i} failed");
        if let Some(h) = cert.hits.iter().find(|h| !h.expected) {
            return Err(format!("d{i}: conjugator {} carries d{i}^{} to d{}^{}", h.conjugator, h.exponent, h.target, h.power));
        }
        checked += cert.checked;
    }
    let g = SeifertGroup::new(&s).map_err(|e| e.to_string())?;
    let ball = g.ball(4, true);
    let mut rows = 0;
    for x in &ball {
        for i in 1..=3 {
            for j in 1..=3 {
                if i == j && g.is_peripheral(x, i) {
                    continue;
                }
                let eps = i64::from(g.epsilon(x));
                for r in g.peripheral_conjugate_intersection_check(x, i, j, 3).map_err(|e| e.to_string())? {
                    let expected = if r.m == 0 { Some((0, eps * r.n)) } else { None };
                    ensure!(
                        r.found == expected,
                        "{} d{i}^{} f^{} conjugate meets slot {j} in {:?}",
                        g.display(x),
                        r.m,
                        r.n,
                        r.found
                    );
                    rows += 1;
                }
            }
        }
    }
    Ok(format!("{checked} certificate pairs, {} conjugators, {rows} intersection rows", ball.len()))
}

/// The tree neighbor of a leaf, found from the ball structure alone.
fn anchor(ball: &TreeBall, leaf: usize) -> usize {
    let n = ball.neighbors(leaf);
    assert_eq!(n.len(), 1, "leaf {leaf} has {} neighbors", n.len());
    n[0]
}

/// Leaf stabilizer intersections in the radius-3 tree ball.
fn ac4() -> Outcome {
    let s = spec("leaves");
    let gog = GraphOfGroups::peripheral_extension(&s).map_err(|e| e.to_string())?;
    let ball = tree_ball(&gog, 3, 1);
    let leaves = ball.leaves(&gog);
    let (mut fiber, mut trivial) = (0, 0);
    for (k, &a) in leaves.iter().enumerate() {
        for &b in &leaves[k + 1..] {
            let r = leaf_intersection(&gog, &ball, a, b, 3).map_err(|e| e.to_string())?;
            let hub = anchor(&ball, a);
            let shared = hub == anchor(&ball, b) && ball.kind(&gog, hub) == VertexKind::Seifert;
            ensure!(r.consistent, "leaves {a},{b}: brute force disagrees with {:?}", r.descriptor);
            match r.descriptor {
                IntersectionDescriptor::FiberConjugate { node, .. } => {
                    ensure!(shared && node == hub, "leaves {a},{b} reported fiber-conjugate at {node}");
                    ensure!(r.fiber_only, "leaves {a},{b}: intersection is not made of fiber powers");
                    ensure!(!r.found.is_empty(), "leaves {a},{b}: no fiber powers found");
                    fiber += 1;
                }
                IntersectionDescriptor::Trivial => {
                    ensure!(!shared, "leaves {a},{b} share Seifert vertex {hub} but were reported trivial");
                    ensure!(r.found.is_empty(), "leaves {a},{b}: trivial but found {:?}", r.found);
                    trivial += 1;
                }
            }
        }
    }
    Ok(format!("{} tree vertices, {} leaves: {fiber} fiber-conjugate pairs, {trivial} trivial", ball.nodes.len(), leaves.len()))
}

/// Case table of the catalog, brute-force verification and witnesses.
fn ac5() -> Outcome {
    let table = [
        ("d1", SplitCase::D1, 0, 1),
        ("d2", SplitCase::D2, 1, 2),
        ("d3", SplitCase::D3, 1, 2),
        ("d4", SplitCase::D4, 3, 4),
        ("nd1", SplitCase::ND1, 1, 1),
        ("nd2", SplitCase::ND2, 2, 2),
    ];
    let mut witnesses = 0;
    for (name, case, step, acyl) in table {
        let r = step_classifier(&spec(name), "e1").map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            (r.case, r.step, r.acylindricity) == (case, step, acyl),
            "{name}: got {} ({}, {}), expected {case} ({step}, {acyl})",
            r.case,
            r.step,
            r.acylindricity
        );
        if step > 0 {
            let w = r.witness.as_ref().ok_or_else(|| format!("{name}: no lower-bound witness"))?;
            ensure!(w.confirmed, "{name}: witness not confirmed");
            ensure!(w.syllable_length == step as usize, "{name}: witness has syllable length {}", w.syllable_length);
            witnesses += 1;
        }
    }
    let mut summary = Vec::new();
    for (name, radius) in [("d3", 3), ("d4", 2), ("nd2", 2)] {
        let r = brute_force_verify(&spec(name), "e1", radius, 2, 2).map_err(|e| format!("{name}: {e}"))?;
        let v = r.verification.as_ref().ok_or_else(|| format!("{name}: nothing verified"))?;
        ensure!(v.counterexamples.is_empty(), "{name}: counterexample {:?}", v.counterexamples[0]);
        ensure!(r.witness.as_ref().is_some_and(|w| w.confirmed), "{name}: witness not confirmed");
        summary.push(format!("{name} {} pairs", v.pairs));
    }
    Ok(format!("6 cases, {witnesses} witnesses confirmed, 0 counterexamples ({})", summary.join(", ")))
}

/// Shape of every catalog tree ball up to radius 3.
fn ac6() -> Outcome {
    let mut stats = (0, 0, 0);
    for e in ENTRIES.iter().filter(|e| e.name != "sol") {
        let s = spec(e.name);
        let gog = if s.boundary_tori().is_empty() {
            GraphOfGroups::jsj(&s)
        } else {
            GraphOfGroups::peripheral_extension(&s)
        }
        .map_err(|err| err.to_string())?;
        for radius in 1..=3 {
            let ball = tree_ball(&gog, radius, 1);
            let mut leaves = Vec::new();
            for (i, n) in ball.nodes.iter().enumerate() {
                let kind = ball.kind(&gog, i);
                if n.depth < radius && !n.truncated {
                    let terminal = n.parent.is_some() && n.children.is_empty();
                    ensure!(
                        terminal == (kind == VertexKind::Peripheral),
                        "{} r={radius}: node {i} ({kind:?}) has {} neighbors",
                        e.name,
                        ball.neighbors(i).len()
                    );
                }
                if kind == VertexKind::Peripheral {
                    ensure!(ball.neighbors(i).len() == 1, "{}: leaf {i} is not terminal", e.name);
                    leaves.push(i);
                }
                if kind == VertexKind::Klein {
                    ensure!(ball.full_degree(&gog, i) == Some(2), "{}: Klein vertex {i} has degree != 2", e.name);
                    if n.depth < radius {
                        ensure!(ball.neighbors(i).len() == 2, "{}: Klein vertex {i} has {} neighbors", e.name, ball.neighbors(i).len());
                    }
                    stats.1 += 1;
                }
            }
            let leaf_set: HashSet<usize> = ball.leaves(&gog).into_iter().collect();
            ensure!(leaf_set == leaves.iter().copied().collect(), "{}: leaf list disagrees", e.name);
            for (k, &a) in leaves.iter().enumerate() {
                for &b in &leaves[k + 1..] {
                    let path = ball.path(a, b);
                    if path.iter().any(|&v| ball.kind(&gog, v) == VertexKind::Klein) {
                        let d = ball.distance(a, b);
                        ensure!(d == path.len() - 1 && d >= 4, "{}: leaves {a},{b} at distance {d} through a Klein vertex", e.name);
                        stats.2 += 1;
                    }
                }
            }
            stats.0 += ball.nodes.len();
        }
    }
    Ok(format!("{} tree vertices, {} Klein vertices, {} leaf paths through Klein vertices", stats.0, stats.1, stats.2))
}

/// The doubled twisted I-bundle over the Klein bottle is refused.
fn ac7() -> Outcome {
    let s = spec("sol");
    ensure!(s.is_sol_like(), "sol catalog entry is not Sol-like");
    let err = match step_classifier(&s, "e1") {
        Ok(r) => return Err(format!("classified as {}", r.case)),
        Err(e) => e.to_string(),
    };
    ensure!(err.starts_with("excluded: Sol-like"), "unexpected diagnostic `{err}`");
    let bin = env!("CARGO_BIN_EXE_jsjkit");
    let out = std::process::Command::new(bin).args(["verify", "catalog:sol", "--edge", "e1"]).output().map_err(|e| e.to_string())?;
    ensure!(out.status.code() == Some(1), "exit code {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(text.contains("excluded: Sol-like"), "output `{text}`");
    Ok("rejected with exit code 1".to_string())
}

/// Catalog round trip and schema conformance of every report.
fn ac8() -> Outcome {
    let schema: Value = serde_json::from_str(SCHEMA).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let mut docs = 0;
    let mut check = |args: Vec<String>| -> Result<(), String> {
        let out = run(["jsjkit".to_string(), "--json".to_string()].into_iter().chain(args.iter().cloned()));
        let doc: Value = serde_json::from_str(&out.output).map_err(|e| format!("{args:?}: {e}"))?;
        if let Some(err) = validator.iter_errors(&doc).next() {
            return Err(format!("{args:?}: {err} at {}", err.instance_path()));
        }
        ensure!(doc["ok"] == Value::Bool(out.code == 0), "{args:?}: ok flag disagrees with exit code {}", out.code);
        docs += 1;
        Ok(())
    };
    for e in ENTRIES {
        let s = parse_spec(e.text).map_err(|err| format!("{}: {err}", e.name))?;
        let printed = print_spec(&s);
        let again = parse_spec(&printed).map_err(|err| format!("{}: {err}", e.name))?;
        ensure!(again == s, "{}: parse(print(spec)) differs", e.name);
        ensure!(print_spec(&again) == printed, "{}: printing is not stable", e.name);

        let file = format!("catalog:{}", e.name);
        let args = |rest: &[&str]| -> Vec<String> {
            let mut v: Vec<String> = vec![rest[0].to_string(), file.clone()];
            v.extend(rest[1..].iter().map(|s| s.to_string()));
            v
        };
        for cmd in ["validate", "classify", "present"] {
            check(args(&[cmd]))?;
        }
        check(args(&["tree", "--radius", "2"]))?;
        check(args(&["verify", "--edge", "e1", "--radius", "1", "--bound", "1", "--slack", "1"]))?;
        check(args(&["verify", "--edge", "e9"]))?;
        check(args(&["wp", "nonsense^"]))?;
        for p in &s.pieces {
            if let PieceKind::Seifert(_) = p.kind {
                check(args(&["canonicalize", &p.name]))?;
                check(args(&["euler", &p.name]))?;
            }
        }
    }
    check(vec!["leaves".into(), "catalog:leaves".into(), "--v1".into(), "7".into(), "--v2".into(), "8".into(), "--radius".into(), "2".into()])?;
    check(vec!["leaves".into(), "catalog:leaves".into(), "--v1".into(), "7".into(), "--v2".into(), "13".into(), "--radius".into(), "2".into()])?;
    check(vec!["wp".into(), "catalog:d3".into(), "A.c1 e1".into(), "B.c2 e1^-1".into()])?;
    check(vec!["check".into(), "--cases".into(), "20".into()])?;
    check(vec!["no-such-command".into()])?;
    Ok(format!("{} catalog entries round-trip, {docs} reports match the schema", ENTRIES.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "Seifert classification", ac1, 10),
        ("AC2", "word engine", ac2, 30),
        ("AC3", "peripheral malnormality", ac3, 60),
        ("AC4", "leaf intersections", ac4, 120),
        ("AC5", "splitting case table", ac5, 300),
        ("AC6", "tree structure", ac6, 60),
        ("AC7", "Sol exclusion", ac7, 1),
        ("AC8", "CLI round trip and schema", ac8, 5),
    ];
    let mut failed = 0;
    for (id, title, f, limit) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("{id} PASS {title} ({:.2}s): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {title} ({:.2}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
