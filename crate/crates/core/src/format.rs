//! Line-oriented manifold description files.
//!
//! ```text
//! # trefoil complement doubled
//! piece A seifert g=0 h=1 pairs=(2,1)(3,1)
//! piece B seifert g=0 h=1 pairs=(2,1)(3,1)
//! piece K klein
//! piece H hyperbolic slots=2
//! glue A.1 B.1 matrix=[[0,1],[1,0]]
//! orient e+=e1,~e2
//! ```
//!
//! Edges are named `e1, e2, ...` in order of their `glue` lines and point
//! from the first torus to the second; `~eN` in the `orient` line reverses
//! edge `eN`.

use crate::manifold::{Gluing, GraphManifoldSpec, Mat2, Piece, PieceKind, TorusSlot};
use crate::symbol::{parse_pairs, SeifertSymbol};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn key_values<'a>(line: usize, toks: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>, ParseError> {
    toks.iter()
        .map(|t| t.split_once('=').ok_or_else(|| ParseError { line, message: format!("expected key=value, found `{t}`") }))
        .collect()
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ParseError> {
    v.parse().map_err(|_| ParseError { line, message: format!("bad integer for {key}: `{v}`") })
}

fn parse_matrix(line: usize, text: &str) -> Result<Mat2, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|r| r.strip_suffix("]]"))
        .ok_or_else(|| ParseError { line, message: format!("bad matrix `{text}`") })?;
    let nums: Vec<i64> = inner
        .split([',', '[', ']'])
        .filter(|s| !s.is_empty())
        .map(|s| parse_int(line, "matrix", s))
        .collect::<Result<_, _>>()?;
    let rows: Vec<&str> = inner.split("],[").collect();
    if nums.len() != 4 || rows.len() != 2 {
        return fail(line, format!("matrix must be 2x2, found `{text}`"));
    }
    Ok(Mat2([[nums[0], nums[1]], [nums[2], nums[3]]]))
}

pub fn parse_spec(text: &str) -> Result<GraphManifoldSpec, ParseError> {
    let mut spec = GraphManifoldSpec::default();
    let mut orient: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "piece" => {
                if toks.len() < 3 {
                    return fail(line, "expected `piece <name> <kind> ...`");
                }
                let name = toks[1];
                if name.contains('.') || spec.piece_index(name).is_some() {
                    return fail(line, format!("bad or duplicate piece name `{name}`"));
                }
                let kv = key_values(line, &toks[3..])?;
                let kind = match toks[2] {
                    "seifert" => {
                        let (mut g, mut h, mut pairs) = (None, None, Vec::new());
                        for (k, v) in kv {
                            match k {
                                "g" => g = Some(parse_int(line, k, v)?),
                                "h" => h = Some(parse_int(line, k, v)?),
                                "pairs" => {
                                    pairs = parse_pairs(v)
                                        .ok_or_else(|| ParseError { line, message: format!("bad pairs `{v}`") })?
                                }
                                _ => return fail(line, format!("unknown key `{k}`")),
                            }
                        }
                        let (Some(g), Some(h)) = (g, h) else { return fail(line, "seifert piece needs g= and h=") };
                        let s = SeifertSymbol::new(g, h, pairs).map_err(|e| ParseError { line, message: e.to_string() })?;
                        PieceKind::Seifert(s)
                    }
                    "klein" => {
                        if !kv.is_empty() {
                            return fail(line, "klein piece takes no parameters");
                        }
                        PieceKind::Klein
                    }
                    "hyperbolic" => match kv.as_slice() {
                        [("slots", v)] => PieceKind::Hyperbolic { slots: parse_int(line, "slots", v)? },
                        _ => return fail(line, "hyperbolic piece needs slots=<n>"),
                    },
                    other => return fail(line, format!("unknown piece kind `{other}`")),
                };
                spec.pieces.push(Piece { name: name.to_string(), kind });
            }
            "glue" => {
                if toks.len() < 4 {
                    return fail(line, "expected `glue <piece>.<slot> <piece>.<slot> matrix=[[a,b],[c,d]]`");
                }
                let slot = |t: &str| -> Result<TorusSlot, ParseError> {
                    let (name, idx) =
                        t.split_once('.').ok_or_else(|| ParseError { line, message: format!("bad slot `{t}`") })?;
                    let piece = spec
                        .piece_index(name)
                        .ok_or_else(|| ParseError { line, message: format!("unknown piece `{name}`") })?;
                    Ok(TorusSlot { piece, index: parse_int(line, "slot", idx)? })
                };
                let minus = slot(toks[1])?;
                let plus = slot(toks[2])?;
                let rest = toks[3..].join("");
                let Some(m) = rest.strip_prefix("matrix=") else { return fail(line, "expected matrix=") };
                let matrix = parse_matrix(line, m)?;
                spec.gluings.push(Gluing { minus, plus, matrix, reversed: false });
            }
            "orient" => {
                let rest = toks[1..].join("");
                let Some(list) = rest.strip_prefix("e+=") else { return fail(line, "expected `orient e+=<edges>`") };
                if orient.is_some() {
                    return fail(line, "duplicate orient line");
                }
                orient = Some((line, list.to_string()));
            }
            other => return fail(line, format!("unknown directive `{other}`")),
        }
    }
    if let Some((line, list)) = orient {
        for item in list.split(',').filter(|s| !s.is_empty()) {
            let (rev, name) = match item.strip_prefix('~') {
                Some(n) => (true, n),
                None => (false, item),
            };
            let e = spec.edge_index(name).ok_or_else(|| ParseError { line, message: format!("unknown edge `{name}`") })?;
            spec.gluings[e].reversed = rev;
        }
    }
    Ok(spec)
}

pub fn print_spec(spec: &GraphManifoldSpec) -> String {
    let mut out = String::new();
    for p in &spec.pieces {
        match &p.kind {
            PieceKind::Seifert(s) => {
                out += &format!("piece {} seifert g={} h={}", p.name, s.genus(), s.boundary());
                if !s.pairs().is_empty() {
                    let pairs: String = s.pairs().iter().map(|(p, q)| format!("({p},{q})")).collect();
                    out += &format!(" pairs={pairs}");
                }
                out += "\n";
            }
            PieceKind::Klein => out += &format!("piece {} klein\n", p.name),
            PieceKind::Hyperbolic { slots } => out += &format!("piece {} hyperbolic slots={slots}\n", p.name),
        }
    }
    for g in &spec.gluings {
        let name = |s: TorusSlot| format!("{}.{}", spec.pieces[s.piece].name, s.index);
        out += &format!("glue {} {} matrix={}\n", name(g.minus), name(g.plus), g.matrix);
    }
    if spec.gluings.iter().any(|g| g.reversed) {
        let items: Vec<String> = (0..spec.gluings.len())
            .map(|e| {
                let n = GraphManifoldSpec::edge_name(e);
                if spec.gluings[e].reversed {
                    format!("~{n}")
                } else {
                    n
                }
            })
            .collect();
        out += &format!("orient e+={}\n", items.join(","));
    }
    out
}
