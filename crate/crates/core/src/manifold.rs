//! Graph manifolds: pieces, torus gluings, validation and the classification
//! of JSJ edges into the cases that fix their malnormality step.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::symbol::{Geometry, SeifertSymbol, SpecialManifold};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifoldError {
    #[error("no edge {0}")]
    UnknownEdge(usize),
    #[error("excluded: Sol-like ({0})")]
    SolLike(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    Seifert(SeifertSymbol),
    /// The twisted I-bundle over the Klein bottle.
    Klein,
    /// A hyperbolic piece known only through its cusps.
    Hyperbolic { slots: u32 },
}

impl PieceKind {
    pub fn slots(&self) -> u32 {
        match self {
            PieceKind::Seifert(s) => s.boundary(),
            PieceKind::Klein => 1,
            PieceKind::Hyperbolic { slots } => *slots,
        }
    }

    /// Fiber classes in the slot basis: `(0,1)` is the regular fiber, and the
    /// Klein piece also fibers with fiber `a^2`, i.e. `(1,0)`.
    pub fn fiber_classes(&self) -> &'static [(i64, i64)] {
        match self {
            PieceKind::Seifert(_) => &[(0, 1)],
            PieceKind::Klein => &[(0, 1), (1, 0)],
            PieceKind::Hyperbolic { .. } => &[],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PieceKind::Seifert(_) => "seifert",
            PieceKind::Klein => "klein",
            PieceKind::Hyperbolic { .. } => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub name: String,
    pub kind: PieceKind,
}

/// A boundary torus: piece index and 1-based boundary index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusSlot {
    pub piece: usize,
    pub index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn apply(&self, (x, y): (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.0;
        (a * x + b * y, c * x + d * y)
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let det = self.det();
        debug_assert!(det.abs() == 1);
        Mat2([[d * det, -b * det], [-c * det, a * det]])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Gluing of two boundary tori. `matrix` sends coordinates in the basis of
/// `minus` to coordinates in the basis of `plus`. The edge is oriented from
/// `minus` to `plus` unless `reversed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub minus: TorusSlot,
    pub plus: TorusSlot,
    pub matrix: Mat2,
    pub reversed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphManifoldSpec {
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Note,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitCase {
    D1,
    D2,
    D3,
    D4,
    ND1,
    ND2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Amalgam,
    Hnn,
}

impl SplitCase {
    pub fn kind(self) -> SplitKind {
        match self {
            SplitCase::ND1 | SplitCase::ND2 => SplitKind::Hnn,
            _ => SplitKind::Amalgam,
        }
    }

    /// Step `k` of malnormality of the edge group in the one-edge splitting.
    pub fn step(self) -> u32 {
        match self {
            SplitCase::D1 => 0,
            SplitCase::D2 | SplitCase::D3 | SplitCase::ND1 => 1,
            SplitCase::ND2 => 2,
            SplitCase::D4 => 3,
        }
    }

    /// A `k`-step malnormal amalgam is `(k+1)`-acylindrical; an HNN extension
    /// is `k`-acylindrical.
    pub fn acylindricity(self) -> u32 {
        match self.kind() {
            SplitKind::Amalgam => self.step() + 1,
            SplitKind::Hnn => self.step(),
        }
    }
}

impl fmt::Display for SplitCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Hyperbolic,
    Seifert,
    Klein,
}

impl GraphManifoldSpec {
    pub fn piece_index(&self, name: &str) -> Option<usize> {
        self.pieces.iter().position(|p| p.name == name)
    }

    pub fn edge_name(e: usize) -> String {
        format!("e{}", e + 1)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        let n: usize = name.strip_prefix('e')?.parse().ok()?;
        (1..=self.gluings.len()).contains(&n).then_some(n - 1)
    }

    fn gluing(&self, e: usize) -> Result<&Gluing, ManifoldError> {
        self.gluings.get(e).ok_or(ManifoldError::UnknownEdge(e))
    }

    /// Whether the regular fibers on the two sides of the gluing never match
    /// up to sign. Vacuous when a hyperbolic piece is involved.
    pub fn fiber_transverse(&self, e: usize) -> Result<bool, ManifoldError> {
        let g = self.gluing(e)?;
        let minus = self.pieces[g.minus.piece].kind.fiber_classes();
        let plus = self.pieces[g.plus.piece].kind.fiber_classes();
        Ok(minus.iter().all(|&u| {
            let (x, y) = g.matrix.apply(u);
            plus.iter().all(|&(vx, vy)| x * vy - y * vx != 0)
        }))
    }

    pub fn is_sol_like(&self) -> bool {
        !self.pieces.is_empty() && self.pieces.iter().all(|p| p.kind == PieceKind::Klein)
    }

    fn used_slots(&self) -> Vec<TorusSlot> {
        self.gluings.iter().flat_map(|g| [g.minus, g.plus]).collect()
    }

    /// Unglued boundary tori, by piece then index.
    pub fn boundary_tori(&self) -> Vec<TorusSlot> {
        let used = self.used_slots();
        let mut out = Vec::new();
        for (k, p) in self.pieces.iter().enumerate() {
            for i in 1..=p.kind.slots() {
                let s = TorusSlot { piece: k, index: i };
                if !used.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    fn components_without(&self, skip: Option<usize>) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.pieces.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (e, g) in self.gluings.iter().enumerate() {
            if Some(e) == skip || g.minus.piece >= self.pieces.len() || g.plus.piece >= self.pieces.len() {
                continue;
            }
            let (a, b) = (find(&mut parent, g.minus.piece), find(&mut parent, g.plus.piece));
            parent[a] = b;
        }
        (0..self.pieces.len()).map(|x| find(&mut parent, x)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let comp = self.components_without(None);
        comp.windows(2).all(|w| w[0] == w[1])
    }

    /// Whether removing the edge disconnects the graph.
    pub fn edge_separating(&self, e: usize) -> Result<bool, ManifoldError> {
        let g = self.gluing(e)?;
        let comp = self.components_without(Some(e));
        Ok(comp[g.minus.piece] != comp[g.plus.piece])
    }

    fn side(&self, piece: usize) -> Side {
        match self.pieces[piece].kind {
            PieceKind::Seifert(_) => Side::Seifert,
            PieceKind::Klein => Side::Klein,
            PieceKind::Hyperbolic { .. } => Side::Hyperbolic,
        }
    }

    pub fn classify_edge(&self, e: usize) -> Result<SplitCase, ManifoldError> {
        let g = self.gluing(e)?;
        let (a, b) = (self.side(g.minus.piece), self.side(g.plus.piece));
        use Side::*;
        if self.edge_separating(e)? {
            match (a, b) {
                (Hyperbolic, Hyperbolic) => Ok(SplitCase::D1),
                (Hyperbolic, _) | (_, Hyperbolic) => Ok(SplitCase::D2),
                (Seifert, Seifert) => Ok(SplitCase::D3),
                (Seifert, Klein) | (Klein, Seifert) => Ok(SplitCase::D4),
                (Klein, Klein) => Err(ManifoldError::SolLike(format!(
                    "edge {} glues two twisted I-bundles over the Klein bottle",
                    Self::edge_name(e)
                ))),
            }
        } else if (a, b) == (Hyperbolic, Hyperbolic) {
            Ok(SplitCase::ND1)
        } else {
            Ok(SplitCase::ND2)
        }
    }

    pub fn validate(&self) -> Validation {
        let mut diags = Vec::new();
        let mut err = |code: &str, message: String| {
            diags.push(Diagnostic { severity: Severity::Error, code: code.to_string(), message })
        };
        if self.pieces.is_empty() {
            err("empty", "no pieces".to_string());
        }
        for p in &self.pieces {
            if let PieceKind::Seifert(s) = &p.kind {
                if s.boundary() == 0 {
                    err("closed-piece", format!("piece {} ({s}) has no boundary", p.name));
                    continue;
                }
                match s.recognize_special() {
                    SpecialManifold::KleinTimesI => err(
                        "forbidden-piece",
                        format!("piece {} ({s}) is the twisted I-bundle over the Klein bottle; declare it as `klein`", p.name),
                    ),
                    SpecialManifold::SolidTorus | SpecialManifold::TorusTimesInterval => err(
                        "forbidden-piece",
                        format!("piece {} ({s}) is a solid torus or T^2 x I and cannot be a JSJ piece", p.name),
                    ),
                    _ if s.base_orbifold().geometry() != Geometry::Hyperbolic => err(
                        "forbidden-piece",
                        format!("piece {} ({s}) does not have a hyperbolic base orbifold", p.name),
                    ),
                    _ => {}
                }
            }
        }
        let mut seen: Vec<TorusSlot> = Vec::new();
        let mut slots_ok = true;
        for (e, g) in self.gluings.iter().enumerate() {
            let name = Self::edge_name(e);
            for s in [g.minus, g.plus] {
                let Some(piece) = self.pieces.get(s.piece) else {
                    err("bad-slot", format!("edge {name} refers to a missing piece"));
                    slots_ok = false;
                    continue;
                };
                if s.index == 0 || s.index > piece.kind.slots() {
                    err("bad-slot", format!("edge {name}: {} has no boundary torus {}", piece.name, s.index));
                    slots_ok = false;
                } else if seen.contains(&s) {
                    err("slot-reused", format!("edge {name}: torus {}.{} is glued twice", piece.name, s.index));
                } else {
                    seen.push(s);
                }
            }
            if g.matrix.det().abs() != 1 {
                err("matrix", format!("edge {name}: gluing matrix {} is not unimodular", g.matrix));
            }
        }
        if slots_ok {
            for (e, g) in self.gluings.iter().enumerate() {
                let name = Self::edge_name(e);
                if g.matrix.det().abs() == 1 && !self.fiber_transverse(e).unwrap_or(false) {
                    err(
                        "not-transverse",
                        format!("edge {name}: fibers match up to sign across the gluing; the torus is not a JSJ torus"),
                    );
                }
            }
            for s in self.boundary_tori() {
                if self.pieces[s.piece].kind == PieceKind::Klein {
                    err("klein-unglued", format!("klein piece {} must be glued", self.pieces[s.piece].name));
                }
            }
            if !self.pieces.is_empty() && !self.is_connected() {
                err("disconnected", "the gluing graph is not connected".to_string());
            }
        }
        for (e, g) in self.gluings.iter().enumerate() {
            if g.matrix.det().abs() == 1 {
                diags.push(Diagnostic {
                    severity: Severity::Note,
                    code: "orientation".to_string(),
                    message: format!(
                        "edge {}: det = {}; orientability of the glued manifold is not checked",
                        Self::edge_name(e),
                        g.matrix.det()
                    ),
                });
            }
        }
        if self.is_sol_like() && slots_ok {
            diags.push(Diagnostic {
                severity: Severity::Warning,
                code: "sol-like".to_string(),
                message: "every piece is a twisted I-bundle over the Klein bottle; the manifold is Sol-like and excluded from the splitting analysis".to_string(),
            });
        }
        let has_klein = self.pieces.iter().any(|p| p.kind == PieceKind::Klein);
        if has_klein && slots_ok && (0..self.gluings.len()).any(|e| !self.edge_separating(e).unwrap_or(true)) {
            diags.push(Diagnostic {
                severity: Severity::Warning,
                code: "klein-cycle".to_string(),
                message: "klein pieces together with a cycle in the gluing graph; step bounds are per edge".to_string(),
            });
        }
        let valid = !diags.iter().any(|d| d.severity == Severity::Error);
        Validation { valid, diagnostics: diags }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seifert(name: &str, s: &str) -> Piece {
        Piece { name: name.to_string(), kind: PieceKind::Seifert(s.parse().unwrap()) }
    }

    fn glue(a: (usize, u32), b: (usize, u32), m: [[i64; 2]; 2]) -> Gluing {
        Gluing {
            minus: TorusSlot { piece: a.0, index: a.1 },
            plus: TorusSlot { piece: b.0, index: b.1 },
            matrix: Mat2(m),
            reversed: false,
        }
    }

    fn trefoil_double(m: [[i64; 2]; 2]) -> GraphManifoldSpec {
        GraphManifoldSpec {
            pieces: vec![seifert("A", "S(0,1;(2,1),(3,1))"), seifert("B", "S(0,1;(2,1),(3,1))")],
            gluings: vec![glue((0, 1), (1, 1), m)],
        }
    }

    #[test]
    fn transversality_examples() {
        assert!(trefoil_double([[0, 1], [1, 0]]).fiber_transverse(0).unwrap());
        assert!(!trefoil_double([[1, 0], [2, 1]]).fiber_transverse(0).unwrap());
        assert!(!trefoil_double([[1, 0], [0, 1]]).fiber_transverse(0).unwrap());
        let mut k = trefoil_double([[0, 1], [1, 0]]);
        k.pieces[1].kind = PieceKind::Klein;
        // (0,1) goes to (1,0), which is the other Klein fiber.
        assert!(!k.fiber_transverse(0).unwrap());
        k.gluings[0].matrix = Mat2([[0, 1], [1, 1]]);
        assert!(k.fiber_transverse(0).unwrap());
    }

    #[test]
    fn validation_examples() {
        assert!(trefoil_double([[0, 1], [1, 0]]).validate().valid);
        let bad = trefoil_double([[1, 0], [0, 1]]).validate();
        assert!(!bad.valid);
        assert!(bad.diagnostics.iter().any(|d| d.code == "not-transverse"));
        let mut solid = trefoil_double([[0, 1], [1, 0]]);
        solid.pieces[1] = seifert("B", "S(0,1;(5,2))");
        assert!(solid.validate().diagnostics.iter().any(|d| d.code == "forbidden-piece"));
        let mut kb = trefoil_double([[0, 1], [1, 0]]);
        kb.pieces[1] = seifert("B", "S(0,1;(2,1),(2,1))");
        assert!(!kb.validate().valid);
    }

    #[test]
    fn klein_must_be_glued() {
        let spec = GraphManifoldSpec {
            pieces: vec![seifert("A", "S(0,2;(2,1),(3,1))"), Piece { name: "K".into(), kind: PieceKind::Klein }],
            gluings: vec![],
        };
        let v = spec.validate();
        assert!(v.diagnostics.iter().any(|d| d.code == "klein-unglued"));
        assert!(v.diagnostics.iter().any(|d| d.code == "disconnected"));
    }

    #[test]
    fn edge_cases() {
        let hyp = |name: &str, slots| Piece { name: name.into(), kind: PieceKind::Hyperbolic { slots } };
        let d1 = GraphManifoldSpec { pieces: vec![hyp("H", 1), hyp("J", 1)], gluings: vec![glue((0, 1), (1, 1), [[1, 0], [0, 1]])] };
        assert_eq!(d1.classify_edge(0).unwrap(), SplitCase::D1);
        let nd1 = GraphManifoldSpec { pieces: vec![hyp("H", 2)], gluings: vec![glue((0, 1), (0, 2), [[1, 0], [0, 1]])] };
        assert_eq!(nd1.classify_edge(0).unwrap(), SplitCase::ND1);
        assert_eq!(trefoil_double([[0, 1], [1, 0]]).classify_edge(0).unwrap(), SplitCase::D3);
        let loop2 = GraphManifoldSpec {
            pieces: vec![seifert("A", "S(0,2;(2,1))")],
            gluings: vec![glue((0, 1), (0, 2), [[0, 1], [1, 0]])],
        };
        assert!(!loop2.edge_separating(0).unwrap());
        assert_eq!(loop2.classify_edge(0).unwrap(), SplitCase::ND2);
        let kk = GraphManifoldSpec {
            pieces: vec![Piece { name: "K".into(), kind: PieceKind::Klein }, Piece { name: "L".into(), kind: PieceKind::Klein }],
            gluings: vec![glue((0, 1), (1, 1), [[1, 1], [1, 2]])],
        };
        assert!(kk.is_sol_like());
        assert!(matches!(kk.classify_edge(0), Err(ManifoldError::SolLike(_))));
    }

    #[test]
    fn step_table() {
        let table: Vec<(u32, u32)> = [SplitCase::D1, SplitCase::D2, SplitCase::D3, SplitCase::D4, SplitCase::ND1, SplitCase::ND2]
            .iter()
            .map(|c| (c.step(), c.acylindricity()))
            .collect();
        assert_eq!(table, vec![(0, 1), (1, 2), (1, 2), (3, 4), (1, 1), (2, 2)]);
    }

    #[test]
    fn matrix_inverse() {
        for m in [[[0, 1], [1, 0]], [[2, 1], [1, 1]], [[1, 1], [0, -1]]] {
            let m = Mat2(m);
            let inv = m.inverse();
            for v in [(1, 0), (0, 1), (3, -2)] {
                assert_eq!(inv.apply(m.apply(v)), v);
            }
        }
    }
}
