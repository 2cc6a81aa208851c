//! Graphs of groups with `Z^2` edge groups and their path words.
//!
//! A word `w0 e1 w1 ... en wn` is a path in the underlying graph with a
//! vertex-group letter at every stop. Closed words at a base vertex are the
//! elements of the fundamental group; open ones name Bass-Serre tree
//! vertices. For an oriented edge `e` with source end `S` and target end `T`
//! the defining relation is `e T(z) e^-1 = S(z)`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::klein::KleinElement;
use crate::manifold::{GraphManifoldSpec, Mat2, PieceKind};
use crate::orbifold::{parse_powers, power_text};
use crate::seifert::{GroupError, SeifertElement, SeifertGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GogError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cannot parse word: {0}")]
    Parse(String),
    #[error("word is not a path: {0}")]
    NotAPath(String),
    #[error("the spec is not valid: {0}")]
    InvalidSpec(String),
    #[error("no boundary tori: the peripheral extension needs at least one")]
    NoBoundary,
}

/// A letter of a hyperbolic stub group: a peripheral element of one cusp or
/// an opaque generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StubAtom {
    Peripheral { slot: u32, m: i64, n: i64 },
    Opaque { gen: u32, inv: bool },
}

/// Stub elements are kept syntactically: cusp subgroups only interact with
/// themselves, so a letter is peripheral only when it literally is one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StubElement(pub Vec<StubAtom>);

impl StubElement {
    fn push(&mut self, a: StubAtom) {
        match (self.0.last().copied(), a) {
            (Some(StubAtom::Peripheral { slot: s1, m: m1, n: n1 }), StubAtom::Peripheral { slot: s2, m: m2, n: n2 })
                if s1 == s2 =>
            {
                self.0.pop();
                if (m1 + m2, n1 + n2) != (0, 0) {
                    self.0.push(StubAtom::Peripheral { slot: s1, m: m1 + m2, n: n1 + n2 });
                }
            }
            (Some(StubAtom::Opaque { gen: g1, inv: i1 }), StubAtom::Opaque { gen: g2, inv: i2 }) if g1 == g2 && i1 != i2 => {
                self.0.pop();
            }
            (_, StubAtom::Peripheral { m: 0, n: 0, .. }) => {}
            _ => self.0.push(a),
        }
    }

    fn multiply(&self, other: &StubElement) -> StubElement {
        let mut out = self.clone();
        for &a in &other.0 {
            out.push(a);
        }
        out
    }

    fn inverse(&self) -> StubElement {
        StubElement(
            self.0
                .iter()
                .rev()
                .map(|&a| match a {
                    StubAtom::Peripheral { slot, m, n } => StubAtom::Peripheral { slot, m: -m, n: -n },
                    StubAtom::Opaque { gen, inv } => StubAtom::Opaque { gen, inv: !inv },
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexGroup {
    Seifert(SeifertGroup),
    Klein,
    /// `Z^2`, used for the boundary-torus leaves.
    Torus,
    Stub { slots: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexElement {
    Seifert(SeifertElement),
    Klein(KleinElement),
    Torus(i64, i64),
    Stub(StubElement),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Seifert,
    Klein,
    Hyperbolic,
    Peripheral,
}

impl VertexGroup {
    pub fn kind(&self) -> VertexKind {
        match self {
            VertexGroup::Seifert(_) => VertexKind::Seifert,
            VertexGroup::Klein => VertexKind::Klein,
            VertexGroup::Torus => VertexKind::Peripheral,
            VertexGroup::Stub { .. } => VertexKind::Hyperbolic,
        }
    }

    pub fn identity(&self) -> VertexElement {
        match self {
            VertexGroup::Seifert(g) => VertexElement::Seifert(g.identity()),
            VertexGroup::Klein => VertexElement::Klein(KleinElement::IDENTITY),
            VertexGroup::Torus => VertexElement::Torus(0, 0),
            VertexGroup::Stub { .. } => VertexElement::Stub(StubElement::default()),
        }
    }

    pub fn is_identity(&self, x: &VertexElement) -> bool {
        *x == self.identity()
    }

    pub fn multiply(&self, x: &VertexElement, y: &VertexElement) -> VertexElement {
        match (self, x, y) {
            (VertexGroup::Seifert(g), VertexElement::Seifert(a), VertexElement::Seifert(b)) => {
                VertexElement::Seifert(g.multiply(a, b))
            }
            (VertexGroup::Klein, VertexElement::Klein(a), VertexElement::Klein(b)) => VertexElement::Klein(a.multiply(*b)),
            (VertexGroup::Torus, VertexElement::Torus(a, b), VertexElement::Torus(c, d)) => {
                VertexElement::Torus(a + c, b + d)
            }
            (VertexGroup::Stub { .. }, VertexElement::Stub(a), VertexElement::Stub(b)) => VertexElement::Stub(a.multiply(b)),
            _ => panic!("vertex element does not belong to this vertex group"),
        }
    }

    pub fn inverse(&self, x: &VertexElement) -> VertexElement {
        match (self, x) {
            (VertexGroup::Seifert(g), VertexElement::Seifert(a)) => VertexElement::Seifert(g.inverse(a)),
            (VertexGroup::Klein, VertexElement::Klein(a)) => VertexElement::Klein(a.inverse()),
            (VertexGroup::Torus, VertexElement::Torus(a, b)) => VertexElement::Torus(-a, -b),
            (VertexGroup::Stub { .. }, VertexElement::Stub(a)) => VertexElement::Stub(a.inverse()),
            _ => panic!("vertex element does not belong to this vertex group"),
        }
    }

    pub fn conjugate(&self, g: &VertexElement, x: &VertexElement) -> VertexElement {
        self.multiply(&self.multiply(g, x), &self.inverse(g))
    }

    /// Coordinates in the basis of boundary slot `slot`, if `x` lies in that
    /// peripheral subgroup.
    pub fn peripheral(&self, x: &VertexElement, slot: u32) -> Option<(i64, i64)> {
        match (self, x) {
            (VertexGroup::Seifert(g), VertexElement::Seifert(a)) => g.peripheral_membership(a, slot).ok().flatten(),
            (VertexGroup::Klein, VertexElement::Klein(a)) => a.peripheral(),
            (VertexGroup::Torus, VertexElement::Torus(a, b)) => Some((*a, *b)),
            (VertexGroup::Stub { .. }, VertexElement::Stub(s)) => match s.0.as_slice() {
                [] => Some((0, 0)),
                [StubAtom::Peripheral { slot: t, m, n }] if *t == slot => Some((*m, *n)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn from_peripheral(&self, slot: u32, z: (i64, i64)) -> VertexElement {
        match self {
            VertexGroup::Seifert(g) => VertexElement::Seifert(g.from_peripheral(slot, z).expect("slot of this piece")),
            VertexGroup::Klein => VertexElement::Klein(KleinElement::from_peripheral(z)),
            VertexGroup::Torus => VertexElement::Torus(z.0, z.1),
            VertexGroup::Stub { .. } => {
                let mut s = StubElement::default();
                s.push(StubAtom::Peripheral { slot, m: z.0, n: z.1 });
                VertexElement::Stub(s)
            }
        }
    }

    /// Canonical representative of the left coset `x P` of the peripheral
    /// subgroup `P` at `slot`.
    pub fn coset_rep(&self, x: &VertexElement, slot: u32) -> VertexElement {
        match (self, x) {
            (VertexGroup::Seifert(g), VertexElement::Seifert(a)) => {
                VertexElement::Seifert(g.coset_rep(a, slot).expect("slot of this piece"))
            }
            (VertexGroup::Klein, VertexElement::Klein(a)) => VertexElement::Klein(a.coset_rep()),
            (VertexGroup::Torus, _) => VertexElement::Torus(0, 0),
            (VertexGroup::Stub { .. }, VertexElement::Stub(s)) => {
                let mut s = s.clone();
                if let Some(StubAtom::Peripheral { slot: t, .. }) = s.0.last() {
                    if *t == slot {
                        s.0.pop();
                    }
                }
                VertexElement::Stub(s)
            }
            _ => panic!("vertex element does not belong to this vertex group"),
        }
    }

    /// Ball of the given radius up to fiber powers: for Seifert pieces the
    /// lifts of the orbifold ball, for the Klein piece the powers of `a`.
    /// Stub groups contribute only the identity.
    pub fn ball_mod_fiber(&self, radius: usize) -> Vec<VertexElement> {
        match self {
            VertexGroup::Seifert(g) => {
                let sig = g.signature();
                crate::orbifold::ball(
                    crate::orbifold::OrbWord::identity(),
                    &sig.ball_generators(),
                    |a, b| sig.multiply(a, b),
                    radius,
                )
                .into_iter()
                .map(|orb| VertexElement::Seifert(SeifertElement { orb, fiber: 0 }))
                .collect()
            }
            VertexGroup::Klein => {
                let r = radius as i64;
                let mut out = vec![VertexElement::Klein(KleinElement::IDENTITY)];
                for m in 1..=r {
                    out.push(VertexElement::Klein(KleinElement::new(m, 0)));
                    out.push(VertexElement::Klein(KleinElement::new(-m, 0)));
                }
                out
            }
            VertexGroup::Torus | VertexGroup::Stub { .. } => vec![self.identity()],
        }
    }

    /// Distinct coset representatives mod the peripheral subgroup at `slot`
    /// among the ball of the given radius, identity first, in ball order.
    pub fn coset_reps(&self, slot: u32, radius: usize) -> Vec<VertexElement> {
        let mut out: Vec<VertexElement> = Vec::new();
        for x in self.ball_mod_fiber(radius) {
            let r = self.coset_rep(&x, slot);
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// Generator tokens of the element, without any vertex prefix.
    pub fn tokens(&self, x: &VertexElement) -> Vec<String> {
        let text = match (self, x) {
            (VertexGroup::Seifert(g), VertexElement::Seifert(a)) => g.display(a),
            (VertexGroup::Klein, VertexElement::Klein(a)) => a.display(),
            (VertexGroup::Torus, VertexElement::Torus(a, b)) => {
                let mut parts = Vec::new();
                if *a != 0 {
                    parts.push(power_text("x", *a));
                }
                if *b != 0 {
                    parts.push(power_text("y", *b));
                }
                parts.join(" ")
            }
            (VertexGroup::Stub { .. }, VertexElement::Stub(s)) => s
                .0
                .iter()
                .flat_map(|a| match *a {
                    StubAtom::Peripheral { slot, m, n } => {
                        let mut v = Vec::new();
                        if m != 0 {
                            v.push(power_text(&format!("u{slot}"), m));
                        }
                        if n != 0 {
                            v.push(power_text(&format!("v{slot}"), n));
                        }
                        v
                    }
                    StubAtom::Opaque { gen, inv } => vec![power_text(&format!("x{gen}"), if inv { -1 } else { 1 })],
                })
                .collect::<Vec<_>>()
                .join(" "),
            _ => panic!("vertex element does not belong to this vertex group"),
        };
        text.split_whitespace().filter(|t| *t != "1").map(str::to_string).collect()
    }

    pub fn parse_element(&self, text: &str) -> Result<VertexElement, GogError> {
        let bad = |m: String| GogError::Parse(m);
        match self {
            VertexGroup::Seifert(g) => Ok(VertexElement::Seifert(g.parse_word(text)?)),
            _ => {
                let mut x = self.identity();
                for (name, e) in parse_powers(text).map_err(|e| bad(e.to_string()))? {
                    let y = match (self, name.as_str()) {
                        (VertexGroup::Klein, "a") => VertexElement::Klein(KleinElement::new(e, 0)),
                        (VertexGroup::Klein, "f") => VertexElement::Klein(KleinElement::new(0, e)),
                        (VertexGroup::Torus, "x") => VertexElement::Torus(e, 0),
                        (VertexGroup::Torus, "y") => VertexElement::Torus(0, e),
                        (VertexGroup::Stub { slots }, n) => {
                            let (head, idx) = n.split_at(1);
                            let i: u32 = idx.parse().map_err(|_| bad(format!("unknown generator {n}")))?;
                            let atom = match head {
                                "u" | "v" if i == 0 || i > *slots => return Err(bad(format!("no cusp {i}"))),
                                "u" => StubAtom::Peripheral { slot: i, m: 1, n: 0 },
                                "v" => StubAtom::Peripheral { slot: i, m: 0, n: 1 },
                                "x" => StubAtom::Opaque { gen: i, inv: false },
                                _ => return Err(bad(format!("unknown generator {n}"))),
                            };
                            let mut s = StubElement::default();
                            let a = if e < 0 {
                                StubElement(vec![atom]).inverse().0[0]
                            } else {
                                atom
                            };
                            for _ in 0..e.unsigned_abs() {
                                s.push(a);
                            }
                            VertexElement::Stub(s)
                        }
                        _ => return Err(bad(format!("unknown generator {name}"))),
                    };
                    x = self.multiply(&x, &y);
                }
                Ok(x)
            }
        }
    }

    /// `basis` names of the peripheral generators at `slot`.
    fn peripheral_names(&self, slot: u32) -> (String, String) {
        match self {
            VertexGroup::Seifert(_) => (format!("d{slot}"), "f".to_string()),
            VertexGroup::Klein => ("a^2".to_string(), "f".to_string()),
            VertexGroup::Torus => ("x".to_string(), "y".to_string()),
            VertexGroup::Stub { .. } => (format!("u{slot}"), format!("v{slot}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeEnd {
    pub vertex: usize,
    pub slot: u32,
    /// Edge-group coordinates to slot coordinates.
    pub matrix: Mat2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogVertex {
    pub name: String,
    pub group: VertexGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GogEdge {
    pub name: String,
    pub ends: [EdgeEnd; 2],
    /// `false` for the leaf edges of the peripheral extension.
    pub jsj: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DirEdge {
    pub edge: usize,
    pub rev: bool,
}

impl DirEdge {
    pub fn reversed(self) -> DirEdge {
        DirEdge { edge: self.edge, rev: !self.rev }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GogWord {
    pub start: usize,
    pub letters: Vec<VertexElement>,
    pub edges: Vec<DirEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    pub vertices: Vec<GogVertex>,
    pub edges: Vec<GogEdge>,
    /// Membership of each edge in the maximal tree.
    pub tree: Vec<bool>,
}

impl GraphOfGroups {
    /// The JSJ graph of groups of a valid spec: one vertex per piece and one
    /// edge per gluing, oriented as declared.
    pub fn jsj(spec: &GraphManifoldSpec) -> Result<Self, GogError> {
        let v = spec.validate();
        if !v.valid {
            let msgs: Vec<String> = v
                .diagnostics
                .iter()
                .filter(|d| d.severity == crate::manifold::Severity::Error)
                .map(|d| d.message.clone())
                .collect();
            return Err(GogError::InvalidSpec(msgs.join("; ")));
        }
        let mut vertices = Vec::new();
        for p in &spec.pieces {
            let group = match &p.kind {
                PieceKind::Seifert(s) => VertexGroup::Seifert(SeifertGroup::new(s)?),
                PieceKind::Klein => VertexGroup::Klein,
                PieceKind::Hyperbolic { slots } => VertexGroup::Stub { slots: *slots },
            };
            vertices.push(GogVertex { name: p.name.clone(), group });
        }
        let mut edges = Vec::new();
        for (e, g) in spec.gluings.iter().enumerate() {
            let minus = EdgeEnd { vertex: g.minus.piece, slot: g.minus.index, matrix: Mat2::IDENTITY };
            let plus = EdgeEnd { vertex: g.plus.piece, slot: g.plus.index, matrix: g.matrix };
            let ends = if g.reversed {
                [
                    EdgeEnd { vertex: g.plus.piece, slot: g.plus.index, matrix: Mat2::IDENTITY },
                    EdgeEnd { vertex: g.minus.piece, slot: g.minus.index, matrix: g.matrix.inverse() },
                ]
            } else {
                [minus, plus]
            };
            edges.push(GogEdge { name: GraphManifoldSpec::edge_name(e), ends, jsj: true });
        }
        let mut gog = GraphOfGroups { vertices, edges, tree: Vec::new() };
        gog.tree = gog.maximal_tree();
        Ok(gog)
    }

    /// The JSJ graph of groups with a `Z^2` leaf glued along every boundary
    /// torus. Leaf edges point from the leaf to the piece.
    pub fn peripheral_extension(spec: &GraphManifoldSpec) -> Result<Self, GogError> {
        let mut gog = Self::jsj(spec)?;
        let tori = spec.boundary_tori();
        if tori.is_empty() {
            return Err(GogError::NoBoundary);
        }
        for s in tori {
            let leaf = gog.vertices.len();
            let name = format!("{}.{}", spec.pieces[s.piece].name, s.index);
            gog.vertices.push(GogVertex { name: format!("@{name}"), group: VertexGroup::Torus });
            gog.edges.push(GogEdge {
                name: format!("p{name}"),
                ends: [
                    EdgeEnd { vertex: leaf, slot: 1, matrix: Mat2::IDENTITY },
                    EdgeEnd { vertex: s.piece, slot: s.index, matrix: Mat2::IDENTITY },
                ],
                jsj: false,
            });
        }
        gog.tree = gog.maximal_tree();
        Ok(gog)
    }

    /// Breadth-first spanning tree from vertex 0, edges tried in index order.
    pub fn maximal_tree(&self) -> Vec<bool> {
        let mut tree = vec![false; self.edges.len()];
        if self.vertices.is_empty() {
            return tree;
        }
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (e, edge) in self.edges.iter().enumerate() {
                for (a, b) in [(0, 1), (1, 0)] {
                    if edge.ends[a].vertex == x && !seen[edge.ends[b].vertex] {
                        seen[edge.ends[b].vertex] = true;
                        tree[e] = true;
                        queue.push_back(edge.ends[b].vertex);
                    }
                }
            }
        }
        tree
    }

    pub fn group(&self, v: usize) -> &VertexGroup {
        &self.vertices[v].group
    }

    pub fn source(&self, e: DirEdge) -> EdgeEnd {
        self.edges[e.edge].ends[e.rev as usize]
    }

    pub fn target(&self, e: DirEdge) -> EdgeEnd {
        self.edges[e.edge].ends[1 - e.rev as usize]
    }

    /// Oriented edges leaving `v`, by edge index, positive direction first.
    pub fn out_edges(&self, v: usize) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            for rev in [false, true] {
                let d = DirEdge { edge: e, rev };
                if self.source(d).vertex == v {
                    out.push(d);
                }
            }
        }
        out
    }

    /// `S(z)`: the image of edge-group coordinates in the source vertex.
    pub fn edge_image_at_source(&self, e: DirEdge, z: (i64, i64)) -> VertexElement {
        let s = self.source(e);
        self.group(s.vertex).from_peripheral(s.slot, s.matrix.apply(z))
    }

    pub fn edge_image_at_target(&self, e: DirEdge, z: (i64, i64)) -> VertexElement {
        self.edge_image_at_source(e.reversed(), z)
    }

    pub fn vertex_word(&self, v: usize, x: VertexElement) -> GogWord {
        GogWord { start: v, letters: vec![x], edges: Vec::new() }
    }

    pub fn identity_at(&self, v: usize) -> GogWord {
        self.vertex_word(v, self.group(v).identity())
    }

    pub fn edge_word(&self, e: DirEdge) -> GogWord {
        let (s, t) = (self.source(e).vertex, self.target(e).vertex);
        GogWord { start: s, letters: vec![self.group(s).identity(), self.group(t).identity()], edges: vec![e] }
    }

    pub fn end_vertex(&self, w: &GogWord) -> usize {
        w.edges.last().map_or(w.start, |&e| self.target(e).vertex)
    }

    pub fn check_path(&self, w: &GogWord) -> Result<(), GogError> {
        if w.letters.len() != w.edges.len() + 1 {
            return Err(GogError::NotAPath("letter and edge counts disagree".into()));
        }
        let mut at = w.start;
        for &e in &w.edges {
            if self.source(e).vertex != at {
                return Err(GogError::NotAPath(format!("edge {} does not leave {}", self.edges[e.edge].name, self.vertices[at].name)));
            }
            at = self.target(e).vertex;
        }
        Ok(())
    }

    /// Removes every pinch `e w e^-1` with `w` in the image of the edge group,
    /// returning a reduced word for the same element.
    pub fn reduce(&self, w: &GogWord) -> GogWord {
        let mut letters = Vec::with_capacity(w.letters.len());
        letters.push(w.letters[0].clone());
        let mut edges: Vec<DirEdge> = Vec::with_capacity(w.edges.len());
        for (i, &e) in w.edges.iter().enumerate() {
            let mut pinched = false;
            if let Some(&last) = edges.last() {
                if last == e.reversed() {
                    let t = self.target(last);
                    if let Some(y) = self.group(t.vertex).peripheral(letters.last().expect("nonempty"), t.slot) {
                        let z = t.matrix.inverse().apply(y);
                        let x = self.edge_image_at_source(last, z);
                        letters.pop();
                        edges.pop();
                        let s = self.source(last).vertex;
                        let top = letters.last_mut().expect("nonempty");
                        *top = self.group(s).multiply(top, &x);
                        pinched = true;
                    }
                }
            }
            if !pinched {
                edges.push(e);
                letters.push(self.group(self.target(e).vertex).identity());
            }
            let v = edges.last().map_or(w.start, |&d| self.target(d).vertex);
            let top = letters.last_mut().expect("nonempty");
            *top = self.group(v).multiply(top, &w.letters[i + 1]);
        }
        GogWord { start: w.start, letters, edges }
    }

    pub fn is_reduced(&self, w: &GogWord) -> bool {
        (1..w.edges.len()).all(|i| {
            let (a, b) = (w.edges[i - 1], w.edges[i]);
            b != a.reversed() || self.group(self.target(a).vertex).peripheral(&w.letters[i], self.target(a).slot).is_none()
        })
    }

    /// Concatenation; `u` must end where `v` starts.
    pub fn multiply(&self, u: &GogWord, v: &GogWord) -> GogWord {
        let joint = self.end_vertex(u);
        assert_eq!(joint, v.start, "words do not compose");
        let mut letters = u.letters.clone();
        let last = letters.pop().expect("nonempty");
        letters.push(self.group(joint).multiply(&last, &v.letters[0]));
        letters.extend(v.letters[1..].iter().cloned());
        let mut edges = u.edges.clone();
        edges.extend(&v.edges);
        self.reduce(&GogWord { start: u.start, letters, edges })
    }

    pub fn inverse(&self, w: &GogWord) -> GogWord {
        let end = self.end_vertex(w);
        let n = w.edges.len();
        let mut letters = Vec::with_capacity(n + 1);
        let mut at = end;
        for i in (0..=n).rev() {
            letters.push(self.group(at).inverse(&w.letters[i]));
            if i > 0 {
                at = self.source(w.edges[i - 1]).vertex;
            }
        }
        let edges = w.edges.iter().rev().map(|e| e.reversed()).collect();
        GogWord { start: end, letters, edges }
    }

    pub fn conjugate(&self, g: &GogWord, x: &GogWord) -> GogWord {
        self.multiply(&self.multiply(g, x), &self.inverse(g))
    }

    pub fn is_identity(&self, w: &GogWord) -> bool {
        let r = self.reduce(w);
        r.edges.is_empty() && self.group(r.start).is_identity(&r.letters[0])
    }

    pub fn equal(&self, u: &GogWord, v: &GogWord) -> bool {
        u.start == v.start && self.end_vertex(u) == self.end_vertex(v) && self.is_identity(&self.multiply(&self.inverse(u), v))
    }

    /// Number of occurrences of the edge, in either direction.
    pub fn e_length(&self, w: &GogWord, edge: usize) -> usize {
        w.edges.iter().filter(|d| d.edge == edge).count()
    }

    /// Edge-group coordinates of `w` when it is a single letter at the source
    /// of `e` lying in the image of the edge group there.
    pub fn in_edge_group(&self, w: &GogWord, e: DirEdge) -> Option<(i64, i64)> {
        let r = self.reduce(w);
        let s = self.source(e);
        if !r.edges.is_empty() || r.start != s.vertex {
            return None;
        }
        let y = self.group(s.vertex).peripheral(&r.letters[0], s.slot)?;
        Some(s.matrix.inverse().apply(y))
    }

    pub fn display(&self, w: &GogWord) -> String {
        let mut toks = Vec::new();
        let mut at = w.start;
        for (i, x) in w.letters.iter().enumerate() {
            for t in self.group(at).tokens(x) {
                toks.push(format!("{}.{t}", self.vertices[at].name));
            }
            if let Some(&e) = w.edges.get(i) {
                let name = &self.edges[e.edge].name;
                toks.push(if e.rev { format!("{name}^-1") } else { name.clone() });
                at = self.target(e).vertex;
            }
        }
        if toks.is_empty() || w.letters[0] == self.group(w.start).identity() && !toks[0].contains('.') {
            toks.insert(0, self.vertices[w.start].name.clone());
        }
        toks.join(" ")
    }

    fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    fn edge_token(&self, tok: &str) -> Option<DirEdge> {
        let (name, rev) = match tok.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (tok.strip_suffix("^1").unwrap_or(tok), false),
        };
        self.edges.iter().position(|e| e.name == name).map(|edge| DirEdge { edge, rev })
    }

    /// Parses words such as `A e1 B.c1^2 e1^-1 A.d1`. A bare vertex name
    /// fixes the current vertex; `X.gen^k` multiplies a letter at `X`.
    pub fn parse_word(&self, text: &str) -> Result<GogWord, GogError> {
        let mut word: Option<GogWord> = None;
        let at = |w: &GogWord| self.end_vertex(w);
        for tok in text.split_whitespace() {
            if let Some(e) = self.edge_token(tok) {
                let w = word.get_or_insert_with(|| self.identity_at(self.source(e).vertex));
                if at(w) != self.source(e).vertex {
                    return Err(GogError::NotAPath(format!("edge {tok} does not leave {}", self.vertices[at(w)].name)));
                }
                w.edges.push(e);
                w.letters.push(self.group(self.target(e).vertex).identity());
                continue;
            }
            let (vname, gen) = match tok.split_once('.') {
                Some((v, g)) => (v, Some(g)),
                None => (tok, None),
            };
            let v = self.vertex_index(vname).ok_or_else(|| GogError::Parse(format!("unknown token `{tok}`")))?;
            let w = word.get_or_insert_with(|| self.identity_at(v));
            if at(w) != v {
                return Err(GogError::NotAPath(format!("`{tok}` is not at the current vertex {}", self.vertices[at(w)].name)));
            }
            if let Some(g) = gen {
                let x = self.group(v).parse_element(g)?;
                let top = w.letters.last_mut().expect("nonempty");
                *top = self.group(v).multiply(top, &x);
            }
        }
        word.ok_or_else(|| GogError::Parse("empty word".into()))
    }

    /// Presentation of the fundamental group: vertex presentations, the
    /// edge relations `t S(z) t^-1 = T(z)`... written with the tree edges
    /// set to 1.
    pub fn presentation_text(&self) -> String {
        let mut gens = Vec::new();
        let mut rels = Vec::new();
        for v in &self.vertices {
            let n = &v.name;
            match &v.group {
                VertexGroup::Seifert(g) => {
                    let s = g.symbol();
                    let mut local = Vec::new();
                    if s.genus() >= 0 {
                        for i in 1..=s.genus() {
                            local.extend([format!("a{i}"), format!("b{i}")]);
                        }
                    } else {
                        for i in 1..=-s.genus() {
                            local.push(format!("a{i}"));
                        }
                    }
                    for j in 1..=s.pairs().len() {
                        local.push(format!("c{j}"));
                    }
                    for l in 1..=s.boundary() {
                        local.push(format!("d{l}"));
                    }
                    for x in &local {
                        let sign = if x.starts_with('a') && s.genus() < 0 { "^-1" } else { "" };
                        rels.push(format!("{n}.{x} {n}.f {n}.{x}^-1 = {n}.f{sign}"));
                    }
                    for (j, (p, q)) in s.pairs().iter().enumerate() {
                        rels.push(format!("{n}.c{}^{p} {n}.f^{q} = 1", j + 1));
                    }
                    let mut long: Vec<String> = Vec::new();
                    if s.genus() >= 0 {
                        for i in 1..=s.genus() {
                            long.push(format!("[{n}.a{i},{n}.b{i}]"));
                        }
                    } else {
                        for i in 1..=-s.genus() {
                            long.push(format!("{n}.a{i}^2"));
                        }
                    }
                    for j in 1..=s.pairs().len() {
                        long.push(format!("{n}.c{j}"));
                    }
                    for l in 1..=s.boundary() {
                        long.push(format!("{n}.d{l}"));
                    }
                    rels.push(format!("{} = 1", long.join(" ")));
                    local.push("f".to_string());
                    gens.extend(local.iter().map(|x| format!("{n}.{x}")));
                }
                VertexGroup::Klein => {
                    gens.extend([format!("{n}.a"), format!("{n}.f")]);
                    rels.push(format!("{n}.a {n}.f {n}.a^-1 = {n}.f^-1"));
                }
                VertexGroup::Torus => {
                    gens.extend([format!("{n}.x"), format!("{n}.y")]);
                    rels.push(format!("[{n}.x,{n}.y] = 1"));
                }
                VertexGroup::Stub { slots } => {
                    for i in 1..=*slots {
                        gens.extend([format!("{n}.u{i}"), format!("{n}.v{i}")]);
                        rels.push(format!("[{n}.u{i},{n}.v{i}] = 1"));
                    }
                    rels.push(format!("{n}: further relations of the hyperbolic piece left opaque"));
                }
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let side = |end: &EdgeEnd, z: (i64, i64)| {
                let g = self.group(end.vertex);
                let (bx, by) = g.peripheral_names(end.slot);
                let (m, k) = end.matrix.apply(z);
                let n = &self.vertices[end.vertex].name;
                let mut parts = Vec::new();
                if m != 0 {
                    parts.push(power_text(&format!("{n}.{bx}"), m));
                }
                if k != 0 {
                    parts.push(power_text(&format!("{n}.{by}"), k));
                }
                parts.join(" ")
            };
            let t = format!("t_{}", edge.name);
            if !self.tree[e] {
                gens.push(t.clone());
            }
            for z in [(1, 0), (0, 1)] {
                let (src, dst) = (side(&edge.ends[0], z), side(&edge.ends[1], z));
                if self.tree[e] {
                    rels.push(format!("{src} = {dst}"));
                } else {
                    rels.push(format!("{t} {dst} {t}^-1 = {src}"));
                }
            }
        }
        let mut out = format!("generators: {}\nrelations:\n", gens.join(", "));
        for r in rels {
            out += &format!("  {r}\n");
        }
        out
    }
}
