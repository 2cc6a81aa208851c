//! One-edge splittings along JSJ tori: the case classifier and a bounded
//! brute-force check of `k`-step malnormality.
//!
//! Cutting the graph at one edge `E: u -> v` gives an amalgam (when `E`
//! separates) or an HNN extension with stable letter `E` (for a self-loop).
//! The edge group `C` is `k`-step malnormal when no conjugator of syllable
//! length at least `k+1` sends a nontrivial element of `C` back into `C`.
//!
//! Conjugators are enumerated in normal form: every syllable is a canonical
//! coset representative, so every element of syllable length `L` whose
//! syllables come from the vertex balls is reached once up to a right factor
//! in `C`. The search conjugates from the innermost syllable outward. Once a
//! conjugate leaves the vertex group it stays outside under the remaining
//! (reduced) syllables, so those branches are settled without expanding
//! them; `naive` mode expands them anyway and is used to test this.

use serde::Serialize;

use crate::gog::{DirEdge, EdgeEnd, GogError, GogWord, GraphOfGroups, VertexElement, VertexGroup};
use crate::manifold::{GraphManifoldSpec, ManifoldError, PieceKind, SplitCase, SplitKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error("verification refused: piece {0} is hyperbolic and its group is opaque")]
    StubRefused(String),
    #[error("brute force needs a separating edge or a self-loop; {0} is neither")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub conjugator: String,
    pub element: String,
    pub image: String,
    pub syllable_length: usize,
    /// The image lies in an edge subgroup and the length is the declared step.
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub conjugator: String,
    pub element: String,
    pub image: String,
    pub syllable_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub radius: usize,
    pub bound: i64,
    pub min_length: usize,
    pub max_length: usize,
    /// Normal-form conjugators enumerated.
    pub conjugators: u64,
    /// Conjugator and element pairs decided.
    pub pairs: u64,
    /// Pairs whose conjugate had to be reduced all the way out.
    pub expanded: u64,
    pub counterexamples: Vec<Hit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub edge: String,
    pub case: SplitCase,
    pub kind: SplitKind,
    pub step: u32,
    pub acylindricity: u32,
    pub witness: Option<Witness>,
    pub verification: Option<Verification>,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.witness.as_ref().is_none_or(|w| w.confirmed)
            && self.verification.as_ref().is_none_or(|v| v.counterexamples.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedNormalizer {
    pub radius: usize,
    pub bound: i64,
    pub max_length: usize,
    pub elements: Vec<Hit>,
    /// Largest syllable length among the elements found.
    pub observed: usize,
}

fn edge_of(spec: &GraphManifoldSpec, edge: &str) -> Result<usize, SplitError> {
    let n = edge.trim_start_matches('e').parse::<usize>().unwrap_or(0);
    spec.edge_index(edge).ok_or(SplitError::Manifold(ManifoldError::UnknownEdge(n.saturating_sub(1))))
}

fn check_spec(spec: &GraphManifoldSpec) -> Result<(), SplitError> {
    if spec.is_sol_like() {
        return Err(ManifoldError::SolLike("every piece is a twisted I-bundle over the Klein bottle".into()).into());
    }
    Ok(())
}

fn refuse_stubs(spec: &GraphManifoldSpec) -> Result<(), SplitError> {
    match spec.pieces.iter().find(|p| matches!(p.kind, PieceKind::Hyperbolic { .. })) {
        Some(p) => Err(SplitError::StubRefused(p.name.clone())),
        None => Ok(()),
    }
}

/// Which side of the splitting a syllable lives on, or for HNN extensions
/// which of the two edge subgroups at `u` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Minus,
    Plus,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

/// An edge `E: u -> v` with everything the enumerations need.
struct Frame<'a> {
    gog: &'a GraphOfGroups,
    name: String,
    e: DirEdge,
    src: EdgeEnd,
    tgt: EdgeEnd,
    amalgam: bool,
}

impl<'a> Frame<'a> {
    fn new(gog: &'a GraphOfGroups, spec: &GraphManifoldSpec, edge: usize) -> Result<Self, SplitError> {
        let e = DirEdge { edge, rev: false };
        let (src, tgt) = (gog.source(e), gog.target(e));
        Ok(Frame {
            gog,
            name: GraphManifoldSpec::edge_name(edge),
            e,
            src,
            tgt,
            amalgam: spec.edge_separating(edge)?,
        })
    }

    fn u(&self) -> usize {
        self.src.vertex
    }

    fn group_u(&self) -> &VertexGroup {
        self.gog.group(self.src.vertex)
    }

    fn group_v(&self) -> &VertexGroup {
        self.gog.group(self.tgt.vertex)
    }

    fn at_u(&self, x: VertexElement) -> GogWord {
        self.gog.vertex_word(self.u(), x)
    }

    /// `E y E^-1` for a letter `y` at `v`.
    fn through(&self, y: VertexElement) -> GogWord {
        let g = self.gog;
        let mut w = g.edge_word(self.e);
        w.letters[1] = y;
        g.multiply(&w, &g.edge_word(self.e.reversed()))
    }

    /// The edge subgroup element with coordinates `z`, seen at `u`: through
    /// the source end for `Minus`, the target end for `Plus` (HNN only).
    fn element(&self, side: Side, z: (i64, i64)) -> GogWord {
        match side {
            Side::Minus => self.at_u(self.gog.edge_image_at_source(self.e, z)),
            Side::Plus => self.at_u(self.gog.edge_image_at_target(self.e, z)),
        }
    }

    /// Edge coordinates of `w` in the subgroup on `side`, if it lies there.
    fn membership(&self, w: &GogWord, side: Side) -> Option<(i64, i64)> {
        if !w.edges.is_empty() || w.start != self.u() {
            return None;
        }
        let end = if side == Side::Minus { self.src } else { self.tgt };
        let y = self.group_u().peripheral(&w.letters[0], end.slot)?;
        Some(end.matrix.inverse().apply(y))
    }

    fn sides(&self) -> &'static [Side] {
        if self.amalgam {
            &[Side::Minus]
        } else {
            &[Side::Minus, Side::Plus]
        }
    }

    /// Syllable length of a reduced loop at `u`.
    fn syllable_length(&self, w: &GogWord) -> usize {
        let w = self.gog.reduce(w);
        let crossings: Vec<usize> = (0..w.edges.len()).filter(|&i| w.edges[i].edge == self.e.edge).collect();
        if !self.amalgam {
            return crossings.len();
        }
        let in_c = |letters: &[VertexElement], edges: &[DirEdge]| {
            edges.is_empty() && self.group_u().peripheral(&letters[0], self.src.slot).is_some()
        };
        match (crossings.first(), crossings.last()) {
            (None, _) | (_, None) => usize::from(!in_c(&w.letters, &w.edges)),
            (Some(&first), Some(&last)) => {
                let head = in_c(&w.letters[..=first], &w.edges[..first]);
                let tail = in_c(&w.letters[last + 1..], &w.edges[last + 1..]);
                crossings.len() + 1 - usize::from(head) - usize::from(tail)
            }
        }
    }

    fn describe(&self, side: Side, z: (i64, i64)) -> String {
        self.gog.display(&self.element(side, z))
    }
}

fn first_nontrivial(g: &VertexGroup, slot: u32) -> VertexElement {
    g.coset_reps(slot, 2).into_iter().find(|x| !g.is_identity(x)).expect("peripheral subgroup of infinite index")
}

fn fiber_coords(end: &EdgeEnd) -> (i64, i64) {
    end.matrix.inverse().apply((0, 1))
}

/// Conjugation by `a` on the boundary subgroup of the Klein piece.
fn klein_flip((p, q): (i64, i64)) -> (i64, i64) {
    (p, -q)
}

fn confirm(frame: &Frame, case: SplitCase, g: GogWord, side: Side, z: (i64, i64)) -> Witness {
    let gog = frame.gog;
    let c = frame.element(side, z);
    let image = gog.conjugate(&g, &c);
    let length = frame.syllable_length(&g);
    let lands = frame.sides().iter().any(|&s| frame.membership(&image, s).is_some_and(|y| y != (0, 0)));
    Witness {
        conjugator: gog.display(&g),
        element: gog.display(&c),
        image: gog.display(&image),
        syllable_length: length,
        confirmed: lands && z != (0, 0) && length == case.step() as usize,
    }
}

fn witness(frame: &Frame, case: SplitCase) -> Option<Witness> {
    let gog = frame.gog;
    let (gu, gv) = (frame.group_u(), frame.group_v());
    let fibered = |g: &VertexGroup| matches!(g, VertexGroup::Seifert(_) | VertexGroup::Klein);
    let self_loop = frame.src.vertex == frame.tgt.vertex;
    match case {
        SplitCase::D1 => None,
        SplitCase::D2 | SplitCase::D3 if fibered(gu) => {
            let g = frame.at_u(first_nontrivial(gu, frame.src.slot));
            Some(confirm(frame, case, g, Side::Minus, fiber_coords(&frame.src)))
        }
        SplitCase::D2 | SplitCase::D3 => {
            let g = frame.through(first_nontrivial(gv, frame.tgt.slot));
            Some(confirm(frame, case, g, Side::Minus, fiber_coords(&frame.tgt)))
        }
        SplitCase::D4 => {
            let a = VertexElement::Klein(crate::klein::KleinElement::new(1, 0));
            let (g, z) = if matches!(gv, VertexGroup::Klein) {
                let x = frame.at_u(first_nontrivial(gu, frame.src.slot));
                let b = frame.through(a);
                let g = gog.multiply(&gog.multiply(&b, &x), &b);
                let k = frame.tgt.matrix.apply(fiber_coords(&frame.src));
                (g, frame.tgt.matrix.inverse().apply(klein_flip(k)))
            } else {
                let x = frame.through(first_nontrivial(gv, frame.tgt.slot));
                let b = frame.at_u(a);
                let g = gog.multiply(&gog.multiply(&b, &x), &b);
                let k = frame.src.matrix.apply(fiber_coords(&frame.tgt));
                (g, frame.src.matrix.inverse().apply(klein_flip(k)))
            };
            Some(confirm(frame, case, g, Side::Minus, z))
        }
        SplitCase::ND1 if self_loop => {
            let g = gog.edge_word(frame.e.reversed());
            Some(confirm(frame, case, g, Side::Minus, (1, 0)))
        }
        SplitCase::ND2 if self_loop && fibered(gu) => {
            let g = frame.through(first_nontrivial(gu, frame.tgt.slot));
            Some(confirm(frame, case, g, Side::Minus, fiber_coords(&frame.tgt)))
        }
        // A stable letter between two distinct vertices also runs through
        // the rest of the graph; no witness is built for that shape.
        SplitCase::ND1 | SplitCase::ND2 => None,
    }
}

/// Case, step and acylindricity of the splitting along `edge`, with a
/// lower-bound witness where one can be built.
pub fn step_classifier(spec: &GraphManifoldSpec, edge: &str) -> Result<StepReport, SplitError> {
    check_spec(spec)?;
    let e = edge_of(spec, edge)?;
    let case = spec.classify_edge(e)?;
    let gog = GraphOfGroups::jsj(spec)?;
    let frame = Frame::new(&gog, spec, e)?;
    debug_assert_eq!(frame.amalgam, case.kind() == SplitKind::Amalgam);
    Ok(StepReport {
        edge: frame.name.clone(),
        case,
        kind: case.kind(),
        step: case.step(),
        acylindricity: case.acylindricity(),
        witness: witness(&frame, case),
        verification: None,
    })
}

struct Search<'a> {
    frame: &'a Frame<'a>,
    /// Nontrivial coset representatives at `u` and `v` mod the edge images,
    /// for amalgams; mod the `Minus`/`Plus` images at `u` for HNN.
    reps: [Vec<VertexElement>; 2],
    naive: bool,
    pairs: u64,
    expanded: u64,
    hits: Vec<Hit>,
    max_hits: usize,
    /// The syllables chosen so far, innermost first.
    stack: Vec<GogWord>,
    element: String,
}

impl<'a> Search<'a> {
    fn new(frame: &'a Frame<'a>, radius: usize, naive: bool, max_hits: usize) -> Self {
        let reps = if frame.amalgam {
            [frame.group_u().coset_reps(frame.src.slot, radius), frame.group_v().coset_reps(frame.tgt.slot, radius)]
        } else {
            [frame.group_u().coset_reps(frame.src.slot, radius), frame.group_u().coset_reps(frame.tgt.slot, radius)]
        };
        Search { frame, reps, naive, pairs: 0, expanded: 0, hits: Vec::new(), max_hits, stack: Vec::new(), element: String::new() }
    }

    fn idx(side: Side) -> usize {
        usize::from(side == Side::Plus)
    }

    fn nontrivial(&self, side: Side) -> u64 {
        self.reps[Self::idx(side)].len() as u64 - 1
    }

    fn all(&self, side: Side) -> u64 {
        self.reps[Self::idx(side)].len() as u64
    }

    /// Completions of an amalgam word with `m` syllables still to choose,
    /// the next one on `side`.
    fn amalgam_count(&self, m: usize, side: Side) -> u64 {
        (0..m).map(|i| self.nontrivial(if i % 2 == 0 { side } else { side.other() })).product()
    }

    /// HNN completions after placing `t^eps` with `m` stable letters left:
    /// the letter left of `t^eps` is reduced mod the subgroup `t^eps`
    /// absorbs, and must be nontrivial before a letter of opposite sign.
    fn hnn_count(&self, m: usize, eps: Side) -> u64 {
        let absorb = hnn_absorbs(eps);
        if m == 0 {
            return self.all(absorb);
        }
        self.hnn_count(m - 1, eps) + self.nontrivial(absorb) * (self.hnn_count(m - 1, Side::Minus) + self.hnn_count(m - 1, Side::Plus))
    }

    fn finish(&mut self, y: &GogWord) {
        self.expanded += 1;
        let f = self.frame;
        let landed = f.sides().iter().find_map(|&s| f.membership(y, s).map(|c| (s, c)));
        if let Some((s, coords)) = landed {
            if self.hits.len() < self.max_hits {
                let g = self.stack.iter().rev().fold(f.gog.identity_at(f.u()), |acc, s| f.gog.multiply(&acc, s));
                self.hits.push(Hit {
                    conjugator: f.gog.display(&g),
                    element: self.element.clone(),
                    image: f.describe(s, coords),
                    syllable_length: f.syllable_length(&g),
                });
            }
        }
    }

    fn conj(&self, s: &GogWord, y: &GogWord) -> GogWord {
        self.frame.gog.conjugate(s, y)
    }

    fn amalgam(&mut self, y: GogWord, m: usize, side: Side) {
        if m == 0 {
            self.pairs += 1;
            self.finish(&y);
            return;
        }
        let reps = self.reps[Self::idx(side)].clone();
        for x in reps.into_iter().skip(1) {
            let s = match side {
                Side::Minus => self.frame.at_u(x),
                Side::Plus => self.frame.through(x),
            };
            let z = self.conj(&s, &y);
            if !self.naive && !z.edges.is_empty() {
                self.pairs += self.amalgam_count(m - 1, side.other());
                continue;
            }
            self.stack.push(s);
            self.amalgam(z, m - 1, side.other());
            self.stack.pop();
        }
    }

    /// Places the letter left of the last stable letter `t^eps`, then the
    /// next stable letter.
    fn hnn_letter(&mut self, y: GogWord, m: usize, eps: Side) {
        let absorb = hnn_absorbs(eps);
        let reps = self.reps[Self::idx(absorb)].clone();
        for (i, r) in reps.into_iter().enumerate() {
            let s = self.frame.at_u(r);
            let z = self.conj(&s, &y);
            self.stack.push(s);
            if m == 0 {
                self.pairs += 1;
                self.finish(&z);
            } else {
                for next in [Side::Minus, Side::Plus] {
                    if i == 0 && next != eps {
                        continue;
                    }
                    self.hnn_stable(z.clone(), m, next);
                }
            }
            self.stack.pop();
        }
    }

    fn hnn_stable(&mut self, y: GogWord, m: usize, eps: Side) {
        let gog = self.frame.gog;
        let t = match eps {
            Side::Plus => gog.edge_word(self.frame.e),
            Side::Minus => gog.edge_word(self.frame.e.reversed()),
        };
        let z = self.conj(&t, &y);
        if !self.naive && !z.edges.is_empty() {
            self.pairs += self.hnn_count(m - 1, eps);
            return;
        }
        self.stack.push(t);
        self.hnn_letter(z, m - 1, eps);
        self.stack.pop();
    }

    /// All conjugators of syllable length `len` applied to `c`.
    fn run(&mut self, c: &GogWord, inner: Side, len: usize) {
        self.element = self.frame.gog.display(c);
        if self.frame.amalgam {
            if len == 0 {
                self.pairs += 1;
                self.finish(c);
                return;
            }
            for side in [Side::Minus, Side::Plus] {
                self.amalgam(c.clone(), len, side);
            }
        } else {
            // The innermost letter is reduced mod the subgroup holding `c`.
            let reps = self.reps[Self::idx(inner)].clone();
            for r in reps {
                let s = self.frame.at_u(r);
                let y = self.conj(&s, c);
                self.stack.push(s);
                if len == 0 {
                    self.pairs += 1;
                    self.finish(&y);
                } else {
                    for eps in [Side::Minus, Side::Plus] {
                        self.hnn_stable(y.clone(), len, eps);
                    }
                }
                self.stack.pop();
            }
        }
    }

    fn conjugator_count(&self, inner: Side, len: usize) -> u64 {
        if self.frame.amalgam {
            if len == 0 {
                1
            } else {
                self.amalgam_count(len, Side::Minus) + self.amalgam_count(len, Side::Plus)
            }
        } else if len == 0 {
            self.all(inner)
        } else {
            self.all(inner) * (self.hnn_count(len - 1, Side::Minus) + self.hnn_count(len - 1, Side::Plus))
        }
    }
}

/// `c t = t (t^-1 c t)` for `c` in the source image when `t = E`; for
/// `t = E^-1` the target image passes through.
fn hnn_absorbs(eps: Side) -> Side {
    match eps {
        Side::Plus => Side::Minus,
        Side::Minus => Side::Plus,
    }
}

fn box_coords(bound: i64) -> impl Iterator<Item = (i64, i64)> {
    (-bound..=bound).flat_map(move |a| (-bound..=bound).map(move |b| (a, b))).filter(|&z| z != (0, 0))
}

struct Sweep {
    conjugators: u64,
    pairs: u64,
    expanded: u64,
    hits: Vec<Hit>,
}

fn sweep(frame: &Frame, radius: usize, bound: i64, lengths: std::ops::RangeInclusive<usize>, naive: bool, max_hits: usize) -> Sweep {
    let mut search = Search::new(frame, radius, naive, max_hits);
    let mut conjugators = 0;
    for &side in frame.sides() {
        for len in lengths.clone() {
            conjugators += search.conjugator_count(side, len);
            for z in box_coords(bound) {
                search.run(&frame.element(side, z), side, len);
            }
        }
    }
    Sweep { conjugators, pairs: search.pairs, expanded: search.expanded, hits: search.hits }
}

fn frame_for<'a>(gog: &'a GraphOfGroups, spec: &GraphManifoldSpec, e: usize) -> Result<Frame<'a>, SplitError> {
    let frame = Frame::new(gog, spec, e)?;
    if !frame.amalgam && frame.src.vertex != frame.tgt.vertex {
        return Err(SplitError::Unsupported(frame.name));
    }
    Ok(frame)
}

/// Classifies the edge and checks that no conjugator of syllable length
/// `k+1 ..= k+1+slack` built from radius-`radius` coset letters sends an
/// element `x^a y^b` (`|a|,|b| <= bound`) of the edge group back into it.
pub fn brute_force_verify(
    spec: &GraphManifoldSpec,
    edge: &str,
    radius: usize,
    bound: i64,
    slack: usize,
) -> Result<StepReport, SplitError> {
    let mut report = step_classifier(spec, edge)?;
    refuse_stubs(spec)?;
    let e = edge_of(spec, edge)?;
    let gog = GraphOfGroups::jsj(spec)?;
    let frame = frame_for(&gog, spec, e)?;
    let lo = report.step as usize + 1;
    let s = sweep(&frame, radius, bound, lo..=lo + slack, false, 20);
    report.verification = Some(Verification {
        radius,
        bound,
        min_length: lo,
        max_length: lo + slack,
        conjugators: s.conjugators,
        pairs: s.pairs,
        expanded: s.expanded,
        counterexamples: s.hits,
    });
    Ok(report)
}

/// The conjugators of syllable length at most `max_length` that send some
/// nontrivial `x^a y^b` (`|a|,|b| <= bound`) of the edge group back into an
/// edge subgroup. The identity stands for the edge group itself.
pub fn extended_normalizer_ball(
    spec: &GraphManifoldSpec,
    edge: &str,
    radius: usize,
    bound: i64,
    max_length: usize,
) -> Result<ExtendedNormalizer, SplitError> {
    check_spec(spec)?;
    refuse_stubs(spec)?;
    let e = edge_of(spec, edge)?;
    let gog = GraphOfGroups::jsj(spec)?;
    let frame = frame_for(&gog, spec, e)?;
    let s = sweep(&frame, radius, bound, 0..=max_length, false, usize::MAX);
    let observed = s.hits.iter().map(|h| h.syllable_length).max().unwrap_or(0);
    Ok(ExtendedNormalizer { radius, bound, max_length, elements: s.hits, observed })
}
