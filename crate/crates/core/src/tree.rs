//! Finite balls in the Bass-Serre tree and stabilizers of its leaves.
//!
//! A tree vertex is named by a path word `x1 e1 x2 e2 ... xn en` read from
//! the base vertex (the coset of the first vertex group), where each `xi` is
//! the canonical representative of its coset mod the image of the edge group
//! at the source of `ei`. Such words name every tree vertex exactly once
//! when no step retraces the previous edge with a trivial letter.

use serde::Serialize;

use crate::gog::{DirEdge, GogWord, GraphOfGroups, VertexElement, VertexGroup, VertexKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("no tree vertex {0} in the ball")]
    NoSuchNode(usize),
    #[error("tree vertex {0} is not a leaf")]
    NotALeaf(usize),
    #[error("the two leaves coincide")]
    SameLeaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    /// Coset letter at the parent and the edge leading here.
    pub step: Option<(VertexElement, DirEdge)>,
    pub vertex: usize,
    pub depth: usize,
    /// Set on hyperbolic vertices, whose cosets are only sampled at the
    /// identity.
    pub truncated: bool,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBall {
    pub radius: usize,
    /// Radius of the vertex-group balls from which coset letters are drawn.
    pub letter_radius: usize,
    pub nodes: Vec<TreeNode>,
}

/// All tree vertices within `radius` of the base whose coset letters come
/// from vertex-group balls of radius `letter_radius`.
pub fn tree_ball(gog: &GraphOfGroups, radius: usize, letter_radius: usize) -> TreeBall {
    let root = TreeNode {
        parent: None,
        step: None,
        vertex: 0,
        depth: 0,
        truncated: matches!(gog.group(0), VertexGroup::Stub { .. }),
        children: Vec::new(),
    };
    let mut nodes = vec![root];
    let mut next = 0;
    while next < nodes.len() {
        let (v, depth) = (nodes[next].vertex, nodes[next].depth);
        if depth < radius {
            let incoming = nodes[next].step.as_ref().map(|(_, e)| e.reversed());
            let group = gog.group(v);
            for e in gog.out_edges(v) {
                let slot = gog.source(e).slot;
                let reps = match group {
                    VertexGroup::Stub { .. } => vec![group.identity()],
                    _ => group.coset_reps(slot, letter_radius),
                };
                for x in reps {
                    if Some(e) == incoming && group.is_identity(&x) {
                        continue;
                    }
                    let w = gog.target(e).vertex;
                    let child = TreeNode {
                        parent: Some(next),
                        step: Some((x, e)),
                        vertex: w,
                        depth: depth + 1,
                        truncated: matches!(gog.group(w), VertexGroup::Stub { .. }),
                        children: Vec::new(),
                    };
                    let id = nodes.len();
                    nodes.push(child);
                    nodes[next].children.push(id);
                }
            }
        }
        next += 1;
    }
    TreeBall { radius, letter_radius, nodes }
}

impl TreeBall {
    fn node(&self, i: usize) -> Result<&TreeNode, TreeError> {
        self.nodes.get(i).ok_or(TreeError::NoSuchNode(i))
    }

    /// The path word from the base naming node `i`; it ends with an identity
    /// letter at the node's vertex.
    pub fn word(&self, gog: &GraphOfGroups, i: usize) -> GogWord {
        let mut steps = Vec::new();
        let mut at = i;
        while let Some((x, e)) = &self.nodes[at].step {
            steps.push((x.clone(), *e));
            at = self.nodes[at].parent.expect("non-root node has a parent");
        }
        steps.reverse();
        let mut letters: Vec<VertexElement> = steps.iter().map(|(x, _)| x.clone()).collect();
        letters.push(gog.group(self.nodes[i].vertex).identity());
        GogWord { start: 0, letters, edges: steps.iter().map(|(_, e)| *e).collect() }
    }

    pub fn kind(&self, gog: &GraphOfGroups, i: usize) -> VertexKind {
        gog.group(self.nodes[i].vertex).kind()
    }

    pub fn is_leaf(&self, gog: &GraphOfGroups, i: usize) -> bool {
        self.kind(gog, i) == VertexKind::Peripheral
    }

    /// Neighbors inside the ball.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let n = &self.nodes[i];
        n.parent.into_iter().chain(n.children.iter().copied()).collect()
    }

    /// Degree in the whole tree when the vertex group has finitely many
    /// cosets of every incident edge group.
    pub fn full_degree(&self, gog: &GraphOfGroups, i: usize) -> Option<usize> {
        let v = self.nodes[i].vertex;
        gog.out_edges(v)
            .iter()
            .map(|_| match gog.group(v) {
                VertexGroup::Torus => Some(1),
                VertexGroup::Klein => Some(2),
                _ => None,
            })
            .sum()
    }

    fn ancestors(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.nodes[i].parent {
            out.push(p);
            i = p;
        }
        out
    }

    /// The geodesic from `i` to `j`, endpoints included.
    pub fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let (a, b) = (self.ancestors(i), self.ancestors(j));
        let common = a.iter().find(|x| b.contains(x)).copied().expect("same root");
        let mut out: Vec<usize> = a.iter().copied().take_while(|&x| x != common).collect();
        out.push(common);
        let tail: Vec<usize> = b.iter().copied().take_while(|&x| x != common).collect();
        out.extend(tail.into_iter().rev());
        out
    }

    pub fn distance(&self, i: usize, j: usize) -> usize {
        self.path(i, j).len() - 1
    }

    /// Whether two nodes name the same tree vertex, decided by reduction.
    pub fn same_vertex(&self, gog: &GraphOfGroups, i: usize, j: usize) -> bool {
        if self.nodes[i].vertex != self.nodes[j].vertex {
            return false;
        }
        let (u, w) = (self.word(gog, i), self.word(gog, j));
        gog.reduce(&gog.multiply(&gog.inverse(&u), &w)).edges.is_empty()
    }

    pub fn leaves(&self, gog: &GraphOfGroups) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(gog, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum IntersectionDescriptor {
    Trivial,
    /// `h <f> h^-1`, where `h` names the common neighbor of the two leaves.
    FiberConjugate { node: usize, piece: String, conjugator: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafIntersectionReport {
    pub v1: usize,
    pub v2: usize,
    pub descriptor: IntersectionDescriptor,
    pub bound: i64,
    /// Leaf coordinates `(a,b)` at `v1` whose element also fixes `v2`.
    pub found: Vec<(i64, i64)>,
    /// Every element found is a conjugate of a fiber power by `h`.
    pub fiber_only: bool,
    /// The brute-force set matches the descriptor.
    pub consistent: bool,
}

/// Intersection of the stabilizers of two leaves, from the tree structure,
/// cross-checked on the box `|a|,|b| <= bound` of the first stabilizer.
pub fn leaf_intersection(
    gog: &GraphOfGroups,
    ball: &TreeBall,
    v1: usize,
    v2: usize,
    bound: i64,
) -> Result<LeafIntersectionReport, TreeError> {
    for v in [v1, v2] {
        ball.node(v)?;
        if !ball.is_leaf(gog, v) {
            return Err(TreeError::NotALeaf(v));
        }
    }
    if v1 == v2 || ball.same_vertex(gog, v1, v2) {
        return Err(TreeError::SameLeaf);
    }
    let (p1, p2) = (ball.nodes[v1].parent, ball.nodes[v2].parent);
    let descriptor = match (p1, p2) {
        (Some(h), Some(k)) if h == k && ball.kind(gog, h) == VertexKind::Seifert => IntersectionDescriptor::FiberConjugate {
            node: h,
            piece: gog.vertices[ball.nodes[h].vertex].name.clone(),
            conjugator: gog.display(&ball.word(gog, h)),
        },
        _ => IntersectionDescriptor::Trivial,
    };

    let (w1, w2) = (ball.word(gog, v1), ball.word(gog, v2));
    let q = gog.multiply(&gog.inverse(&w2), &w1);
    let leaf1 = ball.nodes[v1].vertex;
    let mut found = Vec::new();
    let mut fiber_only = true;
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a, b) == (0, 0) {
                continue;
            }
            let z = gog.vertex_word(leaf1, VertexElement::Torus(a, b));
            if !gog.conjugate(&q, &z).edges.is_empty() {
                continue;
            }
            found.push((a, b));
            // h^-1 (w1 z w1^-1) h must be a fiber power at the Seifert vertex.
            let on_piece = match &descriptor {
                IntersectionDescriptor::FiberConjugate { node, .. } => {
                    let h = ball.word(gog, *node);
                    let y = gog.conjugate(&gog.inverse(&h), &gog.conjugate(&w1, &z));
                    match (y.edges.is_empty(), &y.letters[0]) {
                        (true, VertexElement::Seifert(s)) => s.orb.is_identity() && s.fiber != 0,
                        _ => false,
                    }
                }
                IntersectionDescriptor::Trivial => false,
            };
            fiber_only &= on_piece;
        }
    }
    let consistent = match descriptor {
        IntersectionDescriptor::Trivial => found.is_empty(),
        IntersectionDescriptor::FiberConjugate { .. } => {
            let expected: Vec<(i64, i64)> =
                (-bound..=bound).filter(|&b| b != 0).map(|b| (0, b)).collect();
            fiber_only && found == expected
        }
    };
    Ok(LeafIntersectionReport { v1, v2, descriptor, bound, found, fiber_only, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_spec;

    const TWO_PIECES: &str = "piece A seifert g=0 h=3 pairs=(2,1)\npiece B seifert g=0 h=1 pairs=(2,1)(3,1)\nglue A.3 B.1 matrix=[[0,1],[1,0]]\n";
    const WITH_KLEIN: &str = "piece A seifert g=0 h=2 pairs=(2,1)(3,1)\npiece K klein\nglue A.2 K.1 matrix=[[0,1],[1,1]]\n";

    fn extension(text: &str) -> GraphOfGroups {
        GraphOfGroups::peripheral_extension(&parse_spec(text).unwrap()).unwrap()
    }

    #[test]
    fn radius_one_around_a_seifert_vertex() {
        let g = extension(TWO_PIECES);
        let ball = tree_ball(&g, 1, 1);
        let kids = &ball.nodes[0].children;
        let leaves = kids.iter().filter(|&&i| ball.is_leaf(&g, i)).count();
        let glued = kids.iter().filter(|&&i| ball.nodes[i].vertex == 1).count();
        // One leaf and one B-neighbor per coset; identity coset included.
        assert!(leaves >= 2 && glued >= 1);
        assert_eq!(leaves + glued, kids.len());
        let reps = g.group(0).coset_reps(1, 1).len() + g.group(0).coset_reps(2, 1).len();
        assert_eq!(leaves, reps);
    }

    #[test]
    fn ball_nodes_are_distinct_tree_vertices() {
        let g = extension(TWO_PIECES);
        let ball = tree_ball(&g, 2, 1);
        for i in 0..ball.nodes.len() {
            assert!(g.is_reduced(&ball.word(&g, i)));
            for j in 0..i {
                assert!(!ball.same_vertex(&g, i, j), "{i} and {j}");
            }
        }
    }

    #[test]
    fn neighbor_words_differ_by_one_edge() {
        let g = extension(WITH_KLEIN);
        let ball = tree_ball(&g, 3, 1);
        for (i, n) in ball.nodes.iter().enumerate().skip(1) {
            let p = n.parent.unwrap();
            let d = gog_distance(&g, &ball.word(&g, p), &ball.word(&g, i));
            assert_eq!(d, 1);
            assert_eq!(ball.distance(i, 0), n.depth);
        }
    }

    // Length of the reduced path between two tree vertices, computed from
    // their words alone.
    fn gog_distance(g: &GraphOfGroups, u: &GogWord, w: &GogWord) -> usize {
        g.multiply(&g.inverse(u), w).edges.len()
    }

    #[test]
    fn klein_vertices_have_two_neighbors() {
        let g = extension(WITH_KLEIN);
        let ball = tree_ball(&g, 3, 2);
        let mut seen = 0;
        for i in 0..ball.nodes.len() {
            if ball.kind(&g, i) == VertexKind::Klein {
                seen += 1;
                assert_eq!(ball.full_degree(&g, i), Some(2));
                if ball.nodes[i].depth < ball.radius {
                    assert_eq!(ball.neighbors(i).len(), 2);
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn distinct_leaves_are_two_apart() {
        let g = extension(TWO_PIECES);
        let ball = tree_ball(&g, 3, 1);
        let leaves = ball.leaves(&g);
        for (k, &i) in leaves.iter().enumerate() {
            assert_eq!(ball.neighbors(i).len(), 1);
            for &j in &leaves[..k] {
                assert!(ball.distance(i, j) >= 2);
            }
        }
    }

    #[test]
    fn sibling_leaves_share_a_fiber() {
        let g = extension(TWO_PIECES);
        let ball = tree_ball(&g, 3, 1);
        let all = ball.leaves(&g);
        let mut leaves: Vec<usize> = all[..4].to_vec();
        leaves.extend(all.iter().copied().skip(4).step_by(all.len() / 10));
        let (mut fiber, mut trivial) = (0, 0);
        for (k, &i) in leaves.iter().enumerate() {
            for &j in &leaves[..k] {
                let r = leaf_intersection(&g, &ball, i, j, 2).unwrap();
                assert!(r.consistent, "{r:?}");
                match r.descriptor {
                    IntersectionDescriptor::FiberConjugate { .. } => fiber += 1,
                    IntersectionDescriptor::Trivial => trivial += 1,
                }
            }
        }
        assert!(fiber > 0 && trivial > 0, "{fiber} {trivial} {leaves:?}");
    }

    #[test]
    fn leaf_preconditions() {
        let g = extension(TWO_PIECES);
        let ball = tree_ball(&g, 1, 1);
        let l = ball.leaves(&g)[0];
        assert_eq!(leaf_intersection(&g, &ball, l, l, 1).unwrap_err(), TreeError::SameLeaf);
        assert_eq!(leaf_intersection(&g, &ball, 0, l, 1).unwrap_err(), TreeError::NotALeaf(0));
        assert_eq!(leaf_intersection(&g, &ball, 10_000, l, 1).unwrap_err(), TreeError::NoSuchNode(10_000));
    }

    #[test]
    fn leaves_on_a_hyperbolic_vertex_meet_trivially() {
        let spec = parse_spec("piece H hyperbolic slots=3\npiece B seifert g=0 h=1 pairs=(2,1)(3,1)\nglue H.3 B.1 matrix=[[1,0],[0,1]]\n").unwrap();
        let g = GraphOfGroups::peripheral_extension(&spec).unwrap();
        let ball = tree_ball(&g, 1, 1);
        assert!(ball.nodes[0].truncated);
        let leaves = ball.leaves(&g);
        assert_eq!(leaves.len(), 2);
        let r = leaf_intersection(&g, &ball, leaves[0], leaves[1], 2).unwrap();
        assert_eq!(r.descriptor, IntersectionDescriptor::Trivial);
        assert!(r.consistent);
    }

    // Two incident edges of a Seifert vertex have stabilizers meeting in
    // fiber powers only.
    #[test]
    fn incident_edge_stabilizers_meet_in_the_fiber() {
        let g = extension(TWO_PIECES);
        let VertexGroup::Seifert(grp) = g.group(0) else { unreachable!() };
        let ball = tree_ball(&g, 1, 2);
        let kids = &ball.nodes[0].children;
        for (k, &i) in kids.iter().enumerate() {
            for &j in &kids[..k] {
                let (Some((VertexElement::Seifert(x1), e1)), Some((VertexElement::Seifert(x2), e2))) =
                    (&ball.nodes[i].step, &ball.nodes[j].step)
                else {
                    unreachable!()
                };
                let (s1, s2) = (g.source(*e1).slot, g.source(*e2).slot);
                let q = grp.multiply(&grp.inverse(x2), x1);
                for a in -2..=2i64 {
                    for b in -2..=2i64 {
                        let c = grp.from_peripheral(s1, (a, b)).unwrap();
                        let y = grp.conjugate(&q, &c);
                        if (a, b) != (0, 0) && grp.is_peripheral(&y, s2) {
                            assert_eq!(a, 0, "{i} {j}");
                        }
                    }
                }
            }
        }
    }
}
