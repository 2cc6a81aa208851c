//! Seifert symbols, their moves and canonical forms.
//!
//! A symbol `S(g,h;(p1,q1),...)` records the base genus `g` (negative for a
//! non-orientable base with `|g|` cross-caps), the number `h` of boundary
//! components and the unnormalized invariants of the exceptional fibers.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error("invalid pair ({p},{q}): need p >= 1 and gcd(p,q) = 1")]
    InvalidPair { p: i64, q: i64 },
    #[error("pair index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("move needs two distinct pair indices")]
    SameIndex,
    #[error("twisting a single pair needs a nonempty boundary")]
    ClosedBoundary,
    #[error("pair {0} is not (1,0)")]
    NotTrivialPair(usize),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("cannot parse symbol `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeifertSymbol {
    genus: i64,
    boundary: u32,
    pairs: Vec<(i64, i64)>,
}

/// The fibration-preserving moves on symbols. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// `(p_i,q_i),(p_j,q_j) -> (p_i,q_i-p_i),(p_j,q_j+p_j)`.
    Shift { from: usize, to: usize },
    /// Append a `(1,0)` pair.
    AddTrivial,
    /// Remove a `(1,0)` pair.
    RemoveTrivial(usize),
    /// `(p_i,q_i) -> (p_i,q_i±p_i)`; only with boundary.
    Twist { index: usize, up: bool },
    Swap(usize, usize),
}

/// Euler number of a symbol. With boundary it is only defined mod 1 and the
/// value is normalized into `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerNumber {
    pub value: BigRational,
    pub mod_one: bool,
}

impl fmt::Display for EulerNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if self.mod_one {
            write!(f, " (mod 1)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialManifold {
    SolidTorus,
    TorusTimesInterval,
    KleinTimesI,
    KleinTimesS1,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    Bad,
    Elliptic,
    Euclidean,
    Hyperbolic,
}

/// Base 2-orbifold: a surface with cone points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseOrbifold {
    pub genus: i64,
    pub boundary: u32,
    pub cones: Vec<i64>,
}

impl SeifertSymbol {
    pub fn new(genus: i64, boundary: u32, pairs: Vec<(i64, i64)>) -> Result<Self, SymbolError> {
        for &(p, q) in &pairs {
            if p < 1 || p.gcd(&q) != 1 {
                return Err(SymbolError::InvalidPair { p, q });
            }
        }
        Ok(SeifertSymbol { genus, boundary, pairs })
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn boundary(&self) -> u32 {
        self.boundary
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn is_orientable_base(&self) -> bool {
        self.genus >= 0
    }

    pub fn apply_move(&self, mv: Move) -> Result<SeifertSymbol, SymbolError> {
        let n = self.pairs.len();
        let check = |i: usize| if i < n { Ok(()) } else { Err(SymbolError::IndexOutOfRange(i)) };
        let mut out = self.clone();
        match mv {
            Move::Shift { from, to } => {
                check(from)?;
                check(to)?;
                if from == to {
                    return Err(SymbolError::SameIndex);
                }
                out.pairs[from].1 -= out.pairs[from].0;
                out.pairs[to].1 += out.pairs[to].0;
            }
            Move::AddTrivial => out.pairs.push((1, 0)),
            Move::RemoveTrivial(i) => {
                check(i)?;
                if out.pairs[i] != (1, 0) {
                    return Err(SymbolError::NotTrivialPair(i));
                }
                out.pairs.remove(i);
            }
            Move::Twist { index, up } => {
                check(index)?;
                if self.boundary == 0 {
                    return Err(SymbolError::ClosedBoundary);
                }
                let p = out.pairs[index].0;
                out.pairs[index].1 += if up { p } else { -p };
            }
            Move::Swap(i, j) => {
                check(i)?;
                check(j)?;
                out.pairs.swap(i, j);
            }
        }
        Ok(out)
    }

    pub fn euler_number(&self) -> EulerNumber {
        let mut e = BigRational::zero();
        for &(p, q) in &self.pairs {
            e += BigRational::new(BigInt::from(q), BigInt::from(p));
        }
        if self.boundary > 0 {
            let fl = e.floor();
            EulerNumber { value: e - fl, mod_one: true }
        } else {
            EulerNumber { value: e, mod_one: false }
        }
    }

    /// Canonical representative of the move-equivalence class.
    ///
    /// With boundary, pairs with `p = 1` are dropped and every `q` is reduced
    /// into `(0,p)`. Closed symbols keep the integer defect in one trailing
    /// `(1,b)` pair, which is always present.
    pub fn canonicalize(&self) -> SeifertSymbol {
        let mut pairs = Vec::new();
        let mut defect = 0i64;
        for &(p, q) in &self.pairs {
            let (d, r) = q.div_mod_floor(&p);
            defect += d;
            if p >= 2 {
                pairs.push((p, r));
            }
        }
        pairs.sort();
        if self.boundary == 0 {
            pairs.push((1, defect));
        }
        SeifertSymbol { genus: self.genus, boundary: self.boundary, pairs }
    }

    /// Same manifold with the opposite orientation.
    pub fn mirror(&self) -> SeifertSymbol {
        let pairs = self.pairs.iter().map(|&(p, q)| (p, -q)).collect();
        SeifertSymbol { genus: self.genus, boundary: self.boundary, pairs }
    }

    pub fn base_orbifold(&self) -> BaseOrbifold {
        BaseOrbifold {
            genus: self.genus,
            boundary: self.boundary,
            cones: self.pairs.iter().map(|&(p, _)| p).filter(|&p| p >= 2).collect(),
        }
    }

    pub fn recognize_special(&self) -> SpecialManifold {
        let c = self.canonicalize();
        let (g, h) = (c.genus, c.boundary);
        if h > 0 {
            return match (g, h, c.pairs.as_slice()) {
                (0, 1, []) | (0, 1, [_]) => SpecialManifold::SolidTorus,
                (0, 2, []) => SpecialManifold::TorusTimesInterval,
                (-1, 1, []) => SpecialManifold::KleinTimesI,
                (0, 1, [(2, 1), (2, 1)]) => SpecialManifold::KleinTimesI,
                _ => SpecialManifold::Other,
            };
        }
        let over_klein = SeifertSymbol { genus: -2, boundary: 0, pairs: vec![] };
        let over_pillow = SeifertSymbol { genus: 0, boundary: 0, pairs: vec![(2, 1), (2, 1), (2, -1), (2, -1)] };
        if isomorphic_unoriented(self, &over_klein) || isomorphic_unoriented(self, &over_pillow) {
            SpecialManifold::KleinTimesS1
        } else {
            SpecialManifold::Other
        }
    }

    /// Whether the symbol is a closed manifold covered by `S^3` or `S^2 x S^1`.
    pub fn is_elliptic_closed(&self) -> bool {
        self.boundary == 0 && matches!(self.base_orbifold().geometry(), Geometry::Elliptic | Geometry::Bad)
    }
}

impl BaseOrbifold {
    pub fn euler_characteristic(&self) -> BigRational {
        let h = i64::from(self.boundary);
        let top = if self.genus >= 0 { 2 - 2 * self.genus - h } else { 2 + self.genus - h };
        let mut chi = BigRational::from_integer(BigInt::from(top));
        for &p in &self.cones {
            chi -= BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p));
        }
        chi
    }

    pub fn geometry(&self) -> Geometry {
        if self.genus == 0 && self.boundary == 0 {
            match self.cones.as_slice() {
                [_] => return Geometry::Bad,
                [p, q] if p != q && p.gcd(q) == 1 => return Geometry::Bad,
                _ => {}
            }
        }
        let chi = self.euler_characteristic();
        if chi.is_positive() {
            Geometry::Elliptic
        } else if chi.is_zero() {
            Geometry::Euclidean
        } else {
            Geometry::Hyperbolic
        }
    }
}

impl fmt::Display for BaseOrbifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O(g={},h={}", self.genus, self.boundary)?;
        if !self.cones.is_empty() {
            let cones: Vec<String> = self.cones.iter().map(|p| p.to_string()).collect();
            write!(f, ";{}", cones.join(","))?;
        }
        write!(f, ")")
    }
}

pub fn isomorphic_oriented(a: &SeifertSymbol, b: &SeifertSymbol) -> bool {
    a.canonicalize() == b.canonicalize() && a.euler_number() == b.euler_number()
}

pub fn isomorphic_unoriented(a: &SeifertSymbol, b: &SeifertSymbol) -> bool {
    isomorphic_oriented(a, b) || isomorphic_oriented(a, &b.mirror())
}

/// Diffeomorphism test: isomorphic fibrations, or both members of one of the
/// families that carry several fibrations.
pub fn same_manifold(a: &SeifertSymbol, b: &SeifertSymbol) -> Result<bool, SymbolError> {
    for s in [a, b] {
        if s.is_elliptic_closed() {
            return Err(SymbolError::Unsupported(format!("{s} is a closed manifold with elliptic or bad base")));
        }
    }
    if isomorphic_unoriented(a, b) {
        return Ok(true);
    }
    let sa = a.recognize_special();
    Ok(sa == b.recognize_special()
        && matches!(
            sa,
            SpecialManifold::SolidTorus | SpecialManifold::KleinTimesI | SpecialManifold::KleinTimesS1
        ))
}

impl fmt::Display for SeifertSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({},{};", self.genus, self.boundary)?;
        let pairs: Vec<String> = self.pairs.iter().map(|(p, q)| format!("({p},{q})")).collect();
        write!(f, "{})", pairs.join(","))
    }
}

impl FromStr for SeifertSymbol {
    type Err = SymbolError;

    /// Parses the `S(g,h;(p,q),...)` notation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymbolError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = compact.strip_prefix("S(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (head, tail) = body.split_once(';').ok_or_else(bad)?;
        let (g, h) = head.split_once(',').ok_or_else(bad)?;
        let genus = g.parse().map_err(|_| bad())?;
        let boundary = h.parse().map_err(|_| bad())?;
        let pairs = parse_pairs(tail).ok_or_else(bad)?;
        SeifertSymbol::new(genus, boundary, pairs)
    }
}

/// Parses `(p,q)(p,q)` or `(p,q),(p,q)`; the empty string gives no pairs.
pub(crate) fn parse_pairs(text: &str) -> Option<Vec<(i64, i64)>> {
    let mut pairs = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches([',', ' ']);
        if rest.is_empty() {
            break;
        }
        let inner = rest.strip_prefix('(')?;
        let close = inner.find(')')?;
        let (p, q) = inner[..close].split_once(',')?;
        pairs.push((p.trim().parse().ok()?, q.trim().parse().ok()?));
        rest = &inner[close + 1..];
    }
    Some(pairs)
}
