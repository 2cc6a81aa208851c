//! Words in the orbifold fundamental group of a base with boundary.
//!
//! Eliminating the last boundary generator turns the group into a free
//! product `F_r * Z_{p_1} * ... * Z_{p_k}`; elements are kept as normal-form
//! atom sequences.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::symbol::SeifertSymbol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("the base has no boundary, so the orbifold group is not a free product")]
    ClosedBase,
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("cannot parse word `{0}`")]
    Parse(String),
    #[error("{0} has finite order")]
    FiniteOrder(String),
}

/// Generators of the orbifold presentation, 1-based as in the symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbGen {
    A(u32),
    B(u32),
    C(u32),
    D(u32),
}

impl fmt::Display for OrbGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbGen::A(i) => write!(f, "a{i}"),
            OrbGen::B(i) => write!(f, "b{i}"),
            OrbGen::C(i) => write!(f, "c{i}"),
            OrbGen::D(i) => write!(f, "d{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Atom {
    Free { gen: u16, inv: bool },
    Torsion { factor: u16, exp: u32 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbWord {
    atoms: Vec<Atom>,
}

impl OrbWord {
    pub fn identity() -> Self {
        OrbWord::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of atoms: free letters count one each, torsion syllables one.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Wraps atoms that are already in normal form.
    pub(crate) fn from_atoms(atoms: Vec<Atom>) -> Self {
        OrbWord { atoms }
    }

    pub(crate) fn into_atoms(self) -> Vec<Atom> {
        self.atoms
    }
}

/// The free-product structure of an orbifold group with boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeProductSignature {
    genus: i64,
    boundary: u32,
    free_names: Vec<String>,
    free_eps: Vec<i8>,
    torsion: Vec<u32>,
    torsion_cone: Vec<u32>,
    cone_factor: Vec<Option<u16>>,
    dh: OrbWord,
}

impl FreeProductSignature {
    pub fn from_symbol(symbol: &SeifertSymbol) -> Result<Self, WordError> {
        if symbol.boundary() == 0 {
            return Err(WordError::ClosedBase);
        }
        let genus = symbol.genus();
        let boundary = symbol.boundary();
        let mut free_names = Vec::new();
        let mut free_eps = Vec::new();
        if genus >= 0 {
            for i in 1..=genus {
                free_names.extend([format!("a{i}"), format!("b{i}")]);
                free_eps.extend([1, 1]);
            }
        } else {
            for i in 1..=-genus {
                free_names.push(format!("a{i}"));
                free_eps.push(-1);
            }
        }
        for l in 1..boundary {
            free_names.push(format!("d{l}"));
            free_eps.push(1);
        }
        let mut torsion = Vec::new();
        let mut torsion_cone = Vec::new();
        let mut cone_factor = Vec::new();
        for (j, &(p, _)) in symbol.pairs().iter().enumerate() {
            if p >= 2 {
                cone_factor.push(Some(torsion.len() as u16));
                torsion.push(p as u32);
                torsion_cone.push(j as u32 + 1);
            } else {
                cone_factor.push(None);
            }
        }
        let mut sig = FreeProductSignature {
            genus,
            boundary,
            free_names,
            free_eps,
            torsion,
            torsion_cone,
            cone_factor,
            dh: OrbWord::identity(),
        };
        let mut rel = Vec::new();
        if genus >= 0 {
            for i in 1..=genus as u32 {
                rel.extend([(OrbGen::A(i), 1), (OrbGen::B(i), 1), (OrbGen::A(i), -1), (OrbGen::B(i), -1)]);
            }
        } else {
            for i in 1..=(-genus) as u32 {
                rel.push((OrbGen::A(i), 2));
            }
        }
        for j in 1..=symbol.pairs().len() as u32 {
            rel.push((OrbGen::C(j), 1));
        }
        for l in 1..boundary {
            rel.push((OrbGen::D(l), 1));
        }
        let long = sig.normal_form(&rel)?;
        sig.dh = sig.inverse(&long);
        Ok(sig)
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn boundary(&self) -> u32 {
        self.boundary
    }

    pub fn free_rank(&self) -> usize {
        self.free_names.len()
    }

    pub fn torsion_orders(&self) -> &[u32] {
        &self.torsion
    }

    /// Torsion factor of the cone generator `c_j` (1-based), `None` when `p_j = 1`.
    pub fn cone_factor(&self, j: u32) -> Option<Option<u16>> {
        self.cone_factor.get(j.checked_sub(1)? as usize).copied()
    }

    pub fn cone_count(&self) -> usize {
        self.cone_factor.len()
    }

    pub fn free_epsilon(&self, gen: u16) -> i8 {
        self.free_eps[gen as usize]
    }

    fn free_index(&self, g: OrbGen) -> Option<u16> {
        let idx = match g {
            OrbGen::A(i) if i >= 1 && self.genus >= 0 && i64::from(i) <= self.genus => 2 * (i - 1),
            OrbGen::B(i) if i >= 1 && self.genus >= 0 && i64::from(i) <= self.genus => 2 * (i - 1) + 1,
            OrbGen::A(i) if i >= 1 && self.genus < 0 && i64::from(i) <= -self.genus => i - 1,
            OrbGen::D(l) if l >= 1 && l < self.boundary => {
                let base = if self.genus >= 0 { 2 * self.genus } else { -self.genus };
                base as u32 + l - 1
            }
            _ => return None,
        };
        Some(idx as u16)
    }

    /// Generator list used for balls: every presentation generator and its
    /// inverse, in presentation order, duplicates removed.
    pub fn ball_generators(&self) -> Vec<OrbWord> {
        let mut gens: Vec<OrbGen> = Vec::new();
        if self.genus >= 0 {
            for i in 1..=self.genus as u32 {
                gens.extend([OrbGen::A(i), OrbGen::B(i)]);
            }
        } else {
            for i in 1..=(-self.genus) as u32 {
                gens.push(OrbGen::A(i));
            }
        }
        for j in 1..=self.cone_count() as u32 {
            gens.push(OrbGen::C(j));
        }
        for l in 1..=self.boundary {
            gens.push(OrbGen::D(l));
        }
        let mut out: Vec<OrbWord> = Vec::new();
        for g in gens {
            for e in [1, -1] {
                let w = self.normal_form(&[(g, e)]).expect("generator from own signature");
                if !w.is_identity() && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Appends a free letter, cancelling against the top.
    pub fn push_free(&self, atoms: &mut Vec<Atom>, gen: u16, inv: bool) {
        if let Some(&Atom::Free { gen: g, inv: i }) = atoms.last() {
            if g == gen && i != inv {
                atoms.pop();
                return;
            }
        }
        atoms.push(Atom::Free { gen, inv });
    }

    /// Appends `c^exp` for a torsion factor and returns `k` such that the
    /// true product carries an extra `c^(p k)` on the right.
    pub fn push_torsion(&self, atoms: &mut Vec<Atom>, factor: u16, exp: i64) -> i64 {
        let p = i64::from(self.torsion[factor as usize]);
        let mut total = exp;
        if let Some(&Atom::Torsion { factor: f, exp: e }) = atoms.last() {
            if f == factor {
                atoms.pop();
                total += i64::from(e);
            }
        }
        let r = total.rem_euclid(p);
        if r != 0 {
            atoms.push(Atom::Torsion { factor, exp: r as u32 });
        }
        (total - r) / p
    }

    /// Appends a normal-form atom, returning the torsion overflow as in
    /// [`Self::push_torsion`].
    pub fn push_atom(&self, atoms: &mut Vec<Atom>, atom: Atom) -> i64 {
        match atom {
            Atom::Free { gen, inv } => {
                self.push_free(atoms, gen, inv);
                0
            }
            Atom::Torsion { factor, exp } => self.push_torsion(atoms, factor, i64::from(exp)),
        }
    }

    pub fn multiply(&self, u: &OrbWord, v: &OrbWord) -> OrbWord {
        let mut atoms = u.atoms.clone();
        for &a in &v.atoms {
            self.push_atom(&mut atoms, a);
        }
        OrbWord { atoms }
    }

    pub fn invert_atom(&self, a: Atom) -> Atom {
        match a {
            Atom::Free { gen, inv } => Atom::Free { gen, inv: !inv },
            Atom::Torsion { factor, exp } => Atom::Torsion { factor, exp: self.torsion[factor as usize] - exp },
        }
    }

    pub fn inverse(&self, u: &OrbWord) -> OrbWord {
        OrbWord { atoms: u.atoms.iter().rev().map(|&a| self.invert_atom(a)).collect() }
    }

    pub fn power(&self, u: &OrbWord, n: i64) -> OrbWord {
        let base = if n < 0 { self.inverse(u) } else { u.clone() };
        let mut out = OrbWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = self.multiply(&out, &base);
        }
        out
    }

    pub fn conjugate(&self, g: &OrbWord, x: &OrbWord) -> OrbWord {
        self.multiply(&self.multiply(g, x), &self.inverse(g))
    }

    /// Orientation character: `-1` exactly on the cross-cap generators.
    pub fn epsilon(&self, u: &OrbWord) -> i8 {
        u.atoms.iter().fold(1, |acc, a| match a {
            Atom::Free { gen, .. } => acc * self.free_eps[*gen as usize],
            Atom::Torsion { .. } => acc,
        })
    }

    /// Free-product syllable length: each maximal run of free letters and
    /// each torsion atom is one syllable.
    pub fn syllable_length(&self, u: &OrbWord) -> usize {
        let mut n = 0;
        let mut in_free = false;
        for a in &u.atoms {
            match a {
                Atom::Free { .. } => {
                    if !in_free {
                        n += 1;
                    }
                    in_free = true;
                }
                Atom::Torsion { .. } => {
                    n += 1;
                    in_free = false;
                }
            }
        }
        n
    }

    /// The last boundary generator written in the remaining generators.
    pub fn dh(&self) -> &OrbWord {
        &self.dh
    }

    /// Returns the expression of the last boundary generator and whether the
    /// substitution is degenerate (the generator is trivial).
    pub fn substitute_dh(&self) -> (OrbWord, bool) {
        (self.dh.clone(), self.dh.is_identity())
    }

    pub fn generator(&self, g: OrbGen) -> Result<OrbWord, WordError> {
        self.normal_form(&[(g, 1)])
    }

    /// Normal form of a raw generator-exponent string.
    pub fn normal_form(&self, raw: &[(OrbGen, i64)]) -> Result<OrbWord, WordError> {
        let mut atoms = Vec::new();
        for &(g, e) in raw {
            self.push_raw(&mut atoms, g, e)?;
        }
        Ok(OrbWord { atoms })
    }

    fn push_raw(&self, atoms: &mut Vec<Atom>, g: OrbGen, e: i64) -> Result<(), WordError> {
        if let Some(idx) = self.free_index(g) {
            for _ in 0..e.unsigned_abs() {
                self.push_free(atoms, idx, e < 0);
            }
            return Ok(());
        }
        match g {
            OrbGen::C(j) => match self.cone_factor(j) {
                Some(Some(factor)) => {
                    self.push_torsion(atoms, factor, e);
                    Ok(())
                }
                Some(None) => Ok(()),
                None => Err(WordError::UnknownGenerator(g.to_string())),
            },
            OrbGen::D(l) if l == self.boundary && l >= 1 => {
                let w = if e < 0 { self.inverse(&self.dh) } else { self.dh.clone() };
                for _ in 0..e.unsigned_abs() {
                    for &a in &w.atoms {
                        self.push_atom(atoms, a);
                    }
                }
                Ok(())
            }
            _ => Err(WordError::UnknownGenerator(g.to_string())),
        }
    }

    /// Writes `w = x v x^-1` with `v` cyclically reduced; returns `(x, v)`.
    pub fn cyclic_reduction(&self, w: &OrbWord) -> (OrbWord, OrbWord) {
        let mut x = OrbWord::identity();
        let mut v = w.clone();
        loop {
            let n = v.atoms.len();
            if n < 2 {
                return (x, v);
            }
            match (v.atoms[0], v.atoms[n - 1]) {
                (Atom::Free { gen: g1, inv: i1 }, Atom::Free { gen: g2, inv: i2 }) if g1 == g2 && i1 != i2 => {
                    x = self.multiply(&x, &OrbWord { atoms: vec![v.atoms[0]] });
                    v = OrbWord { atoms: v.atoms[1..n - 1].to_vec() };
                }
                (Atom::Torsion { factor: f1, .. }, Atom::Torsion { factor: f2, .. }) if f1 == f2 => {
                    // v = c^a m c^b = c^-b (c^(a+b) m) c^b
                    let last = OrbWord { atoms: vec![v.atoms[n - 1]] };
                    let rest = OrbWord { atoms: v.atoms[..n - 1].to_vec() };
                    v = self.multiply(&last, &rest);
                    x = self.multiply(&x, &self.inverse(&last));
                }
                _ => return (x, v),
            }
        }
    }

    /// Returns `m` with `w = u^m`, if any.
    pub fn in_cyclic_subgroup(&self, w: &OrbWord, u: &OrbWord) -> Result<Option<i64>, WordError> {
        let (x, v) = self.cyclic_reduction(u);
        if v.atoms.is_empty() || (v.atoms.len() == 1 && matches!(v.atoms[0], Atom::Torsion { .. })) {
            return Err(WordError::FiniteOrder(self.display(u)));
        }
        let y = self.multiply(&self.multiply(&self.inverse(&x), w), &x);
        if y.is_identity() {
            return Ok(Some(0));
        }
        let (n, k) = (y.atoms.len(), v.atoms.len());
        if n % k != 0 {
            return Ok(None);
        }
        let reps = n / k;
        // Powers of a cyclically reduced word are plain concatenations.
        let vi = self.inverse(&v);
        for (cand, sign) in [(&v, 1i64), (&vi, -1)] {
            if y.atoms.chunks(k).all(|c| c == cand.atoms.as_slice()) {
                return Ok(Some(sign * reps as i64));
            }
        }
        Ok(None)
    }

    pub fn boundary_word(&self, i: u32) -> Result<OrbWord, WordError> {
        self.generator(OrbGen::D(i))
    }

    /// Checks that `g <d_i> g^-1` meets some `<d_j>` only trivially unless
    /// `j = i` and `g` lies in `<d_i>`, over the ball of the given radius with
    /// exponents up to the radius.
    pub fn malnormality_certificate(&self, i: u32, radius: usize) -> Result<MalnormalityCertificate, WordError> {
        let u = self.boundary_word(i)?;
        let targets: Vec<OrbWord> =
            (1..=self.boundary).map(|j| self.boundary_word(j)).collect::<Result<_, _>>()?;
        let ball = ball(OrbWord::identity(), &self.ball_generators(), |a, b| self.multiply(a, b), radius);
        let bound = radius as i64;
        let powers: Vec<(i64, OrbWord)> =
            (-bound..=bound).filter(|&m| m != 0).map(|m| (m, self.power(&u, m))).collect();
        let mut hits = Vec::new();
        let mut checked = 0usize;
        for g in &ball {
            let gi = self.inverse(g);
            for (m, um) in &powers {
                let x = self.multiply(&self.multiply(g, um), &gi);
                for (j, t) in targets.iter().enumerate() {
                    checked += 1;
                    if let Some(k) = self.in_cyclic_subgroup(&x, t)? {
                        let j = j as u32 + 1;
                        let expected = j == i && self.in_cyclic_subgroup(g, &u)?.is_some();
                        hits.push(CertificateHit { conjugator: self.display(g), exponent: *m, target: j, power: k, expected });
                    }
                }
            }
        }
        let ok = hits.iter().all(|h| h.expected);
        Ok(MalnormalityCertificate { boundary: i, radius, ball_size: ball.len(), checked, hits, ok })
    }

    pub fn display(&self, u: &OrbWord) -> String {
        if u.atoms.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < u.atoms.len() {
            match u.atoms[i] {
                Atom::Free { gen, inv } => {
                    let mut run = 1;
                    while i + run < u.atoms.len() && u.atoms[i + run] == u.atoms[i] {
                        run += 1;
                    }
                    let e = if inv { -(run as i64) } else { run as i64 };
                    parts.push(power_text(&self.free_names[gen as usize], e));
                    i += run;
                }
                Atom::Torsion { factor, exp } => {
                    parts.push(power_text(&format!("c{}", self.torsion_cone[factor as usize]), i64::from(exp)));
                    i += 1;
                }
            }
        }
        parts.join(" ")
    }
}

pub(crate) fn power_text(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateHit {
    pub conjugator: String,
    pub exponent: i64,
    pub target: u32,
    pub power: i64,
    /// Whether the hit is the trivial one (`j = i`, `g` in `<d_i>`).
    pub expected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalnormalityCertificate {
    pub boundary: u32,
    pub radius: usize,
    pub ball_size: usize,
    pub checked: usize,
    pub hits: Vec<CertificateHit>,
    pub ok: bool,
}

/// Breadth-first ball: elements in order of first appearance, trying
/// generators in the given order.
pub fn ball<T, F>(identity: T, gens: &[T], mul: F, radius: usize) -> Vec<T>
where
    T: Clone + Eq + std::hash::Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::from([identity.clone()]);
    let mut out = vec![identity];
    let mut layer_start = 0;
    for _ in 0..radius {
        let layer_end = out.len();
        for idx in layer_start..layer_end {
            for g in gens {
                let x = mul(&out[idx], g);
                if seen.insert(x.clone()) {
                    out.push(x);
                }
            }
        }
        layer_start = layer_end;
    }
    out
}

/// Parses `x1^e1 x2^e2 ...` into names and exponents; `1` is the empty word.
pub fn parse_powers(text: &str) -> Result<Vec<(String, i64)>, WordError> {
    let bad = || WordError::Parse(text.to_string());
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, e) = match tok.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
            None => (tok, 1),
        };
        if name.is_empty() {
            return Err(bad());
        }
        out.push((name.to_string(), e));
    }
    Ok(out)
}

/// Reads `a3`, `b1`, `c2`, `d1` style generator names.
pub fn parse_orb_gen(name: &str) -> Option<OrbGen> {
    let (head, idx) = name.split_at(1);
    let i: u32 = idx.parse().ok()?;
    match head {
        "a" => Some(OrbGen::A(i)),
        "b" => Some(OrbGen::B(i)),
        "c" => Some(OrbGen::C(i)),
        "d" => Some(OrbGen::D(i)),
        _ => None,
    }
}

impl FreeProductSignature {
    pub fn parse_word(&self, text: &str) -> Result<OrbWord, WordError> {
        let mut raw = Vec::new();
        for (name, e) in parse_powers(text)? {
            let g = parse_orb_gen(&name).ok_or(WordError::UnknownGenerator(name))?;
            raw.push((g, e));
        }
        self.normal_form(&raw)
    }
}
