//! Fundamental groups of bounded Seifert pieces.
//!
//! Every element is written uniquely as `s(w) f^n`, where `w` is an orbifold
//! normal form, `s` lifts it letter by letter (cone exponents in `[0,p)`) and
//! `f` is the regular fiber.

use serde::Serialize;

use crate::orbifold::{parse_orb_gen, parse_powers, Atom, FreeProductSignature, OrbGen, OrbWord, WordError};
use crate::symbol::{SeifertSymbol, SpecialManifold};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("boundary index {0} out of range")]
    BadBoundary(u32),
    #[error("{0} fibers as the twisted I-bundle over the Klein bottle in two ways; the regular fiber is not unique")]
    AmbiguousFiber(String),
    #[error("conjugator lies in the peripheral subgroup it conjugates")]
    PeripheralConjugator,
    #[error("slope ({0},{1}) is a fiber direction")]
    DegenerateSlope(i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeifertGen {
    Orb(OrbGen),
    F,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeifertElement {
    pub orb: OrbWord,
    pub fiber: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeifertGroup {
    symbol: SeifertSymbol,
    sig: FreeProductSignature,
    /// `q` of the cone pair behind each torsion factor.
    factor_q: Vec<i64>,
    dh: SeifertElement,
}

/// One row of a peripheral intersection check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionRow {
    pub m: i64,
    pub n: i64,
    pub found: Option<(i64, i64)>,
    pub ok: bool,
}

impl SeifertGroup {
    pub fn new(symbol: &SeifertSymbol) -> Result<Self, GroupError> {
        let sig = FreeProductSignature::from_symbol(symbol)?;
        let factor_q = symbol.pairs().iter().filter(|(p, _)| *p >= 2).map(|&(_, q)| q).collect();
        let mut group = SeifertGroup { symbol: symbol.clone(), sig, factor_q, dh: SeifertElement::default() };
        let mut rel = Vec::new();
        let g = symbol.genus();
        if g >= 0 {
            for i in 1..=g as u32 {
                rel.extend([(OrbGen::A(i), 1), (OrbGen::B(i), 1), (OrbGen::A(i), -1), (OrbGen::B(i), -1)]);
            }
        } else {
            for i in 1..=(-g) as u32 {
                rel.push((OrbGen::A(i), 2));
            }
        }
        for j in 1..=symbol.pairs().len() as u32 {
            rel.push((OrbGen::C(j), 1));
        }
        for l in 1..symbol.boundary() {
            rel.push((OrbGen::D(l), 1));
        }
        let raw: Vec<(SeifertGen, i64)> = rel.into_iter().map(|(g, e)| (SeifertGen::Orb(g), e)).collect();
        let long = group.element_from_word(&raw)?;
        group.dh = group.inverse(&long);
        Ok(group)
    }

    pub fn symbol(&self) -> &SeifertSymbol {
        &self.symbol
    }

    pub fn signature(&self) -> &FreeProductSignature {
        &self.sig
    }

    pub fn boundary(&self) -> u32 {
        self.symbol.boundary()
    }

    pub fn identity(&self) -> SeifertElement {
        SeifertElement::default()
    }

    fn feed_free(&self, x: &mut SeifertElement, gen: u16, inv: bool) {
        x.fiber *= i64::from(self.sig.free_epsilon(gen));
        let mut atoms = std::mem::take(&mut x.orb).into_atoms();
        self.sig.push_free(&mut atoms, gen, inv);
        x.orb = OrbWord::from_atoms(atoms);
    }

    fn feed_torsion(&self, x: &mut SeifertElement, factor: u16, exp: i64) {
        let mut atoms = std::mem::take(&mut x.orb).into_atoms();
        let k = self.sig.push_torsion(&mut atoms, factor, exp);
        x.orb = OrbWord::from_atoms(atoms);
        // c^p = f^-q
        x.fiber -= self.factor_q[factor as usize] * k;
    }

    fn feed_atom(&self, x: &mut SeifertElement, a: Atom) {
        match a {
            Atom::Free { gen, inv } => self.feed_free(x, gen, inv),
            Atom::Torsion { factor, exp } => self.feed_torsion(x, factor, i64::from(exp)),
        }
    }

    pub fn multiply(&self, x: &SeifertElement, y: &SeifertElement) -> SeifertElement {
        let mut out = x.clone();
        for &a in y.orb.atoms() {
            self.feed_atom(&mut out, a);
        }
        out.fiber += y.fiber;
        out
    }

    pub fn inverse(&self, x: &SeifertElement) -> SeifertElement {
        let mut out = SeifertElement::default();
        for &a in x.orb.atoms().iter().rev() {
            match a {
                Atom::Free { gen, inv } => self.feed_free(&mut out, gen, !inv),
                Atom::Torsion { factor, exp } => self.feed_torsion(&mut out, factor, -i64::from(exp)),
            }
        }
        out.fiber += i64::from(self.sig.epsilon(&out.orb)) * -x.fiber;
        out
    }

    pub fn power(&self, x: &SeifertElement, n: i64) -> SeifertElement {
        let base = if n < 0 { self.inverse(x) } else { x.clone() };
        let mut out = self.identity();
        for _ in 0..n.unsigned_abs() {
            out = self.multiply(&out, &base);
        }
        out
    }

    pub fn conjugate(&self, g: &SeifertElement, x: &SeifertElement) -> SeifertElement {
        self.multiply(&self.multiply(g, x), &self.inverse(g))
    }

    pub fn fiber_power(&self, n: i64) -> SeifertElement {
        SeifertElement { orb: OrbWord::identity(), fiber: n }
    }

    pub fn epsilon(&self, x: &SeifertElement) -> i8 {
        self.sig.epsilon(&x.orb)
    }

    pub fn project(&self, x: &SeifertElement) -> OrbWord {
        x.orb.clone()
    }

    pub fn regular_fiber(&self) -> Result<SeifertElement, GroupError> {
        if self.symbol.recognize_special() == SpecialManifold::KleinTimesI {
            return Err(GroupError::AmbiguousFiber(self.symbol.to_string()));
        }
        Ok(self.fiber_power(1))
    }

    pub fn element_from_word(&self, raw: &[(SeifertGen, i64)]) -> Result<SeifertElement, GroupError> {
        let mut x = self.identity();
        for &(g, e) in raw {
            match g {
                SeifertGen::F => x.fiber += e,
                SeifertGen::Orb(OrbGen::C(j)) => match self.sig.cone_factor(j) {
                    Some(Some(factor)) => self.feed_torsion(&mut x, factor, e),
                    // p = 1: c_j = f^-q
                    Some(None) => x.fiber -= self.symbol.pairs()[j as usize - 1].1 * e,
                    None => return Err(WordError::UnknownGenerator(g_name(g)).into()),
                },
                SeifertGen::Orb(OrbGen::D(l)) if l == self.boundary() => {
                    x = self.multiply(&x, &self.power(&self.dh, e));
                }
                SeifertGen::Orb(og) => {
                    let w = self.sig.generator(og)?;
                    let Some(&Atom::Free { gen, .. }) = w.atoms().first() else {
                        return Err(WordError::UnknownGenerator(og.to_string()).into());
                    };
                    for _ in 0..e.unsigned_abs() {
                        self.feed_free(&mut x, gen, e < 0);
                    }
                }
            }
        }
        Ok(x)
    }

    pub fn parse_word(&self, text: &str) -> Result<SeifertElement, GroupError> {
        let mut raw = Vec::new();
        for (name, e) in parse_powers(text)? {
            let g = if name == "f" {
                SeifertGen::F
            } else {
                SeifertGen::Orb(parse_orb_gen(&name).ok_or(WordError::UnknownGenerator(name))?)
            };
            raw.push((g, e));
        }
        self.element_from_word(&raw)
    }

    pub fn boundary_element(&self, i: u32) -> Result<SeifertElement, GroupError> {
        if i == 0 || i > self.boundary() {
            return Err(GroupError::BadBoundary(i));
        }
        self.element_from_word(&[(SeifertGen::Orb(OrbGen::D(i)), 1)])
    }

    /// `d_i^m f^n`.
    pub fn from_peripheral(&self, i: u32, (m, n): (i64, i64)) -> Result<SeifertElement, GroupError> {
        let d = self.boundary_element(i)?;
        Ok(self.multiply(&self.power(&d, m), &self.fiber_power(n)))
    }

    /// Returns `(m,n)` with `x = d_i^m f^n`, if `x` is peripheral at `i`.
    pub fn peripheral_membership(&self, x: &SeifertElement, i: u32) -> Result<Option<(i64, i64)>, GroupError> {
        let d = self.boundary_element(i)?;
        if i < self.boundary() {
            // d_i is a free letter: x must be a pure power of it.
            let Some(&first) = d.orb.atoms().first() else { unreachable!("free generator") };
            let flipped = match first {
                Atom::Free { gen, inv } => Atom::Free { gen, inv: !inv },
                Atom::Torsion { .. } => unreachable!("free generator"),
            };
            let atoms = x.orb.atoms();
            return Ok(if atoms.iter().all(|&a| a == first) {
                Some((atoms.len() as i64, x.fiber))
            } else if atoms.iter().all(|&a| a == flipped) {
                Some((-(atoms.len() as i64), x.fiber))
            } else {
                None
            });
        }
        let m = match self.sig.in_cyclic_subgroup(&x.orb, &d.orb) {
            Ok(m) => m,
            Err(WordError::FiniteOrder(_)) => self.finite_order_exponent(&x.orb, &d),
            Err(e) => return Err(e.into()),
        };
        Ok(m.map(|m| (m, x.fiber - self.power(&d, m).fiber)))
    }

    fn finite_order_exponent(&self, w: &OrbWord, d: &SeifertElement) -> Option<i64> {
        let mut p = self.identity();
        for m in 0..=self.sig.torsion_orders().iter().copied().max().unwrap_or(1) as i64 {
            if &p.orb == w {
                return Some(m);
            }
            p = self.multiply(&p, d);
        }
        None
    }

    pub fn is_peripheral(&self, x: &SeifertElement, i: u32) -> bool {
        matches!(self.peripheral_membership(x, i), Ok(Some(_)))
    }

    /// Canonical representative of the left coset `x <d_i, f>`: the shortest
    /// section element in the coset, ties broken by the atom order.
    pub fn coset_rep(&self, x: &SeifertElement, i: u32) -> Result<SeifertElement, GroupError> {
        let d = self.boundary_element(i)?;
        let w = &x.orb;
        let best = if i < self.boundary() {
            let Some(&first) = d.orb.atoms().first() else { unreachable!("free generator") };
            let gen_of = |a: &Atom| matches!((a, first), (Atom::Free { gen: g1, .. }, Atom::Free { gen: g2, .. }) if *g1 == g2);
            let atoms = w.atoms();
            let keep = atoms.len() - atoms.iter().rev().take_while(|a| gen_of(a)).count();
            OrbWord::from_atoms(atoms[..keep].to_vec())
        } else {
            let window = 2 * w.len() as i64 + 3;
            let step = &d.orb;
            let step_inv = self.sig.inverse(step);
            let mut best = w.clone();
            let mut up = w.clone();
            let mut down = w.clone();
            for _ in 0..window {
                up = self.sig.multiply(&up, step);
                down = self.sig.multiply(&down, &step_inv);
                for c in [&up, &down] {
                    if (c.len(), c) < (best.len(), &best) {
                        best = c.clone();
                    }
                }
            }
            best
        };
        Ok(SeifertElement { orb: best, fiber: 0 })
    }

    /// Ball generators: every presentation generator and inverse, optionally
    /// with the fiber.
    pub fn generators(&self, with_fiber: bool) -> Vec<SeifertElement> {
        let mut gens: Vec<SeifertElement> = Vec::new();
        let g = self.symbol.genus();
        let mut names: Vec<SeifertGen> = Vec::new();
        if g >= 0 {
            for i in 1..=g as u32 {
                names.extend([SeifertGen::Orb(OrbGen::A(i)), SeifertGen::Orb(OrbGen::B(i))]);
            }
        } else {
            for i in 1..=(-g) as u32 {
                names.push(SeifertGen::Orb(OrbGen::A(i)));
            }
        }
        for j in 1..=self.symbol.pairs().len() as u32 {
            names.push(SeifertGen::Orb(OrbGen::C(j)));
        }
        for l in 1..=self.boundary() {
            names.push(SeifertGen::Orb(OrbGen::D(l)));
        }
        if with_fiber {
            names.push(SeifertGen::F);
        }
        for n in names {
            for e in [1, -1] {
                let x = self.element_from_word(&[(n, e)]).expect("own generator");
                if x != self.identity() && !gens.contains(&x) {
                    gens.push(x);
                }
            }
        }
        gens
    }

    pub fn ball(&self, radius: usize, with_fiber: bool) -> Vec<SeifertElement> {
        crate::orbifold::ball(self.identity(), &self.generators(with_fiber), |a, b| self.multiply(a, b), radius)
    }

    /// For every `(m,n)` with entries bounded by `bound`, tests whether
    /// `g d_i^m f^n g^-1` is peripheral at `j`; only `m = 0` should succeed.
    pub fn peripheral_conjugate_intersection_check(
        &self,
        g: &SeifertElement,
        i: u32,
        j: u32,
        bound: i64,
    ) -> Result<Vec<IntersectionRow>, GroupError> {
        if i == j && self.peripheral_membership(g, i)?.is_some() {
            return Err(GroupError::PeripheralConjugator);
        }
        let mut rows = Vec::new();
        for m in -bound..=bound {
            for n in -bound..=bound {
                if (m, n) == (0, 0) {
                    continue;
                }
                let x = self.conjugate(g, &self.from_peripheral(i, (m, n))?);
                let found = self.peripheral_membership(&x, j)?;
                rows.push(IntersectionRow { m, n, found, ok: found.is_some() == (m == 0) });
            }
        }
        Ok(rows)
    }

    pub fn display(&self, x: &SeifertElement) -> String {
        let orb = self.sig.display(&x.orb);
        match (x.orb.is_identity(), x.fiber) {
            (_, 0) => orb,
            (true, n) => crate::orbifold::power_text("f", n),
            (false, n) => format!("{orb} {}", crate::orbifold::power_text("f", n)),
        }
    }
}

fn g_name(g: SeifertGen) -> String {
    match g {
        SeifertGen::Orb(o) => o.to_string(),
        SeifertGen::F => "f".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(s: &str) -> SeifertGroup {
        SeifertGroup::new(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn cone_relation_holds() {
        let g = group("S(0,1;(2,1),(3,1))");
        let c1 = g.parse_word("c1").unwrap();
        assert_eq!(g.power(&c1, 2), g.fiber_power(-1));
        assert_eq!(g.parse_word("c2^3 f").unwrap(), g.identity());
    }

    #[test]
    fn cross_cap_inverts_fiber() {
        let g = group("S(-1,2;(3,2))");
        let a = g.parse_word("a1").unwrap();
        assert_eq!(g.conjugate(&a, &g.fiber_power(1)), g.fiber_power(-1));
        assert_eq!(g.epsilon(&a), -1);
    }

    #[test]
    fn long_relation_holds() {
        let g = group("S(1,2;(2,1),(3,2))");
        let w = g.parse_word("a1 b1 a1^-1 b1^-1 c1 c2 d1 d2").unwrap();
        assert_eq!(w, g.identity());
        let n = group("S(-2,1;(5,2))");
        assert_eq!(n.parse_word("a1^2 a2^2 c1 d1").unwrap(), n.identity());
    }

    #[test]
    fn unit_pairs_are_fiber_powers() {
        let g = group("S(0,2;(1,3),(2,1))");
        assert_eq!(g.parse_word("c1").unwrap(), g.fiber_power(-3));
    }

    #[test]
    fn peripheral_membership_examples() {
        let g = group("S(0,1;(2,1),(3,1))");
        assert_eq!(g.peripheral_membership(&g.parse_word("c1 d1").unwrap(), 1).unwrap(), None);
        let x = g.parse_word("d1^3 f^-2").unwrap();
        assert_eq!(g.peripheral_membership(&x, 1).unwrap(), Some((3, -2)));
        let h = group("S(0,2;(2,1))");
        assert_eq!(h.peripheral_membership(&h.parse_word("d2^-2 f^5").unwrap(), 2).unwrap(), Some((-2, 5)));
        assert_eq!(h.peripheral_membership(&h.parse_word("d1^4 f").unwrap(), 1).unwrap(), Some((4, 1)));
    }

    #[test]
    fn klein_bundle_fiber_is_ambiguous() {
        let g = group("S(-1,1;)");
        assert!(matches!(g.regular_fiber(), Err(GroupError::AmbiguousFiber(_))));
        assert!(group("S(0,1;(2,1),(3,1))").regular_fiber().is_ok());
    }

    #[test]
    fn intersections_are_fiber_powers() {
        let g = group("S(0,3;(2,1))");
        let c1 = g.parse_word("c1").unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 3), (3, 3)] {
            let rows = g.peripheral_conjugate_intersection_check(&c1, i, j, 2).unwrap();
            assert!(rows.iter().all(|r| r.ok), "{i},{j}");
        }
        let d1 = g.parse_word("d1 f").unwrap();
        assert_eq!(g.peripheral_conjugate_intersection_check(&d1, 1, 1, 2), Err(GroupError::PeripheralConjugator));
    }

    #[test]
    fn coset_reps_are_canonical() {
        let g = group("S(0,2;(2,1),(3,1))");
        for x in g.ball(3, true) {
            for i in 1..=2 {
                let r = g.coset_rep(&x, i).unwrap();
                assert!(g.is_peripheral(&g.multiply(&g.inverse(&r), &x), i));
                let shifted = g.multiply(&x, &g.from_peripheral(i, (2, -1)).unwrap());
                assert_eq!(g.coset_rep(&shifted, i).unwrap(), r);
            }
        }
        assert_eq!(g.coset_rep(&g.identity(), 2).unwrap(), g.identity());
    }

    fn arb_element(g: SeifertGroup) -> impl Strategy<Value = SeifertElement> {
        let gens = g.generators(true);
        prop::collection::vec(0..gens.len(), 0..20)
            .prop_map(move |idx| idx.iter().fold(g.identity(), |w, &i| g.multiply(&w, &gens[i])))
    }

    proptest! {
        #[test]
        fn group_laws(
            x in arb_element(group("S(-1,2;(3,2))")),
            y in arb_element(group("S(-1,2;(3,2))")),
            z in arb_element(group("S(-1,2;(3,2))")),
        ) {
            let g = group("S(-1,2;(3,2))");
            prop_assert_eq!(g.multiply(&g.multiply(&x, &y), &z), g.multiply(&x, &g.multiply(&y, &z)));
            prop_assert_eq!(g.multiply(&x, &g.inverse(&x)), g.identity());
            prop_assert_eq!(g.epsilon(&g.multiply(&x, &y)), g.epsilon(&x) * g.epsilon(&y));
            let s = g.signature();
            prop_assert_eq!(g.project(&g.multiply(&x, &y)), s.multiply(&g.project(&x), &g.project(&y)));
            let eps = i64::from(g.epsilon(&x));
            prop_assert_eq!(g.conjugate(&x, &g.fiber_power(1)), g.fiber_power(eps));
        }

        #[test]
        fn peripheral_round_trip(m in -4i64..5, n in -4i64..5, i in 1u32..4) {
            let g = group("S(1,3;(2,1),(5,3))");
            let x = g.from_peripheral(i, (m, n)).unwrap();
            prop_assert_eq!(g.peripheral_membership(&x, i).unwrap(), Some((m, n)));
        }
    }
}
