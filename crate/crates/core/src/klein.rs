//! The group `<a, f | a f a^-1 = f^-1>` of the twisted I-bundle over the
//! Klein bottle. Elements are `a^m f^n`.

use serde::{Deserialize, Serialize};

use crate::seifert::GroupError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KleinElement {
    pub a: i64,
    pub f: i64,
}

impl KleinElement {
    pub const IDENTITY: KleinElement = KleinElement { a: 0, f: 0 };

    pub fn new(a: i64, f: i64) -> Self {
        KleinElement { a, f }
    }

    pub fn multiply(self, other: KleinElement) -> KleinElement {
        let sign = if other.a.rem_euclid(2) == 0 { 1 } else { -1 };
        KleinElement { a: self.a + other.a, f: sign * self.f + other.f }
    }

    pub fn inverse(self) -> KleinElement {
        let sign = if self.a.rem_euclid(2) == 0 { 1 } else { -1 };
        KleinElement { a: -self.a, f: -sign * self.f }
    }

    pub fn power(self, n: i64) -> KleinElement {
        let base = if n < 0 { self.inverse() } else { self };
        (0..n.unsigned_abs()).fold(KleinElement::IDENTITY, |acc, _| acc.multiply(base))
    }

    pub fn conjugate(self, g: KleinElement) -> KleinElement {
        g.multiply(self).multiply(g.inverse())
    }

    /// Coordinates `(p,q)` with `x = a^{2p} f^q`, when `x` lies in the
    /// boundary subgroup `<a^2, f>`.
    pub fn peripheral(self) -> Option<(i64, i64)> {
        (self.a.rem_euclid(2) == 0).then_some((self.a / 2, self.f))
    }

    pub fn from_peripheral((p, q): (i64, i64)) -> KleinElement {
        KleinElement { a: 2 * p, f: q }
    }

    /// Representative of `x <a^2, f>`: either `1` or `a`.
    pub fn coset_rep(self) -> KleinElement {
        KleinElement { a: self.a.rem_euclid(2), f: 0 }
    }

    pub fn display(self) -> String {
        let mut parts = Vec::new();
        if self.a != 0 {
            parts.push(crate::orbifold::power_text("a", self.a));
        }
        if self.f != 0 {
            parts.push(crate::orbifold::power_text("f", self.f));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// Checks that conjugating by `a` moves every nontrivial power of the
/// boundary element `a^{2p} f^q` out of its cyclic subgroup.
pub fn klein_slope_separation_check(p: i64, q: i64, bound: i64) -> Result<bool, GroupError> {
    if p == 0 || q == 0 {
        return Err(GroupError::DegenerateSlope(p, q));
    }
    let x = KleinElement::from_peripheral((p, q));
    let a = KleinElement::new(1, 0);
    for k in (-bound..=bound).filter(|&k| k != 0) {
        let y = x.power(k).conjugate(a);
        let (yp, yq) = y.peripheral().expect("the boundary subgroup is normal");
        // y in <x> iff (yp, yq) = m (p, q) for some integer m
        if yp % p == 0 && yp / p * q == yq {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relation() {
        let a = KleinElement::new(1, 0);
        let f = KleinElement::new(0, 1);
        assert_eq!(f.conjugate(a), f.inverse());
        assert_eq!(a.multiply(f), KleinElement::new(1, 1));
        assert_eq!(f.multiply(a), KleinElement::new(1, -1));
    }

    #[test]
    fn group_laws_on_a_grid() {
        let pts: Vec<KleinElement> =
            (-2..=2).flat_map(|a| (-2..=2).map(move |f| KleinElement::new(a, f))).collect();
        for &x in &pts {
            assert_eq!(x.multiply(x.inverse()), KleinElement::IDENTITY);
            for &y in &pts {
                for &z in &pts {
                    assert_eq!(x.multiply(y).multiply(z), x.multiply(y.multiply(z)));
                }
            }
        }
    }

    #[test]
    fn boundary_subgroup_has_index_two() {
        assert_eq!(KleinElement::new(3, 5).coset_rep(), KleinElement::new(1, 0));
        assert_eq!(KleinElement::new(-4, 5).peripheral(), Some((-2, 5)));
        assert_eq!(KleinElement::new(1, 0).peripheral(), None);
    }

    #[test]
    fn slope_separation() {
        assert!(klein_slope_separation_check(1, 1, 5).unwrap());
        assert!(klein_slope_separation_check(2, -3, 5).unwrap());
        assert!(klein_slope_separation_check(1, 0, 5).is_err());
        assert!(klein_slope_separation_check(0, -1, 5).is_err());
    }
}
