//! Finite abelian groups presented as products of cyclic factors.
//!
//! Elements are dense indices in little-endian mixed radix: the tuple
//! `(a0, a1, ...)` is stored as `a0 + f0*a1 + f0*f1*a2 + ...`. Addition and
//! negation go through precomputed tables so the enumeration kernels stay
//! branch-free.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A group element, interpreted against a specific [`Group`].
pub type Element = u8;

/// Largest supported group order.
pub const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    factors: Vec<usize>,
    order: usize,
    add: Vec<Element>,
    neg: Vec<Element>,
}

impl Group {
    pub fn new(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        if let Some(f) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::InvalidGroup(format!("cyclic factor {f} < 2")));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &f| acc.checked_mul(f))
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidGroup(format!("order exceeds {MAX_ORDER}")))?;

        let mut g = Group {
            factors: factors.to_vec(),
            order,
            add: vec![0; order * order],
            neg: vec![0; order],
        };
        for a in 0..order {
            let ta = g.to_tuple(a as Element);
            let na: Vec<usize> = ta.iter().zip(factors).map(|(&x, &f)| (f - x) % f).collect();
            g.neg[a] = g.pack_unchecked(&na);
            for b in 0..order {
                let tb = g.to_tuple(b as Element);
                let s: Vec<usize> =
                    ta.iter().zip(&tb).zip(factors).map(|((&x, &y), &f)| (x + y) % f).collect();
                g.add[a * order + b] = g.pack_unchecked(&s);
            }
        }
        Ok(g)
    }

    /// The cyclic group of order `k`.
    pub fn cyclic(k: usize) -> Result<Self> {
        Self::new(&[k])
    }

    pub fn z4() -> Self {
        Self::new(&[4]).expect("valid group")
    }

    pub fn z2_squared() -> Self {
        Self::new(&[2, 2]).expect("valid group")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        self.add[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    /// `a` if `sign` is positive, `-a` otherwise.
    #[inline]
    pub fn signed(&self, sign: i8, a: Element) -> Element {
        if sign >= 0 {
            a
        } else {
            self.neg(a)
        }
    }

    /// `k * a` for a (possibly negative) integer `k`.
    pub fn mul_int(&self, k: i64, a: Element) -> Element {
        let base = if k < 0 { self.neg(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.add(acc, base))
    }

    pub fn check(&self, a: usize) -> Result<Element> {
        if a < self.order {
            Ok(a as Element)
        } else {
            Err(Error::ElementOutOfRange { index: a, order: self.order })
        }
    }

    pub fn checked_add(&self, a: usize, b: usize) -> Result<Element> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn checked_neg(&self, a: usize) -> Result<Element> {
        Ok(self.neg(self.check(a)?))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        0..self.order as Element
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Element> {
        1..self.order as Element
    }

    pub fn to_tuple(&self, a: Element) -> Vec<usize> {
        let mut rest = a as usize;
        self.factors
            .iter()
            .map(|&f| {
                let d = rest % f;
                rest /= f;
                d
            })
            .collect()
    }

    fn pack_unchecked(&self, t: &[usize]) -> Element {
        t.iter().rev().zip(self.factors.iter().rev()).fold(0usize, |acc, (&d, &f)| acc * f + d) as Element
    }

    pub fn from_tuple(&self, t: &[usize]) -> Result<Element> {
        if t.len() != self.factors.len() || t.iter().zip(&self.factors).any(|(&d, &f)| d >= f) {
            return Err(Error::InvalidGroup(format!("tuple {t:?} does not fit factors {:?}", self.factors)));
        }
        Ok(self.pack_unchecked(t))
    }

    /// Renders an element as a factor tuple, e.g. `(1,0)`.
    pub fn format_element(&self, a: Element) -> String {
        let parts: Vec<String> = self.to_tuple(a).iter().map(|d| d.to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// Parses `(1,0)` style tuples; a bare integer is taken as an index.
    pub fn parse_element(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let t = inner
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidGroup(format!("bad element {s:?}: {e}")))?;
            self.from_tuple(&t)
        } else {
            let idx = s.parse::<usize>().map_err(|e| Error::InvalidGroup(format!("bad element {s:?}: {e}")))?;
            self.check(idx)
        }
    }

    /// True when every cyclic factor is a power of two. Element indices then
    /// concatenate the binary digits of the factors, and addition is a
    /// carry-suppressed add on each factor's bit field.
    pub fn is_two_group(&self) -> bool {
        self.factors.iter().all(|f| f.is_power_of_two())
    }

    /// Canonical short name: `z4`, `z2^2`, `z2xz4`.
    pub fn name(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let f = self.factors[i];
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == f {
                j += 1;
            }
            parts.push(if j - i > 1 { format!("z{f}^{}", j - i) } else { format!("z{f}") });
            i = j;
        }
        parts.join("x")
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.name())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Accepts `z4`, `z2^2`, `z2xz3`, or `c:a,b,c`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidGroup(format!("unrecognised group spec {s:?}"));
        if let Some(list) = s.strip_prefix("c:") {
            let factors = list
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            return Group::new(&factors);
        }
        let mut factors = Vec::new();
        for part in s.split('x') {
            let body = part.strip_prefix('z').ok_or_else(bad)?;
            let (base, exp) = match body.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let base = base.parse::<usize>().map_err(|_| bad())?;
            factors.extend(std::iter::repeat_n(base, exp));
        }
        Group::new(&factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert_eq!(Group::new(&[4]).unwrap().order(), 4);
        assert_eq!(Group::new(&[2, 2]).unwrap().order(), 4);
        assert_eq!(Group::new(&[2, 3]).unwrap().order(), 6);
        assert!(Group::new(&[]).is_err());
        assert!(Group::new(&[1]).is_err());
        assert!(Group::new(&[4, 0]).is_err());
        assert!(Group::new(&[8, 9]).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let z4 = Group::z4();
        let v4 = Group::z2_squared();
        assert_eq!(z4.add(3, 2), 1);
        assert_eq!(v4.add(3, 1), 2);
        assert_eq!(z4.neg(1), 3);
        assert_eq!(v4.neg(3), 3);
        for g in [&z4, &v4] {
            assert_eq!(g.neg(0), 0);
            for a in g.elements() {
                assert_eq!(g.add(a, 0), a);
            }
        }
        assert_eq!(z4.add(1, 1), 2);
        assert!(v4.elements().all(|a| v4.add(a, a) == 0));
    }

    #[test]
    fn out_of_range() {
        let z4 = Group::z4();
        assert_eq!(z4.checked_add(4, 0), Err(Error::ElementOutOfRange { index: 4, order: 4 }));
        assert!(z4.checked_neg(9).is_err());
        assert_eq!(z4.checked_add(3, 3), Ok(2));
    }

    #[test]
    fn group_laws_exhaustive() {
        let mut groups = Vec::new();
        for k in 2..=16 {
            groups.push(Group::cyclic(k).unwrap());
        }
        groups.extend([[2, 2], [2, 4], [4, 2], [2, 6], [3, 3]].iter().map(|f| Group::new(f).unwrap()));
        groups.push(Group::new(&[2, 2, 2]).unwrap());
        groups.push(Group::new(&[2, 2, 2, 2]).unwrap());
        for g in &groups {
            for a in g.elements() {
                assert_eq!(g.neg(g.neg(a)), a);
                assert_eq!(g.add(a, g.neg(a)), 0);
                for b in g.elements() {
                    assert_eq!(g.add(a, b), g.add(b, a), "{g}");
                    for c in g.elements() {
                        assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)), "{g}");
                    }
                }
            }
        }
    }

    #[test]
    fn encoding_is_little_endian_mixed_radix() {
        let g = Group::new(&[2, 3]).unwrap();
        assert_eq!(g.from_tuple(&[1, 2]).unwrap(), 1 + 2 * 2);
        assert_eq!(g.to_tuple(5), vec![1, 2]);
        let v4 = Group::z2_squared();
        assert_eq!(v4.format_element(1), "(1,0)");
        assert_eq!(v4.parse_element("(1,1)").unwrap(), 3);
        assert_eq!(Group::z4().format_element(3), "(3)");
        assert_eq!(Group::z4().parse_element("2").unwrap(), 2);
    }

    #[test]
    fn parse_specs() {
        assert_eq!("z4".parse::<Group>().unwrap().factors(), &[4]);
        assert_eq!("Z2^2".parse::<Group>().unwrap().factors(), &[2, 2]);
        assert_eq!("c:2,3".parse::<Group>().unwrap().order(), 6);
        assert_eq!("z2xz4".parse::<Group>().unwrap().factors(), &[2, 4]);
        assert!("q8".parse::<Group>().is_err());
        assert_eq!(Group::z2_squared().name(), "z2^2");
        assert!(Group::z2_squared().is_two_group());
        assert!(!Group::cyclic(6).unwrap().is_two_group());
    }
}
