//! Power series truncated by total degree.
//!
//! A series of order N keeps exactly the terms of total degree < N. Products
//! and inverses stay within the weaker of the two orders involved, so the
//! order field always states what is trustworthy.

use super::{Monomial, MultiPoly, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::gf::{same_field, Field, FieldElement};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    field: Field,
    vars: Vars,
    order: u32,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl TruncatedSeries {
    pub fn zero(field: &Field, vars: &Vars, order: u32) -> Self {
        TruncatedSeries {
            field: field.clone(),
            vars: vars.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, vars: &Vars, c: FieldElement, order: u32) -> Self {
        let mut s = Self::zero(field, vars, order);
        if order > 0 && !c.is_zero() {
            s.terms.insert(Monomial::one(vars.len()), c);
        }
        s
    }

    pub fn one(field: &Field, vars: &Vars, order: u32) -> Self {
        Self::constant(field, vars, FieldElement::one(field), order)
    }

    pub fn from_poly(p: &MultiPoly, order: u32) -> Self {
        let mut s = Self::zero(p.field(), p.vars(), order);
        for (m, c) in p.terms() {
            if m.total_degree() < order {
                s.terms.insert(m.clone(), c.clone());
            }
        }
        s
    }

    /// Expand a rational function at `center` as a series in the translated
    /// coordinates x - center, up to total degree < order. Errors if the
    /// denominator vanishes at the center.
    pub fn expand_rational(
        rf: &RationalFunction,
        center: &[FieldElement],
        order: u32,
    ) -> Result<Self> {
        let num = shift_truncated(rf.num(), center, order);
        let den = shift_truncated(rf.den(), center, order);
        let den_inv = den.invert().map_err(|_| Error::NotRegular {
            what: format!("{rf}"),
            at: format!(
                "({})",
                center
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        })?;
        Ok(num.mul_ref(&den_inv))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        debug_assert!(
            m.total_degree() < self.order,
            "coefficient beyond truncation order"
        );
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut p = MultiPoly::zero(&self.field, &self.vars);
        for (m, c) in &self.terms {
            p.insert_add(m.clone(), c.clone());
        }
        p
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut s = Self::zero(&self.field, &self.vars, order);
        for (m, c) in &self.terms {
            if m.total_degree() < order {
                s.terms.insert(m.clone(), c.clone());
            }
        }
        s
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            same_field(&self.field, &other.field),
            "series over different fields"
        );
        assert_eq!(*self.vars, *other.vars, "series in different variables");
    }

    fn insert_add(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() || m.total_degree() >= self.order {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add_ref(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.truncate(other.order);
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.truncate(other.order);
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = Self::zero(&self.field, &self.vars, self.order);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.mul_ref(c));
        }
        out
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.field, &self.vars, order);
        for (ma, ca) in &self.terms {
            let da = ma.total_degree();
            if da >= order {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.total_degree() >= order {
                    continue;
                }
                out.insert_add(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        let c = self.coeff(&Monomial::one(self.vars.len()));
        if c.is_zero() {
            return Err(Error::NotAUnit);
        }
        let c_inv = c.inv()?;
        // self = c (1 - w), so 1/self = c^{-1} (1 + w + w^2 + ...)
        let mut w = self.scale(&c_inv).neg_ref();
        w.insert_add(Monomial::one(self.vars.len()), FieldElement::one(&self.field));
        let one = Self::one(&self.field, &self.vars, self.order);
        let mut acc = one.clone();
        for _ in 1..self.order {
            acc = one.add_ref(&w.mul_ref(&acc));
        }
        Ok(acc.scale(&c_inv))
    }

    pub fn neg_ref(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg_ref();
        }
        out
    }
}

/// Series of p(x + center) up to total degree < order in the translated
/// coordinates.
pub fn shift_truncated(p: &MultiPoly, center: &[FieldElement], order: u32) -> TruncatedSeries {
    assert_eq!(center.len(), p.nvars(), "shift arity mismatch");
    let field = p.field().clone();
    let vars = p.vars().clone();
    let mut out = TruncatedSeries::zero(&field, &vars, order);
    for (m, c) in p.terms() {
        let mut t = TruncatedSeries::constant(&field, &vars, c.clone(), order);
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            t = t.mul_ref(&binomial_series(&field, &vars, i, &center[i], e, order));
            if t.is_zero() {
                break;
            }
        }
        out = out.add_ref(&t);
    }
    out
}

/// (x_i + c)^e truncated to total degree < order.
fn binomial_series(
    field: &Field,
    vars: &Vars,
    i: usize,
    c: &FieldElement,
    e: u32,
    order: u32,
) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(field, vars, order);
    if c.is_zero() {
        if e < order {
            let mut m = Monomial::one(vars.len());
            m.0[i] = e;
            s.terms.insert(m, FieldElement::one(field));
        }
        return s;
    }
    let top = e.min(order.saturating_sub(1));
    for k in 0..=top {
        let b = binomial_mod_p(e as u64, k as u64, field.p());
        if b == 0 {
            continue;
        }
        let coeff = FieldElement::from_int(field, b as i64).mul_ref(&c.pow((e - k) as u128));
        if coeff.is_zero() {
            continue;
        }
        let mut m = Monomial::one(vars.len());
        m.0[i] = k;
        s.terms.insert(m, coeff);
    }
    s
}

/// Binomial coefficient mod p by Lucas' theorem.
fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        // small-case binomial via multiplicative formula mod p
        let mut num = 1u64;
        let mut den = 1u64;
        for j in 0..ki {
            num = num * ((ni - j) % p) % p;
            den = den * ((j + 1) % p) % p;
        }
        // den = ki! mod p is a unit; Fermat inverse (den^0 = 1 handles p = 2)
        let mut den_inv = 1u64;
        for _ in 0..p.saturating_sub(2) {
            den_inv = den_inv * den % p;
        }
        acc = acc * num % p * den_inv % p;
        n /= p;
        k /= p;
    }
    acc
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O({})", self.order);
        }
        write!(f, "{} + O({})", self.to_poly(), self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_poly, parse_rational, vars};
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn geometric_expansion_over_gf9() {
        let f = FiniteField::new(3, 2).unwrap();
        let v = vars(&["t"]);
        let r = parse_rational(&f, &v, "2*t/(t-1)").unwrap();
        let s = TruncatedSeries::expand_rational(&r, &[FieldElement::zero(&f)], 4).unwrap();
        let expect = TruncatedSeries::from_poly(&parse_poly(&f, &v, "t+t^2+t^3").unwrap(), 4);
        assert_eq!(s, expect);
    }

    #[test]
    fn unit_inverse_over_gf4() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = vars(&["y"]);
        let r = parse_rational(&f, &v, "1/(y^2+y+1)").unwrap();
        let s = TruncatedSeries::expand_rational(&r, &[FieldElement::zero(&f)], 3).unwrap();
        let expect = TruncatedSeries::from_poly(&parse_poly(&f, &v, "1+y").unwrap(), 3);
        assert_eq!(s, expect);
    }

    #[test]
    fn expansion_is_a_ring_homomorphism() {
        let f = FiniteField::new(3, 2).unwrap();
        let v = vars(&["s", "t"]);
        let center = vec![FieldElement::from_int(&f, 1), FieldElement::parse(&f, "a").unwrap()];
        let a = parse_rational(&f, &v, "(s+2*t)/(s-2)").unwrap();
        let b = parse_rational(&f, &v, "(t^2+a)/(s*t-1)").unwrap();
        let ea = TruncatedSeries::expand_rational(&a, &center, 5).unwrap();
        let eb = TruncatedSeries::expand_rational(&b, &center, 5).unwrap();
        let eab = TruncatedSeries::expand_rational(&a.mul_ref(&b), &center, 5).unwrap();
        assert_eq!(ea.mul_ref(&eb), eab);
        let esum = TruncatedSeries::expand_rational(&a.add_ref(&b), &center, 5).unwrap();
        assert_eq!(ea.add_ref(&eb), esum);
    }

    #[test]
    fn inverse_of_inverse() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = vars(&["x", "y"]);
        let p = parse_poly(&f, &v, "1+x+a*y+x*y^2").unwrap();
        let s = TruncatedSeries::from_poly(&p, 6);
        let inv = s.invert().unwrap();
        assert_eq!(s.mul_ref(&inv), TruncatedSeries::one(&f, &v, 6));
        assert_eq!(inv.invert().unwrap(), s);
        // non-units are rejected
        let bad = TruncatedSeries::from_poly(&parse_poly(&f, &v, "x+y").unwrap(), 4);
        assert!(bad.invert().is_err());
    }

    #[test]
    fn pole_at_center_is_an_error() {
        let f = FiniteField::prime(3).unwrap();
        let v = vars(&["t"]);
        let r = parse_rational(&f, &v, "1/t").unwrap();
        let e = TruncatedSeries::expand_rational(&r, &[FieldElement::zero(&f)], 3);
        assert!(matches!(e, Err(Error::NotRegular { .. })));
    }

    #[test]
    fn lucas_binomials() {
        assert_eq!(binomial_mod_p(4, 2, 2), 0); // C(4,2)=6
        assert_eq!(binomial_mod_p(4, 2, 3), 0);
        assert_eq!(binomial_mod_p(5, 2, 3), 1); // C(5,2)=10
        assert_eq!(binomial_mod_p(7, 3, 2), 1); // C(7,3)=35
        assert_eq!(binomial_mod_p(6, 3, 5), 0); // C(6,3)=20
        assert_eq!(binomial_mod_p(100, 50, 3), binomial_exact_mod(100, 50, 3));
    }

    fn binomial_exact_mod(n: u64, k: u64, p: u64) -> u64 {
        // independent check: Pascal's triangle mod p
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64];
            for i in 1..row.len() {
                next.push((row[i - 1] + row[i]) % p);
            }
            next.push(1);
            row = next;
        }
        row[k as usize] % p
    }
}
