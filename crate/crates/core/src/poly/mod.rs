//! Sparse multivariate polynomials and rational functions over GF(p^m).
//!
//! Terms live in a BTreeMap keyed by monomials under the graded
//! lexicographic order (total degree first, then exponent-vector lex with
//! the first variable strongest). Rational functions are kept reduced to
//! lowest terms with a monic denominator, so equality is plain structural
//! equality.

mod gcd;
mod parse;
mod series;

pub use gcd::gcd;
pub use parse::{parse_poly, parse_rational};
pub use series::TruncatedSeries;

use crate::error::{Error, Result};
use crate::gf::{same_field, Field, FieldElement};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Shared, ordered list of variable names.
pub type Vars = Arc<Vec<String>>;

pub fn vars(names: &[&str]) -> Vars {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

/// Exponent vector under graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.divides(self) {
            Some(Monomial(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// All monomials in `nvars` variables of total degree exactly `d`,
    /// ascending in graded-lex order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = vec![];
        let mut cur = vec![0u32; nvars];
        fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[pos] = e;
                rec(cur, pos + 1, left - e, out);
            }
            cur[pos] = 0;
        }
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(&mut cur, 0, d, &mut out);
        out.sort();
        out
    }

    /// All monomials of total degree at most `d`, ascending in graded-lex.
    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        (0..=d).flat_map(|k| Self::of_degree(nvars, k)).collect()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Debug, Clone)]
pub struct MultiPoly {
    field: Field,
    vars: Vars,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field)
            && *self.vars == *other.vars
            && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(field: &Field, vars: &Vars) -> Self {
        MultiPoly {
            field: field.clone(),
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, vars: &Vars, c: FieldElement) -> Self {
        let mut p = Self::zero(field, vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(field: &Field, vars: &Vars) -> Self {
        Self::constant(field, vars, FieldElement::one(field))
    }

    pub fn from_int(field: &Field, vars: &Vars, n: i64) -> Self {
        Self::constant(field, vars, FieldElement::from_int(field, n))
    }

    pub fn var(field: &Field, vars: &Vars, i: usize) -> Self {
        Self::from_term(field, vars, Monomial::var(vars.len(), i), FieldElement::one(field))
    }

    pub fn from_term(field: &Field, vars: &Vars, mono: Monomial, c: FieldElement) -> Self {
        assert_eq!(mono.0.len(), vars.len(), "monomial arity mismatch");
        let mut p = Self::zero(field, vars);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &Monomial) -> FieldElement {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(&Monomial::one(self.nvars()))
    }

    /// Total degree, None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.total_degree())
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    /// Leading term under graded-lex.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElement)> {
        self.terms.iter().next_back()
    }

    /// Total degree if every term shares it (homogeneous), else an error.
    pub fn homogeneous_degree(&self) -> Result<u32> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = m.total_degree();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return Err(Error::NotHomogeneous),
                _ => {}
            }
        }
        Ok(deg.unwrap_or(0))
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            same_field(&self.field, &other.field),
            "polynomials over different fields"
        );
        assert_eq!(*self.vars, *other.vars, "polynomials in different variables");
    }

    fn insert_add(&mut self, mono: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn neg_ref(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg_ref();
        }
        out
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(&self.field, &self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_add(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field, &self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul_ref(c);
        }
        out
    }

    pub fn mul_term(&self, mono: &Monomial, c: &FieldElement) -> Self {
        let mut out = Self::zero(&self.field, &self.vars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.mul(mono), v.mul_ref(c));
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field, &self.vars);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.nvars(), "evaluation arity mismatch");
        let mut acc = FieldElement::zero(&self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul_ref(&point[i].pow(e as u128));
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Apply `f` to every coefficient (typically a field embedding).
    pub fn map_coeffs(
        &self,
        new_field: &Field,
        f: impl Fn(&FieldElement) -> FieldElement,
    ) -> Self {
        let mut out = Self::zero(new_field, &self.vars);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.field, &self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            let factor = FieldElement::from_int(&self.field, e as i64);
            out.insert_add(m2, c.mul_ref(&factor));
        }
        out
    }

    /// Substitute a polynomial for every variable. Arguments may be in a
    /// different variable set (all must share one).
    pub fn substitute(&self, args: &[MultiPoly]) -> Self {
        assert_eq!(args.len(), self.nvars(), "substitution arity mismatch");
        let target_vars = if args.is_empty() {
            self.vars.clone()
        } else {
            args[0].vars.clone()
        };
        let mut out = Self::zero(&self.field, &target_vars);
        // memoize powers of each argument
        let mut powers: Vec<Vec<MultiPoly>> = args
            .iter()
            .map(|a| vec![Self::one(&self.field, &target_vars), a.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut t = Self::constant(&self.field, &target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_ref(&args[i]);
                    powers[i].push(next);
                }
                t = t.mul_ref(&powers[i][e as usize]);
            }
            out = out.add_ref(&t);
        }
        out
    }

    /// Translate coordinates: x_i -> x_i + center_i (exact).
    pub fn shift(&self, center: &[FieldElement]) -> Self {
        assert_eq!(center.len(), self.nvars(), "shift arity mismatch");
        if center.iter().all(|c| c.is_zero()) {
            return self.clone();
        }
        let args: Vec<MultiPoly> = (0..self.nvars())
            .map(|i| {
                Self::var(&self.field, &self.vars, i).add_ref(&Self::constant(
                    &self.field,
                    &self.vars,
                    center[i].clone(),
                ))
            })
            .collect();
        self.substitute(&args)
    }

    /// Exact division: Some(q) with self = q * g, or None.
    pub fn div_exact(&self, g: &Self) -> Option<Self> {
        self.assert_compatible(g);
        if g.is_zero() {
            return None;
        }
        let (lm_g, lc_g) = g.leading().unwrap();
        let lm_g = lm_g.clone();
        let lc_g_inv = lc_g.inv().expect("leading coefficient is nonzero");
        let mut r = self.clone();
        let mut q = Self::zero(&self.field, &self.vars);
        while let Some((lm_r, lc_r)) = r.leading() {
            let Some(m) = lm_r.div(&lm_g) else {
                return None;
            };
            let c = lc_r.mul_ref(&lc_g_inv);
            q.insert_add(m.clone(), c.clone());
            r = r.sub_ref(&g.mul_term(&m, &c));
        }
        Some(q)
    }

    /// Scale so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => self.scale(&lc.inv().expect("leading coefficient is nonzero")),
        }
    }

    /// Change to an equally-sized variable set (renaming only).
    pub fn rename_vars(&self, new_vars: &Vars) -> Self {
        assert_eq!(new_vars.len(), self.vars.len(), "variable count mismatch");
        MultiPoly {
            field: self.field.clone(),
            vars: new_vars.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Substitute rational functions for all variables.
    pub fn substitute_rational(&self, args: &[RationalFunction]) -> RationalFunction {
        assert_eq!(args.len(), self.nvars(), "substitution arity mismatch");
        let target_vars = if args.is_empty() {
            self.vars.clone()
        } else {
            args[0].num.vars.clone()
        };
        let mut acc = RationalFunction::zero(&self.field, &target_vars);
        for (m, c) in &self.terms {
            let mut t = RationalFunction::constant(&self.field, &target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul_ref(&args[i]);
                }
            }
            acc = acc.add_ref(&t);
        }
        acc
    }
}

macro_rules! forward_poly_binop {
    ($tr:ident, $meth:ident, $impl_meth:ident, $t:ty) => {
        impl std::ops::$tr for &$t {
            type Output = $t;
            fn $meth(self, rhs: &$t) -> $t {
                self.$impl_meth(rhs)
            }
        }
        impl std::ops::$tr for $t {
            type Output = $t;
            fn $meth(self, rhs: $t) -> $t {
                self.$impl_meth(&rhs)
            }
        }
        impl std::ops::$tr<&$t> for $t {
            type Output = $t;
            fn $meth(self, rhs: &$t) -> $t {
                self.$impl_meth(rhs)
            }
        }
    };
}

forward_poly_binop!(Add, add, add_ref, MultiPoly);
forward_poly_binop!(Sub, sub, sub_ref, MultiPoly);
forward_poly_binop!(Mul, mul, mul_ref, MultiPoly);

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

fn coeff_string(c: &FieldElement) -> String {
    let s = c.to_string();
    if s.contains('+') || s.contains('-') {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if mono.is_empty() {
                parts.push(c.to_string());
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("{}*{}", coeff_string(c), mono.join("*")));
            }
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A quotient of polynomials, always reduced: gcd(num, den) = 1 and the
/// denominator is monic under graded-lex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        num.assert_compatible(&den);
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            let one = MultiPoly::one(&den.field, &den.vars);
            return Ok(RationalFunction { num, den: one });
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading().expect("nonzero denominator").1.clone();
        if !lc.is_one() {
            let inv = lc.inv().expect("leading coefficient is nonzero");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    /// Fast constructor for `num / lin^k` with `lin` of total degree 1:
    /// reduction is just repeated exact division by `lin`.
    pub fn with_linear_power_den(num: MultiPoly, lin: &MultiPoly, k: u32) -> Result<Self> {
        assert_eq!(lin.degree(), Some(1), "denominator base must be linear");
        let mut num = num;
        let mut left = k;
        while left > 0 {
            match num.div_exact(lin) {
                Some(q) if !num.is_zero() => {
                    num = q;
                    left -= 1;
                }
                _ => break,
            }
        }
        let lc = lin.leading().unwrap().1.clone();
        let lin_monic = lin.monic();
        let scale = lc.inv().expect("leading coefficient nonzero").pow(left as u128);
        Ok(RationalFunction {
            num: num.scale(&scale),
            den: lin_monic.pow(left),
        })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(&p.field, &p.vars);
        RationalFunction { num: p, den }
    }

    pub fn zero(field: &Field, vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::zero(field, vars))
    }

    pub fn one(field: &Field, vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::one(field, vars))
    }

    pub fn constant(field: &Field, vars: &Vars, c: FieldElement) -> Self {
        Self::from_poly(MultiPoly::constant(field, vars, c))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        &self.num.field
    }

    pub fn vars(&self) -> &Vars {
        &self.num.vars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let num = self.num.mul_ref(&other.den) + other.num.mul_ref(&self.den);
        let den = self.den.mul_ref(&other.den);
        Self::new(num, den).expect("denominator product is nonzero")
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        RationalFunction {
            num: self.num.neg_ref(),
            den: self.den.clone(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        // cross-reduce before multiplying to keep factors small
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = if g1.degree() == Some(0) { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d2 = if g1.degree() == Some(0) { other.den.clone() } else { other.den.div_exact(&g1).unwrap() };
        let n2 = if g2.degree() == Some(0) { other.num.clone() } else { other.num.div_exact(&g2).unwrap() };
        let d1 = if g2.degree() == Some(0) { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        Self::new(n1.mul_ref(&n2), d1.mul_ref(&d2)).expect("denominator product is nonzero")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow_i(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.field(), self.vars());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::NotRegular {
                what: "rational function".to_string(),
                at: format!(
                    "({})",
                    point.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                ),
            });
        }
        Ok(self.num.eval(point).mul_ref(&d.inv()?))
    }

    pub fn is_regular_at(&self, point: &[FieldElement]) -> bool {
        !self.den.eval(point).is_zero()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let n = self.num.derivative(var).mul_ref(&self.den)
            - self.num.mul_ref(&self.den.derivative(var));
        let d = self.den.mul_ref(&self.den);
        Self::new(n, d).expect("denominator square is nonzero")
    }

    /// Apply `f` to every coefficient. Re-reduces: an embedding into a
    /// larger field can create common factors that did not exist before.
    pub fn map_coeffs(
        &self,
        new_field: &Field,
        f: impl Fn(&FieldElement) -> FieldElement,
    ) -> Self {
        Self::new(
            self.num.map_coeffs(new_field, &f),
            self.den.map_coeffs(new_field, &f),
        )
        .expect("embedded denominator stays nonzero")
    }

    /// Translate coordinates in numerator and denominator.
    pub fn shift(&self, center: &[FieldElement]) -> Self {
        RationalFunction {
            num: self.num.shift(center),
            den: self.den.shift(center),
        }
    }

    pub fn rename_vars(&self, new_vars: &Vars) -> Self {
        RationalFunction {
            num: self.num.rename_vars(new_vars),
            den: self.den.rename_vars(new_vars),
        }
    }
}

forward_poly_binop!(Add, add, add_ref, RationalFunction);
forward_poly_binop!(Sub, sub, sub_ref, RationalFunction);
forward_poly_binop!(Mul, mul, mul_ref, RationalFunction);

impl std::ops::Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        self.neg_ref()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            let c = self.den.constant_term();
            if c.is_one() {
                return write!(f, "{}", self.num);
            }
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let den = if self.den.num_terms() > 1 {
            format!("({})", self.den)
        } else {
            self.den.to_string()
        };
        write!(f, "{num}/{den}")
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    fn setup() -> (Field, Vars) {
        (FiniteField::new(2, 2).unwrap(), vars(&["X", "Y", "Z"]))
    }

    #[test]
    fn graded_lex_ordering() {
        // total degree dominates, then lex with the first variable strongest
        let m = |e: &[u32]| Monomial(e.to_vec());
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
        assert!(m(&[1, 1, 0]) > m(&[1, 0, 1]));
        assert!(m(&[0, 0, 3]) > m(&[1, 1, 0]));
        assert!(m(&[0, 1, 0]) > m(&[0, 0, 1]));
    }

    #[test]
    fn display_follows_term_order() {
        let (f, v) = setup();
        let p = parse_poly(&f, &v, "Z^3*Y + X*Y + (a+1)*X^2").unwrap();
        assert_eq!(p.to_string(), "Y*Z^3+(a+1)*X^2+X*Y");
        let q = parse_poly(&f, &v, &p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(Monomial::of_degree(3, 1).len(), 3);
        assert_eq!(Monomial::of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::up_to_degree(2, 3).len(), 10);
        // ascending graded-lex: constant first, Z before Y before X
        let ms = Monomial::up_to_degree(3, 1);
        assert_eq!(
            ms,
            vec![
                Monomial(vec![0, 0, 0]),
                Monomial(vec![0, 0, 1]),
                Monomial(vec![0, 1, 0]),
                Monomial(vec![1, 0, 0]),
            ]
        );
    }

    #[test]
    fn exact_division() {
        let (f, v) = setup();
        let p = parse_poly(&f, &v, "X^2+Y^2").unwrap(); // (X+Y)^2 over GF(4)
        let g = parse_poly(&f, &v, "X+Y").unwrap();
        let q = p.div_exact(&g).unwrap();
        assert_eq!(q, g);
        assert!(p.div_exact(&parse_poly(&f, &v, "X+Z").unwrap()).is_none());
    }

    #[test]
    fn shift_translates_exactly() {
        let f = FiniteField::new(3, 1).unwrap();
        let v = vars(&["s", "t"]);
        let p = parse_poly(&f, &v, "s^2+t").unwrap();
        let c = vec![FieldElement::from_int(&f, 1), FieldElement::from_int(&f, 2)];
        let shifted = p.shift(&c);
        // (s+1)^2 + (t+2) = s^2 + 2s + t + 3 = s^2+2s+t over GF(3)
        assert_eq!(shifted, parse_poly(&f, &v, "s^2+2*s+t").unwrap());
        assert_eq!(
            shifted.eval(&[FieldElement::zero(&f), FieldElement::zero(&f)]),
            p.eval(&c)
        );
    }

    #[test]
    fn rational_reduction_and_equality() {
        let (f, v) = setup();
        let a = parse_rational(&f, &v, "(X^2+Y^2)/(X*Y+Y^2)").unwrap();
        let b = parse_rational(&f, &v, "(X+Y)/Y").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(X+Y)/Y");
        // denominator normalized monic
        let c = parse_rational(&f, &v, "X/((a)*Y)").unwrap();
        assert_eq!(c.den().to_string(), "Y");
    }

    #[test]
    fn linear_power_den_fast_path() {
        let (f, v) = setup();
        let lin = parse_poly(&f, &v, "Y+Z").unwrap();
        let num = parse_poly(&f, &v, "X*Y+X*Z").unwrap(); // X*(Y+Z)
        let r = RationalFunction::with_linear_power_den(num, &lin, 3).unwrap();
        // one factor cancels; (Y+Z)^2 = Y^2+Z^2 in characteristic 2
        assert_eq!(r.to_string(), "X/(Y^2+Z^2)");
        let s = RationalFunction::new(
            parse_poly(&f, &v, "X*Y+X*Z").unwrap(),
            parse_poly(&f, &v, "(Y+Z)^3").unwrap(),
        )
        .unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = FiniteField::prime(3).unwrap();
        let v = vars(&["t"]);
        let r = parse_rational(&f, &v, "(2*t)/(t-1)").unwrap();
        // d/dt 2t/(t-1) = -2/(t-1)^2 = 1/(t-1)^2 over GF(3)
        let d = r.derivative(0);
        let expect = parse_rational(&f, &v, "1/((t-1)^2)").unwrap();
        assert_eq!(d, expect);
    }
}
