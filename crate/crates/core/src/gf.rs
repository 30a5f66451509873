//! Finite fields GF(p^m) with exact element arithmetic.
//!
//! Elements are coefficient vectors over GF(p) in the power basis of a monic
//! irreducible modulus. When no modulus is supplied the canonical one is the
//! lexicographically smallest monic irreducible of the right degree, where
//! polynomials are ordered by their coefficient index `sum c_i * p^i`. Every
//! derived object (embeddings, default moduli, element enumeration) is
//! deterministic so that repeated runs produce identical output.

use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Shared handle to a field; all elements hold one of these.
pub type Field = Arc<FiniteField>;

#[derive(Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    m: usize,
    /// Monic modulus, ascending coefficients, length m+1.
    modulus: Vec<u64>,
    gen_name: String,
}

// ---- prime-field polynomial helpers (coefficient vectors over GF(p)) ----

fn pp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pp_deg(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

fn pp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
    }
    pp_trim(&mut out);
    out
}

/// Remainder of `a` modulo monic-up-to-scalar `b`.
fn pp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    pp_trim(&mut r);
    let db = pp_deg(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p);
    while let Some(dr) = pp_deg(&r) {
        if dr < db {
            break;
        }
        let f = r[dr] * lead_inv % p;
        let shift = dr - db;
        for j in 0..=db {
            let sub = f * b[j] % p;
            r[j + shift] = (r[j + shift] + p - sub) % p;
        }
        pp_trim(&mut r);
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on integers
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {p}");
    (((t % p as i128) + p as i128) % p as i128) as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_string(v: &[u64], name: &str) -> String {
    let mut parts = vec![];
    for i in (0..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        let part = match (c, i) {
            (_, 0) => format!("{c}"),
            (1, 1) => name.to_string(),
            (1, _) => format!("{name}^{i}"),
            (_, 1) => format!("{c}*{name}"),
            (_, _) => format!("{c}*{name}^{i}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

impl FiniteField {
    /// GF(p^m) with an explicit monic modulus (ascending coefficients,
    /// length m+1). Verifies primality of `p` and irreducibility of the
    /// modulus by trial factorisation, naming a factor on failure.
    pub fn with_modulus(p: u64, m: usize, modulus: Vec<u64>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 || modulus.len() != m + 1 {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("modulus must have degree {m}"),
            });
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus[m] != 1 {
            return Err(Error::Parse {
                pos: 0,
                msg: "modulus must be monic".to_string(),
            });
        }
        if let Some(factor) = irreducibility_witness(&modulus, p) {
            return Err(Error::ReducibleModulus {
                modulus: poly_string(&modulus, "x"),
                factor: poly_string(&factor, "x"),
            });
        }
        Ok(Arc::new(FiniteField {
            p,
            m,
            modulus,
            gen_name: "a".to_string(),
        }))
    }

    /// GF(p^m) with the canonical modulus. Results are memoised: repeated
    /// calls share one allocation and skip the irreducibility search.
    pub fn new(p: u64, m: usize) -> Result<Field> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Field>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&(p, m)) {
            return Ok(f.clone());
        }
        let field = FiniteField::build_canonical(p, m)?;
        cache
            .lock()
            .unwrap()
            .entry((p, m))
            .or_insert_with(|| field.clone());
        Ok(field)
    }

    fn build_canonical(p: u64, m: usize) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 1 {
            // x itself is the smallest monic degree-1 polynomial
            return FiniteField::with_modulus(p, 1, vec![0, 1]);
        }
        // enumerate non-leading coefficient vectors by index order
        let total = (p as u128).pow(m as u32);
        let mut idx: u128 = 0;
        while idx < total {
            let mut modulus = vec![0u64; m + 1];
            let mut t = idx;
            for c in modulus.iter_mut().take(m) {
                *c = (t % p as u128) as u64;
                t /= p as u128;
            }
            modulus[m] = 1;
            if irreducibility_witness(&modulus, p).is_none() {
                return FiniteField::with_modulus(p, m, modulus);
            }
            idx += 1;
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Field> {
        FiniteField::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Field order p^m.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.m as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn gen_name(&self) -> &str {
        &self.gen_name
    }

    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus, "x")
    }
}

/// A monic factor of `f` of degree in 1..=deg(f)/2, if one exists.
fn irreducibility_witness(f: &[u64], p: u64) -> Option<Vec<u64>> {
    let m = pp_deg(f).unwrap_or(0);
    if m == 0 {
        return Some(f.to_vec());
    }
    for d in 1..=m / 2 {
        let total = (p as u128).pow(d as u32);
        for idx in 0..total {
            let mut g = vec![0u64; d + 1];
            let mut t = idx;
            for c in g.iter_mut().take(d) {
                *c = (t % p as u128) as u64;
                t /= p as u128;
            }
            g[d] = 1;
            if pp_rem(f, &g, p).is_empty() {
                return Some(g);
            }
        }
    }
    None
}

pub fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || (a.p == b.p && a.modulus == b.modulus)
}

// ---- elements ----

#[derive(Debug, Clone)]
pub struct FieldElement {
    field: Field,
    /// Ascending power-basis coefficients, length m, entries in [0, p).
    c: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.c == other.c
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl FieldElement {
    pub fn zero(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            c: vec![0; field.m],
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        let p = field.p as i64;
        let mut c = vec![0; field.m];
        c[0] = n.rem_euclid(p) as u64;
        FieldElement {
            field: field.clone(),
            c,
        }
    }

    /// Element from ascending power-basis coefficients (reduced mod p).
    pub fn from_coeffs(field: &Field, coeffs: &[u64]) -> Result<Self> {
        if coeffs.len() > field.m {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("too many coefficients for GF({}^{})", field.p, field.m),
            });
        }
        let mut c = vec![0; field.m];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i] = x % field.p;
        }
        Ok(FieldElement {
            field: field.clone(),
            c,
        })
    }

    /// The power-basis generator (class of x in GF(p)[x]/modulus).
    pub fn generator(field: &Field) -> Self {
        if field.m == 1 {
            // class of x is the constant -c0
            let c0 = field.modulus[0];
            return Self::from_int(field, -(c0 as i64));
        }
        let mut c = vec![0; field.m];
        c[1] = 1;
        FieldElement {
            field: field.clone(),
            c,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Position in the canonical enumeration: sum c_i * p^i.
    pub fn index(&self) -> u128 {
        let mut acc: u128 = 0;
        for &x in self.c.iter().rev() {
            acc = acc * self.field.p as u128 + x as u128;
        }
        acc
    }

    pub fn from_index(field: &Field, mut idx: u128) -> Self {
        let mut c = vec![0; field.m];
        for ci in c.iter_mut() {
            *ci = (idx % field.p as u128) as u64;
            idx /= field.p as u128;
        }
        FieldElement {
            field: field.clone(),
            c,
        }
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            same_field(&self.field, &other.field),
            "field mismatch: GF({}^{}) vs GF({}^{})",
            self.field.p,
            self.field.m,
            other.field.p,
            other.field.m
        );
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.assert_same(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&x, &y)| (x + y) % p)
            .collect();
        FieldElement {
            field: self.field.clone(),
            c,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.assert_same(other);
        let p = self.field.p;
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&x, &y)| (x + p - y) % p)
            .collect();
        FieldElement {
            field: self.field.clone(),
            c,
        }
    }

    pub fn neg_ref(&self) -> Self {
        let p = self.field.p;
        let c = self.c.iter().map(|&x| (p - x) % p).collect();
        FieldElement {
            field: self.field.clone(),
            c,
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.assert_same(other);
        let p = self.field.p;
        let prod = pp_mul(&self.c, &other.c, p);
        let mut r = pp_rem(&prod, &self.field.modulus, p);
        r.resize(self.field.m, 0);
        FieldElement {
            field: self.field.clone(),
            c: r,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.field.p;
        // extended Euclid in GF(p)[x]
        let mut r0: Vec<u64> = self.field.modulus.clone();
        let mut r1: Vec<u64> = self.c.clone();
        pp_trim(&mut r0);
        pp_trim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // divide r0 by r1
            let d1 = pp_deg(&r1).unwrap();
            let lead_inv = inv_mod(r1[d1], p);
            let mut q = vec![0u64; r0.len().saturating_sub(d1)];
            let mut rem = r0.clone();
            while let Some(dr) = pp_deg(&rem) {
                if dr < d1 {
                    break;
                }
                let f = rem[dr] * lead_inv % p;
                q[dr - d1] = f;
                for j in 0..=d1 {
                    let sub = f * r1[j] % p;
                    rem[j + dr - d1] = (rem[j + dr - d1] + p - sub) % p;
                }
                pp_trim(&mut rem);
            }
            pp_trim(&mut q);
            let qs1 = pp_mul(&q, &s1, p);
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs1.len()), 0);
            for (i, &x) in qs1.iter().enumerate() {
                s2[i] = (s2[i] + p - x) % p;
            }
            pp_trim(&mut s2);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is the gcd, a nonzero constant
        let d = pp_deg(&r0).expect("gcd of nonzero elements");
        debug_assert_eq!(d, 0, "modulus is irreducible so gcd must be constant");
        let scale = inv_mod(r0[0], p);
        let mut c: Vec<u64> = s0.iter().map(|&x| x * scale % p).collect();
        c.resize(self.field.m, 0);
        Ok(FieldElement {
            field: self.field.clone(),
            c,
        })
    }

    pub fn pow(&self, mut n: u128) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            n >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u128))
        } else {
            Ok(self.inv()?.pow((-n) as u128))
        }
    }

    /// k-fold Frobenius x -> x^(p^k).
    pub fn frobenius(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.pow(self.field.p as u128);
        }
        out
    }

    /// Parse an element expression in the generator symbol,
    /// e.g. "a+1", "2*a", "(a+1)^2", "0".
    pub fn parse(field: &Field, input: &str) -> Result<Self> {
        let mut p = ElemParser {
            field,
            input: input.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.input.len() {
            return Err(Error::Parse {
                pos: p.pos,
                msg: "unexpected trailing input".to_string(),
            });
        }
        Ok(v)
    }
}

/// All field elements in canonical (index) order.
pub fn elements(field: &Field) -> impl Iterator<Item = FieldElement> {
    let f = field.clone();
    (0..field.order()).map(move |i| FieldElement::from_index(&f, i))
}

macro_rules! forward_binop {
    ($tr:ident, $meth:ident, $impl_meth:ident) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            fn $meth(self, rhs: &FieldElement) -> FieldElement {
                self.$impl_meth(rhs)
            }
        }
        impl std::ops::$tr for FieldElement {
            type Output = FieldElement;
            fn $meth(self, rhs: FieldElement) -> FieldElement {
                self.$impl_meth(&rhs)
            }
        }
        impl std::ops::$tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $meth(self, rhs: &FieldElement) -> FieldElement {
                self.$impl_meth(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_string(&self.c, &self.field.gen_name))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.m)
        }
    }
}

// ---- element expression parser ----

struct ElemParser<'a> {
    field: &'a Field,
    input: &'a [u8],
    pos: usize,
}

impl<'a> ElemParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                acc = acc * self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(Error::Parse {
                    pos: start,
                    msg: "expected integer exponent".to_string(),
                });
            }
            let e: u128 = std::str::from_utf8(&self.input[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    pos: start,
                    msg: "exponent too large".to_string(),
                })?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let v = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(Error::Parse {
                        pos: self.pos,
                        msg: "expected ')'".to_string(),
                    });
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: u128 = std::str::from_utf8(&self.input[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse {
                        pos: start,
                        msg: "integer too large".to_string(),
                    })?;
                Ok(FieldElement::from_int(
                    self.field,
                    (n % self.field.p as u128) as i64,
                ))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.input.len()
                    && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                if name == self.field.gen_name {
                    Ok(FieldElement::generator(self.field))
                } else {
                    Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown symbol '{name}'"),
                    })
                }
            }
            _ => Err(Error::Parse {
                pos: self.pos,
                msg: "expected element".to_string(),
            }),
        }
    }
}

// ---- extensions ----

/// A registered degree-e extension GF(q) -> GF(q^e), both presented over the
/// same prime field. Carries the image of the subfield's power-basis
/// generator, which pins the embedding.
#[derive(Debug, Clone)]
pub struct Extension {
    base: Field,
    top: Field,
    degree: usize,
    gen_image: FieldElement,
}

/// Largest extension order searched for embedding roots.
const MAX_SEARCH_ORDER: u128 = 1 << 20;

impl Extension {
    /// The trivial extension (e = 1).
    pub fn identity(field: &Field) -> Self {
        Extension {
            base: field.clone(),
            top: field.clone(),
            degree: 1,
            gen_image: FieldElement::generator(field),
        }
    }

    /// Construct GF(q^e) over GF(q) = `base`. The top field is GF(p^(m*e))
    /// with the canonical modulus; the embedding sends the base generator to
    /// the smallest root (in enumeration order) of the base modulus.
    /// Memoised per (base modulus, e): the root search runs once.
    pub fn new(base: &Field, e: usize) -> Result<Self> {
        if e == 0 {
            return Err(Error::Parse {
                pos: 0,
                msg: "extension degree must be positive".to_string(),
            });
        }
        if e == 1 {
            return Ok(Self::identity(base));
        }
        type ExtKey = (u64, Vec<u64>, usize);
        static CACHE: OnceLock<Mutex<HashMap<ExtKey, Extension>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (base.p, base.modulus.clone(), e);
        if let Some(ext) = cache.lock().unwrap().get(&key) {
            return Ok(ext.clone());
        }
        let ext = Self::build(base, e)?;
        cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| ext.clone());
        Ok(ext)
    }

    fn build(base: &Field, e: usize) -> Result<Self> {
        let p = base.p;
        let big_m = base.m * e;
        let order = (p as u128).pow(big_m as u32);
        if order > MAX_SEARCH_ORDER {
            return Err(Error::ExtensionTooLarge {
                p,
                degree: big_m,
            });
        }
        let top = FiniteField::new(p, big_m)?;
        let gen_image = if base.m == 1 {
            // prime base field embeds as constants
            let c0 = base.modulus[0];
            FieldElement::from_int(&top, -(c0 as i64))
        } else {
            find_root(&base.modulus, &top).ok_or_else(|| {
                Error::Internal(format!(
                    "no root of {} in GF({}^{})",
                    base.modulus_string(),
                    p,
                    big_m
                ))
            })?
        };
        Ok(Extension {
            base: base.clone(),
            top: top.clone(),
            degree: e,
            gen_image,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn top(&self) -> &Field {
        &self.top
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_trivial(&self) -> bool {
        self.degree == 1
    }

    pub fn embed(&self, x: &FieldElement) -> FieldElement {
        assert!(same_field(x.field(), &self.base), "element not in base field");
        if self.degree == 1 {
            return x.clone();
        }
        let mut acc = FieldElement::zero(&self.top);
        let mut pw = FieldElement::one(&self.top);
        for &ci in x.coeffs() {
            if ci != 0 {
                let c = FieldElement::from_int(&self.top, ci as i64);
                acc = acc + c * pw.clone();
            }
            pw = pw.mul_ref(&self.gen_image);
        }
        acc
    }

    /// Inverse of `embed` where defined.
    pub fn restrict(&self, y: &FieldElement) -> Result<FieldElement> {
        assert!(same_field(y.field(), &self.top), "element not in top field");
        if self.degree == 1 {
            return Ok(y.clone());
        }
        // solve sum_j c_j * gen_image^j = y over GF(p)
        let p = self.base.p;
        let rows = self.top.m;
        let cols = self.base.m;
        let mut mat = vec![vec![0u64; cols + 1]; rows];
        let mut pw = FieldElement::one(&self.top);
        for j in 0..cols {
            for i in 0..rows {
                mat[i][j] = pw.coeffs()[i];
            }
            pw = pw.mul_ref(&self.gen_image);
        }
        for i in 0..rows {
            mat[i][cols] = y.coeffs()[i];
        }
        // Gaussian elimination mod p
        let mut pivot_row = 0;
        let mut pivots = vec![usize::MAX; cols];
        for col in 0..cols {
            let Some(r) = (pivot_row..rows).find(|&r| mat[r][col] != 0) else {
                continue;
            };
            mat.swap(pivot_row, r);
            let inv = inv_mod(mat[pivot_row][col], p);
            for x in mat[pivot_row].iter_mut() {
                *x = *x * inv % p;
            }
            for r2 in 0..rows {
                if r2 != pivot_row && mat[r2][col] != 0 {
                    let f = mat[r2][col];
                    for j in 0..=cols {
                        let sub = f * mat[pivot_row][j] % p;
                        mat[r2][j] = (mat[r2][j] + p - sub) % p;
                    }
                }
            }
            pivots[col] = pivot_row;
            pivot_row += 1;
        }
        // inconsistent rows mean y is outside the subfield
        for row in mat.iter().skip(pivot_row) {
            if row[cols] != 0 {
                return Err(Error::NotInSubfield);
            }
        }
        let mut c = vec![0u64; cols];
        for col in 0..cols {
            if pivots[col] != usize::MAX {
                c[col] = mat[pivots[col]][cols];
            }
        }
        FieldElement::from_coeffs(&self.base, &c)
    }

    /// Frobenius over the base field: y -> y^q with q = |base|.
    pub fn frobenius_q(&self, y: &FieldElement) -> FieldElement {
        y.pow(self.base.order())
    }

    /// Trace to the base field: sum of y^(q^i) for i in 0..e, restricted.
    pub fn trace(&self, y: &FieldElement) -> Result<FieldElement> {
        assert!(same_field(y.field(), &self.top), "element not in top field");
        if self.degree == 1 {
            return Ok(y.clone());
        }
        let mut acc = y.clone();
        let mut cur = y.clone();
        for _ in 1..self.degree {
            cur = self.frobenius_q(&cur);
            acc = acc + cur.clone();
        }
        self.restrict(&acc)
            .map_err(|_| Error::Internal("trace landed outside the base field".to_string()))
    }
}

fn find_root(modulus: &[u64], top: &Field) -> Option<FieldElement> {
    let coeffs: Vec<FieldElement> = modulus
        .iter()
        .map(|&c| FieldElement::from_int(top, c as i64))
        .collect();
    elements(top).find(|x| {
        let mut acc = FieldElement::zero(top);
        for c in coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf4() -> Field {
        FiniteField::new(2, 2).unwrap()
    }

    fn gf9() -> Field {
        FiniteField::new(3, 2).unwrap()
    }

    #[test]
    fn canonical_moduli() {
        // smallest monic irreducible quadratics
        assert_eq!(gf4().modulus(), &[1, 1, 1]); // x^2+x+1
        assert_eq!(gf9().modulus(), &[1, 0, 1]); // x^2+1
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FiniteField::prime(6).unwrap_err(), Error::NotPrime(6));
        let err = FiniteField::with_modulus(2, 2, vec![0, 0, 1]).unwrap_err();
        match err {
            Error::ReducibleModulus { factor, .. } => assert_eq!(factor, "x"),
            e => panic!("unexpected error {e:?}"),
        }
        // x^2+1 = (x+1)^2 over GF(2)
        let err = FiniteField::with_modulus(2, 2, vec![1, 0, 1]).unwrap_err();
        match err {
            Error::ReducibleModulus { factor, .. } => assert_eq!(factor, "x+1"),
            e => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn gf4_arithmetic_table() {
        let f = gf4();
        let a = FieldElement::generator(&f);
        let one = FieldElement::one(&f);
        // a^2 = a+1, a*(a+1) = 1, (a+1)^2 = a
        assert_eq!(a.pow(2), a.clone() + one.clone());
        assert_eq!(a.clone() * (a.clone() + one.clone()), one.clone());
        assert_eq!((a.clone() + one.clone()).pow(2), a.clone());
        assert_eq!(a.inv().unwrap(), a.clone() + one);
    }

    #[test]
    fn traces_to_prime_fields() {
        // trace of a from GF(4) to GF(2) is a + a^2 = 1
        let e4 = Extension::new(&FiniteField::prime(2).unwrap(), 2).unwrap();
        let a = FieldElement::generator(e4.top());
        assert_eq!(e4.trace(&a).unwrap(), FieldElement::one(e4.base()));
        // trace of a from GF(9) to GF(3) is a + a^3 = a - a = 0
        let e9 = Extension::new(&FiniteField::prime(3).unwrap(), 2).unwrap();
        let a = FieldElement::generator(e9.top());
        assert!(e9.trace(&a).unwrap().is_zero());
    }

    #[test]
    fn embedding_gf4_into_gf16() {
        let ext = Extension::new(&gf4(), 2).unwrap();
        assert_eq!(ext.top().order(), 16);
        let img = ext.embed(&FieldElement::generator(&gf4()));
        // the image of a generates the order-3 subgroup
        assert!(!img.is_one());
        assert!(img.pow(3).is_one());
        // embedding is a ring homomorphism on a sample
        let x = FieldElement::parse(&gf4(), "a+1").unwrap();
        let y = FieldElement::generator(&gf4());
        assert_eq!(
            ext.embed(&(x.clone() * y.clone())),
            ext.embed(&x) * ext.embed(&y)
        );
        assert_eq!(ext.restrict(&img).unwrap(), FieldElement::generator(&gf4()));
    }

    #[test]
    fn parse_and_print_elements() {
        let f9 = gf9();
        let x = FieldElement::parse(&f9, "2*a+1").unwrap();
        assert_eq!(x.to_string(), "2*a+1");
        assert_eq!(FieldElement::parse(&f9, "a^2").unwrap().to_string(), "2");
        assert_eq!(FieldElement::parse(&f9, "-a").unwrap().to_string(), "2*a");
        assert_eq!(FieldElement::parse(&f9, "(a+1)*(a-1)").unwrap().to_string(), "1");
        let err = FieldElement::parse(&f9, "a+b").unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert_eq!(pos, 2),
            e => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn element_enumeration_order() {
        let f = gf4();
        let names: Vec<String> = elements(&f).map(|x| x.to_string()).collect();
        assert_eq!(names, vec!["0", "1", "a", "a+1"]);
    }

    proptest! {
        #[test]
        fn field_axioms_gf9(i in 0u128..9, j in 0u128..9, k in 0u128..9) {
            let f = gf9();
            let (x, y, z) = (
                FieldElement::from_index(&f, i),
                FieldElement::from_index(&f, j),
                FieldElement::from_index(&f, k),
            );
            prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
            prop_assert_eq!(
                (x.clone() + y.clone()) * z.clone(),
                x.clone() * z.clone() + y.clone() * z.clone()
            );
            prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
        }

        #[test]
        fn frobenius_is_additive(i in 0u128..16, j in 0u128..16) {
            let f = gf4();
            let x = FieldElement::from_index(&f, i % 4);
            let y = FieldElement::from_index(&f, j % 4);
            prop_assert_eq!(
                (x.clone() + y.clone()).frobenius(1),
                x.frobenius(1) + y.frobenius(1)
            );
        }

        #[test]
        fn units_have_order_dividing_q_minus_1(i in 1u128..9) {
            let f = gf9();
            let x = FieldElement::from_index(&f, i);
            prop_assert!(x.pow(8).is_one());
            prop_assert!((x.inv().unwrap() * x).is_one());
        }

        #[test]
        fn embed_then_trace_multiplies_by_degree(i in 0u128..9, e in 1usize..4) {
            let f = gf9();
            let ext = Extension::new(&f, e).unwrap();
            let x = FieldElement::from_index(&f, i);
            let expect = FieldElement::from_int(&f, e as i64) * x.clone();
            prop_assert_eq!(ext.trace(&ext.embed(&x)).unwrap(), expect);
        }
    }
}
