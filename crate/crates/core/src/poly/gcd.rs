//! Multivariate gcd by primitive pseudo-remainder sequences.
//!
//! The polynomial is viewed as univariate in its highest occurring variable
//! with coefficients in the remaining ones; content and primitive part are
//! computed recursively. Small inputs only, no modular or sparse tricks.

use super::{Monomial, MultiPoly};

/// Monic gcd. gcd(0, g) = monic(g) and gcd(0, 0) = 0.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let main = match main_var(f, g) {
        Some(v) => v,
        None => return MultiPoly::one(f.field(), f.vars()), // both constants
    };
    let (cf, pf) = content_and_primitive(f, main);
    let (cg, pg) = content_and_primitive(g, main);
    let c = gcd(&cf, &cg);

    let mut a = pf;
    let mut b = pg;
    while !b.is_zero() {
        let r = prem(&a, &b, main);
        a = b;
        b = if r.is_zero() {
            r
        } else {
            content_and_primitive(&r, main).1
        };
    }
    c.mul_ref(&a).monic()
}

fn main_var(f: &MultiPoly, g: &MultiPoly) -> Option<usize> {
    (0..f.nvars())
        .rev()
        .find(|&v| f.degree_in(v).unwrap_or(0) > 0 || g.degree_in(v).unwrap_or(0) > 0)
}

/// Coefficient of var^k, with var removed from the exponent.
fn coeff_of_power(f: &MultiPoly, var: usize, k: u32) -> MultiPoly {
    let mut out = MultiPoly::zero(f.field(), f.vars());
    for (m, c) in f.terms() {
        if m.0[var] == k {
            let mut e = m.clone();
            e.0[var] = 0;
            out.insert_add(e, c.clone());
        }
    }
    out
}

fn content_and_primitive(f: &MultiPoly, var: usize) -> (MultiPoly, MultiPoly) {
    let d = f.degree_in(var).unwrap_or(0);
    let mut content = MultiPoly::zero(f.field(), f.vars());
    for k in 0..=d {
        let c = coeff_of_power(f, var, k);
        if !c.is_zero() {
            content = gcd(&content, &c);
        }
        if content.degree() == Some(0) {
            break;
        }
    }
    let primitive = f.div_exact(&content).expect("content divides");
    (content, primitive)
}

/// Pseudo-remainder of f by g with respect to `var`.
fn prem(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    let dg = g.degree_in(var).expect("pseudo-division by zero");
    let lc_g = coeff_of_power(g, var, dg);
    let mut r = f.clone();
    while let Some(dr) = r.degree_in(var) {
        if dr < dg {
            break;
        }
        let lc_r = coeff_of_power(&r, var, dr);
        let shift = Monomial::var(f.nvars(), var).pow_mono(dr - dg);
        r = r.mul_ref(&lc_g).sub_ref(&g.mul_ref(&lc_r).mul_mono(&shift));
    }
    r
}

impl Monomial {
    fn pow_mono(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }
}

impl MultiPoly {
    fn mul_mono(&self, m: &Monomial) -> MultiPoly {
        self.mul_term(m, &crate::gf::FieldElement::one(self.field()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_poly, vars};
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn shared_factor_is_extracted() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = vars(&["X", "Y", "Z"]);
        let a = parse_poly(&f, &v, "(X+Y)^2*Z").unwrap();
        let b = parse_poly(&f, &v, "(X+Y)*X^2").unwrap();
        assert_eq!(gcd(&a, &b), parse_poly(&f, &v, "X+Y").unwrap());
        // coprime pair
        let c = parse_poly(&f, &v, "X+Z").unwrap();
        assert_eq!(gcd(&b, &c).to_string(), "1");
    }

    #[test]
    fn gcd_divides_both() {
        let f = FiniteField::prime(3).unwrap();
        let v = vars(&["s", "t"]);
        let cases = [
            ("s^2*t+2*t", "s^2+2"),
            ("(s+t)*(s+1)", "(s+t)*(t+2)"),
            ("s^3+t^3", "s+t"),
            ("s^2+1", "t^2+1"),
        ];
        for (pa, pb) in cases {
            let a = parse_poly(&f, &v, pa).unwrap();
            let b = parse_poly(&f, &v, pb).unwrap();
            let g = gcd(&a, &b);
            assert!(a.div_exact(&g).is_some(), "gcd must divide {pa}");
            assert!(b.div_exact(&g).is_some(), "gcd must divide {pb}");
        }
    }

    #[test]
    fn zero_cases() {
        let f = FiniteField::prime(3).unwrap();
        let v = vars(&["s", "t"]);
        let z = MultiPoly::zero(&f, &v);
        let a = parse_poly(&f, &v, "2*s+1").unwrap();
        assert_eq!(gcd(&z, &a), parse_poly(&f, &v, "s+2").unwrap()); // monic of 2s+1
        assert!(gcd(&z, &z).is_zero());
    }
}
