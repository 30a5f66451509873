//! Ambient spaces, points, hypersurfaces and divisors.
//!
//! Two ambient varieties are supported: projective space P^r and a product
//! of projective lines (P^1)^r, both over a finite base field. Their
//! homogeneous coordinates are grouped into "blocks": one block of r+1
//! coordinates for P^r, and r blocks of 2 for (P^1)^r. Everything downstream
//! (charts, dehomogenisation, degrees) is phrased blockwise so the two cases
//! share code.
//!
//! Points are stored with a fixed normalisation, the last nonzero coordinate
//! of every block scaled to 1, so equality of points is equality of
//! coordinate vectors. A point carries the extension through which its
//! coordinates were obtained; rational points carry the trivial extension.

mod chart;
mod intersect;

pub use chart::{
    choose_chart, transition_jacobian, transition_map, transport_density, Chart, LocalFrame,
};
pub use intersect::{
    bezout_number, intersection_scheme, local_multiplicity, IntersectOptions, IntersectionPoint,
    IntersectionScheme,
};

use crate::error::{Error, Result};
use crate::gf::{elements, same_field, Extension, Field, FieldElement};
use crate::poly::{vars, MultiPoly, RationalFunction, Vars};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarietyKind {
    Proj,
    ProductP1,
}

/// An ambient variety: P^r or (P^1)^r over a fixed base field.
#[derive(Debug)]
pub struct Variety {
    field: Field,
    kind: VarietyKind,
    dim: usize,
    coords: Vars,
}

pub type VarietyRef = Arc<Variety>;

impl Variety {
    /// P^r with coordinates X,Z (r = 1), X,Y,Z (r = 2) or X0..Xr.
    pub fn proj(field: &Field, r: usize) -> Result<VarietyRef> {
        let names: Vec<String> = match r {
            0 => return Err(Error::ArityMismatch { expected: 1, got: 0 }),
            1 => vec!["X".into(), "Z".into()],
            2 => vec!["X".into(), "Y".into(), "Z".into()],
            _ => (0..=r).map(|i| format!("X{i}")).collect(),
        };
        Ok(Arc::new(Variety {
            field: field.clone(),
            kind: VarietyKind::Proj,
            dim: r,
            coords: vars(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
        }))
    }

    /// (P^1)^r with coordinates X1,Z1,...,Xr,Zr.
    pub fn product_p1(field: &Field, r: usize) -> Result<VarietyRef> {
        if r == 0 {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        let mut names = vec![];
        for i in 1..=r {
            names.push(format!("X{i}"));
            names.push(format!("Z{i}"));
        }
        Ok(Arc::new(Variety {
            field: field.clone(),
            kind: VarietyKind::ProductP1,
            dim: r,
            coords: vars(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
        }))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> VarietyKind {
        self.kind
    }

    /// Dimension r.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of homogeneous coordinates (r+1 or 2r).
    pub fn ncoords(&self) -> usize {
        self.coords.len()
    }

    /// Homogeneous coordinate names.
    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    /// Coordinate blocks: one for P^r, r pairs for (P^1)^r.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self.kind {
            VarietyKind::Proj => vec![0..self.dim + 1],
            VarietyKind::ProductP1 => (0..self.dim).map(|i| 2 * i..2 * i + 2).collect(),
        }
    }

    pub fn num_blocks(&self) -> usize {
        match self.kind {
            VarietyKind::Proj => 1,
            VarietyKind::ProductP1 => self.dim,
        }
    }

    /// Block index of a global coordinate.
    pub fn block_of(&self, coord: usize) -> usize {
        match self.kind {
            VarietyKind::Proj => 0,
            VarietyKind::ProductP1 => coord / 2,
        }
    }

    /// Per-block degree of a polynomial in the homogeneous coordinates.
    /// Errors unless every term has the same degree in every block.
    pub fn multidegree(&self, poly: &MultiPoly) -> Result<Vec<u32>> {
        if poly.is_zero() {
            return Err(Error::NotHomogeneous);
        }
        if poly.nvars() != self.ncoords() {
            return Err(Error::ArityMismatch {
                expected: self.ncoords(),
                got: poly.nvars(),
            });
        }
        let mut out = vec![];
        for range in self.blocks() {
            let mut deg: Option<u32> = None;
            for (m, _) in poly.terms() {
                let d: u32 = m.0[range.clone()].iter().sum();
                match deg {
                    None => deg = Some(d),
                    Some(x) if x == d => {}
                    Some(_) => return Err(Error::NotHomogeneous),
                }
            }
            out.push(deg.unwrap());
        }
        Ok(out)
    }

    /// The i-th homogeneous coordinate as a polynomial.
    pub fn coord_poly(&self, i: usize) -> MultiPoly {
        MultiPoly::var(&self.field, &self.coords, i)
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.field.order();
        match self.kind {
            VarietyKind::Proj => write!(f, "P^{} over GF({})", self.dim, q),
            VarietyKind::ProductP1 => write!(f, "(P^1)^{} over GF({})", self.dim, q),
        }
    }
}

pub fn same_variety(a: &Variety, b: &Variety) -> bool {
    a.kind == b.kind
        && a.dim == b.dim
        && same_field(&a.field, &b.field)
        && *a.coords == *b.coords
}

/// A closed point, possibly over an extension of the base field.
#[derive(Debug, Clone)]
pub struct VarietyPoint {
    variety: VarietyRef,
    ext: Extension,
    coords: Vec<FieldElement>,
}

impl VarietyPoint {
    /// A point with coordinates in the base field.
    pub fn rational(variety: &VarietyRef, coords: Vec<FieldElement>) -> Result<Self> {
        Self::over_extension(variety, Extension::identity(variety.field()), coords)
    }

    /// A point with coordinates in the top field of `ext` (whose base must
    /// be the variety's field). Coordinates are normalised blockwise.
    pub fn over_extension(
        variety: &VarietyRef,
        ext: Extension,
        coords: Vec<FieldElement>,
    ) -> Result<Self> {
        if !same_field(ext.base(), variety.field()) {
            return Err(Error::FieldMismatch);
        }
        if coords.len() != variety.ncoords() {
            return Err(Error::ArityMismatch {
                expected: variety.ncoords(),
                got: coords.len(),
            });
        }
        for c in &coords {
            if !same_field(c.field(), ext.top()) {
                return Err(Error::FieldMismatch);
            }
        }
        let mut coords = coords;
        for range in variety.blocks() {
            let Some(last) = coords[range.clone()].iter().rposition(|c| !c.is_zero()) else {
                return Err(Error::ZeroPoint);
            };
            let inv = coords[range.start + last].inv()?;
            for c in &mut coords[range.clone()] {
                *c = c.mul_ref(&inv);
            }
        }
        Ok(VarietyPoint {
            variety: variety.clone(),
            ext,
            coords,
        })
    }

    pub fn variety(&self) -> &VarietyRef {
        &self.variety
    }

    /// Field of definition (top of the stored extension).
    pub fn field(&self) -> &Field {
        self.ext.top()
    }

    pub fn extension(&self) -> &Extension {
        &self.ext
    }

    pub fn extension_degree(&self) -> usize {
        self.ext.degree()
    }

    pub fn is_rational(&self) -> bool {
        self.ext.is_trivial()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &FieldElement {
        &self.coords[i]
    }

    /// Image under the q-power Frobenius (q = base field order), which
    /// permutes the points of each extension field.
    pub fn frobenius_q(&self) -> Self {
        let q = self.ext.base().order();
        let coords = self.coords.iter().map(|c| c.pow(q)).collect();
        VarietyPoint::over_extension(&self.variety, self.ext.clone(), coords)
            .expect("Frobenius preserves well-formedness")
    }

    /// Size of the Frobenius orbit; divides the extension degree.
    pub fn orbit_size(&self) -> usize {
        let mut p = self.frobenius_q();
        let mut n = 1;
        while p != *self {
            p = p.frobenius_q();
            n += 1;
        }
        n
    }

    /// The full Frobenius orbit starting at this point.
    pub fn orbit(&self) -> Vec<Self> {
        let mut out = vec![self.clone()];
        let mut p = self.frobenius_q();
        while p != *self {
            out.push(p.clone());
            p = p.frobenius_q();
        }
        out
    }
}

impl PartialEq for VarietyPoint {
    fn eq(&self, other: &Self) -> bool {
        same_variety(&self.variety, &other.variety)
            && same_field(self.field(), other.field())
            && self.coords == other.coords
    }
}

impl Eq for VarietyPoint {}

impl fmt::Display for VarietyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let block_str = |range: Range<usize>| {
            self.coords[range]
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(":")
        };
        match self.variety.kind {
            VarietyKind::Proj => write!(f, "[{}]", block_str(0..self.coords.len())),
            VarietyKind::ProductP1 => {
                let parts: Vec<String> = self
                    .variety
                    .blocks()
                    .into_iter()
                    .map(|r| format!("[{}]", block_str(r)))
                    .collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// An effective prime-free hypersurface datum: a nonconstant
/// (multi)homogeneous polynomial up to scalar, stored monic.
#[derive(Debug, Clone)]
pub struct Hypersurface {
    variety: VarietyRef,
    poly: MultiPoly,
    multidegree: Vec<u32>,
}

impl Hypersurface {
    pub fn new(variety: &VarietyRef, poly: &MultiPoly) -> Result<Self> {
        if !same_field(poly.field(), variety.field()) {
            return Err(Error::FieldMismatch);
        }
        if poly.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let multidegree = variety.multidegree(poly)?;
        if multidegree.iter().all(|&d| d == 0) {
            return Err(Error::ConstantPolynomial);
        }
        Ok(Hypersurface {
            variety: variety.clone(),
            poly: poly.monic(),
            multidegree,
        })
    }

    pub fn variety(&self) -> &VarietyRef {
        &self.variety
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn multidegree(&self) -> &[u32] {
        &self.multidegree
    }

    pub fn total_degree(&self) -> u32 {
        self.multidegree.iter().sum()
    }

    pub fn vanishes_at(&self, p: &VarietyPoint) -> bool {
        let f = if p.is_rational() {
            self.poly.clone()
        } else {
            let ext = p.extension();
            self.poly.map_coeffs(ext.top(), |c| ext.embed(c))
        };
        f.eval(p.coords()).is_zero()
    }
}

impl PartialEq for Hypersurface {
    fn eq(&self, other: &Self) -> bool {
        same_variety(&self.variety, &other.variety) && self.poly == other.poly
    }
}

impl Eq for Hypersurface {}

impl fmt::Display for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({})", self.poly)
    }
}

/// A formal integer combination of hypersurfaces, kept in a canonical
/// sorted, merged form so equal divisors compare equal componentwise.
#[derive(Debug, Clone)]
pub struct Divisor {
    variety: VarietyRef,
    components: Vec<(Hypersurface, i64)>,
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        same_variety(&self.variety, &other.variety) && self.components == other.components
    }
}

impl Eq for Divisor {}

impl Divisor {
    pub fn zero(variety: &VarietyRef) -> Self {
        Divisor {
            variety: variety.clone(),
            components: vec![],
        }
    }

    pub fn of(h: Hypersurface, mult: i64) -> Self {
        let variety = h.variety().clone();
        Divisor::from_components(&variety, vec![(h, mult)]).expect("single component")
    }

    /// Merge components with equal defining polynomials, drop zeros, sort.
    pub fn from_components(
        variety: &VarietyRef,
        components: Vec<(Hypersurface, i64)>,
    ) -> Result<Self> {
        for (h, _) in &components {
            if !same_variety(h.variety(), variety) {
                return Err(Error::VarietyMismatch);
            }
        }
        let mut merged: Vec<(Hypersurface, i64)> = vec![];
        for (h, m) in components {
            match merged.iter_mut().find(|(g, _)| *g == h) {
                Some((_, acc)) => *acc += m,
                None => merged.push((h, m)),
            }
        }
        merged.retain(|(_, m)| *m != 0);
        merged.sort_by_cached_key(|(h, _)| (h.multidegree.clone(), h.poly.to_string()));
        Ok(Divisor {
            variety: variety.clone(),
            components: merged,
        })
    }

    pub fn variety(&self) -> &VarietyRef {
        &self.variety
    }

    pub fn components(&self) -> &[(Hypersurface, i64)] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.components.iter().all(|(_, m)| *m > 0)
    }

    pub fn add_ref(&self, other: &Self) -> Result<Self> {
        if !same_variety(&self.variety, &other.variety) {
            return Err(Error::VarietyMismatch);
        }
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        Divisor::from_components(&self.variety, comps)
    }

    pub fn sub_ref(&self, other: &Self) -> Result<Self> {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        Divisor {
            variety: self.variety.clone(),
            components: self
                .components
                .iter()
                .map(|(h, m)| (h.clone(), -m))
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Divisor::zero(&self.variety);
        }
        Divisor {
            variety: self.variety.clone(),
            components: self
                .components
                .iter()
                .map(|(h, m)| (h.clone(), k * m))
                .collect(),
        }
    }

    /// Components with positive multiplicity, as an effective divisor.
    pub fn positive_part(&self) -> Self {
        Divisor {
            variety: self.variety.clone(),
            components: self
                .components
                .iter()
                .filter(|(_, m)| *m > 0)
                .cloned()
                .collect(),
        }
    }

    /// -(negative components), as an effective divisor.
    pub fn negative_part(&self) -> Self {
        Divisor {
            variety: self.variety.clone(),
            components: self
                .components
                .iter()
                .filter(|(_, m)| *m < 0)
                .map(|(h, m)| (h.clone(), -m))
                .collect(),
        }
    }

    /// Product of component polynomials with multiplicities; requires an
    /// effective divisor. The zero divisor yields the constant 1.
    pub fn defining_poly(&self) -> Result<MultiPoly> {
        if !self.is_effective() {
            return Err(Error::NotEffective);
        }
        let mut acc = MultiPoly::one(self.variety.field(), self.variety.coords());
        for (h, m) in &self.components {
            acc = acc.mul_ref(&h.poly.pow(*m as u32));
        }
        Ok(acc)
    }

    /// Per-block degree, weighted by multiplicities.
    pub fn multidegree(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.variety.num_blocks()];
        for (h, m) in &self.components {
            for (b, &d) in h.multidegree.iter().enumerate() {
                out[b] += m * d as i64;
            }
        }
        out
    }

    pub fn support_contains(&self, p: &VarietyPoint) -> bool {
        self.components.iter().any(|(h, _)| h.vanishes_at(p))
    }
}

/// Zero and pole parts of a function on the variety, written as a ratio of
/// homogeneous polynomials of equal (multi)degree. Because the fraction is
/// kept reduced, the parts share no component; each part is a single
/// hypersurface (possibly reducible), which is all the degree bookkeeping
/// downstream needs. Constants have trivial divisor.
pub fn principal_divisor_parts(
    variety: &VarietyRef,
    f: &RationalFunction,
) -> Result<(Divisor, Divisor)> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let dn = variety.multidegree(f.num())?;
    let dd = variety.multidegree(f.den())?;
    if dn != dd {
        return Err(Error::NotHomogeneous);
    }
    let part = |p: &MultiPoly| -> Result<Divisor> {
        if p.degree() == Some(0) {
            Ok(Divisor::zero(variety))
        } else {
            Ok(Divisor::of(Hypersurface::new(variety, p)?, 1))
        }
    };
    Ok((part(f.num())?, part(f.den())?))
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (h, m) in &self.components {
            let sign = if *m < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let abs = m.abs();
            if abs == 1 {
                write!(f, "{sign}{h}")?;
            } else {
                write!(f, "{sign}{abs}*{h}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Points rational over the base field lying in the standard chart (last
/// coordinate of every block nonzero), in lexicographic order with the
/// first affine coordinate most significant.
pub fn affine_rational_points(variety: &VarietyRef) -> Vec<VarietyPoint> {
    let field = variety.field().clone();
    let r = variety.dim();
    let elems: Vec<FieldElement> = elements(&field).collect();
    let q = elems.len();
    let total = q.pow(r as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        // digits big-endian: first affine coordinate varies slowest
        let mut digits = vec![0usize; r];
        let mut t = idx;
        for d in digits.iter_mut().rev() {
            *d = t % q;
            t /= q;
        }
        let mut coords = vec![];
        match variety.kind() {
            VarietyKind::Proj => {
                for &d in &digits {
                    coords.push(elems[d].clone());
                }
                coords.push(FieldElement::one(&field));
            }
            VarietyKind::ProductP1 => {
                for &d in &digits {
                    coords.push(elems[d].clone());
                    coords.push(FieldElement::one(&field));
                }
            }
        }
        out.push(VarietyPoint::rational(variety, coords).expect("nonzero block"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn gf4() -> Field {
        crate::gf::FiniteField::new(2, 2).unwrap()
    }

    fn pt(v: &VarietyRef, coords: &[&str]) -> VarietyPoint {
        let c = coords
            .iter()
            .map(|s| FieldElement::parse(v.field(), s).unwrap())
            .collect();
        VarietyPoint::rational(v, c).unwrap()
    }

    #[test]
    fn point_normalisation_and_equality() {
        let f = gf4();
        let v = Variety::proj(&f, 2).unwrap();
        // [0 : a : a+1] normalises to [0 : a/(a+1) : 1] = [0 : a^2 : 1]
        let p = pt(&v, &["0", "a", "a+1"]);
        assert_eq!(p.coord(2), &FieldElement::one(&f));
        let q = pt(&v, &["0", "a+1", "a^2+a"]); // same point scaled by a (a^2+a = 1)
        assert_eq!(p, q);
        assert_eq!(p.to_string(), "[0:a+1:1]"); // a/(a+1) = a*a = a+1
        let zero = VarietyPoint::rational(
            &v,
            vec![
                FieldElement::zero(&f),
                FieldElement::zero(&f),
                FieldElement::zero(&f),
            ],
        );
        assert_eq!(zero.unwrap_err(), Error::ZeroPoint);
    }

    #[test]
    fn product_points_normalise_blockwise() {
        let f = gf4();
        let v = Variety::product_p1(&f, 2).unwrap();
        let p = pt(&v, &["a", "a", "1", "0"]);
        // first block [a:a] -> [1:1], second [1:0] stays
        assert_eq!(p.to_string(), "([1:1],[1:0])");
    }

    #[test]
    fn multidegree_checks_each_block() {
        let f = gf4();
        let v = Variety::product_p1(&f, 2).unwrap();
        let p = parse_poly(&f, v.coords(), "X1*X2+Z1*Z2").unwrap();
        assert_eq!(v.multidegree(&p).unwrap(), vec![1, 1]);
        let bad = parse_poly(&f, v.coords(), "X1*X2+Z1").unwrap();
        assert_eq!(v.multidegree(&bad).unwrap_err(), Error::NotHomogeneous);
        let proj = Variety::proj(&f, 2).unwrap();
        let h = parse_poly(&f, proj.coords(), "X^2*Y+Z^3").unwrap();
        assert_eq!(proj.multidegree(&h).unwrap(), vec![3]);
    }

    #[test]
    fn hypersurface_is_stored_monic() {
        let f = gf4();
        let v = Variety::proj(&f, 2).unwrap();
        let p = parse_poly(&f, v.coords(), "a*X^2+a*Y*Z").unwrap();
        let h = Hypersurface::new(&v, &p).unwrap();
        assert_eq!(h.poly().to_string(), "X^2+Y*Z");
        let c = parse_poly(&f, v.coords(), "a").unwrap();
        assert_eq!(
            Hypersurface::new(&v, &c).unwrap_err(),
            Error::ConstantPolynomial
        );
    }

    #[test]
    fn divisor_arithmetic_cancels_componentwise() {
        let f = gf4();
        let v = Variety::proj(&f, 2).unwrap();
        let h1 = Hypersurface::new(&v, &parse_poly(&f, v.coords(), "X").unwrap()).unwrap();
        let h2 = Hypersurface::new(&v, &parse_poly(&f, v.coords(), "Y+Z").unwrap()).unwrap();
        let d = Divisor::of(h1.clone(), 2).add_ref(&Divisor::of(h2.clone(), 1)).unwrap();
        let e = d.sub_ref(&Divisor::of(h1.clone(), 2)).unwrap();
        assert_eq!(e, Divisor::of(h2.clone(), 1));
        assert_eq!(d.multidegree(), vec![3]);
        let mixed = d.sub_ref(&Divisor::of(h1, 3)).unwrap();
        assert!(!mixed.is_effective());
        assert_eq!(mixed.positive_part(), Divisor::of(h2, 1));
        assert_eq!(mixed.negative_part().multidegree(), vec![1]);
        assert_eq!(mixed.to_string(), "-V(X)+V(Y+Z)");
    }

    #[test]
    fn frobenius_orbit_of_a_quadratic_point() {
        // GF(4) point of P^1 viewed over GF(2): orbit {[a:1],[a+1:1]}
        let f2 = crate::gf::FiniteField::prime(2).unwrap();
        let v = Variety::proj(&f2, 1).unwrap();
        let ext = Extension::new(&f2, 2).unwrap();
        let a = FieldElement::generator(ext.top());
        let p = VarietyPoint::over_extension(
            &v,
            ext.clone(),
            vec![a.clone(), FieldElement::one(ext.top())],
        )
        .unwrap();
        assert_eq!(p.orbit_size(), 2);
        let rational = VarietyPoint::over_extension(
            &v,
            ext.clone(),
            vec![FieldElement::one(ext.top()), FieldElement::one(ext.top())],
        )
        .unwrap();
        assert_eq!(rational.orbit_size(), 1);
        assert_eq!(p.orbit().len(), 2);
    }

    #[test]
    fn affine_points_enumerate_in_field_order() {
        let f = gf4();
        let p1 = Variety::proj(&f, 1).unwrap();
        let pts = affine_rational_points(&p1);
        let shown: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["[0:1]", "[1:1]", "[a:1]", "[a+1:1]"]);
        let pp = Variety::product_p1(&f, 2).unwrap();
        let pts = affine_rational_points(&pp);
        assert_eq!(pts.len(), 16);
        // first coordinate most significant
        assert_eq!(pts[0].to_string(), "([0:1],[0:1])");
        assert_eq!(pts[1].to_string(), "([0:1],[1:1])");
        assert_eq!(pts[4].to_string(), "([1:1],[0:1])");
    }

    #[test]
    fn zeros_and_poles_of_a_function() {
        let f = gf4();
        let v = Variety::proj(&f, 2).unwrap();
        let func = |s: &str| crate::poly::parse_rational(&f, v.coords(), s).unwrap();
        let (pos, neg) = principal_divisor_parts(&v, &func("X/(Y+Z)")).unwrap();
        assert_eq!(pos.to_string(), "V(X)");
        assert_eq!(neg.to_string(), "V(Y+Z)");
        let (pos, neg) = principal_divisor_parts(&v, &func("a+1")).unwrap();
        assert!(pos.is_zero() && neg.is_zero());
        let (pos, _) = principal_divisor_parts(&v, &func("(Z+(a+1)*Y)/Z")).unwrap();
        assert_eq!(pos.to_string(), "V(Y+a*Z)"); // monic in graded-lex
        // unequal degrees do not define a function on the variety
        assert_eq!(
            principal_divisor_parts(&v, &func("X^2/Z")).unwrap_err(),
            Error::NotHomogeneous
        );
        assert_eq!(
            principal_divisor_parts(&v, &func("0")).unwrap_err(),
            Error::ZeroFunction
        );
    }

    #[test]
    fn parts_of_a_coprime_product_add_componentwise() {
        let f = gf4();
        let v = Variety::proj(&f, 2).unwrap();
        let func = |s: &str| crate::poly::parse_rational(&f, v.coords(), s).unwrap();
        let g = func("X/(Y+Z)");
        let h = func("Y/Z");
        let (gp, gn) = principal_divisor_parts(&v, &g).unwrap();
        let (hp, hn) = principal_divisor_parts(&v, &h).unwrap();
        let (pp, pn) = principal_divisor_parts(&v, &g.mul_ref(&h)).unwrap();
        // product of coprime numerators is one (reducible) hypersurface with
        // the same cycle as the sum of the separate parts
        assert_eq!(
            pp.defining_poly().unwrap(),
            gp.defining_poly()
                .unwrap()
                .mul_ref(&hp.defining_poly().unwrap())
                .monic()
        );
        assert_eq!(
            pn.defining_poly().unwrap(),
            gn.defining_poly()
                .unwrap()
                .mul_ref(&hn.defining_poly().unwrap())
                .monic()
        );
    }
}
