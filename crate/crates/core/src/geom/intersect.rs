//! Zero-dimensional intersections of divisor families, with certification.
//!
//! For r effective divisors on an r-dimensional ambient variety the sum of
//! local multiplicities over all geometric intersection points equals the
//! Bezout number (degree product on P^r, permanent of the multidegree
//! matrix on a product of lines). The search enumerates points over
//! GF(q^e) for e = 1, 2, ... and stops as soon as the accumulated
//! multiplicity reaches that bound, which certifies that no further points
//! exist. Exceeding the bound, or a shared component, is reported as an
//! error instead of a wrong answer.
//!
//! Multiplicities come from the local algebra at a point: the dimension of
//! k[[x]]/(f_1..f_r) is computed through truncations at increasing order
//! until two consecutive values agree. Once that happens the value is exact
//! (a stable truncation forces the maximal-ideal power into the ideal), so
//! stabilisation is a proof, not a heuristic.

use super::chart::{choose_chart, LocalFrame};
use super::{same_variety, Divisor, VarietyKind, VarietyPoint, VarietyRef};
use crate::error::{Error, Result};
use crate::gf::{elements, Extension, Field, FieldElement};
use crate::linalg::Mat;
use crate::poly::{gcd, vars, Monomial, MultiPoly};

#[derive(Debug, Clone, Copy)]
pub struct IntersectOptions {
    /// Largest extension degree searched for intersection points.
    pub e_max: usize,
    /// Largest truncation order tried when stabilising a multiplicity.
    pub n_max: usize,
}

impl Default for IntersectOptions {
    fn default() -> Self {
        IntersectOptions { e_max: 4, n_max: 20 }
    }
}

/// One intersection point with its local data. Conjugate points appear
/// individually and share an orbit id.
#[derive(Debug, Clone)]
pub struct IntersectionPoint {
    pub point: VarietyPoint,
    pub multiplicity: u32,
    pub transversal: bool,
    pub orbit: usize,
}

#[derive(Debug, Clone)]
pub struct IntersectionScheme {
    pub points: Vec<IntersectionPoint>,
    pub bezout: u64,
    /// Sum of multiplicities over the points found.
    pub total: u64,
    /// True when `total == bezout`, i.e. every point is accounted for.
    pub certified: bool,
    /// Largest extension degree that was searched.
    pub e_searched: usize,
}

impl IntersectionScheme {
    /// Point indices grouped by Frobenius orbit.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![];
        for (i, p) in self.points.iter().enumerate() {
            if p.orbit == out.len() {
                out.push(vec![]);
            }
            out[p.orbit].push(i);
        }
        out
    }

    pub fn find(&self, p: &VarietyPoint) -> Option<&IntersectionPoint> {
        self.points.iter().find(|ip| ip.point == *p)
    }

    pub fn rational_points(&self) -> Vec<&IntersectionPoint> {
        self.points
            .iter()
            .filter(|ip| ip.point.is_rational())
            .collect()
    }

    pub fn is_all_rational(&self) -> bool {
        self.points.iter().all(|ip| ip.point.is_rational())
    }
}

fn validated_defining_polys(divisors: &[Divisor]) -> Result<(VarietyRef, Vec<MultiPoly>)> {
    let first = divisors.first().ok_or(Error::WrongDivisorCount {
        expected: 1,
        got: 0,
    })?;
    let variety = first.variety().clone();
    let r = variety.dim();
    if divisors.len() != r {
        return Err(Error::WrongDivisorCount {
            expected: r,
            got: divisors.len(),
        });
    }
    let mut polys = vec![];
    for d in divisors {
        if !same_variety(d.variety(), &variety) {
            return Err(Error::VarietyMismatch);
        }
        if !d.is_effective() {
            return Err(Error::NotEffective);
        }
        if d.is_zero() {
            return Err(Error::ImproperIntersection);
        }
        polys.push(d.defining_poly()?);
    }
    Ok((variety, polys))
}

/// Expected total intersection count: the product of degrees on P^r, the
/// permanent of the (divisor x block) multidegree matrix on a product of
/// lines.
pub fn bezout_number(divisors: &[Divisor]) -> Result<u64> {
    let (variety, _) = validated_defining_polys(divisors)?;
    match variety.kind() {
        VarietyKind::Proj => {
            let mut acc: u64 = 1;
            for d in divisors {
                acc *= d.multidegree()[0] as u64;
            }
            Ok(acc)
        }
        VarietyKind::ProductP1 => {
            let m: Vec<Vec<u64>> = divisors
                .iter()
                .map(|d| d.multidegree().iter().map(|&x| x as u64).collect())
                .collect();
            Ok(permanent(&m))
        }
    }
}

fn permanent(m: &[Vec<u64>]) -> u64 {
    fn rec(m: &[Vec<u64>], row: usize, used: u64) -> u64 {
        if row == m.len() {
            return 1;
        }
        let mut acc = 0;
        for c in 0..m.len() {
            if used & (1 << c) == 0 && m[row][c] != 0 {
                acc += m[row][c] * rec(m, row + 1, used | (1 << c));
            }
        }
        acc
    }
    rec(m, 0, 0)
}

/// Dimension of the local algebra at the frame's point, by truncation at
/// increasing order until two consecutive dimensions agree.
pub fn local_multiplicity(frame: &LocalFrame, n_max: usize) -> Result<u32> {
    let r = frame.dim();
    if frame.equations().len() != r {
        return Err(Error::WrongDivisorCount {
            expected: r,
            got: frame.equations().len(),
        });
    }
    if frame.equations().iter().any(|f| f.is_zero()) {
        return Err(Error::ImproperIntersection);
    }
    let field = frame.point().field();
    // order 1 leaves only the constants; every equation vanishes at 0
    let mut prev: usize = 1;
    for n in 2..=n_max {
        let basis = Monomial::up_to_degree(r, (n - 1) as u32);
        let index: std::collections::BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = vec![];
        for f in frame.equations() {
            for beta in Monomial::up_to_degree(r, (n - 2) as u32) {
                let shifted = f.mul_term(&beta, &FieldElement::one(field));
                let mut row = vec![FieldElement::zero(field); basis.len()];
                let mut nonzero = false;
                for (m, c) in shifted.terms() {
                    if let Some(&i) = index.get(m) {
                        row[i] = c.clone();
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
        let rank = if rows.is_empty() {
            0
        } else {
            Mat::from_rows(field, rows)?.rank()
        };
        let dim = basis.len() - rank;
        if dim == prev {
            return Ok(dim as u32);
        }
        prev = dim;
    }
    Err(Error::MultiplicityUnstable { n_max })
}

/// All common zeros of the given divisors, with multiplicities, searched
/// over extensions of degree up to `opts.e_max` and certified against the
/// Bezout number when the counts match.
pub fn intersection_scheme(
    divisors: &[Divisor],
    opts: &IntersectOptions,
) -> Result<IntersectionScheme> {
    let (variety, polys) = validated_defining_polys(divisors)?;
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if gcd(&polys[i], &polys[j]).degree() != Some(0) {
                return Err(Error::ImproperIntersection);
            }
        }
    }
    let bezout = bezout_number(divisors)?;
    let field = variety.field().clone();
    let mut points: Vec<IntersectionPoint> = vec![];
    let mut total: u64 = 0;
    let mut certified = false;
    let mut e_searched = 0;
    let mut orbit_counter = 0;
    for e in 1..=opts.e_max {
        e_searched = e;
        let ext = Extension::new(&field, e)?;
        let polys_e: Vec<MultiPoly> = polys
            .iter()
            .map(|f| f.map_coeffs(ext.top(), |c| ext.embed(c)))
            .collect();
        let candidates = candidate_points(&variety, &polys_e, &ext)?;
        let mut seen: Vec<VarietyPoint> = vec![];
        for coords in candidates {
            let p = VarietyPoint::over_extension(&variety, ext.clone(), coords)?;
            if seen.contains(&p) {
                continue;
            }
            let orbit = p.orbit();
            if orbit.len() != e {
                // already found over a smaller field, or not exact degree e
                continue;
            }
            let chart = choose_chart(&variety, std::slice::from_ref(&p))?;
            let frame = LocalFrame::new(&chart, &p, &polys)?;
            let multiplicity = local_multiplicity(&frame, opts.n_max)?;
            let transversal = frame.is_transversal();
            for member in orbit {
                seen.push(member.clone());
                total += multiplicity as u64;
                points.push(IntersectionPoint {
                    point: member,
                    multiplicity,
                    transversal,
                    orbit: orbit_counter,
                });
            }
            orbit_counter += 1;
            if total > bezout {
                return Err(Error::BezoutExceeded {
                    found: total,
                    bezout,
                });
            }
        }
        if total == bezout {
            certified = true;
            break;
        }
    }
    Ok(IntersectionScheme {
        points,
        bezout,
        total,
        certified,
        e_searched,
    })
}

/// Common zeros of `polys` (over the top field of `ext`) as normalised
/// coordinate tuples, in a deterministic order.
fn candidate_points(
    variety: &VarietyRef,
    polys: &[MultiPoly],
    ext: &Extension,
) -> Result<Vec<Vec<FieldElement>>> {
    if variety.kind() == VarietyKind::Proj && variety.dim() == 2 {
        return proj2_candidates(&polys[0], &polys[1], ext.top());
    }
    generic_scan(variety, polys, ext.top())
}

// ---- dense univariate helpers (ascending coefficients) ----

fn uv_trim(v: &mut Vec<FieldElement>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn uv_rem(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = a.to_vec();
    uv_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db {
        let f = r.last().unwrap().mul_ref(&lead_inv);
        let shift = r.len() - 1 - db;
        for j in 0..=db {
            let v = r[j + shift].sub_ref(&f.mul_ref(&b[j]));
            r[j + shift] = v;
        }
        uv_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn uv_gcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    uv_trim(&mut x);
    uv_trim(&mut y);
    while !y.is_empty() {
        let r = uv_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn uv_eval(v: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(x.field());
    for c in v.iter().rev() {
        acc = acc.mul_ref(x).add_ref(c);
    }
    acc
}

/// Restriction of a polynomial in (X, Y, Z) to a pencil member, as a dense
/// univariate polynomial in the remaining variable.
fn restrict_to_line(
    f: &MultiPoly,
    args: &[MultiPoly; 3],
    field: &Field,
) -> Vec<FieldElement> {
    let sub = f.substitute(args.as_slice());
    let deg = sub.degree().unwrap_or(0) as usize;
    let mut out = vec![FieldElement::zero(field); deg + 1];
    for (m, c) in sub.terms() {
        out[m.0[0] as usize] = c.clone();
    }
    uv_trim(&mut out);
    out
}

/// Intersection candidates on P^2 without a full plane scan: for each line
/// of the pencil X = x0 Z restrict both curves to univariate polynomials
/// and read roots off their gcd; then handle the line Z = 0 the same way.
fn proj2_candidates(
    f: &MultiPoly,
    g: &MultiPoly,
    top: &Field,
) -> Result<Vec<Vec<FieldElement>>> {
    let elems: Vec<FieldElement> = elements(top).collect();
    let tvars = vars(&["t"]);
    let tvar = MultiPoly::var(top, &tvars, 0);
    let one = MultiPoly::one(top, &tvars);
    let zero_el = FieldElement::zero(top);
    let one_el = FieldElement::one(top);
    let mut out = vec![];
    let line_points =
        |fx: Vec<FieldElement>, gx: Vec<FieldElement>| -> Result<Vec<FieldElement>> {
            if fx.is_empty() && gx.is_empty() {
                return Err(Error::ImproperIntersection);
            }
            let h = if fx.is_empty() {
                gx
            } else if gx.is_empty() {
                fx
            } else {
                uv_gcd(&fx, &gx)
            };
            if h.len() <= 1 {
                return Ok(vec![]);
            }
            Ok(elems
                .iter()
                .filter(|y| uv_eval(&h, y).is_zero())
                .cloned()
                .collect())
        };
    for x0 in &elems {
        let c = MultiPoly::constant(top, &tvars, x0.clone());
        let args = [c.clone(), tvar.clone(), one.clone()];
        let fx = restrict_to_line(f, &args, top);
        let gx = restrict_to_line(g, &args, top);
        for y in line_points(fx, gx)? {
            out.push(vec![x0.clone(), y, one_el.clone()]);
        }
    }
    // the line Z = 0: points [x : 1 : 0], then the corner [1 : 0 : 0]
    let args = [tvar.clone(), one.clone(), MultiPoly::zero(top, &tvars)];
    let fx = restrict_to_line(f, &args, top);
    let gx = restrict_to_line(g, &args, top);
    for x in line_points(fx, gx)? {
        out.push(vec![x, one_el.clone(), zero_el.clone()]);
    }
    let corner = vec![one_el.clone(), zero_el.clone(), zero_el.clone()];
    if f.eval(&corner).is_zero() && g.eval(&corner).is_zero() {
        out.push(corner);
    }
    Ok(out)
}

const SCAN_CAP: u128 = 4_000_000;

/// Exhaustive scan of all normalised points, for shapes without a faster
/// route. Order: later blocks vary fastest; within P^r the charts appear
/// by descending pivot (affine points first).
fn generic_scan(
    variety: &VarietyRef,
    polys: &[MultiPoly],
    top: &Field,
) -> Result<Vec<Vec<FieldElement>>> {
    let elems: Vec<FieldElement> = elements(top).collect();
    let q = elems.len() as u128;
    let zero = FieldElement::zero(top);
    let one = FieldElement::one(top);
    let vanishes = |coords: &Vec<FieldElement>| polys.iter().all(|f| f.eval(coords).is_zero());
    let mut out = vec![];
    match variety.kind() {
        VarietyKind::Proj => {
            let r = variety.dim();
            let total: u128 = (0..=r).map(|k| q.pow(k as u32)).sum();
            if total > SCAN_CAP {
                return Err(Error::SearchExhausted {
                    what: "point enumeration".to_string(),
                    trials: SCAN_CAP as usize,
                });
            }
            for k in (0..=r).rev() {
                let n = q.pow(k as u32);
                for idx in 0..n {
                    let mut coords = vec![zero.clone(); r + 1];
                    let mut t = idx;
                    for i in (0..k).rev() {
                        coords[i] = elems[(t % q) as usize].clone();
                        t /= q;
                    }
                    coords[k] = one.clone();
                    if vanishes(&coords) {
                        out.push(coords);
                    }
                }
            }
        }
        VarietyKind::ProductP1 => {
            let r = variety.dim();
            let per_block = q + 1;
            let total = per_block.pow(r as u32);
            if total > SCAN_CAP {
                return Err(Error::SearchExhausted {
                    what: "point enumeration".to_string(),
                    trials: SCAN_CAP as usize,
                });
            }
            for idx in 0..total {
                let mut coords = vec![zero.clone(); 2 * r];
                let mut t = idx;
                for b in (0..r).rev() {
                    let d = (t % per_block) as usize;
                    t /= per_block;
                    if d < elems.len() {
                        coords[2 * b] = elems[d].clone();
                        coords[2 * b + 1] = one.clone();
                    } else {
                        coords[2 * b] = one.clone();
                        coords[2 * b + 1] = zero.clone();
                    }
                }
                if vanishes(&coords) {
                    out.push(coords);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Hypersurface, Variety};
    use crate::gf::FiniteField;
    use crate::poly::parse_poly;

    fn divisor(v: &VarietyRef, src: &str) -> Divisor {
        let p = parse_poly(v.field(), v.coords(), src).unwrap();
        Divisor::of(Hypersurface::new(v, &p).unwrap(), 1)
    }

    #[test]
    fn bezout_degree_product_and_permanent() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "X");
        let d2 = divisor(
            &v,
            "Y*Z^3+Y^3*Z+X*Y^3+X^2*Z^2+X^2*Y^2+X^3*Z+Z^2*Y^2",
        );
        assert_eq!(bezout_number(&[d1, d2]).unwrap(), 4);
        let pp = Variety::product_p1(&f, 2).unwrap();
        // degrees (4,4) and (0,4): permanent 4*4 + 4*0 = 16
        let e1 = divisor(&pp, "X1^4*X2^4+Z1^4*Z2^4");
        let e2 = divisor(&pp, "X2^4+X2*Z2^3");
        assert_eq!(bezout_number(&[e1, e2]).unwrap(), 16);
    }

    #[test]
    fn transversal_quartet_is_certified_at_degree_one() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "X");
        let d2 = divisor(
            &v,
            "Y*Z^3+Y^3*Z+X*Y^3+X^2*Z^2+X^2*Y^2+X^3*Z+Z^2*Y^2",
        );
        let scheme = intersection_scheme(&[d1, d2], &IntersectOptions::default()).unwrap();
        assert!(scheme.certified);
        assert_eq!(scheme.bezout, 4);
        assert_eq!(scheme.e_searched, 1);
        let shown: Vec<String> = scheme.points.iter().map(|p| p.point.to_string()).collect();
        assert_eq!(shown, vec!["[0:0:1]", "[0:a:1]", "[0:a+1:1]", "[0:1:0]"]);
        assert!(scheme
            .points
            .iter()
            .all(|p| p.multiplicity == 1 && p.transversal));
        assert!(scheme.is_all_rational());
    }

    #[test]
    fn tangency_gets_multiplicity_two() {
        let f = FiniteField::with_modulus(3, 2, vec![1, 0, 1]).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "Y^2*Z-X^2*Y");
        let d2 = divisor(&v, "Y*Z+X^2-2*Z^2");
        let scheme = intersection_scheme(&[d1, d2], &IntersectOptions::default()).unwrap();
        assert!(scheme.certified);
        assert_eq!(scheme.bezout, 6);
        assert_eq!(scheme.points.len(), 5);
        let at_infinity = scheme
            .find(
                &VarietyPoint::rational(
                    &v,
                    vec![
                        FieldElement::zero(&f),
                        FieldElement::one(&f),
                        FieldElement::zero(&f),
                    ],
                )
                .unwrap(),
            )
            .unwrap();
        assert_eq!(at_infinity.multiplicity, 2);
        assert!(!at_infinity.transversal);
        for p in &scheme.points {
            if p.point != at_infinity.point {
                assert_eq!(p.multiplicity, 1);
                assert!(p.transversal);
            }
        }
    }

    #[test]
    fn conjugate_quadratic_points_share_an_orbit() {
        let f3 = FiniteField::prime(3).unwrap();
        let v = Variety::proj(&f3, 1).unwrap();
        let d = divisor(&v, "X^2+Z^2");
        let scheme = intersection_scheme(&[d], &IntersectOptions::default()).unwrap();
        assert!(scheme.certified);
        assert_eq!(scheme.points.len(), 2);
        assert_eq!(scheme.points[0].orbit, scheme.points[1].orbit);
        assert!(scheme
            .points
            .iter()
            .all(|p| p.point.extension_degree() == 2));
        assert_eq!(scheme.orbits(), vec![vec![0, 1]]);
        assert!(!scheme.is_all_rational());
    }

    #[test]
    fn shared_component_is_rejected() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "X*Y");
        let d2 = divisor(&v, "X*Z");
        assert_eq!(
            intersection_scheme(&[d1, d2], &IntersectOptions::default()).unwrap_err(),
            Error::ImproperIntersection
        );
    }

    #[test]
    fn product_intersection_of_two_rulings() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::product_p1(&f, 2).unwrap();
        let d1 = divisor(&v, "X1+Z1");
        let d2 = divisor(&v, "X2+a*Z2");
        let scheme = intersection_scheme(&[d1, d2], &IntersectOptions::default()).unwrap();
        assert!(scheme.certified);
        assert_eq!(scheme.bezout, 1);
        assert_eq!(scheme.points.len(), 1);
        assert_eq!(scheme.points[0].point.to_string(), "([1:1],[a:1])");
        assert!(scheme.points[0].transversal);
    }

    #[test]
    fn fast_path_agrees_with_generic_scan() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let f1 = parse_poly(&f, v.coords(), "X^2+Y*Z").unwrap();
        let f2 = parse_poly(&f, v.coords(), "X*Y+Z^2+Y^2").unwrap();
        for e in 1..=3usize {
            let ext = Extension::new(&f, e).unwrap();
            let fe = f1.map_coeffs(ext.top(), |c| ext.embed(c));
            let ge = f2.map_coeffs(ext.top(), |c| ext.embed(c));
            let mut fast: Vec<String> = proj2_candidates(&fe, &ge, ext.top())
                .unwrap()
                .iter()
                .map(|c| format!("{:?}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
                .collect();
            let mut slow: Vec<String> = generic_scan(&v, &[fe, ge], ext.top())
                .unwrap()
                .iter()
                .map(|c| format!("{:?}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
                .collect();
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "extension degree {e}");
        }
    }
}
