//! Rectifying functions for a divisor family and an evaluation point set.
//!
//! A function theta, regular at every intersection point of the divisors,
//! is rectifying when at each evaluation point the class of R * theta
//! modulo (x_1^a, ..., x_r^a) collapses to a scalar multiple of
//! x_1^(a-1)...x_r^(a-1), and vanishes entirely at intersection points
//! outside the evaluation set; strictly rectifying when that scalar is
//! nonzero at every evaluation point. Multiplying by such a theta restores
//! the evaluation-linearity of residues that fails at non-transversal
//! points, at the price of one extra vanishing divisor.
//!
//! Verdicts are invariant under the choice of the ideal-membership
//! certificate behind R and under unit rescalings of the local equations;
//! the reported scalar coefficients are not, so they are tied to this
//! crate's normalisations (monic defining polynomials, first chart
//! containing the point).

use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{choose_chart, Divisor, IntersectionScheme, LocalFrame, VarietyPoint};
use crate::gf::FieldElement;
use crate::poly::{Monomial, MultiPoly, RationalFunction, TruncatedSeries};
use crate::residue::{find_param_representation, PointContext, ResidueOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NotRectifying,
    Rectifying,
    StrictlyRectifying,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::NotRectifying => "not rectifying",
            Verdict::Rectifying => "rectifying",
            Verdict::StrictlyRectifying => "strictly rectifying",
        };
        write!(f, "{s}")
    }
}

/// Per-point evidence: the class of R * theta on the monomial box
/// {x^I : I_j <= a-1 for all j}, listed in graded order, with `c` the
/// coefficient at the top corner (a-1, ..., a-1).
#[derive(Debug, Clone)]
pub struct RectifierPointReport {
    pub point: VarietyPoint,
    pub in_p: bool,
    pub a: usize,
    pub class_coeffs: Vec<(Monomial, FieldElement)>,
    pub c: FieldElement,
    /// The class has the shape the definition demands at this point.
    pub ok: bool,
    /// Evaluation point with ok and c != 0.
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct RectifierReport {
    pub theta: RationalFunction,
    pub per_point: Vec<RectifierPointReport>,
    pub overall: Verdict,
}

/// Monomials with every exponent at most a-1, in graded order.
fn box_monomials(r: usize, a: usize) -> Vec<Monomial> {
    Monomial::up_to_degree(r, (r * (a - 1)) as u32)
        .into_iter()
        .filter(|m| m.0.iter().all(|&e| e < a as u32))
        .collect()
}

/// Class of `phi` modulo (x_1^a, ..., x_r^a): coefficients on the box
/// monomials, read from a series expansion at the frame origin.
fn box_class(
    phi: &RationalFunction,
    frame: &LocalFrame,
    a: usize,
) -> Result<Vec<(Monomial, FieldElement)>> {
    let r = frame.dim();
    let field = frame.point().field();
    let order = (r * (a - 1) + 1) as u32;
    let origin = vec![FieldElement::zero(field); r];
    let series = TruncatedSeries::expand_rational(phi, &origin, order)?;
    Ok(box_monomials(r, a)
        .into_iter()
        .map(|m| {
            let c = series.coeff(&m);
            (m, c)
        })
        .collect())
}

/// Restrict a function on the variety (a ratio of equal-multidegree
/// polynomials in the homogeneous coordinates) to frame coordinates.
pub(crate) fn localize_function(
    theta: &RationalFunction,
    frame: &LocalFrame,
) -> Result<RationalFunction> {
    let chart = frame.chart();
    let restricted = chart.dehomogenize_rational(theta)?;
    frame.localize_chart_rational(&restricted)
}

/// Decide whether theta is rectifying for the given evaluation points with
/// respect to the (certified) intersection of the divisors, with per-point
/// class evidence.
pub fn check_rectifying(
    theta: &RationalFunction,
    divisors: &[Divisor],
    points: &[VarietyPoint],
    scheme: &IntersectionScheme,
    opts: &ResidueOptions,
) -> Result<RectifierReport> {
    if !scheme.certified {
        return Err(Error::Uncertified {
            e_max: scheme.e_searched,
        });
    }
    let variety = divisors
        .first()
        .ok_or(Error::WrongDivisorCount {
            expected: 1,
            got: 0,
        })?
        .variety();
    let dn = variety.multidegree(theta.num())?;
    let dd = variety.multidegree(theta.den())?;
    if dn != dd {
        // not a function on the variety
        return Err(Error::NotHomogeneous);
    }
    for p in points {
        if scheme.find(p).is_none() {
            return Err(Error::BadPointSet(format!(
                "evaluation point {p} is not on the intersection"
            )));
        }
    }
    let mut per_point = vec![];
    for ip in &scheme.points {
        let ctx = PointContext::new(divisors, &ip.point, opts)?;
        let a = ctx.param().a();
        let theta_loc = localize_function(theta, ctx.frame())?;
        let origin = vec![FieldElement::zero(ctx.frame().point().field()); ctx.frame().dim()];
        if !theta_loc.is_regular_at(&origin) {
            return Err(Error::NotRegular {
                what: format!("{theta}"),
                at: format!("{}", ip.point),
            });
        }
        let product = ctx.param().transition().mul_ref(&theta_loc);
        let class_coeffs = box_class(&product, ctx.frame(), a)?;
        let corner = Monomial(vec![(a - 1) as u32; ctx.frame().dim()]);
        let c = class_coeffs
            .iter()
            .find(|(m, _)| *m == corner)
            .map(|(_, v)| v.clone())
            .expect("corner monomial is in the box");
        let in_p = points.contains(&ip.point);
        let ok = if in_p {
            class_coeffs
                .iter()
                .all(|(m, v)| *m == corner || v.is_zero())
        } else {
            class_coeffs.iter().all(|(_, v)| v.is_zero())
        };
        let strict = in_p && ok && !c.is_zero();
        per_point.push(RectifierPointReport {
            point: ip.point.clone(),
            in_p,
            a,
            class_coeffs,
            c,
            ok,
            strict,
        });
    }
    let overall = if per_point.iter().any(|r| !r.ok) {
        Verdict::NotRectifying
    } else if per_point.iter().all(|r| !r.in_p || r.strict) {
        Verdict::StrictlyRectifying
    } else {
        Verdict::Rectifying
    };
    Ok(RectifierReport {
        theta: theta.clone(),
        per_point,
        overall,
    })
}

/// Write each local equation exactly as f_j = sum_l s_jl x_l (every
/// monomial is routed to its first variable) and return the matrix.
fn split_matrix(frame: &LocalFrame) -> Vec<Vec<MultiPoly>> {
    let r = frame.dim();
    let field = frame.point().field();
    let lv = frame.local_vars();
    frame
        .equations()
        .iter()
        .map(|f| {
            let mut row = vec![MultiPoly::zero(field, lv); r];
            for (m, coeff) in f.terms() {
                let l = m
                    .0
                    .iter()
                    .position(|&e| e > 0)
                    .expect("local equations vanish at the origin");
                let mut rest = m.0.clone();
                rest[l] -= 1;
                row[l] =
                    row[l].add_ref(&MultiPoly::from_term(field, lv, Monomial(rest), coeff.clone()));
            }
            row
        })
        .collect()
}

/// Determinant s_P of a splitting f_j = sum_l s_jl x_l of the frame's
/// equations. Its product with the transition determinant R is congruent
/// to x_1^(a-1)...x_r^(a-1) modulo (x_1^a, ..., x_r^a) with coefficient
/// exactly 1; this is re-verified before returning.
pub fn local_rectifier(frame: &LocalFrame, opts: &ResidueOptions) -> Result<RationalFunction> {
    let split = split_matrix(frame);
    let det = poly_det(&split);
    let s_p = RationalFunction::from_poly(det);
    let param = find_param_representation(frame, opts)?;
    let a = param.a();
    let corner = Monomial(vec![(a - 1) as u32; frame.dim()]);
    let class = box_class(&param.transition().mul_ref(&s_p), frame, a)?;
    for (m, v) in &class {
        let want_one = *m == corner;
        if (want_one && !v.is_one()) || (!want_one && !v.is_zero()) {
            return Err(Error::Internal(
                "splitting determinant lost its defining congruence".into(),
            ));
        }
    }
    Ok(s_p)
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let field = m[0][0].field();
    let pvars = m[0][0].vars();
    let mut acc = MultiPoly::zero(field, pvars);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry.mul_ref(&poly_det(&minor));
        acc = if j % 2 == 0 {
            acc.add_ref(&term)
        } else {
            acc.sub_ref(&term)
        };
    }
    acc
}

/// Merge local jets into one chart polynomial: returns theta with
/// theta = targets[i] modulo (x_1^(a_i), ..., x_r^(a_i)) at each frame's
/// point. All frames must live in one chart over one field; targets are in
/// the local coordinates of their frame and regular at its origin.
pub fn crt_glue(
    frames: &[LocalFrame],
    targets: &[RationalFunction],
    exponents: &[usize],
) -> Result<MultiPoly> {
    let n = frames.len();
    if n == 0 || targets.len() != n || exponents.len() != n {
        return Err(Error::ArityMismatch {
            expected: n.max(1),
            got: targets.len().min(exponents.len()),
        });
    }
    let chart = frames[0].chart();
    let field = frames[0].point().field();
    let r = chart.dim();
    for fr in frames {
        if fr.chart() != chart {
            return Err(Error::BadPointSet(
                "gluing frames must share one chart".into(),
            ));
        }
        if !crate::gf::same_field(fr.point().field(), field) {
            return Err(Error::FieldMismatch);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if frames[i].center() == frames[j].center() {
                return Err(Error::BadPointSet(format!(
                    "coincident gluing points {} and {}",
                    frames[i].point(),
                    frames[j].point()
                )));
            }
        }
    }
    if exponents.iter().any(|&a| a == 0) {
        return Err(Error::Internal("exponents must be positive".into()));
    }
    let l = exponents.iter().map(|&a| r * (a - 1) + 1).max().unwrap() as u32;
    let cvars = chart.affine_vars();
    let one = MultiPoly::one(field, cvars);
    let mut theta = MultiPoly::zero(field, cvars);
    for i in 0..n {
        // product of indicator forms: 1 at point i, 0 at the others
        let mut delta = one.clone();
        for j in 0..n {
            if j == i {
                continue;
            }
            let ci = frames[i].center();
            let cj = frames[j].center();
            let k = (0..r)
                .find(|&k| ci[k] != cj[k])
                .expect("distinct points differ in some coordinate");
            let denom = ci[k].sub_ref(&cj[k]);
            let lam = MultiPoly::var(field, cvars, k)
                .sub_ref(&MultiPoly::constant(field, cvars, cj[k].clone()))
                .scale(&denom.inv()?);
            delta = delta.mul_ref(&lam.pow(l));
        }
        // sharpen to delta = 1 mod m_i^l without disturbing the zeros
        let delta = one.sub_ref(&one.sub_ref(&delta).pow(l));
        let origin = vec![FieldElement::zero(field); r];
        let jet = TruncatedSeries::expand_rational(&targets[i], &origin, l)?.to_poly();
        theta = theta.add_ref(&delta.mul_ref(&frames[i].to_chart_poly(&jet)));
    }
    // verify every congruence exactly
    for i in 0..n {
        let a = exponents[i] as u32;
        let local = frames[i].localize_chart_poly(&theta)?;
        let diff = RationalFunction::from_poly(local).sub_ref(&targets[i]);
        for (m, v) in box_class(&diff, &frames[i], exponents[i])? {
            if !v.is_zero() {
                return Err(Error::Internal(format!(
                    "glued function misses its jet at {} (monomial {:?}, exponent {a})",
                    frames[i].point(),
                    m.0
                )));
            }
        }
    }
    Ok(theta)
}

/// Synthesize a strictly rectifying function for the evaluation points:
/// glue the local splitting determinants (multiplied by one extra local
/// coordinate at intersection points outside the set, forcing class zero
/// there), homogenise, and re-check the definition. All intersection
/// points must be rational, since the gluing interpolates over the base
/// field.
pub fn construct_rectifier(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    scheme: &IntersectionScheme,
    opts: &ResidueOptions,
) -> Result<(RationalFunction, RectifierReport)> {
    if !scheme.certified {
        return Err(Error::Uncertified {
            e_max: scheme.e_searched,
        });
    }
    if !scheme.is_all_rational() {
        return Err(Error::NonRationalPoint);
    }
    for p in points {
        if scheme.find(p).is_none() {
            return Err(Error::BadPointSet(format!(
                "evaluation point {p} is not on the intersection"
            )));
        }
    }
    let variety = divisors
        .first()
        .ok_or(Error::WrongDivisorCount {
            expected: 1,
            got: 0,
        })?
        .variety();
    let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
    let chart = choose_chart(variety, &all)?;
    let mut frames = vec![];
    let mut targets = vec![];
    let mut exponents = vec![];
    for p in &all {
        let ctx = PointContext::with_chart(&chart, divisors, p, opts)?;
        let s_p = local_rectifier(ctx.frame(), opts)?;
        let target = if points.contains(p) {
            s_p
        } else {
            let x1 = MultiPoly::var(ctx.frame().point().field(), ctx.frame().local_vars(), 0);
            s_p.mul_ref(&RationalFunction::from_poly(x1))
        };
        frames.push(ctx.frame().clone());
        targets.push(target);
        exponents.push(ctx.param().a());
    }
    let glued = crt_glue(&frames, &targets, &exponents)?;
    let theta = chart.homogenize_rational(&RationalFunction::from_poly(glued))?;
    let report = check_rectifying(&theta, divisors, points, scheme, opts)?;
    if report.overall != Verdict::StrictlyRectifying {
        return Err(Error::NotRectifying(format!(
            "synthesized function failed its own check: {}",
            report.overall
        )));
    }
    Ok((theta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{
        intersection_scheme, Chart, Hypersurface, IntersectOptions, Variety, VarietyRef,
    };
    use crate::gf::{Field, FiniteField};
    use crate::poly::{parse_poly, parse_rational};

    fn divisor(v: &VarietyRef, s: &str) -> Divisor {
        let p = parse_poly(v.field(), v.coords(), s).unwrap();
        Divisor::of(Hypersurface::new(v, &p).unwrap(), 1)
    }

    fn pt(v: &VarietyRef, coords: &[&str]) -> VarietyPoint {
        let c = coords
            .iter()
            .map(|s| FieldElement::parse(v.field(), s).unwrap())
            .collect();
        VarietyPoint::rational(v, c).unwrap()
    }

    fn func(v: &VarietyRef, s: &str) -> RationalFunction {
        parse_rational(v.field(), v.coords(), s).unwrap()
    }

    fn el(f: &Field, s: &str) -> FieldElement {
        FieldElement::parse(f, s).unwrap()
    }

    fn quartet() -> (Field, VarietyRef, Vec<Divisor>, IntersectionScheme) {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![
            divisor(&v, "X"),
            divisor(&v, "Y*Z^3+Y^3*Z+X*Y^3+X^2*Z^2+X^2*Y^2+X^3*Z+Z^2*Y^2"),
        ];
        let scheme = intersection_scheme(&dd, &IntersectOptions::default()).unwrap();
        (f, v, dd, scheme)
    }

    fn tangent_pair() -> (Field, VarietyRef, Vec<Divisor>, IntersectionScheme) {
        let f = FiniteField::new(3, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![divisor(&v, "Y^2*Z-X^2*Y"), divisor(&v, "Y*Z+X^2-2*Z^2")];
        let scheme = intersection_scheme(&dd, &IntersectOptions::default()).unwrap();
        (f, v, dd, scheme)
    }

    #[test]
    fn splitting_of_coordinate_divisors_is_trivial() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![divisor(&v, "X"), divisor(&v, "Y")];
        let p = pt(&v, &["0", "0", "1"]);
        let opts = ResidueOptions::default();
        let ctx = PointContext::new(&dd, &p, &opts).unwrap();
        let s_p = local_rectifier(ctx.frame(), &opts).unwrap();
        assert_eq!(s_p.to_string(), "1");
    }

    #[test]
    fn splitting_at_the_quartet_origin() {
        let (_, v, dd, _) = quartet();
        let p1 = pt(&v, &["0", "0", "1"]);
        let opts = ResidueOptions::default();
        let ctx = PointContext::new(&dd, &p1, &opts).unwrap();
        // split f_2 = t(1 + t + t^2) + s(t^3 + s + s t^2 + s^2): the
        // determinant against f_1 = s is the t-cofactor
        let s_p = local_rectifier(ctx.frame(), &opts).unwrap();
        assert_eq!(s_p.to_string(), "t^2+t+1");
    }

    #[test]
    fn splitting_at_the_double_contact() {
        let (f, v, dd, _) = tangent_pair();
        let p5 = pt(&v, &["0", "1", "0"]);
        let opts = ResidueOptions::default();
        let ctx = PointContext::new(&dd, &p5, &opts).unwrap();
        let s_p = local_rectifier(ctx.frame(), &opts).unwrap();
        assert_eq!(s_p.to_string(), "s*t+2*s");
        // R * s_P is exactly the box corner s t, coefficient 1
        let prod = ctx.param().transition().mul_ref(&s_p);
        let class = box_class(&prod, ctx.frame(), 2).unwrap();
        for (m, c) in class {
            if m == Monomial(vec![1, 1]) {
                assert!(c.is_one());
            } else {
                assert!(c.is_zero());
            }
        }
        let _ = f;
    }

    #[test]
    fn constant_function_is_strictly_rectifying_when_transversal() {
        let (f, v, dd, scheme) = quartet();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        let theta = func(&v, "1");
        let opts = ResidueOptions::default();
        let report = check_rectifying(&theta, &dd, &all, &scheme, &opts).unwrap();
        assert_eq!(report.overall, Verdict::StrictlyRectifying);
        // with exponent 1 the scalar is the transition determinant at the
        // point (values tied to this crate's chart and scaling choices)
        let by_point: std::collections::BTreeMap<String, String> = report
            .per_point
            .iter()
            .map(|r| (r.point.to_string(), r.c.to_string()))
            .collect();
        assert_eq!(by_point["[0:0:1]"], "1");
        assert_eq!(by_point["[0:1:0]"], "1");
        assert_eq!(by_point["[0:a+1:1]"], "a+1");
        assert_eq!(by_point["[0:a:1]"], "a");
        // the verdict survives a different representation schedule
        let forced = ResidueOptions {
            a_min: 2,
            ..Default::default()
        };
        let again = check_rectifying(&theta, &dd, &all, &scheme, &forced).unwrap();
        assert_eq!(again.overall, Verdict::StrictlyRectifying);
        let _ = f;
    }

    #[test]
    fn tangent_rectifier_is_not_strict() {
        let (_, v, dd, scheme) = tangent_pair();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        let theta = func(&v, "Z/(Y+Z)");
        let report =
            check_rectifying(&theta, &dd, &all, &scheme, &ResidueOptions::default()).unwrap();
        assert_eq!(report.overall, Verdict::Rectifying);
        for r in &report.per_point {
            if r.point.to_string() == "[0:1:0]" {
                assert!(r.ok && !r.strict);
                assert!(r.c.is_zero());
                assert!(r.class_coeffs.iter().all(|(_, v)| v.is_zero()));
            } else {
                assert!(r.strict, "expected strictness at {}", r.point);
            }
        }
    }

    #[test]
    fn coordinate_times_unit_is_strict_at_the_contact() {
        let (f, v, dd, scheme) = tangent_pair();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        let theta = func(&v, "X/(Y+Z)");
        let report =
            check_rectifying(&theta, &dd, &all, &scheme, &ResidueOptions::default()).unwrap();
        assert_eq!(report.overall, Verdict::StrictlyRectifying);
        let p5 = report
            .per_point
            .iter()
            .find(|r| r.point.to_string() == "[0:1:0]")
            .unwrap();
        assert_eq!(p5.a, 2);
        assert_eq!(p5.c, el(&f, "2"));
    }

    #[test]
    fn subset_rectifier_vanishes_at_the_dropped_point() {
        let (_, v, dd, scheme) = quartet();
        // first three of the four intersection points
        let kept = [
            pt(&v, &["0", "0", "1"]),
            pt(&v, &["0", "1", "0"]),
            pt(&v, &["0", "1", "a"]),
        ];
        let theta = func(&v, "(Z+(a+1)*Y)/(Y+Z)");
        let report =
            check_rectifying(&theta, &dd, &kept, &scheme, &ResidueOptions::default()).unwrap();
        assert_eq!(report.overall, Verdict::StrictlyRectifying);
        let dropped = report
            .per_point
            .iter()
            .find(|r| r.point.to_string() == "[0:a:1]")
            .unwrap();
        assert!(!dropped.in_p && dropped.ok && dropped.c.is_zero());
    }

    #[test]
    fn check_rejects_a_function_with_a_pole_on_the_intersection() {
        let (_, v, dd, scheme) = tangent_pair();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        // pole at [0:1:0]
        let theta = func(&v, "X/Z");
        let err =
            check_rectifying(&theta, &dd, &all, &scheme, &ResidueOptions::default()).unwrap_err();
        match err {
            Error::NotRegular { at, .. } => assert_eq!(at, "[0:1:0]"),
            other => panic!("expected a regularity error, got {other}"),
        }
    }

    #[test]
    fn glue_meets_its_interpolation_conditions() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let chart = Chart::standard(&v);
        let mk_frame = |coords: &[&str]| LocalFrame::new(&chart, &pt(&v, coords), &[]).unwrap();
        // two points, targets 1 and 0
        let f0 = mk_frame(&["0", "0", "1"]);
        let f1 = mk_frame(&["1", "0", "1"]);
        let lv = f0.local_vars().clone();
        let one = parse_rational(&f, &lv, "1").unwrap();
        let zero = parse_rational(&f, &lv, "0").unwrap();
        let glued = crt_glue(
            &[f0.clone(), f1.clone()],
            &[one.clone(), zero.clone()],
            &[1, 1],
        )
        .unwrap();
        let at = |fr: &LocalFrame| {
            glued
                .eval(&fr.center().to_vec())
                .to_string()
        };
        assert_eq!(at(&f0), "1");
        assert_eq!(at(&f1), "0");
        // coincident points are rejected
        let err = crt_glue(&[f0.clone(), f0.clone()], &[one.clone(), zero], &[1, 1]).unwrap_err();
        assert!(matches!(err, Error::BadPointSet(_)));
    }

    #[test]
    fn glue_interpolates_across_a_nonstandard_chart() {
        let (f, v, _, scheme) = quartet();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        let chart = choose_chart(&v, &all).unwrap();
        assert_eq!(chart.to_string(), "complement of V(Y+Z)");
        let frames: Vec<LocalFrame> = all
            .iter()
            .map(|p| LocalFrame::new(&chart, p, &[]).unwrap())
            .collect();
        let lv = frames[0].local_vars().clone();
        let mk = |s: &str| parse_rational(&f, &lv, s).unwrap();
        let targets = [mk("1"), mk("1"), mk("1"), mk("0")];
        let glued = crt_glue(&frames, &targets, &[1, 1, 1, 1]).unwrap();
        let values: Vec<String> = frames
            .iter()
            .map(|fr| glued.eval(&fr.center().to_vec()).to_string())
            .collect();
        // scheme order: [0:0:1], [0:a:1], [0:a+1:1], [0:1:0]
        assert_eq!(values, ["1", "1", "1", "0"]);
    }

    #[test]
    fn synthesized_rectifier_for_a_point_subset() {
        let (_, v, dd, scheme) = quartet();
        let kept = [
            pt(&v, &["0", "0", "1"]),
            pt(&v, &["0", "1", "0"]),
            pt(&v, &["0", "1", "a"]),
        ];
        let (theta, report) =
            construct_rectifier(&dd, &kept, &scheme, &ResidueOptions::default()).unwrap();
        assert_eq!(report.overall, Verdict::StrictlyRectifying);
        let dropped = report
            .per_point
            .iter()
            .find(|r| r.point.to_string() == "[0:a:1]")
            .unwrap();
        assert!(!dropped.in_p && dropped.ok);
        // the result is a genuine function on the variety
        let dn = v.multidegree(theta.num()).unwrap();
        let dd2 = v.multidegree(theta.den()).unwrap();
        assert_eq!(dn, dd2);
    }

    #[test]
    fn synthesized_rectifier_handles_the_double_contact() {
        let (_, v, dd, scheme) = tangent_pair();
        let all: Vec<VarietyPoint> = scheme.points.iter().map(|ip| ip.point.clone()).collect();
        let (_, report) =
            construct_rectifier(&dd, &all, &scheme, &ResidueOptions::default()).unwrap();
        assert_eq!(report.overall, Verdict::StrictlyRectifying);
        let p5 = report
            .per_point
            .iter()
            .find(|r| r.point.to_string() == "[0:1:0]")
            .unwrap();
        assert!(!p5.c.is_zero());
        let _ = v;
    }

    #[test]
    fn synthesis_refuses_nonrational_intersections() {
        let f = FiniteField::prime(3).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![divisor(&v, "X^2+Z^2"), divisor(&v, "Y")];
        let scheme = intersection_scheme(&dd, &IntersectOptions::default()).unwrap();
        assert!(scheme.certified);
        let err = construct_rectifier(&dd, &[], &scheme, &ResidueOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonRationalPoint));
    }
}
