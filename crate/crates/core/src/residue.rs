//! Grothendieck residues at the points of a zero-dimensional divisor
//! intersection.
//!
//! The residue of a top form relative to divisors D_1..D_r at a point P is
//! computed in three exact steps. First the local equations f_j of the
//! divisors are inverted in a weak sense: for an exponent a, every local
//! coordinate power x_i^a is certified as a member of the ideal (f_1..f_r)
//! by an exact polynomial identity u_i x_i^a = sum_j n_ij f_j with a unit
//! u_i, u_i(0) = 1, and the transition determinant R = det[n_ij] / prod u_i
//! is formed. Second the coefficient function of f_1...f_r omega is pulled
//! into the frame coordinates, checked for regularity, and multiplied by R.
//! Third the product is expanded as a truncated power series and the
//! coefficient at (a-1, ..., a-1) is read off; its trace down to the base
//! field is the residue.
//!
//! The value does not depend on the identity certificate, on the exponent
//! a, or on the chart, so the search below may return any valid
//! representation. Determinism still matters for reproducible reports: the
//! search order (a ascending, degree bound ascending, free variables of the
//! linear solve set to zero) is fixed.

use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{
    choose_chart, intersection_scheme, same_variety, transport_density, Chart, Divisor,
    IntersectOptions, LocalFrame, VarietyPoint,
};
use crate::gf::{same_field, FieldElement};
use crate::linalg::Mat;
use crate::poly::{Monomial, MultiPoly, RationalFunction, TruncatedSeries};

/// A top-degree differential form phi dx_1 ^ ... ^ dx_r, stored as its
/// coefficient phi in the affine coordinates of one chart. Rewriting the
/// form in another chart multiplies the coefficient by the exact Jacobian
/// determinant of the coordinate change.
#[derive(Debug, Clone)]
pub struct DifferentialForm {
    chart: Chart,
    coeff: RationalFunction,
}

impl DifferentialForm {
    pub fn new(chart: Chart, coeff: RationalFunction) -> Result<Self> {
        if coeff.vars().len() != chart.dim() {
            return Err(Error::ArityMismatch {
                expected: chart.dim(),
                got: coeff.vars().len(),
            });
        }
        if !same_field(coeff.field(), chart.variety().field()) {
            return Err(Error::FieldMismatch);
        }
        Ok(DifferentialForm { chart, coeff })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeff(&self) -> &RationalFunction {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The same form in the coordinates of another chart.
    pub fn transport(&self, to: &Chart) -> Result<Self> {
        if self.chart == *to {
            return Ok(self.clone());
        }
        let coeff = transport_density(&self.coeff, &self.chart, to)?;
        DifferentialForm::new(to.clone(), coeff)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        DifferentialForm {
            chart: self.chart.clone(),
            coeff: self
                .coeff
                .mul_ref(&RationalFunction::constant(
                    self.coeff.field(),
                    self.coeff.vars(),
                    c.clone(),
                )),
        }
    }

    /// Multiply the coefficient by a rational function written in this
    /// chart's coordinates.
    pub fn mul_fn(&self, h: &RationalFunction) -> Result<Self> {
        if h.vars().len() != self.chart.dim() {
            return Err(Error::ArityMismatch {
                expected: self.chart.dim(),
                got: h.vars().len(),
            });
        }
        Ok(DifferentialForm {
            chart: self.chart.clone(),
            coeff: self.coeff.mul_ref(h),
        })
    }

    /// Sum of two forms, rewritten into this form's chart first.
    pub fn add_ref(&self, other: &Self) -> Result<Self> {
        let moved = other.transport(&self.chart)?;
        Ok(DifferentialForm {
            chart: self.chart.clone(),
            coeff: self.coeff.add_ref(&moved.coeff),
        })
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wedge: Vec<String> = self
            .coeff
            .vars()
            .iter()
            .map(|v| format!("d{v}"))
            .collect();
        write!(f, "({}) {}", self.coeff, wedge.join("^"))
    }
}

/// Search bounds for the ideal-membership certificates. The degree bound
/// for the multipliers defaults to 4 * a * (largest local equation degree)
/// and can be overridden with `d_cap`. Raising `a_min` forces a higher
/// exponent and is useful for cross-checking representation independence.
#[derive(Debug, Clone, Copy)]
pub struct ResidueOptions {
    pub a_min: usize,
    pub a_max: usize,
    pub d_min: usize,
    pub d_cap: Option<usize>,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        ResidueOptions {
            a_min: 1,
            a_max: 8,
            d_min: 1,
            d_cap: None,
        }
    }
}

/// Exact certificates u_i x_i^a = sum_j n_ij f_j for the local equations f
/// of a frame, with polynomial multipliers n_ij, units u_i normalised by
/// u_i(0) = 1, and the transition determinant R = det[n_ij] / prod_i u_i,
/// a rational function regular at the origin.
#[derive(Debug, Clone)]
pub struct ParamRepresentation {
    a: usize,
    degree_bound: usize,
    units: Vec<MultiPoly>,
    numerators: Vec<Vec<MultiPoly>>,
    transition: RationalFunction,
}

impl ParamRepresentation {
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn units(&self) -> &[MultiPoly] {
        &self.units
    }

    pub fn numerators(&self) -> &[Vec<MultiPoly>] {
        &self.numerators
    }

    /// The determinant R, already divided by the unit product.
    pub fn transition(&self) -> &RationalFunction {
        &self.transition
    }
}

/// Find the smallest exponent a (and multiplier degree bound d) admitting
/// exact identities u_i x_i^a = sum_j n_ij f_j, solving one linear system
/// per coordinate over the frame's field. Existence for some (a, d) is
/// equivalent to the local equations being a system of parameters.
pub fn find_param_representation(
    frame: &LocalFrame,
    opts: &ResidueOptions,
) -> Result<ParamRepresentation> {
    let r = frame.dim();
    let eqs = frame.equations();
    if eqs.len() != r {
        return Err(Error::WrongDivisorCount {
            expected: r,
            got: eqs.len(),
        });
    }
    if eqs.iter().any(|f| f.is_zero()) {
        return Err(Error::ImproperIntersection);
    }
    let field = frame.point().field();
    let one = FieldElement::one(field);
    let max_deg = eqs
        .iter()
        .filter_map(|f| f.degree())
        .max()
        .unwrap_or(1)
        .max(1) as usize;
    let mut d_last = 0;
    for a in opts.a_min..=opts.a_max {
        let d_max = opts.d_cap.unwrap_or(4 * a * max_deg);
        d_last = d_max;
        'degree: for d in opts.d_min..=d_max {
            let mut units = vec![];
            let mut numerators = vec![];
            for i in 0..r {
                match solve_power_identity(eqs, i, a, d) {
                    Some((u, row)) => {
                        units.push(u);
                        numerators.push(row);
                    }
                    None => continue 'degree,
                }
            }
            // re-verify each identity as exact polynomial arithmetic
            for i in 0..r {
                let mut exp = vec![0u32; r];
                exp[i] = a as u32;
                let mut lhs = units[i].mul_term(&Monomial(exp), &one);
                for j in 0..r {
                    lhs = lhs.sub_ref(&numerators[i][j].mul_ref(&eqs[j]));
                }
                if !lhs.is_zero() {
                    return Err(Error::Internal(
                        "power identity failed re-verification".into(),
                    ));
                }
            }
            let det = poly_det(&numerators);
            let mut den = MultiPoly::one(field, eqs[0].vars());
            for u in &units {
                den = den.mul_ref(u);
            }
            let transition = RationalFunction::new(det, den)?;
            return Ok(ParamRepresentation {
                a,
                degree_bound: d,
                units,
                numerators,
                transition,
            });
        }
    }
    Err(Error::NoParamRepresentation {
        a_max: opts.a_max as u32,
        d_max: d_last as u32,
    })
}

/// One identity u x_i^a = sum_j n_j f_j with deg(u) <= d (constant term
/// pinned to 1) and deg(n_j) <= d, as a linear system in the unknown
/// coefficients. Returns (u, [n_1..n_r]) or None if the system is
/// inconsistent at this degree bound.
fn solve_power_identity(
    eqs: &[MultiPoly],
    i: usize,
    a: usize,
    d: usize,
) -> Option<(MultiPoly, Vec<MultiPoly>)> {
    let r = eqs.len();
    let field = eqs[0].field();
    let pvars = eqs[0].vars();
    let one = FieldElement::one(field);
    let mut exp = vec![0u32; r];
    exp[i] = a as u32;
    let x_pow = MultiPoly::from_term(field, pvars, Monomial(exp), one.clone());

    let u_monos: Vec<Monomial> = Monomial::up_to_degree(r, d as u32)
        .into_iter()
        .filter(|m| m.total_degree() > 0)
        .collect();
    let n_monos = Monomial::up_to_degree(r, d as u32);

    // columns: one polynomial per unknown; u-columns add to the left side,
    // n-columns subtract from it
    let mut columns: Vec<MultiPoly> = vec![];
    for m in &u_monos {
        columns.push(x_pow.mul_term(m, &one));
    }
    for f in eqs {
        for m in &n_monos {
            columns.push(f.mul_term(m, &one).neg_ref());
        }
    }

    let mut row_of: std::collections::BTreeMap<Monomial, usize> = Default::default();
    for (m, _) in x_pow.terms() {
        let next = row_of.len();
        row_of.entry(m.clone()).or_insert(next);
    }
    for col in &columns {
        for (m, _) in col.terms() {
            let next = row_of.len();
            row_of.entry(m.clone()).or_insert(next);
        }
    }

    let mut mat = Mat::zeros(field, row_of.len(), columns.len());
    for (c, col) in columns.iter().enumerate() {
        for (m, v) in col.terms() {
            mat.set(row_of[m], c, v.clone());
        }
    }
    let mut rhs = vec![FieldElement::zero(field); row_of.len()];
    for (m, v) in x_pow.terms() {
        rhs[row_of[m]] = v.neg_ref();
    }

    let sol = mat.solve(&rhs)?;
    let mut u = MultiPoly::one(field, pvars);
    for (k, m) in u_monos.iter().enumerate() {
        if !sol[k].is_zero() {
            u = u.add_ref(&MultiPoly::from_term(field, pvars, m.clone(), sol[k].clone()));
        }
    }
    let mut numerators = vec![];
    let mut k = u_monos.len();
    for _ in 0..r {
        let mut n = MultiPoly::zero(field, pvars);
        for m in &n_monos {
            if !sol[k].is_zero() {
                n = n.add_ref(&MultiPoly::from_term(field, pvars, m.clone(), sol[k].clone()));
            }
            k += 1;
        }
        numerators.push(n);
    }
    Some((u, numerators))
}

/// Determinant of a square matrix of polynomials by cofactor expansion
/// along the first row.
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

/// Coefficient of x^(a_1 - 1, ..., a_r - 1) in the series expansion of
/// `phi` at the frame origin, over the point's field of definition.
fn box_coefficient(
    phi: &RationalFunction,
    frame: &LocalFrame,
    a_vec: &[usize],
) -> Result<FieldElement> {
    if a_vec.len() != frame.dim() || phi.vars().len() != frame.dim() {
        return Err(Error::ArityMismatch {
            expected: frame.dim(),
            got: a_vec.len().max(phi.vars().len()),
        });
    }
    if a_vec.iter().any(|&a| a == 0) {
        return Err(Error::Internal("exponents must be positive".into()));
    }
    let field = frame.point().field();
    if !same_field(phi.field(), field) {
        return Err(Error::FieldMismatch);
    }
    let order: u32 = a_vec.iter().map(|&a| (a - 1) as u32).sum::<u32>() + 1;
    let origin = vec![FieldElement::zero(field); frame.dim()];
    let series = TruncatedSeries::expand_rational(phi, &origin, order)?;
    let target = Monomial(a_vec.iter().map(|&a| (a - 1) as u32).collect());
    Ok(series.coeff(&target))
}

/// The residue symbol of phi dx_1 ^ ... ^ dx_r with respect to the
/// coordinate powers x_1^a_1, ..., x_r^a_r: the trace, down to the base
/// field, of the series coefficient at (a_1 - 1, ..., a_r - 1). Errors if
/// phi is not regular at the frame origin.
pub fn residue_symbol(
    phi: &RationalFunction,
    frame: &LocalFrame,
    a_vec: &[usize],
) -> Result<FieldElement> {
    let c = box_coefficient(phi, frame, a_vec)?;
    frame.point().extension().trace(&c)
}

/// Residue data for one intersection point, built once and reused across
/// forms: the chart, the centred frame with localised divisor equations,
/// their product, and the parametric representation.
#[derive(Debug, Clone)]
pub struct PointContext {
    frame: LocalFrame,
    param: ParamRepresentation,
    eq_product: MultiPoly,
}

impl PointContext {
    /// Build the context in the first chart containing the point.
    pub fn new(
        divisors: &[Divisor],
        point: &VarietyPoint,
        opts: &ResidueOptions,
    ) -> Result<Self> {
        let chart = choose_chart(point.variety(), std::slice::from_ref(point))?;
        Self::with_chart(&chart, divisors, point, opts)
    }

    /// Build the context in an explicit chart (it must contain the point).
    pub fn with_chart(
        chart: &Chart,
        divisors: &[Divisor],
        point: &VarietyPoint,
        opts: &ResidueOptions,
    ) -> Result<Self> {
        let variety = point.variety();
        if divisors.len() != variety.dim() {
            return Err(Error::WrongDivisorCount {
                expected: variety.dim(),
                got: divisors.len(),
            });
        }
        let mut polys = vec![];
        for dv in divisors {
            if !same_variety(dv.variety(), variety) {
                return Err(Error::VarietyMismatch);
            }
            if !dv.is_effective() {
                return Err(Error::NotEffective);
            }
            polys.push(dv.defining_poly()?);
        }
        // LocalFrame::new rejects the point if any equation fails to vanish
        let frame = LocalFrame::new(chart, point, &polys)?;
        let param = find_param_representation(&frame, opts)?;
        let mut eq_product = MultiPoly::one(frame.point().field(), frame.local_vars());
        for f in frame.equations() {
            eq_product = eq_product.mul_ref(f);
        }
        Ok(PointContext {
            frame,
            param,
            eq_product,
        })
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn param(&self) -> &ParamRepresentation {
        &self.param
    }

    /// R * f_1...f_r * (coefficient of omega), in the frame coordinates.
    /// The regularity of f_1...f_r * omega is checked before R is mixed in,
    /// because a vanishing numerator of R could mask a genuine pole.
    fn integrand(&self, omega: &DifferentialForm) -> Result<RationalFunction> {
        let moved = omega.transport(self.frame.chart())?;
        let local = self.frame.localize_chart_rational(moved.coeff())?;
        let phi = local.mul_ref(&RationalFunction::from_poly(self.eq_product.clone()));
        let origin = vec![
            FieldElement::zero(self.frame.point().field());
            self.frame.dim()
        ];
        if !phi.is_regular_at(&origin) {
            return Err(Error::NotRegular {
                what: format!("{omega}"),
                at: format!("{}", self.frame.point()),
            });
        }
        Ok(phi.mul_ref(&self.param.transition))
    }

    /// Residue over the point's field of definition (no trace).
    pub fn residue_untraced(&self, omega: &DifferentialForm) -> Result<FieldElement> {
        let phi = self.integrand(omega)?;
        let a_vec = vec![self.param.a; self.frame.dim()];
        box_coefficient(&phi, &self.frame, &a_vec)
    }

    /// Residue of omega relative to the divisor family, in the base field.
    pub fn residue(&self, omega: &DifferentialForm) -> Result<FieldElement> {
        let c = self.residue_untraced(omega)?;
        self.frame.point().extension().trace(&c)
    }
}

/// Residue of omega relative to the given divisors at one point. Builds a
/// fresh context; use [`PointContext`] directly when evaluating several
/// forms at the same point.
pub fn residue_wrt_divisors(
    omega: &DifferentialForm,
    divisors: &[Divisor],
    point: &VarietyPoint,
    opts: &ResidueOptions,
) -> Result<FieldElement> {
    PointContext::new(divisors, point, opts)?.residue(omega)
}

#[derive(Debug, Clone)]
pub struct ResiduePointReport {
    pub point: VarietyPoint,
    pub field_degree: usize,
    /// Residue over the point's field of definition.
    pub residue: FieldElement,
    pub a: usize,
    pub transversal: bool,
    pub orbit: usize,
}

/// Outcome of summing the residues of one form over a full intersection.
#[derive(Debug, Clone)]
pub struct ResidueTheoremReport {
    pub points: Vec<ResiduePointReport>,
    /// Per-orbit residue sums. Each sum is Frobenius-invariant, hence a
    /// base-field element, even though the individual terms are not.
    pub orbit_traces: Vec<FieldElement>,
    /// Sum of the orbit traces; zero exactly when the theorem holds.
    pub total: FieldElement,
}

impl ResidueTheoremReport {
    pub fn holds(&self) -> bool {
        self.total.is_zero()
    }
}

/// Sum the residues of omega over every geometric intersection point of
/// the divisors and report the total, which must vanish when the poles of
/// omega are bounded by the divisor sum. Conjugate points are evaluated
/// individually over their field of definition; each orbit sum equals the
/// trace of any single member's residue and is pushed down to the base
/// field, so no choice of embedding between unrelated extensions enters.
pub fn verify_residue_theorem(
    divisors: &[Divisor],
    omega: &DifferentialForm,
    intersect: &IntersectOptions,
    opts: &ResidueOptions,
) -> Result<ResidueTheoremReport> {
    let scheme = intersection_scheme(divisors, intersect)?;
    if !scheme.certified {
        return Err(Error::Uncertified {
            e_max: intersect.e_max,
        });
    }
    let base = divisors[0].variety().field().clone();
    let mut points = vec![];
    for ip in &scheme.points {
        let ctx = PointContext::new(divisors, &ip.point, opts)?;
        let residue = ctx.residue_untraced(omega)?;
        points.push(ResiduePointReport {
            point: ip.point.clone(),
            field_degree: ip.point.extension_degree(),
            residue,
            a: ctx.param.a(),
            transversal: ip.transversal,
            orbit: ip.orbit,
        });
    }
    let mut orbit_traces = vec![];
    for orbit in scheme.orbits() {
        let ext = points[orbit[0]].point.extension().clone();
        let mut acc = FieldElement::zero(ext.top());
        for &i in &orbit {
            acc = acc.add_ref(&points[i].residue);
        }
        // a sum outside the base field would mean conjugates were mismatched
        orbit_traces.push(ext.restrict(&acc)?);
    }
    let mut total = FieldElement::zero(&base);
    for t in &orbit_traces {
        total = total.add_ref(t);
    }
    Ok(ResidueTheoremReport {
        points,
        orbit_traces,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Hypersurface, Variety, VarietyRef};
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

    fn form(chart: &Chart, s: &str) -> DifferentialForm {
        let coeff =
            parse_rational(chart.variety().field(), chart.affine_vars(), s).unwrap();
        DifferentialForm::new(chart.clone(), coeff).unwrap()
    }

    fn el(f: &Field, s: &str) -> FieldElement {
        FieldElement::parse(f, s).unwrap()
    }

    /// GF(4) plane fixture: D1 = V(X), D2 a quartic, intersecting
    /// transversally in four rational points.
    fn quartet() -> (Field, VarietyRef, Vec<Divisor>) {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "X");
        let d2 = divisor(&v, "Y*Z^3+Y^3*Z+X*Y^3+X^2*Z^2+X^2*Y^2+X^3*Z+Z^2*Y^2");
        (f, v, vec![d1, d2])
    }

    /// GF(9) plane fixture: a cubic and a conic meeting in five rational
    /// points, with a double contact at [0:1:0].
    fn tangent_pair() -> (Field, VarietyRef, Vec<Divisor>) {
        let f = FiniteField::new(3, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let d1 = divisor(&v, "Y^2*Z-X^2*Y");
        let d2 = divisor(&v, "Y*Z+X^2-2*Z^2");
        (f, v, vec![d1, d2])
    }

    #[test]
    fn coordinate_divisors_give_the_identity_representation() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![divisor(&v, "X"), divisor(&v, "Y")];
        let p = pt(&v, &["0", "0", "1"]);
        let ctx = PointContext::new(&dd, &p, &ResidueOptions::default()).unwrap();
        assert_eq!(ctx.param().a(), 1);
        let origin = vec![FieldElement::zero(&f), FieldElement::zero(&f)];
        assert!(ctx.param().transition().eval(&origin).unwrap().is_one());
        // residue of c/(x y) dx^dy is c itself
        let omega = form(ctx.frame().chart(), "a/(x*y)");
        assert_eq!(ctx.residue(&omega).unwrap(), el(&f, "a"));
    }

    #[test]
    fn representation_at_the_origin_of_the_quartet() {
        let (f, v, dd) = quartet();
        let p1 = pt(&v, &["0", "0", "1"]);
        let ctx = PointContext::new(&dd, &p1, &ResidueOptions::default()).unwrap();
        assert_eq!(ctx.param().a(), 1);
        let origin = vec![FieldElement::zero(&f), FieldElement::zero(&f)];
        assert!(ctx.param().transition().eval(&origin).unwrap().is_one());
    }

    #[test]
    fn residue_symbol_reads_the_box_coefficient() {
        let f = FiniteField::new(3, 2).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let chart = Chart::standard(&v);
        let p = pt(&v, &["0", "0", "1"]);
        let frame = LocalFrame::new(&chart, &p, &[]).unwrap();
        let lv = frame.local_vars();
        let one = parse_rational(&f, lv, "1").unwrap();
        assert!(residue_symbol(&one, &frame, &[1, 1]).unwrap().is_one());
        // (1+s)/(1-t) = (1+s)(1+t+t^2+...): coefficient of s t is 1
        let phi = parse_rational(&f, lv, "(1+s)/(1+2*t)").unwrap();
        assert!(residue_symbol(&phi, &frame, &[2, 2]).unwrap().is_one());
        assert!(residue_symbol(&phi, &frame, &[1, 1]).unwrap().is_one());
        // a pole at the origin is rejected
        let bad = parse_rational(&f, lv, "1/s").unwrap();
        assert!(matches!(
            residue_symbol(&bad, &frame, &[1, 1]),
            Err(Error::NotRegular { .. })
        ));
    }

    #[test]
    fn quartet_residue_table() {
        let (f, v, dd) = quartet();
        let chart = Chart::standard(&v);
        let den = "x*(x*y^3+x^2+x^2*y^2+x^3+y^3+y^2+y)";
        let omegas = [
            form(&chart, &format!("(y+1)/({den})")),
            form(&chart, &format!("(x*(y+1))/({den})")),
            form(&chart, &format!("(y*(y+1))/({den})")),
        ];
        let table = [
            (vec!["0", "0", "1"], ["1", "0", "0"]),
            (vec!["0", "1", "0"], ["0", "0", "1"]),
            (vec!["0", "1", "a"], ["a+1", "0", "a"]),
            (vec!["0", "1", "a+1"], ["a", "0", "a+1"]),
        ];
        let opts = ResidueOptions::default();
        for (coords, expect) in &table {
            let p = pt(&v, coords);
            let ctx = PointContext::new(&dd, &p, &opts).unwrap();
            assert_eq!(ctx.param().a(), 1, "transversal point needs a = 1");
            for (omega, want) in omegas.iter().zip(expect) {
                assert_eq!(
                    ctx.residue(omega).unwrap(),
                    el(&f, want),
                    "residue at {p} of {omega}"
                );
            }
        }
    }

    #[test]
    fn tangent_pair_residue_vectors() {
        let (f, v, dd) = tangent_pair();
        let chart = Chart::standard(&v);
        let den = "y*(y-x^2)*(y+x^2-2)";
        let omegas = [
            form(&chart, &format!("(y+1)/({den})")),
            form(&chart, &format!("(x*(y+1))/({den})")),
            form(&chart, &format!("(y*(y+1))/({den})")),
        ];
        let table = [
            (vec!["1", "1", "1"], ["1", "1", "1"]),
            (vec!["2", "1", "1"], ["2", "1", "2"]),
            (vec!["a", "0", "1"], ["2*a", "1", "0"]),
            (vec!["2*a", "0", "1"], ["a", "1", "0"]),
            (vec!["0", "1", "0"], ["0", "2", "0"]),
        ];
        let opts = ResidueOptions::default();
        for (coords, expect) in &table {
            let p = pt(&v, coords);
            let ctx = PointContext::new(&dd, &p, &opts).unwrap();
            for (omega, want) in omegas.iter().zip(expect) {
                assert_eq!(
                    ctx.residue(omega).unwrap(),
                    el(&f, want),
                    "residue at {p} of {omega}"
                );
            }
        }
    }

    #[test]
    fn double_contact_needs_exponent_two() {
        let (f, v, dd) = tangent_pair();
        let p5 = pt(&v, &["0", "1", "0"]);
        let ctx = PointContext::new(&dd, &p5, &ResidueOptions::default()).unwrap();
        assert_eq!(ctx.param().a(), 2);
        assert!(!ctx.frame().is_transversal());
        // For the raw equations (t - s^2, t + s^2 - 2t^2) the determinant
        // is 2t/(t-1), congruent to t modulo (s^2, t^2). Stored equations
        // are monic rescalings (here the first is doubled), which scales
        // the determinant by the inverse unit: class 2t. Residues are
        // unaffected, as the table test shows.
        let origin = vec![FieldElement::zero(&f), FieldElement::zero(&f)];
        let series =
            TruncatedSeries::expand_rational(ctx.param().transition(), &origin, 3).unwrap();
        assert!(series.coeff(&Monomial(vec![0, 0])).is_zero());
        assert!(series.coeff(&Monomial(vec![1, 0])).is_zero());
        assert_eq!(series.coeff(&Monomial(vec![0, 1])), el(&f, "2"));
        assert!(series.coeff(&Monomial(vec![1, 1])).is_zero());
    }

    #[test]
    fn residue_ignores_the_representation_and_the_chart() {
        let (f, v, dd) = quartet();
        let chart = Chart::standard(&v);
        let den = "x*(x*y^3+x^2+x^2*y^2+x^3+y^3+y^2+y)";
        let omega = form(&chart, &format!("(y+1)/({den})"));
        let p3 = pt(&v, &["0", "1", "a"]);
        let base = PointContext::new(&dd, &p3, &ResidueOptions::default()).unwrap();
        let expected = el(&f, "a+1");
        assert_eq!(base.residue(&omega).unwrap(), expected);
        // same residue from a higher exponent
        let forced = ResidueOptions {
            a_min: 2,
            ..Default::default()
        };
        let higher = PointContext::new(&dd, &p3, &forced).unwrap();
        assert_eq!(higher.param().a(), 2);
        assert_eq!(higher.residue(&omega).unwrap(), expected);
        // same residue from a different chart containing the point
        let other =
            PointContext::with_chart(&chart, &dd, &p3, &ResidueOptions::default()).unwrap();
        assert_ne!(other.frame().chart(), base.frame().chart());
        assert_eq!(other.residue(&omega).unwrap(), expected);
    }

    #[test]
    fn transversal_residue_is_the_reciprocal_jacobian() {
        // c / (f_1 f_2) built from the frame's own equations, so the
        // Jacobian below refers to exactly the same scaling
        let (f, v, dd) = tangent_pair();
        let chart = Chart::standard(&v);
        let c = el(&f, "a");
        let p1 = pt(&v, &["1", "1", "1"]);
        let ctx = PointContext::with_chart(&chart, &dd, &p1, &ResidueOptions::default()).unwrap();
        assert!(ctx.frame().is_transversal());
        let mut prod = MultiPoly::one(&f, ctx.frame().local_vars());
        for eq in ctx.frame().equations() {
            prod = prod.mul_ref(eq);
        }
        let den = ctx.frame().to_chart_poly(&prod);
        let num = MultiPoly::constant(&f, den.vars(), c.clone());
        let omega =
            DifferentialForm::new(chart.clone(), RationalFunction::new(num, den).unwrap())
                .unwrap();
        let jac = ctx.frame().jacobian_det().unwrap();
        let expected = c.mul_ref(&jac.inv().unwrap());
        assert_eq!(ctx.residue(&omega).unwrap(), expected);
    }

    #[test]
    fn residue_is_linear_in_the_form() {
        let (f, v, dd) = quartet();
        let chart = Chart::standard(&v);
        let den = "x*(x*y^3+x^2+x^2*y^2+x^3+y^3+y^2+y)";
        let w1 = form(&chart, &format!("(y+1)/({den})"));
        let w3 = form(&chart, &format!("(y*(y+1))/({den})"));
        let c = el(&f, "a");
        let combo = w1.scale(&c).add_ref(&w3).unwrap();
        let p4 = pt(&v, &["0", "1", "a+1"]);
        let ctx = PointContext::new(&dd, &p4, &ResidueOptions::default()).unwrap();
        let lhs = ctx.residue(&combo).unwrap();
        let rhs = c
            .mul_ref(&ctx.residue(&w1).unwrap())
            .add_ref(&ctx.residue(&w3).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn transport_is_involutive() {
        let (_, v, _) = tangent_pair();
        let chart_z = Chart::standard(&v);
        let omega = form(&chart_z, "(y+1)/(y*(y-x^2)*(y+x^2-2))");
        let p5 = pt(&v, &["0", "1", "0"]);
        let chart_y = choose_chart(&v, std::slice::from_ref(&p5)).unwrap();
        let there = omega.transport(&chart_y).unwrap();
        assert_ne!(there.coeff(), omega.coeff());
        let back = there.transport(&chart_z).unwrap();
        assert_eq!(back.coeff(), omega.coeff());
    }

    #[test]
    fn residue_sums_vanish_on_the_quartet() {
        let (f, v, dd) = quartet();
        let chart = Chart::standard(&v);
        let den = "x*(x*y^3+x^2+x^2*y^2+x^3+y^3+y^2+y)";
        let omega = form(&chart, &format!("(y+1)/({den})"));
        let report = verify_residue_theorem(
            &dd,
            &omega,
            &IntersectOptions::default(),
            &ResidueOptions::default(),
        )
        .unwrap();
        assert!(report.holds());
        let by_point: std::collections::BTreeMap<String, String> = report
            .points
            .iter()
            .map(|r| (r.point.to_string(), r.residue.to_string()))
            .collect();
        assert_eq!(by_point["[0:0:1]"], "1");
        assert_eq!(by_point["[0:a:1]"], "a");
        assert_eq!(by_point["[0:a+1:1]"], "a+1");
        assert_eq!(by_point["[0:1:0]"], "0");
        let _ = f;
    }

    #[test]
    fn residue_sums_vanish_at_a_double_contact() {
        let (_, v, dd) = tangent_pair();
        let chart = Chart::standard(&v);
        let den = "y*(y-x^2)*(y+x^2-2)";
        for num in ["x*(y+1)", "y*(y+1)"] {
            let omega = form(&chart, &format!("({num})/({den})"));
            let report = verify_residue_theorem(
                &dd,
                &omega,
                &IntersectOptions::default(),
                &ResidueOptions::default(),
            )
            .unwrap();
            assert!(report.holds(), "nonzero total for ({num})/({den})");
        }
    }

    #[test]
    fn conjugate_orbit_traces_cancel_a_rational_double_point() {
        // V(X^2+Z^2) meets V(Y(X+Z)) in a conjugate pair over GF(9) and in
        // [0:1:0] with multiplicity two; the pair's trace must cancel the
        // double point's residue.
        let f = FiniteField::prime(3).unwrap();
        let v = Variety::proj(&f, 2).unwrap();
        let dd = vec![divisor(&v, "X^2+Z^2"), divisor(&v, "X*Y+Y*Z")];
        let chart = Chart::standard(&v);
        let omega = form(&chart, "1/(y*(x+1)*(x^2+1))");
        let report = verify_residue_theorem(
            &dd,
            &omega,
            &IntersectOptions::default(),
            &ResidueOptions::default(),
        )
        .unwrap();
        assert!(report.holds());
        assert_eq!(report.points.len(), 3);
        let double = report
            .points
            .iter()
            .find(|r| r.point.to_string() == "[0:1:0]")
            .unwrap();
        assert_eq!(double.a, 2);
        assert!(!double.transversal);
        assert_eq!(double.field_degree, 1);
        let pair: Vec<_> = report.points.iter().filter(|r| r.field_degree == 2).collect();
        assert_eq!(pair.len(), 2);
        // each orbit sum lands in GF(3), and the two cancel
        let traces: Vec<String> = report.orbit_traces.iter().map(|t| t.to_string()).collect();
        assert_eq!(traces, ["2", "1"]);
    }
}
