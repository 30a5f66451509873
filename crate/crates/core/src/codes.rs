//! Evaluation and residue codes on P^r and (P^1)^r.
//!
//! The functional code of a point set and a divisor G evaluates a monomial
//! basis of the Riemann-Roch space L(G) at the points. The differential
//! codes take residues of a basis of a space of top forms instead: the
//! plain construction uses forms with poles along the chosen divisor
//! family, the rectified construction additionally forces vanishing along
//! the positive part of a rectifying function, which buys exact
//! orthogonality to the functional code. Both directions of the
//! functional/strict-differential correspondence are implemented
//! constructively and verify themselves by exact row-space comparison.
//!
//! Monomial bases are correct because the Picard groups of the two ambient
//! varieties are free on the obvious hyperplane classes; every basis
//! element is nonetheless re-checked individually, so a bookkeeping slip
//! surfaces as a loud error rather than a wrong code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

use crate::error::{Error, Result};
use crate::geom::{
    choose_chart, intersection_scheme, principal_divisor_parts, Chart, Divisor, Hypersurface,
    IntersectOptions, IntersectionScheme, LocalFrame, VarietyKind, VarietyPoint, VarietyRef,
};
use crate::gf::{same_field, Field, FieldElement};
use crate::linalg::Mat;
use crate::poly::{Monomial, MultiPoly, RationalFunction, TruncatedSeries, Vars};
use crate::rectify::{check_rectifying, crt_glue, localize_function, Verdict};
use crate::residue::{DifferentialForm, PointContext, ResidueOptions};

/// A linear code stored as the reduced row echelon form of its generators,
/// so equality of codes is equality of values.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Field,
    n: usize,
    rows: Vec<Vec<FieldElement>>,
}

impl LinearCode {
    pub fn from_rows(field: &Field, n: usize, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        for r in &rows {
            if r.len() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            for x in r {
                if !same_field(x.field(), field) {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(LinearCode {
            field: field.clone(),
            n,
            rows: reduce_rows(field, n, rows),
        })
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        LinearCode {
            field: field.clone(),
            n,
            rows: vec![],
        }
    }

    /// The full space k^n.
    pub fn full(field: &Field, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![FieldElement::zero(field); n];
                r[i] = FieldElement::one(field);
                r
            })
            .collect();
        LinearCode {
            field: field.clone(),
            n,
            rows,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical (RREF) generator rows.
    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn contains_word(&self, w: &[FieldElement]) -> Result<bool> {
        if w.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let mut rows = self.rows.clone();
        rows.push(w.to_vec());
        Ok(reduce_rows(&self.field, self.n, rows).len() == self.dim())
    }

    pub fn contains(&self, other: &Self) -> Result<bool> {
        if other.n != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        for r in &other.rows {
            if !self.contains_word(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Orthogonal complement for the standard dot product.
    pub fn dual(&self) -> Self {
        if self.rows.is_empty() {
            return Self::full(&self.field, self.n);
        }
        let m = Mat::from_rows(&self.field, self.rows.clone()).expect("canonical rows are valid");
        LinearCode {
            field: self.field.clone(),
            n: self.n,
            rows: reduce_rows(&self.field, self.n, m.kernel_basis()),
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if !same_field(&self.field, &other.field) {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        LinearCode::from_rows(&self.field, self.n, rows)
    }

    /// Row space of all Kronecker products of generators; coordinate
    /// (i, j) of a product row lands at index i*len(other) + j, matching
    /// the lexicographic point order on a product variety.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if !same_field(&self.field, &other.field) {
            return Err(Error::FieldMismatch);
        }
        let n = self.n * other.n;
        let mut rows = vec![];
        for a in &self.rows {
            for b in &other.rows {
                let mut row = Vec::with_capacity(n);
                for x in a {
                    for y in b {
                        row.push(x.mul_ref(y));
                    }
                }
                rows.push(row);
            }
        }
        LinearCode::from_rows(&self.field, n, rows)
    }
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.n == other.n && self.rows == other.rows
    }
}
impl Eq for LinearCode {}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] code over GF({})", self.n, self.dim(), self.field.order())
    }
}

fn reduce_rows(field: &Field, n: usize, rows: Vec<Vec<FieldElement>>) -> Vec<Vec<FieldElement>> {
    if rows.is_empty() || n == 0 {
        return vec![];
    }
    let mut m = Mat::from_rows(field, rows).expect("validated rows");
    m.rref();
    m.rows_vec()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// All monomials in the homogeneous coordinates whose degree on every
/// block matches `degs`, in a fixed order (first block most significant).
fn monomials_of_multidegree(variety: &VarietyRef, degs: &[u32]) -> Vec<Monomial> {
    let blocks = variety.blocks();
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for (b, range) in blocks.iter().enumerate() {
        let body = Monomial::of_degree(range.len(), degs[b]);
        let mut next = Vec::with_capacity(out.len() * body.len());
        for head in &out {
            for tail in &body {
                let mut e = head.clone();
                e.extend_from_slice(&tail.0);
                next.push(e);
            }
        }
        out = next;
    }
    out.into_iter().map(Monomial).collect()
}

/// Monomial basis of the Riemann-Roch space L(G): with A and B the zero
/// and pole parts of G cut out by g_A and g_B, the space is spanned by
/// h*g_B/g_A over monomials h of (multi)degree deg A - deg B. Empty when
/// some component of that difference is negative. Each element is
/// re-verified: its divisor plus G must be effective, an exact
/// divisibility test on the reduced fraction.
pub fn rr_space_basis(variety: &VarietyRef, g: &Divisor) -> Result<Vec<RationalFunction>> {
    let pos = g.positive_part();
    let neg = g.negative_part();
    let ga = pos.defining_poly()?;
    let gb = neg.defining_poly()?;
    let da = pos.multidegree();
    let db = neg.multidegree();
    let mut degs = vec![];
    for b in 0..variety.num_blocks() {
        let d = da[b] - db[b];
        if d < 0 {
            return Ok(vec![]);
        }
        degs.push(d as u32);
    }
    let mut basis = vec![];
    for h in monomials_of_multidegree(variety, &degs) {
        let hp = MultiPoly::from_term(
            variety.field(),
            variety.coords(),
            h,
            FieldElement::one(variety.field()),
        );
        let f = RationalFunction::new(hp.mul_ref(&gb), ga.clone())?;
        let (fp, fn_) = principal_divisor_parts(variety, &f)?;
        let shifted = fp
            .defining_poly()?
            .mul_ref(&ga)
            .div_exact(&fn_.defining_poly()?.mul_ref(&gb));
        if shifted.is_none() {
            return Err(Error::Internal(format!(
                "basis candidate {f} fails the membership test for {g}"
            )));
        }
        basis.push(f);
    }
    Ok(basis)
}

/// Divisor of the top form d(u_1) ^ ... ^ d(u_r) built from a chart's
/// affine coordinates: each block's linear form appears with multiplicity
/// minus the block length.
fn chart_form_divisor(chart: &Chart) -> Result<Divisor> {
    let variety = chart.variety();
    let mut k = Divisor::zero(variety);
    for (b, range) in variety.blocks().iter().enumerate() {
        let h = Hypersurface::new(variety, &chart.form_poly(b))?;
        k = k.add_ref(&Divisor::of(h, -(range.len() as i64)))?;
    }
    Ok(k)
}

/// Divisor of a differential form: the divisor of its coefficient as a
/// global function plus the divisor of the chart's coordinate form.
pub fn form_divisor(form: &DifferentialForm) -> Result<Divisor> {
    let chart = form.chart();
    let variety = chart.variety();
    let global = chart.homogenize_rational(form.coeff())?;
    let (pos, neg) = principal_divisor_parts(variety, &global)?;
    pos.sub_ref(&neg)?.add_ref(&chart_form_divisor(chart)?)
}

/// Basis of the space of top forms with pole divisor bounded by H,
/// written in the standard chart.
pub fn omega_space_basis(variety: &VarietyRef, h: &Divisor) -> Result<Vec<DifferentialForm>> {
    let chart = Chart::standard(variety);
    let k = chart_form_divisor(&chart)?;
    let funcs = rr_space_basis(variety, &h.add_ref(&k)?)?;
    funcs
        .into_iter()
        .map(|f| DifferentialForm::new(chart.clone(), chart.dehomogenize_rational(&f)?))
        .collect()
}

/// True support test at the cycle level: formally cancelling components
/// (such as the divisor family reappearing inside a form divisor with the
/// opposite sign) are reduced away before evaluating.
fn support_avoids(g: &Divisor, points: &[VarietyPoint]) -> Result<()> {
    let pos = g.positive_part().defining_poly()?;
    let neg = g.negative_part().defining_poly()?;
    let reduced = RationalFunction::new(pos, neg)?;
    for p in points {
        if reduced.num().eval(p.coords()).is_zero() || reduced.den().eval(p.coords()).is_zero() {
            return Err(Error::SupportMeetsPoints);
        }
    }
    Ok(())
}

fn validate_points(points: &[VarietyPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::BadPointSet("empty evaluation point set".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.is_rational() {
            return Err(Error::NonRationalPoint);
        }
        if points[..i].contains(p) {
            return Err(Error::BadPointSet(format!("repeated evaluation point {p}")));
        }
    }
    Ok(())
}

/// Image of L(G) under evaluation at the ordered points.
pub fn functional_code(points: &[VarietyPoint], g: &Divisor) -> Result<LinearCode> {
    validate_points(points)?;
    let variety = g.variety();
    support_avoids(g, points)?;
    let basis = rr_space_basis(variety, g)?;
    let field = variety.field();
    let mut rows = vec![];
    for f in &basis {
        let mut row = vec![];
        for p in points {
            let den = f.den().eval(p.coords());
            if den.is_zero() {
                return Err(Error::Internal(format!("{f} has a pole at {p}")));
            }
            row.push(f.num().eval(p.coords()).mul_ref(&den.inv()?));
        }
        rows.push(row);
    }
    LinearCode::from_rows(field, points.len(), rows)
}

/// Residue vectors of the given forms over the points, one context per
/// point shared across forms.
pub fn residue_matrix(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    forms: &[DifferentialForm],
    opts: &ResidueOptions,
) -> Result<Vec<Vec<FieldElement>>> {
    let contexts: Vec<PointContext> = points
        .iter()
        .map(|p| PointContext::new(divisors, p, opts))
        .collect::<Result<_>>()?;
    forms
        .iter()
        .map(|w| contexts.iter().map(|ctx| ctx.residue(w)).collect())
        .collect()
}

fn divisor_sum(divisors: &[Divisor]) -> Result<Divisor> {
    let first = divisors.first().ok_or(Error::WrongDivisorCount {
        expected: 1,
        got: 0,
    })?;
    let mut acc = Divisor::zero(first.variety());
    for d in divisors {
        acc = acc.add_ref(d)?;
    }
    Ok(acc)
}

/// Residue code of the forms with poles bounded by the divisor family
/// minus G. Sound against the dual of the functional code only when the
/// intersection is transversal and exhausted by the points.
pub fn differential_code_plain(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    g: &Divisor,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<LinearCode> {
    let scheme = intersection_scheme(divisors, iopts)?;
    if !scheme.certified {
        return Err(Error::Uncertified {
            e_max: scheme.e_searched,
        });
    }
    validate_points(points)?;
    support_avoids(g, points)?;
    let variety = g.variety();
    let h = divisor_sum(divisors)?.sub_ref(g)?;
    let forms = omega_space_basis(variety, &h)?;
    let rows = residue_matrix(divisors, points, &forms, ropts)?;
    LinearCode::from_rows(variety.field(), points.len(), rows)
}

/// Residue code of the forms additionally vanishing on the positive part
/// of the rectifying function theta. Refuses a theta that fails its
/// rectifying check, and re-verifies the containment in the dual of the
/// functional code before returning.
pub fn differential_code_rectified(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    theta: &RationalFunction,
    g: &Divisor,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<LinearCode> {
    let scheme = intersection_scheme(divisors, iopts)?;
    let report = check_rectifying(theta, divisors, points, &scheme, ropts)?;
    if report.overall == Verdict::NotRectifying {
        let bad: Vec<String> = report
            .per_point
            .iter()
            .filter(|r| !r.ok)
            .map(|r| format!("{}", r.point))
            .collect();
        return Err(Error::NotRectifying(format!(
            "{theta} has a non-collapsing residue class at {}",
            bad.join(", ")
        )));
    }
    validate_points(points)?;
    support_avoids(g, points)?;
    let variety = g.variety();
    let (theta_pos, _) = principal_divisor_parts(variety, theta)?;
    let h = divisor_sum(divisors)?.sub_ref(g)?.sub_ref(&theta_pos)?;
    let forms = omega_space_basis(variety, &h)?;
    let rows = residue_matrix(divisors, points, &forms, ropts)?;
    let code = LinearCode::from_rows(variety.field(), points.len(), rows)?;
    let functional = functional_code(points, g)?;
    if !functional.dual().contains(&code)? {
        return Err(Error::Internal(
            "rectified residue code escapes the dual of the functional code".into(),
        ));
    }
    Ok(code)
}

/// The strictly rectifying constant of theta at one point, computed in
/// the given chart: the corner coefficient of the residue class of
/// R * theta.
fn corner_constant(
    theta: &RationalFunction,
    divisors: &[Divisor],
    chart: &Chart,
    point: &VarietyPoint,
    opts: &ResidueOptions,
) -> Result<FieldElement> {
    let ctx = PointContext::with_chart(chart, divisors, point, opts)?;
    let a = ctx.param().a();
    let r = ctx.frame().dim();
    let theta_loc = localize_function(theta, ctx.frame())?;
    let product = ctx.param().transition().mul_ref(&theta_loc);
    let origin = vec![FieldElement::zero(point.field()); r];
    let series = TruncatedSeries::expand_rational(&product, &origin, (r * (a - 1) + 1) as u32)?;
    Ok(series.coeff(&Monomial(vec![(a - 1) as u32; r])))
}

/// Form with residue exactly 1 against theta at every evaluation point:
/// eta = g / (f_1 ... f_r) d**u** on a chart containing the points, where
/// the f's are the restricted divisor equations and g interpolates the
/// inverses of the rectifying constants. The defining property is
/// re-checked by direct residue computation.
pub fn eta_construct(
    divisors: &[Divisor],
    theta: &RationalFunction,
    points: &[VarietyPoint],
    scheme: &IntersectionScheme,
    opts: &ResidueOptions,
) -> Result<DifferentialForm> {
    let report = check_rectifying(theta, divisors, points, scheme, opts)?;
    if report.overall != Verdict::StrictlyRectifying {
        return Err(Error::NotRectifying(format!(
            "eta needs a strictly rectifying function, got a {} one",
            report.overall
        )));
    }
    validate_points(points)?;
    let variety = divisors[0].variety();
    let chart = choose_chart(variety, points)?;
    let mut frames = vec![];
    let mut targets = vec![];
    for p in points {
        let c = corner_constant(theta, divisors, &chart, p, opts)?;
        let frame = LocalFrame::new(&chart, p, &[])?;
        let lv = frame.local_vars().clone();
        targets.push(RationalFunction::constant(
            variety.field(),
            &lv,
            c.inv()?,
        ));
        frames.push(frame);
    }
    let g = crt_glue(&frames, &targets, &vec![1; points.len()])?;
    let mut den = MultiPoly::one(variety.field(), chart.affine_vars());
    for d in divisors {
        den = den.mul_ref(&chart.dehomogenize(&d.defining_poly()?)?);
    }
    let eta = DifferentialForm::new(chart.clone(), RationalFunction::new(g, den)?)?;
    let theta_eta = eta.mul_fn(&chart.dehomogenize_rational(theta)?)?;
    for p in points {
        let res = crate::residue::residue_wrt_divisors(&theta_eta, divisors, p, opts)?;
        if !res.is_one() {
            return Err(Error::Internal(format!(
                "synthesized eta has residue {res} instead of 1 at {p}"
            )));
        }
    }
    Ok(eta)
}

/// Outcome of rewriting a strictly rectified residue code as an
/// evaluation code on the same points.
#[derive(Debug, Clone)]
pub struct FunctionalEquivalence {
    pub eta: DifferentialForm,
    pub g_prime: Divisor,
    pub differential: LinearCode,
    pub functional: LinearCode,
    pub equal: bool,
}

/// Rewrite the strictly rectified residue code of (divisors, points,
/// theta, G) as the evaluation code of G' = sum D - G + (eta) - (theta)^-
/// and compare the two exactly.
pub fn strict_differential_as_functional(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    theta: &RationalFunction,
    g: &Divisor,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<FunctionalEquivalence> {
    let variety = g.variety();
    let scheme = intersection_scheme(divisors, iopts)?;
    let differential = differential_code_rectified(divisors, points, theta, g, iopts, ropts)?;
    let eta = eta_construct(divisors, theta, points, &scheme, ropts)?;
    let eta_div = form_divisor(&eta)?;
    let (_, theta_neg) = principal_divisor_parts(variety, theta)?;
    let g_prime = divisor_sum(divisors)?
        .sub_ref(g)?
        .add_ref(&eta_div)?
        .sub_ref(&theta_neg)?;
    let functional = functional_code(points, &g_prime)?;
    let equal = differential == functional;
    Ok(FunctionalEquivalence {
        eta,
        g_prime,
        differential,
        functional,
        equal,
    })
}

/// Random effective divisors of the requested (multi)degrees through the
/// points, with a certified proper intersection. Sampling is a seeded
/// draw from the linear system of polynomials vanishing on the set, so
/// the result is reproducible.
pub fn find_divisors_through_points(
    variety: &VarietyRef,
    points: &[VarietyPoint],
    degrees: &[Vec<u32>],
    trials: usize,
    seed: u64,
    iopts: &IntersectOptions,
) -> Result<Vec<Divisor>> {
    if degrees.len() != variety.dim() {
        return Err(Error::WrongDivisorCount {
            expected: variety.dim(),
            got: degrees.len(),
        });
    }
    validate_points(points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels: Vec<(Vec<Monomial>, Vec<Vec<FieldElement>>)> = degrees
        .iter()
        .map(|degs| {
            let monos = monomials_of_multidegree(variety, degs);
            let m = Mat::from_rows(
                variety.field(),
                points
                    .iter()
                    .map(|p| monos.iter().map(|mono| eval_monomial(mono, p)).collect())
                    .collect(),
            )?;
            Ok((monos, m.kernel_basis()))
        })
        .collect::<Result<_>>()?;
    if kernels.iter().any(|(_, k)| k.is_empty()) {
        return Err(Error::SearchExhausted {
            what: "polynomials of the requested degree vanishing on the points".into(),
            trials: 0,
        });
    }
    for _ in 0..trials {
        if let Some(dd) = sample_divisor_family(&mut rng, variety, &kernels, iopts) {
            return Ok(dd);
        }
    }
    Err(Error::SearchExhausted {
        what: "a certified properly intersecting divisor family".into(),
        trials,
    })
}

fn eval_monomial(m: &Monomial, p: &VarietyPoint) -> FieldElement {
    let mut acc = FieldElement::one(p.field());
    for (e, c) in m.0.iter().zip(p.coords()) {
        acc = acc.mul_ref(&c.pow(*e as u128));
    }
    acc
}

fn sample_divisor_family(
    rng: &mut ChaCha8Rng,
    variety: &VarietyRef,
    kernels: &[(Vec<Monomial>, Vec<Vec<FieldElement>>)],
    iopts: &IntersectOptions,
) -> Option<Vec<Divisor>> {
    let field = variety.field();
    let q = field.order();
    let mut divisors = vec![];
    for (monos, kernel) in kernels {
        let mut poly = MultiPoly::zero(field, variety.coords());
        for basis_vec in kernel {
            let c = FieldElement::from_index(field, rng.gen_range(0..q));
            if c.is_zero() {
                continue;
            }
            for (mono, coeff) in monos.iter().zip(basis_vec) {
                if !coeff.is_zero() {
                    poly = poly.add_ref(&MultiPoly::from_term(
                        field,
                        variety.coords(),
                        mono.clone(),
                        coeff.mul_ref(&c),
                    ));
                }
            }
        }
        if poly.is_zero() {
            return None;
        }
        divisors.push(Divisor::of(Hypersurface::new(variety, &poly).ok()?, 1));
    }
    match intersection_scheme(&divisors, iopts) {
        Ok(s) if s.certified => Some(divisors),
        _ => None,
    }
}

/// A strict-differential presentation of an evaluation code.
#[derive(Debug, Clone)]
pub struct DifferentialRepresentation {
    pub divisors: Vec<Divisor>,
    pub theta: RationalFunction,
    pub eta: DifferentialForm,
    pub g_omega: Divisor,
    pub functional: LinearCode,
    pub differential: LinearCode,
    pub trials_used: usize,
}

/// Realize the evaluation code of (points, G) as a strictly rectified
/// residue code: search divisors through the points, synthesize a strict
/// rectifier and its eta, and take residues against
/// sum D + (eta) - G - (theta)^-. Equality of the two codes is a theorem,
/// so a mismatch aborts loudly; search-stage dead ends (non-rational
/// intersection points, uncertifiable families) just consume trials.
pub fn functional_as_strict_differential(
    points: &[VarietyPoint],
    g: &Divisor,
    degrees: &[Vec<u32>],
    trials: usize,
    seed: u64,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<DifferentialRepresentation> {
    let variety = g.variety();
    let functional = functional_code(points, g)?;
    validate_points(points)?;
    if degrees.len() != variety.dim() {
        return Err(Error::WrongDivisorCount {
            expected: variety.dim(),
            got: degrees.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels: Vec<(Vec<Monomial>, Vec<Vec<FieldElement>>)> = degrees
        .iter()
        .map(|degs| {
            let monos = monomials_of_multidegree(variety, degs);
            let m = Mat::from_rows(
                variety.field(),
                points
                    .iter()
                    .map(|p| monos.iter().map(|mono| eval_monomial(mono, p)).collect())
                    .collect(),
            )?;
            Ok((monos, m.kernel_basis()))
        })
        .collect::<Result<_>>()?;
    if kernels.iter().any(|(_, k)| k.is_empty()) {
        return Err(Error::SearchExhausted {
            what: "polynomials of the requested degree vanishing on the points".into(),
            trials: 0,
        });
    }
    for trial in 0..trials {
        let Some(divisors) = sample_divisor_family(&mut rng, variety, &kernels, iopts) else {
            continue;
        };
        match represent_with_divisors(&divisors, points, g, &functional, iopts, ropts) {
            Ok(mut rep) => {
                rep.trials_used = trial + 1;
                return Ok(rep);
            }
            Err(Error::Internal(msg)) => return Err(Error::Internal(msg)),
            Err(_) => continue,
        }
    }
    Err(Error::SearchExhausted {
        what: "a divisor family admitting a strict rectifier through the points".into(),
        trials,
    })
}

fn represent_with_divisors(
    divisors: &[Divisor],
    points: &[VarietyPoint],
    g: &Divisor,
    functional: &LinearCode,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<DifferentialRepresentation> {
    let variety = g.variety();
    let scheme = intersection_scheme(divisors, iopts)?;
    let (theta, _) = crate::rectify::construct_rectifier(divisors, points, &scheme, ropts)?;
    let eta = eta_construct(divisors, &theta, points, &scheme, ropts)?;
    let eta_div = form_divisor(&eta)?;
    let (_, theta_neg) = principal_divisor_parts(variety, &theta)?;
    let g_omega = divisor_sum(divisors)?
        .add_ref(&eta_div)?
        .sub_ref(g)?
        .sub_ref(&theta_neg)?;
    let differential =
        differential_code_rectified(divisors, points, &theta, &g_omega, iopts, ropts)?;
    if differential != *functional {
        return Err(Error::Internal(
            "strict-differential presentation disagrees with the evaluation code".into(),
        ));
    }
    Ok(DifferentialRepresentation {
        divisors: divisors.to_vec(),
        theta,
        eta,
        g_omega,
        functional: functional.clone(),
        differential,
        trials_used: 0,
    })
}

/// Diagonal rescaling carrying the row space of `a` onto the row space of
/// `b`, if one exists. The defining constraints are linear (each rescaled
/// generator of `a` must pair to zero with every dual generator of `b`);
/// the all-nonzero requirement is met by searching the solution space,
/// and any witness is re-verified by exact row-space comparison.
pub fn find_rescaling(a: &LinearCode, b: &LinearCode) -> Result<Option<Vec<FieldElement>>> {
    if !same_field(a.field(), b.field()) {
        return Err(Error::FieldMismatch);
    }
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.dim() != b.dim() {
        return Ok(None);
    }
    let field = a.field();
    let n = a.len();
    let dual_b = b.dual();
    let mut constraint_rows = vec![];
    for row in a.rows() {
        for d in dual_b.rows() {
            constraint_rows.push(
                row.iter()
                    .zip(d)
                    .map(|(x, y)| x.mul_ref(y))
                    .collect::<Vec<_>>(),
            );
        }
    }
    let kernel = if constraint_rows.is_empty() {
        // zero-dimensional codes: any nonzero diagonal works
        return Ok(Some(vec![FieldElement::one(field); n]));
    } else {
        Mat::from_rows(field, constraint_rows)?.kernel_basis()
    };
    if kernel.is_empty() {
        return Ok(None);
    }
    let q = field.order();
    let dim = kernel.len();
    let total = q.checked_pow(dim as u32).unwrap_or(u128::MAX);
    let cap: u128 = 50_000;
    let verify = |beta: &[FieldElement]| -> Result<bool> {
        if beta.iter().any(|x| x.is_zero()) {
            return Ok(false);
        }
        let rescaled: Vec<Vec<FieldElement>> = a
            .rows()
            .iter()
            .map(|row| row.iter().zip(beta).map(|(x, s)| x.mul_ref(s)).collect())
            .collect();
        Ok(LinearCode::from_rows(field, n, rescaled)? == *b)
    };
    let combine = |digits: &[u128]| -> Vec<FieldElement> {
        let mut beta = vec![FieldElement::zero(field); n];
        for (idx, vec) in digits.iter().zip(&kernel) {
            let c = FieldElement::from_index(field, *idx);
            for (b_j, k_j) in beta.iter_mut().zip(vec) {
                *b_j = b_j.add_ref(&k_j.mul_ref(&c));
            }
        }
        beta
    };
    if total <= cap {
        for flat in 1..total {
            let mut digits = vec![0u128; dim];
            let mut t = flat;
            for d in digits.iter_mut() {
                *d = t % q;
                t /= q;
            }
            let beta = combine(&digits);
            if verify(&beta)? {
                return Ok(Some(beta));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e5ca1e);
        for _ in 0..cap {
            let digits: Vec<u128> = (0..dim).map(|_| rng.gen_range(0..q)).collect();
            if digits.iter().all(|&d| d == 0) {
                continue;
            }
            let beta = combine(&digits);
            if verify(&beta)? {
                return Ok(Some(beta));
            }
        }
    }
    Ok(None)
}

/// A self-checking bundle of code-construction inputs: r divisors with a
/// certified intersection containing the ordered points, a divisor G
/// whose cycle-level support avoids them, and optionally a rectifying
/// function.
#[derive(Debug, Clone)]
pub struct CodeScenario {
    divisors: Vec<Divisor>,
    points: Vec<VarietyPoint>,
    g: Divisor,
    theta: Option<RationalFunction>,
    scheme: IntersectionScheme,
}

impl CodeScenario {
    pub fn new(
        divisors: Vec<Divisor>,
        points: Vec<VarietyPoint>,
        g: Divisor,
        theta: Option<RationalFunction>,
        iopts: &IntersectOptions,
    ) -> Result<Self> {
        let scheme = intersection_scheme(&divisors, iopts)?;
        if !scheme.certified {
            return Err(Error::Uncertified {
                e_max: scheme.e_searched,
            });
        }
        validate_points(&points)?;
        for p in &points {
            if scheme.find(p).is_none() {
                return Err(Error::NotOnIntersection);
            }
        }
        support_avoids(&g, &points)?;
        Ok(CodeScenario {
            divisors,
            points,
            g,
            theta,
            scheme,
        })
    }

    pub fn variety(&self) -> &VarietyRef {
        self.g.variety()
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn points(&self) -> &[VarietyPoint] {
        &self.points
    }

    pub fn g(&self) -> &Divisor {
        &self.g
    }

    pub fn theta(&self) -> Option<&RationalFunction> {
        self.theta.as_ref()
    }

    pub fn scheme(&self) -> &IntersectionScheme {
        &self.scheme
    }

    /// The rectifying function to use: the stored one, or the constant 1.
    pub fn theta_or_one(&self) -> RationalFunction {
        self.theta.clone().unwrap_or_else(|| {
            RationalFunction::one(self.variety().field(), self.variety().coords())
        })
    }
}

/// Exact verdicts for the three product-compatibility claims: the product
/// of rectifiers rectifies the product configuration, residues multiply
/// across factors on wedge forms, and the product residue code is the
/// Kronecker product of the factor codes.
#[derive(Debug, Clone)]
pub struct ProductCheckReport {
    pub mu_verdict: Verdict,
    pub factor_verdicts: (Verdict, Verdict),
    pub residues_multiplicative: bool,
    pub kronecker_equal: bool,
}

/// Reinterpret a polynomial in a wider variable list, its own variables
/// landing at the given offset.
fn pad_poly(p: &MultiPoly, field: &Field, target: &Vars, offset: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(field, target);
    for (m, c) in p.terms() {
        let mut e = vec![0u32; target.len()];
        e[offset..offset + m.0.len()].copy_from_slice(&m.0);
        out = out.add_ref(&MultiPoly::from_term(field, target, Monomial(e), c.clone()));
    }
    out
}

fn pad_rational(f: &RationalFunction, field: &Field, target: &Vars, offset: usize) -> RationalFunction {
    RationalFunction::new(
        pad_poly(f.num(), field, target, offset),
        pad_poly(f.den(), field, target, offset),
    )
    .expect("nonzero denominator survives padding")
}

fn pad_divisor(d: &Divisor, product: &VarietyRef, offset: usize) -> Result<Divisor> {
    let mut out = Divisor::zero(product);
    for (h, m) in d.components() {
        let padded = pad_poly(h.poly(), product.field(), product.coords(), offset);
        out = out.add_ref(&Divisor::of(Hypersurface::new(product, &padded)?, *m))?;
    }
    Ok(out)
}

/// Verify the product behaviour of two rectified-code scenarios on
/// products of projective lines.
pub fn product_code_check(
    x: &CodeScenario,
    y: &CodeScenario,
    iopts: &IntersectOptions,
    ropts: &ResidueOptions,
) -> Result<ProductCheckReport> {
    let vx = x.variety();
    let vy = y.variety();
    if vx.kind() != VarietyKind::ProductP1 || vy.kind() != VarietyKind::ProductP1 {
        return Err(Error::VarietyMismatch);
    }
    if !same_field(vx.field(), vy.field()) {
        return Err(Error::FieldMismatch);
    }
    let field = vx.field();
    let rx = vx.dim();
    let ry = vy.dim();
    let product = crate::geom::Variety::product_p1(field, rx + ry)?;
    let offset_y = vx.ncoords();

    let mut prod_divisors = vec![];
    for d in x.divisors() {
        prod_divisors.push(pad_divisor(d, &product, 0)?);
    }
    for d in y.divisors() {
        prod_divisors.push(pad_divisor(d, &product, offset_y)?);
    }
    let mut prod_points = vec![];
    for p in x.points() {
        for q in y.points() {
            let mut coords = p.coords().to_vec();
            coords.extend(q.coords().iter().cloned());
            prod_points.push(VarietyPoint::rational(&product, coords)?);
        }
    }
    let coords = product.coords();
    let theta_x = x.theta_or_one();
    let theta_y = y.theta_or_one();
    let mu = pad_rational(&theta_x, field, coords, 0)
        .mul_ref(&pad_rational(&theta_y, field, coords, offset_y));
    let g_prod = pad_divisor(x.g(), &product, 0)?.add_ref(&pad_divisor(y.g(), &product, offset_y)?)?;

    let prod_scheme = intersection_scheme(&prod_divisors, iopts)?;
    let mu_report = check_rectifying(&mu, &prod_divisors, &prod_points, &prod_scheme, ropts)?;
    let vx_report = check_rectifying(&theta_x, x.divisors(), x.points(), x.scheme(), ropts)?;
    let vy_report = check_rectifying(&theta_y, y.divisors(), y.points(), y.scheme(), ropts)?;

    // residue multiplicativity on wedge products of basis forms
    let hx = divisor_sum(x.divisors())?
        .sub_ref(x.g())?
        .sub_ref(&principal_divisor_parts(vx, &theta_x)?.0)?;
    let hy = divisor_sum(y.divisors())?
        .sub_ref(y.g())?
        .sub_ref(&principal_divisor_parts(vy, &theta_y)?.0)?;
    let basis_x = omega_space_basis(vx, &hx)?;
    let basis_y = omega_space_basis(vy, &hy)?;
    let mx = residue_matrix(x.divisors(), x.points(), &basis_x, ropts)?;
    let my = residue_matrix(y.divisors(), y.points(), &basis_y, ropts)?;
    // the standard chart of the product is the product of the factors'
    // standard charts, so wedge coefficients pad variable-wise
    let prod_chart = Chart::standard(&product);
    let avars = prod_chart.affine_vars();
    let mut wedges = vec![];
    for wx in &basis_x {
        for wy in &basis_y {
            let coeff = pad_rational(wx.coeff(), field, avars, 0)
                .mul_ref(&pad_rational(wy.coeff(), field, avars, rx));
            wedges.push(DifferentialForm::new(prod_chart.clone(), coeff)?);
        }
    }
    let mprod = residue_matrix(&prod_divisors, &prod_points, &wedges, ropts)?;
    let mut residues_multiplicative = true;
    for (i, row_x) in mx.iter().enumerate() {
        for (j, row_y) in my.iter().enumerate() {
            let wedge_row = &mprod[i * my.len() + j];
            for (pi, val_x) in row_x.iter().enumerate() {
                for (qj, val_y) in row_y.iter().enumerate() {
                    if wedge_row[pi * row_y.len() + qj] != val_x.mul_ref(val_y) {
                        residues_multiplicative = false;
                    }
                }
            }
        }
    }

    let code_x =
        differential_code_rectified(x.divisors(), x.points(), &theta_x, x.g(), iopts, ropts)?;
    let code_y =
        differential_code_rectified(y.divisors(), y.points(), &theta_y, y.g(), iopts, ropts)?;
    let code_prod =
        differential_code_rectified(&prod_divisors, &prod_points, &mu, &g_prod, iopts, ropts)?;
    let kronecker_equal = code_prod == code_x.kron(&code_y)?;

    Ok(ProductCheckReport {
        mu_verdict: mu_report.overall,
        factor_verdicts: (vx_report.overall, vy_report.overall),
        residues_multiplicative,
        kronecker_equal,
    })
}
