//! Affine charts, chart transitions, and point-centred local frames.
//!
//! A chart is the complement of one linear hypersurface per coordinate
//! block. Writing l_b for the form of block b, the affine coordinates are
//! u_i = X_i / l_b(i) for every non-pivot coordinate X_i, where the pivot of
//! a block is the last coordinate with a nonzero form coefficient. On the
//! affine lift with l_b = 1 dehomogenisation becomes a plain substitution,
//! which keeps all of the degree bookkeeping in two small routines
//! (`dehomogenize` / `homogenize`) instead of being spread over the crate.

use super::{same_variety, VarietyPoint, VarietyRef};
use crate::error::{Error, Result};
use crate::gf::{elements, same_field, FieldElement};
use crate::linalg::Mat;
use crate::poly::{vars, Monomial, MultiPoly, RationalFunction, Vars};
use std::fmt;

#[derive(Debug, Clone)]
pub struct Chart {
    variety: VarietyRef,
    /// One linear form per block: coefficients indexed by global coordinate
    /// (zero outside the block), first nonzero coefficient scaled to 1.
    coeffs: Vec<Vec<FieldElement>>,
    /// Global index of the last nonzero coefficient of each block's form.
    pivots: Vec<usize>,
    affine_vars: Vars,
    /// Global coordinate index -> affine variable index (None at pivots).
    affine_of: Vec<Option<usize>>,
    /// Affine variable index -> global coordinate index.
    global_of: Vec<usize>,
}

impl Chart {
    /// Chart cut out by the given linear forms, one per block. Each form
    /// must be supported on its own block; it is normalised so its first
    /// nonzero coefficient is 1.
    pub fn new(variety: &VarietyRef, forms: &[MultiPoly]) -> Result<Self> {
        let blocks = variety.blocks();
        if forms.len() != blocks.len() {
            return Err(Error::ArityMismatch {
                expected: blocks.len(),
                got: forms.len(),
            });
        }
        let n = variety.ncoords();
        let mut rows = vec![];
        for (b, form) in forms.iter().enumerate() {
            if !same_field(form.field(), variety.field()) {
                return Err(Error::FieldMismatch);
            }
            if form.nvars() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: form.nvars(),
                });
            }
            let mut row = vec![FieldElement::zero(variety.field()); n];
            if form.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            for (m, c) in form.terms() {
                let deg: u32 = m.0.iter().sum();
                let pos = m.0.iter().position(|&e| e == 1);
                match (deg, pos) {
                    (1, Some(i)) if blocks[b].contains(&i) => row[i] = c.clone(),
                    _ => return Err(Error::NotHomogeneous),
                }
            }
            rows.push(row);
        }
        Self::from_rows(variety, rows)
    }

    fn from_rows(variety: &VarietyRef, mut rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let mut pivots = vec![];
        for row in rows.iter_mut() {
            let first = row
                .iter()
                .position(|c| !c.is_zero())
                .ok_or(Error::ZeroDenominator)?;
            let inv = row[first].inv()?;
            for c in row.iter_mut() {
                *c = c.mul_ref(&inv);
            }
            let last = row.iter().rposition(|c| !c.is_zero()).unwrap();
            pivots.push(last);
        }
        let n = variety.ncoords();
        let mut affine_of = vec![None; n];
        let mut global_of = vec![];
        let mut names = vec![];
        for i in 0..n {
            if pivots.contains(&i) {
                continue;
            }
            affine_of[i] = Some(global_of.len());
            global_of.push(i);
            names.push(variety.coords()[i].to_lowercase());
        }
        Ok(Chart {
            variety: variety.clone(),
            coeffs: rows,
            pivots,
            affine_vars: vars(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
            affine_of,
            global_of,
        })
    }

    /// Complement of the last coordinate of every block (Z != 0 on P^r,
    /// all Z_i != 0 on a product of lines).
    pub fn standard(variety: &VarietyRef) -> Self {
        let n = variety.ncoords();
        let rows = variety
            .blocks()
            .into_iter()
            .map(|range| {
                let mut row = vec![FieldElement::zero(variety.field()); n];
                row[range.end - 1] = FieldElement::one(variety.field());
                row
            })
            .collect();
        Self::from_rows(variety, rows).expect("standard forms are nonzero")
    }

    pub fn variety(&self) -> &VarietyRef {
        &self.variety
    }

    pub fn dim(&self) -> usize {
        self.global_of.len()
    }

    pub fn affine_vars(&self) -> &Vars {
        &self.affine_vars
    }

    /// Global coordinate index backing affine variable `i`.
    pub fn global_index(&self, i: usize) -> usize {
        self.global_of[i]
    }

    /// The linear form of block `b` as a polynomial in the homogeneous
    /// coordinates.
    pub fn form_poly(&self, b: usize) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.variety.field(), self.variety.coords());
        for (i, c) in self.coeffs[b].iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add_ref(&self.variety.coord_poly(i).scale(c));
            }
        }
        acc
    }

    pub fn forms(&self) -> Vec<MultiPoly> {
        (0..self.coeffs.len()).map(|b| self.form_poly(b)).collect()
    }

    /// Value of block `b`'s form at a point (coefficients embedded into the
    /// point's field first).
    pub fn form_value(&self, b: usize, p: &VarietyPoint) -> FieldElement {
        let ext = p.extension();
        let mut acc = FieldElement::zero(p.field());
        for (i, lam) in self.coeffs[b].iter().enumerate() {
            if !lam.is_zero() {
                acc = acc + ext.embed(lam).mul_ref(p.coord(i));
            }
        }
        acc
    }

    pub fn contains(&self, p: &VarietyPoint) -> bool {
        same_variety(&self.variety, p.variety())
            && (0..self.coeffs.len()).all(|b| !self.form_value(b, p).is_zero())
    }

    /// Affine coordinates u_i = X_i / l_b(i) of a point in this chart.
    pub fn affine_coords(&self, p: &VarietyPoint) -> Result<Vec<FieldElement>> {
        if !same_variety(&self.variety, p.variety()) {
            return Err(Error::VarietyMismatch);
        }
        let mut denominators = vec![];
        for b in 0..self.coeffs.len() {
            let v = self.form_value(b, p);
            if v.is_zero() {
                return Err(Error::OutsideChart);
            }
            denominators.push(v.inv()?);
        }
        Ok(self
            .global_of
            .iter()
            .map(|&g| p.coord(g).mul_ref(&denominators[self.variety.block_of(g)]))
            .collect())
    }

    /// The affine lift: polynomials over the chart variables giving each
    /// homogeneous coordinate of the section where every block form is 1.
    fn lift(&self) -> Vec<MultiPoly> {
        let field = self.variety.field();
        let one = MultiPoly::one(field, &self.affine_vars);
        (0..self.variety.ncoords())
            .map(|i| match self.affine_of[i] {
                Some(ai) => MultiPoly::var(field, &self.affine_vars, ai),
                None => {
                    let b = self.pivots.iter().position(|&pv| pv == i).unwrap();
                    let mut acc = one.clone();
                    for (j, lam) in self.coeffs[b].iter().enumerate() {
                        if j != i && !lam.is_zero() {
                            let u = MultiPoly::var(field, &self.affine_vars, self.affine_of[j].unwrap());
                            acc = acc.sub_ref(&u.scale(lam));
                        }
                    }
                    acc.scale(&self.coeffs[b][i].inv().expect("pivot coefficient is nonzero"))
                }
            })
            .collect()
    }

    /// Restrict a (multi)homogeneous polynomial to this chart by
    /// substituting the affine lift: X_i -> u_i, l_b -> 1.
    pub fn dehomogenize(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if !same_field(f.field(), self.variety.field()) {
            return Err(Error::FieldMismatch);
        }
        if f.nvars() != self.variety.ncoords() {
            return Err(Error::ArityMismatch {
                expected: self.variety.ncoords(),
                got: f.nvars(),
            });
        }
        if f.is_zero() {
            return Ok(MultiPoly::zero(f.field(), &self.affine_vars));
        }
        self.variety.multidegree(f)?;
        Ok(f.substitute(&self.lift()))
    }

    /// Restrict a degree-zero rational function (equal numerator and
    /// denominator multidegrees) to this chart.
    pub fn dehomogenize_rational(&self, rf: &RationalFunction) -> Result<RationalFunction> {
        let dd = self.variety.multidegree(rf.den())?;
        if !rf.num().is_zero() {
            let dn = self.variety.multidegree(rf.num())?;
            if dn != dd {
                return Err(Error::NotHomogeneous);
            }
        }
        RationalFunction::new(self.dehomogenize(rf.num())?, self.dehomogenize(rf.den())?)
    }

    /// Inverse of `dehomogenize` up to form powers: returns the homogeneous
    /// polynomial H of minimal multidegree D with H = (prod_b l_b^(D_b)) * f
    /// on the chart, together with D.
    pub fn homogenize(&self, f: &MultiPoly) -> Result<(MultiPoly, Vec<u32>)> {
        if !same_field(f.field(), self.variety.field()) {
            return Err(Error::FieldMismatch);
        }
        if f.nvars() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                got: f.nvars(),
            });
        }
        let nblocks = self.coeffs.len();
        let field = self.variety.field();
        let coords = self.variety.coords();
        if f.is_zero() {
            return Ok((MultiPoly::zero(field, coords), vec![0; nblocks]));
        }
        let block_deg = |m: &Monomial| -> Vec<u32> {
            let mut s = vec![0u32; nblocks];
            for (i, &e) in m.0.iter().enumerate() {
                s[self.variety.block_of(self.global_of[i])] += e;
            }
            s
        };
        let mut degs = vec![0u32; nblocks];
        for (m, _) in f.terms() {
            for (b, d) in block_deg(m).into_iter().enumerate() {
                degs[b] = degs[b].max(d);
            }
        }
        // powers of each form up to the needed degree
        let mut form_pows: Vec<Vec<MultiPoly>> = (0..nblocks)
            .map(|b| vec![MultiPoly::one(field, coords), self.form_poly(b)])
            .collect();
        let mut acc = MultiPoly::zero(field, coords);
        for (m, c) in f.terms() {
            let mut mono = vec![0u32; self.variety.ncoords()];
            for (i, &e) in m.0.iter().enumerate() {
                mono[self.global_of[i]] = e;
            }
            let mut t = MultiPoly::from_term(field, coords, Monomial(mono), c.clone());
            for (b, s) in block_deg(m).into_iter().enumerate() {
                let k = (degs[b] - s) as usize;
                while form_pows[b].len() <= k {
                    let next = form_pows[b].last().unwrap().mul_ref(&form_pows[b][1]);
                    form_pows[b].push(next);
                }
                t = t.mul_ref(&form_pows[b][k]);
            }
            acc = acc.add_ref(&t);
        }
        Ok((acc, degs))
    }

    /// Homogenise a rational function on the chart into a degree-zero
    /// rational function in the homogeneous coordinates.
    pub fn homogenize_rational(&self, rf: &RationalFunction) -> Result<RationalFunction> {
        let (num, dn) = self.homogenize(rf.num())?;
        let (den, dd) = self.homogenize(rf.den())?;
        let mut num = num;
        let mut den = den;
        for b in 0..dn.len() {
            let form = self.form_poly(b);
            if dd[b] > dn[b] {
                num = num.mul_ref(&form.pow(dd[b] - dn[b]));
            } else if dn[b] > dd[b] {
                den = den.mul_ref(&form.pow(dn[b] - dd[b]));
            }
        }
        RationalFunction::new(num, den)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.coeffs.len())
            .map(|b| format!("V({})", self.form_poly(b)))
            .collect();
        write!(f, "complement of {}", parts.join(", "))
    }
}

// forms are normalised, so coefficient equality is chart equality
impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        same_variety(&self.variety, &other.variety) && self.coeffs == other.coeffs
    }
}

impl Eq for Chart {}

/// First chart (in a fixed enumeration of the linear forms of each block)
/// containing every given point. Candidate forms have coefficients in the
/// base field, first nonzero coefficient 1, ordered by the coefficient
/// index vector read little-endian; the search never extends the field.
pub fn choose_chart(variety: &VarietyRef, points: &[VarietyPoint]) -> Result<Chart> {
    for p in points {
        if !same_variety(p.variety(), variety) {
            return Err(Error::VarietyMismatch);
        }
    }
    let field = variety.field();
    let elems: Vec<FieldElement> = elements(field).collect();
    let q = elems.len();
    let n = variety.ncoords();
    let mut rows = vec![];
    for range in variety.blocks() {
        let size = range.len();
        let total = q.pow(size as u32);
        let mut found = None;
        'candidates: for idx in 1..total {
            let mut digits = vec![0usize; size];
            let mut t = idx;
            for d in digits.iter_mut() {
                *d = t % q;
                t /= q;
            }
            match digits.iter().find(|&&d| d != 0) {
                Some(&first) if first == 1 => {}
                _ => continue,
            }
            let mut row = vec![FieldElement::zero(field); n];
            for (j, &d) in digits.iter().enumerate() {
                row[range.start + j] = elems[d].clone();
            }
            for p in points {
                let ext = p.extension();
                let mut v = FieldElement::zero(p.field());
                for (i, lam) in row.iter().enumerate() {
                    if !lam.is_zero() {
                        v = v + ext.embed(lam).mul_ref(p.coord(i));
                    }
                }
                if v.is_zero() {
                    continue 'candidates;
                }
            }
            found = Some(row);
            break;
        }
        rows.push(found.ok_or(Error::NoChart)?);
    }
    Chart::from_rows(variety, rows)
}

/// The map T expressing the affine coordinates of `from` as rational
/// functions of the coordinates of `to` (on the overlap).
pub fn transition_map(from: &Chart, to: &Chart) -> Result<Vec<RationalFunction>> {
    if !same_variety(&from.variety, &to.variety) {
        return Err(Error::VarietyMismatch);
    }
    (0..from.dim())
        .map(|i| {
            let g = from.global_of[i];
            let b = from.variety.block_of(g);
            let rf = RationalFunction::new(from.variety.coord_poly(g), from.form_poly(b))?;
            to.dehomogenize_rational(&rf)
        })
        .collect()
}

fn det_rational(m: &[Vec<RationalFunction>]) -> RationalFunction {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let field = m[0][0].field().clone();
    let vs = m[0][0].vars().clone();
    let mut acc = RationalFunction::zero(&field, &vs);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RationalFunction>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul_ref(&det_rational(&minor));
        acc = if j % 2 == 0 {
            acc.add_ref(&term)
        } else {
            acc.sub_ref(&term)
        };
    }
    acc
}

/// Determinant of the Jacobian of the transition map `from` -> `to`, as a
/// rational function in the coordinates of `to`.
pub fn transition_jacobian(from: &Chart, to: &Chart) -> Result<RationalFunction> {
    let t = transition_map(from, to)?;
    let jac: Vec<Vec<RationalFunction>> = t
        .iter()
        .map(|ti| (0..to.dim()).map(|j| ti.derivative(j)).collect())
        .collect();
    Ok(det_rational(&jac))
}

/// Rewrite the coefficient of a top-degree differential form from the
/// coordinates of one chart to another: phi becomes (phi o T) * det(J_T).
pub fn transport_density(
    phi: &RationalFunction,
    from: &Chart,
    to: &Chart,
) -> Result<RationalFunction> {
    if phi.vars().len() != from.dim() {
        return Err(Error::ArityMismatch {
            expected: from.dim(),
            got: phi.vars().len(),
        });
    }
    let t = transition_map(from, to)?;
    let num = phi.num().substitute_rational(&t);
    let den = phi.den().substitute_rational(&t);
    let composed = num.div_ref(&den)?;
    Ok(composed.mul_ref(&transition_jacobian(from, to)?))
}

/// Chart data translated so a chosen point becomes the origin. Carries the
/// local equations of a divisor family through the same translation, over
/// the point's field of definition.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    chart: Chart,
    point: VarietyPoint,
    center: Vec<FieldElement>,
    local_vars: Vars,
    equations: Vec<MultiPoly>,
}

fn local_var_names(dim: usize) -> Vars {
    match dim {
        1 => vars(&["s"]),
        2 => vars(&["s", "t"]),
        _ => {
            let names: Vec<String> = (1..=dim).map(|i| format!("s{i}")).collect();
            vars(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>())
        }
    }
}

impl LocalFrame {
    /// Centre the chart at `point` and localise the given homogeneous
    /// equations there. Every equation must vanish at the point.
    pub fn new(chart: &Chart, point: &VarietyPoint, equations: &[MultiPoly]) -> Result<Self> {
        let center = chart.affine_coords(point)?;
        let mut frame = LocalFrame {
            chart: chart.clone(),
            point: point.clone(),
            center,
            local_vars: local_var_names(chart.dim()),
            equations: vec![],
        };
        for eq in equations {
            let local = frame.localize_poly(eq)?;
            if !local.constant_term().is_zero() {
                return Err(Error::NotOnIntersection);
            }
            frame.equations.push(local);
        }
        Ok(frame)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn point(&self) -> &VarietyPoint {
        &self.point
    }

    pub fn center(&self) -> &[FieldElement] {
        &self.center
    }

    pub fn local_vars(&self) -> &Vars {
        &self.local_vars
    }

    /// Local equations in the frame coordinates (origin at the point).
    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Dehomogenise a base-field polynomial, embed it into the point's
    /// field, and translate the point to the origin.
    pub fn localize_poly(&self, f: &MultiPoly) -> Result<MultiPoly> {
        self.localize_chart_poly(&self.chart.dehomogenize(f)?)
    }

    /// Embed a polynomial on the chart into the point's field and translate.
    pub fn localize_chart_poly(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if f.nvars() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                got: f.nvars(),
            });
        }
        let ext = self.point.extension();
        Ok(f.map_coeffs(ext.top(), |c| ext.embed(c))
            .shift(&self.center)
            .rename_vars(&self.local_vars))
    }

    /// Embed a rational function on the chart and translate.
    pub fn localize_chart_rational(&self, rf: &RationalFunction) -> Result<RationalFunction> {
        if rf.vars().len() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                got: rf.vars().len(),
            });
        }
        let ext = self.point.extension();
        Ok(rf
            .map_coeffs(ext.top(), |c| ext.embed(c))
            .shift(&self.center)
            .rename_vars(&self.local_vars))
    }

    /// Express a frame-coordinate polynomial back in the chart coordinates
    /// (over the point's field).
    pub fn to_chart_poly(&self, f: &MultiPoly) -> MultiPoly {
        let neg: Vec<FieldElement> = self.center.iter().map(|c| c.neg_ref()).collect();
        f.rename_vars(self.chart.affine_vars()).shift(&neg)
    }

    pub fn to_chart_rational(&self, rf: &RationalFunction) -> RationalFunction {
        let neg: Vec<FieldElement> = self.center.iter().map(|c| c.neg_ref()).collect();
        rf.rename_vars(self.chart.affine_vars()).shift(&neg)
    }

    /// Matrix of the degree-one parts of the local equations.
    pub fn linear_matrix(&self) -> Mat {
        let field = self.point.field();
        let r = self.dim();
        let mut m = Mat::zeros(field, self.equations.len(), r);
        for (i, eq) in self.equations.iter().enumerate() {
            for j in 0..r {
                let mut unit = vec![0u32; r];
                unit[j] = 1;
                m.set(i, j, eq.coeff(&Monomial(unit)));
            }
        }
        m
    }

    /// Whether the equations cut the point transversally: as many equations
    /// as dimensions and an invertible linear part.
    pub fn is_transversal(&self) -> bool {
        self.equations.len() == self.dim() && self.linear_matrix().rank() == self.dim()
    }

    /// Determinant of the linear parts (the Jacobian at the point).
    pub fn jacobian_det(&self) -> Result<FieldElement> {
        if self.equations.len() != self.dim() {
            return Err(Error::WrongDivisorCount {
                expected: self.dim(),
                got: self.equations.len(),
            });
        }
        Ok(self.linear_matrix().det())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Variety;
    use crate::gf::{Field, FiniteField};
    use crate::poly::{parse_poly, parse_rational};

    fn proj2(field: &Field) -> VarietyRef {
        Variety::proj(field, 2).unwrap()
    }

    fn pt(v: &VarietyRef, coords: &[&str]) -> VarietyPoint {
        let c = coords
            .iter()
            .map(|s| FieldElement::parse(v.field(), s).unwrap())
            .collect();
        VarietyPoint::rational(v, c).unwrap()
    }

    #[test]
    fn chart_choice_avoids_all_given_points() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let points = [
            pt(&v, &["0", "0", "1"]),
            pt(&v, &["0", "1", "0"]),
            pt(&v, &["0", "1", "a"]),
            pt(&v, &["0", "1", "a+1"]),
        ];
        let chart = choose_chart(&v, &points).unwrap();
        assert_eq!(chart.to_string(), "complement of V(Y+Z)");
        // the form never vanishes on the point set
        assert!(points.iter().all(|p| !chart.form_value(0, p).is_zero()));
        // form values depend on the representative; at the representatives
        // [0:0:1], [0:1:0], [0:1:a], [0:1:a+1] the form Y+Z takes
        let form = chart.form_poly(0);
        let raw = |coords: [&str; 3]| {
            let coords = coords
                .iter()
                .map(|s| FieldElement::parse(&f, s).unwrap())
                .collect::<Vec<_>>();
            form.eval(&coords).to_string()
        };
        assert_eq!(raw(["0", "0", "1"]), "1");
        assert_eq!(raw(["0", "1", "0"]), "1");
        assert_eq!(raw(["0", "1", "a"]), "a+1");
        assert_eq!(raw(["0", "1", "a+1"]), "a");
        // a single point earlier in the search accepts an earlier form
        let single = choose_chart(&v, &points[1..2]).unwrap();
        assert_eq!(single.to_string(), "complement of V(Y)");
        assert_eq!(single.affine_vars().as_slice(), ["x", "z"]);
    }

    #[test]
    fn no_chart_over_a_tiny_field() {
        // the three rational points of P^1 over GF(2) kill all three forms
        let f2 = FiniteField::prime(2).unwrap();
        let v = Variety::proj(&f2, 1).unwrap();
        let points = [
            pt(&v, &["0", "1"]),
            pt(&v, &["1", "1"]),
            pt(&v, &["1", "0"]),
        ];
        assert_eq!(choose_chart(&v, &points).unwrap_err(), Error::NoChart);
    }

    #[test]
    fn dehomogenize_then_homogenize_round_trips() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let chart = Chart::standard(&v);
        let h = parse_poly(&f, v.coords(), "X^2*Y+Z^3").unwrap();
        let deh = chart.dehomogenize(&h).unwrap();
        assert_eq!(deh.to_string(), "x^2*y+1");
        let (back, degs) = chart.homogenize(&deh).unwrap();
        assert_eq!(back, h);
        assert_eq!(degs, vec![3]);
        // a form divisible by the chart form homogenises to the quotient
        let g = parse_poly(&f, v.coords(), "X*Z^2").unwrap();
        let (min, d) = chart.homogenize(&chart.dehomogenize(&g).unwrap()).unwrap();
        assert_eq!(min.to_string(), "X");
        assert_eq!(d, vec![1]);
    }

    #[test]
    fn product_chart_handles_blocks_independently() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = Variety::product_p1(&f, 2).unwrap();
        let chart = Chart::standard(&v);
        assert_eq!(chart.affine_vars().as_slice(), ["x1", "x2"]);
        let h = parse_poly(&f, v.coords(), "X1*Z2+Z1*X2").unwrap();
        let deh = chart.dehomogenize(&h).unwrap();
        assert_eq!(deh.to_string(), "x1+x2");
        let (back, degs) = chart.homogenize(&deh).unwrap();
        assert_eq!(back, h);
        assert_eq!(degs, vec![1, 1]);
        let p = pt(&v, &["1", "1", "1", "0"]);
        let c = choose_chart(&v, std::slice::from_ref(&p)).unwrap();
        assert_eq!(c.to_string(), "complement of V(X1), V(X2)");
        let coords: Vec<String> = c
            .affine_coords(&p)
            .unwrap()
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(coords, vec!["1", "0"]);
    }

    #[test]
    fn local_equations_at_a_fixture_point() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let p2 = pt(&v, &["0", "1", "0"]);
        let chart = choose_chart(&v, std::slice::from_ref(&p2)).unwrap();
        let f1 = parse_poly(&f, v.coords(), "X").unwrap();
        let f2 = parse_poly(
            &f,
            v.coords(),
            "Y*Z^3+Y^3*Z+X*Y^3+X^2*Z^2+X^2*Y^2+X^3*Z+Z^2*Y^2",
        )
        .unwrap();
        let frame = LocalFrame::new(&chart, &p2, &[f1, f2]).unwrap();
        let lv = frame.local_vars();
        let want1 = parse_poly(&f, lv, "s").unwrap();
        let want2 = parse_poly(&f, lv, "t^3+t+s+s^2*t^2+s^2+s^3*t+t^2").unwrap();
        assert_eq!(frame.equations(), &[want1, want2]);
        assert!(frame.is_transversal());
        assert_eq!(frame.jacobian_det().unwrap(), FieldElement::one(&f));
    }

    #[test]
    fn frame_rejects_points_off_the_locus() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let p = pt(&v, &["1", "1", "1"]);
        let chart = Chart::standard(&v);
        let eq = parse_poly(&f, v.coords(), "X").unwrap();
        assert_eq!(
            LocalFrame::new(&chart, &p, &[eq]).unwrap_err(),
            Error::NotOnIntersection
        );
    }

    #[test]
    fn density_transport_matches_hand_computed_chart_change() {
        // characteristic 3: the form coefficient picks up a sign from the
        // Jacobian of (x, y) = (x/z, 1/z)
        let f = FiniteField::with_modulus(3, 2, vec![1, 0, 1]).unwrap();
        let v = proj2(&f);
        let chart_z = Chart::standard(&v);
        let chart_y = Chart::new(&v, &[parse_poly(&f, v.coords(), "Y").unwrap()]).unwrap();
        let phi = parse_rational(
            &f,
            chart_z.affine_vars(),
            "(y+1)/(y*(y-x^2)*(y+x^2-2))",
        )
        .unwrap();
        let moved = transport_density(&phi, &chart_z, &chart_y).unwrap();
        let want = parse_rational(
            &f,
            chart_y.affine_vars(),
            "-z*(1+z)/((z-x^2)*(z+x^2-2*z^2))",
        )
        .unwrap();
        assert_eq!(moved, want);
        // and back again: transport is invertible with Jacobians cancelling
        let back = transport_density(&moved, &chart_y, &chart_z).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn transport_in_characteristic_two_fixture() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let chart_z = Chart::standard(&v);
        let chart_y = Chart::new(&v, &[parse_poly(&f, v.coords(), "Y").unwrap()]).unwrap();
        let phi = parse_rational(
            &f,
            chart_z.affine_vars(),
            "(y+1)/(x*(x*y^3+x^2+x^2*y^2+x^3+y^3+y^2+y))",
        )
        .unwrap();
        let moved = transport_density(&phi, &chart_z, &chart_y).unwrap();
        let want = parse_rational(
            &f,
            chart_y.affine_vars(),
            "(z+1)*z/(x*(z^3+z+x+x^2*z^2+x^2+x^3*z+z^2))",
        )
        .unwrap();
        assert_eq!(moved, want);
    }

    #[test]
    fn transition_jacobian_of_identity_is_one() {
        let f = FiniteField::new(2, 2).unwrap();
        let v = proj2(&f);
        let chart = Chart::standard(&v);
        let j = transition_jacobian(&chart, &chart).unwrap();
        assert_eq!(j, RationalFunction::one(&f, chart.affine_vars()));
    }
}
