//! One function per subcommand. Each returns the `result` payload of the
//! report envelope; failures carry an exit code and a machine-readable
//! error object. Commands that verify a claim use exit code 4 when the
//! claim is false but the computation itself went through.

use serde_json::{json, Value};

use agres::codes::{
    differential_code_plain, differential_code_rectified, functional_as_strict_differential,
    functional_code, omega_space_basis, product_code_check, strict_differential_as_functional,
    CodeScenario, LinearCode,
};
use agres::geom::{intersection_scheme, Divisor, IntersectOptions, IntersectionScheme};
use agres::gf::FieldElement;
use agres::rectify::{check_rectifying, construct_rectifier, RectifierReport, Verdict};
use agres::residue::{verify_residue_theorem, DifferentialForm, PointContext, ResidueOptions};

use crate::report::CmdError;
use crate::scenario::Scenario;

#[derive(Debug, Default, Clone)]
pub struct GlobalFlags {
    pub seed: Option<u64>,
    pub e_max: Option<usize>,
    pub a_max: Option<usize>,
}

pub struct Effective {
    pub iopts: IntersectOptions,
    pub ropts: ResidueOptions,
    pub seed: u64,
}

/// Command-line flags win over the scenario's options block.
pub fn effective(scn: &Scenario, flags: &GlobalFlags) -> Effective {
    let mut iopts = IntersectOptions::default();
    if let Some(e) = flags.e_max.or(scn.options.e_max) {
        iopts.e_max = e;
    }
    let mut ropts = ResidueOptions::default();
    if let Some(a) = flags.a_max.or(scn.options.a_max) {
        ropts.a_max = a;
    }
    let seed = flags.seed.or(scn.options.seed).unwrap_or(0);
    Effective { iopts, ropts, seed }
}

pub fn code_value(c: &LinearCode) -> Value {
    json!({
        "n": c.len(),
        "k": c.dim(),
        "generator_rows": c
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn scheme_value(s: &IntersectionScheme) -> Value {
    json!({
        "bezout": s.bezout,
        "total": s.total,
        "certified": s.certified,
        "e_searched": s.e_searched,
        "points": s.points.iter().map(|ip| json!({
            "point": ip.point.to_string(),
            "field_degree": ip.point.extension_degree(),
            "multiplicity": ip.multiplicity,
            "transversal": ip.transversal,
            "orbit": ip.orbit,
        })).collect::<Vec<_>>(),
    })
}

fn rectifier_value(r: &RectifierReport) -> Value {
    json!({
        "theta": r.theta.to_string(),
        "overall": r.overall.to_string(),
        "per_point": r.per_point.iter().map(|p| json!({
            "point": p.point.to_string(),
            "in_p": p.in_p,
            "a": p.a,
            "class": p.class_coeffs.iter().map(|(m, c)| json!({
                "monomial": m.0,
                "coeff": c.to_string(),
            })).collect::<Vec<_>>(),
            "c": p.c.to_string(),
            "ok": p.ok,
            "strict": p.strict,
        })).collect::<Vec<_>>(),
    })
}

/// Pole bound for the scenario's space of forms: the divisor family minus
/// G, additionally minus the zeros of theta when one is given.
fn omega_bound(scn: &Scenario) -> Result<Divisor, CmdError> {
    let mut h = Divisor::zero(&scn.variety);
    for d in &scn.divisors {
        h = h.add_ref(d)?;
    }
    h = h.sub_ref(&scn.g)?;
    if let Some(theta) = &scn.theta {
        let (pos, _) = agres::geom::principal_divisor_parts(&scn.variety, theta)?;
        h = h.sub_ref(&pos)?;
    }
    Ok(h)
}

pub fn intersect(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let scheme = intersection_scheme(&scn.divisors, &eff.iopts)?;
    Ok(scheme_value(&scheme))
}

/// Residue table of the scenario's form space over its points. Rows are
/// forms, columns are points; the per-point contexts are built on worker
/// threads and assembled in point order.
pub fn residue(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    if scn.points.is_empty() {
        return Err(CmdError::schema("scenario has no points".into()));
    }
    let h = omega_bound(scn)?;
    let forms = omega_space_basis(&scn.variety, &h)?;
    let columns = residue_columns(&scn.divisors, &scn.points, &forms, &eff.ropts)?;
    let matrix: Vec<Vec<String>> = (0..forms.len())
        .map(|i| columns.iter().map(|col| col[i].to_string()).collect())
        .collect();
    Ok(json!({
        "forms": forms.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "points": scn.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "matrix": matrix,
    }))
}

/// One residue column per point, computed concurrently.
fn residue_columns(
    divisors: &[Divisor],
    points: &[agres::geom::VarietyPoint],
    forms: &[DifferentialForm],
    ropts: &ResidueOptions,
) -> Result<Vec<Vec<FieldElement>>, CmdError> {
    let results: Vec<Result<Vec<FieldElement>, agres::Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .iter()
            .map(|p| {
                s.spawn(move || {
                    let ctx = PointContext::new(divisors, p, ropts)?;
                    forms.iter().map(|w| ctx.residue(w)).collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(CmdError::from)
}

pub fn check_rectifying_cmd(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let theta = scn
        .theta
        .as_ref()
        .ok_or_else(|| CmdError::schema("check-rectifying needs a theta".into()))?;
    let scheme = intersection_scheme(&scn.divisors, &eff.iopts)?;
    let report = check_rectifying(theta, &scn.divisors, &scn.points, &scheme, &eff.ropts)?;
    let value = rectifier_value(&report);
    if report.overall == Verdict::NotRectifying {
        return Err(CmdError {
            exit: crate::report::EXIT_VERIFICATION,
            kind: "not-rectifying".into(),
            message: format!("{theta} is not rectifying for this scenario"),
        });
    }
    Ok(value)
}

pub fn synth_rectifier(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let scheme = intersection_scheme(&scn.divisors, &eff.iopts)?;
    let (theta, report) = construct_rectifier(&scn.divisors, &scn.points, &scheme, &eff.ropts)?;
    Ok(json!({
        "theta": theta.to_string(),
        "report": rectifier_value(&report),
    }))
}

pub fn build_functional(scn: &Scenario, _eff: &Effective) -> Result<Value, CmdError> {
    let code = functional_code(&scn.points, &scn.g)?;
    Ok(code_value(&code))
}

pub fn build_differential(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let (mode, code) = differential_by_mode(scn, eff)?;
    Ok(json!({ "mode": mode, "code": code_value(&code) }))
}

fn differential_by_mode(
    scn: &Scenario,
    eff: &Effective,
) -> Result<(&'static str, LinearCode), CmdError> {
    match &scn.theta {
        Some(theta) => {
            let code = differential_code_rectified(
                &scn.divisors,
                &scn.points,
                theta,
                &scn.g,
                &eff.iopts,
                &eff.ropts,
            )?;
            Ok(("rectified", code))
        }
        None => {
            let code = differential_code_plain(
                &scn.divisors,
                &scn.points,
                &scn.g,
                &eff.iopts,
                &eff.ropts,
            )?;
            Ok(("plain", code))
        }
    }
}

pub fn verify_duality(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let functional = functional_code(&scn.points, &scn.g)?;
    let (mode, differential) = differential_by_mode(scn, eff)?;
    let orthogonal = functional.dual().contains(&differential)?;
    let value = json!({
        "mode": mode,
        "functional": code_value(&functional),
        "differential": code_value(&differential),
        "orthogonal": orthogonal,
    });
    if !orthogonal {
        return Err(CmdError {
            exit: crate::report::EXIT_VERIFICATION,
            kind: "duality-failed".into(),
            message: format!(
                "{mode} differential code is not contained in the dual of the functional code"
            ),
        });
    }
    Ok(value)
}

pub fn verify_residue_theorem_cmd(scn: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let h = omega_bound(scn)?;
    let forms = omega_space_basis(&scn.variety, &h)?;
    if forms.is_empty() {
        return Err(CmdError::precondition(
            "empty-form-space",
            "the scenario's form space is zero-dimensional".into(),
        ));
    }
    let mut per_form = vec![];
    let mut all_hold = true;
    for w in &forms {
        let report = verify_residue_theorem(&scn.divisors, w, &eff.iopts, &eff.ropts)?;
        all_hold &= report.holds();
        per_form.push(json!({
            "form": w.to_string(),
            "orbit_traces": report
                .orbit_traces
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>(),
            "total": report.total.to_string(),
            "holds": report.holds(),
        }));
    }
    if !all_hold {
        return Err(CmdError::verification(
            "a form's residues do not sum to zero".into(),
        ));
    }
    Ok(json!({ "forms": per_form, "holds": true }))
}

pub fn round_trip(scn: &Scenario, eff: &Effective, trials: usize) -> Result<Value, CmdError> {
    match &scn.theta {
        Some(theta) => {
            let out = strict_differential_as_functional(
                &scn.divisors,
                &scn.points,
                theta,
                &scn.g,
                &eff.iopts,
                &eff.ropts,
            )?;
            let value = json!({
                "mode": "strict-differential-as-functional",
                "eta": out.eta.to_string(),
                "g_prime": out.g_prime.to_string(),
                "differential": code_value(&out.differential),
                "functional": code_value(&out.functional),
                "equal": out.equal,
            });
            if !out.equal {
                return Err(CmdError::verification(
                    "differential and functional presentations differ".into(),
                ));
            }
            Ok(value)
        }
        None => {
            let degrees: Vec<Vec<u32>> = scn
                .divisors
                .iter()
                .map(|d| d.multidegree().iter().map(|&x| x.max(0) as u32).collect())
                .collect();
            let rep = functional_as_strict_differential(
                &scn.points,
                &scn.g,
                &degrees,
                trials,
                eff.seed,
                &eff.iopts,
                &eff.ropts,
            )?;
            Ok(json!({
                "mode": "functional-as-strict-differential",
                "divisors": rep.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "theta": rep.theta.to_string(),
                "eta": rep.eta.to_string(),
                "g_omega": rep.g_omega.to_string(),
                "trials_used": rep.trials_used,
                "functional": code_value(&rep.functional),
                "differential": code_value(&rep.differential),
                "equal": true,
            }))
        }
    }
}

pub fn product_check(x: &Scenario, y: &Scenario, eff: &Effective) -> Result<Value, CmdError> {
    let sx = CodeScenario::new(
        x.divisors.clone(),
        x.points.clone(),
        x.g.clone(),
        x.theta.clone(),
        &eff.iopts,
    )?;
    let sy = CodeScenario::new(
        y.divisors.clone(),
        y.points.clone(),
        y.g.clone(),
        y.theta.clone(),
        &eff.iopts,
    )?;
    let report = product_code_check(&sx, &sy, &eff.iopts, &eff.ropts)?;
    let (vx, vy) = report.factor_verdicts;
    // the product of rectifying functions must rectify the product, and
    // strictly so when both factors are strict
    let rectifies_ok = if vx == Verdict::NotRectifying || vy == Verdict::NotRectifying {
        true
    } else if vx == Verdict::StrictlyRectifying && vy == Verdict::StrictlyRectifying {
        report.mu_verdict == Verdict::StrictlyRectifying
    } else {
        report.mu_verdict != Verdict::NotRectifying
    };
    let ok = rectifies_ok && report.residues_multiplicative && report.kronecker_equal;
    let value = json!({
        "factor_verdicts": [vx.to_string(), vy.to_string()],
        "mu_verdict": report.mu_verdict.to_string(),
        "product_rectifies": rectifies_ok,
        "residues_multiplicative": report.residues_multiplicative,
        "kronecker_equal": report.kronecker_equal,
        "ok": ok,
    });
    if !ok {
        return Err(CmdError::verification(
            "a product compatibility check failed".into(),
        ));
    }
    Ok(value)
}

/// Dispatch used by both `main` and `verify-all` replays.
pub fn run_scenario_command(
    name: &str,
    scn: &Scenario,
    flags: &GlobalFlags,
) -> Result<Value, CmdError> {
    let eff = effective(scn, flags);
    match name {
        "intersect" => intersect(scn, &eff),
        "residue" => residue(scn, &eff),
        "check-rectifying" => check_rectifying_cmd(scn, &eff),
        "synth-rectifier" => synth_rectifier(scn, &eff),
        "build-functional" => build_functional(scn, &eff),
        "build-differential" => build_differential(scn, &eff),
        "verify-duality" => verify_duality(scn, &eff),
        "verify-residue-theorem" => verify_residue_theorem_cmd(scn, &eff),
        "round-trip" => round_trip(scn, &eff, 64),
        "product-check" => product_check(scn, scn, &eff),
        other => Err(CmdError::schema(format!("unknown command {other:?}"))),
    }
}
