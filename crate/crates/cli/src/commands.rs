use std::fmt::Write as _;

use afftool_core::centralizer::{centralizer_verdict, commutant_basis, jordan_blocks};
use afftool_core::descriptor::SystemDescriptor;
use afftool_core::forge::{
    build_witness, commutes_exactly, rationalize_base, CaseChoice, SmoothMapExpr, Witness,
};
use afftool_core::json as ejson;
use afftool_core::nilpotent::{
    central_series_tower, is_k_nilmanifold, jacobi_check, upper_central_series, AlgebraAutomorphism,
};
use afftool_core::spectral::{classify, witness_height_bound, HierarchyTag};
use afftool_core::structure::{base_period, base_period_bound, split_cyclotomic_base, BasePeriod};
use afftool_core::verify::{
    affine_evaluator, commutation_residual, ergodicity_oracle, GridSpec, OracleOutcome,
    PASS_THRESHOLD,
};
use afftool_core::{Error, Rat, RatMatrix};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// A command's output: the JSON body and a short human summary.
pub struct Report {
    pub body: Map<String, Value>,
    pub text: String,
}

impl Report {
    fn new() -> Self {
        Report {
            body: Map::new(),
            text: String::new(),
        }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.body.insert(key.into(), v);
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.text, "{}", s.as_ref());
    }
}

pub fn classify_cmd(desc: &SystemDescriptor, height: Option<u64>) -> CliResult<Report> {
    let f = &desc.map;
    let v = classify(f)?;
    let cz = centralizer_verdict(f)?;
    let mut r = Report::new();
    r.line(format!("tag: {}", v.tag));
    r.line(format!("narrative: {}", cz.narrative));
    r.line(format!("lie bound: {}", cz.lie_bound));
    if let Some(w) = &v.witness {
        r.line(format!("non-ergodicity witness: k = {:?}, period {}", ints(&w.k), w.q));
    }
    r.put("classification", v.to_json());
    r.put("centralizer", cz.to_json());
    if let Some(h) = height {
        let o = ergodicity_oracle(f, h);
        let agrees = o.is_ergodic() == v.tag.is_ergodic();
        let bound = witness_height_bound(f, 1)?;
        let conclusive = bound <= afftool_core::Int::from(h);
        r.line(format!(
            "oracle (height {h}): {}; {}",
            if o.is_ergodic() { "none found" } else { "non-ergodic character found" },
            if agrees { "agrees" } else if conclusive { "DISAGREES" } else { "inconclusive below the witness height" }
        ));
        let found = match &o {
            OracleOutcome::NonErgodicFound { k, period } => json!({"k": ejson::int_vec(k), "period": period}),
            OracleOutcome::NoneUpToHeight(_) => Value::Null,
        };
        r.put(
            "oracle",
            json!({"height": h, "ergodic": o.is_ergodic(), "found": found, "agrees": agrees, "witness_height": ejson::int(&bound)}),
        );
    }
    Ok(r)
}

fn ints(v: &[afftool_core::Int]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn structure_cmd(desc: &SystemDescriptor) -> CliResult<Report> {
    let fib = split_cyclotomic_base(&desc.map)?;
    let period = base_period(&fib);
    let mut r = Report::new();
    r.line(format!("base dimension: {}, fiber dimension: {}", fib.base_dim, fib.fiber_dim));
    r.line(format!("base conductor: {}", fib.base_conductor));
    r.line(format!(
        "base period: {}",
        match period {
            BasePeriod::Periodic(d) => d.to_string(),
            BasePeriod::NotPeriodic => "not periodic".into(),
        }
    ));
    r.line(format!("fibration: {fib}"));
    r.put("fibration", fib.to_json());
    r.put(
        "base_period",
        match period {
            BasePeriod::Periodic(d) => json!(d),
            BasePeriod::NotPeriodic => Value::Null,
        },
    );
    r.put("base_period_bound", json!(base_period_bound(&fib)));
    Ok(r)
}

pub fn centralizer_cmd(desc: &SystemDescriptor) -> CliResult<Report> {
    let f = &desc.map;
    let cz = centralizer_verdict(f)?;
    let basis = commutant_basis(f.linear())?;
    let blocks = jordan_blocks(f.linear())?;
    let mut r = Report::new();
    r.line(format!("tag: {}, narrative: {}", cz.tag, cz.narrative));
    r.line(format!("commutant dimension: {}", basis.len()));
    r.line(format!("lie bound: {}", cz.lie_bound));
    r.line(format!(
        "translation centralizer: rank {}, finite part of order {}",
        cz.translations.kernel.rank(),
        cz.translations.finite_order()
    ));
    for n in &cz.notes {
        r.line(format!("note: {n}"));
    }
    r.put("centralizer", cz.to_json());
    r.put(
        "commutant_basis",
        Value::Array(basis.iter().map(ejson::rat_matrix).collect()),
    );
    r.put("jordan_blocks", Value::Array(blocks.iter().map(|b| b.to_json()).collect()));
    Ok(r)
}

pub fn parse_case(s: &str) -> Result<CaseChoice, String> {
    match s {
        "auto" => Ok(CaseChoice::Auto),
        "1" => Ok(CaseChoice::One),
        "2" => Ok(CaseChoice::Two),
        other => Err(format!("expected auto, 1 or 2, got {other:?}")),
    }
}

pub fn parse_epsilon(s: &str) -> Result<Rat, String> {
    if let Ok(r) = ejson::parse_rat_str(s) {
        return Ok(r);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    Rat::from_float(x).ok_or_else(|| format!("not finite: {s:?}"))
}

pub fn perturb_cmd(
    desc: &SystemDescriptor,
    eps: &Rat,
    case: CaseChoice,
    grid: &GridSpec,
) -> CliResult<Report> {
    let f = &desc.map;
    let v = classify(f)?;
    if v.tag == HierarchyTag::K {
        return Err(Error::Precondition(
            "the map is K, hence stably ergodic: no translational perturbation has a non-Lie centralizer"
                .into(),
        )
        .into());
    }
    let fib = split_cyclotomic_base(f)?;
    let p = rationalize_base(f, &fib, eps)?;
    let w = build_witness(&p, case)?;
    let member = w.sample_member()?;
    let exact = commutes_exactly(&p.perturbed, &member)?;
    let num = member.numeric(p.perturbed.context())?;
    let res = commutation_residual(affine_evaluator(&p.perturbed)?, |x| num.eval(x), grid);
    let mut r = Report::new();
    r.line(format!("tag: {}", v.tag));
    r.line(format!("perturbation size bound: {}", p.size));
    r.line(format!("case {}: base period {}", w.case(), w.base_period()));
    r.line(format!("witness: {member}"));
    r.line(format!("commutes exactly: {exact}"));
    r.line(format!(
        "residual {:.3e} on {} points: {}",
        res.max,
        res.points,
        if res.passes(PASS_THRESHOLD) { "pass" } else { "FAIL" }
    ));
    r.put("classification", v.to_json());
    r.put("perturbation", p.to_json());
    r.put(
        "perturbed_descriptor",
        SystemDescriptor::from_map(p.perturbed.clone()).to_json(),
    );
    r.put("case", json!(w.case()));
    let mut wd = w.to_json();
    if let Witness::Case2(c2) = &w {
        let ok = c2.product_is_exact()?;
        r.line(format!("product trivialization exact: {ok}"));
        wd["product_form"] = afftool_core::forge::SmoothMap::from_affine(&c2.product_form()?).to_json();
        wd["product_is_exact"] = json!(ok);
    }
    r.put("witness_data", wd);
    r.put(
        "witnesses",
        json!([{
            "expression": SmoothMapExpr::Map(member.clone()).to_json(),
            "display": member.to_string(),
            "commutes_exactly": exact,
            "residual": res.to_json(PASS_THRESHOLD),
        }]),
    );
    Ok(r)
}

/// Accepts a bare expression or a perturb report (first witness).
pub fn parse_witness(v: &Value) -> CliResult<SmoothMapExpr> {
    if v.get("kind").is_some() {
        return Ok(SmoothMapExpr::from_json(v)?);
    }
    let e = v
        .get("witnesses")
        .and_then(|w| w.get(0))
        .and_then(|w| w.get("expression"))
        .ok_or_else(|| {
            CliError::Schema("witness file is neither an expression nor a perturb report".into())
        })?;
    Ok(SmoothMapExpr::from_json(e)?)
}

pub fn verify_cmd(desc: &SystemDescriptor, witness: &SmoothMapExpr, grid: &GridSpec) -> CliResult<Report> {
    let f = &desc.map;
    if witness.dim() != f.dim() {
        return Err(CliError::Schema(format!(
            "witness acts on T^{} but the map on T^{}",
            witness.dim(),
            f.dim()
        )));
    }
    let fx = affine_evaluator(f)?;
    let g = witness.numeric(f.context())?;
    let res = commutation_residual(fx, |x| g.eval(x), grid);
    let exact = match witness.simplify() {
        SmoothMapExpr::Map(m) => commutes_exactly(f, &m).ok(),
        SmoothMapExpr::Compose(_) => None,
    };
    let pass = res.passes(PASS_THRESHOLD);
    let mut r = Report::new();
    r.line(format!(
        "residual {:.3e} on {} points (threshold {PASS_THRESHOLD:e}): {}",
        res.max,
        res.points,
        if pass { "pass" } else { "FAIL" }
    ));
    if let Some(e) = exact {
        r.line(format!("commutes exactly: {e}"));
    }
    r.put("residual", res.to_json(PASS_THRESHOLD));
    r.put("pass", json!(pass));
    r.put("commutes_exactly", json!(exact));
    Ok(r)
}

pub fn nil_cmd(desc: &SystemDescriptor, automorphism: Option<RatMatrix>) -> CliResult<Report> {
    let alg = desc
        .lie_algebra
        .as_ref()
        .ok_or_else(|| CliError::Schema("descriptor has no \"lie_algebra\"".into()))?;
    if let Some((i, j, k)) = jacobi_check(alg).counterexample {
        return Err(Error::JacobiFailure(i, j, k).into());
    }
    let series = upper_central_series(alg)?;
    let m = automorphism.unwrap_or_else(|| desc.lie_automorphism());
    let da = AlgebraAutomorphism::new(alg, m).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Precondition(msg),
        other => other,
    })?;
    let verdict = is_k_nilmanifold(alg, &da)?;
    let tower = central_series_tower(alg)?;
    let mut r = Report::new();
    r.line(format!("dimension {}, nilpotency step {}", alg.dim(), series.len() - 1));
    r.line(format!(
        "upper central series dimensions: {:?}",
        series.iter().map(|s| s.dim()).collect::<Vec<_>>()
    ));
    r.line(format!("hull dimension: {}", verdict.hull.dim()));
    r.line(format!("generated subalgebra dimension: {}", verdict.ideal.subalgebra.dim()));
    r.line(format!("K: {}", verdict.is_k));
    r.put("lie_algebra", alg.to_json());
    r.put("step", json!(series.len() - 1));
    r.put(
        "upper_central_series",
        Value::Array(series.iter().map(|s| s.to_json()).collect()),
    );
    r.put("automorphism", ejson::rat_matrix(da.matrix()));
    r.put("k_test", verdict.to_json());
    r.put("tower", tower.to_json());
    Ok(r)
}
