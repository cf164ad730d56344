//! Subcommands and their reports.

use std::path::PathBuf;

use serde_json::{json, Value};
use stateop_core::commutative::{
    self, check_mv_conditional_expectation, is_ce_commutative, is_strong_commutative, jordan_support_characterization,
    kernel_ideals, mv_ce_from_strong_operator, mv_conditional_expectation, quotient_strong_operator, BlockPartition,
    FiniteProbSpace, FuzzyEventVector, StochasticIdempotent,
};
use stateop_core::effect::{classify, validate_effect_algebra, EffectAlgebra};
use stateop_core::jc::{
    self, check_state_operator, compress, decompose, faithfulness_gap, is_conditional_expectation, is_faithful,
    is_jordan_state_operator, kadison_schwarz_check, luders_operator, support_projection, CMatrix, HermitianEffect,
    HermitianMap, Pvm, RMatrix, Tolerances,
};
use stateop_core::mv::{mv_to_effect_algebra, validate_mv};
use stateop_core::rational::{q, Q};
use stateop_core::state_ops::{
    enumerate_state_operators, quotient_state_operator, validate_state_operator, Consequence, StateOperatorReport,
};

use crate::input::{self, AlgebraInput, InputError, MatrixInput, Source};
use crate::report::{Format, Output, Report, Status, ToleranceReport};
use crate::suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Classify,
    Enumerate,
    CheckTau,
    Quotient,
    Luders,
    KsCheck,
    Decompose,
    Support,
    Strong,
    Ce,
    Mvce,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::Enumerate => "enumerate",
            Command::CheckTau => "check-tau",
            Command::Quotient => "quotient",
            Command::Luders => "luders",
            Command::KsCheck => "ks-check",
            Command::Decompose => "decompose",
            Command::Support => "support",
            Command::Strong => "strong",
            Command::Ce => "ce",
            Command::Mvce => "mvce",
            Command::Suite => "suite",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub algebra: Option<PathBuf>,
    pub tau: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub pvm: Option<PathBuf>,
    pub effect: Option<PathBuf>,
    pub prob: Option<PathBuf>,
    pub blocks: Option<PathBuf>,
    pub event: Option<PathBuf>,
    pub bound: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            algebra: None,
            tau: None,
            matrix: None,
            pvm: None,
            effect: None,
            prob: None,
            blocks: None,
            event: None,
            bound: stateop_core::state_ops::DEFAULT_ENUMERATION_BOUND,
            tolerances: Tolerances::default(),
            seed: 0,
            format: Format::Json,
        }
    }

    fn source(&self, flag: &str, path: &Option<PathBuf>) -> Result<Source, InputError> {
        let path = path
            .as_ref()
            .ok_or_else(|| InputError::new(self.command.name(), format!("--{flag} is required")))?;
        Source::load(path)
    }
}

pub fn run(config: &RunConfig) -> Result<Output, InputError> {
    let single = |(status, result): (Status, Value)| {
        Output::Single(Report {
            command: config.command.name().to_owned(),
            status,
            seed: config.seed,
            tolerances: ToleranceReport::from(&config.tolerances),
            result,
        })
    };
    Ok(match config.command {
        Command::Validate => single(validate(config)?),
        Command::Classify => single(classify_cmd(config)?),
        Command::Enumerate => single(enumerate(config)?),
        Command::CheckTau => single(check_tau(config)?),
        Command::Quotient => single(quotient(config)?),
        Command::Luders => single(luders(config)?),
        Command::KsCheck => single(ks_check(config)?),
        Command::Decompose => single(decompose_cmd(config)?),
        Command::Support => single(support(config)?),
        Command::Strong => single(strong(config)?),
        Command::Ce => single(ce(config)?),
        Command::Mvce => single(mvce(config)?),
        Command::Suite => Output::Suite(suite::run(config.seed, &config.tolerances)),
    })
}

type Outcome = Result<(Status, Value), InputError>;

pub fn q_json(x: &Q) -> Value {
    Value::String(x.to_string())
}

pub fn qs_json(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(q_json).collect())
}

pub fn cmatrix_json(m: &CMatrix) -> Value {
    let part = |f: fn(&jc::C) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    json!({"dim": m.nrows(), "re": part(|z| z.re), "im": part(|z| z.im)})
}

pub fn rmatrix_json(m: &RMatrix) -> Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn map_json(m: &HermitianMap) -> Value {
    json!({"dim": m.dim(), "matrix": rmatrix_json(m.matrix())})
}

fn valid_algebra(config: &RunConfig) -> Result<EffectAlgebra, InputError> {
    let source = config.source("algebra", &config.algebra)?;
    match input::algebra(&source)? {
        AlgebraInput::Effect(table) => EffectAlgebra::new(table).map_err(|e| {
            InputError::new(&source.name, format!("not an effect algebra ({} axiom violations)", e.0.violations.len()))
        }),
        AlgebraInput::Mv(m) => {
            let report = validate_mv(&m);
            if !report.is_valid() {
                return Err(InputError::new(
                    &source.name,
                    format!("not an MV-algebra ({} identity violations)", report.violations.len()),
                ));
            }
            mv_to_effect_algebra(&m).map_err(|e| InputError::new(&source.name, e))
        }
    }
}

fn validate(config: &RunConfig) -> Outcome {
    let source = config.source("algebra", &config.algebra)?;
    Ok(match input::algebra(&source)? {
        AlgebraInput::Effect(table) => {
            let report = validate_effect_algebra(&table);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| json!({"axiom": v.axiom.name(), "witness": v.witness}))
                .collect();
            (
                Status::from_bool(report.is_valid()),
                json!({"kind": "effect", "n": table.len(), "valid": report.is_valid(), "violations": violations}),
            )
        }
        AlgebraInput::Mv(m) => {
            let report = validate_mv(&m);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| json!({"axiom": v.identity.name(), "witness": v.witness}))
                .collect();
            let translated = report.is_valid().then(|| mv_to_effect_algebra(&m).is_ok());
            let valid = report.is_valid() && translated == Some(true);
            (
                Status::from_bool(valid),
                json!({
                    "kind": "mv",
                    "n": m.len(),
                    "valid": valid,
                    "violations": violations,
                    "effect_algebra_valid": translated,
                }),
            )
        }
    })
}

fn classify_cmd(config: &RunConfig) -> Outcome {
    let algebra = valid_algebra(config)?;
    let c = classify(&algebra);
    Ok((
        Status::Pass,
        json!({
            "n": algebra.len(),
            "lattice": c.is_lattice,
            "orthomodular": c.is_oml,
            "mv_effect_algebra": c.is_mv_effect_algebra,
        }),
    ))
}

fn consequence_name(c: Consequence) -> &'static str {
    match c {
        Consequence::Zero => "zero",
        Consequence::Orthosupplement => "orthosupplement",
        Consequence::Monotone => "monotone",
        Consequence::Bounds => "bounds",
        Consequence::RangeSubalgebra => "range_subalgebra",
    }
}

pub fn operator_report_json(report: &StateOperatorReport) -> Value {
    json!({
        "is_state_operator": report.is_state_operator,
        "violated": report.violated.iter().map(|v| json!({"axiom": v.clause.name(), "witness": v.witness})).collect::<Vec<_>>(),
        "consequences": report
            .consequences
            .iter()
            .map(|v| json!({"clause": consequence_name(v.clause), "witness": v.witness}))
            .collect::<Vec<_>>(),
        "is_strong": report.is_strong,
        "strong_witness": report.strong_witness,
        "is_faithful": report.is_faithful,
        "kernel": report.kernel,
    })
}

fn enumerate(config: &RunConfig) -> Outcome {
    let algebra = valid_algebra(config)?;
    let operators = enumerate_state_operators(&algebra, config.bound)
        .map_err(|e| InputError::new(config.command.name(), e))?;
    let listed: Vec<Value> = operators
        .iter()
        .map(|tau| {
            let report = validate_state_operator(&algebra, tau);
            json!({
                "tau": tau.images(),
                "strong": report.is_strong,
                "faithful": report.is_faithful,
                "kernel": report.kernel,
            })
        })
        .collect();
    Ok((Status::Pass, json!({"n": algebra.len(), "count": operators.len(), "operators": listed})))
}

fn check_tau(config: &RunConfig) -> Outcome {
    let algebra = valid_algebra(config)?;
    let tau = input::tau(&config.source("tau", &config.tau)?)?;
    let report = validate_state_operator(&algebra, &tau);
    Ok((Status::from_bool(report.is_state_operator), operator_report_json(&report)))
}

fn quotient(config: &RunConfig) -> Outcome {
    let algebra = valid_algebra(config)?;
    let tau = input::tau(&config.source("tau", &config.tau)?)?;
    Ok(match quotient_state_operator(&algebra, &tau) {
        Ok(out) => {
            let table = out.quotient.algebra.table();
            (
                Status::Pass,
                json!({
                    "classes": out.quotient.algebra.len(),
                    "class_of": out.quotient.class_of,
                    "representatives": out.quotient.representatives,
                    "quotient": {
                        "n": table.len(),
                        "zero": table.zero(),
                        "one": table.one(),
                        "sum": table.rows(),
                    },
                    "tau_hat": out.tau_hat.images(),
                    "tau_hat_report": operator_report_json(&out.report),
                }),
            )
        }
        Err(e) => (Status::Fail, json!({"error": e.to_string()})),
    })
}

fn jc_map(config: &RunConfig) -> Result<(HermitianMap, Option<Pvm>), InputError> {
    if config.pvm.is_some() {
        let pvm = input::pvm(&config.source("pvm", &config.pvm)?, &config.tolerances)?;
        return Ok((luders_operator(&pvm), Some(pvm)));
    }
    let source = config.source("matrix", &config.matrix)?;
    match input::matrix_input(&source)? {
        MatrixInput::Map(m) => Ok((m, None)),
        _ => Err(InputError::new(&source.name, "expected a map {dim, matrix} (or pass --pvm)")),
    }
}

fn effect(config: &RunConfig, dim: usize) -> Result<HermitianEffect, InputError> {
    let source = config.source("effect", &config.effect)?;
    let a = HermitianEffect::new(input::matrix(&source)?, &config.tolerances).map_err(|e| InputError::new(&source.name, e))?;
    if a.dim() != dim {
        return Err(InputError::new(&source.name, format!("effect has dimension {}, map has {dim}", a.dim())));
    }
    Ok(a)
}

fn state_operator_json(m: &HermitianMap, config: &RunConfig) -> (bool, Value) {
    let check = check_state_operator(m, &config.tolerances, config.seed);
    let value = json!({
        "state_operator": check.is_state_operator(),
        "unital_residual": check.unital_residual,
        "idempotence_residual": check.idempotence_residual,
        "positivity_min_eigenvalue": check.positivity.min_eigenvalue(),
        "positivity_method": match check.positivity {
            jc::Positivity::Choi { .. } => "choi",
            jc::Positivity::Sampled { .. } => "sampled",
        },
    });
    (check.is_state_operator(), value)
}

fn luders(config: &RunConfig) -> Outcome {
    let pvm = input::pvm(&config.source("pvm", &config.pvm)?, &config.tolerances)?;
    let tol = &config.tolerances;
    let m = luders_operator(&pvm);
    let (is_state, state) = state_operator_json(&m, config);
    let faithful = is_faithful(&m, tol);
    let ce = is_conditional_expectation(&m, tol, config.seed).map_err(|e| InputError::new("luders", e))?;
    let jordan = is_jordan_state_operator(&m, tol, config.seed).map_err(|e| InputError::new("luders", e))?;
    let mut result = json!({
        "dim": m.dim(),
        "blocks": pvm.projections().len(),
        "state_operator": state,
        "faithful": faithful,
        "faithfulness_gap": faithfulness_gap(&m),
        "conditional_expectation": ce.holds,
        "ce_closure_residual": ce.closure_residual,
        "ce_sampled_residual": ce.sampled_residual,
        "jordan": jordan.holds,
        "map": map_json(&m),
    });
    let mut ok = is_state && faithful && ce.holds;
    if config.effect.is_some() {
        let a = effect(config, m.dim())?;
        let image = m.apply(a.matrix());
        let commutes = pvm.commutant_defect(a.matrix()) <= tol.eps_eq.max(1e-8);
        let fixed = jc::distance(&image, a.matrix()) <= tol.eps_eq.max(1e-8);
        let image_defect = pvm.commutant_defect(&image);
        ok &= commutes == fixed && image_defect <= 1e-8;
        result["effect"] = json!({
            "image": cmatrix_json(&image),
            "commutes_with_pvm": commutes,
            "fixed": fixed,
            "image_commutant_defect": image_defect,
        });
    }
    Ok((Status::from_bool(ok), result))
}

fn ks_check(config: &RunConfig) -> Outcome {
    let (m, _) = jc_map(config)?;
    let a = effect(config, m.dim())?;
    let (is_state, state) = state_operator_json(&m, config);
    if !is_state {
        return Ok((Status::Fail, json!({"state_operator": state, "error": "map is not a state operator"})));
    }
    let gaps = kadison_schwarz_check(&m, &a).map_err(|e| InputError::new("ks-check", e))?;
    Ok((
        Status::from_bool(gaps.holds(&config.tolerances)),
        json!({
            "state_operator": state,
            "lhs_gap": gaps.lhs_gap,
            "rhs_gap": gaps.rhs_gap,
            "holds": gaps.holds(&config.tolerances),
        }),
    ))
}

fn decompose_cmd(config: &RunConfig) -> Outcome {
    let (m, _) = jc_map(config)?;
    Ok(match decompose(&m, &config.tolerances, config.seed) {
        Ok(dec) => (
            Status::Pass,
            json!({
                "support": cmatrix_json(&dec.support),
                "e_tau_dimension": dec.e_tau_basis.len(),
                "range_residual": dec.range_residual,
                "composition_residual": dec.composition_residual,
                "mu": map_json(&dec.mu),
                "phi": {"dim": dec.phi.basis.ncols(), "matrix": rmatrix_json(&dec.phi.matrix)},
            }),
        ),
        Err(e) => (Status::Fail, json!({"error": e.to_string()})),
    })
}

fn support(config: &RunConfig) -> Outcome {
    let (m, _) = jc_map(config)?;
    let tol = &config.tolerances;
    let s = match support_projection(&m, tol, config.seed) {
        Ok(s) => s,
        Err(e) => return Ok((Status::Fail, json!({"error": e.to_string()}))),
    };
    let compressed = compress(&m, &s.projection, tol, config.seed);
    let mut result = json!({
        "projection": cmatrix_json(&s.projection),
        "rank": s.rank,
        "certified_family": s.certified_family,
        "faithful": s.rank == m.dim(),
    });
    let ok = match compressed {
        Ok(c) => {
            let faithful = is_faithful(&c, tol);
            result["compressed"] = json!({"dim": c.dim(), "faithful": faithful, "map": map_json(&c)});
            faithful
        }
        Err(jc::JcError::NotSupport) if s.rank == m.dim() => true,
        Err(e) => {
            result["compressed"] = json!({"error": e.to_string()});
            false
        }
    };
    Ok((Status::from_bool(ok), result))
}

fn stochastic(config: &RunConfig) -> Result<StochasticIdempotent, InputError> {
    input::stochastic(&config.source("matrix", &config.matrix)?)
}

fn witness_json(w: &Option<(Vec<Q>, Vec<Q>)>) -> Value {
    w.as_ref().map_or(Value::Null, |(f, g)| json!({"f": qs_json(f), "g": qs_json(g)}))
}

fn inconsistent(e: commutative::CommutativeError) -> InputError {
    InputError::new("numerics", e)
}

fn commutative_facts(t: &StochasticIdempotent) -> Value {
    let kernel = kernel_ideals(t);
    let jordan = match jordan_support_characterization(t) {
        Ok(j) => json!({"jordan": true, "k": j.k, "extension_check": j.extension_check}),
        Err(commutative::CommutativeError::NotJordan(f)) => json!({"jordan": false, "witness": qs_json(&f)}),
        Err(e) => json!({"error": e.to_string()}),
    };
    json!({
        "n": t.len(),
        "classes": t.classes(),
        "k_support": kernel.k_support,
        "kernel_check": kernel.coordinate_check,
        "jordan_support": jordan,
    })
}

fn strong(config: &RunConfig) -> Outcome {
    let t = stochastic(config)?;
    let d = is_strong_commutative(&t, config.seed).map_err(inconsistent)?;
    Ok((
        Status::from_bool(d.holds),
        json!({"strong": d.holds, "witness": witness_json(&d.witness), "operator": commutative_facts(&t)}),
    ))
}

fn ce(config: &RunConfig) -> Outcome {
    if config.pvm.is_none() {
        let source = config.source("matrix", &config.matrix)?;
        if source.value.is_array() {
            let t = input::stochastic(&source)?;
            let d = is_ce_commutative(&t, config.seed).map_err(inconsistent)?;
            let s = is_strong_commutative(&t, config.seed).map_err(inconsistent)?;
            return Ok((
                Status::from_bool(d.holds),
                json!({
                    "model": "commutative",
                    "conditional_expectation": d.holds,
                    "witness": witness_json(&d.witness),
                    "strong": s.holds,
                    "operator": commutative_facts(&t),
                }),
            ));
        }
    }
    let (m, _) = jc_map(config)?;
    let (is_state, state) = state_operator_json(&m, config);
    if !is_state {
        return Ok((Status::Fail, json!({"state_operator": state, "error": "map is not a state operator"})));
    }
    let d = is_conditional_expectation(&m, &config.tolerances, config.seed).map_err(|e| InputError::new("ce", e))?;
    Ok((
        Status::from_bool(d.holds),
        json!({
            "model": "matrix",
            "conditional_expectation": d.holds,
            "witness": d.witness.as_ref().map(|(a, b)| json!({"a": cmatrix_json(a), "b": cmatrix_json(b)})),
            "closure_residual": d.closure_residual,
            "sampled_residual": d.sampled_residual,
        }),
    ))
}

fn space_and_partition(config: &RunConfig) -> Result<(FiniteProbSpace, BlockPartition), InputError> {
    let source = config.source("prob", &config.prob)?;
    let (space, embedded) = input::probability(&source)?;
    let (name, blocks) = match (&config.blocks, embedded) {
        (Some(_), _) => {
            let b = config.source("blocks", &config.blocks)?;
            (b.name.clone(), input::blocks(&b)?)
        }
        (None, Some(blocks)) => (source.name.clone(), blocks),
        (None, None) => return Err(InputError::new(&source.name, "no blocks given (use --blocks or a \"blocks\" field)")),
    };
    let partition = input::partition(&name, space.len(), blocks)?;
    Ok((space, partition))
}

fn event(config: &RunConfig, n: usize) -> Result<Option<FuzzyEventVector>, InputError> {
    if config.event.is_none() {
        return Ok(None);
    }
    let source = config.source("event", &config.event)?;
    let a = input::event(&source)?;
    if a.len() != n {
        return Err(InputError::new(&source.name, format!("event has length {}, expected {n}", a.len())));
    }
    Ok(Some(a))
}

/// Unit vectors, the constant `1/2` and an optional extra event.
fn test_family(n: usize, extra: Option<&FuzzyEventVector>) -> Vec<FuzzyEventVector> {
    let mut family: Vec<FuzzyEventVector> = (0..n).map(|x| FuzzyEventVector::indicator(n, &[x])).collect();
    family.push(FuzzyEventVector::constant(n, q(1, 2)));
    family.extend(extra.cloned());
    family
}

fn mvce(config: &RunConfig) -> Outcome {
    if config.matrix.is_some() {
        let t = stochastic(config)?;
        let (s, _) = input::probability(&config.source("prob", &config.prob)?)?;
        let a = event(config, t.len())?;
        return Ok(match mv_ce_from_strong_operator(&t, &s, &test_family(t.len(), a.as_ref())) {
            Ok(r) => (
                Status::from_bool(r.identity_holds),
                json!({
                    "mu": qs_json(&r.mu),
                    "crisp_checked": r.crisp_checked,
                    "functions_checked": r.functions_checked,
                    "identity_holds": r.identity_holds,
                }),
            ),
            Err(commutative::CommutativeError::NotStrong(w)) => {
                (Status::Fail, json!({"error": "operator is not strong", "witness": witness_json(&Some(w))}))
            }
            Err(e) => return Err(InputError::new("mvce", e)),
        });
    }
    let (space, partition) = space_and_partition(config)?;
    let n = space.len();
    let a = event(config, n)?;
    let mut ok = true;
    let mut result = json!({"n": n, "blocks": partition.blocks()});
    if let Some(a) = &a {
        let out = mv_conditional_expectation(&space, &partition, a).map_err(|e| InputError::new("mvce", e))?;
        let k = check_mv_conditional_expectation(&space, &partition, a, &a.neg()).map_err(|e| InputError::new("mvce", e))?;
        ok &= k.holds();
        result["conditional_expectation"] = json!({
            "event": qs_json(a.values()),
            "value": qs_json(out.values()),
            "integral_identity": k.integral_identity,
            "zero_one": k.zero_one,
            "additive": k.additive,
            "unit_interval": k.unit_interval,
            "monotone_chain": k.monotone_chain,
            "crisp_sets_checked": k.crisp_sets_checked,
        });
    }
    let quotient = quotient_strong_operator(&space, &partition).map_err(|e| InputError::new("mvce", e))?;
    let weights: Vec<Q> = quotient.points.iter().map(|&x| space.weights()[x].clone()).collect();
    let restricted = FiniteProbSpace::new(weights).map_err(|e| InputError::new("mvce", e))?;
    let restricted_event = a.as_ref().map(|a| {
        FuzzyEventVector::new(quotient.points.iter().map(|&x| a.values()[x].clone()).collect()).expect("values in [0, 1]")
    });
    let m = quotient.points.len();
    let ce = mv_ce_from_strong_operator(&quotient.t, &restricted, &test_family(m, restricted_event.as_ref()))
        .map_err(|e| InputError::new("mvce", e))?;
    ok &= quotient.strong && quotient.range_is_block_constants && quotient.null_points_ignored && ce.identity_holds;
    result["quotient"] = json!({
        "points": quotient.points,
        "blocks": quotient.blocks,
        "t": quotient.t.rows().iter().map(|r| qs_json(r)).collect::<Vec<_>>(),
        "strong": quotient.strong,
        "range_is_block_constants": quotient.range_is_block_constants,
        "null_points_ignored": quotient.null_points_ignored,
        "identity_holds": ce.identity_holds,
        "crisp_checked": ce.crisp_checked,
    });
    Ok((Status::from_bool(ok), result))
}
