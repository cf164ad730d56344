//! JSON input formats and the bundled fixture files.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use stateop_core::commutative::{BlockPartition, FiniteProbSpace, FuzzyEventVector, Matrix, StochasticIdempotent};
use stateop_core::effect::FiniteEffectAlgebra;
use stateop_core::jc::{CMatrix, HermitianMap, Pvm, RMatrix, Tolerances, C};
use stateop_core::mv::MvAlgebra;
use stateop_core::rational::{q, Q};
use stateop_core::state_ops::ElementMap;

/// Structural problem with an input file.
#[derive(Debug, thiserror::Error)]
#[error("{source_name}: {message}")]
pub struct InputError {
    pub source_name: String,
    pub message: String,
}

impl InputError {
    pub fn new(source_name: impl Into<String>, message: impl ToString) -> Self {
        Self {
            source_name: source_name.into(),
            message: message.to_string(),
        }
    }
}

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name)))),*]
    };
}

/// Files shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = bundle![
    "averaging3.map.json",
    "block3.pvm.json",
    "blocks4.stochastic.json",
    "chain2.json",
    "chain3.json",
    "collapse2.stochastic.json",
    "corner2.map.json",
    "counterexample3.stochastic.json",
    "diamond.json",
    "diamond_collapse.tau.json",
    "diamond_swap.tau.json",
    "effect2.json",
    "effect2_phase.json",
    "event4.json",
    "event5.json",
    "identity3.stochastic.json",
    "luk3.json",
    "luk3x3.json",
    "luk3x3_diagonal.tau.json",
    "mixed5.prob.json",
    "mo2.json",
    "null4.prob.json",
    "pinching2.map.json",
    "pinching2.pvm.json",
    "uniform4.prob.json",
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// A parsed JSON document with the name used in diagnostics.
pub struct Source {
    pub name: String,
    pub value: Value,
}

impl Source {
    /// Reads `path`, falling back to a bundled file of the same name.
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let name = path.display().to_string();
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) => match path.to_str().and_then(bundled) {
                Some(text) => text.to_owned(),
                None => return Err(InputError::new(name, format!("cannot read file: {err}"))),
            },
        };
        Self::parse(name, &text)
    }

    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, InputError> {
        let name = name.into();
        let value = serde_json::from_str(text).map_err(|e| InputError::new(&name, format!("invalid JSON: {e}")))?;
        Ok(Self { name, value })
    }

    fn error(&self, message: impl ToString) -> InputError {
        InputError::new(&self.name, message)
    }

    fn decode<T: for<'de> Deserialize<'de>>(&self, value: &Value) -> Result<T, InputError> {
        T::deserialize(value).map_err(|e| self.error(e))
    }

    fn field<'a>(&'a self, key: &str) -> Option<&'a Value> {
        self.value.as_object().and_then(|o| o.get(key))
    }
}

/// Effect-algebra table or MV-algebra tables.
pub enum AlgebraInput {
    Effect(FiniteEffectAlgebra),
    Mv(MvAlgebra),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EffectJson {
    n: usize,
    zero: usize,
    one: usize,
    sum: Vec<Vec<Option<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MvJson {
    n: usize,
    zero: usize,
    boxplus: Vec<Vec<usize>>,
    neg: Vec<usize>,
}

fn check_n(source: &Source, n: usize, rows: usize) -> Result<(), InputError> {
    if n != rows {
        return Err(source.error(format!("\"n\" is {n} but the table has {rows} rows")));
    }
    Ok(())
}

pub fn algebra(source: &Source) -> Result<AlgebraInput, InputError> {
    if source.field("sum").is_some() {
        let json: EffectJson = source.decode(&source.value)?;
        check_n(source, json.n, json.sum.len())?;
        FiniteEffectAlgebra::from_rows(json.zero, json.one, json.sum)
            .map(AlgebraInput::Effect)
            .map_err(|e| source.error(e))
    } else if source.field("boxplus").is_some() {
        let json: MvJson = source.decode(&source.value)?;
        check_n(source, json.n, json.neg.len())?;
        MvAlgebra::from_tables(json.zero, json.boxplus, json.neg)
            .map(AlgebraInput::Mv)
            .map_err(|e| source.error(e))
    } else {
        Err(source.error("expected an effect algebra {n, zero, one, sum} or an MV-algebra {n, zero, boxplus, neg}"))
    }
}

pub fn tau(source: &Source) -> Result<ElementMap, InputError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct TauJson {
        tau: Vec<usize>,
    }
    let json: TauJson = source.decode(&source.value)?;
    Ok(ElementMap(json.tau))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

fn square(source: &Source, what: &str, rows: &[Vec<f64>], dim: usize) -> Result<(), InputError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(source.error(format!("{what} must be {dim} × {dim}")));
    }
    Ok(())
}

fn complex_matrix(source: &Source, value: &Value) -> Result<CMatrix, InputError> {
    let json: MatrixJson = source.decode(value)?;
    let d = json.dim;
    square(source, "\"re\"", &json.re, d)?;
    if let Some(im) = &json.im {
        square(source, "\"im\"", im, d)?;
    }
    Ok(CMatrix::from_fn(d, d, |i, j| {
        C::new(json.re[i][j], json.im.as_ref().map_or(0.0, |im| im[i][j]))
    }))
}

/// Hermitian matrix `{dim, re, im}`; the effect check happens downstream.
pub fn matrix(source: &Source) -> Result<CMatrix, InputError> {
    complex_matrix(source, &source.value)
}

pub fn pvm(source: &Source, tol: &Tolerances) -> Result<Pvm, InputError> {
    let items = match &source.value {
        Value::Array(items) => items,
        _ => return Err(source.error("a PVM is a list of matrices")),
    };
    let projections = items.iter().map(|v| complex_matrix(source, v)).collect::<Result<Vec<_>, _>>()?;
    if let Some(d) = projections.first().map(|p| p.nrows()) {
        if projections.iter().any(|p| p.nrows() != d) {
            return Err(source.error("projections have different dimensions"));
        }
    }
    Pvm::new(projections, tol).map_err(|e| source.error(e))
}

pub fn map(source: &Source) -> Result<HermitianMap, InputError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct MapJson {
        dim: usize,
        matrix: Vec<Vec<f64>>,
    }
    let json: MapJson = source.decode(&source.value)?;
    let n = json.dim * json.dim;
    square(source, "\"matrix\"", &json.matrix, n)?;
    HermitianMap::new(json.dim, RMatrix::from_fn(n, n, |i, j| json.matrix[i][j])).map_err(|e| source.error(e))
}

/// What a `--matrix` file holds, told apart by its shape.
pub enum MatrixInput {
    Hermitian(CMatrix),
    Map(HermitianMap),
    Stochastic(Matrix),
}

pub fn matrix_input(source: &Source) -> Result<MatrixInput, InputError> {
    if source.value.is_array() {
        return rational_matrix(source).map(MatrixInput::Stochastic);
    }
    if source.field("matrix").is_some() {
        return map(source).map(MatrixInput::Map);
    }
    matrix(source).map(MatrixInput::Hermitian)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalJson {
    Integer(i64),
    Float(f64),
    Text(String),
    Fraction { num: i64, den: i64 },
}

fn rational(source: &Source, value: &Value) -> Result<Q, InputError> {
    let bad = |what: &str| source.error(format!("{what} in {value}"));
    match source.decode::<RationalJson>(value)? {
        RationalJson::Integer(n) => Ok(q(n, 1)),
        RationalJson::Float(x) => stateop_core::rational::from_f64(x).ok_or_else(|| bad("non-finite number")),
        RationalJson::Fraction { den: 0, .. } => Err(bad("zero denominator")),
        RationalJson::Fraction { num, den } => Ok(q(num, den)),
        RationalJson::Text(text) => {
            let (num, den) = text.split_once('/').unwrap_or((&text, "1"));
            match (num.trim().parse::<i64>(), den.trim().parse::<i64>()) {
                (Ok(_), Ok(0)) => Err(bad("zero denominator")),
                (Ok(n), Ok(d)) => Ok(q(n, d)),
                _ => Err(bad("unparsable rational")),
            }
        }
    }
}

fn rational_vector(source: &Source, value: &Value) -> Result<Vec<Q>, InputError> {
    match value {
        Value::Array(items) => items.iter().map(|v| rational(source, v)).collect(),
        _ => Err(source.error("expected a list of rationals")),
    }
}

pub fn rational_matrix(source: &Source) -> Result<Matrix, InputError> {
    match &source.value {
        Value::Array(rows) => rows.iter().map(|r| rational_vector(source, r)).collect(),
        _ => Err(source.error("expected a matrix as nested lists")),
    }
}

pub fn stochastic(source: &Source) -> Result<StochasticIdempotent, InputError> {
    let rows = rational_matrix(source)?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(source.error("stochastic matrix must be square"));
    }
    StochasticIdempotent::new(rows).map_err(|e| match e {
        stateop_core::commutative::CommutativeError::InvalidStochastic(report) => {
            source.error(format!("not an idempotent stochastic matrix: {:?}", report.violations))
        }
        other => source.error(other),
    })
}

pub type Blocks = Vec<Vec<usize>>;

/// `{"P": [...], "blocks": [...]}` or a bare list of weights.
pub fn probability(source: &Source) -> Result<(FiniteProbSpace, Option<Blocks>), InputError> {
    let (weights, blocks) = match &source.value {
        Value::Array(_) => (&source.value, None),
        Value::Object(o) => {
            if let Some(key) = o.keys().find(|k| *k != "P" && *k != "blocks") {
                return Err(source.error(format!("unknown field \"{key}\"")));
            }
            let weights = o.get("P").ok_or_else(|| source.error("missing field \"P\""))?;
            (weights, o.get("blocks"))
        }
        _ => return Err(source.error("expected {\"P\": [...]} or a list of weights")),
    };
    let space = FiniteProbSpace::new(rational_vector(source, weights)?).map_err(|e| source.error(e))?;
    let blocks = blocks.map(|b| source.decode(b)).transpose()?;
    Ok((space, blocks))
}

/// `{"blocks": [...]}` or a bare list of blocks.
pub fn blocks(source: &Source) -> Result<Vec<Vec<usize>>, InputError> {
    match source.field("blocks") {
        Some(b) => source.decode(b),
        None => source.decode(&source.value),
    }
}

pub fn partition(source_name: &str, n: usize, blocks: Vec<Vec<usize>>) -> Result<BlockPartition, InputError> {
    BlockPartition::new(n, blocks).map_err(|e| InputError::new(source_name, e))
}

pub fn event(source: &Source) -> Result<FuzzyEventVector, InputError> {
    FuzzyEventVector::new(rational_vector(source, &source.value)?).map_err(|e| source.error(e))
}

