//! JSON operator files.
//!
//! ```json
//! {"field": "F5", "domain": "N", "kind": "generator", "name": "left_shift"}
//! {"field": "Q", "kind": "matrix", "rows": [["0", "1"], ["0", "0"]]}
//! {"field": "Q", "domain": "N", "kind": "columns", "map": {"0": {"1": "1"}}}
//! ```
//!
//! Scalars are strings (`"-2/5"`); integer literals are accepted on input.
//! `field` defaults to `Q`; `kind` defaults to `matrix` when `rows` is
//! present. Finite domains other than a matrix's need `"dim"`. Nested
//! operators (`default`, `outer`/`inner`, `terms`) inherit field and domain.

use std::path::Path;

use serde_json::{json, Map, Value};
use triax::exactfield::{FieldSpec, Poly, Scalar};
use triax::linspace::{Domain, Matrix, SparseVec};
use triax::operators::{GeneratorRule, Operator, OperatorView};

use crate::CliError;

type Obj = Map<String, Value>;

struct Ctx<'a> {
    source: &'a str,
    path: String,
}

impl Ctx<'_> {
    fn at(&self, key: &str) -> Ctx<'_> {
        Ctx {
            source: self.source,
            path: format!("{}/{}", self.path, key),
        }
    }

    fn invalid(&self, message: impl Into<String>) -> CliError {
        CliError::Invalid {
            input: self.source.to_string(),
            pointer: if self.path.is_empty() { "/".into() } else { self.path.clone() },
            message: message.into(),
        }
    }

    fn core(&self, e: triax::Error) -> CliError {
        match e {
            triax::Error::NotPrime(_) | triax::Error::ModulusTooLarge(_) => CliError::Core(e),
            other => self.invalid(other.to_string()),
        }
    }
}

pub fn parse_operator_file(path: &Path) -> Result<Operator, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_operator_str(&text, &path.display().to_string())
}

/// Parses operator JSON; `source` names the input in error messages.
pub fn parse_operator_str(text: &str, source: &str) -> Result<Operator, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        input: source.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let ctx = Ctx {
        source,
        path: String::new(),
    };
    parse_operator_value(&value, None, &ctx)
}

fn object<'v>(v: &'v Value, ctx: &Ctx) -> Result<&'v Obj, CliError> {
    v.as_object().ok_or_else(|| ctx.invalid("expected an object"))
}

fn string<'v>(v: &'v Value, ctx: &Ctx) -> Result<&'v str, CliError> {
    v.as_str().ok_or_else(|| ctx.invalid("expected a string"))
}

fn scalar(field: FieldSpec, v: &Value, ctx: &Ctx) -> Result<Scalar, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(ctx.invalid("expected a scalar string such as \"-2/5\"")),
    };
    field.parse_scalar(&text).map_err(|e| ctx.core(e))
}

fn position(key: &str, ctx: &Ctx) -> Result<i64, CliError> {
    key.trim()
        .parse()
        .map_err(|_| ctx.invalid(format!("basis index `{key}` is not an integer")))
}

fn sparse(field: FieldSpec, domain: Domain, v: &Value, ctx: &Ctx) -> Result<SparseVec, CliError> {
    let mut pairs = Vec::new();
    for (k, c) in object(v, ctx)? {
        let cx = ctx.at(k);
        pairs.push((position(k, &cx)?, scalar(field, c, &cx)?));
    }
    SparseVec::from_pairs(field, domain, pairs).map_err(|e| ctx.core(e))
}

fn rows(field: FieldSpec, v: &Value, ctx: &Ctx) -> Result<Matrix, CliError> {
    let list = v.as_array().ok_or_else(|| ctx.invalid("expected a list of rows"))?;
    let mut out = Vec::with_capacity(list.len());
    for (i, row) in list.iter().enumerate() {
        let cx = ctx.at(&i.to_string());
        let cells = row.as_array().ok_or_else(|| cx.invalid("expected a row list"))?;
        out.push(
            cells
                .iter()
                .enumerate()
                .map(|(j, c)| scalar(field, c, &cx.at(&j.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Matrix::from_rows(field, out).map_err(|e| ctx.core(e))
}

fn parse_domain(obj: &Obj, ctx: &Ctx) -> Result<Option<Domain>, CliError> {
    let Some(d) = obj.get("domain") else { return Ok(None) };
    let cx = ctx.at("domain");
    let dim = || -> Result<usize, CliError> {
        obj.get("dim")
            .and_then(Value::as_u64)
            .map(|n| n as usize)
            .ok_or_else(|| ctx.at("dim").invalid("finite domain needs a nonnegative integer `dim`"))
    };
    Ok(Some(match string(d, &cx)? {
        "N" => Domain::Nat,
        "Z" => Domain::Int,
        "finite" => {
            if obj.contains_key("rows") {
                // Inferred from the matrix below.
                return Ok(None);
            }
            Domain::Finite(dim()?)
        }
        other => return Err(cx.invalid(format!("unknown domain `{other}` (expected N, Z or finite)"))),
    }))
}

fn parse_operator_value(v: &Value, inherited: Option<(FieldSpec, Domain)>, ctx: &Ctx) -> Result<Operator, CliError> {
    let obj = object(v, ctx)?;
    let field = match obj.get("field") {
        Some(f) => {
            let cx = ctx.at("field");
            string(f, &cx)?.parse::<FieldSpec>().map_err(|e| cx.core(e))?
        }
        None => inherited.map_or(FieldSpec::Rationals, |(f, _)| f),
    };
    let domain = parse_domain(obj, ctx)?.or(inherited.map(|(_, d)| d));
    let kind = match obj.get("kind") {
        Some(k) => string(k, &ctx.at("kind"))?,
        None if obj.contains_key("rows") => "matrix",
        None => return Err(ctx.invalid("missing `kind`")),
    };
    let need_domain = || domain.ok_or_else(|| ctx.invalid("missing `domain`"));
    let op = match kind {
        "matrix" => {
            let cx = ctx.at("rows");
            let m = rows(field, obj.get("rows").ok_or_else(|| ctx.invalid("missing `rows`"))?, &cx)?;
            if let Some(d) = domain {
                if d != Domain::Finite(m.nrows()) {
                    return Err(ctx.invalid(format!("matrix of size {} on domain {d}", m.nrows())));
                }
            }
            Operator::matrix(m).map_err(|e| cx.core(e))?
        }
        "generator" => {
            let domain = need_domain()?;
            let rule = generator_rule(obj, field, ctx)?;
            Operator::generator(field, domain, rule).map_err(|e| ctx.core(e))?
        }
        "columns" => {
            let domain = need_domain()?;
            let cx = ctx.at("map");
            let map = object(obj.get("map").ok_or_else(|| ctx.invalid("missing `map`"))?, &cx)?;
            let mut cols = Vec::with_capacity(map.len());
            for (k, col) in map {
                let c = cx.at(k);
                cols.push((position(k, &c)?, sparse(field, domain, col, &c)?));
            }
            let default = match obj.get("default") {
                Some(d) => Some(parse_operator_value(d, Some((field, domain)), &ctx.at("default"))?),
                None => None,
            };
            Operator::columns(field, domain, cols, default).map_err(|e| ctx.core(e))?
        }
        "compose" => {
            let inherit = domain.map(|d| (field, d));
            let part = |key: &str| -> Result<Operator, CliError> {
                let cx = ctx.at(key);
                let v = obj.get(key).ok_or_else(|| ctx.invalid(format!("missing `{key}`")))?;
                parse_operator_value(v, inherit, &cx)
            };
            let (outer, inner) = (part("outer")?, part("inner")?);
            Operator::compose(&outer, &inner).map_err(|e| ctx.core(e))?
        }
        "combination" => {
            let domain = need_domain()?;
            let cx = ctx.at("terms");
            let list = obj
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| ctx.invalid("missing `terms` list"))?;
            let mut terms = Vec::with_capacity(list.len());
            for (i, term) in list.iter().enumerate() {
                let c = cx.at(&i.to_string());
                let t = object(term, &c)?;
                let coeff = scalar(field, t.get("coeff").ok_or_else(|| c.invalid("missing `coeff`"))?, &c.at("coeff"))?;
                let op = parse_operator_value(
                    t.get("operator").ok_or_else(|| c.invalid("missing `operator`"))?,
                    Some((field, domain)),
                    &c.at("operator"),
                )?;
                terms.push((coeff, op));
            }
            Operator::combination(field, domain, terms).map_err(|e| ctx.core(e))?
        }
        other => return Err(ctx.at("kind").invalid(format!("unknown operator kind `{other}`"))),
    };
    if op.field() != field {
        return Err(ctx.invalid(format!("expected field {field}, got {}", op.field())));
    }
    Ok(op)
}

fn generator_rule(obj: &Obj, field: FieldSpec, ctx: &Ctx) -> Result<GeneratorRule, CliError> {
    let cx = ctx.at("name");
    let name = string(obj.get("name").ok_or_else(|| ctx.invalid("missing generator `name`"))?, &cx)?;
    let get = |key: &str| obj.get(key).ok_or_else(|| ctx.invalid(format!("generator `{name}` needs `{key}`")));
    let nested = |key: &str| -> Result<Box<GeneratorRule>, CliError> {
        let c = ctx.at(key);
        Ok(Box::new(generator_rule(object(get(key)?, &c)?, field, &c)?))
    };
    Ok(match name {
        "left_shift" => GeneratorRule::LeftShiftNat,
        "right_shift" => GeneratorRule::RightShiftNat,
        "bilateral_shift" => GeneratorRule::BilateralShift,
        "bilateral_shift_inverse" => GeneratorRule::BilateralShiftInverse,
        "scalar" => GeneratorRule::Scalar(scalar(field, get("a")?, &ctx.at("a"))?),
        "scalar_plus" => GeneratorRule::ScalarPlus {
            a: scalar(field, get("a")?, &ctx.at("a"))?,
            inner: nested("inner")?,
        },
        "weighted" => {
            let c = ctx.at("weights");
            let list = get("weights")?.as_array().ok_or_else(|| c.invalid("expected a list"))?;
            let weights = list
                .iter()
                .enumerate()
                .map(|(i, w)| scalar(field, w, &c.at(&i.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            GeneratorRule::Weighted {
                base: nested("base")?,
                weights,
            }
        }
        "companion" => {
            let c = ctx.at("poly");
            GeneratorRule::Companion(Poly::parse(field, string(get("poly")?, &c)?).map_err(|e| c.core(e))?)
        }
        "block_diag" => {
            let c = ctx.at("blocks");
            let list = get("blocks")?.as_array().ok_or_else(|| c.invalid("expected a list of matrices"))?;
            let blocks = list
                .iter()
                .enumerate()
                .map(|(i, b)| rows(field, b, &c.at(&i.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            GeneratorRule::BlockDiag(blocks)
        }
        other => return Err(cx.invalid(format!("unknown generator `{other}`"))),
    })
}

pub fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

/// `{"position": "coefficient"}`
pub fn sparse_json(v: &SparseVec) -> Value {
    Value::Object(v.iter().map(|(i, c)| (i.to_string(), scalar_json(c))).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(scalar_json).collect()))
            .collect(),
    )
}

fn rule_json(rule: &GeneratorRule) -> Value {
    let mut obj = Obj::new();
    obj.insert("name".into(), json!(rule.name()));
    match rule {
        GeneratorRule::Scalar(a) => {
            obj.insert("a".into(), scalar_json(a));
        }
        GeneratorRule::ScalarPlus { a, inner } => {
            obj.insert("a".into(), scalar_json(a));
            obj.insert("inner".into(), rule_json(inner));
        }
        GeneratorRule::Weighted { base, weights } => {
            obj.insert("base".into(), rule_json(base));
            obj.insert("weights".into(), Value::Array(weights.iter().map(scalar_json).collect()));
        }
        GeneratorRule::Companion(p) => {
            obj.insert("poly".into(), json!(p.to_string()));
        }
        GeneratorRule::BlockDiag(blocks) => {
            obj.insert("blocks".into(), Value::Array(blocks.iter().map(matrix_json).collect()));
        }
        _ => {}
    }
    Value::Object(obj)
}

/// The operator in the file format accepted by [`parse_operator_str`].
pub fn serialize_operator(op: &Operator) -> Value {
    let mut obj = Obj::new();
    obj.insert("field".into(), json!(op.field().to_string()));
    match op.domain() {
        Domain::Nat => {
            obj.insert("domain".into(), json!("N"));
        }
        Domain::Int => {
            obj.insert("domain".into(), json!("Z"));
        }
        Domain::Finite(n) => {
            obj.insert("domain".into(), json!("finite"));
            obj.insert("dim".into(), json!(n));
        }
    }
    match op.view() {
        OperatorView::Matrix(m) => {
            obj.remove("dim");
            obj.insert("kind".into(), json!("matrix"));
            obj.insert("rows".into(), matrix_json(m));
        }
        OperatorView::Generator(rule) => {
            obj.insert("kind".into(), json!("generator"));
            if let Value::Object(r) = rule_json(rule) {
                obj.extend(r);
            }
        }
        OperatorView::Columns { map, default } => {
            obj.insert("kind".into(), json!("columns"));
            let domain = op.domain();
            let cols: Obj = map
                .iter()
                .map(|(&rank, v)| (domain.position(rank).to_string(), sparse_json(v)))
                .collect();
            obj.insert("map".into(), Value::Object(cols));
            if let Some(d) = default {
                obj.insert("default".into(), serialize_operator(d));
            }
        }
        OperatorView::Compose(outer, inner) => {
            obj.insert("kind".into(), json!("compose"));
            obj.insert("outer".into(), serialize_operator(outer));
            obj.insert("inner".into(), serialize_operator(inner));
        }
        OperatorView::Combination(terms) => {
            obj.insert("kind".into(), json!("combination"));
            let list = terms
                .iter()
                .map(|(c, t)| json!({"coeff": scalar_json(c), "operator": serialize_operator(t)}))
                .collect();
            obj.insert("terms".into(), Value::Array(list));
        }
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_over_f5() {
        let op = parse_operator_str(r#"{"field":"F5","domain":"finite","rows":[["0","1"],["0","0"]]}"#, "t").unwrap();
        assert_eq!(op.field(), FieldSpec::Prime(5));
        assert_eq!(op.domain(), Domain::Finite(2));
        assert_eq!(op.to_matrix().unwrap(), Matrix::from_i64(FieldSpec::Prime(5), &[&[0, 1], &[0, 0]]));
    }

    #[test]
    fn bilateral_generator() {
        let op = parse_operator_str(r#"{"field":"Q","domain":"Z","kind":"generator","name":"bilateral_shift"}"#, "t")
            .unwrap();
        assert_eq!(op.generator_rule(), Some(&GeneratorRule::BilateralShift));
    }

    #[test]
    fn composite_prime_is_rejected() {
        let err = parse_operator_str(r#"{"field":"F4","rows":[["1"]]}"#, "t").unwrap_err();
        assert!(err.to_string().contains("4 is not a prime"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_operator_str("{\n  \"field\": \"Q\",\n  \"rows\": [[\"1\"],\n}", "t").unwrap_err();
        match err {
            CliError::Syntax { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_generator() {
        let err = parse_operator_str(r#"{"domain":"N","kind":"generator","name":"spin"}"#, "t").unwrap_err();
        assert!(err.to_string().contains("unknown generator `spin`"), "{err}");
        assert!(err.to_string().contains("/name"), "{err}");
    }

    #[test]
    fn columns_with_default() {
        let text = r#"{"domain":"N","kind":"columns","map":{"0":{"1":"1/2"}},
                       "default":{"kind":"generator","name":"left_shift"}}"#;
        let op = parse_operator_str(text, "t").unwrap();
        let q = FieldSpec::Rationals;
        assert_eq!(op.column(0).unwrap(), SparseVec::from_pairs(q, Domain::Nat, [(1, q.from_ratio(1, 2).unwrap())]).unwrap());
        assert_eq!(op.column(3).unwrap(), SparseVec::basis(q, Domain::Nat, 2).unwrap());
        let back = parse_operator_str(&serialize_operator(&op).to_string(), "t").unwrap();
        for i in 0..10 {
            assert_eq!(back.column(i).unwrap(), op.column(i).unwrap());
        }
    }
}
