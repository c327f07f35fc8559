use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Inst, ProofTree, Rule};
use crate::syntax::{parse_formula_in, parse_sequent, parse_term_in, ParseError, Theory, Var};

#[derive(Debug, Error)]
pub enum ProofJsonError {
    #[error("missing or malformed field `{0}`")]
    Field(&'static str),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("cannot parse `{text}`: {error}")]
    Parse { text: String, error: ParseError },
}

/// `{"sequent": .., "rule": .., "inst": {..}, "premises": [..]}` with
/// formulas and terms in concrete syntax.
pub fn proof_to_json(p: &ProofTree) -> Value {
    let mut inst = Map::new();
    let i = &p.inst;
    if let Some(f) = &i.principal {
        inst.insert("principal".into(), json!(f.to_string()));
    }
    if let Some(w) = &i.witness {
        inst.insert("witness".into(), json!(w.to_string()));
    }
    if let Some(z) = &i.eigenvariable {
        inst.insert("eigenvariable".into(), json!(z.to_string()));
    }
    if let Some(a) = i.axiom {
        inst.insert("axiom".into(), json!(a));
    }
    if !i.substitution.is_empty() {
        inst.insert("substitution".into(), json!(i.substitution.iter().map(|t| t.to_string()).collect::<Vec<_>>()));
    }
    if let Some(e) = &i.equation {
        inst.insert("equation".into(), json!(e.to_string()));
    }
    if i.reverse {
        inst.insert("reverse".into(), json!(true));
    }
    json!({
        "sequent": p.sequent.to_string(),
        "rule": p.rule.name(),
        "inst": Value::Object(inst),
        "premises": p.premises.iter().map(proof_to_json).collect::<Vec<_>>(),
    })
}

fn parse_err(text: &str) -> impl Fn(ParseError) -> ProofJsonError + '_ {
    move |error| ProofJsonError::Parse { text: text.to_string(), error }
}

pub fn proof_from_json(t: &Theory, v: &Value) -> Result<ProofTree, ProofJsonError> {
    let sig = &t.signature;
    let text = v.get("sequent").and_then(Value::as_str).ok_or(ProofJsonError::Field("sequent"))?;
    let sequent = parse_sequent(sig, text).map_err(parse_err(text))?;
    let rule_name = v.get("rule").and_then(Value::as_str).ok_or(ProofJsonError::Field("rule"))?;
    let rule = Rule::from_name(rule_name).ok_or_else(|| ProofJsonError::UnknownRule(rule_name.to_string()))?;
    let ctx = &sequent.context;
    let empty = Map::new();
    let obj = match v.get("inst") {
        None => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(ProofJsonError::Field("inst")),
    };
    let text_field = |key: &'static str| -> Result<Option<&str>, ProofJsonError> {
        match obj.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(ProofJsonError::Field(key)),
        }
    };
    let mut inst = Inst::default();
    if let Some(s) = text_field("principal")? {
        inst.principal = Some(parse_formula_in(sig, ctx, s).map_err(parse_err(s))?);
    }
    if let Some(s) = text_field("witness")? {
        inst.witness = Some(parse_term_in(sig, ctx, s).map_err(parse_err(s))?);
    }
    if let Some(s) = text_field("eigenvariable")? {
        let (name, sort) = s.split_once(':').ok_or(ProofJsonError::Field("eigenvariable"))?;
        inst.eigenvariable = Some(Var::new(name.trim(), sort.trim()));
    }
    if let Some(a) = obj.get("axiom") {
        inst.axiom = Some(a.as_u64().ok_or(ProofJsonError::Field("axiom"))? as usize);
    }
    if let Some(subst) = obj.get("substitution") {
        let items = subst.as_array().ok_or(ProofJsonError::Field("substitution"))?;
        for item in items {
            let s = item.as_str().ok_or(ProofJsonError::Field("substitution"))?;
            inst.substitution.push(parse_term_in(sig, ctx, s).map_err(parse_err(s))?);
        }
    }
    if let Some(s) = text_field("equation")? {
        inst.equation = Some(parse_formula_in(sig, ctx, s).map_err(parse_err(s))?);
    }
    if let Some(r) = obj.get("reverse") {
        inst.reverse = r.as_bool().ok_or(ProofJsonError::Field("reverse"))?;
    }
    let premises = match v.get("premises") {
        None => Vec::new(),
        Some(Value::Array(ps)) => ps.iter().map(|p| proof_from_json(t, p)).collect::<Result<_, _>>()?,
        Some(_) => return Err(ProofJsonError::Field("premises")),
    };
    Ok(ProofTree { sequent, rule, inst, premises })
}
