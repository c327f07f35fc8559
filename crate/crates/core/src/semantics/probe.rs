use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use super::{enumerate_models_with_ceiling, satisfies_sequent, Interpretation, SemanticsError};
use crate::proof::{prove_geometric, ProofError, ProofResult, SearchBudget};
use crate::syntax::{Sequent, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Proved, and no model within the bound falsifies the sequent.
    SoundConfirmed,
    /// Not proved, and a model falsifies the sequent.
    Countermodel,
    /// Neither a proof nor a countermodel.
    Inconclusive,
    /// Proved, yet a model falsifies the sequent.
    SoundnessAlarm,
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub proved: ProofResult,
    pub countermodel: Option<Interpretation>,
    pub verdict: Verdict,
    pub models_checked: usize,
    pub candidates_checked: u128,
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict,
            "proof": self.proved.to_json(),
            "countermodel": self.countermodel,
            "stats": {
                "models_checked": self.models_checked,
                "candidates_checked": self.candidates_checked.to_string(),
            },
        })
    }
}

/// Searches for a proof and, independently, for a finite countermodel.
pub fn completeness_probe(
    t: &Theory,
    s: &Sequent,
    bound: &BTreeMap<String, usize>,
    b: SearchBudget,
    ceiling: u128,
) -> Result<ProbeReport, ProbeError> {
    let proved = prove_geometric(t, s, b)?;
    let mut stream = enumerate_models_with_ceiling(t, bound, ceiling)?;
    let mut models_checked = 0;
    let mut countermodel = None;
    for m in stream.by_ref() {
        models_checked += 1;
        if !satisfies_sequent(&m, s) {
            countermodel = Some(m);
            break;
        }
    }
    let verdict = match (proved.is_proved(), countermodel.is_some()) {
        (true, false) => Verdict::SoundConfirmed,
        (false, true) => Verdict::Countermodel,
        (false, false) => Verdict::Inconclusive,
        (true, true) => Verdict::SoundnessAlarm,
    };
    Ok(ProbeReport { proved, countermodel, verdict, models_checked, candidates_checked: stream.checked() })
}
