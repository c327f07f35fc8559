use serde_json::{json, Value};

use super::{prove_classical, prove_geometric, ProofError, ProofResult, SearchBudget};
use crate::syntax::{Sequent, Theory};

/// Outcome of running both searches on one geometric sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrReport {
    pub classical: ProofResult,
    pub geometric: ProofResult,
    /// False only when the classical search succeeded and the geometric
    /// one did not, within the same budget.
    pub consistent: bool,
}

impl BarrReport {
    pub fn to_json(&self) -> Value {
        json!({
            "classical": self.classical.to_json(),
            "geometric": self.geometric.to_json(),
            "consistent": self.consistent,
        })
    }
}

pub fn barr_check(t: &Theory, s: &Sequent, b: SearchBudget) -> Result<BarrReport, ProofError> {
    let geometric = prove_geometric(t, s, b)?;
    let classical = prove_classical(t, s, b)?;
    let consistent = !(classical.is_proved() && !geometric.is_proved());
    Ok(BarrReport { classical, geometric, consistent })
}
