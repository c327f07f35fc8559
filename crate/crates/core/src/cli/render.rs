use crate::proof::{ProofResult, ProofTree};

/// One line per node, premises indented under their conclusion.
pub fn proof_tree(t: &ProofTree) -> String {
    let mut out = String::new();
    walk(t, 0, &mut out);
    out
}

fn walk(t: &ProofTree, indent: usize, out: &mut String) {
    out.push_str(&format!("{}{}  [{}]\n", "  ".repeat(indent), t.sequent, t.rule.name()));
    for p in &t.premises {
        walk(p, indent + 1, out);
    }
}

pub fn proof_result(r: &ProofResult) -> String {
    match r {
        ProofResult::Proved(t) => format!("PROVED (height {}, {} nodes)\n{}", t.height(), t.size(), proof_tree(t)),
        ProofResult::ExhaustedBudget(s) => format!(
            "EXHAUSTED_BUDGET ({} nodes, depth {} completed{})\n",
            s.nodes,
            s.depth_completed,
            if s.hit_node_limit { ", node limit reached" } else { "" }
        ),
    }
}
