//! Command-line front end. `run` never prints; it returns what should go to
//! standard output and standard error together with the exit code, so the
//! whole command is testable in-process.

mod render;

use std::collections::BTreeMap;
use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::category::{
    finite_limits, is_closed_subpresheaf, sheaf_failure, validate_category, validate_presheaf, validate_topology,
    LoadedSite,
};
use crate::frame::{
    barr_cover_frame, double_negation_fixpoints, frame_law_violations, heyting_implication, negation, stone_space,
    Frame, FrameSpec,
};
use crate::proof::{barr_check, prove, Mode, SearchBudget};
use crate::semantics::{
    completeness_probe, enumerate_models_with_ceiling, satisfies_sequent, uniform_bound, Interpretation, Verdict,
    DEFAULT_CEILING,
};
use crate::site::{build_string_site, check_clp, precomposed_subpresheaf};
use crate::syncat::{build_syntactic_category, EquivalenceRegime, SyncatOptions};
use crate::syntax::{parse_sequent, parse_theory, Sequent, Theory};

pub const CEILING_VAR: &str = "GEOLOGIC_CEILING";

/// What a finished command wants printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "geologic", version, about = "Geometric logic and finite site workbench")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, clap::Args, Serialize)]
pub struct BudgetArgs {
    /// Proof depth bound.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Depth of witness terms.
    #[arg(long, default_value_t = 1)]
    pub term_depth: usize,
    /// Total node limit for the search.
    #[arg(long, default_value_t = 200_000)]
    pub node_limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameOp {
    Implication,
    Negation,
    NnFixpoints,
    BarrCover,
    Laws,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Semantic,
    Proof,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Parse and sort-check a theory.
    Check { file: String },
    /// Search for a proof of a sequent.
    Prove {
        file: String,
        #[arg(long)]
        sequent: String,
        /// Use the classical calculus.
        #[arg(long)]
        classical: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Enumerate finite models.
    Models {
        file: String,
        #[arg(long)]
        max_size: usize,
    },
    /// Check a sequent in one model.
    Sat {
        file: String,
        #[arg(long)]
        sequent: String,
        #[arg(long)]
        model: String,
    },
    /// Look for a proof and for a finite countermodel.
    Complete {
        file: String,
        #[arg(long)]
        sequent: String,
        #[arg(long)]
        max_size: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compare classical and geometric provability.
    Barr {
        file: String,
        #[arg(long)]
        sequent: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Build the site of strings over a finite site.
    StringSite {
        site: String,
        #[arg(long)]
        bound: usize,
    },
    /// Check the laws of a finite site and its presheaves.
    SiteValidate { site: String },
    /// Heyting operations, double negation and the Barr cover of a frame.
    Frame {
        frame: String,
        #[arg(long, value_enum)]
        op: FrameOp,
        /// First operand; every element when omitted.
        #[arg(long)]
        u: Option<String>,
        /// Second operand of implication; every element when omitted.
        #[arg(long)]
        v: Option<String>,
    },
    /// Finite Stone duality for a Boolean algebra.
    Stone { algebra: String },
    /// Bounded syntactic category of a theory.
    Syncat {
        file: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = RegimeArg::Semantic)]
        regime: RegimeArg,
        /// Carrier bound for separating classes.
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        context_len: usize,
        /// Proof depth bound under the proof regime.
        #[arg(long, default_value_t = 6)]
        proof_depth: usize,
        #[arg(long, default_value_t = 20_000)]
        node_limit: usize,
    },
}

/// An input problem, reported on one line with exit code 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// A successful command: JSON fields, text lines, and whether an internal
/// consistency alarm was raised.
struct Report {
    json: Value,
    text: String,
    alarm: bool,
}

impl Report {
    fn new(json: Value, text: String) -> Report {
        Report { json, text, alarm: false }
    }
}

pub fn run(argv: &[String]) -> Output {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Output { stdout: rendered, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: rendered, code }
            };
        }
    };
    let ceiling = match std::env::var(CEILING_VAR) {
        Ok(v) => match v.trim().parse::<u128>() {
            Ok(n) => n,
            Err(_) => {
                return Output {
                    stdout: String::new(),
                    stderr: format!("error: {CEILING_VAR} must be a non-negative integer, got `{v}`\n"),
                    code: 1,
                }
            }
        },
        Err(_) => DEFAULT_CEILING,
    };
    match execute(&cli.command, ceiling) {
        Ok(report) => {
            let code = if report.alarm { 2 } else { 0 };
            let stdout = match cli.format {
                Format::Text => report.text,
                Format::Json => {
                    let mut doc = Map::new();
                    doc.insert("tool".into(), json!("geologic"));
                    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
                    let mut config = serde_json::to_value(&cli).expect("config serializes");
                    config["ceiling"] = json!(ceiling.to_string());
                    doc.insert("config".into(), config);
                    if let Value::Object(fields) = report.json {
                        doc.extend(fields);
                    }
                    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            Output { stdout, stderr: String::new(), code }
        }
        Err(Failure(msg)) => Output { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 1 },
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_theory(path: &str) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_sequent(t: &Theory, text: &str) -> Result<Sequent, Failure> {
    parse_sequent(&t.signature, text).map_err(|e| Failure(format!("sequent: {e}")))
}

fn budget(b: &BudgetArgs) -> Result<SearchBudget, Failure> {
    Ok(SearchBudget::new(b.depth, b.term_depth, b.node_limit)?)
}

fn load_site(path: &str) -> Result<LoadedSite, Failure> {
    LoadedSite::from_json_str(&read(path)?).map_err(|e| Failure(format!("{path}: {e}")))
}

fn load_frame(path: &str) -> Result<(FrameSpec, Frame), Failure> {
    let spec = FrameSpec::from_json_str(&read(path)?).map_err(|e| Failure(format!("{path}: {e}")))?;
    let f = spec.build().map_err(|e| Failure(format!("{path}: {e}")))?;
    Ok((spec, f))
}

fn execute(cmd: &Command, ceiling: u128) -> Result<Report, Failure> {
    match cmd {
        Command::Check { file } => {
            let t = load_theory(file)?;
            Ok(Report::new(
                json!({"status": "ok", "summary": t.summary(), "flavor": t.flavor}),
                format!("OK: {}\n", t.summary()),
            ))
        }
        Command::Prove { file, sequent, classical, budget: b } => {
            let t = load_theory(file)?;
            let s = load_sequent(&t, sequent)?;
            let mode = if *classical { Mode::Classical } else { Mode::Geometric };
            let result = prove(&t, &s, budget(b)?, mode)?;
            let text = render::proof_result(&result);
            Ok(Report::new(json!({"sequent": s.to_string(), "result": result.to_json()}), text))
        }
        Command::Models { file, max_size } => {
            let t = load_theory(file)?;
            let bound = uniform_bound(&t.signature, *max_size);
            let stream = enumerate_models_with_ceiling(&t, &bound, ceiling)?;
            let models: Vec<Interpretation> = stream.collect();
            let mut text = format!("{} models with carriers <= {max_size}\n", models.len());
            for m in &models {
                text.push_str(&serde_json::to_string(m).expect("model serializes"));
                text.push('\n');
            }
            Ok(Report::new(json!({"count": models.len(), "models": models}), text))
        }
        Command::Sat { file, sequent, model } => {
            let t = load_theory(file)?;
            let s = load_sequent(&t, sequent)?;
            let m: Interpretation =
                serde_json::from_str(&read(model)?).map_err(|e| Failure(format!("{model}: {e}")))?;
            m.validate(&t.signature).map_err(|e| Failure(format!("{model}: {e}")))?;
            let holds = satisfies_sequent(&m, &s);
            Ok(Report::new(json!({"sequent": s.to_string(), "satisfied": holds}), format!("{holds}\n")))
        }
        Command::Complete { file, sequent, max_size, budget: b } => {
            let t = load_theory(file)?;
            let s = load_sequent(&t, sequent)?;
            let bound = uniform_bound(&t.signature, *max_size);
            let r = completeness_probe(&t, &s, &bound, budget(b)?, ceiling)?;
            let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
            let mut text = format!("{}\n", verdict.as_str().unwrap_or_default());
            if let Some(m) = &r.countermodel {
                text.push_str(&format!("countermodel: {}\n", serde_json::to_string(m).expect("model serializes")));
            }
            text.push_str(&format!("proof: {}\nmodels checked: {}\n", r.proved.label(), r.models_checked));
            let mut rep = Report::new(r.to_json(), text);
            rep.alarm = r.verdict == Verdict::SoundnessAlarm;
            Ok(rep)
        }
        Command::Barr { file, sequent, budget: b } => {
            let t = load_theory(file)?;
            let s = load_sequent(&t, sequent)?;
            let r = barr_check(&t, &s, budget(b)?)?;
            let text = format!(
                "classical: {}\ngeometric: {}\nconsistent: {}\n",
                r.classical.label(),
                r.geometric.label(),
                r.consistent
            );
            let mut rep = Report::new(r.to_json(), text);
            rep.alarm = !r.consistent;
            Ok(rep)
        }
        Command::StringSite { site, bound } => {
            let loaded = load_site(site)?;
            let (c, j) = (&loaded.category, &loaded.topology);
            if let Some(v) = validate_topology(c, j).first() {
                return Err(Failure(format!("{site}: topology is invalid: {v}")));
            }
            let s = build_string_site(c, j, *bound);
            let clp = check_clp(c, j, &s);
            let mut closed = Vec::new();
            for p in &loaded.presheaves {
                for (name, b) in &p.subpresheaves {
                    if !b.is_stable(c, &p.presheaf) {
                        continue;
                    }
                    let r = precomposed_subpresheaf(c, j, &p.presheaf, b, &s);
                    closed.push(json!({
                        "presheaf": p.name, "subpresheaf": name,
                        "closed": r.base_closed, "closed_after_precomposition": r.closed,
                    }));
                }
            }
            let mut doc = s.to_json(c);
            doc["clp"] = json!({
                "holds": clp.holds,
                "checked": clp.checked,
                "failures": clp.failures.iter().map(|f| json!({
                    "string": f.string, "sieve": f.sieve, "truncation_artifact": f.truncation_artifact,
                })).collect::<Vec<_>>(),
            });
            doc["subpresheaves"] = json!(closed);
            let invalid = validate_topology(&s.category, &s.k);
            doc["k_valid"] = json!(invalid.is_empty());
            let mut text = format!(
                "strings: {}\narrows: {}\ncovering sieves: {}\nK is a topology: {}\nclp: {} ({} covers checked, {} failures, {} truncation artifacts)\n",
                s.strings.len(),
                s.category.arrows.len(),
                s.k.count(),
                invalid.is_empty(),
                clp.holds,
                clp.checked,
                clp.failures.len(),
                clp.failures.len() - clp.genuine_failures()
            );
            for w in &s.warnings {
                text.push_str(&format!("warning: {w}\n"));
            }
            for e in closed {
                text.push_str(&format!(
                    "{}/{}: closed {} -> closed after precomposition {}\n",
                    e["presheaf"].as_str().unwrap_or_default(),
                    e["subpresheaf"].as_str().unwrap_or_default(),
                    e["closed"],
                    e["closed_after_precomposition"]
                ));
            }
            Ok(Report::new(doc, text))
        }
        Command::SiteValidate { site } => {
            let loaded = load_site(site)?;
            let (c, j) = (&loaded.category, &loaded.topology);
            let mut violations: Vec<String> = validate_category(c).iter().map(|v| v.to_string()).collect();
            if violations.is_empty() {
                violations.extend(validate_topology(c, j).iter().map(|v| format!("topology {v}")));
            }
            let mut presheaves = Vec::new();
            if violations.is_empty() {
                for p in &loaded.presheaves {
                    let bad: Vec<String> = validate_presheaf(c, &p.presheaf).iter().map(|v| format!("{}: {v}", p.name)).collect();
                    if !bad.is_empty() {
                        violations.extend(bad);
                        continue;
                    }
                    let failure = sheaf_failure(c, j, &p.presheaf).map(|s| s.names(c));
                    let subs: Vec<Value> = p
                        .subpresheaves
                        .iter()
                        .map(|(n, b)| {
                            let stable = b.is_stable(c, &p.presheaf);
                            json!({"name": n, "stable": stable, "closed": stable && is_closed_subpresheaf(c, &p.presheaf, b, j)})
                        })
                        .collect();
                    presheaves.push(json!({"name": p.name, "sheaf": failure.is_none(), "sheaf_failure": failure, "subpresheaves": subs}));
                }
            }
            let limits = finite_limits(c);
            let valid = violations.is_empty();
            let mut text = format!(
                "objects: {}\narrows: {}\ncovering sieves: {}\nvalid: {valid}\n",
                c.num_objects(),
                c.arrows.len(),
                j.count()
            );
            for v in &violations {
                text.push_str(&format!("violation: {v}\n"));
            }
            for p in &presheaves {
                text.push_str(&format!("presheaf {}: sheaf {}\n", p["name"].as_str().unwrap_or_default(), p["sheaf"]));
            }
            text.push_str(&format!("finite limits: {}\n", limits.has_finite_limits()));
            let doc = json!({
                "valid": valid, "violations": violations, "presheaves": presheaves, "finite_limits": limits,
            });
            if !valid {
                return Err(Failure(format!("{site}: {}", violations.join("; "))));
            }
            Ok(Report::new(doc, text))
        }
        Command::Frame { frame, op, u, v } => {
            let (_, f) = load_frame(frame)?;
            let elem = |name: &Option<String>| -> Result<Vec<usize>, Failure> {
                match name {
                    Some(n) => Ok(vec![f.index(n).ok_or_else(|| Failure(format!("unknown element `{n}`")))?]),
                    None => Ok(f.iter().collect()),
                }
            };
            match op {
                FrameOp::Implication | FrameOp::Negation => {
                    let mut rows = Vec::new();
                    let mut text = String::new();
                    for a in elem(u)? {
                        if *op == FrameOp::Negation {
                            let r = negation(&f, a);
                            text.push_str(&format!("¬{} = {}\n", f.name(a), f.name(r)));
                            rows.push(json!({"u": f.name(a), "result": f.name(r)}));
                        } else {
                            for b in elem(v)? {
                                let r = heyting_implication(&f, a, b);
                                text.push_str(&format!("{} => {} = {}\n", f.name(a), f.name(b), f.name(r)));
                                rows.push(json!({"u": f.name(a), "v": f.name(b), "result": f.name(r)}));
                            }
                        }
                    }
                    Ok(Report::new(json!({"table": rows}), text))
                }
                FrameOp::NnFixpoints => {
                    let b = double_negation_fixpoints(&f);
                    let doc = serde_json::to_value(FrameSpec::from_boolean(&b)).expect("frame serializes");
                    let text = format!("{} fixpoints: {}\n", b.len(), b.frame.elements.join(", "));
                    Ok(Report::new(doc, text))
                }
                FrameOp::BarrCover => {
                    let cover = barr_cover_frame(&f);
                    let injective = cover.is_injective(&f);
                    let violations: Vec<String> = cover.map_violations(&f).iter().map(|v| v.to_string()).collect();
                    let components: Vec<Value> = cover
                        .components
                        .iter()
                        .map(|c| {
                            let mut spec = serde_json::to_value(FrameSpec::from_boolean(&c.algebra)).expect("frame serializes");
                            spec["open"] = json!(f.name(c.open));
                            spec["map"] = json!(f.iter().map(|w| (f.name(w).to_string(), c.algebra.frame.name(c.map.apply(w)).to_string())).collect::<BTreeMap<_, _>>());
                            spec
                        })
                        .collect();
                    let mut text = format!("components: {}\nproduct size: {}\n", cover.components.len(), cover.size());
                    for c in &cover.components {
                        text.push_str(&format!("  {}: {} elements\n", f.name(c.open), c.algebra.len()));
                    }
                    text.push_str(&format!("injective: {injective}\nframe map: {}\n", violations.is_empty()));
                    let doc = json!({
                        "components": components, "product_size": cover.size().to_string(),
                        "injective": injective, "map_violations": violations,
                    });
                    Ok(Report::new(doc, text))
                }
                FrameOp::Laws => {
                    let v: Vec<String> = frame_law_violations(&f).iter().map(|v| v.to_string()).collect();
                    let text = format!("elements: {}\nlaws hold: {}\n", f.len(), v.is_empty());
                    Ok(Report::new(json!({"elements": f.len(), "violations": v}), text))
                }
            }
        }
        Command::Stone { algebra } => {
            let spec = FrameSpec::from_json_str(&read(algebra)?).map_err(|e| Failure(format!("{algebra}: {e}")))?;
            let b = spec.build_boolean().map_err(|e| Failure(format!("{algebra}: {e}")))?;
            let d = stone_space(&b);
            let violations: Vec<String> = d.violations(&b).iter().map(|v| v.to_string()).collect();
            let phi: BTreeMap<String, String> =
                d.opens.iter().map(|s| (d.opens.name(s).to_string(), b.frame.name(d.phi.apply(s)).to_string())).collect();
            let text = format!(
                "points: {}\nopens: {}\nphi is an isomorphism: {}\n",
                d.space.points.join(", "),
                d.opens.len(),
                violations.is_empty()
            );
            let doc = json!({
                "points": d.space.points,
                "opens": FrameSpec::from_frame(&d.opens),
                "phi": phi,
                "isomorphism": violations.is_empty(),
                "violations": violations,
            });
            Ok(Report::new(doc, text))
        }
        Command::Syncat { file, depth, regime, max_size, context_len, proof_depth, node_limit } => {
            let t = load_theory(file)?;
            let opts = SyncatOptions { depth: *depth, context_len: *context_len, max_size: *max_size, ceiling, ..SyncatOptions::default() };
            let r = match regime {
                RegimeArg::Semantic => EquivalenceRegime::Semantic { max_size: *max_size },
                RegimeArg::Proof => EquivalenceRegime::Proof { budget: SearchBudget::new(*proof_depth, 1, *node_limit)? },
            };
            let sc = build_syntactic_category(&t, opts, r)?;
            let valid = validate_category(&sc.category).is_empty();
            let mut text = format!(
                "regime: {}\nclasses: {}\narrows: {}\ncategory laws: {valid}\n",
                sc.regime,
                sc.classes.len(),
                sc.arrows.len()
            );
            if sc.is_partial() {
                text.push_str(&format!("partial: {} undecided arrows omitted\n", sc.omitted));
            }
            for c in &sc.classes {
                text.push_str(&format!("  {}: {} {}\n", c.name, c.context, c.formula));
            }
            let mut doc = sc.to_json();
            doc["category_valid"] = json!(valid);
            Ok(Report::new(doc, text))
        }
    }
}
