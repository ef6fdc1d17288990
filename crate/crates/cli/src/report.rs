//! Machine-readable output. Every invocation emits one JSON document with
//! the keys `command`, `config`, `verdict` and `trace`. Terms and judgments
//! appear in their concrete syntax so documents stay readable.

use ctt_kernel::rules::{Comparison, Derivability};
use ctt_kernel::{Counterexample, FuelReport, Strategy, Trace, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub fuel: usize,
    pub depth: usize,
    pub search_depth: usize,
    pub output_mode: OutputMode,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub verdict: VerdictDoc,
    pub trace: Option<TraceDoc>,
}

/// The outcome of a command. `status` is always present; the other fields
/// depend on the command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judgment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel: Option<FuelDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<RuleDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub instantiation: Vec<(String, String)>,
    pub witnesses: Vec<String>,
    pub failed: String,
}

impl From<&Counterexample> for CounterexampleDoc {
    fn from(c: &Counterexample) -> Self {
        CounterexampleDoc {
            instantiation: c
                .instantiation
                .iter()
                .map(|(x, t)| (x.clone(), t.to_string()))
                .collect(),
            witnesses: c.witnesses.iter().map(|w| w.to_string()).collect(),
            failed: c.failed.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuelDoc {
    pub fuel: usize,
    pub term: String,
    pub at: String,
}

impl From<&FuelReport> for FuelDoc {
    fn from(r: &FuelReport) -> Self {
        FuelDoc {
            fuel: r.fuel,
            term: r.term.to_string(),
            at: r.at.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub judgment: String,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceDoc>,
}

impl From<&Trace> for TraceDoc {
    fn from(t: &Trace) -> Self {
        TraceDoc {
            judgment: t.judgment.to_string(),
            rule: t.rule.clone(),
            children: t.children.iter().map(TraceDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDoc {
    pub rule: String,
    pub derivable: bool,
    /// For underivable rules: the search never hit its depth cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub admissible: String,
    pub bounds: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDoc>,
    pub flagged: bool,
}

impl RuleDoc {
    pub fn new(rule: String, c: &Comparison) -> Self {
        let (derivable, exhaustive, witness) = match &c.derivable {
            Derivability::Derived(d) => (true, None, Some(d.extract_witness().to_string())),
            Derivability::NotDerivable { exhaustive, .. } => (false, Some(*exhaustive), None),
        };
        RuleDoc {
            rule,
            derivable,
            exhaustive,
            witness,
            admissible: admissible_label(&c.admissible).to_string(),
            bounds: format!(
                "instanceDepth {}, witnessDepth {}",
                c.bounds.instance_depth, c.bounds.witness_depth
            ),
            counterexample: c.admissible.counterexample().map(CounterexampleDoc::from),
            flagged: c.flagged(),
        }
    }
}

pub fn admissible_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::Verified(_) => "verified-at-bound",
        Verdict::Refuted { .. } => "refuted",
        Verdict::Unknown { .. } => "unknown",
        Verdict::Diverged(_) => "diverged",
    }
}

/// Verdict document and trace for a checker verdict.
pub fn verdict_doc(v: &Verdict, judgment: String) -> (VerdictDoc, Option<TraceDoc>) {
    let mut doc = VerdictDoc {
        status: v.kind().to_string(),
        judgment: Some(judgment),
        ..VerdictDoc::default()
    };
    let trace = match v {
        Verdict::Verified(t) => Some(t),
        Verdict::Refuted {
            trace,
            counterexample,
        } => {
            doc.counterexample = Some(counterexample.into());
            Some(trace)
        }
        Verdict::Unknown { depth, evidence } => {
            doc.depth = Some(*depth);
            Some(evidence)
        }
        Verdict::Diverged(r) => {
            doc.fuel = Some(r.into());
            None
        }
    };
    (doc, trace.map(TraceDoc::from))
}
