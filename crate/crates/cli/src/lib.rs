//! Front end for the kernel. [`run`] parses arguments, executes one command
//! and returns the exit code with the rendered output, so the binary and the
//! tests share a single code path.

pub mod report;

use std::fmt::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ctt_kernel::kripke::{Monotonicity, WJudgment, WorldModel};
use ctt_kernel::rules::{compare_readings, parse_rule_file, Bounds, Derivability, RuleScheme};
use ctt_kernel::{
    eval_with, parse, CheckError, Checker, EnumError, EvalResult, Exec, Judgment, Strategy, Term,
    Verdict, VerdictKind, DEFAULT_DEPTH, DEFAULT_FUEL,
};

use report::{admissible_label, verdict_doc, OutputMode, Report, RuleDoc, RunConfig, VerdictDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_STUCK: i32 = 3;
pub const EXIT_REFUTED: i32 = 4;
pub const EXIT_UNKNOWN: i32 = 5;

/// Exit code for a checker verdict.
pub fn exit_code(kind: VerdictKind) -> i32 {
    match kind {
        VerdictKind::Verified => EXIT_OK,
        VerdictKind::Refuted => EXIT_REFUTED,
        VerdictKind::Unknown => EXIT_UNKNOWN,
        VerdictKind::Diverged => EXIT_DIVERGED,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ctt",
    version,
    about = "Evaluate terms and check judgments by their meaning"
)]
struct Cli {
    /// Evaluation step budget.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL, value_parser = positive)]
    fuel: usize,
    /// Canonical witness depth for quantifier domains and enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
    /// Height bound for derivation search.
    #[arg(long, global = true, default_value_t = 5, value_parser = positive)]
    search_depth: usize,
    /// Emit one JSON document instead of human-readable text.
    #[arg(long, global = true)]
    machine: bool,
    /// Evaluate call-by-value instead of call-by-name.
    #[arg(long, global = true)]
    cbv: bool,
    /// Disable data-parallel sweeps.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a closed term to canonical form.
    Eval { term: String },
    /// Check `TERM in TYPE`, `TYPE` (is a set), or with --binary
    /// `TERM : TERM in TYPE` and `TYPE : TYPE`.
    Check {
        /// Use the binary relations instead of the unary ones.
        #[arg(long)]
        binary: bool,
        #[arg(required = true, num_args = 1..)]
        args: Vec<String>,
    },
    /// List the canonical members of a type up to --depth.
    Enum {
        #[arg(value_name = "TYPE")]
        ty: String,
    },
    /// Compare derivability and admissibility of a rule, given inline or as
    /// a file of rules.
    Rule {
        rule: String,
        /// Former depth of the ground types substituted for metavariables.
        #[arg(long, default_value_t = 2, value_parser = positive)]
        instance_depth: usize,
        /// Depth of canonical realizers searched per instance.
        #[arg(long, default_value_t = 3, value_parser = positive)]
        witness_depth: usize,
    },
    /// Forcing and monotonicity in a finite world model.
    Kripke {
        model: PathBuf,
        /// `A`, `rule J J` or `hyp J J` over the model's atoms.
        #[arg(long)]
        judgment: String,
        /// Search every related pair of worlds for a monotonicity failure.
        #[arg(long)]
        check_monotone: bool,
        /// Report forcing at one world only.
        #[arg(long)]
        world: Option<String>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Exit code and output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let config = RunConfig {
        fuel: cli.fuel,
        depth: cli.depth,
        search_depth: cli.search_depth,
        output_mode: if cli.machine {
            OutputMode::Machine
        } else {
            OutputMode::Human
        },
        strategy: if cli.cbv {
            Strategy::CallByValue
        } else {
            Strategy::CallByName
        },
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let result = match &cli.command {
        Command::Eval { term } => cmd_eval(&config, term),
        Command::Check { binary, args } => cmd_check(&config, *binary, args),
        Command::Enum { ty } => cmd_enum(&config, ty),
        Command::Rule {
            rule,
            instance_depth,
            witness_depth,
        } => cmd_rule(&config, rule, *instance_depth, *witness_depth, exec),
        Command::Kripke {
            model,
            judgment,
            check_monotone,
            world,
        } => cmd_kripke(
            &config,
            model,
            judgment,
            *check_monotone,
            world.as_deref(),
            exec,
        ),
    };
    match result {
        Ok(out) => out,
        Err(message) => Outcome::usage(message),
    }
}

/// What a command produced, before rendering.
struct Produced {
    code: i32,
    human: String,
    verdict: VerdictDoc,
    trace: Option<report::TraceDoc>,
}

fn finish(config: &RunConfig, command: &str, p: Produced) -> Outcome {
    let stdout = match config.output_mode {
        OutputMode::Human => p.human,
        OutputMode::Machine => {
            let doc = Report {
                command: command.to_string(),
                config: *config,
                verdict: p.verdict,
                trace: p.trace,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
    };
    Outcome {
        code: p.code,
        stdout,
        stderr: String::new(),
    }
}

fn parse_term(text: &str) -> Result<Term, String> {
    parse(text).map_err(|e| format!("parse error in `{text}`: {e}"))
}

fn checker(config: &RunConfig) -> Checker {
    Checker::new(config.fuel, config.depth).with_strategy(config.strategy)
}

fn cmd_eval(config: &RunConfig, text: &str) -> Result<Outcome, String> {
    let term = parse_term(text)?;
    let result = eval_with(&term, config.fuel, config.strategy);
    let (code, status, value, steps) = match &result {
        EvalResult::Canonical(c, n) => (EXIT_OK, "canonical", c.to_string(), Some(*n)),
        EvalResult::FuelExhausted(r) => (EXIT_DIVERGED, "fuel-exhausted", r.to_string(), None),
        EvalResult::Stuck(t) => (EXIT_STUCK, "stuck", t.to_string(), None),
    };
    let human = match &result {
        EvalResult::Canonical(c, n) => format!("{c}\ncanonical, {n} steps\n"),
        EvalResult::FuelExhausted(_) => format!("fuel {} exhausted at {value}\n", config.fuel),
        EvalResult::Stuck(_) => format!("stuck: {value}\n"),
    };
    let verdict = VerdictDoc {
        status: status.into(),
        value: Some(value),
        steps,
        ..VerdictDoc::default()
    };
    Ok(finish(
        config,
        "eval",
        Produced {
            code,
            human,
            verdict,
            trace: None,
        },
    ))
}

/// The judgment a `check` invocation asks about.
fn check_judgment(binary: bool, args: &[String]) -> Result<Judgment, String> {
    let words: Vec<&str> = args.iter().map(String::as_str).collect();
    let (lhs, ty) = match words.iter().position(|w| *w == "in") {
        Some(i) => (&words[..i], Some(&words[i + 1..])),
        None => (&words[..], None),
    };
    let (first, second) = match lhs.iter().position(|w| *w == ":") {
        Some(i) => (&lhs[..i], Some(&lhs[i + 1..])),
        None => (lhs, None),
    };
    let one = |ws: &[&str], what: &str| -> Result<Term, String> {
        match ws {
            [t] => parse_term(t),
            [] => Err(format!("missing {what}")),
            _ => Err(format!("expected one quoted {what}, found {}", ws.len())),
        }
    };
    if second.is_some() && !binary {
        return Err("`M : N` comparisons need --binary".into());
    }
    let m = one(first, "term")?;
    let n = second.map(|s| one(s, "second term")).transpose()?;
    Ok(match (ty, binary) {
        (Some(ty), false) => Judgment::Member(m, one(ty, "type")?),
        (Some(ty), true) => {
            let n = n.unwrap_or_else(|| m.clone());
            Judgment::EqMember(m, n, one(ty, "type")?)
        }
        (None, false) => Judgment::IsSet(m),
        (None, true) => {
            let n = n.unwrap_or_else(|| m.clone());
            Judgment::EqSet(m, n)
        }
    })
}

fn cmd_check(config: &RunConfig, binary: bool, args: &[String]) -> Result<Outcome, String> {
    let j = check_judgment(binary, args)?;
    let c = checker(config);
    let verdict: Result<Verdict, CheckError> = match &j {
        Judgment::Member(m, a) => c.member(m, a),
        Judgment::EqMember(m, n, a) => c.eq_member(m, n, a),
        Judgment::IsSet(a) => c.is_set(a),
        Judgment::EqSet(a, b) => c.eq_set(a, b),
        _ => unreachable!("check_judgment builds only these"),
    };
    let verdict = verdict.map_err(|e| e.to_string())?;
    let (doc, trace) = verdict_doc(&verdict, j.to_string());
    Ok(finish(
        config,
        "check",
        Produced {
            code: exit_code(verdict.kind()),
            human: render_verdict(&verdict, &j),
            verdict: doc,
            trace,
        },
    ))
}

/// Human rendering of a checker verdict.
pub fn render_verdict(v: &Verdict, j: &Judgment) -> String {
    let mut out = String::new();
    match v {
        Verdict::Verified(t) => {
            let _ = writeln!(out, "verified: {j}");
            out.push_str(&t.render());
        }
        Verdict::Refuted {
            trace,
            counterexample,
        } => {
            let _ = writeln!(out, "refuted: {j}");
            let _ = writeln!(out, "counterexample: {counterexample}");
            out.push_str(&trace.render());
        }
        Verdict::Unknown { depth, evidence } => {
            let _ = writeln!(out, "unknown at depth {depth}: {j}");
            out.push_str(&evidence.render());
        }
        Verdict::Diverged(r) => {
            let _ = writeln!(out, "diverged: {j}");
            let _ = writeln!(
                out,
                "fuel {} exhausted at {} while evaluating {}",
                r.fuel, r.at, r.term
            );
        }
    }
    out
}

fn cmd_enum(config: &RunConfig, text: &str) -> Result<Outcome, String> {
    let ty = parse_term(text)?;
    let c = checker(config);
    let (code, verdict, human) = match c.enumerate(&ty) {
        Ok(e) => {
            let items: Vec<String> = e.witnesses.iter().map(Term::to_string).collect();
            let mut human: String = items.iter().map(|w| format!("{w}\n")).collect();
            let label = if e.complete { "complete" } else { "incomplete" };
            let _ = writeln!(
                human,
                "{label} ({} members at depth {})",
                items.len(),
                config.depth
            );
            let doc = VerdictDoc {
                status: label.into(),
                depth: Some(config.depth),
                complete: Some(e.complete),
                items,
                ..VerdictDoc::default()
            };
            (EXIT_OK, doc, human)
        }
        Err(EnumError::Check(e)) => return Err(e.to_string()),
        Err(EnumError::NotASet(t)) => {
            let doc = VerdictDoc {
                status: "not-a-set".into(),
                value: Some(t.to_string()),
                ..VerdictDoc::default()
            };
            (EXIT_REFUTED, doc, format!("not a set: {t}\n"))
        }
        Err(EnumError::Diverged(r)) => {
            let human = format!("diverged: fuel {} exhausted at {}\n", r.fuel, r.at);
            let doc = VerdictDoc {
                status: "diverged".into(),
                fuel: Some((&r).into()),
                ..VerdictDoc::default()
            };
            (EXIT_DIVERGED, doc, human)
        }
    };
    Ok(finish(
        config,
        "enum",
        Produced {
            code,
            human,
            verdict,
            trace: None,
        },
    ))
}

fn cmd_rule(
    config: &RunConfig,
    arg: &str,
    instance_depth: usize,
    witness_depth: usize,
    exec: Exec,
) -> Result<Outcome, String> {
    let path = std::path::Path::new(arg);
    let rules = if !arg.contains("|-") && !arg.contains('⊢') && path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        parse_rule_file(&text).map_err(|e| format!("{arg}: {e}"))?
    } else {
        vec![RuleScheme::parse(arg).map_err(|e| e.to_string())?]
    };
    if rules.is_empty() {
        return Err(format!("{arg}: no rules"));
    }
    let bounds = Bounds {
        search_depth: config.search_depth,
        instance_depth,
        witness_depth,
        fuel: config.fuel,
    };
    let mut human = String::new();
    let mut docs = Vec::new();
    let mut code = EXIT_OK;
    let mut last_trace = None;
    for (i, r) in rules.iter().enumerate() {
        let cmp = compare_readings(r, bounds, exec);
        if i > 0 {
            human.push('\n');
        }
        let _ = writeln!(human, "rule: {r}");
        match &cmp.derivable {
            Derivability::Derived(d) => {
                let _ = writeln!(human, "derivable: yes (realizer {})", d.extract_witness());
                for line in d.render().lines() {
                    let _ = writeln!(human, "  {line}");
                }
            }
            Derivability::NotDerivable {
                at_depth,
                exhaustive,
            } => {
                let how = if *exhaustive { "exhaustive" } else { "bounded" };
                let _ = writeln!(human, "derivable: no ({how} at search depth {at_depth})");
            }
        }
        let _ = writeln!(
            human,
            "admissible: {} (instanceDepth {instance_depth}, witnessDepth {witness_depth})",
            admissible_label(&cmp.admissible)
        );
        if let Some(cx) = cmp.admissible.counterexample() {
            let _ = writeln!(human, "counterexample: {cx}");
        }
        if cmp.flagged() {
            let _ = writeln!(human, "FLAGGED: admissible but not derivable");
        }
        if matches!(cmp.admissible, Verdict::Diverged(_)) {
            code = EXIT_DIVERGED;
        }
        last_trace = cmp.admissible.trace().map(report::TraceDoc::from);
        docs.push(RuleDoc::new(r.to_string(), &cmp));
    }
    let verdict = VerdictDoc {
        status: if docs.iter().any(|d| d.flagged) {
            "flagged"
        } else {
            "ok"
        }
        .into(),
        rules: docs,
        ..VerdictDoc::default()
    };
    let trace = if rules.len() == 1 { last_trace } else { None };
    Ok(finish(
        config,
        "rule",
        Produced {
            code,
            human,
            verdict,
            trace,
        },
    ))
}

fn cmd_kripke(
    config: &RunConfig,
    path: &std::path::Path,
    judgment: &str,
    check_monotone: bool,
    world: Option<&str>,
    exec: Exec,
) -> Result<Outcome, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let model: WorldModel = text
        .parse()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let j: WJudgment = judgment.parse().map_err(|e| format!("{e}"))?;
    let mut human = String::new();
    let mut verdict = VerdictDoc {
        judgment: Some(j.to_string()),
        ..VerdictDoc::default()
    };
    let mut code = EXIT_OK;
    let worlds: Vec<String> = match world {
        Some(w) => vec![w.to_string()],
        None => model.worlds().to_vec(),
    };
    for w in &worlds {
        let forced = model.forces(w, &j).map_err(|e| e.to_string())?;
        let sym = if forced { "⊩" } else { "⊮" };
        let _ = writeln!(human, "{w} {sym} {j}");
        verdict.items.push(format!("{w}: {forced}"));
        if world.is_some() && !forced {
            code = EXIT_REFUTED;
        }
    }
    verdict.status = match world {
        Some(_) if code == EXIT_OK => "forced".into(),
        Some(_) => "not-forced".into(),
        None => "evaluated".into(),
    };
    if check_monotone {
        match model.check_monotone(&j, exec).map_err(|e| e.to_string())? {
            Monotonicity::Pass => {
                let _ = writeln!(human, "monotone: pass");
                verdict.status = "pass".into();
            }
            Monotonicity::Counterexample { lower, upper } => {
                let _ = writeln!(human, "monotone: counterexample {lower} ⪯ {upper}");
                verdict.status = "counterexample".into();
                verdict.value = Some(format!("{lower} <= {upper}"));
                code = EXIT_REFUTED;
            }
        }
    }
    Ok(finish(
        config,
        "kripke",
        Produced {
            code,
            human,
            verdict,
            trace: None,
        },
    ))
}
