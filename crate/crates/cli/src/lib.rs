//! Command-line front end: argument parsing, file loading, dispatch and
//! rendering of results as text or versioned JSON.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ctis_core::connected::{construct_connected_theory, verify_connected_theory, LayeredTheory};
use ctis_core::entailment::Reasoner;
use ctis_core::exec::Execution;
use ctis_core::induction::{induce, relate, run_harness, HarnessConfig, SearchConfig};
use ctis_core::oracle::brute_minimal_model;
use ctis_core::subsumption::{clause_subsumes, find_subsumer, theory_subsumes};
use ctis_core::syntax::{
    parse_atom, parse_clause, parse_constraints, parse_layers, parse_program, parse_signatures,
    parse_theory, ArityTable, Atom, OpenProgram, Theory,
};
use ctis_core::Error;

pub const SCHEMA: &str = "ctis/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Outcome of one invocation.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub command: String,
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    /// Human-readable rendering of the payload.
    pub text: String,
    pub json: bool,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status.as_str(),
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        })
    }

    /// What goes to standard output.
    pub fn render(&self) -> String {
        if self.json {
            let mut s =
                serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ctis",
    version,
    about = "Connected theories and inverse subsumption for definite programs"
)]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Allow function symbols, truncating the Herbrand universe at this term depth.
    #[arg(long, global = true, env = "CTIS_DEPTH_BOUND")]
    depth_bound: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ProgramArgs {
    /// Background theory; may contain `#abducible p/n.` declarations.
    #[arg(long)]
    program: PathBuf,
    /// File of integrity constraints `:- b1, …, bn.`
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Extra abducible signatures, e.g. `flies/1,swims/1`.
    #[arg(long)]
    abducible: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether a program entails a ground atom.
    Entails {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Print the least Herbrand model with derivation depths.
    LeastModel {
        #[arg(long)]
        program: PathBuf,
        /// Cross-check against the brute-force model.
        #[arg(long, hide = true)]
        oracle: bool,
    },
    /// θ-subsumption between two clauses, or between two theory files.
    CheckSubsume {
        #[arg(
            long = "c",
            conflicts_with = "general",
            required_unless_present = "general"
        )]
        c: Option<String>,
        #[arg(long = "d", requires = "c")]
        d: Option<String>,
        #[arg(long, requires = "specific")]
        general: Option<PathBuf>,
        #[arg(long)]
        specific: Option<PathBuf>,
    },
    /// Check a layered theory against the connected-theory conditions.
    VerifyCt {
        #[command(flatten)]
        program: ProgramArgs,
        /// Layered theory file, `#layer` lines separating layers 1..n.
        #[arg(long)]
        layers: PathBuf,
        #[arg(long)]
        example: String,
    },
    /// Build the connected theory of a hypothesis and check CTG and CTIS.
    DeriveCt {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long)]
        hypothesis: PathBuf,
        #[arg(long)]
        example: String,
        /// Also write the connected theory in layered format to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check CTIS derivability on random inductive solutions.
    VerifyTheorem {
        #[arg(long, default_value_t = 500)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `sequential` or `parallel`; does not affect the output.
        #[arg(long)]
        execution: Option<Execution>,
    },
    /// Search for hypotheses derivable by connected-theory inverse subsumption.
    Induce {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long)]
        example: String,
        /// Generalizations tried per connected-theory clause.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        max_candidates: Option<usize>,
        /// Most distinct variables in a hypothesis clause.
        #[arg(long)]
        max_vars: Option<usize>,
        /// Most body literals in a connected-theory clause.
        #[arg(long)]
        max_body: Option<usize>,
        /// Most clauses in a connected theory.
        #[arg(long)]
        max_clauses: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Entails { .. } => "entails",
            Command::LeastModel { .. } => "least-model",
            Command::CheckSubsume { .. } => "check-subsume",
            Command::VerifyCt { .. } => "verify-ct",
            Command::DeriveCt { .. } => "derive-ct",
            Command::VerifyTheorem { .. } => "verify-theorem",
            Command::Induce { .. } => "induce",
        }
    }
}

/// A failure before or during a command, with a location where possible.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(Status, Value, String), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn located<T>(path: &Path, r: Result<T, ctis_core::ParseError>) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn argument<T>(flag: &str, r: Result<T, ctis_core::ParseError>) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("--{flag} {e}")))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    located(path, parse_theory(&read(path)?))
}

fn ground_atom(flag: &str, text: &str) -> Result<Atom, Failure> {
    let atom = argument(flag, parse_atom(text))?;
    if !atom.is_ground() {
        return Err(Failure(format!(
            "--{flag} must be a ground atom, got `{atom}`"
        )));
    }
    Ok(atom)
}

fn load_program(args: &ProgramArgs) -> Result<OpenProgram, Failure> {
    let (background, mut abducibles) =
        located(&args.program, parse_program(&read(&args.program)?))?;
    for list in &args.abducible {
        abducibles.extend(argument("abducible", parse_signatures(list))?);
    }
    let constraints = match &args.constraints {
        Some(path) => located(path, parse_constraints(&read(path)?))?,
        None => Vec::new(),
    };
    Ok(OpenProgram::new(background, abducibles, constraints))
}

fn check_arities(program: &OpenProgram, theories: &[&Theory], atom: &Atom) -> Result<(), Failure> {
    let mut table = ArityTable::new();
    table.observe_program(program)?;
    for t in theories {
        table.observe_theory(t)?;
    }
    table.observe_atom(atom)?;
    Ok(())
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn indented(out: &mut String, text: &str) {
    for line in text.lines() {
        let _ = writeln!(out, "  {line}");
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let message = e.render().to_string();
            return RunResult {
                command: String::new(),
                status: if shown { Status::Pass } else { Status::Error },
                payload: Value::Null,
                diagnostics: if shown {
                    Vec::new()
                } else {
                    vec![message.trim_end().to_string()]
                },
                text: if shown { message } else { String::new() },
                json: json && !shown,
            };
        }
    };
    let reasoner = Reasoner::with_depth_bound(cli.depth_bound);
    let command = cli.command.name().to_string();
    let outcome = dispatch(&reasoner, cli.command);
    match outcome {
        Ok((status, payload, text)) => RunResult {
            command,
            status,
            payload,
            diagnostics: Vec::new(),
            text,
            json: cli.json,
        },
        Err(Failure(message)) => RunResult {
            command,
            status: Status::Error,
            payload: Value::Null,
            diagnostics: vec![message],
            text: String::new(),
            json: cli.json,
        },
    }
}

fn dispatch(reasoner: &Reasoner, command: Command) -> Outcome {
    match command {
        Command::Entails { program, query } => entails(reasoner, &program, &query),
        Command::LeastModel { program, oracle } => least_model(reasoner, &program, oracle),
        Command::CheckSubsume {
            c,
            d,
            general,
            specific,
        } => match (c, d, general, specific) {
            (Some(c), Some(d), _, _) => check_subsume_clauses(&c, &d),
            (_, _, Some(g), Some(s)) => check_subsume_theories(&g, &s),
            _ => Err(Failure(
                "check-subsume needs --c and --d, or --general and --specific".into(),
            )),
        },
        Command::VerifyCt {
            program,
            layers,
            example,
        } => verify_ct(reasoner, &program, &layers, &example),
        Command::DeriveCt {
            program,
            hypothesis,
            example,
            output,
        } => derive_ct(reasoner, &program, &hypothesis, &example, output.as_deref()),
        Command::VerifyTheorem {
            runs,
            seed,
            execution,
        } => verify_theorem(reasoner, runs, seed, execution.unwrap_or_default()),
        Command::Induce {
            program,
            example,
            budget,
            max_candidates,
            max_vars,
            max_body,
            max_clauses,
        } => {
            let d = SearchConfig::default();
            let config = SearchConfig {
                generalization_budget: budget.unwrap_or(d.generalization_budget),
                max_candidates: max_candidates.unwrap_or(d.max_candidates),
                max_clause_vars: max_vars.unwrap_or(d.max_clause_vars),
                max_body_literals: max_body.unwrap_or(d.max_body_literals),
                max_theory_clauses: max_clauses.unwrap_or(d.max_theory_clauses),
                max_connected_theories: d.max_connected_theories,
            };
            induce_command(reasoner, &program, &example, &config)
        }
    }
}

fn entails(reasoner: &Reasoner, path: &Path, query: &str) -> Outcome {
    let theory = load_theory(path)?;
    let atom = ground_atom("query", query)?;
    let mut table = ArityTable::new();
    table.observe_theory(&theory)?;
    table.observe_atom(&atom)?;
    let entailed = reasoner.entails_atom(&theory, &atom)?;
    let mut text = String::new();
    let payload = if entailed {
        let support = reasoner.ground_support(&theory, &atom)?;
        let _ = writeln!(text, "entailed: {atom}");
        let _ = writeln!(text, "support:");
        indented(&mut text, &support.to_string());
        json!({ "query": atom.to_string(), "entailed": true, "support": strings(&support) })
    } else {
        let _ = writeln!(text, "not entailed: {atom}");
        json!({ "query": atom.to_string(), "entailed": false })
    };
    Ok((Status::from_bool(entailed), payload, text))
}

fn least_model(reasoner: &Reasoner, path: &Path, oracle: bool) -> Outcome {
    let theory = load_theory(path)?;
    let model = reasoner.least_model(&theory)?;
    let mut text = String::new();
    let mut atoms = Vec::new();
    for (atom, d) in model.iter() {
        let _ = writeln!(text, "{atom}  [depth {}] via {}", d.depth, d.provenance);
        atoms.push(json!({
            "atom": atom.to_string(),
            "depth": d.depth,
            "provenance": d.provenance.to_string(),
        }));
    }
    let mut payload = json!({ "size": model.len(), "atoms": atoms });
    let mut status = Status::Pass;
    if oracle {
        let reference = brute_minimal_model(&theory)?;
        let agrees = reference.iter().eq(model.atoms());
        let _ = writeln!(
            text,
            "oracle: {}",
            if agrees { "agrees" } else { "disagrees" }
        );
        payload["oracle_agrees"] = json!(agrees);
        payload["oracle_atoms"] = json!(strings(&reference));
        status = Status::from_bool(agrees);
    }
    Ok((status, payload, text))
}

fn check_subsume_clauses(c: &str, d: &str) -> Outcome {
    let c = argument("c", parse_clause(c))?;
    let d = argument("d", parse_clause(d))?;
    let theta = clause_subsumes(&c, &d);
    let text = match &theta {
        Some(t) => format!("subsumes: θ={t}\n"),
        None => "does not subsume\n".to_string(),
    };
    let payload = json!({
        "general": c.to_string(),
        "specific": d.to_string(),
        "subsumes": theta.is_some(),
        "theta": theta.as_ref().map(|t| t.iter().map(|(v, x)| (v.to_string(), x.to_string())).collect::<BTreeMap<_, _>>()),
    });
    Ok((Status::from_bool(theta.is_some()), payload, text))
}

fn check_subsume_theories(general: &Path, specific: &Path) -> Outcome {
    let s = load_theory(general)?;
    let t = load_theory(specific)?;
    let mut text = String::new();
    let mut witnesses = Vec::new();
    let mut unsubsumed = Vec::new();
    for d in &t {
        match find_subsumer(&s, d) {
            Some(w) => {
                let _ = writeln!(text, "{}  ⪯  {}  θ={}", w.target, w.general, w.theta);
                witnesses.push(serde_json::to_value(&w).expect("witness serializes"));
            }
            None => {
                let _ = writeln!(text, "{d}  not subsumed");
                unsubsumed.push(d.to_string());
            }
        }
    }
    let subsumes = theory_subsumes(&s, &t).is_some();
    let _ = writeln!(
        text,
        "{}",
        if subsumes {
            "subsumes"
        } else {
            "does not subsume"
        }
    );
    let payload = json!({ "subsumes": subsumes, "witnesses": witnesses, "unsubsumed": unsubsumed });
    Ok((Status::from_bool(subsumes), payload, text))
}

fn report_text(out: &mut String, report: &ctis_core::connected::VerificationReport) {
    let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
    let _ = writeln!(out, "base: {}", mark(report.condition_base));
    for (i, ok) in report.condition_chain.iter().enumerate() {
        let _ = writeln!(out, "chain[{}]: {}", i + 1, mark(*ok));
    }
    let _ = writeln!(out, "example: {}", mark(report.condition_example));
    let _ = writeln!(out, "consistent: {}", mark(report.condition_consistent));
    let _ = writeln!(out, "abducible: {}", mark(report.condition_abducible));
    for f in &report.failures {
        let _ = writeln!(out, "  {} fails on {}", f.condition, f.offending);
    }
}

fn verify_ct(reasoner: &Reasoner, args: &ProgramArgs, layers: &Path, example: &str) -> Outcome {
    let program = load_program(args)?;
    let example = ground_atom("example", example)?;
    let layered = LayeredTheory::new(located(layers, parse_layers(&read(layers)?))?)?;
    check_arities(&program, &[&layered.union()], &example)?;
    let report = verify_connected_theory(reasoner, &program, &example, &layered)?;
    let mut text = String::new();
    report_text(&mut text, &report);
    let _ = writeln!(
        text,
        "{}",
        if report.passes() {
            "connected theory"
        } else {
            "not a connected theory"
        }
    );
    let payload = json!({
        "example": example.to_string(),
        "layers": layered,
        "report": report,
        "connected": report.passes(),
    });
    Ok((Status::from_bool(report.passes()), payload, text))
}

fn derive_ct(
    reasoner: &Reasoner,
    args: &ProgramArgs,
    hypothesis: &Path,
    example: &str,
    output: Option<&Path>,
) -> Outcome {
    let program = load_program(args)?;
    let hypothesis = load_theory(hypothesis)?;
    let example = ground_atom("example", example)?;
    check_arities(&program, &[&hypothesis], &example)?;
    let layered = construct_connected_theory(reasoner, &program, &hypothesis, &example)?;
    if let Some(path) = output {
        std::fs::write(path, layered.to_string())
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    let w = relate(reasoner, &program, &example, &hypothesis, layered)?;
    let mut text = String::new();
    text.push_str(&w.theory.to_string());
    let _ = writeln!(text);
    report_text(&mut text, &w.report);
    for s in &w.subsumption {
        let _ = writeln!(
            text,
            "subsumed: {}  by  {}  θ={}",
            s.target, s.general, s.theta
        );
    }
    for d in &w.unsubsumed {
        let _ = writeln!(text, "not subsumed: {d}");
    }
    for f in &w.entailment {
        let _ = writeln!(
            text,
            "{}: {}",
            if f.entailed {
                "entailed"
            } else {
                "not entailed"
            },
            f.clause
        );
    }
    let _ = writeln!(text, "CTG: {}", if w.ctg() { "holds" } else { "fails" });
    let _ = writeln!(text, "CTIS: {}", if w.ctis() { "holds" } else { "fails" });
    let ok = w.ctg() && w.ctis();
    let payload = json!({
        "example": example.to_string(),
        "connected_theory": w.theory,
        "report": w.report,
        "subsumption": w.subsumption,
        "unsubsumed": strings(&w.unsubsumed),
        "entailment": w.entailment,
        "ctg": w.ctg(),
        "ctis": w.ctis(),
    });
    Ok((Status::from_bool(ok), payload, text))
}

fn verify_theorem(reasoner: &Reasoner, runs: usize, seed: u64, execution: Execution) -> Outcome {
    if runs == 0 {
        return Err(Failure("--runs must be positive".into()));
    }
    let report = run_harness(
        reasoner,
        &HarnessConfig {
            runs,
            seed,
            execution,
        },
    )?;
    let mut layer_histogram: BTreeMap<String, usize> = BTreeMap::new();
    for o in &report.outcomes {
        *layer_histogram.entry(o.layers.to_string()).or_default() += 1;
    }
    let count = |f: fn(&ctis_core::induction::InstanceOutcome) -> bool| {
        report.outcomes.iter().filter(|o| f(o)).count()
    };
    let payload = json!({
        "runs": runs,
        "seed": seed,
        "passed": report.passed,
        "subsumption_witnesses": count(|o| o.subsumption),
        "entailment_witnesses": count(|o| o.entailment),
        "instance_witnesses": count(|o| o.instances),
        "condition_failures": count(|o| !o.conditions),
        "layer_histogram": layer_histogram,
        "counterexamples": report.counterexamples,
    });
    let mut text = format!(
        "{}/{} instances passed (seed {seed})\n",
        report.passed, runs
    );
    let _ = writeln!(
        text,
        "subsumption witnesses {}/{runs}, entailment {}/{runs}, instance {}/{runs}, condition failures {}",
        count(|o| o.subsumption),
        count(|o| o.entailment),
        count(|o| o.instances),
        count(|o| !o.conditions)
    );
    for ce in &report.counterexamples {
        let _ = writeln!(
            text,
            "counterexample #{}: {}",
            ce.index,
            serde_json::to_string(ce).expect("counterexample serializes")
        );
    }
    Ok((Status::from_bool(report.all_passed()), payload, text))
}

fn induce_command(
    reasoner: &Reasoner,
    args: &ProgramArgs,
    example: &str,
    config: &SearchConfig,
) -> Outcome {
    let program = load_program(args)?;
    let example = ground_atom("example", example)?;
    check_arities(&program, &[], &example)?;
    let found = induce(reasoner, &program, &example, config)?;
    let mut text = String::new();
    for (i, h) in found.iter().enumerate() {
        let _ = writeln!(text, "hypothesis {}:", i + 1);
        indented(&mut text, &h.hypothesis.to_string());
        let _ = writeln!(text, "  from connected theory:");
        for (layer, c) in h.connected_theory.clauses() {
            let _ = writeln!(text, "    [{layer}] {c}");
        }
    }
    if found.is_empty() {
        let _ = writeln!(text, "no hypothesis within the search budgets");
    }
    let hypotheses: Vec<Value> = found
        .iter()
        .map(|h| {
            json!({
                "hypothesis": strings(&h.hypothesis),
                "connected_theory": h.connected_theory,
            })
        })
        .collect();
    let payload =
        json!({ "example": example.to_string(), "count": found.len(), "hypotheses": hypotheses });
    Ok((Status::from_bool(!found.is_empty()), payload, text))
}
