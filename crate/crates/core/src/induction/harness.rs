//! Property harness: on random inductive solutions, the connected theory
//! `T = S ∩ ground(H)` passes every condition, lies in `ground(H)`, and is
//! both entailed and subsumed clause-wise by `H`.

use serde::Serialize;

use super::{verify_ctis, CtisWitness};
use crate::connected::Condition;
use crate::entailment::Reasoner;
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::gen::{instance_rng, random_instance, Instance};
use crate::subsumption::is_instance;
use crate::syntax::Clause;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarnessConfig {
    pub runs: usize,
    pub seed: u64,
    pub execution: Execution,
}

/// Per-instance result. Every flag is `true` on a passing instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub layers: usize,
    pub clauses: usize,
    /// All connected-theory conditions hold for the constructed `T`.
    pub conditions: bool,
    /// Every clause of `T` is an instance of a clause of `H`.
    pub instances: bool,
    /// `H ⊨ D` for every clause `D` of `T`.
    pub entailment: bool,
    /// `H ⪰ D` for every clause `D` of `T`.
    pub subsumption: bool,
}

impl InstanceOutcome {
    pub fn passed(&self) -> bool {
        self.conditions && self.instances && self.entailment && self.subsumption
    }
}

/// Everything needed to replay a failing instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub program: String,
    pub abducibles: Vec<String>,
    pub constraints: Vec<String>,
    pub example: String,
    pub hypothesis: String,
    pub connected_theory: Option<String>,
    pub failing_clause: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarnessReport {
    pub runs: usize,
    pub seed: u64,
    pub passed: usize,
    pub outcomes: Vec<InstanceOutcome>,
    pub counterexamples: Vec<Counterexample>,
}

impl HarnessReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.runs
    }
}

fn bundle(
    index: usize,
    inst: &Instance,
    witness: Option<&CtisWitness>,
    failing: Option<&Clause>,
    reason: String,
) -> Counterexample {
    let p = &inst.program;
    Counterexample {
        index,
        program: p.background.to_string(),
        abducibles: p.abducibles.iter().map(ToString::to_string).collect(),
        constraints: p.constraints.iter().map(ToString::to_string).collect(),
        example: inst.example.to_string(),
        hypothesis: inst.hypothesis.to_string(),
        connected_theory: witness.map(|w| w.theory.to_string()),
        failing_clause: failing.map(ToString::to_string),
        reason,
    }
}

fn check(
    reasoner: &Reasoner,
    index: usize,
    inst: &Instance,
) -> (InstanceOutcome, Option<Counterexample>) {
    let failed = || InstanceOutcome {
        index,
        layers: 0,
        clauses: 0,
        conditions: false,
        instances: false,
        entailment: false,
        subsumption: false,
    };
    let witness = match verify_ctis(reasoner, &inst.program, &inst.example, &inst.hypothesis) {
        Ok(w) => w,
        Err(e) => {
            let reason = format!("construction failed: {e}");
            return (failed(), Some(bundle(index, inst, None, None, reason)));
        }
    };
    let mut not_instance = None;
    for (_, d) in witness.theory.clauses() {
        let mut found = false;
        for c in &inst.hypothesis {
            match is_instance(c, d) {
                Ok(Some(_)) => {
                    found = true;
                    break;
                }
                Ok(None) => {}
                Err(e) => {
                    let reason = format!("instance check failed: {e}");
                    return (
                        failed(),
                        Some(bundle(index, inst, Some(&witness), Some(d), reason)),
                    );
                }
            }
        }
        if !found {
            not_instance = Some(d.clone());
            break;
        }
    }
    let outcome = InstanceOutcome {
        index,
        layers: witness.theory.len(),
        clauses: witness.theory.clauses().count(),
        conditions: witness.report.passes(),
        instances: not_instance.is_none(),
        entailment: witness.entailment_total(),
        subsumption: witness.subsumption_total(),
    };
    if outcome.passed() {
        return (outcome, None);
    }
    let (failing, reason) = if let Some(f) = witness.report.failures.first() {
        let conditions: Vec<String> = witness
            .report
            .failed_conditions()
            .iter()
            .map(Condition::to_string)
            .collect();
        (
            None,
            format!(
                "conditions failed: {} (first offender {})",
                conditions.join(", "),
                f.offending
            ),
        )
    } else if let Some(d) = not_instance {
        (
            Some(d),
            "clause is not an instance of any hypothesis clause".to_string(),
        )
    } else if let Some(d) = witness.unsubsumed.first() {
        (
            Some(d.clone()),
            "clause is subsumed by no hypothesis clause".to_string(),
        )
    } else {
        let d = witness
            .entailment
            .iter()
            .find(|f| !f.entailed)
            .map(|f| f.clause.clone());
        (d, "clause is not entailed by the hypothesis".to_string())
    };
    let ce = bundle(index, inst, Some(&witness), failing.as_ref(), reason);
    (outcome, Some(ce))
}

/// Generates `runs` instances from independent streams of `seed` and
/// checks each. Output order and content do not depend on the execution
/// mode.
pub fn run_harness(reasoner: &Reasoner, config: &HarnessConfig) -> Result<HarnessReport> {
    let results = map_indexed(config.execution, config.runs, |i| {
        let inst = random_instance(&mut instance_rng(config.seed, i as u64), reasoner);
        check(reasoner, i, &inst)
    });
    let mut outcomes = Vec::with_capacity(results.len());
    let mut counterexamples = Vec::new();
    for (outcome, ce) in results {
        outcomes.push(outcome);
        counterexamples.extend(ce);
    }
    Ok(HarnessReport {
        runs: config.runs,
        seed: config.seed,
        passed: outcomes.iter().filter(|o| o.passed()).count(),
        outcomes,
        counterexamples,
    })
}
