//! Derivability of hypotheses from connected theories: CTG (`H ⊨ T`),
//! CTIS (`H ⪰ T`), the property harness that checks every inductive
//! solution is CTIS-derivable, and a small hypothesis search.

mod harness;
mod search;

use serde::Serialize;

pub use harness::{run_harness, Counterexample, HarnessConfig, HarnessReport, InstanceOutcome};
pub use search::{induce, Induced, SearchConfig};

use crate::connected::{
    construct_connected_theory, verify_connected_theory, LayeredTheory, VerificationReport,
};
use crate::entailment::Reasoner;
use crate::error::{Error, Result};
use crate::subsumption::{find_subsumer, SubsumptionWitness};
use crate::syntax::{Atom, Clause, OpenProgram, Symbols, Theory};

/// `B ∪ H ⊨ e` and `B ∪ H ∪ I` is consistent.
pub fn check_inductive_solution(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    hypothesis: &Theory,
) -> Result<bool> {
    if !example.is_ground() {
        return Err(Error::NonGround {
            kind: "atom",
            item: example.to_string(),
        });
    }
    let combined = program.background.union(hypothesis);
    let mut extra = Symbols::new();
    extra.add_atom(example);
    Ok(reasoner
        .least_model_with(&combined, &extra)?
        .contains(example)
        && reasoner.is_consistent(&program.background, hypothesis, &program.constraints)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntailmentFlag {
    #[serde(serialize_with = "crate::report::display")]
    pub clause: Clause,
    pub entailed: bool,
}

/// How a hypothesis relates to one connected theory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CtisWitness {
    pub theory: LayeredTheory,
    pub report: VerificationReport,
    /// One entry per clause of `T` that some clause of `H` subsumes.
    pub subsumption: Vec<SubsumptionWitness>,
    /// Clauses of `T` that no clause of `H` subsumes.
    #[serde(serialize_with = "crate::report::display_seq")]
    pub unsubsumed: Vec<Clause>,
    /// `H ⊨ D` for each clause `D` of `T`.
    pub entailment: Vec<EntailmentFlag>,
}

impl CtisWitness {
    pub fn subsumption_total(&self) -> bool {
        self.unsubsumed.is_empty()
    }

    pub fn entailment_total(&self) -> bool {
        self.entailment.iter().all(|f| f.entailed)
    }

    /// `T` is a connected theory and `H ⊨ T`.
    pub fn ctg(&self) -> bool {
        self.report.passes() && self.entailment_total()
    }

    /// `T` is a connected theory and `H ⪰ T`.
    pub fn ctis(&self) -> bool {
        self.report.passes() && self.subsumption_total()
    }
}

/// Relates `hypothesis` to a given layered theory: verifies the connected
/// theory conditions, then looks for a subsumer and checks entailment for
/// every clause.
pub fn relate(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    hypothesis: &Theory,
    theory: LayeredTheory,
) -> Result<CtisWitness> {
    let report = verify_connected_theory(reasoner, program, example, &theory)?;
    let mut subsumption = Vec::new();
    let mut unsubsumed = Vec::new();
    let mut entailment = Vec::new();
    for (_, d) in theory.clauses() {
        match find_subsumer(hypothesis, d) {
            Some(w) => subsumption.push(w),
            None => unsubsumed.push(d.clone()),
        }
        entailment.push(EntailmentFlag {
            clause: d.clone(),
            entailed: reasoner.entails_ground_clause(hypothesis, d)?,
        });
    }
    Ok(CtisWitness {
        theory,
        report,
        subsumption,
        unsubsumed,
        entailment,
    })
}

fn constructed(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    hypothesis: &Theory,
) -> Result<CtisWitness> {
    let theory = construct_connected_theory(reasoner, program, hypothesis, example)?;
    relate(reasoner, program, example, hypothesis, theory)
}

/// Builds `T = S ∩ ground(H)` and checks `H ⊨ T` clause-wise; CTG holds
/// iff [`CtisWitness::ctg`].
pub fn derive_ctg(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    hypothesis: &Theory,
) -> Result<CtisWitness> {
    constructed(reasoner, program, example, hypothesis)
}

/// Builds `T = S ∩ ground(H)` and finds a subsumer in `H` for every clause
/// of `T`. Every inductive solution whose clauses define abducible
/// predicates should come back with [`CtisWitness::ctis`] true.
pub fn verify_ctis(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    hypothesis: &Theory,
) -> Result<CtisWitness> {
    constructed(reasoner, program, example, hypothesis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{
        parse_atom, parse_clause, parse_constraints, parse_signatures, parse_theory,
    };

    fn program(b: &str, u: &str, i: &str) -> OpenProgram {
        OpenProgram::new(
            parse_theory(b).unwrap(),
            parse_signatures(u).unwrap(),
            parse_constraints(i).unwrap(),
        )
    }

    fn th(s: &str) -> Theory {
        parse_theory(s).unwrap()
    }

    fn at(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    #[test]
    fn inductive_solutions() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1", "");
        assert!(
            check_inductive_solution(&r, &p, &at("flies(a)"), &th("flies(X) :- bird(X).")).unwrap()
        );
        assert!(!check_inductive_solution(&r, &p, &at("flies(a)"), &Theory::new()).unwrap());
        let p = program("bird(a).", "flies/1", ":- flies(a).");
        assert!(
            !check_inductive_solution(&r, &p, &at("flies(a)"), &th("flies(X) :- bird(X)."))
                .unwrap()
        );
    }

    #[test]
    fn bird_ctis_witness() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1", "");
        let w = verify_ctis(&r, &p, &at("flies(a)"), &th("flies(X) :- bird(X).")).unwrap();
        assert!(w.ctis() && w.ctg());
        assert_eq!(w.subsumption.len(), 1);
        assert_eq!(w.subsumption[0].target.to_string(), "flies(a) :- bird(a).");
        assert_eq!(w.subsumption[0].theta.to_string(), "{X↦a}");
    }

    #[test]
    fn two_layer_ctg() {
        let r = Reasoner::new();
        let p = program("a.", "b/0, c/0", "");
        let w = derive_ctg(&r, &p, &at("c"), &th("b :- a. c :- b.")).unwrap();
        assert_eq!(w.theory.len(), 2);
        assert_eq!(w.entailment.len(), 2);
        assert!(w.ctg() && w.ctis());
    }

    #[test]
    fn ground_hypothesis_is_its_own_witness() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1", "");
        let w = verify_ctis(&r, &p, &at("flies(a)"), &th("flies(a) :- bird(a).")).unwrap();
        assert!(w.ctis());
        assert!(w.subsumption[0].theta.is_empty());
        assert_eq!(w.subsumption[0].general, w.subsumption[0].target);
    }

    #[test]
    fn hand_supplied_theory_not_entailed() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1, q/1", "");
        let lt = LayeredTheory::new(vec![vec![
            parse_clause("flies(a) :- bird(a).").unwrap(),
            parse_clause("q(a).").unwrap(),
        ]])
        .unwrap();
        let w = relate(&r, &p, &at("flies(a)"), &th("flies(X) :- bird(X)."), lt).unwrap();
        assert!(w.report.passes());
        assert!(!w.ctg() && !w.ctis());
        let flag = w
            .entailment
            .iter()
            .find(|f| f.clause.to_string() == "q(a).")
            .unwrap();
        assert!(!flag.entailed);
        assert_eq!(w.unsubsumed.len(), 1);
    }

    #[test]
    fn preconditions() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1", "");
        assert!(matches!(
            verify_ctis(&r, &p, &at("flies(b)"), &th("flies(X) :- bird(X).")),
            Err(Error::NotEntailed(_))
        ));
        let p = program("bird(a).", "flies/1", ":- flies(a).");
        assert!(matches!(
            derive_ctg(&r, &p, &at("flies(a)"), &th("flies(X) :- bird(X).")),
            Err(Error::Inconsistent)
        ));
    }
}
