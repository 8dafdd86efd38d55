//! Layered connected theories: the type, its verifier, and construction of
//! `T = S ∩ ground(H)` from the ground support of an example.
//!
//! A theory `T = T1 ∪ … ∪ Tn` of ground clauses is an n-layered connected
//! theory for ⟨B, U, I⟩ and a ground atom `e` when
//!
//! * `B ⊨ Tn⁻`,
//! * `B ∪ Tn⁺ ∪ … ∪ T(i+1)⁺ ⊨ Ti⁻` for `1 ≤ i < n`,
//! * `B ∪ Tn⁺ ∪ … ∪ T1⁺ ⊨ e`,
//! * `B ∪ T ∪ I` is consistent,
//!
//! and its clauses define only predicates in `U`. Layer 1 is the top layer,
//! layer `n` the one whose bodies `B` alone entails.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::entailment::{support_in, Reasoner};
use crate::error::{Error, Result};
use crate::subsumption::is_instance;
use crate::syntax::{Atom, Clause, DefiniteGoal, OpenProgram, Symbols, Theory};

/// Nonempty, pairwise disjoint layers of ground clauses, layer 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LayeredTheory {
    #[serde(serialize_with = "crate::report::display_layers")]
    layers: Vec<Vec<Clause>>,
}

impl LayeredTheory {
    pub fn new(layers: Vec<Vec<Clause>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyTheory);
        }
        let mut seen: BTreeMap<&Clause, usize> = BTreeMap::new();
        for (i, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::EmptyLayer(i + 1));
            }
            for c in layer {
                if !c.is_ground() {
                    return Err(Error::NonGround {
                        kind: "clause",
                        item: c.to_string(),
                    });
                }
                if let Some(first) = seen.insert(c, i + 1) {
                    return Err(Error::OverlappingLayers {
                        clause: c.clone(),
                        first,
                        second: i + 1,
                    });
                }
            }
        }
        Ok(LayeredTheory { layers })
    }

    /// Number of layers `n`.
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn layers(&self) -> &[Vec<Clause>] {
        &self.layers
    }

    /// Layer `i`, counting from 1.
    pub fn layer(&self, i: usize) -> &[Clause] {
        &self.layers[i - 1]
    }

    /// `(layer index, clause)` pairs, layer 1 first.
    pub fn clauses(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |c| (i + 1, c)))
    }

    pub fn union(&self) -> Theory {
        self.layers.iter().flatten().cloned().collect()
    }

    /// Heads of layers `from..=n` as a set of atoms.
    fn heads_from(&self, from: usize) -> BTreeSet<Atom> {
        self.layers[from - 1..]
            .iter()
            .flatten()
            .map(|c| c.head.clone())
            .collect()
    }
}

/// Prints the layered-theory file format.
impl fmt::Display for LayeredTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, layer) in self.layers.iter().enumerate() {
            writeln!(f, "#layer {}", i + 1)?;
            for c in layer {
                writeln!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `B ⊨ Tn⁻`
    Base,
    /// `B ∪ Tn⁺ ∪ … ∪ T(i+1)⁺ ⊨ Ti⁻`
    Chain(usize),
    /// `B ∪ Tn⁺ ∪ … ∪ T1⁺ ⊨ e`
    Example,
    /// `B ∪ T ∪ I` consistent
    Consistent,
    /// every clause defines an abducible predicate
    Abducible,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Base => f.write_str("base"),
            Condition::Chain(i) => write!(f, "chain[{i}]"),
            Condition::Example => f.write_str("example"),
            Condition::Consistent => f.write_str("consistent"),
            Condition::Abducible => f.write_str("abducible"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Offense {
    #[serde(serialize_with = "crate::report::display")]
    Atom(Atom),
    #[serde(serialize_with = "crate::report::display")]
    Clause(Clause),
    #[serde(serialize_with = "crate::report::display")]
    Goal(DefiniteGoal),
}

impl fmt::Display for Offense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offense::Atom(a) => write!(f, "{a}"),
            Offense::Clause(c) => write!(f, "{c}"),
            Offense::Goal(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub condition: Condition,
    pub offending: Offense,
}

/// Outcome of checking each connected-theory condition separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub condition_base: bool,
    /// Entry `i - 1` covers layer `i`, for `1 ≤ i < n`.
    pub condition_chain: Vec<bool>,
    pub condition_example: bool,
    pub condition_consistent: bool,
    pub condition_abducible: bool,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    /// The four entailment and consistency conditions.
    pub fn entailment_conditions_hold(&self) -> bool {
        self.condition_base
            && self.condition_chain.iter().all(|&c| c)
            && self.condition_example
            && self.condition_consistent
    }

    /// All conditions, including the abducible-predicate restriction.
    pub fn passes(&self) -> bool {
        self.entailment_conditions_hold() && self.condition_abducible
    }

    /// The distinct conditions that failed.
    pub fn failed_conditions(&self) -> BTreeSet<Condition> {
        self.failures.iter().map(|f| f.condition).collect()
    }
}

fn missing_atoms(
    reasoner: &Reasoner,
    theory: &Theory,
    atoms: &BTreeSet<Atom>,
    symbols: &Symbols,
) -> Result<Vec<Atom>> {
    let model = reasoner.least_model_with(theory, symbols)?;
    Ok(atoms
        .iter()
        .filter(|a| !model.contains(a))
        .cloned()
        .collect())
}

/// Checks every condition for `layered` against ⟨B, U, I⟩ and `example`.
pub fn verify_connected_theory(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    layered: &LayeredTheory,
) -> Result<VerificationReport> {
    if !example.is_ground() {
        return Err(Error::NonGround {
            kind: "atom",
            item: example.to_string(),
        });
    }
    let background = &program.background;
    let n = layered.len();
    let mut symbols = Symbols::new();
    symbols.add_theory(&layered.union());
    symbols.add_atom(example);
    let mut failures = Vec::new();

    let base_body: BTreeSet<Atom> = layered
        .layer(n)
        .iter()
        .flat_map(|c| c.body.iter().cloned())
        .collect();
    let missing = missing_atoms(reasoner, background, &base_body, &symbols)?;
    let condition_base = missing.is_empty();
    failures.extend(missing.into_iter().map(|a| Failure {
        condition: Condition::Base,
        offending: Offense::Atom(a),
    }));

    let mut condition_chain = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let theory = background.with_facts(&layered.heads_from(i + 1));
        let body: BTreeSet<Atom> = layered
            .layer(i)
            .iter()
            .flat_map(|c| c.body.iter().cloned())
            .collect();
        let missing = missing_atoms(reasoner, &theory, &body, &symbols)?;
        condition_chain.push(missing.is_empty());
        failures.extend(missing.into_iter().map(|a| Failure {
            condition: Condition::Chain(i),
            offending: Offense::Atom(a),
        }));
    }

    let theory = background.with_facts(&layered.heads_from(1));
    let condition_example = reasoner
        .least_model_with(&theory, &symbols)?
        .contains(example);
    if !condition_example {
        failures.push(Failure {
            condition: Condition::Example,
            offending: Offense::Atom(example.clone()),
        });
    }

    let violation = reasoner.first_violation(background, &layered.union(), &program.constraints)?;
    let condition_consistent = violation.is_none();
    failures.extend(violation.map(|g| Failure {
        condition: Condition::Consistent,
        offending: Offense::Goal(g),
    }));

    let mut condition_abducible = true;
    for (_, c) in layered.clauses() {
        if !program.is_abducible(&c.head) {
            condition_abducible = false;
            failures.push(Failure {
                condition: Condition::Abducible,
                offending: Offense::Clause(c.clone()),
            });
        }
    }

    Ok(VerificationReport {
        condition_base,
        condition_chain,
        condition_example,
        condition_consistent,
        condition_abducible,
        failures,
    })
}

/// Splits a ground theory into layers.
///
/// Each clause gets the round at which it can first fire in the least model
/// of `B ∪ T` (one more than the deepest of its body atoms). Distinct rounds
/// are ranked from the highest down, so layer 1 holds the clauses that fire
/// last and layer `n` those whose bodies `B` alone entails.
pub fn assign_layers(
    reasoner: &Reasoner,
    theory: &Theory,
    background: &Theory,
) -> Result<LayeredTheory> {
    if theory.is_empty() {
        return Err(Error::EmptyTheory);
    }
    if let Some(c) = theory.iter().find(|c| !c.is_ground()) {
        return Err(Error::NonGround {
            kind: "clause",
            item: c.to_string(),
        });
    }
    let model = reasoner.least_model(&background.union(theory))?;
    let mut by_round: BTreeMap<usize, Vec<Clause>> = BTreeMap::new();
    for c in theory {
        let mut round = 1;
        for b in &c.body {
            match model.depth(b) {
                Some(d) => round = round.max(d + 1),
                None => return Err(Error::UnusedClause(c.clone())),
            }
        }
        by_round.entry(round).or_default().push(c.clone());
    }
    LayeredTheory::new(by_round.into_values().rev().collect())
}

/// Builds `T = S ∩ ground(H)` where `S` is the ground support of `example`
/// in `B ∪ H`, and layers it.
pub fn construct_connected_theory(
    reasoner: &Reasoner,
    program: &OpenProgram,
    hypothesis: &Theory,
    example: &Atom,
) -> Result<LayeredTheory> {
    if !example.is_ground() {
        return Err(Error::NonGround {
            kind: "atom",
            item: example.to_string(),
        });
    }
    let background = &program.background;
    let combined = background.union(hypothesis);
    let mut extra = Symbols::new();
    extra.add_atom(example);
    let model = reasoner.least_model_with(&combined, &extra)?;
    if !model.contains(example) {
        return Err(Error::NotEntailed(example.clone()));
    }
    if !reasoner.is_consistent(background, hypothesis, &program.constraints)? {
        return Err(Error::Inconsistent);
    }
    let support = support_in(&model, example)?;
    let mut theory = Theory::new();
    for d in &support {
        for c in hypothesis {
            if is_instance(c, d)?.is_some() {
                theory.insert(d.clone());
                break;
            }
        }
    }
    if theory.is_empty() {
        return Err(Error::NoHypothesisClause(example.clone()));
    }
    assign_layers(reasoner, &theory, background)
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

    fn layers(rows: &[&[&str]]) -> LayeredTheory {
        LayeredTheory::new(
            rows.iter()
                .map(|l| l.iter().map(|c| parse_clause(c).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn at(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    #[test]
    fn bird_theory_passes() {
        let p = program("bird(a).", "flies/1", "");
        let lt = layers(&[&["flies(a) :- bird(a)."]]);
        let r = verify_connected_theory(&Reasoner::new(), &p, &at("flies(a)"), &lt).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!(r.condition_chain.is_empty());
    }

    #[test]
    fn wrong_body_fails_base() {
        let p = program("bird(a).", "flies/1", "");
        let lt = layers(&[&["flies(a) :- bird(b)."]]);
        let r = verify_connected_theory(&Reasoner::new(), &p, &at("flies(a)"), &lt).unwrap();
        assert!(!r.condition_base);
        assert!(r.condition_example && r.condition_consistent && r.condition_abducible);
        assert_eq!(r.failures[0].offending, Offense::Atom(at("bird(b)")));
    }

    #[test]
    fn two_layers_pass() {
        let p = program("a.", "b/0, c/0", "");
        let lt = layers(&[&["c :- b."], &["b :- a."]]);
        let r = verify_connected_theory(&Reasoner::new(), &p, &at("c"), &lt).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.condition_chain, vec![true]);
    }

    #[test]
    fn layers_in_wrong_order_fail_chain_and_base() {
        let p = program("a.", "b/0, c/0", "");
        let lt = layers(&[&["b :- a."], &["c :- b."]]);
        let r = verify_connected_theory(&Reasoner::new(), &p, &at("c"), &lt).unwrap();
        assert!(!r.condition_base);
        assert!(r.condition_example);
    }

    #[test]
    fn layered_theory_invariants() {
        assert!(matches!(
            LayeredTheory::new(vec![]),
            Err(Error::EmptyTheory)
        ));
        assert!(matches!(
            LayeredTheory::new(vec![vec![]]),
            Err(Error::EmptyLayer(1))
        ));
        let c = parse_clause("p(a).").unwrap();
        assert!(matches!(
            LayeredTheory::new(vec![vec![c.clone()], vec![c]]),
            Err(Error::OverlappingLayers {
                first: 1,
                second: 2,
                ..
            })
        ));
        assert!(matches!(
            LayeredTheory::new(vec![vec![parse_clause("p(X).").unwrap()]]),
            Err(Error::NonGround { .. })
        ));
    }

    #[test]
    fn assign_single_layer() {
        let t = parse_theory("flies(a) :- bird(a).").unwrap();
        let lt = assign_layers(&Reasoner::new(), &t, &parse_theory("bird(a).").unwrap()).unwrap();
        assert_eq!(lt.len(), 1);
    }

    #[test]
    fn assign_two_layers() {
        let t = parse_theory("b :- a. c :- b.").unwrap();
        let lt = assign_layers(&Reasoner::new(), &t, &parse_theory("a.").unwrap()).unwrap();
        assert_eq!(lt, layers(&[&["c :- b."], &["b :- a."]]));
        let p = program("a.", "b/0, c/0", "");
        assert!(verify_connected_theory(&Reasoner::new(), &p, &at("c"), &lt)
            .unwrap()
            .passes());
    }

    #[test]
    fn assign_rejects_empty_and_unused() {
        let r = Reasoner::new();
        assert!(matches!(
            assign_layers(&r, &Theory::new(), &Theory::new()),
            Err(Error::EmptyTheory)
        ));
        let t = parse_theory("b :- z.").unwrap();
        assert!(matches!(
            assign_layers(&r, &t, &parse_theory("a.").unwrap()),
            Err(Error::UnusedClause(_))
        ));
    }

    #[test]
    fn construct_bird() {
        let p = program("bird(a).", "flies/1", "");
        let h = parse_theory("flies(X) :- bird(X).").unwrap();
        let lt = construct_connected_theory(&Reasoner::new(), &p, &h, &at("flies(a)")).unwrap();
        assert_eq!(lt, layers(&[&["flies(a) :- bird(a)."]]));
    }

    #[test]
    fn construct_two_layers() {
        let p = program("a.", "b/0, c/0", "");
        let h = parse_theory("b :- a. c :- b.").unwrap();
        let lt = construct_connected_theory(&Reasoner::new(), &p, &h, &at("c")).unwrap();
        assert_eq!(lt, layers(&[&["c :- b."], &["b :- a."]]));
    }

    #[test]
    fn construct_with_ground_hypothesis_and_empty_background() {
        let p = program("", "p/0, q/0, r/0", "");
        let h = parse_theory("q. p :- q. r :- p.").unwrap();
        let lt = construct_connected_theory(&Reasoner::new(), &p, &h, &at("r")).unwrap();
        assert_eq!(lt.union(), h);
        assert_eq!(lt.len(), 3);
    }

    #[test]
    fn construct_preconditions() {
        let r = Reasoner::new();
        let p = program("bird(a).", "flies/1", ":- flies(a).");
        let h = parse_theory("flies(X) :- bird(X).").unwrap();
        assert!(matches!(
            construct_connected_theory(&r, &p, &h, &at("flies(a)")),
            Err(Error::Inconsistent)
        ));
        assert!(matches!(
            construct_connected_theory(&r, &p, &h, &at("flies(b)")),
            Err(Error::NotEntailed(_))
        ));
        let p = program("bird(a).", "flies/1", "");
        assert!(matches!(
            construct_connected_theory(&r, &p, &h, &at("bird(a)")),
            Err(Error::NoHypothesisClause(_))
        ));
    }

    #[test]
    fn display_is_the_layered_file_format() {
        let lt = layers(&[&["c :- b."], &["b :- a."]]);
        assert_eq!(lt.to_string(), "#layer 1\nc :- b.\n#layer 2\nb :- a.\n");
        let reparsed = crate::syntax::parse_layers(&lt.to_string()).unwrap();
        assert_eq!(LayeredTheory::new(reparsed).unwrap(), lt);
    }
}
