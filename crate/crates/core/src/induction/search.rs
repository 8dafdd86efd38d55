//! Hypothesis search: enumerate small connected theories over the abducible
//! predicates, generalize each clause by inverse subsumption, and keep the
//! combinations that are inductive solutions.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Serialize;

use super::check_inductive_solution;
use crate::connected::{assign_layers, verify_connected_theory, LayeredTheory};
use crate::entailment::Reasoner;
use crate::error::{Error, Result};
use crate::subsumption::{Generalizations, Substitution};
use crate::syntax::{ground_instances, Atom, Clause, OpenProgram, Symbols, Term, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Generalizations tried per connected-theory clause.
    pub generalization_budget: usize,
    /// Hypotheses returned at most.
    pub max_candidates: usize,
    /// Generalizations with more distinct variables are skipped.
    pub max_clause_vars: usize,
    /// Body literals per connected-theory clause.
    pub max_body_literals: usize,
    /// Clauses per connected theory.
    pub max_theory_clauses: usize,
    /// Candidate connected theories examined before giving up.
    pub max_connected_theories: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            generalization_budget: 4,
            max_candidates: 10,
            max_clause_vars: 4,
            max_body_literals: 2,
            max_theory_clauses: 2,
            max_connected_theories: 2000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("generalization budget", self.generalization_budget),
            ("max candidates", self.max_candidates),
            ("max theory clauses", self.max_theory_clauses),
            ("max connected theories", self.max_connected_theories),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// A hypothesis together with the connected theory it generalizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Induced {
    #[serde(serialize_with = "crate::report::display")]
    pub hypothesis: Theory,
    pub connected_theory: LayeredTheory,
}

/// Whether the example's predicate is abducible or depends on one through
/// the clauses of `B`.
fn reaches_abducible(program: &OpenProgram, example: &Atom) -> bool {
    let mut deps: BTreeMap<(String, usize), BTreeSet<(String, usize)>> = BTreeMap::new();
    for c in &program.background {
        let key = (c.head.predicate.clone(), c.head.arity());
        let entry = deps.entry(key).or_default();
        for b in &c.body {
            entry.insert((b.predicate.clone(), b.arity()));
        }
    }
    let abducible: BTreeSet<(String, usize)> = program
        .abducibles
        .iter()
        .map(|s| (s.name.clone(), s.arity))
        .collect();
    let mut seen = BTreeSet::new();
    let mut stack = vec![(example.predicate.clone(), example.arity())];
    while let Some(sig) = stack.pop() {
        if abducible.contains(&sig) {
            return true;
        }
        if let Some(next) = deps.get(&sig) {
            stack.extend(next.iter().filter(|s| !seen.contains(*s)).cloned());
        }
        seen.insert(sig);
    }
    false
}

/// Sets of at most `max` atoms from `pool`, by size then lexicographically.
fn bounded_subsets(pool: &[Atom], max: usize) -> Vec<Vec<Atom>> {
    (0..=max.min(pool.len()))
        .flat_map(|k| pool.iter().cloned().combinations(k))
        .collect()
}

struct Search<'a> {
    reasoner: &'a Reasoner,
    program: &'a OpenProgram,
    example: &'a Atom,
    symbols: Symbols,
}

impl Search<'_> {
    fn model_atoms(&self, theory: &Theory) -> Result<Vec<Atom>> {
        Ok(self
            .reasoner
            .least_model_with(theory, &self.symbols)?
            .atoms()
            .cloned()
            .collect())
    }

    fn derives_example(&self, heads: &[Atom]) -> Result<bool> {
        let theory = self.program.background.with_facts(heads);
        Ok(self
            .reasoner
            .least_model_with(&theory, &self.symbols)?
            .contains(self.example))
    }

    /// `Some(layered)` if `theory` is a connected theory.
    fn connected(&self, theory: &Theory) -> Result<Option<LayeredTheory>> {
        let layered = match assign_layers(self.reasoner, theory, &self.program.background) {
            Ok(l) => l,
            Err(Error::UnusedClause(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let report = verify_connected_theory(self.reasoner, self.program, self.example, &layered)?;
        Ok(report.passes().then_some(layered))
    }

    /// A connected theory none of whose one-clause-smaller subsets is one.
    fn irredundant(&self, theory: &Theory) -> Result<Option<LayeredTheory>> {
        let Some(layered) = self.connected(theory)? else {
            return Ok(None);
        };
        if theory.len() > 1 {
            for skip in 0..theory.len() {
                let smaller: Theory = theory
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, c)| c.clone())
                    .collect();
                if self.connected(&smaller)?.is_some() {
                    return Ok(None);
                }
            }
        }
        Ok(Some(layered))
    }
}

/// Searches for inductive solutions of `(program, example)` that are
/// CTIS-derivable from small connected theories.
///
/// Connected theories are enumerated smallest first: by number of clauses,
/// then total body size, then head set and bodies in lexicographic order.
/// Each clause contributes its first `generalization_budget`
/// generalizations with at most `max_clause_vars` variables; combinations
/// are tried by increasing index sum. Returns an empty list when nothing
/// fits the budgets.
pub fn induce(
    reasoner: &Reasoner,
    program: &OpenProgram,
    example: &Atom,
    config: &SearchConfig,
) -> Result<Vec<Induced>> {
    config.validate()?;
    if !example.is_ground() {
        return Err(Error::NonGround {
            kind: "atom",
            item: example.to_string(),
        });
    }
    if !reaches_abducible(program, example) {
        return Err(Error::Unreachable(example.clone()));
    }
    if reasoner.entails_atom(&program.background, example)? {
        return Err(Error::AlreadyEntailed(example.clone()));
    }

    let mut symbols = Symbols::of_theory(&program.background);
    symbols.add_atom(example);
    program.constraints.iter().for_each(|g| symbols.add_goal(g));
    let universe: Vec<Term> = symbols.universe(reasoner.depth_bound())?;
    let search = Search {
        reasoner,
        program,
        example,
        symbols,
    };

    let mut abducible_atoms: Vec<Atom> = Vec::new();
    for sig in &program.abducibles {
        let pattern = Atom::new(
            sig.name.clone(),
            (0..sig.arity).map(|i| Term::var(format!("A{i}"))).collect(),
        );
        for c in ground_instances(&Clause::fact(pattern), &universe)? {
            abducible_atoms.push(c.head);
        }
    }
    abducible_atoms.sort();

    let mut results: Vec<Induced> = Vec::new();
    let mut seen: BTreeSet<BTreeSet<Clause>> = BTreeSet::new();
    let mut examined = 0;
    for k in 1..=config.max_theory_clauses.min(abducible_atoms.len()) {
        let head_sets: Vec<Vec<Atom>> = abducible_atoms
            .iter()
            .cloned()
            .combinations(k)
            .filter_map(|hs| match search.derives_example(&hs) {
                Ok(true) => Some(Ok(hs)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<_>>()?;
        // body options per head of each head set
        let mut options: Vec<Vec<Vec<Vec<Atom>>>> = Vec::new();
        for hs in &head_sets {
            let mut per_head = Vec::new();
            for (i, h) in hs.iter().enumerate() {
                let others: Vec<Atom> = hs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, a)| a.clone())
                    .collect();
                let pool: Vec<Atom> = search
                    .model_atoms(&program.background.with_facts(&others))?
                    .into_iter()
                    .filter(|a| a != h)
                    .collect();
                per_head.push(bounded_subsets(&pool, config.max_body_literals));
            }
            options.push(per_head);
        }
        for total in 0..=k * config.max_body_literals {
            for (hs, per_head) in head_sets.iter().zip(&options) {
                let combos = per_head
                    .iter()
                    .map(|bodies| 0..bodies.len())
                    .multi_cartesian_product()
                    .filter(|pick| {
                        pick.iter()
                            .zip(per_head)
                            .map(|(&i, b)| b[i].len())
                            .sum::<usize>()
                            == total
                    });
                for pick in combos {
                    if examined == config.max_connected_theories {
                        return Ok(results);
                    }
                    examined += 1;
                    let theory: Theory = hs
                        .iter()
                        .zip(&pick)
                        .zip(per_head)
                        .map(|((h, &i), bodies)| Clause::new(h.clone(), bodies[i].iter().cloned()))
                        .collect();
                    if theory.len() < k {
                        continue;
                    }
                    let Some(layered) = search.irredundant(&theory)? else {
                        continue;
                    };
                    if collect_hypotheses(
                        &search,
                        config,
                        &theory,
                        &layered,
                        &mut seen,
                        &mut results,
                    )? {
                        return Ok(results);
                    }
                }
            }
        }
    }
    Ok(results)
}

/// Renames variables to `X, Y, Z, W, V, U, X1, …` by first occurrence.
fn readable(clause: &Clause) -> Clause {
    const NAMES: [&str; 6] = ["X", "Y", "Z", "W", "V", "U"];
    let theta: Substitution = clause
        .vars()
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let name = match i / NAMES.len() {
                0 => NAMES[i].to_string(),
                round => format!("{}{round}", NAMES[i % NAMES.len()]),
            };
            (v.to_string(), Term::var(name))
        })
        .collect();
    theta.apply_clause(clause)
}

/// Adds the inductive solutions generalizing `theory` to `results`;
/// returns `true` once `max_candidates` is reached.
fn collect_hypotheses(
    search: &Search<'_>,
    config: &SearchConfig,
    theory: &Theory,
    layered: &LayeredTheory,
    seen: &mut BTreeSet<BTreeSet<Clause>>,
    results: &mut Vec<Induced>,
) -> Result<bool> {
    let choices: Vec<Vec<Clause>> = theory
        .iter()
        .map(|d| {
            Generalizations::new(d)
                .filter(|c| c.vars().len() <= config.max_clause_vars)
                .take(config.generalization_budget)
                .collect()
        })
        .collect();
    let mut picks: Vec<Vec<usize>> = choices
        .iter()
        .map(|c| 0..c.len())
        .multi_cartesian_product()
        .collect();
    picks.sort_by_key(|p| (p.iter().sum::<usize>(), p.clone()));
    for pick in picks {
        let hypothesis: Theory = pick
            .iter()
            .zip(&choices)
            .map(|(&i, c)| readable(&c[i]))
            .collect();
        if !seen.insert(hypothesis.iter().map(Clause::canonical).collect()) {
            continue;
        }
        if check_inductive_solution(search.reasoner, search.program, search.example, &hypothesis)? {
            results.push(Induced {
                hypothesis,
                connected_theory: layered.clone(),
            });
            if results.len() == config.max_candidates {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
