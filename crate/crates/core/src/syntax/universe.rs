use std::collections::{BTreeMap, BTreeSet};

use super::clause::{Clause, DefiniteGoal};
use super::term::{Atom, Term};
use super::theory::Theory;
use crate::error::{Error, Result};

/// Constants and proper functors occurring in some collection of formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub constants: BTreeSet<String>,
    pub functors: BTreeMap<String, usize>,
}

impl Symbols {
    pub fn new() -> Self {
        Symbols::default()
    }

    pub fn add_term(&mut self, term: &Term) {
        if let Term::App(f, args) = term {
            if args.is_empty() {
                self.constants.insert(f.clone());
            } else {
                self.functors.insert(f.clone(), args.len());
                args.iter().for_each(|a| self.add_term(a));
            }
        }
    }

    pub fn add_atom(&mut self, atom: &Atom) {
        atom.args.iter().for_each(|t| self.add_term(t));
    }

    pub fn add_clause(&mut self, clause: &Clause) {
        clause.atoms().for_each(|a| self.add_atom(a));
    }

    pub fn add_theory(&mut self, theory: &Theory) {
        theory.iter().for_each(|c| self.add_clause(c));
    }

    pub fn add_goal(&mut self, goal: &DefiniteGoal) {
        goal.body().iter().for_each(|a| self.add_atom(a));
    }

    pub fn of_theory(theory: &Theory) -> Self {
        let mut s = Symbols::new();
        s.add_theory(theory);
        s
    }

    pub fn merge(&mut self, other: &Symbols) {
        self.constants.extend(other.constants.iter().cloned());
        self.functors
            .extend(other.functors.iter().map(|(k, v)| (k.clone(), *v)));
    }

    /// The Herbrand universe, sorted by depth then term order.
    ///
    /// Without a depth bound, any proper functor is rejected since the
    /// universe would be infinite. With bound `k`, terms are truncated at
    /// nesting depth `k`.
    pub fn universe(&self, depth_bound: Option<usize>) -> Result<Vec<Term>> {
        let mut levels: Vec<Vec<Term>> = vec![self
            .constants
            .iter()
            .map(|c| Term::constant(c.clone()))
            .collect()];
        if self.functors.is_empty() {
            return Ok(levels.pop().unwrap());
        }
        let Some(bound) = depth_bound else {
            let (f, _) = self.functors.iter().next().unwrap();
            return Err(Error::UnboundedUniverse(f.clone()));
        };
        let mut all: Vec<Term> = levels[0].clone();
        for depth in 1..=bound {
            let mut next = Vec::new();
            for (f, &arity) in &self.functors {
                // every argument tuple over `all` with at least one argument
                // from the previous level
                for tuple in tuples(&all, arity) {
                    if tuple.iter().any(|t| t.depth() == depth - 1) {
                        next.push(Term::App(f.clone(), tuple));
                    }
                }
            }
            next.sort();
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            levels.push(next);
        }
        Ok(all)
    }
}

fn tuples(items: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::with_capacity(arity)];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// All ground instances of `clause` over `universe`, in odometer order of
/// the clause's variables (first occurrence first). Instances that coincide
/// syntactically are reported once.
pub fn ground_instances(clause: &Clause, universe: &[Term]) -> Result<Vec<Clause>> {
    let vars: Vec<String> = clause.vars().into_iter().map(str::to_string).collect();
    if vars.is_empty() {
        return Ok(vec![clause.clone()]);
    }
    if universe.is_empty() {
        return Err(Error::EmptyUniverse(clause.to_string()));
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for tuple in tuples(universe, vars.len()) {
        let binding: BTreeMap<&str, &Term> =
            vars.iter().map(String::as_str).zip(tuple.iter()).collect();
        let inst = substitute_clause(clause, &binding);
        if seen.insert(inst.clone()) {
            out.push(inst);
        }
    }
    Ok(out)
}

fn substitute_clause(clause: &Clause, binding: &BTreeMap<&str, &Term>) -> Clause {
    fn term(t: &Term, b: &BTreeMap<&str, &Term>) -> Term {
        match t {
            Term::Var(v) => b
                .get(v.as_str())
                .map(|t| (*t).clone())
                .unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| term(a, b)).collect()),
        }
    }
    let atom = |a: &Atom| {
        Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| term(t, binding)).collect(),
        )
    };
    Clause::new(atom(&clause.head), clause.body.iter().map(atom))
}
