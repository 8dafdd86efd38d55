use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::clause::{Clause, DefiniteGoal};
use super::term::{Atom, Signature, Term};
use crate::error::{Error, Result};

/// A finite set of definite clauses.
///
/// Clauses keep their insertion order (and their variable names) for
/// printing; membership and equality are decided on canonical forms, so two
/// variants of one clause are never both present.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    clauses: Vec<Clause>,
    keys: BTreeSet<Clause>,
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    /// Inserts `clause` unless a variant is already present.
    pub fn insert(&mut self, clause: Clause) -> bool {
        if self.keys.insert(clause.canonical()) {
            self.clauses.push(clause);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.keys.contains(&clause.canonical())
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }

    /// `Σ⁺`: the set of clause heads.
    pub fn heads(&self) -> BTreeSet<Atom> {
        self.clauses.iter().map(|c| c.head.clone()).collect()
    }

    /// `Σ⁻`: the union of clause bodies.
    pub fn bodies(&self) -> BTreeSet<Atom> {
        self.clauses
            .iter()
            .flat_map(|c| c.body.iter().cloned())
            .collect()
    }

    /// `self ∪ other`, keeping `self`'s clauses first.
    pub fn union(&self, other: &Theory) -> Theory {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }

    /// `self` plus one fact per atom.
    pub fn with_facts<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Theory {
        let mut out = self.clone();
        out.extend(atoms.into_iter().cloned().map(Clause::fact));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.clauses.iter().all(Clause::is_ground)
    }
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}

impl Eq for Theory {}

impl Extend<Clause> for Theory {
    fn extend<I: IntoIterator<Item = Clause>>(&mut self, iter: I) {
        for c in iter {
            self.insert(c);
        }
    }
}

impl FromIterator<Clause> for Theory {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Self {
        let mut t = Theory::new();
        t.extend(iter);
        t
    }
}

impl<'a> IntoIterator for &'a Theory {
    type Item = &'a Clause;
    type IntoIter = std::slice::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.clauses.iter()
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// An open program ⟨B, U, I⟩.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpenProgram {
    pub background: Theory,
    pub abducibles: BTreeSet<Signature>,
    pub constraints: Vec<DefiniteGoal>,
}

impl OpenProgram {
    pub fn new(
        background: Theory,
        abducibles: impl IntoIterator<Item = Signature>,
        constraints: impl IntoIterator<Item = DefiniteGoal>,
    ) -> Self {
        let mut constraints: Vec<DefiniteGoal> = constraints.into_iter().collect();
        constraints.sort();
        constraints.dedup();
        OpenProgram {
            background,
            abducibles: abducibles.into_iter().collect(),
            constraints,
        }
    }

    pub fn is_abducible(&self, atom: &Atom) -> bool {
        self.abducibles.contains(&atom.signature())
    }
}

/// Records the arity of every predicate and functor seen, rejecting a
/// second use of a name with a different arity.
#[derive(Clone, Debug, Default)]
pub struct ArityTable {
    predicates: BTreeMap<String, usize>,
    functors: BTreeMap<String, usize>,
}

impl ArityTable {
    pub fn new() -> Self {
        ArityTable::default()
    }

    pub fn observe_atom(&mut self, atom: &Atom) -> Result<()> {
        record(
            &mut self.predicates,
            "predicate",
            &atom.predicate,
            atom.arity(),
        )?;
        atom.args.iter().try_for_each(|t| self.observe_term(t))
    }

    pub fn observe_term(&mut self, term: &Term) -> Result<()> {
        if let Term::App(f, args) = term {
            record(&mut self.functors, "functor", f, args.len())?;
            args.iter().try_for_each(|t| self.observe_term(t))?;
        }
        Ok(())
    }

    pub fn observe_clause(&mut self, clause: &Clause) -> Result<()> {
        clause.atoms().try_for_each(|a| self.observe_atom(a))
    }

    pub fn observe_theory(&mut self, theory: &Theory) -> Result<()> {
        theory.iter().try_for_each(|c| self.observe_clause(c))
    }

    pub fn observe_program(&mut self, program: &OpenProgram) -> Result<()> {
        self.observe_theory(&program.background)?;
        for g in &program.constraints {
            g.body().iter().try_for_each(|a| self.observe_atom(a))?;
        }
        for sig in &program.abducibles {
            record(&mut self.predicates, "predicate", &sig.name, sig.arity)?;
        }
        Ok(())
    }
}

fn record(
    table: &mut BTreeMap<String, usize>,
    kind: &'static str,
    name: &str,
    arity: usize,
) -> Result<()> {
    match table.get(name) {
        Some(&first) if first != arity => Err(Error::ArityClash {
            kind,
            name: name.to_string(),
            first,
            second: arity,
        }),
        Some(_) => Ok(()),
        None => {
            table.insert(name.to_string(), arity);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_theory};

    #[test]
    fn heads_and_bodies() {
        let t = parse_theory("p(a) :- q(a). r(b) :- q(a), s(b).").unwrap();
        let heads: Vec<String> = t.heads().iter().map(|a| a.to_string()).collect();
        let bodies: Vec<String> = t.bodies().iter().map(|a| a.to_string()).collect();
        assert_eq!(heads, ["p(a)", "r(b)"]);
        assert_eq!(bodies, ["q(a)", "s(b)"]);

        let empty = Theory::new();
        assert!(empty.heads().is_empty() && empty.bodies().is_empty());

        let fact = parse_theory("p(a).").unwrap();
        assert_eq!(fact.heads().len(), 1);
        assert!(fact.bodies().is_empty());
    }

    #[test]
    fn variants_are_deduplicated() {
        let t = parse_theory("p(X) :- q(X). p(Y) :- q(Y). p(Y) :- q(Z).").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.clauses()[0].to_string(), "p(X) :- q(X).");
    }

    #[test]
    fn equality_ignores_order_and_names() {
        let a = parse_theory("p(X) :- q(X). r(a).").unwrap();
        let b = parse_theory("r(a). p(Z) :- q(Z).").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arity_table_detects_clashes() {
        let mut table = ArityTable::new();
        table.observe_atom(&parse_atom("p(a)").unwrap()).unwrap();
        let err = table
            .observe_atom(&parse_atom("p(a,b)").unwrap())
            .unwrap_err();
        assert!(matches!(
            err,
            Error::ArityClash {
                kind: "predicate",
                ..
            }
        ));
        let err = table
            .observe_atom(&parse_atom("q(a(b))").unwrap())
            .unwrap_err();
        assert!(matches!(
            err,
            Error::ArityClash {
                kind: "functor",
                ..
            }
        ));
    }
}
