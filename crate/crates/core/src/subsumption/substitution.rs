use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Atom, Clause, DefiniteGoal, Term};

/// A finite map from variable names to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    /// Binds `var` to `term`. Binding a variable to itself is a no-op.
    pub fn bind(&mut self, var: impl Into<String>, term: Term) {
        let var = var.into();
        if term != Term::Var(var.clone()) {
            self.bindings.insert(var, term);
        } else {
            self.bindings.remove(&var);
        }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn apply_term(&self, term: &Term) -> Term {
        match term {
            Term::Var(v) => self
                .bindings
                .get(v)
                .cloned()
                .unwrap_or_else(|| term.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    pub fn apply_atom(&self, atom: &Atom) -> Atom {
        Atom::new(
            atom.predicate.clone(),
            atom.args.iter().map(|t| self.apply_term(t)).collect(),
        )
    }

    pub fn apply_clause(&self, clause: &Clause) -> Clause {
        Clause::new(
            self.apply_atom(&clause.head),
            clause.body.iter().map(|a| self.apply_atom(a)),
        )
    }

    pub fn apply_goal(&self, goal: &DefiniteGoal) -> DefiniteGoal {
        DefiniteGoal::new(goal.body().iter().map(|a| self.apply_atom(a))).expect("nonempty body")
    }
}

impl<K: Into<String>> FromIterator<(K, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (K, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (k, t) in iter {
            s.bind(k, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_clause};

    #[test]
    fn partial_application() {
        let s: Substitution = [("X", Term::constant("a"))].into_iter().collect();
        assert_eq!(
            s.apply_atom(&parse_atom("p(X,Y)").unwrap()).to_string(),
            "p(a,Y)"
        );
    }

    #[test]
    fn identity_substitution() {
        let s = Substitution::new();
        let c = parse_clause("p(X) :- q(X,Y).").unwrap();
        assert_eq!(s.apply_clause(&c), c);
    }

    #[test]
    fn functor_binding_applies_to_whole_clause() {
        let s: Substitution = [("X", Term::app("f", vec![Term::var("Y")]))]
            .into_iter()
            .collect();
        let c = parse_clause("p(X) :- q(X).").unwrap();
        assert_eq!(s.apply_clause(&c).to_string(), "p(f(Y)) :- q(f(Y)).");
    }

    #[test]
    fn application_is_simultaneous() {
        let s: Substitution = [("X", Term::var("Y")), ("Y", Term::var("X"))]
            .into_iter()
            .collect();
        assert_eq!(
            s.apply_atom(&parse_atom("p(X,Y)").unwrap()).to_string(),
            "p(Y,X)"
        );
    }

    #[test]
    fn self_bindings_are_dropped() {
        let s: Substitution = [("X", Term::var("X"))].into_iter().collect();
        assert!(s.is_empty());
        assert_eq!(s.to_string(), "{}");
    }
}
