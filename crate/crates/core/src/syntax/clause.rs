use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;

use super::term::{Atom, Term};

/// A definite clause `head :- body`. The body is a set, so repeated
/// literals collapse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: BTreeSet<Atom>,
}

// Past this many tie orderings, canonicalization keeps the set order.
const MAX_TIE_PERMUTATIONS: usize = 720;

impl Clause {
    pub fn new(head: Atom, body: impl IntoIterator<Item = Atom>) -> Self {
        Clause {
            head,
            body: body.into_iter().collect(),
        }
    }

    pub fn fact(head: Atom) -> Self {
        Clause {
            head,
            body: BTreeSet::new(),
        }
    }

    /// `C⁺`.
    pub fn head(&self) -> &Atom {
        &self.head
    }

    /// `C⁻`.
    pub fn body(&self) -> &BTreeSet<Atom> {
        &self.body
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground() && self.body.iter().all(Atom::is_ground)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    /// Distinct variables, head first, in order of first occurrence.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.atoms().for_each(|a| a.collect_vars(&mut out));
        out
    }

    /// Renames variables to `V0, V1, …` in order of first occurrence.
    ///
    /// Body literals are visited in order of their variable-free shape; when
    /// several literals share a shape every ordering of that group is tried
    /// and the least renamed clause wins, so variants map to one form.
    pub fn canonical(&self) -> Clause {
        if self.vars().is_empty() {
            return self.clone();
        }
        let mut body: Vec<(Atom, &Atom)> = self.body.iter().map(|a| (a.shape(), a)).collect();
        body.sort_by(|x, y| x.0.cmp(&y.0));
        let groups: Vec<Vec<&Atom>> = body
            .iter()
            .chunk_by(|(shape, _)| shape.clone())
            .into_iter()
            .map(|(_, g)| g.map(|(_, a)| *a).collect())
            .collect();

        let orderings: usize = groups
            .iter()
            .map(|g| (1..=g.len()).product::<usize>())
            .fold(1usize, |acc, n| acc.saturating_mul(n));
        if orderings == 1 || orderings > MAX_TIE_PERMUTATIONS {
            let order: Vec<&Atom> = groups.iter().flatten().copied().collect();
            return self.renamed_by_order(&order);
        }
        groups
            .iter()
            .map(|g| g.iter().copied().permutations(g.len()).collect::<Vec<_>>())
            .multi_cartesian_product()
            .map(|choice| {
                let order: Vec<&Atom> = choice.into_iter().flatten().collect();
                self.renamed_by_order(&order)
            })
            .min()
            .expect("at least one ordering")
    }

    fn renamed_by_order(&self, body_order: &[&Atom]) -> Clause {
        let mut names: HashMap<&str, String> = HashMap::new();
        let mut seen = Vec::new();
        self.head.collect_vars(&mut seen);
        for a in body_order {
            a.collect_vars(&mut seen);
        }
        for (i, v) in seen.iter().enumerate() {
            names.insert(v, format!("V{i}"));
        }
        let rename = |a: &Atom| rename_atom(a, &names);
        Clause::new(rename(&self.head), self.body.iter().map(rename))
    }
}

fn rename_atom(atom: &Atom, names: &HashMap<&str, String>) -> Atom {
    fn go(t: &Term, names: &HashMap<&str, String>) -> Term {
        match t {
            Term::Var(v) => Term::Var(names[v.as_str()].clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, names)).collect()),
        }
    }
    Atom::new(
        atom.predicate.clone(),
        atom.args.iter().map(|t| go(t, names)).collect(),
    )
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &BTreeSet<Atom>) -> fmt::Result {
    for (i, a) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_body(f, &self.body)?;
        }
        f.write_str(".")
    }
}

/// A headless clause `:- L1, …, Ln` used as an integrity constraint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefiniteGoal {
    body: BTreeSet<Atom>,
}

impl DefiniteGoal {
    /// Returns `None` for an empty body.
    pub fn new(body: impl IntoIterator<Item = Atom>) -> Option<Self> {
        let body: BTreeSet<Atom> = body.into_iter().collect();
        (!body.is_empty()).then_some(DefiniteGoal { body })
    }

    pub fn body(&self) -> &BTreeSet<Atom> {
        &self.body
    }
}

impl fmt::Display for DefiniteGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(":- ")?;
        write_body(f, &self.body)?;
        f.write_str(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_clause;

    #[test]
    fn projections() {
        let c = parse_clause("p(a) :- q(a).").unwrap();
        assert_eq!(c.head().to_string(), "p(a)");
        assert_eq!(c.body().len(), 1);
        let f = parse_clause("p(a).").unwrap();
        assert!(f.body().is_empty());
        let r = parse_clause("anc(X,Y) :- par(X,Z), anc(Z,Y).").unwrap();
        assert_eq!(r.body().len(), 2);
    }

    #[test]
    fn duplicate_body_literals_collapse() {
        let c = parse_clause("p(X) :- q(X), q(X).").unwrap();
        assert_eq!(c.body().len(), 1);
    }

    #[test]
    fn canonical_names_follow_first_occurrence() {
        let c = parse_clause("anc(A,B) :- par(A,C), anc(C,B).").unwrap();
        assert_eq!(
            c.canonical().to_string(),
            "anc(V0,V1) :- anc(V2,V1), par(V0,V2)."
        );
    }

    #[test]
    fn canonical_identifies_variants_with_tied_shapes() {
        let c = parse_clause("p(X) :- q(X,Y), q(Y,Z).").unwrap();
        let d = parse_clause("p(A) :- q(B,C), q(A,B).").unwrap();
        assert_eq!(c.canonical(), d.canonical());
        let e = parse_clause("p(A) :- q(B,A), q(A,B).").unwrap();
        assert_ne!(c.canonical(), e.canonical());
    }

    #[test]
    fn ground_clause_is_its_own_canonical_form() {
        let c = parse_clause("p(a) :- q(b).").unwrap();
        assert_eq!(c.canonical(), c);
    }

    #[test]
    fn empty_goal_is_rejected() {
        assert!(DefiniteGoal::new(Vec::new()).is_none());
    }
}
