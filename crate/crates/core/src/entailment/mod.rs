//! Least Herbrand models and the entailment checks built on them.
//!
//! All checks share one evaluation policy, [`Reasoner`]: programs with
//! proper function symbols are rejected unless a depth bound is set, in
//! which case "not entailed" means "not derivable within depth k".

mod fixpoint;

use std::collections::{BTreeSet, HashMap};

pub use fixpoint::{Derivation, LeastModel};

use crate::error::{Error, Result};
use crate::syntax::{Atom, Clause, DefiniteGoal, Symbols, Term, Theory};

// Stands in for the Herbrand universe's arbitrary constant when a
// consistency check finds no constant at all.
const PLACEHOLDER_CONSTANT: &str = "u0";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Reasoner {
    depth_bound: Option<usize>,
}

fn require_ground_atom(atom: &Atom) -> Result<()> {
    if atom.is_ground() {
        Ok(())
    } else {
        Err(Error::NonGround {
            kind: "atom",
            item: atom.to_string(),
        })
    }
}

fn require_ground_clause(clause: &Clause) -> Result<()> {
    if clause.is_ground() {
        Ok(())
    } else {
        Err(Error::NonGround {
            kind: "clause",
            item: clause.to_string(),
        })
    }
}

impl Reasoner {
    pub fn new() -> Self {
        Reasoner::default()
    }

    pub fn with_depth_bound(depth_bound: Option<usize>) -> Self {
        Reasoner { depth_bound }
    }

    pub fn depth_bound(&self) -> Option<usize> {
        self.depth_bound
    }

    /// Least model of `theory` over its own Herbrand universe.
    pub fn least_model(&self, theory: &Theory) -> Result<LeastModel> {
        self.least_model_with(theory, &Symbols::new())
    }

    /// Least model of `theory` over the universe of `theory` plus `extra`.
    pub fn least_model_with(&self, theory: &Theory, extra: &Symbols) -> Result<LeastModel> {
        let mut symbols = Symbols::of_theory(theory);
        symbols.merge(extra);
        let universe = symbols.universe(self.depth_bound)?;
        Ok(fixpoint::evaluate(theory, &universe, self.depth_bound))
    }

    pub fn entails_atom(&self, theory: &Theory, atom: &Atom) -> Result<bool> {
        require_ground_atom(atom)?;
        let mut extra = Symbols::new();
        extra.add_atom(atom);
        Ok(self.least_model_with(theory, &extra)?.contains(atom))
    }

    /// `T ⊨ D` for a ground definite clause: `D⁺` is in the least model of
    /// `T` extended with `D⁻` as facts.
    pub fn entails_ground_clause(&self, theory: &Theory, clause: &Clause) -> Result<bool> {
        require_ground_clause(clause)?;
        self.entails_atom(&theory.with_facts(&clause.body), &clause.head)
    }

    /// `B ∪ H ∪ I` is consistent iff no goal of `I` has a ground instance
    /// whose atoms all lie in the least model of `B ∪ H`.
    pub fn is_consistent(
        &self,
        background: &Theory,
        hypothesis: &Theory,
        goals: &[DefiniteGoal],
    ) -> Result<bool> {
        Ok(self
            .first_violation(background, hypothesis, goals)?
            .is_none())
    }

    /// A ground instance of some goal satisfied by the least model of
    /// `B ∪ H`, if any.
    pub fn first_violation(
        &self,
        background: &Theory,
        hypothesis: &Theory,
        goals: &[DefiniteGoal],
    ) -> Result<Option<DefiniteGoal>> {
        if goals.is_empty() {
            return Ok(None);
        }
        let program = background.union(hypothesis);
        let mut symbols = Symbols::of_theory(&program);
        goals.iter().for_each(|g| symbols.add_goal(g));
        if symbols.constants.is_empty() {
            symbols.constants.insert(PLACEHOLDER_CONSTANT.to_string());
        }
        let universe = symbols.universe(self.depth_bound)?;
        let model = fixpoint::evaluate(&program, &universe, self.depth_bound);
        Ok(goals.iter().find_map(|g| satisfied_instance(g, &model)))
    }

    /// A finite set of ground instances of clauses of `theory` that entails
    /// `atom`: the provenance tree of `atom`, listed by increasing depth.
    pub fn ground_support(&self, theory: &Theory, atom: &Atom) -> Result<Theory> {
        require_ground_atom(atom)?;
        let mut extra = Symbols::new();
        extra.add_atom(atom);
        let model = self.least_model_with(theory, &extra)?;
        support_in(&model, atom)
    }
}

/// The provenance tree of `atom` in an already computed model.
pub(crate) fn support_in(model: &LeastModel, atom: &Atom) -> Result<Theory> {
    if !model.contains(atom) {
        return Err(Error::NotEntailed(atom.clone()));
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![atom];
    let mut clauses: Vec<(usize, &Clause)> = Vec::new();
    while let Some(a) = stack.pop() {
        if !seen.insert(a) {
            continue;
        }
        let d = model
            .derivation(a)
            .expect("provenance atoms are in the model");
        clauses.push((d.depth, &d.provenance));
        stack.extend(d.provenance.body.iter());
    }
    clauses.sort();
    Ok(clauses.into_iter().map(|(_, c)| c.clone()).collect())
}

fn satisfied_instance(goal: &DefiniteGoal, model: &LeastModel) -> Option<DefiniteGoal> {
    let lits: Vec<&Atom> = goal.body().iter().collect();
    let facts: Vec<&Atom> = model.atoms().collect();

    fn go<'a>(lits: &[&'a Atom], facts: &[&'a Atom], b: &mut HashMap<&'a str, &'a Term>) -> bool {
        let Some((lit, rest)) = lits.split_first() else {
            return true;
        };
        for fact in facts.iter().filter(|f| f.same_signature(lit)) {
            let snapshot = b.clone();
            if lit.args.iter().zip(&fact.args).all(|(p, t)| bind(p, t, b)) && go(rest, facts, b) {
                return true;
            }
            *b = snapshot;
        }
        false
    }

    fn bind<'a>(p: &'a Term, t: &'a Term, b: &mut HashMap<&'a str, &'a Term>) -> bool {
        match p {
            Term::Var(v) => match b.get(v.as_str()) {
                Some(x) => *x == t,
                None => {
                    b.insert(v, t);
                    true
                }
            },
            Term::App(f, args) => match t {
                Term::App(g, targs) if f == g && args.len() == targs.len() => {
                    args.iter().zip(targs).all(|(x, y)| bind(x, y, b))
                }
                _ => false,
            },
        }
    }

    fn ground(t: &Term, b: &HashMap<&str, &Term>) -> Term {
        match t {
            Term::Var(v) => b[v.as_str()].clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| ground(a, b)).collect()),
        }
    }

    let mut b = HashMap::new();
    go(&lits, &facts, &mut b).then(|| {
        DefiniteGoal::new(lits.iter().map(|a| {
            Atom::new(
                a.predicate.clone(),
                a.args.iter().map(|t| ground(t, &b)).collect(),
            )
        }))
        .expect("nonempty body")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_clause, parse_constraints, parse_theory};

    fn th(s: &str) -> Theory {
        parse_theory(s).unwrap()
    }

    fn at(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    #[test]
    fn two_step_chain_depths() {
        let m = Reasoner::new().least_model(&th("q. p :- q.")).unwrap();
        assert_eq!(m.depth(&at("q")), Some(1));
        assert_eq!(m.depth(&at("p")), Some(2));
        assert_eq!(m.provenance(&at("p")).unwrap().to_string(), "p :- q.");
    }

    #[test]
    fn empty_theory_has_empty_model() {
        assert!(Reasoner::new()
            .least_model(&Theory::new())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn transitive_closure() {
        let t = th("e(a,b). e(b,c). r(X,Y) :- e(X,Y). r(X,Z) :- e(X,Y), r(Y,Z).");
        let m = Reasoner::new().least_model(&t).unwrap();
        assert!(m.contains(&at("r(a,c)")));
        assert_eq!(m.len(), 5);
        assert_eq!(m.depth(&at("r(a,c)")), Some(3));
    }

    #[test]
    fn entails_atoms() {
        let r = Reasoner::new();
        assert!(r.entails_atom(&th("p."), &at("p")).unwrap());
        assert!(!r.entails_atom(&Theory::new(), &at("p")).unwrap());
        assert!(r.entails_atom(&th("p(X)."), &at("p(a)")).unwrap());
        assert!(matches!(
            r.entails_atom(&th("p."), &at("p(X)")),
            Err(Error::NonGround { .. })
        ));
    }

    #[test]
    fn entails_ground_clauses() {
        let r = Reasoner::new();
        assert!(r
            .entails_ground_clause(
                &th("p(X) :- q(X)."),
                &parse_clause("p(a) :- q(a).").unwrap()
            )
            .unwrap());
        assert!(!r
            .entails_ground_clause(&Theory::new(), &parse_clause("p(a).").unwrap())
            .unwrap());
        let bounded = Reasoner::with_depth_bound(Some(2));
        assert!(bounded
            .entails_ground_clause(
                &th("p(f(X)) :- p(X)."),
                &parse_clause("p(f(f(a))) :- p(a).").unwrap()
            )
            .unwrap());
        assert!(matches!(
            r.entails_ground_clause(
                &th("p(f(X)) :- p(X)."),
                &parse_clause("p(f(f(a))) :- p(a).").unwrap()
            ),
            Err(Error::UnboundedUniverse(_))
        ));
    }

    #[test]
    fn depth_bound_truncates() {
        let r = Reasoner::with_depth_bound(Some(1));
        let m = r.least_model(&th("n(z). n(s(X)) :- n(X).")).unwrap();
        assert_eq!(m.len(), 2);
        assert!(!m.contains(&at("n(s(s(z)))")));
    }

    #[test]
    fn consistency() {
        let r = Reasoner::new();
        let goals = parse_constraints(":- p(X).").unwrap();
        assert!(!r
            .is_consistent(&th("p(a)."), &Theory::new(), &goals)
            .unwrap());
        assert!(r
            .is_consistent(&th("p(a)."), &th("q(X) :- p(X)."), &[])
            .unwrap());
        let goals = parse_constraints(":- p(b).").unwrap();
        assert!(r
            .is_consistent(&th("q(a)."), &th("p(X) :- q(X)."), &goals)
            .unwrap());
        let v = r
            .first_violation(
                &th("q(a)."),
                &th("p(X) :- q(X)."),
                &parse_constraints(":- p(Y), q(Y).").unwrap(),
            )
            .unwrap()
            .unwrap();
        assert_eq!(v.to_string(), ":- p(a), q(a).");
    }

    #[test]
    fn consistency_uses_goal_constants() {
        let r = Reasoner::new();
        let goals = parse_constraints(":- p(b).").unwrap();
        assert!(!r
            .is_consistent(&Theory::new(), &th("p(X)."), &goals)
            .unwrap());
    }

    #[test]
    fn consistency_without_constants() {
        let r = Reasoner::new();
        let goals = parse_constraints(":- p(Y).").unwrap();
        assert!(!r
            .is_consistent(&Theory::new(), &th("p(X)."), &goals)
            .unwrap());
    }

    #[test]
    fn support_of_bird() {
        let t = th("bird(a). flies(X) :- bird(X).");
        let s = Reasoner::new().ground_support(&t, &at("flies(a)")).unwrap();
        assert_eq!(s, th("bird(a). flies(a) :- bird(a)."));
        assert_eq!(s.to_string(), "bird(a).\nflies(a) :- bird(a).\n");
    }

    #[test]
    fn support_requires_entailment() {
        let r = Reasoner::new();
        assert!(matches!(
            r.ground_support(&th("p."), &at("q")),
            Err(Error::NotEntailed(_))
        ));
        assert_eq!(r.ground_support(&th("p."), &at("p")).unwrap(), th("p."));
    }

    #[test]
    fn support_follows_shallowest_proof() {
        let t = th("a. b :- a. c :- b. c :- a.");
        let s = Reasoner::new().ground_support(&t, &at("c")).unwrap();
        assert_eq!(s, th("a. c :- a."));
    }
}
