use std::collections::HashMap;

use serde::Serialize;

use super::Substitution;
use crate::error::{Error, Result};
use crate::syntax::{Atom, Clause, Term, Theory};

/// One-way matching with an undo trail: variables of the pattern bind,
/// everything in the target is rigid.
struct Matcher<'a> {
    bindings: HashMap<&'a str, &'a Term>,
    trail: Vec<&'a str>,
}

impl<'a> Matcher<'a> {
    fn new() -> Self {
        Matcher {
            bindings: HashMap::new(),
            trail: Vec::new(),
        }
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.bindings.remove(v);
        }
    }

    fn match_term(&mut self, pattern: &'a Term, target: &'a Term) -> bool {
        match pattern {
            Term::Var(v) => match self.bindings.get(v.as_str()) {
                Some(bound) => *bound == target,
                None => {
                    self.bindings.insert(v, target);
                    self.trail.push(v);
                    true
                }
            },
            Term::App(f, args) => match target {
                Term::App(g, targs) if f == g && args.len() == targs.len() => {
                    args.iter().zip(targs).all(|(a, b)| self.match_term(a, b))
                }
                _ => false,
            },
        }
    }

    fn match_atom(&mut self, pattern: &'a Atom, target: &'a Atom) -> bool {
        pattern.same_signature(target)
            && pattern
                .args
                .iter()
                .zip(&target.args)
                .all(|(a, b)| self.match_term(a, b))
    }

    /// Like `match_atom`, but leaves no bindings behind on failure.
    fn try_atom(&mut self, pattern: &'a Atom, target: &'a Atom) -> bool {
        let mark = self.mark();
        let ok = self.match_atom(pattern, target);
        if !ok {
            self.undo(mark);
        }
        ok
    }

    fn substitution(&self) -> Substitution {
        self.bindings
            .iter()
            .map(|(v, t)| (v.to_string(), (*t).clone()))
            .collect()
    }
}

/// Body literals of `specific`, ordered by predicate, arity, term size and
/// finally the canonical atom order.
fn ordered_targets(specific: &Clause) -> Vec<&Atom> {
    let mut targets: Vec<&Atom> = specific.body.iter().collect();
    targets.sort_by(|a, b| {
        (&a.predicate, a.arity(), a.size(), *a).cmp(&(&b.predicate, b.arity(), b.size(), *b))
    });
    targets
}

/// For each body literal of `general`, the candidate targets sharing its
/// signature; literals with fewest candidates come first.
fn candidate_lists<'a>(general: &'a Clause, targets: &[&'a Atom]) -> Vec<(&'a Atom, Vec<usize>)> {
    let mut lits: Vec<(&Atom, Vec<usize>)> = general
        .body
        .iter()
        .map(|l| {
            let cands = (0..targets.len())
                .filter(|&j| l.same_signature(targets[j]))
                .collect();
            (l, cands)
        })
        .collect();
    lits.sort_by_key(|(_, c)| c.len());
    lits
}

/// θ-subsumption: returns θ with `Cθ.head = D.head` and `Cθ.body ⊆ D.body`.
///
/// Variables of `specific` are treated as constants. The returned θ binds
/// only variables of `general`.
pub fn clause_subsumes(general: &Clause, specific: &Clause) -> Option<Substitution> {
    let mut m = Matcher::new();
    if !m.match_atom(&general.head, &specific.head) {
        return None;
    }
    let targets = ordered_targets(specific);
    let lits = candidate_lists(general, &targets);
    if lits.iter().any(|(_, c)| c.is_empty()) {
        return None;
    }

    fn search<'a>(
        m: &mut Matcher<'a>,
        lits: &[(&'a Atom, Vec<usize>)],
        targets: &[&'a Atom],
    ) -> bool {
        let Some(((lit, cands), rest)) = lits.split_first() else {
            return true;
        };
        for &j in cands {
            let mark = m.mark();
            if m.try_atom(lit, targets[j]) {
                if search(m, rest, targets) {
                    return true;
                }
                m.undo(mark);
            }
        }
        false
    }

    search(&mut m, &lits, &targets).then(|| m.substitution())
}

/// Decides whether `specific` is exactly an instance of `general`:
/// θ with `Cθ.head = D.head` and `Cθ.body = D.body`. `specific` must be
/// ground.
pub fn is_instance(general: &Clause, specific: &Clause) -> Result<Option<Substitution>> {
    if !specific.is_ground() {
        return Err(Error::NonGround {
            kind: "clause",
            item: specific.to_string(),
        });
    }
    if general.body.len() < specific.body.len() {
        return Ok(None);
    }
    let mut m = Matcher::new();
    if !m.match_atom(&general.head, &specific.head) {
        return Ok(None);
    }
    let targets = ordered_targets(specific);
    let lits = candidate_lists(general, &targets);
    if lits.iter().any(|(_, c)| c.is_empty()) {
        return Ok(None);
    }

    fn search<'a>(
        m: &mut Matcher<'a>,
        lits: &[(&'a Atom, Vec<usize>)],
        targets: &[&'a Atom],
        cover: &mut [usize],
        uncovered: usize,
    ) -> bool {
        let Some(((lit, cands), rest)) = lits.split_first() else {
            return uncovered == 0;
        };
        if rest.len() + 1 < uncovered {
            return false;
        }
        for &j in cands {
            let mark = m.mark();
            if m.try_atom(lit, targets[j]) {
                cover[j] += 1;
                let newly = usize::from(cover[j] == 1);
                if search(m, rest, targets, cover, uncovered - newly) {
                    return true;
                }
                cover[j] -= 1;
                m.undo(mark);
            }
        }
        false
    }

    let mut cover = vec![0; targets.len()];
    Ok(search(&mut m, &lits, &targets, &mut cover, targets.len()).then(|| m.substitution()))
}

/// `C` and `D` are equal up to a renaming of variables.
pub fn is_variant(c: &Clause, d: &Clause) -> bool {
    c.canonical() == d.canonical()
}

/// Witness that one clause of a theory subsumes a target clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsumptionWitness {
    #[serde(serialize_with = "crate::report::display")]
    pub target: Clause,
    pub general_index: usize,
    #[serde(serialize_with = "crate::report::display")]
    pub general: Clause,
    #[serde(serialize_with = "crate::report::substitution")]
    pub theta: Substitution,
}

/// First clause of `theory` subsuming `target`, if any.
pub fn find_subsumer(theory: &Theory, target: &Clause) -> Option<SubsumptionWitness> {
    theory.iter().enumerate().find_map(|(i, c)| {
        clause_subsumes(c, target).map(|theta| SubsumptionWitness {
            target: target.clone(),
            general_index: i,
            general: c.clone(),
            theta,
        })
    })
}

/// Theory subsumption `S ⪰ T`: a witness for every clause of `T`, or
/// `None` if some clause of `T` is subsumed by no clause of `S`.
pub fn theory_subsumes(general: &Theory, specific: &Theory) -> Option<Vec<SubsumptionWitness>> {
    specific.iter().map(|d| find_subsumer(general, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_clause, parse_theory};

    fn cl(s: &str) -> Clause {
        parse_clause(s).unwrap()
    }

    #[test]
    fn subset_body_is_allowed() {
        let theta = clause_subsumes(&cl("p(X) :- q(X)."), &cl("p(a) :- q(a), r(a).")).unwrap();
        assert_eq!(theta.to_string(), "{X↦a}");
    }

    #[test]
    fn reflexive() {
        let c = cl("anc(X,Y) :- par(X,Z), anc(Z,Y).");
        let theta = clause_subsumes(&c, &c).unwrap();
        assert_eq!(theta.apply_clause(&c), c);
    }

    #[test]
    fn self_recursive_pair_is_not_subsumed() {
        assert!(clause_subsumes(&cl("p(f(X)) :- p(X)."), &cl("p(f(f(Y))) :- p(Y).")).is_none());
    }

    #[test]
    fn many_to_one_body_mapping() {
        let theta =
            clause_subsumes(&cl("p(X) :- q(X,Y), q(X,Z)."), &cl("p(a) :- q(a,b).")).unwrap();
        assert_eq!(theta.to_string(), "{X↦a, Y↦b, Z↦b}");
    }

    #[test]
    fn backtracks_over_body_choices() {
        let c = cl("p(X) :- e(X,Y), f(Y).");
        let d = cl("p(a) :- e(a,b), e(a,c), f(c).");
        assert_eq!(clause_subsumes(&c, &d).unwrap().to_string(), "{X↦a, Y↦c}");
    }

    #[test]
    fn head_mismatch() {
        assert!(clause_subsumes(&cl("p(X)."), &cl("q(a).")).is_none());
    }

    #[test]
    fn theory_witnesses() {
        let s = parse_theory("p(X) :- q(X).").unwrap();
        let t = parse_theory("p(a) :- q(a). p(b) :- q(b).").unwrap();
        let w = theory_subsumes(&s, &t).unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|w| w.general_index == 0));

        assert_eq!(theory_subsumes(&s, &Theory::new()).unwrap().len(), 0);

        let s = parse_theory("p(a).").unwrap();
        let t = parse_theory("p(b).").unwrap();
        assert!(theory_subsumes(&s, &t).is_none());
    }

    #[test]
    fn instance_requires_equal_bodies() {
        let c = cl("p(X) :- q(X).");
        assert_eq!(
            is_instance(&c, &cl("p(a) :- q(a)."))
                .unwrap()
                .unwrap()
                .to_string(),
            "{X↦a}"
        );
        assert!(is_instance(&c, &cl("p(a) :- q(a), r(a)."))
            .unwrap()
            .is_none());
        assert!(is_instance(&cl("p(X,X)."), &cl("p(a,b)."))
            .unwrap()
            .is_none());
    }

    #[test]
    fn instance_with_collapsing_body() {
        let c = cl("p(X) :- q(X,Y), q(X,Z).");
        let theta = is_instance(&c, &cl("p(a) :- q(a,b).")).unwrap().unwrap();
        assert_eq!(theta.apply_clause(&c), cl("p(a) :- q(a,b)."));
        assert!(is_instance(&c, &cl("p(a) :- q(a,b), q(a,c)."))
            .unwrap()
            .is_some());
        assert!(is_instance(&c, &cl("p(a) :- q(a,b), q(a,c), q(a,d)."))
            .unwrap()
            .is_none());
    }

    #[test]
    fn instance_rejects_non_ground_target() {
        assert!(matches!(
            is_instance(&cl("p(X)."), &cl("p(Y).")),
            Err(Error::NonGround { .. })
        ));
    }

    #[test]
    fn variants() {
        assert!(is_variant(&cl("p(X) :- q(X,Y)."), &cl("p(A) :- q(A,B).")));
        assert!(!is_variant(&cl("p(X) :- q(X,X)."), &cl("p(A) :- q(A,B).")));
    }
}
