//! Brute-force reference implementations for cross-checking the engine on
//! small inputs.
//!
//! Nothing here calls into the fixpoint, matching or grounding code: the
//! oracles only share the syntax types. Both are exponential by design.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::subsumption::Substitution;
use crate::syntax::{Atom, Clause, Term, Theory};

pub const MAX_BASE_ATOMS: usize = 16;
pub const MAX_PATTERN_VARS: usize = 4;
pub const MAX_TARGET_SUBTERMS: usize = 8;

fn vars_of_term(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| vars_of_term(a, out)),
    }
}

fn vars_of_clause(c: &Clause) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for a in std::iter::once(&c.head).chain(&c.body) {
        a.args.iter().for_each(|t| vars_of_term(t, &mut out));
    }
    out
}

fn replace(t: &Term, map: &BTreeMap<&str, &Term>) -> Term {
    match t {
        Term::Var(v) => map
            .get(v.as_str())
            .map(|x| (*x).clone())
            .unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| replace(a, map)).collect()),
    }
}

fn replace_atom(a: &Atom, map: &BTreeMap<&str, &Term>) -> Atom {
    Atom::new(
        a.predicate.clone(),
        a.args.iter().map(|t| replace(t, map)).collect(),
    )
}

/// Every map from `vars` to `values`, first variable varying slowest.
fn all_maps<'a>(vars: &'a [String], values: &'a [Term]) -> Vec<BTreeMap<&'a str, &'a Term>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|m| {
                values.iter().map(move |t| {
                    let mut m = m.clone();
                    m.insert(v.as_str(), t);
                    m
                })
            })
            .collect();
    }
    out
}

/// Minimal Herbrand model by subset enumeration: the intersection of all
/// subsets of the Herbrand base that satisfy every ground rule instance.
pub fn brute_minimal_model(theory: &Theory) -> Result<BTreeSet<Atom>> {
    let mut constants = BTreeSet::new();
    let mut predicates = BTreeSet::new();
    for c in theory {
        for a in std::iter::once(&c.head).chain(&c.body) {
            predicates.insert((a.predicate.clone(), a.args.len()));
            for t in &a.args {
                let mut stack = vec![t];
                while let Some(t) = stack.pop() {
                    if let Term::App(f, args) = t {
                        if !args.is_empty() {
                            return Err(Error::UnboundedUniverse(f.clone()));
                        }
                        constants.insert(Term::constant(f.clone()));
                    }
                }
            }
        }
    }
    let constants: Vec<Term> = constants.into_iter().collect();

    let mut base: Vec<Atom> = Vec::new();
    for (p, arity) in &predicates {
        let names: Vec<String> = (0..*arity).map(|i| format!("#{i}")).collect();
        for m in all_maps(&names, &constants) {
            base.push(Atom::new(
                p.clone(),
                names.iter().map(|n| m[n.as_str()].clone()).collect(),
            ));
        }
    }
    if base.len() > MAX_BASE_ATOMS {
        return Err(Error::OracleBounds {
            what: "Herbrand base",
            size: base.len(),
            limit: MAX_BASE_ATOMS,
        });
    }
    let index: BTreeMap<&Atom, u32> = base
        .iter()
        .enumerate()
        .map(|(i, a)| (a, 1u32 << i))
        .collect();

    // (head bit, body mask) for every ground instance
    let mut rules: Vec<(u32, u32)> = Vec::new();
    for c in theory {
        let vars: Vec<String> = vars_of_clause(c).into_iter().collect();
        if !vars.is_empty() && constants.is_empty() {
            continue;
        }
        for m in all_maps(&vars, &constants) {
            let head = index[&replace_atom(&c.head, &m)];
            let body = c
                .body
                .iter()
                .map(|a| index[&replace_atom(a, &m)])
                .fold(0, |acc, bit| acc | bit);
            rules.push((head, body));
        }
    }

    let full: u32 = if base.len() == 32 {
        u32::MAX
    } else {
        (1u32 << base.len()) - 1
    };
    let mut meet = full;
    for subset in 0..=full {
        if rules
            .iter()
            .all(|&(head, body)| subset & body != body || subset & head != 0)
        {
            meet &= subset;
        }
    }
    Ok(base
        .into_iter()
        .enumerate()
        .filter(|(i, _)| meet & (1 << i) != 0)
        .map(|(_, a)| a)
        .collect())
}

/// θ-subsumption by enumerating every map from `vars(C)` into the subterms
/// of `D`, in sorted order; the first map that works is returned.
pub fn brute_subsumes(general: &Clause, specific: &Clause) -> Result<Option<Substitution>> {
    let vars: Vec<String> = vars_of_clause(general).into_iter().collect();
    if vars.len() > MAX_PATTERN_VARS {
        return Err(Error::OracleBounds {
            what: "pattern variables",
            size: vars.len(),
            limit: MAX_PATTERN_VARS,
        });
    }
    let mut subterms = BTreeSet::new();
    for a in std::iter::once(&specific.head).chain(&specific.body) {
        for t in &a.args {
            let mut stack = vec![t];
            while let Some(t) = stack.pop() {
                subterms.insert(t.clone());
                if let Term::App(_, args) = t {
                    stack.extend(args);
                }
            }
        }
    }
    if subterms.len() > MAX_TARGET_SUBTERMS {
        return Err(Error::OracleBounds {
            what: "target subterms",
            size: subterms.len(),
            limit: MAX_TARGET_SUBTERMS,
        });
    }
    let subterms: Vec<Term> = subterms.into_iter().collect();
    for m in all_maps(&vars, &subterms) {
        if replace_atom(&general.head, &m) == specific.head
            && general
                .body
                .iter()
                .all(|a| specific.body.contains(&replace_atom(a, &m)))
        {
            return Ok(Some(m.into_iter().map(|(v, t)| (v, t.clone())).collect()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_clause, parse_theory};

    fn model(s: &str) -> Vec<String> {
        brute_minimal_model(&parse_theory(s).unwrap())
            .unwrap()
            .iter()
            .map(|a| a.to_string())
            .collect()
    }

    #[test]
    fn underivable_body() {
        assert!(model("p :- q.").is_empty());
    }

    #[test]
    fn two_step_chain() {
        assert_eq!(model("q. p :- q."), ["p", "q"]);
    }

    #[test]
    fn transitive_closure() {
        let m = model("e(a,b). e(b,a). r(X,Y) :- e(X,Y). r(X,Z) :- e(X,Y), r(Y,Z).");
        assert!(m.contains(&"r(a,a)".to_string()));
        assert_eq!(m.len(), 6);
    }

    #[test]
    fn base_too_large() {
        let t = parse_theory("p(a,b,c). q(d).").unwrap();
        assert!(matches!(
            brute_minimal_model(&t),
            Err(Error::OracleBounds { .. })
        ));
    }

    fn subsumes(c: &str, d: &str) -> Option<String> {
        brute_subsumes(&parse_clause(c).unwrap(), &parse_clause(d).unwrap())
            .unwrap()
            .map(|t| t.to_string())
    }

    #[test]
    fn reference_subsumption_examples() {
        assert_eq!(
            subsumes("p(X) :- q(X).", "p(a) :- q(a), r(a)."),
            Some("{X↦a}".into())
        );
        assert!(subsumes("p(X) :- q(X).", "p(X) :- q(X).").is_some());
        assert_eq!(subsumes("p(f(X)) :- p(X).", "p(f(f(Y))) :- p(Y)."), None);
    }

    #[test]
    fn ground_pattern_is_syntactic() {
        assert!(subsumes("p(a) :- q(a).", "p(a) :- q(a), q(b).").is_some());
        assert!(subsumes("p(a) :- q(c).", "p(a) :- q(a), q(b).").is_none());
    }

    #[test]
    fn predicate_mismatch() {
        assert_eq!(subsumes("p(X).", "q(a)."), None);
    }
}
