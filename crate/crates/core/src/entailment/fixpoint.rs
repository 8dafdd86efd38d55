//! Semi-naive bottom-up evaluation with depth and provenance bookkeeping.

use std::collections::{BTreeMap, HashMap};

use crate::syntax::{Atom, Clause, Term, Theory};

/// How an atom entered the least model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    /// Fixpoint iteration (from 1) at which the atom was first derived.
    pub depth: usize,
    /// The ground rule instance whose firing derived it.
    pub provenance: Clause,
}

/// The least Herbrand model of a definite program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeastModel {
    atoms: BTreeMap<Atom, Derivation>,
}

impl LeastModel {
    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains_key(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Derivation)> {
        self.atoms.iter()
    }

    pub fn derivation(&self, atom: &Atom) -> Option<&Derivation> {
        self.atoms.get(atom)
    }

    pub fn depth(&self, atom: &Atom) -> Option<usize> {
        self.atoms.get(atom).map(|d| d.depth)
    }

    pub fn provenance(&self, atom: &Atom) -> Option<&Clause> {
        self.atoms.get(atom).map(|d| &d.provenance)
    }

    pub fn max_depth(&self) -> usize {
        self.atoms.values().map(|d| d.depth).max().unwrap_or(0)
    }
}

type Bindings<'a> = HashMap<&'a str, &'a Term>;

/// Facts grouped by predicate, each tagged with its derivation depth.
#[derive(Default)]
struct FactIndex {
    by_signature: HashMap<(String, usize), Vec<(Atom, usize)>>,
}

impl FactIndex {
    fn insert(&mut self, atom: Atom, depth: usize) {
        self.by_signature
            .entry((atom.predicate.clone(), atom.arity()))
            .or_default()
            .push((atom, depth));
    }

    fn candidates(&self, pattern: &Atom) -> &[(Atom, usize)] {
        self.by_signature
            .get(&(pattern.predicate.clone(), pattern.arity()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

fn match_term<'a>(
    pattern: &'a Term,
    target: &'a Term,
    b: &mut Bindings<'a>,
    trail: &mut Vec<&'a str>,
) -> bool {
    match pattern {
        Term::Var(v) => match b.get(v.as_str()) {
            Some(bound) => *bound == target,
            None => {
                b.insert(v, target);
                trail.push(v);
                true
            }
        },
        Term::App(f, args) => match target {
            Term::App(g, targs) if f == g && args.len() == targs.len() => args
                .iter()
                .zip(targs)
                .all(|(x, y)| match_term(x, y, b, trail)),
            _ => false,
        },
    }
}

fn substitute(t: &Term, b: &Bindings<'_>) -> Term {
    match t {
        Term::Var(v) => (*b.get(v.as_str()).expect("all variables bound")).clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute(a, b)).collect()),
    }
}

fn instantiate(clause: &Clause, b: &Bindings<'_>) -> Clause {
    let atom = |a: &Atom| {
        Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| substitute(t, b)).collect(),
        )
    };
    Clause::new(atom(&clause.head), clause.body.iter().map(atom))
}

/// Which facts a body literal may match during one semi-naive round.
#[derive(Clone, Copy)]
enum Window {
    /// depth < round − 1
    Old,
    /// depth == round − 1
    Delta,
    /// depth ≤ round − 1
    Known,
}

impl Window {
    fn admits(self, depth: usize, round: usize) -> bool {
        match self {
            Window::Old => depth + 1 < round,
            Window::Delta => depth + 1 == round,
            Window::Known => depth < round,
        }
    }
}

/// Joins body literals left to right, calling `emit` for each complete
/// binding.
fn join<'a>(
    body: &[(&'a Atom, Window)],
    facts: &'a FactIndex,
    round: usize,
    b: &mut Bindings<'a>,
    emit: &mut dyn FnMut(&Bindings<'a>),
) {
    let Some(((lit, window), rest)) = body.split_first() else {
        emit(b);
        return;
    };
    for (fact, depth) in facts.candidates(lit) {
        if !window.admits(*depth, round) {
            continue;
        }
        let mut trail = Vec::new();
        if lit
            .args
            .iter()
            .zip(&fact.args)
            .all(|(p, t)| match_term(p, t, b, &mut trail))
        {
            join(rest, facts, round, b, emit);
        }
        for v in trail {
            b.remove(v);
        }
    }
}

/// Computes the least model of `theory`, instantiating variables that occur
/// only in a clause head over `universe`. Derived atoms deeper than
/// `depth_bound` are discarded.
pub(crate) fn evaluate(
    theory: &Theory,
    universe: &[Term],
    depth_bound: Option<usize>,
) -> LeastModel {
    let rules: Vec<(&Clause, Vec<&Atom>, Vec<String>)> = theory
        .iter()
        .map(|c| {
            let body: Vec<&Atom> = c.body.iter().collect();
            let mut body_vars = Vec::new();
            body.iter().for_each(|a| a.collect_vars(&mut body_vars));
            let head_only: Vec<String> = c
                .head
                .vars()
                .into_iter()
                .filter(|v| !body_vars.contains(v))
                .map(str::to_string)
                .collect();
            (c, body, head_only)
        })
        .collect();

    let mut model = LeastModel::default();
    let mut facts = FactIndex::default();
    let within_bound = |a: &Atom| depth_bound.is_none_or(|k| a.depth() <= k);

    for round in 1.. {
        let mut staged: Vec<(Atom, Clause)> = Vec::new();
        let mut staged_set = std::collections::HashSet::new();
        for (clause, body, head_only) in &rules {
            let mut fire = |b: &Bindings<'_>| {
                let mut on_instance = |b: &Bindings<'_>| {
                    let inst = instantiate(clause, b);
                    if within_bound(&inst.head)
                        && !model.contains(&inst.head)
                        && staged_set.insert(inst.head.clone())
                    {
                        staged.push((inst.head.clone(), inst));
                    }
                };
                ground_head_vars(head_only, universe, b, &mut on_instance);
            };
            if body.is_empty() {
                if round == 1 {
                    fire(&Bindings::new());
                }
                continue;
            }
            // literal j reads the delta; earlier literals only older facts
            for j in 0..body.len() {
                let plan: Vec<(&Atom, Window)> = body
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let w = match i.cmp(&j) {
                            std::cmp::Ordering::Less => Window::Old,
                            std::cmp::Ordering::Equal => Window::Delta,
                            std::cmp::Ordering::Greater => Window::Known,
                        };
                        (*a, w)
                    })
                    .collect();
                join(&plan, &facts, round, &mut Bindings::new(), &mut fire);
            }
        }
        if staged.is_empty() {
            break;
        }
        for (atom, provenance) in staged {
            facts.insert(atom.clone(), round);
            model.atoms.insert(
                atom,
                Derivation {
                    depth: round,
                    provenance,
                },
            );
        }
    }
    model
}

fn ground_head_vars<'a>(
    vars: &'a [String],
    universe: &'a [Term],
    b: &Bindings<'a>,
    emit: &mut dyn FnMut(&Bindings<'_>),
) {
    if vars.is_empty() {
        emit(b);
        return;
    }
    let mut b = b.clone();
    fn go<'a>(
        vars: &'a [String],
        universe: &'a [Term],
        b: &mut Bindings<'a>,
        emit: &mut dyn FnMut(&Bindings<'_>),
    ) {
        let Some((v, rest)) = vars.split_first() else {
            emit(b);
            return;
        };
        for t in universe {
            b.insert(v, t);
            go(rest, universe, b, emit);
        }
        b.remove(v.as_str());
    }
    go(vars, universe, &mut b, emit);
}
