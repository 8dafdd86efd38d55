//! Seeded random generators for small Datalog programs, clause pairs and
//! inductive-solution instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entailment::{Derivation, Reasoner};
use crate::syntax::{Atom, Clause, DefiniteGoal, OpenProgram, Signature, Symbols, Term, Theory};

const PREDICATES: [&str; 4] = ["p", "q", "r", "s"];
const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];
const VARIABLES: [&str; 4] = ["X", "Y", "Z", "W"];

/// Independent stream `index` of `seed`, so instance `i` does not depend on
/// how many draws instance `i - 1` made.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_signatures<R: Rng>(rng: &mut R, n: usize) -> Vec<Signature> {
    PREDICATES[..n]
        .iter()
        .map(|p| Signature::new(*p, rng.random_range(0..=2)))
        .collect()
}

fn random_arg<R: Rng>(rng: &mut R, constants: &[&str], vars: &[&str], var_weight: f64) -> Term {
    if !vars.is_empty() && rng.random_bool(var_weight) {
        Term::var(*vars.choose(rng).expect("nonempty"))
    } else {
        Term::constant(*constants.choose(rng).expect("nonempty"))
    }
}

fn random_atom<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    constants: &[&str],
    vars: &[&str],
    var_weight: f64,
) -> Atom {
    Atom::new(
        sig.name.clone(),
        (0..sig.arity)
            .map(|_| random_arg(rng, constants, vars, var_weight))
            .collect(),
    )
}

/// A clause with head predicate drawn from `heads` and up to `max_body`
/// body literals over `all`. Head arguments mostly reuse body variables.
fn random_clause<R: Rng>(
    rng: &mut R,
    heads: &[Signature],
    all: &[Signature],
    constants: &[&str],
    max_body: usize,
) -> Clause {
    let head_sig = heads.choose(rng).expect("nonempty");
    let body_len = rng.random_range(0..=max_body);
    let vars = &VARIABLES[..rng.random_range(1..=2)];
    let body: Vec<Atom> = (0..body_len)
        .map(|_| {
            let sig = all.choose(rng).expect("nonempty");
            random_atom(rng, sig, constants, vars, 0.6)
        })
        .collect();
    let mut body_vars = Vec::new();
    body.iter().for_each(|a| a.collect_vars(&mut body_vars));
    let head_args = (0..head_sig.arity)
        .map(|_| {
            if !body_vars.is_empty() && rng.random_bool(0.8) {
                Term::var(*body_vars.choose(rng).expect("nonempty"))
            } else if rng.random_bool(0.15) {
                Term::var(VARIABLES[3])
            } else {
                Term::constant(*constants.choose(rng).expect("nonempty"))
            }
        })
        .collect();
    let head = Atom::new(head_sig.name.clone(), head_args);
    let body: Vec<Atom> = body.into_iter().filter(|b| *b != head).collect();
    Clause::new(head, body)
}

/// A Datalog program whose Herbrand base has at most `max_base` atoms
/// (counting every chosen signature over every chosen constant).
pub fn random_program<R: Rng>(rng: &mut R, max_base: usize) -> Theory {
    loop {
        let constants = &CONSTANTS[..rng.random_range(1..=3)];
        let n = rng.random_range(1..=3);
        let sigs = random_signatures(rng, n);
        let base: usize = sigs
            .iter()
            .map(|s| constants.len().pow(s.arity as u32))
            .sum();
        if base > max_base {
            continue;
        }
        let n = rng.random_range(1..=6);
        return (0..n)
            .map(|_| random_clause(rng, &sigs, &sigs, constants, 2))
            .collect();
    }
}

fn random_term_with_functor<R: Rng>(
    rng: &mut R,
    constants: &[&str],
    vars: &[&str],
    nest: bool,
) -> Term {
    if nest && rng.random_bool(0.2) {
        Term::app(
            "f",
            vec![random_term_with_functor(rng, constants, vars, false)],
        )
    } else {
        random_arg(rng, constants, vars, 0.2)
    }
}

/// A pair `(C, D)` for subsumption tests. Half the time `C` is obtained
/// from `D` by dropping body literals and lifting some constants to
/// variables, so that both outcomes occur often.
pub fn random_clause_pair<R: Rng>(rng: &mut R) -> (Clause, Clause) {
    let sigs = [
        Signature::new("p", 1),
        Signature::new("q", 2),
        Signature::new("r", 1),
    ];
    let constants = &CONSTANTS[..rng.random_range(1..=3)];
    let d_vars: &[&str] = if rng.random_bool(0.2) { &["Y"] } else { &[] };
    let atom = |rng: &mut R, vars: &[&str]| {
        let sig = sigs.choose(rng).expect("nonempty");
        Atom::new(
            sig.name.clone(),
            (0..sig.arity)
                .map(|_| random_term_with_functor(rng, constants, vars, true))
                .collect(),
        )
    };
    let d_head = atom(rng, d_vars);
    let d_body: Vec<Atom> = (0..rng.random_range(0..=3))
        .map(|_| atom(rng, d_vars))
        .collect();
    let d = Clause::new(d_head, d_body);

    let c = if rng.random_bool(0.5) {
        let mut lift: Vec<(String, &str)> = Vec::new();
        for k in constants {
            if rng.random_bool(0.6) {
                lift.push((k.to_string(), *VARIABLES.choose(rng).expect("nonempty")));
            }
        }
        let lift_term = |t: &Term| lift_constants(t, &lift);
        let lift_atom =
            |a: &Atom| Atom::new(a.predicate.clone(), a.args.iter().map(lift_term).collect());
        let kept: Vec<Atom> = d
            .body
            .iter()
            .filter(|_| rng.random_bool(0.7))
            .map(lift_atom)
            .collect();
        Clause::new(lift_atom(&d.head), kept)
    } else {
        let c_vars = &VARIABLES[..rng.random_range(1..=3)];
        let head = atom(rng, c_vars);
        let body: Vec<Atom> = (0..rng.random_range(0..=2))
            .map(|_| atom(rng, c_vars))
            .collect();
        Clause::new(head, body)
    };
    (c, d)
}

fn lift_constants(t: &Term, lift: &[(String, &str)]) -> Term {
    match t {
        Term::App(f, args) if args.is_empty() => match lift.iter().find(|(k, _)| k == f) {
            Some((_, v)) => Term::var(*v),
            None => t.clone(),
        },
        Term::App(f, args) => Term::app(
            f.clone(),
            args.iter().map(|a| lift_constants(a, lift)).collect(),
        ),
        Term::Var(_) => t.clone(),
    }
}

/// A generated inductive solution: `H` defines only abducible predicates,
/// `B ∪ H ⊨ e`, `B ⊭ e`, and `B ∪ H ∪ I` is consistent.
#[derive(Clone, Debug)]
pub struct Instance {
    pub program: OpenProgram,
    pub example: Atom,
    pub hypothesis: Theory,
}

/// Rejection-samples an [`Instance`].
pub fn random_instance<R: Rng>(rng: &mut R, reasoner: &Reasoner) -> Instance {
    loop {
        if let Some(instance) = try_instance(rng, reasoner) {
            return instance;
        }
    }
}

fn try_instance<R: Rng>(rng: &mut R, reasoner: &Reasoner) -> Option<Instance> {
    let constants = &CONSTANTS[..rng.random_range(1..=4)];
    let n = rng.random_range(2..=4);
    let mut sigs = random_signatures(rng, n);
    sigs.shuffle(rng);
    let n_abducible = rng.random_range(1..=2.min(sigs.len() - 1));
    let (abducible, defined) = sigs.split_at(n_abducible);

    let background: Theory = (0..rng.random_range(1..=6))
        .map(|_| random_clause(rng, defined, &sigs, constants, 2))
        .collect();
    // abducible predicates weighted up in hypothesis bodies so that clauses
    // of H feed each other
    let weighted: Vec<Signature> = sigs
        .iter()
        .chain(abducible)
        .chain(abducible)
        .cloned()
        .collect();
    let mut clauses: Vec<Clause> = (0..rng.random_range(1..=3))
        .map(|_| random_clause(rng, abducible, &weighted, constants, 2))
        .collect();
    // chain some clauses: the body of one mentions the previous head
    for i in 1..clauses.len() {
        if rng.random_bool(0.6) {
            let link = clauses[i - 1].head.clone();
            let c = &clauses[i];
            if link != c.head {
                clauses[i] = Clause::new(c.head.clone(), c.body.iter().cloned().chain([link]));
            }
        }
    }
    let hypothesis: Theory = clauses.into_iter().collect();
    let constraints: Vec<DefiniteGoal> = if rng.random_bool(0.3) {
        let vars = &VARIABLES[..1];
        let body: Vec<Atom> = (0..rng.random_range(1..=2))
            .map(|_| {
                let sig = sigs.choose(rng).expect("nonempty");
                random_atom(rng, sig, constants, vars, 0.4)
            })
            .collect();
        DefiniteGoal::new(body).into_iter().collect()
    } else {
        Vec::new()
    };

    let mut symbols = Symbols::of_theory(&background);
    symbols.add_theory(&hypothesis);
    let with_h = reasoner
        .least_model_with(&background.union(&hypothesis), &symbols)
        .ok()?;
    let without_h = reasoner.least_model_with(&background, &symbols).ok()?;
    let mut fresh: Vec<&Atom> = with_h.atoms().filter(|a| !without_h.contains(a)).collect();
    // Prefer examples whose proofs stack many hypothesis steps: those give
    // multi-layer connected theories.
    if rng.random_bool(0.75) {
        let mut stacked: BTreeMap<&Atom, usize> = BTreeMap::new();
        let mut by_depth: Vec<(&Atom, &Derivation)> = with_h.iter().collect();
        by_depth.sort_by_key(|(_, d)| d.depth);
        for (atom, d) in by_depth {
            let below = d
                .provenance
                .body
                .iter()
                .map(|b| stacked[b])
                .max()
                .unwrap_or(0);
            let own = usize::from(
                abducible
                    .iter()
                    .any(|s| s.name == atom.predicate && s.arity == atom.arity()),
            );
            stacked.insert(atom, below + own);
        }
        let most = fresh.iter().map(|a| stacked[a]).max()?;
        fresh.retain(|a| stacked[a] == most);
    }
    let example = (*fresh.choose(rng)?).clone();

    let program = OpenProgram::new(
        background,
        abducible.iter().cloned().collect::<BTreeSet<_>>(),
        constraints,
    );
    if !reasoner
        .is_consistent(&program.background, &hypothesis, &program.constraints)
        .ok()?
    {
        return None;
    }
    Some(Instance {
        program,
        example,
        hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let r = Reasoner::new();
        let a = random_instance(&mut instance_rng(7, 3), &r);
        let b = random_instance(&mut instance_rng(7, 3), &r);
        assert_eq!(a.hypothesis, b.hypothesis);
        assert_eq!(a.example, b.example);
    }

    #[test]
    fn instances_respect_bounds() {
        let r = Reasoner::new();
        for i in 0..50 {
            let inst = random_instance(&mut instance_rng(1, i), &r);
            assert!(inst.program.background.len() <= 6);
            assert!((1..=3).contains(&inst.hypothesis.len()));
            assert!(inst
                .hypothesis
                .iter()
                .all(|c| inst.program.is_abducible(&c.head)));
            assert!(!r
                .entails_atom(&inst.program.background, &inst.example)
                .unwrap());
        }
    }

    #[test]
    fn programs_fit_the_base_bound() {
        let mut rng = instance_rng(0, 0);
        for _ in 0..50 {
            let t = random_program(&mut rng, 12);
            assert!(!t.is_empty());
        }
    }
}
