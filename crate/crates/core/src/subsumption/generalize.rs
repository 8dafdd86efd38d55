//! Enumeration of clauses that θ-subsume a ground clause.
//!
//! A generalization of a ground clause `D` is obtained by (1) choosing a
//! subset of `D`'s body and (2) an inverse substitution: for every constant,
//! some of its occurrences are kept and the rest are partitioned into
//! blocks, each block becoming one variable. Applying the obvious
//! substitution (each variable back to its constant) turns the result into a
//! subset of `D`, so every emitted clause subsumes `D`.
//!
//! Emission order:
//! 1. three anchors: every constant replaced by one shared variable over the
//!    full body, the same over the bare head, and `D` itself;
//! 2. all inverse substitutions over the full body;
//! 3. the same for each proper body subset, smallest subsets first.
//!
//! Within a body choice, inverse substitutions come in order of kept
//! occurrences, then number of variables (coarser partitions first). Clauses
//! equal up to renaming are emitted once.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet, VecDeque};

use itertools::Itertools;

use crate::syntax::{Atom, Clause, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Label {
    Block(usize),
    Keep,
}

// Constants with more occurrences than this only get three labelings:
// one shared variable, all kept, one variable per occurrence.
const MAX_EXHAUSTIVE_OCCURRENCES: usize = 6;

fn labelings(occurrences: usize) -> Vec<Vec<Label>> {
    if occurrences > MAX_EXHAUSTIVE_OCCURRENCES {
        return vec![
            vec![Label::Block(0); occurrences],
            (0..occurrences).map(Label::Block).collect(),
            vec![Label::Keep; occurrences],
        ];
    }
    fn go(n: usize, next_block: usize, prefix: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=next_block {
            prefix.push(Label::Block(b));
            go(n, next_block.max(b + 1), prefix, out);
            prefix.pop();
        }
        prefix.push(Label::Keep);
        go(n, next_block, prefix, out);
        prefix.pop();
    }
    let mut out = Vec::new();
    go(occurrences, 0, &mut Vec::new(), &mut out);
    out.sort_by_key(|l| {
        let kept = l.iter().filter(|x| **x == Label::Keep).count();
        let blocks = l.iter().filter(|x| **x != Label::Keep).unique().count();
        (kept, blocks, l.clone())
    });
    out
}

fn cost(labels: &[Label]) -> (usize, usize) {
    let kept = labels.iter().filter(|x| **x == Label::Keep).count();
    let blocks = labels
        .iter()
        .filter(|x| **x != Label::Keep)
        .unique()
        .count();
    (kept, blocks)
}

/// Rebuilds `clause`, replacing the k-th constant occurrence (head first,
/// then body in set order, arguments left to right) by `f(k, name)`.
fn map_constants(clause: &Clause, f: &mut impl FnMut(usize, &str) -> Term) -> Clause {
    fn term(t: &Term, k: &mut usize, f: &mut impl FnMut(usize, &str) -> Term) -> Term {
        match t {
            Term::App(c, args) if args.is_empty() => {
                let out = f(*k, c);
                *k += 1;
                out
            }
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| term(a, k, f)).collect())
            }
            Term::Var(_) => t.clone(),
        }
    }
    let mut k = 0;
    let mut atom = |a: &Atom| {
        Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| term(t, &mut k, f)).collect(),
        )
    };
    let head = atom(&clause.head);
    let body: Vec<Atom> = clause.body.iter().map(&mut atom).collect();
    Clause::new(head, body)
}

/// Inverse substitutions over one fixed clause, cheapest first.
struct InverseSubstitutions {
    template: Clause,
    // per occurrence: (constant index, rank among that constant's occurrences)
    occurrences: Vec<(usize, usize)>,
    options: Vec<Vec<Vec<Label>>>,
    heap: BinaryHeap<Reverse<(usize, usize, Vec<usize>)>>,
    queued: HashSet<Vec<usize>>,
}

impl InverseSubstitutions {
    fn new(template: Clause) -> Self {
        let mut names: Vec<String> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut occurrences = Vec::new();
        map_constants(&template, &mut |_, c| {
            let ci = match names.iter().position(|n| n == c) {
                Some(i) => i,
                None => {
                    names.push(c.to_string());
                    counts.push(0);
                    names.len() - 1
                }
            };
            occurrences.push((ci, counts[ci]));
            counts[ci] += 1;
            Term::constant(c)
        });
        let options: Vec<Vec<Vec<Label>>> = counts.iter().map(|&n| labelings(n)).collect();
        let start = vec![0; options.len()];
        let mut s = InverseSubstitutions {
            template,
            occurrences,
            options,
            heap: BinaryHeap::new(),
            queued: HashSet::new(),
        };
        s.push(start);
        s
    }

    fn push(&mut self, combo: Vec<usize>) {
        if self.queued.insert(combo.clone()) {
            let (kept, blocks) = combo
                .iter()
                .enumerate()
                .map(|(ci, &oi)| cost(&self.options[ci][oi]))
                .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
            self.heap.push(Reverse((kept, blocks, combo)));
        }
    }

    fn build(&self, combo: &[usize]) -> Clause {
        map_constants(&self.template, &mut |k, c| {
            let (ci, rank) = self.occurrences[k];
            match self.options[ci][combo[ci]][rank] {
                Label::Keep => Term::constant(c),
                Label::Block(b) => Term::Var(format!("G{ci}_{b}")),
            }
        })
    }
}

impl Iterator for InverseSubstitutions {
    type Item = Clause;

    fn next(&mut self) -> Option<Clause> {
        let Reverse((_, _, combo)) = self.heap.pop()?;
        for ci in 0..combo.len() {
            if combo[ci] + 1 < self.options[ci].len() {
                let mut succ = combo.clone();
                succ[ci] += 1;
                self.push(succ);
            }
        }
        Some(self.build(&combo))
    }
}

/// The lazy stream of generalizations of a ground clause.
pub struct Generalizations {
    source: Clause,
    body: Vec<Atom>,
    anchors: VecDeque<Clause>,
    subsets: Box<dyn Iterator<Item = Vec<usize>> + Send>,
    current: Option<InverseSubstitutions>,
    emitted: BTreeSet<Clause>,
}

impl Generalizations {
    pub fn new(ground: &Clause) -> Self {
        let body: Vec<Atom> = ground.body.iter().cloned().collect();
        let n = body.len();
        let coarsest = |c: Clause| InverseSubstitutions::new(c).next().expect("one labeling");
        let anchors = VecDeque::from([
            coarsest(ground.clone()),
            coarsest(Clause::fact(ground.head.clone())),
            ground.clone(),
        ]);
        let subsets = std::iter::once((0..n).collect())
            .chain((0..n).flat_map(move |k| (0..n).combinations(k)));
        Generalizations {
            source: ground.clone(),
            body,
            anchors,
            subsets: Box::new(subsets),
            current: None,
            emitted: BTreeSet::new(),
        }
    }

    fn fresh(&mut self, clause: Clause) -> Option<Clause> {
        self.emitted.insert(clause.canonical()).then_some(clause)
    }
}

impl Iterator for Generalizations {
    type Item = Clause;

    fn next(&mut self) -> Option<Clause> {
        loop {
            if let Some(c) = self.anchors.pop_front() {
                if let Some(c) = self.fresh(c) {
                    return Some(c);
                }
                continue;
            }
            if self.current.is_none() {
                let subset = self.subsets.next()?;
                let template = Clause::new(
                    self.source.head.clone(),
                    subset.iter().map(|&i| self.body[i].clone()),
                );
                self.current = Some(InverseSubstitutions::new(template));
            }
            match self.current.as_mut().and_then(Iterator::next) {
                Some(c) => {
                    if let Some(c) = self.fresh(c) {
                        return Some(c);
                    }
                }
                None => self.current = None,
            }
        }
    }
}

/// The first `budget` generalizations of a ground clause.
pub fn generalize_clause(ground: &Clause, budget: usize) -> Vec<Clause> {
    Generalizations::new(ground).take(budget).collect()
}
