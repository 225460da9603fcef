//! Exact language operations by bottom-up subset construction.
//!
//! Only macro-states reachable from leaf rules are built. The empty
//! macro-state appears only when some symbol and child tuple leads nowhere.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::automaton::{StateId, Transition, TreeAutomaton};
use crate::error::{ComplementError, ModelError};
use crate::relation::Relation;
use crate::util::for_each_mixed;

pub const DEFAULT_MACRO_BUDGET: usize = 1 << 20;
pub const DEFAULT_TRANSITION_BUDGET: usize = 1 << 24;
/// Environment variable overriding the default macro-state budget.
pub const BUDGET_ENV: &str = "TAREDUCE_MACRO_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplementConfig {
    pub macro_budget: usize,
    pub transition_budget: usize,
}

impl Default for ComplementConfig {
    fn default() -> Self {
        let macro_budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MACRO_BUDGET);
        ComplementConfig {
            macro_budget,
            transition_budget: DEFAULT_TRANSITION_BUDGET,
        }
    }
}

/// A deterministic complete automaton together with the state set each of
/// its states stands for.
#[derive(Clone, Debug)]
pub struct Determinized {
    pub automaton: TreeAutomaton,
    pub macro_states: Vec<FixedBitSet>,
}

struct Subsets {
    macros: Vec<FixedBitSet>,
    transitions: Vec<Transition>,
}

fn subset_construction(
    a: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<Subsets, ComplementError> {
    let n = a.state_count();
    let al = a.alphabet();
    let mut macros: Vec<FixedBitSet> = Vec::new();
    let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut transitions = Vec::new();

    let mut intern =
        |m: FixedBitSet, macros: &mut Vec<FixedBitSet>| -> Result<usize, ComplementError> {
            if let Some(&i) = index.get(&m) {
                return Ok(i);
            }
            if macros.len() >= cfg.macro_budget {
                return Err(ComplementError::Budget {
                    what: "macro-states",
                    budget: cfg.macro_budget,
                });
            }
            index.insert(m.clone(), macros.len());
            macros.push(m);
            Ok(macros.len() - 1)
        };

    for (sym, s) in al.iter() {
        if s.rank == 0 {
            let mut m = FixedBitSet::with_capacity(n);
            for &ti in a.with_symbol(sym) {
                m.insert(a.transition(ti).source.index());
            }
            let i = intern(m, &mut macros)?;
            transitions.push(Transition::leaf(StateId::from(i), sym));
        }
    }

    // Each child tuple is visited once: when its largest macro index `j` is
    // processed, with `pos` the first position holding `j`.
    let mut j = 0;
    while j < macros.len() {
        for (sym, s) in al.iter() {
            if s.rank == 0 {
                continue;
            }
            let rules = a.with_symbol(sym);
            for pos in 0..s.rank {
                let radix: Vec<usize> = (0..s.rank)
                    .map(|i| match i.cmp(&pos) {
                        std::cmp::Ordering::Less => j,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Greater => j + 1,
                    })
                    .collect();
                let mut failure = None;
                for_each_mixed(&radix, |choice| {
                    let tuple: Vec<usize> = choice
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| if i == pos { j } else { c })
                        .collect();
                    let mut m = FixedBitSet::with_capacity(n);
                    for &ti in rules {
                        let t = a.transition(ti);
                        if t.targets
                            .iter()
                            .zip(&tuple)
                            .all(|(r, &mi)| macros[mi].contains(r.index()))
                        {
                            m.insert(t.source.index());
                        }
                    }
                    match intern(m, &mut macros) {
                        Ok(i) => {
                            if transitions.len() >= cfg.transition_budget {
                                failure = Some(ComplementError::Budget {
                                    what: "transitions",
                                    budget: cfg.transition_budget,
                                });
                                return false;
                            }
                            transitions.push(Transition::new(
                                StateId::from(i),
                                sym,
                                tuple.iter().map(|&x| StateId::from(x)).collect(),
                            ));
                            true
                        }
                        Err(e) => {
                            failure = Some(e);
                            false
                        }
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
            }
        }
        j += 1;
    }
    Ok(Subsets {
        macros,
        transitions,
    })
}

fn from_subsets(a: &TreeAutomaton, s: Subsets, flip: bool) -> Determinized {
    let initial: Vec<StateId> = s
        .macros
        .iter()
        .enumerate()
        .filter(|(_, m)| m.is_disjoint(a.initial_set()) == flip)
        .map(|(i, _)| StateId::from(i))
        .collect();
    let automaton = TreeAutomaton::from_valid_parts(
        a.alphabet().clone(),
        s.macros.len(),
        initial,
        s.transitions,
    );
    Determinized {
        automaton,
        macro_states: s.macros,
    }
}

pub fn determinize_complete(a: &TreeAutomaton) -> Result<TreeAutomaton, ComplementError> {
    Ok(determinize_with(a, &ComplementConfig::default())?.automaton)
}

pub fn determinize_with(
    a: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<Determinized, ComplementError> {
    Ok(from_subsets(a, subset_construction(a, cfg)?, false))
}

/// An automaton accepting exactly the closed trees `a` rejects.
pub fn complement(a: &TreeAutomaton) -> Result<TreeAutomaton, ComplementError> {
    complement_with(a, &ComplementConfig::default())
}

pub fn complement_with(
    a: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<TreeAutomaton, ComplementError> {
    Ok(from_subsets(a, subset_construction(a, cfg)?, true).automaton)
}

/// Product automaton restricted to pairs reachable from `I_a × I_b`.
pub fn intersect(a: &TreeAutomaton, b: &TreeAutomaton) -> Result<TreeAutomaton, ModelError> {
    if a.alphabet() != b.alphabet() {
        return Err(ModelError::AlphabetMismatch);
    }
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut intern = |pair, pairs: &mut Vec<_>| {
        *index.entry(pair).or_insert_with(|| {
            pairs.push(pair);
            pairs.len() - 1
        })
    };
    let mut initial = Vec::new();
    for p in a.initial_states() {
        for q in b.initial_states() {
            initial.push(StateId::from(intern((p, q), &mut pairs)));
        }
    }
    let mut transitions = Vec::new();
    let mut next = 0;
    while next < pairs.len() {
        let (p, q) = pairs[next];
        for t in a.outgoing_transitions(p) {
            for u in b.outgoing_transitions(q) {
                if t.symbol != u.symbol {
                    continue;
                }
                let targets = t
                    .targets
                    .iter()
                    .zip(&u.targets)
                    .map(|(&x, &y)| StateId::from(intern((x, y), &mut pairs)))
                    .collect();
                transitions.push(Transition::new(StateId::from(next), t.symbol, targets));
            }
        }
        next += 1;
    }
    Ok(TreeAutomaton::from_valid_parts(
        a.alphabet().clone(),
        pairs.len(),
        initial,
        transitions,
    ))
}

/// Disjoint union: states of `b` are shifted past those of `a`.
pub fn union(a: &TreeAutomaton, b: &TreeAutomaton) -> Result<TreeAutomaton, ModelError> {
    if a.alphabet() != b.alphabet() {
        return Err(ModelError::AlphabetMismatch);
    }
    let off = a.state_count();
    let shift = |q: StateId| StateId::from(q.index() + off);
    let mut transitions = a.transitions().to_vec();
    transitions.extend(b.transitions().iter().map(|t| {
        Transition::new(
            shift(t.source),
            t.symbol,
            t.targets.iter().map(|&r| shift(r)).collect(),
        )
    }));
    let initial: Vec<StateId> = a
        .initial_states()
        .chain(b.initial_states().map(shift))
        .collect();
    Ok(TreeAutomaton::from_valid_parts(
        a.alphabet().clone(),
        off + b.state_count(),
        initial,
        transitions,
    ))
}

/// Whether no closed tree is accepted.
pub fn is_empty(a: &TreeAutomaton) -> bool {
    a.productive_states().is_disjoint(a.initial_set())
}

/// `L(a) ⊆ L(b)`.
pub fn includes(
    a: &TreeAutomaton,
    b: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<bool, ComplementError> {
    let not_b = complement_with(b, cfg)?;
    Ok(is_empty(&intersect(a, &not_b)?))
}

/// `L(a) = L(b)`. A budget overrun is an error, never `false`.
pub fn equivalent(a: &TreeAutomaton, b: &TreeAutomaton) -> Result<bool, ComplementError> {
    equivalent_with(a, b, &ComplementConfig::default())
}

pub fn equivalent_with(
    a: &TreeAutomaton,
    b: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<bool, ComplementError> {
    Ok(includes(a, b, cfg)? && includes(b, a, cfg)?)
}

/// Whether every closed tree over the alphabet is accepted.
pub fn is_universal(a: &TreeAutomaton) -> Result<bool, ComplementError> {
    Ok(is_empty(&complement(a)?))
}

/// Exact downward language inclusion between states: `[p][q]` holds iff
/// every tree readable from `p` is readable from `q`.
pub fn dw_inclusion(
    a: &TreeAutomaton,
    cfg: &ComplementConfig,
) -> Result<Relation, ComplementError> {
    let s = subset_construction(a, cfg)?;
    let n = a.state_count();
    let mut r = Relation::full(n);
    for m in &s.macros {
        for p in m.ones() {
            for q in 0..n {
                if !m.contains(q) {
                    r.remove(p, q);
                }
            }
        }
    }
    Ok(r)
}
