//! Brute-force ground truth for small automata: membership, tree
//! enumeration, bounded languages and naive solvers for the lookahead
//! simulation games.
//!
//! Nothing here is tuned for speed. The game solvers enumerate every
//! maximal Spoiler attack and every Duplicator answer explicitly and share
//! no code with [`crate::simulation`].

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::automaton::{RankedAlphabet, StateId, SymbolId, TreeAutomaton};
use crate::relation::Relation;
use crate::tree::Tree;
use crate::util::for_each_tuple;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("tree uses symbol id {0} outside the alphabet or with the wrong arity")]
    BadSymbol(u32),
}

/// States from which `t` can be read, computed bottom-up with one memo
/// entry per distinct subtree.
pub fn reading_states(a: &TreeAutomaton, t: &Tree) -> Result<FixedBitSet, OracleError> {
    let mut memo = HashMap::new();
    reading_states_memo(a, t, &mut memo)
}

fn reading_states_memo<'t>(
    a: &TreeAutomaton,
    t: &'t Tree,
    memo: &mut HashMap<&'t Tree, FixedBitSet>,
) -> Result<FixedBitSet, OracleError> {
    if let Some(s) = memo.get(t) {
        return Ok(s.clone());
    }
    let alphabet = a.alphabet();
    if t.symbol.index() >= alphabet.len() || alphabet.rank(t.symbol) != t.children.len() {
        return Err(OracleError::BadSymbol(t.symbol.0));
    }
    let child_sets = t
        .children
        .iter()
        .map(|c| reading_states_memo(a, c, memo))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = FixedBitSet::with_capacity(a.state_count());
    for &ti in a.with_symbol(t.symbol) {
        let tr = a.transition(ti);
        if tr
            .targets
            .iter()
            .zip(&child_sets)
            .all(|(q, set)| set.contains(q.index()))
        {
            out.insert(tr.source.index());
        }
    }
    memo.insert(t, out.clone());
    Ok(out)
}

/// Whether some accepting run of `a` exists on `t`.
pub fn accepts(a: &TreeAutomaton, t: &Tree) -> Result<bool, OracleError> {
    let states = reading_states(a, t)?;
    Ok(states.ones().any(|q| a.is_initial(StateId::from(q))))
}

/// An explicit run: the state at the node and the index of the transition
/// used there, with one sub-run per child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub state: StateId,
    pub transition: usize,
    pub children: Vec<Run>,
}

/// Extracts an accepting run of `a` on `t`, if one exists.
pub fn accepting_run(a: &TreeAutomaton, t: &Tree) -> Option<Run> {
    let root = reading_states(a, t).ok()?;
    let q = root.ones().find(|&q| a.is_initial(StateId::from(q)))?;
    run_from(a, t, StateId::from(q))
}

fn run_from(a: &TreeAutomaton, t: &Tree, q: StateId) -> Option<Run> {
    for &ti in a.outgoing(q) {
        let tr = a.transition(ti);
        if tr.symbol != t.symbol || tr.targets.len() != t.children.len() {
            continue;
        }
        let children: Option<Vec<Run>> = tr
            .targets
            .iter()
            .zip(&t.children)
            .map(|(&r, c)| run_from(a, c, r))
            .collect();
        if let Some(children) = children {
            return Some(Run {
                state: q,
                transition: ti,
                children,
            });
        }
    }
    None
}

/// Re-checks a run transition by transition against `a` and `t`.
pub fn verify_run(a: &TreeAutomaton, t: &Tree, run: &Run, root: bool) -> bool {
    if root && !a.is_initial(run.state) {
        return false;
    }
    let Some(tr) = a.transitions().get(run.transition) else {
        return false;
    };
    tr.source == run.state
        && tr.symbol == t.symbol
        && tr.targets.len() == t.children.len()
        && run.children.len() == t.children.len()
        && tr
            .targets
            .iter()
            .zip(&run.children)
            .zip(&t.children)
            .all(|((&q, r), c)| r.state == q && verify_run(a, c, r, false))
}

/// All closed trees of depth at most `depth`, ordered by depth and then
/// lexicographically by symbol index and children.
pub fn enumerate_trees(alphabet: &RankedAlphabet, depth: usize) -> Vec<Tree> {
    let mut all: Vec<Tree> = Vec::new();
    // start index of each depth band in `all`
    let mut band_start: Vec<usize> = Vec::new();
    for d in 1..=depth {
        band_start.push(all.len());
        let prev_len = all.len();
        let prev_band = if d >= 2 { band_start[d - 2] } else { prev_len };
        let mut fresh = Vec::new();
        for (sym, s) in alphabet.iter() {
            if s.rank == 0 {
                if d == 1 {
                    fresh.push(Tree::leaf(sym));
                }
                continue;
            }
            if d == 1 {
                continue;
            }
            // children range over trees of depth <= d-1, at least one of depth exactly d-1
            for_each_tuple(s.rank, prev_len, |idx| {
                if idx.iter().any(|&i| i >= prev_band) {
                    fresh.push(Tree::node(
                        sym,
                        idx.iter().map(|&i| all[i].clone()).collect(),
                    ));
                }
                true
            });
        }
        all.extend(fresh);
    }
    all
}

/// The accepted trees of depth at most `depth`.
pub fn bounded_language(a: &TreeAutomaton, depth: usize) -> BTreeSet<Tree> {
    enumerate_trees(a.alphabet(), depth)
        .into_iter()
        .filter(|t| accepts(a, t).unwrap_or(false))
        .collect()
}

/// A tree of depth at most `depth` accepted by exactly one of `a`, `b`.
///
/// Instead of enumerating trees, this groups trees by the pair of state sets
/// that read them and keeps one smallest representative per group, which
/// decides the same question on the same tree set.
pub fn distinguishing_tree(a: &TreeAutomaton, b: &TreeAutomaton, depth: usize) -> Option<Tree> {
    assert_eq!(
        a.alphabet(),
        b.alphabet(),
        "automata over different alphabets"
    );
    let alphabet = a.alphabet();
    let accept =
        |aut: &TreeAutomaton, s: &FixedBitSet| s.ones().any(|q| aut.is_initial(StateId::from(q)));
    let post = |aut: &TreeAutomaton, sym: SymbolId, children: &[&FixedBitSet]| {
        let mut out = FixedBitSet::with_capacity(aut.state_count());
        for &ti in aut.with_symbol(sym) {
            let tr = aut.transition(ti);
            if tr
                .targets
                .iter()
                .zip(children)
                .all(|(q, s)| s.contains(q.index()))
            {
                out.insert(tr.source.index());
            }
        }
        out
    };

    type Key = (FixedBitSet, FixedBitSet);
    let mut seen: HashMap<Key, usize> = HashMap::new();
    let mut reps: Vec<(Key, Tree)> = Vec::new();
    let mut prev_gen_start = 0usize;
    for d in 1..=depth {
        let known = reps.len();
        let mut fresh: Vec<(Key, Tree)> = Vec::new();
        for (sym, s) in alphabet.iter() {
            if s.rank == 0 {
                if d == 1 {
                    let key = (post(a, sym, &[]), post(b, sym, &[]));
                    fresh.push((key, Tree::leaf(sym)));
                }
                continue;
            }
            if d == 1 || known == 0 {
                continue;
            }
            for_each_tuple(s.rank, known, |idx| {
                if idx.iter().any(|&i| i >= prev_gen_start) {
                    let ca: Vec<&FixedBitSet> = idx.iter().map(|&i| &reps[i].0 .0).collect();
                    let cb: Vec<&FixedBitSet> = idx.iter().map(|&i| &reps[i].0 .1).collect();
                    let key = (post(a, sym, &ca), post(b, sym, &cb));
                    let tree = Tree::node(sym, idx.iter().map(|&i| reps[i].1.clone()).collect());
                    fresh.push((key, tree));
                }
                true
            });
        }
        prev_gen_start = known;
        for (key, tree) in fresh {
            if seen.contains_key(&key) {
                continue;
            }
            if accept(a, &key.0) != accept(b, &key.1) {
                return Some(tree);
            }
            seen.insert(key.clone(), reps.len());
            reps.push((key, tree));
        }
        if reps.len() == known {
            break;
        }
    }
    None
}

/// Whether `a` and `b` accept the same trees of depth at most `depth`.
pub fn bounded_equiv(a: &TreeAutomaton, b: &TreeAutomaton, depth: usize) -> bool {
    distinguishing_tree(a, b, depth).is_none()
}

/// Ordinary downward simulation by plain refinement: drop `(p, q)` while some
/// transition of `p` has no same-symbol answer from `q` with targets related
/// pointwise.
pub fn ordinary_dw_sim(a: &TreeAutomaton) -> Relation {
    let n = a.state_count();
    let mut w = Relation::full(n);
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if !w.contains(p, q) {
                    continue;
                }
                let ok = a.outgoing_transitions(StateId::from(p)).all(|tp| {
                    a.outgoing_transitions(StateId::from(q)).any(|tq| {
                        tq.symbol == tp.symbol
                            && tp
                                .targets
                                .iter()
                                .zip(&tq.targets)
                                .all(|(x, y)| w.contains(x.index(), y.index()))
                    })
                });
                if !ok {
                    w.remove(p, q);
                    changed = true;
                }
            }
        }
        if !changed {
            return w;
        }
    }
}

#[derive(Clone, Debug)]
enum NaiveAttack {
    Leaf(StateId),
    Move(usize, Vec<NaiveAttack>),
}

fn maximal_attacks(a: &TreeAutomaton, p: StateId, k: usize) -> Vec<NaiveAttack> {
    if k == 0 || a.outgoing(p).is_empty() {
        return vec![NaiveAttack::Leaf(p)];
    }
    let mut out = Vec::new();
    for &ti in a.outgoing(p) {
        let tr = a.transition(ti);
        let child_options: Vec<Vec<NaiveAttack>> = tr
            .targets
            .iter()
            .map(|&r| maximal_attacks(a, r, k - 1))
            .collect();
        let mut combos: Vec<Vec<NaiveAttack>> = vec![Vec::new()];
        for opts in &child_options {
            let mut next = Vec::new();
            for c in &combos {
                for o in opts {
                    let mut v = c.clone();
                    v.push(o.clone());
                    next.push(v);
                }
            }
            combos = next;
        }
        for children in combos {
            out.push(NaiveAttack::Move(ti, children));
        }
    }
    out
}

fn attack_depth(atk: &NaiveAttack) -> usize {
    match atk {
        NaiveAttack::Leaf(_) => 0,
        NaiveAttack::Move(_, ch) => 1 + ch.iter().map(attack_depth).max().unwrap_or(0),
    }
}

fn attack_state(a: &TreeAutomaton, atk: &NaiveAttack) -> StateId {
    match atk {
        NaiveAttack::Leaf(s) => *s,
        NaiveAttack::Move(ti, _) => a.transition(*ti).source,
    }
}

fn truncate(a: &TreeAutomaton, atk: &NaiveAttack, d: usize) -> NaiveAttack {
    match atk {
        NaiveAttack::Move(ti, ch) if d > 0 => {
            NaiveAttack::Move(*ti, ch.iter().map(|c| truncate(a, c, d - 1)).collect())
        }
        _ => NaiveAttack::Leaf(attack_state(a, atk)),
    }
}

fn dw_defends(a: &TreeAutomaton, atk: &NaiveAttack, q: StateId, w: &Relation) -> bool {
    match atk {
        NaiveAttack::Leaf(s) => w.contains(s.index(), q.index()),
        NaiveAttack::Move(ti, ch) => {
            let sym = a.transition(*ti).symbol;
            a.outgoing_transitions(q).any(|tq| {
                tq.symbol == sym
                    && ch
                        .iter()
                        .zip(&tq.targets)
                        .all(|(c, &r)| dw_defends(a, c, r, w))
            })
        }
    }
}

/// Maximal downward `k`-lookahead simulation by exhaustive game solving:
/// `(p, q)` is dropped when some maximal Spoiler attack from `p` (depth `k`,
/// or shallower if every frontier state is stuck) has no defended prefix of
/// any depth `1..=depth`. Iterated to a fixpoint, then transitively closed.
pub fn naive_lookahead_dw_sim(a: &TreeAutomaton, k: usize) -> Relation {
    naive_lookahead_dw_fixpoint(a, k).transitive_closure()
}

/// The refinement fixpoint of [`naive_lookahead_dw_sim`] before closure.
pub fn naive_lookahead_dw_fixpoint(a: &TreeAutomaton, k: usize) -> Relation {
    assert!(k >= 1);
    let n = a.state_count();
    let attacks: Vec<Vec<NaiveAttack>> = (0..n)
        .map(|p| {
            if a.outgoing(StateId::from(p)).is_empty() {
                Vec::new()
            } else {
                maximal_attacks(a, StateId::from(p), k)
            }
        })
        .collect();
    let mut w = Relation::full(n);
    loop {
        let snapshot = w.clone();
        let mut changed = false;
        for (p, from_p) in attacks.iter().enumerate() {
            for q in 0..n {
                if !snapshot.contains(p, q) {
                    continue;
                }
                let spoiler_wins = from_p.iter().any(|atk| {
                    let depth = attack_depth(atk);
                    !(1..=depth)
                        .any(|d| dw_defends(a, &truncate(a, atk, d), StateId::from(q), &snapshot))
                });
                if spoiler_wins {
                    w.remove(p, q);
                    changed = true;
                }
            }
        }
        if !changed {
            return w;
        }
    }
}

/// One upward step: the transition used and the position of the current state.
type UpStep = (usize, usize);

fn maximal_paths(a: &TreeAutomaton, q: StateId, k: usize) -> Vec<Vec<UpStep>> {
    if k == 0 || a.occurrences(q).is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for &(ti, pos) in a.occurrences(q) {
        let src = a.transition(ti).source;
        for mut rest in maximal_paths(a, src, k - 1) {
            rest.insert(0, (ti, pos));
            out.push(rest);
        }
    }
    out
}

fn up_defends(
    a: &TreeAutomaton,
    path: &[UpStep],
    q: StateId,
    r: StateId,
    side: &Relation,
    w: &Relation,
    first: bool,
) -> bool {
    if !first && a.is_initial(q) && !a.is_initial(r) {
        return false;
    }
    let Some((&(ti, pos), rest)) = path.split_first() else {
        return w.contains(q.index(), r.index());
    };
    let t = a.transition(ti);
    a.occurrences(r).iter().any(|&(ui, upos)| {
        let u = a.transition(ui);
        upos == pos
            && u.symbol == t.symbol
            && t.targets
                .iter()
                .zip(&u.targets)
                .enumerate()
                .all(|(j, (x, y))| j == pos || side.contains(x.index(), y.index()))
            && up_defends(a, rest, t.source, u.source, side, w, false)
    })
}

/// Maximal upward `k`-lookahead simulation with respect to `side`, by
/// exhaustive enumeration of Spoiler's upward paths and Duplicator's answers.
pub fn naive_lookahead_up_sim(a: &TreeAutomaton, k: usize, side: &Relation) -> Relation {
    naive_lookahead_up_fixpoint(a, k, side).transitive_closure()
}

pub fn naive_lookahead_up_fixpoint(a: &TreeAutomaton, k: usize, side: &Relation) -> Relation {
    assert!(k >= 1);
    let n = a.state_count();
    let paths: Vec<Vec<Vec<UpStep>>> = (0..n)
        .map(|q| {
            if a.occurrences(StateId::from(q)).is_empty() {
                Vec::new()
            } else {
                maximal_paths(a, StateId::from(q), k)
            }
        })
        .collect();
    let mut w = Relation::from_fn(n, |q, r| {
        !a.is_initial(StateId::from(q)) || a.is_initial(StateId::from(r))
    });
    loop {
        let snapshot = w.clone();
        let mut changed = false;
        for (q, from_q) in paths.iter().enumerate() {
            for r in 0..n {
                if !snapshot.contains(q, r) {
                    continue;
                }
                let spoiler_wins = from_q.iter().any(|path| {
                    !(1..=path.len()).any(|j| {
                        up_defends(
                            a,
                            &path[..j],
                            StateId::from(q),
                            StateId::from(r),
                            side,
                            &snapshot,
                            true,
                        )
                    })
                });
                if spoiler_wins {
                    w.remove(q, r);
                    changed = true;
                }
            }
        }
        if !changed {
            return w;
        }
    }
}

/// Bounded downward language inclusion between two states: every tree of
/// depth at most `depth` readable from `p` is readable from `q`.
pub fn bounded_state_inclusion(a: &TreeAutomaton, p: StateId, q: StateId, depth: usize) -> bool {
    enumerate_trees(a.alphabet(), depth).iter().all(|t| {
        let s = reading_states(a, t).expect("enumerated over own alphabet");
        !s.contains(p.index()) || s.contains(q.index())
    })
}
