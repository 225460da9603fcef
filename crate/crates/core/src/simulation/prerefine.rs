use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::automaton::TreeAutomaton;
use crate::relation::Relation;
use crate::util::for_each_tuple;

/// Upper bound on distinct state sets kept per level. Levels beyond it are
/// skipped, which only loses refutations.
const LEVEL_BUDGET: usize = 512;

/// Over-approximation of every downward lookahead simulation.
///
/// `(p, q)` is cleared when some tree of depth at most `depth`, possibly cut
/// off at that depth, can be read from `p` but not from `q`. Trees are
/// grouped by the set of states that read them; each group is one witness.
pub fn pre_refine(a: &TreeAutomaton, depth: usize) -> Relation {
    let n = a.state_count();
    let mut w = Relation::full(n);
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    // level 0: a cut-off subtree is readable from every state
    let mut level: Vec<FixedBitSet> = vec![all];
    for _ in 1..=depth {
        let mut next: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (sym, s) in a.alphabet().iter() {
            let rules = a.with_symbol(sym);
            if rules.is_empty() {
                continue;
            }
            for_each_tuple(s.rank, level.len(), |idx| {
                let mut readers = FixedBitSet::with_capacity(n);
                for &ti in rules {
                    let t = a.transition(ti);
                    if t.targets
                        .iter()
                        .zip(idx)
                        .all(|(r, &i)| level[i].contains(r.index()))
                    {
                        readers.insert(t.source.index());
                    }
                }
                if readers.count_ones(..) > 0 {
                    next.insert(readers.ones().collect());
                }
                true
            });
        }
        for set in &next {
            for &p in set {
                for q in 0..n {
                    if set.binary_search(&q).is_err() {
                        w.remove(p, q);
                    }
                }
            }
        }
        if next.len() > LEVEL_BUDGET {
            break;
        }
        level = next
            .into_iter()
            .map(|v| {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend(v);
                b
            })
            .collect();
    }
    w
}
