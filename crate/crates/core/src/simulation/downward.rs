use std::collections::HashSet;

use rayon::prelude::*;

use crate::automaton::{StateId, TreeAutomaton};
use crate::relation::Relation;
use crate::util::for_each_mixed;

use super::attack::{Attack, AttackCache, AttackKey, Verdict};
use super::{pre_refine, CacheMode, Schedule, SimConfig};

type GoodSet = HashSet<(AttackKey, StateId)>;

/// Maximal downward `k`-lookahead simulation preorder.
pub fn lookahead_dw_sim(a: &TreeAutomaton, k: usize, cfg: &SimConfig) -> Relation {
    lookahead_dw_fixpoint(a, k, cfg).transitive_closure()
}

/// The refinement fixpoint, before transitive closure.
pub fn lookahead_dw_fixpoint(a: &TreeAutomaton, k: usize, cfg: &SimConfig) -> Relation {
    lookahead_dw_sim_observed(a, k, cfg, |_| {})
}

/// Like [`lookahead_dw_fixpoint`], calling `observe` with `W` after every round.
pub fn lookahead_dw_sim_observed(
    a: &TreeAutomaton,
    k: usize,
    cfg: &SimConfig,
    mut observe: impl FnMut(&Relation),
) -> Relation {
    assert!(k >= 1, "lookahead must be at least 1");
    let n = a.state_count();
    let mut w = match cfg.prerefine {
        Some(d) if d >= 1 => pre_refine(a, d),
        _ => Relation::full(n),
    };
    let mut global: GoodSet = HashSet::new();
    loop {
        let changed = match cfg.schedule {
            Schedule::Sequential => sequential_round(a, k, cfg.cache, &mut w, &mut global),
            Schedule::Parallel => parallel_round(a, k, cfg.cache, &mut w, &mut global),
        };
        observe(&w);
        if !changed {
            return w;
        }
    }
}

fn sequential_round(
    a: &TreeAutomaton,
    k: usize,
    mode: CacheMode,
    w: &mut Relation,
    global: &mut GoodSet,
) -> bool {
    let n = a.state_count();
    let mut changed = false;
    let mut cache = AttackCache::new(mode);
    for p in 0..n {
        for q in 0..n {
            if p == q || !w.contains(p, q) {
                continue;
            }
            let wins = Game {
                a,
                k,
                w,
                global,
                cache: &mut cache,
            }
            .spoiler_wins(StateId::from(p), StateId::from(q));
            global.extend(cache.fresh_good.drain());
            if wins {
                w.remove(p, q);
                changed = true;
            }
        }
    }
    changed
}

fn parallel_round(
    a: &TreeAutomaton,
    k: usize,
    mode: CacheMode,
    w: &mut Relation,
    global: &mut GoodSet,
) -> bool {
    let n = a.state_count();
    let snapshot = w.clone();
    let shared: &GoodSet = global;
    let results: Vec<(Vec<usize>, GoodSet)> = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut cache = AttackCache::new(mode);
            let mut flips = Vec::new();
            for q in 0..n {
                if p == q || !snapshot.contains(p, q) {
                    continue;
                }
                let wins = Game {
                    a,
                    k,
                    w: &snapshot,
                    global: shared,
                    cache: &mut cache,
                }
                .spoiler_wins(StateId::from(p), StateId::from(q));
                if wins {
                    flips.push(q);
                }
            }
            (flips, std::mem::take(&mut cache.fresh_good))
        })
        .collect();
    let mut changed = false;
    for (p, (flips, goods)) in results.into_iter().enumerate() {
        for q in flips {
            w.remove(p, q);
            changed = true;
        }
        global.extend(goods);
    }
    changed
}

struct Game<'g> {
    a: &'g TreeAutomaton,
    k: usize,
    w: &'g Relation,
    global: &'g GoodSet,
    cache: &'g mut AttackCache,
}

impl Game<'_> {
    /// Whether Spoiler has an attack from `p` none of whose prefixes
    /// Duplicator can answer from `q`.
    fn spoiler_wins(&mut self, p: StateId, q: StateId) -> bool {
        self.cache.start_game();
        self.explore(&Attack::new(p), 0, q)
    }

    fn explore(&mut self, atk: &Attack, depth: usize, q: StateId) -> bool {
        if depth >= 1 && self.defended(atk, q) {
            return false;
        }
        if depth == self.k {
            return true;
        }
        let frontier = atk.extendable(self.a, depth);
        if frontier.is_empty() {
            // stuck: a non-empty attack that cannot grow is maximal
            return depth >= 1;
        }
        let radix: Vec<usize> = frontier
            .iter()
            .map(|&i| self.a.outgoing(atk.nodes()[i].state).len())
            .collect();
        let mut wins = false;
        for_each_mixed(&radix, |choice| {
            let next = atk.extended(self.a, &frontier, choice);
            if self.explore(&next, depth + 1, q) {
                wins = true;
                return false;
            }
            true
        });
        wins
    }

    fn defended(&mut self, atk: &Attack, q: StateId) -> bool {
        self.cache.start_defence();
        let keys = if self.cache.mode == CacheMode::None {
            Vec::new()
        } else {
            atk.keys()
        };
        self.defend_node(atk, &keys, 0, q)
    }

    fn defend_node(&mut self, atk: &Attack, keys: &[AttackKey], node: usize, q: StateId) -> bool {
        let n = &atk.nodes()[node];
        let Some(ti) = n.transition else {
            return self.w.contains(n.state.index(), q.index());
        };
        let key = (!keys.is_empty()).then(|| (keys[node].clone(), q));
        if let Some(key) = &key {
            if let Some(v) = self.cache.lookup(self.global, key) {
                return v == Verdict::Bad;
            }
        }
        let sym = self.a.transition(ti).symbol;
        let a = self.a;
        let mut ok = false;
        // depth-first over Duplicator's transitions in index order
        for &ui in a.outgoing(q) {
            let u = a.transition(ui);
            if u.symbol != sym {
                continue;
            }
            let children = &atk.nodes()[node].children;
            if children
                .iter()
                .zip(&u.targets)
                .all(|(&c, &r)| self.defend_node(atk, keys, c, r))
            {
                ok = true;
                break;
            }
        }
        if let Some(key) = key {
            self.cache
                .store(key, if ok { Verdict::Bad } else { Verdict::Good });
        }
        ok
    }
}
