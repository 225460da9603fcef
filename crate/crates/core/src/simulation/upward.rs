use std::collections::HashMap;

use crate::automaton::{StateId, TreeAutomaton};
use crate::error::RelationError;
use crate::relation::Relation;

/// Maximal upward `k`-lookahead simulation with respect to `side`.
///
/// Spoiler climbs from `q` through transitions in which the current state
/// occurs at some position; Duplicator climbs from `r` through transitions
/// with the same symbol and position, whose other children are `side`-larger
/// than Spoiler's. Every configuration reached must satisfy
/// `q ∈ I ⟹ r ∈ I`.
pub fn lookahead_up_sim(
    a: &TreeAutomaton,
    k: usize,
    side: &Relation,
) -> Result<Relation, RelationError> {
    Ok(lookahead_up_fixpoint(a, k, side)?.transitive_closure())
}

pub fn lookahead_up_fixpoint(
    a: &TreeAutomaton,
    k: usize,
    side: &Relation,
) -> Result<Relation, RelationError> {
    assert!(k >= 1, "lookahead must be at least 1");
    let n = a.state_count();
    side.check_dim(n)?;
    let mut w = Relation::from_fn(n, |q, r| {
        !a.is_initial(StateId::from(q)) || a.is_initial(StateId::from(r))
    });
    loop {
        let mut changed = false;
        for q in 0..n {
            for r in 0..n {
                if q == r || !w.contains(q, r) {
                    continue;
                }
                let mut game = UpGame {
                    a,
                    k,
                    side,
                    w: &w,
                    path: Vec::new(),
                    states: vec![StateId::from(q)],
                };
                if game.explore(StateId::from(r)) {
                    w.remove(q, r);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(w);
        }
    }
}

struct UpGame<'g> {
    a: &'g TreeAutomaton,
    k: usize,
    side: &'g Relation,
    w: &'g Relation,
    /// Spoiler's moves so far: transition index and position of the child.
    path: Vec<(usize, usize)>,
    /// Spoiler's states along the path; one longer than `path`.
    states: Vec<StateId>,
}

impl UpGame<'_> {
    fn explore(&mut self, r: StateId) -> bool {
        if !self.path.is_empty() && self.defended(r) {
            return false;
        }
        if self.path.len() == self.k {
            return true;
        }
        let cur = *self.states.last().expect("path has a start");
        let occurrences = self.a.occurrences(cur);
        if occurrences.is_empty() {
            return !self.path.is_empty();
        }
        for &(ti, pos) in occurrences {
            self.path.push((ti, pos));
            self.states.push(self.a.transition(ti).source);
            let wins = self.explore(r);
            self.path.pop();
            self.states.pop();
            if wins {
                return true;
            }
        }
        false
    }

    fn defended(&self, r: StateId) -> bool {
        let mut memo = HashMap::new();
        self.defend_from(0, r, &mut memo)
    }

    fn defend_from(
        &self,
        m: usize,
        r: StateId,
        memo: &mut HashMap<(usize, StateId), bool>,
    ) -> bool {
        let q = self.states[m];
        if m == self.path.len() {
            return self.w.contains(q.index(), r.index());
        }
        if m > 0 && self.a.is_initial(q) && !self.a.is_initial(r) {
            return false;
        }
        if let Some(&v) = memo.get(&(m, r)) {
            return v;
        }
        let (ti, pos) = self.path[m];
        let t = self.a.transition(ti);
        let ok = self.a.occurrences(r).iter().any(|&(ui, upos)| {
            let u = self.a.transition(ui);
            upos == pos
                && u.symbol == t.symbol
                && t.targets
                    .iter()
                    .zip(&u.targets)
                    .enumerate()
                    .all(|(j, (x, y))| j == pos || self.side.contains(x.index(), y.index()))
                && self.defend_from(m + 1, u.source, memo)
        });
        memo.insert((m, r), ok);
        ok
    }
}
