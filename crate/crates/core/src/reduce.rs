//! Transition pruning, quotienting, and the `Heavy(x, y)` reduction loop.

use crate::automaton::{StateId, Transition, TreeAutomaton};
use crate::error::RelationError;
use crate::relation::Relation;
use crate::simulation::{lookahead_dw_sim, lookahead_up_sim, SimConfig};

/// One side of a pruning relation: a preorder, used either as is or through
/// its strict part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneSide {
    pub preorder: Relation,
    pub strict: bool,
}

impl PruneSide {
    pub fn plain(preorder: Relation) -> Self {
        PruneSide {
            preorder,
            strict: false,
        }
    }

    pub fn strict(preorder: Relation) -> Self {
        PruneSide {
            preorder,
            strict: true,
        }
    }

    fn le(&self, p: usize, q: usize) -> bool {
        self.preorder.contains(p, q)
    }

    fn lt(&self, p: usize, q: usize) -> bool {
        self.preorder.contains(p, q) && !self.preorder.contains(q, p)
    }
}

/// The pruning relation `P(source, target)`: `<p, σ, r>` is dominated by
/// `<p', σ, r'>` when `p` is below `p'` and `r` is below `r'` under the
/// lifted target relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneSpec {
    pub source: PruneSide,
    pub target: PruneSide,
}

impl PruneSpec {
    pub fn new(source: PruneSide, target: PruneSide) -> Result<Self, RelationError> {
        if source.strict == target.strict {
            return Err(RelationError::Strictness);
        }
        if source.preorder.dim() != target.preorder.dim() {
            return Err(RelationError::Dimension {
                expected: source.preorder.dim(),
                found: target.preorder.dim(),
            });
        }
        Ok(PruneSpec { source, target })
    }

    /// Whether `t` is dominated by `u`.
    pub fn dominates(&self, t: &Transition, u: &Transition) -> bool {
        if t.symbol != u.symbol {
            return false;
        }
        let (p, q) = (t.source.index(), u.source.index());
        let src = if self.source.strict {
            self.source.lt(p, q)
        } else {
            self.source.le(p, q)
        };
        src && lifted(&self.target, &t.targets, &u.targets)
    }
}

/// Lifts a side to target tuples: pointwise below, and for a strict side at
/// least one position strictly below.
pub fn lifted(side: &PruneSide, r: &[StateId], s: &[StateId]) -> bool {
    let pointwise = r.iter().zip(s).all(|(x, y)| side.le(x.index(), y.index()));
    pointwise && (!side.strict || r.iter().zip(s).any(|(x, y)| side.lt(x.index(), y.index())))
}

/// Removes every transition dominated by some transition of `a` (all
/// comparisons are against the original transition set).
pub fn prune(a: &TreeAutomaton, spec: &PruneSpec) -> Result<TreeAutomaton, RelationError> {
    spec.source.preorder.check_dim(a.state_count())?;
    spec.target.preorder.check_dim(a.state_count())?;
    if spec.source.strict == spec.target.strict {
        return Err(RelationError::Strictness);
    }
    let keep = a
        .transitions()
        .iter()
        .filter(|t| {
            !a.with_symbol(t.symbol)
                .iter()
                .any(|&ui| spec.dominates(t, a.transition(ui)))
        })
        .cloned()
        .collect();
    Ok(a.with_transitions(keep))
}

/// Class assignment of a quotient: classes are numbered in order of their
/// smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    pub class_of: Vec<StateId>,
    pub classes: Vec<Vec<StateId>>,
}

impl QuotientMap {
    pub fn new(equiv: &Relation) -> Result<Self, RelationError> {
        if !equiv.is_equivalence() {
            return Err(RelationError::NotA("an equivalence"));
        }
        let classes: Vec<Vec<StateId>> = equiv
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(StateId::from).collect())
            .collect();
        let mut class_of = vec![StateId(0); equiv.dim()];
        for (i, c) in classes.iter().enumerate() {
            for q in c {
                class_of[q.index()] = StateId::from(i);
            }
        }
        Ok(QuotientMap { class_of, classes })
    }
}

/// Collapses each class of `equiv` into one state.
pub fn quotient(a: &TreeAutomaton, equiv: &Relation) -> Result<TreeAutomaton, RelationError> {
    Ok(quotient_with_map(a, equiv)?.0)
}

pub fn quotient_with_map(
    a: &TreeAutomaton,
    equiv: &Relation,
) -> Result<(TreeAutomaton, QuotientMap), RelationError> {
    equiv.check_dim(a.state_count())?;
    let map = QuotientMap::new(equiv)?;
    let m = |q: StateId| map.class_of[q.index()];
    let mut b = TreeAutomaton::builder(a.alphabet().clone(), map.classes.len());
    b.initial = a.initial_states().map(m).collect();
    b.transitions = a
        .transitions()
        .iter()
        .map(|t| {
            Transition::new(
                m(t.source),
                t.symbol,
                t.targets.iter().map(|&r| m(r)).collect(),
            )
        })
        .collect();
    let q = b.build().expect("image of a valid automaton is valid");
    Ok((q, map))
}

/// Settings shared by the reduction and saturation loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceConfig {
    pub sim: SimConfig,
    /// Maximum number of passes of any fixpoint loop.
    pub max_iterations: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            sim: SimConfig::default(),
            max_iterations: 100,
        }
    }
}

/// Result of a fixpoint loop.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub automaton: TreeAutomaton,
    pub iterations: usize,
    /// The loop stopped at `max_iterations` before reaching a fixpoint.
    pub cap_hit: bool,
}

pub(crate) struct Rel<'a> {
    a: &'a TreeAutomaton,
    cfg: &'a ReduceConfig,
}

impl<'a> Rel<'a> {
    pub(crate) fn new(a: &'a TreeAutomaton, cfg: &'a ReduceConfig) -> Self {
        Rel { a, cfg }
    }

    pub(crate) fn dw(&self, k: usize) -> Relation {
        lookahead_dw_sim(self.a, k, &self.cfg.sim)
    }

    pub(crate) fn up(&self, k: usize, side: &Relation) -> Relation {
        lookahead_up_sim(self.a, k, side).expect("side relation built for this automaton")
    }

    pub(crate) fn up_id(&self, k: usize) -> Relation {
        self.up(k, &Relation::identity(self.a.state_count()))
    }

    pub(crate) fn id(&self) -> Relation {
        Relation::identity(self.a.state_count())
    }
}

pub(crate) fn quotient_by(a: &TreeAutomaton, preorder: &Relation) -> TreeAutomaton {
    quotient(a, &preorder.induced_equivalence()).expect("induced equivalence")
}

pub(crate) fn prune_by(a: &TreeAutomaton, source: PruneSide, target: PruneSide) -> TreeAutomaton {
    let spec = PruneSpec::new(source, target).expect("one strict side");
    prune(a, &spec).expect("relations built for this automaton")
}

/// One pass of `Op(x, y)`. Every relation is recomputed on the automaton it
/// is applied to.
pub fn op_xy(a: &TreeAutomaton, x: usize, y: usize, cfg: &ReduceConfig) -> TreeAutomaton {
    assert!(x >= 1 && y >= 1, "lookahead must be at least 1");
    use PruneSide as S;
    let mut a = a.remove_useless();

    let r = Rel::new(&a, cfg);
    a = quotient_by(&a, &r.dw(x));
    let r = Rel::new(&a, cfg);
    a = prune_by(&a, S::plain(r.id()), S::strict(r.dw(x)));
    a = a.remove_useless();

    let r = Rel::new(&a, cfg);
    a = quotient_by(&a, &r.up_id(y));
    let r = Rel::new(&a, cfg);
    a = prune_by(&a, S::strict(r.up_id(y)), S::plain(r.id()));
    let r = Rel::new(&a, cfg);
    a = prune_by(&a, S::strict(r.up_id(1)), S::plain(r.dw(x)));
    a = a.remove_useless();

    let r = Rel::new(&a, cfg);
    a = quotient_by(&a, &r.up_id(y));
    let r = Rel::new(&a, cfg);
    let dw1 = r.dw(1);
    a = prune_by(&a, S::plain(r.up(y, &dw1)), S::strict(dw1));
    a.remove_useless()
}

fn same_size(a: &TreeAutomaton, b: &TreeAutomaton) -> bool {
    a.state_count() == b.state_count() && a.transition_count() == b.transition_count()
}

/// Iterates `Op(1, 1)` until the state and transition counts stop changing.
/// Every step is non-increasing in both, so equal counts mean no step did
/// anything.
pub fn heavy11(a: &TreeAutomaton, cfg: &ReduceConfig) -> Outcome {
    let mut cur = a.clone();
    for i in 1..=cfg.max_iterations {
        let next = op_xy(&cur, 1, 1, cfg);
        let done = same_size(&next, &cur);
        cur = next;
        if done {
            return Outcome {
                automaton: cur,
                iterations: i,
                cap_hit: false,
            };
        }
    }
    log::warn!("Heavy(1,1) stopped after {} iterations", cfg.max_iterations);
    Outcome {
        automaton: cur,
        iterations: cfg.max_iterations,
        cap_hit: true,
    }
}

/// `Heavy(x, y)`: iterates `Heavy(1,1)` followed by `Op(x, y)` to a fixpoint.
pub fn heavy_with(a: &TreeAutomaton, x: usize, y: usize, cfg: &ReduceConfig) -> Outcome {
    let mut cur = a.clone();
    let mut cap_hit = false;
    for i in 1..=cfg.max_iterations {
        let inner = heavy11(&cur, cfg);
        cap_hit |= inner.cap_hit;
        let next = if x == 1 && y == 1 {
            // Heavy(1,1) already ends in a fixpoint of Op(1,1)
            inner.automaton
        } else {
            op_xy(&inner.automaton, x, y, cfg)
        };
        let done = same_size(&next, &cur);
        cur = next;
        if done {
            return Outcome {
                automaton: cur,
                iterations: i,
                cap_hit,
            };
        }
    }
    log::warn!(
        "Heavy({x},{y}) stopped after {} iterations",
        cfg.max_iterations
    );
    Outcome {
        automaton: cur,
        iterations: cfg.max_iterations,
        cap_hit: true,
    }
}

pub fn heavy(a: &TreeAutomaton, x: usize, y: usize) -> TreeAutomaton {
    heavy_with(a, x, y, &ReduceConfig::default()).automaton
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::RankedAlphabet;
    use crate::oracle;
    use std::sync::Arc;

    fn alphabet() -> Arc<RankedAlphabet> {
        Arc::new(RankedAlphabet::from_pairs(&[("a", 2), ("b", 0), ("c", 1)]).unwrap())
    }

    #[test]
    fn needs_one_strict_side() {
        let id = Relation::identity(2);
        assert_eq!(
            PruneSpec::new(PruneSide::plain(id.clone()), PruneSide::plain(id.clone())),
            Err(RelationError::Strictness)
        );
        assert_eq!(
            PruneSpec::new(PruneSide::strict(id.clone()), PruneSide::strict(id)),
            Err(RelationError::Strictness)
        );
    }

    #[test]
    fn identity_prunes_nothing() {
        let a = TreeAutomaton::builder(alphabet(), 3)
            .initial(0)
            .rule(0, "a", &[1, 2])
            .rule(0, "a", &[2, 1])
            .rule(1, "b", &[])
            .rule(2, "b", &[])
            .build()
            .unwrap();
        let id = Relation::identity(3);
        let spec = PruneSpec::new(PruneSide::plain(id.clone()), PruneSide::strict(id)).unwrap();
        assert_eq!(prune(&a, &spec).unwrap(), a);
    }

    #[test]
    fn strictly_smaller_targets_removed() {
        let a = TreeAutomaton::builder(alphabet(), 3)
            .initial(0)
            .rule(0, "c", &[1])
            .rule(0, "c", &[2])
            .rule(1, "b", &[])
            .rule(2, "b", &[])
            .rule(2, "c", &[2])
            .build()
            .unwrap();
        // q1 < q2
        let d = Relation::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (1, 2)]);
        let spec = PruneSpec::new(
            PruneSide::plain(Relation::identity(3)),
            PruneSide::strict(d),
        )
        .unwrap();
        let p = prune(&a, &spec).unwrap();
        assert_eq!(p.transition_count(), 4);
        let sym = a.alphabet().lookup("c").unwrap();
        assert!(!p.contains_transition(&Transition::new(StateId(0), sym, vec![StateId(1)])));
    }

    #[test]
    fn lifting_matches_tuple_definition() {
        let d = Relation::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2)]);
        let s = |v: &[u32]| v.iter().map(|&x| StateId(x)).collect::<Vec<_>>();
        let strict = PruneSide::strict(d.clone());
        // q0 ~ q1, q0 < q2
        assert!(!lifted(&strict, &s(&[0, 1]), &s(&[1, 0])));
        assert!(lifted(&strict, &s(&[0, 1]), &s(&[2, 1])));
        assert!(!lifted(&strict, &s(&[2, 1]), &s(&[0, 1])));
        assert!(!lifted(&strict, &[], &[]));
        assert!(lifted(&PruneSide::plain(d), &s(&[0, 1]), &s(&[1, 0])));
    }

    #[test]
    fn quotient_rejects_non_equivalence() {
        let a = TreeAutomaton::empty(alphabet()).to_builder();
        let mut b = a;
        b.state_count = 2;
        let a = b.build().unwrap();
        let r = Relation::from_pairs(2, &[(0, 0), (1, 1), (0, 1)]);
        assert!(quotient(&a, &r).is_err());
    }

    #[test]
    fn quotient_by_identity_is_identity() {
        let a = TreeAutomaton::builder(alphabet(), 2)
            .initial(0)
            .rule(0, "c", &[1])
            .rule(1, "b", &[])
            .build()
            .unwrap();
        assert_eq!(quotient(&a, &Relation::identity(2)).unwrap(), a);
    }

    #[test]
    fn merging_twins_collapses_transitions() {
        let a = TreeAutomaton::builder(alphabet(), 3)
            .initial(0)
            .rule(0, "a", &[1, 2])
            .rule(0, "a", &[2, 1])
            .rule(1, "b", &[])
            .rule(2, "b", &[])
            .build()
            .unwrap();
        let e = Relation::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)]);
        let q = quotient(&a, &e).unwrap();
        assert_eq!(q.state_count(), 2);
        assert_eq!(q.transition_count(), 2);
        assert!(oracle::bounded_equiv(&a, &q, 4));
    }

    #[test]
    fn dominated_chain_transition_removed() {
        // q0 -c-> q1 and q0 -c-> q2 where q2 reads strictly more than q1
        let a = TreeAutomaton::builder(alphabet(), 3)
            .initial(0)
            .rule(0, "c", &[1])
            .rule(0, "c", &[2])
            .rule(1, "b", &[])
            .rule(2, "b", &[])
            .rule(2, "c", &[2])
            .build()
            .unwrap();
        let r = op_xy(&a, 1, 1, &ReduceConfig::default());
        assert!(r.transition_count() < a.transition_count());
        assert!(oracle::bounded_equiv(&a, &r, 5));
    }

    #[test]
    fn empty_language_reduces_to_nothing() {
        let a = TreeAutomaton::builder(alphabet(), 2)
            .initial(0)
            .rule(0, "c", &[1])
            .rule(1, "c", &[0])
            .build()
            .unwrap();
        let r = heavy(&a, 1, 1);
        assert_eq!(r.state_count(), 0);
        assert_eq!(r.transition_count(), 0);
    }

    #[test]
    fn heavy_is_idempotent_on_sample() {
        let a = TreeAutomaton::builder(alphabet(), 4)
            .initial(0)
            .initial(3)
            .rule(0, "a", &[1, 2])
            .rule(3, "a", &[2, 1])
            .rule(1, "b", &[])
            .rule(2, "b", &[])
            .rule(2, "c", &[1])
            .rule(1, "c", &[2])
            .build()
            .unwrap();
        let h = heavy(&a, 1, 1);
        assert_eq!(heavy(&h, 1, 1).stats(), h.stats());
        assert!(oracle::bounded_equiv(&a, &h, 5));
        let h2 = heavy(&a, 2, 2);
        assert!(oracle::bounded_equiv(&a, &h2, 5));
    }
}
