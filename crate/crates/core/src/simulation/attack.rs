use std::collections::{HashMap, HashSet};

use crate::automaton::{StateId, TreeAutomaton};

use super::CacheMode;

/// One node of a Spoiler attack. A node without a transition is a frontier
/// leaf: either not yet extended or stuck in a state without transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackNode {
    pub state: StateId,
    pub transition: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
}

/// A move tree of Spoiler rooted in one state, grown one layer at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attack {
    nodes: Vec<AttackNode>,
}

impl Attack {
    pub fn new(root: StateId) -> Self {
        Attack {
            nodes: vec![AttackNode {
                state: root,
                transition: None,
                children: Vec::new(),
                depth: 0,
            }],
        }
    }

    pub fn nodes(&self) -> &[AttackNode] {
        &self.nodes
    }

    pub fn root(&self) -> StateId {
        self.nodes[0].state
    }

    /// Frontier nodes at `depth` whose state still has outgoing transitions.
    pub fn extendable(&self, a: &TreeAutomaton, depth: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                n.depth == depth && n.transition.is_none() && !a.outgoing(n.state).is_empty()
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Extends each node in `frontier` with the `choice[i]`-th outgoing
    /// transition of its state.
    pub fn extended(&self, a: &TreeAutomaton, frontier: &[usize], choice: &[usize]) -> Attack {
        let mut next = self.clone();
        for (&node, &c) in frontier.iter().zip(choice) {
            let state = next.nodes[node].state;
            let depth = next.nodes[node].depth;
            let ti = a.outgoing(state)[c];
            let mut children = Vec::new();
            for &r in &a.transition(ti).targets {
                children.push(next.nodes.len());
                next.nodes.push(AttackNode {
                    state: r,
                    transition: None,
                    children: Vec::new(),
                    depth: depth + 1,
                });
            }
            next.nodes[node].transition = Some(ti);
            next.nodes[node].children = children;
        }
        next
    }

    /// Canonical encoding of every sub-attack, indexed by node. Structurally
    /// equal sub-attacks get equal encodings regardless of where they occur.
    pub fn keys(&self) -> Vec<AttackKey> {
        let mut out: Vec<Option<Vec<u32>>> = vec![None; self.nodes.len()];
        // children always have larger indices than their parent
        for i in (0..self.nodes.len()).rev() {
            let n = &self.nodes[i];
            let mut enc = vec![n.state.0, n.transition.map_or(0, |t| t as u32 + 1)];
            for &c in &n.children {
                enc.extend_from_slice(out[c].as_ref().expect("child encoded first"));
            }
            out[i] = Some(enc);
        }
        out.into_iter()
            .map(|e| AttackKey(e.expect("all nodes encoded").into_boxed_slice()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AttackKey(pub Box<[u32]>);

/// Outcome of a sub-attack against one defending state. `Good` means
/// Spoiler succeeds (Duplicator has no answer), `Bad` that it was defended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Good,
    Bad,
}

/// Verdict store for one worker.
#[derive(Debug, Default)]
pub struct AttackCache {
    pub mode: CacheMode,
    local: HashMap<(AttackKey, StateId), Verdict>,
    game: HashMap<(AttackKey, StateId), Verdict>,
    /// Good verdicts found by this worker that outlive the current game.
    pub(crate) fresh_good: HashSet<(AttackKey, StateId)>,
}

impl AttackCache {
    pub fn new(mode: CacheMode) -> Self {
        AttackCache {
            mode,
            ..Default::default()
        }
    }

    pub(crate) fn start_game(&mut self) {
        self.local.clear();
        self.game.clear();
    }

    pub(crate) fn start_defence(&mut self) {
        self.local.clear();
    }

    pub(crate) fn lookup(
        &self,
        global: &HashSet<(AttackKey, StateId)>,
        key: &(AttackKey, StateId),
    ) -> Option<Verdict> {
        match self.mode {
            CacheMode::None => None,
            CacheMode::Local => self.local.get(key).copied(),
            CacheMode::SemiGlobal => self.game.get(key).copied(),
            CacheMode::Global => {
                if global.contains(key) || self.fresh_good.contains(key) {
                    Some(Verdict::Good)
                } else {
                    self.game.get(key).copied()
                }
            }
        }
    }

    pub(crate) fn store(&mut self, key: (AttackKey, StateId), verdict: Verdict) {
        match self.mode {
            CacheMode::None => {}
            CacheMode::Local => {
                self.local.insert(key, verdict);
            }
            CacheMode::SemiGlobal => {
                self.game.insert(key, verdict);
            }
            CacheMode::Global => match verdict {
                Verdict::Good => {
                    self.fresh_good.insert(key);
                }
                Verdict::Bad => {
                    self.game.insert(key, verdict);
                }
            },
        }
    }
}
