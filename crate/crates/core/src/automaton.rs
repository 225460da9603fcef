//! Top-down tree automata: ranked alphabets, transitions and the automaton
//! value itself.
//!
//! Leaf rules `<q, b, ψ>` are stored as rank-0 transitions with an empty
//! target list. The final pseudo-state ψ never appears as a [`StateId`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for StateId {
    fn from(i: usize) -> Self {
        StateId(i as u32)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub rank: usize,
}

/// A finite set of named symbols, each carrying a rank.
#[derive(Clone, Debug, Default)]
pub struct RankedAlphabet {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl PartialEq for RankedAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for RankedAlphabet {}

impl RankedAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet from `(name, rank)` pairs. Fails on duplicate names.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, usize)]) -> Result<Self, ModelError> {
        let mut alphabet = Self::new();
        for (name, rank) in pairs {
            alphabet.add(name.as_ref(), *rank)?;
        }
        Ok(alphabet)
    }

    pub fn add(&mut self, name: &str, rank: usize) -> Result<SymbolId, ModelError> {
        if self.by_name.contains_key(name) {
            return Err(ModelError::DuplicateSymbol(name.to_string()));
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name: name.to_string(),
            rank,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn rank(&self, id: SymbolId) -> usize {
        self.symbols[id.index()].rank
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len()).map(|i| SymbolId(i as u32))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.iter().map(|s| s.rank).max().unwrap_or(0)
    }

    /// `self` followed by the symbols of `other` it lacks. A name used with
    /// two different ranks is an error.
    pub fn merge(&self, other: &RankedAlphabet) -> Result<RankedAlphabet, ModelError> {
        let mut out = self.clone();
        for s in &other.symbols {
            match out.lookup(&s.name) {
                Some(id) if out.rank(id) != s.rank => {
                    return Err(ModelError::RankConflict(s.name.clone()))
                }
                Some(_) => {}
                None => {
                    out.add(&s.name, s.rank)?;
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub symbol: SymbolId,
    pub targets: Vec<StateId>,
}

impl Transition {
    pub fn new(source: StateId, symbol: SymbolId, targets: Vec<StateId>) -> Self {
        Self {
            source,
            symbol,
            targets,
        }
    }

    pub fn leaf(source: StateId, symbol: SymbolId) -> Self {
        Self::new(source, symbol, Vec::new())
    }

    pub fn is_leaf_rule(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> impl fmt::Display + 'a {
        TransitionDisplay { t: self, alphabet }
    }
}

struct TransitionDisplay<'a> {
    t: &'a Transition,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for TransitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self
            .alphabet
            .symbols
            .get(self.t.symbol.index())
            .map(|s| s.name.as_str())
            .unwrap_or("?");
        write!(f, "<{}, {}, ", self.t.source, name)?;
        if self.t.targets.is_empty() {
            write!(f, "ψ>")
        } else {
            let targets: Vec<String> = self.t.targets.iter().map(|q| q.to_string()).collect();
            write!(f, "{}>", targets.join(" "))
        }
    }
}

/// A problem found by [`AutomatonBuilder::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownSymbol {
        transition: usize,
        symbol: SymbolId,
    },
    Arity {
        transition: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    SourceOutOfRange {
        transition: usize,
        state: StateId,
    },
    TargetOutOfRange {
        transition: usize,
        state: StateId,
    },
    InitialOutOfRange {
        state: StateId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownSymbol { transition, symbol } => {
                write!(f, "transition #{transition}: unknown symbol id {}", symbol.0)
            }
            Violation::Arity {
                transition,
                symbol,
                expected,
                found,
            } => write!(
                f,
                "transition #{transition}: symbol `{symbol}` has rank {expected} but {found} targets"
            ),
            Violation::SourceOutOfRange { transition, state } => {
                write!(f, "transition #{transition}: source {state} out of range")
            }
            Violation::TargetOutOfRange { transition, state } => {
                write!(f, "transition #{transition}: target {state} out of range")
            }
            Violation::InitialOutOfRange { state } => {
                write!(f, "initial state {state} out of range")
            }
        }
    }
}

/// Unchecked automaton parts. [`build`](Self::build) validates and indexes them.
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    pub alphabet: Arc<RankedAlphabet>,
    pub state_count: usize,
    pub initial: Vec<StateId>,
    pub transitions: Vec<Transition>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: Arc<RankedAlphabet>, state_count: usize) -> Self {
        Self {
            alphabet,
            state_count,
            initial: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn initial(mut self, q: usize) -> Self {
        self.initial.push(StateId::from(q));
        self
    }

    /// Adds `<source, symbol, targets>`; `symbol` is looked up by name.
    ///
    /// Panics if the symbol is not in the alphabet.
    pub fn rule(mut self, source: usize, symbol: &str, targets: &[usize]) -> Self {
        let sym = self
            .alphabet
            .lookup(symbol)
            .unwrap_or_else(|| panic!("unknown symbol `{symbol}`"));
        self.transitions.push(Transition::new(
            StateId::from(source),
            sym,
            targets.iter().map(|&q| StateId::from(q)).collect(),
        ));
        self
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.source.index() >= self.state_count {
                out.push(Violation::SourceOutOfRange {
                    transition: i,
                    state: t.source,
                });
            }
            if t.symbol.index() >= self.alphabet.len() {
                out.push(Violation::UnknownSymbol {
                    transition: i,
                    symbol: t.symbol,
                });
            } else {
                let sym = self.alphabet.symbol(t.symbol);
                if sym.rank != t.targets.len() {
                    out.push(Violation::Arity {
                        transition: i,
                        symbol: sym.name.clone(),
                        expected: sym.rank,
                        found: t.targets.len(),
                    });
                }
            }
            for &q in &t.targets {
                if q.index() >= self.state_count {
                    out.push(Violation::TargetOutOfRange {
                        transition: i,
                        state: q,
                    });
                }
            }
        }
        for &q in &self.initial {
            if q.index() >= self.state_count {
                out.push(Violation::InitialOutOfRange { state: q });
            }
        }
        out
    }

    pub fn build(self) -> Result<TreeAutomaton, ModelError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(TreeAutomaton::from_valid_parts(
            self.alphabet,
            self.state_count,
            self.initial,
            self.transitions,
        ))
    }
}

/// Checks a raw automaton description; an empty list means it is well formed.
pub fn validate(parts: &AutomatonBuilder) -> Vec<Violation> {
    parts.validate()
}

/// A nondeterministic top-down tree automaton `(Σ, Q, δ, I)`.
///
/// Values are immutable; every operation in this crate returns a fresh
/// automaton. Transitions are kept sorted and duplicate free.
#[derive(Clone, Debug)]
pub struct TreeAutomaton {
    alphabet: Arc<RankedAlphabet>,
    state_count: usize,
    initial: FixedBitSet,
    transitions: Vec<Transition>,
    by_source: Vec<Vec<usize>>,
    by_symbol: Vec<Vec<usize>>,
    // (transition index, target position) for every occurrence of a state as a target
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for TreeAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.state_count == other.state_count
            && self.initial == other.initial
            && self.transitions == other.transitions
            && self.alphabet == other.alphabet
    }
}

impl Eq for TreeAutomaton {}

impl TreeAutomaton {
    pub(crate) fn from_valid_parts(
        alphabet: Arc<RankedAlphabet>,
        state_count: usize,
        initial: impl IntoIterator<Item = StateId>,
        mut transitions: Vec<Transition>,
    ) -> Self {
        transitions.sort_unstable();
        transitions.dedup();
        let mut init = FixedBitSet::with_capacity(state_count);
        for q in initial {
            init.insert(q.index());
        }
        let mut by_source = vec![Vec::new(); state_count];
        let mut by_symbol = vec![Vec::new(); alphabet.len()];
        let mut occurrences = vec![Vec::new(); state_count];
        for (i, t) in transitions.iter().enumerate() {
            by_source[t.source.index()].push(i);
            by_symbol[t.symbol.index()].push(i);
            for (pos, q) in t.targets.iter().enumerate() {
                occurrences[q.index()].push((i, pos));
            }
        }
        Self {
            alphabet,
            state_count,
            initial: init,
            transitions,
            by_source,
            by_symbol,
            occurrences,
        }
    }

    pub fn builder(alphabet: Arc<RankedAlphabet>, state_count: usize) -> AutomatonBuilder {
        AutomatonBuilder::new(alphabet, state_count)
    }

    /// The automaton with no states and no transitions over `alphabet`.
    pub fn empty(alphabet: Arc<RankedAlphabet>) -> Self {
        Self::from_valid_parts(alphabet, 0, std::iter::empty(), Vec::new())
    }

    pub fn alphabet(&self) -> &Arc<RankedAlphabet> {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_count).map(StateId::from)
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial.contains(q.index())
    }

    pub fn initial_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.initial.ones().map(StateId::from)
    }

    pub fn initial_set(&self) -> &FixedBitSet {
        &self.initial
    }

    pub fn initial_count(&self) -> usize {
        self.initial.count_ones(..)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    /// Indices of the transitions leaving `q`, in transition order.
    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.by_source[q.index()]
    }

    pub fn outgoing_transitions(&self, q: StateId) -> impl Iterator<Item = &Transition> {
        self.by_source[q.index()]
            .iter()
            .map(|&i| &self.transitions[i])
    }

    pub fn with_symbol(&self, sym: SymbolId) -> &[usize] {
        &self.by_symbol[sym.index()]
    }

    /// Every `(transition index, position)` where `q` is a target.
    pub fn occurrences(&self, q: StateId) -> &[(usize, usize)] {
        &self.occurrences[q.index()]
    }

    pub fn contains_transition(&self, t: &Transition) -> bool {
        self.transitions.binary_search(t).is_ok()
    }

    /// Same states and alphabet, different transitions.
    pub fn with_transitions(&self, transitions: Vec<Transition>) -> Self {
        Self::from_valid_parts(
            self.alphabet.clone(),
            self.state_count,
            self.initial_states().collect::<Vec<_>>(),
            transitions,
        )
    }

    /// Same states and transitions, different initial set.
    pub fn with_initial(&self, initial: impl IntoIterator<Item = StateId>) -> Self {
        Self::from_valid_parts(
            self.alphabet.clone(),
            self.state_count,
            initial,
            self.transitions.clone(),
        )
    }

    /// The same automaton over a larger alphabet, matching symbols by name.
    pub fn over_alphabet(&self, alphabet: Arc<RankedAlphabet>) -> Result<Self, ModelError> {
        let mut map = Vec::with_capacity(self.alphabet.len());
        for (_, s) in self.alphabet.iter() {
            match alphabet.lookup(&s.name) {
                Some(id) if alphabet.rank(id) == s.rank => map.push(id),
                _ => return Err(ModelError::AlphabetMismatch),
            }
        }
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition::new(t.source, map[t.symbol.index()], t.targets.clone()))
            .collect();
        Ok(Self::from_valid_parts(
            alphabet,
            self.state_count,
            self.initial_states().collect::<Vec<_>>(),
            transitions,
        ))
    }

    /// Re-checks the type invariants. Always empty for values built through
    /// [`AutomatonBuilder::build`].
    pub fn validate(&self) -> Vec<Violation> {
        self.to_builder().validate()
    }

    pub fn to_builder(&self) -> AutomatonBuilder {
        AutomatonBuilder {
            alphabet: self.alphabet.clone(),
            state_count: self.state_count,
            initial: self.initial_states().collect(),
            transitions: self.transitions.clone(),
        }
    }

    pub fn stats(&self) -> Stats {
        let mut per_symbol = vec![0; self.alphabet.len()];
        for t in &self.transitions {
            per_symbol[t.symbol.index()] += 1;
        }
        Stats {
            states: self.state_count,
            transitions: self.transitions.len(),
            per_symbol,
            initial: self.initial_count(),
        }
    }

    /// Set of states from which at least one closed tree can be read.
    pub fn productive_states(&self) -> FixedBitSet {
        let mut productive = FixedBitSet::with_capacity(self.state_count);
        // number of not-yet-productive target positions per transition
        let mut pending: Vec<usize> = self.transitions.iter().map(|t| t.targets.len()).collect();
        let mut queue: Vec<StateId> = Vec::new();
        for t in &self.transitions {
            if t.targets.is_empty() && !productive.put(t.source.index()) {
                queue.push(t.source);
            }
        }
        while let Some(q) = queue.pop() {
            for &(ti, _) in &self.occurrences[q.index()] {
                pending[ti] -= 1;
                if pending[ti] == 0 {
                    let src = self.transitions[ti].source;
                    if !productive.put(src.index()) {
                        queue.push(src);
                    }
                }
            }
        }
        productive
    }

    /// Set of states reachable top-down from some initial state.
    pub fn reachable_states(&self) -> FixedBitSet {
        let mut seen = self.initial.clone();
        seen.grow(self.state_count);
        let mut stack: Vec<usize> = seen.ones().collect();
        while let Some(q) = stack.pop() {
            for &ti in &self.by_source[q] {
                for r in &self.transitions[ti].targets {
                    if !seen.put(r.index()) {
                        stack.push(r.index());
                    }
                }
            }
        }
        seen
    }

    /// Restricts the automaton to `keep`, re-indexing densely in increasing
    /// state order. Transitions touching a dropped state are dropped.
    pub fn restrict(&self, keep: &FixedBitSet) -> (TreeAutomaton, Vec<Option<StateId>>) {
        let mut map = vec![None; self.state_count];
        let mut next = 0usize;
        for (q, slot) in map.iter_mut().enumerate() {
            if keep.contains(q) {
                *slot = Some(StateId::from(next));
                next += 1;
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                let source = map[t.source.index()]?;
                let targets = t
                    .targets
                    .iter()
                    .map(|r| map[r.index()])
                    .collect::<Option<Vec<_>>>()?;
                Some(Transition::new(source, t.symbol, targets))
            })
            .collect();
        let initial: Vec<StateId> = self
            .initial_states()
            .filter_map(|q| map[q.index()])
            .collect();
        (
            TreeAutomaton::from_valid_parts(self.alphabet.clone(), next, initial, transitions),
            map,
        )
    }

    /// Removes states that are unreachable from `I` or cannot read any closed
    /// tree. Returns the trimmed automaton and the old→new state map.
    pub fn remove_useless_with_map(&self) -> (TreeAutomaton, Vec<Option<StateId>>) {
        // Productive first: reachability must only use transitions whose
        // targets are all productive, otherwise a state reachable solely
        // through a dead transition would survive.
        let productive = self.productive_states();
        let (trimmed, first) = self.restrict(&productive);
        let reachable = trimmed.reachable_states();
        let (result, second) = trimmed.restrict(&reachable);
        let map = first
            .into_iter()
            .map(|m| m.and_then(|q| second[q.index()]))
            .collect();
        (result, map)
    }

    pub fn remove_useless(&self) -> TreeAutomaton {
        self.remove_useless_with_map().0
    }
}

/// Removes useless states; see [`TreeAutomaton::remove_useless_with_map`].
pub fn remove_useless(a: &TreeAutomaton) -> TreeAutomaton {
    a.remove_useless()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub per_symbol: Vec<usize>,
    pub initial: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "states={} transitions={} initial={}",
            self.states, self.transitions, self.initial
        )
    }
}

pub fn stats(a: &TreeAutomaton) -> Stats {
    a.stats()
}
