//! Random tree automata.
//!
//! [`tabakov_vardi`] follows the Tabakov-Vardi model lifted to trees: `n`
//! states, `s` binary symbols each carrying `round(n·td)` distinct
//! transitions, and `round(n·ad)` leaf rules per leaf symbol.
//! [`random_small`] draws over an arbitrary ranked alphabet and is meant for
//! property tests and counterexample search.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{RankedAlphabet, StateId, SymbolId, Transition, TreeAutomaton};

/// Which states of a generated automaton are initial.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum InitialRule {
    #[default]
    All,
    /// Only state 0.
    One,
    /// `round(n·f)` states drawn uniformly.
    Density(f64),
}

impl std::str::FromStr for InitialRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(InitialRule::All),
            "one" => Ok(InitialRule::One),
            _ => {
                let f = s
                    .strip_prefix("density=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|f| (0.0..=1.0).contains(f))
                    .ok_or_else(|| format!("expected all, one or density=<0..1>, found `{s}`"))?;
                Ok(InitialRule::Density(f))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvParams {
    pub n: usize,
    /// Number of rank-2 symbols.
    pub s: usize,
    pub td: f64,
    pub ad: f64,
    pub seed: u64,
    pub initial: InitialRule,
    /// Number of rank-0 symbols.
    pub leaf_symbols: usize,
}

impl TvParams {
    pub fn new(n: usize, s: usize, td: f64, ad: f64, seed: u64) -> Self {
        TvParams {
            n,
            s,
            td,
            ad,
            seed,
            initial: InitialRule::All,
            leaf_symbols: 1,
        }
    }
}

/// Rounds to the nearest integer, ties up.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

fn clamped(wanted: usize, pool: usize, what: &str) -> usize {
    if wanted > pool {
        log::warn!("requested {wanted} {what}, only {pool} distinct ones exist");
        pool
    } else {
        wanted
    }
}

/// The alphabet used by [`tabakov_vardi`]: leaf symbols `l0, l1, ...`
/// followed by binary symbols `a0, a1, ...`.
pub fn tv_alphabet(s: usize, leaf_symbols: usize) -> Arc<RankedAlphabet> {
    let mut al = RankedAlphabet::new();
    for i in 0..leaf_symbols {
        al.add(&format!("l{i}"), 0).expect("fresh name");
    }
    for i in 0..s {
        al.add(&format!("a{i}"), 2).expect("fresh name");
    }
    Arc::new(al)
}

pub fn tabakov_vardi(p: &TvParams) -> TreeAutomaton {
    assert!(p.n >= 1, "at least one state");
    let n = p.n;
    let al = tv_alphabet(p.s, p.leaf_symbols);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut transitions = Vec::new();
    for (sym, s) in al.iter() {
        if s.rank == 0 {
            let count = clamped(round_half_up(n as f64 * p.ad), n, "leaf rules");
            for q in sample(&mut rng, n, count) {
                transitions.push(Transition::leaf(StateId::from(q), sym));
            }
        } else {
            let pool = n * n * n;
            let count = clamped(round_half_up(n as f64 * p.td), pool, "transitions");
            for code in sample(&mut rng, pool, count) {
                let (src, l, r) = (code / (n * n), (code / n) % n, code % n);
                transitions.push(Transition::new(
                    StateId::from(src),
                    sym,
                    vec![StateId::from(l), StateId::from(r)],
                ));
            }
        }
    }
    let initial: Vec<StateId> = match p.initial {
        InitialRule::All => (0..n).map(StateId::from).collect(),
        InitialRule::One => vec![StateId(0)],
        InitialRule::Density(f) => {
            let count = clamped(round_half_up(n as f64 * f), n, "initial states");
            sample(&mut rng, n, count)
                .into_iter()
                .map(StateId::from)
                .collect()
        }
    };
    TreeAutomaton::from_valid_parts(al, n, initial, transitions)
}

/// `count` automata with seeds `p.seed, p.seed + 1, ...`.
pub fn tabakov_vardi_batch(p: &TvParams, count: usize) -> Vec<TreeAutomaton> {
    (0..count as u64)
        .map(|i| {
            tabakov_vardi(&TvParams {
                seed: p.seed.wrapping_add(i),
                ..p.clone()
            })
        })
        .collect()
}

/// Parameters of [`random_small`].
#[derive(Clone, Debug)]
pub struct SmallParams {
    pub alphabet: Arc<RankedAlphabet>,
    pub states: usize,
    /// Probability of each possible non-leaf transition, scaled so that each
    /// symbol gets about `density · states` transitions.
    pub density: f64,
    /// Probability of each leaf rule.
    pub leaf_prob: f64,
    pub initial_prob: f64,
}

/// An automaton with every candidate transition drawn independently. At
/// least one state is initial.
pub fn random_small<R: Rng>(p: &SmallParams, rng: &mut R) -> TreeAutomaton {
    let n = p.states;
    let mut transitions = Vec::new();
    for (sym, s) in p.alphabet.iter() {
        if s.rank == 0 {
            for q in 0..n {
                if rng.gen_bool(p.leaf_prob.clamp(0.0, 1.0)) {
                    transitions.push(Transition::leaf(StateId::from(q), sym));
                }
            }
            continue;
        }
        let pool = n.pow(s.rank as u32 + 1);
        let count = round_half_up(n as f64 * p.density).min(pool);
        for code in sample(rng, pool, count) {
            transitions.push(decode(sym, s.rank, n, code));
        }
    }
    let mut initial: Vec<StateId> = (0..n)
        .filter(|_| rng.gen_bool(p.initial_prob.clamp(0.0, 1.0)))
        .map(StateId::from)
        .collect();
    if initial.is_empty() && n > 0 {
        initial.push(StateId::from(rng.gen_range(0..n)));
    }
    TreeAutomaton::from_valid_parts(p.alphabet.clone(), n, initial, transitions)
}

fn decode(sym: SymbolId, rank: usize, n: usize, mut code: usize) -> Transition {
    let mut digits = vec![0; rank + 1];
    for d in digits.iter_mut().rev() {
        *d = code % n;
        code /= n;
    }
    Transition::new(
        StateId::from(digits[0]),
        sym,
        digits[1..].iter().map(|&q| StateId::from(q)).collect(),
    )
}

/// Convenience seeded variant of [`random_small`].
pub fn random_small_seeded(p: &SmallParams, seed: u64) -> TreeAutomaton {
    random_small(p, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complement::is_empty;
    use crate::io::serialize_timbuk;

    #[test]
    fn per_symbol_counts() {
        let a = tabakov_vardi(&TvParams::new(4, 2, 1.5, 0.5, 1));
        let st = a.stats();
        let al = a.alphabet();
        for (sym, s) in al.iter() {
            let expected = if s.rank == 2 { 6 } else { 2 };
            assert_eq!(st.per_symbol[sym.index()], expected);
        }
        assert_eq!(a.initial_count(), 4);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = TvParams::new(5, 2, 2.0, 0.4, 99);
        assert_eq!(
            serialize_timbuk(&tabakov_vardi(&p), "x"),
            serialize_timbuk(&tabakov_vardi(&p), "x")
        );
        let q = TvParams {
            seed: 100,
            ..p.clone()
        };
        assert_ne!(tabakov_vardi(&p), tabakov_vardi(&q));
    }

    #[test]
    fn no_leaf_rules_means_empty() {
        for seed in 0..20 {
            assert!(is_empty(&tabakov_vardi(&TvParams::new(
                4, 2, 3.0, 0.0, seed
            ))));
        }
    }

    #[test]
    fn counts_are_clamped() {
        let a = tabakov_vardi(&TvParams::new(2, 1, 10.0, 3.0, 0));
        assert_eq!(a.transition_count(), 8 + 2);
    }

    #[test]
    fn initial_rules() {
        let mut p = TvParams::new(6, 1, 1.0, 0.5, 3);
        p.initial = InitialRule::One;
        assert_eq!(
            tabakov_vardi(&p).initial_states().collect::<Vec<_>>(),
            vec![StateId(0)]
        );
        p.initial = "density=0.5".parse().unwrap();
        assert_eq!(tabakov_vardi(&p).initial_count(), 3);
        assert!("density=2".parse::<InitialRule>().is_err());
    }

    #[test]
    fn rounding_ties_up() {
        assert_eq!(round_half_up(2.5), 3);
        assert_eq!(round_half_up(2.49), 2);
        assert_eq!(round_half_up(0.0), 0);
    }

    #[test]
    fn small_generator_respects_ranks() {
        let al = Arc::new(RankedAlphabet::from_pairs(&[("c", 0), ("b", 1), ("a", 2)]).unwrap());
        let p = SmallParams {
            alphabet: al,
            states: 4,
            density: 1.5,
            leaf_prob: 0.5,
            initial_prob: 0.3,
        };
        for seed in 0..20 {
            let a = random_small_seeded(&p, seed);
            assert!(a.validate().is_empty());
            assert!(a.initial_count() >= 1);
        }
    }
}
