//! Downward and upward lookahead simulation preorders.
//!
//! Both are computed as the greatest fixpoint of a refinement loop over a
//! boolean matrix `W`, starting from all pairs (downward) or from the pairs
//! satisfying the initial-state condition (upward). In each round Spoiler
//! attacks every surviving pair with moves of depth up to the lookahead and
//! Duplicator answers a prefix of each attack. The fixpoint is not transitive
//! for lookahead above one, so the result is its transitive closure.

mod attack;
mod downward;
mod prerefine;
mod upward;

pub use attack::{Attack, AttackCache, AttackKey, AttackNode, Verdict};
pub use downward::{lookahead_dw_fixpoint, lookahead_dw_sim, lookahead_dw_sim_observed};
pub use prerefine::pre_refine;
pub use upward::{lookahead_up_fixpoint, lookahead_up_sim};

/// Scope in which Duplicator remembers verdicts on Spoiler's sub-attacks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CacheMode {
    None,
    /// Cleared for every attack Duplicator defends against.
    Local,
    /// Kept for the whole game played from one pair of states.
    #[default]
    SemiGlobal,
    /// Successful attacks are kept for the whole refinement; defended ones
    /// only within a game, since they may turn successful once `W` shrinks.
    Global,
}

impl CacheMode {
    pub const ALL: [CacheMode; 4] = [
        CacheMode::None,
        CacheMode::Local,
        CacheMode::SemiGlobal,
        CacheMode::Global,
    ];
}

impl std::str::FromStr for CacheMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "none" => Ok(CacheMode::None),
            "local" => Ok(CacheMode::Local),
            "semiglobal" => Ok(CacheMode::SemiGlobal),
            "global" => Ok(CacheMode::Global),
            other => Err(format!("unknown cache mode `{other}`")),
        }
    }
}

/// How pairs are scheduled within a refinement round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Pairs are refined one after another and flips take effect at once.
    #[default]
    Sequential,
    /// Pairs are refined in parallel against a snapshot of `W`; flips are
    /// applied between rounds.
    Parallel,
}

/// Knobs for the downward game that do not change its result.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SimConfig {
    pub cache: CacheMode,
    /// Depth of the bounded-tree pre-refinement, if any.
    pub prerefine: Option<usize>,
    pub schedule: Schedule,
}
