//! Transition saturation and the saturation-based pipelines `Sat1`/`Sat2`.
//!
//! `Sat(A, S(Rs, Rt))` adds `<p, σ, r1..rn>` whenever some existing
//! `<p', σ, r1'..rn'>` has `p Rs p'` and `ri Rt ri'` for every `i`. Matrices
//! follow the crate convention (`[p][q]` means `q` is at least `p`), so a
//! "larger-than" relation such as `⊒dw` is the inverse of the computed
//! preorder.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{RankedAlphabet, StateId, Transition, TreeAutomaton};
use crate::complement::{dw_inclusion, ComplementConfig};
use crate::error::{ComplementError, RelationError, SaturationError};
use crate::generator::{random_small, SmallParams};
use crate::oracle;
use crate::reduce::{heavy_with, prune_by, quotient_by, PruneSide, ReduceConfig, Rel};
use crate::relation::Relation;
use crate::simulation::{lookahead_dw_sim, lookahead_up_sim, SimConfig};
use crate::tree::Tree;
use crate::util::for_each_mixed;

/// Added transitions allowed per existing transition before saturation gives up.
pub const DEFAULT_BUDGET_FACTOR: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationSpec {
    pub source: Relation,
    pub target: Relation,
}

impl SaturationSpec {
    /// Both relations must be reflexive so that no transition is lost.
    pub fn new(source: Relation, target: Relation) -> Result<Self, RelationError> {
        source.check_dim(target.dim())?;
        if !source.is_reflexive() || !target.is_reflexive() {
            return Err(RelationError::NotA("reflexive"));
        }
        Ok(SaturationSpec { source, target })
    }
}

/// `Sat(A, S)` with an added-transition budget of `10·|δ|`.
pub fn saturate(
    a: &TreeAutomaton,
    spec: &SaturationSpec,
) -> Result<TreeAutomaton, SaturationError> {
    saturate_with_budget(a, spec, DEFAULT_BUDGET_FACTOR * a.transition_count())
}

pub fn saturate_with_budget(
    a: &TreeAutomaton,
    spec: &SaturationSpec,
    budget: usize,
) -> Result<TreeAutomaton, SaturationError> {
    spec.source.check_dim(a.state_count())?;
    spec.target.check_dim(a.state_count())?;
    let mut added: BTreeSet<Transition> = BTreeSet::new();
    for u in a.transitions() {
        let sources: Vec<usize> = spec.source.predecessors(u.source.index()).collect();
        let targets: Vec<Vec<usize>> = u
            .targets
            .iter()
            .map(|r| spec.target.predecessors(r.index()).collect())
            .collect();
        let mut radix = vec![sources.len()];
        radix.extend(targets.iter().map(Vec::len));
        let mut over = false;
        for_each_mixed(&radix, |c| {
            let t = Transition::new(
                StateId::from(sources[c[0]]),
                u.symbol,
                c[1..]
                    .iter()
                    .zip(&targets)
                    .map(|(&i, opts)| StateId::from(opts[i]))
                    .collect(),
            );
            if !a.contains_transition(&t) && added.insert(t) && added.len() > budget {
                over = true;
                return false;
            }
            true
        });
        if over {
            return Err(SaturationError::Budget { budget });
        }
    }
    let mut all = a.transitions().to_vec();
    all.extend(added);
    Ok(a.with_transitions(all))
}

/// Relations appearing in the GFS table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Id,
    DwSim,
    DwTrace,
    UpSim,
    UpTrace,
    /// Upward simulation with respect to downward simulation.
    UpSimDw,
    /// Upward trace inclusion with respect to downward trace inclusion.
    UpTraceDwTrace,
}

impl RelationKind {
    pub const ALL: [RelationKind; 7] = [
        RelationKind::Id,
        RelationKind::DwSim,
        RelationKind::DwTrace,
        RelationKind::UpSim,
        RelationKind::UpTrace,
        RelationKind::UpSimDw,
        RelationKind::UpTraceDwTrace,
    ];

    pub fn is_downward(self) -> bool {
        matches!(self, RelationKind::DwSim | RelationKind::DwTrace)
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Id => "id",
            RelationKind::DwSim => "dw-sim",
            RelationKind::DwTrace => "dw-trace",
            RelationKind::UpSim => "up-sim",
            RelationKind::UpTrace => "up-trace",
            RelationKind::UpSimDw => "up-sim(dw-sim)",
            RelationKind::UpTraceDwTrace => "up-trace(dw-trace)",
        }
    }

    fn index(self) -> usize {
        RelationKind::ALL
            .iter()
            .position(|&k| k == self)
            .expect("listed")
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown relation kind `{s}`"))
    }
}

/// Which `S(Rs, Rt)` preserve the language. Rows are source kinds, columns
/// target kinds, both in [`RelationKind::ALL`] order. Downward sources and
/// upward targets are taken in their "larger" orientation; upward sources
/// and downward targets in their "smaller" one.
pub const GFS_TABLE: [[bool; 7]; 7] = {
    const T: bool = true;
    const F: bool = false;
    [
        [T, T, T, T, T, F, F],
        [T, T, T, F, F, F, F],
        [T, T, T, F, F, F, F],
        [T, F, F, T, T, F, F],
        [T, F, F, T, T, F, F],
        [F, F, F, F, F, F, F],
        [F, F, F, F, F, F, F],
    ]
};

pub fn is_gfs(rs: RelationKind, rt: RelationKind) -> bool {
    GFS_TABLE[rs.index()][rt.index()]
}

/// Lookahead used to under-approximate upward trace inclusion.
pub const UP_TRACE_LOOKAHEAD: usize = 4;

/// The preorder of `kind` on `a`, in its "smaller-than" orientation. Trace
/// inclusions are exact downward (by determinization) and approximated by
/// lookahead simulation upward.
pub fn kind_preorder(
    a: &TreeAutomaton,
    kind: RelationKind,
    cfg: &ComplementConfig,
) -> Result<Relation, ComplementError> {
    let n = a.state_count();
    let sim = SimConfig::default();
    let up = |k, side: &Relation| lookahead_up_sim(a, k, side).expect("same automaton");
    Ok(match kind {
        RelationKind::Id => Relation::identity(n),
        RelationKind::DwSim => lookahead_dw_sim(a, 1, &sim),
        RelationKind::DwTrace => dw_inclusion(a, cfg)?,
        RelationKind::UpSim => up(1, &Relation::identity(n)),
        RelationKind::UpTrace => up(UP_TRACE_LOOKAHEAD, &Relation::identity(n)),
        RelationKind::UpSimDw => up(1, &lookahead_dw_sim(a, 1, &sim)),
        RelationKind::UpTraceDwTrace => up(UP_TRACE_LOOKAHEAD, &dw_inclusion(a, cfg)?),
    })
}

/// The [`SaturationSpec`] of table cell `(rs, rt)` on `a`.
pub fn table_spec(
    a: &TreeAutomaton,
    rs: RelationKind,
    rt: RelationKind,
    cfg: &ComplementConfig,
) -> Result<SaturationSpec, ComplementError> {
    let s = kind_preorder(a, rs, cfg)?;
    let t = kind_preorder(a, rt, cfg)?;
    let source = if rs.is_downward() { s.inverse() } else { s };
    let target = if rt.is_downward() { t } else { t.inverse() };
    Ok(SaturationSpec::new(source, target).expect("preorders are reflexive"))
}

/// An automaton whose saturation accepts a tree it did not accept before.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub automaton: TreeAutomaton,
    pub saturated: TreeAutomaton,
    pub witness: Tree,
}

#[derive(Clone, Debug)]
pub enum GfsVerdict {
    NoViolation { checked: usize },
    Counterexample(Box<Counterexample>),
}

/// Saturates each sample automaton with cell `(rs, rt)` and looks for a
/// tree of depth at most `depth` that separates the two languages.
pub fn check_gfs_claim(
    rs: RelationKind,
    rt: RelationKind,
    sample: &[TreeAutomaton],
    depth: usize,
) -> GfsVerdict {
    let cfg = ComplementConfig::default();
    for a in sample {
        if let Some(ce) = counterexample_for(a, rs, rt, depth, &cfg) {
            return GfsVerdict::Counterexample(Box::new(ce));
        }
    }
    GfsVerdict::NoViolation {
        checked: sample.len(),
    }
}

/// Checks a single automaton against cell `(rs, rt)`.
pub fn counterexample_for(
    a: &TreeAutomaton,
    rs: RelationKind,
    rt: RelationKind,
    depth: usize,
    cfg: &ComplementConfig,
) -> Option<Counterexample> {
    let spec = table_spec(a, rs, rt, cfg).ok()?;
    let saturated = saturate_with_budget(a, &spec, usize::MAX).expect("no budget");
    let witness = oracle::distinguishing_tree(a, &saturated, depth)?;
    Some(Counterexample {
        automaton: a.clone(),
        saturated,
        witness,
    })
}

/// Alphabets tried by [`search_counterexample`].
pub fn search_alphabets() -> Vec<std::sync::Arc<RankedAlphabet>> {
    [
        &[("b", 0), ("a", 1)][..],
        &[("b", 0), ("a", 2)][..],
        &[("c", 0), ("b", 1), ("a", 2)][..],
    ]
    .iter()
    .map(|p| std::sync::Arc::new(RankedAlphabet::from_pairs(p).expect("distinct names")))
    .collect()
}

/// Randomized search for a counterexample to cell `(rs, rt)` among automata
/// with at most `max_states` states. The result is shrunk by dropping
/// transitions and initial states while it stays a counterexample.
pub fn search_counterexample(
    rs: RelationKind,
    rt: RelationKind,
    seed: u64,
    max_states: usize,
    time_limit: Duration,
) -> Option<Counterexample> {
    const DEPTH: usize = 5;
    let cfg = ComplementConfig::default();
    let alphabets = search_alphabets();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    while start.elapsed() < time_limit {
        let p = SmallParams {
            alphabet: alphabets[rng.gen_range(0..alphabets.len())].clone(),
            states: rng.gen_range(2..=max_states),
            density: rng.gen_range(0.5..2.5),
            leaf_prob: rng.gen_range(0.2..0.7),
            initial_prob: rng.gen_range(0.1..0.6),
        };
        let a = random_small(&p, &mut rng);
        if let Some(ce) = counterexample_for(&a, rs, rt, DEPTH, &cfg) {
            return Some(shrink(ce, rs, rt, DEPTH, &cfg));
        }
    }
    None
}

fn shrink(
    mut ce: Counterexample,
    rs: RelationKind,
    rt: RelationKind,
    depth: usize,
    cfg: &ComplementConfig,
) -> Counterexample {
    let mut progress = true;
    while progress {
        progress = false;
        let ts = ce.automaton.transitions().to_vec();
        for i in 0..ts.len() {
            let mut fewer = ts.clone();
            fewer.remove(i);
            let smaller = ce.automaton.with_transitions(fewer);
            if let Some(c) = counterexample_for(&smaller, rs, rt, depth, cfg) {
                ce = c;
                progress = true;
                break;
            }
        }
        if progress {
            continue;
        }
        let init: Vec<StateId> = ce.automaton.initial_states().collect();
        for &q in &init {
            if init.len() == 1 {
                break;
            }
            let smaller = ce
                .automaton
                .with_initial(init.iter().copied().filter(|&r| r != q));
            if let Some(c) = counterexample_for(&smaller, rs, rt, depth, cfg) {
                ce = c;
                progress = true;
                break;
            }
        }
    }
    ce
}

/// Fixture text for a counterexample: a Timbuk document preceded by comment
/// lines naming the cell and the witness tree.
pub fn fixture_text(rs: RelationKind, rt: RelationKind, ce: &Counterexample) -> String {
    format!(
        "# source: {rs}\n# target: {rt}\n# witness: {}\n{}",
        ce.witness.display(ce.automaton.alphabet()),
        crate::io::serialize_timbuk(&ce.automaton, "counterexample")
    )
}

/// A parsed counterexample fixture.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub source: RelationKind,
    pub target: RelationKind,
    pub automaton: TreeAutomaton,
    pub witness: Tree,
}

pub fn parse_fixture(text: &str) -> Result<Fixture, String> {
    let header = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("# {key}: ")))
            .map(str::trim)
            .ok_or_else(|| format!("missing `{key}` header"))
    };
    let source = header("source")?.parse()?;
    let target = header("target")?.parse()?;
    let automaton = crate::io::parse_timbuk(text).map_err(|e| e.to_string())?;
    let witness = Tree::parse(automaton.alphabet(), header("witness")?)?;
    Ok(Fixture {
        source,
        target,
        automaton,
        witness,
    })
}

/// Outcome of comparing two automata by size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Better,
    Equal,
    Worse,
}

/// Whether `b` is better than `a`: fewer states, or as many states and
/// fewer transitions.
pub fn better_than(b: &TreeAutomaton, a: &TreeAutomaton) -> Comparison {
    compare_sizes(
        (b.state_count(), b.transition_count()),
        (a.state_count(), a.transition_count()),
    )
}

pub fn compare_sizes(b: (usize, usize), a: (usize, usize)) -> Comparison {
    if b == a {
        Comparison::Equal
    } else if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        Comparison::Better
    } else {
        Comparison::Worse
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SatConfig {
    pub reduce: ReduceConfig,
    pub budget_factor: usize,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            reduce: ReduceConfig::default(),
            budget_factor: DEFAULT_BUDGET_FACTOR,
        }
    }
}

/// Why a saturation loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatStop {
    /// The last pass gave an automaton of the same size.
    Fixpoint,
    Worse,
    /// A saturation step exceeded its budget.
    Budget,
    /// `max_iterations` passes were made.
    Cap,
}

#[derive(Clone, Debug)]
pub struct SatOutcome {
    /// The best automaton seen, starting with the trimmed input.
    pub automaton: TreeAutomaton,
    pub iterations: usize,
    pub stop: SatStop,
}

struct SatRun<'c> {
    cfg: &'c SatConfig,
}

impl SatRun<'_> {
    fn sat_dw(&self, a: &TreeAutomaton, x: usize) -> Result<TreeAutomaton, SaturationError> {
        let dw = Rel::new(a, &self.cfg.reduce).dw(x);
        let spec = SaturationSpec::new(dw.inverse(), dw).expect("preorder");
        saturate_with_budget(a, &spec, self.cfg.budget_factor * a.transition_count())
    }

    fn sat_up(&self, a: &TreeAutomaton, y: usize) -> Result<TreeAutomaton, SaturationError> {
        let up = Rel::new(a, &self.cfg.reduce).up_id(y);
        let spec = SaturationSpec::new(up.clone(), up.inverse()).expect("preorder");
        saturate_with_budget(a, &spec, self.cfg.budget_factor * a.transition_count())
    }

    fn quot_up(&self, a: &TreeAutomaton, y: usize) -> TreeAutomaton {
        quotient_by(a, &Rel::new(a, &self.cfg.reduce).up_id(y))
    }

    /// P(strict ≼up-1(id), ≼dw-x)
    fn prune_up1_dw(&self, a: &TreeAutomaton, x: usize) -> TreeAutomaton {
        let r = Rel::new(a, &self.cfg.reduce);
        prune_by(a, PruneSide::strict(r.up_id(1)), PruneSide::plain(r.dw(x)))
    }

    /// P(≼up-y(≼dw-1), strict ≼dw-1)
    fn prune_updw_dw(&self, a: &TreeAutomaton, y: usize) -> TreeAutomaton {
        let r = Rel::new(a, &self.cfg.reduce);
        let dw1 = r.dw(1);
        prune_by(a, PruneSide::plain(r.up(y, &dw1)), PruneSide::strict(dw1))
    }

    /// P(strict ≼up-y(id), id)
    fn prune_up_id(&self, a: &TreeAutomaton, y: usize) -> TreeAutomaton {
        let r = Rel::new(a, &self.cfg.reduce);
        prune_by(a, PruneSide::strict(r.up_id(y)), PruneSide::plain(r.id()))
    }

    fn heavy(&self, a: &TreeAutomaton, x: usize, y: usize) -> TreeAutomaton {
        heavy_with(a, x, y, &self.cfg.reduce).automaton
    }

    fn sat1_body(
        &self,
        a: &TreeAutomaton,
        x: usize,
        y: usize,
    ) -> Result<TreeAutomaton, SaturationError> {
        let a = self.sat_dw(a, x)?;
        let a = self.sat_up(&a, y)?;
        let a = self.quot_up(&a, y);
        let a = self.prune_up1_dw(&a, x);
        let a = self.quot_up(&a, y);
        let a = self.prune_updw_dw(&a, y);
        Ok(self.heavy(&a, x, y))
    }

    fn sat2_inner_body(
        &self,
        a: &TreeAutomaton,
        x: usize,
        y: usize,
    ) -> Result<TreeAutomaton, SaturationError> {
        let a = self.sat_dw(a, x)?;
        let a = self.quot_up(&a, y);
        let a = self.prune_up_id(&a, y);
        let a = self.prune_up1_dw(&a, x);
        let a = self.quot_up(&a, y);
        Ok(self.prune_updw_dw(&a, y).remove_useless())
    }

    fn sat2_body(
        &self,
        a: &TreeAutomaton,
        x: usize,
        y: usize,
    ) -> Result<TreeAutomaton, SaturationError> {
        let inner = best_seen_loop(a, self.cfg.reduce.max_iterations, |b| {
            self.sat2_inner_body(b, x, y)
        });
        let a = self.sat_up(&inner.last, y)?;
        Ok(self.heavy(&a, x, y))
    }
}

struct LoopResult {
    best: TreeAutomaton,
    /// The automaton produced by the last completed pass.
    last: TreeAutomaton,
    iterations: usize,
    stop: SatStop,
}

/// Applies `body` until a pass is not strictly better than the previous one.
fn best_seen_loop(
    start: &TreeAutomaton,
    cap: usize,
    mut body: impl FnMut(&TreeAutomaton) -> Result<TreeAutomaton, SaturationError>,
) -> LoopResult {
    let mut best = start.remove_useless();
    let mut last = best.clone();
    for i in 1..=cap {
        let next = match body(&last) {
            Ok(b) => b.remove_useless(),
            Err(e) => {
                log::debug!("saturation loop stopped: {e}");
                return LoopResult {
                    best,
                    last,
                    iterations: i,
                    stop: SatStop::Budget,
                };
            }
        };
        let step = better_than(&next, &last);
        if better_than(&next, &best) == Comparison::Better {
            best = next.clone();
        }
        last = next;
        match step {
            Comparison::Better => {}
            Comparison::Equal => {
                return LoopResult {
                    best,
                    last,
                    iterations: i,
                    stop: SatStop::Fixpoint,
                }
            }
            Comparison::Worse => {
                return LoopResult {
                    best,
                    last,
                    iterations: i,
                    stop: SatStop::Worse,
                }
            }
        }
    }
    LoopResult {
        best,
        last,
        iterations: cap,
        stop: SatStop::Cap,
    }
}

pub fn sat1(a: &TreeAutomaton, x: usize, y: usize) -> TreeAutomaton {
    sat1_with(a, x, y, &SatConfig::default()).automaton
}

pub fn sat1_with(a: &TreeAutomaton, x: usize, y: usize, cfg: &SatConfig) -> SatOutcome {
    let run = SatRun { cfg };
    let r = best_seen_loop(a, cfg.reduce.max_iterations, |b| run.sat1_body(b, x, y));
    SatOutcome {
        automaton: r.best,
        iterations: r.iterations,
        stop: r.stop,
    }
}

pub fn sat2(a: &TreeAutomaton, x: usize, y: usize) -> TreeAutomaton {
    sat2_with(a, x, y, &SatConfig::default()).automaton
}

pub fn sat2_with(a: &TreeAutomaton, x: usize, y: usize, cfg: &SatConfig) -> SatOutcome {
    let run = SatRun { cfg };
    let r = best_seen_loop(a, cfg.reduce.max_iterations, |b| run.sat2_body(b, x, y));
    SatOutcome {
        automaton: r.best,
        iterations: r.iterations,
        stop: r.stop,
    }
}
