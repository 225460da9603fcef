//! Pipelines of reduction and complementation steps, timed per step.
//!
//! A pipeline is written as steps joined by `+`, each step one of `H`, `S1`,
//! `S2` (optionally with lookaheads, e.g. `H(2,1)`; default `(1,1)`), `C`
//! (complement) or `RU` (remove useless states). Examples: `C`, `H+C`,
//! `H+C+H`, `H+S2+C`, `H+C+H+S2`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::automaton::TreeAutomaton;
use crate::complement::{complement_with, ComplementConfig};
use crate::error::Error;
use crate::reduce::{heavy_with, ReduceConfig};
use crate::saturate::{sat1_with, sat2_with, SatConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Heavy(usize, usize),
    Sat1(usize, usize),
    Sat2(usize, usize),
    Complement,
    RemoveUseless,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Heavy(x, y) => write!(f, "H({x},{y})"),
            Step::Sat1(x, y) => write!(f, "S1({x},{y})"),
            Step::Sat2(x, y) => write!(f, "S2({x},{y})"),
            Step::Complement => f.write_str("C"),
            Step::RemoveUseless => f.write_str("RU"),
        }
    }
}

impl FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, args) = match s.split_once('(') {
            Some((h, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| format!("missing `)` in step `{s}`"))?;
                let (x, y) = inner
                    .split_once(',')
                    .ok_or_else(|| format!("expected two lookaheads in `{s}`"))?;
                let parse = |v: &str| match v.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k),
                    _ => Err(format!("bad lookahead `{v}` in `{s}`")),
                };
                (h, Some((parse(x)?, parse(y)?)))
            }
            None => (s, None),
        };
        let (x, y) = args.unwrap_or((1, 1));
        let step = match head {
            "H" => Step::Heavy(x, y),
            "S1" => Step::Sat1(x, y),
            "S2" => Step::Sat2(x, y),
            "C" | "RU" if args.is_some() => return Err(format!("`{head}` takes no arguments")),
            "C" => Step::Complement,
            "RU" => Step::RemoveUseless,
            _ => return Err(format!("unknown step `{head}`")),
        };
        Ok(step)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pipeline {
    /// The name as written by the user.
    pub name: String,
    pub steps: Vec<Step>,
}

impl FromStr for Pipeline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_string();
        if name.is_empty() {
            return Err("empty pipeline".into());
        }
        let steps = name
            .split('+')
            .map(str::parse)
            .collect::<Result<Vec<Step>, _>>()?;
        Ok(Pipeline { name, steps })
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Splits a comma separated pipeline list, ignoring commas inside
/// parentheses: `H(2,1)+C,C` is two pipelines.
pub fn parse_pipeline_list(s: &str) -> Result<Vec<Pipeline>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].parse()?);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub name: String,
    pub states: usize,
    pub transitions: usize,
    pub ms: f64,
}

/// Result of one pipeline on one automaton.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub corpus_id: String,
    pub pipeline: String,
    pub steps: Vec<StepReport>,
    pub states: usize,
    pub transitions: usize,
    pub ms: f64,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunConfig {
    pub sat: SatConfig,
    pub complement: Option<ComplementConfig>,
}

impl RunConfig {
    fn reduce(&self) -> &ReduceConfig {
        &self.sat.reduce
    }
}

pub fn run_step(a: &TreeAutomaton, step: Step, cfg: &RunConfig) -> Result<TreeAutomaton, Error> {
    Ok(match step {
        Step::Heavy(x, y) => heavy_with(a, x, y, cfg.reduce()).automaton,
        Step::Sat1(x, y) => sat1_with(a, x, y, &cfg.sat).automaton,
        Step::Sat2(x, y) => sat2_with(a, x, y, &cfg.sat).automaton,
        Step::Complement => complement_with(a, &cfg.complement.unwrap_or_default())?,
        Step::RemoveUseless => a.remove_useless(),
    })
}

/// Runs `pipeline` on `a`. On failure the report carries the error and the
/// steps completed so far, and no automaton is returned.
pub fn run_pipeline(
    corpus_id: &str,
    a: &TreeAutomaton,
    pipeline: &Pipeline,
    cfg: &RunConfig,
) -> (PipelineReport, Result<TreeAutomaton, Error>) {
    let mut report = PipelineReport {
        corpus_id: corpus_id.to_string(),
        pipeline: pipeline.name.clone(),
        steps: Vec::new(),
        states: a.state_count(),
        transitions: a.transition_count(),
        ms: 0.0,
        error: None,
    };
    let mut cur = a.clone();
    for &step in &pipeline.steps {
        let start = Instant::now();
        match run_step(&cur, step, cfg) {
            Ok(next) => {
                let ms = start.elapsed().as_secs_f64() * 1e3;
                report.steps.push(StepReport {
                    name: step.to_string(),
                    states: next.state_count(),
                    transitions: next.transition_count(),
                    ms,
                });
                report.ms += ms;
                report.states = next.state_count();
                report.transitions = next.transition_count();
                cur = next;
            }
            Err(e) => {
                report.ms += start.elapsed().as_secs_f64() * 1e3;
                report.error = Some(e.to_string());
                return (report, Err(e));
            }
        }
    }
    (report, Ok(cur))
}

/// Runs every pipeline on every automaton with `jobs` worker threads.
/// Rows come out grouped by automaton, in corpus order, then pipeline order.
pub fn bench(
    corpus: &[(String, TreeAutomaton)],
    pipelines: &[Pipeline],
    cfg: &RunConfig,
    jobs: usize,
) -> Vec<PipelineReport> {
    let work = || -> Vec<PipelineReport> {
        corpus
            .par_iter()
            .flat_map_iter(|(id, a)| {
                pipelines
                    .iter()
                    .map(move |p| run_pipeline(id, a, p, cfg).0)
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
    {
        Ok(pool) => pool.install(work),
        Err(e) => {
            log::warn!("could not build a pool of {jobs} threads: {e}");
            work()
        }
    }
}

/// Report for an input that could not even be loaded.
pub fn failed_report(corpus_id: &str, pipeline: &Pipeline, error: &str) -> PipelineReport {
    PipelineReport {
        corpus_id: corpus_id.to_string(),
        pipeline: pipeline.name.clone(),
        steps: Vec::new(),
        states: 0,
        transitions: 0,
        ms: 0.0,
        error: Some(error.to_string()),
    }
}
