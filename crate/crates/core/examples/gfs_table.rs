//! Prints the table of saturation specs `S(Rs, Rt)` and checks every cell:
//! cells marked as language preserving are swept over random automata,
//! the others are refuted by a randomized counterexample search.
//!
//! ```text
//! cargo run --release --example gfs_table [-- --write-fixtures DIR] [--sweep N] [--seconds S]
//! ```
//!
//! With `--write-fixtures`, each counterexample is stored as an annotated
//! Timbuk file named `<source>__<target>.tim`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use tareduce::complement::ComplementConfig;
use tareduce::generator::{random_small_seeded, SmallParams};
use tareduce::saturate::{
    counterexample_for, fixture_text, is_gfs, search_alphabets, search_counterexample, RelationKind,
};

fn slug(k: RelationKind) -> String {
    k.name()
        .replace(['(', ')'], "_")
        .trim_end_matches('_')
        .to_string()
}

fn main() {
    let mut args = std::env::args().skip(1);
    let mut out_dir: Option<PathBuf> = None;
    let mut sweep = 300usize;
    let mut seconds = 60u64;
    while let Some(a) = args.next() {
        match a.as_str() {
            "--write-fixtures" => out_dir = args.next().map(PathBuf::from),
            "--sweep" => sweep = args.next().and_then(|v| v.parse().ok()).expect("--sweep N"),
            "--seconds" => {
                seconds = args
                    .next()
                    .and_then(|v| v.parse().ok())
                    .expect("--seconds S")
            }
            other => panic!("unknown argument {other}"),
        }
    }

    let alphabets = search_alphabets();
    let corpus: Vec<_> = (0..sweep)
        .map(|i| {
            let p = SmallParams {
                alphabet: alphabets[i % alphabets.len()].clone(),
                states: 1 + i % 6,
                density: 1.25,
                leaf_prob: 0.4,
                initial_prob: 0.35,
            };
            random_small_seeded(&p, i as u64)
        })
        .collect();
    let cfg = ComplementConfig::default();

    let cells: Vec<(RelationKind, RelationKind)> = RelationKind::ALL
        .iter()
        .flat_map(|&rs| RelationKind::ALL.iter().map(move |&rt| (rs, rt)))
        .collect();
    let results: Vec<String> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(rs, rt))| {
            if is_gfs(rs, rt) {
                let bad = corpus
                    .iter()
                    .filter(|a| counterexample_for(a, rs, rt, 5, &cfg).is_some())
                    .count();
                return if bad == 0 {
                    "ok".into()
                } else {
                    format!("VIOLATED x{bad}")
                };
            }
            let start = Instant::now();
            match search_counterexample(rs, rt, i as u64, 6, Duration::from_secs(seconds)) {
                Some(ce) => {
                    if let Some(dir) = &out_dir {
                        std::fs::create_dir_all(dir).expect("create fixture directory");
                        let path = dir.join(format!("{}__{}.tim", slug(rs), slug(rt)));
                        std::fs::write(&path, fixture_text(rs, rt, &ce)).expect("write fixture");
                    }
                    format!(
                        "cex {}st {:.1}s {}",
                        ce.automaton.state_count(),
                        start.elapsed().as_secs_f64(),
                        ce.witness.display(ce.automaton.alphabet())
                    )
                }
                None => "inconclusive".into(),
            }
        })
        .collect();

    println!("rows: source relation, columns: target relation\n");
    for (r, rs) in RelationKind::ALL.iter().enumerate() {
        println!("{rs}");
        for (c, rt) in RelationKind::ALL.iter().enumerate() {
            let mark = if is_gfs(*rs, *rt) {
                "GFS    "
            } else {
                "not GFS"
            };
            println!("    {:<20} {mark}  {}", rt.name(), results[r * 7 + c]);
        }
    }
}
