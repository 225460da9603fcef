//! Complements random automata directly and with reductions before and after,
//! per transition density, and reports how many inputs are universal.
//!
//! ```text
//! cargo run --release --example complement_pipelines [-- COUNT]
//! ```

use tareduce::experiment::{bench, parse_pipeline_list, RunConfig};
use tareduce::generator::{tabakov_vardi_batch, TvParams};

fn main() {
    let count: usize = std::env::args()
        .nth(1)
        .and_then(|v| v.parse().ok())
        .unwrap_or(100);
    let pipelines = parse_pipeline_list("C,H+C,H+C+H,H+C+H+S2").expect("valid pipelines");
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());

    print!("{:>5} {:>9}", "td", "universal");
    for p in &pipelines {
        print!(" {:>14}", p.name);
    }
    println!();
    for td in [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0] {
        let corpus: Vec<_> = tabakov_vardi_batch(&TvParams::new(4, 2, td, 0.5, 0), count)
            .into_iter()
            .enumerate()
            .map(|(i, a)| (format!("td{td}-{i}"), a))
            .collect();
        let rows = bench(&corpus, &pipelines, &RunConfig::default(), jobs);
        // the complement of a universal automaton has no useful state
        let universal = rows
            .iter()
            .filter(|r| r.pipeline == "H+C+H" && r.error.is_none() && r.states == 0)
            .count();
        print!("{td:>5} {:>9}", format!("{universal}/{count}"));
        for p in &pipelines {
            let ok: Vec<_> = rows
                .iter()
                .filter(|r| r.pipeline == p.name && r.error.is_none())
                .collect();
            let mean =
                ok.iter().map(|r| r.transitions).sum::<usize>() as f64 / ok.len().max(1) as f64;
            print!(" {mean:>14.1}");
        }
        println!();
    }
    println!("\ncells are mean transition counts of the final automaton");
}
