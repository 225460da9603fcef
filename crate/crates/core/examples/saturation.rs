//! Compares `Heavy(1,1)` with the saturation loops `Sat1` and `Sat2` on a
//! batch of random automata.
//!
//! ```text
//! cargo run --release --example saturation [-- COUNT N TD]
//! ```

use rayon::prelude::*;
use tareduce::generator::{tabakov_vardi_batch, InitialRule, TvParams};
use tareduce::reduce::heavy;
use tareduce::saturate::{better_than, sat1_with, sat2_with, Comparison, SatConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|v| v.parse().ok()).unwrap_or(d);
    let (count, n, td) = (arg(0, 200.0) as usize, arg(1, 6.0) as usize, arg(2, 1.5));

    let mut p = TvParams::new(n, 2, td, 0.5, 1);
    p.initial = InitialRule::Density(0.5);
    let corpus = tabakov_vardi_batch(&p, count);
    let cfg = SatConfig::default();

    let rows: Vec<_> = corpus
        .par_iter()
        .map(|a| {
            let h = heavy(a, 1, 1);
            let s1 = sat1_with(&h, 1, 1, &cfg);
            let s2 = sat2_with(&h, 1, 1, &cfg);
            (a.stats(), h, s1, s2)
        })
        .collect();

    let mean = |f: &dyn Fn(usize) -> usize| {
        rows.iter().enumerate().map(|(i, _)| f(i)).sum::<usize>() as f64 / count as f64
    };
    println!("{count} automata, n={n}, td={td}");
    println!("            states  transitions");
    println!(
        "input     {:8.2} {:12.2}",
        mean(&|i| rows[i].0.states),
        mean(&|i| rows[i].0.transitions)
    );
    println!(
        "H(1,1)    {:8.2} {:12.2}",
        mean(&|i| rows[i].1.state_count()),
        mean(&|i| rows[i].1.transition_count())
    );
    println!(
        "S1(1,1)   {:8.2} {:12.2}",
        mean(&|i| rows[i].2.automaton.state_count()),
        mean(&|i| rows[i].2.automaton.transition_count())
    );
    println!(
        "S2(1,1)   {:8.2} {:12.2}",
        mean(&|i| rows[i].3.automaton.state_count()),
        mean(&|i| rows[i].3.automaton.transition_count())
    );

    for (name, pick) in [("S1", 2usize), ("S2", 3)] {
        let better = rows
            .iter()
            .filter(|r| {
                let s = if pick == 2 {
                    &r.2.automaton
                } else {
                    &r.3.automaton
                };
                better_than(s, &r.1) == Comparison::Better
            })
            .count();
        println!("{name} strictly smaller than H(1,1) on {better} of {count}");
    }
}
