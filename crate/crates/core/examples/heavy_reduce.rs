//! Reduces a Timbuk file (or a built-in sample) with `Heavy(x, y)` and
//! certifies the result.
//!
//! ```text
//! cargo run --release --example heavy_reduce [-- FILE [X Y]]
//! ```

use tareduce::complement::equivalent;
use tareduce::io::{parse_timbuk_document, serialize_timbuk};
use tareduce::reduce::{heavy_with, ReduceConfig};

const SAMPLE: &str = "
Ops f:2 g:1 c:0

Automaton sample
States r p1 p2 p3 s1 s2 dead
Final States r
Transitions
c -> s1
c -> s2
g(s1) -> s1
g(s2) -> s2
f(p1, p2) -> r
f(p2, p1) -> r
f(p3, p1) -> r
g(s1) -> p1
g(s2) -> p2
g(s2) -> p3
c -> p3
f(dead, s1) -> p1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = match args.first() {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let x = args.get(1).map_or(Ok(1), |v| v.parse())?;
    let y = args.get(2).map_or(Ok(1), |v| v.parse())?;
    let doc = parse_timbuk_document(&text)?;
    let a = &doc.automaton;

    let out = heavy_with(a, x, y, &ReduceConfig::default());
    println!("input:  {}", a.stats());
    println!(
        "H({x},{y}): {} after {} passes{}",
        out.automaton.stats(),
        out.iterations,
        if out.cap_hit { " (cap hit)" } else { "" }
    );
    println!("language preserved: {}", equivalent(a, &out.automaton)?);
    println!();
    print!("{}", serialize_timbuk(&out.automaton, &doc.name));
    Ok(())
}
