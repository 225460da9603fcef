//! Downward and upward lookahead simulations on a small automaton where a
//! lookahead of 2 relates states that ordinary simulation cannot.

use tareduce::io::parse_timbuk_document;
use tareduce::simulation::{lookahead_dw_sim, lookahead_up_sim, CacheMode, SimConfig};
use tareduce::Relation;

// `p` reads a(b(c)) and a(d(c)) through a single `a` rule; `q` splits the
// choice between two `a` rules. Seen one step at a time, `p1` is neither
// below `q1` nor below `q2`.
const TEXT: &str = "
Ops a:1 b:1 d:1 c:0
Automaton split
States p q p1 q1 q2 e
Final States p q
Transitions
c -> e
a(p1) -> p
b(e) -> p1
d(e) -> p1
a(q1) -> q
a(q2) -> q
b(e) -> q1
d(e) -> q2
";

fn show(names: &[String], r: &Relation) -> String {
    r.pairs()
        .filter(|(p, q)| p != q)
        .map(|(p, q)| format!("{}<={}", names[p], names[q]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() {
    let doc = parse_timbuk_document(TEXT).expect("valid sample");
    let a = &doc.automaton;
    let names = &doc.state_names;

    for k in 1..=3 {
        let dw = lookahead_dw_sim(a, k, &SimConfig::default());
        println!("downward k={k}: {}", show(names, &dw));
    }
    for cache in CacheMode::ALL {
        let cfg = SimConfig {
            cache,
            prerefine: Some(3),
            ..SimConfig::default()
        };
        assert_eq!(
            lookahead_dw_sim(a, 2, &cfg),
            lookahead_dw_sim(a, 2, &SimConfig::default())
        );
    }
    println!("all cache modes and pre-refinement agree");

    let id = Relation::identity(a.state_count());
    let dw1 = lookahead_dw_sim(a, 1, &SimConfig::default());
    for k in 1..=2 {
        let up = lookahead_up_sim(a, k, &id).expect("same automaton");
        let up_dw = lookahead_up_sim(a, k, &dw1).expect("same automaton");
        println!("upward k={k} (id side):  {}", show(names, &up));
        println!("upward k={k} (dw side):  {}", show(names, &up_dw));
    }
}
