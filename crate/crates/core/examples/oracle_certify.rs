//! The brute-force oracle: enumerates trees, finds a tree separating two
//! automata, and certifies a reduction both by bounded search and exactly.

use std::sync::Arc;

use tareduce::complement::equivalent;
use tareduce::oracle::{accepting_run, bounded_language, distinguishing_tree, enumerate_trees};
use tareduce::reduce::heavy;
use tareduce::{RankedAlphabet, TreeAutomaton};

fn main() {
    let al = Arc::new(RankedAlphabet::from_pairs(&[("a", 2), ("b", 0)]).unwrap());
    for d in 1..=4 {
        println!("trees of depth <= {d}: {}", enumerate_trees(&al, d).len());
    }

    // trees whose leftmost branch carries an odd number of `a`s
    let odd = TreeAutomaton::builder(al.clone(), 4)
        .initial(0)
        .rule(0, "a", &[1, 2])
        .rule(1, "b", &[])
        .rule(1, "a", &[0, 2])
        .rule(0, "a", &[3, 2])
        .rule(3, "a", &[0, 2])
        .rule(2, "b", &[])
        .rule(2, "a", &[2, 2])
        .build()
        .unwrap();
    let lang = bounded_language(&odd, 3);
    println!("accepted up to depth 3:");
    for t in &lang {
        println!("  {}", t.display(&al));
    }
    if let Some(t) = lang.iter().next() {
        let run = accepting_run(&odd, t).expect("accepted");
        println!(
            "run on {}: root state q{}",
            t.display(&al),
            run.state.index()
        );
    }

    let reduced = heavy(&odd, 1, 1);
    println!(
        "Heavy(1,1): {} -> {} states; separating tree up to depth 6: {:?}; exact: {}",
        odd.state_count(),
        reduced.state_count(),
        distinguishing_tree(&odd, &reduced, 6).map(|t| t.display(&al).to_string()),
        equivalent(&odd, &reduced).unwrap()
    );

    let more_initial = odd.with_initial([tareduce::StateId(0), tareduce::StateId(2)]);
    let t = distinguishing_tree(&odd, &more_initial, 6).expect("languages differ");
    println!(
        "adding an initial state changes the language, e.g. {}",
        t.display(&al)
    );
}
