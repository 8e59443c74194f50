//! Supports on the six-point spectrum and the classification of thick ideals.

use filtc2::shell::Expr;
use filtc2::spectrum::{classify_support, closed_supports, supp_traced};

fn main() {
    for text in ["fund0", "E(1,0)", "conebeta", "T + E(0,0)", "fund0 * E(1,0)"] {
        let x = Expr::parse(text).unwrap().eval().unwrap();
        let (s, trace) = supp_traced(&x).unwrap();
        println!("supp({text}) = {s}");
        for t in trace {
            println!("  {} via {}: {}", t.prime, t.functor, if t.nonzero { "nonzero" } else { "zero" });
        }
    }
    println!("closed subsets and generators of the matching thick ideals:");
    for s in closed_supports() {
        println!("  {s}: {}", classify_support(s).unwrap().generator);
    }
}
