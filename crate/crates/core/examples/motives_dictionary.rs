//! Motivic names, their filtered models and realizations.

use filtc2::motives::{motivic_cohomology, realization, MotiveExpr};

fn main() {
    for text in ["M(R)", "M(C)", "fund0", "cone(beta)", "M(R)(1)[2]"] {
        let e = MotiveExpr::parse(text).unwrap();
        let x = e.to_filtered().unwrap();
        println!("{e}: total dim {}", x.total_dim());
        for r in ["etale", "base_change", "real"] {
            println!("  {}", realization(r, &e).unwrap());
        }
    }
    println!("motivic cohomology H^{{n,m}} of the point:");
    for m in 0..4 {
        let row: Vec<String> = (0..4).map(|n| motivic_cohomology(n, m).unwrap().to_string()).collect();
        println!("  m={m}: {}", row.join(" "));
    }
}
