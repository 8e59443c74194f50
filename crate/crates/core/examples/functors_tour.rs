//! Residue functors on a few named complexes.

use filtc2::chains::named;
use filtc2::functors::{fgt_complex, gr_complex, homology, tate_dim, tfgt};

fn main() {
    for (name, x) in [("fund0", named::fund0()), ("T", named::t()), ("cone beta", named::cone_beta()), ("E(1,0)", named::e(1, 0))] {
        let gr = homology(&gr_complex(&x).unwrap());
        let fgt = homology(&fgt_complex(&x).unwrap());
        let t = tfgt(&x).unwrap();
        println!("{name}");
        println!("  gr homology (trivial, free) by degree: {gr:?}");
        println!("  fgt homology: {fgt:?}");
        println!("  tfgt total dim {}, Tate dim {}", t.total_dim(), tate_dim(&t));
    }
}
