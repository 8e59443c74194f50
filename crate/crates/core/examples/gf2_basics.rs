//! Linear algebra over F2: rank, kernels, solving and C2-module splitting.

use filtc2::gf2::{BitMatrix, BitVec, C2Module};

fn main() {
    let m = BitMatrix::from_str_rows(&["1101", "0110", "1011"]);
    println!("matrix:\n{m}");
    println!("rank {} nullity {}", m.rank(), m.kernel().rows());
    for v in m.kernel().row_vecs() {
        println!("kernel vector {v}, image {}", m.mul_vec(&v));
    }

    let b = BitVec::from_bit_str("101");
    match m.solve(&b).expect("shapes agree") {
        Some(x) => println!("solution of m x = {b}: x = {x}"),
        None => println!("{b} is not in the image"),
    }

    let v = C2Module::trivial(1).direct_sum(&C2Module::regular()).direct_sum(&C2Module::regular());
    let (trivial, free) = v.split();
    println!("k + kC2 + kC2 splits as {trivial} trivial and {free} free summands");
    println!("fixed points have dimension {}", v.fixed_points().dim());
}
