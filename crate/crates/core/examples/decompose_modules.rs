//! Decomposing filtered modules into indecomposables, after hiding the
//! normal form behind a random automorphism.

use filtc2::filtmod::{decompose, FiltModule, FormalSum, IndecLabel};
use filtc2::gen::random_automorphism;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sum = FormalSum::new(vec![IndecLabel::Unit(1), IndecLabel::E(0, 0), IndecLabel::E(2, -1)]);
    let a = FiltModule::realize_sum(&sum);
    let b = a.transport(&random_automorphism(&mut rng, &a));
    let d = decompose(&b).expect("valid module");
    println!("input dimension {}, weights {}..{}", b.dim(), b.w_min(), b.w_max());
    println!("decomposition: {}", d.sum);
    println!("certificate valid: {}", d.validate(&b));

    let x = FiltModule::realize(IndecLabel::E(1, 0));
    let y = FiltModule::realize(IndecLabel::E(2, 1));
    println!("E(1,0) * E(2,1) = {}", decompose(&x.tensor(&y)).unwrap().sum);
    println!("dual of E(2,1) = {}", decompose(&y.dual()).unwrap().sum);
}
