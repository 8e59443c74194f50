//! Minimizing random complexes and checking the retraction data.

use filtc2::chains::{minimize, signature_string, CellKind, ChainMap};
use filtc2::gen::{random_complex, ComplexParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in [CellKind::Filtered, CellKind::PlainC2] {
        let x = random_complex(&mut rng, kind, ComplexParams { width: 4, ..Default::default() });
        let m = minimize(&x).expect("valid complex");
        let retract = m.p.compose(&m.i).unwrap() == ChainMap::identity(&m.complex);
        println!(
            "{kind:?}: total dim {} -> {}, minimal form {}, p.i = id: {retract}",
            x.total_dim(),
            m.complex.total_dim(),
            signature_string(&m.signature)
        );
    }
}
