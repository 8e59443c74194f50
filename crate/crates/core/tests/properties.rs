//! Property tests for the algebraic invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use filtc2::chains::{is_contractible, minimize, CellKind, ChainMap, Complex};
use filtc2::filtmod::{decompose, FiltModule, FormalSum, IndecLabel};
use filtc2::functors::{gr_complex, homology};
use filtc2::gen::{random_automorphism, random_complex, random_expr, random_formal_sum, ComplexParams};
use filtc2::gf2::{BitMatrix, BitVec};
use filtc2::shell::{deserialize, serialize, Expr, Object};
use filtc2::spectrum::supp;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bit_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(any::<bool>(), rows * cols)
        .prop_map(move |bits| BitMatrix::from_fn(rows, cols, |i, j| bits[i * cols + j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(m in (1usize..8, 1usize..8).prop_flat_map(|(r, c)| bit_matrix(r, c))) {
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.rows(), m.cols());
        for v in k.row_vecs() {
            prop_assert!(m.mul_vec(&v).is_zero());
        }
    }

    #[test]
    fn solve_finds_preimages(m in bit_matrix(6, 5), x in proptest::collection::vec(any::<bool>(), 5)) {
        let x = BitVec::from_bools(&x);
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn twist_is_invertible(seed in any::<u64>(), r in -3i32..=3) {
        let a = FiltModule::realize_sum(&random_formal_sum(&mut rng(seed), 4, 3, 2));
        prop_assert_eq!(a.twist(r).twist(-r), a);
    }

    #[test]
    fn decomposition_recovers_conjugated_sums(seed in any::<u64>()) {
        let mut g = rng(seed);
        let sum = random_formal_sum(&mut g, 5, 3, 2);
        let a = FiltModule::realize_sum(&sum);
        let b = a.transport(&random_automorphism(&mut g, &a));
        let d = decompose(&b).unwrap();
        prop_assert_eq!(&d.sum, &sum);
        prop_assert!(d.validate(&b));
    }

    #[test]
    fn dual_twists_labels(l in 0u32..=4, m in -3i32..=3) {
        let a = FiltModule::realize(IndecLabel::E(l, m));
        let d = decompose(&a.dual()).unwrap();
        prop_assert_eq!(d.sum, FormalSum::new(vec![IndecLabel::E(l, -m - l as i32)]));
        prop_assert_eq!(decompose(&a.dual().dual()).unwrap().sum, FormalSum::new(vec![IndecLabel::E(l, m)]));
    }

    #[test]
    fn tensor_rule(l in 0u32..=4, dl in 0u32..=2, i in -2i32..=2, j in -2i32..=2) {
        let lp = l + dl;
        let t = FiltModule::realize(IndecLabel::E(l, i)).tensor(&FiltModule::realize(IndecLabel::E(lp, j)));
        let want = FormalSum::new(vec![IndecLabel::E(l, i + j), IndecLabel::E(l, i + j + lp as i32)]);
        prop_assert_eq!(decompose(&t).unwrap().sum, want);
    }

    #[test]
    fn minimization_is_a_deformation_retract(seed in any::<u64>()) {
        let x = random_complex(&mut rng(seed), CellKind::Filtered, ComplexParams::default());
        let m = minimize(&x).unwrap();
        let pi = m.p.compose(&m.i).unwrap();
        prop_assert_eq!(pi, ChainMap::identity(&m.complex));
        prop_assert!(m.complex.total_dim() <= x.total_dim());
        prop_assert_eq!(homology(&gr_complex(&m.complex).unwrap()), homology(&gr_complex(&x).unwrap()));
    }

    #[test]
    fn cones_of_identities_are_contractible(seed in any::<u64>()) {
        let x = random_complex(&mut rng(seed), CellKind::Filtered, ComplexParams::default());
        prop_assert!(is_contractible(&ChainMap::identity(&x).cone()).unwrap());
    }

    #[test]
    fn dual_is_involutive(seed in any::<u64>()) {
        let x = random_complex(&mut rng(seed), CellKind::Filtered, ComplexParams::default());
        prop_assert_eq!(x.dual().dual(), x);
    }

    #[test]
    fn supports_are_closed_and_tensor_multiplicative(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b) = (random_expr(&mut g, 1), random_expr(&mut g, 1));
        let (xa, xb) = (a.eval().unwrap(), b.eval().unwrap());
        let (sa, sb) = (supp(&xa).unwrap(), supp(&xb).unwrap());
        prop_assert!(sa.is_closed());
        prop_assert_eq!(supp(&xa.tensor(&xb).unwrap()).unwrap(), sa.intersection(sb));
        prop_assert_eq!(supp(&xa.direct_sum(&xb).unwrap()).unwrap(), sa.union(sb));
        prop_assert_eq!(supp(&xa.twist(1).unwrap()).unwrap(), sa);
    }

    #[test]
    fn print_parse_print(seed in any::<u64>()) {
        let e = random_expr(&mut rng(seed), 3);
        let p = e.to_string();
        let back = Expr::parse(&p).unwrap();
        prop_assert_eq!(back.to_string(), p);
        prop_assert_eq!(back, e);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mut g = rng(seed);
        for kind in [CellKind::Filtered, CellKind::PlainC2, CellKind::PlainF2] {
            let x = random_complex(&mut g, kind, ComplexParams::default());
            let obj = Object::Complex(x);
            prop_assert_eq!(deserialize(&serialize(&obj)).unwrap(), obj);
        }
        let a = FiltModule::realize_sum(&random_formal_sum(&mut g, 4, 3, 2));
        let a = a.transport(&random_automorphism(&mut g, &a));
        prop_assert_eq!(deserialize(&serialize(&Object::Module(a.clone()))).unwrap(), Object::Module(a));
    }
}

#[test]
fn zero_complex_round_trips() {
    let z = Object::Complex(Complex::zero(CellKind::Filtered));
    assert_eq!(deserialize(&serialize(&z)).unwrap(), z);
}
