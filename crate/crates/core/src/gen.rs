//! Random objects for property tests and sampling: formal sums of
//! indecomposables, filtration-preserving automorphisms and complexes.

use rand::Rng;

use crate::chains::{CellKind, Complex};
use crate::filtmod::{hom_space, FiltModule, FormalSum, IndecLabel};
use crate::gf2::{BitMatrix, BitVec};
use crate::shell::{Expr, MapExpr};

/// A random indecomposable `1(n)` or `E(l, m)` with `l <= l_max` and twists
/// in `-twist..=twist`.
pub fn random_label<R: Rng + ?Sized>(rng: &mut R, l_max: u32, twist: i32) -> IndecLabel {
    let m = rng.gen_range(-twist..=twist);
    if rng.gen_bool(0.4) {
        IndecLabel::Unit(m)
    } else {
        IndecLabel::E(rng.gen_range(0..=l_max), m)
    }
}

/// A random formal sum of `1..=max_len` indecomposables.
pub fn random_formal_sum<R: Rng + ?Sized>(rng: &mut R, max_len: usize, l_max: u32, twist: i32) -> FormalSum {
    let n = rng.gen_range(1..=max_len.max(1));
    (0..n).map(|_| random_label(rng, l_max, twist)).collect()
}

/// A random linear combination of the given matrices (all of one shape).
fn random_combination<R: Rng + ?Sized>(rng: &mut R, basis: &[BitMatrix], rows: usize, cols: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for b in basis {
        if rng.gen_bool(0.5) {
            m.add_assign(b);
        }
    }
    m
}

/// A random filtration-preserving equivariant automorphism of `a`, found by
/// rejection sampling in its endomorphism space; the identity if no sample
/// within the budget is invertible.
pub fn random_automorphism<R: Rng + ?Sized>(rng: &mut R, a: &FiltModule) -> BitMatrix {
    let n = a.dim();
    let basis = hom_space(a, a);
    for _ in 0..256 {
        let m = random_combination(rng, &basis, n, n);
        if m.is_invertible() {
            return m;
        }
    }
    BitMatrix::identity(n)
}

/// Shape parameters for random complexes.
#[derive(Clone, Copy, Debug)]
pub struct ComplexParams {
    /// Lowest degree.
    pub lo: i32,
    /// Number of degrees.
    pub width: usize,
    /// Maximum number of indecomposable summands per term.
    pub max_summands: usize,
    /// Maximum `l` for `E(l, m)` summands (filtered complexes only).
    pub l_max: u32,
    /// Twist bound (filtered complexes only).
    pub twist: i32,
}

impl Default for ComplexParams {
    fn default() -> Self {
        Self { lo: -1, width: 3, max_summands: 3, l_max: 2, twist: 1 }
    }
}

/// A random bounded complex. Terms are random direct sums (for
/// `CellKind::PlainC2`, of `k` and `kC2` only), transported along random
/// automorphisms so they are not in normal form; each differential is a
/// random morphism in the kernel of composition with the previous one.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, kind: CellKind, p: ComplexParams) -> Complex {
    let (l_max, twist) = match kind {
        CellKind::Filtered => (p.l_max, p.twist),
        _ => (0, 0),
    };
    let terms: Vec<FiltModule> = (0..p.width)
        .map(|_| {
            let labels: Vec<IndecLabel> = random_formal_sum(rng, p.max_summands, l_max, twist)
                .labels()
                .iter()
                .map(|l| if kind == CellKind::PlainF2 { IndecLabel::Unit(0) } else { *l })
                .collect();
            let a = FiltModule::realize_sum(&FormalSum::new(labels));
            let g = random_automorphism(rng, &a);
            a.transport(&g)
        })
        .collect();
    let mut diffs: Vec<BitMatrix> = Vec::new();
    for k in 1..terms.len() {
        let (src, tgt) = (&terms[k], &terms[k - 1]);
        let basis = hom_space(src, tgt);
        let constrained = match diffs.last() {
            None => basis,
            Some(prev) => {
                // Coefficient vectors c with prev * (sum c_i h_i) = 0.
                let images: Vec<BitVec> = basis.iter().map(|h| flatten(&prev.mul(h))).collect();
                if images.is_empty() || images[0].is_empty() {
                    basis
                } else {
                    let ker = BitMatrix::from_cols(images[0].len(), &images).kernel();
                    (0..ker.rows())
                        .map(|r| {
                            let c = ker.row(r);
                            let mut m = BitMatrix::zeros(tgt.dim(), src.dim());
                            for i in c.ones() {
                                m.add_assign(&basis[i]);
                            }
                            m
                        })
                        .collect()
                }
            }
        };
        diffs.push(random_combination(rng, &constrained, tgt.dim(), src.dim()));
    }
    Complex::new(kind, p.lo, terms, diffs).expect("random differentials square to zero")
}

/// A random map expression built from named maps.
pub fn random_map_expr<R: Rng + ?Sized>(rng: &mut R) -> MapExpr {
    let atom = |rng: &mut R| match rng.gen_range(0..9) {
        0 => MapExpr::Beta,
        1 => MapExpr::Rho,
        2 => MapExpr::BetaRho,
        3 => MapExpr::Eta,
        4 => MapExpr::Eps,
        5 => MapExpr::Iota1,
        6 => MapExpr::EtaTilde,
        7 => MapExpr::Upsilon,
        _ => MapExpr::BetaOf(Box::new(Expr::E(rng.gen_range(0..=2), rng.gen_range(-1..=1)))),
    };
    let a = atom(rng);
    if rng.gen_bool(0.2) {
        MapExpr::Tensor(Box::new(a), Box::new(atom(rng)))
    } else {
        a
    }
}

/// A random object expression with at most `depth` nested operations.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..14) {
            0 => Expr::Zero,
            1 => Expr::Unit(rng.gen_range(-1..=1)),
            2 | 3 => Expr::E(rng.gen_range(0..=3), rng.gen_range(-1..=1)),
            4 => Expr::MotR,
            5 => Expr::MotC,
            6 => Expr::Fund0,
            7 => Expr::FundL(rng.gen_range(1..=2)),
            8 => Expr::T,
            9 => Expr::ConeBeta,
            10 => Expr::ConeRho,
            11 => Expr::ConeOmega,
            12 => Expr::Lpure(rng.gen_range(-1..=1)),
            _ => Expr::Cone(Box::new(random_map_expr(rng))),
        };
    }
    let sub = |rng: &mut R| Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..5) {
        0 => Expr::Sum(sub(rng), sub(rng)),
        1 => Expr::Tensor(sub(rng), sub(rng)),
        2 => Expr::Twist(sub(rng), rng.gen_range(-1..=1)),
        3 => Expr::Shift(sub(rng), rng.gen_range(-2..=2)),
        _ => Expr::Dual(sub(rng)),
    }
}

fn flatten(m: &BitMatrix) -> BitVec {
    let mut v = BitVec::zeros(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j) {
                v.set(i * m.cols() + j, true);
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtmod::decompose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn automorphisms_preserve_filtration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = random_formal_sum(&mut rng, 4, 3, 2);
            let a = FiltModule::realize_sum(&s);
            let g = random_automorphism(&mut rng, &a);
            assert!(a.is_morphism_to(&a, &g));
            assert_eq!(decompose(&a.transport(&g)).unwrap().sum, s);
        }
    }

    #[test]
    fn random_expressions_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let e = random_expr(&mut rng, 2);
            e.eval().unwrap().validate().unwrap();
            assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn random_complexes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [CellKind::Filtered, CellKind::PlainC2, CellKind::PlainF2] {
            for _ in 0..20 {
                random_complex(&mut rng, kind, ComplexParams::default()).validate().unwrap();
            }
        }
    }
}
