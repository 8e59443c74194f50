//! Functors out of filtered complexes: graded pieces, forgetting, restriction
//! to vector spaces, stable reduction, Tate vanishing, the weight-zero
//! embedding and its right adjoint, the twisted forgetful functor and derived
//! hom dimensions.

use std::collections::BTreeMap;
use std::fmt;

use crate::chains::{minimize, named, CellKind, ChainError, ChainMap, Complex};
use crate::filtmod::{hom_space, FiltModule, Graded};
use crate::gf2::{BitMatrix, BitVec, C2Module, Coordinates, Subspace};

/// Dimensions indexed by integer degree, finitely supported.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedDims(BTreeMap<i32, usize>);

impl GradedDims {
    /// Dimension in degree `n`.
    pub fn get(&self, n: i32) -> usize {
        self.0.get(&n).copied().unwrap_or(0)
    }

    /// Nonzero entries in increasing degree.
    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    fn insert(&mut self, n: i32, d: usize) {
        if d > 0 {
            self.0.insert(n, d);
        }
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.iter().map(|(n, d)| format!("{n}:{d}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn pure0(m: C2Module) -> FiltModule {
    FiltModule::pure(m, 0)
}

fn plain_kind(x: &Complex) -> CellKind {
    match x.kind() {
        CellKind::Filtered => CellKind::PlainC2,
        k => k,
    }
}

/// Degreewise total graded complex.
pub fn gr_complex(x: &Complex) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = x.range() else { return Ok(Complex::zero(plain_kind(x))) };
    let gs: Vec<Graded> = x.terms().iter().map(FiltModule::graded).collect();
    let terms = gs.iter().map(|g| pure0(g.total())).collect();
    let diffs = (lo + 1..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            gs[k].induced_total(&x.d(n), &gs[k - 1])
        })
        .collect();
    Complex::new(plain_kind(x), lo, terms, diffs)
}

/// The total graded map of a chain map.
pub fn gr_map(f: &ChainMap) -> Result<ChainMap, ChainError> {
    let (x, y) = (f.source(), f.target());
    let gx = gr_complex(x)?;
    let gy = gr_complex(y)?;
    ChainMap::from_fn(&gx, &gy, |n| {
        let (a, b) = (x.term_or_zero(n).graded(), y.term_or_zero(n).graded());
        a.induced_total(&f.comp(n), &b)
    })
}

/// The complex of weight-`w` graded pieces.
pub fn gr_weight_complex(x: &Complex, w: i32) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = x.range() else { return Ok(Complex::zero(plain_kind(x))) };
    let gs: Vec<Graded> = x.terms().iter().map(FiltModule::graded).collect();
    let terms = gs.iter().map(|g| pure0(g.piece(w).map_or_else(C2Module::zero, |p| p.module.clone()))).collect();
    let diffs = (lo + 1..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            gs[k].induced_piece(w, &x.d(n), &gs[k - 1])
        })
        .collect();
    Complex::new(plain_kind(x), lo, terms, diffs)
}

/// The weight-`w` graded piece of a chain map.
pub fn gr_weight_map(f: &ChainMap, w: i32) -> Result<ChainMap, ChainError> {
    let (x, y) = (f.source(), f.target());
    let gx = gr_weight_complex(x, w)?;
    let gy = gr_weight_complex(y, w)?;
    ChainMap::from_fn(&gx, &gy, |n| {
        let (a, b) = (x.term_or_zero(n).graded(), y.term_or_zero(n).graded());
        a.induced_piece(w, &f.comp(n), &b)
    })
}

/// Forgets the filtration degreewise.
pub fn fgt_complex(x: &Complex) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = x.range() else { return Ok(Complex::zero(plain_kind(x))) };
    let terms = x.terms().iter().map(|t| pure0(t.module().clone())).collect();
    let diffs = (lo + 1..=hi).map(|n| x.d(n)).collect();
    Complex::new(plain_kind(x), lo, terms, diffs)
}

/// Forgets the filtration on a chain map.
pub fn fgt_map(f: &ChainMap) -> Result<ChainMap, ChainError> {
    let gx = fgt_complex(f.source())?;
    let gy = fgt_complex(f.target())?;
    ChainMap::from_fn(&gx, &gy, |n| f.comp(n))
}

/// Forgets the C2-action.
pub fn res_complex(y: &Complex) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = y.range() else { return Ok(Complex::zero(CellKind::PlainF2)) };
    let terms = y.terms().iter().map(|t| pure0(C2Module::trivial(t.dim()))).collect();
    let diffs = (lo + 1..=hi).map(|n| y.d(n)).collect();
    Complex::new(CellKind::PlainF2, lo, terms, diffs)
}

/// True if the complex is exact as a complex of vector spaces.
pub fn is_exact_f2(z: &Complex) -> bool {
    let Some((lo, hi)) = z.range() else { return true };
    let ranks: BTreeMap<i32, usize> = (lo..=hi + 1).map(|n| (n, z.d(n).rank())).collect();
    (lo..=hi).all(|n| z.dim_at(n) == ranks[&n] + ranks[&(n + 1)])
}

/// Homology `ker d_n / im d_{n+1}` in each degree, as `(a, b)` with the
/// quotient isomorphic to `k^a (+) kC2^b`.
pub fn homology(y: &Complex) -> Vec<(i32, (usize, usize))> {
    let Some((lo, hi)) = y.range() else { return Vec::new() };
    let mut out = Vec::new();
    for n in lo..=hi {
        let t = y.term(n).expect("in range");
        let z = Subspace::kernel_of(&y.d(n));
        let b = Subspace::column_space(&y.d(n + 1));
        let q = quotient_module(t.module().sigma(), &z, &b);
        let s = q.split();
        if s != (0, 0) {
            out.push((n, s));
        }
    }
    out
}

/// The module `z / b` with the induced action, for sigma-stable `b <= z`.
fn quotient_module(sigma: &BitMatrix, z: &Subspace, b: &Subspace) -> C2Module {
    let (reps, coords) = quotient_coords(z, b);
    let cols: Vec<BitVec> = reps.iter().map(|r| coords.coords_in_span(&sigma.mul_vec(r)).slice(0..reps.len())).collect();
    C2Module::new(BitMatrix::from_cols(reps.len(), &cols)).expect("induced involution")
}

fn quotient_coords(z: &Subspace, b: &Subspace) -> (Vec<BitVec>, Coordinates) {
    let reps = z.complement_in(b);
    let mut fam = reps.clone();
    fam.extend(b.vectors());
    let coords = Coordinates::new(z.ambient(), &fam).expect("independent family");
    (reps, coords)
}

/// Stable reduction `M -> ker(1+sigma) / im(1+sigma)` degreewise.
pub fn sta_complex(y: &Complex) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = y.range() else { return Ok(Complex::zero(CellKind::PlainF2)) };
    let parts: Vec<(Vec<BitVec>, Coordinates)> = y
        .terms()
        .iter()
        .map(|t| quotient_coords(&t.module().fixed_points(), &t.module().norm_image()))
        .collect();
    let terms = parts.iter().map(|(r, _)| pure0(C2Module::trivial(r.len()))).collect();
    let diffs = (lo + 1..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            let d = y.d(n);
            let (src, _) = &parts[k];
            let (tgt, tc) = &parts[k - 1];
            let cols: Vec<BitVec> =
                src.iter().map(|r| tc.coords_in_span(&d.mul_vec(r)).slice(0..tgt.len())).collect();
            BitMatrix::from_cols(tgt.len(), &cols)
        })
        .collect();
    Complex::new(CellKind::PlainF2, lo, terms, diffs)
}

/// Dimension of the Tate fold: `dim ker D - dim im D` for `D = d + (1 + sigma)`
/// on the direct sum of all terms.
pub fn tate_dim(y: &Complex) -> usize {
    let Some((lo, hi)) = y.range() else { return 0 };
    let offs: Vec<usize> = y
        .terms()
        .iter()
        .scan(0, |acc, t| {
            let o = *acc;
            *acc += t.dim();
            Some(o)
        })
        .collect();
    let total = y.total_dim();
    let mut op = BitMatrix::zeros(total, total);
    for (k, t) in y.terms().iter().enumerate() {
        op.paste(offs[k], offs[k], &t.module().norm());
    }
    for n in lo + 1..=hi {
        let k = (n - lo) as usize;
        op.paste(offs[k - 1], offs[k], &y.d(n));
    }
    total - 2 * op.rank()
}

/// Places a plain C2-complex in pure weight zero.
pub fn pwz(y: &Complex) -> Result<Complex, ChainError> {
    match y.kind() {
        CellKind::PlainC2 => Ok(y.with_kind(CellKind::Filtered)),
        k => Err(ChainError::KindMismatch(k, CellKind::PlainC2)),
    }
}

/// Places a plain chain map in pure weight zero.
pub fn pwz_map(f: &ChainMap) -> Result<ChainMap, ChainError> {
    match f.source().kind() {
        CellKind::PlainC2 => Ok(f.with_kind(CellKind::Filtered)),
        k => Err(ChainError::KindMismatch(k, CellKind::PlainC2)),
    }
}

/// Highest weight occurring in any term, if the complex is nonzero.
pub fn max_weight(x: &Complex) -> Option<i32> {
    x.terms().iter().filter(|t| !t.is_zero()).map(FiltModule::w_max).max()
}

/// Lowest weight occurring in any term, if the complex is nonzero.
pub fn min_weight(x: &Complex) -> Option<i32> {
    x.terms().iter().filter(|t| !t.is_zero()).map(FiltModule::w_min).min()
}

/// Weight-zero parts degreewise, with induced differentials.
pub fn weight_zero_complex(x: &Complex) -> Result<Complex, ChainError> {
    let Some((lo, hi)) = x.range() else { return Ok(Complex::zero(CellKind::PlainC2)) };
    let parts: Vec<_> = x.terms().iter().map(|t| t.weight_part(0)).collect();
    let terms = parts.iter().map(|p| pure0(p.module.clone())).collect();
    let diffs = (lo + 1..=hi)
        .map(|n| {
            let k = (n - lo) as usize;
            parts[k].induced(&x.d(n), &parts[k - 1])
        })
        .collect();
    Complex::new(CellKind::PlainC2, lo, terms, diffs)
}

/// Right-derived weight-zero part: the weight-zero parts of
/// `injres_trunc(J) (x) x` with `J` one more than the highest weight.
pub fn rwz(x: &Complex) -> Result<Complex, ChainError> {
    let j = match max_weight(x) {
        Some(w) if w >= 0 => (w + 1) as u32,
        _ => return Ok(Complex::zero(CellKind::PlainC2)),
    };
    weight_zero_complex(&named::injres_trunc(j).tensor(x)?)
}

/// The twisted forgetful functor, returned minimized: twist into effective
/// weights by `n`, apply `rwz`, then untwist by tensoring with `L^n`.
pub fn tfgt(x: &Complex) -> Result<Complex, ChainError> {
    let Some(wmin) = min_weight(x) else { return Ok(Complex::zero(CellKind::PlainC2)) };
    let n = (-wmin).max(0);
    let r = minimize(&rwz(&x.twist(n)?)?)?.complex;
    Ok(minimize(&r.tensor(&named::invertpur_pow(n))?)?.complex)
}

/// Dimensions of derived homs `x -> y[n]`, indexed by `n`, computed as the
/// homology of the hom complex from `x` into `injres_trunc(J) (x) y`.
pub fn hom_de(x: &Complex, y: &Complex) -> Result<GradedDims, ChainError> {
    let j = match max_weight(&x.dual().tensor(y)?) {
        Some(w) if w >= 0 => (w + 1) as u32,
        _ => return Ok(GradedDims::default()),
    };
    let z = named::injres_trunc(j).tensor(y)?;
    let hc = hom_complex_ranks(x, &z);
    let mut out = GradedDims::default();
    for (k, (dim, _)) in &hc {
        let r_out = hc.get(k).map_or(0, |e| e.1);
        let r_in = hc.get(&(k + 1)).map_or(0, |e| e.1);
        out.insert(-k, dim - r_out - r_in);
    }
    Ok(out)
}

/// For each degree `k` of the hom complex `Hom(x, z)`: its dimension and the
/// rank of `D: Hom_k -> Hom_{k-1}`, `D f = d f + f d`.
fn hom_complex_ranks(x: &Complex, z: &Complex) -> BTreeMap<i32, (usize, usize)> {
    let mut out = BTreeMap::new();
    let (Some((xl, xh)), Some((zl, zh))) = (x.range(), z.range()) else { return out };
    // Per degree k: list of (p, basis of Hom(x_p, z_{p+k})).
    let bases = |k: i32| -> Vec<(i32, Vec<BitMatrix>)> {
        (xl..=xh)
            .filter(|p| (zl..=zh).contains(&(p + k)))
            .map(|p| (p, hom_space(x.term(p).expect("in range"), z.term(p + k).expect("in range"))))
            .collect()
    };
    let flat = |blocks: &[(i32, Vec<BitMatrix>)], k: i32, comps: &BTreeMap<i32, BitMatrix>| -> BitVec {
        let mut v = Vec::new();
        for (p, _) in blocks {
            let m = comps.get(p).cloned().unwrap_or_else(|| BitMatrix::zeros(z.dim_at(p + k), x.dim_at(*p)));
            for i in 0..m.rows() {
                for jj in 0..m.cols() {
                    v.push(m.get(i, jj));
                }
            }
        }
        BitVec::from_bools(&v)
    };
    for k in (zl - xh)..=(zh - xl) {
        let src = bases(k);
        let dim: usize = src.iter().map(|(_, b)| b.len()).sum();
        if dim == 0 {
            out.insert(k, (0, 0));
            continue;
        }
        let tgt = bases(k - 1);
        let mut cols = Vec::new();
        for (p, basis) in &src {
            for f in basis {
                let mut comps = BTreeMap::new();
                // d_z f lands in component p of degree k-1.
                if (zl..=zh).contains(&(p + k - 1)) {
                    comps.insert(*p, z.d(p + k).mul(f));
                }
                // f d_x lands in component p+1 of degree k-1.
                if *p < xh {
                    let e = comps
                        .entry(p + 1)
                        .or_insert_with(|| BitMatrix::zeros(z.dim_at(p + k), x.dim_at(p + 1)));
                    e.add_assign(&f.mul(&x.d(p + 1)));
                }
                cols.push(flat(&tgt, k - 1, &comps));
            }
        }
        let len = cols.first().map_or(0, BitVec::len);
        let rank = if len == 0 { 0 } else { BitMatrix::from_cols(len, &cols).rank() };
        out.insert(k, (dim, rank));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::named::*;
    use crate::chains::{find_chain_iso, is_contractible};
    use crate::filtmod::{FormalSum, IndecLabel::*};

    #[test]
    fn gr_of_fund0_is_fundpur() {
        assert_eq!(gr_complex(&fund0()).unwrap(), fundpur());
        assert_eq!(fgt_complex(&fund0()).unwrap(), fundpur());
        assert_eq!(gr_complex(&pwz(&fundpur()).unwrap()).unwrap(), fundpur());
    }

    #[test]
    fn gr_of_e1_is_two_lines() {
        let g = gr_complex(&e(1, 0)).unwrap();
        assert_eq!(g.dim_at(0), 2);
        assert_eq!(g.terms()[0].module().split(), (2, 0));
    }

    #[test]
    fn homology_examples() {
        assert!(homology(&fundpur()).is_empty());
        assert_eq!(homology(&Complex::plain(C2Module::regular(), 0)), vec![(0, (0, 1))]);
    }

    #[test]
    fn exactness_examples() {
        assert!(is_exact_f2(&res_complex(&fundpur()).unwrap()));
        assert!(!is_exact_f2(&res_complex(&Complex::unit(CellKind::PlainC2)).unwrap()));
        assert!(is_exact_f2(&Complex::zero(CellKind::PlainF2)));
    }

    #[test]
    fn sta_examples() {
        assert!(sta_complex(&Complex::plain(C2Module::regular(), 0)).unwrap().is_zero());
        let s = sta_complex(&fundpur()).unwrap();
        // The projective middle term is stably zero.
        assert_eq!((s.dim_at(2), s.dim_at(1), s.dim_at(0)), (1, 0, 1));
        assert!(!is_exact_f2(&s));
    }

    #[test]
    fn tate_examples() {
        assert_eq!(tate_dim(&Complex::unit(CellKind::PlainC2)), 1);
        assert_eq!(tate_dim(&Complex::plain(C2Module::regular(), 0)), 0);
        assert_eq!(tate_dim(&fundpur()), 0);
    }

    #[test]
    fn rwz_examples() {
        assert_eq!(rwz(&unit(0)).unwrap(), Complex::unit(CellKind::PlainC2));
        assert!(rwz(&unit(-1)).unwrap().is_zero());
        for l in 1..=3u32 {
            let m = minimize(&rwz(&e(l, 0)).unwrap()).unwrap().complex;
            let expect = Complex::plain(C2Module::regular(), 0)
                .direct_sum(&fundpur_pow(l as i32 - 1).shift(-(l as i32)))
                .unwrap();
            let expect = minimize(&expect).unwrap().complex;
            assert!(find_chain_iso(&m, &expect, 1).is_some(), "l = {l}");
        }
    }

    #[test]
    fn tfgt_examples() {
        for m in -2..=2 {
            let t = tfgt(&unit(m)).unwrap();
            assert!(find_chain_iso(&t, &invertpur_pow(-m), 3).is_some(), "m = {m}");
        }
        let t = tfgt(&cone_beta()).unwrap();
        assert!(find_chain_iso(&t, &fundpur().shift(-1), 3).is_some());
        let t = tfgt(&e(1, 0)).unwrap();
        assert_eq!(t.signature().unwrap(), vec![(0, FormalSum::new(vec![E(0, 0)]))]);
    }

    #[test]
    fn hom_de_unit_twists() {
        for m in -1..=4 {
            let h = hom_de(&unit(0), &unit(m)).unwrap();
            for n in -2..=6 {
                let expect = usize::from(0 <= n && n <= m);
                assert_eq!(h.get(n), expect, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn gr_of_admissible_sequence_is_contractible() {
        assert!(is_contractible(&gr_complex(&fund_l(1)).unwrap()).unwrap());
    }

    #[test]
    fn weight_zero_piece_of_map() {
        let f = eta();
        let g = gr_weight_map(&f, 0).unwrap();
        assert_eq!(g.comp(0), eta_matrix());
    }
}
