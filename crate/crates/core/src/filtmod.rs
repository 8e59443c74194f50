//! Filtered F2[C2]-modules.
//!
//! A filtered module is a C2-module `A` with a finite decreasing chain of
//! sigma-stable subspaces `A^w`, indexed by integer weights. Weight ranges are
//! stored tight: `A^{w_min}` is the whole space, `A^{w_max}` is nonzero and
//! `A^{w_max + 1}` is zero. The zero module has the empty range `[0, -1]`.
//!
//! The indecomposables are the unit lines `1(n)` and the regular modules
//! `E(l, m)`, whose fixed line `1 + sigma` is pushed `l` steps above weight `m`.

use std::cmp::{max, min};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec, C2Module, Coordinates, Gf2Error, Subspace};

/// Errors raised by the filtered-module layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltError {
    /// Linear algebra failure.
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    /// A layer is not stable under sigma.
    #[error("layer at weight {0} is not sigma-stable")]
    NotStable(i32),
    /// Layers fail to decrease.
    #[error("layer at weight {0} is not contained in the previous layer")]
    NotDecreasing(i32),
    /// A matrix is not a morphism of filtered modules.
    #[error("matrix is not a filtered equivariant map")]
    NotMorphism,
    /// Two morphisms cannot be composed.
    #[error("morphisms are not composable")]
    NotComposable,
    /// Greedy decomposition failed to find a summand; indicates an engine bug.
    #[error("no summand found on nonzero module")]
    NoSummand,
    /// The decomposition certificate failed validation; indicates an engine bug.
    #[error("decomposition certificate failed validation")]
    BadCertificate,
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

/// An indecomposable filtered module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndecLabel {
    /// The trivial line pure of weight `n`.
    Unit(i32),
    /// `kC2` in weights `<= m` with its fixed line extending up to weight `m + l`.
    E(u32, i32),
}

impl IndecLabel {
    /// Dimension of the underlying vector space.
    pub fn dim(&self) -> usize {
        match self {
            IndecLabel::Unit(_) => 1,
            IndecLabel::E(..) => 2,
        }
    }

    /// The label of the twist by `r`.
    pub fn twist(&self, r: i32) -> IndecLabel {
        match *self {
            IndecLabel::Unit(n) => IndecLabel::Unit(n + r),
            IndecLabel::E(l, m) => IndecLabel::E(l, m + r),
        }
    }
}

impl fmt::Display for IndecLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndecLabel::Unit(n) => write!(f, "1({n})"),
            IndecLabel::E(l, m) => write!(f, "E({l},{m})"),
        }
    }
}

/// A finite multiset of indecomposables, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormalSum {
    labels: Vec<IndecLabel>,
}

impl FormalSum {
    /// Sorts the given labels into canonical order.
    pub fn new(mut labels: Vec<IndecLabel>) -> Self {
        labels.sort();
        Self { labels }
    }

    /// The empty sum, i.e. the zero object.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The labels in canonical order.
    pub fn labels(&self) -> &[IndecLabel] {
        &self.labels
    }

    /// True for the zero object.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of summands.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.labels.iter().map(IndecLabel::dim).sum()
    }

    /// Multiset union.
    pub fn union(&self, other: &FormalSum) -> FormalSum {
        let mut l = self.labels.clone();
        l.extend_from_slice(&other.labels);
        Self::new(l)
    }

    /// Twists every summand.
    pub fn twist(&self, r: i32) -> FormalSum {
        Self::new(self.labels.iter().map(|l| l.twist(r)).collect())
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            return f.write_str("0");
        }
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<IndecLabel> for FormalSum {
    fn from_iter<T: IntoIterator<Item = IndecLabel>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

// ---------------------------------------------------------------------------
// FiltModule
// ---------------------------------------------------------------------------

/// A filtered F2[C2]-module with a tight weight range.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FiltModule {
    module: C2Module,
    w_min: i32,
    /// `layers[i]` is `A^{w_min + i}`; the first is whole and the last is zero.
    layers: Vec<Subspace>,
}

impl FiltModule {
    /// Builds a filtered module from explicit layers.
    ///
    /// `A^w` is the whole space for `w < lo`, `layers[w - lo]` for
    /// `lo <= w < lo + layers.len()`, and zero above. Layers must be
    /// sigma-stable and decreasing. The stored range is tightened.
    pub fn from_layers(module: C2Module, lo: i32, layers: Vec<Subspace>) -> Result<Self, FiltError> {
        let n = module.dim();
        let mut prev = Subspace::whole(n);
        for (i, l) in layers.iter().enumerate() {
            let w = lo + i as i32;
            if l.ambient() != n {
                return Err(Gf2Error::AmbientMismatch(l.ambient(), n).into());
            }
            if !l.is_stable_under(module.sigma()) {
                return Err(FiltError::NotStable(w));
            }
            if !l.is_subspace_of(&prev) {
                return Err(FiltError::NotDecreasing(w));
            }
            prev = l.clone();
        }
        Ok(Self::tighten(module, lo, layers))
    }

    fn tighten(module: C2Module, lo: i32, layers: Vec<Subspace>) -> Self {
        let n = module.dim();
        if n == 0 {
            return Self::zero_of(module);
        }
        let layer = |w: i32| -> Subspace {
            if w < lo {
                Subspace::whole(n)
            } else {
                layers.get((w - lo) as usize).cloned().unwrap_or_else(|| Subspace::zero(n))
            }
        };
        let top = lo + layers.len() as i32;
        let w_max = (lo - 1..top).rev().find(|&w| !layer(w).is_zero()).expect("layer below lo is whole");
        let w_min = (lo - 1..=w_max).rev().find(|&w| layer(w).is_whole()).expect("layer below lo is whole");
        let layers = (w_min..=w_max + 1).map(layer).collect();
        Self { module, w_min, layers }
    }

    fn zero_of(module: C2Module) -> Self {
        debug_assert_eq!(module.dim(), 0);
        Self { module, w_min: 0, layers: vec![Subspace::zero(0)] }
    }

    /// The zero module.
    pub fn zero() -> Self {
        Self::zero_of(C2Module::zero())
    }

    /// A module pure of weight `w`: `A^v` is whole for `v <= w` and zero above.
    pub fn pure(module: C2Module, w: i32) -> Self {
        let n = module.dim();
        Self::tighten(module, w, vec![Subspace::whole(n), Subspace::zero(n)])
    }

    /// The underlying C2-module (forgetful functor).
    pub fn module(&self) -> &C2Module {
        &self.module
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// True for the zero module.
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Lowest weight with a nonzero graded piece (`0` for the zero module).
    pub fn w_min(&self) -> i32 {
        self.w_min
    }

    /// Highest weight with a nonzero graded piece (`-1` for the zero module).
    pub fn w_max(&self) -> i32 {
        self.w_min + self.layers.len() as i32 - 2
    }

    /// The layer `A^w`.
    pub fn layer(&self, w: i32) -> Subspace {
        let n = self.dim();
        if w <= self.w_min {
            Subspace::whole(n)
        } else if w > self.w_max() {
            Subspace::zero(n)
        } else {
            self.layers[(w - self.w_min) as usize].clone()
        }
    }

    fn layer_ref(&self, w: i32) -> Option<&Subspace> {
        if w < self.w_min || w > self.w_max() + 1 {
            None
        } else {
            Some(&self.layers[(w - self.w_min) as usize])
        }
    }

    /// True if the module is pure of a single weight (or zero).
    pub fn is_pure(&self) -> bool {
        self.w_min >= self.w_max()
    }

    /// True if every graded piece sits in weight `>= 0`.
    pub fn is_effective(&self) -> bool {
        self.is_zero() || self.w_min >= 0
    }

    /// The canonical realization of an indecomposable.
    pub fn realize(label: IndecLabel) -> FiltModule {
        match label {
            IndecLabel::Unit(n) => Self::pure(C2Module::trivial(1), n),
            IndecLabel::E(l, m) => {
                let norm_line = Subspace::span(2, &[BitVec::from_bit_str("11")]);
                let mut layers = vec![Subspace::whole(2)];
                layers.extend(std::iter::repeat_n(norm_line, l as usize));
                layers.push(Subspace::zero(2));
                Self { module: C2Module::regular(), w_min: m, layers }
            }
        }
    }

    /// The direct sum of the realizations, in the canonical label order.
    pub fn realize_sum(sum: &FormalSum) -> FiltModule {
        sum.labels().iter().fold(Self::zero(), |acc, l| acc.direct_sum(&Self::realize(*l)))
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &FiltModule) -> FiltModule {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = min(self.w_min, other.w_min);
        let hi = max(self.w_max(), other.w_max()) + 1;
        let layers = (lo..=hi).map(|w| self.layer(w).direct_sum(&other.layer(w))).collect();
        Self::tighten(self.module.direct_sum(&other.module), lo, layers)
    }

    /// Tensor product: `(A (x) B)^n = sum over p + q = n of A^p (x) B^q`.
    pub fn tensor(&self, other: &FiltModule) -> FiltModule {
        let module = self.module.tensor(&other.module);
        if self.is_zero() || other.is_zero() {
            return Self::zero_of(module);
        }
        let lo = self.w_min + other.w_min;
        let hi = self.w_max() + other.w_max() + 1;
        let amb = module.dim();
        let layers = (lo..=hi)
            .map(|n| {
                let mut acc = Subspace::zero(amb);
                for p in self.w_min..=self.w_max() {
                    let q = other.layer(n - p);
                    if q.is_zero() {
                        continue;
                    }
                    acc = acc.sum(&self.layer(p).kron(&q)).expect("same ambient");
                }
                acc
            })
            .collect();
        Self::tighten(module, lo, layers)
    }

    /// Dual: `(A^v)^n` is the annihilator of `A^{1 - n}` inside the dual space.
    pub fn dual(&self) -> FiltModule {
        let module = self.module.dual();
        if self.is_zero() {
            return Self::zero_of(module);
        }
        let lo = -self.w_max() - 1;
        let hi = -self.w_min + 1;
        let layers = (lo..=hi).map(|n| self.layer(1 - n).annihilator()).collect();
        Self::tighten(module, lo, layers)
    }

    /// Twist: `A(r)^n = A^{n - r}`.
    pub fn twist(&self, r: i32) -> FiltModule {
        if self.is_zero() {
            return self.clone();
        }
        Self { module: self.module.clone(), w_min: self.w_min + r, layers: self.layers.clone() }
    }

    /// The same underlying module placed in pure weight `w`.
    pub fn repure(&self, w: i32) -> FiltModule {
        Self::pure(self.module.clone(), w)
    }

    /// The weight-`m` part `A^m` as a C2-module, with its basis (in ambient coordinates).
    pub fn weight_part(&self, m: i32) -> WeightPart {
        WeightPart::new(self, m)
    }

    /// The filtered submodule `A^{>= m}`: underlying `A^m` with layers `A^{max(w, m)}`.
    pub fn weight_ge(&self, m: i32) -> FiltModule {
        let part = self.weight_part(m);
        let basis = part.basis_columns();
        let lo = m;
        let hi = max(self.w_max() + 1, m);
        let layers = (lo..=hi).map(|w| self.layer(w).preimage(&basis)).collect();
        Self::tighten(part.module.clone(), lo, layers)
    }

    /// Graded pieces `gr^w = A^w / A^{w+1}` over the weight range.
    pub fn gr(&self) -> Vec<(i32, C2Module)> {
        self.graded().pieces.iter().map(|p| (p.weight, p.module.clone())).collect()
    }

    /// Graded pieces with the data needed to transport maps.
    pub fn graded(&self) -> Graded {
        Graded::new(self)
    }

    /// True if `m` is an equivariant map `self -> target` preserving all layers.
    pub fn is_morphism_to(&self, target: &FiltModule, m: &BitMatrix) -> bool {
        if m.shape() != (target.dim(), self.dim()) {
            return false;
        }
        if !self.module.is_equivariant(m, &target.module) {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        (self.w_min..=self.w_max()).all(|w| self.layer(w).image(m).is_subspace_of(&target.layer(w)))
    }

    /// The filtered module structure transported along an invertible matrix `p`
    /// (so that `p` becomes an isomorphism `self -> result`).
    pub fn transport(&self, p: &BitMatrix) -> FiltModule {
        let pinv = p.inverse().expect("transport needs an invertible matrix");
        let sigma = p.mul(self.module.sigma()).mul(&pinv);
        let layers = self.layers.iter().map(|l| l.image(p)).collect();
        Self { module: C2Module::new(sigma).expect("conjugate of an involution"), w_min: self.w_min, layers }
    }

    /// The filtered submodule on a sigma-stable subspace, in the coordinates of
    /// the given basis vectors.
    pub fn restrict(&self, basis: &[BitVec]) -> FiltModule {
        let module = self.module.restrict(basis);
        if basis.is_empty() {
            return Self::zero_of(module);
        }
        let b = BitMatrix::from_cols(self.dim(), basis);
        let layers = self.layers.iter().map(|l| l.preimage(&b)).collect();
        Self::tighten(module, self.w_min, layers)
    }

    /// Raw layer list (`A^{w_min}` through `A^{w_max + 1}`).
    pub fn layers(&self) -> &[Subspace] {
        &self.layers
    }
}

/// The canonical realization of a label.
pub fn realize(label: IndecLabel) -> FiltModule {
    FiltModule::realize(label)
}

/// Tensor product of filtered modules.
pub fn tensor(a: &FiltModule, b: &FiltModule) -> FiltModule {
    a.tensor(b)
}

/// Dual filtered module.
pub fn dual(a: &FiltModule) -> FiltModule {
    a.dual()
}

/// Twist by `r`.
pub fn twist(a: &FiltModule, r: i32) -> FiltModule {
    a.twist(r)
}

/// Underlying C2-module.
pub fn fgt(a: &FiltModule) -> C2Module {
    a.module().clone()
}

/// Weight-`m` part as a C2-module.
pub fn weight_part(a: &FiltModule, m: i32) -> C2Module {
    a.weight_part(m).module
}

/// Filtered submodule of weights at least `m`.
pub fn weight_ge(a: &FiltModule, m: i32) -> FiltModule {
    a.weight_ge(m)
}

/// Graded pieces over the weight range.
pub fn gr(a: &FiltModule) -> Vec<(i32, C2Module)> {
    a.gr()
}

/// True if the module is concentrated in weights `>= 0`.
pub fn is_effective(a: &FiltModule) -> bool {
    a.is_effective()
}

// ---------------------------------------------------------------------------
// Weight parts and graded pieces
// ---------------------------------------------------------------------------

/// The subspace `A^m` with its induced C2-action.
#[derive(Clone, Debug)]
pub struct WeightPart {
    /// Weight index.
    pub weight: i32,
    /// Basis vectors of `A^m` in ambient coordinates.
    pub basis: Vec<BitVec>,
    /// Induced module structure in that basis.
    pub module: C2Module,
    ambient: usize,
    coords: Coordinates,
}

impl WeightPart {
    fn new(a: &FiltModule, m: i32) -> Self {
        let basis = a.layer(m).vectors();
        let module = a.module().restrict(&basis);
        let coords = Coordinates::new(a.dim(), &basis).expect("echelon basis is independent");
        Self { weight: m, basis, module, ambient: a.dim(), coords }
    }

    /// Basis as the columns of an `ambient x dim` matrix.
    pub fn basis_columns(&self) -> BitMatrix {
        BitMatrix::from_cols(self.ambient, &self.basis)
    }

    /// The map induced by a filtered morphism `f: A -> B` on weight parts.
    pub fn induced(&self, f: &BitMatrix, target: &WeightPart) -> BitMatrix {
        let cols: Vec<BitVec> = self.basis.iter().map(|b| target.coords.coords_in_span(&f.mul_vec(b))).collect();
        BitMatrix::from_cols(target.basis.len(), &cols)
    }
}

/// One graded piece `A^w / A^{w+1}`.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    /// Weight index.
    pub weight: i32,
    /// Representatives of a basis of the quotient, in ambient coordinates.
    pub reps: Vec<BitVec>,
    /// Induced module structure.
    pub module: C2Module,
    /// Coordinates over `reps ++ basis(A^{w+1})`.
    coords: Coordinates,
}

impl GradedPiece {
    /// Coordinates of `x in A^w` modulo `A^{w+1}`.
    pub fn quotient_coords(&self, x: &BitVec) -> BitVec {
        self.coords.coords_in_span(x).slice(0..self.reps.len())
    }
}

/// All graded pieces of a filtered module.
#[derive(Clone, Debug)]
pub struct Graded {
    /// Pieces in increasing weight, one per weight of the range.
    pub pieces: Vec<GradedPiece>,
}

impl Graded {
    fn new(a: &FiltModule) -> Self {
        let mut pieces = Vec::new();
        if a.is_zero() {
            return Self { pieces };
        }
        for w in a.w_min()..=a.w_max() {
            let upper = a.layer_ref(w).expect("in range");
            let lower = a.layer_ref(w + 1).expect("in range");
            let reps = upper.complement_in(lower);
            let mut fam = reps.clone();
            fam.extend(lower.vectors());
            let coords = Coordinates::new(a.dim(), &fam).expect("complement plus basis is independent");
            let sigma = a.module().sigma();
            let cols: Vec<BitVec> =
                reps.iter().map(|r| coords.coords_in_span(&sigma.mul_vec(r)).slice(0..reps.len())).collect();
            let module = C2Module::new(BitMatrix::from_cols(reps.len(), &cols)).expect("induced involution");
            pieces.push(GradedPiece { weight: w, reps, module, coords });
        }
        Self { pieces }
    }

    /// The piece of weight `w`, if inside the range.
    pub fn piece(&self, w: i32) -> Option<&GradedPiece> {
        self.pieces.iter().find(|p| p.weight == w)
    }

    /// The total graded module `(+)_w gr^w`, in increasing weight.
    pub fn total(&self) -> C2Module {
        self.pieces.iter().fold(C2Module::zero(), |acc, p| acc.direct_sum(&p.module))
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.pieces.iter().map(|p| p.reps.len()).sum()
    }

    /// The matrix `gr^w(f)` of a filtered map `f: A -> B` on one weight.
    pub fn induced_piece(&self, w: i32, f: &BitMatrix, target: &Graded) -> BitMatrix {
        let (Some(src), Some(tgt)) = (self.piece(w), target.piece(w)) else {
            let r = target.piece(w).map_or(0, |p| p.reps.len());
            let c = self.piece(w).map_or(0, |p| p.reps.len());
            return BitMatrix::zeros(r, c);
        };
        let cols: Vec<BitVec> = src.reps.iter().map(|r| tgt.quotient_coords(&f.mul_vec(r))).collect();
        BitMatrix::from_cols(tgt.reps.len(), &cols)
    }

    /// The matrix `gr(f)` on the total graded modules.
    pub fn induced_total(&self, f: &BitMatrix, target: &Graded) -> BitMatrix {
        let mut out = BitMatrix::zeros(target.dim(), self.dim());
        let mut col = 0;
        for p in &self.pieces {
            let block = self.induced_piece(p.weight, f, target);
            if let Some(row) = target.offset(p.weight) {
                out.paste(row, col, &block);
            }
            col += p.reps.len();
        }
        out
    }

    fn offset(&self, w: i32) -> Option<usize> {
        let mut off = 0;
        for p in &self.pieces {
            if p.weight == w {
                return Some(off);
            }
            off += p.reps.len();
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

/// A morphism of filtered modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltMorphism {
    source: FiltModule,
    target: FiltModule,
    matrix: BitMatrix,
}

impl FiltMorphism {
    /// Validates that `matrix` is equivariant and preserves every layer.
    pub fn new(source: FiltModule, target: FiltModule, matrix: BitMatrix) -> Result<Self, FiltError> {
        if !source.is_morphism_to(&target, &matrix) {
            return Err(FiltError::NotMorphism);
        }
        Ok(Self { source, target, matrix })
    }

    /// Identity morphism.
    pub fn identity(a: &FiltModule) -> Self {
        Self { source: a.clone(), target: a.clone(), matrix: BitMatrix::identity(a.dim()) }
    }

    /// Source object.
    pub fn source(&self) -> &FiltModule {
        &self.source
    }

    /// Target object.
    pub fn target(&self) -> &FiltModule {
        &self.target
    }

    /// Matrix in the chosen bases.
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Composite `self` after `first`.
    pub fn compose(&self, first: &FiltMorphism) -> Result<FiltMorphism, FiltError> {
        if first.target != self.source {
            return Err(FiltError::NotComposable);
        }
        Ok(Self { source: first.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&first.matrix) })
    }

    /// Tensor product of morphisms.
    pub fn tensor(&self, other: &FiltMorphism) -> FiltMorphism {
        Self {
            source: self.source.tensor(&other.source),
            target: self.target.tensor(&other.target),
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// True if the matrix is invertible (then the inverse is filtered as well
    /// exactly when the layers match, which `is_iso` checks).
    pub fn is_iso(&self) -> bool {
        let Some(inv) = self.matrix.inverse() else { return false };
        self.target.is_morphism_to(&self.source, &inv)
    }
}

/// The identity of the underlying module, viewed as `beta: A -> A(1)`.
pub fn beta_map(a: &FiltModule) -> FiltMorphism {
    FiltMorphism { source: a.clone(), target: a.twist(1), matrix: BitMatrix::identity(a.dim()) }
}

/// A basis of all equivariant, filtration-preserving matrices `a -> b`.
pub fn hom_space(a: &FiltModule, b: &FiltModule) -> Vec<BitMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let unknowns = na * nb;
    if unknowns == 0 {
        return Vec::new();
    }
    let idx = |i: usize, j: usize| i * na + j;
    let mut eqs: Vec<BitVec> = Vec::new();
    let sa = a.module().sigma();
    let sb = b.module().sigma();
    // sigma_b X + X sigma_a = 0, entry (i, j).
    if !(sa.is_identity() && sb.is_identity()) {
        for i in 0..nb {
            for j in 0..na {
                let mut row = BitVec::zeros(unknowns);
                for k in 0..nb {
                    if sb.get(i, k) {
                        row.flip(idx(k, j));
                    }
                }
                for k in 0..na {
                    if sa.get(k, j) {
                        row.flip(idx(i, k));
                    }
                }
                if !row.is_zero() {
                    eqs.push(row);
                }
            }
        }
    }
    // X(A^w) inside B^w, tested against the annihilator of B^w.
    if !a.is_zero() {
        for w in a.w_min()..=a.w_max() {
            let tgt = b.layer(w);
            if tgt.is_whole() {
                continue;
            }
            let ann = tgt.annihilator().vectors();
            for v in a.layer(w).vectors() {
                for p in &ann {
                    let mut row = BitVec::zeros(unknowns);
                    for i in p.ones() {
                        for j in v.ones() {
                            row.flip(idx(i, j));
                        }
                    }
                    eqs.push(row);
                }
            }
        }
    }
    let ker = if eqs.is_empty() { BitMatrix::identity(unknowns) } else { BitMatrix::from_rows(unknowns, &eqs).kernel() };
    (0..ker.rows())
        .map(|r| {
            let v = ker.row(r);
            BitMatrix::from_fn(nb, na, |i, j| v.get(idx(i, j)))
        })
        .collect()
}

/// A basis of the space of filtered morphisms `a -> b`.
pub fn hom_basis(a: &FiltModule, b: &FiltModule) -> Vec<FiltMorphism> {
    hom_space(a, b)
        .into_iter()
        .map(|m| FiltMorphism { source: a.clone(), target: b.clone(), matrix: m })
        .collect()
}

// ---------------------------------------------------------------------------
// Krull-Schmidt decomposition
// ---------------------------------------------------------------------------

/// A decomposition into indecomposables with a certified isomorphism.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// The summands.
    pub sum: FormalSum,
    /// Invertible filtered matrix `realize_sum(sum) -> a`.
    pub iso: BitMatrix,
}

impl Decomposition {
    /// Checks that `iso` is a filtered isomorphism from the realized sum onto `a`.
    pub fn validate(&self, a: &FiltModule) -> bool {
        let src = FiltModule::realize_sum(&self.sum);
        let Some(inv) = self.iso.inverse() else { return false };
        src.is_morphism_to(a, &self.iso) && a.is_morphism_to(&src, &inv)
    }
}

/// Candidate summands for a module with the given weight range.
fn candidates(w_min: i32, w_max: i32) -> Vec<IndecLabel> {
    let mut out = Vec::new();
    for n in w_min..=w_max {
        out.push(IndecLabel::Unit(n));
    }
    for m in w_min..=w_max {
        for l in 0..=(w_max - m) {
            out.push(IndecLabel::E(l as u32, m));
        }
    }
    out
}

/// Splits off one copy of `label` if it is a summand: returns the injection
/// `f` and retraction `r` with `r f` invertible.
fn find_summand(a: &FiltModule, label: IndecLabel) -> Option<(BitMatrix, BitMatrix)> {
    let i = FiltModule::realize(label);
    let fs = hom_space(&i, a);
    if fs.is_empty() {
        return None;
    }
    let rs = hom_space(a, &i);
    for f in &fs {
        for r in &rs {
            if r.mul(f).is_invertible() {
                return Some((f.clone(), r.clone()));
            }
        }
    }
    None
}

/// Krull-Schmidt decomposition by greedy peeling of summands.
///
/// A candidate `I` is a summand exactly when some basis pair `f: I -> A`,
/// `r: A -> I` has `r f` invertible, since the endomorphism rings are local
/// with residue field F2. Each summand found is split off along the
/// idempotent `f (r f)^{-1} r` and the search continues on `ker r`.
pub fn decompose(a: &FiltModule) -> Result<Decomposition, FiltError> {
    if a.is_pure() {
        return Ok(decompose_pure(a));
    }
    let cands = candidates(a.w_min(), a.w_max());
    let mut found: Vec<(IndecLabel, BitMatrix)> = Vec::new();
    let mut current = a.clone();
    let mut embed = BitMatrix::identity(a.dim());
    let mut start = 0;
    while !current.is_zero() {
        let mut hit = None;
        while start < cands.len() {
            if let Some(pair) = find_summand(&current, cands[start]) {
                hit = Some((cands[start], pair));
                break;
            }
            start += 1;
        }
        let Some((label, (f, r))) = hit else { return Err(FiltError::NoSummand) };
        found.push((label, embed.mul(&f)));
        let ker = Subspace::kernel_of(&r).vectors();
        let kb = BitMatrix::from_cols(current.dim(), &ker);
        current = current.restrict(&ker);
        embed = embed.mul(&kb);
    }
    found.sort_by_key(|x| x.0);
    let sum = FormalSum::new(found.iter().map(|(l, _)| *l).collect());
    let iso = found.iter().fold(BitMatrix::zeros(a.dim(), 0), |acc, (_, c)| acc.hstack(c));
    let d = Decomposition { sum, iso };
    if !d.validate(a) {
        return Err(FiltError::BadCertificate);
    }
    Ok(d)
}

/// Pure modules split by the C2-module structure alone.
fn decompose_pure(a: &FiltModule) -> Decomposition {
    let w = a.w_min();
    let (p, na, nb) = a.module().adapted_basis();
    let mut labels = vec![IndecLabel::Unit(w); na];
    labels.extend(std::iter::repeat_n(IndecLabel::E(0, w), nb));
    Decomposition { sum: FormalSum::new(labels), iso: p }
}

/// True if `(f, g)` is admissible: `g f = 0` and every graded sequence
/// `gr^w(A) -> gr^w(B) -> gr^w(C)` is split exact as C2-modules.
pub fn is_admissible(f: &FiltMorphism, g: &FiltMorphism) -> Result<bool, FiltError> {
    if f.target() != g.source() {
        return Err(FiltError::NotComposable);
    }
    if !g.matrix().mul(f.matrix()).is_zero() {
        return Ok(false);
    }
    let (ga, gb, gc) = (f.source().graded(), f.target().graded(), g.target().graded());
    let lo = [f.source(), f.target(), g.target()].iter().filter(|m| !m.is_zero()).map(|m| m.w_min()).min();
    let hi = [f.source(), f.target(), g.target()].iter().filter(|m| !m.is_zero()).map(|m| m.w_max()).max();
    let (Some(lo), Some(hi)) = (lo, hi) else { return Ok(true) };
    for w in lo..=hi {
        let fw = ga.induced_piece(w, f.matrix(), &gb);
        let gw = gb.induced_piece(w, g.matrix(), &gc);
        let ma = ga.piece(w).map_or(C2Module::zero(), |p| p.module.clone());
        let mb = gb.piece(w).map_or(C2Module::zero(), |p| p.module.clone());
        let mc = gc.piece(w).map_or(C2Module::zero(), |p| p.module.clone());
        if !split_exact(&ma, &mb, &mc, &fw, &gw) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves jointly for equivariant `r: B -> A`, `s: C -> B` with
/// `r f = 1`, `g s = 1` and `f r + s g = 1`.
fn split_exact(a: &C2Module, b: &C2Module, c: &C2Module, f: &BitMatrix, g: &BitMatrix) -> bool {
    let pa = FiltModule::pure(a.clone(), 0);
    let pb = FiltModule::pure(b.clone(), 0);
    let pc = FiltModule::pure(c.clone(), 0);
    let rs = hom_space(&pb, &pa);
    let ss = hom_space(&pc, &pb);
    let (na, nb, nc) = (a.dim(), b.dim(), c.dim());
    let len = na * na + nc * nc + nb * nb;
    let flatten = |blocks: [&BitMatrix; 3]| -> BitVec {
        let mut v = BitVec::zeros(len);
        let mut off = 0;
        for m in blocks {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m.get(i, j) {
                        v.set(off + i * m.cols() + j, true);
                    }
                }
            }
            off += m.rows() * m.cols();
        }
        v
    };
    let mut cols = Vec::new();
    for r in &rs {
        cols.push(flatten([&r.mul(f), &BitMatrix::zeros(nc, nc), &f.mul(r)]));
    }
    for s in &ss {
        cols.push(flatten([&BitMatrix::zeros(na, na), &g.mul(s), &s.mul(g)]));
    }
    let rhs = flatten([&BitMatrix::identity(na), &BitMatrix::identity(nc), &BitMatrix::identity(nb)]);
    if cols.is_empty() {
        return rhs.is_zero();
    }
    let sys = BitMatrix::from_cols(len, &cols);
    matches!(sys.solve(&rhs), Ok(Some(_)))
}

/// True if every summand is `E(0, i)` or `E(1, j)`.
pub fn is_projective(a: &FiltModule) -> Result<bool, FiltError> {
    let d = decompose(a)?;
    Ok(d.sum.labels().iter().all(|l| matches!(l, IndecLabel::E(0, _) | IndecLabel::E(1, _))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use IndecLabel::{Unit, E};

    fn dec(a: &FiltModule) -> FormalSum {
        decompose(a).unwrap().sum
    }

    #[test]
    fn realize_shapes() {
        let u = realize(Unit(0));
        assert_eq!((u.dim(), u.w_min(), u.w_max()), (1, 0, 0));
        let e = realize(E(0, 3));
        assert!(e.is_pure());
        assert_eq!(e.w_min(), 3);
        let e2 = realize(E(2, 0));
        let line = Subspace::span(2, &[BitVec::from_bit_str("11")]);
        assert_eq!(e2.layer(0), Subspace::whole(2));
        assert_eq!(e2.layer(1), line);
        assert_eq!(e2.layer(2), line);
        assert!(e2.layer(3).is_zero());
    }

    #[test]
    fn hom_dimensions() {
        assert_eq!(hom_space(&realize(E(1, 0)), &realize(E(1, 0))).len(), 2);
        assert_eq!(hom_space(&realize(Unit(0)), &realize(Unit(1))).len(), 1);
        assert_eq!(hom_space(&realize(Unit(1)), &realize(Unit(0))).len(), 0);
    }

    #[test]
    fn tensor_examples() {
        let t = realize(Unit(2)).tensor(&realize(Unit(-5)));
        assert_eq!(t, realize(Unit(-3)));
        assert_eq!(dec(&realize(E(1, 0)).tensor(&realize(E(2, 0)))), FormalSum::new(vec![E(1, 0), E(1, 2)]));
        assert_eq!(dec(&realize(E(0, 0)).tensor(&realize(E(0, 0)))), FormalSum::new(vec![E(0, 0), E(0, 0)]));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(realize(Unit(4)).dual(), realize(Unit(-4)));
        assert_eq!(dec(&realize(E(3, 1)).dual()), FormalSum::new(vec![E(3, -4)]));
        let a = realize(E(2, 1)).direct_sum(&realize(Unit(0)));
        let g = a.gr();
        let gd = a.dual().gr();
        for (w, m) in &g {
            let dm = gd.iter().find(|(v, _)| *v == -w).map_or(0, |(_, m)| m.dim());
            assert_eq!(dm, m.dim());
        }
    }

    #[test]
    fn twist_and_beta() {
        assert_eq!(realize(Unit(0)).twist(1), realize(Unit(1)));
        let a = realize(E(2, -1)).direct_sum(&realize(Unit(3)));
        assert_eq!(a.twist(5).twist(-5), a);
        let b = beta_map(&realize(Unit(0)));
        let homs = hom_space(&realize(Unit(0)), &realize(Unit(1)));
        assert_eq!(homs, vec![b.matrix().clone()]);
    }

    #[test]
    fn graded_and_weight_parts() {
        let g = realize(E(1, 0)).gr();
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|(_, m)| m.split() == (1, 0)));
        let g0 = realize(E(0, 4)).gr();
        assert_eq!(g0, vec![(4, C2Module::regular())]);
        for m in -3..3 {
            let part = weight_part(&realize(E(1, m)), 0);
            let expect = if m >= 0 { (0, 1) } else if m == -1 { (1, 0) } else { (0, 0) };
            assert_eq!(part.split(), expect, "m = {m}");
        }
    }

    #[test]
    fn weight_ge_truncates() {
        let a = realize(E(2, 0));
        let t = a.weight_ge(1);
        assert_eq!(t.dim(), 1);
        assert_eq!((t.w_min(), t.w_max()), (2, 2));
        assert!(a.weight_ge(-4) == a);
    }

    #[test]
    fn decompose_after_basis_change() {
        let a = realize(E(2, 0)).direct_sum(&realize(Unit(1)));
        let p = BitMatrix::from_str_rows(&["110", "011", "001"]);
        let b = a.transport(&p);
        let d = decompose(&b).unwrap();
        assert!(d.validate(&b));
        assert_eq!(d.sum, FormalSum::new(vec![Unit(1), E(2, 0)]));
    }

    #[test]
    fn admissibility() {
        let l = 1;
        let eta = BitMatrix::from_str_rows(&["1", "1"]);
        let eps = BitMatrix::from_str_rows(&["11"]);
        let f = FiltMorphism::new(realize(Unit(l)), realize(E(l as u32, 0)), eta.clone()).unwrap();
        let g = FiltMorphism::new(realize(E(l as u32, 0)), realize(Unit(0)), eps.clone()).unwrap();
        assert!(is_admissible(&f, &g).unwrap());
        let f0 = FiltMorphism::new(realize(Unit(0)), realize(E(0, 0)), eta).unwrap();
        let g0 = FiltMorphism::new(realize(E(0, 0)), realize(Unit(0)), eps).unwrap();
        assert!(!is_admissible(&f0, &g0).unwrap());
        let a = realize(E(2, 1));
        let c = realize(Unit(-1));
        let ac = a.direct_sum(&c);
        let inc = FiltMorphism::new(a.clone(), ac.clone(), BitMatrix::from_str_rows(&["10", "01", "00"])).unwrap();
        let pr = FiltMorphism::new(ac, c, BitMatrix::from_str_rows(&["001"])).unwrap();
        assert!(is_admissible(&inc, &pr).unwrap());
    }

    #[test]
    fn projectivity() {
        assert!(is_projective(&realize(E(1, 5))).unwrap());
        assert!(!is_projective(&realize(Unit(2))).unwrap());
        assert!(!is_projective(&realize(E(2, 0))).unwrap());
    }

    #[test]
    fn from_layers_rejects_unstable_layer() {
        let bad = Subspace::span(2, &[BitVec::from_bit_str("10")]);
        let r = FiltModule::from_layers(C2Module::regular(), 1, vec![bad]);
        assert_eq!(r, Err(FiltError::NotStable(1)));
    }
}
