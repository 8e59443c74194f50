//! Bounded chain complexes over filtered modules, plain C2-modules or plain
//! F2-vector spaces.
//!
//! All three cell kinds share one representation: plain cells are filtered
//! modules pure of weight zero (with trivial sigma for vector spaces), so a
//! single hom-space solver serves every kind. Indexing is homological:
//! `d_n: X_n -> X_{n-1}`. The coefficient field has characteristic two, so
//! no signs appear in cones, shifts or tensor products.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtmod::{decompose, hom_space, FiltError, FiltModule, FormalSum, IndecLabel};
use crate::gf2::{BitMatrix, BitVec, C2Module};

/// Errors raised by complex constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    /// Failure in the module layer.
    #[error(transparent)]
    Filt(#[from] FiltError),
    /// Operands have different cell kinds.
    #[error("cell kind mismatch: {0:?} vs {1:?}")]
    KindMismatch(CellKind, CellKind),
    /// A term does not belong to the declared cell kind.
    #[error("term in degree {0} is not a valid cell of the declared kind")]
    BadCell(i32),
    /// A differential has the wrong shape or is not a morphism.
    #[error("differential out of degree {0} is not a morphism")]
    BadDifferential(i32),
    /// Two consecutive differentials do not compose to zero.
    #[error("d o d is nonzero at degree {0}")]
    NotSquareZero(i32),
    /// A chain map fails to commute with the differentials or is not degreewise a morphism.
    #[error("not a chain map at degree {0}")]
    NotChainMap(i32),
    /// Chain maps are not composable or not parallel.
    #[error("chain maps have incompatible source or target")]
    Incompatible,
    /// Unknown named object.
    #[error("unknown name: {0}")]
    UnknownName(String),
}

/// The category the terms of a complex live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    /// Filtered F2[C2]-modules.
    Filtered,
    /// Plain F2[C2]-modules.
    PlainC2,
    /// Plain F2-vector spaces.
    PlainF2,
}

impl CellKind {
    fn admits(self, m: &FiltModule) -> bool {
        match self {
            CellKind::Filtered => true,
            CellKind::PlainC2 => m.is_zero() || (m.is_pure() && m.w_min() == 0),
            CellKind::PlainF2 => {
                m.is_zero() || (m.is_pure() && m.w_min() == 0 && m.module().sigma().is_identity())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Complex
// ---------------------------------------------------------------------------

/// A bounded chain complex with nonzero extreme terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    kind: CellKind,
    lo: i32,
    terms: Vec<FiltModule>,
    /// `diffs[i]` is `d_{lo + i + 1}: terms[i + 1] -> terms[i]`.
    diffs: Vec<BitMatrix>,
}

impl Complex {
    /// Builds and trims without validation.
    pub(crate) fn build(kind: CellKind, lo: i32, terms: Vec<FiltModule>, diffs: Vec<BitMatrix>) -> Self {
        debug_assert_eq!(diffs.len(), terms.len().saturating_sub(1));
        let mut c = Self { kind, lo, terms, diffs };
        c.trim();
        c
    }

    fn trim(&mut self) {
        while self.terms.last().is_some_and(FiltModule::is_zero) {
            self.terms.pop();
            self.diffs.pop();
        }
        while self.terms.first().is_some_and(FiltModule::is_zero) {
            self.terms.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        if self.terms.is_empty() {
            self.lo = 0;
            self.diffs.clear();
        }
    }

    /// Builds a complex from ascending terms `X_lo, X_{lo+1}, ...` and
    /// differentials `d_{lo+1}, d_{lo+2}, ...`, validating all invariants.
    pub fn new(kind: CellKind, lo: i32, terms: Vec<FiltModule>, diffs: Vec<BitMatrix>) -> Result<Self, ChainError> {
        if diffs.len() != terms.len().saturating_sub(1) {
            return Err(ChainError::BadDifferential(lo + diffs.len() as i32));
        }
        let c = Self::build(kind, lo, terms, diffs);
        c.validate()?;
        Ok(c)
    }

    /// Builds a complex from terms listed from the top degree downwards, with
    /// `maps[j]` the differential out of the `j`-th listed term.
    pub fn from_chain(
        kind: CellKind,
        top: i32,
        mut terms: Vec<FiltModule>,
        mut maps: Vec<BitMatrix>,
    ) -> Result<Self, ChainError> {
        let lo = top + 1 - terms.len() as i32;
        terms.reverse();
        maps.reverse();
        Self::new(kind, lo, terms, maps)
    }

    /// Checks cell kinds, morphism conditions and `d o d = 0`.
    pub fn validate(&self) -> Result<(), ChainError> {
        for (i, t) in self.terms.iter().enumerate() {
            if !self.kind.admits(t) {
                return Err(ChainError::BadCell(self.lo + i as i32));
            }
        }
        for (i, d) in self.diffs.iter().enumerate() {
            let n = self.lo + i as i32 + 1;
            if !self.terms[i + 1].is_morphism_to(&self.terms[i], d) {
                return Err(ChainError::BadDifferential(n));
            }
        }
        for i in 1..self.diffs.len() {
            if !self.diffs[i - 1].mul(&self.diffs[i]).is_zero() {
                return Err(ChainError::NotSquareZero(self.lo + i as i32 + 1));
            }
        }
        Ok(())
    }

    /// The zero complex.
    pub fn zero(kind: CellKind) -> Self {
        Self { kind, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    /// A filtered module concentrated in one degree.
    pub fn single(obj: FiltModule, deg: i32) -> Self {
        Self::build(CellKind::Filtered, deg, vec![obj], Vec::new())
    }

    /// A C2-module concentrated in one degree.
    pub fn plain(module: C2Module, deg: i32) -> Self {
        Self::build(CellKind::PlainC2, deg, vec![FiltModule::pure(module, 0)], Vec::new())
    }

    /// The unit object of the given kind.
    pub fn unit(kind: CellKind) -> Self {
        Self::build(kind, 0, vec![FiltModule::pure(C2Module::trivial(1), 0)], Vec::new())
    }

    /// Cell kind.
    pub fn kind(&self) -> CellKind {
        self.kind
    }

    /// True for the zero complex.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest nonzero degree (0 for the zero complex).
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest nonzero degree (-1 for the zero complex).
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }

    /// Degree range, if nonzero.
    pub fn range(&self) -> Option<(i32, i32)> {
        (!self.is_zero()).then(|| (self.lo, self.hi()))
    }

    /// Number of degrees spanned minus one (0 for a single term or for zero).
    pub fn width(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// Terms in ascending degree.
    pub fn terms(&self) -> &[FiltModule] {
        &self.terms
    }

    /// The term in degree `n`, if inside the range.
    pub fn term(&self, n: i32) -> Option<&FiltModule> {
        if n < self.lo {
            return None;
        }
        self.terms.get((n - self.lo) as usize)
    }

    /// The term in degree `n`, zero outside the range.
    pub fn term_or_zero(&self, n: i32) -> FiltModule {
        self.term(n).cloned().unwrap_or_else(FiltModule::zero)
    }

    /// Dimension of the term in degree `n`.
    pub fn dim_at(&self, n: i32) -> usize {
        self.term(n).map_or(0, FiltModule::dim)
    }

    /// Sum of all term dimensions.
    pub fn total_dim(&self) -> usize {
        self.terms.iter().map(FiltModule::dim).sum()
    }

    /// The differential `d_n: X_n -> X_{n-1}`.
    pub fn d(&self, n: i32) -> BitMatrix {
        if n > self.lo && n <= self.hi() {
            self.diffs[(n - self.lo - 1) as usize].clone()
        } else {
            BitMatrix::zeros(self.dim_at(n - 1), self.dim_at(n))
        }
    }

    fn d_ref(&self, n: i32) -> Option<&BitMatrix> {
        (n > self.lo && n <= self.hi()).then(|| &self.diffs[(n - self.lo - 1) as usize])
    }

    /// The same data relabeled with another cell kind.
    pub(crate) fn with_kind(&self, kind: CellKind) -> Self {
        Self { kind, ..self.clone() }
    }

    /// Shift: `(x[k])_n = x_{n-k}`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { lo: self.lo + k, ..self.clone() }
    }

    /// Degreewise twist of a filtered complex.
    pub fn twist(&self, r: i32) -> Result<Self, ChainError> {
        if self.kind != CellKind::Filtered {
            return Err(ChainError::KindMismatch(self.kind, CellKind::Filtered));
        }
        Ok(Self { terms: self.terms.iter().map(|t| t.twist(r)).collect(), ..self.clone() })
    }

    fn check_kind(&self, other: &Complex) -> Result<(), ChainError> {
        if self.kind != other.kind {
            return Err(ChainError::KindMismatch(self.kind, other.kind));
        }
        Ok(())
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &Complex) -> Result<Self, ChainError> {
        self.check_kind(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let terms = (lo..=hi).map(|n| self.term_or_zero(n).direct_sum(&other.term_or_zero(n))).collect();
        let diffs = (lo + 1..=hi).map(|n| self.d(n).block_diag(&other.d(n))).collect();
        Ok(Self::build(self.kind, lo, terms, diffs))
    }

    /// Tensor product, with summands of degree `n` ordered by the degree of the
    /// left factor. Signless, which is correct only in characteristic two.
    pub fn tensor(&self, other: &Complex) -> Result<Self, ChainError> {
        self.check_kind(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.kind));
        }
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        let terms: Vec<FiltModule> = (lo..=hi)
            .map(|n| {
                tensor_blocks(self, other, n)
                    .iter()
                    .fold(FiltModule::zero(), |acc, b| acc.direct_sum(&self.terms_at(b.p).tensor(other.terms_at(b.q))))
            })
            .collect();
        let diffs = (lo + 1..=hi)
            .map(|n| {
                let src = tensor_blocks(self, other, n);
                let tgt = tensor_blocks(self, other, n - 1);
                let rows = tgt.last().map_or(0, |b| b.off + b.size);
                let cols = src.last().map_or(0, |b| b.off + b.size);
                let mut m = BitMatrix::zeros(rows, cols);
                for b in &src {
                    if let Some(t) = tgt.iter().find(|t| t.p == b.p - 1 && t.q == b.q) {
                        if let Some(dx) = self.d_ref(b.p) {
                            m.paste(t.off, b.off, &dx.kron(&BitMatrix::identity(other.dim_at(b.q))));
                        }
                    }
                    if let Some(t) = tgt.iter().find(|t| t.p == b.p && t.q == b.q - 1) {
                        if let Some(dy) = other.d_ref(b.q) {
                            m.paste(t.off, b.off, &BitMatrix::identity(self.dim_at(b.p)).kron(dy));
                        }
                    }
                }
                m
            })
            .collect();
        Ok(Self::build(self.kind, lo, terms, diffs))
    }

    fn terms_at(&self, n: i32) -> &FiltModule {
        self.term(n).expect("degree inside range")
    }

    /// Dual complex: `(x^v)_n = (x_{-n})^v` with transposed differentials.
    pub fn dual(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lo = -self.hi();
        let hi = -self.lo;
        let terms = (lo..=hi).map(|n| self.terms_at(-n).dual()).collect();
        let diffs = (lo + 1..=hi).map(|n| self.d(-n + 1).transpose()).collect();
        Self::build(self.kind, lo, terms, diffs)
    }

    /// Stupid truncation `x_{<= n}` with its inclusion into `x`.
    pub fn truncate_le(&self, n: i32) -> (Complex, ChainMap) {
        let sub = if self.is_zero() || n < self.lo {
            Self::zero(self.kind)
        } else {
            let top = n.min(self.hi());
            let len = (top - self.lo + 1) as usize;
            Self::build(self.kind, self.lo, self.terms[..len].to_vec(), self.diffs[..len - 1].to_vec())
        };
        let inc = ChainMap::from_fn_unchecked(&sub, self, |m| BitMatrix::identity(sub.dim_at(m)));
        (sub, inc)
    }

    /// Stupid truncation `x_{>= n}` with the quotient map from `x`.
    pub fn truncate_ge(&self, n: i32) -> (Complex, ChainMap) {
        let quo = if self.is_zero() || n > self.hi() {
            Self::zero(self.kind)
        } else {
            let start = (n.max(self.lo) - self.lo) as usize;
            let diffs = if start == 0 { self.diffs.clone() } else { self.diffs[start..].to_vec() };
            Self::build(self.kind, self.lo + start as i32, self.terms[start..].to_vec(), diffs)
        };
        let pr = ChainMap::from_fn_unchecked(self, &quo, |m| {
            if quo.term(m).is_some() {
                BitMatrix::identity(self.dim_at(m))
            } else {
                BitMatrix::zeros(0, self.dim_at(m))
            }
        });
        (quo, pr)
    }

    /// The connecting map `delta: x_{>= n+1}[-1] -> x_{<= n}`, whose cone is `x`.
    pub fn truncation_delta(&self, n: i32) -> ChainMap {
        let (upper, _) = self.truncate_ge(n + 1);
        let (lower, _) = self.truncate_le(n);
        let src = upper.shift(-1);
        ChainMap::from_fn_unchecked(&src, &lower, |m| {
            if m == n {
                self.d(n + 1)
            } else {
                BitMatrix::zeros(lower.dim_at(m), src.dim_at(m))
            }
        })
    }

    /// Mapping cone of `f: x -> y`: `cone_n = x_{n-1} (+) y_n`.
    pub fn cone(f: &ChainMap) -> Complex {
        let (x, y) = (&f.source, &f.target);
        if x.is_zero() {
            return y.clone();
        }
        let lo = if y.is_zero() { x.lo + 1 } else { (x.lo + 1).min(y.lo) };
        let hi = if y.is_zero() { x.hi() + 1 } else { (x.hi() + 1).max(y.hi()) };
        let terms = (lo..=hi).map(|n| x.term_or_zero(n - 1).direct_sum(&y.term_or_zero(n))).collect();
        let diffs = (lo + 1..=hi)
            .map(|n| {
                let (a, b) = (x.dim_at(n - 1), y.dim_at(n));
                let (c, e) = (x.dim_at(n - 2), y.dim_at(n - 1));
                let mut m = BitMatrix::zeros(c + e, a + b);
                m.paste(0, 0, &x.d(n - 1));
                m.paste(c, 0, &f.comp(n - 1));
                m.paste(c, a, &y.d(n));
                m
            })
            .collect();
        Complex::build(x.kind, lo, terms, diffs)
    }

    /// Per-degree labels of the terms (decomposing each).
    pub fn signature(&self) -> Result<Signature, ChainError> {
        let mut sig = Vec::new();
        for (i, t) in self.terms.iter().enumerate() {
            if !t.is_zero() {
                sig.push((self.lo + i as i32, decompose(t)?.sum));
            }
        }
        Ok(sig)
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let sig = self.signature().map_err(|_| fmt::Error)?;
        render_signature(f, &sig)
    }
}

/// Per-degree decomposition labels, ascending degree, nonzero terms only.
pub type Signature = Vec<(i32, FormalSum)>;

fn render_signature(f: &mut fmt::Formatter<'_>, sig: &Signature) -> fmt::Result {
    if sig.is_empty() {
        return f.write_str("0");
    }
    for (i, (n, s)) in sig.iter().rev().enumerate() {
        if i > 0 {
            f.write_str(" -> ")?;
        }
        write!(f, "[{n}] {s}")?;
    }
    Ok(())
}

/// Renders a signature as `[top] A -> ... -> [bottom] B`.
pub fn signature_string(sig: &Signature) -> String {
    struct S<'a>(&'a Signature);
    impl fmt::Display for S<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            render_signature(f, self.0)
        }
    }
    S(sig).to_string()
}

#[derive(Clone, Copy, Debug)]
struct Block {
    p: i32,
    q: i32,
    off: usize,
    size: usize,
}

/// Summands `x_p (x) y_q` of degree `n`, ordered by `p`.
fn tensor_blocks(x: &Complex, y: &Complex, n: i32) -> Vec<Block> {
    let mut out = Vec::new();
    let (Some((xl, xh)), Some((yl, yh))) = (x.range(), y.range()) else { return out };
    let mut off = 0;
    for p in xl..=xh {
        let q = n - p;
        if q < yl || q > yh {
            continue;
        }
        let size = x.dim_at(p) * y.dim_at(q);
        out.push(Block { p, q, off, size });
        off += size;
    }
    out
}

// ---------------------------------------------------------------------------
// Chain maps and homotopies
// ---------------------------------------------------------------------------

/// A degree-zero chain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    /// Components aligned with the source range.
    comps: Vec<BitMatrix>,
}

impl ChainMap {
    pub(crate) fn from_fn_unchecked(source: &Complex, target: &Complex, f: impl Fn(i32) -> BitMatrix) -> Self {
        let comps = source.range().map_or_else(Vec::new, |(lo, hi)| (lo..=hi).map(&f).collect());
        Self { source: source.clone(), target: target.clone(), comps }
    }

    /// Builds a chain map from its components and validates it.
    pub fn from_fn(source: &Complex, target: &Complex, f: impl Fn(i32) -> BitMatrix) -> Result<Self, ChainError> {
        let m = Self::from_fn_unchecked(source, target, f);
        m.validate()?;
        Ok(m)
    }

    /// Checks shapes, degreewise morphism conditions and commutation.
    pub fn validate(&self) -> Result<(), ChainError> {
        if self.source.kind != self.target.kind {
            return Err(ChainError::KindMismatch(self.source.kind, self.target.kind));
        }
        let Some((lo, hi)) = self.source.range() else { return Ok(()) };
        for n in lo..=hi {
            let c = self.comp(n);
            let src = self.source.terms_at(n);
            let ok = match self.target.term(n) {
                Some(t) => src.is_morphism_to(t, &c),
                None => c.shape() == (0, src.dim()),
            };
            if !ok {
                return Err(ChainError::NotChainMap(n));
            }
        }
        for n in lo..=hi + 1 {
            let lhs = self.target.d(n).mul(&self.comp(n));
            let rhs = self.comp(n - 1).mul(&self.source.d(n));
            if lhs != rhs {
                return Err(ChainError::NotChainMap(n));
            }
        }
        Ok(())
    }

    /// Source complex.
    pub fn source(&self) -> &Complex {
        &self.source
    }

    /// Target complex.
    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// Component in degree `n` (zero outside the source range).
    pub fn comp(&self, n: i32) -> BitMatrix {
        match self.source.range() {
            Some((lo, hi)) if n >= lo && n <= hi => self.comps[(n - lo) as usize].clone(),
            _ => BitMatrix::zeros(self.target.dim_at(n), self.source.dim_at(n)),
        }
    }

    /// Identity map.
    pub fn identity(x: &Complex) -> Self {
        Self::from_fn_unchecked(x, x, |n| BitMatrix::identity(x.dim_at(n)))
    }

    /// Zero map.
    pub fn zero(x: &Complex, y: &Complex) -> Self {
        Self::from_fn_unchecked(x, y, |n| BitMatrix::zeros(y.dim_at(n), x.dim_at(n)))
    }

    /// True if all components vanish.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(BitMatrix::is_zero)
    }

    /// The composite `self o first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap, ChainError> {
        if first.target != self.source {
            return Err(ChainError::Incompatible);
        }
        Ok(Self::from_fn_unchecked(&first.source, &self.target, |n| self.comp(n).mul(&first.comp(n))))
    }

    /// Sum of parallel maps.
    pub fn add(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        if self.source != other.source || self.target != other.target {
            return Err(ChainError::Incompatible);
        }
        Ok(Self::from_fn_unchecked(&self.source, &self.target, |n| self.comp(n).add(&other.comp(n))))
    }

    /// Tensor product of chain maps.
    pub fn tensor(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        let src = self.source.tensor(&other.source)?;
        let tgt = self.target.tensor(&other.target)?;
        Ok(Self::from_fn_unchecked(&src, &tgt, |n| {
            let sb = tensor_blocks(&self.source, &other.source, n);
            let tb = tensor_blocks(&self.target, &other.target, n);
            let mut m = BitMatrix::zeros(tgt.dim_at(n), src.dim_at(n));
            for b in &sb {
                if let Some(t) = tb.iter().find(|t| t.p == b.p && t.q == b.q) {
                    m.paste(t.off, b.off, &self.comp(b.p).kron(&other.comp(b.q)));
                }
            }
            m
        }))
    }

    /// Shift of source and target.
    pub fn shift(&self, k: i32) -> ChainMap {
        let s = self.source.shift(k);
        let t = self.target.shift(k);
        Self::from_fn_unchecked(&s, &t, |n| self.comp(n - k))
    }

    /// Twist of a filtered chain map.
    pub fn twist(&self, r: i32) -> Result<ChainMap, ChainError> {
        let s = self.source.twist(r)?;
        let t = self.target.twist(r)?;
        Ok(Self::from_fn_unchecked(&s, &t, |n| self.comp(n)))
    }

    /// The same components between complexes relabeled with another kind.
    pub(crate) fn with_kind(&self, kind: CellKind) -> Self {
        Self { source: self.source.with_kind(kind), target: self.target.with_kind(kind), comps: self.comps.clone() }
    }

    /// Mapping cone.
    pub fn cone(&self) -> Complex {
        Complex::cone(self)
    }

    /// The map `beta: x -> x(1)`, the identity in every degree.
    pub fn beta(x: &Complex) -> Result<ChainMap, ChainError> {
        let t = x.twist(1)?;
        Ok(Self::from_fn_unchecked(x, &t, |n| BitMatrix::identity(x.dim_at(n))))
    }
}

/// A homotopy `h_n: X_n -> Y_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    lo: i32,
    comps: Vec<BitMatrix>,
}

impl Homotopy {
    /// Component out of degree `n`.
    pub fn comp(&self, n: i32) -> Option<&BitMatrix> {
        if n < self.lo {
            return None;
        }
        self.comps.get((n - self.lo) as usize)
    }

    /// True if `d h + h d = f`.
    pub fn certifies(&self, f: &ChainMap) -> bool {
        let Some((lo, hi)) = f.source.range() else { return true };
        (lo..=hi).all(|n| {
            let h = |m: i32| {
                self.comp(m).cloned().unwrap_or_else(|| BitMatrix::zeros(f.target.dim_at(m + 1), f.source.dim_at(m)))
            };
            let lhs = f.target.d(n + 1).mul(&h(n)).add(&h(n - 1).mul(&f.source.d(n)));
            lhs == f.comp(n)
        })
    }
}

fn flatten_into(v: &mut BitVec, off: usize, m: &BitMatrix) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j) {
                v.flip(off + i * m.cols() + j);
            }
        }
    }
}

/// Solves `d h + h d = f` globally; returns a certifying homotopy or `None`.
pub fn is_nullhomotopic(f: &ChainMap) -> Option<Homotopy> {
    let (x, y) = (&f.source, &f.target);
    let Some((lo, hi)) = x.range() else { return Some(Homotopy { lo: 0, comps: Vec::new() }) };
    // Equation blocks: degree n, shape y_n x x_n.
    let mut eq_off = Vec::new();
    let mut len = 0;
    for n in lo..=hi {
        eq_off.push(len);
        len += y.dim_at(n) * x.dim_at(n);
    }
    let mut rhs = BitVec::zeros(len);
    for n in lo..=hi {
        flatten_into(&mut rhs, eq_off[(n - lo) as usize], &f.comp(n));
    }
    if rhs.is_zero() {
        let comps = (lo..=hi).map(|n| BitMatrix::zeros(y.dim_at(n + 1), x.dim_at(n))).collect();
        return Some(Homotopy { lo, comps });
    }
    let mut cols = Vec::new();
    let mut owners = Vec::new();
    let zero_target = FiltModule::zero();
    for n in lo..=hi {
        let tgt = y.term(n + 1).unwrap_or(&zero_target);
        for h in hom_space(x.terms_at(n), tgt) {
            let mut col = BitVec::zeros(len);
            flatten_into(&mut col, eq_off[(n - lo) as usize], &y.d(n + 1).mul(&h));
            if n < hi {
                flatten_into(&mut col, eq_off[(n + 1 - lo) as usize], &h.mul(&x.d(n + 1)));
            }
            cols.push(col);
            owners.push((n, h));
        }
    }
    if cols.is_empty() {
        return None;
    }
    let sol = BitMatrix::from_cols(len, &cols).solve(&rhs).ok()??;
    let mut comps: Vec<BitMatrix> = (lo..=hi).map(|n| BitMatrix::zeros(y.dim_at(n + 1), x.dim_at(n))).collect();
    for k in sol.ones() {
        let (n, h) = &owners[k];
        comps[(n - lo) as usize].add_assign(h);
    }
    let hom = Homotopy { lo, comps };
    debug_assert!(hom.certifies(f));
    Some(hom)
}

/// A basis of the space of chain maps `x -> y`.
pub fn chain_map_space(x: &Complex, y: &Complex) -> Vec<ChainMap> {
    let Some((lo, hi)) = x.range() else { return Vec::new() };
    let mut eq_off = Vec::new();
    let mut len = 0;
    for n in lo..=hi + 1 {
        eq_off.push(len);
        len += y.dim_at(n - 1) * x.dim_at(n);
    }
    let mut cols = Vec::new();
    let mut owners = Vec::new();
    for n in lo..=hi {
        let Some(tgt) = y.term(n) else { continue };
        for h in hom_space(x.terms_at(n), tgt) {
            let mut col = BitVec::zeros(len);
            flatten_into(&mut col, eq_off[(n - lo) as usize], &y.d(n).mul(&h));
            flatten_into(&mut col, eq_off[(n + 1 - lo) as usize], &h.mul(&x.d(n + 1)));
            cols.push(col);
            owners.push((n, h));
        }
    }
    if cols.is_empty() {
        return Vec::new();
    }
    let ker = if len == 0 { BitMatrix::identity(cols.len()) } else { BitMatrix::from_cols(len, &cols).kernel() };
    (0..ker.rows())
        .map(|r| {
            let v = ker.row(r);
            let mut comps: Vec<BitMatrix> = (lo..=hi).map(|n| BitMatrix::zeros(y.dim_at(n), x.dim_at(n))).collect();
            for k in v.ones() {
                let (n, h) = &owners[k];
                comps[(n - lo) as usize].add_assign(h);
            }
            ChainMap { source: x.clone(), target: y.clone(), comps }
        })
        .collect()
}

/// True if `f` is an isomorphism of complexes (degreewise invertible with
/// filtered inverses).
pub fn is_chain_iso(f: &ChainMap) -> bool {
    if f.source.range() != f.target.range() {
        return false;
    }
    let Some((lo, hi)) = f.source.range() else { return true };
    (lo..=hi).all(|n| {
        let c = f.comp(n);
        match c.inverse() {
            Some(inv) => f.target.terms_at(n).is_morphism_to(f.source.terms_at(n), &inv),
            None => false,
        }
    })
}

/// Searches for an isomorphism `x -> y` in the space of chain maps: exhaustive
/// when the space is small, seeded random sampling otherwise.
pub fn find_chain_iso(x: &Complex, y: &Complex, seed: u64) -> Option<ChainMap> {
    if x.kind != y.kind || x.range() != y.range() {
        return None;
    }
    if let Some((lo, hi)) = x.range() {
        if (lo..=hi).any(|n| x.dim_at(n) != y.dim_at(n)) {
            return None;
        }
    } else {
        return Some(ChainMap::zero(x, y));
    }
    let basis = chain_map_space(x, y);
    let combine = |mask: &dyn Fn(usize) -> bool| -> ChainMap {
        let mut m = ChainMap::zero(x, y);
        for (k, b) in basis.iter().enumerate() {
            if mask(k) {
                for (c, bc) in m.comps.iter_mut().zip(&b.comps) {
                    c.add_assign(bc);
                }
            }
        }
        m
    };
    if basis.len() <= 14 {
        for bits in 1u32..(1 << basis.len()) {
            let m = combine(&|k| bits >> k & 1 == 1);
            if is_chain_iso(&m) {
                return Some(m);
            }
        }
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4096 {
        let pick: Vec<bool> = (0..basis.len()).map(|_| rng.gen()).collect();
        let m = combine(&|k| pick[k]);
        if is_chain_iso(&m) {
            return Some(m);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Minimization
// ---------------------------------------------------------------------------

/// A minimal form with comparison maps `p o i = id` and `i o p ~ id`.
#[derive(Clone, Debug)]
pub struct Minimized {
    /// The minimal complex; its terms are canonical realizations.
    pub complex: Complex,
    /// Per-degree labels of the minimal complex.
    pub signature: Signature,
    /// `i: minimal -> input`.
    pub i: ChainMap,
    /// `p: input -> minimal`.
    pub p: ChainMap,
}

/// A differential entry between matching summands that is an isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitEntry {
    /// Source degree of the differential.
    pub degree: i32,
    /// Summand index in the source term.
    pub source: usize,
    /// Summand index in the target term.
    pub target: usize,
}

fn offsets(labels: &[IndecLabel]) -> Vec<usize> {
    let mut out = Vec::with_capacity(labels.len() + 1);
    let mut acc = 0;
    out.push(0);
    for l in labels {
        acc += l.dim();
        out.push(acc);
    }
    out
}

/// Scans for a unit entry: lowest degree first, then source index, then target index.
fn find_unit_entry(lo: i32, labels: &[Vec<IndecLabel>], diffs: &[BitMatrix]) -> Option<UnitEntry> {
    for (i, d) in diffs.iter().enumerate() {
        let (tl, sl) = (&labels[i], &labels[i + 1]);
        let (to, so) = (offsets(tl), offsets(sl));
        for (b, lb) in sl.iter().enumerate() {
            for (c, lc) in tl.iter().enumerate() {
                if lb != lc {
                    continue;
                }
                if d.submatrix(to[c]..to[c + 1], so[b]..so[b + 1]).is_invertible() {
                    return Some(UnitEntry { degree: lo + i as i32 + 1, source: b, target: c });
                }
            }
        }
    }
    None
}

/// True if a complex whose terms are canonical realizations of `sig` has no
/// unit entry in its differential.
pub fn is_minimal_form(x: &Complex, sig: &Signature) -> bool {
    let Some((lo, hi)) = x.range() else { return true };
    let labels: Vec<Vec<IndecLabel>> = (lo..=hi)
        .map(|n| sig.iter().find(|(m, _)| *m == n).map_or_else(Vec::new, |(_, s)| s.labels().to_vec()))
        .collect();
    let diffs: Vec<BitMatrix> = (lo + 1..=hi).map(|n| x.d(n)).collect();
    find_unit_entry(lo, &labels, &diffs).is_none()
}

fn complement_indices(n: usize, range: std::ops::Range<usize>) -> Vec<usize> {
    (0..n).filter(|k| !range.contains(k)).collect()
}

/// Gaussian elimination of all unit entries, returning the minimal form and
/// the comparison maps.
pub fn minimize(x: &Complex) -> Result<Minimized, ChainError> {
    let Some((lo, hi)) = x.range() else {
        let z = Complex::zero(x.kind);
        return Ok(Minimized {
            complex: z.clone(),
            signature: Vec::new(),
            i: ChainMap::zero(&z, x),
            p: ChainMap::zero(x, &z),
        });
    };
    let len = (hi - lo + 1) as usize;
    let mut labels = Vec::with_capacity(len);
    let mut basis = Vec::with_capacity(len);
    let mut basis_inv = Vec::with_capacity(len);
    for t in &x.terms {
        let dec = decompose(t)?;
        labels.push(dec.sum.labels().to_vec());
        basis_inv.push(dec.iso.inverse().expect("certified iso"));
        basis.push(dec.iso);
    }
    let mut diffs: Vec<BitMatrix> =
        (0..len - 1).map(|i| basis_inv[i].mul(&x.diffs[i]).mul(&basis[i + 1])).collect();
    let mut imap: Vec<BitMatrix> = x.terms.iter().map(|t| BitMatrix::identity(t.dim())).collect();
    let mut pmap = imap.clone();

    while let Some(u) = find_unit_entry(lo, &labels, &diffs) {
        let s = (u.degree - lo) as usize;
        let t = s - 1;
        let (so, to) = (offsets(&labels[s]), offsets(&labels[t]));
        let rb = so[u.source]..so[u.source + 1];
        let rbp = to[u.target]..to[u.target + 1];
        let keep_c = complement_indices(so[labels[s].len()], rb.clone());
        let keep_d = complement_indices(to[labels[t].len()], rbp.clone());
        let rb_idx: Vec<usize> = rb.clone().collect();
        let rbp_idx: Vec<usize> = rbp.clone().collect();
        let d = &diffs[t];
        let phi_inv = d.select_rows(&rbp_idx).select_cols(&rb_idx).inverse().expect("unit entry");
        let delta = d.select_rows(&rbp_idx).select_cols(&keep_c);
        let gamma = d.select_rows(&keep_d).select_cols(&rb_idx);
        let eps = d.select_rows(&keep_d).select_cols(&keep_c);
        let phi_inv_delta = phi_inv.mul(&delta);
        let gamma_phi_inv = gamma.mul(&phi_inv);
        diffs[t] = eps.add(&gamma.mul(&phi_inv_delta));
        if s + 1 < len {
            diffs[s] = diffs[s].select_rows(&keep_c);
        }
        if t >= 1 {
            diffs[t - 1] = diffs[t - 1].select_cols(&keep_d);
        }
        // i_s: C -> b (+) C, rows of b carry phi^{-1} delta.
        let mut i_s = BitMatrix::zeros(so[labels[s].len()], keep_c.len());
        for (r, &row) in rb_idx.iter().enumerate() {
            i_s.set_row(row, &phi_inv_delta.row(r));
        }
        for (c, &row) in keep_c.iter().enumerate() {
            i_s.set(row, c, true);
        }
        imap[s] = imap[s].mul(&i_s);
        imap[t] = imap[t].select_cols(&keep_d);
        pmap[s] = pmap[s].select_rows(&keep_c);
        // p_t: b' (+) D -> D, columns of b' carry gamma phi^{-1}.
        let mut p_t = BitMatrix::zeros(keep_d.len(), to[labels[t].len()]);
        for (c, &col) in rbp_idx.iter().enumerate() {
            p_t.set_col(col, &gamma_phi_inv.col(c));
        }
        for (r, &col) in keep_d.iter().enumerate() {
            p_t.set(r, col, true);
        }
        pmap[t] = p_t.mul(&pmap[t]);
        labels[s].remove(u.source);
        labels[t].remove(u.target);
    }

    let terms: Vec<FiltModule> = labels
        .iter()
        .map(|l| FiltModule::realize_sum(&FormalSum::new(l.clone())))
        .collect();
    let complex = Complex::build(x.kind, lo, terms, diffs);
    let signature: Signature = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| (lo + k as i32, FormalSum::new(l.clone())))
        .collect();
    let i = ChainMap::from_fn_unchecked(&complex, x, |n| {
        let k = (n - lo) as usize;
        basis[k].mul(&imap[k])
    });
    let p = ChainMap::from_fn_unchecked(x, &complex, |n| {
        let k = (n - lo) as usize;
        let m = pmap[k].mul(&basis_inv[k]);
        if complex.term(n).is_some() { m } else { BitMatrix::zeros(0, x.dim_at(n)) }
    });
    debug_assert!(i.validate().is_ok() && p.validate().is_ok());
    Ok(Minimized { complex, signature, i, p })
}

/// True if the complex is homotopy equivalent to zero.
pub fn is_contractible(x: &Complex) -> Result<bool, ChainError> {
    Ok(minimize(x)?.complex.is_zero())
}

/// True if a filtered complex vanishes in the derived category of the exact
/// structure, tested through the conservative functor `gr`.
pub fn is_zero_de(x: &Complex) -> Result<bool, ChainError> {
    is_contractible(&crate::functors::gr_complex(x)?)
}

// ---------------------------------------------------------------------------
// Fractions
// ---------------------------------------------------------------------------

/// A morphism `x -> y` in the derived category, stored as a roof
/// `x <-back- apex -fwd-> y` whose `back` leg has a cone vanishing there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracMap {
    /// Roof apex.
    pub apex: Complex,
    /// Leg to the source, invertible in the derived category.
    pub back: ChainMap,
    /// Leg to the target.
    pub fwd: ChainMap,
}

impl FracMap {
    /// A chain map viewed as a fraction with trivial back leg.
    pub fn from_map(f: &ChainMap) -> Self {
        Self { apex: f.source.clone(), back: ChainMap::identity(&f.source), fwd: f.clone() }
    }

    /// Source object.
    pub fn source(&self) -> &Complex {
        self.back.target()
    }

    /// Target object.
    pub fn target(&self) -> &Complex {
        self.fwd.target()
    }

    /// Cone of the fraction, computed as the cone of the forward leg.
    pub fn cone(&self) -> Complex {
        self.fwd.cone()
    }

    /// Componentwise tensor product of roofs.
    pub fn tensor(&self, other: &FracMap) -> Result<FracMap, ChainError> {
        Ok(Self {
            apex: self.apex.tensor(&other.apex)?,
            back: self.back.tensor(&other.back)?,
            fwd: self.fwd.tensor(&other.fwd)?,
        })
    }

    /// Post-composition with a chain map.
    pub fn then(&self, g: &ChainMap) -> Result<FracMap, ChainError> {
        Ok(Self { apex: self.apex.clone(), back: self.back.clone(), fwd: g.compose(&self.fwd)? })
    }

    /// Shift of the whole roof.
    pub fn shift(&self, k: i32) -> FracMap {
        Self { apex: self.apex.shift(k), back: self.back.shift(k), fwd: self.fwd.shift(k) }
    }

    /// Twist of the whole roof.
    pub fn twist(&self, r: i32) -> Result<FracMap, ChainError> {
        Ok(Self { apex: self.apex.twist(r)?, back: self.back.twist(r)?, fwd: self.fwd.twist(r)? })
    }
}

// ---------------------------------------------------------------------------
// Named objects
// ---------------------------------------------------------------------------

/// Canonical complexes and maps.
pub mod named {
    use super::*;
    use crate::filtmod::realize;
    use IndecLabel::{Unit, E};

    /// `eta: k -> kC2`, the column `(1, 1)`.
    pub fn eta_matrix() -> BitMatrix {
        BitMatrix::from_str_rows(&["1", "1"])
    }

    /// `eps: kC2 -> k`, the row `(1 1)`.
    pub fn eps_matrix() -> BitMatrix {
        BitMatrix::from_str_rows(&["11"])
    }

    /// The norm `1 + sigma` on `kC2`.
    pub fn norm_matrix() -> BitMatrix {
        BitMatrix::from_str_rows(&["11", "11"])
    }

    fn k() -> FiltModule {
        FiltModule::pure(C2Module::trivial(1), 0)
    }

    fn kc2() -> FiltModule {
        FiltModule::pure(C2Module::regular(), 0)
    }

    /// The unfiltered fundamental sequence `k -> kC2 -> k` in degrees 2, 1, 0.
    pub fn fundpur() -> Complex {
        fundpur_pow(1)
    }

    /// The `m`-fold splice `k -> kC2 -> ... -> kC2 -> k` in degrees `m+1..0`;
    /// zero for `m <= 0`.
    pub fn fundpur_pow(m: i32) -> Complex {
        if m <= 0 {
            return Complex::zero(CellKind::PlainC2);
        }
        let mut terms = vec![k()];
        let mut maps = vec![eta_matrix()];
        for i in 0..m {
            terms.push(kc2());
            maps.push(if i + 1 == m { eps_matrix() } else { norm_matrix() });
        }
        terms.push(k());
        Complex::from_chain(CellKind::PlainC2, m + 1, terms, maps).expect("splice is a complex")
    }

    /// The pure weight-zero fundamental complex.
    pub fn fund0() -> Complex {
        fundpur().with_kind(CellKind::Filtered)
    }

    /// The admissible sequence `1(l) -> E(l,0) -> 1(0)` in degrees 2, 1, 0.
    pub fn fund_l(l: u32) -> Complex {
        Complex::from_chain(
            CellKind::Filtered,
            2,
            vec![realize(Unit(l as i32)), realize(E(l, 0)), realize(Unit(0))],
            vec![eta_matrix(), eps_matrix()],
        )
        .expect("fundamental sequence is a complex")
    }

    /// `E(l, m)` in degree 0.
    pub fn e(l: u32, m: i32) -> Complex {
        Complex::single(realize(E(l, m)), 0)
    }

    /// `1(n)` in degree 0.
    pub fn unit(n: i32) -> Complex {
        Complex::single(realize(Unit(n)), 0)
    }

    /// `beta: E(1,0) -> E(1,1)`.
    pub fn beta_e1() -> ChainMap {
        ChainMap::beta(&e(1, 0)).expect("filtered")
    }

    /// `T = cone(beta: E(1,0) -> E(1,1))`.
    pub fn t() -> Complex {
        beta_e1().cone()
    }

    /// `beta: 1 -> 1(1)`.
    pub fn beta_unit() -> ChainMap {
        ChainMap::beta(&unit(0)).expect("filtered")
    }

    /// `cone(beta: 1 -> 1(1))`.
    pub fn cone_beta() -> Complex {
        beta_unit().cone()
    }

    /// `iota_1 = id: E(1,0) -> E(0,1)`.
    pub fn iota1() -> ChainMap {
        ChainMap::from_fn(&e(1, 0), &e(0, 1), |_| BitMatrix::identity(2)).expect("identity is filtered")
    }

    /// `cone(iota_1)`.
    pub fn cone_omega() -> Complex {
        iota1().cone()
    }

    /// `eta: 1 -> E(0,0)` in degree 0.
    pub fn eta() -> ChainMap {
        ChainMap::from_fn(&unit(0), &e(0, 0), |_| eta_matrix()).expect("eta is filtered")
    }

    /// `eps: E(0,0) -> 1` in degree 0.
    pub fn eps() -> ChainMap {
        ChainMap::from_fn(&e(0, 0), &unit(0), |_| eps_matrix()).expect("eps is filtered")
    }

    /// `rho: 1 -> 1(1)[1]` as the roof `1 <- (1(1) -> E(1,0)) -> 1(1)[1]`.
    pub fn rho() -> FracMap {
        let apex = Complex::from_chain(
            CellKind::Filtered,
            1,
            vec![realize(Unit(1)), realize(E(1, 0))],
            vec![eta_matrix()],
        )
        .expect("apex is a complex");
        let one = unit(0);
        let back = ChainMap::from_fn(&apex, &one, |n| {
            if n == 0 { eps_matrix() } else { BitMatrix::zeros(0, apex.dim_at(n)) }
        })
        .expect("eps is a chain map");
        let tgt = unit(1).shift(1);
        let fwd = ChainMap::from_fn(&apex, &tgt, |n| {
            if n == 1 { BitMatrix::identity(1) } else { BitMatrix::zeros(0, apex.dim_at(n)) }
        })
        .expect("projection is a chain map");
        FracMap { apex, back, fwd }
    }

    /// `beta rho: 1 -> 1(2)[1]`.
    pub fn beta_rho() -> FracMap {
        let b = ChainMap::beta(&unit(1).shift(1)).expect("filtered");
        rho().then(&b).expect("composable")
    }

    /// `cone(rho)`, isomorphic to `E(1,0)[1]`.
    pub fn cone_rho() -> Complex {
        rho().cone()
    }

    /// The invertible plain complex `L^n`.
    ///
    /// For `n >= 0`: `k` in degree `n`, then `kC2` in degrees `n-1..0` with
    /// maps `eta, 1+sigma, ...`. For `n < 0`: `kC2` in degrees `0..n+1` with
    /// maps `1+sigma`, then `eps` to `k` in degree `n`.
    pub fn invertpur_pow(n: i32) -> Complex {
        if n == 0 {
            return Complex::unit(CellKind::PlainC2);
        }
        let (top, mut terms, mut maps) = if n > 0 {
            let mut terms = vec![k()];
            let mut maps = Vec::new();
            for i in 0..n {
                terms.push(kc2());
                maps.push(if i == 0 { eta_matrix() } else { norm_matrix() });
            }
            (n, terms, maps)
        } else {
            let mut terms = Vec::new();
            let mut maps = Vec::new();
            for i in 0..-n {
                terms.push(kc2());
                maps.push(if i + 1 == -n { eps_matrix() } else { norm_matrix() });
            }
            terms.push(k());
            (0, terms, maps)
        };
        terms.shrink_to_fit();
        maps.shrink_to_fit();
        Complex::from_chain(CellKind::PlainC2, top, terms, maps).expect("invertible complex")
    }

    /// `eps~: L^1 -> 1`, which is `eps` in degree 0.
    pub fn epstilde() -> ChainMap {
        let l = invertpur_pow(1);
        ChainMap::from_fn(&l, &Complex::unit(CellKind::PlainC2), |n| {
            if n == 0 { eps_matrix() } else { BitMatrix::zeros(0, l.dim_at(n)) }
        })
        .expect("eps~ is a chain map")
    }

    /// `eta~: 1 -> L^{-1}`, which is `eta` in degree 0.
    pub fn etatilde() -> ChainMap {
        let l = invertpur_pow(-1);
        ChainMap::from_fn(&Complex::unit(CellKind::PlainC2), &l, |_| eta_matrix()).expect("eta~ is a chain map")
    }

    /// `upsilon: 1 -> L^{-1}[1]`, the identity of `k` in degree 0.
    pub fn upsilon() -> ChainMap {
        let l = invertpur_pow(-1).shift(1);
        ChainMap::from_fn(&Complex::unit(CellKind::PlainC2), &l, |_| BitMatrix::identity(1))
            .expect("upsilon is a chain map")
    }

    /// The first `j` terms `E(1,-1) -> ... -> E(1,-j)` of the injective
    /// resolution of the unit, in degrees `0..-j+1`.
    pub fn injres_trunc(j: u32) -> Complex {
        if j == 0 {
            return Complex::zero(CellKind::Filtered);
        }
        let terms = (1..=j as i32).map(|i| realize(E(1, -i))).collect();
        let maps = vec![norm_matrix(); j as usize - 1];
        Complex::from_chain(CellKind::Filtered, 0, terms, maps).expect("resolution is a complex")
    }

    /// The coaugmentation `1 -> injres_trunc(j)`, which is `eta` in degree 0.
    pub fn injres_coaug(j: u32) -> ChainMap {
        let r = injres_trunc(j);
        ChainMap::from_fn(&unit(0), &r, |_| {
            if r.is_zero() { BitMatrix::zeros(0, 1) } else { eta_matrix() }
        })
        .expect("coaugmentation is a chain map")
    }

    /// Looks up a named complex.
    pub fn complex(name: &str) -> Result<Complex, ChainError> {
        Ok(match name {
            "fund0" => fund0(),
            "fundpur" => fundpur(),
            "T" => t(),
            "conebeta" => cone_beta(),
            "conerho" => cone_rho(),
            "coneomega" => cone_omega(),
            _ => return Err(ChainError::UnknownName(name.to_string())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use crate::filtmod::realize;
    use IndecLabel::{Unit, E};

    fn sig(x: &Complex) -> Signature {
        minimize(x).unwrap().signature
    }

    fn check_minimized(x: &Complex) {
        let m = minimize(x).unwrap();
        m.i.validate().unwrap();
        m.p.validate().unwrap();
        assert_eq!(m.p.compose(&m.i).unwrap(), ChainMap::identity(&m.complex));
        let ip = m.i.compose(&m.p).unwrap().add(&ChainMap::identity(x)).unwrap();
        assert!(is_nullhomotopic(&ip).is_some());
        assert!(is_minimal_form(&m.complex, &m.signature));
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let u = unit(0);
        assert!(minimize(&ChainMap::identity(&u).cone()).unwrap().complex.is_zero());
        assert!(is_contractible(&Complex::zero(CellKind::Filtered)).unwrap());
    }

    #[test]
    fn named_complexes_validate() {
        for x in [fundpur(), fund0(), fund_l(1), fund_l(3), t(), cone_beta(), cone_rho(), cone_omega()] {
            x.validate().unwrap();
        }
        for n in -4..=4 {
            invertpur_pow(n).validate().unwrap();
        }
        for j in 0..5 {
            injres_trunc(j).validate().unwrap();
            injres_coaug(j).validate().unwrap();
        }
        epstilde().validate().unwrap();
        etatilde().validate().unwrap();
        upsilon().validate().unwrap();
        rho().back.validate().unwrap();
        rho().fwd.validate().unwrap();
        beta_rho().fwd.validate().unwrap();
    }

    #[test]
    fn cone_rho_is_shifted_e1() {
        assert_eq!(sig(&cone_rho()), vec![(1, FormalSum::new(vec![E(1, 0)]))]);
    }

    #[test]
    fn invertpur_minus_one_shape() {
        let l = invertpur_pow(-1);
        assert_eq!((l.lo(), l.hi()), (-1, 0));
        assert_eq!(l.d(0), eps_matrix());
    }

    #[test]
    fn invertibility_small() {
        for n in 1..=2 {
            let x = invertpur_pow(n).tensor(&invertpur_pow(-n)).unwrap();
            assert_eq!(sig(&x), vec![(0, FormalSum::new(vec![Unit(0)]))]);
            check_minimized(&x);
        }
    }

    #[test]
    fn tensor_with_unit() {
        let f = fundpur();
        assert_eq!(f.tensor(&Complex::unit(CellKind::PlainC2)).unwrap(), f);
    }

    #[test]
    fn beta_on_cone_beta_is_nullhomotopic() {
        let cb = cone_beta();
        let b = ChainMap::beta(&cb.twist(-1).unwrap()).unwrap();
        let h = is_nullhomotopic(&b).expect("nullhomotopic");
        assert!(h.certifies(&b));
    }

    #[test]
    fn identity_of_minimal_complex_is_not_nullhomotopic() {
        assert!(is_nullhomotopic(&ChainMap::identity(&fund0())).is_none());
        assert!(is_nullhomotopic(&ChainMap::identity(&t())).is_none());
    }

    #[test]
    fn truncation_delta_cone_is_input() {
        let x = fund_l(2).direct_sum(&t().shift(1)).unwrap();
        for n in x.lo() - 1..=x.hi() {
            let delta = x.truncation_delta(n);
            delta.validate().unwrap();
            let c = delta.cone();
            assert_eq!(c, x, "n = {n}");
        }
    }

    #[test]
    fn minimize_maps_are_homotopy_inverse() {
        check_minimized(&fund_l(1));
        check_minimized(&t());
        check_minimized(&fund0().tensor(&fund0()).unwrap());
        check_minimized(&cone_rho());
    }

    #[test]
    fn fund_l_vanishes_after_gr() {
        assert!(is_zero_de(&fund_l(1)).unwrap());
        assert!(is_zero_de(&fund_l(2)).unwrap());
        assert!(!is_zero_de(&fund0()).unwrap());
    }

    #[test]
    fn dual_is_involutive() {
        let x = fund_l(2).direct_sum(&t().shift(-1)).unwrap();
        assert_eq!(x.dual().dual(), x);
    }

    #[test]
    fn chain_iso_found_after_basis_change() {
        let x = t();
        let p = BitMatrix::from_str_rows(&["11", "01"]);
        let y = Complex::new(
            CellKind::Filtered,
            0,
            vec![x.terms()[0].transport(&p), x.terms()[1].transport(&p)],
            vec![p.mul(&x.d(1)).mul(&p.inverse().unwrap())],
        )
        .unwrap();
        let iso = find_chain_iso(&x, &y, 7).expect("iso exists");
        assert!(is_chain_iso(&iso));
        assert!(find_chain_iso(&x, &cone_beta(), 7).is_none());
    }

    #[test]
    fn fraction_tensor_cone() {
        let rr = rho().tensor(&rho()).unwrap();
        rr.back.validate().unwrap();
        rr.fwd.validate().unwrap();
        let s = realize(Unit(0));
        assert!(s.dim() == 1);
    }
}
