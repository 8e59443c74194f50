//! Supports, classification of tensor ideals and the spectrum atlases.
//!
//! The six primes of the filtered derived category are detected by residue
//! tests: three through the graded functor (the pure primes `Ls`, `Ms`, `Ns`)
//! and three through the forgetful and twisted forgetful functors (`L`, `M`,
//! `N`). Closed subsets are the specialization-closed ones, and ideals are
//! classified by their supports.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chains::{named, ChainError, Complex};
use crate::functors::{fgt_complex, gr_complex, is_exact_f2, pwz, pwz_map, res_complex, sta_complex, tate_dim, tfgt};

/// Errors raised by support and atlas queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumError {
    /// Failure in the complex layer.
    #[error(transparent)]
    Chain(#[from] ChainError),
    /// A computed support is not specialization-closed; indicates an engine bug.
    #[error("support {0} is not specialization-closed")]
    NotClosed(SupportSet),
    /// Unknown atlas name.
    #[error("unknown atlas: {0}")]
    UnknownAtlas(String),
    /// Unknown point name.
    #[error("unknown point: {0}")]
    UnknownPoint(String),
    /// Unknown comparison map.
    #[error("unknown comparison map: {0}")]
    UnknownMap(String),
}

// ---------------------------------------------------------------------------
// The six primes
// ---------------------------------------------------------------------------

/// One of the six primes of the filtered derived category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrimeSix {
    /// Detected by stable reduction after the twisted forgetful functor.
    L,
    /// Detected by stable reduction after the graded functor.
    Ls,
    /// Detected by Tate vanishing after forgetting.
    M,
    /// Detected by Tate vanishing after the graded functor.
    Ms,
    /// Detected by restriction after forgetting.
    N,
    /// Detected by restriction after the graded functor.
    Ns,
}

impl PrimeSix {
    /// All six, in display order.
    pub const ALL: [PrimeSix; 6] = [PrimeSix::L, PrimeSix::Ls, PrimeSix::M, PrimeSix::Ms, PrimeSix::N, PrimeSix::Ns];

    /// Stable identifier.
    pub fn name(self) -> &'static str {
        match self {
            PrimeSix::L => "L",
            PrimeSix::Ls => "Ls",
            PrimeSix::M => "M",
            PrimeSix::Ms => "Ms",
            PrimeSix::N => "N",
            PrimeSix::Ns => "Ns",
        }
    }

    /// Parses a stable identifier.
    pub fn from_name(s: &str) -> Option<PrimeSix> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    /// True if `q` lies in the closure of `self` (reflexive).
    pub fn specializes_to(self, q: PrimeSix) -> bool {
        use PrimeSix::*;
        self == q
            || matches!(
                (self, q),
                (M, L) | (M, Ms) | (M, N) | (M, Ls) | (M, Ns) | (L, Ls) | (Ms, Ls) | (Ms, Ns) | (N, Ns)
            )
    }

    /// The closure of the point.
    pub fn closure(self) -> SupportSet {
        Self::ALL.into_iter().filter(|&q| self.specializes_to(q)).collect()
    }

    /// Support of the prime viewed as an ideal: all `Q` not contained in it,
    /// i.e. `Q` outside the set of generalizations of `self`.
    pub fn ideal_support(self) -> SupportSet {
        Self::ALL.into_iter().filter(|&q| !q.specializes_to(self)).collect()
    }
}

impl fmt::Display for PrimeSix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subset of the six primes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportSet(u8);

impl SupportSet {
    /// The empty set.
    pub fn empty() -> Self {
        Self(0)
    }

    /// All six primes.
    pub fn all() -> Self {
        PrimeSix::ALL.into_iter().collect()
    }

    /// Builds a set from its members.
    pub fn of(points: &[PrimeSix]) -> Self {
        points.iter().copied().collect()
    }

    /// Raw bitmask (bit `i` for the `i`-th prime of `PrimeSix::ALL`).
    pub fn bits(self) -> u8 {
        self.0
    }

    /// Membership.
    pub fn contains(self, p: PrimeSix) -> bool {
        self.0 & p.bit() != 0
    }

    /// Adds a point.
    pub fn insert(&mut self, p: PrimeSix) {
        self.0 |= p.bit();
    }

    /// Union.
    pub fn union(self, o: SupportSet) -> SupportSet {
        Self(self.0 | o.0)
    }

    /// Intersection.
    pub fn intersection(self, o: SupportSet) -> SupportSet {
        Self(self.0 & o.0)
    }

    /// Inclusion.
    pub fn is_subset(self, o: SupportSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// True if empty.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in display order.
    pub fn iter(self) -> impl Iterator<Item = PrimeSix> {
        PrimeSix::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    /// True if closed under specialization.
    pub fn is_closed(self) -> bool {
        self.iter().all(|p| p.closure().is_subset(self))
    }

    /// Parses `{L, Ls}` style text.
    pub fn parse(s: &str) -> Option<SupportSet> {
        let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?;
        let mut out = Self::empty();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.insert(PrimeSix::from_name(part)?);
        }
        Some(out)
    }
}

impl FromIterator<PrimeSix> for SupportSet {
    fn from_iter<T: IntoIterator<Item = PrimeSix>>(iter: T) -> Self {
        let mut s = Self::empty();
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(PrimeSix::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// All fourteen specialization-closed subsets, in increasing bitmask order.
pub fn closed_supports() -> Vec<SupportSet> {
    (0u8..64).map(SupportSet).filter(|s| s.is_closed()).collect()
}

// ---------------------------------------------------------------------------
// Residue tests
// ---------------------------------------------------------------------------

/// Support of a plain C2-complex in the three-point spectrum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct KbaSupport {
    /// Stable reduction not exact.
    pub c_l: bool,
    /// Tate fold nonzero.
    pub c_m: bool,
    /// Restriction not exact.
    pub c_n: bool,
}

impl fmt::Display for KbaSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.c_l {
            names.push("cL");
        }
        if self.c_m {
            names.push("cM");
        }
        if self.c_n {
            names.push("cN");
        }
        write!(f, "{{{}}}", names.join(", "))
    }
}

impl KbaSupport {
    /// The image under the graded embedding (`cL -> Ls`, `cM -> Ms`, `cN -> Ns`).
    pub fn as_pure(self) -> SupportSet {
        self.relabel(PrimeSix::Ls, PrimeSix::Ms, PrimeSix::Ns)
    }

    /// The image under the twisted forgetful embedding (`cL -> L`, `cM -> M`, `cN -> N`).
    pub fn as_mixed(self) -> SupportSet {
        self.relabel(PrimeSix::L, PrimeSix::M, PrimeSix::N)
    }

    fn relabel(self, l: PrimeSix, m: PrimeSix, n: PrimeSix) -> SupportSet {
        let mut s = SupportSet::empty();
        if self.c_l {
            s.insert(l);
        }
        if self.c_m {
            s.insert(m);
        }
        if self.c_n {
            s.insert(n);
        }
        s
    }
}

/// Support of a plain C2-complex.
pub fn supp_kba(y: &Complex) -> Result<KbaSupport, ChainError> {
    Ok(KbaSupport {
        c_l: !is_exact_f2(&sta_complex(y)?),
        c_m: tate_dim(y) != 0,
        c_n: !is_exact_f2(&res_complex(y)?),
    })
}

/// One residue test and whether it detected the object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTest {
    /// The prime the test detects.
    pub prime: PrimeSix,
    /// Description of the functor composite.
    pub functor: &'static str,
    /// True if the object survives.
    pub nonzero: bool,
}

/// Support of a filtered complex with the individual residue outcomes.
pub fn supp_traced(x: &Complex) -> Result<(SupportSet, Vec<ResidueTest>), ChainError> {
    let g = supp_kba(&gr_complex(x)?)?;
    let f = fgt_complex(x)?;
    let n = !is_exact_f2(&res_complex(&f)?);
    let m = tate_dim(&f) != 0;
    let l = !is_exact_f2(&sta_complex(&tfgt(x)?)?);
    let trace = vec![
        ResidueTest { prime: PrimeSix::L, functor: "sta o tfgt not exact", nonzero: l },
        ResidueTest { prime: PrimeSix::Ls, functor: "sta o gr not exact", nonzero: g.c_l },
        ResidueTest { prime: PrimeSix::M, functor: "tate(fgt) nonzero", nonzero: m },
        ResidueTest { prime: PrimeSix::Ms, functor: "tate(gr) nonzero", nonzero: g.c_m },
        ResidueTest { prime: PrimeSix::N, functor: "res o fgt not exact", nonzero: n },
        ResidueTest { prime: PrimeSix::Ns, functor: "res o gr not exact", nonzero: g.c_n },
    ];
    let s = trace.iter().filter(|t| t.nonzero).map(|t| t.prime).collect();
    Ok((s, trace))
}

/// Support of a filtered complex.
pub fn supp(x: &Complex) -> Result<SupportSet, ChainError> {
    Ok(supp_traced(x)?.0)
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// The tensor ideal generated by an object, named by its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// The support.
    pub support: SupportSet,
    /// A generator of the ideal with this support.
    pub generator: &'static str,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = supp <{}>", self.support, self.generator)
    }
}

/// For each closed support, an expression in the shell grammar generating the
/// ideal with that support.
pub const CLASS_GENERATORS: [(&[PrimeSix], &str); 14] = {
    use PrimeSix::*;
    [
        (&[], "0"),
        (&[Ls], "fund0 * E(1,0)"),
        (&[Ns], "conebeta * E(0,0)"),
        (&[Ls, Ns], "fund0 * E(1,0) + conebeta * E(0,0)"),
        (&[L, Ls], "fund0"),
        (&[N, Ns], "E(0,0)"),
        (&[Ls, Ms, Ns], "T"),
        (&[L, Ls, Ns], "fund0 + conebeta * E(0,0)"),
        (&[Ls, N, Ns], "E(0,0) + fund0 * E(1,0)"),
        (&[L, Ls, N, Ns], "fund0 + E(0,0)"),
        (&[L, Ls, Ms, Ns], "conebeta"),
        (&[Ls, Ms, N, Ns], "T + E(0,0)"),
        (&[L, Ls, Ms, N, Ns], "conebeta + E(0,0)"),
        (&[L, Ls, M, Ms, N, Ns], "1(0)"),
    ]
};

/// Matches a support against the fourteen closed subsets.
pub fn classify_support(s: SupportSet) -> Result<Classification, SpectrumError> {
    CLASS_GENERATORS
        .iter()
        .find(|(pts, _)| SupportSet::of(pts) == s)
        .map(|(_, g)| Classification { support: s, generator: g })
        .ok_or(SpectrumError::NotClosed(s))
}

/// Classifies the tensor ideal generated by `x`.
pub fn classify(x: &Complex) -> Result<Classification, SpectrumError> {
    classify_support(supp(x)?)
}

/// True if `x` lies in the tensor ideal generated by `generators`.
pub fn ideal_contains(generators: &[Complex], x: &Complex) -> Result<bool, ChainError> {
    let mut u = SupportSet::empty();
    for g in generators {
        u = u.union(supp(g)?);
    }
    Ok(supp(x)?.is_subset(u))
}

// ---------------------------------------------------------------------------
// Prime generators
// ---------------------------------------------------------------------------

/// One check of a generating set against the support of a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCheck {
    /// The prime.
    pub prime: PrimeSix,
    /// Description of the generators.
    pub generators: &'static str,
    /// Support of the prime as an ideal.
    pub expected: SupportSet,
    /// Union of the computed generator supports.
    pub computed: SupportSet,
}

impl GeneratorCheck {
    /// True if the supports agree.
    pub fn pass(&self) -> bool {
        self.expected == self.computed
    }
}

fn check(prime: PrimeSix, generators: &'static str, objs: Vec<Complex>) -> Result<GeneratorCheck, ChainError> {
    let mut computed = SupportSet::empty();
    for o in &objs {
        computed = computed.union(supp(o)?);
    }
    Ok(GeneratorCheck { prime, generators, expected: prime.ideal_support(), computed })
}

/// Checks the nine generating sets and the six Koszul cones.
pub fn verify_prime_generators() -> Result<Vec<GeneratorCheck>, ChainError> {
    use named::*;
    use PrimeSix::*;
    let e0 = e(0, 0);
    let f0 = fund0();
    let tt = t();
    let ups = pwz_map(&upsilon())?;
    let etl = pwz_map(&etatilde())?;
    let both = pwz_map(&etatilde().tensor(&upsilon())?)?;
    Ok(vec![
        check(M, "T, E(0,0), fund0", vec![tt.clone(), e0.clone(), f0.clone()])?,
        check(L, "T, E(0,0)", vec![tt.clone(), e0.clone()])?,
        check(N, "T, fund0", vec![tt.clone(), f0.clone()])?,
        check(Ms, "E(0,0), fund0", vec![e0.clone(), f0.clone()])?,
        check(Ls, "E(0,0)", vec![e0.clone()])?,
        check(Ns, "fund0", vec![f0.clone()])?,
        check(L, "E(1,0)", vec![e(1, 0)])?,
        check(N, "cone(beta)", vec![cone_beta()])?,
        check(M, "E(2,0)", vec![e(2, 0)])?,
        check(Ls, "cone(pwz upsilon)", vec![ups.cone()])?,
        check(Ns, "cone(pwz etatilde)", vec![etl.cone()])?,
        check(L, "cone(rho)", vec![cone_rho()])?,
        check(Ms, "cone(pwz(etatilde * upsilon))", vec![both.cone()])?,
        check(N, "cone(beta)", vec![cone_beta()])?,
        check(M, "cone(beta rho)", vec![beta_rho().cone()])?,
    ])
}

/// Support of the pure weight-zero image of a plain complex.
pub fn supp_pwz(y: &Complex) -> Result<SupportSet, ChainError> {
    supp(&pwz(y)?)
}

// ---------------------------------------------------------------------------
// Finite atlases
// ---------------------------------------------------------------------------

/// A finite poset of primes with its specialization order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    /// Atlas name.
    pub name: &'static str,
    /// Point names.
    pub points: Vec<&'static str>,
    /// `le[a][b]` is true when `b` lies in the closure of `a`.
    le: Vec<Vec<bool>>,
}

impl FinitePoset {
    fn new(name: &'static str, points: Vec<&'static str>, covers: &[(&str, &str)]) -> Self {
        let n = points.len();
        let idx = |s: &str| points.iter().position(|p| *p == s).expect("known point");
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            le[idx(a)][idx(b)] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        Self { name, points, le }
    }

    fn index(&self, p: &str) -> Result<usize, SpectrumError> {
        self.points.iter().position(|q| *q == p).ok_or_else(|| SpectrumError::UnknownPoint(p.to_string()))
    }

    /// True if `b` lies in the closure of `a`.
    pub fn specializes_to(&self, a: &str, b: &str) -> Result<bool, SpectrumError> {
        Ok(self.le[self.index(a)?][self.index(b)?])
    }

    /// Closure of a point.
    pub fn closure(&self, p: &str) -> Result<Vec<&'static str>, SpectrumError> {
        let i = self.index(p)?;
        Ok((0..self.points.len()).filter(|&j| self.le[i][j]).map(|j| self.points[j]).collect())
    }

    /// True if the set is closed under specialization.
    pub fn is_closed(&self, set: &[&str]) -> Result<bool, SpectrumError> {
        let idx: BTreeSet<usize> = set.iter().map(|p| self.index(p)).collect::<Result<_, _>>()?;
        Ok(idx.iter().all(|&i| (0..self.points.len()).all(|j| !self.le[i][j] || idx.contains(&j))))
    }

    /// All closed subsets.
    pub fn closed_subsets(&self) -> Vec<Vec<&'static str>> {
        let n = self.points.len();
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.points[i]).collect::<Vec<_>>())
            .filter(|s| self.is_closed(s).expect("known points"))
            .collect()
    }
}

/// The three-point spectrum of plain C2-complexes.
pub fn atlas_kba() -> FinitePoset {
    FinitePoset::new("KbA", vec!["cL", "cM", "cN"], &[("cM", "cL"), ("cM", "cN")])
}

/// The six-point spectrum with mod-2 coefficients.
pub fn atlas_datm2() -> FinitePoset {
    FinitePoset::new(
        "DATM2",
        vec!["L", "Ls", "M", "Ms", "N", "Ns"],
        &[("M", "L"), ("M", "Ms"), ("M", "N"), ("L", "Ls"), ("Ms", "Ls"), ("Ms", "Ns"), ("N", "Ns")],
    )
}

/// Tate motives with mod-2 coefficients.
pub fn atlas_dtm2() -> FinitePoset {
    FinitePoset::new(
        "DTM2",
        vec!["0", "<cone rho>", "<cone beta>", "<cone beta rho>"],
        &[("<cone beta rho>", "<cone rho>"), ("<cone beta rho>", "<cone beta>"), ("<cone rho>", "0"), ("<cone beta>", "0")],
    )
}

/// Artin motives with mod-2 coefficients.
pub fn atlas_dam2() -> FinitePoset {
    FinitePoset::new(
        "DAM2",
        vec!["<M(C)>", "<fund0>", "<M(C), fund0>"],
        &[("<M(C), fund0>", "<M(C)>"), ("<M(C), fund0>", "<fund0>")],
    )
}

/// Any atlas by name.
#[derive(Clone, Debug)]
pub enum Atlas {
    /// A finite poset.
    Finite(FinitePoset),
    /// The integral spectrum with symbolic families.
    Integral(IntegralSpectrum),
}

/// Looks up an atlas: `KbA`, `DATM2`, `DTM2`, `DAM2`, `DATMZ` or `DATMZ-general`.
pub fn atlas(name: &str) -> Result<Atlas, SpectrumError> {
    Ok(match name {
        "KbA" => Atlas::Finite(atlas_kba()),
        "DATM2" => Atlas::Finite(atlas_datm2()),
        "DTM2" => Atlas::Finite(atlas_dtm2()),
        "DAM2" => Atlas::Finite(atlas_dam2()),
        "DATMZ" => Atlas::Integral(IntegralSpectrum::real_algebraic()),
        "DATMZ-general" => Atlas::Integral(IntegralSpectrum::general_real_closed()),
        _ => return Err(SpectrumError::UnknownAtlas(name.to_string())),
    })
}

// ---------------------------------------------------------------------------
// Comparison maps
// ---------------------------------------------------------------------------

/// The comparison maps `DATM2 -> DTM2`, `DATM2 -> DAM2`, and the embeddings
/// `KbA -> DATM2` through `gr` and `tfgt`.
pub const COMPARE_MAPS: [&str; 4] = ["DATM2->DTM2", "DATM2->DAM2", "KbA->DATM2:gr", "KbA->DATM2:tfgt"];

/// Image of a prime under a comparison map, computed from generator supports:
/// a prime of the subcategory is read off from which of its test objects the
/// prime contains.
pub fn compare(map: &str, point: &str) -> Result<&'static str, SpectrumError> {
    match map {
        "DATM2->DTM2" => {
            let p = PrimeSix::from_name(point).ok_or_else(|| SpectrumError::UnknownPoint(point.to_string()))?;
            let has = |x: &Complex| -> Result<bool, SpectrumError> { Ok(!supp(x)?.contains(p)) };
            let r = has(&named::cone_rho())?;
            let b = has(&named::cone_beta())?;
            let br = has(&named::beta_rho().cone())?;
            Ok(match (r, b, br) {
                (false, false, false) => "0",
                (true, false, false) => "<cone rho>",
                (false, true, false) => "<cone beta>",
                _ => "<cone beta rho>",
            })
        }
        "DATM2->DAM2" => {
            let p = PrimeSix::from_name(point).ok_or_else(|| SpectrumError::UnknownPoint(point.to_string()))?;
            let c = !supp(&named::e(0, 0))?.contains(p);
            let f = !supp(&named::fund0())?.contains(p);
            Ok(match (c, f) {
                (true, false) => "<M(C)>",
                (false, true) => "<fund0>",
                _ => "<M(C), fund0>",
            })
        }
        "KbA->DATM2:gr" | "KbA->DATM2:tfgt" => {
            let pure = map.ends_with("gr");
            let p = match (point, pure) {
                ("cL", true) => "Ls",
                ("cM", true) => "Ms",
                ("cN", true) => "Ns",
                ("cL", false) => "L",
                ("cM", false) => "M",
                ("cN", false) => "N",
                _ => return Err(SpectrumError::UnknownPoint(point.to_string())),
            };
            Ok(p)
        }
        _ => Err(SpectrumError::UnknownMap(map.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Integral spectrum
// ---------------------------------------------------------------------------

/// A point of the integral spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntPoint {
    /// One of the six mod-2 points (`N = e(2)`, `Ns = m(2)`).
    Six(PrimeSix),
    /// `e(l)` for an odd prime `l`.
    E(u64),
    /// `m(l)` for an odd prime `l`.
    M(u64),
    /// The generic point.
    P0,
}

impl IntPoint {
    /// Normalizes `e(2)` to `N` and `m(2)` to `Ns`; rejects non-primes.
    pub fn e(l: u64) -> Option<IntPoint> {
        match l {
            2 => Some(IntPoint::Six(PrimeSix::N)),
            _ if is_prime(l) => Some(IntPoint::E(l)),
            _ => None,
        }
    }

    /// Normalizes `m(2)` to `Ns`; rejects non-primes.
    pub fn m(l: u64) -> Option<IntPoint> {
        match l {
            2 => Some(IntPoint::Six(PrimeSix::Ns)),
            _ if is_prime(l) => Some(IntPoint::M(l)),
            _ => None,
        }
    }

    /// Parses `L`, `e(3)`, `m(5)`, `P0` and so on.
    pub fn parse(s: &str) -> Option<IntPoint> {
        let s = s.trim();
        if s == "P0" {
            return Some(IntPoint::P0);
        }
        if let Some(p) = PrimeSix::from_name(s) {
            return Some(IntPoint::Six(p));
        }
        let arg = |pre: &str| s.strip_prefix(pre)?.strip_suffix(')')?.trim().parse::<u64>().ok();
        if let Some(l) = arg("e(") {
            return IntPoint::e(l);
        }
        arg("m(").and_then(IntPoint::m)
    }
}

impl fmt::Display for IntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntPoint::Six(p) => write!(f, "{p}"),
            IntPoint::E(l) => write!(f, "e({l})"),
            IntPoint::M(l) => write!(f, "m({l})"),
            IntPoint::P0 => f.write_str("P0"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d: u64| !n.is_multiple_of(d))
}

/// A possibly infinite set of integral points: explicit points plus, for each
/// of the two odd-prime families, optionally all members but finitely many.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicSet {
    /// Explicit members.
    pub points: BTreeSet<IntPoint>,
    /// If set, every `e(l)` for odd `l` outside the exceptions is a member.
    pub e_family_except: Option<BTreeSet<u64>>,
    /// If set, every `m(l)` for odd `l` outside the exceptions is a member.
    pub m_family_except: Option<BTreeSet<u64>>,
}

impl SymbolicSet {
    /// A finite set.
    pub fn finite(points: impl IntoIterator<Item = IntPoint>) -> Self {
        Self { points: points.into_iter().collect(), ..Self::default() }
    }

    /// Membership.
    pub fn contains(&self, p: IntPoint) -> bool {
        if self.points.contains(&p) {
            return true;
        }
        match p {
            IntPoint::E(l) => self.e_family_except.as_ref().is_some_and(|ex| !ex.contains(&l)),
            IntPoint::M(l) => self.m_family_except.as_ref().is_some_and(|ex| !ex.contains(&l)),
            _ => false,
        }
    }

    /// True if the set has finitely many points.
    pub fn is_finite(&self) -> bool {
        self.e_family_except.is_none() && self.m_family_except.is_none()
    }

    /// Union.
    pub fn union(&self, o: &SymbolicSet) -> SymbolicSet {
        let fam = |a: &Option<BTreeSet<u64>>, b: &Option<BTreeSet<u64>>| match (a, b) {
            (Some(x), Some(y)) => Some(x.intersection(y).copied().collect()),
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        };
        SymbolicSet {
            points: self.points.union(&o.points).copied().collect(),
            e_family_except: fam(&self.e_family_except, &o.e_family_except),
            m_family_except: fam(&self.m_family_except, &o.m_family_except),
        }
    }
}

impl fmt::Display for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.points.iter().map(ToString::to_string).collect();
        let fam = |name: &str, ex: &BTreeSet<u64>| {
            if ex.is_empty() {
                format!("{name}(l) for all odd l")
            } else {
                let e: Vec<String> = ex.iter().map(ToString::to_string).collect();
                format!("{name}(l) for odd l not in [{}]", e.join(", "))
            }
        };
        if let Some(ex) = &self.e_family_except {
            parts.push(fam("e", ex));
        }
        if let Some(ex) = &self.m_family_except {
            parts.push(fam("m", ex));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The integral spectrum: the six mod-2 points, the odd-prime pairs
/// `e(l) < m(l)` and a generic point below every `e(l)` (including `N = e(2)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralSpectrum {
    /// Atlas name.
    pub name: &'static str,
    /// True when the generic fiber is only conjectured to be a single point.
    pub p0_conjectural: bool,
}

impl IntegralSpectrum {
    /// Real algebraic numbers as base: all points are established.
    pub fn real_algebraic() -> Self {
        Self { name: "DATMZ", p0_conjectural: false }
    }

    /// A general real closed base: the generic fiber is conjectural.
    pub fn general_real_closed() -> Self {
        Self { name: "DATMZ-general", p0_conjectural: true }
    }

    /// Closure of a point.
    pub fn closure(&self, p: IntPoint) -> SymbolicSet {
        match p {
            IntPoint::Six(q) => SymbolicSet::finite(q.closure().iter().map(IntPoint::Six)),
            IntPoint::E(l) => SymbolicSet::finite([IntPoint::E(l), IntPoint::M(l)]),
            IntPoint::M(l) => SymbolicSet::finite([IntPoint::M(l)]),
            IntPoint::P0 => SymbolicSet {
                points: [IntPoint::P0, IntPoint::Six(PrimeSix::N), IntPoint::Six(PrimeSix::Ns)].into_iter().collect(),
                e_family_except: Some(BTreeSet::new()),
                m_family_except: Some(BTreeSet::new()),
            },
        }
    }

    /// True if the set is closed under specialization.
    pub fn is_specialization_closed(&self, s: &SymbolicSet) -> bool {
        let odd = |l: &&u64| **l > 2 && is_prime(**l);
        // A family is fully present if its exceptions are all listed explicitly.
        let full = |ex: &Option<BTreeSet<u64>>, point: fn(u64) -> IntPoint| {
            ex.as_ref().is_some_and(|ex| ex.iter().filter(odd).all(|l| s.points.contains(&point(*l))))
        };
        if s.contains(IntPoint::P0) && !(full(&s.e_family_except, IntPoint::E) && full(&s.m_family_except, IntPoint::M)) {
            return false;
        }
        if let Some(ex_e) = &s.e_family_except {
            // Each e(l) of the family specializes to m(l).
            let Some(ex_m) = &s.m_family_except else { return false };
            if ex_m.iter().filter(odd).any(|l| !ex_e.contains(l) && !s.points.contains(&IntPoint::M(*l))) {
                return false;
            }
        }
        s.points.iter().all(|&p| p == IntPoint::P0 || self.closure(p).points.iter().all(|q| s.contains(*q)))
            && (!s.contains(IntPoint::P0) || self.closure(IntPoint::P0).points.iter().all(|q| s.contains(*q)))
    }

    /// Closed sets are the finite specialization-closed sets and the
    /// specialization-closed sets containing the generic point.
    pub fn is_closed(&self, s: &SymbolicSet) -> bool {
        self.is_specialization_closed(s) && (s.is_finite() || s.contains(IntPoint::P0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::named::*;
    use PrimeSix::*;

    #[test]
    fn fourteen_closed_supports() {
        assert_eq!(closed_supports().len(), 14);
        assert_eq!(atlas_datm2().closed_subsets().len(), 14);
        assert_eq!(atlas_dtm2().closed_subsets().len(), 6);
        assert_eq!(atlas_dam2().closed_subsets().len(), 5);
        assert_eq!(atlas_kba().closed_subsets().len(), 5);
        for (pts, _) in CLASS_GENERATORS {
            assert!(SupportSet::of(pts).is_closed());
        }
    }

    #[test]
    fn kba_supports() {
        assert_eq!(supp_kba(&fundpur()).unwrap(), KbaSupport { c_l: true, c_m: false, c_n: false });
        let kc2 = Complex::plain(crate::gf2::C2Module::regular(), 0);
        assert_eq!(supp_kba(&kc2).unwrap(), KbaSupport { c_l: false, c_m: false, c_n: true });
        assert_eq!(supp_kba(&Complex::zero(crate::chains::CellKind::PlainC2)).unwrap(), KbaSupport::default());
    }

    #[test]
    fn basic_supports() {
        assert_eq!(supp(&e(0, 0)).unwrap(), SupportSet::of(&[N, Ns]));
        assert_eq!(supp(&fund0()).unwrap(), SupportSet::of(&[L, Ls]));
        assert_eq!(supp(&t()).unwrap(), SupportSet::of(&[Ls, Ms, Ns]));
        assert_eq!(classify(&unit(0)).unwrap().support, SupportSet::all());
        assert_eq!(classify(&Complex::zero(crate::chains::CellKind::Filtered)).unwrap().support, SupportSet::empty());
        assert_eq!(classify(&e(2, 0)).unwrap().support, SupportSet::of(&[L, Ls, Ms, N, Ns]));
    }

    #[test]
    fn membership() {
        assert!(ideal_contains(&[e(1, 0)], &e(0, 0)).unwrap());
        assert!(!ideal_contains(&[e(0, 0)], &fund0()).unwrap());
        assert!(ideal_contains(&[unit(0)], &t()).unwrap());
    }

    #[test]
    fn generators_and_koszul_cones() {
        for c in verify_prime_generators().unwrap() {
            assert!(c.pass(), "{:?}", c);
        }
    }

    #[test]
    fn projections() {
        let tm = [(L, "<cone rho>"), (N, "<cone beta>"), (M, "<cone beta rho>"), (Ls, "0"), (Ms, "0"), (Ns, "0")];
        for (p, q) in tm {
            assert_eq!(compare("DATM2->DTM2", p.name()).unwrap(), q);
        }
        let am = [(L, "<M(C)>"), (Ls, "<M(C)>"), (N, "<fund0>"), (Ns, "<fund0>"), (M, "<M(C), fund0>"), (Ms, "<M(C), fund0>")];
        for (p, q) in am {
            assert_eq!(compare("DATM2->DAM2", p.name()).unwrap(), q);
        }
    }

    #[test]
    fn integral_closed_sets() {
        let z = IntegralSpectrum::real_algebraic();
        assert!(z.is_closed(&SymbolicSet::finite([IntPoint::m(3).unwrap()])));
        let all_e = SymbolicSet {
            points: [IntPoint::e(2).unwrap()].into_iter().collect(),
            e_family_except: Some(BTreeSet::new()),
            m_family_except: None,
        };
        assert!(!z.is_closed(&all_e));
        assert!(z.is_closed(&z.closure(IntPoint::P0)));
        assert_eq!(IntPoint::e(2), Some(IntPoint::Six(N)));
        assert_eq!(IntPoint::parse("m(2)"), Some(IntPoint::Six(Ns)));
        assert_eq!(IntPoint::e(9), None);
    }
}
