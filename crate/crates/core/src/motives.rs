//! Motivic names for filtered complexes.
//!
//! Real Artin-Tate motives with mod-2 coefficients are modelled by filtered
//! complexes through a fixed generator dictionary: the motive of the base is
//! the unit, the motive of its quadratic closure is `E(0,0)`, Tate twists are
//! weight twists, and the named maps `beta`, `rho`, `eta`, `eps` have their
//! filtered counterparts. Only support-level statements are made about
//! tensor products of motives.

use std::fmt;

use thiserror::Error;

use crate::chains::{named, ChainError, Complex};
use crate::functors::{fgt_complex, homology, hom_de, is_exact_f2, res_complex};
use crate::spectrum::{supp, PrimeSix, SupportSet};

/// Errors raised by the motivic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotiveError {
    /// Syntax error at a byte offset.
    #[error("syntax error at {pos}: {msg}")]
    Syntax {
        /// Byte offset into the input.
        pos: usize,
        /// What was expected.
        msg: String,
    },
    /// Unknown realization name.
    #[error("unknown realization: {0}")]
    UnknownRealization(String),
    /// Failure in the complex layer.
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A named map whose cone is a motive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotiveMap {
    /// `beta: 1 -> 1(1)`.
    Beta,
    /// `rho: 1 -> 1(1)[1]`.
    Rho,
    /// `beta rho: 1 -> 1(2)[1]`.
    BetaRho,
    /// `eta: 1 -> M(C)`.
    Eta,
    /// `eps: M(C) -> 1`.
    Eps,
}

impl MotiveMap {
    fn name(self) -> &'static str {
        match self {
            MotiveMap::Beta => "beta",
            MotiveMap::Rho => "rho",
            MotiveMap::BetaRho => "betarho",
            MotiveMap::Eta => "eta",
            MotiveMap::Eps => "eps",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [MotiveMap::Beta, MotiveMap::Rho, MotiveMap::BetaRho, MotiveMap::Eta, MotiveMap::Eps]
            .into_iter()
            .find(|m| m.name() == s)
    }

    fn cone(self) -> Complex {
        match self {
            MotiveMap::Beta => named::cone_beta(),
            MotiveMap::Rho => named::cone_rho(),
            MotiveMap::BetaRho => named::beta_rho().cone(),
            MotiveMap::Eta => named::eta().cone(),
            MotiveMap::Eps => named::eps().cone(),
        }
    }
}

/// A motivic expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MotiveExpr {
    /// The motive of the real base, `M(R)`.
    Real,
    /// The motive of its quadratic closure, `M(C)`.
    Complex,
    /// The correspondence complex `Spec R -> Spec C -> Spec R`.
    Fund0,
    /// Cone of a named map.
    Cone(MotiveMap),
    /// Tate twist `e(i)`.
    Twist(Box<MotiveExpr>, i32),
    /// Shift `e[n]`.
    Shift(Box<MotiveExpr>, i32),
    /// Direct sum.
    Sum(Box<MotiveExpr>, Box<MotiveExpr>),
    /// Tensor product.
    Tensor(Box<MotiveExpr>, Box<MotiveExpr>),
}

impl MotiveExpr {
    /// Parses the motivic syntax: atoms `M(R)`, `M(C)`, `fund0`, `cone(f)`
    /// with `f` in `beta, rho, betarho, eta, eps`; postfix `(i)` twist and
    /// `[n]` shift; `*` binds tighter than `+`; parentheses group.
    pub fn parse(text: &str) -> Result<MotiveExpr, MotiveError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("end of input"));
        }
        Ok(e)
    }

    /// The filtered complex named by the expression.
    pub fn to_filtered(&self) -> Result<Complex, MotiveError> {
        Ok(match self {
            MotiveExpr::Real => named::unit(0),
            MotiveExpr::Complex => named::e(0, 0),
            MotiveExpr::Fund0 => named::fund0(),
            MotiveExpr::Cone(m) => m.cone(),
            MotiveExpr::Twist(e, i) => e.to_filtered()?.twist(*i)?,
            MotiveExpr::Shift(e, n) => e.to_filtered()?.shift(*n),
            MotiveExpr::Sum(a, b) => a.to_filtered()?.direct_sum(&b.to_filtered()?)?,
            MotiveExpr::Tensor(a, b) => a.to_filtered()?.tensor(&b.to_filtered()?)?,
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            MotiveExpr::Real => f.write_str("M(R)"),
            MotiveExpr::Complex => f.write_str("M(C)"),
            MotiveExpr::Fund0 => f.write_str("fund0"),
            MotiveExpr::Cone(m) => write!(f, "cone({})", m.name()),
            MotiveExpr::Twist(e, i) => {
                e.fmt_prec(f, 2)?;
                write!(f, "({i})")
            }
            MotiveExpr::Shift(e, n) => {
                e.fmt_prec(f, 2)?;
                write!(f, "[{n}]")
            }
            MotiveExpr::Sum(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 0)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            MotiveExpr::Tensor(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MotiveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> MotiveError {
        MotiveError::Syntax { pos: self.pos, msg: format!("expected {msg}") }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), MotiveError> {
        if self.eat(tok) { Ok(()) } else { Err(self.err(&format!("'{tok}'"))) }
    }

    fn int(&mut self) -> Result<i32, MotiveError> {
        self.ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok().and_then(|t| t.parse().ok()).ok_or_else(|| {
            self.pos = start;
            self.err("integer")
        })
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn sum(&mut self) -> Result<MotiveExpr, MotiveError> {
        let mut e = self.product()?;
        while self.eat("+") {
            e = MotiveExpr::Sum(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<MotiveExpr, MotiveError> {
        let mut e = self.postfix()?;
        while self.eat("*") {
            e = MotiveExpr::Tensor(Box::new(e), Box::new(self.postfix()?));
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<MotiveExpr, MotiveError> {
        let mut e = self.atom()?;
        loop {
            if self.eat("(") {
                let i = self.int()?;
                self.expect(")")?;
                e = MotiveExpr::Twist(Box::new(e), i);
            } else if self.eat("[") {
                let n = self.int()?;
                self.expect("]")?;
                e = MotiveExpr::Shift(Box::new(e), n);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<MotiveExpr, MotiveError> {
        if self.eat("(") {
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(e);
        }
        let start = self.pos;
        match self.ident().as_str() {
            "M" => {
                self.expect("(")?;
                let e = match self.ident().as_str() {
                    "R" => MotiveExpr::Real,
                    "C" => MotiveExpr::Complex,
                    _ => return Err(self.err("'R' or 'C'")),
                };
                self.expect(")")?;
                Ok(e)
            }
            "fund0" => Ok(MotiveExpr::Fund0),
            "cone" => {
                self.expect("(")?;
                let m = MotiveMap::from_name(&self.ident()).ok_or_else(|| self.err("map name"))?;
                self.expect(")")?;
                Ok(MotiveExpr::Cone(m))
            }
            _ => {
                self.pos = start;
                Err(self.err("motive"))
            }
        }
    }
}

/// Dimension of motivic cohomology `H^{n,m}` of the base: derived homs from
/// the unit to its `m`-th twist, shifted by `n`.
pub fn motivic_cohomology(n: i32, m: i32) -> Result<usize, ChainError> {
    Ok(hom_de(&named::unit(0), &named::unit(m))?.get(n))
}

/// The output of a realization functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realization {
    /// Etale realization: homology of the underlying C2-complex, per degree
    /// as `(trivial, free)` summand counts.
    Etale {
        /// Nonzero homology.
        homology: Vec<(i32, (usize, usize))>,
    },
    /// Base change to the quadratic closure: the underlying complex of vector
    /// spaces, and the support restricted to the points it detects.
    BaseChange {
        /// Homology dimensions per degree.
        homology: Vec<(i32, usize)>,
        /// True if exact.
        exact: bool,
        /// Support intersected with `{N, Ns}`.
        shadow: SupportSet,
    },
    /// Real realization, at support level: the support intersected with `{L, M}`.
    Real {
        /// Support intersected with `{L, M}`.
        shadow: SupportSet,
    },
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::Etale { homology } => {
                if homology.is_empty() {
                    return f.write_str("etale: exact");
                }
                let parts: Vec<String> =
                    homology.iter().map(|(n, (a, b))| format!("H{n} = k^{a} + kC2^{b}")).collect();
                write!(f, "etale: {}", parts.join(", "))
            }
            Realization::BaseChange { homology, exact, shadow } => {
                let parts: Vec<String> = homology.iter().map(|(n, d)| format!("H{n} = {d}")).collect();
                let h = if *exact { "exact".to_string() } else { parts.join(", ") };
                write!(f, "base_change: {h}; shadow {shadow}")
            }
            Realization::Real { shadow } => write!(f, "real: shadow {shadow}"),
        }
    }
}

/// Applies the realization `etale`, `base_change` or `real`.
pub fn realization(name: &str, e: &MotiveExpr) -> Result<Realization, MotiveError> {
    let x = e.to_filtered()?;
    match name {
        "etale" => Ok(Realization::Etale { homology: homology(&fgt_complex(&x)?) }),
        "base_change" => {
            let r = res_complex(&fgt_complex(&x)?)?;
            let homology = homology(&r).into_iter().map(|(n, (a, b))| (n, a + 2 * b)).collect();
            let shadow = supp(&x)?.intersection(SupportSet::of(&[PrimeSix::N, PrimeSix::Ns]));
            Ok(Realization::BaseChange { homology, exact: is_exact_f2(&r), shadow })
        }
        "real" => {
            let shadow = supp(&x)?.intersection(SupportSet::of(&[PrimeSix::L, PrimeSix::M]));
            Ok(Realization::Real { shadow })
        }
        _ => Err(MotiveError::UnknownRealization(name.to_string())),
    }
}

/// Motivic generating sets of the six primes, as `(prime, generators)`.
pub const PRIME_GENERATORS: [(PrimeSix, &[&str]); 6] = [
    (PrimeSix::M, &["cone(betarho)"]),
    (PrimeSix::L, &["cone(rho)"]),
    (PrimeSix::N, &["cone(beta)"]),
    (PrimeSix::Ms, &["M(C)", "fund0"]),
    (PrimeSix::Ls, &["M(C)"]),
    (PrimeSix::Ns, &["fund0"]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::minimize;
    use PrimeSix::*;

    fn s(text: &str) -> SupportSet {
        supp(&MotiveExpr::parse(text).unwrap().to_filtered().unwrap()).unwrap()
    }

    #[test]
    fn dictionary() {
        assert_eq!(s("M(C)"), SupportSet::of(&[N, Ns]));
        assert_eq!(s("M(R)"), SupportSet::all());
        let r = MotiveExpr::parse("cone(rho)").unwrap().to_filtered().unwrap();
        assert_eq!(minimize(&r).unwrap().signature, named::e(1, 0).shift(1).signature().unwrap());
        assert_eq!(s("M(C)(3)[2]"), SupportSet::of(&[N, Ns]));
        assert_eq!(s("cone(beta) * M(C)"), SupportSet::of(&[Ns]));
    }

    #[test]
    fn motivic_generators() {
        for (p, gens) in PRIME_GENERATORS {
            let u = gens.iter().map(|g| s(g)).fold(SupportSet::empty(), SupportSet::union);
            assert_eq!(u, p.ideal_support(), "{p}");
        }
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(motivic_cohomology(2, 3).unwrap(), 1);
        assert_eq!(motivic_cohomology(3, 2).unwrap(), 0);
        assert_eq!(motivic_cohomology(-1, 5).unwrap(), 0);
    }

    #[test]
    fn realizations() {
        let f0 = MotiveExpr::Fund0;
        assert_eq!(realization("etale", &f0).unwrap(), Realization::Etale { homology: vec![] });
        match realization("base_change", &MotiveExpr::Complex).unwrap() {
            Realization::BaseChange { homology, exact, shadow } => {
                assert_eq!(homology, vec![(0, 2)]);
                assert!(!exact);
                assert_eq!(shadow, SupportSet::of(&[N, Ns]));
            }
            r => panic!("{r:?}"),
        }
        let cb = MotiveExpr::Cone(MotiveMap::Beta);
        assert_eq!(realization("real", &cb).unwrap(), Realization::Real { shadow: SupportSet::of(&[L]) });
        assert!(realization("crystalline", &cb).is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        for t in ["M(R)", "M(C)(2)[-1]", "fund0 + cone(beta) * M(C)", "(M(R) + M(C)) * fund0", "cone(betarho)[1](2)"] {
            let e = MotiveExpr::parse(t).unwrap();
            assert_eq!(MotiveExpr::parse(&e.to_string()).unwrap(), e, "{t}");
        }
        assert!(MotiveExpr::parse("M(Q)").is_err());
    }
}
