//! Expression language, command layer and canonical serialization.
//!
//! Object grammar (whitespace-insensitive, integers signed, `*` binds
//! tighter than `+`):
//!
//! ```text
//! sum     := product ('+' product)*
//! product := atom ('*' atom)*
//! atom    := '0' | '1' | '1(' int ')' | 'E(' int ',' int ')' | 'M(R)' | 'M(C)'
//!          | 'fund0' | 'fundl(' int ')' | 'T' | 'conebeta' | 'conerho'
//!          | 'coneomega' | 'Lpure(' int ')'
//!          | 'twist(' sum ',' int ')' | 'shift(' sum ',' int ')'
//!          | 'dual(' sum ')' | 'cone(' map ')' | '(' sum ')'
//! map     := matom ('*' matom)*
//! matom   := 'beta' | 'beta(' sum ')' | 'rho' | 'betarho' | 'eta' | 'eps'
//!          | 'iota1' | 'etatilde' | 'upsilon' | 'epstilde' | '(' map ')'
//! ```
//!
//! `Lpure(n)`, `etatilde`, `upsilon` and `epstilde` are the plain invertible
//! complexes and maps placed in pure weight zero.

use std::fmt;

use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::chains::{
    find_chain_iso, minimize, named, signature_string, CellKind, ChainError, ChainMap, Complex, FracMap,
};
use crate::filtmod::{decompose, FiltError, FiltModule, FormalSum, IndecLabel};
use crate::functors::{fgt_complex, gr_complex, hom_de, pwz, pwz_map, tate_dim, tfgt};
use crate::gf2::{BitMatrix, BitVec, C2Module, Subspace};
use crate::motives::{motivic_cohomology, MotiveError, PRIME_GENERATORS};
use crate::spectrum::{
    atlas, classify, closed_supports, compare, ideal_contains, supp, supp_traced, verify_prime_generators, Atlas,
    IntPoint, PrimeSix, SpectrumError, SupportSet, SymbolicSet, CLASS_GENERATORS,
};

/// Schema tag carried by every serialized document and machine-readable report.
pub const SCHEMA: &str = "filtc2/1";

/// Errors surfaced by the shell, each with a stable exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShellError {
    /// Syntax error at a byte offset.
    #[error("syntax error at {pos}: {msg}")]
    Syntax {
        /// Byte offset into the input.
        pos: usize,
        /// What was expected.
        msg: String,
    },
    /// Unknown identifier at a byte offset.
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdent {
        /// Byte offset into the input.
        pos: usize,
        /// The identifier.
        name: String,
    },
    /// Bad command-line usage.
    #[error("usage: {0}")]
    Usage(String),
    /// A serialized document violates the schema.
    #[error("schema violation: {0}")]
    Schema(String),
    /// Failure inside the engine.
    #[error("engine: {0}")]
    Engine(String),
}

impl ShellError {
    /// Process exit code: 1 for input problems, 2 for engine failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ShellError::Engine(_) => 2,
            _ => 1,
        }
    }
}

macro_rules! engine_from {
    ($($t:ty),*) => {$(
        impl From<$t> for ShellError {
            fn from(e: $t) -> Self {
                ShellError::Engine(e.to_string())
            }
        }
    )*};
}
engine_from!(ChainError, FiltError, SpectrumError, MotiveError);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// An object expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// The zero object.
    Zero,
    /// `1(n)`.
    Unit(i32),
    /// `E(l,m)`.
    E(u32, i32),
    /// `M(R)`, the unit.
    MotR,
    /// `M(C)`, that is `E(0,0)`.
    MotC,
    /// `fund0`.
    Fund0,
    /// `fundl(l)`.
    FundL(u32),
    /// `T`.
    T,
    /// `conebeta`.
    ConeBeta,
    /// `conerho`.
    ConeRho,
    /// `coneomega`.
    ConeOmega,
    /// `Lpure(n)`.
    Lpure(i32),
    /// Direct sum.
    Sum(Box<Expr>, Box<Expr>),
    /// Tensor product.
    Tensor(Box<Expr>, Box<Expr>),
    /// `twist(e, r)`.
    Twist(Box<Expr>, i32),
    /// `shift(e, k)`.
    Shift(Box<Expr>, i32),
    /// `dual(e)`.
    Dual(Box<Expr>),
    /// `cone(f)`.
    Cone(Box<MapExpr>),
}

/// A map expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MapExpr {
    /// `beta: 1 -> 1(1)`.
    Beta,
    /// `beta` on a given object.
    BetaOf(Box<Expr>),
    /// `rho: 1 -> 1(1)[1]`.
    Rho,
    /// `beta rho`.
    BetaRho,
    /// `eta: 1 -> E(0,0)`.
    Eta,
    /// `eps: E(0,0) -> 1`.
    Eps,
    /// `iota1: E(1,0) -> E(0,1)`.
    Iota1,
    /// `eta~` in pure weight zero.
    EtaTilde,
    /// `upsilon` in pure weight zero.
    Upsilon,
    /// `eps~` in pure weight zero.
    EpsTilde,
    /// Tensor product of maps.
    Tensor(Box<MapExpr>, Box<MapExpr>),
}

impl Expr {
    /// Parses an object expression.
    pub fn parse(text: &str) -> Result<Expr, ShellError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("operator or end of input"));
        }
        Ok(e)
    }

    /// Evaluates to a filtered complex.
    pub fn eval(&self) -> Result<Complex, ShellError> {
        Ok(match self {
            Expr::Zero => Complex::zero(CellKind::Filtered),
            Expr::Unit(n) => named::unit(*n),
            Expr::E(l, m) => named::e(*l, *m),
            Expr::MotR => named::unit(0),
            Expr::MotC => named::e(0, 0),
            Expr::Fund0 => named::fund0(),
            Expr::FundL(l) => named::fund_l(*l),
            Expr::T => named::t(),
            Expr::ConeBeta => named::cone_beta(),
            Expr::ConeRho => named::cone_rho(),
            Expr::ConeOmega => named::cone_omega(),
            Expr::Lpure(n) => pwz(&named::invertpur_pow(*n))?,
            Expr::Sum(a, b) => a.eval()?.direct_sum(&b.eval()?)?,
            Expr::Tensor(a, b) => a.eval()?.tensor(&b.eval()?)?,
            Expr::Twist(a, r) => a.eval()?.twist(*r)?,
            Expr::Shift(a, k) => a.eval()?.shift(*k),
            Expr::Dual(a) => a.eval()?.dual(),
            Expr::Cone(f) => f.eval()?.cone(),
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Expr::Zero => f.write_str("0"),
            Expr::Unit(n) => write!(f, "1({n})"),
            Expr::E(l, m) => write!(f, "E({l},{m})"),
            Expr::MotR => f.write_str("M(R)"),
            Expr::MotC => f.write_str("M(C)"),
            Expr::Fund0 => f.write_str("fund0"),
            Expr::FundL(l) => write!(f, "fundl({l})"),
            Expr::T => f.write_str("T"),
            Expr::ConeBeta => f.write_str("conebeta"),
            Expr::ConeRho => f.write_str("conerho"),
            Expr::ConeOmega => f.write_str("coneomega"),
            Expr::Lpure(n) => write!(f, "Lpure({n})"),
            Expr::Twist(a, r) => write!(f, "twist({a}, {r})"),
            Expr::Shift(a, k) => write!(f, "shift({a}, {k})"),
            Expr::Dual(a) => write!(f, "dual({a})"),
            Expr::Cone(m) => write!(f, "cone({m})"),
            Expr::Sum(a, b) => {
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
            Expr::Tensor(a, b) => {
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

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl MapExpr {
    /// Parses a map expression.
    pub fn parse(text: &str) -> Result<MapExpr, ShellError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let m = p.map()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("'*' or end of input"));
        }
        Ok(m)
    }

    /// Evaluates to a morphism in the derived category.
    pub fn eval(&self) -> Result<FracMap, ShellError> {
        let plain = |f: ChainMap| -> Result<FracMap, ShellError> { Ok(FracMap::from_map(&pwz_map(&f)?)) };
        Ok(match self {
            MapExpr::Beta => FracMap::from_map(&named::beta_unit()),
            MapExpr::BetaOf(e) => FracMap::from_map(&ChainMap::beta(&e.eval()?)?),
            MapExpr::Rho => named::rho(),
            MapExpr::BetaRho => named::beta_rho(),
            MapExpr::Eta => FracMap::from_map(&named::eta()),
            MapExpr::Eps => FracMap::from_map(&named::eps()),
            MapExpr::Iota1 => FracMap::from_map(&named::iota1()),
            MapExpr::EtaTilde => plain(named::etatilde())?,
            MapExpr::Upsilon => plain(named::upsilon())?,
            MapExpr::EpsTilde => plain(named::epstilde())?,
            MapExpr::Tensor(a, b) => a.eval()?.tensor(&b.eval()?)?,
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            MapExpr::Beta => f.write_str("beta"),
            MapExpr::BetaOf(e) => write!(f, "beta({e})"),
            MapExpr::Rho => f.write_str("rho"),
            MapExpr::BetaRho => f.write_str("betarho"),
            MapExpr::Eta => f.write_str("eta"),
            MapExpr::Eps => f.write_str("eps"),
            MapExpr::Iota1 => f.write_str("iota1"),
            MapExpr::EtaTilde => f.write_str("etatilde"),
            MapExpr::Upsilon => f.write_str("upsilon"),
            MapExpr::EpsTilde => f.write_str("epstilde"),
            MapExpr::Tensor(a, b) => {
                if nested {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, false)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, true)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ShellError {
        ShellError::Syntax { pos: self.pos, msg: format!("expected {msg}") }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ShellError> {
        if self.eat(c) { Ok(()) } else { Err(self.err(&format!("'{}'", c as char))) }
    }

    fn int(&mut self) -> Result<i32, ShellError> {
        self.ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        match std::str::from_utf8(&self.s[start..self.pos]).ok().and_then(|t| t.parse().ok()) {
            Some(n) => Ok(n),
            None => {
                self.pos = start;
                Err(self.err("integer"))
            }
        }
    }

    fn nat(&mut self) -> Result<u32, ShellError> {
        let start = self.pos;
        let n = self.int()?;
        u32::try_from(n).map_err(|_| ShellError::Syntax { pos: start, msg: "expected non-negative integer".into() })
    }

    fn ident(&mut self) -> (usize, String) {
        self.ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        (start, String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn sum(&mut self) -> Result<Expr, ShellError> {
        let mut e = self.product()?;
        while self.eat(b'+') {
            e = Expr::Sum(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, ShellError> {
        let mut e = self.atom()?;
        while self.eat(b'*') {
            e = Expr::Tensor(Box::new(e), Box::new(self.atom()?));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ShellError> {
        match self.peek() {
            None => return Err(self.err("expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                return Ok(e);
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let start = self.pos;
                return match self.int()? {
                    0 => Ok(Expr::Zero),
                    1 if self.eat(b'(') => {
                        let n = self.int()?;
                        self.expect(b')')?;
                        Ok(Expr::Unit(n))
                    }
                    1 => Ok(Expr::Unit(0)),
                    _ => Err(ShellError::Syntax { pos: start, msg: "expected 0, 1 or 1(n)".into() }),
                };
            }
            _ => {}
        }
        let (start, id) = self.ident();
        if id.is_empty() {
            return Err(self.err("expression"));
        }
        Ok(match id.as_str() {
            "fund0" => Expr::Fund0,
            "T" => Expr::T,
            "conebeta" => Expr::ConeBeta,
            "conerho" => Expr::ConeRho,
            "coneomega" => Expr::ConeOmega,
            "E" => {
                self.expect(b'(')?;
                let l = self.nat()?;
                self.expect(b',')?;
                let m = self.int()?;
                self.expect(b')')?;
                Expr::E(l, m)
            }
            "M" => {
                self.expect(b'(')?;
                let (p, which) = self.ident();
                let e = match which.as_str() {
                    "R" => Expr::MotR,
                    "C" => Expr::MotC,
                    _ => return Err(ShellError::Syntax { pos: p, msg: "expected 'R' or 'C'".into() }),
                };
                self.expect(b')')?;
                e
            }
            "fundl" | "Lpure" => {
                self.expect(b'(')?;
                let e = if id == "fundl" { Expr::FundL(self.nat()?) } else { Expr::Lpure(self.int()?) };
                self.expect(b')')?;
                e
            }
            "twist" | "shift" => {
                self.expect(b'(')?;
                let a = Box::new(self.sum()?);
                self.expect(b',')?;
                let k = self.int()?;
                self.expect(b')')?;
                if id == "twist" { Expr::Twist(a, k) } else { Expr::Shift(a, k) }
            }
            "dual" => {
                self.expect(b'(')?;
                let a = self.sum()?;
                self.expect(b')')?;
                Expr::Dual(Box::new(a))
            }
            "cone" => {
                self.expect(b'(')?;
                let m = self.map()?;
                self.expect(b')')?;
                Expr::Cone(Box::new(m))
            }
            _ => return Err(ShellError::UnknownIdent { pos: start, name: id }),
        })
    }

    fn map(&mut self) -> Result<MapExpr, ShellError> {
        let mut m = self.map_atom()?;
        while self.eat(b'*') {
            m = MapExpr::Tensor(Box::new(m), Box::new(self.map_atom()?));
        }
        Ok(m)
    }

    fn map_atom(&mut self) -> Result<MapExpr, ShellError> {
        if self.eat(b'(') {
            let m = self.map()?;
            self.expect(b')')?;
            return Ok(m);
        }
        let (start, id) = self.ident();
        if id.is_empty() {
            return Err(self.err("map"));
        }
        Ok(match id.as_str() {
            "beta" => {
                if self.eat(b'(') {
                    let e = self.sum()?;
                    self.expect(b')')?;
                    MapExpr::BetaOf(Box::new(e))
                } else {
                    MapExpr::Beta
                }
            }
            "rho" => MapExpr::Rho,
            "betarho" => MapExpr::BetaRho,
            "eta" => MapExpr::Eta,
            "eps" => MapExpr::Eps,
            "iota1" => MapExpr::Iota1,
            "etatilde" => MapExpr::EtaTilde,
            "upsilon" => MapExpr::Upsilon,
            "epstilde" => MapExpr::EpsTilde,
            _ => return Err(ShellError::UnknownIdent { pos: start, name: id }),
        })
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// A value with a canonical serialized form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    /// A filtered module.
    Module(FiltModule),
    /// A complex.
    Complex(Complex),
    /// A formal sum of indecomposables.
    FormalSum(FormalSum),
    /// A subset of the six primes.
    Support(SupportSet),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleDoc {
    sigma: MatrixDoc,
    w_min: i32,
    layers: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    kind: CellKind,
    lo: i32,
    terms: Vec<ModuleDoc>,
    diffs: Vec<MatrixDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
enum Body {
    Module(ModuleDoc),
    Complex(ComplexDoc),
    FormalSum(Vec<IndecLabel>),
    Support(Vec<String>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema: String,
    #[serde(flatten)]
    body: Body,
}

fn bits_to_string(v: &BitVec) -> String {
    v.to_string()
}

fn parse_bits(s: &str, len: usize) -> Result<BitVec, ShellError> {
    if s.len() != len || !s.bytes().all(|c| c == b'0' || c == b'1') {
        return Err(ShellError::Schema(format!("expected a bit string of length {len}, got '{s}'")));
    }
    Ok(BitVec::from_bit_str(s))
}

fn matrix_doc(m: &BitMatrix) -> MatrixDoc {
    MatrixDoc { rows: m.rows(), cols: m.cols(), data: m.row_vecs().iter().map(bits_to_string).collect() }
}

fn matrix_from(d: &MatrixDoc) -> Result<BitMatrix, ShellError> {
    if d.data.len() != d.rows {
        return Err(ShellError::Schema(format!("matrix declares {} rows, has {}", d.rows, d.data.len())));
    }
    let rows = d.data.iter().map(|r| parse_bits(r, d.cols)).collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_rows(d.cols, &rows))
}

fn module_doc(a: &FiltModule) -> ModuleDoc {
    ModuleDoc {
        sigma: matrix_doc(a.module().sigma()),
        w_min: a.w_min(),
        layers: a.layers().iter().map(|l| l.vectors().iter().map(bits_to_string).collect()).collect(),
    }
}

fn module_from(d: &ModuleDoc) -> Result<FiltModule, ShellError> {
    let sigma = matrix_from(&d.sigma)?;
    let n = sigma.rows();
    if sigma.cols() != n {
        return Err(ShellError::Schema("sigma is not square".into()));
    }
    let module = C2Module::new(sigma).map_err(|e| ShellError::Schema(format!("sigma: {e}")))?;
    let layers = d
        .layers
        .iter()
        .map(|l| Ok(Subspace::span(n, &l.iter().map(|v| parse_bits(v, n)).collect::<Result<Vec<_>, _>>()?)))
        .collect::<Result<Vec<_>, ShellError>>()?;
    FiltModule::from_layers(module, d.w_min, layers).map_err(|e| ShellError::Schema(e.to_string()))
}

fn complex_doc(x: &Complex) -> ComplexDoc {
    let diffs = match x.range() {
        Some((lo, hi)) => (lo + 1..=hi).map(|n| matrix_doc(&x.d(n))).collect(),
        None => Vec::new(),
    };
    ComplexDoc { kind: x.kind(), lo: x.lo(), terms: x.terms().iter().map(module_doc).collect(), diffs }
}

fn complex_from(d: &ComplexDoc) -> Result<Complex, ShellError> {
    let terms = d.terms.iter().map(module_from).collect::<Result<Vec<_>, _>>()?;
    let diffs = d.diffs.iter().map(matrix_from).collect::<Result<Vec<_>, _>>()?;
    Complex::new(d.kind, d.lo, terms, diffs).map_err(|e| ShellError::Schema(e.to_string()))
}

/// Canonical JSON encoding with a schema field.
pub fn serialize(value: &Object) -> String {
    let body = match value {
        Object::Module(a) => Body::Module(module_doc(a)),
        Object::Complex(x) => Body::Complex(complex_doc(x)),
        Object::FormalSum(s) => Body::FormalSum(s.labels().to_vec()),
        Object::Support(s) => Body::Support(s.iter().map(|p| p.name().to_string()).collect()),
    };
    serde_json::to_string(&Envelope { schema: SCHEMA.to_string(), body }).expect("documents serialize")
}

/// Decodes and validates a serialized value.
pub fn deserialize(text: &str) -> Result<Object, ShellError> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| ShellError::Schema(e.to_string()))?;
    if env.schema != SCHEMA {
        return Err(ShellError::Schema(format!("unsupported schema '{}'", env.schema)));
    }
    Ok(match env.body {
        Body::Module(d) => Object::Module(module_from(&d)?),
        Body::Complex(d) => Object::Complex(complex_from(&d)?),
        Body::FormalSum(ls) => Object::FormalSum(FormalSum::new(ls)),
        Body::Support(names) => Object::Support(
            names
                .iter()
                .map(|n| PrimeSix::from_name(n).ok_or_else(|| ShellError::Schema(format!("unknown prime '{n}'"))))
                .collect::<Result<_, _>>()?,
        ),
    })
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable lines.
    #[default]
    Text,
    /// One JSON object per report, with a schema field.
    JsonLike,
}

/// Command line of the `filtc2` tool.
#[derive(Debug, ClapParser)]
#[command(name = "filtc2", version, about = "Supports, classification and atlases for filtered C2-complexes")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Show which residue functors were nonzero and other derivation steps.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Atlas used by `atlas` when no name is given, and for projecting supports.
    #[arg(long, global = true)]
    pub atlas: Option<String>,
    /// The query.
    #[command(subcommand)]
    pub command: Command,
}

/// Queries. Object arguments are expressions or `@file` with a serialized complex.
#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Krull-Schmidt decomposition of each term.
    Decompose {
        /// Object.
        expr: String,
    },
    /// Minimal form of a tensor product.
    Tensor {
        /// Left factor.
        a: String,
        /// Right factor.
        b: String,
    },
    /// Minimal form of the dual.
    Dual {
        /// Object.
        expr: String,
    },
    /// Minimal form.
    Minimize {
        /// Object.
        expr: String,
    },
    /// Support among the six primes.
    Support {
        /// Object.
        expr: String,
    },
    /// Tensor ideal generated by an object.
    Classify {
        /// Object.
        expr: String,
    },
    /// Membership in the tensor ideal generated by some objects.
    Member {
        /// Candidate member.
        expr: String,
        /// Generators.
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// Derived hom dimensions `source -> target[n]`.
    Hom {
        /// Source.
        source: String,
        /// Target.
        target: String,
    },
    /// Minimal form of the graded complex.
    Gr {
        /// Object.
        expr: String,
    },
    /// Minimal form of the underlying C2-complex.
    Fgt {
        /// Object.
        expr: String,
    },
    /// Twisted forgetful functor.
    Tfgt {
        /// Object.
        expr: String,
    },
    /// Tate fold dimensions after forgetting and after grading.
    Tate {
        /// Object.
        expr: String,
    },
    /// Spectrum atlases: points, closures, closed sets, comparison maps.
    Atlas {
        /// KbA, DATM2, DTM2, DAM2, DATMZ or DATMZ-general.
        name: Option<String>,
        /// Print only the number of closed subsets.
        #[arg(long)]
        closed_count: bool,
        /// Closure of a point.
        #[arg(long)]
        closure: Option<String>,
        /// Whether a set such as `{m(3), e(all but 5)}` is closed.
        #[arg(long)]
        is_closed: Option<String>,
        /// Tabulate a comparison map, e.g. `DATM2->DTM2`.
        #[arg(long)]
        compare: Option<String>,
    },
    /// Runs the built-in check suite.
    Verify,
}

/// The outcome of one query.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Subcommand name.
    pub command: String,
    /// Canonical echo of the inputs.
    pub input: Vec<String>,
    /// Result lines.
    pub lines: Vec<String>,
    /// Structured result.
    pub data: serde_json::Value,
    /// Derivation trace.
    pub trace: Vec<String>,
    /// False when a check failed (exit code 2).
    pub ok: bool,
}

impl Report {
    fn new(command: &str, input: Vec<String>, lines: Vec<String>, data: serde_json::Value) -> Self {
        Self { command: command.to_string(), input, lines, data, trace: Vec::new(), ok: true }
    }

    /// Renders the report.
    pub fn render(&self, format: Format, trace: bool) -> String {
        match format {
            Format::Text => {
                let mut out = self.lines.join("\n");
                if trace && !self.trace.is_empty() {
                    out.push('\n');
                    out.push_str(&self.trace.iter().map(|t| format!("trace: {t}")).collect::<Vec<_>>().join("\n"));
                }
                out
            }
            Format::JsonLike => {
                let mut v = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "input": self.input,
                    "result": self.data,
                    "ok": self.ok,
                });
                if trace {
                    v["trace"] = json!(self.trace);
                }
                v.to_string()
            }
        }
    }
}

/// Resolves an object argument: an expression, or `@path` naming a file with a
/// serialized complex or module.
pub fn load_object(arg: &str) -> Result<(String, Complex), ShellError> {
    if let Some(path) = arg.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| ShellError::Usage(format!("{path}: {e}")))?;
        let x = match deserialize(&text)? {
            Object::Complex(x) => x,
            Object::Module(a) => Complex::single(a, 0),
            _ => return Err(ShellError::Schema("expected a complex or module".into())),
        };
        if x.kind() != CellKind::Filtered {
            return Err(ShellError::Schema("expected a filtered complex".into()));
        }
        return Ok((arg.to_string(), x));
    }
    let e = Expr::parse(arg)?;
    let x = e.eval()?;
    Ok((e.to_string(), x))
}

fn minimal_report(command: &str, input: Vec<String>, x: &Complex) -> Result<Report, ShellError> {
    let m = minimize(x)?;
    let s = signature_string(&m.signature);
    let data = json!({ "signature": s, "complex": serde_json::from_str::<serde_json::Value>(&serialize(&Object::Complex(m.complex.clone()))).expect("valid json") });
    let mut r = Report::new(command, input, vec![s], data);
    r.trace.push(format!("input total dimension {}, minimal {}", x.total_dim(), m.complex.total_dim()));
    Ok(r)
}

fn support_trace(x: &Complex) -> Result<(SupportSet, Vec<String>), ShellError> {
    let (s, tests) = supp_traced(x)?;
    let trace = tests
        .iter()
        .map(|t| format!("{}: {} -> {}", t.prime, t.functor, if t.nonzero { "nonzero" } else { "zero" }))
        .collect();
    Ok((s, trace))
}

fn project_support(s: SupportSet, target: &str) -> Result<Vec<&'static str>, ShellError> {
    let map = match target {
        "DTM2" => "DATM2->DTM2",
        "DAM2" => "DATM2->DAM2",
        "DATM2" => return Ok(s.iter().map(PrimeSix::name).collect()),
        _ => return Err(ShellError::Usage(format!("cannot project supports to atlas '{target}'"))),
    };
    let mut out: Vec<&'static str> = Vec::new();
    for p in s.iter() {
        let q = compare(map, p.name())?;
        if !out.contains(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Parses a symbolic set of integral points such as
/// `{P0, N, m(3), e(all), m(all but 3, 5)}`.
pub fn parse_symbolic_set(text: &str) -> Result<SymbolicSet, ShellError> {
    let bad = |m: &str| ShellError::Usage(format!("bad point set: {m}"));
    let inner = text.trim().strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(|| bad("missing braces"))?;
    let mut out = SymbolicSet::default();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        // Items are split on commas outside parentheses.
        let mut depth = 0;
        let end = rest
            .char_indices()
            .find(|&(_, c)| {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                c == ',' && depth == 0
            })
            .map_or(rest.len(), |(i, _)| i);
        let item = rest[..end].trim();
        rest = rest[end..].trim_start_matches(',').trim();
        let family = |pre: &str| -> Option<Result<std::collections::BTreeSet<u64>, ShellError>> {
            let arg = item.strip_prefix(pre)?.strip_suffix(')')?.trim();
            let arg = arg.strip_prefix("all")?.trim();
            if arg.is_empty() {
                return Some(Ok(Default::default()));
            }
            let ex = arg.strip_prefix("but")?;
            Some(ex.split(',').map(|t| t.trim().parse::<u64>().map_err(|_| bad(item))).collect())
        };
        if let Some(ex) = family("e(") {
            out.e_family_except = Some(ex?);
        } else if let Some(ex) = family("m(") {
            out.m_family_except = Some(ex?);
        } else {
            out.points.insert(IntPoint::parse(item).ok_or_else(|| bad(item))?);
        }
    }
    Ok(out)
}

fn atlas_report(
    name: &str,
    closed_count: bool,
    closure: Option<&str>,
    is_closed: Option<&str>,
    cmp: Option<&str>,
) -> Result<Report, ShellError> {
    let a = atlas(name)?;
    let input = vec![name.to_string()];
    if let Some(map) = cmp {
        let source = match map.split("->").next() {
            Some("KbA") => crate::spectrum::atlas_kba(),
            _ => crate::spectrum::atlas_datm2(),
        };
        let mut lines = Vec::new();
        let mut table = serde_json::Map::new();
        for p in &source.points {
            let q = compare(map, p)?;
            lines.push(format!("{p} -> {q}"));
            table.insert(p.to_string(), json!(q));
        }
        return Ok(Report::new("atlas", input, lines, serde_json::Value::Object(table)));
    }
    match a {
        Atlas::Finite(poset) => {
            if closed_count {
                let n = poset.closed_subsets().len();
                return Ok(Report::new("atlas", input, vec![n.to_string()], json!(n)));
            }
            if let Some(p) = closure {
                let c = poset.closure(p)?;
                return Ok(Report::new("atlas", input, vec![format!("{{{}}}", c.join(", "))], json!(c)));
            }
            if let Some(s) = is_closed {
                let pts: Vec<&str> = s
                    .trim()
                    .trim_start_matches('{')
                    .trim_end_matches('}')
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .collect();
                let b = poset.is_closed(&pts)?;
                return Ok(Report::new("atlas", input, vec![b.to_string()], json!(b)));
            }
            let mut lines = vec![format!("points: {}", poset.points.join(", "))];
            let mut closures = serde_json::Map::new();
            for p in &poset.points {
                let c = poset.closure(p)?;
                lines.push(format!("closure({p}) = {{{}}}", c.join(", ")));
                closures.insert(p.to_string(), json!(c));
            }
            let n = poset.closed_subsets().len();
            lines.push(format!("closed subsets: {n}"));
            Ok(Report::new("atlas", input, lines, json!({ "points": poset.points, "closures": closures, "closed_count": n })))
        }
        Atlas::Integral(z) => {
            let flag = if z.p0_conjectural { " (P0 conjectural)" } else { "" };
            if closed_count {
                return Ok(Report::new("atlas", input, vec!["infinite".into()], json!("infinite")));
            }
            if let Some(p) = closure {
                let pt = IntPoint::parse(p).ok_or_else(|| ShellError::Usage(format!("unknown point '{p}'")))?;
                let c = z.closure(pt);
                return Ok(Report::new("atlas", input, vec![format!("{c}{flag}")], json!(c.to_string())));
            }
            if let Some(s) = is_closed {
                let set = parse_symbolic_set(s)?;
                let b = z.is_closed(&set);
                return Ok(Report::new("atlas", input, vec![b.to_string()], json!(b)));
            }
            let lines = vec![
                format!("points: L, Ls, M, Ms, N = e(2), Ns = m(2), e(l), m(l) for odd primes l, P0{flag}"),
                "e(l) < m(l); P0 < e(l) for every prime l".to_string(),
                "closed: finite specialization-closed sets, and specialization-closed sets containing P0".to_string(),
            ];
            Ok(Report::new("atlas", input, lines, json!({ "conjectural_p0": z.p0_conjectural })))
        }
    }
}

/// Runs one query.
pub fn run(cli: &Cli) -> Result<Report, ShellError> {
    let one = |arg: &str| load_object(arg);
    Ok(match &cli.command {
        Command::Decompose { expr } => {
            let (e, x) = one(expr)?;
            let mut lines = Vec::new();
            let mut data = serde_json::Map::new();
            if let Some((lo, hi)) = x.range() {
                for n in (lo..=hi).rev() {
                    let t = x.term(n).expect("in range");
                    let d = decompose(t)?;
                    if !d.validate(t) {
                        return Err(ShellError::Engine(format!("decomposition certificate failed in degree {n}")));
                    }
                    lines.push(format!("{n}: {}", d.sum));
                    data.insert(n.to_string(), json!(d.sum.to_string()));
                }
            } else {
                lines.push("0".into());
            }
            Report::new("decompose", vec![e], lines, serde_json::Value::Object(data))
        }
        Command::Tensor { a, b } => {
            let (ea, xa) = one(a)?;
            let (eb, xb) = one(b)?;
            minimal_report("tensor", vec![ea, eb], &xa.tensor(&xb)?)?
        }
        Command::Dual { expr } => {
            let (e, x) = one(expr)?;
            minimal_report("dual", vec![e], &x.dual())?
        }
        Command::Minimize { expr } => {
            let (e, x) = one(expr)?;
            minimal_report("minimize", vec![e], &x)?
        }
        Command::Gr { expr } => {
            let (e, x) = one(expr)?;
            minimal_report("gr", vec![e], &gr_complex(&x)?)?
        }
        Command::Fgt { expr } => {
            let (e, x) = one(expr)?;
            minimal_report("fgt", vec![e], &fgt_complex(&x)?)?
        }
        Command::Tfgt { expr } => {
            let (e, x) = one(expr)?;
            minimal_report("tfgt", vec![e], &tfgt(&x)?)?
        }
        Command::Tate { expr } => {
            let (e, x) = one(expr)?;
            let f = tate_dim(&fgt_complex(&x)?);
            let g = tate_dim(&gr_complex(&x)?);
            Report::new(
                "tate",
                vec![e],
                vec![format!("tate(fgt) = {f}"), format!("tate(gr) = {g}")],
                json!({ "fgt": f, "gr": g }),
            )
        }
        Command::Support { expr } => {
            let (e, x) = one(expr)?;
            let (s, trace) = support_trace(&x)?;
            let mut lines = vec![s.to_string()];
            let mut data = json!({ "support": s.iter().map(PrimeSix::name).collect::<Vec<_>>() });
            if let Some(target) = &cli.atlas {
                let img = project_support(s, target)?;
                lines.push(format!("image in {target}: {{{}}}", img.join(", ")));
                data["image"] = json!(img);
            }
            let mut r = Report::new("support", vec![e], lines, data);
            r.trace = trace;
            r
        }
        Command::Classify { expr } => {
            let (e, x) = one(expr)?;
            let c = classify(&x)?;
            let (_, trace) = support_trace(&x)?;
            let data = json!({
                "support": c.support.iter().map(PrimeSix::name).collect::<Vec<_>>(),
                "generator": c.generator,
            });
            let mut r = Report::new("classify", vec![e], vec![c.to_string()], data);
            r.trace = trace;
            r
        }
        Command::Member { expr, generators } => {
            let (e, x) = one(expr)?;
            let mut input = vec![e];
            let mut gens = Vec::new();
            let mut trace = Vec::new();
            for g in generators {
                let (eg, xg) = one(g)?;
                trace.push(format!("supp({eg}) = {}", supp(&xg)?));
                input.push(eg);
                gens.push(xg);
            }
            trace.push(format!("supp({}) = {}", input[0], supp(&x)?));
            let b = ideal_contains(&gens, &x)?;
            let mut r = Report::new("member", input, vec![b.to_string()], json!(b));
            r.trace = trace;
            r
        }
        Command::Hom { source, target } => {
            let (ea, xa) = one(source)?;
            let (eb, xb) = one(target)?;
            let dims = hom_de(&xa, &xb)?;
            let mut lines: Vec<String> = dims.iter().map(|(n, d)| format!("n={n}: {d}")).collect();
            lines.push("otherwise: 0".into());
            let table: serde_json::Map<String, serde_json::Value> =
                dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
            Report::new("hom", vec![ea, eb], lines, serde_json::Value::Object(table))
        }
        Command::Atlas { name, closed_count, closure, is_closed, compare } => {
            let n = name.as_deref().or(cli.atlas.as_deref()).unwrap_or("DATM2");
            atlas_report(n, *closed_count, closure.as_deref(), is_closed.as_deref(), compare.as_deref())?
        }
        Command::Verify => {
            let checks = verify_suite();
            let ok = checks.iter().all(|c| c.pass);
            let lines = checks
                .iter()
                .map(|c| format!("{} {}{}", if c.pass { "PASS" } else { "FAIL" }, c.name, detail(&c.detail)))
                .collect();
            let data = json!(checks
                .iter()
                .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
                .collect::<Vec<_>>());
            let mut r = Report::new("verify", Vec::new(), lines, data);
            r.ok = ok;
            r
        }
    })
}

fn detail(d: &str) -> String {
    if d.is_empty() { String::new() } else { format!(": {d}") }
}

// ---------------------------------------------------------------------------
// Check suite
// ---------------------------------------------------------------------------

/// One named check of the built-in suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    /// Descriptive name.
    pub name: &'static str,
    /// Outcome.
    pub pass: bool,
    /// Mismatch details, empty on success.
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<Vec<String>, ShellError>) -> Check {
    match f() {
        Ok(misses) => Check { name, pass: misses.is_empty(), detail: misses.join("; ") },
        Err(e) => Check { name, pass: false, detail: e.to_string() },
    }
}

fn supp_of(text: &str) -> Result<SupportSet, ShellError> {
    Ok(supp(&Expr::parse(text)?.eval()?)?)
}

fn expect_eq<T: PartialEq + fmt::Debug>(misses: &mut Vec<String>, what: &str, got: T, want: T) {
    if got != want {
        misses.push(format!("{what}: got {got:?}, expected {want:?}"));
    }
}

fn iso_to(x: &Complex, y: &Complex) -> Result<bool, ShellError> {
    let mx = minimize(x)?.complex;
    let my = minimize(y)?.complex;
    Ok(mx.signature()? == my.signature()? && find_chain_iso(&mx, &my, 0).is_some())
}

/// The objects and expected supports of the basic support table.
pub const SUPPORT_TABLE: [(&str, &[PrimeSix]); 10] = {
    use PrimeSix::*;
    [
        ("E(0,0)", &[N, Ns]),
        ("E(1,0)", &[Ls, Ms, N, Ns]),
        ("E(2,0)", &[L, Ls, Ms, N, Ns]),
        ("E(3,0)", &[L, Ls, Ms, N, Ns]),
        ("E(4,0)", &[L, Ls, Ms, N, Ns]),
        ("conebeta", &[L, Ls, Ms, Ns]),
        ("fund0", &[L, Ls]),
        ("T", &[Ls, Ms, Ns]),
        ("conebeta * E(0,0)", &[Ns]),
        ("fund0 * E(1,0)", &[Ls]),
    ]
};

/// Runs the built-in check suite.
pub fn verify_suite() -> Vec<Check> {
    vec![
        check("supports of the basic objects", || {
            let mut m = Vec::new();
            for (e, want) in SUPPORT_TABLE {
                expect_eq(&mut m, e, supp_of(e)?, SupportSet::of(want));
            }
            Ok(m)
        }),
        check("fourteen tensor ideals realized", || {
            let mut m = Vec::new();
            let mut seen = Vec::new();
            for (pts, g) in CLASS_GENERATORS {
                let s = supp_of(g)?;
                expect_eq(&mut m, g, s, SupportSet::of(pts));
                seen.push(s);
            }
            seen.sort();
            seen.dedup();
            expect_eq(&mut m, "distinct classes", seen, closed_supports());
            Ok(m)
        }),
        check("motivic cohomology of the base", || {
            let mut m = Vec::new();
            for n in -1..=6 {
                for w in -1..=6 {
                    let want = usize::from(0 <= n && n <= w);
                    expect_eq(&mut m, &format!("H({n},{w})"), motivic_cohomology(n, w)?, want);
                }
            }
            Ok(m)
        }),
        check("prime generators and Koszul cones", || {
            Ok(verify_prime_generators()?
                .into_iter()
                .filter(|c| !c.pass())
                .map(|c| format!("{} by {}: {} vs {}", c.prime, c.generators, c.computed, c.expected))
                .collect())
        }),
        check("motivic generators of the primes", || {
            let mut m = Vec::new();
            for (p, gens) in PRIME_GENERATORS {
                let mut u = SupportSet::empty();
                for g in gens {
                    u = u.union(supp(&crate::motives::MotiveExpr::parse(g)?.to_filtered()?)?);
                }
                expect_eq(&mut m, p.name(), u, p.ideal_support());
            }
            Ok(m)
        }),
        check("invertibility of the pure invertible complexes", || {
            let mut m = Vec::new();
            let unit = Complex::unit(CellKind::PlainC2);
            for n in -4..=4 {
                let x = named::invertpur_pow(n).tensor(&named::invertpur_pow(-n))?;
                expect_eq(&mut m, &format!("L^{n} * L^{}", -n), minimize(&x)?.complex, unit.clone());
            }
            Ok(m)
        }),
        check("twisted forgetful functor on named objects", || {
            let mut m = Vec::new();
            for n in -3..=3 {
                if !iso_to(&tfgt(&named::unit(n))?, &named::invertpur_pow(-n))? {
                    m.push(format!("tfgt(1({n}))"));
                }
            }
            if !iso_to(&tfgt(&named::cone_beta())?, &named::fundpur().shift(-1))? {
                m.push("tfgt(conebeta)".into());
            }
            for l in 1..=3u32 {
                let want = Complex::plain(C2Module::regular(), 0)
                    .direct_sum(&named::fundpur_pow(l as i32 - 1).shift(-(l as i32)))?;
                if !iso_to(&tfgt(&named::e(l, 0))?, &want)? {
                    m.push(format!("tfgt(E({l},0))"));
                }
            }
            Ok(m)
        }),
        check("cone of rho is E(1,0) shifted", || {
            let mut m = Vec::new();
            if !iso_to(&named::cone_rho(), &named::e(1, 0).shift(1))? {
                m.push("not isomorphic".into());
            }
            Ok(m)
        }),
        check("derived homs from the unit to its third twist", || {
            let mut m = Vec::new();
            let d = hom_de(&named::unit(0), &named::unit(3))?;
            for n in -2..=6 {
                expect_eq(&mut m, &format!("n={n}"), d.get(n), usize::from((0..=3).contains(&n)));
            }
            Ok(m)
        }),
        check("closed subset counts of the finite atlases", || {
            let mut m = Vec::new();
            for (name, want) in [("DATM2", 14), ("DTM2", 6), ("DAM2", 5), ("KbA", 5)] {
                let Atlas::Finite(p) = atlas(name)? else { unreachable!("finite atlas") };
                expect_eq(&mut m, name, p.closed_subsets().len(), want);
            }
            Ok(m)
        }),
        check("comparison maps between atlases", || {
            use PrimeSix::*;
            let mut m = Vec::new();
            let tm = [(L, "<cone rho>"), (N, "<cone beta>"), (M, "<cone beta rho>"), (Ls, "0"), (Ms, "0"), (Ns, "0")];
            for (p, q) in tm {
                expect_eq(&mut m, &format!("DTM2 image of {p}"), compare("DATM2->DTM2", p.name())?, q);
            }
            let am = [
                (L, "<M(C)>"),
                (Ls, "<M(C)>"),
                (N, "<fund0>"),
                (Ns, "<fund0>"),
                (M, "<M(C), fund0>"),
                (Ms, "<M(C), fund0>"),
            ];
            for (p, q) in am {
                expect_eq(&mut m, &format!("DAM2 image of {p}"), compare("DATM2->DAM2", p.name())?, q);
            }
            Ok(m)
        }),
        check("closed sets of the integral atlas", || {
            let mut m = Vec::new();
            let Atlas::Integral(z) = atlas("DATMZ")? else { unreachable!("integral atlas") };
            for (s, want) in [("{m(3)}", true), ("{N, e(all)}", false), ("{P0, N, Ns, e(all), m(all)}", true)] {
                expect_eq(&mut m, s, z.is_closed(&parse_symbolic_set(s)?), want);
            }
            Ok(m)
        }),
        check("serialization round trips and validation", || {
            let mut m = Vec::new();
            let a = crate::filtmod::realize(IndecLabel::E(2, 0));
            expect_eq(&mut m, "E(2,0)", deserialize(&serialize(&Object::Module(a.clone())))?, Object::Module(a));
            let f = named::fund0();
            let Object::Complex(g) = deserialize(&serialize(&Object::Complex(f.clone())))? else {
                return Err(ShellError::Schema("expected a complex".into()));
            };
            expect_eq(&mut m, "supp(fund0)", supp(&g)?, supp(&f)?);
            let bad = r#"{"schema":"filtc2/1","type":"module","value":{"sigma":{"rows":2,"cols":2,"data":["01","10"]},"w_min":0,"layers":[["11","10"],["10"],[]]}}"#;
            if deserialize(bad).is_ok() {
                m.push("non-stable layer accepted".into());
            }
            Ok(m)
        }),
        check("expression printing is canonical", || {
            let mut m = Vec::new();
            for t in ["E(1,0) * E(2,0)", "fund0 + T", "cone(beta) * M(C)", "twist(dual(E(2,-1)), 3)", "cone(etatilde * upsilon)"] {
                let p = Expr::parse(t)?.to_string();
                expect_eq(&mut m, t, Expr::parse(&p)?.to_string(), p.clone());
            }
            Ok(m)
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Report, ShellError> {
        let mut v = vec!["filtc2"];
        v.extend_from_slice(args);
        run(&Cli::try_parse_from(v).map_err(|e| ShellError::Usage(e.to_string()))?)
    }

    #[test]
    fn parse_examples() {
        assert!(matches!(Expr::parse("E(1,0) * E(2,0)").unwrap(), Expr::Tensor(..)));
        assert!(matches!(Expr::parse("fund0 + T").unwrap(), Expr::Sum(..)));
        assert_eq!(supp_of("cone(beta) * E(0,0)").unwrap(), SupportSet::of(&[PrimeSix::Ns]));
        assert_eq!(supp_of("fund0 + T").unwrap(), supp_of("fund0").unwrap().union(supp_of("T").unwrap()));
        assert!(matches!(Expr::parse("E(1,0) +"), Err(ShellError::Syntax { pos: 8, .. })));
        assert!(matches!(Expr::parse("fund9"), Err(ShellError::UnknownIdent { pos: 0, .. })));
        assert_eq!(Expr::parse(" ( 1 ( 2 ) ) ").unwrap(), Expr::Unit(2));
    }

    #[test]
    fn command_examples() {
        assert_eq!(run_args(&["support", "fund0"]).unwrap().lines, vec!["{L, Ls}"]);
        assert_eq!(run_args(&["atlas", "DATM2", "--closed-count"]).unwrap().lines, vec!["14"]);
        let h = run_args(&["hom", "1", "1(3)"]).unwrap();
        assert_eq!(h.lines, vec!["n=0: 1", "n=1: 1", "n=2: 1", "n=3: 1", "otherwise: 0"]);
        assert!(run_args(&["support", "--atlas", "DTM2", "conerho"]).unwrap().lines[1].starts_with("image in DTM2"));
        assert_eq!(run_args(&["atlas", "DATMZ", "--is-closed", "{m(3)}"]).unwrap().lines, vec!["true"]);
        assert_eq!(run_args(&["member", "E(0,0)", "E(1,0)"]).unwrap().lines, vec!["true"]);
        assert_eq!(run_args(&["decompose", "E(1,0) + 1(2)"]).unwrap().lines, vec!["0: 1(2) + E(1,0)"]);
        let j = run_args(&["classify", "T"]).unwrap().render(Format::JsonLike, true);
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(run_args(&["support", "bogus"]).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn verify_passes() {
        for c in verify_suite() {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let x = named::t();
        assert_eq!(deserialize(&serialize(&Object::Complex(x.clone()))).unwrap(), Object::Complex(x));
        let s = FormalSum::new(vec![IndecLabel::E(1, 2), IndecLabel::Unit(-1)]);
        assert_eq!(deserialize(&serialize(&Object::FormalSum(s.clone()))).unwrap(), Object::FormalSum(s));
        let p = SupportSet::of(&[PrimeSix::L, PrimeSix::Ns]);
        assert_eq!(deserialize(&serialize(&Object::Support(p))).unwrap(), Object::Support(p));
        assert!(matches!(deserialize(r#"{"schema":"filtc2/0","type":"support","value":[]}"#), Err(ShellError::Schema(_))));
    }
}
