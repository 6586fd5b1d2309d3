//! Exact arithmetic in the coefficient field: fractions of multivariate
//! polynomials over arbitrary-precision rationals in the deformation symbol
//! `q` and a set of declared parameter symbols.
//!
//! Every value is kept in canonical form: numerator and denominator share no
//! nonconstant common factor, the denominator's leading coefficient under the
//! graded-lex monomial order is 1, and zero is `0/1`. Equality of canonical
//! forms is plain structural equality.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

/// Interned symbol identifier. `Sym(0)` is always the deformation symbol `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

/// The reserved deformation symbol.
pub const Q: Sym = Sym(0);

struct Interner {
    names: Vec<String>,
    index: BTreeMap<String, u32>,
}

fn interner() -> &'static Mutex<Interner> {
    static TABLE: OnceLock<Mutex<Interner>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut index = BTreeMap::new();
        index.insert("q".to_string(), 0);
        Mutex::new(Interner {
            names: vec!["q".to_string()],
            index,
        })
    })
}

impl Sym {
    /// Intern a symbol by name. Repeated calls with the same name return the
    /// same identifier. Symbol order (used by the monomial order) is first-use
    /// order, with `q` always first.
    pub fn intern(name: &str) -> Sym {
        let mut t = interner().lock().unwrap();
        if let Some(&id) = t.index.get(name) {
            return Sym(id);
        }
        let id = t.names.len() as u32;
        t.names.push(name.to_string());
        t.index.insert(name.to_string(), id);
        Sym(id)
    }

    /// Look up a symbol without interning it.
    pub fn lookup(name: &str) -> Option<Sym> {
        interner().lock().unwrap().index.get(name).copied().map(Sym)
    }

    pub fn name(self) -> String {
        interner().lock().unwrap().names[self.0 as usize].clone()
    }
}

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------

/// Errors raised by scalar-domain operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid parameter name {0:?}: must be nonempty, unique, and none of q, x, y, z")]
    InvalidParamName(String),
    #[error("specialization does not cover symbol {0}")]
    MissingAssignment(String),
    #[error("denominator vanishes under the given specialization")]
    SpecializationPole,
    #[error("q may not be specialized to 0, 1, or -1")]
    InadmissibleQ,
}

/// An ordered set of declared parameter symbols. `q` is implicitly present
/// and reserved; so are the algebra generators `x`, `y`, `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSet {
    names: Vec<String>,
    syms: Vec<Sym>,
}

impl ParamSet {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Result<Self, ScalarError> {
        let mut seen = BTreeMap::new();
        let mut out_names = Vec::new();
        let mut syms = Vec::new();
        for n in names {
            let n = n.as_ref();
            if n.is_empty() || n == "q" || n == "x" || n == "y" || n == "z" {
                return Err(ScalarError::InvalidParamName(n.to_string()));
            }
            if !n.chars().next().unwrap().is_ascii_alphabetic() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ScalarError::InvalidParamName(n.to_string()));
            }
            if seen.insert(n.to_string(), ()).is_some() {
                return Err(ScalarError::InvalidParamName(n.to_string()));
            }
            out_names.push(n.to_string());
            syms.push(Sym::intern(n));
        }
        Ok(ParamSet {
            names: out_names,
            syms,
        })
    }

    pub fn empty() -> Self {
        ParamSet {
            names: Vec::new(),
            syms: Vec::new(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn syms(&self) -> &[Sym] {
        &self.syms
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn resolve(&self, name: &str) -> Option<Sym> {
        if name == "q" {
            return Some(Q);
        }
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.syms[i])
    }

    /// Extend with additional names (used internally for generated unknowns).
    pub fn extended<I: IntoIterator<Item = S>, S: AsRef<str>>(
        &self,
        extra: I,
    ) -> Result<Self, ScalarError> {
        let all: Vec<String> = self
            .names
            .iter()
            .cloned()
            .chain(extra.into_iter().map(|s| s.as_ref().to_string()))
            .collect();
        ParamSet::new(all)
    }
}

// ---------------------------------------------------------------------------
// Monomials in the coefficient symbols
// ---------------------------------------------------------------------------

/// Exponent vector of a coefficient monomial, sorted by symbol, no zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Expt(pub Vec<(Sym, u32)>);

impl Expt {
    pub fn one() -> Self {
        Expt(Vec::new())
    }

    pub fn var(s: Sym, e: u32) -> Self {
        if e == 0 {
            Expt::one()
        } else {
            Expt(vec![(s, e)])
        }
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exp_of(&self, s: Sym) -> u32 {
        self.0
            .iter()
            .find(|&&(t, _)| t == s)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Expt) -> Expt {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Expt(out)
    }

    /// Exact division; `None` if `other` does not divide `self`.
    pub fn div(&self, other: &Expt) -> Option<Expt> {
        let mut out = Vec::new();
        let mut j = 0;
        for &(s, e) in &self.0 {
            let mut oe = 0;
            while j < other.0.len() && other.0[j].0 < s {
                return None; // other has a variable self lacks
            }
            if j < other.0.len() && other.0[j].0 == s {
                oe = other.0[j].1;
                j += 1;
            }
            if oe > e {
                return None;
            }
            if e - oe > 0 {
                out.push((s, e - oe));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Expt(out))
    }

    pub fn gcd(&self, other: &Expt) -> Expt {
        let mut out = Vec::new();
        for &(s, e) in &self.0 {
            let oe = other.exp_of(s);
            let m = e.min(oe);
            if m > 0 {
                out.push((s, m));
            }
        }
        Expt(out)
    }

    pub fn vars(&self) -> impl Iterator<Item = Sym> + '_ {
        self.0.iter().map(|&(s, _)| s)
    }
}

/// Graded-lex order: first by total degree, then lexicographically by the
/// exponent vector with `q` before parameters in first-use order.
impl Ord for Expt {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // Walk symbols in increasing order; larger exponent first wins.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(sa, ea)), Some(&(sb, eb))) => {
                    if sa == sb {
                        match ea.cmp(&eb) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            o => return o,
                        }
                    } else if sa < sb {
                        // self has a positive exponent on an earlier symbol
                        return Ordering::Greater;
                    } else {
                        return Ordering::Less;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Expt {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// Multivariate polynomials
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial over BigRational.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Expt, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Expt::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(s: Sym) -> Self {
        Poly::monomial(Expt::var(s, 1), BigRational::one())
    }

    pub fn monomial(e: Expt, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Expt::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.0.is_empty())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    /// Leading term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Expt, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Expt, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.mul(eb);
                let c = ca * cb;
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul_expt(&self, e: &Expt) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.mul(e), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        out
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut vs: Vec<Sym> = Vec::new();
        for e in self.terms.keys() {
            for s in e.vars() {
                if !vs.contains(&s) {
                    vs.push(s);
                }
            }
        }
        vs.sort();
        vs
    }

    pub fn contains_var(&self, s: Sym) -> bool {
        self.terms.keys().any(|e| e.exp_of(s) > 0)
    }

    pub fn degree_in(&self, s: Sym) -> u32 {
        self.terms.keys().map(|e| e.exp_of(s)).max().unwrap_or(0)
    }

    /// Monomial content: the gcd of the exponent vectors.
    pub fn monomial_content(&self) -> Expt {
        let mut it = self.terms.keys();
        let mut g = match it.next() {
            Some(e) => e.clone(),
            None => return Expt::one(),
        };
        for e in it {
            g = g.gcd(e);
            if g.0.is_empty() {
                break;
            }
        }
        g
    }

    /// View as a univariate polynomial in `s` with Poly coefficients.
    pub fn coeffs_in(&self, s: Sym) -> Vec<Poly> {
        let d = self.degree_in(s) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (e, c) in &self.terms {
            let k = e.exp_of(s) as usize;
            let rest = Expt(e.0.iter().filter(|&&(t, _)| t != s).cloned().collect());
            let entry = out[k].terms.entry(rest).or_insert_with(BigRational::zero);
            *entry += c;
        }
        for p in &mut out {
            p.terms.retain(|_, c| !c.is_zero());
        }
        out
    }

    pub fn from_coeffs_in(s: Sym, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            out = out.add(&p.mul_expt(&Expt::var(s, k as u32)));
        }
        out
    }

    /// Exact polynomial division: `self = q * d` with no remainder.
    /// Returns `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(BigRational::one() / c)));
        }
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        let (dl_e, dl_c) = {
            let (e, c) = d.leading().unwrap();
            (e.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rl_e, rl_c) = {
                let (e, c) = rem.leading().unwrap();
                (e.clone(), c.clone())
            };
            let qe = rl_e.div(&dl_e)?;
            let qc = rl_c / dl_c.clone();
            let t = Poly::monomial(qe, qc);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        Some(quo)
    }

    /// Substitute symbols by rational values (must cover every symbol present).
    pub fn eval(&self, assign: &BTreeMap<Sym, BigRational>) -> Result<BigRational, ScalarError> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for &(s, k) in &e.0 {
                let v = assign
                    .get(&s)
                    .ok_or_else(|| ScalarError::MissingAssignment(s.name()))?;
                let mut p = BigRational::one();
                for _ in 0..k {
                    p *= v;
                }
                term *= p;
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Substitute some symbols by scalar values, keeping the rest symbolic.
    pub fn substitute(&self, assign: &BTreeMap<Sym, Scalar>) -> Scalar {
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut term = Scalar::constant(c.clone());
            let mut kept = Expt::one();
            for &(s, k) in &e.0 {
                match assign.get(&s) {
                    Some(v) => {
                        let mut p = Scalar::one();
                        for _ in 0..k {
                            p = p.mul(v);
                        }
                        term = term.mul(&p);
                    }
                    None => kept = kept.mul(&Expt::var(s, k)),
                }
            }
            term = term.mul(&Scalar::from_poly(Poly::monomial(kept, BigRational::one())));
            acc = acc.add(&term);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// GCD
// ---------------------------------------------------------------------------

fn rat_content(p: &Poly) -> BigRational {
    // gcd of numerators over lcm of denominators, sign-normalized positive
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for c in p.terms.values() {
        num_gcd = num::integer::gcd(num_gcd, c.numer().abs());
        den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
    }
    if num_gcd.is_zero() {
        return BigRational::one();
    }
    BigRational::new(num_gcd, den_lcm)
}

/// GCD of multivariate polynomials over the rationals, normalized so the
/// leading coefficient (graded-lex) is 1. Primitive PRS on a chosen main
/// variable, recursing on the coefficients.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let g = poly_gcd_inner(a, b);
    if g.is_zero() {
        return g;
    }
    let lc = g.leading().unwrap().1.clone();
    g.scale(&(BigRational::one() / lc))
}

fn poly_gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // Monomial content out front.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = a.div_exact(&Poly::monomial(ma.clone(), BigRational::one())).unwrap();
    let b1 = b.div_exact(&Poly::monomial(mb.clone(), BigRational::one())).unwrap();
    let g1 = if a1.is_constant() || b1.is_constant() {
        Poly::one()
    } else {
        let vars_a = a1.vars();
        let v = *vars_a
            .iter()
            .find(|s| b1.contains_var(**s))
            .unwrap_or(&vars_a[0]);
        if !b1.contains_var(v) {
            Poly::one()
        } else {
            gcd_prs(&a1, &b1, v)
        }
    };
    g1.mul_expt(&mg)
}

fn content_in(p: &Poly, v: Sym) -> Poly {
    let coeffs = p.coeffs_in(v);
    let mut g = Poly::zero();
    for c in &coeffs {
        if !c.is_zero() {
            g = poly_gcd_inner(&g, c);
            if g.is_constant() && !g.is_zero() {
                return Poly::one();
            }
        }
    }
    g
}

fn gcd_prs(a: &Poly, b: &Poly, v: Sym) -> Poly {
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cg = poly_gcd_inner(&ca, &cb);
    let pa = a.div_exact(&ca).unwrap();
    let pb = b.div_exact(&cb).unwrap();

    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        if g.is_zero() {
            break;
        }
        if g.degree_in(v) == 0 {
            f = Poly::one();
            break;
        }
        let r = pseudo_rem(&f, &g, v);
        f = g;
        g = if r.is_zero() {
            r
        } else {
            // primitive part to keep growth down
            let cr = content_in(&r, v);
            let pr = r.div_exact(&cr).unwrap();
            let rc = rat_content(&pr);
            pr.scale(&(BigRational::one() / rc))
        };
    }
    let pf = if f.is_constant() {
        Poly::one()
    } else {
        let cf = content_in(&f, v);
        f.div_exact(&cf).unwrap()
    };
    cg.mul(&pf)
}

fn pseudo_rem(a: &Poly, b: &Poly, v: Sym) -> Poly {
    let db = b.degree_in(v);
    let bl = b.coeffs_in(v)[db as usize].clone();
    let mut r = a.clone();
    loop {
        let dr = r.degree_in(v);
        if r.is_zero() || dr < db {
            return r;
        }
        let rl = r.coeffs_in(v)[dr as usize].clone();
        // r := bl*r - rl * v^(dr-db) * b
        let shift = Poly::monomial(Expt::var(v, dr - db), BigRational::one());
        r = r.mul(&bl).sub(&rl.mul(&shift).mul(b));
    }
}

// ---------------------------------------------------------------------------
// Scalars: the fraction field
// ---------------------------------------------------------------------------

/// An element of the fraction field, kept in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    fn canonical(num: Poly, den: Poly) -> Scalar {
        assert!(!den.is_zero(), "scalar with zero denominator");
        if num.is_zero() {
            return Scalar {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let (mut num, mut den) = (num, den);
        if !den.is_one() {
            let g = poly_gcd(&num, &den);
            if !g.is_one() {
                num = num.div_exact(&g).unwrap();
                den = den.div_exact(&g).unwrap();
            }
        }
        // normalize: denominator leading coefficient 1
        let lc = den.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = BigRational::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Scalar { num, den }
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_frac(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::canonical(num, den))
    }

    pub fn zero() -> Scalar {
        Scalar::from_poly(Poly::zero())
    }

    pub fn one() -> Scalar {
        Scalar::from_poly(Poly::one())
    }

    pub fn constant(c: BigRational) -> Scalar {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_poly(Poly::from_int(n))
    }

    pub fn from_rational(num: i64, den: i64) -> Scalar {
        Scalar::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sym(s: Sym) -> Scalar {
        Scalar::from_poly(Poly::var(s))
    }

    /// `q` itself.
    pub fn q() -> Scalar {
        Scalar::sym(Q)
    }

    /// `q^n` for any integer `n` (negative powers become fractions).
    pub fn q_pow(n: i64) -> Scalar {
        Scalar::sym_pow(Q, n)
    }

    pub fn sym_pow(s: Sym, n: i64) -> Scalar {
        if n >= 0 {
            Scalar::from_poly(Poly::monomial(Expt::var(s, n as u32), BigRational::one()))
        } else {
            Scalar {
                num: Poly::one(),
                den: Poly::monomial(Expt::var(s, (-n) as u32), BigRational::one()),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Scalar::canonical(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Scalar::canonical(num, den)
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        // cross-reduce first to limit growth
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        Scalar::canonical(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<Scalar, ScalarError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut out = Scalar::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        Ok(out)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut v = self.num.vars();
        for s in self.den.vars() {
            if !v.contains(&s) {
                v.push(s);
            }
        }
        v.sort();
        v
    }

    /// Evaluate at a full rational assignment of every symbol present.
    /// `q` must be assigned a value with absolute value not in {0, 1}.
    pub fn specialize(
        &self,
        assign: &BTreeMap<Sym, BigRational>,
    ) -> Result<Scalar, ScalarError> {
        if let Some(qv) = assign.get(&Q) {
            let a = qv.abs();
            if a.is_zero() || a.is_one() {
                return Err(ScalarError::InadmissibleQ);
            }
        } else if self.num.contains_var(Q) || self.den.contains_var(Q) {
            return Err(ScalarError::MissingAssignment("q".to_string()));
        }
        let d = self.den.eval(assign)?;
        if d.is_zero() {
            return Err(ScalarError::SpecializationPole);
        }
        let n = self.num.eval(assign)?;
        Ok(Scalar::constant(n / d))
    }

    /// Substitute a subset of symbols by scalar values.
    pub fn substitute(&self, assign: &BTreeMap<Sym, Scalar>) -> Result<Scalar, ScalarError> {
        let n = self.num.substitute(assign);
        let d = self.den.substitute(assign);
        n.div(&d)
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn fmt_rat(c: &BigRational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    // deterministic: iterate highest term first
    for (e, c) in p.terms.iter().rev() {
        let mut factors: Vec<String> = Vec::new();
        let abs = c.abs();
        if !abs.is_one() || e.0.is_empty() {
            factors.push(fmt_rat(&abs));
        }
        for &(s, k) in &e.0 {
            if k == 1 {
                factors.push(s.name());
            } else {
                factors.push(format!("{}^{}", s.name(), k));
            }
        }
        let term = factors.join("*");
        if parts.is_empty() {
            if c.is_negative() {
                parts.push(format!("-{}", term));
            } else {
                parts.push(term);
            }
        } else if c.is_negative() {
            parts.push(format!(" - {}", term));
        } else {
            parts.push(format!(" + {}", term));
        }
    }
    parts.concat()
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            if self.num.terms.len() > 1 {
                write!(f, "{}", fmt_poly(&self.num))
            } else {
                write!(f, "{}", fmt_poly(&self.num))
            }
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::q()
    }

    #[test]
    fn add_additive_inverse_is_zero() {
        let s = q().add(&q().neg());
        assert!(s.is_zero());
        assert_eq!(s, Scalar::zero());
    }

    #[test]
    fn div_cancels_common_factor() {
        // (q^2 - 1) / (q + 1) = q - 1, checked independently by multiplying back
        let q2m1 = q().mul(&q()).sub(&Scalar::one());
        let qp1 = q().add(&Scalar::one());
        let qm1 = q().sub(&Scalar::one());
        assert_eq!(qm1.mul(&qp1), q2m1, "oracle: (q-1)(q+1) = q^2-1");
        assert_eq!(q2m1.div(&qp1).unwrap(), qm1);
    }

    #[test]
    fn inv_of_q_minus_qinv() {
        // inv(q - q^-1) = q/(q^2 - 1); cross-multiply to confirm product is 1
        let v = q().sub(&Scalar::q_pow(-1));
        let inv = v.inv().unwrap();
        assert!(v.mul(&inv).is_one());
        let expected = q()
            .div(&q().mul(&q()).sub(&Scalar::one()))
            .unwrap();
        assert_eq!(inv, expected);
    }

    #[test]
    fn division_by_zero_reports() {
        assert_eq!(q().div(&Scalar::zero()), Err(ScalarError::DivisionByZero));
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn canonical_form_is_path_independent() {
        // (q^2 + 2q + 1)/(q + 1) vs (q + 1) computed directly
        let qp1 = q().add(&Scalar::one());
        let a = qp1.mul(&qp1).div(&qp1).unwrap();
        assert_eq!(a, qp1);
    }

    #[test]
    fn specialize_evaluates_canonically() {
        let q2m1 = q().mul(&q()).sub(&Scalar::one());
        let qp1 = q().add(&Scalar::one());
        let v = q2m1.div(&qp1).unwrap();
        let mut assign = BTreeMap::new();
        assign.insert(Q, BigRational::from_integer(BigInt::from(2)));
        assert_eq!(
            v.specialize(&assign).unwrap(),
            Scalar::from_int(1)
        );
        let q3 = q().pow(3).unwrap();
        assert_eq!(q3.specialize(&assign).unwrap(), Scalar::from_int(8));
    }

    #[test]
    fn specialize_pole_and_inadmissible_q() {
        let s = Scalar::one().div(&q().sub(&Scalar::from_int(2))).unwrap();
        let mut assign = BTreeMap::new();
        assign.insert(Q, BigRational::from_integer(BigInt::from(2)));
        assert_eq!(s.specialize(&assign), Err(ScalarError::SpecializationPole));
        let mut bad = BTreeMap::new();
        bad.insert(Q, BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(s.specialize(&bad), Err(ScalarError::InadmissibleQ));
    }

    #[test]
    fn param_set_rejects_reserved_and_duplicates() {
        assert!(ParamSet::new(["q"]).is_err());
        assert!(ParamSet::new(["x"]).is_err());
        assert!(ParamSet::new(["a", "a"]).is_err());
        assert!(ParamSet::new([""]).is_err());
        assert!(ParamSet::new(["lambda1", "a0", "t"]).is_ok());
    }

    #[test]
    fn gcd_multivariate() {
        let a = Sym::intern("gcd_test_a");
        let b = Sym::intern("gcd_test_b");
        // (a+b)^2 * a and (a+b) * b share (a+b)
        let apb = Poly::var(a).add(&Poly::var(b));
        let p1 = apb.pow(2).mul(&Poly::var(a));
        let p2 = apb.mul(&Poly::var(b));
        let g = poly_gcd(&p1, &p2);
        assert_eq!(g, apb);
    }

    #[test]
    fn substitute_partial() {
        let a = Sym::intern("subst_a");
        let s = Scalar::sym(a).mul(&q()).add(&Scalar::one());
        let mut map = BTreeMap::new();
        map.insert(a, Scalar::from_int(3));
        let r = s.substitute(&map).unwrap();
        let expected = q().mul(&Scalar::from_int(3)).add(&Scalar::one());
        assert_eq!(r, expected);
    }
}
