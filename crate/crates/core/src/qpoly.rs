//! The quantum polynomial algebra in three generators with relations
//! `yx = q xy`, `zy = q yz`, `zx = q xz`: normal-form monomials, sparse
//! polynomials with scalar coefficients, q-twisted multiplication, and the
//! total-degree grading.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// One of the three algebra generators, in normal-form order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    X,
    Y,
    Z,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::X, Gen::Y, Gen::Z];

    pub fn name(self) -> &'static str {
        match self {
            Gen::X => "x",
            Gen::Y => "y",
            Gen::Z => "z",
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normal-form monomial `x^a y^b z^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0, c: 0 };

    pub fn new(a: u32, b: u32, c: u32) -> Self {
        Monomial { a, b, c }
    }

    pub fn gen(g: Gen) -> Self {
        match g {
            Gen::X => Monomial::new(1, 0, 0),
            Gen::Y => Monomial::new(0, 1, 0),
            Gen::Z => Monomial::new(0, 0, 1),
        }
    }

    pub fn degree(self) -> u32 {
        self.a + self.b + self.c
    }

    pub fn exp(self, g: Gen) -> u32 {
        match g {
            Gen::X => self.a,
            Gen::Y => self.b,
            Gen::Z => self.c,
        }
    }

    /// The generator letters of the normal-form word, left to right.
    pub fn letters(self) -> impl Iterator<Item = Gen> {
        std::iter::repeat(Gen::X)
            .take(self.a as usize)
            .chain(std::iter::repeat(Gen::Y).take(self.b as usize))
            .chain(std::iter::repeat(Gen::Z).take(self.c as usize))
    }

    /// All normal-form monomials of exact degree `d`.
    pub fn of_degree(d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for a in 0..=d {
            for b in 0..=(d - a) {
                out.push(Monomial::new(a, b, d - a - b));
            }
        }
        out
    }

    /// All normal-form monomials of degree at most `d`.
    pub fn up_to_degree(d: u32) -> Vec<Monomial> {
        (0..=d).flat_map(Monomial::of_degree).collect()
    }
}

/// Graded order, then lexicographic on the exponent triple.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.a, self.b, self.c).cmp(&(
            other.degree(),
            other.a,
            other.b,
            other.c,
        ))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (g, e) in [(Gen::X, self.a), (Gen::Y, self.b), (Gen::Z, self.c)] {
            if e == 1 {
                parts.push(g.name().to_string());
            } else if e > 1 {
                parts.push(format!("{}^{}", g.name(), e));
            }
        }
        f.write_str(&parts.join("*"))
    }
}

/// Multiply two normal-form monomials. Returns the exponent of `q` picked up
/// by commuting the right factor's letters into place, and the combined
/// monomial: the factor `x^a2` moves left past `y^b1 z^c1` and `y^b2` moves
/// past `z^c1`, each swap contributing one power of `q`.
pub fn mono_mul(m1: Monomial, m2: Monomial) -> (u64, Monomial) {
    let qpower = (m1.b as u64 + m1.c as u64) * m2.a as u64 + m1.c as u64 * m2.b as u64;
    (
        qpower,
        Monomial::new(m1.a + m2.a, m1.b + m2.b, m1.c + m2.c),
    )
}

/// Sparse element of the quantum polynomial algebra. Coefficients are exact
/// scalars; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        QPoly::monomial(Monomial::ONE, Scalar::one())
    }

    pub fn gen(g: Gen) -> Self {
        QPoly::monomial(Monomial::gen(g), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        QPoly { terms }
    }

    pub fn scalar(c: Scalar) -> Self {
        QPoly::monomial(Monomial::ONE, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn coeff(&self, m: Monomial) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(*m).or_insert_with(Scalar::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        QPoly { terms }
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> QPoly {
        if s.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul(s))).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let (k, m) = mono_mul(*m1, *m2);
                let c = c1.mul(c2).mul(&Scalar::q_pow(k as i64));
                let entry = terms.entry(m).or_insert_with(Scalar::zero);
                *entry = entry.add(&c);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        QPoly { terms }
    }

    pub fn pow(&self, n: u32) -> QPoly {
        let mut out = QPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Projection onto the homogeneous component of total degree `s`.
    pub fn homogeneous_component(&self, s: u32) -> QPoly {
        QPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == s)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Apply a scalar-valued map to every coefficient, dropping zeros.
    pub fn map_coeffs<F: Fn(&Scalar) -> Scalar>(&self, f: F) -> QPoly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(*m, v);
            }
        }
        QPoly { terms }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if m.degree() == 0 {
                write!(f, "({})", c)?;
            } else if c.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "({})*{}", c, m)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// A brute-force word-rewriting oracle, for tests: multiply arbitrary letter
// words by repeatedly applying yx -> q xy, zy -> q yz, zx -> q xz.
// ---------------------------------------------------------------------------

#[cfg(test)]
pub mod oracle {
    use super::*;

    /// Sort a letter word into normal form, counting swaps; each adjacent
    /// out-of-order pair contributes one factor of q.
    pub fn rewrite(word: &[Gen]) -> (u64, Monomial) {
        let mut w: Vec<Gen> = word.to_vec();
        let mut qpow: u64 = 0;
        loop {
            let mut swapped = false;
            for i in 0..w.len().saturating_sub(1) {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    qpow += 1;
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        let a = w.iter().filter(|&&g| g == Gen::X).count() as u32;
        let b = w.iter().filter(|&&g| g == Gen::Y).count() as u32;
        let c = w.iter().filter(|&&g| g == Gen::Z).count() as u32;
        (qpow, Monomial::new(a, b, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_times_x_is_q_xy() {
        let (k, m) = mono_mul(Monomial::gen(Gen::Y), Monomial::gen(Gen::X));
        assert_eq!(k, 1);
        assert_eq!(m, Monomial::new(1, 1, 0));
    }

    #[test]
    fn identity_is_neutral() {
        let m = Monomial::new(3, 1, 2);
        assert_eq!(mono_mul(m, Monomial::ONE), (0, m));
        assert_eq!(mono_mul(Monomial::ONE, m), (0, m));
    }

    #[test]
    fn y2_times_x3() {
        // oracle: brute-force rewriting of the word y y x x x
        let (k, m) = mono_mul(Monomial::new(0, 2, 0), Monomial::new(3, 0, 0));
        let (ok, om) = oracle::rewrite(&[Gen::Y, Gen::Y, Gen::X, Gen::X, Gen::X]);
        assert_eq!((k, m), (ok, om));
        assert_eq!(k, 6);
        assert_eq!(m, Monomial::new(3, 2, 0));
    }

    #[test]
    fn mono_mul_matches_oracle_up_to_degree_4() {
        for m1 in Monomial::up_to_degree(4) {
            for m2 in Monomial::up_to_degree(4) {
                let word: Vec<Gen> = m1.letters().chain(m2.letters()).collect();
                let (ok, om) = oracle::rewrite(&word);
                assert_eq!(mono_mul(m1, m2), (ok, om), "m1={} m2={}", m1, m2);
            }
        }
    }

    #[test]
    fn z_times_xy() {
        // word rewriting: z x y -> q x z y -> q^2 x y z
        let z = QPoly::gen(Gen::Z);
        let xy = QPoly::monomial(Monomial::new(1, 1, 0), Scalar::one());
        let p = z.mul(&xy);
        let expected = QPoly::monomial(Monomial::new(1, 1, 1), Scalar::q_pow(2));
        assert_eq!(p, expected);
    }

    #[test]
    fn square_of_x_plus_y() {
        let s = QPoly::gen(Gen::X).add(&QPoly::gen(Gen::Y));
        let p = s.mul(&s);
        let mut expected = QPoly::monomial(Monomial::new(2, 0, 0), Scalar::one());
        expected = expected.add(&QPoly::monomial(
            Monomial::new(1, 1, 0),
            Scalar::one().add(&Scalar::q()),
        ));
        expected = expected.add(&QPoly::monomial(Monomial::new(0, 2, 0), Scalar::one()));
        assert_eq!(p, expected);
    }

    #[test]
    fn relation_fidelity() {
        let x = QPoly::gen(Gen::X);
        let y = QPoly::gen(Gen::Y);
        let z = QPoly::gen(Gen::Z);
        let q = Scalar::q();
        assert!(y.mul(&x).sub(&x.mul(&y).scale(&q)).is_zero());
        assert!(z.mul(&y).sub(&y.mul(&z).scale(&q)).is_zero());
        assert!(z.mul(&x).sub(&x.mul(&z).scale(&q)).is_zero());
    }

    #[test]
    fn homogeneous_components_reconstruct() {
        let p = QPoly::monomial(Monomial::new(2, 0, 0), Scalar::one())
            .add(&QPoly::monomial(Monomial::new(1, 1, 0), Scalar::from_int(3)))
            .add(&QPoly::gen(Gen::Z));
        let c2 = p.homogeneous_component(2);
        assert_eq!(
            c2,
            QPoly::monomial(Monomial::new(2, 0, 0), Scalar::one()).add(&QPoly::monomial(
                Monomial::new(1, 1, 0),
                Scalar::from_int(3)
            ))
        );
        assert!(p.homogeneous_component(5).is_zero());
        let mut sum = QPoly::zero();
        for s in 0..=p.degree().unwrap() {
            sum = sum.add(&p.homogeneous_component(s));
        }
        assert_eq!(sum, p);
    }
}
