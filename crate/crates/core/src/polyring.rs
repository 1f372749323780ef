//! Homogeneous polynomials in x0..xn, Laurent monomial spaces for the Cech
//! charts, and multiplication-by-a-polynomial as a matrix between monomial
//! bases.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactla::{q, RatMatrix, Q};

/// Exponent vector. Entries may be negative inside Laurent spaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic with x0 > x1 > ... > xn.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_monomial(&self.0))
    }
}

fn fmt_monomial(e: &[i32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .map(|(i, &a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// A polynomial with rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let nvars = m.0.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Degree if the polynomial is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: i32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                assert!(e >= 0, "cannot evaluate a Laurent monomial");
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Poly, PolyParseError> {
        Parser { s: text.as_bytes(), pos: 0, nvars }.poly()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    /// Prints in the same syntax [`Poly::parse`] accepts, leading term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = fmt_monomial(&m.0);
            match (a.is_one(), mono.as_str()) {
                (true, "1") => write!(f, "1")?,
                (true, _) => write!(f, "{mono}")?,
                (false, "1") => write!(f, "{a}")?,
                (false, _) => write!(f, "{a}*{mono}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct PolyParseError {
    /// 1-based column inside the polynomial text.
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyParseError> {
        Err(PolyParseError { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt, PolyParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit string parses"))
    }

    fn poly(&mut self) -> Result<Poly, PolyParseError> {
        let mut out = Poly::zero(self.nvars);
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut first = true;
        loop {
            let mut sign = Q::one();
            match self.peek() {
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    sign = -sign;
                    self.pos += 1;
                }
                Some(_) if first => {}
                Some(_) => return self.err("expected '+' or '-'"),
                None => break,
            }
            first = false;
            let (m, c) = self.term()?;
            out.add_term(m, c * sign);
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Q), PolyParseError> {
        let mut coeff = Q::one();
        let mut mono = Monomial::one(self.nvars);
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let n = self.digits()?;
                    let mut c = Q::from_integer(n);
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let d = self.digits()?;
                        if d.is_zero() {
                            return self.err("zero denominator");
                        }
                        c /= Q::from_integer(d);
                    }
                    coeff *= c;
                }
                Some(b'x') => {
                    self.pos += 1;
                    let start = self.pos;
                    let idx = self.digits()?;
                    let idx: usize = match usize::try_from(idx) {
                        Ok(i) if i < self.nvars => i,
                        _ => {
                            self.pos = start;
                            return self.err(format!("variable index out of range (x0..x{})", self.nvars - 1));
                        }
                    };
                    let mut e: i32 = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let ev = self.digits()?;
                        e = match i32::try_from(ev) {
                            Ok(v) => v,
                            Err(_) => return self.err("exponent too large"),
                        };
                    }
                    mono.0[idx] += e;
                }
                Some(_) => return self.err("expected a number or a variable x<i>"),
                None => return self.err("unexpected end of polynomial"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((mono, coeff));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Monomial spaces.

/// Laurent monomials of a fixed degree where only the variables in
/// `allowed_negative` may carry negative exponents, each bounded below by
/// `-window`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialSpace {
    pub nvars: usize,
    pub degree: i32,
    pub allowed_negative: Vec<usize>,
    pub window: u32,
}

impl MonomialSpace {
    pub fn polynomial(nvars: usize, degree: i32) -> Self {
        MonomialSpace { nvars, degree, allowed_negative: Vec::new(), window: 0 }
    }

    pub fn laurent(nvars: usize, degree: i32, allowed_negative: Vec<usize>, window: u32) -> Self {
        MonomialSpace { nvars, degree, allowed_negative, window }
    }

    fn lower_bounds(&self) -> Vec<i32> {
        let mut lo = vec![0; self.nvars];
        for &v in &self.allowed_negative {
            lo[v] = -(self.window as i32);
        }
        lo
    }

    /// Number of basis monomials, by the stars-and-bars count.
    pub fn dimension(&self) -> usize {
        let shifted = self.degree as i64 + self.window as i64 * self.allowed_negative.len() as i64;
        if shifted < 0 {
            return 0;
        }
        binomial(shifted + self.nvars as i64 - 1, self.nvars as i64 - 1) as usize
    }

    pub fn contains(&self, e: &[i32]) -> bool {
        e.len() == self.nvars
            && e.iter().sum::<i32>() == self.degree
            && self.lower_bounds().iter().zip(e).all(|(lo, x)| x >= lo)
    }
}

/// Ordered monomial basis of a [`MonomialSpace`] with index lookup.
#[derive(Debug)]
pub struct MonomialBasis {
    pub space: MonomialSpace,
    pub monomials: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, usize>,
}

impl MonomialBasis {
    pub fn new(space: MonomialSpace) -> Self {
        let monomials = monomial_basis(&space);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { space, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, e: &[i32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

/// Cache of bases keyed by space; shared by the Cech and graded-piece builders.
#[derive(Default)]
pub struct BasisCache {
    map: HashMap<MonomialSpace, Arc<MonomialBasis>>,
}

impl BasisCache {
    pub fn get(&mut self, space: &MonomialSpace) -> Arc<MonomialBasis> {
        if let Some(b) = self.map.get(space) {
            return Arc::clone(b);
        }
        let b = Arc::new(MonomialBasis::new(space.clone()));
        self.map.insert(space.clone(), Arc::clone(&b));
        b
    }
}

/// Basis monomials in descending graded-lexicographic order (x0^d first).
pub fn monomial_basis(s: &MonomialSpace) -> Vec<Vec<i32>> {
    let lo = s.lower_bounds();
    let mut out = Vec::new();
    if s.nvars == 0 {
        return out;
    }
    let mut cur = vec![0i32; s.nvars];
    // suffix_min[i] = sum of lower bounds of variables i..n
    let mut suffix_min = vec![0i32; s.nvars + 1];
    for i in (0..s.nvars).rev() {
        suffix_min[i] = suffix_min[i + 1] + lo[i];
    }
    fn rec(i: usize, rem: i32, lo: &[i32], suffix_min: &[i32], cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        let n = lo.len();
        if i == n - 1 {
            if rem >= lo[i] {
                cur[i] = rem;
                out.push(cur.clone());
            }
            return;
        }
        let max = rem - suffix_min[i + 1];
        let mut e = max;
        while e >= lo[i] {
            cur[i] = e;
            rec(i + 1, rem - e, lo, suffix_min, cur, out);
            e -= 1;
        }
    }
    rec(0, s.degree, &lo, &suffix_min, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultError {
    #[error("polynomial {poly} is not homogeneous of degree {expected}")]
    DegreeMismatch { poly: String, expected: i32 },
    #[error("product {monomial} escapes the target window {window}")]
    WindowOverflow { monomial: String, window: u32 },
    #[error("source and target spaces are incompatible: {0}")]
    Incompatible(String),
}

/// Matrix of multiplication by `p` from `source` to `target` (rows index the
/// target basis).
pub fn mult_matrix(p: &Poly, source: &MonomialBasis, target: &MonomialBasis) -> Result<RatMatrix, MultError> {
    let (s, t) = (&source.space, &target.space);
    if s.nvars != t.nvars || s.allowed_negative != t.allowed_negative || s.window != t.window {
        return Err(MultError::Incompatible(format!("{s:?} vs {t:?}")));
    }
    let e = t.degree - s.degree;
    if !p.is_homogeneous_of(e) {
        return Err(MultError::DegreeMismatch { poly: p.to_string(), expected: e });
    }
    let mut trip = Vec::with_capacity(source.len() * p.num_terms());
    for (j, m) in source.monomials.iter().enumerate() {
        for (tm, c) in p.terms() {
            let prod: Vec<i32> = m.iter().zip(&tm.0).map(|(a, b)| a + b).collect();
            match target.index_of(&prod) {
                Some(i) => trip.push((i, j, c.clone())),
                None => {
                    return Err(MultError::WindowOverflow { monomial: fmt_monomial(&prod), window: t.window });
                }
            }
        }
    }
    Ok(RatMatrix::from_triplets(target.len(), source.len(), trip))
}

/// Binomial coefficient for `k >= 0`, with the generalised value for negative
/// `n` (so that C(n+d, n)-style Euler characteristics come out signed).
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..k {
        num *= (n - i) as i128;
        den *= (i + 1) as i128;
    }
    (num / den) as i64
}

/// Rational number from an integer (re-export for convenience in builders).
pub fn qi(n: i64) -> Q {
    q(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n).unwrap()
    }

    #[test]
    fn basis_counts() {
        assert_eq!(monomial_basis(&MonomialSpace::polynomial(3, 2)).len(), 6);
        assert_eq!(monomial_basis(&MonomialSpace::polynomial(2, -2)).len(), 0);
        let s = MonomialSpace::laurent(2, -2, vec![0, 1], 3);
        let b = monomial_basis(&s);
        assert!(b.contains(&vec![-1, -1]));
        assert_eq!(b.len(), s.dimension());
        // hand enumeration: a0 in -3..=1, a1 = -2 - a0 >= -3
        assert_eq!(b.len(), 5);
    }

    #[test]
    fn basis_is_descending_grlex() {
        let b = monomial_basis(&MonomialSpace::polynomial(3, 2));
        assert_eq!(b[0], vec![2, 0, 0]);
        assert_eq!(b[5], vec![0, 0, 2]);
        let monos: Vec<Monomial> = b.into_iter().map(Monomial).collect();
        assert!(monos.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn mult_examples() {
        let one = Poly::one(2);
        let b1 = MonomialBasis::new(MonomialSpace::polynomial(2, 1));
        let m = mult_matrix(&one, &b1, &b1).unwrap();
        assert_eq!(m, RatMatrix::identity(2));

        let b0 = MonomialBasis::new(MonomialSpace::polynomial(2, 0));
        let m = mult_matrix(&p("x0", 2), &b0, &b1).unwrap();
        assert_eq!(m, RatMatrix::from_i64(&[&[1], &[0]]));

        let b2 = MonomialBasis::new(MonomialSpace::polynomial(2, 2));
        let m = mult_matrix(&p("x0 + x1", 2), &b1, &b2).unwrap();
        // basis x0^2, x0x1, x1^2; columns x0, x1
        assert_eq!(m, RatMatrix::from_i64(&[&[1, 0], &[1, 1], &[0, 1]]));
    }

    #[test]
    fn mult_rejects_wrong_degree() {
        let b0 = MonomialBasis::new(MonomialSpace::polynomial(2, 0));
        let b2 = MonomialBasis::new(MonomialSpace::polynomial(2, 2));
        assert!(matches!(mult_matrix(&p("x0", 2), &b0, &b2), Err(MultError::DegreeMismatch { .. })));
    }

    #[test]
    fn window_overflow_is_an_error() {
        // A target with a smaller window than the source cannot hold every product.
        let src = MonomialBasis::new(MonomialSpace::laurent(2, 0, vec![0], 2));
        let tgt = MonomialBasis::new(MonomialSpace { window: 2, degree: 1, ..src.space.clone() });
        assert!(mult_matrix(&p("x1", 2), &src, &tgt).is_ok());
        let tgt_small = MonomialBasis::new(MonomialSpace::laurent(2, 1, vec![0], 1));
        let src_small = MonomialBasis::new(MonomialSpace::laurent(2, 0, vec![0], 1));
        // x0^-1 * x1^1 times x1 = x0^-1 x1^2: inside; but mixing windows is incompatible
        assert!(matches!(mult_matrix(&p("x1", 2), &src, &tgt_small), Err(MultError::Incompatible(_))));
        assert!(mult_matrix(&p("x1", 2), &src_small, &tgt_small).is_ok());
    }

    #[test]
    fn parse_and_print() {
        let a = p("-3/2*x0^2*x2 + x1*x1*x2 - 4", 3);
        assert_eq!(a.num_terms(), 3);
        assert_eq!(a.coeff(&Monomial(vec![0, 2, 1])), q(1));
        assert_eq!(Poly::parse(&a.to_string(), 3).unwrap(), a);
        assert_eq!(p(" x0 *x1 ", 2), p("x0*x1", 2));
        assert_eq!(p("x0 - x0", 2), Poly::zero(2));
        assert_eq!(p("2*x0*3", 2), Poly::var(2, 0).scale(&q(6)));
    }

    #[test]
    fn parse_errors() {
        let e = Poly::parse("x0^", 2).unwrap_err();
        assert_eq!(e.column, 4);
        assert!(Poly::parse("x5", 2).is_err());
        assert!(Poly::parse("", 2).is_err());
        assert!(Poly::parse("x0 x1", 2).is_err());
        assert!(Poly::parse("1/0", 2).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(1, 1), 1);
        // C(n+d, n) with n = 2, d = -3: (-1)(0)/2 ... generalised value
        assert_eq!(binomial(-1, 2), 1);
        assert_eq!(binomial(0, 2), 0);
    }

    fn small_poly(nvars: usize, deg: i32) -> impl Strategy<Value = Poly> {
        let basis = monomial_basis(&MonomialSpace::polynomial(nvars, deg));
        proptest::collection::vec(-2i64..=2, basis.len()).prop_map(move |cs| {
            let mut out = Poly::zero(nvars);
            for (m, c) in basis.iter().zip(cs) {
                out.add_term(Monomial(m.clone()), q(c));
            }
            out
        })
    }

    proptest! {
        #[test]
        fn mult_matrix_is_multiplicative(a in small_poly(3, 1), b in small_poly(3, 2), w in 0u32..3) {
            let s0 = MonomialBasis::new(MonomialSpace::laurent(3, -1, vec![0, 2], w));
            let s1 = MonomialBasis::new(MonomialSpace { degree: 0, ..s0.space.clone() });
            let s3 = MonomialBasis::new(MonomialSpace { degree: 2, ..s0.space.clone() });
            let ma = mult_matrix(&a, &s0, &s1).unwrap();
            let mb = mult_matrix(&b, &s1, &s3).unwrap();
            let mab = mult_matrix(&a.mul(&b), &s0, &s3).unwrap();
            prop_assert_eq!(mb.mul(&ma), mab);
        }

        #[test]
        fn mult_matrix_is_linear(a in small_poly(2, 2), b in small_poly(2, 2)) {
            let s0 = MonomialBasis::new(MonomialSpace::laurent(2, 1, vec![1], 2));
            let s2 = MonomialBasis::new(MonomialSpace { degree: 3, ..s0.space.clone() });
            let lhs = mult_matrix(&a.add(&b), &s0, &s2).unwrap();
            let rhs = mult_matrix(&a, &s0, &s2).unwrap().add(&mult_matrix(&b, &s0, &s2).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn display_roundtrip(a in small_poly(3, 2)) {
            prop_assert_eq!(Poly::parse(&a.to_string(), 3).unwrap(), a);
        }
    }
}
