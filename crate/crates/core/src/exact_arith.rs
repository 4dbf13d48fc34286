//! Exact Laurent polynomials and rational functions in one variable `A`.
//!
//! Coefficients are arbitrary-precision rationals. A [`LaurentPoly`] is stored
//! densely from its lowest exponent; a [`RationalFn`] is kept in a reduced
//! canonical form so that structural equality is mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("q-integer [n] is undefined for n = 0")]
    ZeroQInt,
    #[error("division by the zero polynomial")]
    ZeroDenominator,
    #[error("rational function is not a Laurent polynomial")]
    NotPolynomial,
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A Laurent polynomial `sum c_e A^e` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    low: i64,
    // coeffs[i] is the coefficient of A^(low + i); never starts or ends with 0
    coeffs: Vec<BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(rat(1), 0)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(rat(c), 0)
    }

    /// `A^e`.
    pub fn a_pow(e: i64) -> Self {
        Self::monomial(rat(1), e)
    }

    pub fn monomial(c: BigRational, e: i64) -> Self {
        Self::from_dense(e, vec![c])
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let terms: Vec<(i64, BigRational)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    /// Integer-coefficient shorthand: `from_ints(&[(-8, 1), (0, 5)])`.
    pub fn from_ints(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, rat(c))))
    }

    fn from_dense(low: i64, mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        coeffs.drain(..lead);
        Self { low: low + lead as i64, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn min_exp(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        let i = e - self.low;
        if i < 0 || i >= self.coeffs.len() as i64 {
            return BigRational::zero();
        }
        self.coeffs[i as usize].clone()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms().count()
    }

    /// The only nonzero term, when there is exactly one.
    pub fn as_monomial(&self) -> Option<(i64, BigRational)> {
        (self.coeffs.len() == 1).then(|| (self.low, self.coeffs[0].clone()))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }

    /// Multiplies every exponent by `k`.
    pub fn scale_exponents(&self, k: i64) -> Self {
        assert!(k != 0, "exponent scale must be nonzero");
        Self::from_terms(self.terms().map(|(e, c)| (e * k, c.clone())))
    }

    /// The substitution `A -> A^-1`.
    pub fn invert_variable(&self) -> Self {
        self.scale_exponents(-1)
    }

    /// Multiplication by `A^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Integer coefficients sampled at exponents `min, min+step, ..., max`.
    pub fn coefficient_sequence(&self, step: i64) -> Vec<BigRational> {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Vec::new();
        };
        (0..=(hi - lo) / step).map(|i| self.coeff(lo + i * step)).collect()
    }

    /// True when all exponents agree modulo `m`.
    pub fn exponents_congruent(&self, m: i64) -> bool {
        match self.min_exp() {
            None => true,
            Some(lo) => self.terms().all(|(e, _)| (e - lo).rem_euclid(m) == 0),
        }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(e, c)| json!([e, big_to_json(c.numer()), big_to_json(c.denom())]))
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let arr = v.get("terms")?.as_array()?;
        let mut terms = Vec::new();
        for t in arr {
            let t = t.as_array()?;
            if t.len() != 3 {
                return None;
            }
            let e = t[0].as_i64()?;
            let n = json_to_big(&t[1])?;
            let d = json_to_big(&t[2])?;
            if d.is_zero() {
                return None;
            }
            terms.push((e, BigRational::new(n, d)));
        }
        Some(Self::from_terms(terms))
    }

    fn dense_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }
}

fn big_to_json(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(i) => json!(i),
        None => json!(b.to_string()),
    }
}

fn json_to_big(v: &Value) -> Option<BigInt> {
    if let Some(i) = v.as_i64() {
        return Some(BigInt::from(i));
    }
    v.as_str()?.parse().ok()
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.low.min(rhs.low);
        let hi = self.max_exp().unwrap().max(rhs.max_exp().unwrap());
        let mut coeffs = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for p in [self, rhs] {
            let off = (p.low - lo) as usize;
            for (i, c) in p.coeffs.iter().enumerate() {
                coeffs[off + i] += c;
            }
        }
        LaurentPoly::from_dense(lo, coeffs)
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self + rhs;
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly::from_dense(self.low + rhs.low, LaurentPoly::dense_mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let var = match e {
                0 => String::new(),
                1 => "A".to_string(),
                _ => format!("A^{e}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ArithError> {
        Err(ArithError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn signed_int(&mut self) -> Result<i64, ArithError> {
        let neg = self.eat(b'-');
        match self.digits().and_then(|d| d.to_i64()) {
            Some(v) => Ok(if neg { -v } else { v }),
            None => self.err("expected exponent"),
        }
    }

    // term := [coef ['*']] ['A' ['^' int]]
    fn term(&mut self) -> Result<(i64, BigRational), ArithError> {
        let mut coef = None;
        if let Some(n) = self.digits() {
            let mut c = BigRational::from_integer(n);
            if self.eat(b'/') {
                match self.digits() {
                    Some(d) if !d.is_zero() => c /= BigRational::from_integer(d),
                    _ => return self.err("expected nonzero denominator"),
                }
            }
            coef = Some(c);
            self.eat(b'*');
        }
        if self.eat(b'A') {
            let e = if self.eat(b'^') { self.signed_int()? } else { 1 };
            Ok((e, coef.unwrap_or_else(|| rat(1))))
        } else {
            match coef {
                Some(c) => Ok((0, c)),
                None => self.err("expected a term"),
            }
        }
    }
}

impl FromStr for LaurentPoly {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor { s: s.as_bytes(), pos: 0 };
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let neg = if cur.eat(b'-') {
                true
            } else if first || cur.eat(b'+') {
                false
            } else {
                return cur.err("expected '+' or '-'");
            };
            let (e, c) = cur.term()?;
            terms.push((e, if neg { -c } else { c }));
            first = false;
            if cur.peek().is_none() {
                break;
            }
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

/// `[n] = 1 + A^4 + ... + A^(4(n-1))`.
pub fn qint(n: usize) -> Result<LaurentPoly, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroQInt);
    }
    Ok(LaurentPoly::from_terms((0..n as i64).map(|i| (4 * i, rat(1)))))
}

/// Coefficients of `p = A^k q(A^4)` read in steps of four, and whether they rise then fall.
/// Polynomials whose exponents are not all congruent mod 4 are reported as not unimodal.
pub fn unimodality(p: &LaurentPoly) -> (Vec<BigRational>, bool) {
    let seq = p.coefficient_sequence(4);
    if !p.exponents_congruent(4) {
        return (seq, false);
    }
    let peak = seq.windows(2).position(|w| w[1] < w[0]).map_or(seq.len(), |k| k + 1);
    let falling = seq[peak.saturating_sub(1)..].windows(2).all(|w| w[1] <= w[0]);
    (seq, falling)
}

pub fn scale_exponents(p: &LaurentPoly, k: i64) -> LaurentPoly {
    p.scale_exponents(k)
}

// Dense ordinary polynomials over Q, ascending degree, no trailing zeros.
type Dense = Vec<BigRational>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn divrem(a: &Dense, b: &Dense) -> (Dense, Dense) {
    let mut r = a.clone();
    if a.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![BigRational::zero(); a.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = &r[i + b.len() - 1] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    (trim(q), trim(r))
}

fn monic(p: Dense) -> Dense {
    match p.last().cloned() {
        Some(l) => p.into_iter().map(|c| c / &l).collect(),
        None => p,
    }
}

fn gcd(a: &Dense, b: &Dense) -> Dense {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// An element of `Q(A)` in canonical form: `num/den` reduced, `den` an
/// ordinary polynomial with nonzero constant term and leading coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        LaurentPoly::one().into()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        rf_make(&self.den, &self.num)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn invert_variable(&self) -> Self {
        rf_make(&self.num.invert_variable(), &self.den.invert_variable()).expect("nonzero den")
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        rf_make(&(&self.num * p), &self.den).expect("nonzero den")
    }

    pub fn to_json(&self) -> Value {
        json!({ "num": self.num.to_json(), "den": self.den.to_json() })
    }
}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }
}

/// Canonical reduced form of `num/den`.
pub fn rf_make(num: &LaurentPoly, den: &LaurentPoly) -> Result<RationalFn, ArithError> {
    if den.is_zero() {
        return Err(ArithError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RationalFn::zero());
    }
    let shift = num.low - den.low;
    let mut n = num.coeffs.clone();
    let mut d = den.coeffs.clone();
    if d.len() > 1 {
        let g = gcd(&n, &d);
        if g.len() > 1 {
            n = divrem(&n, &g).0;
            d = divrem(&d, &g).0;
        }
    }
    let lead = d.last().unwrap().clone();
    if !lead.is_one() {
        n = n.into_iter().map(|c| c / &lead).collect();
        d = d.into_iter().map(|c| c / &lead).collect();
    }
    Ok(RationalFn { num: LaurentPoly::from_dense(shift, n), den: LaurentPoly::from_dense(0, d) })
}

/// The Laurent polynomial equal to `r`, when there is one.
pub fn rf_to_laurent(r: &RationalFn) -> Result<LaurentPoly, ArithError> {
    if r.den.is_one() {
        Ok(r.num.clone())
    } else {
        Err(ArithError::NotPolynomial)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return rf_make(&(&self.num + &rhs.num), &self.den).unwrap();
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        rf_make(&n, &(&self.den * &rhs.den)).unwrap()
    }
}

impl Add for RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: RationalFn) -> RationalFn {
        &self + &rhs
    }
}

impl AddAssign<&RationalFn> for RationalFn {
    fn add_assign(&mut self, rhs: &RationalFn) {
        *self = &*self + rhs;
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Sub for RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: RationalFn) -> RationalFn {
        &self - &rhs
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        if self.den.is_one() && rhs.den.is_one() {
            return (&self.num * &rhs.num).into();
        }
        rf_make(&(&self.num * &rhs.num), &(&self.den * &rhs.den)).unwrap()
    }
}

impl Mul for RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: RationalFn) -> RationalFn {
        &self * &rhs
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for RationalFn {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            if let Some(mid) = rest.find(")/(") {
                if let Some(den) = rest[mid + 3..].strip_suffix(')') {
                    return rf_make(&rest[..mid].parse()?, &den.parse()?);
                }
            }
        }
        Ok(t.parse::<LaurentPoly>()?.into())
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Arbitrary but total order, used only for deterministic sorting.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.low
            .cmp(&other.low)
            .then_with(|| self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn qint_values() {
        assert_eq!(qint(1).unwrap(), LaurentPoly::one());
        assert_eq!(qint(2).unwrap(), p("1 + A^4"));
        assert_eq!(qint(4).unwrap(), p("1 + A^4 + A^8 + A^12"));
        assert_eq!(qint(0), Err(ArithError::ZeroQInt));
    }

    #[test]
    fn scaling() {
        assert_eq!(scale_exponents(&p("1 + A"), -4), p("1 + A^-4"));
        assert_eq!(scale_exponents(&LaurentPoly::constant(5), 7), LaurentPoly::constant(5));
        assert_eq!(scale_exponents(&p("A + A^3"), -4), p("A^-4 + A^-12"));
    }

    #[test]
    fn canonical_rational_functions() {
        let r = rf_make(&LaurentPoly::one(), &p("A^-2 + A^2")).unwrap();
        assert_eq!(r.num(), &p("A^2"));
        assert_eq!(r.den(), &p("1 + A^4"));
        let q = rf_make(&qint(4).unwrap(), &qint(2).unwrap()).unwrap();
        assert_eq!(rf_to_laurent(&q).unwrap(), p("1 + A^8"));
        let x = p("3*A^-2 - A^5");
        assert_eq!(rf_to_laurent(&rf_make(&x, &LaurentPoly::one()).unwrap()).unwrap(), x);
    }

    #[test]
    fn laurent_quotient() {
        let two = qint(2).unwrap();
        let n = &(&p("A^-8") * &(&two * &two)) * &p("1 + 3*A^4 + 2*A^8 + 3*A^12 + A^16");
        let r = rf_make(&n, &qint(4).unwrap()).unwrap();
        let want = &(&p("A^-8") * &two) * &p("1 + 3*A^4 + A^8");
        assert_eq!(rf_to_laurent(&r).unwrap(), want);
        let half = rf_make(&LaurentPoly::one(), &two).unwrap();
        assert_eq!(rf_to_laurent(&half), Err(ArithError::NotPolynomial));
        assert_eq!(rf_make(&two, &LaurentPoly::zero()), Err(ArithError::ZeroDenominator));
    }

    #[test]
    fn text_round_trip() {
        for s in ["A^-8 + 4*A^-4 + 1 + A^4", "0", "-A", "-7 + 1/2*A^3", "-3 + A^2"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("2A^-3+A"), p("2*A^-3 + A"));
        assert!("A^".parse::<LaurentPoly>().is_err());
        assert!("1 2".parse::<LaurentPoly>().is_err());
        let r = rf_make(&LaurentPoly::one(), &p("A^-2 + A^2")).unwrap();
        assert_eq!(r.to_string(), "(A^2)/(1 + A^4)");
        assert_eq!(r.to_string().parse::<RationalFn>().unwrap(), r);
    }

    #[test]
    fn json_round_trip() {
        let x = p("A^-8 + 4*A^-4 - 1/3");
        let v = x.to_json();
        assert_eq!(v.to_string(), r#"{"terms":[[-8,1,1],[-4,4,1],[0,-1,3]]}"#);
        assert_eq!(LaurentPoly::from_json(&v).unwrap(), x);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i64..6, -4i64..5), 0..5).prop_map(|v| LaurentPoly::from_ints(&v))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn scaling_is_multiplicative(a in arb_poly(), b in arb_poly(), k in prop_oneof![-5i64..0, 1i64..5]) {
            prop_assert_eq!((&a * &b).scale_exponents(k), &a.scale_exponents(k) * &b.scale_exponents(k));
            prop_assert_eq!((&a * &b).invert_variable(), &a.invert_variable() * &b.invert_variable());
            prop_assert_eq!(a.invert_variable().invert_variable(), a.clone());
        }

        #[test]
        fn field_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let ab = rf_make(&a, &b).unwrap();
            let ba = rf_make(&b, &a).unwrap();
            prop_assert_eq!(&ab * &ba, RationalFn::one());
            let c: RationalFn = c.into();
            prop_assert_eq!(&(&ab + &c) - &c, ab.clone());
            prop_assert_eq!(&ab * &(&c + &ba), &(&ab * &c) + &RationalFn::one());
            prop_assert_eq!(ab.to_string().parse::<RationalFn>().unwrap(), ab.clone());
        }

        #[test]
        fn display_parses_back(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a);
        }
    }

    #[test]
    fn unimodality_reading() {
        let bumpy = LaurentPoly::from_ints(&[(-37, 1), (-33, 2), (-29, 3), (-25, 7), (-21, 8), (-17, 7), (-13, 9), (-9, 5), (-5, 1)]);
        let (seq, ok) = unimodality(&bumpy);
        assert_eq!(seq, [1, 2, 3, 7, 8, 7, 9, 5, 1].map(rat).to_vec());
        assert!(!ok);
        let smooth: LaurentPoly = "A^-8 + 4*A^-4 + 4 + A^4".parse().unwrap();
        assert!(unimodality(&smooth).1);
        assert!(unimodality(&LaurentPoly::zero()).1);
        let mixed: LaurentPoly = "1 + A^2".parse().unwrap();
        assert!(!unimodality(&mixed).1);
    }
}
