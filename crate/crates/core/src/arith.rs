//! Exact rationals and sparse bivariate polynomials in `(ε, δ)`.
//!
//! Every probability produced by the exact engine is a [`Poly`] with
//! [`Rational`] coefficients. Nothing on this path touches floating point.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Exponent pair `(degree in ε, degree in δ)`.
pub type Monomial = (u32, u32);

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion for reporting; never used inside exact computations.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational equal to the given finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `"0.0178"`, `"-3"`, `"89/5000"` or `"1e-3"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut all = alloc::string::String::from(int_part);
    all.push_str(frac_part);
    let n: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().ok()?
    };
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if shift >= 0 {
        Rational::from_integer(n * Pow::pow(&ten, shift as u32))
    } else {
        Rational::new(n, Pow::pow(&ten, (-shift) as u32))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Rounds a non-negative rational to `bits` significant binary digits.
///
/// Used where exact iteration would blow up the representation (e.g. many
/// compositions of a degree-7 map).
pub fn round_significant(x: &Rational, bits: u32) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let sign = if x.is_negative() { -1 } else { 1 };
    let a = x.abs();
    // floor(log2(a)) is within one of bits(n) - bits(d)
    let e = a.numer().bits() as i64 - a.denom().bits() as i64;
    let shift = bits as i64 - e;
    let two = BigInt::from(2u32);
    let scaled = if shift >= 0 {
        &a * Rational::from_integer(Pow::pow(&two, shift as u64))
    } else {
        &a / Rational::from_integer(Pow::pow(&two, (-shift) as u64))
    };
    let rounded = scaled.round();
    let out = if shift >= 0 {
        rounded / Rational::from_integer(Pow::pow(&two, shift as u64))
    } else {
        rounded * Rational::from_integer(Pow::pow(&two, (-shift) as u64))
    };
    if sign < 0 {
        -out
    } else {
        out
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Sparse polynomial in `ε` and `δ` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is value
/// equality.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn eps() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn delta() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn monomial(c: Rational, eps_deg: u32, delta_deg: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((eps_deg, delta_deg), c);
        p
    }

    /// Univariate polynomial in ε from coefficients, lowest degree first.
    pub fn from_eps_coeffs<I: IntoIterator<Item = Rational>>(coeffs: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in coeffs.into_iter().enumerate() {
            p.add_term((d as u32, 0), c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(One::is_one)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, eps_deg: u32, delta_deg: u32) -> Rational {
        self.terms
            .get(&(eps_deg, delta_deg))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0, 0)
    }

    /// Highest total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn eps_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, _)| *a).max()
    }

    pub fn delta_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| *b).max()
    }

    /// Drops every term of total degree greater than `order`.
    pub fn truncate(&self, order: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Substitutes `δ = ε`, leaving a univariate polynomial in ε.
    pub fn diagonal(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|((a, b), c)| ((a + b, 0), c.clone())))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Product truncated to total degree `order`; avoids building terms that
    /// would be thrown away.
    pub fn mul_truncated(&self, other: &Self, order: u32) -> Self {
        let mut out = Self::zero();
        for ((a1, b1), c1) in &self.terms {
            if a1 + b1 > order {
                continue;
            }
            for ((a2, b2), c2) in &other.terms {
                if a1 + b1 + a2 + b2 <= order {
                    out.add_term((a1 + a2, b1 + b2), c1 * c2);
                }
            }
        }
        out
    }

    /// Exact substitution of `ε` and `δ`.
    pub fn eval(&self, eps: &Rational, delta: &Rational) -> Rational {
        // Horner would need a dense layout; cache powers instead.
        let max_a = self.eps_degree().unwrap_or(0);
        let max_b = self.delta_degree().unwrap_or(0);
        let eps_pows = powers(eps, max_a);
        let delta_pows = powers(delta, max_b);
        let mut acc = Rational::zero();
        for ((a, b), c) in &self.terms {
            acc += c * &eps_pows[*a as usize] * &delta_pows[*b as usize];
        }
        acc
    }

    /// Floating-point evaluation for plotting and sampling only.
    pub fn eval_f64(&self, eps: f64, delta: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), c)| to_f64(c) * libm::pow(eps, *a as f64) * libm::pow(delta, *b as f64))
            .sum()
    }
}

fn powers(x: &Rational, n: u32) -> Vec<Rational> {
    let mut v = Vec::with_capacity(n as usize + 1);
    v.push(Rational::one());
    for i in 0..n as usize {
        let next = &v[i] * x;
        v.push(next);
    }
    v
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|((a, b), _)| (a + b, core::cmp::Reverse(*a)));
        for (i, ((a, b), c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let mag = c.abs();
            let bare = *a == 0 && *b == 0;
            if bare {
                write!(f, "{}", mag)?;
            } else if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            for (sym, d) in [("e", *a), ("d", *b)] {
                match d {
                    0 => {}
                    1 => f.write_str(sym)?,
                    _ => write!(f, "{}^{}", sym, d)?,
                }
            }
        }
        Ok(())
    }
}

/// Least common multiple of all coefficient denominators.
pub fn common_denominator(p: &Poly) -> BigInt {
    p.terms()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
}
