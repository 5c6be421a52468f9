//! Exact arithmetic in the ring of Laurent polynomials `Z[v, v^-1]`.
//!
//! Coefficients are 64-bit and every ring operation is checked: overflow is
//! reported as [`QPolyError::Overflow`] by the `checked_*` methods and turns
//! into a panic in the operator impls, never into a wrapped value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QPolyError {
    #[error("coefficient overflow in Laurent polynomial arithmetic")]
    Overflow,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: {dividend} is not divisible by {divisor}")]
    InexactDivision { dividend: String, divisor: String },
    #[error("cannot parse Laurent polynomial from {0:?}")]
    Parse(String),
}

/// An element of `Z[v, v^-1]`.
///
/// Stored densely from the lowest exponent upward. The first and last stored
/// coefficients are always nonzero and the zero polynomial is the empty vector,
/// so derived equality is equality of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    low: i32,
    coeffs: Vec<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    /// `v^k`
    pub fn v_pow(k: i32) -> Self {
        Self::monomial(1, k)
    }

    /// `c * v^k`
    pub fn monomial(c: i64, k: i32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Self { low: k, coeffs: vec![c] }
        }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (i32, i64)>>(terms: I) -> Result<Self, QPolyError> {
        let terms: Vec<(i32, i64)> = terms.into_iter().collect();
        let Some(low) = terms.iter().map(|t| t.0).min() else {
            return Ok(Self::zero());
        };
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![0i64; (high as i64 - low as i64 + 1) as usize];
        for (k, c) in terms {
            let slot = &mut coeffs[(k - low) as usize];
            *slot = slot.checked_add(c).ok_or(QPolyError::Overflow)?;
        }
        Ok(Self::normalized(low, coeffs))
    }

    fn normalized(mut low: i32, mut coeffs: Vec<i64>) -> Self {
        let Some(first) = coeffs.iter().position(|&c| c != 0) else {
            return Self::zero();
        };
        let last = coeffs.iter().rposition(|&c| c != 0).unwrap();
        coeffs.truncate(last + 1);
        coeffs.drain(..first);
        low += first as i32;
        Self { low, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs == [1]
    }

    pub fn min_exp(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exp(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i32 - 1)
    }

    pub fn coeff(&self, k: i32) -> i64 {
        let idx = k as i64 - self.low as i64;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`, ascending by exponent.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(idx, &c)| (self.low + idx as i32, c))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QPolyError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let low = self.low.min(other.low);
        let high = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let mut coeffs = vec![0i64; (high - low + 1) as usize];
        for (k, c) in self.terms().chain(other.terms()) {
            let slot = &mut coeffs[(k - low) as usize];
            *slot = slot.checked_add(c).ok_or(QPolyError::Overflow)?;
        }
        Ok(Self::normalized(low, coeffs))
    }

    pub fn checked_neg(&self) -> Result<Self, QPolyError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.checked_neg().ok_or(QPolyError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { low: self.low, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QPolyError> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, QPolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (a_idx, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (b_idx, &b) in other.coeffs.iter().enumerate() {
                let prod = a.checked_mul(b).ok_or(QPolyError::Overflow)?;
                let slot = &mut coeffs[a_idx + b_idx];
                *slot = slot.checked_add(prod).ok_or(QPolyError::Overflow)?;
            }
        }
        Ok(Self::normalized(self.low + other.low, coeffs))
    }

    pub fn checked_scale(&self, c: i64) -> Result<Self, QPolyError> {
        self.checked_mul(&Self::constant(c))
    }

    pub fn checked_pow(&self, n: u32) -> Result<Self, QPolyError> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// The ring involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        match self.max_exp() {
            None => Self::zero(),
            Some(high) => {
                let mut coeffs = self.coeffs.clone();
                coeffs.reverse();
                Self { low: -high, coeffs }
            }
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// Value at `v = 1`, the sum of the coefficients.
    pub fn eval_at_one(&self) -> Result<i64, QPolyError> {
        self.coeffs
            .iter()
            .try_fold(0i64, |acc, &c| acc.checked_add(c))
            .ok_or(QPolyError::Overflow)
    }

    /// True iff every coefficient is nonnegative, i.e. the polynomial lies in `N[v, v^-1]`.
    pub fn is_nonneg(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    /// True iff every exponent is at most `bound` (the zero polynomial qualifies).
    pub fn max_exp_at_most(&self, bound: i32) -> bool {
        self.max_exp().is_none_or(|m| m <= bound)
    }

    /// Exact quotient by long division on the leading term. A nonzero
    /// remainder is an error.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, QPolyError> {
        if divisor.is_zero() {
            return Err(QPolyError::DivisionByZero);
        }
        let inexact = || QPolyError::InexactDivision {
            dividend: self.to_string(),
            divisor: divisor.to_string(),
        };
        let d_high = divisor.max_exp().unwrap();
        let d_lead = divisor.coeff(d_high);
        let d_span = d_high - divisor.low;
        let mut rem = self.clone();
        let mut quotient = Self::zero();
        while let Some(r_high) = rem.max_exp() {
            if r_high - rem.low < d_span {
                return Err(inexact());
            }
            let r_lead = rem.coeff(r_high);
            if r_lead % d_lead != 0 {
                return Err(inexact());
            }
            let term = Self::monomial(r_lead / d_lead, r_high - d_high);
            rem = rem.checked_sub(&term.checked_mul(divisor)?)?;
            quotient = quotient.checked_add(&term)?;
        }
        Ok(quotient)
    }
}

/// The quantum integer `[n]_d = (v^{dn} - v^{-dn}) / (v^d - v^{-d})`.
pub fn q_int(n: i64, d: u32) -> LaurentPoly {
    if n == 0 {
        return LaurentPoly::zero();
    }
    let sign = n.signum();
    let m = n.abs();
    let d = d as i64;
    // v^{d(m-1)} + v^{d(m-3)} + ... + v^{-d(m-1)}
    LaurentPoly::from_terms((0..m).map(|s| ((d * (m - 1 - 2 * s)) as i32, sign)))
        .expect("quantum integer coefficients are +-1")
}

/// `[n]_d^! = [1]_d [2]_d ... [n]_d`, with `[0]^! = 1`.
pub fn q_factorial(n: u32, d: u32) -> Result<LaurentPoly, QPolyError> {
    (1..=n as i64).try_fold(LaurentPoly::one(), |acc, s| acc.checked_mul(&q_int(s, d)))
}

/// The Gaussian binomial `[a]^! / ([b]^! [a-b]^!)`, by exact division.
pub fn q_binomial(a: u32, b: u32, d: u32) -> Result<LaurentPoly, QPolyError> {
    assert!(b <= a, "q_binomial requires b <= a (got a={a}, b={b})");
    let denom = q_factorial(b, d)?.checked_mul(&q_factorial(a - b, d)?)?;
    q_factorial(a, d)?.div_exact(&denom)
}

impl fmt::Display for LaurentPoly {
    /// Descending exponents, e.g. `v^2 + 1 - 3*v^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (pos, (k, c)) in self.terms().rev().enumerate() {
            let mag = c.unsigned_abs();
            if pos == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("v")?,
                (1, m) => write!(f, "{m}*v")?,
                (k, 1) => write!(f, "v^{k}")?,
                (k, m) => write!(f, "{m}*v^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl FromStr for LaurentPoly {
    type Err = QPolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QPolyError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        // split into signed terms, keeping the sign that follows `^` attached
        let mut pieces: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev.is_some() && prev != Some('^') {
                pieces.push(std::mem::take(&mut current));
            }
            current.push(ch);
            prev = Some(ch);
        }
        pieces.push(current);

        let mut terms = Vec::with_capacity(pieces.len());
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1i64, rest),
                None => (1i64, piece.strip_prefix('+').unwrap_or(&piece)),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (coeff_part, var_part) = match body.find('v') {
                None => (body, None),
                Some(pos) => {
                    let coeff = body[..pos].strip_suffix('*').unwrap_or(&body[..pos]);
                    (coeff, Some(&body[pos + 1..]))
                }
            };
            let coeff: i64 = if coeff_part.is_empty() {
                if var_part.is_none() {
                    return Err(err());
                }
                1
            } else {
                coeff_part.parse().map_err(|_| err())?
            };
            let exp: i32 = match var_part {
                None => 0,
                Some("") => 1,
                Some(rest) => rest
                    .strip_prefix('^')
                    .ok_or_else(err)?
                    .parse()
                    .map_err(|_| err())?,
            };
            terms.push((exp, sign * coeff));
        }
        Self::from_terms(terms)
    }
}

/// JSON form: ascending list of `[exponent, coefficient]` pairs.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(None)?;
        for term in self.terms() {
            seq.serialize_element(&term)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms: Vec<(i32, i64)> = Vec::deserialize(deserializer)?;
        Self::from_terms(terms).map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$checked(rhs).expect("Laurent polynomial coefficient overflow")
            }
        }
        impl $trait<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.checked_neg().expect("Laurent polynomial coefficient overflow")
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
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
    fn quantum_integers() {
        assert_eq!(q_int(2, 1), p("v + v^-1"));
        assert_eq!(q_int(0, 3), LaurentPoly::zero());
        assert_eq!(q_int(3, 1), p("v^2 + 1 + v^-2"));
        assert_eq!(q_int(-2, 1), p("-v - v^-1"));
        assert_eq!(q_int(2, 3), p("v^3 + v^-3"));
        assert_eq!(q_int(1, 2), LaurentPoly::one());
    }

    #[test]
    fn quantum_factorials() {
        assert_eq!(q_factorial(0, 1).unwrap(), LaurentPoly::one());
        assert_eq!(q_factorial(2, 1).unwrap(), p("v + v^-1"));
        assert_eq!(q_factorial(3, 1).unwrap(), p("v^3 + 2*v + 2*v^-1 + v^-3"));
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(q_binomial(2, 1, 1).unwrap(), p("v + v^-1"));
        assert_eq!(q_binomial(3, 1, 1).unwrap(), p("v^2 + 1 + v^-2"));
        assert_eq!(q_binomial(4, 2, 1).unwrap(), p("v^4 + v^2 + 2 + v^-2 + v^-4"));
        assert_eq!(q_binomial(4, 2, 1).unwrap().eval_at_one().unwrap(), 6);
        assert_eq!(q_binomial(2, 2, 3).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn bar_and_evaluation() {
        assert_eq!(p("v^2").bar(), p("v^-2"));
        assert_eq!(p("1 + v").bar(), p("1 + v^-1"));
        for n in 0..5 {
            for d in 1..4 {
                assert!(q_int(n, d).is_bar_invariant());
                assert_eq!(q_int(n, d).eval_at_one().unwrap(), n);
            }
        }
        assert_eq!(LaurentPoly::zero().eval_at_one().unwrap(), 0);
    }

    #[test]
    fn nonnegativity() {
        assert!(q_int(3, 1).is_nonneg());
        assert!(!p("v - v^-1").is_nonneg());
        assert!(LaurentPoly::zero().is_nonneg());
    }

    #[test]
    fn rendering() {
        assert_eq!(p("v + v^-1").to_string(), "v + v^-1");
        assert_eq!(p("-2*v^3 + 1 - v^-1").to_string(), "-2*v^3 + 1 - v^-1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(p("-1").to_string(), "-1");
        assert!("v^".parse::<LaurentPoly>().is_err());
        assert!("".parse::<LaurentPoly>().is_err());
        assert!("3*".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn json_is_exponent_coefficient_pairs() {
        let json = serde_json::to_string(&p("v + 2*v^-1")).unwrap();
        assert_eq!(json, "[[-1,2],[1,1]]");
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p("v + 2*v^-1"));
    }

    #[test]
    fn overflow_is_detected() {
        let big = LaurentPoly::constant(i64::MAX);
        assert_eq!(big.checked_add(&LaurentPoly::one()), Err(QPolyError::Overflow));
        assert_eq!(big.checked_mul(&LaurentPoly::constant(2)), Err(QPolyError::Overflow));
        assert_eq!(
            LaurentPoly::constant(i64::MIN).checked_neg(),
            Err(QPolyError::Overflow)
        );
    }

    #[test]
    fn inexact_division_is_an_error() {
        let err = p("v^2 + 1").div_exact(&p("v + 1")).unwrap_err();
        assert!(matches!(err, QPolyError::InexactDivision { .. }));
        assert_eq!(p("v").div_exact(&LaurentPoly::zero()), Err(QPolyError::DivisionByZero));
        assert_eq!(p("2*v^2 - 2").div_exact(&p("v - 1")).unwrap(), p("2*v + 2"));
        assert!(p("3*v").div_exact(&p("2")).is_err());
    }

    fn binomial(a: u64, b: u64) -> i64 {
        (0..b).fold(1u64, |acc, s| acc * (a - s) / (s + 1)) as i64
    }

    #[test]
    fn binomial_symmetry_pascal_and_classical_limit() {
        for d in 1..=3u32 {
            for a in 0..=8u32 {
                for b in 0..=a {
                    let qb = q_binomial(a, b, d).unwrap();
                    assert_eq!(qb, q_binomial(a, a - b, d).unwrap());
                    assert!(qb.is_nonneg() && qb.is_bar_invariant());
                    assert_eq!(qb.eval_at_one().unwrap(), binomial(a as u64, b as u64));
                    if a >= 1 && b >= 1 && b < a {
                        let di = d as i32;
                        let (ai, bi) = (a as i32, b as i32);
                        let pascal = q_binomial(a - 1, b, d).unwrap().shift(di * bi)
                            + q_binomial(a - 1, b - 1, d).unwrap().shift(-di * (ai - bi));
                        assert_eq!(qb, pascal, "a={a} b={b} d={d}");
                    }
                }
            }
        }
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..=6, -9i64..=9), 0..6)
            .prop_map(|terms| LaurentPoly::from_terms(terms).unwrap())
    }

    proptest! {
        #[test]
        fn ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
        }

        #[test]
        fn bar_is_a_ring_involution(a in small_poly(), b in small_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        }

        #[test]
        fn text_form_parses_back(a in small_poly()) {
            prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a);
        }

        #[test]
        fn exact_division_recovers_factor(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }
    }
}
