//! The rational function field `Q(v)`, as reduced fractions of polynomials
//! with rational coefficients and a monic denominator. Only the form oracle
//! in [`crate::verify`] needs it.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::qpoly::LaurentPoly;

/// Polynomial in `v` over `Q`, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn trimmed(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    fn constant(c: BigRational) -> Self {
        Self::trimmed(vec![c])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Self::trimmed(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::default();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (a_idx, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b_idx, b) in other.0.iter().enumerate() {
                out[a_idx + b_idx] += a * b;
            }
        }
        Self::trimmed(out)
    }

    fn scale(&self, c: &BigRational) -> Poly {
        Self::trimmed(self.0.iter().map(|a| a * c).collect())
    }

    fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let d = divisor.degree();
        if self.is_zero() || self.degree() < d {
            return (Poly::default(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.degree() - d + 1];
        let lead_inv = divisor.lead().recip();
        for k in (d..rem.len()).rev() {
            let c = &rem[k] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.0.iter().enumerate() {
                rem[k - d + j] -= &c * dc;
            }
            quot[k - d] = c;
        }
        (Self::trimmed(quot), Self::trimmed(rem))
    }

    fn monic_gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let inv = a.lead().recip();
        a.scale(&inv)
    }
}

/// An element of `Q(v)` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self { num: Poly::default(), den: Poly::constant(BigRational::one()) }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(c: i64) -> Self {
        Self::new(
            Poly::constant(BigRational::from_integer(BigInt::from(c))),
            Poly::constant(BigRational::one()),
        )
    }

    fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(v)");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.monic_gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let inv = den.lead().recip();
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_laurent(p: &LaurentPoly) -> Self {
        let Some(low) = p.min_exp() else {
            return Self::zero();
        };
        let high = p.max_exp().unwrap();
        let shift = low.min(0);
        // p = v^shift * (polynomial with exponents k - shift >= 0)
        let mut coeffs = vec![BigRational::zero(); (high - shift + 1) as usize];
        for (k, c) in p.terms() {
            coeffs[(k - shift) as usize] = BigRational::from_integer(BigInt::from(c));
        }
        let mut den = vec![BigRational::zero(); (-shift + 1) as usize];
        den[(-shift) as usize] = BigRational::one();
        Self::new(Poly::trimmed(coeffs), Poly::trimmed(den))
    }

    /// Back to `Z[v, v^-1]` when the denominator is a power of `v` and the
    /// numerator has integral coefficients.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        let d = self.den.degree();
        if self.den.0[..d].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut terms = Vec::new();
        for (k, c) in self.num.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.is_integer() {
                return None;
            }
            let value: i64 = c.to_integer().try_into().ok()?;
            terms.push((k as i32 - d as i32, value));
        }
        LaurentPoly::from_terms(terms).ok()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        Self::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| Self::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.inv()?))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if p.is_zero() {
                return f.write_str("0");
            }
            let mut first = true;
            for (k, c) in p.0.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(if c.is_negative() { " - " } else { " + " })?;
                } else if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
                write!(f, "{}*v^{k}", c.abs())?;
            }
            Ok(())
        };
        f.write_str("(")?;
        show(&self.num, f)?;
        f.write_str(")/(")?;
        show(&self.den, f)?;
        f.write_str(")")
    }
}
