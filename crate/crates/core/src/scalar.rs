//! Coefficient fields.
//!
//! Every algebraic routine in the crate is generic over [`Coefficient`], a
//! characteristic-zero (or large prime) field with exact equality. The
//! default everywhere is [`Rational`], arbitrary-precision rationals.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rationals, always in lowest terms.
pub type Rational = BigRational;

/// A field usable as the coefficient ring of polynomials in free operads.
///
/// Equality must be exact: Gröbner and confluence verdicts depend on
/// recognising zero.
pub trait Coefficient:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Image of the rational `num/den`; `None` if `den` is zero in the field.
    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(&BigInt::from(v), &BigInt::one()).expect("1 is invertible")
    }

    fn is_negative(&self) -> bool {
        false
    }
}

impl Coefficient for BigRational {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coefficient for Ratio<i64> {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Ratio::new(num.to_i64()?, den.to_i64()?))
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Integers modulo a prime `P < 2^31`.
///
/// Useful as a fast second opinion on ranks computed over the rationals;
/// a rank over `Fp` never exceeds the rank over `Q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }

    pub fn inverse(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(self.0 * o.0 % P)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.inverse().expect("division by zero in Fp")
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u64> Coefficient for Fp<P> {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        let p = BigInt::from(P);
        let n = num.mod_floor(&p).to_u64()?;
        let d = den.mod_floor(&p).to_u64()?;
        Some(Fp(n) * Fp::<P>(d).inverse()?)
    }
}

/// The prime used for modular cross-checks.
pub const CHECK_PRIME: u64 = 2_147_483_647;

/// Parse `a`, `-a` or `a/b` into a rational.
pub fn parse_rational(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some((n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_lowest_terms() {
        let q = Rational::from_ratio(&BigInt::from(4), &BigInt::from(-6)).unwrap();
        assert_eq!(q.numer(), &BigInt::from(-2));
        assert_eq!(q.denom(), &BigInt::from(3));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_rational("1/0").is_none());
        assert!(Rational::from_ratio(&BigInt::one(), &BigInt::zero()).is_none());
    }

    #[test]
    fn half_of_two_is_one() {
        let half = Rational::from_ratio(&BigInt::one(), &BigInt::from(2)).unwrap();
        assert_eq!(half * Rational::from_i64(2), Rational::one());
    }

    #[test]
    fn fp_inverse() {
        type F = Fp<CHECK_PRIME>;
        let x = F::new(12345);
        assert_eq!(x * x.inverse().unwrap(), F::one());
        assert_eq!(F::new(-1) + F::one(), F::zero());
        let h = F::from_ratio(&BigInt::one(), &BigInt::from(2)).unwrap();
        assert_eq!(h + h, F::one());
    }
}
