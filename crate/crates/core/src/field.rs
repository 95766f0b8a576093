//! Scalar traits shared by the exact linear algebra.
//!
//! Everything geometric is computed over a [`Field`]: in practice the
//! arbitrary-precision rationals [`Q`](crate::Q) for exact answers, and the
//! word-sized prime fields [`Fp`] as a fast lower bound on rational ranks.
//! Floating-point types deliberately do not implement [`Field`]: every rank
//! decision in this crate must be exact.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, NumAssignRef, NumRef, One, Signed, ToPrimitive, Zero};

/// An exact field. Blanket-implemented for every type with the right `num-traits` surface.
pub trait Field:
    Clone + fmt::Debug + PartialEq + NumRef + NumAssignRef + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every field contains the integers' image")
    }
}

impl<T> Field for T where
    T: Clone + fmt::Debug + PartialEq + NumRef + NumAssignRef + Neg<Output = T> + FromPrimitive + Send + Sync + 'static
{
}

/// Fields where square roots can be decided exactly.
pub trait ExactSqrt: Field {
    /// `Some(r)` with `r * r == self` when such an `r` exists in the field.
    fn exact_sqrt(&self) -> Option<Self>;
}

fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl ExactSqrt for BigRational {
    fn exact_sqrt(&self) -> Option<Self> {
        let n = bigint_sqrt_exact(self.numer())?;
        let d = bigint_sqrt_exact(self.denom())?;
        Some(Ratio::new(n, d))
    }
}

/// Reduction of exact scalars into a word-sized prime field.
pub trait ReduceMod {
    /// Image modulo the prime `p`, or `None` when `p` divides a denominator.
    fn reduce_mod(&self, p: u64) -> Option<u64>;
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = n.mod_floor(&m);
    r.to_u64().expect("residue fits in u64")
}

impl ReduceMod for BigRational {
    fn reduce_mod(&self, p: u64) -> Option<u64> {
        let d = bigint_mod(self.denom(), p);
        if d == 0 {
            return None;
        }
        let n = bigint_mod(self.numer(), p);
        Some(mul_mod(n, pow_mod(d, p - 2, p), p))
    }
}

impl ReduceMod for BigInt {
    fn reduce_mod(&self, p: u64) -> Option<u64> {
        Some(bigint_mod(self, p))
    }
}

impl ReduceMod for i64 {
    fn reduce_mod(&self, p: u64) -> Option<u64> {
        Some(self.rem_euclid(p as i64) as u64)
    }
}

impl<const P: u64> ReduceMod for Fp<P> {
    fn reduce_mod(&self, p: u64) -> Option<u64> {
        (p == P).then_some(self.0)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Largest prime below 2^32.
pub const PRIME_A: u64 = 4_294_967_291;
/// Second-largest prime below 2^32.
pub const PRIME_B: u64 = 4_294_967_279;

/// Element of the prime field `Z/PZ`. `P` must be a prime below 2^32.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub const MODULUS: u64 = P;

    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, exp: u64) -> Self {
        Fp(pow_mod(self.0, exp, P))
    }

    /// Reduces any exact scalar, failing when `P` divides its denominator.
    pub fn try_from_exact<S: ReduceMod>(s: &S) -> Option<Self> {
        s.reduce_mod(P).map(Fp)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
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

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Fp(if self.0 >= rhs.0 { self.0 - rhs.0 } else { self.0 + P - rhs.0 })
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Fp(self.0 * rhs.0 % P)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "division by zero in Fp");
        self * rhs.pow(P - 2)
    }
}

impl<const P: u64> Rem for Fp<P> {
    type Output = Self;
    // Every nonzero element divides every other one.
    fn rem(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "remainder by zero in Fp");
        Fp(0)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

macro_rules! fp_ref_ops {
    ($($tr:ident :: $m:ident, $atr:ident :: $am:ident);*) => {$(
        impl<'a, const P: u64> $tr<&'a Fp<P>> for Fp<P> {
            type Output = Fp<P>;
            #[inline]
            fn $m(self, rhs: &'a Fp<P>) -> Fp<P> { $tr::$m(self, *rhs) }
        }
        impl<const P: u64> $atr for Fp<P> {
            #[inline]
            fn $am(&mut self, rhs: Fp<P>) { *self = $tr::$m(*self, rhs); }
        }
        impl<'a, const P: u64> $atr<&'a Fp<P>> for Fp<P> {
            #[inline]
            fn $am(&mut self, rhs: &'a Fp<P>) { *self = $tr::$m(*self, *rhs); }
        }
    )*};
}

fp_ref_ops!(
    Add::add, AddAssign::add_assign;
    Sub::sub, SubAssign::sub_assign;
    Mul::mul, MulAssign::mul_assign;
    Div::div, DivAssign::div_assign;
    Rem::rem, RemAssign::rem_assign
);

impl<const P: u64> Num for Fp<P> {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        u64::from_str_radix(s, radix).map(Fp::new)
    }
}

impl<const P: u64> FromPrimitive for Fp<P> {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Fp(n.rem_euclid(P as i64) as u64))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Fp(n % P))
    }
}

impl<const P: u64> ExactSqrt for Fp<P> {
    // Brute force is fine for the tiny test fields this is used with; for the
    // 32-bit fields use Euler's criterion plus Tonelli-Shanks.
    fn exact_sqrt(&self) -> Option<Self> {
        if self.0 == 0 {
            return Some(*self);
        }
        if self.pow((P - 1) / 2).0 != 1 {
            return None;
        }
        let mut q = P - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = Fp::<P>(2);
        while z.pow((P - 1) / 2).0 == 1 {
            z += Fp(1);
        }
        let mut m = s;
        let mut c = z.pow(q);
        let mut t = self.pow(q);
        let mut r = self.pow(q.div_ceil(2));
        while t.0 != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2.0 != 1 {
                t2 = t2 * t2;
                i += 1;
            }
            let b = c.pow(1 << (m - i - 1));
            m = i;
            c = b * b;
            t *= c;
            r *= b;
        }
        Some(r)
    }
}

/// Shorthand for an integer-valued rational.
pub fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`.
pub fn q_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn q_to_string(q: &BigRational) -> String {
    q.to_string()
}

/// Parses `"p"` or `"p/q"`.
pub fn q_from_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Least common multiple of the denominators of `row`.
pub fn denominator_lcm<'a>(row: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    row.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Scales a rational row to a primitive integer row spanning the same line.
pub fn primitive_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let l = denominator_lcm(row);
    let ints: Vec<BigInt> = row.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Sign of a big integer as `-1`, `0` or `1`.
pub fn bigint_signum(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Fp<7>;

    #[test]
    fn fp_arithmetic() {
        let a = F7::new(3);
        let b = F7::new(5);
        assert_eq!((a + b).value(), 1);
        assert_eq!((a - b).value(), 5);
        assert_eq!((a * b).value(), 1);
        assert_eq!((a / b * b), a);
        assert_eq!((-a).value(), 4);
        assert_eq!(F7::from_int(-1).value(), 6);
    }

    #[test]
    fn fp_sqrt() {
        type F = Fp<PRIME_A>;
        for v in [0u64, 1, 4, 9, 123456789, 4_000_000_000] {
            let x = F::new(v);
            let sq = x * x;
            let r = sq.exact_sqrt().expect("square has a root");
            assert_eq!(r * r, sq);
        }
        // 3 is a non-residue mod 7
        assert!(F7::new(3).exact_sqrt().is_none());
    }

    #[test]
    fn rational_sqrt_and_parse() {
        assert_eq!(q_frac(9, 4).exact_sqrt(), Some(q_frac(3, 2)));
        assert_eq!(q_frac(2, 1).exact_sqrt(), None);
        assert_eq!(q_frac(-1, 1).exact_sqrt(), None);
        assert_eq!(q_from_str("-3/6"), Some(q_frac(-1, 2)));
        assert_eq!(q_from_str("7"), Some(q_int(7)));
        assert_eq!(q_from_str("1/0"), None);
        assert_eq!(q_to_string(&q_frac(2, -4)), "-1/2");
    }

    #[test]
    fn reduce_rational() {
        let x = q_frac(1, 2);
        let r = Fp::<7>::try_from_exact(&x).unwrap();
        assert_eq!((r * Fp::new(2)).value(), 1);
        assert!(Fp::<7>::try_from_exact(&q_frac(1, 7)).is_none());
    }

    #[test]
    fn primitive_rows() {
        let row = vec![q_frac(1, 2), q_frac(-3, 4), q_int(0)];
        let ints = primitive_integer_row(&row);
        assert_eq!(ints, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
    }
}
