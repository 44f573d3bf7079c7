//! Exact scalar arithmetic: arbitrary-precision rationals and prime fields.
//!
//! Every computation in this crate reduces to the two field implementations
//! here. There is deliberately no floating-point mode; scalars serialize as
//! decimal strings (with an optional `/` for rationals) so exactness survives
//! the JSON boundary.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// Description of a coefficient field, as it appears in problem files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Parses `"rational"` or `"prime:P"`.
    pub fn parse(s: &str) -> Result<FieldSpec, Error> {
        if s == "rational" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(p) = s.strip_prefix("prime:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::SchemaViolation(format!("invalid prime in field spec `{s}`")))?;
            if !is_prime(p) {
                return Err(Error::SchemaViolation(format!("{p} is not prime")));
            }
            return Ok(FieldSpec::Prime(p));
        }
        Err(Error::SchemaViolation(format!(
            "unknown field `{s}` (expected `rational` or `prime:P`)"
        )))
    }

    pub fn name(&self) -> String {
        match self {
            FieldSpec::Rationals => "rational".to_string(),
            FieldSpec::Prime(p) => format!("prime:{p}"),
        }
    }
}

/// A field together with its element type. Implementations are small `Copy`
/// context objects threaded through all matrix code, so a single generic
/// code path serves both ℚ and GF(p).
pub trait Field: Clone + Copy + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. Panics on zero; callers guard with `is_zero`.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn parse(&self, s: &str) -> Result<Self::Elem, Error>;
    fn format(&self, a: &Self::Elem) -> String;

    /// A random scalar for seeded test-instance generation. Over ℚ the
    /// samples are small integers to keep coefficient growth in check.
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }

    /// a - c*b, the inner loop of every elimination.
    fn sub_mul(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }

    fn spec(&self) -> FieldSpec;
}

/// The field of rationals with arbitrary-precision arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse(&self, s: &str) -> Result<BigRational, Error> {
        let bad = || Error::SchemaViolation(format!("invalid rational scalar `{s}`"));
        match s.split_once('/') {
            None => {
                let n: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
            Some((num, den)) => {
                let n: BigInt = num.trim().parse().map_err(|_| bad())?;
                let d: BigInt = den.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
        }
    }

    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-3..=3))
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
}

/// GF(p) for a user-chosen prime p < 2^62, elements as canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField, Error> {
        if p >= 1 << 62 {
            return Err(Error::SchemaViolation(format!("prime {p} too large")));
        }
        if !is_prime(p) {
            return Err(Error::SchemaViolation(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    fn reduce_i64(&self, n: i64) -> u64 {
        let m = n.rem_euclid(self.p as i64 as i64);
        // rem_euclid handles negatives; for p > i64::MAX this path is unused
        // since new() bounds p < 2^62 and from_i64 inputs fit i64.
        (m as u64) % self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        pow_mod(*a, self.p - 2, self.p)
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }

    fn parse(&self, s: &str) -> Result<u64, Error> {
        let bad = || Error::SchemaViolation(format!("invalid GF({}) scalar `{s}`", self.p));
        // Accept integers and a/b; the latter reduces via modular inverse so
        // rational-valued problem files can run over a prime field.
        let parse_int = |t: &str| -> Result<u64, Error> {
            let t = t.trim();
            let (neg, digits) = match t.strip_prefix('-') {
                Some(d) => (true, d),
                None => (false, t),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let mut acc: u64 = 0;
            for b in digits.bytes() {
                acc = self.add(&self.mul(&acc, &(10 % self.p)), &((b - b'0') as u64 % self.p));
            }
            Ok(if neg { self.neg(&acc) } else { acc })
        };
        match s.split_once('/') {
            None => parse_int(s),
            Some((num, den)) => {
                let n = parse_int(num)?;
                let d = parse_int(den)?;
                if d == 0 {
                    return Err(Error::SchemaViolation(format!(
                        "denominator of `{s}` vanishes in GF({})",
                        self.p
                    )));
                }
                Ok(self.mul(&n, &self.inv(&d)))
            }
        }
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }

    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(101));
        assert!(is_prime(32749));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(!is_prime(32751));
    }

    #[test]
    fn rational_round_trip() {
        let f = Rationals;
        let x = f.parse("-3/4").unwrap();
        assert_eq!(f.format(&x), "-3/4");
        let y = f.parse("6/-8").unwrap();
        assert_eq!(x, y);
        assert_eq!(f.format(&f.parse("10/5").unwrap()), "2");
        assert!(f.parse("1/0").is_err());
        assert!(f.parse("abc").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(101).unwrap();
        let a = f.from_i64(-1);
        assert_eq!(a, 100);
        assert_eq!(f.mul(&f.inv(&7), &7), 1);
        assert_eq!(f.parse("1/2").unwrap(), f.inv(&2));
        assert_eq!(f.parse("-3/4").unwrap(), f.mul(&f.neg(&3), &f.inv(&4)));
        assert!(PrimeField::new(91).is_err());
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(FieldSpec::parse("rational").unwrap(), FieldSpec::Rationals);
        assert_eq!(FieldSpec::parse("prime:101").unwrap(), FieldSpec::Prime(101));
        assert!(FieldSpec::parse("prime:91").is_err());
        assert!(FieldSpec::parse("real").is_err());
    }
}
