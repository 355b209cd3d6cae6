//! Exact scalars: prime fields F_p and the rationals.
//!
//! A [`Scalar`] always knows which field it lives in. Prime-field residues are
//! kept in `[0, p)` and rationals in lowest terms, so equality is structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} and {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("malformed scalar {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// The coefficient field of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime { p: u32 },
    Rational,
}

impl FieldSpec {
    /// F_p, after checking that `p` is prime and fits in 32 bits.
    pub fn prime(p: u64) -> Result<Self, NumError> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(NumError::NotPrime(p));
        }
        Ok(FieldSpec::Prime { p: p as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Prime { p } => *p,
            FieldSpec::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldSpec::Prime { p } => Scalar::Mod {
                value: n.rem_euclid(p as i64) as u32,
                p,
            },
            FieldSpec::Rational => Scalar::Rat(Box::new(BigRational::from_integer(BigInt::from(n)))),
        }
    }

    fn reduce_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            FieldSpec::Prime { p } => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Mod {
                    value: r.to_u32().expect("residue below p"),
                    p,
                }
            }
            FieldSpec::Rational => Scalar::Rat(Box::new(BigRational::from_integer(n.clone()))),
        }
    }

    /// Parses `[-]digits` or `[-]digits/digits` into this field.
    ///
    /// Both the ASCII hyphen and U+2212 are accepted as the minus sign.
    pub fn parse(&self, text: &str) -> Result<Scalar, NumError> {
        let malformed = || NumError::Malformed(text.to_string());
        let trimmed = text.trim();
        let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
            (true, rest)
        } else {
            (false, trimmed)
        };
        let digits = |s: &str| -> Result<BigInt, NumError> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            s.parse::<BigInt>().map_err(|_| malformed())
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (digits(n)?, digits(d)?),
            None => (digits(body)?, BigInt::one()),
        };
        let num = if negative { -num } else { num };
        if den.is_zero() {
            return Err(NumError::ZeroDenominator(text.to_string()));
        }
        let den_scalar = self.reduce_bigint(&den);
        if den_scalar.is_zero() {
            return Err(NumError::ZeroDenominator(text.to_string()));
        }
        self.reduce_bigint(&num).checked_div(&den_scalar)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "F{p}"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a [`FieldSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u32, p: u32 },
    Rat(Box<BigRational>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: mixed fields and division by zero are errors.
pub fn scalar_arith(op: ArithOp, x: &Scalar, y: &Scalar) -> Result<Scalar, NumError> {
    if x.field() != y.field() {
        return Err(NumError::FieldMismatch(x.field(), y.field()));
    }
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.checked_div(y)?,
    })
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { p, .. } => FieldSpec::Prime { p: *p },
            Scalar::Rat(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(q) => q.is_one(),
        }
    }

    pub fn inv(&self) -> Result<Scalar, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Mod { value, p } => Scalar::Mod {
                value: pow_mod(*value as u64, *p as u64 - 2, *p as u64) as u32,
                p: *p,
            },
            Scalar::Rat(q) => Scalar::Rat(Box::new(q.recip())),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, NumError> {
        if self.field() != rhs.field() {
            return Err(NumError::FieldMismatch(self.field(), rhs.field()));
        }
        Ok(self * &rhs.inv()?)
    }

    /// `-self` when `negate` is set, `self` otherwise.
    pub fn signed(self, negate: bool) -> Scalar {
        if negate {
            -self
        } else {
            self
        }
    }

    pub fn add_assign_ref(&mut self, rhs: &Scalar) {
        match (self, rhs) {
            (Scalar::Mod { value, p }, Scalar::Mod { value: v, p: q }) if *p == *q => {
                let s = *value as u64 + *v as u64;
                *value = (s % *p as u64) as u32;
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => **a += &**b,
            (a, b) => panic!("field mismatch: {} vs {}", a.field(), b.field()),
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rat(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl Scalar {
    /// True if the canonical text form starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rat(q) if q.is_negative())
    }
}

// Operator impls panic on mixed fields; use `scalar_arith` for checked access.
macro_rules! binop {
    ($trait:ident, $method:ident, $modop:expr, $ratop:tt) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                        let f: fn(u64, u64, u64) -> u64 = $modop;
                        Scalar::Mod {
                            value: f(*a as u64, *b as u64, *p as u64) as u32,
                            p: *p,
                        }
                    }
                    (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(Box::new(&**a $ratop &**b)),
                    (a, b) => panic!("field mismatch: {} vs {}", a.field(), b.field()),
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b, p| (a + b) % p, +);
binop!(Sub, sub, |a, b, p| (a + p - b) % p, -);
binop!(Mul, mul, |a, b, p| a * b % p, *);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, p } => Scalar::Mod {
                value: (p - value) % p,
                p,
            },
            Scalar::Rat(q) => Scalar::Rat(Box::new(-*q)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn minus_two_is_one_mod_three() {
        let f3 = f(3);
        let x = f3.from_i64(-2);
        assert_eq!(x, f3.one());
        assert_eq!(scalar_arith(ArithOp::Mul, &x, &f3.one()).unwrap(), f3.one());
    }

    #[test]
    fn rational_halves() {
        let q = FieldSpec::Rational;
        let half = q.parse("1/2").unwrap();
        assert_eq!(scalar_arith(ArithOp::Add, &half, &half).unwrap(), q.one());
    }

    #[test]
    fn division_in_f5() {
        let f5 = f(5);
        let got = scalar_arith(ArithOp::Div, &f5.from_i64(2), &f5.from_i64(3)).unwrap();
        // brute force: the unique y with 3*y = 2 (mod 5)
        let y = (0..5).find(|y| (3 * y) % 5 == 2).unwrap();
        assert_eq!(got, f5.from_i64(y));
        assert_eq!(got, f5.from_i64(4));
    }

    #[test]
    fn arithmetic_errors() {
        let f5 = f(5);
        assert_eq!(
            scalar_arith(ArithOp::Div, &f5.one(), &f5.zero()),
            Err(NumError::DivisionByZero)
        );
        assert!(matches!(
            scalar_arith(ArithOp::Add, &f5.one(), &FieldSpec::Rational.one()),
            Err(NumError::FieldMismatch(..))
        ));
        assert!(matches!(
            scalar_arith(ArithOp::Add, &f5.one(), &f(7).one()),
            Err(NumError::FieldMismatch(..))
        ));
    }

    #[test]
    fn primality_guard() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(0).is_err());
        assert!(FieldSpec::prime(2).is_ok());
        assert!(FieldSpec::prime(65537).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!(f(3).parse("-2").unwrap(), f(3).one());
        assert_eq!(f(3).parse("\u{2212}2").unwrap(), f(3).one());
        let q = FieldSpec::Rational;
        assert_eq!(q.parse("3/6").unwrap(), q.parse("1/2").unwrap());
        assert_eq!(q.parse("3/6").unwrap().to_string(), "1/2");
        assert_eq!(f(5).parse("7").unwrap(), f(5).from_i64(2));
        assert_eq!(f(5).parse("1/2").unwrap(), f(5).from_i64(3));
        assert_eq!(q.parse("-4/-2"), Err(NumError::Malformed("-4/-2".into())));
        assert!(matches!(q.parse("1/0"), Err(NumError::ZeroDenominator(_))));
        assert!(matches!(f(5).parse("1/10"), Err(NumError::ZeroDenominator(_))));
        assert!(matches!(q.parse(""), Err(NumError::Malformed(_))));
        assert!(matches!(q.parse("1.5"), Err(NumError::Malformed(_))));
        assert!(matches!(q.parse("--1"), Err(NumError::Malformed(_))));
        let big = q.parse("123456789012345678901234567890").unwrap();
        assert_eq!(big.to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn field_axioms_exhaustive_small_primes() {
        for p in [2u64, 3, 5] {
            let k = f(p);
            let elems: Vec<Scalar> = (0..p as i64).map(|i| k.from_i64(i)).collect();
            for a in &elems {
                assert_eq!(a + &k.zero(), a.clone());
                assert_eq!(a * &k.one(), a.clone());
                assert_eq!(a + &(-a), k.zero());
                if !a.is_zero() {
                    assert_eq!(a * &a.inv().unwrap(), k.one());
                }
                for b in &elems {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in &elems {
                        assert_eq!(&(a + b) + c, a + &(b + c));
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
            }
        }
    }

    fn small_fraction() -> impl Strategy<Value = Scalar> {
        (-50i64..50, 1i64..20)
            .prop_map(|(n, d)| Scalar::Rat(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d)))))
    }

    fn any_scalar() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            (0i64..2).prop_map(|v| FieldSpec::Prime { p: 2 }.from_i64(v)),
            (0i64..3).prop_map(|v| FieldSpec::Prime { p: 3 }.from_i64(v)),
            (0i64..101).prop_map(|v| FieldSpec::Prime { p: 101 }.from_i64(v)),
            small_fraction(),
        ]
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in small_fraction(), b in small_fraction(), c in small_fraction()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn parse_format_round_trip(x in any_scalar()) {
            let text = x.to_string();
            prop_assert_eq!(x.field().parse(&text).unwrap(), x);
        }
    }
}
