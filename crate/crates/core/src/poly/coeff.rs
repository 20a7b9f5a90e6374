//! Exact coefficients: rationals and residues modulo a prime.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The coefficient field of a ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `F_p` for a prime `p < 2^31`.
    Prime(u32),
}

impl Field {
    pub fn prime(p: u32) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidField(format!(
                "{p} is not a prime below 2^31"
            )));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Coeff {
        match self {
            Field::Rational => Coeff::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Coeff::Mod {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Coeff {
        match self {
            Field::Rational => Coeff::Rat(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Coeff::Mod {
                    value: r.to_u32().expect("residue below modulus"),
                    modulus: p,
                }
            }
        }
    }

    /// `num / den` in this field; `None` when `den` vanishes in the field.
    pub fn fraction(self, num: &BigInt, den: &BigInt) -> Option<Coeff> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return None;
        }
        Some(self.from_bigint(num).mul(&d.inv()))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a coefficient field. Rationals are kept in lowest terms
/// with positive denominator; residues live in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Rat(BigRational),
    Mod { value: u32, modulus: u32 },
}

impl Coeff {
    pub fn field(&self) -> Field {
        match self {
            Coeff::Rat(_) => Field::Rational,
            Coeff::Mod { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Rat(r) => r.is_zero(),
            Coeff::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Rat(r) => r.is_one(),
            Coeff::Mod { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a + b),
            (
                Coeff::Mod {
                    value: a,
                    modulus: p,
                },
                Coeff::Mod {
                    value: b,
                    modulus: q,
                },
            ) => {
                debug_assert_eq!(p, q, "mixed prime fields");
                Coeff::Mod {
                    value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Rat(a) => Coeff::Rat(-a),
            Coeff::Mod { value, modulus } => Coeff::Mod {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a * b),
            (
                Coeff::Mod {
                    value: a,
                    modulus: p,
                },
                Coeff::Mod {
                    value: b,
                    modulus: q,
                },
            ) => {
                debug_assert_eq!(p, q, "mixed prime fields");
                Coeff::Mod {
                    value: ((*a as u64 * *b as u64) % *p as u64) as u32,
                    modulus: *p,
                }
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Coeff {
        assert!(!self.is_zero(), "inverse of zero coefficient");
        match self {
            Coeff::Rat(a) => Coeff::Rat(a.recip()),
            Coeff::Mod { value, modulus } => {
                let (g, x, _) = ext_gcd(*value as i64, *modulus as i64);
                debug_assert_eq!(g, 1);
                Coeff::Mod {
                    value: x.rem_euclid(*modulus as i64) as u32,
                    modulus: *modulus,
                }
            }
        }
    }

    pub fn div(&self, other: &Coeff) -> Coeff {
        self.mul(&other.inv())
    }

    /// True when the text form starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Rat(r) => r.is_negative(),
            Coeff::Mod { .. } => false,
        }
    }

    pub fn abs(&self) -> Coeff {
        match self {
            Coeff::Rat(r) => Coeff::Rat(r.abs()),
            c => c.clone(),
        }
    }

    /// Reduction of a rational into `F_p`; `None` if the denominator is
    /// divisible by `p`.
    pub fn reduce_mod(&self, p: u32) -> Option<Coeff> {
        match self {
            Coeff::Rat(r) => Field::Prime(p).fraction(r.numer(), r.denom()),
            Coeff::Mod { modulus, .. } if *modulus == p => Some(self.clone()),
            Coeff::Mod { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Rat(r) => Some(r),
            Coeff::Mod { .. } => None,
        }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Coeff::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}
