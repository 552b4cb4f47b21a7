use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::IpsError;

/// `num / 2^bits` in lowest terms; `bits` is the number of coins needed to
/// realize it exactly (0 for 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    bits: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, bits: 0 };

    pub fn new(num: u64, bits: u32) -> Result<Self, IpsError> {
        if bits > 62 || num >= 1u64 << bits {
            return Err(IpsError::NotDyadic(format!("{num}/2^{bits}")));
        }
        let (mut num, mut bits) = (num, bits);
        if num == 0 {
            return Ok(Dyadic::ZERO);
        }
        while num % 2 == 0 {
            num /= 2;
            bits -= 1;
        }
        Ok(Dyadic { num, bits })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_ratio(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::one() << self.bits)
    }

    pub fn from_ratio(r: &BigRational) -> Result<Self, IpsError> {
        let bad = || IpsError::NotDyadic(format!("{}/{}", r.numer(), r.denom()));
        if r < &BigRational::zero() || r >= &BigRational::one() {
            return Err(bad());
        }
        let d = r.denom();
        let bits = d.bits() - 1;
        if BigInt::one() << bits != *d {
            return Err(bad());
        }
        let num = u64::try_from(r.numer()).map_err(|_| bad())?;
        Dyadic::new(num, bits as u32).map_err(|_| bad())
    }

    /// Accepts `a/2^B`, `a/b` with b a power of two, or `0`.
    pub fn parse(s: &str) -> Result<Self, IpsError> {
        let bad = || IpsError::NotDyadic(s.to_string());
        let s = s.trim();
        let (num, den) = s.split_once('/').unwrap_or((s, "1"));
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den = den.trim();
        let bits = if let Some(exp) = den.strip_prefix("2^") {
            exp.parse::<u32>().map_err(|_| bad())?
        } else {
            let d: u64 = den.parse().map_err(|_| bad())?;
            if !d.is_power_of_two() {
                return Err(bad());
            }
            d.trailing_zeros()
        };
        Dyadic::new(num, bits).map_err(|_| bad())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.bits)
    }
}
