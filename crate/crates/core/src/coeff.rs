//! Exact coefficients.
//!
//! Coefficients are rationals whose denominators may contain `p` (from `d`
//! and `V`) as well as units prime to `p` (from the Koszul homotopy, which
//! divides by the numerator of a weight coordinate). Everything is exact;
//! `p`-adic valuations are computed on demand.

use num::bigint::Sign;
use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{DrwError, Result};

pub type Coeff = BigRational;

/// `v_p` of a nonzero integer.
pub fn vp_int(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `v_p` of a rational, `None` for zero.
pub fn vp(c: &Coeff, p: u64) -> Option<i64> {
    if c.is_zero() {
        return None;
    }
    Some(vp_int(c.numer(), p) as i64 - vp_int(c.denom(), p) as i64)
}

pub fn int(x: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(x))
}

pub fn from_big(x: BigInt) -> Coeff {
    BigRational::from_integer(x)
}

pub fn pow_p(p: u64, e: i64) -> Coeff {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(modulus).extended_gcd(modulus);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(modulus))
    } else {
        None
    }
}

/// Representative in `[0, p^e)` of a `p`-integral rational.
pub fn reduce_mod(c: &Coeff, p: u64, e: u32) -> Result<BigInt> {
    let modulus = BigInt::from(p).pow(e);
    if c.is_zero() || e == 0 {
        return Ok(BigInt::zero());
    }
    if vp(c, p).unwrap() < 0 {
        return Err(DrwError::NotIntegral(format!("coefficient {c} has negative valuation")));
    }
    let inv = mod_inverse(c.denom(), &modulus)
        .ok_or_else(|| DrwError::NotIntegral(format!("denominator of {c} is not a unit")))?;
    Ok((c.numer() * inv).mod_floor(&modulus))
}

/// Serialized shape of a coefficient: `num / (den * p^pexp)` with `pexp >= 0`
/// minimal and `den` prime to `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicRational {
    pub num: BigInt,
    pub pexp: u32,
    pub den: BigInt,
}

impl PadicRational {
    pub fn from_coeff(c: &Coeff, p: u64) -> Self {
        if c.is_zero() {
            return PadicRational { num: BigInt::zero(), pexp: 0, den: BigInt::one() };
        }
        let dv = vp_int(c.denom(), p);
        let pden = BigInt::from(p).pow(dv);
        let den = c.denom() / &pden;
        PadicRational { num: c.numer().clone(), pexp: dv, den }
    }

    pub fn to_coeff(&self, p: u64) -> Result<Coeff> {
        if self.den.is_zero() || self.den.sign() == Sign::Minus {
            return Err(DrwError::Invalid("coefficient denominator must be positive".into()));
        }
        if (&self.den % BigInt::from(p)).is_zero() {
            return Err(DrwError::Invalid("unit denominator divisible by p".into()));
        }
        let den = &self.den * BigInt::from(p).pow(self.pexp);
        Ok(BigRational::new(self.num.clone(), den))
    }
}

/// Small helper for printing coefficients in diagnostics.
pub fn to_f64(c: &Coeff) -> f64 {
    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn is_unit_den(c: &Coeff) -> bool {
    c.denom().is_one() || c.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(vp(&int(18), 3), Some(2));
        assert_eq!(vp(&BigRational::new(2.into(), 9.into()), 3), Some(-2));
        assert_eq!(vp(&BigRational::new(9.into(), 2.into()), 3), Some(2));
        assert_eq!(vp(&int(0), 3), None);
    }

    #[test]
    fn reduction_uses_unit_inverse() {
        // 1/2 mod 9 = 5
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(reduce_mod(&half, 3, 2).unwrap(), BigInt::from(5));
        assert_eq!(reduce_mod(&int(-1), 3, 2).unwrap(), BigInt::from(8));
        assert!(reduce_mod(&BigRational::new(1.into(), 3.into()), 3, 2).is_err());
    }

    #[test]
    fn serialized_shape() {
        let c = BigRational::new(3.into(), 2.into());
        let s = PadicRational::from_coeff(&c, 3);
        assert_eq!((s.num.clone(), s.pexp, s.den.clone()), (3.into(), 0, 2.into()));
        let c = BigRational::new(5.into(), 18.into());
        let s = PadicRational::from_coeff(&c, 3);
        assert_eq!((s.num.clone(), s.pexp, s.den.clone()), (5.into(), 2, 2.into()));
        assert_eq!(s.to_coeff(3).unwrap(), c);
    }
}
