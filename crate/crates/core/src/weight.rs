use std::fmt;

use num::{BigInt, BigRational};

use crate::error::{DrwError, Result};

/// One coordinate `j / p^u` of a weight, canonical: `u = 0` when `j = 0`,
/// otherwise `p` does not divide `j` unless `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightCoord {
    pub j: u64,
    pub u: u32,
}

impl WeightCoord {
    pub const ZERO: WeightCoord = WeightCoord { j: 0, u: 0 };

    pub fn new(j: u64, u: u32, p: u64) -> Self {
        let mut c = WeightCoord { j, u };
        c.normalize(p);
        c
    }

    fn normalize(&mut self, p: u64) {
        if self.j == 0 {
            self.u = 0;
            return;
        }
        while self.u > 0 && self.j.is_multiple_of(p) {
            self.j /= p;
            self.u -= 1;
        }
    }

    pub fn is_canonical(&self, p: u64) -> bool {
        if self.j == 0 {
            self.u == 0
        } else {
            self.u == 0 || !self.j.is_multiple_of(p)
        }
    }

    pub fn to_rational(&self, p: u64) -> BigRational {
        BigRational::new(BigInt::from(self.j), BigInt::from(p).pow(self.u))
    }
}

/// Exponent vector in `(Z[1/p]_{>=0})^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    coords: Vec<WeightCoord>,
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| DrwError::WeightOverflow(format!("{p}^{e} does not fit in 64 bits")))
}

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight { coords: vec![WeightCoord::ZERO; n] }
    }

    pub fn integral(exps: &[u64]) -> Self {
        Weight { coords: exps.iter().map(|&j| WeightCoord { j, u: 0 }).collect() }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut w = Self::zero(n);
        w.coords[i] = WeightCoord { j: 1, u: 0 };
        w
    }

    /// Builds a weight from `(j, u)` pairs, normalizing each coordinate.
    pub fn from_pairs(pairs: &[(u64, u32)], p: u64) -> Self {
        Weight { coords: pairs.iter().map(|&(j, u)| WeightCoord::new(j, u, p)).collect() }
    }

    /// Builds a weight from pairs that must already be canonical.
    pub fn from_canonical_pairs(pairs: &[(u64, u32)], p: u64) -> Result<Self> {
        let coords: Vec<WeightCoord> = pairs.iter().map(|&(j, u)| WeightCoord { j, u }).collect();
        if let Some(c) = coords.iter().find(|c| !c.is_canonical(p)) {
            return Err(DrwError::Invalid(format!(
                "non-canonical weight coordinate [{}, {}]",
                c.j, c.u
            )));
        }
        Ok(Weight { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[WeightCoord] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> WeightCoord {
        self.coords[i]
    }

    /// `u(k)`: the largest denominator exponent.
    pub fn denominator_exp(&self) -> u32 {
        self.coords.iter().map(|c| c.u).max().unwrap_or(0)
    }

    pub fn is_integral(&self) -> bool {
        self.denominator_exp() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.j == 0)
    }

    /// Index of the coordinate of maximal denominator exponent, smallest
    /// index on ties.
    pub fn pivot(&self) -> usize {
        let u = self.denominator_exp();
        self.coords.iter().position(|c| c.u == u).unwrap_or(0)
    }

    /// `|k|` as an exact rational.
    pub fn total(&self, p: u64) -> BigRational {
        self.coords
            .iter()
            .fold(BigRational::from_integer(0.into()), |acc, c| acc + c.to_rational(p))
    }

    pub fn add(&self, other: &Weight, p: u64) -> Result<Weight> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for (a, b) in self.coords.iter().zip(&other.coords) {
            let u = a.u.max(b.u);
            let ja = a.j.checked_mul(checked_pow(p, u - a.u)?);
            let jb = b.j.checked_mul(checked_pow(p, u - b.u)?);
            let j = match (ja, jb) {
                (Some(x), Some(y)) => x.checked_add(y),
                _ => None,
            }
            .ok_or_else(|| DrwError::WeightOverflow("weight numerator overflow".into()))?;
            coords.push(WeightCoord::new(j, u, p));
        }
        Ok(Weight { coords })
    }

    /// `k -> p k`.
    pub fn times_p(&self, p: u64) -> Result<Weight> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            if c.u > 0 {
                coords.push(WeightCoord { j: c.j, u: c.u - 1 });
            } else {
                let j = c
                    .j
                    .checked_mul(p)
                    .ok_or_else(|| DrwError::WeightOverflow("weight numerator overflow".into()))?;
                coords.push(WeightCoord { j, u: 0 });
            }
        }
        Ok(Weight { coords })
    }

    /// `k -> k / p`.
    pub fn div_p(&self, p: u64) -> Weight {
        let coords = self
            .coords
            .iter()
            .map(|c| {
                if c.j == 0 {
                    *c
                } else if c.u == 0 && c.j % p == 0 {
                    WeightCoord { j: c.j / p, u: 0 }
                } else {
                    WeightCoord { j: c.j, u: c.u + 1 }
                }
            })
            .collect();
        Weight { coords }
    }

    /// Integer exponents, if the weight is integral.
    pub fn as_integral(&self) -> Option<Vec<u64>> {
        if self.is_integral() {
            Some(self.coords.iter().map(|c| c.j).collect())
        } else {
            None
        }
    }

    /// Numerators over the common denominator `p^scale`; requires
    /// `scale >= u(k)`.
    pub fn scaled(&self, p: u64, scale: u32) -> Result<Vec<u64>> {
        self.coords
            .iter()
            .map(|c| {
                checked_pow(p, scale - c.u)?
                    .checked_mul(c.j)
                    .ok_or_else(|| DrwError::WeightOverflow("weight numerator overflow".into()))
            })
            .collect()
    }

    pub fn from_scaled(nums: &[u64], scale: u32, p: u64) -> Weight {
        Weight { coords: nums.iter().map(|&j| WeightCoord::new(j, scale, p)).collect() }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if c.u == 0 {
                write!(f, "{}", c.j)?;
            } else {
                write!(f, "{}/p^{}", c.j, c.u)?;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_normalizes() {
        let a = Weight::from_pairs(&[(1, 1)], 3);
        let b = Weight::from_pairs(&[(2, 1)], 3);
        assert_eq!(a.add(&b, 3).unwrap(), Weight::integral(&[1]));
        let c = Weight::from_pairs(&[(1, 2)], 3);
        assert_eq!(a.add(&c, 3).unwrap(), Weight::from_pairs(&[(4, 2)], 3));
    }

    #[test]
    fn frobenius_and_verschiebung_on_weights() {
        let p = 3;
        let k = Weight::from_pairs(&[(2, 0), (1, 1)], p);
        let v = k.div_p(p);
        assert_eq!(v, Weight::from_pairs(&[(2, 1), (1, 2)], p));
        assert_eq!(v.times_p(p).unwrap(), k);
        assert_eq!(Weight::integral(&[3]).div_p(p), Weight::integral(&[1]));
    }

    #[test]
    fn pivot_prefers_largest_denominator_then_smallest_index() {
        let k = Weight::from_pairs(&[(1, 1), (1, 2), (2, 2)], 3);
        assert_eq!(k.pivot(), 1);
        assert_eq!(k.denominator_exp(), 2);
        assert!(Weight::from_canonical_pairs(&[(3, 1)], 3).is_err());
    }
}
