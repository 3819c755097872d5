//! Sparse multivariate polynomials with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::integer::Integer;
use num::{BigInt, One, Signed, Zero};

use crate::error::{DrwError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZPoly {
    n: usize,
    terms: BTreeMap<Vec<u64>, BigInt>,
}

impl ZPoly {
    pub fn zero(n: usize) -> Self {
        ZPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        let mut f = Self::zero(n);
        f.push(vec![0; n], c.into());
        f
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(e, BigInt::one())
    }

    pub fn monomial(exps: Vec<u64>, c: BigInt) -> Self {
        let mut f = Self::zero(exps.len());
        f.push(exps, c);
        f
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u64>, BigInt)>) -> Result<Self> {
        let mut f = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(DrwError::ShapeMismatch(format!("exponent vector of length {} for n = {n}", e.len())));
            }
            f.push(e, c);
        }
        Ok(f)
    }

    fn push(&mut self, e: Vec<u64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u64]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// The constant coefficient if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&vec![0; self.n]).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        if c.is_zero() {
            return ZPoly::zero(self.n);
        }
        ZPoly { n: self.n, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let mut acc: BTreeMap<Vec<u64>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        ZPoly { n: self.n, terms: acc }
    }

    pub fn pow(&self, e: u64) -> ZPoly {
        let mut result = ZPoly::one(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `f^e` with coefficients reduced modulo `modulus` along the way.
    pub fn pow_mod(&self, e: u64, modulus: &BigInt) -> ZPoly {
        let mut result = ZPoly::one(self.n).reduce(modulus);
        let mut base = self.reduce(modulus);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).reduce(modulus);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).reduce(modulus);
            }
        }
        result
    }

    /// Coefficients reduced into `[0, modulus)`.
    pub fn reduce(&self, modulus: &BigInt) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (e, c) in &self.terms {
            out.push(e.clone(), c.mod_floor(modulus));
        }
        out
    }

    /// Exact division of every coefficient.
    pub fn div_exact(&self, d: &BigInt) -> Result<ZPoly> {
        let mut out = ZPoly::zero(self.n);
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(DrwError::InexactDivision(format!("{c} by {d}")));
            }
            out.push(e.clone(), q);
        }
        Ok(out)
    }

    /// `f(g_1, ..., g_n)`.
    pub fn compose(&self, subs: &[ZPoly]) -> ZPoly {
        let m = subs.first().map(|g| g.n).unwrap_or(self.n);
        let mut cache: Vec<BTreeMap<u64, ZPoly>> = vec![BTreeMap::new(); subs.len()];
        let mut out = ZPoly::zero(m);
        for (e, c) in &self.terms {
            let mut t = ZPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = cache[i].entry(k).or_insert_with(|| subs[i].pow(k)).clone();
                t = t.mul(&pw);
            }
            out = out.add(&t);
        }
        out
    }

    /// `f(g_1, ..., g_n)` modulo `modulus`.
    pub fn compose_mod(&self, subs: &[ZPoly], modulus: &BigInt) -> ZPoly {
        let m = subs.first().map(|g| g.n).unwrap_or(self.n);
        let mut cache: Vec<BTreeMap<u64, ZPoly>> = vec![BTreeMap::new(); subs.len()];
        let mut out = ZPoly::zero(m);
        for (e, c) in &self.terms {
            let mut t = ZPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = cache[i].entry(k).or_insert_with(|| subs[i].pow_mod(k, modulus)).clone();
                t = t.mul(&pw).reduce(modulus);
            }
            out = out.add(&t);
        }
        out.reduce(modulus)
    }

    /// `∂f / ∂x_i`.
    pub fn derivative(&self, i: usize) -> ZPoly {
        let mut out = ZPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.push(e2, c * BigInt::from(e[i]));
        }
        out
    }

    /// Largest absolute value of a coefficient.
    pub fn height(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{k}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let x = ZPoly::var(2, 0);
        let y = ZPoly::var(2, 1);
        let s = x.add(&y);
        let sq = s.pow(2);
        assert_eq!(sq.coeff(&[1, 1]), BigInt::from(2));
        assert_eq!(sq.sub(&x.pow(2)).sub(&y.pow(2)), x.mul(&y).scale(&BigInt::from(2)));
        assert!(s.sub(&s).is_zero());
    }

    #[test]
    fn composition_and_derivative() {
        let x = ZPoly::var(1, 0);
        let f = x.pow(2).add(&x.scale(&BigInt::from(2)));
        let ff = f.compose(std::slice::from_ref(&f));
        // (x^2 + 2x)^2 + 2(x^2 + 2x)
        assert_eq!(ff.coeff(&[4]), BigInt::one());
        assert_eq!(ff.coeff(&[3]), BigInt::from(4));
        assert_eq!(ff.coeff(&[2]), BigInt::from(6));
        assert_eq!(ff.coeff(&[1]), BigInt::from(4));
        assert_eq!(f.derivative(0), x.scale(&BigInt::from(2)).add(&ZPoly::constant(1, 2)));
        let m = BigInt::from(4);
        assert_eq!(f.compose_mod(std::slice::from_ref(&f), &m), ff.reduce(&m));
    }
}
