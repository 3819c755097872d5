//! Rings without unit and the product expansion
//! `∏(x_i + y_i) = ∏x_i - Σ_f ∏f_i`, where `f` ranges over the choices
//! `f_i ∈ {x_i + y_i, -y_i}` with at least one `-y_i`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{DrwError, Result};
use crate::form::Form;

/// A ring without unit. Products keep their order.
pub trait Rng {
    type Elem: Clone + PartialEq + Debug;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// `a + (-a)`, so no unit or explicit zero is needed.
    fn zero_like(&self, a: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(a))
    }

    fn product(&self, xs: &[Self::Elem]) -> Self::Elem {
        let (first, rest) = xs.split_first().expect("nonempty product");
        rest.iter().fold(first.clone(), |acc, x| self.mul(&acc, x))
    }
}

/// `LHS - RHS` of the expansion, computed literally over all `2^{t+1} - 1`
/// sign choices.
pub fn rng_expansion_check<R: Rng>(ring: &R, xs: &[R::Elem], ys: &[R::Elem]) -> Result<R::Elem> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(DrwError::ShapeMismatch(format!("{} x values and {} y values", xs.len(), ys.len())));
    }
    let len = xs.len();
    if len > 20 {
        return Err(DrwError::Invalid(format!("{len} factors would need 2^{len} terms")));
    }
    let sums: Vec<R::Elem> = xs.iter().zip(ys).map(|(x, y)| ring.add(x, y)).collect();
    let negs: Vec<R::Elem> = ys.iter().map(|y| ring.neg(y)).collect();
    let lhs = ring.product(&sums);
    let mut diff = ring.add(&lhs, &ring.neg(&ring.product(xs)));
    for mask in 1u32..(1 << len) {
        let factors: Vec<R::Elem> =
            (0..len).map(|i| if mask >> i & 1 == 1 { negs[i].clone() } else { sums[i].clone() }).collect();
        diff = ring.add(&diff, &ring.product(&factors));
    }
    Ok(diff)
}

/// The ideal `gZ / NZ` of `Z / NZ`, with `g | N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueIdeal {
    pub generator: u64,
    pub modulus: u64,
}

impl ResidueIdeal {
    pub fn new(generator: u64, modulus: u64) -> Result<Self> {
        if generator == 0 || modulus == 0 || !modulus.is_multiple_of(generator) {
            return Err(DrwError::Invalid(format!("{generator}Z/{modulus}Z is not an ideal")));
        }
        Ok(ResidueIdeal { generator, modulus })
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus).step_by(self.generator as usize)
    }
}

impl Rng for ResidueIdeal {
    type Elem = u64;

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.modulus
    }
}

/// Strictly upper triangular 3x3 matrices over `Z / NZ`, stored as the
/// entries `(a_12, a_13, a_23)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpperNilpotent3 {
    pub modulus: u64,
}

impl UpperNilpotent3 {
    pub fn elements(&self) -> impl Iterator<Item = [u64; 3]> + '_ {
        let n = self.modulus;
        (0..n * n * n).map(move |k| [k % n, (k / n) % n, k / (n * n)])
    }
}

impl Rng for UpperNilpotent3 {
    type Elem = [u64; 3];

    fn add(&self, a: &[u64; 3], b: &[u64; 3]) -> [u64; 3] {
        std::array::from_fn(|i| (a[i] + b[i]) % self.modulus)
    }

    fn neg(&self, a: &[u64; 3]) -> [u64; 3] {
        std::array::from_fn(|i| (self.modulus - a[i] % self.modulus) % self.modulus)
    }

    fn mul(&self, a: &[u64; 3], b: &[u64; 3]) -> [u64; 3] {
        [0, (a[0] * b[2]) % self.modulus, 0]
    }
}

/// The free rng on a set of generators: integer combinations of nonempty
/// words. An identity that holds here holds in every rng.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeRng;

pub type Word = Vec<usize>;

/// Element of [`FreeRng`].
pub type FreeElem = BTreeMap<Word, i64>;

impl FreeRng {
    pub fn generator(i: usize) -> FreeElem {
        BTreeMap::from([(vec![i], 1)])
    }
}

impl Rng for FreeRng {
    type Elem = FreeElem;

    fn add(&self, a: &FreeElem, b: &FreeElem) -> FreeElem {
        let mut out = a.clone();
        for (w, c) in b {
            *out.entry(w.clone()).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn neg(&self, a: &FreeElem) -> FreeElem {
        a.iter().map(|(w, c)| (w.clone(), -c)).collect()
    }

    fn mul(&self, a: &FreeElem, b: &FreeElem) -> FreeElem {
        let mut out = FreeElem::new();
        for (wa, ca) in a {
            for (wb, cb) in b {
                let w: Word = wa.iter().chain(wb).copied().collect();
                *out.entry(w).or_insert(0) += ca * cb;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }
}

/// Forms under the wedge product, truncated after every operation.
#[derive(Debug, Clone, Copy, Default)]
pub struct FormRng;

impl Rng for FormRng {
    type Elem = Form;

    fn add(&self, a: &Form, b: &Form) -> Form {
        a.add(b).and_then(|s| s.truncate()).expect("forms share a context")
    }

    fn neg(&self, a: &Form) -> Form {
        a.neg().truncate().expect("truncation of an integral form")
    }

    fn mul(&self, a: &Form, b: &Form) -> Form {
        a.mul(b).and_then(|s| s.truncate()).expect("forms share a context")
    }
}
