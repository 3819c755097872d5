//! The fractional-exponent model of the de Rham-Witt complex of
//! `F_p[x_1, ..., x_n]`.
//!
//! A [`Form`] is a finite sum of monomials `c * x^k * dlog x_I` where the
//! weight `k` has coordinates in `Z[1/p]_{>=0}`, `I` is a set of indices with
//! `k_i > 0` for every `i` in `I`, and `c` is an exact rational. The complex
//! `W Ω` is the sub-dga of forms `a` such that both `a` and `d a` have
//! `p`-integral coefficients.
//!
//! * `d(c x^k dlog_I) = sum_{i not in I} c k_i x^k dlog_i ^ dlog_I`
//! * `F(c x^k dlog_I) = c x^{pk} dlog_I`
//! * `V(c x^k dlog_I) = p c x^{k/p} dlog_I`

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::coeff::{self, Coeff};
use crate::context::Context;
use crate::error::{DrwError, Result};
use crate::weight::Weight;

/// Set of dlog indices, bit `i` standing for `dlog x_{i+1}`.
pub type DlogSet = u32;

pub(crate) fn mask_len(mask: DlogSet) -> usize {
    mask.count_ones() as usize
}

/// Sign of `dlog_a ^ dlog_b` once rewritten in increasing order, `None` when
/// the two sets meet.
pub(crate) fn wedge_sign(a: DlogSet, b: DlogSet) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        // elements of `a` above j must jump over it
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

/// Number of elements of `mask` below index `i`.
pub(crate) fn below(mask: DlogSet, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

pub fn mask_from_indices(indices: &[usize]) -> DlogSet {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn mask_indices(mask: DlogSet) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Key of a monomial: its weight and dlog set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub weight: Weight,
    pub dlog: DlogSet,
}

impl Basis {
    pub fn degree(&self) -> usize {
        mask_len(self.dlog)
    }
}

/// One term of a form, with 0-based dlog indices in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialForm {
    pub coeff: Coeff,
    pub weight: Weight,
    pub dlog: Vec<usize>,
}

impl MonomialForm {
    pub fn degree(&self) -> usize {
        self.dlog.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    ctx: Context,
    terms: BTreeMap<Basis, Coeff>,
}

impl Form {
    pub fn zero(ctx: &Context) -> Self {
        Form { ctx: *ctx, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Context, c: Coeff) -> Self {
        let mut f = Form::zero(ctx);
        f.push(Basis { weight: Weight::zero(ctx.n()), dlog: 0 }, c);
        f
    }

    pub fn one(ctx: &Context) -> Self {
        Self::constant(ctx, BigRational::one())
    }

    pub fn integer(ctx: &Context, c: i64) -> Self {
        Self::constant(ctx, coeff::int(c))
    }

    /// The Teichmuller variable `x_{i+1}` (0-based `i`).
    pub fn var(ctx: &Context, i: usize) -> Self {
        let mut f = Form::zero(ctx);
        f.push(Basis { weight: Weight::unit(ctx.n(), i), dlog: 0 }, BigRational::one());
        f
    }

    /// `c * x^k * dlog_I` after validating the weight and index set.
    pub fn monomial(ctx: &Context, c: Coeff, weight: Weight, dlog: &[usize]) -> Result<Self> {
        let mut sorted = dlog.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != dlog.len() {
            return Ok(Form::zero(ctx));
        }
        // sign of sorting the given order
        let mut inversions = 0;
        for a in 0..dlog.len() {
            for b in a + 1..dlog.len() {
                if dlog[a] > dlog[b] {
                    inversions += 1;
                }
            }
        }
        let c = if inversions % 2 == 1 { -c } else { c };
        let mask = mask_from_indices(&sorted);
        Self::from_basis(ctx, Basis { weight, dlog: mask }, c)
    }

    pub(crate) fn from_basis(ctx: &Context, b: Basis, c: Coeff) -> Result<Self> {
        validate_basis(ctx, &b)?;
        let mut f = Form::zero(ctx);
        f.push(b, c);
        Ok(f)
    }

    /// Builds a form from raw terms, validating every key.
    pub fn from_terms(ctx: &Context, terms: impl IntoIterator<Item = (Basis, Coeff)>) -> Result<Self> {
        let mut f = Form::zero(ctx);
        for (b, c) in terms {
            validate_basis(ctx, &b)?;
            f.push(b, c);
        }
        Ok(f)
    }

    pub(crate) fn from_terms_unchecked(ctx: &Context, terms: impl IntoIterator<Item = (Basis, Coeff)>) -> Self {
        let mut f = Form::zero(ctx);
        for (b, c) in terms {
            f.push(b, c);
        }
        f
    }

    pub(crate) fn push(&mut self, b: Basis, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &Basis) -> Option<&Coeff> {
        self.terms.get(b)
    }

    pub fn monomials(&self) -> Vec<MonomialForm> {
        self.terms
            .iter()
            .map(|(b, c)| MonomialForm { coeff: c.clone(), weight: b.weight.clone(), dlog: mask_indices(b.dlog) })
            .collect()
    }

    /// The common degree of all terms, `None` for mixed degrees; zero counts
    /// as homogeneous of every degree and reports `Some(0)`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Basis::degree);
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn is_homogeneous_of(&self, deg: usize) -> bool {
        self.terms.keys().all(|b| b.degree() == deg)
    }

    pub fn degree_part(&self, deg: usize) -> Form {
        self.filter(|b| b.degree() == deg)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Basis::degree).max().unwrap_or(0)
    }

    pub(crate) fn filter(&self, pred: impl Fn(&Basis) -> bool) -> Form {
        Form {
            ctx: self.ctx,
            terms: self.terms.iter().filter(|(b, _)| pred(b)).map(|(b, c)| (b.clone(), c.clone())).collect(),
        }
    }

    pub(crate) fn map_coeffs(&self, f: impl Fn(&Basis, &Coeff) -> Coeff) -> Form {
        let mut out = Form::zero(&self.ctx);
        for (b, c) in &self.terms {
            out.push(b.clone(), f(b, c));
        }
        out
    }

    pub fn integer_weight_part(&self) -> Form {
        self.filter(|b| b.weight.is_integral())
    }

    pub fn fractional_weight_part(&self) -> Form {
        self.filter(|b| !b.weight.is_integral())
    }

    /// Largest denominator exponent among the weights.
    pub fn max_denominator_exp(&self) -> u32 {
        self.terms.keys().map(|b| b.weight.denominator_exp()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.ctx.check_same(&other.ctx)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.push(b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.ctx.check_same(&other.ctx)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.push(b.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Form {
        self.map_coeffs(|_, c| -c.clone())
    }

    pub fn scale(&self, c: &Coeff) -> Form {
        if c.is_zero() {
            return Form::zero(&self.ctx);
        }
        self.map_coeffs(|_, x| x * c)
    }

    pub fn scale_int(&self, c: i64) -> Form {
        self.scale(&coeff::int(c))
    }

    /// Multiplication by `p^e`, `e` possibly negative.
    pub fn scale_p_pow(&self, e: i64) -> Form {
        self.scale(&coeff::pow_p(self.ctx.p(), e))
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Form) -> Result<Form> {
        self.ctx.check_same(&other.ctx)?;
        let p = self.ctx.p();
        let mut out = Form::zero(&self.ctx);
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                let Some(neg) = wedge_sign(ba.dlog, bb.dlog) else { continue };
                let weight = ba.weight.add(&bb.weight, p)?;
                let mut c = ca * cb;
                if neg {
                    c = -c;
                }
                out.push(Basis { weight, dlog: ba.dlog | bb.dlog }, c);
            }
        }
        out.check_degree_cap()?;
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<Form> {
        let mut result = Form::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    fn check_degree_cap(&self) -> Result<()> {
        if let Some(dmax) = self.ctx.d_max() {
            let cap = BigRational::from_integer(BigInt::from(dmax));
            for b in self.terms.keys() {
                if b.weight.total(self.ctx.p()) > cap {
                    return Err(DrwError::WeightOverflow(format!(
                        "weight {} exceeds total degree cap {dmax}",
                        b.weight
                    )));
                }
            }
        }
        Ok(())
    }

    /// The differential.
    pub fn d(&self) -> Form {
        let p = self.ctx.p();
        let mut out = Form::zero(&self.ctx);
        for (b, c) in &self.terms {
            for i in 0..self.ctx.n() {
                let k = b.weight.coord(i);
                if k.j == 0 || b.dlog & (1 << i) != 0 {
                    continue;
                }
                let mut t = c * k.to_rational(p);
                if below(b.dlog, i) % 2 == 1 {
                    t = -t;
                }
                out.push(Basis { weight: b.weight.clone(), dlog: b.dlog | (1 << i) }, t);
            }
        }
        out
    }

    /// Frobenius: weights multiplied by `p`.
    pub fn frobenius(&self) -> Form {
        let p = self.ctx.p();
        let mut out = Form::zero(&self.ctx);
        for (b, c) in &self.terms {
            let weight = b.weight.times_p(p).expect("weight overflow under Frobenius");
            out.push(Basis { weight, dlog: b.dlog }, c.clone());
        }
        out
    }

    pub fn frobenius_pow(&self, r: u32) -> Form {
        (0..r).fold(self.clone(), |a, _| a.frobenius())
    }

    /// Verschiebung: coefficients multiplied by `p`, weights divided by `p`.
    pub fn verschiebung(&self) -> Result<Form> {
        let p = self.ctx.p();
        let pc = coeff::int(p as i64);
        let mut out = Form::zero(&self.ctx);
        for (b, c) in &self.terms {
            let weight = b.weight.div_p(p);
            if weight.denominator_exp() > self.ctx.u_max() {
                return Err(DrwError::WeightOverflow(format!(
                    "V produces weight {weight} beyond u_max = {}",
                    self.ctx.u_max()
                )));
            }
            out.push(Basis { weight, dlog: b.dlog }, c * &pc);
        }
        Ok(out)
    }

    pub fn verschiebung_pow(&self, r: u32) -> Result<Form> {
        (0..r).try_fold(self.clone(), |a, _| a.verschiebung())
    }

    /// `min v_p` over the coefficients of `a` and of `d a`; `None` for zero.
    /// Negative values mean the form is not in the complex.
    pub fn valuation(&self) -> Option<i64> {
        let p = self.ctx.p();
        let own = self.terms.values().filter_map(|c| coeff::vp(c, p));
        let da = self.d();
        let diff = da.terms.values().filter_map(|c| coeff::vp(c, p)).collect::<Vec<_>>();
        own.chain(diff).min()
    }

    /// `min v_p` over the coefficients only.
    pub fn coefficient_valuation(&self) -> Option<i64> {
        let p = self.ctx.p();
        self.terms.values().filter_map(|c| coeff::vp(c, p)).min()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    pub fn require_integral(&self, what: &str) -> Result<()> {
        if self.is_integral() {
            Ok(())
        } else {
            Err(DrwError::NotIntegral(format!("{what}: {self}")))
        }
    }

    /// Largest `s` with `p^{-s} a` integral; `None` stands for `+infinity`.
    pub fn vp_form(&self) -> Result<Option<u64>> {
        match self.valuation() {
            None => Ok(None),
            Some(v) if v >= 0 => Ok(Some(v as u64)),
            Some(_) => Err(DrwError::NotIntegral(format!("vp of {self}"))),
        }
    }

    /// Exact equality after moving both sides to canonical representatives
    /// modulo `Fil^m`.
    pub fn congruent(&self, other: &Form) -> Result<bool> {
        Ok(self.sub(other)?.truncate()?.is_zero())
    }

    pub fn with_context(&self, ctx: &Context) -> Result<Form> {
        if ctx.p() != self.ctx.p() || ctx.n() != self.ctx.n() {
            return Err(DrwError::ContextMismatch(self.ctx.to_string(), ctx.to_string()));
        }
        for b in self.terms.keys() {
            validate_basis(ctx, b)?;
        }
        Ok(Form { ctx: *ctx, terms: self.terms.clone() })
    }

    pub fn has_fractional_coefficients(&self) -> bool {
        self.terms.values().any(|c| !c.denom().is_one())
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.numer().abs()).max().unwrap_or_default()
    }
}

pub(crate) fn validate_basis(ctx: &Context, b: &Basis) -> Result<()> {
    if b.weight.n() != ctx.n() {
        return Err(DrwError::Invalid(format!(
            "weight {} has {} coordinates, expected {}",
            b.weight,
            b.weight.n(),
            ctx.n()
        )));
    }
    if ctx.n() < 32 && b.dlog >> ctx.n() != 0 {
        return Err(DrwError::Invalid(format!("dlog index beyond n = {}", ctx.n())));
    }
    for i in mask_indices(b.dlog) {
        if b.weight.coord(i).j == 0 {
            return Err(DrwError::Invalid(format!(
                "dlog x_{} with zero exponent in weight {}",
                i + 1,
                b.weight
            )));
        }
    }
    let u = b.weight.denominator_exp();
    if u > ctx.u_max() {
        return Err(DrwError::WeightOverflow(format!(
            "weight {} has denominator exponent {u} > u_max = {}",
            b.weight,
            ctx.u_max()
        )));
    }
    if let Some(dmax) = ctx.d_max() {
        if b.weight.total(ctx.p()) > BigRational::from_integer(BigInt::from(dmax)) {
            return Err(DrwError::WeightOverflow(format!("weight {} exceeds d_max = {dmax}", b.weight)));
        }
    }
    Ok(())
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.ctx.p();
        for (idx, (b, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, k) in b.weight.coords().iter().enumerate() {
                if k.j == 0 {
                    continue;
                }
                if k.u == 0 {
                    write!(f, "*x{}^{}", i + 1, k.j)?;
                } else {
                    write!(f, "*x{}^({}/{})", i + 1, k.j, p.pow(k.u))?;
                }
            }
            for i in mask_indices(b.dlog) {
                write!(f, "*dlog{}", i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;

    fn ctx(p: u64, n: usize, m: u32) -> Context {
        Context::new(p, n, m).unwrap()
    }

    fn mono(c: &Context, coeff: i64, pairs: &[(u64, u32)], dlog: &[usize]) -> Form {
        Form::monomial(c, int(coeff), Weight::from_pairs(pairs, c.p()), dlog).unwrap()
    }

    #[test]
    fn addition_identities() {
        let c = ctx(3, 1, 3);
        let x = Form::var(&c, 0);
        assert_eq!(x.add(&Form::zero(&c)).unwrap(), x);
        assert!(x.add(&x.neg()).unwrap().is_zero());
        let a = mono(&c, 3, &[(1, 1)], &[]);
        assert_eq!(a.add(&a).unwrap(), mono(&c, 6, &[(1, 1)], &[]));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = Form::one(&ctx(3, 1, 3));
        let b = Form::one(&ctx(3, 1, 2));
        assert!(matches!(a.add(&b), Err(DrwError::ContextMismatch(..))));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn products() {
        let c = ctx(3, 2, 3);
        let w = mono(&c, 5, &[(1, 0), (2, 1)], &[1]);
        assert_eq!(Form::one(&c).mul(&w).unwrap(), w);
        let a = mono(&c, 3, &[(1, 1), (0, 0)], &[]);
        let b = mono(&c, 3, &[(2, 1), (0, 0)], &[]);
        assert_eq!(a.mul(&b).unwrap(), mono(&c, 9, &[(1, 0), (0, 0)], &[]));
        let xd = mono(&c, 1, &[(1, 0), (0, 0)], &[0]);
        assert!(xd.mul(&xd).unwrap().is_zero());
        let yd = mono(&c, 1, &[(0, 0), (1, 0)], &[1]);
        assert_eq!(yd.mul(&xd).unwrap(), mono(&c, -1, &[(1, 0), (1, 0)], &[0, 1]));
    }

    #[test]
    fn differential_examples() {
        let c = ctx(3, 1, 3);
        let x = Form::var(&c, 0);
        assert_eq!(x.d(), mono(&c, 1, &[(1, 0)], &[0]));
        assert_eq!(mono(&c, 3, &[(1, 1)], &[]).d(), mono(&c, 1, &[(1, 1)], &[0]));
        assert!(mono(&c, 1, &[(1, 1)], &[0]).d().is_zero());
    }

    #[test]
    fn frobenius_and_verschiebung_examples() {
        let c = ctx(3, 1, 3);
        let x = Form::var(&c, 0);
        assert_eq!(x.frobenius(), mono(&c, 1, &[(3, 0)], &[]));
        assert_eq!(mono(&c, 1, &[(1, 1)], &[0]).frobenius(), mono(&c, 1, &[(1, 0)], &[0]));
        assert_eq!(Form::one(&c).frobenius(), Form::one(&c));
        assert_eq!(x.verschiebung().unwrap(), mono(&c, 3, &[(1, 1)], &[]));
        let w = mono(&c, 1, &[(2, 0)], &[0]);
        assert_eq!(w.verschiebung().unwrap().frobenius(), w.scale_int(3));
        assert_eq!(Form::one(&c).verschiebung().unwrap(), Form::integer(&c, 3));
    }

    #[test]
    fn verschiebung_respects_u_max() {
        let c = Context::with_caps(2, 1, 1, 1, None).unwrap();
        let a = mono(&c, 1, &[(1, 1)], &[]);
        assert!(matches!(a.verschiebung(), Err(DrwError::WeightOverflow(_))));
    }

    #[test]
    fn integrality_examples() {
        let c = ctx(3, 1, 3);
        assert!(!mono(&c, 1, &[(1, 1)], &[]).is_integral());
        assert!(mono(&c, 3, &[(1, 1)], &[]).is_integral());
        assert!(mono(&c, 1, &[(1, 1)], &[0]).is_integral());
    }

    #[test]
    fn vp_examples() {
        let c = ctx(3, 1, 3);
        assert_eq!(Form::zero(&c).vp_form().unwrap(), None);
        assert_eq!(mono(&c, 3, &[(1, 1)], &[]).vp_form().unwrap(), Some(0));
        assert_eq!(mono(&c, 9, &[(2, 1)], &[]).vp_form().unwrap(), Some(1));
        assert!(mono(&c, 1, &[(1, 1)], &[]).vp_form().is_err());
    }

    #[test]
    fn dlog_requires_positive_exponent() {
        let c = ctx(3, 2, 3);
        assert!(Form::monomial(&c, int(1), Weight::integral(&[1, 0]), &[1]).is_err());
    }

    #[test]
    fn monomial_sorts_indices_with_sign() {
        let c = ctx(3, 2, 3);
        let a = Form::monomial(&c, int(1), Weight::integral(&[1, 1]), &[1, 0]).unwrap();
        let b = Form::monomial(&c, int(-1), Weight::integral(&[1, 1]), &[0, 1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sign_helpers() {
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b11, 0b10), None);
        assert_eq!(wedge_sign(0b110, 0b001), Some(false));
        assert_eq!(below(0b1011, 3), 2);
    }
}
