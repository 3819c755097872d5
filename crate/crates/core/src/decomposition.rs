//! The splitting `W Ω = int ⊕ frp ⊕ d(frp)`, truncation modulo `Fil^m`,
//! `d^{-1}` on exact fractional forms and the pseudovaluations `ζ_ε`.
//!
//! At a fractional weight `k` the differential acts as `ω ↦ (Σ k_i dlog_i) ∧ ω`,
//! so `h = k_{i0}^{-1} ι_{i0}` is a contracting homotopy: `dh + hd = id`.
//! The pivot `i0` carries the largest denominator, which keeps `h` integral.

use std::fmt;

use num::{BigInt, BigRational, One, Signed};

use crate::coeff::{self, Coeff};
use crate::context::Context;
use crate::error::{DrwError, Result};
use crate::form::{below, Basis, Form};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub int: Form,
    pub frp: Form,
    pub dfrp: Form,
}

impl Decomposition {
    pub fn frac(&self) -> Form {
        self.frp.add(&self.dfrp).expect("same context")
    }

    pub fn sum(&self) -> Form {
        self.int.add(&self.frac()).expect("same context")
    }
}

/// The homotopy `h` on one fractional-weight term.
fn homotopy_term(b: &Basis, c: &Coeff, p: u64) -> Option<(Basis, Coeff)> {
    let i0 = b.weight.pivot();
    if b.dlog & (1 << i0) == 0 {
        return None;
    }
    let k = b.weight.coord(i0).to_rational(p);
    let mut v = c / k;
    if below(b.dlog, i0) % 2 == 1 {
        v = -v;
    }
    Some((Basis { weight: b.weight.clone(), dlog: b.dlog & !(1 << i0) }, v))
}

/// `h` applied weight by weight; integral weights are sent to zero.
pub fn homotopy(a: &Form) -> Form {
    let p = a.ctx().p();
    let terms = a
        .terms()
        .filter(|(b, _)| !b.weight.is_integral())
        .filter_map(|(b, c)| homotopy_term(b, c, p));
    Form::from_terms_unchecked(a.ctx(), terms)
}

/// Splitting without the integrality check.
pub(crate) fn split(a: &Form) -> Decomposition {
    let int = a.integer_weight_part();
    let frac = a.fractional_weight_part();
    let dfrp = homotopy(&frac).d();
    let frp = frac.sub(&dfrp).expect("same context");
    Decomposition { int, frp, dfrp }
}

pub fn decompose(a: &Form) -> Result<Decomposition> {
    a.require_integral("decompose")?;
    Ok(split(a))
}

/// The frp-type preimage under `d` of an exact fractional form.
pub fn d_inverse(a: &Form) -> Result<Form> {
    if !a.integer_weight_part().is_zero() {
        return Err(DrwError::NotExactFractional("input has integral-weight terms".into()));
    }
    let eta = homotopy(a);
    let residual = eta.d().sub(a)?;
    if !residual.is_zero() {
        return Err(DrwError::NotExactFractional(format!("residual {residual}")));
    }
    Ok(eta)
}

impl Form {
    /// Canonical representative modulo `Fil^m = V^m W Ω + dV^m W Ω`.
    ///
    /// Integral-weight and frp coefficients are reduced modulo `p^m`. The exact
    /// part at a weight of denominator `u` is `d η` with `η` determined by its
    /// terms containing `dlog_{i0}`; those coefficients are reduced modulo
    /// `p^{m-u}` and the part is rebuilt as `d h`.
    pub fn truncate(&self) -> Result<Form> {
        self.require_integral("truncate")?;
        let ctx = *self.ctx();
        let p = ctx.p();
        let m = ctx.m();
        let parts = split(self);
        let mut out = Form::zero(&ctx);
        for part in [&parts.int, &parts.frp] {
            for (b, c) in part.terms() {
                let r = coeff::reduce_mod(c, p, m)?;
                out.push(b.clone(), coeff::from_big(r));
            }
        }
        let mut exact = Form::zero(&ctx);
        for (b, c) in parts.dfrp.terms() {
            let u = b.weight.denominator_exp();
            if u >= m || b.dlog & (1 << b.weight.pivot()) == 0 {
                continue;
            }
            let r = coeff::reduce_mod(c, p, m - u)?;
            exact.push(b.clone(), coeff::from_big(r));
        }
        let rebuilt = homotopy(&exact).d();
        out.add(&rebuilt)
    }

    /// Truncation at a lower level `m' <= m`, keeping the context.
    pub fn truncate_at(&self, level: u32) -> Result<Form> {
        let ctx = *self.ctx();
        if level >= ctx.m() {
            return self.truncate();
        }
        let low = Context::with_caps(ctx.p(), ctx.n(), level, ctx.u_max(), ctx.d_max())?;
        self.with_context(&low)?.truncate()?.with_context(&ctx)
    }
}

/// `ε` in `]0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(BigRational);

impl Epsilon {
    pub fn new(e: BigRational) -> Result<Self> {
        if e.is_positive() && e <= BigRational::one() {
            Ok(Epsilon(e))
        } else {
            Err(DrwError::Invalid(format!("epsilon {e} outside ]0, 1]")))
        }
    }

    /// `2^{-j}`.
    pub fn pow2(j: u32) -> Self {
        Epsilon(BigRational::new(BigInt::one(), BigInt::from(2u8).pow(j)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// The default search grid `2^{-1}, ..., 2^{-12}`.
    pub fn default_grid() -> Vec<Epsilon> {
        (1..=12).map(Epsilon::pow2).collect()
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for Epsilon {
    type Err = DrwError;

    fn from_str(s: &str) -> Result<Self> {
        let r: BigRational = s.trim().parse().map_err(|_| DrwError::Invalid(format!("bad epsilon {s:?}")))?;
        Epsilon::new(r)
    }
}

/// Values of `ζ`: an exact rational or `±∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZetaValue {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl ZetaValue {
    pub fn finite(r: BigRational) -> Self {
        ZetaValue::Finite(r)
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        ZetaValue::Finite(BigRational::new(num.into(), den.into()))
    }

    pub fn add(&self, other: &ZetaValue) -> ZetaValue {
        use ZetaValue::*;
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    pub fn shift(&self, r: &BigRational) -> ZetaValue {
        self.add(&ZetaValue::Finite(r.clone()))
    }

    pub fn min(self, other: ZetaValue) -> ZetaValue {
        std::cmp::min(self, other)
    }

    pub fn ge_rational(&self, r: &BigRational) -> bool {
        match self {
            ZetaValue::PosInf => true,
            ZetaValue::NegInf => false,
            ZetaValue::Finite(a) => a >= r,
        }
    }
}

impl fmt::Display for ZetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaValue::NegInf => write!(f, "-inf"),
            ZetaValue::PosInf => write!(f, "+inf"),
            ZetaValue::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Degree offset of an integral term of degree `t`: `t/4`.
fn int_offset(degree: usize) -> BigRational {
    BigRational::new(BigInt::from(degree), BigInt::from(4))
}

/// Degree offset of an frp term of degree `s`: `s/2`. An exact term is
/// scored through its preimage, so `ζ(dx) = ζ(x)` holds on frp.
fn frp_offset(degree: usize) -> BigRational {
    BigRational::new(BigInt::from(degree), BigInt::from(2))
}

fn min_term_value(a: &Form, eps: &Epsilon, offset: impl Fn(usize) -> BigRational) -> ZetaValue {
    let p = a.ctx().p();
    a.terms()
        .map(|(b, c)| {
            let v = coeff::vp(c, p).expect("nonzero coefficient");
            let total = b.weight.total(p);
            ZetaValue::Finite(BigRational::from_integer(v.into()) + offset(b.degree()) - eps.value() * total)
        })
        .min()
        .unwrap_or(ZetaValue::PosInf)
}

/// `ζ_ε` of each summand of the splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaParts {
    pub int: ZetaValue,
    pub frp: ZetaValue,
    pub dfrp: ZetaValue,
}

impl ZetaParts {
    pub fn total(&self) -> ZetaValue {
        self.int.clone().min(self.frp.clone()).min(self.dfrp.clone())
    }
}

pub fn zeta_parts(a: &Form, eps: &Epsilon) -> Result<ZetaParts> {
    let parts = decompose(a)?;
    let int = min_term_value(&parts.int, eps, int_offset);
    let frp = min_term_value(&parts.frp, eps, frp_offset);
    let preimage = homotopy(&parts.dfrp);
    let dfrp = min_term_value(&preimage, eps, frp_offset);
    Ok(ZetaParts { int, frp, dfrp })
}

/// `ζ_ε(a)`: the minimum over the summands of `v_p` of the Witt coefficient
/// plus a degree offset, minus `ε |k|`.
pub fn zeta(a: &Form, eps: &Epsilon) -> Result<ZetaValue> {
    Ok(zeta_parts(a, eps)?.total())
}

/// `ζ̌_ε` for the identity presentation.
pub fn zeta_check(a: &Form, eps: &Epsilon) -> Result<ZetaValue> {
    zeta(a, eps)
}

/// Bounds `(int, frp, dfrp)` of the overconvergence condition.
pub fn overconvergence_bounds() -> [BigRational; 3] {
    [
        BigRational::new((-1).into(), 4.into()),
        BigRational::new(1.into(), 2.into()),
        BigRational::new(3.into(), 4.into()),
    ]
}

pub(crate) fn satisfies_bounds(parts: &ZetaParts) -> bool {
    let [bi, bf, bd] = overconvergence_bounds();
    parts.int.ge_rational(&bi) && parts.frp.ge_rational(&bf) && parts.dfrp.ge_rational(&bd)
}

/// `p^{-v_p(a)} a`.
pub fn normalize_valuation(a: &Form) -> Result<Form> {
    match a.vp_form()? {
        None => Ok(a.clone()),
        Some(v) => Ok(a.scale_p_pow(-(v as i64))),
    }
}

/// Largest grid `ε` at which every valuation-normalized sample satisfies
/// the three overconvergence bounds.
pub fn find_delta(samples: &[Form], grid: &[Epsilon]) -> Result<Option<Epsilon>> {
    if grid.is_empty() {
        return Err(DrwError::EmptyGrid);
    }
    let normalized = samples.iter().map(normalize_valuation).collect::<Result<Vec<_>>>()?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    for eps in sorted {
        let mut ok = true;
        for s in &normalized {
            if !satisfies_bounds(&zeta_parts(s, &eps)?) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(eps));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::weight::Weight;

    fn mono(c: &Context, coeff: i64, pairs: &[(u64, u32)], dlog: &[usize]) -> Form {
        Form::monomial(c, int(coeff), Weight::from_pairs(pairs, c.p()), dlog).unwrap()
    }

    #[test]
    fn integral_weight_is_all_int() {
        let c = Context::new(3, 1, 3).unwrap();
        let a = mono(&c, 1, &[(2, 0)], &[0]);
        let dec = decompose(&a).unwrap();
        assert_eq!(dec.int, a);
        assert!(dec.frp.is_zero() && dec.dfrp.is_zero());
    }

    #[test]
    fn splitting_examples() {
        let c = Context::new(3, 2, 3).unwrap();
        let a = mono(&c, 3, &[(1, 1), (1, 0)], &[1]);
        let dec = decompose(&a).unwrap();
        assert_eq!(dec.frp, a);
        assert!(dec.dfrp.is_zero());

        let b = mono(&c, 1, &[(1, 1), (1, 0)], &[0]);
        let dec = decompose(&b).unwrap();
        assert!(dec.int.is_zero());
        assert_eq!(dec.frp, mono(&c, -3, &[(1, 1), (1, 0)], &[1]));
        let expected = b.add(&mono(&c, 3, &[(1, 1), (1, 0)], &[1])).unwrap();
        assert_eq!(dec.dfrp, expected);
        assert_eq!(d_inverse(&dec.dfrp).unwrap(), mono(&c, 3, &[(1, 1), (1, 0)], &[]));
    }

    #[test]
    fn d_inverse_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        assert!(d_inverse(&Form::zero(&c)).unwrap().is_zero());
        let a = mono(&c, 1, &[(1, 1)], &[0]);
        assert_eq!(d_inverse(&a).unwrap(), mono(&c, 3, &[(1, 1)], &[]));
        let c2 = Context::new(3, 2, 3).unwrap();
        let not_exact = mono(&c2, 3, &[(1, 1), (1, 0)], &[1]);
        assert!(d_inverse(&not_exact).is_err());
    }

    #[test]
    fn truncation_examples() {
        let c = Context::new(3, 1, 2).unwrap();
        assert!(mono(&c, 9, &[(1, 0)], &[]).truncate().unwrap().is_zero());
        let a = mono(&c, 1, &[(1, 1)], &[0]);
        assert_eq!(a.truncate().unwrap(), a);
        let c1 = Context::new(3, 1, 1).unwrap();
        assert!(mono(&c1, 1, &[(1, 1)], &[0]).truncate().unwrap().is_zero());
        let b = mono(&c, 4, &[(1, 0)], &[]).add(&mono(&c, 30, &[(1, 1)], &[])).unwrap();
        let t = b.truncate().unwrap();
        assert_eq!(t, mono(&c, 4, &[(1, 0)], &[]).add(&mono(&c, 3, &[(1, 1)], &[])).unwrap());
        assert_eq!(t.truncate().unwrap(), t);
    }

    #[test]
    fn zeta_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let eps = Epsilon::pow2(3);
        assert_eq!(zeta(&Form::one(&c), &eps).unwrap(), ZetaValue::from_frac(0, 1));
        assert_eq!(zeta(&Form::var(&c, 0), &eps).unwrap(), ZetaValue::from_frac(-1, 8));
        // V[x]: Witt coefficient of valuation 1, weight 1/3
        let v = mono(&c, 3, &[(1, 1)], &[]);
        assert_eq!(zeta(&v, &eps).unwrap(), ZetaValue::from_frac(23, 24));
        assert_eq!(zeta_check(&Form::zero(&c), &eps).unwrap(), ZetaValue::PosInf);
        assert_eq!(zeta(&v.d(), &eps).unwrap(), zeta(&v, &eps).unwrap());
    }

    #[test]
    fn find_delta_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let grid = Epsilon::default_grid();
        assert_eq!(find_delta(&[Form::one(&c)], &grid).unwrap(), Some(Epsilon::pow2(1)));
        assert_eq!(find_delta(&[Form::var(&c, 0)], &grid).unwrap(), Some(Epsilon::pow2(2)));
        let v = mono(&c, 3, &[(1, 1)], &[]);
        assert_eq!(find_delta(&[v], &grid).unwrap(), Some(Epsilon::pow2(1)));
        assert_eq!(find_delta(&[], &[]), Err(DrwError::EmptyGrid));
    }
}
