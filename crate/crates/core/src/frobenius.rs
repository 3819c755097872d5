//! Frobenius lifts on `Z[x_1, ..., x_n]` and the induced dga maps `t_F` into
//! the de Rham-Witt model, together with the twisted Frobenius `φ = p^i F`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Zero};

use crate::coeff;
use crate::context::Context;
use crate::error::{DrwError, Result};
use crate::form::{below, mask_indices, wedge_sign, Basis, DlogSet, Form};
use crate::poly::ZPoly;
use crate::weight::Weight;
use crate::witt::from_witt_coordinates;

/// A polynomial differential form `Σ c x^β dx_I` over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharZeroForm {
    n: usize,
    terms: BTreeMap<(Vec<u64>, DlogSet), BigInt>,
}

impl CharZeroForm {
    pub fn zero(n: usize) -> Self {
        CharZeroForm { n, terms: BTreeMap::new() }
    }

    pub fn from_poly(f: &ZPoly) -> Self {
        let mut out = Self::zero(f.n());
        for (e, c) in f.terms() {
            out.push(e.clone(), 0, c.clone());
        }
        out
    }

    /// `dx_{i+1}`.
    pub fn dx(n: usize, i: usize) -> Self {
        let mut out = Self::zero(n);
        out.push(vec![0; n], 1 << i, BigInt::one());
        out
    }

    /// `c x^β dx_I` with `I` given in any order.
    pub fn monomial(c: BigInt, exps: Vec<u64>, dx: &[usize]) -> Self {
        let n = exps.len();
        let mut out = CharZeroForm::from_poly(&ZPoly::monomial(exps, c));
        for &i in dx {
            out = out.wedge(&CharZeroForm::dx(n, i));
        }
        out
    }

    fn push(&mut self, e: Vec<u64>, mask: DlogSet, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((e, mask)) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<u64>, DlogSet), &BigInt)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &CharZeroForm) -> CharZeroForm {
        let mut out = self.clone();
        for ((e, m), c) in &other.terms {
            out.push(e.clone(), *m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CharZeroForm) -> CharZeroForm {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> CharZeroForm {
        let mut out = CharZeroForm::zero(self.n);
        for ((e, m), x) in &self.terms {
            out.push(e.clone(), *m, x * c);
        }
        out
    }

    pub fn wedge(&self, other: &CharZeroForm) -> CharZeroForm {
        let mut out = CharZeroForm::zero(self.n);
        for ((ea, ma), ca) in &self.terms {
            for ((eb, mb), cb) in &other.terms {
                let Some(neg) = wedge_sign(*ma, *mb) else { continue };
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = ca * cb;
                out.push(e, ma | mb, if neg { -c } else { c });
            }
        }
        out
    }

    pub fn d(&self) -> CharZeroForm {
        let mut out = CharZeroForm::zero(self.n);
        for ((e, m), c) in &self.terms {
            for i in 0..self.n {
                if e[i] == 0 || m & (1 << i) != 0 {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] -= 1;
                let v = c * BigInt::from(e[i]);
                out.push(e2, m | (1 << i), if below(*m, i) % 2 == 1 { -v } else { v });
            }
        }
        out
    }

    /// Coefficient polynomial of each `dx_I`.
    pub fn components(&self) -> BTreeMap<DlogSet, ZPoly> {
        let mut out: BTreeMap<DlogSet, Vec<(Vec<u64>, BigInt)>> = BTreeMap::new();
        for ((e, m), c) in &self.terms {
            out.entry(*m).or_default().push((e.clone(), c.clone()));
        }
        out.into_iter()
            .map(|(m, ts)| (m, ZPoly::from_terms(self.n, ts).expect("consistent arity")))
            .collect()
    }

    pub fn reduce(&self, modulus: &BigInt) -> CharZeroForm {
        use num::Integer;
        let mut out = CharZeroForm::zero(self.n);
        for ((e, m), c) in &self.terms {
            out.push(e.clone(), *m, c.mod_floor(modulus));
        }
        out
    }

    /// Pullback along `x_i ↦ F_i`.
    pub fn pullback(&self, lift: &FrobeniusLift) -> CharZeroForm {
        let dfs: Vec<CharZeroForm> = lift.polys.iter().map(|f| CharZeroForm::from_poly(f).d()).collect();
        let mut out = CharZeroForm::zero(self.n);
        for (mask, g) in self.components() {
            let mut t = CharZeroForm::from_poly(&g.compose(&lift.polys));
            for i in mask_indices(mask) {
                t = t.wedge(&dfs[i]);
            }
            out = out.add(&t);
        }
        out
    }

    /// The canonical embedding `c x^β dx_I ↦ c x^{β + e_I} dlog_I`.
    pub fn to_form(&self, ctx: &Context) -> Result<Form> {
        if self.n != ctx.n() {
            return Err(DrwError::ShapeMismatch(format!("{} variables, n = {}", self.n, ctx.n())));
        }
        let terms = self.terms.iter().map(|((e, m), c)| {
            let k: Vec<u64> = e.iter().enumerate().map(|(i, &j)| j + u64::from(m & (1 << i) != 0)).collect();
            (Basis { weight: Weight::integral(&k), dlog: *m }, coeff::from_big(c.clone()))
        });
        Form::from_terms(ctx, terms)
    }

    /// Inverse of [`CharZeroForm::to_form`] on the integral-weight part, with
    /// coefficients reduced modulo `p^m`.
    pub fn from_form_int(a: &Form) -> Result<CharZeroForm> {
        let ctx = a.ctx();
        let mut out = CharZeroForm::zero(ctx.n());
        for (b, c) in a.terms() {
            let Some(k) = b.weight.as_integral() else { continue };
            let e: Vec<u64> = k.iter().enumerate().map(|(i, &j)| j - u64::from(b.dlog & (1 << i) != 0)).collect();
            out.push(e, b.dlog, coeff::reduce_mod(c, ctx.p(), ctx.m())?);
        }
        Ok(out)
    }
}

impl fmt::Display for CharZeroForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((e, m), c)) in self.terms.iter().enumerate() {
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
            for i in mask_indices(*m) {
                write!(f, "*dx{}", i + 1)?;
            }
        }
        Ok(())
    }
}

/// A lift `x_i ↦ F_i` of the Frobenius, `F_i ≡ x_i^p (mod p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusLift {
    p: u64,
    polys: Vec<ZPoly>,
}

impl FrobeniusLift {
    pub fn new(p: u64, polys: Vec<ZPoly>) -> Result<Self> {
        let n = polys.len();
        let pb = BigInt::from(p);
        for (i, f) in polys.iter().enumerate() {
            if f.n() != n {
                return Err(DrwError::ShapeMismatch(format!("lift polynomial {} has arity {}", i + 1, f.n())));
            }
            if !f.sub(&ZPoly::var(n, i).pow(p)).reduce(&pb).is_zero() {
                return Err(DrwError::Precondition(format!("F_{} = {f} does not reduce to x_{}^p", i + 1, i + 1)));
            }
        }
        Ok(FrobeniusLift { p, polys })
    }

    /// `F_i = x_i^p`.
    pub fn canonical(p: u64, n: usize) -> Self {
        FrobeniusLift { p, polys: (0..n).map(|i| ZPoly::var(n, i).pow(p)).collect() }
    }

    /// `F_i = x_i^p + p x_i`.
    pub fn shifted(p: u64, n: usize) -> Self {
        let pb = BigInt::from(p);
        let polys = (0..n).map(|i| ZPoly::var(n, i).pow(p).add(&ZPoly::var(n, i).scale(&pb))).collect();
        FrobeniusLift { p, polys }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn polys(&self) -> &[ZPoly] {
        &self.polys
    }

    pub fn is_canonical(&self) -> bool {
        *self == FrobeniusLift::canonical(self.p, self.polys.len())
    }

    /// `g ↦ g(F_1, ..., F_n)` modulo `modulus`.
    pub fn apply_mod(&self, g: &ZPoly, modulus: &BigInt) -> ZPoly {
        g.compose_mod(&self.polys, modulus)
    }
}

fn check_lift(lift: &FrobeniusLift, ctx: &Context) -> Result<()> {
    if lift.p != ctx.p() || lift.polys.len() != ctx.n() {
        return Err(DrwError::ContextMismatch(
            format!("lift (p={}, n={})", lift.p, lift.polys.len()),
            ctx.to_string(),
        ));
    }
    Ok(())
}

/// Witt coordinates of `t_F(g)`, solving the ghost equations
/// `Σ_{i<=r} p^i s_i^{p^{r-i}} = F^r(g)` one index at a time.
pub fn tf_coordinates(g: &ZPoly, lift: &FrobeniusLift, ctx: &Context) -> Result<Vec<ZPoly>> {
    check_lift(lift, ctx)?;
    let p = ctx.p();
    let pb = BigInt::from(p);
    let m = ctx.m();
    let top = pb.pow(m);
    let mut ghost = g.reduce(&top);
    let mut coords = vec![ghost.reduce(&pb)];
    for r in 1..m {
        ghost = lift.apply_mod(&ghost, &top);
        let modulus = pb.pow(r + 1);
        let mut acc = ZPoly::zero(ctx.n());
        for (i, s) in coords.iter().enumerate() {
            let e = p.pow(r - i as u32);
            acc = acc.add(&s.pow_mod(e, &modulus).scale(&pb.pow(i as u32)));
        }
        let diff = ghost.sub(&acc).reduce(&modulus);
        let s = diff
            .div_exact(&pb.pow(r))
            .map_err(|e| DrwError::InexactDivision(format!("ghost equation at r = {r}: {e}")))?;
        coords.push(s.reduce(&pb));
    }
    Ok(coords)
}

/// `t_F` on polynomials.
pub fn tf_scalar(g: &ZPoly, lift: &FrobeniusLift, ctx: &Context) -> Result<Form> {
    if lift.is_canonical() {
        return Form::from_zpoly(ctx, g)?.truncate();
    }
    from_witt_coordinates(&tf_coordinates(g, lift, ctx)?, ctx)
}

/// `t_F` on differential forms: coefficients through [`tf_scalar`] and
/// `dx_i ↦ d t_F(x_i)`.
pub fn tf_form(omega: &CharZeroForm, lift: &FrobeniusLift, ctx: &Context) -> Result<Form> {
    check_lift(lift, ctx)?;
    let n = ctx.n();
    let mut dvars: Vec<Option<Form>> = vec![None; n];
    let mut out = Form::zero(ctx);
    for (mask, g) in omega.components() {
        let mut t = tf_scalar(&g, lift, ctx)?;
        for i in mask_indices(mask) {
            if dvars[i].is_none() {
                dvars[i] = Some(tf_scalar(&ZPoly::var(n, i), lift, ctx)?.d());
            }
            t = t.mul(dvars[i].as_ref().expect("cached"))?.truncate()?;
        }
        out = out.add(&t)?;
    }
    out.truncate()
}

/// `φ = p^i F` on the degree-`i` part.
pub fn phi_twist(a: &Form) -> Form {
    let p = a.ctx().p();
    let terms: Vec<(Basis, coeff::Coeff)> = a
        .frobenius()
        .terms()
        .map(|(b, c)| (b.clone(), c * coeff::pow_p(p, b.degree() as i64)))
        .collect();
    Form::from_terms_unchecked(a.ctx(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;

    fn mono(c: &Context, coeff: i64, pairs: &[(u64, u32)], dlog: &[usize]) -> Form {
        Form::monomial(c, int(coeff), Weight::from_pairs(pairs, c.p()), dlog).unwrap()
    }

    fn wild_lift() -> FrobeniusLift {
        FrobeniusLift::shifted(2, 1)
    }

    #[test]
    fn canonical_lift_is_the_embedding() {
        let c = Context::new(3, 1, 3).unwrap();
        let lift = FrobeniusLift::canonical(3, 1);
        assert_eq!(tf_scalar(&ZPoly::var(1, 0), &lift, &c).unwrap(), Form::var(&c, 0));
        let dx = tf_form(&CharZeroForm::dx(1, 0), &lift, &c).unwrap();
        assert_eq!(dx, mono(&c, 1, &[(1, 0)], &[0]));
    }

    #[test]
    fn shifted_lift_examples() {
        let c = Context::new(2, 1, 2).unwrap();
        let t = tf_scalar(&ZPoly::var(1, 0), &wild_lift(), &c).unwrap();
        assert_eq!(t, Form::var(&c, 0).add(&mono(&c, 2, &[(1, 1)], &[])).unwrap());
        let dx = tf_form(&CharZeroForm::dx(1, 0), &wild_lift(), &c).unwrap();
        let expected = mono(&c, 1, &[(1, 0)], &[0]).add(&mono(&c, 1, &[(1, 1)], &[0])).unwrap();
        assert_eq!(dx, expected);
    }

    #[test]
    fn lift_validation() {
        let bad = ZPoly::var(1, 0).pow(2).add(&ZPoly::var(1, 0));
        assert!(FrobeniusLift::new(2, vec![bad]).is_err());
        assert!(FrobeniusLift::new(2, vec![ZPoly::var(1, 0).pow(2).add(&ZPoly::constant(1, 4))]).is_ok());
    }

    #[test]
    fn phi_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        assert_eq!(phi_twist(&Form::var(&c, 0)), mono(&c, 1, &[(3, 0)], &[]));
        let xd = mono(&c, 1, &[(1, 0)], &[0]);
        assert_eq!(phi_twist(&xd), mono(&c, 3, &[(3, 0)], &[0]));
        assert_eq!(phi_twist(&Form::var(&c, 0).d()), phi_twist(&Form::var(&c, 0)).d());
    }

    #[test]
    fn char_zero_calculus() {
        let x = ZPoly::var(2, 0);
        let y = ZPoly::var(2, 1);
        let w = CharZeroForm::from_poly(&x.mul(&y));
        let dw = w.d();
        let expected = CharZeroForm::monomial(BigInt::one(), vec![0, 1], &[0])
            .add(&CharZeroForm::monomial(BigInt::one(), vec![1, 0], &[1]));
        assert_eq!(dw, expected);
        assert!(dw.d().is_zero());
        let c = Context::new(3, 2, 2).unwrap();
        let f = dw.to_form(&c).unwrap();
        assert_eq!(f, Form::var(&c, 0).mul(&Form::var(&c, 1)).unwrap().d());
        assert_eq!(CharZeroForm::from_form_int(&f).unwrap(), dw);
    }
}
