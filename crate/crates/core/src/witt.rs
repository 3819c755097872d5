//! Degree-zero structure: Teichmuller representatives, ghost components and
//! the bridge to classical Witt coordinates.

use num::BigInt;

use crate::coeff;
use crate::context::Context;
use crate::error::{DrwError, Result};
use crate::form::{Basis, Form};
use crate::poly::ZPoly;
use crate::weight::Weight;

impl Form {
    /// Embeds a polynomial with integer weights and no dlog terms.
    pub fn from_zpoly(ctx: &Context, f: &ZPoly) -> Result<Form> {
        if f.n() != ctx.n() {
            return Err(DrwError::ShapeMismatch(format!("polynomial in {} variables, n = {}", f.n(), ctx.n())));
        }
        Form::from_terms(
            ctx,
            f.terms().map(|(e, c)| (Basis { weight: Weight::integral(e), dlog: 0 }, coeff::from_big(c.clone()))),
        )
    }

    /// The integral-weight degree-0 part as a polynomial with coefficients
    /// reduced modulo `p^e`.
    pub fn int_part_mod(&self, e: u32) -> Result<ZPoly> {
        let p = self.ctx().p();
        let mut terms = Vec::new();
        for (b, c) in self.terms() {
            if b.dlog != 0 {
                continue;
            }
            if let Some(exps) = b.weight.as_integral() {
                terms.push((exps, coeff::reduce_mod(c, p, e)?));
            }
        }
        ZPoly::from_terms(self.ctx().n(), terms)
    }

    pub(crate) fn require_degree_zero(&self) -> Result<()> {
        match self.terms().map(|(b, _)| b.degree()).find(|&d| d != 0) {
            None => Ok(()),
            Some(found) => Err(DrwError::DegreeMismatch { expected: 0, found }),
        }
    }
}

fn level_context(ctx: &Context, level: u32) -> Result<Context> {
    Context::with_caps(ctx.p(), ctx.n(), level, ctx.u_max(), ctx.d_max())
}

/// The multiplicative representative `[f]` of `f ∈ F_p[x]` modulo `Fil^m`:
/// `f̃(x^{1/p^{m-1}})^{p^{m-1}}` with `f̃` the lift with digits in `[0, p)`.
pub fn teichmuller(f: &ZPoly, ctx: &Context) -> Result<Form> {
    let p = ctx.p();
    let m = ctx.m();
    if f.n() != ctx.n() {
        return Err(DrwError::ShapeMismatch(format!("polynomial in {} variables, n = {}", f.n(), ctx.n())));
    }
    let lift = f.reduce(&BigInt::from(p));
    let root = Form::from_terms(
        ctx,
        lift.terms().map(|(e, c)| {
            let pairs: Vec<(u64, u32)> = e.iter().map(|&j| (j, m - 1)).collect();
            (Basis { weight: Weight::from_pairs(&pairs, p), dlog: 0 }, coeff::from_big(c.clone()))
        }),
    )?;
    let mut acc = root;
    for _ in 1..m {
        acc = acc.pow(p)?;
    }
    acc.truncate()
}

/// The `r`-th ghost component: integral-weight part of `F^r(a)` modulo `p^{r+1}`.
pub fn ghost(a: &Form, r: u32) -> Result<ZPoly> {
    a.require_degree_zero()?;
    a.require_integral("ghost")?;
    if r >= a.ctx().m() {
        return Err(DrwError::Precondition(format!("ghost index {r} must be below m = {}", a.ctx().m())));
    }
    a.frobenius_pow(r).int_part_mod(r + 1)
}

/// `Σ_{i<m} V^i [a_i]` modulo `Fil^m`.
pub fn from_witt_coordinates(coords: &[ZPoly], ctx: &Context) -> Result<Form> {
    let m = ctx.m();
    if coords.len() != m as usize {
        return Err(DrwError::ShapeMismatch(format!("expected {m} Witt coordinates, got {}", coords.len())));
    }
    let mut total = Form::zero(ctx);
    for (i, a) in coords.iter().enumerate() {
        if a.reduce(&BigInt::from(ctx.p())).is_zero() {
            continue;
        }
        let low = level_context(ctx, m - i as u32)?;
        let t = teichmuller(a, &low)?.with_context(ctx)?;
        total = total.add(&t.verschiebung_pow(i as u32)?)?;
    }
    total.truncate()
}

/// Witt coordinates of a degree-0 form, by peeling `a_0 = a|_int mod p`
/// and recursing on `F(a - [a_0]) / p`.
pub fn to_witt_coordinates(a: &Form) -> Result<Vec<ZPoly>> {
    a.require_degree_zero()?;
    a.require_integral("to_witt_coordinates")?;
    let ctx = *a.ctx();
    let p = ctx.p();
    let m = ctx.m();
    let mut coords = Vec::with_capacity(m as usize);
    let mut cur = a.truncate()?;
    for i in 0..m {
        let level = m - i;
        let here = level_context(&ctx, level)?;
        cur = cur.with_context(&here)?.truncate()?;
        let a0 = cur.int_part_mod(1)?;
        coords.push(a0.clone());
        if level == 1 {
            break;
        }
        let rest = cur.sub(&teichmuller(&a0, &here)?)?.truncate()?;
        let next = rest.frobenius().scale(&coeff::pow_p(p, -1));
        if !next.is_integral() {
            return Err(DrwError::NotIntegral(format!("peeling residue at step {i}: {next}")));
        }
        cur = next;
    }
    Ok(coords)
}

/// Classical ghost polynomial `w_r = Σ_{i<=r} p^i a_i^{p^{r-i}}` of Witt
/// coordinates, modulo `p^{r+1}`.
pub fn ghost_of_coordinates(coords: &[ZPoly], p: u64, r: u32) -> ZPoly {
    let modulus = BigInt::from(p).pow(r + 1);
    let n = coords.first().map(ZPoly::n).unwrap_or(1);
    let mut w = ZPoly::zero(n);
    for (i, a) in coords.iter().enumerate().take(r as usize + 1) {
        let e = p.pow(r - i as u32);
        let term = a.reduce(&BigInt::from(p)).pow_mod(e, &modulus);
        w = w.add(&term.scale(&BigInt::from(p).pow(i as u32)));
    }
    w.reduce(&modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> ZPoly {
        ZPoly::var(n, i)
    }

    #[test]
    fn teichmuller_examples() {
        let c = Context::new(2, 2, 2).unwrap();
        let t = teichmuller(&x(2, 0).add(&x(2, 1)), &c).unwrap();
        let expected = Form::var(&c, 0)
            .add(&Form::var(&c, 1))
            .unwrap()
            .add(&Form::monomial(&c, coeff::int(2), Weight::from_pairs(&[(1, 1), (1, 1)], 2), &[]).unwrap())
            .unwrap();
        assert_eq!(t, expected);
        assert_eq!(teichmuller(&ZPoly::one(2), &c).unwrap(), Form::one(&c));
        let x2 = x(2, 0).pow(3);
        assert_eq!(teichmuller(&x2, &c).unwrap(), Form::from_zpoly(&c, &x2).unwrap());
    }

    #[test]
    fn ghost_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let v = Form::var(&c, 0).verschiebung().unwrap();
        assert!(ghost(&v, 0).unwrap().is_zero());
        assert_eq!(ghost(&v, 1).unwrap(), x(1, 0).scale(&BigInt::from(3)));
        assert_eq!(ghost(&Form::var(&c, 0), 2).unwrap(), x(1, 0).pow(9));
    }

    #[test]
    fn coordinate_examples() {
        let c = Context::new(3, 1, 2).unwrap();
        let v = from_witt_coordinates(&[ZPoly::zero(1), x(1, 0)], &c).unwrap();
        assert_eq!(v, Form::var(&c, 0).verschiebung().unwrap());
        let zero = from_witt_coordinates(&[ZPoly::zero(1), ZPoly::zero(1)], &c).unwrap();
        assert!(zero.is_zero());
        let coords = to_witt_coordinates(&Form::integer(&c, 3)).unwrap();
        assert_eq!(coords, vec![ZPoly::zero(1), ZPoly::one(1)]);
        let f = x(1, 0).add(&ZPoly::constant(1, 2));
        let t = teichmuller(&f, &c).unwrap();
        assert_eq!(to_witt_coordinates(&t).unwrap(), vec![f, ZPoly::zero(1)]);
    }
}
