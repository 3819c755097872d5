//! Seeded instance generators.
//!
//! Integrable connections are built from gauges: starting from diagonal
//! exact forms `D = diag(df_i)` over the integers, `N_0 = G^{-1} D G + G^{-1} dG`
//! for a unipotent polynomial `G` is integrable. Instances with fractional
//! parts are conjugated by `1 + W` with `W` a matrix of frp-type scalars
//! `p^u c x^{a / p^u}`.

use num::BigInt;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff;
use crate::connections::{base_change, frobenius_pullback, invert, BaseChange, ConnMatrix};
use crate::context::Context;
use crate::error::Result;
use crate::form::Form;
use crate::frobenius::{tf_form, CharZeroForm, FrobeniusLift};
use crate::matrix::FormMatrix;
use crate::poly::ZPoly;
use crate::weight::Weight;

/// Shape of a random form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormSpec {
    pub max_terms: usize,
    /// Largest denominator exponent of a weight.
    pub max_u: u32,
    /// Bound on `|k|`.
    pub max_weight: u64,
    /// Restrict to one form degree.
    pub degree: Option<usize>,
    pub int: bool,
    pub frp: bool,
    pub dfrp: bool,
}

impl FormSpec {
    pub fn new(ctx: &Context) -> Self {
        FormSpec {
            max_terms: 4,
            max_u: ctx.u_max().min(3),
            max_weight: 6,
            degree: None,
            int: true,
            frp: true,
            dfrp: true,
        }
    }

    pub fn degree(mut self, d: usize) -> Self {
        self.degree = Some(d);
        self
    }

    pub fn terms(mut self, t: usize) -> Self {
        self.max_terms = t;
        self
    }

    pub fn max_u(mut self, u: u32) -> Self {
        self.max_u = u;
        self
    }

    pub fn max_weight(mut self, w: u64) -> Self {
        self.max_weight = w;
        self
    }

    pub fn only(mut self, int: bool, frp: bool, dfrp: bool) -> Self {
        self.int = int;
        self.frp = frp;
        self.dfrp = dfrp;
        self
    }
}

/// A connection with a Frobenius structure: `N = (1+W)^{-1} N_0 (1+W) + (1+W)^{-1} dW`
/// for an integral-weight integrable `N_0`, pulled back once so that the
/// fractional part is divisible by `p`.
#[derive(Debug, Clone)]
pub struct FrobeniusInstance {
    pub classical: ConnMatrix,
    pub perturbation: BaseChange,
    pub connection: ConnMatrix,
    pub pulled: ConnMatrix,
}

/// Data for lifting a connection along a projector `P = G E G^{-1}`.
#[derive(Debug, Clone)]
pub struct ProjectorInstance {
    pub projector: FormMatrix,
    /// Connection data on the image: `A = B P + dP`.
    pub a: FormMatrix,
    pub gauge: BaseChange,
}

pub struct Generator {
    ctx: Context,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(ctx: &Context, seed: u64) -> Self {
        Generator { ctx: *ctx, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Nonzero integer below `p^m` in absolute value.
    pub fn coefficient(&mut self) -> BigInt {
        let bound = self.ctx.p().saturating_pow(self.ctx.m()).min(1 << 20) as i64;
        loop {
            let c = self.rng.gen_range(-bound + 1..bound);
            if c != 0 {
                return BigInt::from(c);
            }
        }
    }

    fn small(&mut self) -> BigInt {
        loop {
            let c = self.rng.gen_range(-3i64..=3);
            if c != 0 {
                return BigInt::from(c);
            }
        }
    }

    /// Integer exponent vector with total degree at most `max`.
    fn exponents(&mut self, max: u64) -> Vec<u64> {
        let n = self.ctx.n();
        let mut left = max;
        let mut e = vec![0; n];
        for slot in e.iter_mut() {
            let k = self.rng.gen_range(0..=left.min(3));
            *slot = k;
            left -= k;
        }
        e
    }

    pub fn poly(&mut self, max_terms: usize, max_deg: u64) -> ZPoly {
        let n = self.ctx.n();
        let t = self.rng.gen_range(1..=max_terms.max(1));
        let mut out = ZPoly::zero(n);
        for _ in 0..t {
            let e = self.exponents(max_deg);
            let c = self.small();
            out = out.add(&ZPoly::monomial(e, c));
        }
        out
    }

    /// A weight with denominator exactly `p^u`, `u >= 1`, carried by a random pivot.
    pub fn fractional_weight(&mut self, u: u32, max_weight: u64) -> Weight {
        let p = self.ctx.p();
        let n = self.ctx.n();
        let scale = p.pow(u);
        let budget = max_weight.max(1) * scale;
        let pivot = self.rng.gen_range(0..n);
        let mut nums = vec![0u64; n];
        let mut used = loop {
            let j = self.rng.gen_range(1..scale.min(budget).max(2));
            if j % p != 0 {
                break j;
            }
        };
        nums[pivot] = used;
        for (i, slot) in nums.iter_mut().enumerate() {
            if i == pivot || used >= budget {
                continue;
            }
            let j = self.rng.gen_range(0..=(budget - used).min(2 * scale));
            *slot = j;
            used += j;
        }
        Weight::from_scaled(&nums, u, p)
    }

    fn support_subset(&mut self, w: &Weight, exclude: Option<usize>, size: Option<usize>) -> Option<Vec<usize>> {
        let support: Vec<usize> =
            (0..self.ctx.n()).filter(|&i| w.coord(i).j > 0 && Some(i) != exclude).collect();
        match size {
            Some(s) if s > support.len() => None,
            Some(s) => {
                let mut pool = support;
                let mut out = Vec::new();
                for _ in 0..s {
                    let k = self.rng.gen_range(0..pool.len());
                    out.push(pool.swap_remove(k));
                }
                out.sort_unstable();
                Some(out)
            }
            None => Some(support.into_iter().filter(|_| self.rng.gen_bool(0.4)).collect()),
        }
    }

    /// `c x^k dlog_I` with integral weight.
    fn int_term(&mut self, spec: &FormSpec) -> Result<Option<Form>> {
        let e = self.exponents(spec.max_weight);
        let w = Weight::integral(&e);
        let Some(dlog) = self.support_subset(&w, None, spec.degree) else { return Ok(None) };
        let c = coeff::from_big(self.coefficient());
        Ok(Some(Form::monomial(&self.ctx, c, w, &dlog)?))
    }

    /// `η = p^u c x^k dlog_J` with `i0 ∉ J`, an integral form of frp type.
    fn frp_term(&mut self, spec: &FormSpec, degree: Option<usize>) -> Result<Option<Form>> {
        if spec.max_u == 0 {
            return Ok(None);
        }
        let u = self.rng.gen_range(1..=spec.max_u);
        let w = self.fractional_weight(u, spec.max_weight);
        let Some(dlog) = self.support_subset(&w, Some(w.pivot()), degree) else { return Ok(None) };
        let c = coeff::from_big(self.small() * BigInt::from(self.ctx.p()).pow(u));
        Ok(Some(Form::monomial(&self.ctx, c, w, &dlog)?))
    }

    /// A random integral form mixing the three kinds of terms, truncated.
    pub fn form(&mut self, spec: &FormSpec) -> Result<Form> {
        let mut kinds = Vec::new();
        if spec.int {
            kinds.push(0);
        }
        if spec.frp {
            kinds.push(1);
        }
        if spec.dfrp {
            kinds.push(2);
        }
        let mut out = Form::zero(&self.ctx);
        if kinds.is_empty() {
            return Ok(out);
        }
        let t = self.rng.gen_range(1..=spec.max_terms.max(1));
        for _ in 0..t {
            let term = match kinds[self.rng.gen_range(0..kinds.len())] {
                0 => self.int_term(spec)?,
                1 => self.frp_term(spec, spec.degree)?,
                _ => match spec.degree {
                    Some(0) => None,
                    Some(d) => self.frp_term(spec, Some(d - 1))?.map(|f| f.d()),
                    None => self.frp_term(spec, None)?.map(|f| f.d()),
                },
            };
            if let Some(term) = term {
                out = out.add(&term)?;
            }
        }
        out.truncate()
    }

    /// Degree-0 frp-type scalar `p^u c x^{a/p^u}`.
    pub fn frp_scalar(&mut self, max_u: u32, max_weight: u64) -> Result<Form> {
        let spec = FormSpec::new(&self.ctx).max_u(max_u.max(1)).max_weight(max_weight);
        Ok(self.frp_term(&spec, Some(0))?.expect("degree 0 always fits"))
    }

    /// Upper unitriangular matrix with small polynomial entries.
    pub fn unipotent_poly(&mut self, r: usize) -> Vec<Vec<ZPoly>> {
        let n = self.ctx.n();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Equal => ZPoly::one(n),
                        std::cmp::Ordering::Less if self.rng.gen_bool(0.7) => self.poly(2, 2),
                        _ => ZPoly::zero(n),
                    })
                    .collect()
            })
            .collect()
    }

    /// An integrable connection over the integers, as a matrix of polynomial
    /// 1-forms: `G^{-1} diag(df_i) G + G^{-1} dG`.
    pub fn classical_integrable(&mut self, r: usize) -> Vec<Vec<CharZeroForm>> {
        let n = self.ctx.n();
        let g: Vec<Vec<CharZeroForm>> =
            self.unipotent_poly(r).iter().map(|row| row.iter().map(CharZeroForm::from_poly).collect()).collect();
        let diag: Vec<CharZeroForm> = (0..r)
            .map(|_| if self.rng.gen_bool(0.6) { CharZeroForm::from_poly(&self.poly(2, 2)).d() } else { CharZeroForm::zero(n) })
            .collect();
        let ginv = unipotent_inverse(&g, n);
        let dg: Vec<Vec<CharZeroForm>> = g.iter().map(|row| row.iter().map(CharZeroForm::d).collect()).collect();
        let dgm: Vec<Vec<CharZeroForm>> =
            (0..r).map(|i| (0..r).map(|j| diag[i].wedge(&g[i][j])).collect()).collect();
        let conj = cz_mul(&ginv, &dgm, n);
        let gauge = cz_mul(&ginv, &dg, n);
        (0..r).map(|i| (0..r).map(|j| conj[i][j].add(&gauge[i][j])).collect()).collect()
    }

    /// `t_F` of [`Generator::classical_integrable`].
    pub fn integrable(&mut self, r: usize, lift: &FrobeniusLift) -> Result<ConnMatrix> {
        let classical = self.classical_integrable(r);
        let ctx = self.ctx;
        ConnMatrix::new(FormMatrix::try_from_fn(&ctx, r, r, |i, j| tf_form(&classical[i][j], lift, &ctx))?)
    }

    /// `1 + p^s W` with `W` a matrix of frp-type scalars.
    pub fn frp_perturbation(&mut self, r: usize, s: u32) -> Result<BaseChange> {
        let ctx = self.ctx;
        let max_u = ctx.u_max().min(ctx.m()).min(3);
        let mut w = FormMatrix::zero(&ctx, r, r);
        for i in 0..r {
            for j in 0..r {
                if self.rng.gen_bool(0.5) {
                    let f = self.frp_scalar(max_u, 2)?.scale_p_pow(s as i64);
                    w.set(i, j, f);
                }
            }
        }
        invert(&FormMatrix::identity(&ctx, r).add(&w)?.truncate()?)
    }

    /// Invertible `G (1 + W)` with `G` integral-weight unipotent.
    pub fn base_change(&mut self, r: usize) -> Result<BaseChange> {
        let g = self.unipotent(r)?;
        let w = self.frp_perturbation(r, 0)?;
        g.then(&w)
    }

    pub fn unipotent(&mut self, r: usize) -> Result<BaseChange> {
        let ctx = self.ctx;
        let polys = self.unipotent_poly(r);
        invert(&FormMatrix::try_from_fn(&ctx, r, r, |i, j| Form::from_zpoly(&ctx, &polys[i][j]))?)
    }

    /// Integrable connection whose fractional part has `vp >= s`.
    pub fn integrable_with_frac(&mut self, r: usize, s: u32) -> Result<ConnMatrix> {
        let lift = FrobeniusLift::canonical(self.ctx.p(), self.ctx.n());
        let n0 = self.integrable(r, &lift)?;
        let u = self.frp_perturbation(r, s)?;
        base_change(&n0, &u)
    }

    pub fn frobenius_structured(&mut self, r: usize, lift: &FrobeniusLift) -> Result<FrobeniusInstance> {
        let classical = self.integrable(r, lift)?;
        let perturbation = self.frp_perturbation(r, 0)?;
        let connection = base_change(&classical, &perturbation)?;
        let pulled = frobenius_pullback(&connection)?;
        Ok(FrobeniusInstance { classical, perturbation, connection, pulled })
    }

    /// `P = G E G^{-1}` with `E = diag(1, .., 1, 0, .., 0)` of rank `k`, together
    /// with `A = B P + dP` where `B` is the base change of `diag(N_M, 0)` by `G^{-1}`.
    pub fn projector(&mut self, r: usize, k: usize) -> Result<ProjectorInstance> {
        let ctx = self.ctx;
        let g = self.unipotent(r)?;
        let e = FormMatrix::from_fn(&ctx, r, r, |i, j| if i == j && i < k { Form::one(&ctx) } else { Form::zero(&ctx) });
        let p = g.matrix().mul(&e)?.mul(g.inverse())?.truncate()?;
        let lift = FrobeniusLift::canonical(ctx.p(), ctx.n());
        let nm = if k > 0 { self.integrable(k, &lift)?.into_matrix() } else { FormMatrix::zero(&ctx, 0, 0) };
        let tilde = ConnMatrix::new(nm.block_diag(&FormMatrix::zero(&ctx, r - k, r - k))?)?;
        let ginv = invert(g.inverse())?;
        let b = base_change(&tilde, &ginv)?;
        let a = b.matrix().mul(&p)?.add(&p.d())?.truncate()?;
        Ok(ProjectorInstance { projector: p, a, gauge: g })
    }

    /// Constant idempotent `G E G^{-1}` with integer entries.
    pub fn constant_idempotent(&mut self, r: usize) -> Result<FormMatrix> {
        let ctx = self.ctx;
        let k = self.rng.gen_range(0..=r);
        let mut g = FormMatrix::identity(&ctx, r);
        for i in 0..r {
            for j in i + 1..r {
                let c = self.rng.gen_range(-(ctx.p() as i64)..=ctx.p() as i64);
                g.set(i, j, Form::integer(&ctx, c));
            }
        }
        let g = invert(&g)?;
        let e = FormMatrix::from_fn(&ctx, r, r, |i, j| if i == j && i < k { Form::one(&ctx) } else { Form::zero(&ctx) });
        g.matrix().mul(&e)?.mul(g.inverse())?.truncate()
    }
}

fn cz_mul(a: &[Vec<CharZeroForm>], b: &[Vec<CharZeroForm>], n: usize) -> Vec<Vec<CharZeroForm>> {
    let r = a.len();
    let c = b.first().map(Vec::len).unwrap_or(0);
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    (0..b.len()).fold(CharZeroForm::zero(n), |acc, k| acc.add(&a[i][k].wedge(&b[k][j])))
                })
                .collect()
        })
        .collect()
}

/// Exact inverse of a unitriangular matrix: `Σ (1 - G)^i`.
fn unipotent_inverse(g: &[Vec<CharZeroForm>], n: usize) -> Vec<Vec<CharZeroForm>> {
    let r = g.len();
    let id: Vec<Vec<CharZeroForm>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { CharZeroForm::from_poly(&ZPoly::one(n)) } else { CharZeroForm::zero(n) })
                .collect()
        })
        .collect();
    let nil: Vec<Vec<CharZeroForm>> =
        (0..r).map(|i| (0..r).map(|j| id[i][j].sub(&g[i][j])).collect()).collect();
    let mut sum = id.clone();
    let mut term = id;
    for _ in 1..r {
        term = cz_mul(&term, &nil, n);
        sum = (0..r).map(|i| (0..r).map(|j| sum[i][j].add(&term[i][j])).collect()).collect();
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::curvature;

    #[test]
    fn deterministic() {
        let c = Context::new(3, 2, 3).unwrap();
        let spec = FormSpec::new(&c);
        let a = Generator::new(&c, 7).form(&spec).unwrap();
        let b = Generator::new(&c, 7).form(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.is_integral());
    }

    #[test]
    fn integrable_instances_have_zero_curvature() {
        for (p, n) in [(2, 1), (3, 2)] {
            let c = Context::new(p, n, 3).unwrap();
            let mut g = Generator::new(&c, 1);
            for lift in [FrobeniusLift::canonical(p, n), FrobeniusLift::shifted(p, n)] {
                let conn = g.integrable(2, &lift).unwrap();
                assert!(curvature(&conn).unwrap().is_zero());
            }
            let inst = g.frobenius_structured(2, &FrobeniusLift::canonical(p, n)).unwrap();
            assert!(curvature(&inst.connection).unwrap().is_zero());
            assert!(inst.pulled.frac_vp().unwrap().is_none_or(|v| v >= 1));
        }
    }

    #[test]
    fn projectors_are_idempotent() {
        let c = Context::new(3, 1, 3).unwrap();
        let mut g = Generator::new(&c, 3);
        let inst = g.projector(3, 2).unwrap();
        let p = &inst.projector;
        assert!(p.mul(p).unwrap().sub(p).unwrap().truncate().unwrap().is_zero());
        let q = g.constant_idempotent(3).unwrap();
        assert!(q.mul(&q).unwrap().sub(&q).unwrap().truncate().unwrap().is_zero());
    }
}
