//! Connection matrices over the de Rham-Witt model.
//!
//! Columns are coordinates: a connection with representative matrix `N`
//! acts on a column `u` of degree-0 forms by `∇u = N u + d u`.

use num::{BigInt, Integer, Zero};

use crate::coeff;
use crate::context::Context;
use crate::decomposition::{d_inverse, overconvergence_bounds, zeta_parts, Epsilon, ZetaValue};
use crate::error::{DrwError, Result};
use crate::form::Form;
use crate::frobenius::phi_twist;
use crate::matrix::FormMatrix;
use crate::poly::ZPoly;

/// Square matrix of integral 1-forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnMatrix(FormMatrix);

impl ConnMatrix {
    pub fn new(m: FormMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(DrwError::ShapeMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        m.check_degree(1)?;
        if !m.is_integral() {
            return Err(DrwError::NotIntegral("connection matrix entries".into()));
        }
        Ok(ConnMatrix(m))
    }

    pub fn zero(ctx: &Context, r: usize) -> Self {
        ConnMatrix(FormMatrix::zero(ctx, r, r))
    }

    pub fn matrix(&self) -> &FormMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> FormMatrix {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn ctx(&self) -> &Context {
        self.0.ctx()
    }

    pub fn truncate(&self) -> Result<ConnMatrix> {
        Ok(ConnMatrix(self.0.truncate()?))
    }

    /// `vp` of the fractional part, `None` when it vanishes.
    pub fn frac_vp(&self) -> Result<Option<u64>> {
        self.0.frac_part().vp()
    }
}

/// Square matrix of 2-forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureMatrix(FormMatrix);

impl CurvatureMatrix {
    pub fn matrix(&self) -> &FormMatrix {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// An invertible matrix of degree-0 forms with its inverse modulo `Fil^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseChange {
    u: FormMatrix,
    inv: FormMatrix,
}

impl BaseChange {
    pub fn new(u: FormMatrix) -> Result<Self> {
        invert(&u)
    }

    pub fn identity(ctx: &Context, r: usize) -> Self {
        let id = FormMatrix::identity(ctx, r);
        BaseChange { u: id.clone(), inv: id }
    }

    pub fn matrix(&self) -> &FormMatrix {
        &self.u
    }

    pub fn inverse(&self) -> &FormMatrix {
        &self.inv
    }

    /// `U · U'`, the base change obtained by applying `U` then `U'`.
    pub fn then(&self, next: &BaseChange) -> Result<BaseChange> {
        Ok(BaseChange { u: self.u.mul_trunc(&next.u)?, inv: next.inv.mul_trunc(&self.inv)? })
    }

    pub fn is_identity(&self) -> bool {
        self.u == FormMatrix::identity(self.u.ctx(), self.u.rows())
    }
}

/// `N^2 + dN` modulo `Fil^m`.
pub fn curvature(n: &ConnMatrix) -> Result<CurvatureMatrix> {
    let m = n.matrix();
    Ok(CurvatureMatrix(m.mul(m)?.add(&m.d())?.truncate()?))
}

/// `N u + d u` for a column `u`.
pub fn evaluate(n: &ConnMatrix, u: &FormMatrix) -> Result<FormMatrix> {
    if u.cols() != 1 || u.rows() != n.rank() {
        return Err(DrwError::ShapeMismatch(format!("column of length {} expected", n.rank())));
    }
    u.check_degree(0)?;
    n.matrix().mul(u)?.add(&u.d())?.truncate()
}

/// `∇ω = N ∧ ω + dω` on a column of forms of any degree.
pub fn apply_connection(n: &ConnMatrix, omega: &FormMatrix) -> Result<FormMatrix> {
    if omega.cols() != 1 || omega.rows() != n.rank() {
        return Err(DrwError::ShapeMismatch(format!("column of length {} expected", n.rank())));
    }
    n.matrix().mul(omega)?.add(&omega.d())?.truncate()
}

/// `U^{-1} N U + U^{-1} dU`.
pub fn base_change(n: &ConnMatrix, u: &BaseChange) -> Result<ConnMatrix> {
    if u.u.rows() != n.rank() {
        return Err(DrwError::ShapeMismatch("base change of the wrong size".into()));
    }
    let conj = u.inv.mul(&n.matrix().mul(&u.u)?)?;
    let gauge = u.inv.mul(&u.u.d())?;
    ConnMatrix::new(conj.add(&gauge)?.truncate()?)
}

fn zpoly_det(m: &[Vec<ZPoly>], modulus: &BigInt, n: usize) -> ZPoly {
    let r = m.len();
    match r {
        0 => ZPoly::one(n),
        1 => m[0][0].reduce(modulus),
        _ => {
            let mut acc = ZPoly::zero(n);
            for j in 0..r {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor = minor(m, 0, j);
                let t = m[0][j].mul(&zpoly_det(&minor, modulus, n)).reduce(modulus);
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc.reduce(modulus)
        }
    }
}

fn minor(m: &[Vec<ZPoly>], row: usize, col: usize) -> Vec<Vec<ZPoly>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Inverse modulo `Fil^m`: invert the reduction modulo `V` over `F_p[x]`
/// by the adjugate, then correct with the Neumann series of the nilpotent
/// remainder.
pub fn invert(u: &FormMatrix) -> Result<BaseChange> {
    if !u.is_square() {
        return Err(DrwError::ShapeMismatch("only square matrices are invertible".into()));
    }
    u.check_degree(0)?;
    if !u.is_integral() {
        return Err(DrwError::NotIntegral("base change entries".into()));
    }
    let ctx = *u.ctx();
    let r = u.rows();
    let n = ctx.n();
    let p = BigInt::from(ctx.p());
    let reduced: Vec<Vec<ZPoly>> = (0..r)
        .map(|i| (0..r).map(|j| u.get(i, j).int_part_mod(1)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let det = zpoly_det(&reduced, &p, n);
    let c = det
        .as_constant()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| DrwError::NotInvertible(format!("determinant modulo V is {det}")))?;
    let cinv = c.extended_gcd(&p).x.mod_floor(&p);
    let b0 = FormMatrix::try_from_fn(&ctx, r, r, |i, j| {
        // adjugate entry (i, j) is the (j, i) cofactor
        let cof = zpoly_det(&minor(&reduced, j, i), &p, n);
        let cof = if (i + j) % 2 == 1 { cof.neg() } else { cof };
        Form::from_zpoly(&ctx, &cof.scale(&cinv).reduce(&p))
    })?;
    let id = FormMatrix::identity(&ctx, r);
    let e = id.sub(&u.mul(&b0)?)?.truncate()?;
    let mut sum = id.clone();
    let mut term = id;
    for _ in 0..ctx.m() {
        term = term.mul_trunc(&e)?;
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term)?;
    }
    let inv = b0.mul_trunc(&sum)?;
    Ok(BaseChange { u: u.truncate()?, inv })
}

/// `N = A - d(P) P`, after checking `P^2 = P`, `P A = A` and `A P + P dP = A`.
pub fn lift_connection(a: &FormMatrix, p: &FormMatrix) -> Result<ConnMatrix> {
    p.check_degree(0)?;
    a.check_degree(1)?;
    let mut failures = Vec::new();
    if !p.mul(p)?.sub(p)?.truncate()?.is_zero() {
        failures.push("P^2 != P");
    }
    if !p.mul(a)?.sub(a)?.truncate()?.is_zero() {
        failures.push("P A != A");
    }
    let dp = p.d();
    if !a.mul(p)?.add(&p.mul(&dp)?)?.sub(a)?.truncate()?.is_zero() {
        failures.push("A P + P dP != A");
    }
    if !failures.is_empty() {
        return Err(DrwError::Precondition(failures.join("; ")));
    }
    ConnMatrix::new(a.sub(&dp.mul(p)?)?.truncate()?)
}

/// `N ↦ φ(N) = p F(N)`.
pub fn frobenius_pullback(n: &ConnMatrix) -> Result<ConnMatrix> {
    ConnMatrix::new(n.matrix().map(phi_twist).truncate()?)
}

/// Whether `dG = G E - F G` modulo `Fil^m`.
pub fn horizontal_check(e: &ConnMatrix, f: &ConnMatrix, g: &FormMatrix) -> Result<bool> {
    if g.rows() != f.rank() || g.cols() != e.rank() {
        return Err(DrwError::ShapeMismatch(format!(
            "G is {}x{}, expected {}x{}",
            g.rows(),
            g.cols(),
            f.rank(),
            e.rank()
        )));
    }
    let lhs = g.d();
    let rhs = g.mul(e.matrix())?.sub(&f.matrix().mul(g)?)?;
    Ok(lhs.sub(&rhs)?.truncate()?.is_zero())
}

fn require_integrable(n: &ConnMatrix) -> Result<()> {
    if curvature(n)?.is_zero() {
        Ok(())
    } else {
        Err(DrwError::Precondition("connection is not integrable".into()))
    }
}

/// One step of the normalization: `U = 1 - d^{-1}(N|_dfrp)` and `N' = U^{-1} N U + U^{-1} dU`.
pub fn normalize_step(n: &ConnMatrix) -> Result<(BaseChange, ConnMatrix)> {
    let n = n.truncate()?;
    require_integrable(&n)?;
    let ctx = *n.ctx();
    let r = n.rank();
    let Some(s) = n.frac_vp()? else {
        return Ok((BaseChange::identity(&ctx, r), n));
    };
    if s < 1 {
        return Err(DrwError::Precondition(format!(
            "vp of the fractional part is {s}; apply frobenius_pullback first"
        )));
    }
    let parts = n.matrix().decompose()?;
    let w = parts.dfrp.try_map(d_inverse)?;
    let u = FormMatrix::identity(&ctx, r).sub(&w)?;
    let bc = invert(&u)?;
    let next = base_change(&n, &bc)?;
    Ok((bc, next))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub connection: ConnMatrix,
    pub base_change: BaseChange,
    pub iterations: usize,
    /// `vp(N_l|_frac)` before each step.
    pub valuations: Vec<Option<u64>>,
    /// Truncation level the output is known to: `m - u` minimized over the
    /// d(frp) weights inverted along the way.
    pub precision: u32,
}

/// Precision left after inverting `d` on the d(frp) part of `n`.
pub fn step_precision(n: &ConnMatrix) -> Result<u32> {
    let dfrp = n.matrix().decompose()?.dfrp;
    let u = dfrp.entries().map(Form::max_denominator_exp).max().unwrap_or(0);
    Ok(n.ctx().m().saturating_sub(u))
}

/// Iterates [`normalize_step`] until the fractional part vanishes modulo `Fil^m`.
pub fn normalize(n: &ConnMatrix, max_iter: usize) -> Result<Normalized> {
    let mut cur = n.truncate()?;
    require_integrable(&cur)?;
    let ctx = *cur.ctx();
    let mut acc = BaseChange::identity(&ctx, cur.rank());
    let mut valuations = Vec::new();
    let mut iterations = 0;
    let mut precision = ctx.m();
    loop {
        let v = cur.frac_vp()?;
        valuations.push(v);
        if v.is_none() {
            break;
        }
        if iterations == max_iter {
            return Err(DrwError::IterationLimit(max_iter));
        }
        precision = precision.min(step_precision(&cur)?);
        let (u, next) = normalize_step(&cur)?;
        acc = acc.then(&u)?;
        cur = next;
        iterations += 1;
    }
    Ok(Normalized { connection: cur, base_change: acc, iterations, valuations, precision })
}

/// Entrywise minima of `ζ̌_ε` over the int, frp and d(frp) summands.
pub fn matrix_zeta_parts(m: &FormMatrix, eps: &Epsilon) -> Result<[ZetaValue; 3]> {
    let mut out = [ZetaValue::PosInf, ZetaValue::PosInf, ZetaValue::PosInf];
    for e in m.entries() {
        let z = zeta_parts(e, eps)?;
        out[0] = out[0].clone().min(z.int);
        out[1] = out[1].clone().min(z.frp);
        out[2] = out[2].clone().min(z.dfrp);
    }
    Ok(out)
}

/// `ζ̌_ε` of a matrix: the minimum over its entries.
pub fn matrix_zeta(m: &FormMatrix, eps: &Epsilon) -> Result<ZetaValue> {
    let [a, b, c] = matrix_zeta_parts(m, eps)?;
    Ok(a.min(b).min(c))
}

/// `ζ̌(N|_int) >= -1/4`, `ζ̌(N|_frp) >= 1/2` and `ζ̌(N|_d(frp)) >= 3/4`.
pub fn overconvergence_condition(m: &FormMatrix, eps: &Epsilon) -> Result<bool> {
    let parts = matrix_zeta_parts(m, eps)?;
    let bounds = overconvergence_bounds();
    Ok(parts.iter().zip(bounds.iter()).all(|(z, b)| z.ge_rational(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdempotentOutcome {
    /// `F(P) = P` and `dP = 0`.
    Holds,
    /// `F(P) = P` but `dP` survives; never expected.
    Fails,
    /// `F(P) != P`, so the statement does not apply.
    NotFrobeniusFixed,
}

/// For an idempotent `P` fixed by `F`, checks `dP = p^r F^r(dP)` for
/// `r <= m` and hence `dP = 0` modulo `Fil^m`.
pub fn idempotent_frobenius_check(p: &FormMatrix) -> Result<IdempotentOutcome> {
    p.check_degree(0)?;
    if !p.mul(p)?.sub(p)?.truncate()?.is_zero() {
        return Err(DrwError::Precondition("P is not idempotent".into()));
    }
    if !p.frobenius().sub(p)?.truncate()?.is_zero() {
        return Ok(IdempotentOutcome::NotFrobeniusFixed);
    }
    let ctx = *p.ctx();
    let dp = p.d().truncate()?;
    let mut twisted = dp.clone();
    for _ in 1..=ctx.m() {
        twisted = twisted.frobenius().scale(&coeff::int(ctx.p() as i64));
        if !dp.sub(&twisted)?.truncate()?.is_zero() {
            return Ok(IdempotentOutcome::Fails);
        }
    }
    Ok(if dp.is_zero() { IdempotentOutcome::Holds } else { IdempotentOutcome::Fails })
}

/// The block projector `Q = diag(P, 0)` on the doubled free module together
/// with the connection `(1 - Q) N (1 - Q)` induced on the complement, where
/// `N` lifts `diag(A, 0)` along `Q`.
pub fn schanuel_complement(p: &FormMatrix, a: &FormMatrix) -> Result<(FormMatrix, ConnMatrix)> {
    let ctx = *p.ctx();
    let r = p.rows();
    let zero = FormMatrix::zero(&ctx, r, r);
    let q = p.block_diag(&zero)?;
    let big_a = a.block_diag(&zero)?;
    let lifted = lift_connection(&big_a, &q)?;
    let comp = FormMatrix::identity(&ctx, 2 * r).sub(&q)?;
    let restricted = comp.mul(lifted.matrix())?.mul(&comp)?.truncate()?;
    Ok((comp, ConnMatrix::new(restricted)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::weight::Weight;

    fn mono(c: &Context, coeff: i64, pairs: &[(u64, u32)], dlog: &[usize]) -> Form {
        Form::monomial(c, int(coeff), Weight::from_pairs(pairs, c.p()), dlog).unwrap()
    }

    fn conn(c: &Context, rows: Vec<Vec<Form>>) -> ConnMatrix {
        ConnMatrix::new(FormMatrix::from_rows(c, rows).unwrap()).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let c = Context::new(3, 2, 3).unwrap();
        assert!(curvature(&ConnMatrix::zero(&c, 2)).unwrap().is_zero());
        let n = conn(&c, vec![vec![mono(&c, 1, &[(1, 0), (1, 0)], &[0])]]);
        let k = curvature(&n).unwrap();
        assert_eq!(k.matrix().get(0, 0), &mono(&c, -1, &[(1, 0), (1, 0)], &[0, 1]).truncate().unwrap());
        let z = Form::zero(&c);
        let n = conn(&c, vec![vec![z.clone(), mono(&c, 1, &[(1, 0), (0, 0)], &[0])], vec![z.clone(), z]]);
        assert!(curvature(&n).unwrap().is_zero());
    }

    #[test]
    fn evaluate_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let x = Form::var(&c, 0);
        let col = FormMatrix::column(&c, vec![x.clone()]).unwrap();
        assert_eq!(evaluate(&ConnMatrix::zero(&c, 1), &col).unwrap().get(0, 0), &x.d());
        let n = conn(&c, vec![vec![x.d()]]);
        let one = FormMatrix::column(&c, vec![Form::one(&c)]).unwrap();
        assert_eq!(evaluate(&n, &one).unwrap().get(0, 0), &x.d());
    }

    #[test]
    fn base_change_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let x = Form::var(&c, 0);
        let (o, z) = (Form::one(&c), Form::zero(&c));
        let u = FormMatrix::from_rows(&c, vec![vec![o.clone(), x.clone()], vec![z.clone(), o.clone()]]).unwrap();
        let bc = invert(&u).unwrap();
        let n = base_change(&ConnMatrix::zero(&c, 2), &bc).unwrap();
        let expected = FormMatrix::from_rows(&c, vec![vec![z.clone(), x.d()], vec![z.clone(), z]]).unwrap();
        assert_eq!(n.matrix(), &expected);
        let same = base_change(&n, &BaseChange::identity(&c, 2)).unwrap();
        assert_eq!(same, n);
    }

    #[test]
    fn invert_example() {
        let c = Context::new(3, 1, 3).unwrap();
        let u = FormMatrix::from_rows(&c, vec![vec![Form::one(&c).sub(&mono(&c, 9, &[(1, 1)], &[])).unwrap()]]).unwrap();
        let bc = invert(&u).unwrap();
        let expected = Form::one(&c).add(&mono(&c, 9, &[(1, 1)], &[])).unwrap();
        assert_eq!(bc.inverse().get(0, 0), &expected);
        assert!(invert(&FormMatrix::from_rows(&c, vec![vec![Form::var(&c, 0)]]).unwrap()).is_err());
    }

    #[test]
    fn normalize_example() {
        let c = Context::new(3, 1, 3).unwrap();
        let n = conn(&c, vec![vec![mono(&c, 3, &[(1, 1)], &[0])]]);
        let (u, next) = normalize_step(&n).unwrap();
        let expected = Form::one(&c).sub(&mono(&c, 9, &[(1, 1)], &[])).unwrap().truncate().unwrap();
        assert_eq!(u.matrix().get(0, 0), &expected);
        assert!(next.matrix().is_zero());
        let out = normalize(&n, 8).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.connection.matrix().is_zero());
    }

    #[test]
    fn pullback_example() {
        let c = Context::new(3, 1, 3).unwrap();
        let n = conn(&c, vec![vec![Form::var(&c, 0).d()]]);
        let pulled = frobenius_pullback(&n).unwrap();
        assert_eq!(pulled.matrix().get(0, 0), &mono(&c, 3, &[(3, 0)], &[0]));
    }

    #[test]
    fn horizontal_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let e = ConnMatrix::zero(&c, 1);
        assert!(horizontal_check(&e, &e, &FormMatrix::identity(&c, 1)).unwrap());
        let g = FormMatrix::from_rows(&c, vec![vec![Form::var(&c, 0)]]).unwrap();
        assert!(!horizontal_check(&e, &e, &g).unwrap());
    }

    #[test]
    fn lift_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let x = Form::var(&c, 0);
        let (o, z) = (Form::one(&c), Form::zero(&c));
        let p = FormMatrix::from_rows(&c, vec![vec![o.clone(), x.clone()], vec![z.clone(), z.clone()]]).unwrap();
        let a = FormMatrix::from_rows(&c, vec![vec![z.clone(), x.d()], vec![z.clone(), z.clone()]]).unwrap();
        let n = lift_connection(&a, &p).unwrap();
        assert_eq!(n.matrix(), &a);
        assert!(curvature(&n).unwrap().is_zero());
        let id = FormMatrix::identity(&c, 2);
        assert_eq!(lift_connection(&a, &id).unwrap().matrix(), &a);
    }

    #[test]
    fn overconvergence_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let x = Form::var(&c, 0);
        let m = FormMatrix::from_rows(&c, vec![vec![x.mul(&x).unwrap().d()]]).unwrap();
        assert!(overconvergence_condition(&m, &Epsilon::pow2(3)).unwrap());
        assert!(!overconvergence_condition(&m, &Epsilon::pow2(1)).unwrap());
        assert!(overconvergence_condition(&FormMatrix::zero(&c, 1, 1), &Epsilon::pow2(1)).unwrap());
    }

    #[test]
    fn idempotent_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let id = FormMatrix::identity(&c, 2);
        assert_eq!(idempotent_frobenius_check(&id).unwrap(), IdempotentOutcome::Holds);
        let x = Form::var(&c, 0);
        let (o, z) = (Form::one(&c), Form::zero(&c));
        let p = FormMatrix::from_rows(&c, vec![vec![o, x], vec![z.clone(), z]]).unwrap();
        assert_eq!(idempotent_frobenius_check(&p).unwrap(), IdempotentOutcome::NotFrobeniusFixed);
    }

    #[test]
    fn schanuel_examples() {
        let c = Context::new(3, 1, 3).unwrap();
        let id = FormMatrix::identity(&c, 2);
        let (comp, conn) = schanuel_complement(&id, &FormMatrix::zero(&c, 2, 2)).unwrap();
        let expected = FormMatrix::zero(&c, 2, 2).block_diag(&id).unwrap();
        assert_eq!(comp, expected);
        assert!(conn.matrix().is_zero());
    }
}
