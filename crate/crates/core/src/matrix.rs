//! Matrices of forms.

use std::fmt;

use crate::coeff::Coeff;
use crate::context::Context;
use crate::decomposition::{decompose, Decomposition};
use crate::error::{DrwError, Result};
use crate::form::Form;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormMatrix {
    ctx: Context,
    rows: usize,
    cols: usize,
    entries: Vec<Form>,
}

impl FormMatrix {
    pub fn zero(ctx: &Context, rows: usize, cols: usize) -> Self {
        FormMatrix { ctx: *ctx, rows, cols, entries: vec![Form::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &Context, r: usize) -> Self {
        Self::from_fn(ctx, r, r, |i, j| if i == j { Form::one(ctx) } else { Form::zero(ctx) })
    }

    pub fn from_fn(ctx: &Context, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Form) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        FormMatrix { ctx: *ctx, rows, cols, entries }
    }

    pub fn try_from_fn(ctx: &Context, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Result<Form>) -> Result<Self> {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect::<Result<Vec<_>>>()?;
        Ok(FormMatrix { ctx: *ctx, rows, cols, entries })
    }

    pub fn from_rows(ctx: &Context, rows: Vec<Vec<Form>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(DrwError::ShapeMismatch("ragged matrix rows".into()));
            }
            for e in row {
                ctx.check_same(e.ctx())?;
                entries.push(e);
            }
        }
        Ok(FormMatrix { ctx: *ctx, rows: r, cols: c, entries })
    }

    /// A single column.
    pub fn column(ctx: &Context, entries: Vec<Form>) -> Result<Self> {
        Self::from_rows(ctx, entries.into_iter().map(|e| vec![e]).collect())
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Form) {
        self.entries[i * self.cols + j] = f;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Form> {
        self.entries.iter()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Form>> {
        self.entries.chunks(self.cols.max(1)).map(<[Form]>::to_vec).take(self.rows).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Form::is_zero)
    }

    fn same_shape(&self, other: &FormMatrix) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(DrwError::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> FormMatrix {
        FormMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Form) -> Result<Form>) -> Result<FormMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(FormMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(FormMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(FormMatrix { ctx: self.ctx, rows: self.rows, cols: self.cols, entries })
    }

    pub fn neg(&self) -> FormMatrix {
        self.map(Form::neg)
    }

    pub fn scale(&self, c: &Coeff) -> FormMatrix {
        self.map(|f| f.scale(c))
    }

    pub fn mul(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.ctx.check_same(&other.ctx)?;
        if self.cols != other.rows {
            return Err(DrwError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Form::zero(&self.ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(FormMatrix { ctx: self.ctx, rows: self.rows, cols: other.cols, entries })
    }

    /// Product followed by truncation.
    pub fn mul_trunc(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.mul(other)?.truncate()
    }

    pub fn d(&self) -> FormMatrix {
        self.map(Form::d)
    }

    pub fn frobenius(&self) -> FormMatrix {
        self.map(Form::frobenius)
    }

    pub fn truncate(&self) -> Result<FormMatrix> {
        self.try_map(Form::truncate)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(Form::is_integral)
    }

    /// Entrywise minimum of `vp`; `None` for the zero matrix.
    pub fn vp(&self) -> Result<Option<u64>> {
        let mut best: Option<u64> = None;
        for e in &self.entries {
            if let Some(v) = e.vp_form()? {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok(best)
    }

    pub fn decompose(&self) -> Result<MatrixDecomposition> {
        let parts = self.entries.iter().map(decompose).collect::<Result<Vec<Decomposition>>>()?;
        let pick = |f: fn(&Decomposition) -> Form| FormMatrix {
            ctx: self.ctx,
            rows: self.rows,
            cols: self.cols,
            entries: parts.iter().map(f).collect(),
        };
        Ok(MatrixDecomposition {
            int: pick(|d| d.int.clone()),
            frp: pick(|d| d.frp.clone()),
            dfrp: pick(|d| d.dfrp.clone()),
        })
    }

    pub fn frac_part(&self) -> FormMatrix {
        self.map(Form::fractional_weight_part)
    }

    pub fn int_part(&self) -> FormMatrix {
        self.map(Form::integer_weight_part)
    }

    /// Every entry homogeneous of degree `deg`.
    pub fn check_degree(&self, deg: usize) -> Result<()> {
        for e in &self.entries {
            if let Some(found) = e.terms().map(|(b, _)| b.degree()).find(|&d| d != deg) {
                return Err(DrwError::DegreeMismatch { expected: deg, found });
            }
        }
        Ok(())
    }

    pub fn block_diag(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.ctx.check_same(&other.ctx)?;
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        Ok(FormMatrix::from_fn(&self.ctx, rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                Form::zero(&self.ctx)
            }
        }))
    }

    pub fn with_context(&self, ctx: &Context) -> Result<FormMatrix> {
        let entries = self.entries.iter().map(|e| e.with_context(ctx)).collect::<Result<Vec<_>>>()?;
        Ok(FormMatrix { ctx: *ctx, rows: self.rows, cols: self.cols, entries })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixDecomposition {
    pub int: FormMatrix,
    pub frp: FormMatrix,
    pub dfrp: FormMatrix,
}

impl MatrixDecomposition {
    pub fn frac(&self) -> FormMatrix {
        self.frp.add(&self.dfrp).expect("same shape")
    }
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let c = Context::new(3, 2, 2).unwrap();
        let x = Form::var(&c, 0);
        let m = FormMatrix::from_rows(&c, vec![vec![x.clone(), x.d()], vec![Form::one(&c), Form::zero(&c)]]).unwrap();
        let id = FormMatrix::identity(&c, 2);
        assert_eq!(id.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&id).unwrap(), m);
        assert!(m.sub(&m).unwrap().is_zero());
    }

    #[test]
    fn shape_errors() {
        let c = Context::new(3, 1, 2).unwrap();
        let a = FormMatrix::zero(&c, 2, 3);
        assert!(a.mul(&a).is_err());
        assert!(a.add(&FormMatrix::zero(&c, 3, 2)).is_err());
    }
}
