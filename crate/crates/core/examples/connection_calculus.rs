//! Curvature, base change and horizontal maps for connection matrices.

use drw::connections::lift_connection;
use drw::{base_change, curvature, evaluate, horizontal_check, BaseChange, ConnMatrix, Context, Form, FormMatrix};

fn main() -> drw::Result<()> {
    let ctx = Context::new(3, 2, 3)?;
    let x = Form::var(&ctx, 0);
    let y = Form::var(&ctx, 1);
    let (one, zero) = (Form::one(&ctx), Form::zero(&ctx));

    let n = ConnMatrix::new(FormMatrix::from_rows(&ctx, vec![vec![x.mul(&y)?.d()]])?)?;
    println!("curvature of [d(xy)] = {}", curvature(&n)?.matrix());
    let bent = ConnMatrix::new(FormMatrix::from_rows(&ctx, vec![vec![x.mul(&y)?.mul(&x.d())?]])?)?;
    println!("curvature of [xy * x dlog x] = {}", curvature(&bent)?.matrix());

    let u = BaseChange::new(FormMatrix::from_rows(&ctx, vec![vec![one.clone(), x.clone()], vec![zero.clone(), one.clone()]])?)?;
    let trivial = ConnMatrix::zero(&ctx, 2);
    let gauge = base_change(&trivial, &u)?;
    println!("U^-1 dU = {}", gauge.matrix());
    println!("U is horizontal: {}", horizontal_check(&gauge, &trivial, u.matrix())?);

    let col = FormMatrix::column(&ctx, vec![y.clone(), one.clone()])?;
    println!("nabla(y, 1) = {}", evaluate(&gauge, &col)?);

    let p = FormMatrix::from_rows(&ctx, vec![vec![one.clone(), x.clone()], vec![zero.clone(), zero.clone()]])?;
    let lifted = lift_connection(gauge.matrix(), &p)?;
    println!("lifted along P: {}", lifted.matrix());
    Ok(())
}
