//! Splitting a form into its integral-weight, fractional and exact fractional parts.

use drw::{decompose, d_inverse, find_delta, zeta, Context, Epsilon, Form, Weight};

fn main() -> drw::Result<()> {
    let ctx = Context::new(3, 2, 3)?;
    let x = Form::var(&ctx, 0);
    let y = Form::var(&ctx, 1);
    let vx = x.verschiebung()?;

    let a = x.mul(&y)?.d().add(&vx.mul(&y.d())?)?.add(&vx.d())?;
    let parts = decompose(&a)?;
    println!("a      = {a}");
    println!("int    = {}", parts.int);
    println!("frp    = {}", parts.frp);
    println!("d(frp) = {}", parts.dfrp);
    println!("d^-1 of the exact part = {}", d_inverse(&parts.dfrp)?);

    let w = Form::monomial(&ctx, drw::coeff::int(3), Weight::from_pairs(&[(1, 1), (0, 0)], 3), &[])?;
    for eps in [Epsilon::pow2(1), Epsilon::pow2(3)] {
        println!("zeta_{eps}(3 x^(1/3)) = {}", zeta(&w, &eps)?);
    }
    let delta = find_delta(&[a.clone(), w], &Epsilon::default_grid())?;
    println!("largest grid epsilon for both: {}", delta.map_or("none".into(), |e| e.to_string()));
    Ok(())
}
