//! The basic operators on `W_m Ω` of `F_3[x, y]` and the relations between them.

use drw::{Context, Form, Weight};

fn main() -> drw::Result<()> {
    let ctx = Context::new(3, 2, 3)?;
    let x = Form::var(&ctx, 0);
    let y = Form::var(&ctx, 1);

    // V[x] = 3 x^{1/3}
    let vx = x.verschiebung()?;
    println!("V[x]      = {vx}");
    println!("dV[x]     = {}", vx.d());
    println!("F dV[x]   = {}", vx.d().frobenius());

    let a = vx.mul(&y)?.add(&x.mul(&y)?.d())?;
    println!("a         = {a}");
    println!("d(d a)    = {}", a.d().d());
    println!("FV(a) = 3a: {}", a.verschiebung()?.frobenius() == a.scale_int(3));
    println!("Vd = 3dV:   {}", a.d().verschiebung()? == a.verschiebung()?.d().scale_int(3));

    // everything of weight 1/9 or more divided is fine up to u_max
    let w = Form::monomial(&ctx, drw::coeff::int(9), Weight::from_pairs(&[(1, 2), (0, 0)], 3), &[])?;
    println!("9 x^(1/9) integral: {}, truncated: {}", w.is_integral(), w.truncate()?);
    Ok(())
}
