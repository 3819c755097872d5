//! Degree-0 forms as Witt vectors: coordinates, Teichmüller lifts and ghost components.

use drw::{from_witt_coordinates, ghost, teichmuller, to_witt_coordinates, Context, ZPoly};

fn main() -> drw::Result<()> {
    let ctx = Context::new(2, 1, 3)?;
    let x = ZPoly::var(1, 0);
    let f = x.add(&ZPoly::one(1));

    let t = teichmuller(&f, &ctx)?;
    println!("[x + 1]          = {t}");

    let coords = vec![x.clone(), ZPoly::one(1), x.mul(&x)];
    let a = from_witt_coordinates(&coords, &ctx)?;
    println!("(x, 1, x^2)      = {a}");
    let back = to_witt_coordinates(&a)?;
    println!("coordinates back = {}", back.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
    for r in 0..ctx.m() {
        println!("w_{r}              = {}", ghost(&a, r)?);
    }
    Ok(())
}
