//! Removing the fractional part of a Frobenius-structured connection.

use drw::gen::Generator;
use drw::{base_change, frobenius_pullback, horizontal_check, normalize, Context, FrobeniusLift};

fn main() -> drw::Result<()> {
    let ctx = Context::new(2, 2, 3)?;
    let mut g = Generator::new(&ctx, 11);
    let inst = g.frobenius_structured(2, &FrobeniusLift::canonical(2, 2))?;
    println!("N0 (classical)  = {}", inst.classical.matrix());
    println!("pF(N)           = {}", inst.pulled.matrix());

    let out = normalize(&inst.pulled, 8)?;
    println!("iterations      = {}", out.iterations);
    println!("vp(frac) trace  = {:?}", out.valuations);
    println!("normalized      = {}", out.connection.matrix());
    println!("precision       = {}", out.precision);
    assert_eq!(base_change(&inst.pulled, &out.base_change)?, out.connection);

    let gauge = inst.perturbation.matrix().frobenius().mul(out.base_change.matrix())?.truncate()?;
    let target = frobenius_pullback(&inst.classical)?;
    println!("horizontal to pF(N0): {}", horizontal_check(&out.connection, &target, &gauge)?);
    Ok(())
}
