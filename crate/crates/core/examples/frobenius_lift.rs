//! Classical forms pushed into `W_m Ω` through `t_F` for two Frobenius lifts.

use drw::frobenius::CharZeroForm;
use drw::{tf_form, tf_scalar, Context, FrobeniusLift, ZPoly};

fn main() -> drw::Result<()> {
    let ctx = Context::new(2, 1, 3)?;
    let x = ZPoly::var(1, 0);
    let canonical = FrobeniusLift::canonical(2, 1);
    let shifted = FrobeniusLift::shifted(2, 1);

    println!("t_F(x), x -> x^2:      {}", tf_scalar(&x, &canonical, &ctx)?);
    println!("t_F(x), x -> x^2 + 2x: {}", tf_scalar(&x, &shifted, &ctx)?);

    let dx = CharZeroForm::dx(1, 0);
    let image = tf_form(&dx, &shifted, &ctx)?;
    println!("t_F(dx) = {image}");
    println!("int part {}, fractional part {}", image.integer_weight_part(), image.fractional_weight_part());
    Ok(())
}
