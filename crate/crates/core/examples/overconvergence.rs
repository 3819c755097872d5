//! The overconvergence condition on connection matrices as epsilon shrinks.

use drw::connections::{matrix_zeta_parts, overconvergence_condition};
use drw::gen::Generator;
use drw::{find_delta, Context, Epsilon, FrobeniusLift};

fn main() -> drw::Result<()> {
    let ctx = Context::new(3, 2, 3)?;
    let mut g = Generator::new(&ctx, 5);
    let inst = g.frobenius_structured(2, &FrobeniusLift::shifted(3, 2))?;
    let m = inst.pulled.matrix();
    println!("N = {m}");
    for eps in [Epsilon::pow2(1), Epsilon::pow2(4), Epsilon::pow2(8)] {
        let [int, frp, dfrp] = matrix_zeta_parts(m, &eps)?;
        let ok = overconvergence_condition(m, &eps)?;
        println!("eps = {eps:>5}: int {int}, frp {frp}, d(frp) {dfrp} -> {ok}");
    }
    let entries: Vec<_> = m.entries().cloned().collect();
    match find_delta(&entries, &Epsilon::default_grid())? {
        Some(e) => println!("find_delta: {e}"),
        None => println!("find_delta: no grid point works"),
    }
    Ok(())
}
