//! Seeded invariant suites behind `drw selftest`.
//!
//! Each suite checks one group of identities on random instances and reports
//! the first failing input as a document that the matching command accepts.

use rand::Rng as _;

use super::document::{Document, Payload, Property};
use crate::connections::{
    base_change, curvature, frobenius_pullback, horizontal_check, lift_connection, normalize, normalize_step,
};
use crate::context::Context;
use crate::decomposition::{d_inverse, decompose, find_delta, zeta_parts, Epsilon};
use crate::form::Form;
use crate::frobenius::FrobeniusLift;
use crate::gen::{FormSpec, Generator};
use crate::matrix::FormMatrix;
use crate::rng::{rng_expansion_check, FreeElem, FreeRng, ResidueIdeal, UpperNilpotent3};
use crate::witt::{from_witt_coordinates, ghost, to_witt_coordinates};

pub const DEFAULT_CASES: u64 = 50;

struct Suite {
    name: &'static str,
    cases: u64,
    failure: Option<(String, Option<Document>)>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: &str, witness: impl FnOnce() -> Option<Document>) {
        if !ok && self.failure.is_none() {
            self.failure = Some((what.to_string(), witness()));
        }
    }

    fn finish(self) -> Property {
        let mut p = Property::new(self.name, self.failure.is_none());
        p.cases = self.cases;
        if let Some((detail, doc)) = self.failure {
            p.detail = Some(detail);
            p.counterexample = doc.map(Box::new);
        }
        p
    }
}

fn forms_doc(ctx: &Context, forms: &[&Form]) -> Option<Document> {
    Some(Document::new(*ctx, Payload::Forms(forms.iter().map(|f| (*f).clone()).collect())))
}

fn matrix_doc(m: &FormMatrix) -> Option<Document> {
    Some(Document::new(*m.ctx(), Payload::Matrix(m.clone())))
}

/// Contexts cycling through `p ∈ {2, 3}`, `n ∈ {1, 2}` and `m ∈ 2..=4`.
fn context(i: u64) -> Context {
    let p = [2, 3][(i % 2) as usize];
    let n = 1 + (i / 2 % 2) as usize;
    let m = 2 + (i / 4 % 3) as u32;
    Context::new(p, n, m).expect("valid parameters")
}

fn instance(seed: u64, salt: u64, i: u64) -> Generator {
    let ctx = context(i);
    let mut root = Generator::new(&ctx, seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for _ in 0..i {
        root.rng().gen::<u64>();
    }
    Generator::new(&ctx, root.rng().gen())
}

fn dga(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("dga identities");
    for i in 0..cases {
        let mut g = instance(seed, 1, i);
        let ctx = *g.ctx();
        let spec = FormSpec::new(&ctx).terms(3);
        let (Ok(a), Ok(b)) = (g.form(&spec), g.form(&spec)) else { continue };
        s.cases += 1;
        let p = ctx.p() as i64;
        let w = || forms_doc(&ctx, &[&a, &b]);
        s.check(a.d().d().is_zero(), "d^2 = 0", w);
        let ab = a.mul(&b).expect("same context");
        let mut leibniz = a.d().mul(&b).expect("same context");
        for deg in 0..=a.max_degree() {
            let term = a.degree_part(deg).mul(&b.d()).expect("same context");
            leibniz = if deg % 2 == 0 { leibniz.add(&term) } else { leibniz.sub(&term) }.expect("same context");
        }
        s.check(ab.d() == leibniz, "Leibniz rule", w);
        s.check(a.frobenius().d() == a.d().frobenius().scale_int(p), "dF = pFd", w);
        let Ok(va) = a.verschiebung() else { continue };
        s.check(a.d().verschiebung().ok() == Some(va.d().scale_int(p)), "Vd = pdV", w);
        s.check(va.frobenius() == a.scale_int(p), "FV = p", w);
        let lhs = a.mul(&b.frobenius()).ok().and_then(|x| x.verschiebung().ok());
        s.check(lhs == va.mul(&b).ok(), "V(aF(b)) = V(a)b", w);
        s.check([&ab, &va].iter().all(|f| f.is_integral()), "integral forms are closed", w);
    }
    s.finish()
}

fn witt(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("Witt coordinates and ghost map");
    for i in 0..cases {
        let mut g = instance(seed, 2, i);
        let ctx = *g.ctx();
        let spec = FormSpec::new(&ctx).degree(0).terms(3);
        let (Ok(a), Ok(b)) = (g.form(&spec), g.form(&spec)) else { continue };
        s.cases += 1;
        let w = || forms_doc(&ctx, &[&a, &b]);
        let back = to_witt_coordinates(&a).and_then(|c| from_witt_coordinates(&c, &ctx));
        s.check(back.ok() == a.truncate().ok(), "coordinates round trip", w);
        for r in 0..ctx.m() {
            let modulus = ctx.p_pow(r + 1);
            let (Ok(ga), Ok(gb)) = (ghost(&a, r), ghost(&b, r)) else {
                s.check(false, "ghost component", w);
                break;
            };
            let sum = a.add(&b).ok().and_then(|x| ghost(&x, r).ok());
            let prod = a.mul(&b).ok().and_then(|x| ghost(&x, r).ok());
            s.check(sum == Some(ga.add(&gb).reduce(&modulus)), "ghost map is additive", w);
            s.check(prod == Some(ga.mul(&gb).reduce(&modulus)), "ghost map is multiplicative", w);
        }
    }
    s.finish()
}

fn splitting(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("int + frp + d(frp) splitting");
    for i in 0..cases {
        let mut g = instance(seed, 3, i);
        let ctx = *g.ctx();
        let Ok(a) = g.form(&FormSpec::new(&ctx)) else { continue };
        s.cases += 1;
        let w = || forms_doc(&ctx, &[&a]);
        let Ok(parts) = decompose(&a) else {
            s.check(false, "decompose", w);
            continue;
        };
        s.check(parts.sum() == a, "parts sum to the input", w);
        let again = decompose(&parts.frp).ok();
        s.check(again.is_some_and(|d| d.frp == parts.frp && d.int.is_zero()), "projectors are idempotent", w);
        s.check(d_inverse(&parts.frp.d()).ok() == Some(parts.frp.clone()), "d^-1 d = id on frp", w);
        s.check(d_inverse(&parts.dfrp).map(|x| x.d()).ok() == Some(parts.dfrp.clone()), "d d^-1 = id on d(frp)", w);
    }
    s.finish()
}

fn zeta(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("zeta bounds");
    for i in 0..cases {
        let mut g = instance(seed, 4, i);
        let ctx = *g.ctx();
        let Ok(a) = g.form(&FormSpec::new(&ctx).only(false, true, false)) else { continue };
        s.cases += 1;
        let w = || forms_doc(&ctx, &[&a]);
        let Ok(Some(eps)) = find_delta(std::slice::from_ref(&a), &Epsilon::default_grid()) else {
            s.check(a.is_zero(), "find_delta", w);
            continue;
        };
        let za = zeta_parts(&a, &eps).map(|z| z.total()).ok();
        let zd = zeta_parts(&a.d(), &eps).map(|z| z.total()).ok();
        s.check(za == zd, "zeta(dx) = zeta(x) on frp", w);
        let pa = a.scale_int(ctx.p() as i64);
        let zp = zeta_parts(&pa, &eps).map(|z| z.total()).ok();
        let shifted = za.map(|z| z.shift(&num::BigRational::from_integer(1.into())));
        s.check(zp == shifted, "zeta(px) = zeta(x) + 1", w);
    }
    s.finish()
}

fn rngs(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("product expansion in rngs");
    for len in 1..=4 {
        let xs: Vec<FreeElem> = (0..len).map(FreeRng::generator).collect();
        let ys: Vec<FreeElem> = (0..len).map(|i| FreeRng::generator(len + i)).collect();
        s.cases += 1;
        let ok = rng_expansion_check(&FreeRng, &xs, &ys).is_ok_and(|d| d.is_empty());
        s.check(ok, "free rng", || None);
    }
    let ideal = ResidueIdeal::new(2, 32).expect("2 divides 32");
    let mats = UpperNilpotent3 { modulus: 8 };
    let mut g = Generator::new(&Context::new(2, 1, 1).expect("valid"), seed);
    for _ in 0..cases {
        let len = g.rng().gen_range(1..=4);
        let xs: Vec<u64> = (0..len).map(|_| 2 * g.rng().gen_range(0..16)).collect();
        let ys: Vec<u64> = (0..len).map(|_| 2 * g.rng().gen_range(0..16)).collect();
        s.cases += 1;
        s.check(rng_expansion_check(&ideal, &xs, &ys) == Ok(0), "2Z/32Z", || None);
        let mx: Vec<[u64; 3]> = (0..len).map(|_| std::array::from_fn(|_| g.rng().gen_range(0..8))).collect();
        let my: Vec<[u64; 3]> = (0..len).map(|_| std::array::from_fn(|_| g.rng().gen_range(0..8))).collect();
        s.check(rng_expansion_check(&mats, &mx, &my) == Ok([0; 3]), "upper triangular matrices mod 8", || None);
    }
    s.finish()
}

fn connections(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("connection calculus");
    for i in 0..cases {
        let mut g = instance(seed, 5, i);
        let r = 1 + (i % 3) as usize;
        let lift = FrobeniusLift::canonical(g.ctx().p(), g.ctx().n());
        let (Ok(n), Ok(u), Ok(u2)) = (g.integrable(r, &lift), g.base_change(r), g.base_change(r)) else { continue };
        s.cases += 1;
        let w = || matrix_doc(n.matrix());
        let Ok(nu) = base_change(&n, &u) else {
            s.check(false, "base change", w);
            continue;
        };
        s.check(curvature(&nu).is_ok_and(|k| k.is_zero()), "base change keeps curvature zero", w);
        let lhs = base_change(&nu, &u2).ok();
        let rhs = u.then(&u2).and_then(|c| base_change(&n, &c)).ok();
        s.check(lhs.is_some() && lhs == rhs, "base change group law", w);
        s.check(horizontal_check(&nu, &n, u.matrix()) == Ok(true), "base change is horizontal", w);
        let pulled = frobenius_pullback(&n).and_then(|x| curvature(&x));
        s.check(pulled.is_ok_and(|k| k.is_zero()), "pullback keeps curvature zero", w);
    }
    s.finish()
}

fn normalization(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("normalization of Frobenius structures");
    for i in 0..cases {
        let mut g = instance(seed, 6, i);
        let ctx = *g.ctx();
        let r = 1 + (i % 3) as usize;
        let lift = FrobeniusLift::canonical(ctx.p(), ctx.n());
        let Ok(inst) = g.frobenius_structured(r, &lift) else { continue };
        s.cases += 1;
        let w = || matrix_doc(inst.pulled.matrix());
        if let Ok(Some(v)) = inst.pulled.frac_vp() {
            let after = normalize_step(&inst.pulled).and_then(|(_, n)| n.frac_vp());
            s.check(after.is_ok_and(|a| a.is_none_or(|a| a > v)), "a step raises vp of the fractional part", w);
        }
        let Ok(out) = normalize(&inst.pulled, ctx.m() as usize + 4) else {
            s.check(false, "normalize", w);
            continue;
        };
        s.check(out.iterations <= ctx.m() as usize, "at most m iterations", w);
        s.check(out.connection.frac_vp().is_ok_and(|v| v.is_none()), "fractional part vanishes", w);
        s.check(curvature(&out.connection).is_ok_and(|k| k.is_zero()), "output is integrable", w);
        let target = frobenius_pullback(&inst.classical);
        let gauge = inst.perturbation.matrix().frobenius().mul(out.base_change.matrix()).and_then(|x| x.truncate());
        let horizontal = match (target, gauge) {
            (Ok(t), Ok(gm)) => horizontal_check(&out.connection, &t, &gm) == Ok(true),
            _ => false,
        };
        s.check(horizontal, "horizontal to the classical image", w);
    }
    s.finish()
}

fn lifting(seed: u64, cases: u64) -> Property {
    let mut s = Suite::new("connections along projectors");
    for i in 0..cases {
        let mut g = instance(seed, 7, i);
        let ctx = *g.ctx();
        let r = 2 + (i % 2) as usize;
        let k = g.rng().gen_range(1..=r);
        let Ok(inst) = g.projector(r, k) else { continue };
        s.cases += 1;
        let pm = &inst.projector;
        let w = || Some(Document::new(ctx, Payload::Matrices(vec![inst.a.clone(), pm.clone()])));
        let Ok(conn) = lift_connection(&inst.a, pm) else {
            s.check(false, "lift", w);
            continue;
        };
        let dp = pm.d();
        let expected = dp.mul(pm).and_then(|x| x.mul(&dp)).and_then(|x| x.truncate()).ok();
        let got = curvature(&conn).ok().map(|c| c.matrix().clone());
        s.check(got.is_some() && got == expected, "curvature is dP P dP", w);
    }
    s.finish()
}

/// Runs every suite, each on its own thread.
pub fn run_all(seed: u64, cases: u64) -> Vec<Property> {
    let suites: [fn(u64, u64) -> Property; 8] =
        [dga, witt, splitting, zeta, rngs, connections, normalization, lifting];
    std::thread::scope(|scope| {
        let handles: Vec<_> = suites.iter().map(|f| scope.spawn(move || f(seed, cases))).collect();
        handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
    })
}
