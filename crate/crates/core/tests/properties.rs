use drw::cli::{self, Document, Payload};
use drw::decomposition::{decompose, zeta, Epsilon};
use drw::gen::{FormSpec, Generator};
use drw::{Context, Form, FormMatrix};
use proptest::prelude::*;

fn context() -> impl Strategy<Value = Context> {
    (prop_oneof![Just(2u64), Just(3)], 1usize..=2, 2u32..=4).prop_map(|(p, n, m)| Context::new(p, n, m).unwrap())
}

fn form_with(spec: fn(&Context) -> FormSpec) -> impl Strategy<Value = Form> {
    (context(), any::<u64>()).prop_map(move |(ctx, seed)| Generator::new(&ctx, seed).form(&spec(&ctx)).unwrap())
}

fn any_form() -> impl Strategy<Value = Form> {
    form_with(FormSpec::new)
}

fn form_pair() -> impl Strategy<Value = (Form, Form)> {
    (context(), any::<u64>()).prop_map(|(ctx, seed)| {
        let mut g = Generator::new(&ctx, seed);
        let spec = FormSpec::new(&ctx).degree(0).only(true, true, false);
        (g.form(&spec).unwrap(), g.form(&spec).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn documents_round_trip(a in any_form()) {
        let doc = Document::new(*a.ctx(), Payload::Form(a));
        let text = doc.to_text();
        let back = Document::parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn matrix_documents_round_trip((ctx, seed) in (context(), any::<u64>())) {
        let mut g = Generator::new(&ctx, seed);
        let spec = FormSpec::new(&ctx).terms(2);
        let rows = (0..2).map(|_| (0..2).map(|_| g.form(&spec).unwrap()).collect()).collect();
        let m = FormMatrix::from_rows(&ctx, rows).unwrap();
        let doc = Document::new(ctx, Payload::Matrices(vec![m.clone(), m.d()]));
        prop_assert_eq!(Document::parse(&doc.to_text()).unwrap(), doc);
    }

    #[test]
    fn differential_squares_to_zero(a in any_form()) {
        prop_assert!(a.d().d().is_zero());
    }

    #[test]
    fn frobenius_after_verschiebung_is_p(a in any_form()) {
        let p = a.ctx().p() as i64;
        prop_assert_eq!(a.verschiebung().unwrap().frobenius(), a.scale_int(p));
    }

    #[test]
    fn truncation_is_idempotent(a in any_form()) {
        let t = a.truncate().unwrap();
        prop_assert_eq!(t.truncate().unwrap(), t);
    }

    #[test]
    fn splitting_reassembles(a in any_form()) {
        prop_assert_eq!(decompose(&a).unwrap().sum(), a);
    }

    #[test]
    fn zeta_shifts_under_p(a in any_form(), j in 1u32..=12) {
        let eps = Epsilon::pow2(j);
        let one = num::BigRational::from_integer(1.into());
        let pa = a.scale_int(a.ctx().p() as i64);
        prop_assert_eq!(zeta(&pa, &eps).unwrap(), zeta(&a, &eps).unwrap().shift(&one));
    }

    #[test]
    fn zeta_of_products_in_degree_zero((a, b) in form_pair(), j in 1u32..=12) {
        let eps = Epsilon::pow2(j);
        let lhs = zeta(&a.mul(&b).unwrap(), &eps).unwrap();
        let rhs = zeta(&a, &eps).unwrap().add(&zeta(&b, &eps).unwrap());
        prop_assert!(lhs >= rhs, "{} < {}", lhs, rhs);
    }

    #[test]
    fn gen_is_deterministic(seed in any::<u64>()) {
        let run = || {
            let mut out = Vec::new();
            let args = ["drw", "gen", "form", "--seed", &seed.to_string()];
            let code = cli::run(args, &mut std::io::empty(), &mut out, &mut std::io::sink());
            (code, out)
        };
        let (code, first) = run();
        prop_assert_eq!(code, 0);
        prop_assert_eq!(first, run().1);
    }
}
