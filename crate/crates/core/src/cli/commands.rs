use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::document::{Document, Payload, Property, Report};
use super::{selftest, CliError, Command, GenKind, Lift, Options};
use crate::connections::{
    base_change, curvature, evaluate, frobenius_pullback, horizontal_check, lift_connection, matrix_zeta_parts,
    normalize, normalize_step, overconvergence_condition, step_precision, BaseChange, ConnMatrix,
};
use crate::context::Context;
use crate::decomposition::{d_inverse, decompose, find_delta, zeta_parts, Epsilon, ZetaValue};
use crate::form::Form;
use crate::frobenius::{tf_form, CharZeroForm, FrobeniusLift};
use crate::gen::{FormSpec, Generator};
use crate::matrix::FormMatrix;
use crate::poly::ZPoly;
use crate::rng::{rng_expansion_check, FreeElem, FreeRng, ResidueIdeal};
use crate::witt::{ghost, teichmuller};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn wrong_payload(expected: &str, doc: &Document) -> CliError {
    CliError::Semantic { path: "$".into(), message: format!("expected a {expected} payload, found {}", doc.payload.kind()) }
}

fn expect_form(doc: &Document) -> Result<&Form, CliError> {
    match &doc.payload {
        Payload::Form(f) => Ok(f),
        _ => Err(wrong_payload("form", doc)),
    }
}

fn expect_forms(doc: &Document) -> Result<Vec<Form>, CliError> {
    match &doc.payload {
        Payload::Forms(fs) => Ok(fs.clone()),
        Payload::Form(f) => Ok(vec![f.clone()]),
        _ => Err(wrong_payload("forms", doc)),
    }
}

fn expect_matrix(doc: &Document) -> Result<&FormMatrix, CliError> {
    match &doc.payload {
        Payload::Matrix(m) => Ok(m),
        _ => Err(wrong_payload("matrix", doc)),
    }
}

fn expect_matrices<'a>(doc: &'a Document, names: &[&str]) -> Result<&'a [FormMatrix], CliError> {
    match &doc.payload {
        Payload::Matrices(ms) if ms.len() == names.len() => Ok(ms),
        Payload::Matrices(ms) => Err(CliError::Semantic {
            path: "$.matrices".into(),
            message: format!("expected {} matrices [{}], found {}", names.len(), names.join(", "), ms.len()),
        }),
        _ => Err(wrong_payload("matrices", doc)),
    }
}

fn connection(m: &FormMatrix) -> Result<ConnMatrix, CliError> {
    Ok(ConnMatrix::new(m.clone())?)
}

fn epsilon(opts: &Options) -> Result<Epsilon, CliError> {
    let text = opts.epsilon.as_deref().ok_or_else(|| usage("this command needs --epsilon"))?;
    text.parse().map_err(|e: crate::error::DrwError| usage(e.to_string()))
}

fn zeta_value(z: &ZetaValue) -> Value {
    json!(z.to_string())
}

fn frobenius_lift(lift: Lift, ctx: &Context) -> FrobeniusLift {
    match lift {
        Lift::Canonical => FrobeniusLift::canonical(ctx.p(), ctx.n()),
        Lift::Shifted => FrobeniusLift::shifted(ctx.p(), ctx.n()),
    }
}

/// A degree-0 form with integral weights and integer coefficients, read as a
/// polynomial.
fn polynomial(f: &Form) -> Result<ZPoly, CliError> {
    let bad = |msg: &str| CliError::Semantic { path: "$.form".into(), message: msg.into() };
    let mut terms = Vec::new();
    for (b, c) in f.terms() {
        let exps = b.weight.as_integral().ok_or_else(|| bad("polynomial terms need integral weights"))?;
        if b.dlog != 0 {
            return Err(bad("polynomial terms have no dlog factors"));
        }
        if !c.is_integer() {
            return Err(bad("polynomial coefficients must be integers"));
        }
        terms.push((exps, c.to_integer()));
    }
    Ok(ZPoly::from_terms(f.ctx().n(), terms)?)
}

/// A form with integral weights and integer coefficients, read as a form on
/// `Z[x]` through `x^k dlog_I = x^{k - e_I} dx_I`.
fn classical(f: &Form) -> Result<CharZeroForm, CliError> {
    let bad = |msg: &str| CliError::Semantic { path: "$.form".into(), message: msg.into() };
    for (b, c) in f.terms() {
        let k = b.weight.as_integral().ok_or_else(|| bad("classical forms need integral weights"))?;
        if !c.is_integer() {
            return Err(bad("classical forms need integer coefficients"));
        }
        if (0..k.len()).any(|i| b.dlog & (1 << i) != 0 && k[i] == 0) {
            return Err(bad("dlog x_i needs x_i to divide the coefficient monomial"));
        }
    }
    Ok(CharZeroForm::from_form_int(f)?)
}

fn single(name: &str, payload: Payload) -> Vec<(String, Payload)> {
    vec![(name.to_string(), payload)]
}

pub fn run_command(cmd: &Command, opts: &Options, ctx: &Context, input: Option<&Document>) -> Result<Report, CliError> {
    let mut report = Report { precision: ctx.m(), ..Report::default() };
    let doc = || input.ok_or_else(|| usage("missing input document"));
    match cmd {
        Command::Add => {
            let sum = expect_forms(doc()?)?.iter().try_fold(Form::zero(ctx), |acc, f| acc.add(f))?;
            report.outputs = single("sum", Payload::Form(sum));
        }
        Command::Mul => {
            let prod = expect_forms(doc()?)?.iter().try_fold(Form::one(ctx), |acc, f| acc.mul(f))?;
            report.outputs = single("product", Payload::Form(prod));
        }
        Command::D => report.outputs = single("d", Payload::Form(expect_form(doc()?)?.d())),
        Command::F => report.outputs = single("F", Payload::Form(expect_form(doc()?)?.frobenius())),
        Command::V => report.outputs = single("V", Payload::Form(expect_form(doc()?)?.verschiebung()?)),
        Command::Integral => {
            report.values.insert("integral".into(), json!(expect_form(doc()?)?.is_integral()));
        }
        Command::Vp => {
            report.values.insert("vp".into(), json!(expect_form(doc()?)?.vp_form()?));
        }
        Command::Truncate => report.outputs = single("truncated", Payload::Form(expect_form(doc()?)?.truncate()?)),
        Command::Teich => {
            let f = polynomial(expect_form(doc()?)?)?;
            report.outputs = single("teichmuller", Payload::Form(teichmuller(&f, ctx)?));
        }
        Command::Ghost => {
            let a = expect_form(doc()?)?;
            let ws = (0..ctx.m())
                .map(|r| ghost(a, r).and_then(|w| Form::from_zpoly(ctx, &w)))
                .collect::<Result<Vec<_>, _>>()?;
            report.outputs = single("ghost", Payload::Forms(ws));
        }
        Command::Tf => {
            let omega = classical(expect_form(doc()?)?)?;
            let lift = frobenius_lift(opts.lift, ctx);
            report.outputs = single("tf", Payload::Form(tf_form(&omega, &lift, ctx)?));
            report.values.insert("lift".into(), json!(if lift.is_canonical() { "canonical" } else { "shifted" }));
        }
        Command::Decompose => {
            let parts = decompose(expect_form(doc()?)?)?;
            report.outputs = vec![
                ("int".into(), Payload::Form(parts.int)),
                ("frp".into(), Payload::Form(parts.frp)),
                ("dfrp".into(), Payload::Form(parts.dfrp)),
            ];
        }
        Command::Dinv => {
            let a = expect_form(doc()?)?;
            report.precision = ctx.m().saturating_sub(a.max_denominator_exp());
            report.outputs = single("preimage", Payload::Form(d_inverse(a)?));
        }
        Command::Zeta => {
            let eps = epsilon(opts)?;
            let z = zeta_parts(expect_form(doc()?)?, &eps)?;
            report.values.insert("epsilon".into(), json!(eps.to_string()));
            report.values.insert("zeta".into(), zeta_value(&z.total()));
            report.values.insert("int".into(), zeta_value(&z.int));
            report.values.insert("frp".into(), zeta_value(&z.frp));
            report.values.insert("dfrp".into(), zeta_value(&z.dfrp));
        }
        Command::Delta => {
            let eps = find_delta(&expect_forms(doc()?)?, &Epsilon::default_grid())?;
            report.values.insert("epsilon".into(), json!(eps.map(|e| e.to_string())));
        }
        Command::Curvature => {
            let k = curvature(&connection(expect_matrix(doc()?)?)?)?;
            report.values.insert("zero".into(), json!(k.is_zero()));
            report.outputs = single("curvature", Payload::Matrix(k.matrix().clone()));
        }
        Command::Basechange => {
            let [n, u] = expect_matrices(doc()?, &["N", "U"])? else { unreachable!() };
            let out = base_change(&connection(n)?, &BaseChange::new(u.clone())?)?;
            report.outputs = single("connection", Payload::Matrix(out.into_matrix()));
        }
        Command::Evaluate => {
            let [n, u] = expect_matrices(doc()?, &["N", "u"])? else { unreachable!() };
            report.outputs = single("value", Payload::Matrix(evaluate(&connection(n)?, u)?));
        }
        Command::Lift => {
            let [a, p] = expect_matrices(doc()?, &["A", "P"])? else { unreachable!() };
            let n = lift_connection(a, p)?;
            let k = curvature(&n)?;
            report.outputs = vec![
                ("connection".into(), Payload::Matrix(n.matrix().clone())),
                ("curvature".into(), Payload::Matrix(k.matrix().clone())),
            ];
        }
        Command::Pullback => {
            let out = frobenius_pullback(&connection(expect_matrix(doc()?)?)?)?;
            report.outputs = single("connection", Payload::Matrix(out.into_matrix()));
        }
        Command::Horizontal => {
            let [e, f, g] = expect_matrices(doc()?, &["E", "F", "G"])? else { unreachable!() };
            let holds = horizontal_check(&connection(e)?, &connection(f)?, g)?;
            report.properties.push(Property::new("dG = G E - F G", holds));
        }
        Command::Step => {
            let n = connection(expect_matrix(doc()?)?)?;
            let before = n.frac_vp()?;
            report.precision = step_precision(&n.truncate()?)?;
            let (u, next) = normalize_step(&n)?;
            report.values.insert("vp_before".into(), json!(before));
            report.values.insert("vp_after".into(), json!(next.frac_vp()?));
            report.outputs = vec![
                ("connection".into(), Payload::Matrix(next.into_matrix())),
                ("base_change".into(), Payload::Matrix(u.matrix().clone())),
                ("inverse".into(), Payload::Matrix(u.inverse().clone())),
            ];
        }
        Command::Normalize => {
            let n = connection(expect_matrix(doc()?)?)?;
            let out = normalize(&n, opts.max_iter.unwrap_or(ctx.m() as usize + 4))?;
            report.iterations = Some(out.iterations as u64);
            report.precision = out.precision;
            report.values.insert("valuations".into(), json!(out.valuations));
            report.outputs = vec![
                ("connection".into(), Payload::Matrix(out.connection.into_matrix())),
                ("base_change".into(), Payload::Matrix(out.base_change.matrix().clone())),
                ("inverse".into(), Payload::Matrix(out.base_change.inverse().clone())),
            ];
        }
        Command::Occheck => {
            let eps = epsilon(opts)?;
            let m = expect_matrix(doc()?)?;
            let [int, frp, dfrp] = matrix_zeta_parts(m, &eps)?;
            report.values.insert("epsilon".into(), json!(eps.to_string()));
            report.values.insert("int".into(), zeta_value(&int));
            report.values.insert("frp".into(), zeta_value(&frp));
            report.values.insert("dfrp".into(), zeta_value(&dfrp));
            report.properties.push(Property::new("overconvergence", overconvergence_condition(m, &eps)?));
        }
        Command::Rng => rng_report(opts, ctx, &mut report)?,
        Command::Gen { kind } => gen_report(*kind, opts, ctx, &mut report)?,
        Command::Selftest => {
            let seed = opts.seed.unwrap_or(0);
            let cases = opts
                .cases
                .or_else(|| std::env::var("DRW_SELFTEST_CASES").ok().and_then(|s| s.parse().ok()))
                .unwrap_or(selftest::DEFAULT_CASES);
            report.seed = Some(seed);
            report.properties = selftest::run_all(seed, cases);
            report.values.insert("cases".into(), json!(cases));
        }
    }
    Ok(report)
}

fn rng_report(opts: &Options, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let t = opts.t.unwrap_or(2);
    if t > 10 {
        return Err(usage("--t above 10 is not supported"));
    }
    let p = ctx.p();
    let modulus = p.checked_pow(ctx.m()).filter(|&q| q <= 1 << 20).ok_or_else(|| usage("p^m above 2^20"))?;
    let ring = ResidueIdeal::new(p, modulus)?;
    let size = modulus / p;
    let len = t + 1;
    let tuples = (size as f64).powi(2 * len as i32);
    let exhaustive = tuples <= 1e6;
    let mut cases = 0u64;
    let mut failure = None;
    let mut check = |xs: &[u64], ys: &[u64]| -> Result<(), CliError> {
        cases += 1;
        if failure.is_none() && rng_expansion_check(&ring, xs, ys)? != 0 {
            failure = Some(format!("xs={xs:?} ys={ys:?}"));
        }
        Ok(())
    };
    if exhaustive {
        let total = size.pow(2 * len as u32);
        for code in 0..total {
            let digits: Vec<u64> = (0..2 * len).map(|i| (code / size.pow(i as u32) % size) * p).collect();
            check(&digits[..len], &digits[len..])?;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
        for _ in 0..opts.cases.unwrap_or(10_000) {
            let xs: Vec<u64> = (0..len).map(|_| rng.gen_range(0..size) * p).collect();
            let ys: Vec<u64> = (0..len).map(|_| rng.gen_range(0..size) * p).collect();
            check(&xs, &ys)?;
        }
        report.seed = Some(opts.seed.unwrap_or(0));
    }
    let mut prop = Property::new(format!("expansion in {p}Z/{modulus}Z"), failure.is_none());
    prop.cases = cases;
    prop.detail = failure;
    report.properties.push(prop);
    if len <= 4 {
        let xs: Vec<FreeElem> = (0..len).map(FreeRng::generator).collect();
        let ys: Vec<FreeElem> = (0..len).map(|i| FreeRng::generator(len + i)).collect();
        report.properties.push(Property::new("expansion in the free rng", rng_expansion_check(&FreeRng, &xs, &ys)?.is_empty()));
    }
    report.values.insert("t".into(), json!(t));
    report.values.insert("exhaustive".into(), json!(exhaustive));
    Ok(())
}

fn gen_report(kind: GenKind, opts: &Options, ctx: &Context, report: &mut Report) -> Result<(), CliError> {
    let seed = opts.seed.unwrap_or(0);
    let r = opts.rank.unwrap_or(2);
    if r == 0 {
        return Err(usage("--rank must be positive"));
    }
    let mut g = Generator::new(ctx, seed);
    let lift = frobenius_lift(opts.lift, ctx);
    report.seed = Some(seed);
    report.outputs = match kind {
        GenKind::Form => single("form", Payload::Form(g.form(&FormSpec::new(ctx))?)),
        GenKind::Integrable => single("connection", Payload::Matrix(g.integrable(r, &lift)?.into_matrix())),
        GenKind::FrobeniusStructured => {
            let inst = g.frobenius_structured(r, &lift)?;
            vec![
                ("connection".into(), Payload::Matrix(inst.connection.into_matrix())),
                ("classical".into(), Payload::Matrix(inst.classical.into_matrix())),
                ("base_change".into(), Payload::Matrix(inst.perturbation.matrix().clone())),
            ]
        }
        GenKind::Basechange => {
            let u = g.base_change(r)?;
            vec![
                ("base_change".into(), Payload::Matrix(u.matrix().clone())),
                ("inverse".into(), Payload::Matrix(u.inverse().clone())),
            ]
        }
        GenKind::Idempotent => single("projector", Payload::Matrix(g.constant_idempotent(r)?)),
    };
    Ok(())
}

