//! Shared helpers for the integration tests: an independent Witt vector
//! implementation through ghost components over `Z[x]`, and small tallies.

#![allow(dead_code)]

use drw::ZPoly;
use num::BigInt;

/// `w_r(a) = Σ_{i<=r} p^i a_i^{p^{r-i}}` modulo `p^{r+1}`.
pub fn ghost_poly(a: &[ZPoly], p: u64, r: u32) -> ZPoly {
    let modulus = BigInt::from(p).pow(r + 1);
    let n = a[0].n();
    let mut acc = ZPoly::zero(n);
    for i in 0..=r {
        let ai = a[i as usize].reduce(&BigInt::from(p));
        let mut pw = ai;
        for _ in 0..(r - i) {
            pw = pw.pow_mod(p, &modulus);
        }
        acc = acc.add(&pw.scale(&BigInt::from(p).pow(i)));
    }
    acc.reduce(&modulus)
}

/// Witt coordinates `s` with `w_r(s) = target_r`, solved one index at a
/// time. Division by `p^r` is exact because the targets come from Witt vectors.
fn solve_ghost(targets: &[ZPoly], p: u64) -> Vec<ZPoly> {
    let pb = BigInt::from(p);
    let mut s: Vec<ZPoly> = Vec::new();
    for (r, t) in targets.iter().enumerate() {
        let r = r as u32;
        let modulus = pb.pow(r + 1);
        let mut partial = ZPoly::zero(t.n());
        for (i, si) in s.iter().enumerate() {
            let mut pw = si.clone();
            for _ in 0..(r - i as u32) {
                pw = pw.pow_mod(p, &modulus);
            }
            partial = partial.add(&pw.scale(&pb.pow(i as u32)));
        }
        let diff = t.sub(&partial).reduce(&modulus);
        let q = diff.div_exact(&pb.pow(r)).expect("ghost target is a Witt vector");
        s.push(q.reduce(&pb));
    }
    s
}

pub fn witt_add(a: &[ZPoly], b: &[ZPoly], p: u64) -> Vec<ZPoly> {
    let targets: Vec<ZPoly> =
        (0..a.len() as u32).map(|r| ghost_poly(a, p, r).add(&ghost_poly(b, p, r))).collect();
    solve_ghost(&targets, p)
}

pub fn witt_mul(a: &[ZPoly], b: &[ZPoly], p: u64) -> Vec<ZPoly> {
    let targets: Vec<ZPoly> = (0..a.len() as u32)
        .map(|r| {
            let m = BigInt::from(p).pow(r + 1);
            ghost_poly(a, p, r).mul(&ghost_poly(b, p, r)).reduce(&m)
        })
        .collect();
    solve_ghost(&targets, p)
}

/// Counts cases and keeps the first counterexample.
#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub failures: usize,
    pub first: Option<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    pub fn case(&mut self) {
        self.cases += 1;
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}
