use std::fmt;

use num::{BigInt, One};

use crate::error::{DrwError, Result};

/// Shared parameters of a computation: the prime, the number of variables,
/// the truncation level `m` of `W_m Ω` and the caps on weights.
///
/// Forms only combine when their contexts are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    p: u64,
    n: usize,
    m: u32,
    u_max: u32,
    d_max: Option<u64>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Context {
    /// Maximum number of variables; dlog sets are stored as bitmasks.
    pub const MAX_VARS: usize = 32;

    pub fn new(p: u64, n: usize, m: u32) -> Result<Self> {
        Self::with_caps(p, n, m, m + 2, None)
    }

    pub fn with_caps(p: u64, n: usize, m: u32, u_max: u32, d_max: Option<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(DrwError::InvalidContext(format!("p = {p} is not prime")));
        }
        if n == 0 || n > Self::MAX_VARS {
            return Err(DrwError::InvalidContext(format!(
                "n = {n} must lie in 1..={}",
                Self::MAX_VARS
            )));
        }
        if m == 0 {
            return Err(DrwError::InvalidContext("m must be at least 1".into()));
        }
        if u_max < m {
            return Err(DrwError::InvalidContext(format!(
                "u_max = {u_max} is below m = {m}"
            )));
        }
        Ok(Context { p, n, m, u_max, d_max })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn u_max(&self) -> u32 {
        self.u_max
    }

    pub fn d_max(&self) -> Option<u64> {
        self.d_max
    }

    /// Same context at another truncation level.
    pub fn with_precision(&self, m: u32) -> Result<Self> {
        Self::with_caps(self.p, self.n, m, self.u_max.max(m), self.d_max)
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub fn p_pow(&self, e: u32) -> BigInt {
        let mut r = BigInt::one();
        let p = self.p_big();
        for _ in 0..e {
            r *= &p;
        }
        r
    }

    pub(crate) fn check_same(&self, other: &Context) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(DrwError::ContextMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, n={}, m={}, u_max={}", self.p, self.n, self.m, self.u_max)?;
        if let Some(d) = self.d_max {
            write!(f, ", d_max={d}")?;
        }
        write!(f, ")")
    }
}
