//! Arithmetic in finite fields `F_q`, `q = p^k`.
//!
//! Elements are plain integers in `[0, q)`. For `k > 1` the integer is read as
//! a base-`p` digit vector `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`, i.e. the
//! polynomial `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` modulo the context's
//! irreducible modulus. Elements carry no reference to their context; every
//! operation goes through [`FieldCtx`] and callers must not mix contexts.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted. Products of two elements must fit in `u64`.
pub const MAX_ORDER: u64 = 1 << 31;

/// Extension fields up to this order get full add/mul tables.
pub const TABLE_LIMIT: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported maximum {MAX_ORDER}")]
    Overflow { p: u64, k: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} is outside the field of order {q}")]
    OutOfRange { value: u64, q: u64 },
}

/// A field element, encoded as an integer in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Fe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

/// Immutable arithmetic context for `F_{p^k}`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    k: u32,
    q: u64,
    /// Low-to-high coefficients of the monic modulus (length `k + 1`), empty for prime fields.
    modulus: Vec<u32>,
    tables: Option<Tables>,
    inv: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` into `(p, k)` with `q = p^k`, `p` prime.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

// Dense polynomials over F_p, low-to-high coefficients.

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (lead * c) % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn digits(mut v: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = vec![0; k];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Irreducibility over `F_p` by trial division with every monic polynomial of
/// degree `1..=deg/2`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    for fd in 1..=deg / 2 {
        let count = p.pow(fd as u32);
        for lower in 0..count {
            let mut f = digits(lower, p, fd);
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `k` over `F_p`,
/// comparing coefficient vectors from `x^{k-1}` down to the constant term.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    // Enumerating `lower` in increasing integer order with digit k-1 most
    // significant visits (c_{k-1}, ..., c_0) lexicographically.
    for lower in 0..p.pow(k as u32) {
        let mut m = digits(lower, p, k);
        m.push(1);
        if m[0] != 0 && is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// Builds `F_{p^k}` with the lexicographically smallest monic irreducible modulus.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if p > MAX_ORDER {
            return Err(FieldError::Overflow { p, k });
        }
        if !is_prime(p) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(FieldError::Overflow { p, k })?;
        let modulus: Vec<u32> = if k == 1 {
            Vec::new()
        } else {
            let m = smallest_irreducible(p, k);
            debug_assert!(is_irreducible(&m, p));
            m.into_iter().map(|c| c as u32).collect()
        };
        let mut ctx = FieldCtx { p, k, q, modulus, tables: None, inv: Vec::new() };
        if k > 1 && q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u8; n * n];
            let mut mul = vec![0u8; n * n];
            let mut neg = vec![0u8; n];
            for a in 0..n {
                neg[a] = ctx.slow_neg(a as u64) as u8;
                for b in 0..n {
                    add[a * n + b] = ctx.slow_add(a as u64, b as u64) as u8;
                    mul[a * n + b] = ctx.slow_mul(a as u64, b as u64) as u8;
                }
            }
            ctx.tables = Some(Tables { add, mul, neg });
        }
        if q <= TABLE_LIMIT {
            let mut inv = vec![0u32; q as usize];
            for a in 1..q {
                inv[a as usize] = ctx.pow(Fe(a as u32), q - 2).0;
            }
            ctx.inv = inv;
        }
        Ok(ctx)
    }

    /// Builds the field of order `q`, factoring `q` as a prime power.
    pub fn with_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power_decomposition(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Low-to-high modulus coefficients including the leading 1; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    pub fn elem(&self, value: u64) -> Result<Fe, FieldError> {
        if value < self.q {
            Ok(Fe(value as u32))
        } else {
            Err(FieldError::OutOfRange { value, q: self.q })
        }
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, value: i64) -> Fe {
        Fe(value.rem_euclid(self.p as i64) as u32)
    }

    /// All `q` elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q as u32).map(Fe)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.q) as u32)
    }

    fn slow_add(&self, a: u64, b: u64) -> u64 {
        let k = self.k as usize;
        let (da, db) = (digits(a, self.p, k), digits(b, self.p, k));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    fn slow_neg(&self, a: u64) -> u64 {
        let k = self.k as usize;
        let s: Vec<u64> = digits(a, self.p, k).iter().map(|x| (self.p - x) % self.p).collect();
        undigits(&s, self.p)
    }

    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        let k = self.k as usize;
        let p = self.p;
        let (da, db) = (digits(a, p, k), digits(b, p, k));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, x) in da.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let m: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let mut r = poly_rem(&prod, &m, p);
        r.resize(k, 0);
        undigits(&r, p)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return Fe(if s >= self.q { s - self.q } else { s } as u32);
        }
        match &self.tables {
            Some(t) => Fe(t.add[a.0 as usize * self.q as usize + b.0 as usize] as u32),
            None => Fe(self.slow_add(a.0 as u64, b.0 as u64) as u32),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.k == 1 {
            return Fe(if a.0 == 0 { 0 } else { (self.q - a.0 as u64) as u32 });
        }
        match &self.tables {
            Some(t) => Fe(t.neg[a.0 as usize] as u32),
            None => Fe(self.slow_neg(a.0 as u64) as u32),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            return Fe((a.0 as u64 * b.0 as u64 % self.q) as u32);
        }
        match &self.tables {
            Some(t) => Fe(t.mul[a.0 as usize * self.q as usize + b.0 as usize] as u32),
            None => Fe(self.slow_mul(a.0 as u64, b.0 as u64) as u32),
        }
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if !self.inv.is_empty() {
            return Ok(Fe(self.inv[a.0 as usize]));
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// `acc[j] += scalar * row[j]` for all `j`.
    #[inline]
    pub fn axpy(&self, acc: &mut [Fe], scalar: Fe, row: &[Fe]) {
        if scalar.is_zero() {
            return;
        }
        if self.k == 1 {
            let q = self.q;
            let s = scalar.0 as u64;
            for (a, &x) in acc.iter_mut().zip(row) {
                let v = a.0 as u64 + s * x.0 as u64 % q;
                a.0 = if v >= q { v - q } else { v } as u32;
            }
        } else {
            for (a, &x) in acc.iter_mut().zip(row) {
                *a = self.add(*a, self.mul(scalar, x));
            }
        }
    }

    #[inline]
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        if self.k == 1 {
            let q = self.q;
            let mut acc = 0u64;
            for (&x, &y) in a.iter().zip(b) {
                acc += x.0 as u64 * y.0 as u64 % q;
                if acc >= q << 32 {
                    acc %= q;
                }
            }
            Fe((acc % q) as u32)
        } else {
            a.iter().zip(b).fold(self.zero(), |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
        }
    }
}
