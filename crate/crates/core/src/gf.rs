//! Arithmetic in GF(q) for odd prime powers q = p^h.
//!
//! Elements are encoded as integers in `[0, q)` whose base-p digits are the
//! coefficients (little-endian) of a polynomial reduced modulo a fixed monic
//! irreducible polynomial of degree h. Addition goes through a full table,
//! multiplication through exp/log tables for a primitive element.
//!
//! ```
//! use polarforge::gf::FieldCtx;
//!
//! let f = FieldCtx::with_modulus(3, &[1, 0, 1]).unwrap(); // GF(9) as GF(3)[x]/(x^2+1)
//! let x = 3; // digits [0, 1]
//! assert_eq!(f.mul(x, x), f.neg(1));
//! assert!(f.is_square(f.neg(1)));
//! ```

use crate::error::{Error, Result};

/// A field element, as its base-p integer encoding.
pub type Elem = u32;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1024;

/// Conway polynomials shipped as default moduli, `(p, h, little-endian coefficients)`.
const DEFAULT_MODULI: &[(u32, u32, &[u32])] = &[
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
];

/// Arithmetic context for GF(q). Immutable once built.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    h: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<Elem>,
    neg: Vec<Elem>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled so products of logs need no reduction.
    exp: Vec<Elem>,
    log: Vec<u32>,
    primitive: Elem,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("h", &self.h)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Splits `q` into `(p, h)` with `q = p^h`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..).take_while(|d| d * d <= q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    let mut h = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p as u32, h))
}

// Polynomials over GF(p) as little-endian coefficient vectors without trailing zeros.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (r[r.len() - 1] * lead_inv) % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (c * mi) % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn digits(mut a: u32, p: u32, h: u32) -> Vec<u32> {
    (0..h)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// True when the monic polynomial `m` has no monic factor of degree `1..=deg/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut cand = digits(low as u32, p, d as u32);
            cand.push(1);
            if poly_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    /// Builds GF(q) with the default modulus: a Conway polynomial for q in
    /// {9, 27, 81}, otherwise the smallest monic irreducible polynomial.
    pub fn new(q: u64) -> Result<Self> {
        let (p, h) = Self::check_order(q)?;
        let modulus = match DEFAULT_MODULI.iter().find(|(mp, mh, _)| *mp == p && *mh == h) {
            Some((_, _, m)) => m.to_vec(),
            None if h == 1 => vec![0, 1],
            None => {
                let count = (p as u64).pow(h);
                (0..count)
                    .map(|low| {
                        let mut c = digits(low as u32, p, h);
                        c.push(1);
                        c
                    })
                    .find(|c| c[0] != 0 && is_irreducible(c, p))
                    .expect("an irreducible polynomial of every degree exists")
            }
        };
        Self::build(p, h, modulus)
    }

    /// Builds GF(p^h) from an explicit monic modulus of degree h (little-endian).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::ReducibleModulus(modulus.to_vec()));
        }
        let h = (modulus.len() - 1) as u32;
        let q = (p as u64).checked_pow(h).ok_or(Error::FieldTooLarge(u64::MAX))?;
        let (pp, hh) = Self::check_order(q)?;
        if pp != p || hh != h {
            return Err(Error::InvalidField(q));
        }
        if modulus.iter().any(|&c| c >= p) || modulus[h as usize] != 1 || !is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(modulus.to_vec()));
        }
        Self::build(p, h, modulus.to_vec())
    }

    fn check_order(q: u64) -> Result<(u32, u32)> {
        let (p, h) = prime_power(q).ok_or(Error::InvalidField(q))?;
        if p == 2 {
            return Err(Error::InvalidField(q));
        }
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        Ok((p, h))
    }

    fn build(p: u32, h: u32, modulus: Vec<u32>) -> Result<Self> {
        let q = p.pow(h);
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a, p, h);
            for b in 0..q {
                let db = digits(b, p, h);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s, p);
            }
        }
        let neg = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, h).iter().map(|&c| (p - c) % p).collect();
                undigits(&d, p)
            })
            .collect();

        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, h);
            let db = digits(b, p, h);
            let mut prod = vec![0u32; 2 * h as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(h as usize, 0);
            undigits(&r, p)
        };

        let order = |g: u32| -> u32 {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = slow_mul(x, g);
                k += 1;
            }
            k
        };
        let primitive = (1..q)
            .find(|&g| order(g) == q - 1)
            .ok_or_else(|| Error::ReducibleModulus(modulus.clone()))?;

        let mut exp = vec![0; 2 * (qs - 1)];
        let mut log = vec![0; qs];
        let mut x = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            if i < qs - 1 {
                log[x as usize] = i as u32;
            }
            x = slow_mul(x, primitive);
        }

        Ok(FieldCtx { p, h, q, modulus, add, neg, exp, log, primitive })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    /// Little-endian coefficients of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.q
    }

    pub fn is_valid(&self, a: Elem) -> bool {
        a < self.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.is_valid(a) {
            Ok(a)
        } else {
            Err(Error::InvalidElement(a))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// Discrete logarithm to the base of the primitive element.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// `g^i` for the primitive element `g`.
    pub fn exp(&self, i: u32) -> Elem {
        self.exp[(i % (self.q - 1)) as usize]
    }

    /// Quadratic character from the log table: nonzero squares have even logarithm.
    pub fn is_square(&self, a: Elem) -> bool {
        a == 0 || self.log[a as usize].is_multiple_of(2)
    }

    /// Quadratic character by Euler's criterion, `a^((q-1)/2) = 1`.
    pub fn is_square_euler(&self, a: Elem) -> bool {
        a == 0 || self.pow(a, (self.q as u64 - 1) / 2) == 1
    }

    /// A square root of `a`, the smaller encoding of the pair `±b`.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return Some(0);
        }
        let l = self.log[a as usize];
        if !l.is_multiple_of(2) {
            return None;
        }
        let b = self.exp[(l / 2) as usize];
        Some(b.min(self.neg(b)))
    }

    /// Smallest encoding that is a non-square.
    pub fn nonsquare(&self) -> Elem {
        self.elements()
            .find(|&a| !self.is_square(a))
            .expect("odd-order fields have non-squares")
    }

    /// Base-p digits (polynomial coefficients) of an element.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        digits(a, self.p, self.h)
    }
}
