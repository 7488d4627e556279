//! Finite fields GF(p^e) with log/antilog tables, and subfield embeddings.
//!
//! Elements are plain `u32` values packing the polynomial-basis coefficients
//! base-p little-endian: the element `c_0 + c_1 x + ... + c_{e-1} x^{e-1}`
//! is encoded as `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`. The prime subfield
//! GF(p) therefore occupies the encodings `0..p`.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fixed binary moduli, bit `i` is the coefficient of `x^i`.
const BINARY_MODULI: [u32; 17] = [
    0, 0x2, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// JSON form of a field: `{"p": 2, "e": 2, "modulus": [1, 1, 1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

/// The four field operations exposed to callers that dispatch at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// A finite field GF(p^e) under a fixed irreducible modulus.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.inner.p, self.inner.e, self.inner.modulus)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.inner.q)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) with u64 coefficients, low-to-high, used only while
// constructing a field.
mod prime_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let mut b = a % p;
        let mut k = p - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            k >>= 1;
        }
        r
    }

    pub fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        trim(&mut a);
        let df = f.len() - 1;
        let lead_inv = inv_mod(f[df], p);
        while a.len() > df {
            let top = a.len() - 1;
            let c = a[top] * lead_inv % p;
            if c != 0 {
                for (i, &fi) in f.iter().enumerate() {
                    let idx = top - df + i;
                    a[idx] = (a[idx] + p - c * fi % p) % p;
                }
            }
            a.pop();
            trim(&mut a);
        }
        a
    }

    pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, f, p)
    }

    pub fn pow_mod(base: &[u64], mut k: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, f, p);
        while k > 0 {
            if k & 1 == 1 {
                result = mul_mod(&result, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            k >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: f of degree e is irreducible iff gcd(f, x^(p^i) - x) = 1 for i <= e/2.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let e = f.len() - 1;
        if e == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut h = x.clone();
        for _ in 0..e / 2 {
            h = pow_mod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            let g = gcd(f, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    if p == 2 {
        let bits = BINARY_MODULI[e as usize];
        return (0..=e).map(|i| (bits >> i) & 1).collect();
    }
    // Smallest monic irreducible polynomial, ordering the lower coefficients
    // by their base-p packing.
    let count = (p as u64).pow(e);
    for packed in 0..count {
        let mut f: Vec<u64> = Vec::with_capacity(e as usize + 1);
        let mut t = packed;
        for _ in 0..e {
            f.push(t % p as u64);
            t /= p as u64;
        }
        f.push(1);
        if e > 1 && f[0] == 0 {
            continue;
        }
        if prime_poly::is_irreducible(&f, p as u64) {
            return f.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds GF(p^e). Without an explicit modulus the shipped default is used.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus("coefficient out of range".into()));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                m
            }
            None => default_modulus(p, e),
        };
        let f64s: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        if !prime_poly::is_irreducible(&f64s, p as u64) {
            return Err(Error::Reducible(modulus, p));
        }
        Ok(Field { inner: Arc::new(Self::build_tables(p, e, q as u32, modulus)) })
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        Field::new(spec.p, spec.e, spec.modulus.clone())
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.inner.p, e: self.inner.e, modulus: Some(self.inner.modulus.clone()) }
    }

    fn build_tables(p: u32, e: u32, q: u32, modulus: Vec<u32>) -> Inner {
        let pp = p as u64;
        let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        let to_poly = |a: u32| -> Vec<u64> {
            let mut v = Vec::with_capacity(e as usize);
            let mut t = a;
            for _ in 0..e {
                v.push((t % p) as u64);
                t /= p;
            }
            v
        };
        let from_poly = |v: &[u64]| -> u32 {
            v.iter().rev().fold(0u32, |acc, &c| acc * p + c as u32)
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            if e == 1 {
                return ((a as u64 * b as u64) % pp) as u32;
            }
            from_poly(&prime_poly::mul_mod(&to_poly(a), &to_poly(b), &f, pp))
        };
        let slow_pow = |a: u32, mut k: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while k > 0 {
                if k & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                k >>= 1;
            }
            r
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * (q as usize - 1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..(q as usize - 1) {
            exp[i] = x;
            exp[i + q as usize - 1] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, generator);
        }
        let digit_add = |a: u32, b: u32| -> u32 {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut scale = 1u32;
            for _ in 0..e {
                out += ((a % p + b % p) % p) * scale;
                a /= p;
                b /= p;
                scale = scale.wrapping_mul(p);
            }
            out
        };
        let neg = (0..q)
            .map(|a| {
                let mut t = a;
                let mut out = 0u32;
                let mut scale = 1u32;
                for _ in 0..e {
                    out += ((p - t % p) % p) * scale;
                    t /= p;
                    scale = scale.wrapping_mul(p);
                }
                out
            })
            .collect();
        let add = if p != 2 && q <= 256 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b);
                }
            }
            Some(t)
        } else {
            None
        };
        Inner { p, e, q, modulus, generator, exp, log, neg, add }
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    /// Number of elements q = p^e.
    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// The primitive element the log tables are built on.
    pub fn primitive_element(&self) -> u32 {
        self.inner.generator
    }

    pub fn elements(&self) -> Range<u32> {
        0..self.inner.q
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.inner.q
    }

    pub fn check(&self, a: u32) -> Result<u32> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::InvalidElement(a))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(self.inner.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let inner = &*self.inner;
        if inner.p == 2 {
            return a ^ b;
        }
        if inner.e == 1 {
            let s = a + b;
            return if s >= inner.p { s - inner.p } else { s };
        }
        match &inner.add {
            Some(t) => t[(a * inner.q + b) as usize],
            None => {
                let p = inner.p;
                let (mut a, mut b) = (a, b);
                let mut out = 0u32;
                let mut scale = 1u32;
                while a > 0 || b > 0 {
                    out += ((a % p + b % p) % p) * scale;
                    a /= p;
                    b /= p;
                    scale *= p;
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.inner.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        inner.exp[(inner.log[a as usize] + inner.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let inner = &*self.inner;
        let l = inner.log[a as usize];
        Ok(if l == 0 { 1 } else { inner.exp[(inner.q - 1 - l) as usize] })
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let inner = &*self.inner;
        let l = (inner.log[a as usize] as u64 * (k % (inner.q as u64 - 1))) % (inner.q as u64 - 1);
        inner.exp[l as usize]
    }

    /// a ↦ a^p.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.inner.p as u64)
    }

    /// Discrete logarithm to the base [`Field::primitive_element`].
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inner.log[a as usize])
    }

    /// `primitive_element()^k`.
    pub fn exp(&self, k: u64) -> u32 {
        self.inner.exp[(k % (self.inner.q as u64 - 1)) as usize]
    }

    /// Checked arithmetic on validated encodings.
    pub fn apply(&self, op: Op, a: u32, b: u32) -> Result<u32> {
        self.check(a)?;
        self.check(b)?;
        match op {
            Op::Add => Ok(self.add(a, b)),
            Op::Sub => Ok(self.sub(a, b)),
            Op::Mul => Ok(self.mul(a, b)),
            Op::Div => self.div(a, b),
        }
    }

    /// Base-p coefficients of `a`, low to high.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let p = self.inner.p;
        let mut t = a;
        (0..self.inner.e)
            .map(|_| {
                let d = t % p;
                t /= p;
                d
            })
            .collect()
    }

    pub fn ensure_same(&self, other: &Field) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{self:?}"), format!("{other:?}")))
        }
    }
}

/// Isomorphism from a subfield GF(p^e) onto its image inside GF(p^{e m}).
///
/// Returns `(lift, unlift)`; `unlift[x]` is `u32::MAX` when `x` lies outside the image.
pub(crate) fn subfield_maps(small: &Field, big: &Field) -> Result<(Vec<u32>, Vec<u32>)> {
    if small.characteristic() != big.characteristic() || big.degree() % small.degree() != 0 {
        return Err(Error::FieldMismatch(format!("{small:?}"), format!("{big:?}")));
    }
    let modulus = small.modulus();
    let eval = |r: u32| -> u32 {
        modulus.iter().rev().fold(0u32, |acc, &c| big.add(big.mul(acc, r), c))
    };
    let root = big
        .elements()
        .find(|&r| eval(r) == 0)
        .ok_or_else(|| Error::Internal("subfield modulus has no root in the extension".into()))?;
    let mut lift = Vec::with_capacity(small.order() as usize);
    for a in small.elements() {
        let x = small
            .digits(a)
            .iter()
            .rev()
            .fold(0u32, |acc, &c| big.add(big.mul(acc, root), c));
        lift.push(x);
    }
    let mut unlift = vec![u32::MAX; big.order() as usize];
    for (a, &x) in lift.iter().enumerate() {
        unlift[x as usize] = a as u32;
    }
    Ok((lift, unlift))
}

/// GF(q) inside GF(q^m) together with a GF(q)-basis of the big field.
#[derive(Clone)]
pub struct SubfieldEmbedding {
    small: Field,
    big: Field,
    basis: Vec<u32>,
    lift: Vec<u32>,
    unlift: Vec<u32>,
    // big element -> packed coordinate vector (base q, little-endian)
    coords: Vec<u32>,
}

impl fmt::Debug for SubfieldEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubfieldEmbedding")
            .field("small", &self.small)
            .field("big", &self.big)
            .field("basis", &self.basis)
            .finish()
    }
}

impl SubfieldEmbedding {
    /// Embeds `small` into its degree-`m` extension built with the default modulus.
    ///
    /// The default basis is `(1, x, ..., x^{m-1})` where `x` is the class of the
    /// variable in the extension (encoded as `p`).
    pub fn new(small: &Field, m: usize, basis: Option<Vec<u32>>) -> Result<SubfieldEmbedding> {
        if m < 2 {
            return Err(Error::InvalidArgument("extension degree m must be at least 2".into()));
        }
        let e = small.degree() as usize * m;
        let big = Field::new(small.characteristic(), e as u32, None)?;
        Self::with_big_field(small, &big, basis)
    }

    pub fn with_big_field(
        small: &Field,
        big: &Field,
        basis: Option<Vec<u32>>,
    ) -> Result<SubfieldEmbedding> {
        let m = (big.degree() / small.degree()) as usize;
        if m < 2 {
            return Err(Error::InvalidArgument("extension degree m must be at least 2".into()));
        }
        let (lift, unlift) = subfield_maps(small, big)?;
        let basis = match basis {
            Some(b) => {
                if b.len() != m {
                    return Err(Error::InvalidArgument(format!(
                        "basis needs {m} elements, got {}",
                        b.len()
                    )));
                }
                for &x in &b {
                    big.check(x)?;
                }
                b
            }
            None => {
                let x = big.characteristic();
                (0..m as u64).map(|i| big.pow(x, i)).collect()
            }
        };
        let q = small.order() as usize;
        let mut coords = vec![u32::MAX; big.order() as usize];
        for packed in 0..big.order() as usize {
            let mut t = packed;
            let mut x = 0u32;
            for &b in &basis {
                let c = lift[t % q];
                t /= q;
                x = big.add(x, big.mul(c, b));
            }
            if coords[x as usize] != u32::MAX {
                return Err(Error::DependentBasis);
            }
            coords[x as usize] = packed as u32;
        }
        Ok(SubfieldEmbedding { small: small.clone(), big: big.clone(), basis, lift, unlift, coords })
    }

    pub fn small(&self) -> &Field {
        &self.small
    }

    pub fn big(&self) -> &Field {
        &self.big
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    /// Image of a small-field element in the big field.
    pub fn lift(&self, a: u32) -> u32 {
        self.lift[a as usize]
    }

    /// Preimage of a big-field element lying in the subfield.
    pub fn unlift(&self, x: u32) -> Option<u32> {
        let a = self.unlift[x as usize];
        (a != u32::MAX).then_some(a)
    }

    /// Coordinates `(c_1, ..., c_m)` over the small field with `x = Σ c_i b_i`.
    pub fn expand_element(&self, x: u32) -> Result<Vec<u32>> {
        self.big.check(x)?;
        let q = self.small.order();
        let mut t = self.coords[x as usize];
        Ok((0..self.degree())
            .map(|_| {
                let c = t % q;
                t /= q;
                c
            })
            .collect())
    }

    /// Inverse of [`SubfieldEmbedding::expand_element`].
    pub fn recombine(&self, coords: &[u32]) -> Result<u32> {
        if coords.len() != self.degree() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        let mut x = 0;
        for (&c, &b) in coords.iter().zip(&self.basis) {
            self.small.check(c)?;
            x = self.big.add(x, self.big.mul(self.lift[c as usize], b));
        }
        Ok(x)
    }
}
