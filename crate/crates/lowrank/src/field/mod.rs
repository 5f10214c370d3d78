//! Prime fields GF(p) and extensions GF(p^k).
//!
//! An element is stored packed as `sum c_i p^i` where `(c_0, ..., c_{k-1})` are its
//! coefficients in the power basis. Base-field elements therefore keep the same
//! packed value inside any extension of the same characteristic, which is how
//! measurements over an extension meet tensors over the base field.

mod gfp_poly;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub(crate) use gfp_poly::{mulm, powm};

/// A field element. Only meaningful together with the [`FieldCtx`] that produced it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fel(pub(crate) u64);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);

    /// Packed representation `sum c_i p^i`.
    pub fn raw(self) -> u64 {
        self.0
    }

    /// Builds an element from its packed representation without range checks.
    pub fn from_raw(v: u64) -> Fel {
        Fel(v)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

const TABLE_LIMIT: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u64 = 256;

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u8>>,
}

struct Inner {
    p: u64,
    k: usize,
    q: u64,
    /// Monic modulus c_0..c_k, empty for prime fields.
    modulus: Vec<u64>,
    pw: Vec<u64>,
    group_primes: Vec<u64>,
    generator: Option<(Fel, u64)>,
    tables: Option<Tables>,
}

/// Immutable, cheaply clonable field context.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<Inner>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.k == 1 {
            write!(f, "GF({})", self.inner.p)
        } else {
            write!(f, "GF({}^{})", self.inner.p, self.inner.k)
        }
    }
}

fn is_prime_u64(p: u64) -> bool {
    num_prime::nt_funcs::is_prime64(p)
}

fn distinct_prime_factors(n: u64) -> Vec<u64> {
    if n <= 1 {
        return Vec::new();
    }
    num_prime::nt_funcs::factorize64(n).into_keys().collect()
}

impl FieldCtx {
    /// GF(p). Fails with `CompositeCharacteristic` unless p is prime.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || !is_prime_u64(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        if p >= 1 << 63 {
            return Err(Error::FieldTooLarge(p.to_string()));
        }
        Ok(Self::build(p, 1, Vec::new()))
    }

    /// GF(p^k) over this prime field, using the least monic irreducible modulus of
    /// degree k when coefficient tuples are compared constant term first.
    pub fn extension(&self, k: usize) -> Result<Self> {
        if self.inner.k != 1 {
            return Err(Error::param("extensions are built over a prime field"));
        }
        if k == 0 {
            return Err(Error::param("extension degree must be >= 1"));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let p = self.inner.p;
        let q = checked_pow(p, k).ok_or_else(|| Error::FieldTooLarge(format!("{p}^{k}")))?;
        // candidates in lexicographic order of (c0, ..., c_{k-1}), c0 most significant;
        // c0 = 0 is divisible by x, so start at c0 = 1
        for idx in q / p..q {
            let mut modulus = vec![0u64; k + 1];
            let mut rest = idx;
            for i in (0..k).rev() {
                modulus[i] = rest % p;
                rest /= p;
            }
            modulus[k] = 1;
            if gfp_poly::is_irreducible(&modulus, p) {
                return Ok(Self::build(p, k, modulus));
            }
        }
        unreachable!("an irreducible polynomial exists in every degree")
    }

    /// GF(p^k) with an explicitly given monic modulus `c_0..c_k`.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = Self::prime(p)?;
        if modulus.len() < 3 || *modulus.last().unwrap() != 1 {
            return Err(Error::param("modulus must be monic of degree >= 2"));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::CoefficientOutOfRange(c));
        }
        let k = modulus.len() - 1;
        checked_pow(p, k).ok_or_else(|| Error::FieldTooLarge(format!("{p}^{k}")))?;
        if !gfp_poly::is_irreducible(modulus, p) {
            return Err(Error::param("modulus is reducible"));
        }
        drop(base);
        Ok(Self::build(p, k, modulus.to_vec()))
    }

    fn build(p: u64, k: usize, modulus: Vec<u64>) -> Self {
        let q = checked_pow(p, k).expect("checked by caller");
        let pw = (0..=k).map(|i| checked_pow(p, i).unwrap_or(0)).collect();
        let inner = Inner {
            p,
            k,
            q,
            modulus,
            pw,
            group_primes: distinct_prime_factors(q - 1),
            generator: None,
            tables: None,
        };
        let mut ctx = FieldCtx { inner: Arc::new(inner) };
        if k > 1 && q <= TABLE_LIMIT {
            let tables = ctx.build_tables();
            Arc::get_mut(&mut ctx.inner).expect("unique").tables = Some(tables);
        }
        ctx
    }

    fn build_tables(&self) -> Tables {
        let q = self.inner.q;
        let prim = (1..q)
            .map(|i| self.nth_element(i))
            .find(|&a| self.multiplicative_order(a) == q - 1)
            .expect("multiplicative group is cyclic");
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = Fel::ONE;
        for i in 0..n {
            exp[i] = x.0 as u32;
            exp[i + n] = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, prim);
        }
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u8; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_digits(Fel(a), Fel(b)).0 as u8;
                }
            }
            t
        });
        Tables { exp, log, add }
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> usize {
        self.inner.k
    }

    /// Number of elements p^k.
    pub fn order(&self) -> u64 {
        self.inner.q
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        (self.inner.k > 1).then_some(self.inner.modulus.as_slice())
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.k == 1
    }

    /// The prime subfield.
    pub fn base_field(&self) -> FieldCtx {
        if self.inner.k == 1 {
            self.clone()
        } else {
            Self::build(self.inner.p, 1, Vec::new())
        }
    }

    /// Recorded distinguished element and its multiplicative order.
    pub fn generator(&self) -> Option<(Fel, u64)> {
        self.inner.generator
    }

    /// Field containing both `self` and `other`: equal fields, or a prime field and an
    /// extension of the same characteristic.
    pub fn common(&self, other: &FieldCtx) -> Result<FieldCtx> {
        if self == other || (self.inner.p == other.inner.p && other.inner.k == 1) {
            Ok(self.clone())
        } else if self.inner.p == other.inner.p && self.inner.k == 1 {
            Ok(other.clone())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// True when elements of `sub` are valid elements of `self` as packed values.
    pub fn contains(&self, sub: &FieldCtx) -> bool {
        self == sub || (self.inner.p == sub.inner.p && sub.inner.k == 1)
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        let i = &*self.inner;
        if i.k == 1 {
            return Fel(gfp_poly::addm(a.0, b.0, i.p));
        }
        if i.p == 2 {
            return Fel(a.0 ^ b.0);
        }
        if let Some(Tables { add: Some(t), .. }) = &i.tables {
            return Fel(t[(a.0 * i.q + b.0) as usize] as u64);
        }
        self.add_digits(a, b)
    }

    fn add_digits(&self, a: Fel, b: Fel) -> Fel {
        let i = &*self.inner;
        let (mut x, mut y, mut out) = (a.0, b.0, 0u64);
        for d in 0..i.k {
            let s = gfp_poly::addm(x % i.p, y % i.p, i.p);
            out += s * i.pw[d];
            x /= i.p;
            y /= i.p;
        }
        Fel(out)
    }

    #[inline]
    pub fn neg(&self, a: Fel) -> Fel {
        let i = &*self.inner;
        if i.k == 1 {
            return Fel(if a.0 == 0 { 0 } else { i.p - a.0 });
        }
        if i.p == 2 {
            return a;
        }
        let (mut x, mut out) = (a.0, 0u64);
        for d in 0..i.k {
            let c = x % i.p;
            if c != 0 {
                out += (i.p - c) * i.pw[d];
            }
            x /= i.p;
        }
        Fel(out)
    }

    #[inline]
    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        if self.inner.k == 1 {
            return Fel(gfp_poly::subm(a.0, b.0, self.inner.p));
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        let i = &*self.inner;
        if i.k == 1 {
            return Fel(mulm(a.0, b.0, i.p));
        }
        if a.0 == 0 || b.0 == 0 {
            return Fel::ZERO;
        }
        if let Some(t) = &i.tables {
            let l = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return Fel(t.exp[l] as u64);
        }
        self.mul_poly(a, b)
    }

    /// a*b + c
    #[inline]
    pub fn mul_add(&self, a: Fel, b: Fel, c: Fel) -> Fel {
        self.add(self.mul(a, b), c)
    }

    fn mul_poly(&self, a: Fel, b: Fel) -> Fel {
        let i = &*self.inner;
        let x = self.coeffs(a);
        let y = self.coeffs(b);
        let prod = gfp_poly::mul(&x, &y, i.p);
        let r = gfp_poly::rem(&prod, &i.modulus, i.p);
        self.pack(&r)
    }

    pub fn inv(&self, a: Fel) -> Option<Fel> {
        let i = &*self.inner;
        if a.0 == 0 {
            return None;
        }
        if i.k == 1 {
            return gfp_poly::invm(a.0, i.p).map(Fel);
        }
        if let Some(t) = &i.tables {
            let n = (i.q - 1) as usize;
            return Some(Fel(t.exp[(n - t.log[a.0 as usize] as usize) % n] as u64));
        }
        gfp_poly::inv_mod(&self.coeffs(a), &i.modulus, i.p).map(|v| self.pack(&v))
    }

    pub fn div(&self, a: Fel, b: Fel) -> Option<Fel> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fel, mut e: u64) -> Fel {
        if a.0 == 0 {
            return if e == 0 { Fel::ONE } else { Fel::ZERO };
        }
        if self.inner.k == 1 {
            return Fel(powm(a.0, e % (self.inner.q - 1), self.inner.p));
        }
        e %= self.inner.q - 1;
        let (mut acc, mut b) = (Fel::ONE, a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Power with an arbitrary-precision exponent.
    pub fn pow_big(&self, a: Fel, e: &BigUint) -> Fel {
        if a.0 == 0 {
            return if e.bits() == 0 { Fel::ONE } else { Fel::ZERO };
        }
        let reduced = (e % BigUint::from(self.inner.q - 1)).to_u64().expect("reduced");
        self.pow(a, reduced)
    }

    pub fn from_u64(&self, c: u64) -> Fel {
        Fel(c % self.inner.p)
    }

    /// Little-endian power-basis coefficients, always of length k.
    pub fn coeffs(&self, a: Fel) -> Vec<u64> {
        let i = &*self.inner;
        let mut x = a.0;
        (0..i.k)
            .map(|_| {
                let c = x % i.p;
                x /= i.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<Fel> {
        if c.len() != self.inner.k {
            return Err(Error::LengthMismatch { expected: self.inner.k, found: c.len() });
        }
        if let Some(&bad) = c.iter().find(|&&x| x >= self.inner.p) {
            return Err(Error::CoefficientOutOfRange(bad));
        }
        Ok(self.pack(c))
    }

    fn pack(&self, c: &[u64]) -> Fel {
        Fel(c.iter().zip(&self.inner.pw).map(|(&d, &w)| d * w).sum())
    }

    /// Element at position `idx` of the canonical enumeration: coefficient tuples
    /// `(c_0, ..., c_{k-1})` in lexicographic order, `c_0` compared first.
    pub fn nth_element(&self, idx: u64) -> Fel {
        let i = &*self.inner;
        let mut rest = idx;
        let mut c = vec![0u64; i.k];
        for d in (0..i.k).rev() {
            c[d] = rest % i.p;
            rest /= i.p;
        }
        self.pack(&c)
    }

    /// Inverse of [`nth_element`](Self::nth_element).
    pub fn index_of(&self, a: Fel) -> u64 {
        self.coeffs(a).iter().fold(0u64, |acc, &c| acc * self.inner.p + c)
    }

    /// The first `count` nonzero elements of the canonical enumeration.
    pub fn nonzero_elements(&self, count: usize) -> Result<Vec<Fel>> {
        if count as u64 > self.inner.q - 1 {
            return Err(Error::FieldTooSmall(format!(
                "{self:?} has {} nonzero elements, {count} distinct points needed",
                self.inner.q - 1
            )));
        }
        Ok((1..=count as u64).map(|i| self.nth_element(i)).collect())
    }

    /// Exact multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Fel) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let mut ord = self.inner.q - 1;
        for &f in &self.inner.group_primes {
            while ord.is_multiple_of(f) && self.pow(a, ord / f) == Fel::ONE {
                ord /= f;
            }
        }
        ord
    }

    /// First element of the canonical enumeration whose order is at least `min_order`.
    pub fn find_element_of_order(&self, min_order: u128) -> Result<Fel> {
        let group = self.inner.q - 1;
        if min_order > group as u128 {
            return Err(Error::OrderUnreachable { min_order, group_order: group });
        }
        let found = (1..self.inner.q)
            .map(|i| self.nth_element(i))
            .find(|&a| self.multiplicative_order(a) as u128 >= min_order)
            .expect("a generator of the cyclic group qualifies");
        Ok(found)
    }

    /// A copy of this context with the distinguished element recorded.
    pub fn with_generator(&self, min_order: u128) -> Result<FieldCtx> {
        let g = self.find_element_of_order(min_order)?;
        let ord = self.multiplicative_order(g);
        let mut inner = Inner {
            p: self.inner.p,
            k: self.inner.k,
            q: self.inner.q,
            modulus: self.inner.modulus.clone(),
            pw: self.inner.pw.clone(),
            group_primes: self.inner.group_primes.clone(),
            generator: Some((g, ord)),
            tables: None,
        };
        if let Some(t) = &self.inner.tables {
            inner.tables =
                Some(Tables { exp: t.exp.clone(), log: t.log.clone(), add: t.add.clone() });
        }
        Ok(FieldCtx { inner: Arc::new(inner) })
    }

    /// The recorded generator if its order suffices, otherwise the canonical search.
    /// Fails with `FieldTooSmall` when no element of that order exists.
    pub fn generator_for(&self, min_order: u128) -> Result<Fel> {
        if let Some((g, ord)) = self.inner.generator {
            if ord as u128 >= min_order {
                return Ok(g);
            }
        }
        self.find_element_of_order(min_order).map_err(|_| {
            Error::FieldTooSmall(format!(
                "{self:?} has no element of order >= {min_order}; use an extension"
            ))
        })
    }

    /// Matrix of `x -> a*x` over the prime field in the power basis.
    pub fn embed_as_matrix(&self, a: Fel) -> Matrix {
        let k = self.inner.k;
        let mut m = Matrix::zeros(k, k);
        let mut basis = Fel::ONE;
        let x = if k > 1 { Fel(self.inner.p) } else { Fel::ONE };
        for col in 0..k {
            let prod = self.coeffs(self.mul(a, basis));
            for (row, c) in prod.into_iter().enumerate() {
                m[(row, col)] = Fel(c);
            }
            basis = self.mul(basis, x);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(0..self.inner.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(1..self.inner.q))
    }

    /// True if `a` is a valid packed element of this field.
    pub fn contains_element(&self, a: Fel) -> bool {
        a.0 < self.inner.q
    }

    /// True if `a` lies in the prime subfield.
    pub fn in_base(&self, a: Fel) -> bool {
        a.0 < self.inner.p
    }

    // ---- serialization ----

    pub fn format_elem(&self, a: Fel) -> String {
        if self.inner.k == 1 {
            return a.0.to_string();
        }
        self.coeffs(a).iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn parse_elem(&self, s: &str) -> Result<Fel> {
        let parts: std::result::Result<Vec<u64>, _> = s.split(',').map(str::parse::<u64>).collect();
        let parts =
            parts.map_err(|e| Error::Parse { line: 0, msg: format!("bad element {s:?}: {e}") })?;
        self.from_coeffs(&parts)
    }

    /// `field p=<p> k=<k> mod=<c0,...,ck>` with `mod` omitted for prime fields.
    pub fn header(&self) -> String {
        let i = &*self.inner;
        if i.k == 1 {
            format!("field p={} k=1", i.p)
        } else {
            let m: Vec<String> = i.modulus.iter().map(u64::to_string).collect();
            format!("field p={} k={} mod={}", i.p, i.k, m.join(","))
        }
    }

    pub fn parse_header(line: &str) -> Result<FieldCtx> {
        let bad = |msg: &str| Error::Parse { line: 1, msg: msg.to_string() };
        let mut words = line.split_whitespace();
        if words.next() != Some("field") {
            return Err(bad("expected a field header"));
        }
        let (mut p, mut k, mut modulus) = (None, None, None);
        for w in words {
            let (key, val) = w.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key {
                "p" => p = Some(val.parse::<u64>().map_err(|_| bad("bad p"))?),
                "k" => k = Some(val.parse::<usize>().map_err(|_| bad("bad k"))?),
                "mod" => {
                    let v: std::result::Result<Vec<u64>, _> =
                        val.split(',').map(str::parse).collect();
                    modulus = Some(v.map_err(|_| bad("bad modulus"))?);
                }
                _ => return Err(bad("unknown key in field header")),
            }
        }
        let p = p.ok_or_else(|| bad("missing p"))?;
        let k = k.ok_or_else(|| bad("missing k"))?;
        match (k, modulus) {
            (1, None) => FieldCtx::prime(p),
            (k, Some(m)) if m.len() == k + 1 && k >= 2 => FieldCtx::with_modulus(p, &m),
            _ => Err(bad("degree and modulus disagree")),
        }
    }
}

fn checked_pow(p: u64, k: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
    }
    (acc < 1 << 63).then_some(acc)
}

/// Integer `b^e` as a `u128`, saturating at `u128::MAX`.
pub(crate) fn pow_u128(b: u128, e: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(b);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn prime_construction() {
        assert_eq!(f(7).order(), 7);
        assert_eq!(f(2).order(), 2);
        assert!(matches!(FieldCtx::prime(6), Err(Error::CompositeCharacteristic(6))));
        assert!(FieldCtx::prime(1).is_err());
    }

    #[test]
    fn least_irreducible_moduli() {
        assert_eq!(f(2).extension(2).unwrap().modulus().unwrap(), &[1, 1, 1]);
        assert_eq!(f(3).extension(2).unwrap().modulus().unwrap(), &[1, 0, 1]);
        assert!(f(2).extension(0).is_err());
        assert_eq!(f(2).extension(1).unwrap(), f(2));
    }

    #[test]
    fn orders_of_small_examples() {
        assert_eq!(f(5).find_element_of_order(4).unwrap(), Fel(2));
        assert_eq!(f(7).find_element_of_order(6).unwrap(), Fel(3));
        assert_eq!(f(11).find_element_of_order(1).unwrap(), Fel::ONE);
        assert!(matches!(f(7).find_element_of_order(7), Err(Error::OrderUnreachable { .. })));
    }

    #[test]
    fn gf4_multiplication_by_x() {
        let k = f(2).extension(2).unwrap();
        let x = k.from_coeffs(&[0, 1]).unwrap();
        let m = k.embed_as_matrix(x);
        assert_eq!(m[(0, 0)], Fel(0));
        assert_eq!(m[(0, 1)], Fel(1));
        assert_eq!(m[(1, 0)], Fel(1));
        assert_eq!(m[(1, 1)], Fel(1));
    }

    #[test]
    fn header_roundtrip() {
        let k = f(3).extension(3).unwrap();
        let back = FieldCtx::parse_header(&k.header()).unwrap();
        assert_eq!(back, k);
        let a = k.from_coeffs(&[2, 0, 1]).unwrap();
        assert_eq!(k.parse_elem(&k.format_elem(a)).unwrap(), a);
    }
}
