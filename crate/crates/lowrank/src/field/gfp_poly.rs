//! Dense polynomials over a prime field, little-endian coefficient vectors.
//! Only what extension-field construction and inversion need.

#[inline]
pub(crate) fn mulm(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

#[inline]
pub(crate) fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn invm(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Some(t0.rem_euclid(p as i128) as u64)
}

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo `f` (f nonzero).
pub(crate) fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = invm(f[df], p).expect("nonzero leading coefficient");
    while r.len() > df {
        let top = r.len() - 1;
        let c = mulm(r[top], lead_inv, p);
        if c != 0 {
            for (i, &fi) in f.iter().enumerate() {
                let idx = top - df + i;
                r[idx] = subm(r[idx], mulm(c, fi, p), p);
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), f, p)
}

pub(crate) fn powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, f, p);
        }
        b = mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| subm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or irreducibility test: f of degree k is irreducible iff
/// gcd(x^{p^i} - x, f) = 1 for every i <= k/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 0..k / 2 {
        h = powmod(&h, p, f, p);
        let g = gcd(&sub(&h, &x, p), f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Inverse of a nonzero `a` modulo irreducible `f`.
pub(crate) fn inv_mod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = rem(a, f, p);
    if r1.is_empty() {
        return None;
    }
    let mut t0: Vec<u64> = Vec::new();
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
    }
    // r0 is a nonzero constant since f is irreducible
    if r0.len() != 1 {
        return None;
    }
    let c = invm(r0[0], p)?;
    let out: Vec<u64> = t0.iter().map(|&t| mulm(t, c, p)).collect();
    Some(rem(&out, f, p))
}

pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = invm(b[db], p).expect("nonzero divisor");
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = mulm(r[top], lead_inv, p);
        q[top - db] = c;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let idx = top - db + i;
                r[idx] = subm(r[idx], mulm(c, bi, p), p);
            }
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}
