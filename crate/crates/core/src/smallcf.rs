//! Machine-integer Euclid helpers for the hot search loops. These duplicate
//! the semantics of `cf::cf_expand` for `u64` ranges where allocation would
//! dominate.

/// Partial quotients of a/q (0 < a < q, coprime).
pub fn quotients_u64(a: u64, q: u64) -> Vec<u64> {
    let (mut x, mut y) = (q, a);
    let mut out = Vec::new();
    while y != 0 {
        let c = x / y;
        out.push(c);
        let r = x - c * y;
        x = y;
        y = r;
    }
    out
}

/// Max partial quotient of a/q.
pub fn max_quotient_u64(a: u64, q: u64) -> u64 {
    let (mut x, mut y) = (q, a);
    let mut m = 0;
    while y != 0 {
        let c = x / y;
        if c > m {
            m = c;
        }
        let r = x - c * y;
        x = y;
        y = r;
    }
    m
}

/// Max partial quotient, bailing out with None as soon as it exceeds `cap`.
pub fn max_quotient_capped(a: u64, q: u64, cap: u64) -> Option<u64> {
    let (mut x, mut y) = (q, a);
    let mut m = 0;
    while y != 0 {
        let c = x / y;
        if c > cap {
            return None;
        }
        if c > m {
            m = c;
        }
        let r = x - c * y;
        x = y;
        y = r;
    }
    Some(m)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Deterministic Miller-Rabin, exact for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of a mod m for gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        old_r -= quot * r;
        std::mem::swap(&mut old_r, &mut r);
        old_s -= quot * s;
        std::mem::swap(&mut old_s, &mut s);
    }
    if old_r != 1 {
        return None;
    }
    let mut v = old_s % m as i128;
    if v < 0 {
        v += m as i128;
    }
    Some(v as u64)
}
