use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_TRIAL_DIVISION_BOUND: u64 = 1_000_000;

static TRIAL_BOUND: AtomicU64 = AtomicU64::new(DEFAULT_TRIAL_DIVISION_BOUND);

/// Caps the factoring effort spent on a single integer. Trial division runs up
/// to `min(bound, 2^16)`; the remaining cofactor gets at most `bound` rho
/// iterations before [`Error::FactorBoundExceeded`] is raised.
pub fn set_trial_division_bound(bound: u64) {
    TRIAL_BOUND.store(bound.max(2), Ordering::Relaxed);
}

pub fn trial_division_bound() -> u64 {
    TRIAL_BOUND.load(Ordering::Relaxed)
}

/// Prime factorization of |n| as prime -> exponent.
pub type Factorization = BTreeMap<BigInt, u32>;

const MR_BASES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Miller-Rabin with the first 16 prime bases; deterministic below 3.3e24.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn is_prime_u64(n: u64) -> bool {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    for &p in &MR_BASES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow(a as u64, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt, budget: u64) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let one = BigInt::one();
    let mut spent = 0u64;
    for c in 1u32..=20 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                spent += m.min(r);
            }
            r *= 2;
            if spent > budget {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

const CACHE_LIMIT: usize = 4096;

thread_local! {
    static CACHE: RefCell<HashMap<BigInt, Factorization>> = RefCell::new(HashMap::new());
}

/// Factors |n| for nonzero `n`. Effort is capped by [`trial_division_bound`].
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    assert!(!n.is_zero(), "factorize called on zero");
    let m = n.abs();
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&m).cloned()) {
        return Ok(hit);
    }
    let out = factorize_uncached(m.clone())?;
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(m, out.clone());
    });
    Ok(out)
}

fn factorize_uncached(mut m: BigInt) -> Result<Factorization> {
    let bound = trial_division_bound();
    let mut out = Factorization::new();
    let trial_limit = bound.min(1 << 16);
    let mut d = 2u64;
    while d <= trial_limit {
        if let Some(mut small) = m.to_u128() {
            while d <= trial_limit && (d as u128) * (d as u128) <= small {
                while small % d as u128 == 0 {
                    small /= d as u128;
                    *out.entry(BigInt::from(d)).or_insert(0) += 1;
                }
                d += if d == 2 { 1 } else { 2 };
            }
            m = BigInt::from(small);
            break;
        }
        let dd = BigInt::from(d);
        while (&m % &dd).is_zero() {
            m /= &dd;
            *out.entry(dd.clone()).or_insert(0) += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if !m.is_one() {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        if is_prime(&c) {
            *out.entry(c).or_insert(0) += 1;
            continue;
        }
        // Trial division already proved c has no factor below d.
        if c.to_u64().is_some_and(|v| v < d.saturating_mul(d)) {
            *out.entry(c).or_insert(0) += 1;
            continue;
        }
        let s = c.sqrt();
        if &s * &s == c {
            stack.push(s.clone());
            stack.push(s);
            continue;
        }
        match pollard_brent(&c, bound) {
            Some(f) => {
                let g = &c / &f;
                stack.push(f);
                stack.push(g);
            }
            None => return Err(Error::FactorBoundExceeded { n: c, bound }),
        }
    }
    Ok(out)
}
