//! Modular arithmetic over arbitrary-precision integers.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

/// `base^exp mod modulus`, left-to-right square-and-multiply over 4-bit
/// windows of the exponent.
pub fn mod_pow(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> BigUint {
    assert!(!modulus.is_zero(), "modulus must be non-zero");
    if modulus.is_one() {
        return BigUint::zero();
    }
    const W: u64 = 4;
    let b = base % modulus;
    if exp.bits() <= 64 {
        // Short exponents (such as 65537) do not amortise the window table.
        let mut acc = BigUint::one();
        for i in (0..exp.bits()).rev() {
            acc = &acc * &acc % modulus;
            if exp.bit(i) {
                acc = &acc * &b % modulus;
            }
        }
        return acc;
    }
    // table[i] = b^i mod modulus
    let mut table = Vec::with_capacity(1 << W);
    table.push(BigUint::one());
    for i in 1..(1usize << W) {
        let next = &table[i - 1] * &b % modulus;
        table.push(next);
    }
    let bits = exp.bits();
    let windows = bits.div_ceil(W);
    let mut acc = BigUint::one();
    for w in (0..windows).rev() {
        if w + 1 != windows {
            for _ in 0..W {
                acc = &acc * &acc % modulus;
            }
        }
        let mut digit = 0usize;
        for j in (0..W).rev() {
            digit = (digit << 1) | usize::from(exp.bit(w * W + j));
        }
        if digit != 0 {
            acc = &acc * &table[digit] % modulus;
        }
    }
    acc % modulus
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_zero() {
        return None;
    }
    let ai = BigInt::from_biguint(Sign::Plus, a % m);
    let mi = BigInt::from_biguint(Sign::Plus, m.clone());
    let (g, x, _) = extended_gcd(&ai, &mi);
    if !g.is_one() {
        return None;
    }
    let x = x.mod_floor(&mi);
    x.to_biguint()
}

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103,
    107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251,
];

/// Miller-Rabin with `rounds` random bases after trial division.
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rounds: u32, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = mod_pow(&a, &d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits (top two bits set so products of
/// two such primes have exactly `2 * bits` bits).
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 8, "prime size too small");
    loop {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        c.set_bit(bits - 2, true);
        c.set_bit(0, true);
        if is_probable_prime(&c, 32, rng) {
            return c;
        }
    }
}
