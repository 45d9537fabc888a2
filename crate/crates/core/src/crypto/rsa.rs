//! Textbook RSA: key generation from two primes, encryption and decryption
//! by modular exponentiation. No padding.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use super::bigmath::{is_probable_prime, mod_inverse, mod_pow, random_prime};
use crate::error::CryptoError;

/// Default public exponent.
pub const DEFAULT_PUBLIC_EXPONENT: u32 = 65537;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    pub modulus: BigUint,
    pub exponent: BigUint,
}

/// Full key pair. Only the base station ever holds one of these; sensor
/// nodes get the [`RsaPublicKey`] half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaKeyPair {
    pub modulus: BigUint,
    pub public_exponent: BigUint,
    pub private_exponent: BigUint,
    pub prime_s: BigUint,
    pub prime_r: BigUint,
    pub totient: BigUint,
}

impl RsaKeyPair {
    pub fn public(&self) -> RsaPublicKey {
        RsaPublicKey { modulus: self.modulus.clone(), exponent: self.public_exponent.clone() }
    }

    /// Decryption through the two prime factors; same result as
    /// [`rsa_decrypt`], roughly four times cheaper.
    pub fn decrypt_crt(&self, ciphertext: &BigUint) -> Result<BigUint, CryptoError> {
        if *ciphertext >= self.modulus {
            return Err(CryptoError::MessageTooLarge);
        }
        let (p, q) = (&self.prime_s, &self.prime_r);
        let dp = &self.private_exponent % (p - 1u32);
        let dq = &self.private_exponent % (q - 1u32);
        let q_inv = mod_inverse(q, p).expect("distinct primes are coprime");
        let m1 = mod_pow(ciphertext, &dp, p);
        let m2 = mod_pow(ciphertext, &dq, q);
        let diff = (&m1 + p - (&m2 % p)) % p;
        let h = (&q_inv * diff) % p;
        Ok(m2 + h * q)
    }
}

/// Builds a key pair from primes `s`, `r` and public exponent `e`.
pub fn rsa_keygen<R: Rng + ?Sized>(s: &BigUint, r: &BigUint, e: &BigUint, rng: &mut R) -> Result<RsaKeyPair, CryptoError> {
    if s == r {
        return Err(CryptoError::EqualPrimes);
    }
    for p in [s, r] {
        if !is_probable_prime(p, 32, rng) {
            return Err(CryptoError::NotPrime(p.to_string()));
        }
    }
    let modulus = s * r;
    let totient = (s - 1u32) * (r - 1u32);
    if *e <= BigUint::one() || *e >= totient {
        return Err(CryptoError::ExponentOutOfRange);
    }
    if !e.gcd(&totient).is_one() {
        return Err(CryptoError::ExponentNotCoprime);
    }
    let private_exponent = mod_inverse(e, &totient).ok_or(CryptoError::ExponentNotCoprime)?;
    Ok(RsaKeyPair {
        modulus,
        public_exponent: e.clone(),
        private_exponent,
        prime_s: s.clone(),
        prime_r: r.clone(),
        totient,
    })
}

/// Draws fresh primes of `prime_bits` bits until `e` is coprime with the
/// totient.
pub fn generate_keypair<R: Rng + ?Sized>(prime_bits: u64, e: &BigUint, rng: &mut R) -> RsaKeyPair {
    loop {
        let s = random_prime(prime_bits, rng);
        let r = random_prime(prime_bits, rng);
        if let Ok(pair) = rsa_keygen(&s, &r, e, rng) {
            return pair;
        }
    }
}

/// `M^e mod m`.
pub fn rsa_encrypt(message: &BigUint, key: &RsaPublicKey) -> Result<BigUint, CryptoError> {
    if *message >= key.modulus {
        return Err(CryptoError::MessageTooLarge);
    }
    Ok(mod_pow(message, &key.exponent, &key.modulus))
}

/// `C^d mod m`.
pub fn rsa_decrypt(ciphertext: &BigUint, private_exponent: &BigUint, modulus: &BigUint) -> Result<BigUint, CryptoError> {
    if *ciphertext >= *modulus {
        return Err(CryptoError::MessageTooLarge);
    }
    Ok(mod_pow(ciphertext, private_exponent, modulus))
}
