//! Square-residue identification.
//!
//! The base station publishes `F = P^2 mod G` for every registered node. A
//! verifier that holds `(G, F)` runs `k` commit/challenge/response rounds; a
//! prover without `P` survives each round with probability at most 1/2.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;

use super::bigmath::{mod_inverse, mod_pow};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentificationMaterial {
    pub secret: BigUint,
    pub modulus: BigUint,
    pub published: BigUint,
}

impl IdentificationMaterial {
    /// `None` unless `1 <= secret < modulus`.
    pub fn new(secret: BigUint, modulus: BigUint) -> Option<Self> {
        if secret.is_zero() || secret >= modulus {
            return None;
        }
        let published = &secret * &secret % &modulus;
        Some(Self { secret, modulus, published })
    }

    /// Draws `P` uniformly from `[2, G)` and retries until it is invertible.
    pub fn random(modulus: &BigUint, rng: &mut dyn RngCore) -> Self {
        let two = BigUint::from(2u32);
        loop {
            let p = rng.gen_biguint_range(&two, modulus);
            if mod_inverse(&p, modulus).is_some() {
                return Self::new(p, modulus.clone()).expect("in range by construction");
            }
        }
    }

    pub fn public_part(&self) -> (BigUint, BigUint) {
        (self.modulus.clone(), self.published.clone())
    }
}

pub trait Prover {
    /// Commitment `t` for a new round.
    fn commit(&mut self, rng: &mut dyn RngCore) -> BigUint;
    /// Answer `z` to challenge bit `b`.
    fn respond(&mut self, challenge: bool) -> BigUint;
}

/// Knows `P`.
pub struct HonestProver {
    material: IdentificationMaterial,
    nonce: BigUint,
}

impl HonestProver {
    pub fn new(material: IdentificationMaterial) -> Self {
        Self { material, nonce: BigUint::zero() }
    }
}

impl Prover for HonestProver {
    fn commit(&mut self, rng: &mut dyn RngCore) -> BigUint {
        let g = &self.material.modulus;
        self.nonce = rng.gen_biguint_range(&BigUint::one(), g);
        &self.nonce * &self.nonce % g
    }

    fn respond(&mut self, challenge: bool) -> BigUint {
        let g = &self.material.modulus;
        if challenge {
            &self.nonce * &self.material.secret % g
        } else {
            self.nonce.clone()
        }
    }
}

/// Commits honestly but answers with noise.
pub struct RandomResponder {
    modulus: BigUint,
    rng_state: BigUint,
}

impl RandomResponder {
    pub fn new(modulus: BigUint) -> Self {
        Self { modulus, rng_state: BigUint::zero() }
    }
}

impl Prover for RandomResponder {
    fn commit(&mut self, rng: &mut dyn RngCore) -> BigUint {
        let s = rng.gen_biguint_range(&BigUint::one(), &self.modulus);
        self.rng_state = rng.gen_biguint_range(&BigUint::one(), &self.modulus);
        &s * &s % &self.modulus
    }

    fn respond(&mut self, _challenge: bool) -> BigUint {
        self.rng_state.clone()
    }
}

/// Best strategy without `P`: guess the challenge in advance and prepare a
/// commitment that passes for exactly that bit.
pub struct GuessingCheater {
    modulus: BigUint,
    published_inv: BigUint,
    guess: bool,
    nonce: BigUint,
}

impl GuessingCheater {
    pub fn new(modulus: BigUint, published: &BigUint) -> Self {
        let published_inv = mod_inverse(published, &modulus).unwrap_or_else(BigUint::one);
        Self { modulus, published_inv, guess: false, nonce: BigUint::zero() }
    }
}

impl Prover for GuessingCheater {
    fn commit(&mut self, rng: &mut dyn RngCore) -> BigUint {
        self.guess = rng.next_u32() & 1 == 1;
        self.nonce = rng.gen_biguint_range(&BigUint::one(), &self.modulus);
        let sq = &self.nonce * &self.nonce % &self.modulus;
        if self.guess {
            // t = z^2 / F, so that answering z passes the b = 1 check.
            sq * &self.published_inv % &self.modulus
        } else {
            sq
        }
    }

    fn respond(&mut self, _challenge: bool) -> BigUint {
        self.nonce.clone()
    }
}

/// One verification round.
pub fn verify_round(modulus: &BigUint, published: &BigUint, commit: &BigUint, challenge: bool, response: &BigUint) -> bool {
    if commit.is_zero() || commit >= modulus || response >= modulus {
        return false;
    }
    let lhs = response * response % modulus;
    let rhs = if challenge { commit * published % modulus } else { commit.clone() };
    lhs == rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentificationResult {
    pub accepted: bool,
    /// Rounds actually played; the verifier stops at the first failure.
    pub rounds_run: u32,
}

pub fn run_identification(
    prover: &mut dyn Prover,
    modulus: &BigUint,
    published: &BigUint,
    rounds: u32,
    rng: &mut dyn RngCore,
) -> IdentificationResult {
    if rounds == 0 || modulus <= &BigUint::one() {
        return IdentificationResult { accepted: false, rounds_run: 0 };
    }
    for i in 0..rounds {
        let t = prover.commit(rng);
        let b = rng.next_u32() & 1 == 1;
        let z = prover.respond(b);
        if !verify_round(modulus, published, &t, b, &z) {
            return IdentificationResult { accepted: false, rounds_run: i + 1 };
        }
    }
    IdentificationResult { accepted: true, rounds_run: rounds }
}

/// Accepts iff all `rounds` rounds verify.
pub fn fs_identify(prover: &mut dyn Prover, modulus: &BigUint, published: &BigUint, rounds: u32, rng: &mut dyn RngCore) -> bool {
    run_identification(prover, modulus, published, rounds, rng).accepted
}

/// `F` recomputed the slow way, for cross-checks.
pub fn published_square(secret: &BigUint, modulus: &BigUint) -> BigUint {
    mod_pow(secret, &BigUint::from(2u32), modulus)
}
