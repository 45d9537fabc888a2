//! AES-128 wrappers: the raw block primitive, authenticated encryption (AES
//! counter mode with a GHASH tag) and the 8-byte SYN authentication token.

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes128;
use aes_gcm::aead::Aead;
use aes_gcm::{Aes128Gcm, Nonce};
use rand::Rng;

use crate::error::CryptoError;
use crate::types::NodeId;

pub type SessionKey = [u8; 16];

pub const NONCE_BYTES: usize = 12;
pub const TAG_BYTES: usize = 16;

pub fn aes_block_encrypt(key: &SessionKey, block: &[u8; 16]) -> [u8; 16] {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let mut b = GenericArray::clone_from_slice(block);
    cipher.encrypt_block(&mut b);
    b.into()
}

/// Encrypts under a fresh random nonce. Output is `nonce || ciphertext || tag`.
pub fn symmetric_encrypt<R: Rng + ?Sized>(key: &SessionKey, plaintext: &[u8], rng: &mut R) -> Vec<u8> {
    let cipher = Aes128Gcm::new(GenericArray::from_slice(key));
    let mut nonce = [0u8; NONCE_BYTES];
    rng.fill(&mut nonce);
    let body = cipher
        .encrypt(Nonce::from_slice(&nonce), plaintext)
        .expect("in-memory AES-GCM encryption cannot fail");
    let mut out = Vec::with_capacity(NONCE_BYTES + body.len());
    out.extend_from_slice(&nonce);
    out.extend_from_slice(&body);
    out
}

/// Verifies the tag, then decrypts.
pub fn symmetric_decrypt(key: &SessionKey, sealed: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if sealed.len() < NONCE_BYTES + TAG_BYTES {
        return Err(CryptoError::Truncated);
    }
    let (nonce, body) = sealed.split_at(NONCE_BYTES);
    let cipher = Aes128Gcm::new(GenericArray::from_slice(key));
    cipher
        .decrypt(Nonce::from_slice(nonce), body)
        .map_err(|_| CryptoError::AuthenticationFailed)
}

/// Token a member attaches to control frames while its cluster is in
/// authentication mode: the first 8 bytes of `AES_k(cycle || id)`.
pub fn syn_token(key: &SessionKey, claimed: NodeId, cycle_index: u64) -> [u8; 8] {
    let mut block = [0u8; 16];
    block[..8].copy_from_slice(&cycle_index.to_be_bytes());
    block[8..12].copy_from_slice(&claimed.0.to_be_bytes());
    let out = aes_block_encrypt(key, &block);
    let mut token = [0u8; 8];
    token.copy_from_slice(&out[..8]);
    token
}
