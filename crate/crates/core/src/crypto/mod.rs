//! Cryptographic building blocks of the defense.

pub mod bigmath;
pub mod ident;
pub mod interlock;
pub mod rsa;
pub mod symmetric;

pub use ident::{fs_identify, GuessingCheater, HonestProver, IdentificationMaterial, Prover, RandomResponder};
pub use interlock::{interlock_exchange, join_key, split_key, InterlockOutcome, InterlockSession, InterlockState};
pub use rsa::{rsa_decrypt, rsa_encrypt, rsa_keygen, RsaKeyPair, RsaPublicKey};
pub use symmetric::{symmetric_decrypt, symmetric_encrypt, SessionKey};
