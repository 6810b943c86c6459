// SPDX-License-Identifier: Apache-2.0

//! Anonymous steganography over a public set of documents.
//!
//! A leaker encodes a secret into one pseudorandom document, posts it among
//! many others, and extracts a short decoding key. Applying that key to the
//! whole document set recovers the secret without pointing at the document
//! that carried it. The [`scheme`] module holds the construction; it is built
//! from a bitwise PRF stream cipher ([`prf`]), a homomorphic encryption of the
//! leaker's index ([`homomorphic`]), a somewhere-statistically-binding vector
//! commitment ([`vc`]) and an obfuscated decode circuit ([`obfuscation`]).
//!
//! The second half of the crate is the adversary side: [`reactive`] models
//! schemes where the leaker posts adaptively over many rounds, and
//! [`detector`] implements a Monte-Carlo multiplicative-factor test that
//! identifies the leaker whenever the anonymous key is too short.
//!
//! None of the reference instantiations provide real secrecy. The obfuscator
//! is an identity wrapper and the "transparent" HE carries its own key in the
//! public key; both are flagged `insecure` in their serialized forms.

pub mod bits;
pub mod cli;
pub mod detector;
pub mod error;
pub mod homomorphic;
pub mod obfuscation;
pub mod prf;
pub mod reactive;
pub mod rng;
pub mod scheme;
pub mod ser;
pub mod stats;
pub mod vc;

pub use bits::BitString;
pub use error::{Error, Result};
