// SPDX-License-Identifier: Apache-2.0

//! Somewhere-statistically-binding tree from Damgård–Jurik selection.
//!
//! Leaves are blocks read as integers below `2^block_bits ≤ N^{s0}`. The
//! combiner at level `l ≥ 1` works in `Z_{N^{s_l+1}}` with `s_l = s0 + l - 1`
//! and returns `select(E_{s_l}(b_l), left, right)`, where `b_l` is bit `l-1`
//! of the hidden leaf position. A node at level `l` is below `N^{s_l+1} =
//! N^{s_{l+1}}`, so it fits as a plaintext one level up, and the root
//! decrypts (under the discarded factorisation) to the block at the hidden
//! position. When `gcd(N, φ(N)) = 1` that decryption is unique, which is the
//! statistical binding.

use num_bigint_dig::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::homomorphic::damgard_jurik::{DjLevel, DjPublic, DjSecret};
use crate::homomorphic::modulus_bits;
use crate::ser::{biguint_to_fixed, byte_width, Reader, Writer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Key {
    dj: DjPublic,
    block_bits: usize,
    s0: u32,
    height: usize,
    selectors: Vec<BigUint>,
    levels: Vec<DjLevel>,
    widths: Vec<usize>,
    bounds: Vec<BigUint>,
}

/// Capacity leaves one padding slot free even when `length` is a power of two,
/// so binding index 0 always has a dummy position to bind.
pub(super) fn capacity(length: usize) -> usize {
    (length + 1).next_power_of_two()
}

impl Key {
    pub(super) fn generate<R: Rng + ?Sized>(
        security: u32,
        length: usize,
        block_bits: usize,
        binding_index: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if !(16..=1024).contains(&security) || !security.is_multiple_of(8) {
            return Err(Error::UnsupportedSecurity(security));
        }
        let sk = DjSecret::generate(modulus_bits(security), rng)?;
        Self::with_modulus(sk.public().clone(), length, block_bits, binding_index, rng)
    }

    pub(super) fn with_modulus<R: Rng + ?Sized>(
        dj: DjPublic,
        length: usize,
        block_bits: usize,
        binding_index: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut key = Self::shape(dj, length, block_bits);
        let position = if binding_index == 0 {
            length
        } else {
            binding_index - 1
        };
        key.selectors = (1..=key.height)
            .map(|l| {
                let bit = BigUint::from(((position >> (l - 1)) & 1) as u32);
                key.dj.encrypt(&bit, key.level_exponent(l), rng)
            })
            .collect();
        Ok(key)
    }

    fn shape(dj: DjPublic, length: usize, block_bits: usize) -> Self {
        let height = capacity(length).trailing_zeros() as usize;
        let leaf_bound = BigUint::one() << block_bits;
        let mut s0 = 1;
        while dj.n_pow(s0) < leaf_bound {
            s0 += 1;
        }
        let mut bounds = vec![leaf_bound];
        for l in 1..=height {
            bounds.push(dj.modulus(s0 + l as u32 - 1));
        }
        let mut widths = vec![block_bits.div_ceil(8)];
        widths.extend(bounds[1..].iter().map(byte_width));
        let levels = (1..=height).map(|l| dj.level(s0 + l as u32 - 1)).collect();
        Key {
            dj,
            block_bits,
            s0,
            height,
            selectors: Vec::new(),
            levels,
            widths,
            bounds,
        }
    }

    pub fn modulus(&self) -> &DjPublic {
        &self.dj
    }

    /// Damgård–Jurik exponent `s_l` used by the combiner at `level ≥ 1`.
    pub fn level_exponent(&self, level: usize) -> u32 {
        self.s0 + level as u32 - 1
    }

    /// Exclusive upper bound on node values at `level` (0 = leaves).
    pub fn bound(&self, level: usize) -> &BigUint {
        &self.bounds[level]
    }

    pub(super) fn node_width(&self, level: usize) -> usize {
        self.widths[level]
    }

    pub fn leaf_value(block: &BitString) -> BigUint {
        let packed = BigUint::from_bytes_be(&block.to_bytes());
        packed >> (block.len().div_ceil(8) * 8 - block.len())
    }

    pub(super) fn leaf(&self, block: &BitString) -> Vec<u8> {
        biguint_to_fixed(&Self::leaf_value(block), self.widths[0])
    }

    /// Parent of two in-range children at `level ≥ 1`.
    pub fn combine_values(&self, level: usize, left: &BigUint, right: &BigUint) -> BigUint {
        self.levels[level - 1].select(&self.selectors[level - 1], left, right)
    }

    /// [`Self::combine_values`] on machine words, available when the level's
    /// modulus is below `2^64`. Used to enumerate toy parameter sets.
    pub fn combine_u64(&self, level: usize, left: u64, right: u64) -> Option<u64> {
        let sel = self.selectors[level - 1].to_u64()?;
        self.levels[level - 1].select_u64(sel, left, right)
    }

    pub(super) fn combine_bytes(&self, level: usize, left: &[u8], right: &[u8]) -> Option<Vec<u8>> {
        let width = self.widths[level - 1];
        if left.len() != width || right.len() != width {
            return None;
        }
        let bound = &self.bounds[level - 1];
        let (l, r) = (BigUint::from_bytes_be(left), BigUint::from_bytes_be(right));
        if &l >= bound || &r >= bound {
            return None;
        }
        Some(biguint_to_fixed(
            &self.combine_values(level, &l, &r),
            self.widths[level],
        ))
    }

    pub(super) fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(&self.dj.n().to_bytes_be());
        for (l, c) in self.selectors.iter().enumerate() {
            w.raw(&biguint_to_fixed(c, self.widths[l + 1]));
        }
        w.into_bytes()
    }

    pub(super) fn from_bytes(length: usize, block_bits: usize, bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let dj = DjPublic::from_modulus(BigUint::from_bytes_be(r.bytes()?))?;
        let mut key = Self::shape(dj, length, block_bits);
        for l in 1..=key.height {
            let c = BigUint::from_bytes_be(r.raw(key.widths[l])?);
            if !key.dj.is_unit(&c, key.level_exponent(l)) {
                return Err(Error::decode("selector is not a unit ciphertext"));
            }
            key.selectors.push(c);
        }
        r.finish()?;
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vc::{vc_gen_ssb_with_modulus, CommitTree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn capacity_always_has_padding() {
        assert_eq!(capacity(1), 2);
        assert_eq!(capacity(3), 4);
        assert_eq!(capacity(4), 8);
        assert_eq!(capacity(7), 8);
    }

    #[test]
    fn leaf_value_reads_bits_as_integer() {
        assert_eq!(
            Key::leaf_value(&BitString::parse("101").unwrap()),
            BigUint::from(5u32)
        );
        assert_eq!(
            Key::leaf_value(&BitString::parse("1000000001").unwrap()),
            BigUint::from(513u32)
        );
    }

    #[test]
    fn root_decrypts_to_bound_leaf() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let sk = DjSecret::generate(64, &mut rng).unwrap();
        let blocks: Vec<BitString> = (0..5).map(|_| BitString::random(40, &mut rng)).collect();
        for i in 0..=5 {
            let ck = vc_gen_ssb_with_modulus(sk.public().clone(), 5, 40, i, &mut rng).unwrap();
            let key = ck.ssb().unwrap();
            let tree = CommitTree::build(&ck, &blocks).unwrap();
            let mut value = BigUint::from_bytes_be(tree.commitment().root());
            for l in (1..=key.height).rev() {
                value = sk.decrypt(&value, key.level_exponent(l)).unwrap();
            }
            let expected = if i == 0 {
                BigUint::from(0u32)
            } else {
                Key::leaf_value(&blocks[i - 1])
            };
            assert_eq!(value, expected, "binding index {i}");
        }
    }

    #[test]
    fn toy_modulus_levels() {
        let dj = DjPublic::from_modulus(BigUint::from(15u32)).unwrap();
        let ck = vc_gen_ssb_with_modulus(dj, 4, 3, 2, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        let key = ck.ssb().unwrap();
        assert_eq!(key.height, 3);
        let bounds: Vec<u64> = (0..=3)
            .map(|l| num_traits::ToPrimitive::to_u64(key.bound(l)).unwrap())
            .collect();
        assert_eq!(bounds, vec![8, 225, 3375, 50625]);
    }

    #[test]
    fn word_combiner_matches_biguint_combiner() {
        let dj = DjPublic::from_modulus(BigUint::from(15u32)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let ck = vc_gen_ssb_with_modulus(dj, 4, 3, 3, &mut rng).unwrap();
        let key = ck.ssb().unwrap();
        for level in 1..=key.height {
            let bound = num_traits::ToPrimitive::to_u64(key.bound(level - 1)).unwrap();
            for _ in 0..200 {
                let (l, r) = (rng.gen_range(0..bound), rng.gen_range(0..bound));
                let big = key.combine_values(level, &BigUint::from(l), &BigUint::from(r));
                assert_eq!(
                    key.combine_u64(level, l, r).map(BigUint::from),
                    Some(big),
                    "level {level}"
                );
            }
        }
    }
}
