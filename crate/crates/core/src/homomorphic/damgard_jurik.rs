// SPDX-License-Identifier: Apache-2.0

//! Damgård–Jurik arithmetic over `Z_{N^{s+1}}`.
//!
//! `E_s(m; r) = (1+N)^m · r^{N^s} mod N^{s+1}` for `m < N^s`. With `s = 1`
//! this is Paillier. The vector commitment uses higher `s` so that a node
//! ciphertext can carry a whole child ciphertext as its plaintext.

use num_bigint_dig::{BigUint, ModInverse, RandBigInt, RandPrime};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DjPublic {
    n: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DjSecret {
    public: DjPublic,
    p: BigUint,
    q: BigUint,
    lambda: BigUint,
}

impl DjPublic {
    pub fn from_modulus(n: BigUint) -> Result<Self> {
        if n <= BigUint::from(2u32) || n.is_even() {
            return Err(Error::Domain(
                "modulus must be odd and greater than 2".into(),
            ));
        }
        Ok(DjPublic { n })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    /// `N^e`.
    pub fn n_pow(&self, e: u32) -> BigUint {
        num_traits::pow(self.n.clone(), e as usize)
    }

    /// Ciphertext modulus `N^{s+1}`.
    pub fn modulus(&self, s: u32) -> BigUint {
        self.n_pow(s + 1)
    }

    /// `(1+N)^m mod N^{s+1}`.
    pub fn one_plus_n_pow(&self, m: &BigUint, s: u32) -> BigUint {
        self.level(s).one_plus_n_pow(m)
    }

    /// Precomputed powers of `N` for repeated work at one exponent `s`.
    pub fn level(&self, s: u32) -> DjLevel {
        let plain_mod = self.n_pow(s);
        let modulus = &plain_mod * &self.n;
        let small = match (self.n.to_u64(), plain_mod.to_u64(), modulus.to_u64()) {
            (Some(n), Some(p), Some(m)) => Some(SmallLevel {
                n,
                plain_mod: p,
                modulus: m,
            }),
            _ => None,
        };
        DjLevel {
            n: self.n.clone(),
            s,
            plain_mod,
            modulus,
            small,
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        loop {
            let r = rng.gen_biguint_range(&BigUint::one(), &self.n);
            if r.gcd(&self.n).is_one() {
                return r;
            }
        }
    }

    pub fn encrypt_with(&self, m: &BigUint, r: &BigUint, s: u32) -> BigUint {
        let modulus = self.modulus(s);
        let blind = r.modpow(&self.n_pow(s), &modulus);
        (self.one_plus_n_pow(m, s) * blind) % &modulus
    }

    pub fn encrypt<R: Rng + ?Sized>(&self, m: &BigUint, s: u32, rng: &mut R) -> BigUint {
        let r = self.random_unit(rng);
        self.encrypt_with(m, &r, s)
    }

    pub fn add(&self, a: &BigUint, b: &BigUint, s: u32) -> BigUint {
        (a * b) % self.modulus(s)
    }

    /// Homomorphic choice between two plaintexts: given `cb = E_s(b)` with
    /// `b ∈ {0,1}`, returns a ciphertext of `b ? c1 : c0`. Both `c0` and `c1`
    /// must be below `N^s`.
    pub fn select(&self, cb: &BigUint, c0: &BigUint, c1: &BigUint, s: u32) -> BigUint {
        self.level(s).select(cb, c0, c1)
    }

    pub fn is_unit(&self, c: &BigUint, s: u32) -> bool {
        !c.is_zero() && c < &self.modulus(s) && c.gcd(&self.n).is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DjLevel {
    n: BigUint,
    s: u32,
    plain_mod: BigUint,
    modulus: BigUint,
    small: Option<SmallLevel>,
}

/// Machine-word copy of a level whose ciphertext modulus fits in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SmallLevel {
    n: u64,
    plain_mod: u64,
    modulus: u64,
}

impl SmallLevel {
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn select(self, cb: u64, c0: u64, c1: u64) -> u64 {
        let diff = (c1 + self.plain_mod - c0) % self.plain_mod;
        self.mul(self.pow(cb, diff), self.pow(1 + self.n, c0))
    }
}

impl DjLevel {
    pub fn exponent(&self) -> u32 {
        self.s
    }

    /// `N^s`, the plaintext modulus.
    pub fn plain_modulus(&self) -> &BigUint {
        &self.plain_mod
    }

    /// `N^{s+1}`, the ciphertext modulus.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Binomial expansion of `(1+N)^m`, which stops after `s + 1` terms
    /// because `N^{s+1} ≡ 0`.
    pub fn one_plus_n_pow(&self, m: &BigUint) -> BigUint {
        let mut acc = BigUint::one();
        let mut binom = BigUint::one();
        let mut n_k = BigUint::one();
        for k in 1..=self.s {
            let k_big = BigUint::from(k);
            if m < &k_big {
                break;
            }
            binom = binom * (m - &k_big + BigUint::one()) / &k_big;
            n_k *= &self.n;
            acc += &binom * &n_k;
        }
        acc % &self.modulus
    }

    /// Word-sized selection for moduli below `2^64`; `None` otherwise.
    pub fn select_u64(&self, cb: u64, c0: u64, c1: u64) -> Option<u64> {
        self.small.map(|small| small.select(cb, c0, c1))
    }

    pub fn select(&self, cb: &BigUint, c0: &BigUint, c1: &BigUint) -> BigUint {
        if let (Some(small), Some(b), Some(x), Some(y)) =
            (self.small, cb.to_u64(), c0.to_u64(), c1.to_u64())
        {
            return BigUint::from(small.select(b, x, y));
        }
        let diff = ((c1 + &self.plain_mod) - c0) % &self.plain_mod;
        (cb.modpow(&diff, &self.modulus) * self.one_plus_n_pow(c0)) % &self.modulus
    }
}

impl DjSecret {
    pub fn generate<R: Rng + ?Sized>(modulus_bits: usize, rng: &mut R) -> Result<Self> {
        if modulus_bits < 16 || !modulus_bits.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "modulus size {modulus_bits} must be even and at least 16 bits"
            )));
        }
        loop {
            let p = rng.gen_prime(modulus_bits / 2);
            let q = rng.gen_prime(modulus_bits / 2);
            if p == q {
                continue;
            }
            if let Ok(sk) = Self::from_primes(p, q) {
                return Ok(sk);
            }
        }
    }

    /// Builds a key from explicit primes. Requires `gcd(N, φ(N)) = 1`.
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self> {
        let one = BigUint::one();
        let n = &p * &q;
        let phi = (&p - &one) * (&q - &one);
        if p == q || !n.gcd(&phi).is_one() {
            return Err(Error::Domain("primes do not give a valid modulus".into()));
        }
        let lambda = (&p - &one).lcm(&(&q - &one));
        Ok(DjSecret {
            public: DjPublic::from_modulus(n)?,
            p,
            q,
            lambda,
        })
    }

    pub fn public(&self) -> &DjPublic {
        &self.public
    }

    pub fn primes(&self) -> (&BigUint, &BigUint) {
        (&self.p, &self.q)
    }

    /// Recovers `m` from a unit ciphertext. Fails on non-units, and for
    /// `s ≥ 2` when some `k ≤ s` has `k!` not invertible modulo `N` (only
    /// possible for toy moduli with tiny prime factors).
    pub fn decrypt(&self, c: &BigUint, s: u32) -> Result<BigUint> {
        let pk = &self.public;
        if !pk.is_unit(c, s) {
            return Err(Error::decode("ciphertext is not a unit of the ring"));
        }
        let u = c.modpow(&self.lambda, &pk.modulus(s));
        let scaled = self.dlog(&u, s)?;
        let plain_mod = pk.n_pow(s);
        let inv = mod_inv(&(&self.lambda % &plain_mod), &plain_mod)
            .ok_or_else(|| Error::decode("λ not invertible"))?;
        Ok((scaled * inv) % plain_mod)
    }

    /// Discrete log base `1+N` of `a = (1+N)^i mod N^{s+1}`.
    fn dlog(&self, a: &BigUint, s: u32) -> Result<BigUint> {
        let n = &self.public.n;
        let mut i = BigUint::zero();
        for j in 1..=s {
            let nj = self.public.n_pow(j);
            let a_j = a % (&nj * n);
            if (&a_j % n) != BigUint::one() {
                return Err(Error::decode("value is not a power of 1+N"));
            }
            let mut t1 = (a_j - BigUint::one()) / n % &nj;
            let mut t2 = i.clone();
            let mut i_run = i.clone();
            let mut fact = BigUint::one();
            let mut n_pow = BigUint::one();
            for k in 2..=j {
                i_run = (&i_run + &nj - BigUint::one()) % &nj;
                t2 = (&t2 * &i_run) % &nj;
                fact *= BigUint::from(k);
                n_pow *= n;
                let inv = mod_inv(&(&fact % &nj), &nj)
                    .ok_or_else(|| Error::decode("factorial not invertible modulo N"))?;
                let sub = (&t2 * &n_pow % &nj) * inv % &nj;
                t1 = (t1 + &nj - sub) % &nj;
            }
            i = t1;
        }
        Ok(i)
    }
}

pub(crate) fn mod_inv(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    a.clone().mod_inverse(m).and_then(|v| v.to_biguint())
}
