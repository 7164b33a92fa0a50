//! Integer helpers: exact square roots, factorization and divisors.
//!
//! Factorization runs trial division up to a fixed bound and then a
//! Brent-style Pollard rho whose starting points come from a seeded ChaCha
//! stream, so repeated runs produce identical output.

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Environment variable that overrides the rho seed.
pub const RHO_SEED_ENV: &str = "QUADTUPLE_RHO_SEED";
pub const DEFAULT_RHO_SEED: u64 = 0x5155_4144_5455_504c;
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegerError {
    #[error("cannot factorize {0}: argument must be positive")]
    NonPositive(BigInt),
    #[error("invalid {RHO_SEED_ENV} value {0:?}")]
    BadSeed(String),
}

/// Floor of the square root of a nonnegative integer.
///
/// Panics on negative input.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(n.sign() != Sign::Minus, "isqrt of negative number");
    n.sqrt()
}

/// Returns the nonnegative root when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    // Squares mod 64 fall in 12 classes; most non-squares exit here.
    let low = (n & BigInt::from(63u8)).to_u8().unwrap_or(0);
    if (0x0202_0212_0203_0213u64 >> low) & 1 == 0 {
        return None;
    }
    let root = n.sqrt();
    if &root * &root == *n {
        Some(root)
    } else {
        None
    }
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Primes repeated according to multiplicity.
    pub fn multiset(&self) -> Vec<BigUint> {
        self.factors
            .iter()
            .flat_map(|(p, e)| std::iter::repeat_n(p.clone(), *e as usize))
            .collect()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e < 2)
    }

    /// All positive divisors, sorted ascending.
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut divs = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let base_len = divs.len();
            let mut power = BigUint::one();
            for _ in 0..*e {
                power *= p;
                for i in 0..base_len {
                    let next = &divs[i] * &power;
                    divs.push(next);
                }
            }
        }
        divs.sort();
        divs
    }

    fn push(&mut self, p: BigUint) {
        match self.factors.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => self.factors.push((p, 1)),
        }
    }
}

/// Trial division followed by seeded Pollard rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorizer {
    pub seed: u64,
    pub trial_bound: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer {
            seed: DEFAULT_RHO_SEED,
            trial_bound: DEFAULT_TRIAL_BOUND,
        }
    }
}

impl Factorizer {
    pub fn with_seed(seed: u64) -> Self {
        Factorizer {
            seed,
            ..Factorizer::default()
        }
    }

    /// Default factorizer, with the seed taken from `QUADTUPLE_RHO_SEED`
    /// when that variable is set.
    pub fn from_env() -> Result<Self, IntegerError> {
        match std::env::var(RHO_SEED_ENV) {
            Ok(raw) => {
                let seed = raw
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| IntegerError::BadSeed(raw.clone()))?;
                Ok(Factorizer::with_seed(seed))
            }
            Err(_) => Ok(Factorizer::default()),
        }
    }

    pub fn factorize(&self, n: &BigInt) -> Result<Factorization, IntegerError> {
        let mut rest = match n.to_biguint() {
            Some(v) if !v.is_zero() => v,
            _ => return Err(IntegerError::NonPositive(n.clone())),
        };
        let mut out = Factorization::default();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let mut p = 2u64;
        while p <= self.trial_bound {
            if BigUint::from(p) * p > rest {
                break;
            }
            while (&rest % p).is_zero() {
                out.push(BigUint::from(p));
                rest /= p;
            }
            p += if p == 2 { 1 } else { 2 };
        }

        let mut stack = Vec::new();
        if !rest.is_one() {
            stack.push(rest);
        }
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if BigUint::from(p) * p > m || is_probable_prime(&m) {
                out.push(m);
                continue;
            }
            if let Some(root) = exact_sqrt_u(&m) {
                stack.push(root.clone());
                stack.push(root);
                continue;
            }
            let f = rho_brent(&m, &mut rng);
            stack.push(&m / &f);
            stack.push(f);
        }
        out.factors.sort();
        Ok(out)
    }

    pub fn divisors(&self, n: &BigInt) -> Result<Vec<BigInt>, IntegerError> {
        Ok(self
            .factorize(n)?
            .divisors()
            .into_iter()
            .map(BigInt::from)
            .collect())
    }

    pub fn is_square_free(&self, n: &BigInt) -> Result<bool, IntegerError> {
        Ok(self.factorize(n)?.is_square_free())
    }
}

/// Factorizes with the default seed and trial bound.
pub fn factorize(n: &BigInt) -> Result<Factorization, IntegerError> {
    Factorizer::default().factorize(n)
}

/// Sorted positive divisors of `n >= 1`.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>, IntegerError> {
    Factorizer::default().divisors(n)
}

/// Square-freeness of `|n|`; zero is not square-free.
pub fn is_square_free(n: &BigInt) -> bool {
    if n.is_zero() {
        return false;
    }
    let abs = n.magnitude().clone().into();
    Factorizer::default()
        .is_square_free(&abs)
        .expect("nonzero input")
}

fn exact_sqrt_u(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin over the first 13 prime bases. Deterministic below 3.3e24,
/// probabilistic beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u8);
    if *n < two {
        return false;
    }
    for &b in &MR_BASES {
        if *n == BigUint::from(b) {
            return true;
        }
        if (n % b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u8;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_1 >> s;
    'bases: for &b in &MR_BASES {
        let mut x = BigUint::from(b).modpow(&odd, n);
        if x.is_one() || x == n_minus_1 {
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

/// Finds a nontrivial factor of a composite odd `n`.
fn rho_brent(n: &BigUint, rng: &mut ChaCha8Rng) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u8);
    }
    let one = BigUint::one();
    let batch = 128u64;
    loop {
        let mut y = rng.gen_biguint_below(n);
        let c = rng.gen_biguint_range(&one, n);
        let step = |v: &BigUint| (v * v + &c) % n;

        let mut g = one.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if g == *n {
            // Batched product overshot; back up one step at a time.
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
    }
}
