//! Chosen-plaintext attacks on golden and k-golden ciphers, and brute-force
//! search statistics for general unimodular keys.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cipher::CipherKey;
use crate::coding::{build_coding_matrix, SeedPair, UnimodularKeyMatrix};
use crate::Mat2;

/// Hidden-key encryption service: ciphertext only, no check numbers.
pub trait EncryptionOracle {
    fn query(&self, p: &Mat2) -> Mat2;
}

/// Oracle backed by a [`CipherKey`], counting queries.
#[derive(Debug)]
pub struct KeyOracle {
    key: CipherKey,
    queries: Cell<u64>,
}

impl KeyOracle {
    pub fn new(key: CipherKey) -> Self {
        KeyOracle { key, queries: Cell::new(0) }
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }
}

impl EncryptionOracle for KeyOracle {
    fn query(&self, p: &Mat2) -> Mat2 {
        self.queries.set(self.queries.get() + 1);
        p * self.key.coding_matrix().matrix()
    }
}

impl<F: Fn(&Mat2) -> Mat2> EncryptionOracle for F {
    fn query(&self, p: &Mat2) -> Mat2 {
        self(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackFailure {
    /// The leaked coding matrix is not a power of `Q` within the bound.
    NotGoldenOracle,
    /// No `[[k,1],[1,0]]ⁿ` within the bounds matches.
    NoMatchInBounds,
}

/// A recovered key, with the leaked matrix it was checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub k: u64,
    pub n: u64,
    pub leaked: Mat2,
    pub queries: u64,
}

/// Recovers `n` from a golden-cipher oracle with one query of the identity
/// plaintext. The top row `(Fₙ₊₁, Fₙ)` is matched against the Fibonacci
/// numbers; the whole leaked matrix must equal `Qⁿ`. `F₁ = F₂` makes
/// `n = 1` the smallest match for `(1, 1)`.
pub fn attack_golden(oracle: &dyn EncryptionOracle, n_max: u64) -> Result<Recovered, AttackFailure> {
    attack_k(oracle, 1, n_max).ok_or(AttackFailure::NotGoldenOracle)
}

/// Tries `k = 1..=k_max` in order and returns the first `(k, n)` match.
pub fn attack_k_golden(oracle: &dyn EncryptionOracle, k_max: u64, n_max: u64) -> Result<Recovered, AttackFailure> {
    let leaked = oracle.query(&Mat2::identity());
    (1..=k_max)
        .find_map(|k| match_k_power(&leaked, k, n_max))
        .ok_or(AttackFailure::NoMatchInBounds)
}

fn attack_k(oracle: &dyn EncryptionOracle, k: u64, n_max: u64) -> Option<Recovered> {
    let leaked = oracle.query(&Mat2::identity());
    match_k_power(&leaked, k, n_max)
}

/// Finds the smallest `n ≤ n_max` with `[[k,1],[1,0]]ⁿ = leaked`.
fn match_k_power(leaked: &Mat2, k: u64, n_max: u64) -> Option<Recovered> {
    let kk = BigInt::from(k);
    // (F_{n+1}, F_n) for the k-Fibonacci sequence F₀ = 0, F₁ = 1
    let (mut hi, mut lo) = (BigInt::one(), BigInt::zero());
    for n in 0..=n_max {
        if hi > leaked.a11 {
            return None;
        }
        if hi == leaked.a11 && lo == leaked.a12 {
            let prev = &hi - &kk * &lo;
            let candidate = Mat2::new(hi.clone(), lo.clone(), lo.clone(), prev);
            if &candidate == leaked {
                return Some(Recovered { k, n, leaked: leaked.clone(), queries: 1 });
            }
        }
        let next = &kk * &hi + &lo;
        lo = core::mem::replace(&mut hi, next);
    }
    None
}

/// Inclusive ranges for every key parameter; an empty range (`lo > hi`)
/// makes the box empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamBox {
    pub alpha: (u64, u64),
    pub beta: (u64, u64),
    pub gamma: (u64, u64),
    pub delta: (u64, u64),
    pub a0: (u64, u64),
    pub b0: (u64, u64),
    pub n: (u64, u64),
}

impl ParamBox {
    /// Only the golden key, `n` free.
    pub fn golden(n: (u64, u64)) -> Self {
        ParamBox { alpha: (1, 1), beta: (1, 1), gamma: (1, 1), delta: (0, 0), a0: (0, 0), b0: (1, 1), n }
    }

    /// Every matrix and seed parameter in `[0, side − 1]`.
    pub fn cube(side: u64, n: (u64, u64)) -> Self {
        let r = (0, side.saturating_sub(1));
        ParamBox { alpha: r, beta: r, gamma: r, delta: r, a0: r, b0: r, n }
    }

    fn span((lo, hi): (u64, u64)) -> u128 {
        if lo > hi {
            0
        } else {
            (hi - lo) as u128 + 1
        }
    }

    /// Raw size of the box before admissibility filtering.
    pub fn volume(&self) -> u128 {
        [self.alpha, self.beta, self.gamma, self.delta, self.a0, self.b0, self.n]
            .into_iter()
            .map(Self::span)
            .product()
    }
}

/// Enumeration cap for [`measure_unimodular_resistance`].
pub const MAX_CANDIDATES: u64 = 10_000_000;

/// Candidate counts from a brute-force search over a parameter box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResistanceReport {
    /// Admissible keys in the box (valid key matrix, non-singular seed).
    pub admissible: u64,
    /// `consistent[q]`: keys agreeing with the first `q + 1` query answers.
    pub consistent: Vec<u64>,
    /// Enumeration stopped at [`MAX_CANDIDATES`].
    pub truncated: bool,
}

/// Query plaintexts, in order: `E₁₁` (the unit plaintext of the classical
/// attack), `E₂₁`, `E₁₂`, `E₂₂`, then the identity.
pub fn query_plaintexts() -> [Mat2; 5] {
    [
        Mat2::from_i64([[1, 0], [0, 0]]),
        Mat2::from_i64([[0, 0], [1, 0]]),
        Mat2::from_i64([[0, 1], [0, 0]]),
        Mat2::from_i64([[0, 0], [0, 1]]),
        Mat2::identity(),
    ]
}

/// Enumerates keys in `param_box` and counts how many reproduce the
/// oracle's answers to the first `queries` chosen plaintexts.
pub fn measure_unimodular_resistance(
    oracle: &dyn EncryptionOracle,
    param_box: &ParamBox,
    queries: usize,
) -> ResistanceReport {
    let plaintexts = query_plaintexts();
    let queries = queries.clamp(1, plaintexts.len());
    let answers: Vec<Mat2> = plaintexts[..queries].iter().map(|p| oracle.query(p)).collect();
    let mut report = ResistanceReport { admissible: 0, consistent: vec![0; queries], truncated: false };
    let range = |(lo, hi): (u64, u64)| lo..=hi;

    'outer: for alpha in range(param_box.alpha) {
        for beta in range(param_box.beta) {
            for gamma in range(param_box.gamma) {
                for delta in range(param_box.delta) {
                    let m = Mat2::new(alpha.into(), beta.into(), gamma.into(), delta.into());
                    let Ok(u) = UnimodularKeyMatrix::new(m) else { continue };
                    for a0 in range(param_box.a0) {
                        for b0 in range(param_box.b0) {
                            let Ok(seed) = SeedPair::new(a0.into(), b0.into()) else { continue };
                            for n in range(param_box.n) {
                                let cm = build_coding_matrix(&u, &seed, n);
                                if cm.mu().is_zero() {
                                    break;
                                }
                                if report.admissible >= MAX_CANDIDATES {
                                    report.truncated = true;
                                    break 'outer;
                                }
                                report.admissible += 1;
                                for (q, (p, c)) in plaintexts.iter().zip(&answers).enumerate() {
                                    if &(p * cm.matrix()) != c {
                                        break;
                                    }
                                    report.consistent[q] += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report
}
